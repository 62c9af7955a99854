#![no_main]
use libfuzzer_sys::fuzz_target;
use tempocode::world::{generate_traversal, parse_objects, WorldParams};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(objects) = parse_objects(text) else {
        return;
    };
    let dim = objects[0].dim();
    for obj in objects.iter().take(4) {
        assert_eq!(obj.dim(), dim);
        let t = generate_traversal(obj, &WorldParams::default(), &[0], 0.010)
            .expect("valid object traverses");
        assert_eq!(t.len(), obj.contacts.len());
    }
});
