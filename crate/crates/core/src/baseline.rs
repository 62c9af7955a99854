//! Dense accumulation baseline: sum a traversal's contact vectors, classify
//! by nearest class centroid.

use crate::error::{Error, Result};
use crate::types::Traversal;

#[derive(Debug, Clone, PartialEq)]
pub struct Centroid {
    pub label: String,
    pub mean_sum: Vec<f64>,
}

/// Componentwise sum of a traversal's contact vectors.
/// Per-component sum of the contact vectors. Each component is correctly
/// rounded, so the result does not depend on contact order.
pub fn accumulate(traversal: &Traversal) -> Vec<f64> {
    let dim = traversal.dim().unwrap_or(0);
    (0..dim)
        .map(|i| {
            exact_sum(
                traversal
                    .contacts()
                    .iter()
                    .map(|c| c.features.as_slice()[i]),
            )
        })
        .collect()
}

/// Shewchuk's exact-partials summation, rounded once at the end.
fn exact_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut kept = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }
    let Some(mut hi) = partials.pop() else {
        return 0.0;
    };
    let mut lo = 0.0;
    while let Some(y) = partials.pop() {
        let x = hi;
        hi = x + y;
        lo = y - (hi - x);
        if lo != 0.0 {
            break;
        }
    }
    // half-way case: round-half-even on the true sum
    if let Some(&next) = partials.last() {
        if (lo < 0.0 && next < 0.0) || (lo > 0.0 && next > 0.0) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
    }
    hi
}

/// One centroid per class, in the order the classes are given. `by_class[c]`
/// holds the training traversals of class `c`.
pub fn dense_train(by_class: &[(String, Vec<&Traversal>)]) -> Result<Vec<Centroid>> {
    by_class
        .iter()
        .map(|(label, trials)| {
            let first = trials
                .first()
                .ok_or_else(|| Error::EmptyClass(label.clone()))?;
            let dim = first.dim().unwrap_or(0);
            let mut mean = vec![0.0; dim];
            for t in trials {
                let s = accumulate(t);
                if s.len() != dim {
                    return Err(Error::Dimension {
                        expected: dim,
                        actual: s.len(),
                    });
                }
                mean.iter_mut().zip(&s).for_each(|(m, v)| *m += v);
            }
            let n = trials.len() as f64;
            mean.iter_mut().for_each(|m| *m /= n);
            Ok(Centroid {
                label: label.clone(),
                mean_sum: mean,
            })
        })
        .collect()
}

/// Index of the Euclidean-nearest centroid; ties go to the lowest index.
pub fn dense_classify(traversal: &Traversal, centroids: &[Centroid]) -> usize {
    let s = accumulate(traversal);
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centroid) in centroids.iter().enumerate() {
        let d: f64 = s
            .iter()
            .zip(&centroid.mean_sum)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{generate_traversal, object_a, object_b, WorldParams};

    #[test]
    fn exact_sum_is_correctly_rounded() {
        assert_eq!(exact_sum([0.9, 0.2, 0.1]), 1.2);
        assert_eq!(exact_sum([0.1, 0.2, 0.9]), 1.2);
        assert_eq!(exact_sum([0.1; 10]), 1.0);
        assert_eq!(exact_sum([1e100, 1.0, -1e100]), 1.0);
        assert_eq!(exact_sum([1.0, 1e-16, 1e-16]), 1.0000000000000002);
        assert_eq!(exact_sum([]), 0.0);
    }

    fn noiseless() -> WorldParams {
        WorldParams {
            noise_sigma: 0.0,
            ..Default::default()
        }
    }

    #[test]
    fn noiseless_centroids_coincide() {
        let a = generate_traversal(&object_a(), &noiseless(), &[0], 0.01).unwrap();
        let b = generate_traversal(&object_b(), &noiseless(), &[1], 0.01).unwrap();
        let cents = dense_train(&[("A".into(), vec![&a, &a, &a]), ("B".into(), vec![&b])]).unwrap();
        for v in &cents[0].mean_sum {
            assert!((v - 1.2).abs() < 1e-12);
        }
        assert_eq!(cents[0].mean_sum, cents[1].mean_sum);
        // tie goes to class 0 whichever object is shown
        assert_eq!(dense_classify(&a, &cents), 0);
        assert_eq!(dense_classify(&b, &cents), 0);
    }

    #[test]
    fn single_trial_centroid_is_its_sum() {
        let p = WorldParams::default();
        let a = generate_traversal(&object_a(), &p, &[5], 0.01).unwrap();
        let cents = dense_train(&[("A".into(), vec![&a])]).unwrap();
        assert_eq!(cents[0].mean_sum, accumulate(&a));
    }

    #[test]
    fn exact_match_wins() {
        let p = WorldParams::default();
        let a = generate_traversal(&object_a(), &p, &[5], 0.01).unwrap();
        let cents = vec![
            Centroid {
                label: "far".into(),
                mean_sum: vec![9.0; 3],
            },
            Centroid {
                label: "A".into(),
                mean_sum: accumulate(&a),
            },
        ];
        assert_eq!(dense_classify(&a, &cents), 1);
    }

    #[test]
    fn empty_class_rejected() {
        assert_eq!(
            dense_train(&[("A".into(), vec![])]),
            Err(Error::EmptyClass("A".into()))
        );
    }
}
