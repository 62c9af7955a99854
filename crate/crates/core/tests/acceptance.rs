//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test -p tempocode --test acceptance -- --nocapture --test-threads=1`
//! to see them all.

use std::time::Instant;

use tempocode::baseline::accumulate;
use tempocode::config::Config;
use tempocode::encoding::{code_capacity_bits, encode, CapacityMode, EncoderParams};
use tempocode::experiments::{
    run_discrimination, run_lambda_convergence, run_noise_sweep, DiscriminationConfig, LambdaConfig,
};
use tempocode::latency::{decode_displacement, inter_packet_interval};
use tempocode::report;
use tempocode::rng::SplitMix64;
use tempocode::stdp::stdp_update;
use tempocode::world::{generate_traversal, object_a, object_b, WorldParams, EDGE, SMOOTH};
use tempocode::{EvidenceState, LatencyParams, StdpParams};

fn verdict(id: &str, what: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("AC{id} PASS  {what}");
    } else {
        println!("AC{id} FAIL  {what}");
        for f in failures {
            println!("      - {f}");
        }
        panic!("AC{id} failed: {}", failures.join("; "));
    }
}

fn check(failures: &mut Vec<String>, ok: bool, msg: String) {
    if !ok {
        failures.push(msg);
    }
}

#[test]
fn ac01_discrimination_table() {
    let cfg = Config::default();
    let start = Instant::now();
    let r = run_discrimination(&DiscriminationConfig::from_config(&cfg)).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let mut f = Vec::new();
    let (d, t) = (r.overall.dense_acc, r.overall.temporal_acc);
    check(&mut f, t >= 0.99, format!("temporal overall {t:.4} < 0.99"));
    check(
        &mut f,
        (0.44..=0.58).contains(&d),
        format!("dense overall {d:.4} outside [0.44, 0.58]"),
    );
    check(
        &mut f,
        elapsed < 60.0,
        format!("runtime {elapsed:.1} s >= 60 s"),
    );
    println!(
        "      dense {:.1}% CI [{:.1}, {:.1}], temporal {:.1}% CI [{:.1}, {:.1}], {elapsed:.2} s",
        100.0 * d,
        100.0 * r.overall.dense_ci.0,
        100.0 * r.overall.dense_ci.1,
        100.0 * t,
        100.0 * r.overall.temporal_ci.0,
        100.0 * r.overall.temporal_ci.1
    );
    verdict(
        "1",
        "discrimination: temporal >= 99%, dense in [44%, 58%], < 60 s",
        &f,
    );
}

#[test]
fn ac02_noise_sweep() {
    let cfg = Config::default();
    let r = run_noise_sweep(
        &DiscriminationConfig::from_config(&cfg),
        &cfg.experiment.sigmas,
    )
    .unwrap();
    let mut f = Vec::new();
    assert_eq!(r.rows.len(), 6);
    for row in &r.rows {
        let (s, d, t) = (row.sigma, row.overall.dense_acc, row.overall.temporal_acc);
        let band = if s <= 0.20 {
            (0.97, 1.0)
        } else if s == 0.35 {
            (0.82, 0.97)
        } else {
            (0.70, 0.90)
        };
        println!(
            "      sigma {s:.2}: dense {:.1}% temporal {:.1}% CI [{:.1}, {:.1}] gap {:+.1} pp",
            100.0 * d,
            100.0 * t,
            100.0 * row.overall.temporal_ci.0,
            100.0 * row.overall.temporal_ci.1,
            row.overall.gap_pp()
        );
        check(
            &mut f,
            t >= band.0 && t <= band.1,
            format!("sigma {s}: temporal {t:.4} outside {band:?}"),
        );
        check(
            &mut f,
            (0.42..=0.58).contains(&d),
            format!("sigma {s}: dense {d:.4} outside [0.42, 0.58]"),
        );
        check(
            &mut f,
            row.overall.gap_pp() >= 25.0,
            format!("sigma {s}: gap {:.1} pp < 25", row.overall.gap_pp()),
        );
    }
    verdict(
        "2",
        "noise sweep bands and gap >= +25 pp at every sigma",
        &f,
    );
}

#[test]
fn ac03_lambda_convergence() {
    let cfg = Config::default();
    let r = run_lambda_convergence(&LambdaConfig::from_config(&cfg)).unwrap();
    let mut f = Vec::new();
    for (row, target) in r.rows.iter().zip([0.30, 0.60, 0.87]) {
        println!(
            "      {}: {:.4} (reference {target})",
            row.label, row.final_mean
        );
        check(
            &mut f,
            (row.final_mean - target).abs() <= 0.10,
            format!(
                "{} converged to {:.4}, not within 0.10 of {target}",
                row.label, row.final_mean
            ),
        );
    }
    for seed in 0..10u64 {
        let mut c = cfg.clone();
        c.world.seed = seed;
        let r = run_lambda_convergence(&LambdaConfig::from_config(&c)).unwrap();
        let (u, m, x) = (
            r.rows[0].final_mean,
            r.rows[1].final_mean,
            r.rows[2].final_mean,
        );
        check(
            &mut f,
            u < m && m < x,
            format!("seed {seed}: ordering {u:.3} {m:.3} {x:.3}"),
        );
        check(
            &mut f,
            u < 0.5 && 0.5 < x,
            format!("seed {seed}: {u:.3} / {x:.3} not split by 0.5"),
        );
    }
    verdict(
        "3",
        "lambda means within 0.10 of 0.30/0.60/0.87; ordering over 10 seeds",
        &f,
    );
}

#[test]
fn ac04_worked_example() {
    let noiseless = WorldParams {
        noise_sigma: 0.0,
        ..Default::default()
    };
    let a = generate_traversal(&object_a(), &noiseless, &[0], 0.010).unwrap();
    let b = generate_traversal(&object_b(), &noiseless, &[1], 0.010).unwrap();
    let mut f = Vec::new();
    let (sa, sb) = (accumulate(&a), accumulate(&b));
    check(
        &mut f,
        sa == sb,
        format!("dense sums differ: {sa:?} vs {sb:?}"),
    );
    // 0.2 + 0.8 + 0.2 over binary doubles rounds to the neighbour of 1.2, so
    // the decimal value is pinned to one ulp.
    let ulp = 1.2f64.next_up() - 1.2;
    check(
        &mut f,
        sa.iter().all(|&v| (v - 1.2).abs() <= ulp),
        format!("sum {sa:?} != [1.2; 3]"),
    );
    let enc = EncoderParams::default();
    let lead_a = encode(&a.contacts()[0].features, &enc).leading();
    let lead_b = encode(&b.contacts()[0].features, &enc).leading();
    check(
        &mut f,
        lead_a == Some(SMOOTH),
        format!("A leads with {lead_a:?}"),
    );
    check(
        &mut f,
        lead_b == Some(EDGE),
        format!("B leads with {lead_b:?}"),
    );
    verdict(
        "4",
        "identical dense sums, different first-firing neurons",
        &f,
    );
}

#[test]
fn ac05_encoder_unit_vector() {
    let tau = 0.010;
    let p = tempocode::encoding::encode_values(&[0.2, 0.9, 0.1, 0.7], &EncoderParams::default())
        .unwrap();
    let mut f = Vec::new();
    for (id, want) in [(1, 0.0), (3, tau / 3.0), (0, 2.0 * tau / 3.0)] {
        match p.get(id) {
            Some(t) => check(
                &mut f,
                (t - want).abs() < 1e-12,
                format!("neuron {id} at {t}, want {want}"),
            ),
            None => f.push(format!("neuron {id} silent")),
        }
    }
    let order: Vec<_> = p.firing_order().into_iter().map(|(i, _)| i).collect();
    check(
        &mut f,
        order == vec![1, 3, 0],
        format!("firing order {order:?}"),
    );
    check(&mut f, p.get(2).is_none(), "neuron 2 fired".into());
    verdict(
        "5",
        "[0.2,0.9,0.1,0.7] -> (1,3,0) at (0, tau/3, 2tau/3)",
        &f,
    );
}

#[test]
fn ac06_stdp_window() {
    let p = StdpParams::default();
    let tau = p.tau_plus;
    let mut f = Vec::new();
    let e1 = (-1f64).exp();
    let pot = stdp_update(0.0, 0.0, tau, &p);
    let dep = stdp_update(0.0, tau, 0.0, &p);
    check(
        &mut f,
        (pot - p.a_plus * e1).abs() < 1e-12,
        format!("potentiation at tau {pot}"),
    );
    check(
        &mut f,
        (dep + p.a_minus * e1).abs() < 1e-12,
        format!("depression at tau {dep}"),
    );

    let grid: Vec<f64> = (-50..=50).map(|k| k as f64 * 0.1 * tau).collect();
    for &dt in &grid {
        if dt == 0.0 {
            check(
                &mut f,
                stdp_update(0.3, 0.0, dt, &p) == 0.3,
                "dt = 0 changed w".into(),
            );
            continue;
        }
        let fwd = stdp_update(0.3, 0.0, dt, &p) - 0.3;
        let rev = stdp_update(0.3, dt, 0.0, &p) - 0.3;
        check(
            &mut f,
            (fwd + rev).abs() < 1e-15,
            format!("antisymmetry fails at dt {dt}"),
        );
    }
    for pair in grid.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a > 0.0 {
            let (da, db) = (stdp_update(0.0, 0.0, a, &p), stdp_update(0.0, 0.0, b, &p));
            check(
                &mut f,
                db.abs() < da.abs(),
                format!("|dw| not decreasing between {a} and {b}"),
            );
        }
        if b < 0.0 {
            let (da, db) = (stdp_update(0.0, 0.0, a, &p), stdp_update(0.0, 0.0, b, &p));
            check(
                &mut f,
                da.abs() < db.abs(),
                format!("|dw| not decreasing between {b} and {a}"),
            );
        }
    }
    verdict(
        "6",
        "STDP window: A*e^-1 at tau, antisymmetry, monotone decay on [-5tau, 5tau]",
        &f,
    );
}

#[test]
fn ac07_evidence_invariants() {
    let mut rng = SplitMix64::new(7);
    let mut f = Vec::new();
    let classes = 4;
    let mut s = EvidenceState::new(classes, 0.5, 0.05).unwrap();
    for op in 0..100_000 {
        if rng.next_f64() < 0.5 {
            let ll: Vec<f64> = (0..classes).map(|_| -10.0 * rng.next_f64()).collect();
            s.update(&ll).unwrap();
            let total: f64 = s.evidence().iter().sum();
            if (total - 1.0).abs() > 1e-12 || s.evidence().iter().any(|&e| e < 0.0) {
                f.push(format!(
                    "op {op}: evidence {:?} leaves the simplex",
                    s.evidence()
                ));
                break;
            }
        } else {
            let c = (rng.next_u64() % classes as u64) as usize;
            s.adapt_lambda(c, rng.next_f64()).unwrap();
            if s.lambdas().iter().any(|l| !(0.0..=1.0).contains(l)) {
                f.push(format!("op {op}: lambdas {:?} out of [0, 1]", s.lambdas()));
                break;
            }
        }
    }
    // fixed-λ geometric convergence to the normalised likelihood
    let lik = [0.5, 0.3, 0.15, 0.05];
    let ll: Vec<f64> = lik.iter().map(|x: &f64| x.ln()).collect();
    for lambda in [0.0, 0.3, 0.7, 0.9] {
        let mut s = EvidenceState::from_parts(vec![0.97, 0.01, 0.01, 0.01], vec![lambda; 4], 0.001)
            .unwrap();
        let mut prev_err = f64::INFINITY;
        for _ in 0..100 {
            s.update(&ll).unwrap();
            let err: f64 = s
                .evidence()
                .iter()
                .zip(&lik)
                .map(|(a, b)| (a - b).abs())
                .sum();
            check(
                &mut f,
                err <= prev_err * lambda.max(1e-300) + 1e-15 || err < 1e-15,
                format!("lambda {lambda}: no contraction"),
            );
            prev_err = err;
        }
        check(
            &mut f,
            prev_err < 1e-4,
            format!("lambda {lambda}: residual {prev_err}"),
        );
    }
    verdict(
        "7",
        "simplex and lambda bounds over 1e5 random ops; fixed-lambda convergence",
        &f,
    );
}

#[test]
fn ac08_latency_round_trip() {
    let mut f = Vec::new();
    let enc = EncoderParams::default();
    for v_true in [0.5, 1.0, 3.0] {
        let world = WorldParams {
            velocity: v_true,
            noise_sigma: 0.0,
            ..Default::default()
        };
        let t = generate_traversal(&object_a(), &world, &[9], enc.tau_base).unwrap();
        let packets: Vec<_> = t
            .contacts()
            .iter()
            .map(|c| tempocode::encoding::encode_at(&c.features, &enc, c.time))
            .collect();
        for (k, pair) in packets.windows(2).enumerate() {
            let dt = inter_packet_interval(&pair[0], &pair[1]).unwrap();
            let truth: Vec<f64> = (0..3)
                .map(|i| t.contacts()[k + 1].position[i] - t.contacts()[k].position[i])
                .collect();
            let exact = decode_displacement(
                dt,
                t.motor_direction(),
                &LatencyParams::new(v_true).unwrap(),
            )
            .unwrap();
            for (got, want) in exact.to_array().iter().zip(&truth) {
                check(
                    &mut f,
                    (got - want).abs() < 1e-9,
                    format!("v {v_true}: {got} vs {want}"),
                );
            }
            let true_norm = truth.iter().map(|x| x * x).sum::<f64>().sqrt();
            for c in [0.5, 2.0] {
                let d = decode_displacement(
                    dt,
                    t.motor_direction(),
                    &LatencyParams::new(c * v_true).unwrap(),
                )
                .unwrap();
                let ratio = d.norm() / true_norm;
                check(
                    &mut f,
                    (ratio - c).abs() / c < 1e-9,
                    format!("v {v_true}, c {c}: ratio {ratio}"),
                );
            }
        }
    }
    verdict(
        "8",
        "displacement round trip within 1e-9; magnitude error scales with c",
        &f,
    );
}

#[test]
fn ac09_determinism() {
    let cfg = Config::default();
    let mut f = Vec::new();
    let dc = DiscriminationConfig::from_config(&cfg);
    let serial = DiscriminationConfig {
        parallel: false,
        ..dc.clone()
    };
    let a = run_discrimination(&dc).unwrap();
    let b = run_discrimination(&dc).unwrap();
    let c = run_discrimination(&serial).unwrap();
    check(
        &mut f,
        report::discrimination_csv(&a) == report::discrimination_csv(&b),
        "discrimination CSV differs between runs".into(),
    );
    check(
        &mut f,
        report::discrimination_json(&a, &cfg) == report::discrimination_json(&b, &cfg),
        "discrimination JSON differs".into(),
    );
    check(
        &mut f,
        report::discrimination_json(&a, &cfg) == report::discrimination_json(&c, &cfg),
        "parallel vs serial JSON differs".into(),
    );
    check(
        &mut f,
        a.models == c.models,
        "parallel vs serial weights differ".into(),
    );

    let s1 = run_noise_sweep(&dc, &cfg.experiment.sigmas).unwrap();
    let s2 = run_noise_sweep(&serial, &cfg.experiment.sigmas).unwrap();
    check(
        &mut f,
        report::noise_sweep_csv(&s1) == report::noise_sweep_csv(&s2),
        "sweep CSV differs".into(),
    );
    check(
        &mut f,
        report::noise_sweep_json(&s1, &cfg) == report::noise_sweep_json(&s2, &cfg),
        "sweep JSON differs".into(),
    );

    let l1 = run_lambda_convergence(&LambdaConfig::from_config(&cfg)).unwrap();
    let l2 = run_lambda_convergence(&LambdaConfig::from_config(&cfg)).unwrap();
    check(
        &mut f,
        report::lambda_trajectory_csv(&l1) == report::lambda_trajectory_csv(&l2),
        "lambda CSV differs".into(),
    );
    check(
        &mut f,
        report::lambda_json(&l1, &cfg) == report::lambda_json(&l2, &cfg),
        "lambda JSON differs".into(),
    );
    verdict(
        "9",
        "byte-identical reports across reruns; parallel == serial",
        &f,
    );
}

/// log2(n!) by direct summation.
fn log2_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).log2()).sum()
}

/// C(n, k) from Pascal's triangle, exact in u64 for n <= 16.
fn binomial(n: usize, k: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![1u64; row.len() + 1];
        for j in 1..row.len() {
            next[j] = row[j - 1] + row[j];
        }
        row = next;
    }
    row[k]
}

#[test]
fn ac10_capacity() {
    let mut f = Vec::new();
    let spot = code_capacity_bits(3, CapacityMode::Ordered).unwrap();
    check(
        &mut f,
        (spot - 2.584_962_500_721_156).abs() < 1e-9,
        format!("log2(3!) = {spot}"),
    );
    for n in 2..=16u64 {
        let ordered = code_capacity_bits(n, CapacityMode::Ordered).unwrap();
        check(
            &mut f,
            (ordered - log2_factorial(n)).abs() < 1e-9,
            format!("log2({n}!) = {ordered}"),
        );
        for k in 1..n {
            let unordered = code_capacity_bits(k, CapacityMode::Unordered { n_total: n }).unwrap();
            let oracle = (binomial(n as usize, k as usize) as f64).log2();
            check(
                &mut f,
                (unordered - oracle).abs() < 1e-9,
                format!("log2 C({n},{k}) = {unordered}, oracle {oracle}"),
            );
            check(
                &mut f,
                ordered > unordered,
                format!("N={n}, k={k}: log2(N!) = {ordered} is not > log2(C(N,k)) = {unordered}"),
            );
        }
    }
    verdict(
        "10",
        "log2(N!) > log2(C(N,k)) for 2 <= N <= 16, 1 <= k < N; log2(3!) spot value",
        &f,
    );
}
