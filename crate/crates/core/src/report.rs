//! Text, CSV and JSON renderings of experiment reports.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;

use crate::config::Config;
use crate::experiments::{Accuracy, DiscriminationReport, LambdaReport, NoiseSweepReport};

pub const CSV_HEADER: &str = "experiment,param,dense_acc,temporal_acc,gap_pp,ci_low,ci_high";

fn pct(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

fn ci(c: (f64, f64)) -> String {
    format!("[{:.1}, {:.1}]", 100.0 * c.0, 100.0 * c.1)
}

fn csv_row(out: &mut String, experiment: &str, param: &str, a: &Accuracy) {
    let _ = writeln!(
        out,
        "{experiment},{param},{:.6},{:.6},{:.2},{:.6},{:.6}",
        a.dense_acc,
        a.temporal_acc,
        a.gap_pp(),
        a.temporal_ci.0,
        a.temporal_ci.1
    );
}

fn envelope<T: Serialize>(experiment: &str, config: &Config, results: &T) -> String {
    let doc = json!({
        "experiment": experiment,
        "config": config,
        "results": results,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
    s.push('\n');
    s
}

pub fn discrimination_text(r: &DiscriminationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Traversal discrimination (noise sigma = {:.2})",
        r.sigma
    );
    let _ = writeln!(
        out,
        "{:<12} {:>8} {:<14} {:>9} 95% CI",
        "Object", "Dense", "95% CI", "Temporal"
    );
    for a in r.per_object.iter().chain(std::iter::once(&r.overall)) {
        let _ = writeln!(
            out,
            "{:<12} {:>8} {:<14} {:>9} {}",
            a.label,
            pct(a.dense_acc),
            ci(a.dense_ci),
            pct(a.temporal_acc),
            ci(a.temporal_ci)
        );
    }
    let _ = writeln!(
        out,
        "Gap: {:+.1} pp ({} test trials per object)",
        r.overall.gap_pp(),
        r.per_object.first().map_or(0, |a| a.n)
    );
    out
}

pub fn discrimination_csv(r: &DiscriminationReport) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for a in &r.per_object {
        csv_row(&mut out, "discriminate", &format!("object={}", a.label), a);
    }
    csv_row(&mut out, "discriminate", "overall", &r.overall);
    out
}

pub fn discrimination_json(r: &DiscriminationReport, config: &Config) -> String {
    envelope("discriminate", config, r)
}

pub fn noise_sweep_text(r: &NoiseSweepReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Noise robustness");
    let _ = writeln!(
        out,
        "{:>6} {:>8} {:<14} {:>9} {:<14} {:>9}",
        "sigma", "Dense", "95% CI", "Temporal", "95% CI", "Gap"
    );
    for row in &r.rows {
        let a = &row.overall;
        let _ = writeln!(
            out,
            "{:>6.2} {:>8} {:<14} {:>9} {:<14} {:>+6.1} pp",
            row.sigma,
            pct(a.dense_acc),
            ci(a.dense_ci),
            pct(a.temporal_acc),
            ci(a.temporal_ci),
            a.gap_pp()
        );
    }
    out
}

pub fn noise_sweep_csv(r: &NoiseSweepReport) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for row in &r.rows {
        csv_row(
            &mut out,
            "noise-sweep",
            &format!("sigma={:.2}", row.sigma),
            &row.overall,
        );
    }
    out
}

pub fn noise_sweep_json(r: &NoiseSweepReport, config: &Config) -> String {
    envelope("noise-sweep", config, r)
}

pub fn lambda_text(r: &LambdaReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Lambda convergence");
    let _ = writeln!(
        out,
        "{:<10} {:<9} {:>10} {:>18}",
        "Object", "Contacts", "Base err", "Lambda (final)"
    );
    for row in &r.rows {
        let _ = writeln!(
            out,
            "{:<10} {:<9} {:>10.4} {:>18.2}",
            row.label, row.contacts, row.base_error, row.final_mean
        );
    }
    out
}

pub fn lambda_csv(r: &LambdaReport) -> String {
    let mut out = String::from("experiment,object_type,contacts,base_error,lambda_final_mean\n");
    for row in &r.rows {
        let _ = writeln!(
            out,
            "lambda-converge,{},{},{:.6},{:.6}",
            row.label, row.contacts, row.base_error, row.final_mean
        );
    }
    out
}

/// λ trajectory export, one `step,object_type,lambda` row per step.
pub fn lambda_trajectory_csv(r: &LambdaReport) -> String {
    let mut out = String::from("step,object_type,lambda\n");
    for (row, traj) in r.rows.iter().zip(&r.trajectories) {
        for (step, l) in traj.iter().enumerate() {
            let _ = writeln!(out, "{},{},{:.9}", step + 1, row.label, l);
        }
    }
    out
}

pub fn lambda_json(r: &LambdaReport, config: &Config) -> String {
    envelope("lambda-converge", config, r)
}

/// Two-column whitespace-separated data, one point per line.
pub fn dat(points: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut out = String::new();
    for (x, y) in points {
        let _ = writeln!(out, "{x} {y}");
    }
    out
}
