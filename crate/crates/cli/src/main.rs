use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use tempocode::config::Config;
use tempocode::encoding::{self, CapacityMode, EncoderParams};
use tempocode::experiments::{
    run_discrimination, run_lambda_convergence, run_noise_sweep, DiscriminationConfig,
    DiscriminationReport, LambdaConfig,
};
use tempocode::inference::{InferenceLoop, Motor};
use tempocode::report;
use tempocode::world::{self, generate_traversal, WorldParams};

#[derive(Parser)]
#[command(
    name = "tempocode",
    version,
    about = "Rank-order temporal coding experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Traversal discrimination: temporal STDP models vs dense centroids.
    Discriminate(RunArgs),
    /// Discrimination accuracy across sensor noise levels.
    NoiseSweep(RunArgs),
    /// Adaptive λ convergence for Uniform / Moderate / Complex objects.
    LambdaConverge(RunArgs),
    /// Encode one feature vector into a rank-order spike packet.
    Encode {
        /// Comma-separated activations, e.g. 0.2,0.9,0.1,0.7
        #[arg(long, allow_hyphen_values = true)]
        features: String,
        #[arg(long)]
        tau_base: Option<f64>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Bits per volley of ordered (and optionally unordered) codes.
    Capacity {
        /// Population size N (active neurons for the ordered code).
        #[arg(long)]
        n: u64,
        /// Active neurons k for the unordered code.
        #[arg(long)]
        k: Option<u64>,
    },
    /// Stream per-step inference diagnostics as JSON lines for one traversal.
    Explore {
        #[command(flatten)]
        common: CommonArgs,
        /// Label of the object to traverse.
        #[arg(long, default_value = "A")]
        object: String,
        /// Sensor noise; defaults to experiment.sigma.
        #[arg(long)]
        sigma: Option<f64>,
    },
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON config file; missing fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides world.seed.
    #[arg(long, env = "TEMPOCODE_SEED")]
    seed: Option<u64>,
    /// Object file replacing the built-in objects A and B.
    #[arg(long)]
    objects: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Root directory for report files (out/<experiment>/<timestamp>/).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also write two-column curve data under curves/.
    #[arg(long)]
    plot: bool,
    /// Run trials on one thread.
    #[arg(long)]
    serial: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.into())
    }
}

fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_config(common: &CommonArgs) -> Result<Config, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))
                .map_err(config_err)?;
            Config::from_json(&text)
                .with_context(|| format!("in {}", path.display()))
                .map_err(config_err)?
        }
        None => Config::default(),
    };
    if let Some(seed) = common.seed {
        cfg.world.seed = seed;
    }
    Ok(cfg)
}

fn discrimination_config(
    cfg: &Config,
    common: &CommonArgs,
) -> Result<DiscriminationConfig, Failure> {
    let mut dc = DiscriminationConfig::from_config(cfg);
    if let Some(path) = &common.objects {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read objects {}", path.display()))
            .map_err(config_err)?;
        dc.objects = world::parse_objects(&text)
            .with_context(|| format!("in {}", path.display()))
            .map_err(config_err)?;
    }
    dc.validate().map_err(config_err)?;
    Ok(dc)
}

struct Rendered {
    text: String,
    csv: String,
    json: String,
    extra: Vec<(String, String)>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Discriminate(args) => {
            let mut cfg = load_config(&args.common)?;
            cfg.experiment.parallel &= !args.serial;
            let dc = discrimination_config(&cfg, &args.common)?;
            let r = run_discrimination(&dc)?;
            let mut extra = model_files(&r);
            if args.plot {
                extra.extend(discrimination_curves(&r));
            }
            let out = Rendered {
                text: report::discrimination_text(&r),
                csv: report::discrimination_csv(&r),
                json: report::discrimination_json(&r, &cfg),
                extra,
            };
            emit("discriminate", &args, out)
        }
        Command::NoiseSweep(args) => {
            let mut cfg = load_config(&args.common)?;
            cfg.experiment.parallel &= !args.serial;
            let dc = discrimination_config(&cfg, &args.common)?;
            let r = run_noise_sweep(&dc, &cfg.experiment.sigmas)?;
            let mut extra = Vec::new();
            if args.plot {
                let curve = |f: fn(&DiscriminationReport) -> f64| {
                    report::dat(r.rows.iter().map(|row| (row.sigma, f(row))))
                };
                extra.push((
                    "curves/dense.dat".into(),
                    curve(|row| row.overall.dense_acc),
                ));
                extra.push((
                    "curves/temporal.dat".into(),
                    curve(|row| row.overall.temporal_acc),
                ));
            }
            let out = Rendered {
                text: report::noise_sweep_text(&r),
                csv: report::noise_sweep_csv(&r),
                json: report::noise_sweep_json(&r, &cfg),
                extra,
            };
            emit("noise-sweep", &args, out)
        }
        Command::LambdaConverge(args) => {
            let cfg = load_config(&args.common)?;
            if args.common.objects.is_some() {
                return Err(config_err(anyhow::anyhow!(
                    "--objects is not supported by lambda-converge"
                )));
            }
            let r = run_lambda_convergence(&LambdaConfig::from_config(&cfg))?;
            let mut extra = vec![(
                "trajectory.csv".to_string(),
                report::lambda_trajectory_csv(&r),
            )];
            if args.plot {
                for (row, traj) in r.rows.iter().zip(&r.trajectories) {
                    let pts = traj.iter().enumerate().map(|(s, &l)| ((s + 1) as f64, l));
                    extra.push((
                        format!("curves/{}.dat", row.label.to_lowercase()),
                        report::dat(pts),
                    ));
                }
            }
            let out = Rendered {
                text: report::lambda_text(&r),
                csv: report::lambda_csv(&r),
                json: report::lambda_json(&r, &cfg),
                extra,
            };
            emit("lambda-converge", &args, out)
        }
        Command::Encode {
            features,
            tau_base,
            threshold,
        } => {
            let defaults = EncoderParams::default();
            let params = EncoderParams {
                tau_base: tau_base.unwrap_or(defaults.tau_base),
                threshold: threshold.unwrap_or(defaults.threshold),
            };
            params.validate().map_err(config_err)?;
            let fv = encoding::parse_features(&features).map_err(config_err)?;
            println!(
                "{}",
                encoding::packet_to_json(&encoding::encode(&fv, &params))
            );
            Ok(())
        }
        Command::Capacity { n, k } => {
            let ordered =
                encoding::code_capacity_bits(n, CapacityMode::Ordered).map_err(config_err)?;
            println!("ordered: {ordered:.3} bits");
            if let Some(k) = k {
                let unordered =
                    encoding::code_capacity_bits(k, CapacityMode::Unordered { n_total: n })
                        .map_err(config_err)?;
                println!("unordered (k={k} of {n}): {unordered:.3} bits");
            }
            Ok(())
        }
        Command::Explore {
            common,
            object,
            sigma,
        } => {
            let cfg = load_config(&common)?;
            let mut dc = discrimination_config(&cfg, &common)?;
            dc.parallel = false;
            let target = dc
                .objects
                .iter()
                .find(|o| o.label == object)
                .cloned()
                .ok_or_else(|| config_err(anyhow::anyhow!("no object labelled `{object}`")))?;
            let trained = run_discrimination(&dc)?;
            let mut agent = InferenceLoop::new(
                trained.models,
                cfg.encoder,
                cfg.stdp,
                cfg.scoring,
                cfg.accumulator.initial_lambda,
                cfg.accumulator.alpha,
            )?;
            let wp = WorldParams {
                noise_sigma: sigma.unwrap_or(cfg.experiment.sigma),
                ..dc.world
            };
            wp.validate(cfg.encoder.tau_base).map_err(config_err)?;
            let t = generate_traversal(&target, &wp, &[0xE4, 0], cfg.encoder.tau_base)?;
            let motor = Motor {
                velocity: wp.velocity,
                direction: t.motor_direction(),
            };
            for c in t.contacts() {
                let (_, diag) = agent.exploration_step(&c.features, c.time, motor)?;
                println!("{}", diag.to_json_line());
            }
            Ok(())
        }
    }
}

fn model_files(r: &DiscriminationReport) -> Vec<(String, String)> {
    r.models
        .iter()
        .map(|m| (format!("models/{}.json", m.label), m.weights.to_json()))
        .collect()
}

fn discrimination_curves(r: &DiscriminationReport) -> Vec<(String, String)> {
    let pts = |f: fn(&tempocode::experiments::Accuracy) -> f64| {
        report::dat(
            r.per_object
                .iter()
                .enumerate()
                .map(|(i, a)| (i as f64, f(a))),
        )
    };
    vec![
        ("curves/dense.dat".into(), pts(|a| a.dense_acc)),
        ("curves/temporal.dat".into(), pts(|a| a.temporal_acc)),
    ]
}

fn emit(experiment: &str, args: &RunArgs, out: Rendered) -> Result<(), Failure> {
    let shown = match args.format {
        Format::Text => &out.text,
        Format::Csv => &out.csv,
        Format::Json => &out.json,
    };
    print!("{shown}");
    let root = match (&args.out, args.plot) {
        (Some(root), _) => root.clone(),
        (None, true) => PathBuf::from("out"),
        (None, false) => return Ok(()),
    };
    let dir = run_dir(&root, experiment)?;
    let mut files = vec![
        ("report.txt".to_string(), out.text),
        ("report.csv".to_string(), out.csv),
        ("report.json".to_string(), out.json),
    ];
    files.extend(out.extra);
    for (name, body) in files {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    eprintln!("wrote {}", dir.display());
    Ok(())
}

/// `root/<experiment>/<UTC timestamp>`, suffixed when a run in the same
/// second already claimed the name.
fn run_dir(root: &Path, experiment: &str) -> Result<PathBuf, Failure> {
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string();
    let base = root.join(experiment);
    fs::create_dir_all(&base).with_context(|| format!("creating {}", base.display()))?;
    let mut dir = base.join(&stamp);
    let mut k = 1;
    while dir.exists() {
        dir = base.join(format!("{stamp}-{k}"));
        k += 1;
    }
    fs::create_dir_all(&dir)?;
    Ok(dir)
}
