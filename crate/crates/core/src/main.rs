use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ris3d::cli::{self, ExperimentKind, RisMode, RunConfig};
use ris3d::los::EnvironmentPreset;
use ris3d::Error;

/// Simulate RIS-assisted BS-to-UAV links and write CSV results.
#[derive(Debug, Parser)]
#[command(name = "ris3d", version)]
struct Args {
    /// TOML run configuration; defaults apply to every omitted key.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long, value_parser = parse_experiment)]
    experiment: Option<ExperimentKind>,

    /// Output directory [default: $RIS3D_OUT_DIR or ./ris3d-out]
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_parser = clap::value_parser!(u64).range(0..=i64::MAX as u64))]
    seed: Option<u64>,

    /// Cap on worker threads.
    #[arg(long)]
    threads: Option<usize>,

    #[arg(long, value_parser = parse_ris)]
    ris: Option<RisMode>,

    /// Environment preset, overriding the config file.
    #[arg(long, value_parser = parse_env)]
    environment: Option<EnvironmentPreset>,
}

fn parse_experiment(s: &str) -> Result<ExperimentKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_ris(s: &str) -> Result<RisMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_env(s: &str) -> Result<EnvironmentPreset, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn configure(args: &Args) -> Result<(RunConfig, PathBuf), Error> {
    let mut config = match &args.config {
        Some(path) => cli::read_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(e) = args.experiment {
        config.experiment = e;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(r) = args.ris {
        config.ris = r;
    }
    if let Some(p) = args.environment {
        let (alpha, kappa, gamma) = p.parameters();
        let sc = &mut config.scenario;
        sc.environment = p.name().to_string();
        sc.alpha = alpha;
        sc.kappa = kappa;
        sc.gamma = gamma;
    }
    config.validate()?;
    let out = args
        .out
        .clone()
        .or_else(|| config.output_dir.clone().map(PathBuf::from))
        .or_else(|| std::env::var_os(cli::OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(cli::DEFAULT_OUT_DIR));
    Ok((config, out))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = configure(&args).and_then(|(config, out)| {
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(n) = args.threads {
            pool = pool.num_threads(n.max(1));
        }
        let pool = pool
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| cli::run(&config, &out))
    });
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ris3d: {e}");
            ExitCode::FAILURE
        }
    }
}
