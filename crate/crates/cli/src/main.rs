//! toeplitz-verify: batch verification runs with JSON or CSV reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use toeplitz_core::report::OutputFormat;
use toeplitz_core::suite::{self, Command};
use toeplitz_core::{Error, RunConfig, RunOutput};

/// Number of worker threads for parallel sweeps.
const THREADS_VAR: &str = "TOEPLITZ_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "toeplitz-verify",
    version,
    about = "Verify Bergman-Toeplitz operator estimates on model domains"
)]
struct Cli {
    /// kernel-check, estimates, schur, bound, essnorm, schatten, berezin or all
    command: String,
    /// key = value file; flags given on the command line take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// disc, ball2 or ball3
    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    /// weight exponent of d(w)^a dV
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// Schatten exponent
    #[arg(long)]
    s: Option<String>,
    #[arg(long = "grid-radial")]
    grid_radial: Option<String>,
    #[arg(long = "grid-angular")]
    grid_angular: Option<String>,
    /// grading exponent kappa of the radial rule
    #[arg(long)]
    grading: Option<String>,
    #[arg(long = "eps-min")]
    eps_min: Option<String>,
    /// boundary distances: "start:end" (halving) or a comma list
    #[arg(long)]
    sweep: Option<String>,
    /// e.g. "2^-m:2..9" or a comma list of levels
    #[arg(long)]
    exhaustion: Option<String>,
    /// json or csv
    #[arg(long)]
    output: Option<String>,
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
}

impl Cli {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let flags = [
            ("domain", &self.domain),
            ("p", &self.p),
            ("q", &self.q),
            ("a", &self.a),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("s", &self.s),
            ("grid-radial", &self.grid_radial),
            ("grid-angular", &self.grid_angular),
            ("grading", &self.grading),
            ("eps-min", &self.eps_min),
            ("sweep", &self.sweep),
            ("exhaustion", &self.exhaustion),
            ("output", &self.output),
            ("seed", &self.seed),
        ];
        let mut out: Vec<_> = flags
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
            .collect();
        if let Some(d) = &self.out_dir {
            out.push(("out-dir", d.display().to_string()));
        }
        out
    }

    fn config(&self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for (k, v) in self.overrides() {
            cfg.set(k, &v)?;
        }
        Ok(cfg)
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{THREADS_VAR} = '{v}' is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

fn execute(cli: &Cli) -> Result<(RunOutput, RunConfig), Error> {
    configure_threads()?;
    let cmd: Command = cli.command.parse()?;
    let cfg = cli.config()?;
    let out = suite::run(cmd, &cfg)?;
    Ok((out, cfg))
}

fn emit(out: &RunOutput, cfg: &RunConfig) -> Result<(), Error> {
    let text = match cfg.output {
        OutputFormat::Json => out.records_json()?,
        OutputFormat::Csv => out.records_csv()?,
    };
    println!("{text}");
    if let Some(dir) = &cfg.out_dir {
        out.emit(dir, cfg.output)?;
    }
    for r in &out.records {
        eprintln!("{:<28} {}", r.check, r.status);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|(out, cfg)| {
        emit(&out, &cfg)?;
        Ok(out.exit_code())
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
