use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use smoothlab::{execute, ExperimentConfig, Format, Kind, LabError};
use smoothlab_core::fluxcalc::catalog;

#[derive(Parser)]
#[command(name = "smoothlab", version, about = "Nonlinearity index, oscillating waves and Sobolev scaling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Index d_F, α_sup and definition checks of a flux.
    AnalyzeFlux(RunArgs),
    /// Empirical exponent of the degeneracy measure.
    FitAlpha(RunArgs),
    /// Profile equation: shock time, finite volumes, negative-time extension.
    Profile(RunArgs),
    /// WKB error against ε.
    WkbSweep(RunArgs),
    /// Cancellation ratio against ε for an incompatible direction.
    Cancellation(RunArgs),
    /// Semi-norm of v(·/ε^γ) against ε.
    SobolevScaling(RunArgs),
    /// Bounded/unbounded semi-norms of the worst-direction wave family.
    SmoothingBound(RunArgs),
    /// List the built-in fluxes with their expected index.
    Catalog {
        #[arg(long, default_value = "text")]
        format: String,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of json,csv,svg.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<Format>>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Catalog key or component list such as "[u^2/2, u^3/3]".
    #[arg(long)]
    flux: Option<String>,
    /// Override any config field, e.g. --param gamma=1.5 --param 'eps=[0.25,0.125]'.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

impl RunArgs {
    fn config(&self, kind: Kind) -> Result<ExperimentConfig, LabError> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| LabError::Usage(format!("cannot read {}: {e}", path.display())))?;
                ExperimentConfig::from_json(&text, Some(kind))?
            }
            None => ExperimentConfig::defaults(kind),
        };
        if let Some(o) = &self.out {
            c.out = o.clone();
        }
        if let Some(f) = &self.format {
            c.formats = f.clone();
        }
        if self.threads.is_some() {
            c.threads = self.threads;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(f) = &self.flux {
            c.flux = f.clone();
        }
        c.with_params(&self.params)
    }
}

fn print_catalog(format: &str) -> Result<(), LabError> {
    let entries = catalog();
    match format {
        "json" => {
            let rows: Vec<_> = entries
                .iter()
                .map(|e| {
                    let (n, d) = e.expected_alpha();
                    serde_json::json!({
                        "key": e.key,
                        "dim": e.flux.dim(),
                        "flux": e.flux.name(),
                        "d_f": e.expected_index.to_string(),
                        "alpha_sup": if n == 0 { "0".to_string() } else { format!("{n}/{d}") },
                        "note": e.note,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows).expect("catalog serializes"));
        }
        "text" => {
            println!("{:<18} {:>3} {:>5} {:>9}  note", "key", "d", "d_F", "alpha_sup");
            for e in &entries {
                let (n, d) = e.expected_alpha();
                let alpha = if n == 0 { "0".to_string() } else { format!("{n}/{d}") };
                println!(
                    "{:<18} {:>3} {:>5} {:>9}  {}",
                    e.key,
                    e.flux.dim(),
                    e.expected_index.to_string(),
                    alpha,
                    e.note
                );
            }
        }
        other => return Err(LabError::Usage(format!("catalog format must be text or json, got `{other}`"))),
    }
    Ok(())
}

fn run(args: &RunArgs, kind: Kind) -> Result<bool, LabError> {
    let config = args.config(kind)?;
    let (record, files) = execute(&config)?;
    let run = &record.run;
    println!(
        "{} {} ({}{})",
        kind,
        &run.config_hash[..12],
        record.timestamp,
        if record.cached { ", cached" } else { "" }
    );
    for v in &run.verdicts {
        println!("  [{}] {}: {}", if v.pass { "pass" } else { "FAIL" }, v.name, v.observed);
    }
    for f in files {
        println!("  wrote {}", f.display());
    }
    Ok(run.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Catalog { format } => print_catalog(format).map(|_| true),
        Command::AnalyzeFlux(a) => run(a, Kind::AnalyzeFlux),
        Command::FitAlpha(a) => run(a, Kind::FitAlpha),
        Command::Profile(a) => run(a, Kind::Profile),
        Command::WkbSweep(a) => run(a, Kind::WkbSweep),
        Command::Cancellation(a) => run(a, Kind::Cancellation),
        Command::SobolevScaling(a) => run(a, Kind::SobolevScaling),
        Command::SmoothingBound(a) => run(a, Kind::SmoothingBound),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
