//! Command-line entry point: `run`, `list`, and `indices`.

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use tcbm_lab::config::{self, FileConfig, Overrides, Profile};
use tcbm_lab::report::{self, Report, Timing};
use tcbm_lab::{experiments, registry};

#[derive(Parser)]
#[command(
    name = "tcbm-lab",
    version,
    about = "Verification lab for time-changed Brownian motion: measures, couplings, resolvents"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Default)]
struct OverrideArgs {
    /// Base Monte Carlo path count.
    #[arg(long)]
    paths: Option<u64>,
    /// Base step width of the driving walks.
    #[arg(long)]
    dt: Option<f64>,
    /// Horizon of the driving walks.
    #[arg(long)]
    t_max: Option<f64>,
    /// Ambient dimension (experiments that accept it).
    #[arg(long)]
    d: Option<u32>,
    /// Resolvent parameter α.
    #[arg(long)]
    alpha: Option<f64>,
    /// Hölder slack ε.
    #[arg(long)]
    eps: Option<f64>,
    /// Ball-mass exponent κ.
    #[arg(long)]
    kappa: Option<f64>,
    /// Exponent-table depth.
    #[arg(long)]
    n: Option<u32>,
    /// Measure family, e.g. `lebesgue`, `radial-power:beta=1.5,c=1`.
    #[arg(long)]
    measure: Option<String>,
}

impl From<OverrideArgs> for Overrides {
    fn from(a: OverrideArgs) -> Overrides {
        Overrides {
            paths: a.paths,
            dt: a.dt,
            t_max: a.t_max,
            d: a.d,
            alpha: a.alpha,
            eps: a.eps,
            kappa: a.kappa,
            n: a.n,
            measure: a.measure,
        }
    }
}

// A process parses exactly one command, so the size gap between variants
// never multiplies.
#[allow(clippy::large_enum_variant)]
#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment (or `verify-all`); writes report.json, one CSV per
    /// experiment, and timing.json. Exit code 0 iff every hard verdict passes.
    Run {
        /// Experiment name from `list`, or `verify-all`.
        experiment: Option<String>,
        /// TOML config file; CLI flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        /// RNG seed (required here or in the config; never defaulted).
        #[arg(long)]
        seed: Option<u64>,
        /// smoke (seconds per experiment) or full (verification grade).
        #[arg(long, value_enum)]
        profile: Option<Profile>,
        /// Output directory for the artifacts.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Print the experiment catalog and the claims each experiment verifies.
    List {
        /// Also print the full claim statements.
        #[arg(long)]
        verbose: bool,
    },
    /// Print the exponent table for (d, κ, ε) up to depth n as CSV.
    Indices {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        n: u32,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Run { experiment, config, seed, profile, out, overrides } => {
            run_cmd(experiment, config, seed, profile, out, overrides.into())
        }
        Cmd::List { verbose } => {
            list_cmd(verbose);
            0
        }
        Cmd::Indices { d, kappa, eps, n } => indices_cmd(d, kappa, eps, n),
    };
    std::process::exit(code);
}

fn run_cmd(
    experiment: Option<String>,
    config_path: Option<PathBuf>,
    seed: Option<u64>,
    profile: Option<Profile>,
    out: Option<PathBuf>,
    overrides: Overrides,
) -> i32 {
    let file = match config_path.as_deref().map(FileConfig::load).transpose() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    let cfg = match config::resolve(experiment, seed, profile, out, overrides, file) {
        Ok(cfg) => cfg,
        Err(violations) => {
            eprintln!("configuration invalid ({} violation(s)):", violations.len());
            for v in &violations {
                eprintln!("  - {v}");
            }
            return 2;
        }
    };
    let started = std::time::Instant::now();
    let (results, times) = match experiments::run_selected(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("run failed: {e}");
            return 2;
        }
    };
    let report = Report::new(&cfg, results);
    let timing = Timing {
        total_seconds: started.elapsed().as_secs_f64(),
        per_experiment: times,
    };
    if let Err(e) = report::write_artifacts(&cfg.out, &report, &timing) {
        eprintln!("cannot write artifacts: {e}");
        return 2;
    }
    if cfg.experiment == "indices" {
        // A single indices run additionally ships the exponent table itself.
        let d = cfg.overrides.d.unwrap_or(3);
        let kappa = cfg.overrides.kappa.unwrap_or(1.5);
        let eps = cfg.overrides.eps.unwrap_or(0.05);
        let n = cfg.overrides.n.unwrap_or(10);
        match exponent_table_csv(d, kappa, eps, n) {
            Ok(csv_text) => {
                print!("{csv_text}");
                if let Err(e) =
                    std::fs::write(cfg.out.join("indices-table.csv"), csv_text.as_bytes())
                {
                    eprintln!("cannot write indices-table.csv: {e}");
                    return 2;
                }
            }
            Err(e) => {
                eprintln!("cannot build exponent table: {e}");
                return 2;
            }
        }
    }
    report::print_summary(&report);
    println!("artifacts: {}", display_dir(&cfg.out));
    if report.all_pass {
        0
    } else {
        1
    }
}

fn display_dir(p: &Path) -> String {
    p.display().to_string()
}

fn list_cmd(verbose: bool) {
    println!("experiments ({}):", registry::CATALOG.len());
    for exp in registry::CATALOG {
        println!("  {:<20} {}", exp.name, exp.summary);
        println!("    claims: {}", exp.claims.join(", "));
    }
    if verbose {
        println!("\nclaims ({}):", registry::CLAIMS.len());
        for claim in registry::CLAIMS {
            println!("  {:<28} {}", claim.key, claim.statement);
        }
    }
}

fn indices_cmd(d: u32, kappa: f64, eps: f64, n: u32) -> i32 {
    match exponent_table_csv(d, kappa, eps, n) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("cannot build exponent table: {e}");
            2
        }
    }
}

/// The exponent table as CSV: scalar parameters repeated per row so the
/// file stands alone.
fn exponent_table_csv(d: u32, kappa: f64, eps: f64, n: u32) -> anyhow::Result<String> {
    let table = tcbm::indices::exponent_table(d, kappa, eps, n)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "d", "kappa", "eps", "n", "r", "q", "a", "b", "eta", "limit_exponent", "min_depth",
    ])?;
    let limit = format!("{}", table.limit.exponent);
    let depth = format!("{}", table.min_depth);
    for row in &table.rows {
        w.write_record([
            &format!("{d}"),
            &format!("{kappa}"),
            &format!("{eps}"),
            &format!("{}", row.n),
            &format!("{}", row.r),
            &format!("{}", row.q),
            &format!("{}", row.a),
            &format!("{}", row.b),
            &format!("{}", row.eta),
            &limit,
            &depth,
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
