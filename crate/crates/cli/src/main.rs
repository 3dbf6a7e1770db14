//! `hslab` — runs verification campaigns and writes machine-readable reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hslab_core::campaign::{run_campaign, RunConfig};
use hslab_core::verify::{self, comparability_report, ComparabilityPair, SampleMode, SampleStrategy};
use hslab_core::{Exponent, LabError, Verdict, CLAIMS};

const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "hslab", version, about = "Verification campaigns for Bregman divergences and Hardy–Stein identities")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "HSLAB_THREADS")]
    threads: Option<usize>,
    /// Single worker thread; reductions run in a fixed order.
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every campaign of a TOML configuration.
    Run {
        config: PathBuf,
        /// Override the report directory of the configuration.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the claim registry.
    ListClaims,
    /// Tabulate |J_p|/G_p along the diverging family as CSV.
    ScanCounterexample {
        #[arg(long)]
        p: f64,
        /// Comma-separated scan parameters.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u64>,
    },
    /// Estimate observed comparability constants.
    EstimateConstants {
        /// F_vs_G, H_vs_G, F_vs_halfpower or absJ_vs_G.
        #[arg(long)]
        pair: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Vector dimension (absJ_vs_G is always planar).
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let threads = if cli.deterministic { Some(1) } else { cli.threads };
    if let Some(n) = threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure worker threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}

fn error_code(e: &LabError) -> u8 {
    match e {
        LabError::Accuracy { .. } | LabError::Singularity(_) | LabError::Degenerate(_) => 2,
        LabError::Io(_) => 1,
        _ => EXIT_USAGE,
    }
}

fn dispatch(cmd: Command) -> hslab_core::Result<u8> {
    match cmd {
        Command::Run { config, output } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(o) = output {
                cfg.output = o;
            }
            let summary = run_campaign(&cfg)?;
            let total = summary.records.len();
            let failed: Vec<_> = summary.failures().collect();
            println!("{} checks, {} passed; reports in {}", total, total - failed.len(), cfg.output.display());
            for r in &failed {
                println!("  {} {} [{}] {}: {}", r.verdict.as_str(), r.claim_id, r.campaign, r.check, r.note);
            }
            Ok(summary.status.exit_code() as u8)
        }
        Command::ListClaims => {
            println!("{:<32} {:<20} statement", "claim_id", "module");
            for c in CLAIMS {
                println!("{:<32} {:<20} {}", c.id, c.module, c.statement);
            }
            println!("{} claims", CLAIMS.len());
            Ok(0)
        }
        Command::ScanCounterexample { p, k } => {
            let rows = verify::counterexample_scan(p, &k)?;
            println!("k,ratio,closed_form,rel_err");
            for r in &rows {
                println!("{},{:e},{:e},{:e}", r.k, r.ratio, r.closed_form, r.rel_err);
            }
            let ok = rows.iter().all(|r| r.rel_err <= 1e-10);
            Ok(if ok { 0 } else { 1 })
        }
        Command::EstimateConstants { pair, p, samples, seed, dim } => {
            let pair = ComparabilityPair::parse(&pair)?;
            let e = Exponent::new(p)?;
            if !(1..=3).contains(&dim) {
                return Err(LabError::param("--dim must be 1, 2 or 3"));
            }
            let strategy = SampleStrategy::new(SampleMode::Mixture, samples, seed)?;
            let est = verify::estimate_comparability(pair, e, dim, &strategy)?;
            let report = comparability_report(&est);
            println!("pair,p,n,samples,skipped,lower,upper,verdict");
            println!(
                "{},{},{},{},{},{:e},{:e},{}",
                pair.name(),
                p,
                est.n,
                est.samples,
                est.skipped,
                est.lower,
                est.upper,
                Verdict::from_pass(report.pass).as_str()
            );
            Ok(if report.pass { 0 } else { 1 })
        }
    }
}
