use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scalarlab::operators::OracleOp;
use scalarlab::scenarios::{
    cmd_oracle, cmd_run, cmd_sweep, cmd_verify, fmt_f64, resolve_out_dir, write_json, ExitStatus, OracleRequest,
    RunConfig,
};
use scalarlab::Error;

#[derive(Parser)]
#[command(
    name = "scalarlab",
    version,
    about = "Pseudospectral laboratory for nonlocal active-scalar equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory; defaults to the config's, then $SCALARLAB_OUT, then ./scalarlab-out
    #[arg(long)]
    out: Option<PathBuf>,
    /// Only print errors
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and evaluate its checks
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed_override: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Run every point of the config's sweep block in parallel
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        seed_override: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the Hilbert and Λ identities on seeded fields
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Compare kernel quadrature against the multiplier form
    Oracle {
        #[arg(long, value_enum)]
        op: OpArg,
        /// Order for lambda_pow
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Largest image truncation
        #[arg(long, default_value_t = 10_000)]
        images: usize,
        #[arg(short, long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Number of seeded fields besides the single modes
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    Hilbert,
    LambdaPow,
    LambdaInv,
}

fn load(path: &Path, seed: Option<u64>) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = seed {
        cfg.initial.seed = s;
        if let Some(sw) = cfg.sweep.as_mut() {
            sw.seeds.clear();
        }
    }
    Ok(cfg)
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn dispatch(cli: Cli) -> Result<ExitStatus, Error> {
    match cli.command {
        Command::Run {
            config,
            seed_override,
            common,
        } => {
            let cfg = load(&config, seed_override)?;
            let dir = resolve_out_dir(common.out.as_deref(), cfg.outputs.directory.as_deref());
            let outcome = cmd_run(&cfg, &dir)?;
            if !common.quiet {
                let traj = &outcome.trajectory;
                println!(
                    "{}: {} steps to t = {}, {:?}",
                    cfg.label.as_deref().unwrap_or("run"),
                    traj.steps,
                    fmt_f64(traj.final_time()),
                    traj.termination
                );
                for c in &outcome.checks {
                    println!(
                        "{} {} value={} threshold={} ({})",
                        verdict(c.passed),
                        c.name,
                        fmt_f64(c.value),
                        fmt_f64(c.threshold),
                        c.detail
                    );
                }
                println!("outputs in {}", dir.display());
            }
            Ok(outcome.status)
        }
        Command::Sweep {
            config,
            workers,
            seed_override,
            common,
        } => {
            let cfg = load(&config, seed_override)?;
            let dir = resolve_out_dir(common.out.as_deref(), cfg.outputs.directory.as_deref());
            let report = cmd_sweep(&cfg, &dir, workers)?;
            if !common.quiet {
                for r in &report.rows {
                    println!(
                        "run_{:03} eps={} nu={} n={} dt={} seed={} exit={}{}",
                        r.point.index,
                        fmt_f64(r.point.epsilon),
                        fmt_f64(r.point.nu),
                        r.point.n,
                        fmt_f64(r.point.dt),
                        r.point.seed,
                        r.status.code(),
                        r.error.as_deref().map(|e| format!(" error: {e}")).unwrap_or_default()
                    );
                }
                for c in &report.cauchy {
                    println!(
                        "d({}) = {} over {} samples",
                        fmt_f64(c.epsilon),
                        fmt_f64(c.d),
                        c.samples
                    );
                }
                if let Some(dec) = report.cauchy_strictly_decreasing {
                    println!("d(eps) strictly decreasing: {dec}");
                }
                println!("outputs in {}", dir.display());
            }
            Ok(report.status)
        }
        Command::Verify { common } => {
            let report = cmd_verify()?;
            if !common.quiet {
                for r in &report.rows {
                    println!(
                        "{} {:<28} N={:<4} max_error={} tol={}{}",
                        verdict(r.passed),
                        r.identity,
                        r.n,
                        fmt_f64(r.max_error),
                        fmt_f64(r.tolerance),
                        if r.informational { " (informational)" } else { "" }
                    );
                }
            }
            if let Some(dir) = common.out {
                std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
                    path: dir.clone(),
                    source: e,
                })?;
                write_json(&dir.join("verify_report.json"), &report)?;
            }
            Ok(if report.passed {
                ExitStatus::Pass
            } else {
                ExitStatus::CheckFailed
            })
        }
        Command::Oracle {
            op,
            gamma,
            images,
            n,
            dim,
            seeds,
            common,
        } => {
            let op = match op {
                OpArg::Hilbert => OracleOp::Hilbert,
                OpArg::LambdaPow => OracleOp::LambdaPow(gamma),
                OpArg::LambdaInv => OracleOp::LambdaInv,
            };
            let report = cmd_oracle(&OracleRequest {
                op,
                n,
                dim,
                images,
                seeds,
            })?;
            if !common.quiet {
                println!("{} on N={n}, {dim}D", report.op);
                for r in &report.rows {
                    let cols: Vec<String> = r
                        .images
                        .iter()
                        .zip(&r.rel_max)
                        .map(|(k, d)| format!("K={k}: {}", fmt_f64(*d)))
                        .collect();
                    println!("  {:<24} {}", r.input, cols.join("  "));
                }
                if let Some(c) = report.kernel_constant {
                    println!("kernel constant c = {}", fmt_f64(c));
                }
                if let Some((k, m)) = report.lambda_inv_zero_mode {
                    println!("Λ^-1 of 1: kernel {} multiplier {}", fmt_f64(k), fmt_f64(m));
                }
            }
            if let Some(dir) = common.out {
                std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
                    path: dir.clone(),
                    source: e,
                })?;
                write_json(&dir.join("oracle_report.json"), &report)?;
            }
            Ok(ExitStatus::Pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = dispatch(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitStatus::from_error(&e)
    });
    ExitCode::from(status.code() as u8)
}
