use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use snlw_core::harness::{
    lwp_study, perturbation_study, regularity_study, resolve_output_dir, run_ensemble, truncation_study, write_json,
    write_report, HarnessError, RunConfig,
};

/// Simulator and verification studies for the defocusing energy-critical
/// stochastic nonlinear wave equation on the torus.
#[derive(Debug, Parser)]
#[command(name = "snlw", version)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `ensemble.base_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; falls back to the configuration, then $SNLW_OUT_DIR.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit with status 1 when the acceptance threshold is missed.
    #[arg(long, global = true)]
    check: bool,
    /// Worker threads for ensembles.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One trajectory.
    Simulate,
    /// Seeded ensemble with energy ledger.
    Ensemble,
    /// Ensemble plus the Itô drift verdict.
    ItoCheck,
    /// Galerkin truncation study over `studies.truncation_modes`.
    Truncation,
    /// Shell-averaged spectra of the stochastic convolution.
    Regularity,
    /// Picard iteration for the local solution.
    Lwp,
    /// Distance against forcing size.
    Perturbation,
    /// Plain-text and CSV digest of an output directory.
    Report,
}

const REGULARITY_TOL: f64 = 0.3;
const CONTRACTION_RATIO: f64 = 0.6;
const TRUNCATION_FRACTION: f64 = 0.9;
const LINEARITY_TOL: f64 = 0.2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, HarnessError> {
    let path = cli.config.as_deref().ok_or_else(|| HarnessError::Study("--config is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.ensemble.base_seed = seed;
    }
    if let Some(w) = cli.workers {
        cfg.ensemble.workers = Some(w);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn prepare(cli: &Cli, cfg: &RunConfig) -> Result<PathBuf, HarnessError> {
    let out = resolve_output_dir(cli.out.as_deref(), Some(cfg));
    fs::create_dir_all(&out).map_err(|e| HarnessError::Study(format!("{}: {e}", out.display())))?;
    Ok(out)
}

fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    fs::write(path, text).map_err(|e| HarnessError::Study(format!("{}: {e}", path.display())))
}

fn verdict(cli: &Cli, pass: bool) -> bool {
    println!("verdict: {}", if pass { "PASS" } else { "FAIL" });
    !cli.check || pass
}

/// `Ok(false)` when `--check` is set and the study misses its threshold.
fn run(cli: &Cli) -> Result<bool, HarnessError> {
    if let Command::Report = cli.command {
        let cfg = cli.config.as_deref().map(RunConfig::load).transpose()?;
        let dir = resolve_output_dir(cli.out.as_deref(), cfg.as_ref());
        let report = write_report(&dir)?;
        print!("{}", report.text);
        println!("sources: {}", report.sources.join(", "));
        return Ok(true);
    }
    let mut cfg = load(cli)?;
    let out = prepare(cli, &cfg)?;
    match cli.command {
        Command::Simulate | Command::Ensemble | Command::ItoCheck => {
            if let Command::Simulate = cli.command {
                cfg.ensemble.n_traj = 1;
            }
            let s = run_ensemble(&cfg, &out)?;
            println!("trajectories: {} (blown up: {})", s.n_traj, s.blown_up.len());
            println!("final mean energy: {}", s.final_mean_energy);
            println!("wall time: {:.3} s", s.timing.wall_seconds);
            if let Command::ItoCheck = cli.command {
                let Some(v) = s.verdict else {
                    println!("drift check needs at least two complete trajectories with a nonconstant mean");
                    return Ok(!cli.check);
                };
                println!("slope {} target {} stderr {} z {}", v.slope, v.target, v.stderr, v.z);
                if let Some(half) = s.half_drift {
                    println!("against half the target: z {}", half.z);
                }
                return Ok(verdict(cli, v.pass));
            }
            Ok(true)
        }
        Command::Truncation => {
            let study = truncation_study(&cfg, &cfg.studies.truncation_modes)?;
            let mut csv = String::from("trajectory,coarse,fine,energy_diff,x_diff\n");
            for r in &study.rows {
                let x = r.x_diff.map(|x| x.to_string()).unwrap_or_default();
                let _ = writeln!(csv, "{},{},{},{},{x}", r.trajectory, r.coarse, r.fine, r.energy_diff);
            }
            write_text(&out.join("truncation.csv"), &csv)?;
            write_json(&out.join("truncation.json"), &study)?;
            println!("decreasing in {}/{} trajectories", study.decreasing, study.trajectories);
            if let Some(rate) = study.rate {
                println!("mean rate: {rate}");
            }
            Ok(verdict(cli, study.decreasing_fraction() >= TRUNCATION_FRACTION))
        }
        Command::Regularity => {
            let study = regularity_study(&cfg)?;
            let mut csv = String::from("lo,hi,count,log_japanese,log_psi,log_psit\n");
            for s in &study.shells {
                let _ = writeln!(csv, "{},{},{},{},{},{}", s.lo, s.hi, s.count, s.log_japanese, s.log_psi, s.log_psit);
            }
            write_text(&out.join("regularity.csv"), &csv)?;
            write_json(&out.join("regularity.json"), &study)?;
            println!("psi slope {} (target {})", study.psi.slope, study.psi_target);
            println!("psit slope {} (target {})", study.psit.slope, study.psit_target);
            let pass = (study.psi.slope - study.psi_target).abs() <= REGULARITY_TOL
                && (study.psit.slope - study.psit_target).abs() <= REGULARITY_TOL;
            Ok(verdict(cli, pass))
        }
        Command::Lwp => {
            let study = lwp_study(&cfg)?;
            let mut csv = String::from("iteration,residual,ratio\n");
            let ratios = study.report.ratios();
            for (i, r) in study.report.residuals.iter().enumerate() {
                let ratio = i.checked_sub(1).and_then(|j| ratios.get(j)).map(|x| x.to_string()).unwrap_or_default();
                let _ = writeln!(csv, "{},{r},{ratio}", i + 1);
            }
            write_text(&out.join("lwp.csv"), &csv)?;
            write_json(&out.join("lwp.json"), &study)?;
            println!("iterations {} converged {}", study.report.iterations, study.report.converged);
            println!("fixed-point difference {}", study.difference);
            let pass = study.report.converged
                && study.alternate.converged
                && ratios.iter().all(|&r| r <= CONTRACTION_RATIO)
                && study.difference < 10.0 * cfg.studies.lwp_tol;
            Ok(verdict(cli, pass))
        }
        Command::Perturbation => {
            let fit = perturbation_study(&cfg)?;
            let mut csv = String::from("epsilon,distance\n");
            for (e, d) in fit.epsilons.iter().zip(&fit.distances) {
                let _ = writeln!(csv, "{e},{d}");
            }
            write_text(&out.join("perturbation.csv"), &csv)?;
            write_json(&out.join("perturbation.json"), &fit)?;
            match fit.slope {
                Some(s) => println!("log-log slope {s}"),
                None => println!("log-log slope undefined (fewer than two positive distances)"),
            }
            Ok(verdict(cli, fit.slope.is_some_and(|s| (s - 1.0).abs() <= LINEARITY_TOL)))
        }
        Command::Report => unreachable!("handled above"),
    }
}
