use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use billiard_cli::{commands, Backend, Domain, Job, Output};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "billiard", version, about = "Spectral invariants of convex billiard tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest period in orbit sweeps.
    #[arg(long, global = true, default_value_t = 20)]
    q_max: i64,
    /// Highest odd degree of the beta expansion (and of zeta for normal-form).
    #[arg(long, global = true, default_value_t = 5)]
    order: usize,
    /// Entrywise tolerance when comparing spectra.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Directory for output files; tables go to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Rational arithmetic is available for the circle's normal form.
    #[arg(long, global = true, value_enum, default_value_t = Backend::Float)]
    backend: Backend,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a domain file and print its geometric data.
    Domain { domain: PathBuf },
    /// Beta on rationals plus its odd-power coefficients.
    Beta { domain: PathBuf },
    /// Normal-form coefficients and the per-step constraint ledger.
    NormalForm { domain: PathBuf },
    /// Marked length spectrum.
    Spectrum { domain: PathBuf },
    /// Compare the marked length spectra of two domains.
    Compare { a: PathBuf, b: PathBuf },
    /// Run the invariant suite; exits nonzero on any failure.
    Check { domain: PathBuf },
    /// Beta curve and phase portrait as SVG.
    Plot { domain: PathBuf },
}

fn emit(out: &Output, dir: Option<&Path>) -> anyhow::Result<()> {
    let stdout = std::io::stdout();
    let mut stdout = stdout.lock();
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, body) in &out.files {
                let path = dir.join(name);
                fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
            }
            stdout.write_all(out.summary.as_bytes())?;
        }
        None => {
            for (i, (_, body)) in out.files.iter().enumerate() {
                if i > 0 {
                    writeln!(stdout)?;
                }
                stdout.write_all(body.as_bytes())?;
            }
            if out.files.is_empty() {
                stdout.write_all(out.summary.as_bytes())?;
            } else {
                eprint!("{}", out.summary);
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let job = Job {
        q_max: cli.q_max,
        order: cli.order,
        tol: cli.tol,
        out_dir: cli.out.clone(),
        jobs: cli.jobs,
        backend: cli.backend,
    };
    job.validate()?;
    let output = match &cli.command {
        Command::Domain { domain } => commands::domain(&Domain::load(domain)?),
        Command::Beta { domain } => commands::beta(&Domain::load(domain)?, &job),
        Command::NormalForm { domain } => commands::normal_form_cmd(&Domain::load(domain)?, &job)?,
        Command::Spectrum { domain } => commands::spectrum(&Domain::load(domain)?, &job),
        Command::Compare { a, b } => commands::compare(&Domain::load(a)?, &Domain::load(b)?, &job),
        Command::Check { domain } => commands::check_suite(&Domain::load(domain)?, &job),
        Command::Plot { domain } => {
            // SVG never goes to stdout.
            let out = commands::plot(&Domain::load(domain)?, &job);
            emit(&out, Some(job.out_dir.as_deref().unwrap_or(Path::new("."))))?;
            return Ok(out.success);
        }
    };
    emit(&output, job.out_dir.as_deref())?;
    Ok(output.success)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
