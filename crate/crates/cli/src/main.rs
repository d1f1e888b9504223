use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use morse_maslov::spectral::{assemble, eigenvalues};
use morse_maslov::verifier::{
    choose_tau, rectangle_walk, report, scan_conjugate_points, verify_all, verify_identity, ExperimentConfig, Identity,
    ScanSettings,
};
use morse_maslov::{Error, Execution, Result};
use serde::Serialize;

/// Morse and Maslov index experiments for Schrödinger operators on a lattice cell.
#[derive(Parser)]
#[command(name = "morse-maslov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long, short)]
    config: PathBuf,
    /// Override a configuration key, e.g. `--set solver.tau=0.1`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, overriding MORSE_MASLOV_WORKERS.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of the Galerkin operator at one value of t.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Morse index at t = 1 and of V(0).
    Morse {
        #[command(flatten)]
        common: Common,
    },
    /// Conjugate points on [tau, 1] with crossing forms.
    Scan {
        #[command(flatten)]
        common: Common,
    },
    /// Four-segment Maslov ledger.
    Walk {
        #[command(flatten)]
        common: Common,
    },
    /// Verify one identity.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Identity name; defaults to `solver.identity` or the boundary condition's own.
        #[arg(long)]
        identity: Option<String>,
    },
    /// Verify every applicable identity and write all outputs.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

struct Context {
    cfg: ExperimentConfig,
    exec: Execution,
    dir: PathBuf,
}

impl Context {
    fn new(common: &Common) -> Result<Self> {
        let cfg = ExperimentConfig::from_path(&common.config, &common.overrides)?;
        let exec = common.workers.map(Execution::with_workers).unwrap_or_else(Execution::from_env);
        let dir = common.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
        Ok(Context { cfg, exec, dir })
    }

    fn tau(&self) -> Result<f64> {
        let basis = self.cfg.basis()?;
        if self.cfg.auto_tau {
            choose_tau(&basis, &self.cfg.potential, self.cfg.tau, self.cfg.eps_ker)
        } else {
            Ok(self.cfg.tau)
        }
    }

    fn settings(&self) -> Result<ScanSettings> {
        Ok(ScanSettings {
            tau: self.tau()?,
            t_points: self.cfg.t_points,
            eps_ker: self.cfg.eps_ker,
            eps_form: self.cfg.eps_form,
            t_tol: self.cfg.t_tol,
            shooting: self.cfg.shooting,
        })
    }

    fn emit<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let path = report::write_json(&self.dir, &self.cfg.prefix, name, value)?;
        print!("{}", report::to_json(value)?);
        eprintln!("wrote {}", path.display());
        Ok(())
    }
}

#[derive(Serialize)]
struct SpectrumOut {
    t: f64,
    eps_ker: f64,
    morse: usize,
    kernel: usize,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct MorseOut {
    field: morse_maslov::Field,
    morse: usize,
    kernel: usize,
    origin_morse: usize,
}

fn parse_identity(name: &str) -> Result<Identity> {
    Identity::ALL
        .into_iter()
        .find(|i| i.name() == name)
        .ok_or_else(|| Error::config("identity", format!("unknown identity `{name}`")))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Spectrum { common, t } => {
            let ctx = Context::new(&common)?;
            let op = assemble(&ctx.cfg.basis()?, &ctx.cfg.potential, t, 0.0)?;
            let mut r = eigenvalues(&op)?;
            if let Some(e) = ctx.cfg.eps_ker {
                r = r.with_eps_ker(e);
            }
            let out = SpectrumOut {
                t,
                eps_ker: r.eps_ker,
                morse: r.morse_index()?,
                kernel: r.kernel_dim(),
                values: r.values,
            };
            ctx.emit("spectrum", &out)?;
            Ok(true)
        }
        Command::Morse { common } => {
            let ctx = Context::new(&common)?;
            let op = assemble(&ctx.cfg.basis()?, &ctx.cfg.potential, 1.0, 0.0)?;
            let mut r = eigenvalues(&op)?;
            if let Some(e) = ctx.cfg.eps_ker {
                r = r.with_eps_ker(e);
            }
            let out = MorseOut {
                field: ctx.cfg.field,
                morse: r.morse_index()?,
                kernel: r.kernel_dim(),
                origin_morse: ctx.cfg.potential.origin_morse()?,
            };
            ctx.emit("morse", &out)?;
            Ok(true)
        }
        Command::Scan { common } => {
            let ctx = Context::new(&common)?;
            let scan = scan_conjugate_points(&ctx.cfg.basis()?, &ctx.cfg.potential, &ctx.settings()?, &ctx.exec)?;
            report::write_scan(&ctx.dir, &ctx.cfg.prefix, &scan)?;
            ctx.emit("scan", &scan)?;
            if let Some(c) = scan.crossings.iter().find(|c| !c.regular) {
                return Err(Error::UnresolvedCrossing { t: c.t_star, reason: "crossing form is degenerate".into() });
            }
            Ok(true)
        }
        Command::Walk { common } => {
            let ctx = Context::new(&common)?;
            let scan = scan_conjugate_points(&ctx.cfg.basis()?, &ctx.cfg.potential, &ctx.settings()?, &ctx.exec)?;
            let walk = rectangle_walk(&scan, &ctx.cfg.potential)?;
            report::write_scan(&ctx.dir, &ctx.cfg.prefix, &scan)?;
            ctx.emit("walk", &walk)?;
            if !walk.pass {
                eprintln!("{}", walk.ledger);
            }
            Ok(walk.pass)
        }
        Command::Verify { common, identity } => {
            let ctx = Context::new(&common)?;
            let id = match identity {
                Some(name) => parse_identity(&name)?,
                None => ctx.cfg.identity.unwrap_or_else(|| ctx.cfg.default_identity()),
            };
            let r = verify_identity(&ctx.cfg, id, &ctx.exec)?;
            report::write_scan(&ctx.dir, &ctx.cfg.prefix, &r.scan)?;
            ctx.emit("verify", &r)?;
            Ok(r.pass)
        }
        Command::Report { common } => {
            let ctx = Context::new(&common)?;
            let r = verify_all(&ctx.cfg, &ctx.exec)?;
            report::write_scan(&ctx.dir, &ctx.cfg.prefix, &r.scan)?;
            ctx.emit("report", &r)?;
            Ok(r.pass)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => 4,
        Error::UnresolvedCrossing { .. } | Error::NonRegular { .. } => 3,
        Error::HypothesisViolation(..) | Error::SumViolation { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
