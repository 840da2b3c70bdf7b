use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scalevar::asymptotics::LadderSpec;
use scalevar::experiment::{run, write_outputs, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "scalevar", version, about = "Scale-calculus experiments with JSON/CSV reports")]
struct Cli {
    #[command(subcommand)]
    kind: Kind,
}

#[derive(Subcommand, Clone)]
enum Kind {
    /// Scale derivative against exact derivatives of smooth curves
    Ops(Flags),
    /// Corrected product rule on random curve pairs
    Leibniz(Flags),
    /// Scale-derivative chain rule on polynomial fields
    Chain(Flags),
    /// Integral formula and its quadrature refinement
    Integral(Flags),
    /// Hölder exponent recovery for the curve constructors
    Holder(Flags),
    /// Functional derivative decomposition, Euler-Lagrange residual, extremality
    Variational(Flags),
    /// Boundary and remainder scaling in the step size
    Scaling(Flags),
    /// Wavefunction residuals and the least-action pipeline
    Schrodinger(Flags),
    /// Dominant-part projection
    Dominant(Flags),
    /// Every experiment in one report
    Suite(Flags),
}

#[derive(Args, Clone)]
struct Flags {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// eps_max,ratio,rungs
    #[arg(long)]
    ladder: Option<LadderSpec>,
}

impl Kind {
    fn split(self) -> (ExperimentKind, Flags) {
        match self {
            Kind::Ops(f) => (ExperimentKind::Ops, f),
            Kind::Leibniz(f) => (ExperimentKind::Leibniz, f),
            Kind::Chain(f) => (ExperimentKind::Chain, f),
            Kind::Integral(f) => (ExperimentKind::Integral, f),
            Kind::Holder(f) => (ExperimentKind::Holder, f),
            Kind::Variational(f) => (ExperimentKind::Variational, f),
            Kind::Scaling(f) => (ExperimentKind::Scaling, f),
            Kind::Schrodinger(f) => (ExperimentKind::Schrodinger, f),
            Kind::Dominant(f) => (ExperimentKind::Dominant, f),
            Kind::Suite(f) => (ExperimentKind::Suite, f),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (kind, flags) = cli.kind.split();
    let mut config = match flags.config {
        Some(path) => match ExperimentConfig::load(&path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
        },
        None => ExperimentConfig::new(kind),
    };
    // the subcommand and the flags win over the file
    config.kind = kind;
    if let Some(s) = flags.seed {
        config.seed = s;
    }
    if let Some(o) = flags.out {
        config.out = Some(o);
    }
    if flags.tolerance.is_some() {
        config.tolerance = flags.tolerance;
    }
    if flags.ladder.is_some() {
        config.ladder = flags.ladder;
    }

    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let dir = config.out_dir();
    if let Err(e) = write_outputs(&report, &dir) {
        eprintln!("cannot write outputs to {}: {e}", dir.display());
        return ExitCode::from(2);
    }
    for r in &report.results {
        let status = if r.passed() { "pass" } else { "FAIL" };
        println!("{status} {}", r.kind);
    }
    let failing = report.failing_checks();
    for f in &failing {
        eprintln!("failed check: {f}");
    }
    println!("report written to {}", dir.join("report.json").display());
    ExitCode::from(report.exit_status() as u8)
}
