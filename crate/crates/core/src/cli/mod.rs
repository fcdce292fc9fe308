//! The `qss` command line: scenario files, JSONL traces and four subcommands.
//!
//! Exit codes: 0 ok, 1 golden mismatch (`run-example` only), 2 verification
//! failure or invalid program, 3 decoy abort, 64 usage or configuration
//! error, 65 enumeration bound exceeded.

mod scenario;
mod trace;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decoy::EveModel;
use crate::error::QssError;
use crate::field::PrimeModulus;
use crate::fixture;
use crate::msp::{fmt_set, privacy_audit, validate_msp, DEFAULT_ENUMERATION_BOUND};
use crate::protocol::{derive_seed, run_batch, run_protocol, Event, RecoveryResult, Tamper};
use crate::qudit::{pauli_sweep_exhaustive, pauli_sweep_sample, GhzLabel};

pub use scenario::{LoadedScenario, Scenario};
pub use trace::{trace_records, write_trace, TraceRecord};

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Exit {
    Ok = 0,
    Mismatch = 1,
    VerificationFailed = 2,
    Aborted = 3,
    Usage = 64,
    ResourceBound = 65,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// 0 accepted, 2 verification failed, 3 aborted by a decoy check.
    pub fn from_result(result: &RecoveryResult) -> Self {
        if result.aborted_at.is_some() {
            Exit::Aborted
        } else if result.accepted() {
            Exit::Ok
        } else {
            Exit::VerificationFailed
        }
    }

    fn from_error(e: &QssError) -> Self {
        match e {
            QssError::EnumerationBound { .. } => Exit::ResourceBound,
            _ => Exit::Usage,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qss",
    version,
    about = "Verifiable multi-secret quantum secret sharing simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the worked example over F_7 and compare with its known label chain.
    RunExample(RunExampleArgs),
    /// Run a scenario file and emit a JSONL trace.
    Run(RunArgs),
    /// Compare dense Pauli action on GHZ states with the label-shift rule.
    VerifyTheorem1(VerifyArgs),
    /// Check that a scenario's span program realizes its access structure.
    AuditMsp(AuditArgs),
}

#[derive(Debug, Args)]
pub struct RunExampleArgs {
    /// Field size; anything but 7 leaves the known chain behind.
    #[arg(long, default_value_t = 7)]
    pub d: u64,
    #[arg(long)]
    pub tamper: Option<Tamper>,
    #[arg(long, default_value = "none")]
    pub eve: EveModel,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trace destination; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run this many trials with derived seeds and print one summary line
    /// per trial instead of a trace. Exit code is the worst trial's.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub tamper: Option<Tamper>,
    #[arg(long)]
    pub eve: Option<EveModel>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepMode {
    Exhaustive,
    Sample,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
    pub d: Vec<u64>,
    #[arg(long, value_enum, default_value_t = SweepMode::Exhaustive)]
    pub mode: SweepMode,
    /// Cases per modulus in sample mode.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub scenario: PathBuf,
}

/// Sets up logging from `QSS_LOG` (`quiet`, `info` or `debug`; warnings
/// otherwise).
pub fn init_logging() {
    let level = match std::env::var("QSS_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Warn,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .try_init();
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Exit {
    match &cli.command {
        Command::RunExample(a) => cmd_run_example(a, out),
        Command::Run(a) => cmd_run(a, out),
        Command::VerifyTheorem1(a) => cmd_verify_theorem1(a, out),
        Command::AuditMsp(a) => cmd_audit_msp(a, out),
    }
}

fn fail(e: &QssError) -> Exit {
    debug!("{e:?}");
    eprintln!("error: {e}");
    Exit::from_error(e)
}

fn io_fail(e: io::Error) -> Exit {
    eprintln!("error: {e}");
    Exit::Usage
}

pub fn cmd_run_example(args: &RunExampleArgs, out: &mut dyn Write) -> Exit {
    let mut scenario = Scenario::example();
    scenario.d = args.d;
    scenario.eve = args.eve;
    scenario.seed = args.seed;
    scenario.tamper = args.tamper.as_ref().map(Tamper::to_string);
    let loaded = match scenario.load() {
        Ok(l) => l,
        Err(e) => return fail(&e),
    };
    let (transcript, result) = match run_protocol(&loaded.config, &loaded.chosen_set, &loaded.options, args.seed) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let mut report = || -> io::Result<()> {
        for event in transcript.events() {
            match event {
                Event::LabelAfterStep { actor, step, label } => match label {
                    Some(l) => writeln!(out, "{actor:>5} {step:<8} {l}")?,
                    None => writeln!(out, "{actor:>5} {step:<8} <not a GHZ basis state>")?,
                },
                Event::DecoyCheck { hop, outcome } => writeln!(
                    out,
                    "{:>5} decoys   {}/{} errors ({})",
                    hop.id(),
                    outcome.errors,
                    outcome.tested,
                    if outcome.passed { "pass" } else { "FAIL" }
                )?,
                Event::Measurement { actor, label } => writeln!(out, "{actor:>5} measures {label}")?,
                Event::Verification {
                    recovered, verified, ..
                } => {
                    let [a, b, c] = recovered;
                    writeln!(out, "secrets ({a},{b},{c}) verified {verified:?}")?
                }
            }
        }
        Ok(())
    };
    if let Err(e) = report() {
        return io_fail(e);
    }
    let status = Exit::from_result(&result);
    if status != Exit::Ok {
        let _ = writeln!(
            out,
            "{}",
            if status == Exit::Aborted {
                "run aborted"
            } else {
                "verification failed"
            }
        );
        return status;
    }
    let d = loaded.config.modulus();
    let golden: Vec<Option<GhzLabel>> = fixture::GOLDEN_CHAIN
        .iter()
        .map(|&v| Some(GhzLabel::from_values(d, v)))
        .collect();
    if transcript.label_chain() != golden {
        let _ = writeln!(out, "label chain differs from the known example");
        return Exit::Mismatch;
    }
    let _ = writeln!(out, "label chain matches the known example");
    Exit::Ok
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Exit {
    let mut scenario = match Scenario::from_path(&args.scenario) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    if let Some(t) = &args.tamper {
        scenario.tamper = Some(t.to_string());
    }
    if let Some(eve) = args.eve {
        scenario.eve = eve;
    }
    let loaded = match scenario.load() {
        Ok(l) => l,
        Err(e) => return fail(&e),
    };
    let mut sink: Box<dyn Write> = match &args.out {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => return io_fail(e),
        },
        None => Box::new(&mut *out),
    };
    let status = match args.trials {
        None => run_single(&loaded, scenario.seed, &mut *sink),
        Some(trials) => run_trials(&loaded, scenario.seed, trials, &mut *sink),
    };
    if let Err(e) = sink.flush() {
        return io_fail(e);
    }
    status
}

fn run_single(loaded: &LoadedScenario, seed: u64, out: &mut dyn Write) -> Exit {
    match run_protocol(&loaded.config, &loaded.chosen_set, &loaded.options, seed) {
        Ok((transcript, result)) => {
            if let Err(e) = write_trace(&transcript, out) {
                return io_fail(e);
            }
            let status = Exit::from_result(&result);
            info!("run finished with exit {}", status.code());
            status
        }
        Err(e) => fail(&e),
    }
}

#[derive(serde::Serialize)]
struct TrialLine<'a> {
    trial: usize,
    seed: u64,
    exit: i32,
    aborted_at: Option<&'a str>,
    verified: [bool; 3],
}

fn run_trials(loaded: &LoadedScenario, base: u64, trials: usize, out: &mut dyn Write) -> Exit {
    let results = match run_batch(&loaded.config, &loaded.chosen_set, &loaded.options, base, trials) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let mut worst = Exit::Ok;
    let mut counts = [0usize; 3];
    for (trial, (seed, result)) in results.iter().enumerate() {
        debug_assert_eq!(*seed, derive_seed(base, trial as u64));
        let status = Exit::from_result(result);
        worst = worst.max(status);
        counts[match status {
            Exit::Ok => 0,
            Exit::VerificationFailed => 1,
            _ => 2,
        }] += 1;
        let line = TrialLine {
            trial,
            seed: *seed,
            exit: status.code(),
            aborted_at: result.aborted_at.as_deref(),
            verified: result.verified,
        };
        let written = serde_json::to_writer(&mut *out, &line)
            .map_err(io::Error::from)
            .and_then(|_| out.write_all(b"\n"));
        if let Err(e) = written {
            return io_fail(e);
        }
    }
    eprintln!(
        "trials {trials}: accepted {}, verification failed {}, aborted {}",
        counts[0], counts[1], counts[2]
    );
    worst
}

pub fn cmd_verify_theorem1(args: &VerifyArgs, out: &mut dyn Write) -> Exit {
    let moduli: Result<Vec<PrimeModulus>, QssError> = args.d.iter().map(|&d| PrimeModulus::new(d)).collect();
    let moduli = match moduli {
        Ok(m) => m,
        Err(e) => return fail(&e),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut status = Exit::Ok;
    for d in moduli {
        let report = match args.mode {
            SweepMode::Exhaustive => pauli_sweep_exhaustive(d),
            SweepMode::Sample => pauli_sweep_sample(d, args.trials, &mut rng),
        };
        let ok = report.max_deviation < args.tol;
        if !ok {
            status = Exit::VerificationFailed;
        }
        if let Err(e) = writeln!(
            out,
            "d={} cases={} max_deviation={:.3e} {}",
            report.modulus,
            report.cases,
            report.max_deviation,
            if ok { "ok" } else { "FAIL" }
        ) {
            return io_fail(e);
        }
    }
    status
}

pub fn cmd_audit_msp(args: &AuditArgs, out: &mut dyn Write) -> Exit {
    let scenario = match Scenario::from_path(&args.scenario) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let (msp, gamma) = match scenario.msp_and_gamma() {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let report = match validate_msp(&msp, &gamma) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let mut text = format!("{report}");
    let mut private = true;
    for set in gamma.maximal_unauthorized() {
        match privacy_audit(&msp, &set, DEFAULT_ENUMERATION_BOUND) {
            Ok(p) => {
                private &= p;
                text.push_str(&format!(
                    "privacy {}: {}\n",
                    fmt_set(&set),
                    if p { "perfect" } else { "LEAKS" }
                ));
            }
            // an authorized "maximal unauthorized" set is already reported above
            Err(QssError::Authorized(_)) => {}
            Err(e) => return fail(&e),
        }
    }
    let valid = report.is_valid() && private;
    text.push_str(if valid { "result: valid\n" } else { "result: invalid\n" });
    if let Err(e) = out.write_all(text.as_bytes()) {
        return io_fail(e);
    }
    if valid {
        Exit::Ok
    } else {
        Exit::VerificationFailed
    }
}
