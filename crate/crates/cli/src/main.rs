//! `chandiv`: divisibility analysis of quantum channels from the command line.
//!
//! Standard output carries only JSON; diagnostics go to standard error.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use chandiv::channel::{validate, Channel, RepresentationKind};
use chandiv::json::{self as cj, FormatError};
use chandiv::markov::{exp_generator, markov_approx};
use chandiv::qubit::{
    classify, lorentz_normal_form, nondiagonal_decompose, rank_two_generator_schedule, rank_two_normal_form,
    NormalForm,
};
use chandiv::sampling::{run_property_suite, sample_channels, SampleSpec, SuiteSpec, SUITES};
use chandiv::{Basis, ChannelError};

#[derive(Parser)]
#[command(name = "chandiv", version, about = "Divisibility analysis of quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Channel file in chandiv/1 format, a single object or an array; `-` or absent reads standard input.
    path: Option<PathBuf>,
    /// Inline JSON instead of a file.
    #[arg(long, conflicts_with = "path")]
    json: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Structural report: CP, TP, unitality, Kraus rank, Choi spectrum, determinant, purity.
    Analyze(Input),
    /// Qubit divisibility classification (chandiv-report/1).
    Classify(Input),
    /// Lorentz normal form of a qubit channel with its filters.
    NormalForm(Input),
    /// Markovian approximation exp(t(T - id)) and the purely dissipative generator of T U0 - id.
    MarkovApprox {
        #[command(flatten)]
        input: Input,
        /// Evolution time for the exported channel exp(t(T - id)).
        #[arg(long)]
        time: f64,
    },
    /// Rank-two class with its generator schedule, or the two rank-two factors of a non-diagonal normal form.
    Decompose(Input),
    /// Seeded random channels (Haar isometries), printed as a chandiv/1 array.
    Sample {
        #[arg(long)]
        dim: usize,
        /// Kraus rank, 1..=dim².
        #[arg(long)]
        rank: usize,
        #[arg(long, required = true)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Run property suites; exit status 3 if any suite reports violations.
    Verify {
        /// Suite name, or `all`.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, required = true)]
        seed: u64,
        /// Dimensions to cycle through (qubit-only suites always use 2).
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3])]
        dims: Vec<usize>,
    },
    /// Re-serialize a channel in another representation.
    Convert {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        to: Target,
        /// Basis for `--to transfer`.
        #[arg(long, value_enum, default_value_t = BasisArg::MatrixUnits)]
        basis: BasisArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Kraus,
    Choi,
    Transfer,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    MatrixUnits,
    Gellmann,
}

enum Failure {
    Input(String),
    Numerical(String),
    Violations,
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Channel(c) => c.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<ChannelError> for Failure {
    fn from(e: ChannelError) -> Self {
        match e {
            ChannelError::NumericalFailure(_) | ChannelError::NonConvergence { .. } => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<Value, Failure>;

fn read_input(input: &Input) -> Result<Vec<u8>, Failure> {
    if let Some(s) = &input.json {
        return Ok(s.clone().into_bytes());
    }
    match &input.path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read(p).map_err(|e| Failure::Input(format!("cannot read {}: {e}", p.display())))
        }
        _ => {
            let mut buf = Vec::new();
            std::io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| Failure::Input(format!("cannot read standard input: {e}")))?;
            Ok(buf)
        }
    }
}

/// Applies `f` to every input channel, keeping the single/array shape.
fn each(input: &Input, f: impl Fn(&Channel) -> Outcome) -> Outcome {
    let (chans, is_array) = cj::read_channels_json(&read_input(input)?)?;
    let out = chans.iter().map(f).collect::<Result<Vec<_>, _>>()?;
    Ok(if is_array { Value::Array(out) } else { out.into_iter().next().expect("one channel") })
}

fn markov_value(ch: &Channel, t: f64) -> Outcome {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Failure::Input(format!("--time must be a finite non-negative number, got {t}")));
    }
    let r = markov_approx(ch)?;
    let evolved = exp_generator(&r.semigroup_generator, t)?;
    Ok(json!({
        "time": t,
        "channel": cj::channel_to_value(&evolved, RepresentationKind::Kraus)?,
        "semigroup_generator": cj::generator_to_value(&r.semigroup_generator)?,
        "u0": cj::matrix_value(&r.u0),
        "objective": r.objective,
        "iterations": r.iterations,
        "dissipative_generator": cj::generator_to_value(&r.dissipative_generator)?,
        "hamiltonian_norm": r.hamiltonian_norm(),
    }))
}

fn decompose_value(ch: &Channel) -> Outcome {
    if ch.dim() != 2 {
        return Err(ChannelError::WrongDimension(ch.dim()).into());
    }
    if ch.kraus_rank() <= 2 {
        let (cls, _) = rank_two_normal_form(ch)?;
        let schedule = match rank_two_generator_schedule(&cls.kind) {
            Ok(s) => json!({
                "duration": s.duration,
                "generator_at_start": cj::generator_to_value(&(s.sample)(0.0))?,
                "generator_at_end": cj::generator_to_value(&(s.sample)(s.duration))?,
            }),
            Err(ChannelError::DegenerateClass { .. }) => Value::Null,
            Err(e) => return Err(e.into()),
        };
        return Ok(json!({
            "kind": "rank_two",
            "class": cls.kind,
            "u1": cj::matrix_value(&cls.u1),
            "u2": cj::matrix_value(&cls.u2),
            "schedule": schedule,
        }));
    }
    let nf = lorentz_normal_form(ch)?;
    match nf.form {
        NormalForm::NonDiagonal { x } if x < 1.0 => {
            let (f1, f2) = nondiagonal_decompose(x)?;
            Ok(json!({
                "kind": "non_diagonal",
                "x": x,
                "filters": {"a": cj::matrix_value(&nf.a), "b": cj::matrix_value(&nf.b)},
                "factors": [
                    cj::channel_to_value(&f1, RepresentationKind::Kraus)?,
                    cj::channel_to_value(&f2, RepresentationKind::Kraus)?,
                ],
            }))
        }
        _ => Err(Failure::Input(format!(
            "decompose needs Kraus rank at most 2 or a non-diagonal normal form (got rank {}, {} form)",
            ch.kraus_rank(),
            nf.form.tag()
        ))),
    }
}

fn verify_value(suite: &str, samples: usize, seed: u64, dims: Vec<usize>) -> Outcome {
    let spec = SuiteSpec { samples, seed, dims };
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let mut reports = Vec::new();
    let mut failed = false;
    for name in &names {
        let r = run_property_suite(name, &spec)?;
        eprintln!(
            "{name}: {} samples, {} violations, worst margin {:.3e}",
            r.samples,
            r.violations.len(),
            r.worst_margin
        );
        failed |= !r.passed();
        reports.push(cj::suite_value(&r, &spec));
    }
    let out = if suite == "all" { Value::Array(reports) } else { reports.remove(0) };
    if failed {
        emit(&out);
        return Err(Failure::Violations);
    }
    Ok(out)
}

/// A closed pipe downstream is not an error of ours.
fn emit(v: &Value) {
    let _ = writeln!(std::io::stdout().lock(), "{}", cj::to_pretty(v));
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Analyze(input) => each(&input, |ch| Ok(cj::structure_value(&validate(ch)?))),
        Command::Classify(input) => each(&input, |ch| Ok(cj::classification_value(&classify(ch)?))),
        Command::NormalForm(input) => each(&input, |ch| Ok(cj::normal_form_value(&lorentz_normal_form(ch)?))),
        Command::MarkovApprox { input, time } => each(&input, |ch| markov_value(ch, time)),
        Command::Decompose(input) => each(&input, decompose_value),
        Command::Sample { dim, rank, seed, count } => {
            let spec = SampleSpec { dim, kraus_rank: rank, seed, count };
            let chans = sample_channels(&spec)?;
            let docs = chans
                .iter()
                .map(|c| cj::channel_to_value(c, RepresentationKind::Kraus))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Value::Array(docs))
        }
        Command::Verify { suite, samples, seed, dims } => verify_value(&suite, samples, seed, dims),
        Command::Convert { input, to, basis } => {
            let kind = match to {
                Target::Kraus => RepresentationKind::Kraus,
                Target::Choi => RepresentationKind::Choi,
                Target::Transfer => RepresentationKind::Transfer(match basis {
                    BasisArg::MatrixUnits => Basis::MatrixUnits,
                    BasisArg::Gellmann => Basis::GellMann,
                }),
            };
            each(&input, |ch| Ok(cj::channel_to_value(ch, kind)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(v) => {
            emit(&v);
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Violations) => {
            eprintln!("verification reported violations");
            ExitCode::from(3)
        }
    }
}
