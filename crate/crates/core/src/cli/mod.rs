//! The `numrange` command-line front end.
//!
//! Every subcommand reads an [`InstanceDocument`] (or builds one from
//! flags), computes, and writes a [`ReportDocument`] as JSON. Exit codes:
//! 0 when every check passes, 1 when a check fails, 2 on bad input or I/O.

mod document;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use document::{BlockEntries, CxSection, InstanceDocument, ReportDocument, SymbolSpec};

use crate::cx::{check_cx_identities, SpaceKind};
use crate::norms::{
    module_norm, module_norm_bilinear, module_numerical_radius, monte_carlo_sup,
    sample_numerical_range, Quantity, SweepOptions, DEFAULT_THETA_STEPS,
};
use crate::operators::ModuleOperator;
use crate::verification::{
    check_bilinear_agreement, fuzz_suite, instance_for, run_instance, CheckResult, FuzzConfig,
    OperatorClass, Witness,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Domain(#[from] crate::Error),
}

#[derive(Debug, Parser)]
#[command(name = "numrange", version, about = "Module norms, numerical radii and numerical ranges of operators on Hilbert C*-modules over finite abelian algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ⫴T⫴, its bilinear form and a Monte-Carlo lower bound.
    Norm(ComputeArgs),
    /// ω_o(T) with the attaining character, angle and witness.
    Radius(ComputeArgs),
    /// Point cloud of W_o(T) for plotting.
    Range(RangeArgs),
    /// Run every check on one instance, or a randomized campaign.
    Verify(VerifyArgs),
    /// Multiplication operators on a discretized C(X).
    Cx(CxArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Instance document (JSON).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Operator to use when the instance defines several.
    #[arg(long)]
    pub operator: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_THETA_STEPS)]
    pub theta_steps: usize,
    /// Monte-Carlo trials per quantity.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_THETA_STEPS)]
    pub theta_steps: usize,
    /// Random interior points per character.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Generate instances instead of reading one.
    #[arg(long, conflicts_with = "input")]
    pub fuzz: bool,
    /// Number of generated instances.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Monte-Carlo trials per quantity (default 200 when fuzzing, 10000 otherwise).
    #[arg(long)]
    pub mc_trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Operator classes to generate, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = OperatorClass::ALL.map(|c| c.name().to_string()))]
    pub classes: Vec<String>,
    #[arg(long, default_value_t = 3)]
    pub max_characters: usize,
    #[arg(long, default_value_t = 4)]
    pub max_dim: usize,
    #[arg(long, default_value_t = DEFAULT_THETA_STEPS)]
    pub theta_steps: usize,
    /// Random interior points per character in range checks (default 16
    /// when fuzzing, 2000 otherwise).
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CxArgs {
    /// Instance document with a `cx` section; overrides the flags below.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = ["circle", "interval", "custom"], required_unless_present = "input")]
    pub kind: Option<String>,
    /// Number of sample points (circle, interval).
    #[arg(long)]
    pub m: Option<usize>,
    /// Sample points for `custom`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub points: Option<Vec<f64>>,
    /// identity, exp-i-theta, zero, one, const:RE[:IM] or poly:c0,c1,...
    #[arg(long, required_unless_present = "input")]
    pub symbol: Option<String>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Rendered output and whether every check passed.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub passed: bool,
    pub output: Option<PathBuf>,
}

/// Parses arguments, runs, writes output and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = std::panic::catch_unwind(|| run(&cli));
    let outcome = match result {
        Ok(Ok(outcome)) => outcome,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            return 2;
        }
        Err(_) => {
            eprintln!("error: internal failure");
            return 2;
        }
    };
    if let Err(e) = emit(&outcome) {
        eprintln!("error: {e}");
        return 2;
    }
    if outcome.passed {
        0
    } else {
        eprintln!("one or more checks failed");
        1
    }
}

fn emit(outcome: &Outcome) -> Result<(), CliError> {
    match &outcome.output {
        Some(path) => std::fs::write(path, &outcome.text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(outcome.text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("cannot write to standard output: {e}")))
        }
    }
}

/// Runs a parsed command line, honoring `--threads`.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match cli.threads {
        None => run_command(&cli.command),
        Some(0) => Err(CliError::Input("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Io(format!("cannot start thread pool: {e}")))?
            .install(|| run_command(&cli.command)),
    }
}

fn run_command(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Norm(a) => cmd_norm(a),
        Command::Radius(a) => cmd_radius(a),
        Command::Range(a) => cmd_range(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Cx(a) => cmd_cx(a),
    }
}

fn read_document(path: &Option<PathBuf>) -> Result<InstanceDocument, CliError> {
    let path = path
        .as_ref()
        .ok_or_else(|| CliError::Input("--input is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    InstanceDocument::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// The named operator, falling back to the `cx` multiplication operator
/// when the document defines no matrices.
fn load(input: &InputArgs) -> Result<(InstanceDocument, String, ModuleOperator), CliError> {
    let doc = read_document(&input.input)?;
    let (name, t) = match (&doc.cx, doc.operators.is_empty(), &input.operator) {
        (Some(cx), true, None) => ("cx".to_string(), cx.build()?.operator().clone()),
        _ => doc.operator(input.operator.as_deref())?,
    };
    Ok((doc, name, t))
}

fn json_only(output: &OutputArgs, command: &str) -> Result<(), CliError> {
    match output.format {
        Some(Format::Csv) => Err(CliError::Input(format!("--format csv is only available for `range`, not `{command}`"))),
        _ => Ok(()),
    }
}

fn require_positive(flag: &str, v: usize) -> Result<(), CliError> {
    if v == 0 {
        Err(CliError::Input(format!("--{flag} must be at least 1")))
    } else {
        Ok(())
    }
}

fn require_tol(tol: f64) -> Result<(), CliError> {
    if tol >= 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(CliError::Input(format!("--tol must be a non-negative number, got {tol}")))
    }
}

fn render(report: &ReportDocument, output: &OutputArgs) -> Result<Outcome, CliError> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(Outcome {
        text,
        passed: report.overall,
        output: output.output.clone(),
    })
}

fn start_report(command: &str, doc: InstanceDocument, name: String, seed: u64) -> ReportDocument {
    let mut report = ReportDocument::new(command);
    report.seed = Some(seed);
    report.operator = Some(name);
    report.instance = Some(doc);
    report
}

fn cmd_norm(a: &ComputeArgs) -> Result<Outcome, CliError> {
    json_only(&a.output, "norm")?;
    require_positive("trials", a.trials)?;
    require_tol(a.tol)?;
    let (doc, name, t) = load(&a.input)?;
    let n = module_norm(&t);
    let b = module_norm_bilinear(&t);
    let mc_norm = monte_carlo_sup(&t, Quantity::Norm, a.trials, a.seed)?;
    let mc_bilinear = monte_carlo_sup(&t, Quantity::Bilinear, a.trials, a.seed)?;

    let mut report = start_report("norm", doc, name, a.seed);
    report.parameter("trials", a.trials);
    report.parameter("tol", a.tol);
    report.value("norm", n.value);
    report.value("bilinear", b.value);
    report.value("monte_carlo_norm", mc_norm);
    report.value("monte_carlo_bilinear", mc_bilinear);
    report.witnesses.insert("norm".into(), Witness::sup(&[&n]));
    report.witnesses.insert("bilinear".into(), Witness::sup(&[&b]));
    report.push_checks([
        check_bilinear_agreement(&t, a.tol),
        CheckResult::le("oracle_soundness_norm", mc_norm, n.value, a.tol),
        CheckResult::le("oracle_soundness_bilinear", mc_bilinear, b.value, a.tol),
    ]);
    render(&report, &a.output)
}

fn cmd_radius(a: &ComputeArgs) -> Result<Outcome, CliError> {
    json_only(&a.output, "radius")?;
    require_positive("trials", a.trials)?;
    require_tol(a.tol)?;
    let (doc, name, t) = load(&a.input)?;
    let w = module_numerical_radius(&t, SweepOptions::with_steps(a.theta_steps))?;
    let mc = monte_carlo_sup(&t, Quantity::Radius, a.trials, a.seed)?;

    let mut report = start_report("radius", doc, name, a.seed);
    report.parameter("trials", a.trials);
    report.parameter("theta_steps", a.theta_steps);
    report.parameter("tol", a.tol);
    report.value("radius", w.value);
    report.value("character", w.character as f64);
    if let Some(theta) = w.theta {
        report.value("theta", theta);
    }
    report.value("monte_carlo_radius", mc);
    report.witnesses.insert("radius".into(), Witness::sup(&[&w]));
    report.push_checks([CheckResult::le("oracle_soundness_radius", mc, w.value, a.tol)]);
    render(&report, &a.output)
}

#[derive(Serialize)]
struct CloudPoint {
    character: usize,
    theta: Option<f64>,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct Cloud<'a> {
    tool: &'a str,
    version: &'a str,
    operator: &'a str,
    seed: u64,
    theta_steps: usize,
    samples: usize,
    points: Vec<CloudPoint>,
}

fn cmd_range(a: &RangeArgs) -> Result<Outcome, CliError> {
    let (_, name, t) = load(&a.input)?;
    let sample = sample_numerical_range(&t, a.theta_steps, a.samples, a.seed)?;
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut text = String::from("character,theta,re,im\n");
            for p in &sample.points {
                let theta = p.theta.map(|v| v.to_string()).unwrap_or_default();
                let _ = writeln!(text, "{},{},{},{}", p.character, theta, p.value.re, p.value.im);
            }
            text
        }
        Format::Json => {
            let cloud = Cloud {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                operator: &name,
                seed: a.seed,
                theta_steps: a.theta_steps,
                samples: a.samples,
                points: sample
                    .points
                    .iter()
                    .map(|p| CloudPoint {
                        character: p.character,
                        theta: p.theta,
                        re: p.value.re,
                        im: p.value.im,
                    })
                    .collect(),
            };
            let mut text = serde_json::to_string_pretty(&cloud).map_err(|e| CliError::Io(e.to_string()))?;
            text.push('\n');
            text
        }
    };
    Ok(Outcome {
        text,
        passed: true,
        output: a.output.output.clone(),
    })
}

fn parse_classes(names: &[String]) -> Result<Vec<OperatorClass>, CliError> {
    names
        .iter()
        .map(|n| n.trim().parse().map_err(|e| CliError::Input(format!("--classes: {e}"))))
        .collect()
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    json_only(&a.output, "verify")?;
    require_tol(a.tol)?;
    let defaults = FuzzConfig::default();
    let mut config = FuzzConfig {
        max_characters: a.max_characters,
        max_dim: a.max_dim,
        classes: parse_classes(&a.classes)?,
        trials: a.trials,
        seed: a.seed,
        tol: a.tol,
        theta_steps: a.theta_steps,
        interior_samples: a.samples.unwrap_or(defaults.interior_samples),
        mc_trials: a.mc_trials.unwrap_or(defaults.mc_trials),
    };
    if let Some(mc) = a.mc_trials {
        require_positive("mc-trials", mc)?;
    }

    if a.fuzz {
        require_positive("trials", a.trials)?;
        let fuzz = fuzz_suite(&config)?;
        let mut report = ReportDocument::new("verify");
        report.seed = Some(a.seed);
        report.parameter("config", &config);
        report.value("instances", fuzz.instances.len() as f64);
        report.value("total_checks", fuzz.total_checks as f64);
        report.value("failed_checks", fuzz.failed_checks as f64);
        for (inst, check) in fuzz.failures().take(20) {
            eprintln!(
                "FAIL instance {} (seed {}, {}): {} lhs={} rhs={} margin={:e}",
                inst.index, inst.instance_seed, inst.class, check.name, check.lhs, check.rhs, check.margin
            );
        }
        report.overall = fuzz.overall;
        report.fuzz = Some(fuzz);
        return render(&report, &a.output);
    }

    let (doc, name, t) = load(&a.input)?;
    config.interior_samples = a.samples.unwrap_or(2000);
    config.mc_trials = a.mc_trials.unwrap_or(10_000);
    let instance = instance_for(t, a.seed)?;
    let results = run_instance(&instance, &config)?;
    let n = module_norm(&instance.t).value;
    let w = module_numerical_radius(&instance.t, SweepOptions::with_steps(a.theta_steps))?.value;

    let mut report = start_report("verify", doc, name, a.seed);
    report.parameter("class", instance.class);
    report.parameter("theta_steps", config.theta_steps);
    report.parameter("samples", config.interior_samples);
    report.parameter("mc_trials", config.mc_trials);
    report.parameter("tol", a.tol);
    report.value("norm", n);
    report.value("radius", w);
    if w > 0.0 {
        report.value("ratio", n / w);
    }
    for r in &results {
        if r.name.starts_with("kittaneh") || r.name.starts_with("equivalence") {
            report.value(&format!("{}_margin", r.name), r.margin);
        }
    }
    for r in results.iter().filter(|r| !r.passed) {
        eprintln!("FAIL {}: lhs={} rhs={} margin={:e}", r.name, r.lhs, r.rhs, r.margin);
    }
    report.push_checks(results);
    render(&report, &a.output)
}

fn cmd_cx(a: &CxArgs) -> Result<Outcome, CliError> {
    json_only(&a.output, "cx")?;
    require_tol(a.tol)?;
    let section = match &a.input {
        Some(_) => read_document(&a.input)?
            .cx
            .ok_or_else(|| CliError::Input("cx: the instance has no `cx` section".into()))?,
        None => {
            let kind: SpaceKind = a.kind.as_deref().unwrap_or_default().parse()?;
            CxSection {
                kind,
                m: a.m,
                points: a.points.clone(),
                symbol: SymbolSpec::Name(a.symbol.clone().unwrap_or_default()),
            }
        }
    };
    let m = section.build()?;
    let real = m.is_real(a.tol);
    let checks = check_cx_identities(&m, a.tol)?;
    let norm = module_norm(m.operator()).value;
    let radius = module_numerical_radius(m.operator(), SweepOptions::default())?.value;

    let mut report = ReportDocument::new("cx");
    report.instance = Some(InstanceDocument {
        characters: Vec::new(),
        dims: Vec::new(),
        operators: Default::default(),
        cx: Some(section),
    });
    report.parameter("tol", a.tol);
    report.parameter("radius_identity_asserted", real);
    report.value("norm", norm);
    report.value("radius", radius);
    report.value("sup_abs", m.sup_abs());
    report.push_checks(checks);
    render(&report, &a.output)
}
