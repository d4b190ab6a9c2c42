//! Command-line front end.
//!
//! Every decision command prints a one-line verdict (plus certificate
//! details) to stdout and exits 0 when the decided property holds, 1 when
//! it does not, and 2 on malformed input or an interface error. `--json`
//! additionally writes a self-contained [`Report`](crate::report::Report)
//! that `check` can re-verify later without the original files.

use crate::bisim::{maximal_bisimulation, BisimVerdict, ConditionFlags};
use crate::field::{parse_rational, Field, Rat};
use crate::geometric::{consistent_subset, ConsistentResult};
use crate::matrix::Matrix;
use crate::model::{matrix_to_value, parse_matrix, parse_system_value, system_to_value, DaeSystem};
use crate::regular::{is_regular, pencil_polynomial, transfer_equal_with_samples};
use crate::report::{
    abstraction_certificate, bisim_certificate, bisim_conditions_value, consistent_certificate,
    pencil_certificate, relation_value, reverify, sim_certificate, sim_conditions_value,
    transfer_certificate, with_field, CheckVerdict, FieldChoice, InputDigest, Report,
};
use crate::simrel::{abstract_system, maximal_simulation, SimConditionFlags, SimVerdict};
use crate::subspace::Subspace;
use crate::trajectory::{simulate, validate_relation, InputSignal, TrajectoryConfig};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "daegeo",
    version,
    about = "Exact equivalence checking for linear descriptor systems",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the consistent subset of one system
    Consistent(ConsistentArgs),
    /// Decide whether two systems are bisimilar
    Bisim(PairArgs),
    /// Decide whether the first system is simulated by the second
    Simrel(PairArgs),
    /// Reduce a system along a surjective aggregation map
    Abstract(AbstractArgs),
    /// Test regularity of the matrix pencil sE - A
    Regular(RegularArgs),
    /// Compare the transfer functions of two regular systems
    TransferEq(TransferArgs),
    /// Re-verify a previously emitted JSON report
    Check(CheckArgs),
    /// Integrate one system from a consistent initial state
    Simulate(SimulateArgs),
    /// Cross-validate the maximal bisimulation by numerical integration
    Validate(ValidateArgs),
}

#[derive(Args)]
struct ConsistentArgs {
    /// System file (JSON)
    file: PathBuf,
    /// Write a machine-checkable report to this path
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Scalar field: rational, gf:2, gf:3, gf:5, or gf:7
    #[arg(long, default_value = "rational")]
    field: String,
    /// Iteration cap for the fixed point (default: state dimension + 1)
    #[arg(long, value_name = "N")]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct PairArgs {
    /// First system file (JSON)
    file1: PathBuf,
    /// Second system file (JSON)
    file2: PathBuf,
    /// Write a machine-checkable report to this path
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Scalar field: rational, gf:2, gf:3, gf:5, or gf:7
    #[arg(long, default_value = "rational")]
    field: String,
    /// Iteration cap for the fixed point (default: combined state dimension + 1)
    #[arg(long, value_name = "N")]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct AbstractArgs {
    /// System file (JSON)
    file: PathBuf,
    /// Aggregation map H as a JSON matrix file
    map: PathBuf,
    /// Write a machine-checkable report to this path
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct RegularArgs {
    /// System file (JSON)
    file: PathBuf,
    /// Write a machine-checkable report to this path
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct TransferArgs {
    /// First system file (JSON)
    file1: PathBuf,
    /// Second system file (JSON)
    file2: PathBuf,
    /// Write a machine-checkable report to this path
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Number of sample points (default: enough to be decisive)
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
}

#[derive(Args)]
struct CheckArgs {
    /// Report file produced by --json
    report: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// System file (JSON)
    file: PathBuf,
    /// Write a report (with float metrics) to this path
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Initial state as comma-separated exact rationals (default: the origin)
    #[arg(long, value_name = "LIST")]
    x0: Option<String>,
    /// Integration step size
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Final time
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
    /// Residual tolerance the run is judged against
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Input signal: zero, step:V, sin:AMP:FREQ, or noise:SEED:HOLD:AMP
    #[arg(long, default_value = "step:1")]
    signal: String,
}

#[derive(Args)]
struct ValidateArgs {
    /// First system file (JSON)
    file1: PathBuf,
    /// Second system file (JSON)
    file2: PathBuf,
    /// Write a report (with float metrics) to this path
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Number of random initial states to integrate
    #[arg(long, default_value_t = 5)]
    trials: usize,
    /// Integration step size
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Final time
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
    /// Tolerance on deviation, relation distance, and residual
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Input signal: zero, step:V, sin:AMP:FREQ, or noise:SEED:HOLD:AMP
    #[arg(long, default_value = "step:1")]
    signal: String,
}

/// Parses the process arguments, runs the selected command, and returns
/// the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            2
        }
    }
}

fn dispatch(command: Command) -> Result<i32, String> {
    match command {
        Command::Consistent(args) => run_consistent(args),
        Command::Bisim(args) => run_bisim(args),
        Command::Simrel(args) => run_simrel(args),
        Command::Abstract(args) => run_abstract(args),
        Command::Regular(args) => run_regular(args),
        Command::TransferEq(args) => run_transfer(args),
        Command::Check(args) => run_check(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Validate(args) => run_validate(args),
    }
}

// ---- shared plumbing ----

struct RunOutput {
    holds: bool,
    summary: String,
    /// Extra stdout lines (certificate bases, witnesses); not stored in
    /// the report, which carries the structured certificate instead.
    details: Vec<String>,
    conditions: Option<Value>,
    certificate: Option<Value>,
    metrics: Option<Value>,
}

fn read_system(path: &Path) -> Result<(DaeSystem<Rat>, InputDigest), String> {
    let bytes = std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let text =
        String::from_utf8(bytes.clone()).map_err(|_| format!("{} is not UTF-8", path.display()))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| format!("{} is not valid JSON: {e}", path.display()))?;
    let sys = parse_system_value(&value).map_err(|e| format!("{}: {e}", path.display()))?;
    let digest = InputDigest {
        path: path.display().to_string(),
        sha256: crate::report::sha256_hex(&bytes),
    };
    Ok((sys, digest))
}

fn read_matrix(path: &Path) -> Result<(Matrix<Rat>, InputDigest), String> {
    let bytes = std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let value: Value = serde_json::from_slice(&bytes)
        .map_err(|e| format!("{} is not valid JSON: {e}", path.display()))?;
    let matrix = parse_matrix("H", &value).map_err(|e| format!("{}: {e}", path.display()))?;
    let digest = InputDigest {
        path: path.display().to_string(),
        sha256: crate::report::sha256_hex(&bytes),
    };
    Ok((matrix, digest))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    command: Vec<String>,
    field: FieldChoice,
    inputs: Vec<InputDigest>,
    systems: Vec<Value>,
    matrix_input: Option<Value>,
    out: RunOutput,
    json: Option<&Path>,
    started: Instant,
) -> Result<i32, String> {
    println!("{}", out.summary);
    for line in &out.details {
        println!("{line}");
    }
    if let Some(path) = json {
        let report = Report {
            command,
            field: field.to_string(),
            inputs,
            systems,
            matrix_input,
            holds: out.holds,
            summary: out.summary.clone(),
            conditions: out.conditions,
            certificate: out.certificate,
            metrics: out.metrics,
            timing_ms: started.elapsed().as_millis() as u64,
        };
        std::fs::write(path, report.to_json_string())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(if out.holds { 0 } else { 1 })
}

fn enforce_cap(iterations: usize, cap: usize) -> Result<(), String> {
    if iterations > cap {
        return Err(format!(
            "fixed point needed {iterations} refinement steps, exceeding the cap of {cap} \
             (raise --max-iter)"
        ));
    }
    Ok(())
}

fn generator_lines<F: Field>(label: &str, space: &Subspace<F>, out: &mut Vec<String>) {
    if space.dim() == 0 {
        out.push(format!("{label}: zero subspace (no generators)"));
        return;
    }
    for c in 0..space.dim() {
        let mut line = format!("{label} generator {}: [", c + 1);
        for r in 0..space.ambient() {
            if r > 0 {
                line.push_str(", ");
            }
            let _ = write!(line, "{}", space.basis().at(r, c));
        }
        line.push(']');
        out.push(line);
    }
}

fn failed_bisim_flags(f: &ConditionFlags) -> Vec<&'static str> {
    let mut failed = Vec::new();
    if !f.cond_a {
        failed.push("cond_a (state-space matching)");
    }
    if !f.cond_b {
        failed.push("cond_b (flow invariance)");
    }
    if !f.cond_c {
        failed.push("cond_c (input matching)");
    }
    if !f.cond_d {
        failed.push("cond_d (output agreement)");
    }
    if !f.proj1_in {
        failed.push("proj1_in");
    }
    if !f.proj2_in {
        failed.push("proj2_in");
    }
    if !f.proj1_eq {
        failed.push("proj1_eq");
    }
    if !f.proj2_eq {
        failed.push("proj2_eq");
    }
    failed
}

fn failed_sim_flags(f: &SimConditionFlags) -> Vec<&'static str> {
    let mut failed = Vec::new();
    if !f.cond_a {
        failed.push("cond_a (free-motion matching)");
    }
    if !f.cond_b {
        failed.push("cond_b (flow invariance)");
    }
    if !f.cond_c {
        failed.push("cond_c (input matching)");
    }
    if !f.cond_d {
        failed.push("cond_d (output agreement)");
    }
    if !f.proj1_in {
        failed.push("proj1_in");
    }
    if !f.proj2_in {
        failed.push("proj2_in");
    }
    if !f.proj1_eq {
        failed.push("proj1_eq");
    }
    failed
}

// ---- commands ----

fn run_consistent(args: ConsistentArgs) -> Result<i32, String> {
    let started = Instant::now();
    let field: FieldChoice = args.field.parse()?;
    let (sys_rat, digest) = read_system(&args.file)?;
    let system_value = system_to_value(&sys_rat);
    with_field!(field, F, {
        let sys = sys_rat.map_field::<F>().map_err(|e| e.to_string())?;
        let result: ConsistentResult<F> = consistent_subset(&sys);
        enforce_cap(result.iterations, args.max_iter.unwrap_or(sys.n() + 1))?;
        let mut details = Vec::new();
        let summary = match &result.v_star {
            Some(v) => {
                generator_lines("consistent subset", v, &mut details);
                format!(
                    "consistent: the consistent subset has dimension {} of {}",
                    v.dim(),
                    sys.n()
                )
            }
            None => "no consistent subset: the input clause is unattainable".to_string(),
        };
        generator_lines(
            "undisturbed consistent subset",
            &result.v0_star,
            &mut details,
        );
        let out = RunOutput {
            holds: result.v_star.is_some(),
            summary,
            details,
            conditions: None,
            certificate: Some(consistent_certificate(&result)),
            metrics: None,
        };
        finish(
            vec!["consistent".into(), args.file.display().to_string()],
            field,
            vec![digest],
            vec![system_value],
            None,
            out,
            args.json.as_deref(),
            started,
        )
    })
}

fn run_bisim(args: PairArgs) -> Result<i32, String> {
    let started = Instant::now();
    let field: FieldChoice = args.field.parse()?;
    let (s1_rat, d1) = read_system(&args.file1)?;
    let (s2_rat, d2) = read_system(&args.file2)?;
    let systems = vec![system_to_value(&s1_rat), system_to_value(&s2_rat)];
    with_field!(field, F, {
        let s1 = s1_rat.map_field::<F>().map_err(|e| e.to_string())?;
        let s2 = s2_rat.map_field::<F>().map_err(|e| e.to_string())?;
        let verdict: BisimVerdict<F> = maximal_bisimulation(&s1, &s2).map_err(|e| e.to_string())?;
        let cap = args.max_iter.unwrap_or(s1.n() + s2.n() + 1);
        enforce_cap(verdict.iterations, cap)?;
        let bisimilar = verdict.conditions.bisimilar();
        let mut details = Vec::new();
        let summary = if bisimilar {
            generator_lines("relation", verdict.examined.space(), &mut details);
            format!(
                "bisimilar: certified by a relation of dimension {}",
                verdict.examined.dim()
            )
        } else if verdict.consistent_sets_empty() {
            "not bisimilar: consistent subsets empty".to_string()
        } else {
            format!(
                "not bisimilar: failed {}",
                failed_bisim_flags(&verdict.conditions).join(", ")
            )
        };
        let out = RunOutput {
            holds: bisimilar,
            summary,
            details,
            conditions: Some(bisim_conditions_value(&verdict.conditions)),
            certificate: Some(bisim_certificate(&verdict)),
            metrics: None,
        };
        finish(
            vec![
                "bisim".into(),
                args.file1.display().to_string(),
                args.file2.display().to_string(),
            ],
            field,
            vec![d1, d2],
            systems,
            None,
            out,
            args.json.as_deref(),
            started,
        )
    })
}

fn run_simrel(args: PairArgs) -> Result<i32, String> {
    let started = Instant::now();
    let field: FieldChoice = args.field.parse()?;
    let (s1_rat, d1) = read_system(&args.file1)?;
    let (s2_rat, d2) = read_system(&args.file2)?;
    let systems = vec![system_to_value(&s1_rat), system_to_value(&s2_rat)];
    with_field!(field, F, {
        let s1 = s1_rat.map_field::<F>().map_err(|e| e.to_string())?;
        let s2 = s2_rat.map_field::<F>().map_err(|e| e.to_string())?;
        let verdict: SimVerdict<F> = maximal_simulation(&s1, &s2).map_err(|e| e.to_string())?;
        let cap = args.max_iter.unwrap_or(s1.n() + s2.n() + 1);
        enforce_cap(verdict.iterations, cap)?;
        let simulated = verdict.conditions.simulated_by();
        let mut details = Vec::new();
        let summary = if simulated {
            generator_lines("relation", verdict.examined.space(), &mut details);
            format!(
                "simulated: certified by a relation of dimension {}",
                verdict.examined.dim()
            )
        } else if verdict.v1_star.is_none() || verdict.v2_star.is_none() {
            "not simulated: consistent subsets empty".to_string()
        } else {
            format!(
                "not simulated: failed {}",
                failed_sim_flags(&verdict.conditions).join(", ")
            )
        };
        let out = RunOutput {
            holds: simulated,
            summary,
            details,
            conditions: Some(sim_conditions_value(&verdict.conditions)),
            certificate: Some(sim_certificate(&verdict)),
            metrics: None,
        };
        finish(
            vec![
                "simrel".into(),
                args.file1.display().to_string(),
                args.file2.display().to_string(),
            ],
            field,
            vec![d1, d2],
            systems,
            None,
            out,
            args.json.as_deref(),
            started,
        )
    })
}

fn run_abstract(args: AbstractArgs) -> Result<i32, String> {
    let started = Instant::now();
    let (sys, d1) = read_system(&args.file)?;
    let (h, d2) = read_matrix(&args.map)?;
    let abstraction = abstract_system(&sys, &h).map_err(|e| e.to_string())?;
    let abstract_value = system_to_value(&abstraction.abstract_sys);
    let summary = format!(
        "abstracted: {} state variables reduced to {}",
        sys.n(),
        abstraction.abstract_sys.n()
    );
    let details = vec![
        "reduced system:".to_string(),
        serde_json::to_string_pretty(&abstract_value).expect("system serializes"),
    ];
    let out = RunOutput {
        holds: true,
        summary,
        details,
        conditions: None,
        certificate: Some(abstraction_certificate(&abstraction)),
        metrics: None,
    };
    finish(
        vec![
            "abstract".into(),
            args.file.display().to_string(),
            args.map.display().to_string(),
        ],
        FieldChoice::Rational,
        vec![d1, d2],
        vec![system_to_value(&sys)],
        Some(matrix_to_value(&h)),
        out,
        args.json.as_deref(),
        started,
    )
}

fn run_regular(args: RegularArgs) -> Result<i32, String> {
    let started = Instant::now();
    let (sys, digest) = read_system(&args.file)?;
    let report = is_regular(&sys).map_err(|e| e.to_string())?;
    let det_poly = pencil_polynomial(&sys.e, &sys.a);
    let poly_text = det_poly
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    let summary = if report.regular {
        "regular: det(sE - A) is not identically zero".to_string()
    } else {
        "not regular: det(sE - A) vanishes identically".to_string()
    };
    let out = RunOutput {
        holds: report.regular,
        summary,
        details: vec![format!(
            "determinant coefficients (ascending powers of s): [{poly_text}]"
        )],
        conditions: None,
        certificate: Some(pencil_certificate(&report, &det_poly)),
        metrics: None,
    };
    finish(
        vec!["regular".into(), args.file.display().to_string()],
        FieldChoice::Rational,
        vec![digest],
        vec![system_to_value(&sys)],
        None,
        out,
        args.json.as_deref(),
        started,
    )
}

fn run_transfer(args: TransferArgs) -> Result<i32, String> {
    let started = Instant::now();
    let (s1, d1) = read_system(&args.file1)?;
    let (s2, d2) = read_system(&args.file2)?;
    let default_samples = 2 * (s1.n() + s2.n()) + 1;
    let samples = args.samples.unwrap_or(default_samples);
    if samples == 0 {
        return Err("--samples must be at least 1".into());
    }
    let comparison = transfer_equal_with_samples(&s1, &s2, samples).map_err(|e| e.to_string())?;
    let mut details = Vec::new();
    let summary = if comparison.equal {
        format!(
            "transfer functions agree at all {} sample points",
            comparison.sample_points.len()
        )
    } else {
        let w = comparison
            .witness
            .as_ref()
            .expect("unequal comparison has a witness");
        details.push(format!(
            "witness: at s = {}, entry ({}, {}) evaluates to {} on the left and {} on the right",
            w.s, w.row, w.col, w.left, w.right
        ));
        "transfer functions differ".to_string()
    };
    if samples < default_samples {
        details.push(format!(
            "note: {samples} samples are fewer than the decisive {default_samples}; \
             agreement is only evidence"
        ));
    }
    let out = RunOutput {
        holds: comparison.equal,
        summary,
        details,
        conditions: None,
        certificate: Some(transfer_certificate(&comparison)),
        metrics: None,
    };
    finish(
        vec![
            "transfer-eq".into(),
            args.file1.display().to_string(),
            args.file2.display().to_string(),
        ],
        FieldChoice::Rational,
        vec![d1, d2],
        vec![system_to_value(&s1), system_to_value(&s2)],
        None,
        out,
        args.json.as_deref(),
        started,
    )
}

fn run_check(args: CheckArgs) -> Result<i32, String> {
    let text = std::fs::read_to_string(&args.report)
        .map_err(|e| format!("cannot read {}: {e}", args.report.display()))?;
    let report = Report::from_json_str(&text)?;
    match reverify(&report) {
        CheckVerdict::Intact => {
            println!("report intact: certificate re-verified");
            Ok(0)
        }
        CheckVerdict::Tampered(reason) => {
            println!("report tampered: {reason}");
            Ok(1)
        }
        CheckVerdict::Malformed(reason) => Err(reason),
    }
}

fn parse_signal(text: &str) -> Result<InputSignal, String> {
    let bad = |what: &str| format!("invalid --signal {text:?}: {what}");
    if text == "zero" {
        return Ok(InputSignal::Zero);
    }
    if let Some(rest) = text.strip_prefix("step:") {
        let level: f64 = rest
            .parse()
            .map_err(|_| bad("step level must be a number"))?;
        return Ok(InputSignal::Step(level));
    }
    if let Some(rest) = text.strip_prefix("sin:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 2 {
            return Err(bad("expected sin:AMP:FREQ"));
        }
        let amplitude: f64 = parts[0]
            .parse()
            .map_err(|_| bad("amplitude must be a number"))?;
        let angular_frequency: f64 = parts[1]
            .parse()
            .map_err(|_| bad("frequency must be a number"))?;
        return Ok(InputSignal::Sinusoid {
            amplitude,
            angular_frequency,
        });
    }
    if let Some(rest) = text.strip_prefix("noise:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected noise:SEED:HOLD:AMP"));
        }
        let seed: u64 = parts[0]
            .parse()
            .map_err(|_| bad("seed must be a non-negative integer"))?;
        let hold: f64 = parts[1]
            .parse()
            .map_err(|_| bad("hold time must be a number"))?;
        let amplitude: f64 = parts[2]
            .parse()
            .map_err(|_| bad("amplitude must be a number"))?;
        return Ok(InputSignal::PiecewiseRandom {
            seed,
            hold,
            amplitude,
        });
    }
    Err(bad(
        "expected zero, step:V, sin:AMP:FREQ, or noise:SEED:HOLD:AMP",
    ))
}

fn parse_x0(text: &str, n: usize) -> Result<Matrix<Rat>, String> {
    let entries: Vec<Rat> = text
        .split(',')
        .map(|part| parse_rational(part.trim()))
        .collect::<Result<_, _>>()
        .map_err(|e| format!("invalid --x0: {e}"))?;
    if entries.len() != n {
        return Err(format!(
            "--x0 lists {} entries but the system has {} state variables",
            entries.len(),
            n
        ));
    }
    Ok(Matrix::new(n, 1, entries))
}

fn config_value(cfg: &TrajectoryConfig, signal_text: &str) -> Value {
    json!({
        "step": cfg.step,
        "horizon": cfg.horizon,
        "tolerance": cfg.tolerance,
        "signal": signal_text,
    })
}

fn run_simulate(args: SimulateArgs) -> Result<i32, String> {
    let started = Instant::now();
    let (sys, digest) = read_system(&args.file)?;
    let signal = parse_signal(&args.signal)?;
    let cfg = TrajectoryConfig {
        horizon: args.horizon,
        step: args.step,
        input_signal: signal,
        tolerance: args.tol,
    };
    let x0 = match &args.x0 {
        Some(text) => parse_x0(text, sys.n())?,
        None => Matrix::zeros(sys.n(), 1),
    };
    let result = simulate(&sys, &x0, &cfg).map_err(|e| e.to_string())?;
    let final_output: Vec<f64> = result
        .y_path
        .last()
        .map(|y| y.iter().copied().collect())
        .unwrap_or_default();
    let holds = result.max_residual <= args.tol;
    let summary = format!(
        "integrated to t = {} over {} grid points: max residual {:.3e} ({} tolerance {:.1e})",
        args.horizon,
        result.times.len(),
        result.max_residual,
        if holds { "within" } else { "EXCEEDS" },
        args.tol
    );
    let details = vec![format!("final output: {final_output:?}")];
    let metrics = json!({
        "config": config_value(&cfg, &args.signal),
        "grid_points": result.times.len(),
        "max_residual": result.max_residual,
        "final_output": final_output,
    });
    let out = RunOutput {
        holds,
        summary,
        details,
        conditions: None,
        certificate: None,
        metrics: Some(metrics),
    };
    finish(
        vec!["simulate".into(), args.file.display().to_string()],
        FieldChoice::Rational,
        vec![digest],
        vec![system_to_value(&sys)],
        None,
        out,
        args.json.as_deref(),
        started,
    )
}

fn run_validate(args: ValidateArgs) -> Result<i32, String> {
    let started = Instant::now();
    let (s1, d1) = read_system(&args.file1)?;
    let (s2, d2) = read_system(&args.file2)?;
    let signal = parse_signal(&args.signal)?;
    let cfg = TrajectoryConfig {
        horizon: args.horizon,
        step: args.step,
        input_signal: signal,
        tolerance: args.tol,
    };
    let systems = vec![system_to_value(&s1), system_to_value(&s2)];
    let command = vec![
        "validate".into(),
        args.file1.display().to_string(),
        args.file2.display().to_string(),
    ];
    let verdict = maximal_bisimulation(&s1, &s2).map_err(|e| e.to_string())?;
    let Some(relation) = &verdict.relation else {
        let summary = if verdict.consistent_sets_empty() {
            "nothing to validate: not bisimilar (consistent subsets empty)".to_string()
        } else {
            format!(
                "nothing to validate: not bisimilar (failed {})",
                failed_bisim_flags(&verdict.conditions).join(", ")
            )
        };
        let out = RunOutput {
            holds: false,
            summary,
            details: Vec::new(),
            conditions: Some(bisim_conditions_value(&verdict.conditions)),
            certificate: None,
            metrics: None,
        };
        return finish(
            command,
            FieldChoice::Rational,
            vec![d1, d2],
            systems,
            None,
            out,
            args.json.as_deref(),
            started,
        );
    };
    let report =
        validate_relation(relation, &s1, &s2, &cfg, args.trials).map_err(|e| e.to_string())?;
    let holds = report.max_output_deviation <= args.tol
        && report.max_relation_distance <= args.tol
        && report.max_residual <= args.tol;
    let summary = format!(
        "validated over {} trials: output deviation {:.3e}, relation distance {:.3e}, \
         residual {:.3e} ({} tolerance {:.1e})",
        report.trials,
        report.max_output_deviation,
        report.max_relation_distance,
        report.max_residual,
        if holds { "within" } else { "EXCEEDS" },
        args.tol
    );
    let details = vec![format!(
        "integration error vs refined reference: {:.3e}",
        report.max_integration_error
    )];
    let metrics = json!({
        "config": config_value(&cfg, &args.signal),
        "trials": report.trials,
        "max_output_deviation": report.max_output_deviation,
        "max_relation_distance": report.max_relation_distance,
        "max_residual": report.max_residual,
        "max_integration_error": report.max_integration_error,
        "relation": relation_value(relation),
    });
    let out = RunOutput {
        holds,
        summary,
        details,
        conditions: Some(bisim_conditions_value(&verdict.conditions)),
        certificate: None,
        metrics: Some(metrics),
    };
    finish(
        command,
        FieldChoice::Rational,
        vec![d1, d2],
        systems,
        None,
        out,
        args.json.as_deref(),
        started,
    )
}
