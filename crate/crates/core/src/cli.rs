//! Command-line front end.
//!
//! Game specs and reports are JSON. Complex numbers are `[re, im]` pairs and
//! a 2×2 matrix is a list of two rows.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::gamesim::{
    bloch_vector, quantum_payoff, verify_strategy_with_tolerance, BranchTrace, DensityMatrix,
    GameSpec, StrategyPair, Verdict, DEFAULT_PROB_GRID, EPS_WIN,
};
use crate::nash::{
    expected_payoff, is_nash_equilibrium, MixedStrategyP, MixedStrategyQ, DEFAULT_DEVIATIONS,
};
use crate::qalg::{hadamard, pauli, Mat2, Pauli, StateVector, UnitaryOp};
use crate::solver::{
    brute_force_oracle, chappell_family, classify_multiple, flip_op, meyer_hadamard,
    multi_op_strategy, nonflip_op, phase_variable_family, sigma13_family, solve_two_unitary,
    strategy_exists, tune_theta1, two_unitary_strategy, ChappellParams, MultiStrategyClass,
    PhaseVariableParams, Sign, SolutionRoute, SolveOptions, TwoUnitaryProblem, TypedOp,
};

pub const EXIT_WIN: i32 = 0;
pub const EXIT_LOSE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SINGULAR: i32 = 3;
pub const EXIT_NO_STRATEGY: i32 = 4;

/// Overrides the win tolerance; meant for tests.
pub const EPS_ENV: &str = "PENNYFLIP_EPS";

#[derive(Parser, Debug)]
#[command(
    name = "pennyflip",
    version,
    about = "Quantum penny-flip strategy synthesis and verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verify a strategy pair against a game spec
    Verify(VerifyArgs),
    /// Construct a winning pair for a game spec
    Solve(SolveArgs),
    /// Classify a flip/non-flip operation set
    Classify(ClassifyArgs),
    /// Expected payoff and equilibrium check for the classical game
    Nash(NashArgs),
    /// Verify a strategy family over a parameter grid
    Sweep(SweepArgs),
    /// Brute-force search for the best guaranteed fidelity
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Meyer,
    Chappell,
    Sigma13,
    Phase,
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub delta1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub delta2: f64,
    /// +1 or -1
    #[arg(long, allow_hyphen_values = true, value_parser = parse_sign, default_value = "1")]
    pub a_sign: Sign,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_sign, default_value = "1")]
    pub b_sign: Sign,
    /// Omit to search both signs
    #[arg(long, allow_hyphen_values = true, value_parser = parse_sign)]
    pub c_sign: Option<Sign>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_enum, conflicts_with_all = ["u1", "strategy_file"])]
    pub family: Option<Family>,
    /// Operation preset or spec-style op string for U1
    #[arg(long, requires = "u2")]
    pub u1: Option<String>,
    #[arg(long, requires = "u1")]
    pub u2: Option<String>,
    /// Read the strategy matrices from an earlier report
    #[arg(long, conflicts_with = "u1")]
    pub strategy_file: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = DEFAULT_PROB_GRID)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Use the brute-force search instead of the constructive solvers
    #[arg(long)]
    pub oracle: bool,
    /// `--phi` sets the free z-rotation of U2, `--gamma` fixes γ
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = DEFAULT_PROB_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct NashArgs {
    /// Probability that P plays N
    #[arg(long)]
    pub pn: f64,
    /// Q's probabilities for NN,NF,FN,FF
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_DEVIATIONS)]
    pub deviations: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Defaults to the family's own game
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Family,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 1)]
    pub theta_grid: usize,
    #[arg(long, default_value_t = 1)]
    pub phi_grid: usize,
    #[arg(long, default_value_t = 1)]
    pub alpha_grid: usize,
    #[arg(long, default_value_t = 1)]
    pub beta_grid: usize,
    /// Draw δ1, δ2 uniformly per sample from the seeded generator
    #[arg(long)]
    pub random_phases: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_PROB_GRID)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Points per angle of the coarse grid (at least 8)
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_sign(s: &str) -> std::result::Result<Sign, String> {
    match s.trim() {
        "+" | "+1" | "1" => Ok(Sign::Plus),
        "-" | "-1" => Ok(Sign::Minus),
        other => Err(format!("expected +1 or -1, got {other:?}")),
    }
}

/// One adversary operation in a spec file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OpEntry {
    Named(String),
    Matrix { matrix: Mat2 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialEntry {
    Named(String),
    Amplitudes([C64; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialEntry>,
    pub ops: Vec<OpEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
    pub report: Option<Box<Report>>,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
            report: None,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Singular(_)
            | Error::InconsistentGamma { .. }
            | Error::AxisNorm { .. }
            | Error::DegenerateComposition { .. } => EXIT_SINGULAR,
            Error::NoStrategy => EXIT_NO_STRATEGY,
            _ => EXIT_INPUT,
        };
        CliError {
            code,
            message: e.to_string(),
            report: None,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_angle_call(s: &str, name: &str) -> CliResult<Option<f64>> {
    let Some(inner) = s
        .strip_prefix(name)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
    else {
        return Ok(None);
    };
    inner
        .trim()
        .parse::<f64>()
        .map(Some)
        .map_err(|_| CliError::input(format!("bad angle in {s:?}")))
}

/// Parses a preset name such as `sigma1` or `flip(0.5)`.
pub fn parse_op(s: &str) -> CliResult<UnitaryOp> {
    let t = s.trim().to_ascii_lowercase();
    if let Some(a) = parse_angle_call(&t, "flip")? {
        return Ok(flip_op(a));
    }
    if let Some(b) = parse_angle_call(&t, "nonflip")? {
        return Ok(nonflip_op(b));
    }
    match t.as_str() {
        "identity" | "id" | "1" => Ok(UnitaryOp::identity()),
        "sigma1" | "x" => Ok(pauli(Pauli::Sigma1)),
        "sigma2" | "y" => Ok(pauli(Pauli::Sigma2)),
        "sigma3" | "z" => Ok(pauli(Pauli::Sigma3)),
        "hadamard" | "h" => Ok(hadamard()),
        _ => Err(CliError::input(format!("unknown operation {s:?}"))),
    }
}

/// Flip/non-flip reading of a named op; raw matrices and other presets give `None`.
pub fn typed_op(entry: &OpEntry) -> Option<TypedOp> {
    let OpEntry::Named(s) = entry else {
        return None;
    };
    let t = s.trim().to_ascii_lowercase();
    if let Ok(Some(a)) = parse_angle_call(&t, "flip") {
        return Some(TypedOp::Flip(a));
    }
    if let Ok(Some(b)) = parse_angle_call(&t, "nonflip") {
        return Some(TypedOp::NonFlip(b));
    }
    match t.as_str() {
        "identity" | "id" | "1" => Some(TypedOp::NonFlip(0.0)),
        "sigma1" | "x" => Some(TypedOp::Flip(0.0)),
        _ => None,
    }
}

fn op_from_entry(entry: &OpEntry) -> CliResult<UnitaryOp> {
    match entry {
        OpEntry::Named(s) => parse_op(s),
        OpEntry::Matrix { matrix } => Ok(UnitaryOp::new(*matrix)?),
    }
}

fn initial_state(entry: &Option<InitialEntry>) -> CliResult<StateVector> {
    match entry {
        None => Ok(StateVector::heads()),
        Some(InitialEntry::Named(s)) => match s.trim().to_ascii_lowercase().as_str() {
            "heads" | "0" => Ok(StateVector::heads()),
            "tails" | "1" => Ok(StateVector::tails()),
            "plus_x" | "+x" => Ok(StateVector::plus_x()),
            "plus_y" | "+y" => Ok(StateVector::plus_y()),
            other => Err(CliError::input(format!("unknown initial state {other:?}"))),
        },
        Some(InitialEntry::Amplitudes([a, b])) => Ok(StateVector::new(*a, *b)?),
    }
}

impl SpecFile {
    pub fn load(path: &Path) -> CliResult<SpecFile> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("cannot parse {}: {e}", path.display())))
    }

    pub fn initial_state(&self) -> CliResult<StateVector> {
        initial_state(&self.initial)
    }

    pub fn unitaries(&self) -> CliResult<Vec<UnitaryOp>> {
        self.ops.iter().map(op_from_entry).collect()
    }

    pub fn typed_ops(&self) -> Option<Vec<TypedOp>> {
        self.ops.iter().map(typed_op).collect()
    }

    pub fn to_game(&self) -> CliResult<GameSpec> {
        let ops = self.unitaries()?;
        if ops.is_empty() {
            return Err(Error::EmptyOps.into());
        }
        let weights = match &self.probabilities {
            Some(p) => p.clone(),
            None => vec![1.0 / ops.len() as f64; ops.len()],
        };
        if weights.len() != ops.len() {
            return Err(Error::WeightMismatch {
                expected: ops.len(),
                got: weights.len(),
            }
            .into());
        }
        let initial = DensityMatrix::pure(&self.initial_state()?);
        let label = self.label.clone().unwrap_or_else(|| "spec".to_string());
        Ok(GameSpec::new(
            initial,
            ops.into_iter().zip(weights).collect(),
            label,
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyMatrices {
    pub u1: Mat2,
    pub u2: Mat2,
}

impl From<&StrategyPair> for StrategyMatrices {
    fn from(s: &StrategyPair) -> Self {
        StrategyMatrices {
            u1: *s.u1.mat(),
            u2: *s.u2.mat(),
        }
    }
}

impl StrategyMatrices {
    pub fn to_pair(&self) -> CliResult<StrategyPair> {
        Ok(StrategyPair::new(
            UnitaryOp::new(self.u1)?,
            UnitaryOp::new(self.u2)?,
        ))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Payoffs {
    pub p: f64,
    pub q: f64,
}

/// Machine-readable output of every subcommand.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_fidelity: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_branch_fidelity: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub payoffs: Vec<Payoffs>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bloch_trace: Vec<BranchTrace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyMatrices>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<MultiStrategyClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn win_tolerance() -> CliResult<f64> {
    match std::env::var(EPS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite() && *x >= 0.0)
            .ok_or_else(|| {
                CliError::input(format!(
                    "{EPS_ENV} must be a non-negative number, got {v:?}"
                ))
            }),
        Err(_) => Ok(EPS_WIN),
    }
}

/// Verifies `pair` and fills the verification fields of a report.
fn verified_report(
    command: &str,
    game: &GameSpec,
    pair: &StrategyPair,
    grid: usize,
) -> CliResult<Report> {
    let tol = win_tolerance()?;
    let v = verify_strategy_with_tolerance(game, pair, grid, tol);
    let payoffs = v
        .bloch_trace
        .iter()
        .map(|t| {
            let fin = DensityMatrix::pure(&StateVector::from_bloch(t.after_q2));
            quantum_payoff(&fin, game.initial()).map(|(p, q)| Payoffs { p, q })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut parameters = BTreeMap::new();
    parameters.insert("tolerance".into(), json!(tol));
    parameters.insert("prob_grid".into(), json!(grid));
    Ok(Report {
        command: command.into(),
        label: Some(game.label().to_string()),
        verdict: Some(v.verdict),
        worst_fidelity: Some(v.worst_fidelity),
        per_branch_fidelity: v.per_branch_fidelity,
        payoffs,
        bloch_trace: v.bloch_trace,
        strategy: Some(pair.into()),
        parameters,
        ..Report::default()
    })
}

fn verdict_code(r: &Report) -> i32 {
    if r.verdict == Some(Verdict::Win) {
        EXIT_WIN
    } else {
        EXIT_LOSE
    }
}

fn chappell_params(p: &ParamArgs) -> ChappellParams {
    ChappellParams::new(
        p.theta.unwrap_or(PI / 2.0),
        p.phi.unwrap_or(0.0),
        p.delta1,
        p.delta2,
    )
    .with_signs(p.a_sign, p.b_sign)
}

fn phase_params(p: &ParamArgs) -> PhaseVariableParams {
    PhaseVariableParams {
        delta1: p.delta1,
        delta2: p.delta2,
        a_sign: p.a_sign,
        b_sign: p.b_sign,
        ..PhaseVariableParams::new(
            p.theta.unwrap_or(PI / 2.0),
            p.phi.unwrap_or(0.0),
            p.alpha.unwrap_or(0.0),
            p.beta.unwrap_or(0.0),
        )
    }
}

fn family_pair(family: Family, p: &ParamArgs) -> CliResult<StrategyPair> {
    Ok(match family {
        Family::Meyer => meyer_hadamard(),
        Family::Chappell => chappell_family(&chappell_params(p))?,
        Family::Sigma13 => sigma13_family(&chappell_params(p))?,
        Family::Phase => phase_variable_family(&phase_params(p))?,
    })
}

fn param_map(p: &ParamArgs) -> BTreeMap<String, Value> {
    let mut m = BTreeMap::new();
    for (k, v) in [
        ("theta", p.theta),
        ("phi", p.phi),
        ("alpha", p.alpha),
        ("beta", p.beta),
        ("gamma", p.gamma),
    ] {
        if let Some(v) = v {
            m.insert(k.to_string(), json!(v));
        }
    }
    m.insert("delta1".into(), json!(p.delta1));
    m.insert("delta2".into(), json!(p.delta2));
    m.insert("a_sign".into(), json!(p.a_sign.value()));
    m.insert("b_sign".into(), json!(p.b_sign.value()));
    if let Some(c) = p.c_sign {
        m.insert("c_sign".into(), json!(c.value()));
    }
    m
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<Report> {
    let spec = SpecFile::load(&args.spec)?;
    let game = spec.to_game()?;
    let (pair, source) = if let Some(family) = args.family {
        (
            family_pair(family, &args.params)?,
            format!("{family:?}").to_lowercase(),
        )
    } else if let (Some(u1), Some(u2)) = (&args.u1, &args.u2) {
        (
            StrategyPair::new(parse_op(u1)?, parse_op(u2)?),
            "presets".to_string(),
        )
    } else if let Some(path) = &args.strategy_file {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        let report: Report = serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("cannot parse {}: {e}", path.display())))?;
        let m = report.strategy.ok_or_else(|| {
            CliError::input(format!("{} has no strategy matrices", path.display()))
        })?;
        (m.to_pair()?, "report".to_string())
    } else {
        return Err(CliError::input(
            "give --family, --u1/--u2 or --strategy-file",
        ));
    };
    let mut report = verified_report("verify", &game, &pair, args.grid)?;
    report.parameters.extend(param_map(&args.params));
    report.parameters.insert("source".into(), json!(source));
    Ok(report)
}

pub fn cmd_solve(args: &SolveArgs) -> CliResult<Report> {
    let spec = SpecFile::load(&args.spec)?;
    let game = spec.to_game()?;
    let ops = game.unitaries();
    let initial = spec.initial_state()?;
    let heads = initial.inner(&StateVector::heads()).norm() > 1.0 - 1e-12;
    let mut extra = BTreeMap::new();

    let pair = if args.oracle {
        let r = brute_force_oracle(&game, args.grid.max(8), args.seed);
        extra.insert("method".into(), json!("oracle"));
        extra.insert(
            "oracle_best_worst_fidelity".into(),
            json!(r.best_worst_fidelity),
        );
        extra.insert("seed".into(), json!(args.seed));
        r.argmax
    } else if ops.len() == 2 && heads {
        let p = &args.params;
        let solution = match p.gamma {
            Some(gamma) => {
                let mut problem =
                    TwoUnitaryProblem::new(ops[0], ops[1], gamma, p.c_sign.unwrap_or_default());
                problem.theta2 = p.phi.unwrap_or(0.0);
                problem.delta1 = p.delta1;
                problem.delta2 = p.delta2;
                problem.theta1 = tune_theta1(&problem)?;
                two_unitary_strategy(&problem)?
            }
            None => solve_two_unitary(
                ops[0],
                ops[1],
                &SolveOptions {
                    c_sign: p.c_sign,
                    theta2: p.phi.unwrap_or(0.0),
                    delta1: p.delta1,
                    delta2: p.delta2,
                    ..SolveOptions::default()
                },
            )?,
        };
        let route = match solution.route {
            SolutionRoute::LinearSystem => "linear-system",
            SolutionRoute::Eigenvector => "eigenvector",
        };
        extra.insert("method".into(), json!("two-unitary"));
        extra.insert("route".into(), json!(route));
        extra.insert("theta1".into(), json!(solution.problem.theta1));
        extra.insert("gamma".into(), json!(solution.problem.gamma));
        extra.insert("c_sign".into(), json!(solution.problem.c_sign.value()));
        extra.insert("axis".into(), json!(solution.axis));
        if let Some(d) = solution.det_v {
            extra.insert("det_v".into(), json!(d));
        }
        solution.pair
    } else {
        let classification = spec
            .typed_ops()
            .map(|t| classify_multiple(&t))
            .transpose()?;
        if !strategy_exists(&ops)? {
            let report = Report {
                command: "solve".into(),
                label: Some(game.label().to_string()),
                classification,
                error: Some(Error::NoStrategy.to_string()),
                ..Report::default()
            };
            return Err(CliError {
                code: EXIT_NO_STRATEGY,
                message: "no winning strategy: relative operations do not commute".into(),
                report: Some(Box::new(report)),
            });
        }
        extra.insert("method".into(), json!("eigenvector"));
        let pair = multi_op_strategy(&ops, &initial)?;
        let mut report = verified_report("solve", &game, &pair, args.grid)?;
        report.classification = classification;
        report.parameters.extend(extra);
        return Ok(report);
    };
    let mut report = verified_report("solve", &game, &pair, args.grid)?;
    report.parameters.extend(extra);
    Ok(report)
}

pub fn cmd_classify(args: &ClassifyArgs) -> CliResult<Report> {
    let spec = SpecFile::load(&args.spec)?;
    let typed = spec.typed_ops().ok_or_else(|| {
        CliError::input("classify needs flip(α)/nonflip(β)/sigma1/identity operations only")
    })?;
    let class = classify_multiple(&typed)?;
    Ok(Report {
        command: "classify".into(),
        label: spec.label.clone(),
        classification: Some(class),
        ..Report::default()
    })
}

pub fn cmd_nash(args: &NashArgs) -> CliResult<Report> {
    let p = MixedStrategyP::from_p_n(args.pn)?;
    let q: [f64; 4] = args
        .q
        .as_slice()
        .try_into()
        .map_err(|_| CliError::input("--q needs four probabilities"))?;
    let q = MixedStrategyQ::from_array(q)?;
    let u = expected_payoff(&p, &q);
    let eq = is_nash_equilibrium(&p, &q, args.deviations);
    Ok(Report {
        command: "nash".into(),
        summary: Some(json!({
            "p": p.as_array(),
            "q": q.as_array(),
            "payoff_p": u,
            "payoff_q": 0.0 - u,
            "equilibrium": eq,
        })),
        ..Report::default()
    })
}

fn linspace(n: usize, lo: f64, hi: f64, single: f64, closed: bool) -> Vec<f64> {
    match n {
        0 | 1 => vec![single],
        _ => {
            let d = if closed { (n - 1) as f64 } else { n as f64 };
            (0..n).map(|k| lo + (hi - lo) * k as f64 / d).collect()
        }
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> CliResult<Report> {
    let base_spec = args.spec.as_deref().map(SpecFile::load).transpose()?;
    let fixed_game = match (&base_spec, args.family) {
        (Some(s), _) => Some(s.to_game()?),
        (None, Family::Meyer | Family::Chappell) => Some(GameSpec::meyer()),
        (None, Family::Sigma13) => Some(GameSpec::sigma13()),
        (None, Family::Phase) => None,
    };
    let p = &args.params;
    let thetas = linspace(
        args.theta_grid,
        PI / 2.0,
        3.0 * PI / 2.0,
        p.theta.unwrap_or(PI / 2.0),
        true,
    );
    let phis = linspace(args.phi_grid, 0.0, 2.0 * PI, p.phi.unwrap_or(0.0), false);
    let alphas = linspace(
        args.alpha_grid,
        0.0,
        4.0 * PI,
        p.alpha.unwrap_or(0.0),
        false,
    );
    let betas = linspace(args.beta_grid, 0.0, 4.0 * PI, p.beta.unwrap_or(0.0), false);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let tol = win_tolerance()?;

    let (mut samples, mut wins, mut min_fidelity) = (0usize, 0usize, f64::INFINITY);
    let mut worst: Option<Value> = None;
    for &theta in &thetas {
        for &phi in &phis {
            for &alpha in &alphas {
                for &beta in &betas {
                    let mut q = p.clone();
                    q.theta = Some(theta);
                    q.phi = Some(phi);
                    q.alpha = Some(alpha);
                    q.beta = Some(beta);
                    if args.random_phases {
                        q.delta1 = rng.random_range(0.0..2.0 * PI);
                        q.delta2 = rng.random_range(0.0..2.0 * PI);
                    }
                    let pair = family_pair(args.family, &q)?;
                    let game = match &fixed_game {
                        Some(g) => g.clone(),
                        None => GameSpec::uniform(vec![flip_op(alpha), nonflip_op(beta)], "phase")?,
                    };
                    let v = verify_strategy_with_tolerance(&game, &pair, args.grid, tol);
                    samples += 1;
                    wins += usize::from(v.is_win());
                    if v.worst_fidelity < min_fidelity {
                        min_fidelity = v.worst_fidelity;
                        worst = Some(json!(param_map(&q)));
                    }
                }
            }
        }
    }
    let verdict = if wins == samples {
        Verdict::Win
    } else {
        Verdict::Lose
    };
    let mut parameters = param_map(p);
    parameters.insert(
        "family".into(),
        json!(format!("{:?}", args.family).to_lowercase()),
    );
    parameters.insert("seed".into(), json!(args.seed));
    parameters.insert("tolerance".into(), json!(tol));
    Ok(Report {
        command: "sweep".into(),
        verdict: Some(verdict),
        worst_fidelity: Some(min_fidelity),
        parameters,
        summary: Some(json!({
            "samples": samples,
            "wins": wins,
            "min_fidelity": min_fidelity,
            "worst_parameters": worst,
        })),
        ..Report::default()
    })
}

pub fn cmd_oracle(args: &OracleArgs) -> CliResult<Report> {
    let spec = SpecFile::load(&args.spec)?;
    let game = spec.to_game()?;
    let r = brute_force_oracle(&game, args.grid, args.seed);
    let mut report = verified_report("oracle", &game, &r.argmax, DEFAULT_PROB_GRID)?;
    report.parameters.insert("seed".into(), json!(args.seed));
    report
        .parameters
        .insert("oracle_grid".into(), json!(args.grid.max(8)));
    report.summary = Some(json!({
        "best_worst_fidelity": r.best_worst_fidelity,
        "grid_best": r.grid_best,
        "bloch_after_q1": bloch_vector(&game.initial().conjugate_by(&r.argmax.u1)),
    }));
    Ok(report)
}

fn emit(report: &Report, out: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(report).map_err(|e| CliError::input(e.to_string()))?;
    match out {
        Some(path) => fs::write(path, text + "\n")
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_WIN };
        }
    };
    let (result, out) = match &cli.command {
        Command::Verify(a) => (cmd_verify(a), a.out.as_deref()),
        Command::Solve(a) => (cmd_solve(a), a.out.as_deref()),
        Command::Classify(a) => (cmd_classify(a), a.out.as_deref()),
        Command::Nash(a) => (cmd_nash(a), a.out.as_deref()),
        Command::Sweep(a) => (cmd_sweep(a), a.out.as_deref()),
        Command::Oracle(a) => (cmd_oracle(a), a.out.as_deref()),
    };
    match result {
        Ok(report) => match emit(&report, out) {
            Ok(()) => match &cli.command {
                Command::Verify(_) | Command::Solve(_) | Command::Sweep(_) | Command::Oracle(_) => {
                    verdict_code(&report)
                }
                Command::Classify(_) | Command::Nash(_) => EXIT_WIN,
            },
            Err(e) => {
                eprintln!("error: {}", e.message);
                e.code
            }
        },
        Err(e) => {
            eprintln!("error: {}", e.message);
            if let Some(report) = &e.report {
                if let Err(e2) = emit(report, out) {
                    eprintln!("error: {}", e2.message);
                }
            }
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_presets() {
        assert_eq!(parse_op("sigma1").unwrap(), pauli(Pauli::Sigma1));
        assert_eq!(parse_op(" Flip(0) ").unwrap(), pauli(Pauli::Sigma1));
        assert_eq!(parse_op("nonflip(0)").unwrap(), UnitaryOp::identity());
        assert!(parse_op("flip(abc)").is_err());
        assert!(parse_op("sigma4").is_err());
    }

    #[test]
    fn typed_presets() {
        assert_eq!(
            typed_op(&OpEntry::Named("identity".into())),
            Some(TypedOp::NonFlip(0.0))
        );
        assert_eq!(
            typed_op(&OpEntry::Named("flip(1.5)".into())),
            Some(TypedOp::Flip(1.5))
        );
        assert_eq!(typed_op(&OpEntry::Named("sigma3".into())), None);
    }

    #[test]
    fn spec_file_roundtrip() {
        let text = r#"{"ops": ["identity", {"matrix": [[[0,0],[1,0]],[[1,0],[0,0]]]}], "probabilities": [0.25, 0.75]}"#;
        let spec: SpecFile = serde_json::from_str(text).unwrap();
        let ops = spec.unitaries().unwrap();
        assert_eq!(ops[1], pauli(Pauli::Sigma1));
        let game = spec.to_game().unwrap();
        assert_eq!(game.weights(), vec![0.25, 0.75]);
        let back: SpecFile = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn non_unitary_matrix_rejected() {
        let text = r#"{"ops": [{"matrix": [[[1,0],[1,0]],[[0,0],[1,0]]]}]}"#;
        let spec: SpecFile = serde_json::from_str(text).unwrap();
        assert_eq!(spec.to_game().unwrap_err().code, EXIT_INPUT);
    }

    #[test]
    fn error_codes() {
        assert_eq!(
            CliError::from(Error::Singular("x".into())).code,
            EXIT_SINGULAR
        );
        assert_eq!(CliError::from(Error::NoStrategy).code, EXIT_NO_STRATEGY);
        assert_eq!(CliError::from(Error::EmptyOps).code, EXIT_INPUT);
    }

    #[test]
    fn sign_parser() {
        assert_eq!(parse_sign("-1"), Ok(Sign::Minus));
        assert_eq!(parse_sign("+1"), Ok(Sign::Plus));
        assert!(parse_sign("2").is_err());
    }
}
