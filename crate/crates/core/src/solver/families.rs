//! Closed-form winning-strategy families against two-operation adversaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamesim::StrategyPair;
use crate::qalg::{hadamard, pauli, unitary_from_parts, z_rotation, Mat2, Pauli, UnitaryOp, C64};

/// A `±1` branch choice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(x: f64) -> Option<Sign> {
        if x == 1.0 {
            Some(Sign::Plus)
        } else if x == -1.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Parameters shared by the Meyer-game and `σ1/σ3` families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChappellParams {
    pub theta: f64,
    pub phi: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub a_sign: Sign,
    pub b_sign: Sign,
}

impl ChappellParams {
    pub fn new(theta: f64, phi: f64, delta1: f64, delta2: f64) -> Self {
        ChappellParams {
            theta,
            phi,
            delta1,
            delta2,
            a_sign: Sign::Plus,
            b_sign: Sign::Plus,
        }
    }

    pub fn with_signs(mut self, a_sign: Sign, b_sign: Sign) -> Self {
        self.a_sign = a_sign;
        self.b_sign = b_sign;
        self
    }
}

/// Phase-variable family parameters; `Δ = α − β` enters the axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseVariableParams {
    pub theta: f64,
    pub phi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub a_sign: Sign,
    pub b_sign: Sign,
}

impl PhaseVariableParams {
    pub fn new(theta: f64, phi: f64, alpha: f64, beta: f64) -> Self {
        PhaseVariableParams {
            theta,
            phi,
            alpha,
            beta,
            delta1: 0.0,
            delta2: 0.0,
            a_sign: Sign::Plus,
            b_sign: Sign::Plus,
        }
    }

    pub fn delta_diff(&self) -> f64 {
        self.alpha - self.beta
    }
}

/// `(cot(θ/2), a)` with `a = ±sqrt((1 − cot²(θ/2))/2)`.
///
/// Real `a` needs `|cot(θ/2)| ≤ 1`, i.e. `|θ| ∈ [π/2, 3π/2]` modulo `4π`.
fn cot_and_a(theta: f64, a_sign: Sign) -> Result<(f64, f64)> {
    if !theta.is_finite() {
        return Err(Error::NonFinite("theta"));
    }
    let (s, c) = (0.5 * theta).sin_cos();
    if s.abs() < 1e-12 {
        return Err(Error::ParamRange(format!(
            "theta = {theta}: cot(theta/2) is unbounded"
        )));
    }
    let cot = c / s;
    let r = 1.0 - cot * cot;
    if r < -1e-12 {
        return Err(Error::ParamRange(format!(
            "theta = {theta}: |cot(theta/2)| = {} > 1",
            cot.abs()
        )));
    }
    Ok((cot, a_sign.value() * (0.5 * r.max(0.0)).sqrt()))
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("strategy parameters"))
    }
}

/// `(H, H)`.
pub fn meyer_hadamard() -> StrategyPair {
    StrategyPair::new(hadamard(), hadamard())
}

/// Axis `(a, −b cot(θ/2), ab)`.
///
/// With `U1 = e^{iθ n·σ/2}`, `U1|0⟩` is an eigenvector of `σ1` iff
/// `n1 cos(θ/2) + n2 n3 sin(θ/2) = 0`, which fixes the sign of the middle
/// component. Written with `+b cot(θ/2)` the axis belongs to `e^{−iθ n·σ/2}`.
pub fn chappell_axis(theta: f64, a_sign: Sign, b_sign: Sign) -> Result<[f64; 3]> {
    let (cot, a) = cot_and_a(theta, a_sign)?;
    let b = b_sign.value();
    Ok([a, -b * cot, a * b])
}

/// Winning pairs against `{1, σ1}`:
/// `U1 = e^{iδ1} e^{iθ n·σ/2}`, `U2 = e^{iδ2} e^{iφσ3/2} U1†`.
pub fn chappell_family(p: &ChappellParams) -> Result<StrategyPair> {
    check_finite(&[p.phi, p.delta1, p.delta2])?;
    let n = chappell_axis(p.theta, p.a_sign, p.b_sign)?;
    let u1 = unitary_from_parts(p.delta1, p.theta, n);
    let u2 = z_rotation(p.phi).with_phase(p.delta2) * u1.dagger();
    Ok(StrategyPair::new(u1, u2))
}

/// Axis `(b cot(θ/2), ab, a)`.
pub fn sigma13_axis(theta: f64, a_sign: Sign, b_sign: Sign) -> Result<[f64; 3]> {
    let (cot, a) = cot_and_a(theta, a_sign)?;
    let b = b_sign.value();
    Ok([b * cot, a * b, a])
}

/// Winning pairs against `{σ1, σ3}`: `U2 = e^{iδ2} e^{iφσ3/2} U1† σ3`.
pub fn sigma13_family(p: &ChappellParams) -> Result<StrategyPair> {
    check_finite(&[p.phi, p.delta1, p.delta2])?;
    let n = sigma13_axis(p.theta, p.a_sign, p.b_sign)?;
    let u1 = unitary_from_parts(p.delta1, p.theta, n);
    let u2 = z_rotation(p.phi).with_phase(p.delta2) * u1.dagger() * pauli(Pauli::Sigma3);
    Ok(StrategyPair::new(u1, u2))
}

/// `F(α) = e^{iασ3/2} σ1`.
pub fn flip_op(alpha: f64) -> UnitaryOp {
    let h = 0.5 * alpha;
    UnitaryOp::from_mat_unchecked(Mat2::new(
        C64::new(0.0, 0.0),
        C64::from_polar(1.0, h),
        C64::from_polar(1.0, -h),
        C64::new(0.0, 0.0),
    ))
}

/// `N(β) = e^{iβσ3/2}`.
pub fn nonflip_op(beta: f64) -> UnitaryOp {
    z_rotation(beta)
}

/// Axis `(a cos(Δ/2) − b cot sin(Δ/2), −b cot cos(Δ/2) − a sin(Δ/2), ab)`, `Δ = α − β`.
///
/// At `Δ = 0` this is [`chappell_axis`]; the sign of `cot(θ/2)` follows the
/// same convention.
pub fn phase_variable_axis(p: &PhaseVariableParams) -> Result<[f64; 3]> {
    let (cot, a) = cot_and_a(p.theta, p.a_sign)?;
    let k = -p.b_sign.value() * cot;
    let (sd, cd) = (0.5 * p.delta_diff()).sin_cos();
    Ok([k * sd + a * cd, k * cd - a * sd, a * p.b_sign.value()])
}

/// Winning pairs against `{F(α), N(β)}`:
/// `U2 = e^{iδ2} e^{iφσ3/2} U1† e^{−iβσ3/2}`.
pub fn phase_variable_family(p: &PhaseVariableParams) -> Result<StrategyPair> {
    check_finite(&[p.phi, p.alpha, p.beta, p.delta1, p.delta2])?;
    let n = phase_variable_axis(p)?;
    let u1 = unitary_from_parts(p.delta1, p.theta, n);
    let u2 = z_rotation(p.phi).with_phase(p.delta2) * u1.dagger() * nonflip_op(-p.beta);
    Ok(StrategyPair::new(u1, u2))
}
