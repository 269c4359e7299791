//! Three-move game flow `Q → P → Q` on density matrices.
//!
//! Player Q applies `U1`, player P applies one of the operations of a
//! [`GameSpec`] with its probability, then Q applies `U2`. Q wins when the
//! final coin state equals the initial one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qalg::{Mat2, Pauli, StateVector, UnitaryOp, C64, EPS_UNIT};

/// Fidelity tolerance for declaring a win.
pub const EPS_WIN: f64 = 1e-9;
/// Default number of probability grid points per edge.
pub const DEFAULT_PROB_GRID: usize = 11;

/// Upper bound on the number of mixtures checked for large operator sets.
const MAX_GRID_POINTS: usize = 5000;

/// A 2×2 Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Mat2);

impl DensityMatrix {
    pub fn new(mat: Mat2) -> Result<Self> {
        if !mat.is_finite() {
            return Err(Error::NonFinite("density matrix"));
        }
        let herm = mat.max_abs_diff(&mat.dagger());
        if herm > EPS_UNIT {
            return Err(Error::NotDensityMatrix(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = mat.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > EPS_UNIT {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        let rho = DensityMatrix(mat);
        let low = rho.eigenvalues()[0];
        if low < -EPS_UNIT {
            return Err(Error::NotDensityMatrix(format!(
                "negative eigenvalue {low:e}"
            )));
        }
        Ok(rho)
    }

    pub fn pure(v: &StateVector) -> Self {
        DensityMatrix(v.projector())
    }

    /// `|0⟩⟨0|`.
    pub fn heads() -> Self {
        Self::pure(&StateVector::heads())
    }

    pub fn tails() -> Self {
        Self::pure(&StateVector::tails())
    }

    pub fn mat(&self) -> &Mat2 {
        &self.0
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &UnitaryOp) -> DensityMatrix {
        DensityMatrix(*u.mat() * self.0 * u.mat().dagger())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let m = &self.0 .0;
        let (a, d) = (m[0][0].re, m[1][1].re);
        let b = 0.5 * (m[0][1] + m[1][0].conj());
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - radius, mean + radius]
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    fn mix(terms: impl IntoIterator<Item = (f64, DensityMatrix)>) -> DensityMatrix {
        let mut acc = Mat2::ZERO;
        for (w, rho) in terms {
            acc = acc + rho.0.scale(C64::new(w, 0.0));
        }
        DensityMatrix(acc)
    }
}

/// Player Q's pair `(U1, U2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategyPair {
    pub u1: UnitaryOp,
    pub u2: UnitaryOp,
}

impl StrategyPair {
    pub fn new(u1: UnitaryOp, u2: UnitaryOp) -> Self {
        StrategyPair { u1, u2 }
    }

    pub fn identity() -> Self {
        StrategyPair::new(UnitaryOp::identity(), UnitaryOp::identity())
    }
}

/// One operation available to player P, with the probability it is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdversaryOp {
    pub op: UnitaryOp,
    pub weight: f64,
}

/// One game instance: the initial coin state and player P's operation set.
#[derive(Clone, Debug, PartialEq)]
pub struct GameSpec {
    initial: DensityMatrix,
    ops: Vec<AdversaryOp>,
    label: String,
}

impl GameSpec {
    pub fn new(
        initial: DensityMatrix,
        ops: Vec<(UnitaryOp, f64)>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::EmptyOps);
        }
        let purity = initial.purity();
        if (purity - 1.0).abs() > EPS_UNIT {
            return Err(Error::NotPure { purity });
        }
        let weights: Vec<f64> = ops.iter().map(|(_, w)| *w).collect();
        check_weights(&weights)?;
        Ok(GameSpec {
            initial,
            ops: ops
                .into_iter()
                .map(|(op, weight)| AdversaryOp { op, weight })
                .collect(),
            label: label.into(),
        })
    }

    /// Equal weights, heads initial state.
    pub fn uniform(ops: Vec<UnitaryOp>, label: impl Into<String>) -> Result<Self> {
        let w = 1.0 / ops.len().max(1) as f64;
        Self::new(
            DensityMatrix::heads(),
            ops.into_iter().map(|op| (op, w)).collect(),
            label,
        )
    }

    /// P flips (`σ1`) or leaves the coin (`1`).
    pub fn meyer() -> Self {
        Self::uniform(
            vec![UnitaryOp::identity(), crate::qalg::pauli(Pauli::Sigma1)],
            "meyer",
        )
        .expect("valid preset")
    }

    /// P applies `σ1` or `σ3`.
    pub fn sigma13() -> Self {
        Self::uniform(
            vec![
                crate::qalg::pauli(Pauli::Sigma1),
                crate::qalg::pauli(Pauli::Sigma3),
            ],
            "sigma13",
        )
        .expect("valid preset")
    }

    pub fn initial(&self) -> &DensityMatrix {
        &self.initial
    }

    pub fn ops(&self) -> &[AdversaryOp] {
        &self.ops
    }

    pub fn unitaries(&self) -> Vec<UnitaryOp> {
        self.ops.iter().map(|a| a.op).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.ops.iter().map(|a| a.weight).collect()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidWeights(format!(
            "negative or non-finite in {weights:?}"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > EPS_UNIT {
        return Err(Error::InvalidWeights(format!("sum is {sum}")));
    }
    Ok(())
}

/// `U2 A U1 ρ0 U1† A† U2†` for the adversary operation at `branch`.
pub fn evolve_branch(spec: &GameSpec, s: &StrategyPair, branch: usize) -> Result<DensityMatrix> {
    let a = spec.ops.get(branch).ok_or(Error::BranchOutOfRange {
        index: branch,
        len: spec.ops.len(),
    })?;
    Ok(spec
        .initial
        .conjugate_by(&s.u1)
        .conjugate_by(&a.op)
        .conjugate_by(&s.u2))
}

/// Probability mixture of all branches with the given weights.
pub fn evolve_mixed(spec: &GameSpec, s: &StrategyPair, weights: &[f64]) -> Result<DensityMatrix> {
    if weights.len() != spec.ops.len() {
        return Err(Error::WeightMismatch {
            expected: spec.ops.len(),
            got: weights.len(),
        });
    }
    check_weights(weights)?;
    let branches = (0..spec.ops.len())
        .map(|k| evolve_branch(spec, s, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityMatrix::mix(weights.iter().copied().zip(branches)))
}

/// `tr(a·b)` for a pure reference state `b`.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let purity = b.purity();
    if (purity - 1.0).abs() > EPS_UNIT {
        return Err(Error::NotPure { purity });
    }
    Ok((*a.mat() * *b.mat()).trace().re)
}

/// `($P, $Q)` with `$P = −$Q = 1 − 2·fidelity(final, initial)`.
pub fn quantum_payoff(final_state: &DensityMatrix, initial: &DensityMatrix) -> Result<(f64, f64)> {
    let payoff_p = 1.0 - 2.0 * fidelity(final_state, initial)?;
    Ok((payoff_p, -payoff_p))
}

/// `(tr ρσ1, tr ρσ2, tr ρσ3)`.
pub fn bloch_vector(rho: &DensityMatrix) -> [f64; 3] {
    let component = |p: Pauli| (*rho.mat() * p.mat()).trace().re;
    [
        component(Pauli::Sigma1),
        component(Pauli::Sigma2),
        component(Pauli::Sigma3),
    ]
}

/// Bloch vectors after each of the three moves of one branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchTrace {
    pub after_q1: [f64; 3],
    pub after_p: [f64; 3],
    pub after_q2: [f64; 3],
}

/// Fidelity of the mixture at one probability grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub weights: Vec<f64>,
    pub fidelity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Win,
    Lose,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub worst_fidelity: f64,
    pub per_branch_fidelity: Vec<f64>,
    pub grid: Vec<GridPoint>,
    pub bloch_trace: Vec<BranchTrace>,
    pub tolerance: f64,
}

impl VerificationReport {
    pub fn is_win(&self) -> bool {
        self.verdict == Verdict::Win
    }
}

/// Checks a strategy branch by branch and over a probability grid.
///
/// The verdict is a win iff every fidelity (branches and grid mixtures) is at
/// least `1 − EPS_WIN`. Mixtures are convex, so the grid only repeats what the
/// branches already decide; it is kept as an independent numerical check.
pub fn verify_strategy(spec: &GameSpec, s: &StrategyPair, grid_size: usize) -> VerificationReport {
    verify_strategy_with_tolerance(spec, s, grid_size, EPS_WIN)
}

pub fn verify_strategy_with_tolerance(
    spec: &GameSpec,
    s: &StrategyPair,
    grid_size: usize,
    tolerance: f64,
) -> VerificationReport {
    let initial = spec.initial;
    let after_q1 = initial.conjugate_by(&s.u1);
    let mut per_branch_fidelity = Vec::with_capacity(spec.ops.len());
    let mut bloch_trace = Vec::with_capacity(spec.ops.len());
    let mut finals = Vec::with_capacity(spec.ops.len());
    for a in &spec.ops {
        let after_p = after_q1.conjugate_by(&a.op);
        let after_q2 = after_p.conjugate_by(&s.u2);
        per_branch_fidelity.push(overlap(&after_q2, &initial));
        bloch_trace.push(BranchTrace {
            after_q1: bloch_vector(&after_q1),
            after_p: bloch_vector(&after_p),
            after_q2: bloch_vector(&after_q2),
        });
        finals.push(after_q2);
    }

    let grid: Vec<GridPoint> = probability_grid(spec.ops.len(), grid_size)
        .into_iter()
        .map(|weights| {
            let mixed = DensityMatrix::mix(weights.iter().copied().zip(finals.iter().copied()));
            GridPoint {
                fidelity: overlap(&mixed, &initial),
                weights,
            }
        })
        .collect();

    let worst_fidelity = per_branch_fidelity
        .iter()
        .copied()
        .chain(grid.iter().map(|g| g.fidelity))
        .fold(f64::INFINITY, f64::min);
    let verdict = if worst_fidelity >= 1.0 - tolerance {
        Verdict::Win
    } else {
        Verdict::Lose
    };
    VerificationReport {
        verdict,
        worst_fidelity,
        per_branch_fidelity,
        grid,
        bloch_trace,
        tolerance,
    }
}

/// `tr(a·b)`; the purity of `b` is a [`GameSpec`] concern, not checked here.
fn overlap(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    (*a.mat() * *b.mat()).trace().re
}

/// Lattice points on the probability simplex with `grid_size − 1` divisions.
///
/// For two operations this is `(p, 1 − p)` with `p ∈ {0, 1/(g−1), …, 1}`.
/// Large operator sets use a coarser lattice so the point count stays bounded.
pub fn probability_grid(n_ops: usize, grid_size: usize) -> Vec<Vec<f64>> {
    if n_ops == 0 {
        return Vec::new();
    }
    let mut divisions = grid_size.max(2) - 1;
    while divisions > 1 && simplex_count(n_ops, divisions) > MAX_GRID_POINTS {
        divisions -= 1;
    }
    let mut out = Vec::new();
    let mut counts = vec![0usize; n_ops];
    fill_simplex(&mut counts, 0, divisions, &mut out);
    out.into_iter()
        .map(|c| c.iter().map(|&k| k as f64 / divisions as f64).collect())
        .collect()
}

fn simplex_count(n_ops: usize, divisions: usize) -> usize {
    // C(divisions + n_ops − 1, n_ops − 1), saturating
    let k = n_ops - 1;
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.saturating_mul(divisions + k - i) / (i + 1);
        if acc > MAX_GRID_POINTS * 10 {
            return acc;
        }
    }
    acc
}

fn fill_simplex(counts: &mut Vec<usize>, pos: usize, remaining: usize, out: &mut Vec<Vec<usize>>) {
    if pos == counts.len() - 1 {
        counts[pos] = remaining;
        out.push(counts.clone());
        return;
    }
    for k in (0..=remaining).rev() {
        counts[pos] = k;
        fill_simplex(counts, pos + 1, remaining - k, out);
    }
}
