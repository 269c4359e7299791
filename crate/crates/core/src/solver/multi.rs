//! Games where P picks from three or more flip or non-flip operations.
//!
//! Q wins iff some state `ψ` satisfies `P_k ψ ∝ P_1 ψ` for every `k`, i.e. the
//! relative operations `P_1† P_k` share an eigenvector. In `U(2)` that holds
//! iff they commute pairwise.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamesim::StrategyPair;
use crate::qalg::{commutes, simultaneous_eigenvectors, StateVector, UnitaryOp, EPS_SING};

use super::families::{flip_op, nonflip_op};

/// A flip `F(α)` or non-flip `N(β)` operation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type", content = "angle")]
pub enum TypedOp {
    Flip(f64),
    NonFlip(f64),
}

impl TypedOp {
    pub fn unitary(&self) -> UnitaryOp {
        match *self {
            TypedOp::Flip(alpha) => flip_op(alpha),
            TypedOp::NonFlip(beta) => nonflip_op(beta),
        }
    }

    pub fn is_flip(&self) -> bool {
        matches!(self, TypedOp::Flip(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultiKind {
    AllCommuting,
    FlipCommutingTrivialN,
    FlipCommutingNontrivialN,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Existence {
    Yes,
    No,
    NoInGeneral,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiStrategyClass {
    pub kind: MultiKind,
    /// Number of flip operations.
    pub s: usize,
    /// Total number of operations.
    pub ell: usize,
    /// Whether a winning pair exists, decided by the relative-commutation test.
    pub strategy_exists: Existence,
    /// Verdict of the case-by-case rule attached to `kind`, where a non-flip
    /// `N(β)` counts as trivial when `β` is a multiple of `π`:
    /// yes for the two commuting kinds, yes for nontrivial `N` when
    /// `s = 1` or `s = ℓ − 1` and no-in-general otherwise, unknown for `General`.
    pub taxonomy_verdict: Existence,
}

impl MultiStrategyClass {
    pub fn agrees(&self) -> bool {
        match self.taxonomy_verdict {
            Existence::Yes => self.strategy_exists == Existence::Yes,
            Existence::No | Existence::NoInGeneral => self.strategy_exists == Existence::No,
            Existence::Unknown => true,
        }
    }
}

fn is_multiple_of_pi(x: f64) -> bool {
    let r = x / PI;
    (r - r.round()).abs() * PI < EPS_SING
}

fn pairwise_commuting(ops: &[UnitaryOp]) -> bool {
    ops.iter()
        .enumerate()
        .all(|(i, a)| ops[i + 1..].iter().all(|b| commutes(a, b)))
}

/// Relative operations `P_1† P_k`, `k ≥ 2`.
pub fn relative_ops(ops: &[UnitaryOp]) -> Vec<UnitaryOp> {
    match ops.split_first() {
        Some((first, rest)) => rest.iter().map(|op| first.dagger() * *op).collect(),
        None => Vec::new(),
    }
}

/// Exact existence test for an arbitrary operation set.
pub fn strategy_exists(ops: &[UnitaryOp]) -> Result<bool> {
    if ops.is_empty() {
        return Err(Error::EmptyOps);
    }
    Ok(pairwise_commuting(&relative_ops(ops)))
}

pub fn classify_multiple(ops: &[TypedOp]) -> Result<MultiStrategyClass> {
    if ops.is_empty() {
        return Err(Error::EmptyOps);
    }
    let ell = ops.len();
    let s = ops.iter().filter(|op| op.is_flip()).count();
    let unitaries: Vec<UnitaryOp> = ops.iter().map(TypedOp::unitary).collect();
    let flips: Vec<UnitaryOp> = ops
        .iter()
        .filter(|o| o.is_flip())
        .map(TypedOp::unitary)
        .collect();
    let nonflips_trivial = ops.iter().all(|o| match *o {
        TypedOp::NonFlip(beta) => is_multiple_of_pi(beta),
        TypedOp::Flip(_) => true,
    });

    let (kind, taxonomy_verdict) = if pairwise_commuting(&unitaries) {
        (MultiKind::AllCommuting, Existence::Yes)
    } else if pairwise_commuting(&flips) {
        if nonflips_trivial {
            (MultiKind::FlipCommutingTrivialN, Existence::Yes)
        } else if s == 1 || s + 1 == ell {
            (MultiKind::FlipCommutingNontrivialN, Existence::Yes)
        } else {
            (MultiKind::FlipCommutingNontrivialN, Existence::NoInGeneral)
        }
    } else {
        (MultiKind::General, Existence::Unknown)
    };
    let strategy_exists = if strategy_exists(&unitaries)? {
        Existence::Yes
    } else {
        Existence::No
    };
    Ok(MultiStrategyClass {
        kind,
        s,
        ell,
        strategy_exists,
        taxonomy_verdict,
    })
}

/// A winning pair against every operation in `ops`, starting from `initial`.
///
/// `U1` sends `initial` to a common eigenvector `ψ` of the relative
/// operations and `U2 = (P_1 U1)†`.
pub fn multi_op_strategy(ops: &[UnitaryOp], initial: &StateVector) -> Result<StrategyPair> {
    if ops.is_empty() {
        return Err(Error::EmptyOps);
    }
    let psi = match simultaneous_eigenvectors(&relative_ops(ops)) {
        Ok(vs) => vs.into_iter().next().ok_or(Error::NoStrategy)?,
        Err(Error::NonCommuting) => return Err(Error::NoStrategy),
        Err(e) => return Err(e),
    };
    let u1 = psi.preparing_unitary() * initial.preparing_unitary().dagger();
    let u2 = (ops[0] * u1).dagger();
    Ok(StrategyPair::new(u1, u2))
}
