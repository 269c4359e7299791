//! The classical penny-flip game: P moves once (`N` or `F`), Q moves twice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qalg::EPS_UNIT;

pub const DEFAULT_DEVIATIONS: usize = 101;

/// P's mixed strategy over `(N, F)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategyP {
    pub p_n: f64,
    pub p_f: f64,
}

impl MixedStrategyP {
    pub fn new(p_n: f64, p_f: f64) -> Result<Self> {
        check_distribution(&[p_n, p_f])?;
        Ok(MixedStrategyP { p_n, p_f })
    }

    /// `(p_N, 1 − p_N)`.
    pub fn from_p_n(p_n: f64) -> Result<Self> {
        Self::new(p_n, 1.0 - p_n)
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.p_n, self.p_f]
    }
}

/// Q's mixed strategy over `(NN, NF, FN, FF)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategyQ {
    pub q_nn: f64,
    pub q_nf: f64,
    pub q_fn: f64,
    pub q_ff: f64,
}

impl MixedStrategyQ {
    pub fn new(q_nn: f64, q_nf: f64, q_fn: f64, q_ff: f64) -> Result<Self> {
        check_distribution(&[q_nn, q_nf, q_fn, q_ff])?;
        Ok(MixedStrategyQ {
            q_nn,
            q_nf,
            q_fn,
            q_ff,
        })
    }

    pub fn from_array(q: [f64; 4]) -> Result<Self> {
        Self::new(q[0], q[1], q[2], q[3])
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.q_nn, self.q_nf, self.q_fn, self.q_ff]
    }

    /// A member of the equilibrium family `(q_NN, q_NF, 1/2 − q_NF, 1/2 − q_NN)`.
    pub fn equilibrium(q_nn: f64, q_nf: f64) -> Result<Self> {
        Self::new(q_nn, q_nf, 0.5 - q_nf, 0.5 - q_nn)
    }
}

fn check_distribution(probs: &[f64]) -> Result<()> {
    if probs.iter().any(|p| !p.is_finite() || *p < -EPS_UNIT) {
        return Err(Error::InvalidWeights(format!("{probs:?}")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > EPS_UNIT {
        return Err(Error::InvalidWeights(format!("{probs:?} sums to {sum}")));
    }
    Ok(())
}

pub const P_ACTIONS: [&str; 2] = ["N", "F"];
pub const Q_ACTIONS: [&str; 4] = ["NN", "NF", "FN", "FF"];

/// Payoffs `(P, Q)` indexed by P action (rows) and Q action (columns).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    pub cells: [[(i32, i32); 4]; 2],
}

impl PayoffMatrix {
    pub fn is_zero_sum(&self) -> bool {
        self.cells.iter().flatten().all(|(p, q)| p + q == 0)
    }

    /// Expected P payoff `Σ p_i q_j payoff_P(i, j)`.
    pub fn expected_payoff_p(&self, p: &[f64; 2], q: &[f64; 4]) -> f64 {
        self.expected(p, q, |c| c.0)
    }

    pub fn expected_payoff_q(&self, p: &[f64; 2], q: &[f64; 4]) -> f64 {
        self.expected(p, q, |c| c.1)
    }

    fn expected(&self, p: &[f64; 2], q: &[f64; 4], pick: impl Fn((i32, i32)) -> i32) -> f64 {
        let mut total = 0.0;
        for (i, row) in self.cells.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                total += p[i] * q[j] * pick(*cell) as f64;
            }
        }
        total
    }

    /// Pure profiles `(P row, Q column)` where neither player gains by deviating.
    pub fn pure_equilibria(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..2 {
            for j in 0..4 {
                let (up, uq) = self.cells[i][j];
                let p_stays = (0..2).all(|k| self.cells[k][j].0 <= up);
                let q_stays = (0..4).all(|k| self.cells[i][k].1 <= uq);
                if p_stays && q_stays {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// The classical table: Q wins (`(−1, 1)`) iff the coin was flipped an even number of times.
pub fn canonical_payoff_matrix() -> PayoffMatrix {
    let flips_p = [0, 1];
    let flips_q = [0, 1, 1, 2];
    let mut cells = [[(0, 0); 4]; 2];
    for (i, fp) in flips_p.iter().enumerate() {
        for (j, fq) in flips_q.iter().enumerate() {
            cells[i][j] = if (fp + fq) % 2 == 0 { (-1, 1) } else { (1, -1) };
        }
    }
    PayoffMatrix { cells }
}

/// `u_P = (1 − 2 p_N)[1 − 2(q_NF + q_FN)]`.
pub fn expected_payoff(p: &MixedStrategyP, q: &MixedStrategyQ) -> f64 {
    (1.0 - 2.0 * p.p_n) * (1.0 - 2.0 * (q.q_nf + q.q_fn))
}

/// Unilateral-deviation test.
///
/// P's alternatives are `p_N` on a uniform grid of `n_deviations` points
/// (endpoints are the pure strategies). Q's alternatives are lattice points
/// on its 4-simplex, the finest lattice with at most `n_deviations` points
/// and always including the four pure strategies.
pub fn is_nash_equilibrium(p: &MixedStrategyP, q: &MixedStrategyQ, n_deviations: usize) -> bool {
    let base = expected_payoff(p, q);
    let n = n_deviations.max(2);
    let p_ok = (0..n).all(|k| {
        let p_n = k as f64 / (n - 1) as f64;
        let alt = MixedStrategyP {
            p_n,
            p_f: 1.0 - p_n,
        };
        expected_payoff(&alt, q) <= base + EPS_UNIT
    });
    // Q maximizes u_Q = −u_P
    let q_ok = q_deviations(n)
        .iter()
        .all(|alt| -expected_payoff(p, alt) <= -base + EPS_UNIT);
    p_ok && q_ok
}

fn q_deviations(max_points: usize) -> Vec<MixedStrategyQ> {
    // lattice with d divisions has C(d + 3, 3) points
    let count = |d: usize| (d + 1) * (d + 2) * (d + 3) / 6;
    let mut d = 1;
    while count(d + 1) <= max_points {
        d += 1;
    }
    let mut out = Vec::with_capacity(count(d));
    for a in 0..=d {
        for b in 0..=d - a {
            for c in 0..=d - a - b {
                let e = d - a - b - c;
                let f = |k: usize| k as f64 / d as f64;
                out.push(MixedStrategyQ {
                    q_nn: f(a),
                    q_nf: f(b),
                    q_fn: f(c),
                    q_ff: f(e),
                });
            }
        }
    }
    out
}

/// Pure Nash equilibria of the classical table; there are none.
pub fn pure_equilibria() -> Vec<(usize, usize)> {
    canonical_payoff_matrix().pure_equilibria()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_entries() {
        let m = canonical_payoff_matrix();
        assert_eq!(m.cells[0][0], (-1, 1));
        assert_eq!(m.cells[1][0], (1, -1));
        assert_eq!(m.cells[1][1], (-1, 1));
        assert_eq!(m.cells[0][1], (1, -1));
        assert_eq!(m.cells[0][3], (-1, 1));
        assert!(m.is_zero_sum());
    }

    #[test]
    fn payoff_examples() {
        let q = MixedStrategyQ::new(1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(
            expected_payoff(&MixedStrategyP::from_p_n(1.0).unwrap(), &q),
            -1.0
        );
        let half = MixedStrategyP::from_p_n(0.5).unwrap();
        let q = MixedStrategyQ::new(0.1, 0.2, 0.3, 0.4).unwrap();
        assert_eq!(expected_payoff(&half, &q), 0.0);
    }

    #[test]
    fn equilibrium_examples() {
        let half = MixedStrategyP::from_p_n(0.5).unwrap();
        let q = MixedStrategyQ::equilibrium(0.25, 0.25).unwrap();
        assert!(is_nash_equilibrium(&half, &q, DEFAULT_DEVIATIONS));

        let pure_p = MixedStrategyP::from_p_n(1.0).unwrap();
        let pure_q = MixedStrategyQ::new(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(!is_nash_equilibrium(&pure_p, &pure_q, DEFAULT_DEVIATIONS));

        let q = MixedStrategyQ::equilibrium(0.5, 0.0).unwrap();
        assert!(is_nash_equilibrium(&half, &q, DEFAULT_DEVIATIONS));
    }

    #[test]
    fn off_family_is_not_equilibrium() {
        // Q puts all weight on "same" moves: P's best response is F
        let half = MixedStrategyP::from_p_n(0.5).unwrap();
        let q = MixedStrategyQ::new(0.5, 0.0, 0.0, 0.5).unwrap();
        assert!(!is_nash_equilibrium(&half, &q, DEFAULT_DEVIATIONS));
    }

    #[test]
    fn no_pure_equilibria() {
        assert!(pure_equilibria().is_empty());
    }

    #[test]
    fn dominant_strategy_matrix_has_pure_equilibrium() {
        let m = PayoffMatrix {
            cells: [
                [(3, 3), (3, 1), (3, 1), (3, 1)],
                [(0, 0), (0, 0), (0, 0), (0, 0)],
            ],
        };
        assert!(!m.is_zero_sum());
        assert_eq!(m.pure_equilibria(), vec![(0, 0)]);
    }

    #[test]
    fn q_deviation_lattice_contains_pure() {
        let devs = q_deviations(DEFAULT_DEVIATIONS);
        assert!(devs.len() <= DEFAULT_DEVIATIONS);
        for k in 0..4 {
            let mut e = [0.0; 4];
            e[k] = 1.0;
            assert!(devs.iter().any(|d| d.as_array() == e));
        }
    }

    #[test]
    fn invalid_strategies() {
        assert!(MixedStrategyP::new(0.7, 0.7).is_err());
        assert!(MixedStrategyQ::new(-0.5, 0.5, 0.5, 0.5).is_err());
    }
}
