//! Brute-force search for Q's best guaranteed fidelity.
//!
//! Each of `U1`, `U2` is an SU(2) rotation `(θ, polar, azimuth)` with zero
//! phase. A coarse grid is scanned exhaustively and the best points are then
//! refined by hill climbing on the worst branch fidelity. Fidelity is linear
//! in P's mixing weights, so the worst branch bounds every mixture.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::gamesim::{bloch_vector, GameSpec, StrategyPair};
use crate::qalg::{unitary_from_parts, StateVector, UnitaryOp};

pub const MIN_GRID: usize = 8;
pub const CLIMB_STEPS: usize = 200;
pub const STEP_DECAY: f64 = 0.7;
/// Grid points refined by hill climbing.
pub const CLIMB_STARTS: usize = 8;
const RANDOM_DIRECTIONS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResult {
    pub best_worst_fidelity: f64,
    pub argmax: StrategyPair,
    /// Best value on the coarse grid before refinement.
    pub grid_best: f64,
}

type Params = [f64; 3];

fn rotation(p: &Params) -> UnitaryOp {
    let (st, ct) = p[1].sin_cos();
    let (sa, ca) = p[2].sin_cos();
    unitary_from_parts(0.0, p[0], [st * ca, st * sa, ct])
}

fn inner(a: &[C64; 2], b: &[C64; 2]) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

struct Game {
    psi0: StateVector,
    ops: Vec<UnitaryOp>,
}

impl Game {
    /// `P_k U1 ψ0` for every branch.
    fn branches(&self, u1: &UnitaryOp) -> Vec<[C64; 2]> {
        let v = u1.apply(&self.psi0);
        self.ops
            .iter()
            .map(|op| op.apply(&v).amplitudes())
            .collect()
    }

    /// `U2† ψ0`, so that branch fidelity is `|⟨χ|P_k U1 ψ0⟩|²`.
    fn target(&self, u2: &UnitaryOp) -> [C64; 2] {
        u2.dagger().apply(&self.psi0).amplitudes()
    }

    fn worst(branches: &[[C64; 2]], chi: &[C64; 2]) -> f64 {
        branches
            .iter()
            .map(|b| inner(chi, b).norm_sqr())
            .fold(f64::INFINITY, f64::min)
    }

    fn score(&self, x: &[f64; 6]) -> f64 {
        let u1 = rotation(&[x[0], x[1], x[2]]);
        let u2 = rotation(&[x[3], x[4], x[5]]);
        Self::worst(&self.branches(&u1), &self.target(&u2))
    }
}

fn grid_params(n: usize) -> Vec<Params> {
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.push([
                    2.0 * PI * i as f64 / n as f64,
                    PI * (j as f64 + 0.5) / n as f64,
                    2.0 * PI * k as f64 / n as f64,
                ]);
            }
        }
    }
    out
}

/// Searches for the pair maximizing the worst branch fidelity of `spec`.
///
/// `grid` is the number of points per angle and is raised to at least 8.
/// The result depends only on the arguments.
pub fn brute_force_oracle(spec: &GameSpec, grid: usize, seed: u64) -> OracleResult {
    let game = Game {
        psi0: StateVector::from_bloch(bloch_vector(spec.initial())),
        ops: spec.unitaries(),
    };
    let n = grid.max(MIN_GRID);
    let params = grid_params(n);
    let rotations: Vec<UnitaryOp> = params.iter().map(rotation).collect();
    let branches: Vec<Vec<[C64; 2]>> = rotations.iter().map(|u| game.branches(u)).collect();
    let targets: Vec<[C64; 2]> = rotations.iter().map(|u| game.target(u)).collect();

    // ordered (score desc, index asc) so ties resolve deterministically
    let mut scored: Vec<(f64, usize, usize)> = Vec::with_capacity(params.len() * params.len());
    for (i, b) in branches.iter().enumerate() {
        for (j, chi) in targets.iter().enumerate() {
            scored.push((Game::worst(b, chi), i, j));
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let grid_best = scored[0].0;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step0 = PI / n as f64;
    let mut best = (f64::NEG_INFINITY, [0.0; 6]);
    for &(f0, i, j) in scored.iter().take(CLIMB_STARTS) {
        let (p, q) = (params[i], params[j]);
        let start = [p[0], p[1], p[2], q[0], q[1], q[2]];
        let (f, x) = climb(&game, start, f0, step0, &mut rng);
        if f > best.0 {
            best = (f, x);
        }
    }
    let x = best.1;
    OracleResult {
        best_worst_fidelity: best.0,
        argmax: StrategyPair::new(rotation(&[x[0], x[1], x[2]]), rotation(&[x[3], x[4], x[5]])),
        grid_best,
    }
}

fn climb<R: Rng>(
    game: &Game,
    mut x: [f64; 6],
    mut fx: f64,
    mut step: f64,
    rng: &mut R,
) -> (f64, [f64; 6]) {
    for _ in 0..CLIMB_STEPS {
        let mut directions: Vec<[f64; 6]> = Vec::with_capacity(12 + RANDOM_DIRECTIONS);
        for k in 0..6 {
            for sign in [1.0, -1.0] {
                let mut d = [0.0; 6];
                d[k] = sign;
                directions.push(d);
            }
        }
        for _ in 0..RANDOM_DIRECTIONS {
            let mut d = [0.0; 6];
            for v in d.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            directions.push(d.map(|v| v / norm));
        }
        let mut improved = None;
        for d in &directions {
            let mut y = x;
            for (yi, di) in y.iter_mut().zip(d) {
                *yi += step * di;
            }
            let fy = game.score(&y);
            if fy > improved.map_or(fx, |(f, _)| f) {
                improved = Some((fy, y));
            }
        }
        match improved {
            Some((f, y)) => {
                fx = f;
                x = y;
            }
            None => step *= STEP_DECAY,
        }
    }
    (fx, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamesim::{verify_strategy, GameSpec};
    use crate::qalg::{pauli, Pauli};

    #[test]
    fn meyer_spec_is_solved() {
        let r = brute_force_oracle(&GameSpec::meyer(), 8, 0);
        assert!(
            r.best_worst_fidelity >= 1.0 - 1e-6,
            "{}",
            r.best_worst_fidelity
        );
        let report = verify_strategy(&GameSpec::meyer(), &r.argmax, 11);
        assert!((report.worst_fidelity - r.best_worst_fidelity).abs() < 1e-9);
    }

    #[test]
    fn single_op_is_exact() {
        let spec = GameSpec::uniform(vec![pauli(Pauli::Sigma2)], "one").unwrap();
        let r = brute_force_oracle(&spec, 8, 3);
        assert!(r.best_worst_fidelity > 1.0 - 1e-12);
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = GameSpec::sigma13();
        let a = brute_force_oracle(&spec, 8, 11);
        let b = brute_force_oracle(&spec, 8, 11);
        assert_eq!(a, b);
    }

    #[test]
    fn all_three_paulis_cannot_be_beaten() {
        // the relative ops σ1σ2, σ1σ3 anticommute, so no pair reaches fidelity 1
        let spec = GameSpec::uniform(
            vec![
                pauli(Pauli::Sigma1),
                pauli(Pauli::Sigma2),
                pauli(Pauli::Sigma3),
            ],
            "paulis",
        )
        .unwrap();
        let r = brute_force_oracle(&spec, 8, 0);
        assert!(r.best_worst_fidelity < 0.999);
    }
}
