//! Winning strategies against two arbitrary `U(2)` operations.
//!
//! With `W = U_P2† U_P1 = e^{iξ} e^{iφ M·σ/2}`, player Q wins iff
//! `U1† W U1 = c e^{iδ3} e^{iγσ3/2}` for some phase. Writing `U1` in axis-angle
//! form turns the vector part of this condition into the 3×3 linear system
//! `V n = cos(θ1/2) r`. Its solution is `n = −cot(θ1/2) w / D` and only the
//! scale `cot(θ1/2)` is free, so `θ1` is tuned until `|n| = 1`.
//!
//! Conjugation preserves the trace, so a solution also needs
//! `cos(φ/2) = c cos(γ/2)`. That is exactly the first factor of `det V`, so at
//! every consistent `γ` the matrix `V` is singular while the closed form for
//! `n` stays finite. The singularity guard therefore tests the second factor
//! `D` and `sin(θ1/2)`, not `det V` itself.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gamesim::StrategyPair;
use crate::qalg::{
    cross3, dot3, norm3, scale3, simultaneous_eigenvectors, sub3, to_axis_angle,
    unitary_from_parts, wrap_angle, z_rotation, UnitaryOp, EPS_SING,
};

use super::families::Sign;

/// Singularity threshold on the denominator `D` of the Bloch-vector solution.
pub const EPS_DET: f64 = 1e-8;
/// Required accuracy of `|n| = 1`.
pub const EPS_NORM: f64 = 1e-9;
/// Required accuracy of the trace condition `cos(φ/2) = c cos(γ/2)`.
pub const EPS_TRACE: f64 = 1e-9;
/// Relative bracket width at which the `cot(θ1/2)` bisection stops.
pub const THETA1_TOL: f64 = 1e-12;

/// Angle `φ`, unit axis `M` and phase of `U_P2† U_P1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdversaryComposition {
    pub varphi: f64,
    pub axis: [f64; 3],
    pub phase: f64,
    pub cos_half: f64,
    pub sin_half: f64,
}

/// Composes `U_P2† U_P1` with the spherical-trigonometry law:
/// `cos(φ/2) = c1 c2 + m1·m2 s1 s2` and
/// `M sin(φ/2) = m1 s1 c2 − m2 c1 s2 − m1×m2 s1 s2`.
pub fn compose_adversary(up1: &UnitaryOp, up2: &UnitaryOp) -> Result<AdversaryComposition> {
    let p1 = to_axis_angle(up1);
    let p2 = to_axis_angle(up2);
    let (s1, c1) = (0.5 * p1.theta).sin_cos();
    let (s2, c2) = (0.5 * p2.theta).sin_cos();
    let (m1, m2) = (p1.axis, p2.axis);
    let cos_half = c1 * c2 + dot3(m1, m2) * s1 * s2;
    let mvec = sub3(
        sub3(scale3(m1, s1 * c2), scale3(m2, c1 * s2)),
        scale3(cross3(m1, m2), s1 * s2),
    );
    let sin_half = norm3(mvec);
    if sin_half < EPS_SING {
        return Err(Error::DegenerateComposition { sin_half });
    }
    Ok(AdversaryComposition {
        varphi: 2.0 * sin_half.atan2(cos_half),
        axis: scale3(mvec, 1.0 / sin_half),
        phase: wrap_angle(p1.delta - p2.delta),
        cos_half,
        sin_half,
    })
}

/// Player P's two operations plus Q's free parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoUnitaryProblem {
    pub up1: UnitaryOp,
    pub up2: UnitaryOp,
    pub theta1: f64,
    pub theta2: f64,
    pub gamma: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub c_sign: Sign,
}

impl TwoUnitaryProblem {
    pub fn new(up1: UnitaryOp, up2: UnitaryOp, gamma: f64, c_sign: Sign) -> Self {
        TwoUnitaryProblem {
            up1,
            up2,
            theta1: PI / 2.0,
            theta2: 0.0,
            gamma,
            delta1: 0.0,
            delta2: 0.0,
            c_sign,
        }
    }

    /// A problem whose `γ` satisfies `cos(γ/2) = c cos(φ/2)`, with `γ` of the given sign.
    pub fn consistent(
        up1: UnitaryOp,
        up2: UnitaryOp,
        c_sign: Sign,
        gamma_sign: Sign,
    ) -> Result<Self> {
        let comp = compose_adversary(&up1, &up2)?;
        Ok(Self::new(
            up1,
            up2,
            consistent_gamma(&comp, c_sign, gamma_sign),
            c_sign,
        ))
    }
}

/// `γ = ±2 arccos(c cos(φ/2))`.
pub fn consistent_gamma(comp: &AdversaryComposition, c_sign: Sign, gamma_sign: Sign) -> f64 {
    let x = (c_sign.value() * comp.cos_half).clamp(-1.0, 1.0);
    gamma_sign.value() * 2.0 * x.acos()
}

struct Halves {
    cphi: f64,
    sphi: f64,
    cg: f64,
    sg: f64,
    st: f64,
    ct: f64,
    c: f64,
    m: [f64; 3],
}

impl Halves {
    fn new(problem: &TwoUnitaryProblem, comp: &AdversaryComposition) -> Self {
        let (sg, cg) = (0.5 * problem.gamma).sin_cos();
        let (st, ct) = (0.5 * problem.theta1).sin_cos();
        Halves {
            cphi: comp.cos_half,
            sphi: comp.sin_half,
            cg,
            sg,
            st,
            ct,
            c: problem.c_sign.value(),
            m: comp.axis,
        }
    }

    fn denominator(&self) -> f64 {
        self.m[2] * self.sphi * self.sg - self.cphi * self.cg + self.c
    }

    fn w(&self) -> [f64; 3] {
        let (m, s) = (self.m, self.sphi);
        [
            (m[0] * self.cg - m[1] * self.sg) * s,
            (m[0] * self.sg + m[1] * self.cg) * s,
            m[2] * s * self.cg + self.cphi * self.sg,
        ]
    }
}

/// The 3×3 matrix `V` of the linear system `V n = rhs`.
pub fn v_matrix(problem: &TwoUnitaryProblem, comp: &AdversaryComposition) -> [[f64; 3]; 3] {
    let h = Halves::new(problem, comp);
    let (m, s) = (h.m, h.sphi);
    let a = h.cphi - h.c * h.cg;
    let b = m[2] * s + h.c * h.sg;
    let rows = [
        [a, -b, m[1] * s],
        [b, a, -m[0] * s],
        [-m[1] * s, m[0] * s, a],
    ];
    rows.map(|r| r.map(|x| h.st * x))
}

/// Right-hand side `cos(θ1/2) (M1 sin(φ/2), M2 sin(φ/2), M3 sin(φ/2) − c sin(γ/2))`.
pub fn v_rhs(problem: &TwoUnitaryProblem, comp: &AdversaryComposition) -> [f64; 3] {
    let h = Halves::new(problem, comp);
    let (m, s) = (h.m, h.sphi);
    scale3([m[0] * s, m[1] * s, m[2] * s - h.c * h.sg], h.ct)
}

/// `det V = 2c sin³(θ1/2)(cos(φ/2) − c cos(γ/2))(M3 sin(φ/2) sin(γ/2) − cos(φ/2) cos(γ/2) + c)`.
pub fn det_v_closed_form(problem: &TwoUnitaryProblem, comp: &AdversaryComposition) -> f64 {
    let h = Halves::new(problem, comp);
    2.0 * h.c * h.st.powi(3) * (h.cphi - h.c * h.cg) * h.denominator()
}

/// Closed-form `det V` for a problem; fails when the adversary pair is degenerate.
pub fn det_v(problem: &TwoUnitaryProblem) -> Result<f64> {
    let comp = compose_adversary(&problem.up1, &problem.up2)?;
    Ok(det_v_closed_form(problem, &comp))
}

/// `D = M3 sin(φ/2) sin(γ/2) − cos(φ/2) cos(γ/2) + c`.
pub fn solution_denominator(problem: &TwoUnitaryProblem, comp: &AdversaryComposition) -> f64 {
    Halves::new(problem, comp).denominator()
}

/// `cos(φ/2) − c cos(γ/2)`; zero iff the two sides can be conjugate.
pub fn trace_residual(problem: &TwoUnitaryProblem, comp: &AdversaryComposition) -> f64 {
    let h = Halves::new(problem, comp);
    h.cphi - h.c * h.cg
}

/// The direction `−w / D`, so that `n = cot(θ1/2) · direction`.
fn solution_direction(
    problem: &TwoUnitaryProblem,
    comp: &AdversaryComposition,
) -> Result<[f64; 3]> {
    let h = Halves::new(problem, comp);
    let d = h.denominator();
    if d.abs() < EPS_DET {
        return Err(Error::Singular(format!("denominator D = {d:e}")));
    }
    Ok(scale3(h.w(), -1.0 / d))
}

/// `n = −cot(θ1/2) w / D`, not normalized.
pub fn closed_form_axis(
    problem: &TwoUnitaryProblem,
    comp: &AdversaryComposition,
) -> Result<[f64; 3]> {
    let (st, ct) = (0.5 * problem.theta1).sin_cos();
    if st.abs() < EPS_SING {
        return Err(Error::Singular(format!("sin(theta1/2) = {st:e}")));
    }
    Ok(scale3(solution_direction(problem, comp)?, ct / st))
}

/// Finds `θ1 ∈ (0, 2π)` with `|n| = 1` by bisection on `t = |cot(θ1/2)|`.
///
/// The sign of `cot(θ1/2)` is taken from the problem's current `θ1`. The
/// bracket starts at `[0, 1]` and doubles until it contains the root.
pub fn tune_theta1(problem: &TwoUnitaryProblem) -> Result<f64> {
    let comp = compose_adversary(&problem.up1, &problem.up2)?;
    tune_theta1_with(problem, &comp)
}

/// `|D|` when the closed-form direction is finite and nonzero.
fn usable_direction(problem: &TwoUnitaryProblem, comp: &AdversaryComposition) -> Result<f64> {
    let scale = norm3(solution_direction(problem, comp)?);
    if !(scale.is_finite() && scale > 1e-12) {
        return Err(Error::Singular(format!(
            "solution direction has norm {scale:e}"
        )));
    }
    Ok(solution_denominator(problem, comp).abs())
}

fn tune_theta1_with(problem: &TwoUnitaryProblem, comp: &AdversaryComposition) -> Result<f64> {
    usable_direction(problem, comp)?;
    let scale = norm3(solution_direction(problem, comp)?);
    let residual = |t: f64| t * scale - 1.0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while residual(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..2000 {
        if hi - lo <= THETA1_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let cot_sign = if (0.5 * problem.theta1).tan() < 0.0 {
        -1.0
    } else {
        1.0
    };
    Ok(2.0 * 1.0_f64.atan2(cot_sign * t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionRoute {
    /// Closed-form Bloch vector from the linear system.
    LinearSystem,
    /// `U1` prepares an eigenvector of `U_P2† U_P1`. Used when the pair is
    /// degenerate (`U_P1 ∝ U_P2`) or every closed-form branch is singular.
    Eigenvector,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoUnitarySolution {
    pub pair: StrategyPair,
    pub route: SolutionRoute,
    pub problem: TwoUnitaryProblem,
    /// Rotation axis of `U1`.
    pub axis: [f64; 3],
    pub composition: Option<AdversaryComposition>,
    /// `det V` at the problem's parameters (zero at every consistent `γ`).
    pub det_v: Option<f64>,
}

/// `U1 = e^{iδ1} e^{iθ1 n·σ/2}`, `U2 = e^{iδ2} e^{iθ2σ3/2} U1† U_P2†`.
///
/// Requires a consistent `γ` and a `θ1` giving `|n| = 1` (see [`tune_theta1`]).
/// A degenerate pair (`U_P1 ∝ U_P2`) is solved by the eigenvector route.
/// Both routes assume the coin starts in `|0⟩`.
pub fn two_unitary_strategy(problem: &TwoUnitaryProblem) -> Result<TwoUnitarySolution> {
    let comp = match compose_adversary(&problem.up1, &problem.up2) {
        Ok(c) => c,
        Err(Error::DegenerateComposition { .. }) => return eigenvector_solution(problem),
        Err(e) => return Err(e),
    };
    let residual = trace_residual(problem, &comp);
    if residual.abs() > EPS_TRACE {
        return Err(Error::InconsistentGamma { residual });
    }
    let n = closed_form_axis(problem, &comp)?;
    let norm = norm3(n);
    if (norm - 1.0).abs() > EPS_NORM {
        return Err(Error::AxisNorm { norm });
    }
    let axis = scale3(n, 1.0 / norm);
    let u1 = unitary_from_parts(problem.delta1, problem.theta1, axis);
    Ok(TwoUnitarySolution {
        pair: StrategyPair::new(u1, second_move(problem, &u1)),
        route: SolutionRoute::LinearSystem,
        problem: *problem,
        axis,
        composition: Some(comp),
        det_v: Some(det_v_closed_form(problem, &comp)),
    })
}

fn second_move(problem: &TwoUnitaryProblem, u1: &UnitaryOp) -> UnitaryOp {
    z_rotation(problem.theta2).with_phase(problem.delta2) * u1.dagger() * problem.up2.dagger()
}

fn eigenvector_solution(problem: &TwoUnitaryProblem) -> Result<TwoUnitarySolution> {
    let w = problem.up2.dagger() * problem.up1;
    let v = simultaneous_eigenvectors(&[w])?
        .into_iter()
        .next()
        .ok_or(Error::NoStrategy)?;
    let u1 = v.preparing_unitary().with_phase(problem.delta1);
    let p = to_axis_angle(&u1);
    let mut problem = *problem;
    problem.theta1 = p.theta;
    Ok(TwoUnitarySolution {
        pair: StrategyPair::new(u1, second_move(&problem, &u1)),
        route: SolutionRoute::Eigenvector,
        problem,
        axis: p.axis,
        composition: None,
        det_v: None,
    })
}

/// Options for [`solve_two_unitary`]. Unset signs are searched.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveOptions {
    pub c_sign: Option<Sign>,
    pub gamma_sign: Option<Sign>,
    /// Sign of `cot(θ1/2)`.
    pub cot_sign: Sign,
    pub theta2: f64,
    pub delta1: f64,
    pub delta2: f64,
}

/// Builds a consistent problem, tunes `θ1` and returns the winning pair.
///
/// Among the allowed `(c, sign γ)` branches with a usable closed form the one
/// with the largest `|D|` is used. If none is usable the eigenvector route is taken.
pub fn solve_two_unitary(
    up1: UnitaryOp,
    up2: UnitaryOp,
    opts: &SolveOptions,
) -> Result<TwoUnitarySolution> {
    let base = |c_sign| TwoUnitaryProblem {
        theta1: if opts.cot_sign == Sign::Plus {
            PI / 2.0
        } else {
            3.0 * PI / 2.0
        },
        theta2: opts.theta2,
        delta1: opts.delta1,
        delta2: opts.delta2,
        ..TwoUnitaryProblem::new(up1, up2, 0.0, c_sign)
    };
    let comp = match compose_adversary(&up1, &up2) {
        Ok(c) => c,
        Err(Error::DegenerateComposition { .. }) => {
            return two_unitary_strategy(&base(opts.c_sign.unwrap_or_default()))
        }
        Err(e) => return Err(e),
    };
    let signs = |fixed: Option<Sign>| match fixed {
        Some(s) => vec![s],
        None => vec![Sign::Plus, Sign::Minus],
    };
    let mut best: Option<(f64, TwoUnitaryProblem)> = None;
    let mut last_err = None;
    for c_sign in signs(opts.c_sign) {
        for gamma_sign in signs(opts.gamma_sign) {
            let mut problem = base(c_sign);
            problem.gamma = consistent_gamma(&comp, c_sign, gamma_sign);
            match usable_direction(&problem, &comp) {
                Ok(d) if best.as_ref().is_none_or(|(bd, _)| d > *bd) => best = Some((d, problem)),
                Ok(_) => {}
                Err(e) => last_err = Some(e),
            }
        }
    }
    let Some((_, mut problem)) = best else {
        if opts.c_sign.is_none() && opts.gamma_sign.is_none() {
            return eigenvector_solution(&base(Sign::Plus));
        }
        return Err(last_err.expect("at least one sign branch"));
    };
    problem.theta1 = tune_theta1_with(&problem, &comp)?;
    two_unitary_strategy(&problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamesim::{verify_strategy, GameSpec};
    use crate::qalg::{from_axis_angle, pauli, AxisAngle, Pauli, EPS_UNIT};

    fn wins(up1: UnitaryOp, up2: UnitaryOp, s: &StrategyPair) -> bool {
        let spec = GameSpec::uniform(vec![up1, up2], "pair").unwrap();
        verify_strategy(&spec, s, 11).is_win()
    }

    #[test]
    fn identical_ops_are_degenerate() {
        let x = pauli(Pauli::Sigma1);
        assert!(matches!(
            compose_adversary(&x, &x),
            Err(Error::DegenerateComposition { .. })
        ));
    }

    #[test]
    fn sigma1_against_identity() {
        let c = compose_adversary(&pauli(Pauli::Sigma1), &UnitaryOp::identity()).unwrap();
        assert!((c.varphi - PI).abs() < 1e-12);
        assert!((c.axis[0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn composition_matches_product() {
        let (x, z) = (pauli(Pauli::Sigma1), pauli(Pauli::Sigma3));
        let c = compose_adversary(&x, &z).unwrap();
        let rebuilt = from_axis_angle(&AxisAngle::new(c.phase, c.varphi, c.axis).unwrap()).unwrap();
        let direct = z.dagger() * x;
        assert!(rebuilt.mat().max_abs_diff(direct.mat()) < 1e-12);
    }

    #[test]
    fn det_zero_cases() {
        let mut p =
            TwoUnitaryProblem::new(pauli(Pauli::Sigma1), pauli(Pauli::Sigma3), 0.7, Sign::Plus);
        p.theta1 = 4.0 * PI;
        assert!(det_v(&p).unwrap().abs() < 1e-12);
        let p = TwoUnitaryProblem::consistent(
            pauli(Pauli::Sigma1),
            pauli(Pauli::Sigma3),
            Sign::Plus,
            Sign::Plus,
        )
        .unwrap();
        assert!(det_v(&p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn meyer_pair_gives_chappell_axis() {
        let (x, id) = (pauli(Pauli::Sigma1), UnitaryOp::identity());
        let sol = solve_two_unitary(x, id, &SolveOptions::default()).unwrap();
        assert_eq!(sol.route, SolutionRoute::LinearSystem);
        assert!(wins(x, id, &sol.pair));
        let n = sol.axis;
        let cot = 1.0 / (0.5 * sol.problem.theta1).tan();
        // (a, b cot, ab) with a² = (1 − cot²)/2
        assert!((n[1].abs() - cot.abs()).abs() < 1e-9);
        assert!((n[0].abs() - n[2].abs()).abs() < 1e-9);
        assert!((2.0 * n[0] * n[0] - (1.0 - cot * cot)).abs() < 1e-9);
    }

    #[test]
    fn sigma13_pair_wins() {
        let (x, z) = (pauli(Pauli::Sigma1), pauli(Pauli::Sigma3));
        let sol = solve_two_unitary(x, z, &SolveOptions::default()).unwrap();
        assert!(wins(x, z, &sol.pair));
        assert!((norm3(sol.axis) - 1.0).abs() < EPS_UNIT);
    }

    #[test]
    fn strict_problem_errors() {
        let (x, z) = (pauli(Pauli::Sigma1), pauli(Pauli::Sigma3));
        let p = TwoUnitaryProblem::new(x, z, 0.3, Sign::Plus);
        assert!(matches!(
            two_unitary_strategy(&p),
            Err(Error::InconsistentGamma { .. })
        ));

        let mut p = TwoUnitaryProblem::consistent(x, z, Sign::Plus, Sign::Plus).unwrap();
        p.theta1 = 0.4;
        assert!(matches!(
            two_unitary_strategy(&p),
            Err(Error::AxisNorm { .. })
        ));
        p.theta1 = tune_theta1(&p).unwrap();
        assert!(two_unitary_strategy(&p).is_ok());
    }

    #[test]
    fn degenerate_routes_to_eigenvector() {
        let x = pauli(Pauli::Sigma1);
        let sol = solve_two_unitary(x, x.with_phase(0.8), &SolveOptions::default()).unwrap();
        assert_eq!(sol.route, SolutionRoute::Eigenvector);
        assert!(wins(x, x.with_phase(0.8), &sol.pair));
    }

    #[test]
    fn singular_denominator() {
        // W = σ3 has axis ẑ; c = +1 with γ < 0 makes D = sin²(φ/2)(c − M3) vanish
        let (z, id) = (pauli(Pauli::Sigma3), UnitaryOp::identity());
        let opts = SolveOptions {
            c_sign: Some(Sign::Plus),
            gamma_sign: Some(Sign::Minus),
            ..SolveOptions::default()
        };
        assert!(matches!(
            solve_two_unitary(z, id, &opts),
            Err(Error::Singular(_))
        ));
        // with φ = π and M = ẑ the closed-form direction vanishes on every branch
        let sol = solve_two_unitary(z, id, &SolveOptions::default()).unwrap();
        assert_eq!(sol.route, SolutionRoute::Eigenvector);
        assert!(wins(z, id, &sol.pair));
    }
}
