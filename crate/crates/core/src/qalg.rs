//! Exact 2×2 complex unitary algebra.
//!
//! Every single-qubit operation is written as `e^{iδ} (cos(θ/2) 1 + i sin(θ/2) n·σ)`.
//! [`AxisAngle`] carries `(δ, θ, n)`; [`UnitaryOp`] carries the matrix. The
//! two are related by [`from_axis_angle`] and [`to_axis_angle`], and products
//! can be formed either by matrix multiplication or by the closed-form
//! composition law in [`compose_axis_angle`].

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Unitarity / normalization tolerance (max-entry deviation).
pub const EPS_UNIT: f64 = 1e-9;
/// Commutator threshold used by [`commutes`].
pub const EPS_COMM: f64 = 1e-9;
/// Guard for vanishing half-angle sines.
pub const EPS_SING: f64 = 1e-7;

/// Below this the rotation part of a decomposed matrix is treated as exactly zero.
const EPS_ZERO_ROTATION: f64 = 1e-13;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// A general 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.0[row][col]
    }

    pub fn dagger(&self) -> Mat2 {
        let m = &self.0;
        Mat2::new(
            m[0][0].conj(),
            m[1][0].conj(),
            m[0][1].conj(),
            m[1][1].conj(),
        )
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, k: C64) -> Mat2 {
        let m = &self.0;
        Mat2::new(m[0][0] * k, m[0][1] * k, m[1][0] * k, m[1][1] * k)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Max-entry deviation of `M†M` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        (self.dagger() * *self).max_abs_diff(&Mat2::IDENTITY)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2::new(
            a[0][0] - b[0][0],
            a[0][1] - b[0][1],
            a[1][0] - b[1][0],
            a[1][1] - b[1][1],
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-ONE)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{:.6}, {:.6}], [{:.6}, {:.6}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

/// A 2×2 unitary matrix. Construction checks `U†U = 1` within [`EPS_UNIT`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitaryOp(Mat2);

impl UnitaryOp {
    pub fn new(mat: Mat2) -> Result<Self> {
        if !mat.is_finite() {
            return Err(Error::NonFinite("unitary matrix"));
        }
        let deviation = mat.unitarity_defect().max((mat.det().norm() - 1.0).abs());
        if deviation > EPS_UNIT {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(UnitaryOp(mat))
    }

    /// Wraps a matrix known to be unitary by construction.
    pub(crate) fn from_mat_unchecked(mat: Mat2) -> Self {
        UnitaryOp(mat)
    }

    pub fn identity() -> Self {
        UnitaryOp(Mat2::IDENTITY)
    }

    pub fn mat(&self) -> &Mat2 {
        &self.0
    }

    pub fn dagger(&self) -> UnitaryOp {
        UnitaryOp(self.0.dagger())
    }

    /// `e^{i·angle} U`.
    pub fn with_phase(&self, angle: f64) -> UnitaryOp {
        UnitaryOp(self.0.scale(C64::from_polar(1.0, angle)))
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        StateVector(self.0.apply(v.0))
    }

    /// True when the operator is a multiple of the identity.
    pub fn is_scalar(&self, tol: f64) -> bool {
        let m = &self.0 .0;
        m[0][1].norm() < tol && m[1][0].norm() < tol && (m[0][0] - m[1][1]).norm() < tol
    }

    /// Max-entry distance to `other` after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &UnitaryOp) -> f64 {
        let overlap = (other.0.dagger() * self.0).trace();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        self.0.max_abs_diff(&other.0.scale(phase))
    }
}

impl Mul for UnitaryOp {
    type Output = UnitaryOp;
    fn mul(self, rhs: UnitaryOp) -> UnitaryOp {
        UnitaryOp(self.0 * rhs.0)
    }
}

impl Mul for &UnitaryOp {
    type Output = UnitaryOp;
    fn mul(self, rhs: &UnitaryOp) -> UnitaryOp {
        UnitaryOp(self.0 * rhs.0)
    }
}

/// The three Pauli matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    Sigma1,
    Sigma2,
    Sigma3,
}

impl Pauli {
    pub fn from_index(index: u8) -> Option<Pauli> {
        match index {
            1 => Some(Pauli::Sigma1),
            2 => Some(Pauli::Sigma2),
            3 => Some(Pauli::Sigma3),
            _ => None,
        }
    }

    pub fn mat(self) -> Mat2 {
        match self {
            Pauli::Sigma1 => Mat2::new(ZERO, ONE, ONE, ZERO),
            Pauli::Sigma2 => Mat2::new(ZERO, -I, I, ZERO),
            Pauli::Sigma3 => Mat2::new(ONE, ZERO, ZERO, -ONE),
        }
    }
}

pub fn pauli(p: Pauli) -> UnitaryOp {
    UnitaryOp(p.mat())
}

/// `(σ1 + σ3)/√2`.
pub fn hadamard() -> UnitaryOp {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    UnitaryOp(Mat2::from_real(h, h, h, -h))
}

/// `n·σ` for a real 3-vector.
pub fn n_dot_sigma(n: [f64; 3]) -> Mat2 {
    Mat2::new(
        C64::new(n[2], 0.0),
        C64::new(n[0], -n[1]),
        C64::new(n[0], n[1]),
        C64::new(-n[2], 0.0),
    )
}

/// `e^{iθσ3/2}`, a rotation about the z axis.
pub fn z_rotation(theta: f64) -> UnitaryOp {
    let h = 0.5 * theta;
    UnitaryOp(Mat2::new(
        C64::from_polar(1.0, h),
        ZERO,
        ZERO,
        C64::from_polar(1.0, -h),
    ))
}

/// Global phase `δ`, rotation angle `θ` and unit axis `n` of `e^{iδ} e^{iθ n·σ/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisAngle {
    pub delta: f64,
    pub theta: f64,
    pub axis: [f64; 3],
}

impl AxisAngle {
    pub fn new(delta: f64, theta: f64, axis: [f64; 3]) -> Result<Self> {
        let p = AxisAngle { delta, theta, axis };
        p.validate()?;
        Ok(p)
    }

    pub fn identity() -> Self {
        AxisAngle {
            delta: 0.0,
            theta: 0.0,
            axis: [0.0, 0.0, 1.0],
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.theta.is_finite())
            || self.axis.iter().any(|x| !x.is_finite())
        {
            return Err(Error::NonFinite("axis-angle parameters"));
        }
        let norm = norm3(self.axis);
        if (norm - 1.0).abs() > EPS_UNIT {
            return Err(Error::NonUnitAxis { norm });
        }
        Ok(())
    }

    /// Scalar part `cos(θ/2)` and vector part `sin(θ/2) n` of the SU(2) factor.
    fn quaternion(&self) -> (f64, [f64; 3]) {
        let (s, c) = (0.5 * self.theta).sin_cos();
        (c, scale3(self.axis, s))
    }
}

pub fn from_axis_angle(p: &AxisAngle) -> Result<UnitaryOp> {
    p.validate()?;
    Ok(unitary_from_parts(p.delta, p.theta, p.axis))
}

/// Builds `e^{iδ}(cos(θ/2) 1 + i sin(θ/2) n·σ)` without checking the axis.
pub(crate) fn unitary_from_parts(delta: f64, theta: f64, n: [f64; 3]) -> UnitaryOp {
    let (s, c) = (0.5 * theta).sin_cos();
    let su2 = Mat2::new(
        C64::new(c, s * n[2]),
        C64::new(s * n[1], s * n[0]),
        C64::new(-s * n[1], s * n[0]),
        C64::new(c, -s * n[2]),
    );
    UnitaryOp(su2.scale(C64::from_polar(1.0, delta)))
}

/// Decomposes a unitary into canonical axis-angle form.
///
/// Canonical form: `cos(θ/2) ≥ 0` so `θ ∈ [0, π]`, with `δ ∈ [0, 2π)`. At
/// `θ = π` the axis is chosen with its first nonzero component positive. When
/// the rotation part vanishes the axis is `(0, 0, 1)`.
pub fn to_axis_angle(u: &UnitaryOp) -> AxisAngle {
    let m = u.mat();
    let delta0 = 0.5 * m.det().arg();
    let v = m.scale(C64::from_polar(1.0, -delta0)).0;
    let c = 0.5 * (v[0][0].re + v[1][1].re);
    let vec = [
        0.5 * (v[0][1].im + v[1][0].im),
        0.5 * (v[0][1].re - v[1][0].re),
        0.5 * (v[0][0].im - v[1][1].im),
    ];
    canonicalize(delta0, c, vec, EPS_ZERO_ROTATION)
}

/// Closed-form product of two axis-angle operations (left factor first).
///
/// For `A = e^{iδa}(ca + i sa na·σ)` and `B = e^{iδb}(cb + i sb nb·σ)`,
/// `AB = e^{i(δa+δb)}(C + i S N·σ)` with
/// `C = ca cb − sa sb na·nb` and `S N = sa cb na + ca sb nb − sa sb na×nb`.
pub fn compose_axis_angle(a: &AxisAngle, b: &AxisAngle) -> Result<AxisAngle> {
    a.validate()?;
    b.validate()?;
    let (ca, va) = a.quaternion();
    let (cb, vb) = b.quaternion();
    let c = ca * cb - dot3(va, vb);
    let vec = sub3(add3(scale3(va, cb), scale3(vb, ca)), cross3(va, vb));
    Ok(canonicalize(a.delta + b.delta, c, vec, EPS_SING))
}

/// Canonical `(δ, θ, n)` for `e^{iδ}(c + i v·σ)`.
fn canonicalize(delta: f64, c: f64, vec: [f64; 3], zero_tol: f64) -> AxisAngle {
    let (mut delta, mut c, mut vec) = (delta, c, vec);
    // renormalize to absorb rounding in slightly non-unitary input
    let r = (c * c + dot3(vec, vec)).sqrt();
    if r > 0.0 {
        c /= r;
        vec = scale3(vec, 1.0 / r);
    }
    if c < 0.0 {
        c = -c;
        vec = scale3(vec, -1.0);
        delta += PI;
    }
    let s = norm3(vec);
    if s < zero_tol {
        return AxisAngle {
            delta: wrap_angle(delta),
            theta: 0.0,
            axis: [0.0, 0.0, 1.0],
        };
    }
    let mut axis = scale3(vec, 1.0 / s);
    if c < EPS_ZERO_ROTATION && leading_sign(axis) < 0.0 {
        axis = scale3(axis, -1.0);
        c = -c;
        delta += PI;
    }
    AxisAngle {
        delta: wrap_angle(delta),
        theta: 2.0 * s.atan2(c),
        axis,
    }
}

fn leading_sign(v: [f64; 3]) -> f64 {
    v.iter()
        .copied()
        .find(|x| x.abs() > EPS_ZERO_ROTATION)
        .map_or(1.0, f64::signum)
}

/// Reduces an angle into `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `ab − ba`.
pub fn commutator(a: &UnitaryOp, b: &UnitaryOp) -> Mat2 {
    *a.mat() * *b.mat() - *b.mat() * *a.mat()
}

pub fn commutes(a: &UnitaryOp, b: &UnitaryOp) -> bool {
    commutator(a, b).max_abs() < EPS_COMM
}

/// A normalized two-component state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector(pub(crate) [C64; 2]);

impl StateVector {
    pub fn new(a0: C64, a1: C64) -> Result<Self> {
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if !norm.is_finite() {
            return Err(Error::NonFinite("state vector"));
        }
        if (norm - 1.0).abs() > EPS_UNIT {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector([a0, a1]))
    }

    /// Scales a nonzero vector to unit norm.
    pub fn normalized(a0: C64, a1: C64) -> Result<Self> {
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector([a0 / norm, a1 / norm]))
    }

    /// `|0⟩`, heads.
    pub fn heads() -> Self {
        StateVector([ONE, ZERO])
    }

    /// `|1⟩`, tails.
    pub fn tails() -> Self {
        StateVector([ZERO, ONE])
    }

    pub fn plus_x() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector([C64::new(h, 0.0), C64::new(h, 0.0)])
    }

    pub fn plus_y() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector([C64::new(h, 0.0), C64::new(0.0, h)])
    }

    /// The pure state whose Bloch vector is the unit vector `n`.
    pub fn from_bloch(n: [f64; 3]) -> Self {
        let (x, y, z) = (n[0], n[1], n[2]);
        let (a0, a1) = if z > -0.5 {
            (C64::new(1.0 + z, 0.0), C64::new(x, y))
        } else {
            (C64::new(x, -y), C64::new(1.0 - z, 0.0))
        };
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        StateVector([a0 / norm, a1 / norm])
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        self.0
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    /// `|v⟩⟨v|`.
    pub fn projector(&self) -> Mat2 {
        let [a, b] = self.0;
        Mat2::new(a * a.conj(), a * b.conj(), b * a.conj(), b * b.conj())
    }

    /// A unitary with this state as its first column, so it maps `|0⟩` here.
    pub fn preparing_unitary(&self) -> UnitaryOp {
        let [a, b] = self.0;
        UnitaryOp(Mat2::new(a, -b.conj(), b, a.conj()))
    }
}

/// Eigenpairs of a unitary. Scalar operators return the computational basis.
pub fn eigen(u: &UnitaryOp) -> [(C64, StateVector); 2] {
    let p = to_axis_angle(u);
    let phase = C64::from_polar(1.0, p.delta);
    let half = 0.5 * p.theta;
    // n·σ has eigenvalue +1 on the state with Bloch vector n
    let up = StateVector::from_bloch(p.axis);
    let down = StateVector::from_bloch(scale3(p.axis, -1.0));
    [
        (phase * C64::from_polar(1.0, half), up),
        (phase * C64::from_polar(1.0, -half), down),
    ]
}

/// `‖op·v − λv‖` for the best λ = ⟨v|op|v⟩.
pub fn eigen_residual(op: &UnitaryOp, v: &StateVector) -> f64 {
    let w = op.apply(v);
    let lambda = v.inner(&w);
    let r0 = w.0[0] - lambda * v.0[0];
    let r1 = w.0[1] - lambda * v.0[1];
    (r0.norm_sqr() + r1.norm_sqr()).sqrt()
}

/// Unit vectors that every operator maps to a multiple of itself.
///
/// Requires the operators to commute pairwise. The eigenbasis of the first
/// non-scalar operator is filtered by the residual test against all others.
pub fn simultaneous_eigenvectors(ops: &[UnitaryOp]) -> Result<Vec<StateVector>> {
    for (i, a) in ops.iter().enumerate() {
        for b in &ops[i + 1..] {
            if !commutes(a, b) {
                return Err(Error::NonCommuting);
            }
        }
    }
    let candidates: Vec<StateVector> = match ops.iter().find(|op| !op.is_scalar(EPS_SING)) {
        Some(op) => eigen(op).iter().map(|(_, v)| *v).collect(),
        None => vec![StateVector::heads(), StateVector::tails()],
    };
    Ok(candidates
        .into_iter()
        .filter(|v| ops.iter().all(|op| eigen_residual(op, v) < EPS_UNIT))
        .collect())
}

/// Uniform `θ, δ ∈ [0, 2π)` and an axis drawn from a normalized Gaussian triple.
pub fn random_axis_angle<R: Rng + ?Sized>(rng: &mut R) -> AxisAngle {
    AxisAngle {
        delta: rng.random_range(0.0..TAU),
        theta: rng.random_range(0.0..TAU),
        axis: random_unit_vector(rng),
    }
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = norm3(v);
        if n > 1e-6 {
            return scale3(v, 1.0 / n);
        }
    }
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> UnitaryOp {
    let p = random_axis_angle(rng);
    unitary_from_parts(p.delta, p.theta, p.axis)
}

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub fn scale3(a: [f64; 3], k: f64) -> [f64; 3] {
    [a[0] * k, a[1] * k, a[2] * k]
}

pub fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        a.max_abs_diff(b) < tol
    }

    #[test]
    fn pauli_matrices() {
        assert_eq!(
            pauli(Pauli::Sigma1).mat(),
            &Mat2::from_real(0.0, 1.0, 1.0, 0.0)
        );
        assert_eq!(
            pauli(Pauli::Sigma3).mat(),
            &Mat2::from_real(1.0, 0.0, 0.0, -1.0)
        );
        let y = pauli(Pauli::Sigma2);
        assert_eq!((y * y).mat(), &Mat2::IDENTITY);
        assert_eq!(Pauli::from_index(4), None);
    }

    #[test]
    fn from_axis_angle_examples() {
        let id = from_axis_angle(&AxisAngle::identity()).unwrap();
        assert!(close(id.mat(), &Mat2::IDENTITY, 1e-15));

        let x = from_axis_angle(&AxisAngle::new(0.0, PI, [1.0, 0.0, 0.0]).unwrap()).unwrap();
        assert!(close(x.mat(), &Pauli::Sigma1.mat().scale(I), 1e-15));

        let h = from_axis_angle(
            &AxisAngle::new(-PI / 2.0, PI, [FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2]).unwrap(),
        )
        .unwrap();
        assert!(close(h.mat(), hadamard().mat(), 1e-15));
    }

    #[test]
    fn non_unit_axis_rejected() {
        assert!(matches!(
            AxisAngle::new(0.0, 1.0, [1.0, 1.0, 0.0]),
            Err(Error::NonUnitAxis { .. })
        ));
        let bad = AxisAngle {
            delta: 0.0,
            theta: 1.0,
            axis: [0.5, 0.0, 0.0],
        };
        assert!(from_axis_angle(&bad).is_err());
    }

    #[test]
    fn to_axis_angle_examples() {
        let p = to_axis_angle(&UnitaryOp::identity());
        assert_eq!(p, AxisAngle::identity());

        let p = to_axis_angle(&hadamard());
        assert!((p.delta - 1.5 * PI).abs() < 1e-12);
        assert!((p.theta - PI).abs() < 1e-12);
        assert!((p.axis[0] - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(p.axis[1].abs() < 1e-12);
        assert!((p.axis[2] - FRAC_1_SQRT_2).abs() < 1e-12);

        let minus = UnitaryOp::identity().with_phase(PI);
        let p = to_axis_angle(&minus);
        assert!((p.delta - PI).abs() < 1e-12);
        assert_eq!(p.theta, 0.0);
        assert_eq!(p.axis, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let u = random_unitary(&mut rng);
            let p = to_axis_angle(&u);
            assert!(p.theta >= 0.0 && p.theta < TAU);
            assert!(p.delta >= 0.0 && p.delta < TAU);
            let back = from_axis_angle(&p).unwrap();
            assert!(close(back.mat(), u.mat(), EPS_UNIT));
        }
    }

    #[test]
    fn compose_examples() {
        let x = AxisAngle::new(0.0, PI, [1.0, 0.0, 0.0]).unwrap();
        let r = compose_axis_angle(&x, &x).unwrap();
        assert_eq!(r.axis, [0.0, 0.0, 1.0]);
        assert_eq!(r.theta, 0.0);
        let m = from_axis_angle(&r).unwrap();
        assert!(close(m.mat(), &Mat2::IDENTITY.scale(-ONE), 1e-12));

        let h = to_axis_angle(&hadamard());
        let hh = compose_axis_angle(&h, &h).unwrap();
        let m = from_axis_angle(&hh).unwrap();
        assert!(m.distance_up_to_phase(&UnitaryOp::identity()) < 1e-12);
    }

    #[test]
    fn composition_law_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a = random_axis_angle(&mut rng);
            let b = random_axis_angle(&mut rng);
            let direct = from_axis_angle(&a).unwrap() * from_axis_angle(&b).unwrap();
            let law = from_axis_angle(&compose_axis_angle(&a, &b).unwrap()).unwrap();
            assert!(close(direct.mat(), law.mat(), 10.0 * EPS_UNIT));
        }
    }

    #[test]
    fn commutator_examples() {
        let s1 = pauli(Pauli::Sigma1);
        let s3 = pauli(Pauli::Sigma3);
        let expected = Pauli::Sigma2.mat().scale(C64::new(0.0, 2.0));
        assert!(close(&commutator(&s3, &s1), &expected, 1e-15));
        assert_eq!(commutator(&s1, &s1), Mat2::ZERO);
        assert!(commutes(&s1, &UnitaryOp::identity()));
        assert!(!commutes(&s1, &s3));
    }

    #[test]
    fn eigenvectors_examples() {
        let vs = simultaneous_eigenvectors(&[UnitaryOp::identity(), pauli(Pauli::Sigma1)]).unwrap();
        assert!(vs
            .iter()
            .any(|v| v.inner(&StateVector::plus_x()).norm() > 1.0 - 1e-12));

        let vs = simultaneous_eigenvectors(&[pauli(Pauli::Sigma3)]).unwrap();
        assert!(vs
            .iter()
            .any(|v| v.inner(&StateVector::heads()).norm() > 1.0 - 1e-12));

        assert_eq!(
            simultaneous_eigenvectors(&[pauli(Pauli::Sigma1), pauli(Pauli::Sigma3)]),
            Err(Error::NonCommuting)
        );
    }

    #[test]
    fn from_bloch_poles() {
        let v = StateVector::from_bloch([0.0, 0.0, -1.0]);
        assert!((v.inner(&StateVector::tails()).norm() - 1.0).abs() < 1e-15);
        let v = StateVector::from_bloch([0.0, 1.0, 0.0]);
        assert!((v.inner(&StateVector::plus_y()).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unitary_new_rejects() {
        assert!(matches!(
            UnitaryOp::new(Mat2::from_real(1.0, 1.0, 0.0, 1.0)),
            Err(Error::NotUnitary { .. })
        ));
        assert!(UnitaryOp::new(Mat2::from_real(f64::NAN, 0.0, 0.0, 1.0)).is_err());
    }
}
