//! Closed-form eigensystem of the 2x2 mixing matrix `E + (R - i Gamma/2).sigma`.
//!
//! Eigenvalues are `E - eps` (state 1) and `E + eps` (state 2), with
//! `eps^2 = R^2 - Gamma^2/4 - i R.Gamma`. The sign of `eps` is fixed by
//! continuation from a previous value when one is supplied.

use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};
use num_complex::{Complex, Complex64};
use num_traits::Float;
use twofloat::TwoFloat;

pub type CVec2 = [Complex64; 2];

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigenstate label. `One` carries `E - eps`, `Two` carries `E + eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    One,
    Two,
}

impl State {
    pub const BOTH: [State; 2] = [State::One, State::Two];

    pub fn from_index(i: usize) -> Result<State> {
        match i {
            1 => Ok(State::One),
            2 => Ok(State::Two),
            _ => Err(Error::InvalidArgument(format!("state index {i} not in {{1, 2}}"))),
        }
    }

    pub fn index(self) -> usize {
        match self {
            State::One => 1,
            State::Two => 2,
        }
    }

    pub fn slot(self) -> usize {
        self.index() - 1
    }

    pub fn other(self) -> State {
        match self {
            State::One => State::Two,
            State::Two => State::One,
        }
    }

    /// Sign multiplying `eps` in the eigenvalue.
    pub fn sign(self) -> f64 {
        match self {
            State::One => -1.0,
            State::Two => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterPoint {
    pub r: Vec3,
    pub gamma: Vec3,
    pub e_offset: Complex64,
}

impl ParameterPoint {
    pub fn new(r: Vec3, gamma: Vec3, e_offset: Complex64) -> Result<Self> {
        let p = ParameterPoint { r, gamma, e_offset };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if vec3::is_finite(self.r)
            && vec3::is_finite(self.gamma)
            && self.e_offset.re.is_finite()
            && self.e_offset.im.is_finite()
        {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("non-finite parameter point {self:?}")))
        }
    }

    /// The effective complex vector `R - i Gamma/2`.
    pub fn effective(&self) -> [Complex64; 3] {
        std::array::from_fn(|k| Complex64::new(self.r[k], -0.5 * self.gamma[k]))
    }

    /// `eps^2`, assembled from real dot products.
    pub fn splitting_squared(&self) -> Complex64 {
        Complex64::new(
            vec3::dot(self.r, self.r) - 0.25 * vec3::dot(self.gamma, self.gamma),
            -vec3::dot(self.r, self.gamma),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelOperator {
    pub entries: [[Complex64; 2]; 2],
}

impl TwoLevelOperator {
    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.entries[0][0] * self.entries[1][1] - self.entries[0][1] * self.entries[1][0]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Traceless part as `(eta, xi, zeta)` with `[[eta, xi], [zeta, -eta]]`.
    pub fn traceless(&self) -> (Complex64, Complex64, Complex64) {
        let e = &self.entries;
        (0.5 * (e[0][0] - e[1][1]), e[0][1], e[1][0])
    }

    pub fn apply(&self, v: CVec2) -> CVec2 {
        let e = &self.entries;
        [e[0][0] * v[0] + e[0][1] * v[1], e[1][0] * v[0] + e[1][1] * v[1]]
    }

    pub fn left_apply(&self, u: CVec2) -> CVec2 {
        let e = &self.entries;
        [u[0] * e[0][0] + u[1] * e[1][0], u[0] * e[0][1] + u[1] * e[1][1]]
    }
}

/// Bilinear pairing of a left covector with a right vector (no conjugation).
pub fn pair(l: CVec2, r: CVec2) -> Complex64 {
    l[0] * r[0] + l[1] * r[1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Defect {
    Diagonalizable,
    JordanRank2,
    DiagonalDegenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiorthogonalFrame {
    pub eigenvalues: [Complex64; 2],
    pub epsilon: Complex64,
    pub defect: Defect,
    vectors: Option<([CVec2; 2], [CVec2; 2])>,
}

impl BiorthogonalFrame {
    fn vectors(&self) -> Result<&([CVec2; 2], [CVec2; 2])> {
        self.vectors.as_ref().ok_or_else(|| Error::DegeneratePoint {
            defect: self.defect,
            detail: "eigenframe requested at a degenerate point".into(),
        })
    }

    pub fn right(&self, s: State) -> Result<CVec2> {
        Ok(self.vectors()?.0[s.slot()])
    }

    pub fn left(&self, s: State) -> Result<CVec2> {
        Ok(self.vectors()?.1[s.slot()])
    }

    pub fn eigenvalue(&self, s: State) -> Complex64 {
        self.eigenvalues[s.slot()]
    }

    /// Same frame with `r_s -> c r_s`, `l_s -> l_s / c`, keeping `<l_s|r_s> = 1`.
    pub fn rescaled(&self, s: State, c: Complex64) -> Result<Self> {
        let (mut r, mut l) = *self.vectors()?;
        if !(c.norm() > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("rescaling factor {c} not invertible")));
        }
        r[s.slot()] = r[s.slot()].map(|z| z * c);
        l[s.slot()] = l[s.slot()].map(|z| z / c);
        Ok(BiorthogonalFrame { vectors: Some((r, l)), ..*self })
    }
}

/// Real scalars for the generic root and frame helpers.
pub trait Real: Float {
    /// Correctly rounded quotient.
    fn quot(self, d: Self) -> Self {
        self / d
    }
}

impl Real for f64 {}

// TwoFloat's own division is only good to f64 precision; one Newton
// correction restores the full width.
impl Real for TwoFloat {
    fn quot(self, d: Self) -> Self {
        let q = self / d;
        q + (self - q * d) / d
    }
}

fn cdiv<T: Real>(a: Complex<T>, b: Complex<T>) -> Complex<T> {
    let n = b.norm_sqr();
    let p = a * b.conj();
    Complex::new(p.re.quot(n), p.im.quot(n))
}

fn rdiv<T: Real>(a: Complex<T>, d: T) -> Complex<T> {
    Complex::new(a.re.quot(d), a.im.quot(d))
}

/// Principal square root: non-negative real part, and non-negative imaginary
/// part when the real part vanishes.
pub fn principal_sqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let (a, b) = (z.re, z.im);
    let zero = T::zero();
    let two = T::one() + T::one();
    if a == zero && b == zero {
        return Complex::new(zero, zero);
    }
    let m = a.hypot(b);
    let t = (m + a.abs()).quot(two).sqrt();
    if a >= zero {
        Complex::new(t, b.quot(two * t))
    } else {
        let im = if b.is_sign_negative() && b != zero { -t } else { t };
        Complex::new(b.abs().quot(two * t), im)
    }
}

/// The root `+root` or `-root` nearest to `previous`, or `root` itself.
pub fn continue_root<T: Real>(root: Complex<T>, previous: Option<Complex<T>>) -> Complex<T> {
    match previous {
        Some(p) if (root - p).norm_sqr() > (root + p).norm_sqr() => -root,
        _ => root,
    }
}

pub fn build_hamiltonian(point: &ParameterPoint) -> Result<TwoLevelOperator> {
    point.validate()?;
    let [x, y, z] = point.effective();
    let e = point.e_offset;
    Ok(TwoLevelOperator { entries: [[e + z, x - I * y], [x + I * y, e - z]] })
}

pub fn epsilon_at(point: &ParameterPoint, previous: Option<Complex64>) -> Complex64 {
    continue_root(principal_sqrt(point.splitting_squared()), previous)
}

/// Right vectors and left covectors for `(-eps, +eps)` of the traceless
/// matrix `[[eta, xi], [zeta, -eta]]`, normalized so `|r| = 1`, `<l|r> = 1`.
fn kernel_frames<T: Real>(
    eta: Complex<T>,
    xi: Complex<T>,
    zeta: Complex<T>,
    eps: Complex<T>,
) -> ([[Complex<T>; 2]; 2], [[Complex<T>; 2]; 2]) {
    fn pick<T: Real>(a: [Complex<T>; 2], b: [Complex<T>; 2]) -> [Complex<T>; 2] {
        let na = a[0].norm_sqr() + a[1].norm_sqr();
        let nb = b[0].norm_sqr() + b[1].norm_sqr();
        if na >= nb {
            a
        } else {
            b
        }
    }
    let finish = |r: [Complex<T>; 2], u: [Complex<T>; 2]| {
        let n = (r[0].norm_sqr() + r[1].norm_sqr()).sqrt();
        let r = [rdiv(r[0], n), rdiv(r[1], n)];
        let p = u[0] * r[0] + u[1] * r[1];
        (r, [cdiv(u[0], p), cdiv(u[1], p)])
    };
    // state 1: kernel of [[eta + eps, xi], [zeta, eps - eta]]
    let r1 = pick([xi, -(eta + eps)], [eta - eps, zeta]);
    let u1 = pick([zeta, -(eta + eps)], [eps - eta, -xi]);
    // state 2: kernel of [[eta - eps, xi], [zeta, -eta - eps]]
    let r2 = pick([xi, eps - eta], [eta + eps, zeta]);
    let u2 = pick([zeta, eps - eta], [eta + eps, xi]);
    let (r1, l1) = finish(r1, u1);
    let (r2, l2) = finish(r2, u2);
    ([r1, r2], [l1, l2])
}

fn classify_defect(h: &TwoLevelOperator, eps_sq: Complex64, tol: f64) -> Defect {
    let scale = h.norm().powi(2);
    if eps_sq.norm() > tol * scale {
        return Defect::Diagonalizable;
    }
    let (eta, xi, zeta) = h.traceless();
    let t2 = 2.0 * eta.norm_sqr() + xi.norm_sqr() + zeta.norm_sqr();
    if t2 > tol * scale && t2 > 0.0 {
        Defect::JordanRank2
    } else {
        Defect::DiagonalDegenerate
    }
}

/// Biorthogonal eigenframe of `h`, which must have been built from `point`.
///
/// A point counts as degenerate when `|eps^2| <= tol * |H|_F^2`; in that case
/// the frame carries the defect kind and no vectors.
pub fn eigendecompose(
    h: &TwoLevelOperator,
    point: &ParameterPoint,
    previous_epsilon: Option<Complex64>,
    tol: f64,
) -> Result<BiorthogonalFrame> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let eps_sq = point.splitting_squared();
    let eps = epsilon_at(point, previous_epsilon);
    let e = point.e_offset;
    let defect = classify_defect(h, eps_sq, tol);
    let vectors = (defect == Defect::Diagonalizable).then(|| {
        let (eta, xi, zeta) = h.traceless();
        kernel_frames(eta, xi, zeta, eps)
    });
    Ok(BiorthogonalFrame { eigenvalues: [e - eps, e + eps], epsilon: eps, defect, vectors })
}

type Dd = Complex<TwoFloat>;

fn dd(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

fn dd_point(r: [TwoFloat; 3], gamma: Vec3) -> ([Dd; 3], Dd) {
    let g = gamma.map(dd);
    let eff: [Dd; 3] = std::array::from_fn(|k| Complex::new(r[k], g[k] * dd(-0.5)));
    let rr = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    let gg = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
    let rg = r[0] * g[0] + r[1] * g[1] + r[2] * g[2];
    (eff, Complex::new(rr - gg * dd(0.25), -rg))
}

fn dd_frames(eff: &[Dd; 3], eps: Dd) -> ([[Dd; 2]; 2], [[Dd; 2]; 2]) {
    let i = Complex::new(dd(0.0), dd(1.0));
    let [x, y, z] = *eff;
    kernel_frames(z, x - i * y, x + i * y, eps)
}

fn to_c64(z: Dd) -> Complex64 {
    Complex64::new(z.re.hi() + z.re.lo(), z.im.hi() + z.im.lo())
}

/// Finite-difference check of the off-diagonal connection identity
/// `<l_s|d_i r_m> = <l_s|sigma_i|r_m> / (E_m - E_s)` along the three R axes.
///
/// The stencil runs in double-double arithmetic so that the `step^2`
/// truncation term, not cancellation, dominates the residual.
pub fn connection_identity_residual(
    point: &ParameterPoint,
    state_s: State,
    state_m: State,
    step: f64,
) -> Result<f64> {
    point.validate()?;
    if state_s == state_m {
        return Err(Error::InvalidArgument("identity needs two distinct states".into()));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step {step} must be positive")));
    }
    let h = build_hamiltonian(point)?;
    let eps_sq = point.splitting_squared();
    let defect = classify_defect(&h, eps_sq, 1e-10);
    let reach = 20.0 * step * vec3::norm(point.r).max(0.5 * vec3::norm(point.gamma)).max(1.0);
    if defect != Defect::Diagonalizable || eps_sq.norm() <= reach {
        let defect = match defect {
            Defect::Diagonalizable => Defect::JordanRank2,
            d => d,
        };
        return Err(Error::DegeneratePoint {
            defect,
            detail: format!("|eps^2| = {:.3e} within the stencil reach {reach:.3e}", eps_sq.norm()),
        });
    }

    let r0 = point.r.map(dd);
    let (eff0, sq0) = dd_point(r0, point.gamma);
    let eps0 = principal_sqrt(sq0);
    let (right0, left0) = dd_frames(&eff0, eps0);
    let (s, m) = (state_s.slot(), state_m.slot());
    let h_step = dd(step);
    let sign = if state_m == State::Two { dd(2.0) } else { dd(-2.0) };
    let gap = eps0 * sign;
    let i = Complex::new(dd(0.0), dd(1.0));

    let displaced = |axis: usize, dir: f64| {
        let mut r = r0;
        r[axis] += h_step * dd(dir);
        let (eff, sq) = dd_point(r, point.gamma);
        let eps = continue_root(principal_sqrt(sq), Some(eps0));
        let (right, _) = dd_frames(&eff, eps);
        let v = right[m];
        let c = left0[m][0] * v[0] + left0[m][1] * v[1];
        let phase = rdiv(c.conj(), c.norm());
        [v[0] * phase, v[1] * phase]
    };

    let l = left0[s];
    let rm = right0[m];
    let mut worst = 0.0f64;
    for axis in 0..3 {
        let plus = displaced(axis, 1.0);
        let minus = displaced(axis, -1.0);
        let d = [plus[0] - minus[0], plus[1] - minus[1]];
        let lhs = rdiv(l[0] * d[0] + l[1] * d[1], h_step * dd(2.0));
        // sigma_i applied to r_m
        let sv = match axis {
            0 => [rm[1], rm[0]],
            1 => [-(i * rm[1]), i * rm[0]],
            _ => [rm[0], -rm[1]],
        };
        let rhs = cdiv(l[0] * sv[0] + l[1] * sv[1], gap);
        worst = worst.max(to_c64(lhs - rhs).norm());
    }
    Ok(worst)
}
