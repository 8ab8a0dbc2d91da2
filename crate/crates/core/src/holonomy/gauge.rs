//! Smooth "analytic" gauge for the biorthogonal frames.
//!
//! In the frame where Gamma is along z, with `A = sqrt(eps + eta)`,
//! `B = rho / A`, `q = sqrt(2 eps)`:
//!
//! state 1: `r = (B, -A e^{i phi}) / q`
//! state 2: `r = (A,  B e^{i phi}) / q`
//!
//! and the left covectors are the same rows with `e^{-i phi}`.
//!
//! The state-1 gauge is singular on the axis where `eps = eta`, the state-2
//! gauge where `eps = -eta`. Roots are continued along the path.

use crate::error::{Error, Result};
use crate::geometry::GammaFrame;
use crate::spectral::{
    build_hamiltonian, continue_root, eigendecompose, pair, principal_sqrt, BiorthogonalFrame,
    CVec2, ParameterPoint, State,
};
use crate::vec3;
use num_complex::Complex64;

/// Continued square roots at one point of a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub eps: Complex64,
    amp: Complex64,
    norm: Complex64,
}

/// Cylindrical data of a point about the Gamma axis, with `eta` complex.
#[derive(Debug, Clone, Copy)]
pub(crate) struct AxisCoords {
    pub rho: f64,
    pub phi: f64,
    pub eta: Complex64,
}

pub(crate) fn axis_coords(axis: &GammaFrame, r: vec3::Vec3) -> AxisCoords {
    let (rho, phi, z) = axis.cylindrical(r);
    AxisCoords { rho, phi, eta: Complex64::new(z, -0.5 * axis.magnitude) }
}

/// `(eps - eta, eps + eta)` without cancellation, using their product `rho^2`.
pub(crate) fn split_denominators(eps: Complex64, eta: Complex64, rho: f64) -> (Complex64, Complex64) {
    let (mut em, mut ep) = (eps - eta, eps + eta);
    let rho2 = rho * rho;
    if em.norm() < ep.norm() {
        if rho2 > 0.0 {
            em = rho2 / ep;
        }
    } else if rho2 > 0.0 {
        ep = rho2 / em;
    }
    (em, ep)
}

fn apply(u: &[[Complex64; 2]; 2], v: CVec2) -> CVec2 {
    [u[0][0] * v[0] + u[0][1] * v[1], u[1][0] * v[0] + u[1][1] * v[1]]
}

pub(crate) fn axis_floor(point: &ParameterPoint) -> f64 {
    1e-12 * vec3::norm(point.r).max(vec3::norm(point.gamma)).max(f64::MIN_POSITIVE)
}

/// Frame at `point` in the smooth gauge, with roots continued from `seed`.
/// The flag reports a point on the Gamma axis, where the azimuth (and so the
/// gauge) is not defined; the frame there is still a valid eigenframe.
pub(crate) fn canonical_frame(
    point: &ParameterPoint,
    axis: &GammaFrame,
    seed: Option<&Branch>,
    tol: f64,
) -> Result<(BiorthogonalFrame, Branch, bool)> {
    let h = build_hamiltonian(point)?;
    let frame = eigendecompose(&h, point, seed.map(|b| b.eps), tol)?;
    frame.right(State::One)?;
    let mut c = axis_coords(axis, point.r);
    let on_axis = c.rho <= axis_floor(point);
    if on_axis {
        c.rho = 0.0;
    }
    let eps = frame.epsilon;
    let (_, ep) = split_denominators(eps, c.eta, c.rho);
    let amp = continue_root(principal_sqrt(ep), seed.map(|b| b.amp));
    let norm = continue_root(principal_sqrt(2.0 * eps), seed.map(|b| b.norm));
    // A^2 + B^2 = 2 eps, which fixes B where A vanishes on the axis
    let b = if amp.norm() > 0.0 { c.rho / amp } else { norm };
    let ph = Complex64::from_polar(1.0, c.phi);
    let r1 = [b / norm, -amp * ph / norm];
    let r2 = [amp / norm, b * ph / norm];
    let mut out = frame;
    for (s, r) in [(State::One, r1), (State::Two, r2)] {
        let r_lab = apply(&axis.u, r);
        let k = pair(frame.left(s)?, r_lab);
        out = out.rescaled(s, k)?;
    }
    Ok((out, Branch { eps, amp, norm }, on_axis))
}

/// Error helper for near-degenerate evaluations.
pub(crate) fn check_floor(eps: Complex64, gamma_mag: f64) -> Result<()> {
    let floor = 1e-6 * gamma_mag;
    if eps.norm() < floor {
        Err(Error::NearDegeneracy { eps_abs: eps.norm(), floor })
    } else {
        Ok(())
    }
}
