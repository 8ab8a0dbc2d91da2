//! Closed-form connection integrated along the loop.
//!
//! With `eta = R.Gamma^ - i|Gamma|/2`, `rho` and `phi` the cylindrical radius
//! and azimuth about Gamma, and `eps^2 = rho^2 + eta^2`:
//!
//! `gamma_1 = -1/2 \oint (Gamma^ x R).dR / (eps (eps - eta)) = -1/2 \oint (1 + eta/eps) dphi`
//! `gamma_2 = -1/2 \oint (Gamma^ x R).dR / (eps (eps + eta)) = -1/2 \oint (1 - eta/eps) dphi`

use super::gauge::{axis_coords, check_floor, split_denominators};
use super::quadrature::{integrate, sweep, Level};
use super::{Diagnostics, GaugeKind, Method, PhaseResult};
use crate::error::{Error, Result};
use crate::geometry::{classify_path, ClassLabel, GammaFrame, SampledLoop};
use crate::spectral::{epsilon_at, State};
use crate::vec3::{self, Vec3};
use num_complex::Complex64;

/// Integrand inputs at one quadrature node.
struct Node {
    r: Vec3,
    dr: Vec3,
    eps: Complex64,
    rho: f64,
    eta: Complex64,
}

impl Node {
    /// `(Gamma^ x R) . dR/dt = rho^2 dphi/dt`.
    fn swept(&self, axis: &GammaFrame) -> f64 {
        vec3::dot(vec3::cross(axis.e3, self.r), self.dr)
    }
}

struct Track {
    min_eps_abs: f64,
    eps_start: Complex64,
    eps_end: Complex64,
}

/// Integrates `f` over the loop with `eps` continued from its principal value
/// at `t = 0` through the nodes in order.
fn path_integral<F>(lp: &SampledLoop, rtol: f64, mut f: F) -> Result<(Complex64, usize, Track)>
where
    F: FnMut(&Node) -> Result<Complex64>,
{
    let spec = &lp.spec;
    let axis = GammaFrame::new(spec.gamma);
    let gmag = axis.magnitude;
    let start = spec.point(0.0);
    let eps0 = epsilon_at(&start, None);
    let reff = |r: Vec3| (vec3::dot(r, r) + 0.25 * gmag * gmag).sqrt();
    let mut track = Track { min_eps_abs: f64::INFINITY, eps_start: eps0, eps_end: eps0 };
    let (value, panels) = integrate(4 * spec.pieces(), rtol, |panels| {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut prev_eps = eps0;
        let mut prev_r = start.r;
        let mut suspect = false;
        let mut min_eps = eps0.norm();
        let advance = |r: Vec3, prev_eps: &mut Complex64, prev_r: &mut Vec3| {
            let p = crate::spectral::ParameterPoint { r, ..start };
            let eps = epsilon_at(&p, Some(*prev_eps));
            let bound = vec3::norm(vec3::sub(r, *prev_r)) * (1.0 + reff(r) / eps.norm());
            let flip = (eps - *prev_eps).norm() > bound;
            *prev_eps = eps;
            *prev_r = r;
            (eps, flip)
        };
        sweep(panels, |t, w| {
            let (r, dr) = spec.eval(t);
            let (eps, flip) = advance(r, &mut prev_eps, &mut prev_r);
            suspect |= flip;
            check_floor(eps, gmag)?;
            min_eps = min_eps.min(eps.norm());
            let c = axis_coords(&axis, r);
            acc += w * f(&Node { r, dr, eps, rho: c.rho, eta: c.eta })?;
            Ok(())
        })?;
        let (eps_end, flip) = advance(spec.position(1.0), &mut prev_eps, &mut prev_r);
        suspect |= flip;
        track.min_eps_abs = min_eps;
        track.eps_end = eps_end;
        Ok(if suspect { Level::Suspect } else { Level::Value(acc) })
    })?;
    Ok((value, panels, track))
}

fn result(gamma: Complex64, state: State, method: Method, panels: usize, t: &Track, notice: Option<String>) -> PhaseResult {
    let exchanged = (t.eps_end + t.eps_start).norm() < (t.eps_end - t.eps_start).norm();
    PhaseResult {
        gamma,
        state,
        method,
        n: panels,
        diagnostics: Diagnostics {
            branch_flips: 0,
            min_eps_abs: t.min_eps_abs,
            closure_defect: (t.eps_end - t.eps_start).norm() / t.eps_start.norm().max(f64::MIN_POSITIVE),
            states_exchanged: exchanged,
            gauge: GaugeKind::Canonical,
            notice,
        },
    }
}

fn require_width(lp: &SampledLoop) -> Result<f64> {
    let g = vec3::norm(lp.gamma());
    if g > 0.0 {
        Ok(g)
    } else {
        Err(Error::FormulaSingular(
            "|Gamma| = 0: the closed-form connection divides by |Gamma|; use the discrete method".into(),
        ))
    }
}

pub fn berry_phase_line_quadrature(lp: &SampledLoop, state: State, rtol: f64) -> Result<PhaseResult> {
    require_width(lp)?;
    let axis = GammaFrame::new(lp.gamma());
    let (gamma, panels, track) = path_integral(lp, rtol, |n| {
        let swept = n.swept(&axis);
        if swept == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let (em, ep) = split_denominators(n.eps, n.eta, n.rho);
        let den = n.eps * if state == State::One { em } else { ep };
        if den.norm() == 0.0 {
            return Err(Error::NearDegeneracy { eps_abs: den.norm(), floor: 0.0 });
        }
        Ok(-0.5 * swept / den)
    })?;
    Ok(result(gamma, state, Method::LineQuadrature, panels, &track, None))
}

/// Smallest cylindrical radius on a dense resampling of the loop.
fn min_axis_distance(lp: &SampledLoop) -> f64 {
    let axis = GammaFrame::new(lp.gamma());
    let dense = 16 * lp.n;
    (0..dense)
        .map(|k| axis.cylindrical(lp.spec.position(k as f64 / dense as f64)).0)
        .fold(f64::INFINITY, f64::min)
}

fn axis_scale(lp: &SampledLoop) -> f64 {
    lp.points.iter().map(|p| vec3::norm(p.r)).fold(vec3::norm(lp.gamma()), f64::max)
}

pub fn berry_phase_spherical(lp: &SampledLoop, state: State, rtol: f64) -> Result<PhaseResult> {
    require_width(lp)?;
    if min_axis_distance(lp) <= 1e-9 * axis_scale(lp) {
        let mut r = berry_phase_line_quadrature(lp, state, rtol)?;
        r.diagnostics.notice =
            Some("loop meets the Gamma axis where phi is undefined; fell back to line quadrature".into());
        return Ok(r);
    }
    let axis = GammaFrame::new(lp.gamma());
    let sign = if state == State::One { 1.0 } else { -1.0 };
    let (gamma, panels, track) = path_integral(lp, rtol, |n| {
        let dphi = n.swept(&axis) / (n.rho * n.rho);
        Ok(-0.5 * dphi * (1.0 + sign * n.eta / n.eps))
    })?;
    Ok(result(gamma, state, Method::SphericalQuadrature, panels, &track, None))
}

/// `Delta gamma = -1/2 \oint eta/eps dphi`, so that `gamma_{1,2} = +-Delta gamma`
/// on loops linked with the diabolical circle.
pub fn delta_gamma_path(lp: &SampledLoop, rtol: f64) -> Result<Complex64> {
    require_width(lp)?;
    let class = classify_path(lp)?;
    if matches!(class.label, ClassLabel::KindI | ClassLabel::Trivial) {
        return Err(Error::WrongClass(format!(
            "Delta gamma describes loops linked with the circle; this loop has W = {}, L = {}",
            class.winding, class.linking
        )));
    }
    if min_axis_distance(lp) <= 1e-9 * axis_scale(lp) {
        return Err(Error::FormulaSingular("loop meets the Gamma axis; dphi is undefined".into()));
    }
    let axis = GammaFrame::new(lp.gamma());
    let (v, _, _) = path_integral(lp, rtol, |n| {
        let dphi = n.swept(&axis) / (n.rho * n.rho);
        Ok(-0.5 * dphi * n.eta / n.eps)
    })?;
    Ok(v)
}
