//! Curvature integrals over spheres centred on the origin.
//!
//! For state 2 the curvature 2-form is `-1/2 Re.dS / eps^3` with
//! `Re = R - i Gamma/2`; state 1 carries the opposite form. Their sum over
//! both states vanishes identically, so the sphere sum rule is read off the
//! per-state Chern numbers.

use super::gauge::check_floor;
use super::quadrature::{integrate, sweep, Level};
use crate::error::{Error, Result};
use crate::geometry::GammaFrame;
use crate::spectral::{
    build_hamiltonian, eigendecompose, epsilon_at, pair, principal_sqrt, BiorthogonalFrame,
    ParameterPoint, State,
};
use crate::vec3::{self, Vec3};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereMesh {
    pub radius: f64,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl SphereMesh {
    pub fn new(radius: f64, n_theta: usize, n_phi: usize) -> Result<SphereMesh> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("sphere radius {radius} must be positive")));
        }
        if n_theta < 2 || !n_theta.is_multiple_of(2) || n_phi < 3 {
            return Err(Error::InvalidArgument(format!(
                "mesh {n_theta}x{n_phi}: need an even n_theta >= 2 and n_phi >= 3"
            )));
        }
        Ok(SphereMesh { radius, n_theta, n_phi })
    }

    fn check_locus(&self, gamma: Vec3) -> Result<()> {
        let a = 0.5 * vec3::norm(gamma);
        if (self.radius - a).abs() <= 1e-12 * self.radius.max(a) {
            return Err(Error::SphereTouchesLocus { radius: self.radius, circle_radius: a });
        }
        Ok(())
    }
}

/// `(Re.r^) r^2 sin(theta) / eps^3` on the sphere, axisymmetric about Gamma.
fn flux_density(r: f64, g: f64, theta: f64, eps: Complex64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    Complex64::new(r, -0.5 * g * c) * r * r * s / (eps * eps * eps)
}

fn eps_on_sphere(r: f64, g: f64, theta: f64, prev: Option<Complex64>) -> Complex64 {
    let sq = Complex64::new(r * r - 0.25 * g * g, -r * g * theta.cos());
    crate::spectral::continue_root(principal_sqrt(sq), prev)
}

/// `2 pi \int f(theta(u)) theta'(u) du` with `eps` continued from `theta(0)`.
fn theta_integral(r: f64, g: f64, start_panels: usize, rtol: f64, theta: impl Fn(f64) -> f64, dtheta: f64) -> Result<Complex64> {
    let reff = (r * r + 0.25 * g * g).sqrt();
    let eps0 = eps_on_sphere(r, g, theta(0.0), None);
    let (v, _) = integrate(start_panels, rtol, |panels| {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut prev = (eps0, theta(0.0));
        let mut suspect = false;
        sweep(panels, |u, w| {
            let th = theta(u);
            let eps = eps_on_sphere(r, g, th, Some(prev.0));
            check_floor(eps, g)?;
            let bound = r * (th - prev.1).abs() * (1.0 + reff / eps.norm());
            suspect |= (eps - prev.0).norm() > bound;
            prev = (eps, th);
            acc += w * flux_density(r, g, th, eps);
            Ok(())
        })?;
        Ok(if suspect { Level::Suspect } else { Level::Value(acc * TAU * dtheta) })
    })?;
    Ok(v)
}

/// `gamma_1 + gamma_2 = -1/2 \oint_S Re.dS / (Re.Re)^{3/2}` over the sphere,
/// with `(Re.Re)^{1/2}` continued from its principal value at the north pole.
pub fn chern_sum_surface(mesh: &SphereMesh, gamma: Vec3, rtol: f64) -> Result<Complex64> {
    mesh.check_locus(gamma)?;
    let g = vec3::norm(gamma);
    let flux = theta_integral(mesh.radius, g, mesh.n_theta, rtol, |u| PI * u, PI)?;
    Ok(-0.5 * flux)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cap {
    /// The cap on the `+Gamma` side of the latitude circle.
    Upper,
    Lower,
}

/// Surface integral of the state-`s` curvature over one cap bounded by the
/// latitude circle at polar angle `theta0`, oriented so that the boundary is
/// traversed counter-clockwise about Gamma. `eps` is continued from its
/// principal value on the boundary.
pub fn stokes_cap_phase(gamma: Vec3, radius: f64, theta0: f64, state: State, cap: Cap, rtol: f64) -> Result<Complex64> {
    SphereMesh::new(radius, 2, 3)?.check_locus(gamma)?;
    if !(theta0 > 0.0 && theta0 < PI) {
        return Err(Error::InvalidArgument(format!("polar angle {theta0} must lie in (0, pi)")));
    }
    let g = vec3::norm(gamma);
    // theta runs from the boundary into the cap; the returned value is the
    // flux along d(theta), which is inward on the upper cap
    let state2 = match cap {
        Cap::Upper => 0.5 * theta_integral(radius, g, 8, rtol, |u| theta0 * (1.0 - u), -theta0)?,
        Cap::Lower => 0.5 * theta_integral(radius, g, 8, rtol, |u| theta0 + (PI - theta0) * u, PI - theta0)?,
    };
    Ok(if state == State::Two { state2 } else { -state2 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernPlaquette {
    /// Chern number of the `E + eps` eigenline bundle, which the sphere sum
    /// rule `gamma_1 + gamma_2 = -2 pi c1` refers to.
    pub c1: i64,
    pub per_state: [i64; 2],
    /// `-(1/2pi) sum_p gamma_p` per state, before rounding.
    pub raw: [Complex64; 2],
    /// Largest distance of a raw value from its rounded integer.
    pub residual: f64,
    /// Sum of the two per-state numbers; zero for a two-level system.
    pub trace_total: i64,
}

/// Lattice Chern numbers from plaquette holonomies on a `n_theta x n_phi`
/// mesh. Each plaquette phase is `i Ln prod o_f - (i/2) sum Ln(o_f o_b)`,
/// which makes the per-state totals exact multiples of `-2 pi`.
pub fn chern_trace_plaquette(mesh: &SphereMesh, gamma: Vec3, tol: f64) -> Result<ChernPlaquette> {
    mesh.check_locus(gamma)?;
    let axis = GammaFrame::new(gamma);
    let g = axis.magnitude;
    let (nt, np) = (mesh.n_theta, mesh.n_phi);
    let e0 = Complex64::new(0.0, 0.0);
    let mut grid: Vec<Vec<BiorthogonalFrame>> = Vec::with_capacity(nt + 1);
    let mut prev: Option<Complex64> = None;
    for i in 0..=nt {
        let theta = PI * i as f64 / nt as f64;
        let (st, ct) = theta.sin_cos();
        let mut row = Vec::with_capacity(np);
        let mut row_eps = None;
        for j in 0..np {
            let phi = TAU * j as f64 / np as f64;
            let (sp, cp) = phi.sin_cos();
            let dir = vec3::add(
                vec3::add(vec3::scale(axis.e1, st * cp), vec3::scale(axis.e2, st * sp)),
                vec3::scale(axis.e3, ct),
            );
            let p = ParameterPoint { r: vec3::scale(dir, mesh.radius), gamma, e_offset: e0 };
            let seed = row_eps.or(prev);
            let eps = epsilon_at(&p, seed);
            check_floor(eps, g)?;
            let f = eigendecompose(&build_hamiltonian(&p)?, &p, seed, tol)?;
            f.right(State::One)?;
            row_eps.get_or_insert(eps);
            row.push(f);
        }
        prev = row_eps;
        grid.push(row);
    }

    let i = Complex64::i();
    let mut totals = [Complex64::new(0.0, 0.0); 2];
    for it in 0..nt {
        for jp in 0..np {
            let jn = (jp + 1) % np;
            let ring = [&grid[it][jp], &grid[it + 1][jp], &grid[it + 1][jn], &grid[it][jn]];
            for s in State::BOTH {
                let mut prod = Complex64::new(1.0, 0.0);
                let mut corr = Complex64::new(0.0, 0.0);
                for k in 0..4 {
                    let (a, b) = (ring[k], ring[(k + 1) % 4]);
                    let of = pair(a.left(s)?, b.right(s)?);
                    let ob = pair(b.left(s)?, a.right(s)?);
                    let round_trip = of * ob;
                    if !(round_trip.arg().abs() < FRAC_PI_2) {
                        return Err(Error::Refine(format!(
                            "plaquette ({it}, {jp}) round-trip overlap phase {:.3}; double the mesh",
                            round_trip.arg()
                        )));
                    }
                    prod *= of;
                    corr += (of * ob).ln();
                }
                if !(prod.arg().abs() < FRAC_PI_2) {
                    return Err(Error::Refine(format!(
                        "plaquette ({it}, {jp}) holonomy phase {:.3}; double the mesh",
                        prod.arg()
                    )));
                }
                totals[s.slot()] += i * prod.ln() - 0.5 * i * corr;
            }
        }
    }
    let raw = totals.map(|t| -t / TAU);
    let per_state = raw.map(|r| r.re.round() as i64);
    let residual = raw
        .iter()
        .zip(&per_state)
        .map(|(r, &c)| (r - c as f64).norm())
        .fold(0.0, f64::max);
    if residual >= 1e-3 {
        return Err(Error::Refine(format!(
            "plaquette sums {raw:?} are not integral to 1e-3; double the mesh"
        )));
    }
    Ok(ChernPlaquette {
        c1: per_state[1],
        per_state,
        raw,
        residual,
        trace_total: per_state[0] + per_state[1],
    })
}
