//! Closed loops in R-space at fixed Gamma, the diabolical circle, and
//! topological classification of loops relative to it.

use crate::error::{Error, Result};
use crate::spectral::ParameterPoint;
use crate::vec3::{self, Vec3};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// Orthonormal frame `(e1, e2, e3)` with `e3` along Gamma, plus the spin-1/2
/// rotation `U` with `U sigma_z U^dag = e3.sigma`, `U sigma_x U^dag = e1.sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFrame {
    pub e1: Vec3,
    pub e2: Vec3,
    pub e3: Vec3,
    pub u: [[Complex64; 2]; 2],
    pub magnitude: f64,
}

impl GammaFrame {
    /// Frame for `gamma`; the z axis is used when `gamma` vanishes.
    pub fn new(gamma: Vec3) -> GammaFrame {
        let magnitude = vec3::norm(gamma);
        let e3 = vec3::normalize(gamma).unwrap_or([0.0, 0.0, 1.0]);
        let beta = e3[2].clamp(-1.0, 1.0).acos();
        let alpha = if e3[0] == 0.0 && e3[1] == 0.0 { 0.0 } else { e3[1].atan2(e3[0]) };
        let (sa, ca) = alpha.sin_cos();
        let (sb, cb) = beta.sin_cos();
        let e1 = [cb * ca, cb * sa, -sb];
        let e2 = [-sa, ca, 0.0];
        let (s, c) = (0.5 * beta).sin_cos();
        let ph = Complex64::from_polar(1.0, -0.5 * alpha);
        let u = [[ph * c, -ph * s], [ph.conj() * s, ph.conj() * c]];
        GammaFrame { e1, e2, e3, u, magnitude }
    }

    /// `(rho, phi, z)` of `r` about the Gamma axis.
    pub fn cylindrical(&self, r: Vec3) -> (f64, f64, f64) {
        let x = vec3::dot(r, self.e1);
        let y = vec3::dot(r, self.e2);
        (x.hypot(y), y.atan2(x), vec3::dot(r, self.e3))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoopShape {
    /// `center + radius (cos a u + sin a v)`, `a = 2 pi turns t + phase0`,
    /// where `(u, v, normal)` is right-handed.
    Circle3D { center: Vec3, radius: f64, normal: Vec3, phase0: f64, turns: i32 },
    /// Piecewise-linear loop; the first and last vertex must coincide.
    PolyPath { vertices: Vec<Vec3> },
    /// Periodic cubic (Catmull-Rom) interpolation of equally spaced samples.
    Parametric { samples: Vec<Vec3> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopSpec {
    pub shape: LoopShape,
    pub gamma: Vec3,
    pub e_offset: Complex64,
}

fn circle_basis(normal: Vec3) -> (Vec3, Vec3, Vec3) {
    let n = vec3::normalize(normal).unwrap_or([0.0, 0.0, 1.0]);
    let a = if n[0].abs() > 0.9 { [0.0, 1.0, 0.0] } else { [1.0, 0.0, 0.0] };
    let u = vec3::normalize(vec3::sub(a, vec3::scale(n, vec3::dot(a, n)))).unwrap();
    (u, vec3::cross(n, u), n)
}

fn catmull_rom(p: [Vec3; 4], u: f64) -> (Vec3, Vec3) {
    let mut pos = [0.0; 3];
    let mut der = [0.0; 3];
    for k in 0..3 {
        let (p0, p1, p2, p3) = (p[0][k], p[1][k], p[2][k], p[3][k]);
        let b = -p0 + p2;
        let c = 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3;
        let d = -p0 + 3.0 * p1 - 3.0 * p2 + p3;
        pos[k] = 0.5 * (2.0 * p1 + u * (b + u * (c + u * d)));
        der[k] = 0.5 * (b + u * (2.0 * c + 3.0 * u * d));
    }
    (pos, der)
}

impl LoopSpec {
    pub fn circle(center: Vec3, radius: f64, normal: Vec3, gamma: Vec3) -> LoopSpec {
        LoopSpec {
            shape: LoopShape::Circle3D { center, radius, normal, phase0: 0.0, turns: 1 },
            gamma,
            e_offset: Complex64::new(0.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if !vec3::is_finite(self.gamma) || !self.e_offset.is_finite() {
            return bad("gamma and E_offset must be finite".into());
        }
        match &self.shape {
            LoopShape::Circle3D { center, radius, normal, phase0, turns } => {
                if !(vec3::is_finite(*center) && radius.is_finite() && phase0.is_finite()) {
                    return bad("circle fields must be finite".into());
                }
                if *radius < 0.0 {
                    return bad(format!("negative circle radius {radius}"));
                }
                if !vec3::is_finite(*normal) || vec3::normalize(*normal).is_none() {
                    return bad("circle normal must be a nonzero finite vector".into());
                }
                if *turns == 0 {
                    return bad("circle must make at least one turn".into());
                }
            }
            LoopShape::PolyPath { vertices } => {
                if vertices.len() < 3 {
                    return bad("polygon needs at least two distinct vertices plus closure".into());
                }
                if vertices.iter().any(|v| !vec3::is_finite(*v)) {
                    return bad("polygon vertices must be finite".into());
                }
                if vertices.first() != vertices.last() {
                    return bad("polygon is not closed: first vertex differs from last".into());
                }
            }
            LoopShape::Parametric { samples } => {
                if samples.len() < 4 {
                    return bad("parametric table needs at least 4 samples".into());
                }
                if samples.iter().any(|v| !vec3::is_finite(*v)) {
                    return bad("parametric samples must be finite".into());
                }
            }
        }
        Ok(())
    }

    /// Number of smooth pieces; quadrature panels are aligned to them.
    pub fn pieces(&self) -> usize {
        match &self.shape {
            LoopShape::Circle3D { .. } => 1,
            LoopShape::PolyPath { vertices } => vertices.len() - 1,
            LoopShape::Parametric { .. } => self.table().len(),
        }
    }

    fn table(&self) -> &[Vec3] {
        match &self.shape {
            LoopShape::Parametric { samples } => {
                if samples.len() > 1 && samples.first() == samples.last() {
                    &samples[..samples.len() - 1]
                } else {
                    samples
                }
            }
            _ => &[],
        }
    }

    /// Position and derivative `dR/dt` at `t` in `[0, 1]`.
    pub fn eval(&self, t: f64) -> (Vec3, Vec3) {
        match &self.shape {
            LoopShape::Circle3D { center, radius, normal, phase0, turns } => {
                let (u, v, _) = circle_basis(*normal);
                let frac = (t * *turns as f64).rem_euclid(1.0);
                let a = TAU * frac + phase0;
                let (s, c) = a.sin_cos();
                let pos = vec3::add(*center, vec3::add(vec3::scale(u, radius * c), vec3::scale(v, radius * s)));
                let w = TAU * *turns as f64 * radius;
                let der = vec3::add(vec3::scale(u, -w * s), vec3::scale(v, w * c));
                (pos, der)
            }
            LoopShape::PolyPath { vertices } => {
                let m = vertices.len() - 1;
                let x = t.clamp(0.0, 1.0) * m as f64;
                let i = (x.floor() as usize).min(m - 1);
                let u = x - i as f64;
                let d = vec3::sub(vertices[i + 1], vertices[i]);
                (vec3::add(vertices[i], vec3::scale(d, u)), vec3::scale(d, m as f64))
            }
            LoopShape::Parametric { .. } => {
                let tab = self.table();
                let m = tab.len();
                let x = t.rem_euclid(1.0) * m as f64;
                let i = (x.floor() as usize).min(m - 1);
                let u = x - i as f64;
                let at = |k: isize| tab[(i as isize + k).rem_euclid(m as isize) as usize];
                let (pos, der) = catmull_rom([at(-1), at(0), at(1), at(2)], u);
                (pos, vec3::scale(der, m as f64))
            }
        }
    }

    pub fn position(&self, t: f64) -> Vec3 {
        self.eval(t).0
    }

    pub fn point(&self, t: f64) -> ParameterPoint {
        ParameterPoint { r: self.position(t), gamma: self.gamma, e_offset: self.e_offset }
    }

    /// The same loop traversed backwards from the same starting point.
    pub fn reversed(&self) -> LoopSpec {
        let shape = match &self.shape {
            LoopShape::Circle3D { center, radius, normal, phase0, turns } => LoopShape::Circle3D {
                center: *center,
                radius: *radius,
                normal: *normal,
                phase0: *phase0,
                turns: -turns,
            },
            LoopShape::PolyPath { vertices } => {
                LoopShape::PolyPath { vertices: vertices.iter().rev().copied().collect() }
            }
            LoopShape::Parametric { .. } => {
                let tab = self.table();
                let mut s = vec![tab[0]];
                s.extend(tab[1..].iter().rev());
                LoopShape::Parametric { samples: s }
            }
        };
        LoopSpec { shape, ..self.clone() }
    }
}

/// `(R^2 - Gamma^2/4, R.Gamma)`; both vanish exactly on the degeneracy locus.
pub fn degeneracy_residual(point: &ParameterPoint) -> (f64, f64) {
    let s = point.splitting_squared();
    (s.re, -s.im)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiabolicalCircle {
    pub center: Vec3,
    pub radius: f64,
    pub normal: Vec3,
}

pub fn diabolical_circle(gamma: Vec3) -> Result<DiabolicalCircle> {
    match vec3::normalize(gamma) {
        Some(normal) => Ok(DiabolicalCircle { center: [0.0; 3], radius: 0.5 * vec3::norm(gamma), normal }),
        None => Err(Error::LocusIsPoint),
    }
}

/// Euclidean distance from `r` to the degeneracy locus for width vector `gamma`.
pub fn distance_to_locus(r: Vec3, gamma: Vec3) -> f64 {
    let a = 0.5 * vec3::norm(gamma);
    if a == 0.0 {
        return vec3::norm(r);
    }
    let (rho, _, z) = GammaFrame::new(gamma).cylindrical(r);
    (rho - a).hypot(z)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledLoop {
    pub spec: LoopSpec,
    pub n: usize,
    /// Parameter values `k / n`.
    pub params: Vec<f64>,
    pub points: Vec<ParameterPoint>,
    pub min_degeneracy_distance: f64,
}

impl SampledLoop {
    pub fn gamma(&self) -> Vec3 {
        self.spec.gamma
    }
}

fn min_distance(spec: &LoopSpec, n: usize) -> (f64, f64) {
    let dense = 16 * n;
    let d = |t: f64| distance_to_locus(spec.position(t), spec.gamma);
    let (mut best_t, mut best) = (0.0, f64::INFINITY);
    for k in 0..dense {
        let t = k as f64 / dense as f64;
        let v = d(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    // golden-section polish inside the bracketing sub-samples
    let h = 1.0 / dense as f64;
    let (mut lo, mut hi) = (best_t - h, best_t + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if d(a.rem_euclid(1.0)) < d(b.rem_euclid(1.0)) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let t = (0.5 * (lo + hi)).rem_euclid(1.0);
    let v = d(t);
    if v < best {
        (v, t)
    } else {
        (best, best_t)
    }
}

pub fn sample_loop(spec: &LoopSpec, n: usize, min_dist: f64) -> Result<SampledLoop> {
    spec.validate()?;
    if n < 8 {
        return Err(Error::InvalidArgument(format!("N = {n} below the minimum of 8")));
    }
    if !(min_dist > 0.0 && min_dist.is_finite()) {
        return Err(Error::InvalidArgument(format!("min_dist = {min_dist} must be positive")));
    }
    let (dist, at) = min_distance(spec, n);
    if dist < min_dist {
        return Err(Error::LoopTooClose { parameter: at, distance: dist, floor: min_dist });
    }
    let params: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
    let points = params.iter().map(|&t| spec.point(t)).collect();
    Ok(SampledLoop { spec: spec.clone(), n, params, points, min_degeneracy_distance: dist })
}

pub fn winding_number(lp: &SampledLoop) -> Result<i64> {
    let frame = GammaFrame::new(lp.gamma());
    let scale = lp
        .points
        .iter()
        .map(|p| vec3::norm(p.r))
        .fold(frame.magnitude, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut phis = Vec::with_capacity(lp.n);
    for (k, p) in lp.points.iter().enumerate() {
        let (rho, phi, _) = frame.cylindrical(p.r);
        if rho <= 1e-12 * scale {
            return Err(Error::WindingUndefined(format!(
                "sample {k} (t = {:.6}) lies on the Gamma axis",
                lp.params[k]
            )));
        }
        phis.push(phi);
    }
    let mut total = 0.0;
    for k in 0..lp.n {
        let mut d = phis[(k + 1) % lp.n] - phis[k];
        d -= TAU * (d / TAU).round();
        if d.abs() >= PI - 1e-9 {
            return Err(Error::WindingUndefined(format!(
                "azimuth jumps by pi between samples {k} and {}; the loop crosses the axis or N is too small",
                k + 1
            )));
        }
        total += d;
    }
    let w = total / TAU;
    let r = w.round();
    if (w - r).abs() >= 1e-6 {
        return Err(Error::WindingUndefined(format!("non-integer winding {w}")));
    }
    Ok(r as i64)
}

pub fn linking_number(lp: &SampledLoop) -> Result<i64> {
    let circle = diabolical_circle(lp.gamma())?;
    let frame = GammaFrame::new(lp.gamma());
    let a = circle.radius;
    let mut count = 0i64;
    for k in 0..lp.n {
        let p0 = lp.points[k].r;
        let p1 = lp.points[(k + 1) % lp.n].r;
        let z0 = vec3::dot(p0, frame.e3);
        let z1 = vec3::dot(p1, frame.e3);
        if (z0 < 0.0) == (z1 < 0.0) {
            continue;
        }
        let s = z0 / (z0 - z1);
        let hit = vec3::add(p0, vec3::scale(vec3::sub(p1, p0), s));
        let (rho, _, _) = frame.cylindrical(hit);
        if (rho - a).abs() <= 1e-9 * a {
            return Err(Error::AmbiguousCrossing { parameter: lp.params[k] });
        }
        if rho < a {
            count += if z1 >= 0.0 { 1 } else { -1 };
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassLabel {
    Trivial,
    KindI,
    KindII,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathClass {
    pub winding: i64,
    pub linking: i64,
    pub label: ClassLabel,
}

impl PathClass {
    pub fn new(winding: i64, linking: i64) -> PathClass {
        let label = match (winding != 0, linking != 0) {
            (false, false) => ClassLabel::Trivial,
            (true, false) => ClassLabel::KindI,
            (false, true) => ClassLabel::KindII,
            (true, true) => ClassLabel::Mixed,
        };
        PathClass { winding, linking, label }
    }
}

pub fn classify_path(lp: &SampledLoop) -> Result<PathClass> {
    Ok(PathClass::new(winding_number(lp)?, linking_number(lp)?))
}
