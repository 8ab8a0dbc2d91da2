//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the library's numerical code.

#![allow(dead_code)]

use num_complex::Complex64 as C;
use std::f64::consts::TAU;

pub type V3 = [f64; 3];

pub fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn unit(a: V3) -> V3 {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Any right-handed orthonormal frame with `e3` along `g` (z if `g = 0`).
pub fn frame_about(g: V3) -> (V3, V3, V3) {
    let e3 = if dot(g, g) == 0.0 { [0.0, 0.0, 1.0] } else { unit(g) };
    let seed = if e3[2].abs() < 0.8 { [0.0, 0.0, 1.0] } else { [0.0, 1.0, 0.0] };
    let e1 = unit(cross(seed, e3));
    (e1, cross(e3, e1), e3)
}

/// `E 1 + sum_k (R_k - i Gamma_k / 2) sigma_k`, multiplied out term by term.
pub fn pauli_expand(r: V3, g: V3, e: C) -> [[C; 2]; 2] {
    let o = C::new(1.0, 0.0);
    let z = C::new(0.0, 0.0);
    let i = C::new(0.0, 1.0);
    let sig = [[[z, o], [o, z]], [[z, -i], [i, z]], [[o, z], [z, -o]]];
    let mut h = [[e, z], [z, e]];
    for k in 0..3 {
        let c = C::new(r[k], -0.5 * g[k]);
        for a in 0..2 {
            for b in 0..2 {
                h[a][b] += c * sig[k][a][b];
            }
        }
    }
    h
}

/// Eigenvalues from the characteristic polynomial, ordered by the sign of
/// the root taken (`t/2 - d`, `t/2 + d`).
pub fn quadratic_eigenvalues(h: [[C; 2]; 2]) -> (C, C, C) {
    let t = h[0][0] + h[1][1];
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let d = (0.25 * t * t - det).sqrt();
    (0.5 * t - d, 0.5 * t + d, d)
}

/// `-1/2 \oint (1 +- eta/eps) dphi` by composite Simpson in the loop
/// parameter, with `eps` continued from the principal root at `t = 0`.
/// `sign = +1` for the `E - eps` state.
pub fn azimuthal_phase(path: &dyn Fn(f64) -> (V3, V3), g: V3, sign: f64, intervals: usize) -> C {
    let (e1, e2, e3) = frame_about(g);
    let gm = dot(g, g).sqrt();
    let mut prev: Option<C> = None;
    let mut f = |t: f64| {
        let (r, dr) = path(t);
        let (x, y, z) = (dot(r, e1), dot(r, e2), dot(r, e3));
        let (dx, dy) = (dot(dr, e1), dot(dr, e2));
        let dphi = (x * dy - y * dx) / (x * x + y * y);
        let eta = C::new(z, -0.5 * gm);
        let sq = C::new(dot(r, r) - 0.25 * gm * gm, -dot(r, g));
        let mut eps = sq.sqrt();
        if eps.re == 0.0 && eps.im < 0.0 {
            eps = -eps;
        }
        if let Some(p) = prev {
            if (eps - p).norm() > (eps + p).norm() {
                eps = -eps;
            }
        }
        prev = Some(eps);
        -0.5 * dphi * (1.0 + sign * eta / eps)
    };
    let n = intervals + intervals % 2;
    let h = 1.0 / n as f64;
    let mut acc = C::new(0.0, 0.0);
    for k in 0..=n {
        let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(k as f64 * h);
    }
    acc * h / 3.0
}

/// Circle with the library's basis convention: `u` from x (or y when the
/// normal is nearly along x), `v = n x u`.
pub fn circle(center: V3, radius: f64, normal: V3, turns: f64) -> impl Fn(f64) -> (V3, V3) {
    let n = unit(normal);
    let a = if n[0].abs() > 0.9 { [0.0, 1.0, 0.0] } else { [1.0, 0.0, 0.0] };
    let d = dot(a, n);
    let u = unit([a[0] - d * n[0], a[1] - d * n[1], a[2] - d * n[2]]);
    let v = cross(n, u);
    move |t: f64| {
        let ang = TAU * turns * t;
        let (s, c) = ang.sin_cos();
        let w = TAU * turns * radius;
        let p = std::array::from_fn(|k| center[k] + radius * (c * u[k] + s * v[k]));
        let dp = std::array::from_fn(|k| w * (-s * u[k] + c * v[k]));
        (p, dp)
    }
}

/// Signed crossings of the disk spanned by the degeneracy circle, located by
/// bisection on a fine scan of the continuous loop.
pub fn disk_crossings(path: &dyn Fn(f64) -> (V3, V3), g: V3, scan: usize) -> i64 {
    let (_, _, e3) = frame_about(g);
    let a = 0.5 * dot(g, g).sqrt();
    let z = |t: f64| dot(path(t).0, e3);
    let mut count = 0;
    for k in 0..scan {
        let (mut lo, mut hi) = (k as f64 / scan as f64, (k + 1) as f64 / scan as f64);
        let (zl, zh) = (z(lo), z(hi));
        if (zl < 0.0) == (zh < 0.0) {
            continue;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if (z(mid) < 0.0) == (zl < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p = path(0.5 * (lo + hi)).0;
        let zz = dot(p, e3);
        let rho = (dot(p, p) - zz * zz).max(0.0).sqrt();
        if rho < a {
            count += if zh >= 0.0 { 1 } else { -1 };
        }
    }
    count
}

/// Solid-angle phase of the spin-aligned state on a latitude loop.
pub fn solid_angle_phase(theta: f64) -> f64 {
    -std::f64::consts::PI * (1.0 - theta.cos())
}
