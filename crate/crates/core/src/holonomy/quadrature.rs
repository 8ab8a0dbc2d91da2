//! Composite Gauss-Legendre quadrature with ordered node sweeps.
//!
//! Nodes are visited in increasing parameter order so that integrands can
//! carry a continued square-root branch from one node to the next.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::sync::OnceLock;

const ORDER: usize = 10;
const MAX_NODES: usize = 1 << 22;

/// Nodes and weights on [-1, 1] by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[n - 1 - i] = z;
        w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

/// Visits all nodes of `panels` equal panels on [0, 1] in increasing order,
/// calling `f(t, w)` with the node and its weight.
pub fn sweep<F>(panels: usize, mut f: F) -> Result<()>
where
    F: FnMut(f64, f64) -> Result<()>,
{
    let (x, w) = rule();
    let h = 1.0 / panels as f64;
    for p in 0..panels {
        let a = p as f64 * h;
        for (xi, wi) in x.iter().zip(w) {
            f(a + 0.5 * h * (1.0 + xi), 0.5 * h * wi)?;
        }
    }
    Ok(())
}

/// Outcome of one full sweep at a given resolution.
pub enum Level {
    Value(Complex64),
    /// The sweep saw a suspected branch flip; refine and try again.
    Suspect,
}

/// Global halving driver. `eval(panels)` performs one ordered sweep.
/// Stops when two flip-free levels agree to `rtol * max(|I|, 1)`.
pub fn integrate<F>(start_panels: usize, rtol: f64, mut eval: F) -> Result<(Complex64, usize)>
where
    F: FnMut(usize) -> Result<Level>,
{
    if !(rtol > 0.0) {
        return Err(Error::InvalidArgument(format!("quadrature tolerance {rtol} must be positive")));
    }
    let mut panels = start_panels.max(1);
    let mut prev: Option<Complex64> = None;
    let mut last_change = f64::INFINITY;
    while panels * ORDER <= MAX_NODES {
        match eval(panels)? {
            Level::Value(v) => {
                if let Some(p) = prev {
                    last_change = (v - p).norm();
                    if last_change <= rtol * v.norm().max(1.0) {
                        return Ok((v, panels));
                    }
                }
                prev = Some(v);
            }
            Level::Suspect => prev = None,
        }
        panels *= 2;
    }
    Err(Error::NoConvergence(format!(
        "no agreement to rtol {rtol:.1e} after {} panels (last change {last_change:.3e})",
        panels / 2
    )))
}
