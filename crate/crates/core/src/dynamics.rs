//! Direct integration of the driven two-level system.
//!
//! The state is expanded in the instantaneous biorthogonal frame, and the
//! dynamical phase of the followed state `s` is factored out of every
//! amplitude: `c_m = exp((i/hbar) \int E_s dt) a_m`. In the scaled time
//! `u = t / T` this gives
//!
//! `dc_m/du = (i T / hbar)(E_s - E_m) c_m - sum_k <l_m|d r_k/du> c_k`
//!
//! so only level differences `E_s - E_m = -+2 eps` enter and nothing grows
//! with the absolute decay rates. `c_s` is then the geometric factor.

use crate::error::{Error, Result};
use crate::geometry::{GammaFrame, LoopSpec};
use crate::holonomy::{canonical_frame, Branch, DEFAULT_DEGENERACY_TOL};
use crate::spectral::{
    build_hamiltonian, eigendecompose, pair, BiorthogonalFrame, CVec2, ParameterPoint, State,
};
use num_complex::Complex64;

/// Step in `u` for the central difference of the frames.
const FRAME_DU: f64 = 1e-5;
/// Largest tolerated frame rotation per integrator step.
const MAX_STEP_ROTATION: f64 = 0.1;
/// Leakage above which a run is not considered adiabatic.
pub const LEAKAGE_THRESHOLD: f64 = 0.05;
/// Longest period accepted by the fixed-frame cross-check.
pub const FIXED_FRAME_MAX_PERIOD: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DriveSchedule {
    pub path: LoopSpec,
    pub period: f64,
    pub hbar: f64,
    pub steps: usize,
}

impl DriveSchedule {
    pub fn new(path: LoopSpec, period: f64, steps: usize) -> DriveSchedule {
        DriveSchedule { path, period, hbar: 1.0, steps }
    }

    pub fn validate(&self) -> Result<()> {
        self.path.validate()?;
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(Error::InvalidArgument(format!("period {} must be positive", self.period)));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!("hbar {} must be positive", self.hbar)));
        }
        if self.steps < 1000 {
            return Err(Error::InvalidArgument(format!("steps = {} below the minimum of 1000", self.steps)));
        }
        Ok(())
    }

    fn point(&self, u: f64) -> ParameterPoint {
        self.path.point(u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub state: State,
    /// Co-moving amplitudes `(c_1, c_2)` at `u = k / steps`, `k = 0..=steps`.
    pub amplitude_trajectory: Vec<[Complex64; 2]>,
    pub extracted_gamma: Complex64,
    pub adiabaticity_max: f64,
    /// Final `|c_m| / |c_s|`.
    pub leakage: f64,
}

impl EvolutionResult {
    pub fn is_adiabatic(&self) -> bool {
        self.leakage < LEAKAGE_THRESHOLD
    }
}

/// Frames along the drive in the smooth gauge, with the connection matrix.
struct Transport<'a> {
    schedule: &'a DriveSchedule,
    axis: GammaFrame,
}

struct Sample {
    frame: BiorthogonalFrame,
    branch: Branch,
    /// `m[a][b] = <l_a| d r_b / du>`.
    m: [[Complex64; 2]; 2],
}

impl Transport<'_> {
    fn frame(&self, u: f64, seed: Option<&Branch>) -> Result<(BiorthogonalFrame, Branch)> {
        // only level differences enter, so the common offset is left out and
        // cannot leak into the frames through rounding
        let p = ParameterPoint { e_offset: Complex64::new(0.0, 0.0), ..self.schedule.point(u) };
        let (f, b, _) = canonical_frame(&p, &self.axis, seed, DEFAULT_DEGENERACY_TOL)?;
        Ok((f, b))
    }

    fn sample(&self, u: f64, seed: Option<&Branch>) -> Result<Sample> {
        let (frame, branch) = self.frame(u, seed)?;
        let (plus, _) = self.frame(u + FRAME_DU, Some(&branch))?;
        let (minus, _) = self.frame(u - FRAME_DU, Some(&branch))?;
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for a in State::BOTH {
            for b in State::BOTH {
                let rp = plus.right(b)?;
                let rm = minus.right(b)?;
                let d: CVec2 = [(rp[0] - rm[0]) / (2.0 * FRAME_DU), (rp[1] - rm[1]) / (2.0 * FRAME_DU)];
                m[a.slot()][b.slot()] = pair(frame.left(a)?, d);
            }
        }
        Ok(Sample { frame, branch, m })
    }
}

fn rhs(c: [Complex64; 2], s: &Sample, state: State, scale: f64) -> [Complex64; 2] {
    let es = s.frame.eigenvalue(state);
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for m in State::BOTH {
        let gap = es - s.frame.eigenvalue(m);
        let k = m.slot();
        out[k] = Complex64::i() * scale * gap * c[k] - (s.m[k][0] * c[0] + s.m[k][1] * c[1]);
    }
    out
}

fn axpy(c: [Complex64; 2], h: f64, d: [Complex64; 2]) -> [Complex64; 2] {
    [c[0] + h * d[0], c[1] + h * d[1]]
}

fn max_entry(m: &[[Complex64; 2]; 2]) -> f64 {
    m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `-i` times the per-step unwrapped log of `c_s(u) / c_s(0)`.
fn unwrapped_phase(traj: &[[Complex64; 2]], state: State) -> Complex64 {
    let k = state.slot();
    let mut acc = Complex64::new(0.0, 0.0);
    for w in traj.windows(2) {
        // difference of logs avoids overflow in the quotient of large amplitudes
        let mut d = w[1][k].ln() - w[0][k].ln();
        d.im -= std::f64::consts::TAU * (d.im / std::f64::consts::TAU).round();
        acc += d;
    }
    -Complex64::i() * acc
}

pub fn propagate(schedule: &DriveSchedule, initial_state: State) -> Result<EvolutionResult> {
    schedule.validate()?;
    let tr = Transport { schedule, axis: GammaFrame::new(schedule.path.gamma) };
    let scale = schedule.period / schedule.hbar;
    let h = 1.0 / schedule.steps as f64;
    let mut c = [Complex64::new(0.0, 0.0); 2];
    c[initial_state.slot()] = Complex64::new(1.0, 0.0);
    let mut traj = Vec::with_capacity(schedule.steps + 1);
    traj.push(c);
    let mut cur = tr.sample(0.0, None)?;
    let mut adiabatic_max = 0.0f64;
    for k in 0..schedule.steps {
        let u = k as f64 * h;
        let mid = tr.sample(u + 0.5 * h, Some(&cur.branch))?;
        let next = tr.sample(u + h, Some(&mid.branch))?;
        let rot = h * max_entry(&cur.m).max(max_entry(&mid.m));
        if rot > MAX_STEP_ROTATION {
            return Err(Error::Refine(format!(
                "frame turns by {rot:.3} per step near u = {u:.4}; increase steps"
            )));
        }
        adiabatic_max = adiabatic_max.max(coupling_ratio(&cur, schedule));
        let k1 = rhs(c, &cur, initial_state, scale);
        let k2 = rhs(axpy(c, 0.5 * h, k1), &mid, initial_state, scale);
        let k3 = rhs(axpy(c, 0.5 * h, k2), &mid, initial_state, scale);
        let k4 = rhs(axpy(c, h, k3), &next, initial_state, scale);
        for j in 0..2 {
            c[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if !(c[0].is_finite() && c[1].is_finite()) {
            return Err(Error::Refine(format!("amplitudes overflowed near u = {u:.4}")));
        }
        traj.push(c);
        cur = next;
    }
    let s = initial_state.slot();
    let leakage = c[1 - s].norm() / c[s].norm();
    Ok(EvolutionResult {
        state: initial_state,
        extracted_gamma: unwrapped_phase(&traj, initial_state),
        amplitude_trajectory: traj,
        adiabaticity_max: adiabatic_max,
        leakage,
    })
}

/// `sqrt|<l_1|dr_2/dt><l_2|dr_1/dt>| hbar / |E_2 - E_1|`, the gauge-invariant
/// size of the non-adiabatic coupling relative to the level spacing.
fn coupling_ratio(s: &Sample, schedule: &DriveSchedule) -> f64 {
    let gap = 2.0 * s.frame.epsilon.norm();
    (s.m[0][1] * s.m[1][0]).norm().sqrt() * schedule.hbar / (schedule.period * gap)
}

pub fn extract_geometric_phase(result: &EvolutionResult) -> Result<Complex64> {
    if !(result.leakage < LEAKAGE_THRESHOLD) {
        return Err(Error::AdiabaticityViolation { leakage: result.leakage, threshold: LEAKAGE_THRESHOLD });
    }
    Ok(unwrapped_phase(&result.amplitude_trajectory, result.state))
}

/// Largest ratio of non-adiabatic coupling to level spacing along the drive,
/// evaluated from `<l_s|dr_m/dt> = <l_s|dH/dt|r_m> / (E_m - E_s)`.
pub fn adiabaticity_metric(schedule: &DriveSchedule) -> Result<f64> {
    schedule.validate()?;
    let n = schedule.steps.max(4096);
    let mut prev: Option<Complex64> = None;
    let mut worst = 0.0f64;
    let i = Complex64::i();
    for k in 0..n {
        let u = k as f64 / n as f64;
        let (r, dr) = schedule.path.eval(u);
        let p = ParameterPoint { r, ..schedule.point(u) };
        let f = eigendecompose(&build_hamiltonian(&p)?, &p, prev, DEFAULT_DEGENERACY_TOL)?;
        prev = Some(f.epsilon);
        // dH/dt = (dR/du / T) . sigma
        let d = dr.map(|x| x / schedule.period);
        let hdot = |v: CVec2| -> CVec2 {
            [d[2] * v[0] + (d[0] - i * d[1]) * v[1], (d[0] + i * d[1]) * v[0] - d[2] * v[1]]
        };
        let a = pair(f.left(State::One)?, hdot(f.right(State::Two)?));
        let b = pair(f.left(State::Two)?, hdot(f.right(State::One)?));
        let gap = (2.0 * f.epsilon).norm();
        worst = worst.max((a * b).norm().sqrt() * schedule.hbar / (gap * gap));
    }
    Ok(worst)
}

/// Short-period cross-check: integrates `i hbar dpsi/dt = H psi` in the fixed
/// basis and returns the co-moving amplitudes `(c_1, c_2)` at `t = T`.
pub fn propagate_fixed_frame(schedule: &DriveSchedule, initial_state: State) -> Result<[Complex64; 2]> {
    schedule.validate()?;
    if schedule.period > FIXED_FRAME_MAX_PERIOD {
        return Err(Error::InvalidArgument(format!(
            "fixed-frame integration is limited to T <= {FIXED_FRAME_MAX_PERIOD}"
        )));
    }
    let tr = Transport { schedule, axis: GammaFrame::new(schedule.path.gamma) };
    let scale = schedule.period / schedule.hbar;
    let h = 1.0 / schedule.steps as f64;
    let (f0, mut branch) = tr.frame(0.0, None)?;
    let mut psi = f0.right(initial_state)?;
    let i = Complex64::i();
    let ham = |u: f64| build_hamiltonian(&schedule.point(u));
    let deriv = |hm: &crate::spectral::TwoLevelOperator, v: CVec2| -> CVec2 {
        hm.apply(v).map(|z| -i * scale * z)
    };
    // dynamical phase (i/hbar) \int E_s dt by Simpson on the integrator grid
    let mut dyn_phase = Complex64::new(0.0, 0.0);
    let mut e_cur = f0.eigenvalue(initial_state);
    for k in 0..schedule.steps {
        let u = k as f64 * h;
        let (hm0, hm1, hm2) = (ham(u)?, ham(u + 0.5 * h)?, ham(u + h)?);
        let k1 = deriv(&hm0, psi);
        let k2 = deriv(&hm1, [psi[0] + 0.5 * h * k1[0], psi[1] + 0.5 * h * k1[1]]);
        let k3 = deriv(&hm1, [psi[0] + 0.5 * h * k2[0], psi[1] + 0.5 * h * k2[1]]);
        let k4 = deriv(&hm2, [psi[0] + h * k3[0], psi[1] + h * k3[1]]);
        for j in 0..2 {
            psi[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let (fm, bm) = tr.frame(u + 0.5 * h, Some(&branch))?;
        let (f1, b1) = tr.frame(u + h, Some(&bm))?;
        let e_mid = fm.eigenvalue(initial_state);
        let e_next = f1.eigenvalue(initial_state);
        dyn_phase += i * scale * h / 6.0 * (e_cur + 4.0 * e_mid + e_next);
        e_cur = e_next;
        branch = b1;
    }
    let (f_end, _) = tr.frame(1.0, Some(&branch))?;
    // the frames carry no energy offset; add its constant contribution
    dyn_phase += i * scale * schedule.path.e_offset;
    let g = dyn_phase.exp();
    Ok([pair(f_end.left(State::One)?, psi) * g, pair(f_end.left(State::Two)?, psi) * g])
}
