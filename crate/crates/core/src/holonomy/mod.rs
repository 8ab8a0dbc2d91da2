//! Complex geometric phases by discrete holonomy, line quadrature, and
//! surface (curvature) integrals.

mod gauge;
mod line;
pub mod quadrature;
mod surface;
mod wilson;

pub use gauge::Branch;
pub(crate) use gauge::canonical_frame;
pub use line::{
    berry_phase_line_quadrature, berry_phase_spherical, delta_gamma_path,
};
pub use surface::{
    chern_sum_surface, chern_trace_plaquette, stokes_cap_phase, Cap, ChernPlaquette, SphereMesh,
};
pub use wilson::{
    berry_phase_discrete, berry_phase_discrete_with, holonomy_factor, loop_frames, wilson_phase,
    LoopFrames,
};

use crate::spectral::State;
use num_complex::Complex64;

/// Default relative tolerance for eigenframe degeneracy tests.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;
/// Default agreement tolerance between successive quadrature halvings.
pub const DEFAULT_QUAD_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    DiscreteWilson,
    LineQuadrature,
    SphericalQuadrature,
    SurfaceIntegral,
    DeltaGammaPath,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::DiscreteWilson => "discrete",
            Method::LineQuadrature => "line",
            Method::SphericalQuadrature => "spherical",
            Method::SurfaceIntegral => "surface",
            Method::DeltaGammaPath => "delta_gamma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeKind {
    /// The smooth analytic gauge; real parts match the closed-form integrals.
    Canonical,
    /// Stepwise phase alignment, used when the path meets the Gamma axis.
    Transported,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub branch_flips: usize,
    pub min_eps_abs: f64,
    /// Distance between the start frame and the continued end frame of the
    /// followed state (relative); 2-ish when the two states are exchanged.
    pub closure_defect: f64,
    /// The continued eps returns as `-eps`: the loop braids the eigenvalues.
    pub states_exchanged: bool,
    pub gauge: GaugeKind,
    pub notice: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResult {
    pub gamma: Complex64,
    pub state: State,
    pub method: Method,
    /// Samples for the discrete method, panels for quadratures.
    pub n: usize,
    pub diagnostics: Diagnostics,
}

impl PhaseResult {
    /// `exp(i gamma)`, the gauge-invariant holonomy factor.
    pub fn factor(&self) -> Complex64 {
        (Complex64::i() * self.gamma).exp()
    }
}
