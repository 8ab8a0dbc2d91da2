//! Complex geometric phases of two interfering resonances.

pub mod error;
pub mod geometry;
pub mod dynamics;
pub mod holonomy;
pub mod spectral;
pub mod vec3;

pub use error::{Error, ErrorCategory, Result};
pub use num_complex::Complex64;
pub use spectral::{
    build_hamiltonian, connection_identity_residual, eigendecompose, epsilon_at, BiorthogonalFrame,
    Defect, ParameterPoint, State, TwoLevelOperator,
};
pub use geometry::{
    classify_path, degeneracy_residual, diabolical_circle, linking_number, sample_loop,
    winding_number, ClassLabel, LoopShape, LoopSpec, PathClass, SampledLoop,
};
pub use holonomy::{
    berry_phase_discrete, berry_phase_line_quadrature, berry_phase_spherical, chern_sum_surface,
    chern_trace_plaquette, delta_gamma_path, Method, PhaseResult, SphereMesh,
};
pub use dynamics::{
    adiabaticity_metric, extract_geometric_phase, propagate, DriveSchedule, EvolutionResult,
};
