//! Spectral toolbox for the vibrating plate equation ∂²_t u + Δ²_x u = F(u)
//! on the periodized torus: discrete Fourier transforms with the
//! e^{−2πi y·ξ} normalization, the short-time Fourier transform, modulation
//! and Wiener-amalgam mixed norms, Fourier-multiplier propagators, a Picard
//! fixed-point solver for the nonlinear Cauchy problem, and an experiment
//! harness that measures boundedness, growth, dilation-scaling and chirp
//! unboundedness behaviour on the grid.

pub mod error;
pub mod experiments;
pub mod gabor;
pub mod io;
pub mod lattice;
pub mod mixed_norms;
pub mod multipliers;
pub mod numerics;
pub mod plate_solver;

pub use error::{PlateError, Result};
pub use gabor::{stft, StftMatrix, Window};
pub use lattice::{
    bracket_weight, forward_transform, inverse_transform, Field, Lattice,
};
pub use mixed_norms::{
    modulation_norm, mu_exponents, wiener_norm, Exponent, IndexPoint, MixedNormSpec, NormOrder,
};
pub use multipliers::{apply_multiplier, dilate, symbol_wiener_norm, Symbol};
pub use plate_solver::{
    check_power_law_admissible, duhamel, energy, picard_solve, propagate_linear,
    time_derivative_linear, ConvergenceMetric, Nonlinearity, SolverConfig, Trajectory,
};
