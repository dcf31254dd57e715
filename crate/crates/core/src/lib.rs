//! Pseudospectral simulation and exact solutions for collisions of nearly
//! parallel vortex filament pairs with opposite circulations.
//!
//! * [`grid`]: periodic grid, discrete Fourier transform, free Schrödinger
//!   propagator and Fourier multipliers.
//! * [`dynamics`]: Lie and Strang splitting for the filament pair and for its
//!   symmetric reduction.
//! * [`exact`]: closed-form Gaussian evolution, the mild collision solution
//!   and constructed initial data.
//! * [`selfsimilar`]: Picard iteration for the self-similar collision profile.
//! * [`diagnostics`]: collision detection, conservation and order estimates.

pub mod diagnostics;
pub mod dynamics;
pub mod exact;
pub mod grid;
pub mod quadrature;
pub mod selfsimilar;

pub use dynamics::{FilamentPair, Scheme, SplittingConfig, Termination, Trajectory};
pub use grid::{ComplexField, PeriodicGrid, Spectrum};
pub use num_complex::Complex64;
