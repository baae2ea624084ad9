//! Fibonacci discrete-time quantum walks on a periodic line.
//!
//! Two walks are provided next to the standard Hadamard-type walk:
//!
//! * [`WalkModel::FibCoin`]: the coin follows the matrix recursion
//!   `C_{j+1} = C_j C_{j-1}`, which cycles with period six.
//! * [`WalkModel::FibStep`]: step operators follow `U_j = U_{j-1} U_{j-2}`,
//!   run through its six-translation periodic extension.
//!
//! Both reduce, every six steps, to a 13-site stencil ([`stencil`]) whose
//! first moments give a massless Dirac transport equation ([`continuum`]).
//! [`observables`] measures how closely simulated walks follow it.

pub mod coins;
pub mod continuum;
pub mod engine;
pub mod error;
pub mod observables;
pub mod stencil;
pub mod types;

pub use coins::{
    closed_form_coin, fib_coin_sequence, fib_step_coin_word, fibonacci_clock, CoinWord,
    FibonacciClock,
};
pub use continuum::{
    analytic_velocity, covariant_check, diagonalizing_basis, dirac_reference,
    transport_coefficients, BasisKind, ContinuumParams, CovariantReport, DiagonalBasis,
};
pub use engine::{run, run_stroboscopic, step, InitialCondition, Snapshot, WalkRun};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use observables::{
    density, front_velocity, moments, moments_about, spreading_exponent, ExponentFit, Moments,
    SpreadEntry, SpreadSeries,
};
pub use stencil::{
    apply_stencil, closed_form_coefficients, oracle_coefficients, FullStencil, StencilCoefficients,
};
pub use types::{
    apply_coin, apply_translation, coin_multiply, make_hadamard_coin, AnglePair, CoinMatrix,
    FibModel, SpinorField, WalkModel,
};
