//! Spectral interference of two close harmonics in the Gaussian STFT and the
//! (generalized) synchrosqueezing transform.
//!
//! All formulas use the modified STFT convention
//! `V(t,η) = ∫ f(x) h(x−t) e^{−2πiη(x−t)} dx` with the Gaussian window
//! `h(x) = e^{−x²/σ²}/(σ√π)` and `C = π²σ²`.

// Negated comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gabor;
pub mod model;
pub mod oracle;
pub mod phasefield;
pub mod quad;
pub mod reassign;
pub mod ridges;
pub mod squeeze;
pub mod validate;

pub use error::{Error, Result};

/// Library version, echoed into exported metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use model::{GaussianWindow, TfGrid, TwoHarmonicModel};
