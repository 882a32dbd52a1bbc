//! Baseband SISO link simulation with semantic-pilot data-aided channel
//! estimation.
//!
//! The library covers the full receive-side pipeline: 6-bit text source
//! coding ([`textcodec`]), QPSK modulation and hard decisions ([`modem`]),
//! Zadoff-Chu pilot generation ([`pilot`]), a flat Rician channel
//! ([`channel`]), least-squares channel estimation with phase refinement and
//! magnitude scaling ([`estimator`]), semantic-pilot selection driven by a
//! pluggable text corrector ([`semantic`]), and the evaluation metrics
//! ([`metrics`]).

pub mod channel;
pub mod estimator;
pub mod metrics;
pub mod modem;
pub mod pilot;
pub mod semantic;
pub mod textcodec;

pub use num_complex::Complex64;
