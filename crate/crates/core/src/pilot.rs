//! Zadoff-Chu pilot sequence generation.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::modem::SymbolVector;

/// Pilot sequence parameters: length `M` and root `u`, with `gcd(u, M) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PilotConfig {
    pub length: usize,
    pub root: usize,
}

impl Default for PilotConfig {
    fn default() -> Self {
        PilotConfig { length: 16, root: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PilotError {
    /// The root must be coprime with the length.
    RootNotCoprime { root: usize, length: usize },
    ZeroLength,
}

impl fmt::Display for PilotError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PilotError::RootNotCoprime { root, length } => {
                write!(f, "Zadoff-Chu root {root} is not coprime with length {length}")
            }
            PilotError::ZeroLength => write!(f, "pilot length must be at least 1"),
        }
    }
}

impl std::error::Error for PilotError {}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// Generates the Zadoff-Chu sequence
/// `x[n] = exp(-j*pi*u*n^2/M)` for even `M`,
/// `x[n] = exp(-j*pi*u*n*(n+1)/M)` for odd `M`, with `n = 0..M-1`.
///
/// Every sample has unit modulus, so the sequence energy is exactly `M`, and
/// the cyclic autocorrelation vanishes at every nonzero lag.
pub fn zadoff_chu(cfg: &PilotConfig) -> Result<SymbolVector, PilotError> {
    if cfg.length == 0 {
        return Err(PilotError::ZeroLength);
    }
    if gcd(cfg.root, cfg.length) != 1 {
        return Err(PilotError::RootNotCoprime { root: cfg.root, length: cfg.length });
    }
    let m = cfg.length as f64;
    let u = cfg.root as f64;
    let seq = (0..cfg.length)
        .map(|n| {
            let n = n as f64;
            let quad = if cfg.length % 2 == 0 { n * n } else { n * (n + 1.0) };
            let phase = -PI * u * quad / m;
            Complex64::from_polar(1.0, phase)
        })
        .collect();
    Ok(seq)
}
