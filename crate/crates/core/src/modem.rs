//! Gray-mapped QPSK modulation, hard symbol decisions, and the
//! character-to-symbol correspondence used by semantic-pilot selection.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::Range;

use num_complex::Complex64;

/// QPSK carries 2 bits per symbol, so a 6-bit character spans 3 symbols.
pub const SYMBOLS_PER_CHAR: usize = 3;

/// An ordered vector of complex baseband symbols.
pub type SymbolVector = Vec<Complex64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModemError {
    /// QPSK needs an even number of bits.
    OddBitCount { len: usize },
    /// Character index outside the symbol vector.
    IndexOutOfRange { index: usize, chars: usize },
}

impl fmt::Display for ModemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModemError::OddBitCount { len } => {
                write!(f, "bit count {len} is odd; QPSK maps bit pairs")
            }
            ModemError::IndexOutOfRange { index, chars } => {
                write!(f, "character index {index} out of range for {chars} characters")
            }
        }
    }
}

impl std::error::Error for ModemError {}

/// Constellation point for a bit pair: `(b0, b1) -> ((1-2*b0) + j(1-2*b1))/sqrt(2)`.
///
/// Gray mapping: each bit independently selects the sign of one axis, so
/// adjacent decision regions differ in a single bit.
#[inline]
pub fn qpsk_point(b0: bool, b1: bool) -> Complex64 {
    let re = if b0 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    let im = if b1 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    Complex64::new(re, im)
}

/// Maps bit pairs onto unit-energy QPSK symbols.
pub fn qpsk_modulate(bits: &[bool]) -> Result<SymbolVector, ModemError> {
    if bits.len() % 2 != 0 {
        return Err(ModemError::OddBitCount { len: bits.len() });
    }
    Ok(bits.chunks_exact(2).map(|p| qpsk_point(p[0], p[1])).collect())
}

/// Per-symbol minimum-distance decision, equivalent to sign tests on the real
/// and imaginary parts. Returns the decided bits and the decided
/// constellation points. Boundary samples (a part exactly zero) take the
/// positive sign.
pub fn qpsk_decide(received: &[Complex64]) -> (Vec<bool>, SymbolVector) {
    let mut bits = Vec::with_capacity(received.len() * 2);
    let mut decided = Vec::with_capacity(received.len());
    for z in received {
        let b0 = z.re < 0.0;
        let b1 = z.im < 0.0;
        bits.push(b0);
        bits.push(b1);
        decided.push(qpsk_point(b0, b1));
    }
    (bits, decided)
}

/// Symbol index range carrying character `i`.
#[inline]
pub fn char_span(char_index: usize) -> Range<usize> {
    char_index * SYMBOLS_PER_CHAR..(char_index + 1) * SYMBOLS_PER_CHAR
}

/// The three symbols carrying character `i` of a `3 * L`-symbol payload.
pub fn char_symbols(char_index: usize, symbols: &[Complex64]) -> Result<&[Complex64], ModemError> {
    let span = char_span(char_index);
    if span.end > symbols.len() {
        return Err(ModemError::IndexOutOfRange {
            index: char_index,
            chars: symbols.len() / SYMBOLS_PER_CHAR,
        });
    }
    Ok(&symbols[span])
}
