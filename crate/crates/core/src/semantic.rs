//! Text correction and semantic-pilot selection.
//!
//! A corrector rewrites the initially decoded text under a substitutions-only,
//! length-preserving contract; characters the correction leaves unchanged are
//! treated as reliably decoded and their symbols become additional pilots.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::modem::{char_span, SYMBOLS_PER_CHAR};
use crate::textcodec::{Alphabet, TextSequence};

/// Placeholder for characters a corrector could not recover.
pub const MASK_CHAR: char = 'X';

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemanticError {
    LengthMismatch { expected: usize, actual: usize },
    /// Pilot indices must be strictly increasing and in range.
    BadIndices { reason: String },
}

impl fmt::Display for SemanticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemanticError::LengthMismatch { expected, actual } => {
                write!(f, "length mismatch: expected {expected}, got {actual}")
            }
            SemanticError::BadIndices { reason } => write!(f, "bad pilot indices: {reason}"),
        }
    }
}

impl std::error::Error for SemanticError {}

/// Why a correction could not be produced.
#[derive(Debug)]
pub enum CorrectionError {
    LengthMismatch { expected: usize, actual: usize },
    /// The corrector backend is unreachable or misbehaving.
    Unavailable(String),
}

impl fmt::Display for CorrectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrectionError::LengthMismatch { expected, actual } => {
                write!(f, "corrector input length {actual} does not match expected {expected}")
            }
            CorrectionError::Unavailable(reason) => write!(f, "corrector unavailable: {reason}"),
        }
    }
}

impl std::error::Error for CorrectionError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectorSource {
    Oracle,
    Identity,
    Stochastic,
    Remote,
}

impl fmt::Display for CorrectorSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CorrectorSource::Oracle => "oracle",
            CorrectorSource::Identity => "identity",
            CorrectorSource::Stochastic => "stochastic",
            CorrectorSource::Remote => "remote",
        };
        f.write_str(s)
    }
}

/// A corrected text sequence, always of the requested length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectionResult {
    pub corrected: TextSequence,
    /// Set when the raw corrector output had to be padded, truncated, or
    /// stripped of out-of-alphabet characters.
    pub length_repaired: bool,
    pub source: CorrectorSource,
}

/// A text corrector. Implementations may hold state (RNG, caches); the
/// harness gives each trial its own handle.
pub trait Corrector: Send {
    fn correct(&mut self, decoded: &TextSequence) -> Result<CorrectionResult, CorrectionError>;
}

/// Enforces the length-preserving contract on raw corrector output: equal
/// length passes through, longer output is truncated, shorter output is
/// padded with the mask character, and out-of-alphabet characters become the
/// mask character. The flag reports whether anything had to change.
pub fn normalize_correction(
    alphabet: &Alphabet,
    raw: &str,
    target_len: usize,
) -> (TextSequence, bool) {
    let mut repaired = false;
    let mut chars: Vec<char> = Vec::with_capacity(target_len);
    for c in raw.chars().take(target_len) {
        if alphabet.contains(c) {
            chars.push(c);
        } else {
            chars.push(MASK_CHAR);
            repaired = true;
        }
    }
    if raw.chars().count() != target_len {
        repaired = true;
        while chars.len() < target_len {
            chars.push(MASK_CHAR);
        }
    }
    (TextSequence::from_chars(chars), repaired)
}

/// The selected semantic pilot: text-symbol positions judged reliable, with
/// the decided constellation points at those positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticPilot {
    indices: Vec<usize>,
    symbols: Vec<Complex64>,
}

impl SemanticPilot {
    pub fn new(indices: Vec<usize>, symbols: Vec<Complex64>) -> Result<Self, SemanticError> {
        if indices.len() != symbols.len() {
            return Err(SemanticError::LengthMismatch {
                expected: indices.len(),
                actual: symbols.len(),
            });
        }
        if !indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(SemanticError::BadIndices {
                reason: "indices must be strictly increasing".into(),
            });
        }
        Ok(SemanticPilot { indices, symbols })
    }

    pub fn empty() -> Self {
        SemanticPilot { indices: Vec::new(), symbols: Vec::new() }
    }

    /// A pilot spanning an entire payload, as used by fully data-aided
    /// refinement.
    pub fn full(symbols: &[Complex64]) -> Self {
        SemanticPilot { indices: (0..symbols.len()).collect(), symbols: symbols.to_vec() }
    }

    /// Number of selected symbols, `N`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }
}

/// Selects the semantic pilot: every character position where the decoded and
/// corrected texts agree (literal character equality) contributes its three
/// decided symbols. With `exclude_mask_matches` set, positions where both
/// texts hold the mask character are skipped.
pub fn select_semantic_pilot(
    decoded: &TextSequence,
    corrected: &TextSequence,
    decided_symbols: &[Complex64],
    exclude_mask_matches: bool,
) -> Result<SemanticPilot, SemanticError> {
    if corrected.len() != decoded.len() {
        return Err(SemanticError::LengthMismatch {
            expected: decoded.len(),
            actual: corrected.len(),
        });
    }
    if decided_symbols.len() != decoded.len() * SYMBOLS_PER_CHAR {
        return Err(SemanticError::LengthMismatch {
            expected: decoded.len() * SYMBOLS_PER_CHAR,
            actual: decided_symbols.len(),
        });
    }
    let mut indices = Vec::new();
    let mut symbols = Vec::new();
    for i in 0..decoded.len() {
        let d = decoded.char_at(i);
        if d != corrected.char_at(i) {
            continue;
        }
        if exclude_mask_matches && d == MASK_CHAR {
            continue;
        }
        for k in char_span(i) {
            indices.push(k);
            symbols.push(decided_symbols[k]);
        }
    }
    Ok(SemanticPilot { indices, symbols })
}

/// Returns the true text regardless of input; the upper-bound stand-in for a
/// perfect corrector.
pub struct OracleCorrector {
    truth: TextSequence,
}

impl OracleCorrector {
    pub fn new(truth: TextSequence) -> Self {
        OracleCorrector { truth }
    }
}

impl Corrector for OracleCorrector {
    fn correct(&mut self, decoded: &TextSequence) -> Result<CorrectionResult, CorrectionError> {
        if decoded.len() != self.truth.len() {
            return Err(CorrectionError::LengthMismatch {
                expected: self.truth.len(),
                actual: decoded.len(),
            });
        }
        Ok(CorrectionResult {
            corrected: self.truth.clone(),
            length_repaired: false,
            source: CorrectorSource::Oracle,
        })
    }
}

/// Returns the input unchanged.
pub struct IdentityCorrector;

impl Corrector for IdentityCorrector {
    fn correct(&mut self, decoded: &TextSequence) -> Result<CorrectionResult, CorrectionError> {
        Ok(CorrectionResult {
            corrected: decoded.clone(),
            length_repaired: false,
            source: CorrectorSource::Identity,
        })
    }
}

/// Per-character behavior of the imperfect corrector model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StochasticParams {
    /// Probability an erroneous character is restored to the true one.
    pub p_fix: f64,
    /// Probability an erroneous character is replaced by the mask character.
    pub p_mask: f64,
    /// Probability of introducing a wrong character (on erroneous characters)
    /// or corrupting a correct one.
    pub p_miscorrect: f64,
    /// Probability that a mask event expands to cover the whole contiguous
    /// run of erroneous characters around it.
    pub p_mask_run: f64,
}

impl Default for StochasticParams {
    fn default() -> Self {
        StochasticParams { p_fix: 0.9, p_mask: 0.07, p_miscorrect: 0.01, p_mask_run: 1.0 }
    }
}

impl StochasticParams {
    pub fn validate(&self) -> Result<(), String> {
        for (name, p) in [
            ("p_fix", self.p_fix),
            ("p_mask", self.p_mask),
            ("p_miscorrect", self.p_miscorrect),
            ("p_mask_run", self.p_mask_run),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{name} = {p} is outside [0, 1]"));
            }
        }
        if self.p_fix + self.p_mask + self.p_miscorrect > 1.0 {
            return Err("p_fix + p_mask + p_miscorrect exceeds 1".into());
        }
        Ok(())
    }
}

/// Models an imperfect corrector. Erroneous characters are fixed with
/// probability `p_fix`, masked with `p_mask`, replaced by a random wrong
/// character with `p_miscorrect`, and otherwise left unchanged; correct
/// characters are corrupted with probability `p_miscorrect`. Mask events then
/// expand to whole contiguous error runs with probability `p_mask_run`.
pub struct StochasticCorrector<R: Rng + Send> {
    truth: TextSequence,
    params: StochasticParams,
    alphabet: Alphabet,
    rng: R,
}

impl<R: Rng + Send> StochasticCorrector<R> {
    pub fn new(truth: TextSequence, params: StochasticParams, alphabet: Alphabet, rng: R) -> Self {
        StochasticCorrector { truth, params, alphabet, rng }
    }

    /// Uniform draw over the alphabet excluding one character.
    fn random_other_char(&mut self, excluded: char) -> char {
        let excluded_idx = self
            .alphabet
            .index_of(excluded)
            .expect("excluded character is in the alphabet") as usize;
        let mut idx = self.rng.gen_range(0..self.alphabet.chars().len() - 1);
        if idx >= excluded_idx {
            idx += 1;
        }
        self.alphabet.char_at(idx as u8)
    }
}

impl<R: Rng + Send> Corrector for StochasticCorrector<R> {
    fn correct(&mut self, decoded: &TextSequence) -> Result<CorrectionResult, CorrectionError> {
        if decoded.len() != self.truth.len() {
            return Err(CorrectionError::LengthMismatch {
                expected: self.truth.len(),
                actual: decoded.len(),
            });
        }
        let len = decoded.len();
        let mut out: Vec<char> = Vec::with_capacity(len);
        let mut masked = vec![false; len];
        let mut erroneous = vec![false; len];
        for i in 0..len {
            let truth = self.truth.char_at(i);
            let got = decoded.char_at(i);
            if got == truth {
                let r: f64 = self.rng.gen();
                if r < self.params.p_miscorrect {
                    let c = self.random_other_char(truth);
                    out.push(c);
                } else {
                    out.push(got);
                }
            } else {
                erroneous[i] = true;
                let r: f64 = self.rng.gen();
                if r < self.params.p_fix {
                    out.push(truth);
                } else if r < self.params.p_fix + self.params.p_mask {
                    out.push(MASK_CHAR);
                    masked[i] = true;
                } else if r < self.params.p_fix + self.params.p_mask + self.params.p_miscorrect {
                    let c = self.random_other_char(truth);
                    out.push(c);
                } else {
                    out.push(got);
                }
            }
        }
        // Expand mask events over whole contiguous error runs.
        let mut i = 0;
        while i < len {
            if !erroneous[i] {
                i += 1;
                continue;
            }
            let start = i;
            while i < len && erroneous[i] {
                i += 1;
            }
            if masked[start..i].iter().any(|&m| m) {
                let expand: f64 = self.rng.gen();
                if expand < self.params.p_mask_run {
                    for c in &mut out[start..i] {
                        *c = MASK_CHAR;
                    }
                }
            }
        }
        Ok(CorrectionResult {
            corrected: TextSequence::from_chars(out),
            length_repaired: false,
            source: CorrectorSource::Stochastic,
        })
    }
}
