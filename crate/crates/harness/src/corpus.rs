//! Corpus ingestion: normalization to the transmission alphabet and seeded
//! window sampling.

use std::fmt;
use std::path::Path;

use anyhow::{Context, Result};
use rand::Rng;

use sempilot_core::textcodec::{Alphabet, TextSequence};

/// Text bundled with the binary so runs work without an external corpus.
pub const SAMPLE_CORPUS: &str = include_str!("../data/sample_corpus.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusError {
    /// The normalized corpus is shorter than one window.
    EmptyCorpus { corpus_len: usize, window_len: usize },
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::EmptyCorpus { corpus_len, window_len } => write!(
                f,
                "corpus holds {corpus_len} characters, fewer than the window length {window_len}"
            ),
        }
    }
}

impl std::error::Error for CorpusError {}

/// A corpus normalized to the alphabet. Out-of-alphabet characters become
/// spaces; the substitution count is kept for reporting.
#[derive(Debug, Clone)]
pub struct Corpus {
    chars: Vec<char>,
    substitutions: usize,
}

impl Corpus {
    pub fn from_text(alphabet: &Alphabet, text: &str) -> Corpus {
        let mut substitutions = 0;
        let chars = text
            .chars()
            .map(|c| {
                if alphabet.contains(c) {
                    c
                } else {
                    substitutions += 1;
                    ' '
                }
            })
            .collect();
        Corpus { chars, substitutions }
    }

    pub fn load(alphabet: &Alphabet, path: &Path) -> Result<Corpus> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading corpus file {}", path.display()))?;
        Ok(Corpus::from_text(alphabet, &text))
    }

    pub fn builtin_sample(alphabet: &Alphabet) -> Corpus {
        Corpus::from_text(alphabet, SAMPLE_CORPUS)
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    /// Characters replaced with spaces during normalization.
    pub fn substitutions(&self) -> usize {
        self.substitutions
    }

    /// A length-`len` window starting at a uniformly drawn offset.
    pub fn sample_window(
        &self,
        len: usize,
        rng: &mut impl Rng,
    ) -> Result<TextSequence, CorpusError> {
        if self.chars.len() < len || len == 0 {
            return Err(CorpusError::EmptyCorpus {
                corpus_len: self.chars.len(),
                window_len: len,
            });
        }
        let start = rng.gen_range(0..=self.chars.len() - len);
        Ok(TextSequence::from_chars(self.chars[start..start + len].to_vec()))
    }
}
