//! 6-bit fixed-length text source coding over a 64-character alphabet.
//!
//! Every character maps to one 6-bit codeword (MSB first) and every 6-bit
//! codeword maps back to exactly one character, so encoding is a bijection
//! between length-L text and length-6L bit vectors.

use std::collections::HashMap;
use std::fmt;

/// Bits per character codeword.
pub const BITS_PER_CHAR: usize = 6;

/// Number of characters in the transmission alphabet.
pub const ALPHABET_SIZE: usize = 64;

/// A vector of bits; encoded text always has length `6 * L`.
pub type BitVector = Vec<bool>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TextCodecError {
    /// A character at `position` is not part of the alphabet.
    CharOutOfAlphabet { position: usize, ch: char },
    /// Bit vector length is not a multiple of 6.
    BadLength { len: usize },
    /// An alphabet definition did not have exactly 64 distinct characters.
    BadAlphabet { reason: String },
}

impl fmt::Display for TextCodecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TextCodecError::CharOutOfAlphabet { position, ch } => {
                write!(f, "character {ch:?} at position {position} is not in the alphabet")
            }
            TextCodecError::BadLength { len } => {
                write!(f, "bit vector length {len} is not a multiple of {BITS_PER_CHAR}")
            }
            TextCodecError::BadAlphabet { reason } => write!(f, "invalid alphabet: {reason}"),
        }
    }
}

impl std::error::Error for TextCodecError {}

/// The ordered 64-character transmission alphabet and its inverse map.
#[derive(Debug, Clone)]
pub struct Alphabet {
    chars: Vec<char>,
    index: HashMap<char, u8>,
}

/// Default alphabet: `A`-`Z` (0-25), `a`-`z` (26-51), space (52), then
/// `. , ' ? ! - : ; " ( )` (53-63). The corrector mask character `X` sits at
/// index 23 with the other uppercase letters.
const DEFAULT_CHARS: &str =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz .,'?!-:;\"()";

impl Alphabet {
    /// The built-in default alphabet.
    pub fn standard() -> &'static Alphabet {
        use std::sync::OnceLock;
        static STANDARD: OnceLock<Alphabet> = OnceLock::new();
        STANDARD.get_or_init(|| {
            Alphabet::from_chars(DEFAULT_CHARS.chars()).expect("default alphabet is valid")
        })
    }

    /// Builds an alphabet from exactly 64 distinct characters, in code order.
    pub fn from_chars(chars: impl IntoIterator<Item = char>) -> Result<Alphabet, TextCodecError> {
        let chars: Vec<char> = chars.into_iter().collect();
        if chars.len() != ALPHABET_SIZE {
            return Err(TextCodecError::BadAlphabet {
                reason: format!("expected {ALPHABET_SIZE} characters, got {}", chars.len()),
            });
        }
        let mut index = HashMap::with_capacity(ALPHABET_SIZE);
        for (i, &c) in chars.iter().enumerate() {
            if index.insert(c, i as u8).is_some() {
                return Err(TextCodecError::BadAlphabet {
                    reason: format!("duplicate character {c:?}"),
                });
            }
        }
        Ok(Alphabet { chars, index })
    }

    /// Parses an alphabet override: one character per line, exactly 64 lines.
    ///
    /// A line holding more than one character is rejected, except that an
    /// empty line denotes the space character (trailing-whitespace-stripping
    /// editors would otherwise make a literal space line impossible to keep).
    pub fn from_lines(text: &str) -> Result<Alphabet, TextCodecError> {
        let mut chars = Vec::with_capacity(ALPHABET_SIZE);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            let mut it = line.chars();
            let c = match (it.next(), it.next()) {
                (None, _) => ' ',
                (Some(c), None) => c,
                _ => {
                    return Err(TextCodecError::BadAlphabet {
                        reason: format!("line {} holds more than one character", lineno + 1),
                    })
                }
            };
            chars.push(c);
        }
        Alphabet::from_chars(chars)
    }

    /// Code for a character, if it is in the alphabet.
    pub fn index_of(&self, c: char) -> Option<u8> {
        self.index.get(&c).copied()
    }

    /// Character at a 6-bit code. Panics if `code >= 64`.
    pub fn char_at(&self, code: u8) -> char {
        self.chars[code as usize]
    }

    pub fn contains(&self, c: char) -> bool {
        self.index.contains_key(&c)
    }

    /// The characters in code order.
    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    /// Validating constructor for [`TextSequence`].
    pub fn text(&self, s: &str) -> Result<TextSequence, TextCodecError> {
        for (position, ch) in s.chars().enumerate() {
            if !self.contains(ch) {
                return Err(TextCodecError::CharOutOfAlphabet { position, ch });
            }
        }
        Ok(TextSequence::from_str_unchecked(s))
    }
}

/// A length-L character sequence over the transmission alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextSequence {
    chars: Vec<char>,
}

impl TextSequence {
    /// Wraps a string without validating it against an alphabet; use
    /// [`Alphabet::text`] when membership must hold.
    pub fn from_str_unchecked(s: &str) -> TextSequence {
        TextSequence { chars: s.chars().collect() }
    }

    pub fn from_chars(chars: Vec<char>) -> TextSequence {
        TextSequence { chars }
    }

    /// Number of characters, `L`.
    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn char_at(&self, i: usize) -> char {
        self.chars[i]
    }
}

impl fmt::Display for TextSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.chars {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Encodes one 6-bit code, most-significant bit first.
pub fn encode_code(code: u8) -> [bool; BITS_PER_CHAR] {
    let mut bits = [false; BITS_PER_CHAR];
    for (k, bit) in bits.iter_mut().enumerate() {
        *bit = (code >> (BITS_PER_CHAR - 1 - k)) & 1 == 1;
    }
    bits
}

/// Reassembles a 6-bit code from bits in MSB-first order.
pub fn decode_code(bits: &[bool]) -> u8 {
    debug_assert_eq!(bits.len(), BITS_PER_CHAR);
    bits.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8)
}

/// Encodes text as `6 * L` bits, character `i` occupying bits `[6i, 6i+6)`.
pub fn encode_text(alphabet: &Alphabet, text: &TextSequence) -> Result<BitVector, TextCodecError> {
    let mut bits = Vec::with_capacity(text.len() * BITS_PER_CHAR);
    for (position, &ch) in text.chars().iter().enumerate() {
        let code = alphabet
            .index_of(ch)
            .ok_or(TextCodecError::CharOutOfAlphabet { position, ch })?;
        bits.extend_from_slice(&encode_code(code));
    }
    Ok(bits)
}

/// Decodes a bit vector back into text. Total on inputs of length `6 * L`:
/// all 64 codes are assigned, so every 6-bit group maps to a character.
pub fn decode_text(alphabet: &Alphabet, bits: &[bool]) -> Result<TextSequence, TextCodecError> {
    if bits.len() % BITS_PER_CHAR != 0 {
        return Err(TextCodecError::BadLength { len: bits.len() });
    }
    let chars = bits
        .chunks_exact(BITS_PER_CHAR)
        .map(|group| alphabet.char_at(decode_code(group)))
        .collect();
    Ok(TextSequence { chars })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_alphabet_layout() {
        let a = Alphabet::standard();
        assert_eq!(a.chars().len(), ALPHABET_SIZE);
        assert_eq!(a.index_of('A'), Some(0));
        assert_eq!(a.index_of('Z'), Some(25));
        assert_eq!(a.index_of('a'), Some(26));
        assert_eq!(a.index_of('z'), Some(51));
        assert_eq!(a.index_of(' '), Some(52));
        assert_eq!(a.index_of('\''), Some(55));
        assert_eq!(a.index_of('X'), Some(23));
        assert_eq!(a.char_at(63), ')');
        // index_of(chars[i]) == i for all i
        for (i, &c) in a.chars().iter().enumerate() {
            assert_eq!(a.index_of(c), Some(i as u8));
        }
    }

    #[test]
    fn zero_code_is_six_zero_bits() {
        let a = Alphabet::standard();
        let t = a.text("A").unwrap();
        assert_eq!(encode_text(a, &t).unwrap(), vec![false; 6]);
    }

    #[test]
    fn all_ones_group_is_index_63() {
        let a = Alphabet::standard();
        let t = decode_text(a, &[true; 6]).unwrap();
        assert_eq!(t.char_at(0), a.char_at(63));
    }

    #[test]
    fn worked_example_bit_length() {
        let a = Alphabet::standard();
        let t = a.text("We need to spell out the facts").unwrap();
        assert_eq!(t.len(), 30);
        assert_eq!(encode_text(a, &t).unwrap().len(), 180);
    }

    #[test]
    fn round_trip_every_alphabet_character() {
        let a = Alphabet::standard();
        for &c in a.chars() {
            let t = TextSequence::from_chars(vec![c]);
            let bits = encode_text(a, &t).unwrap();
            assert_eq!(decode_text(a, &bits).unwrap(), t);
        }
    }

    #[test]
    fn decoding_is_total_over_all_64_codes() {
        // Exhaustive: every 6-bit group maps to exactly one character and
        // encodes back to the same group.
        let a = Alphabet::standard();
        let mut seen = std::collections::HashSet::new();
        for code in 0u8..64 {
            let bits = encode_code(code);
            let t = decode_text(a, &bits).unwrap();
            assert_eq!(t.len(), 1);
            assert!(seen.insert(t.char_at(0)));
            assert_eq!(encode_text(a, &t).unwrap(), bits.to_vec());
        }
        assert_eq!(seen.len(), 64);
    }

    #[test]
    fn out_of_alphabet_reports_position() {
        let a = Alphabet::standard();
        let t = TextSequence::from_str_unchecked("ab~cd");
        match encode_text(a, &t) {
            Err(TextCodecError::CharOutOfAlphabet { position: 2, ch: '~' }) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn bad_bit_length_rejected() {
        let a = Alphabet::standard();
        assert_eq!(decode_text(a, &[true; 7]), Err(TextCodecError::BadLength { len: 7 }));
    }

    #[test]
    fn alphabet_override_parsing() {
        let a = Alphabet::standard();
        let mut lines = String::new();
        for &c in a.chars() {
            if c == ' ' {
                lines.push('\n'); // empty line denotes space
            } else {
                lines.push(c);
                lines.push('\n');
            }
        }
        let parsed = Alphabet::from_lines(&lines).unwrap();
        assert_eq!(parsed.chars(), a.chars());

        assert!(Alphabet::from_lines("ab\n").is_err());
        assert!(Alphabet::from_lines(&"a\n".repeat(64)).is_err()); // duplicates
    }

    fn alphabet_text(len: usize) -> impl Strategy<Value = TextSequence> {
        prop::collection::vec(0u8..64, 1..=len).prop_map(|codes| {
            let a = Alphabet::standard();
            TextSequence::from_chars(codes.into_iter().map(|c| a.char_at(c)).collect())
        })
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(t in alphabet_text(80)) {
            let a = Alphabet::standard();
            let bits = encode_text(a, &t).unwrap();
            prop_assert_eq!(bits.len(), 6 * t.len());
            prop_assert_eq!(decode_text(a, &bits).unwrap(), t);
        }

        #[test]
        fn encode_inverts_decode(bits in prop::collection::vec(any::<bool>(), 0..60)
                                    .prop_filter("multiple of 6", |b| b.len() % 6 == 0)) {
            let a = Alphabet::standard();
            let t = decode_text(a, &bits).unwrap();
            prop_assert_eq!(encode_text(a, &t).unwrap(), bits);
        }
    }
}
