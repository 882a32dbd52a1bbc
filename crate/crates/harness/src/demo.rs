//! The shipped worked example: one decoded/corrected sentence pair and the
//! character positions where they agree.

use anyhow::Result;
use std::fmt::Write as _;

use sempilot_core::modem::qpsk_modulate;
use sempilot_core::semantic::{select_semantic_pilot, SemanticPilot};
use sempilot_core::textcodec::{encode_text, Alphabet};

pub const EXAMPLE_TRANSMITTED: &str = "We need to spell out the facts";
pub const EXAMPLE_DECODED: &str = "Ui Xeef tE kpeVl wut lhW'jaUtM";
pub const EXAMPLE_CORRECTED: &str = "We need to spell out XXXXXXXXX";

/// Character positions where the decoded and corrected rows agree.
pub const EXAMPLE_MATCHED_POSITIONS: [usize; 13] =
    [2, 4, 5, 7, 8, 10, 12, 13, 15, 16, 18, 19, 20];

/// Runs selection on the worked example and returns the pilot along with the
/// matched character positions.
pub fn worked_example(alphabet: &Alphabet) -> Result<(SemanticPilot, Vec<usize>)> {
    let decoded = alphabet.text(EXAMPLE_DECODED).map_err(|e| anyhow::anyhow!("{e}"))?;
    let corrected = alphabet.text(EXAMPLE_CORRECTED).map_err(|e| anyhow::anyhow!("{e}"))?;
    let decided = qpsk_modulate(&encode_text(alphabet, &decoded).map_err(|e| anyhow::anyhow!("{e}"))?)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let pilot = select_semantic_pilot(&decoded, &corrected, &decided, false)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let matched: Vec<usize> = (0..decoded.len())
        .filter(|&i| decoded.char_at(i) == corrected.char_at(i))
        .collect();
    Ok((pilot, matched))
}

/// Renders the worked example as an aligned four-row table.
pub fn render_walkthrough(alphabet: &Alphabet) -> Result<String> {
    let (pilot, matched) = worked_example(alphabet)?;
    let length = EXAMPLE_DECODED.chars().count();
    let mask: Vec<char> =
        (0..length).map(|i| if matched.contains(&i) { 'v' } else { '-' }).collect();

    let mut out = String::new();
    let rows: [(&str, Vec<char>); 4] = [
        ("Transmitted   ", EXAMPLE_TRANSMITTED.chars().collect()),
        ("Decoded       ", EXAMPLE_DECODED.chars().collect()),
        ("Corrected     ", EXAMPLE_CORRECTED.chars().collect()),
        ("Semantic pilot", mask),
    ];
    for (label, cells) in rows {
        let _ = write!(out, "{label} |");
        for c in cells {
            let _ = write!(out, " {c}");
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(
        out,
        "\nmatched characters: {} of {length}   selected symbols N = {} of K = {}",
        matched.len(),
        pilot.len(),
        3 * length,
    );
    Ok(out)
}
