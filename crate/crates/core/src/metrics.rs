//! Evaluation metrics: NMSE, phase error, BER, and the semantic-pilot
//! selection quality ratios, plus compensated-summation aggregation.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::semantic::SemanticPilot;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricsError {
    ZeroTrueChannel,
    ZeroChannel,
    LengthMismatch { expected: usize, actual: usize },
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::ZeroTrueChannel => write!(f, "true channel is zero"),
            MetricsError::ZeroChannel => write!(f, "phase undefined for a zero channel"),
            MetricsError::LengthMismatch { expected, actual } => {
                write!(f, "length mismatch: expected {expected}, got {actual}")
            }
        }
    }
}

impl std::error::Error for MetricsError {}

/// Normalized mean squared error `|h - h_hat|^2 / |h|^2`.
pub fn nmse(h: Complex64, h_hat: Complex64) -> Result<f64, MetricsError> {
    let denom = h.norm_sqr();
    if denom == 0.0 {
        return Err(MetricsError::ZeroTrueChannel);
    }
    Ok((h - h_hat).norm_sqr() / denom)
}

/// Wraps an angle difference into `(-pi, pi]`.
fn wrap_angle(d: f64) -> f64 {
    let w = d.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Absolute angular difference between the true and estimated channel,
/// wrapped across the branch cut so the result lies in `[0, pi]`.
pub fn phase_error(h: Complex64, h_hat: Complex64) -> Result<f64, MetricsError> {
    if h.norm_sqr() == 0.0 || h_hat.norm_sqr() == 0.0 {
        return Err(MetricsError::ZeroChannel);
    }
    Ok(wrap_angle(h.arg() - h_hat.arg()).abs())
}

/// Number of differing bit positions.
pub fn bit_errors(sent: &[bool], decoded: &[bool]) -> Result<usize, MetricsError> {
    if sent.len() != decoded.len() {
        return Err(MetricsError::LengthMismatch { expected: sent.len(), actual: decoded.len() });
    }
    Ok(sent.iter().zip(decoded).filter(|(a, b)| a != b).count())
}

/// Bit error rate: erroneous bits over total bits.
pub fn ber(sent: &[bool], decoded: &[bool]) -> Result<f64, MetricsError> {
    if sent.is_empty() && decoded.is_empty() {
        return Ok(0.0);
    }
    Ok(bit_errors(sent, decoded)? as f64 / sent.len() as f64)
}

/// Semantic-pilot selection quality for one trial. `reliability` is absent
/// when nothing was selected; `detection_rate` is absent when no decoded
/// symbol was error-free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionMetrics {
    /// Error-free selected symbols / selected symbols.
    pub reliability: Option<f64>,
    /// Error-free selected symbols / error-free decoded symbols.
    pub detection_rate: Option<f64>,
    /// Selected symbols / all data symbols (`N / K`).
    pub selection_ratio: f64,
}

/// Computes the three selection ratios. A symbol counts as error-free when
/// its decided constellation point equals the transmitted one (two correct
/// bits).
pub fn selection_metrics(
    pilot: &SemanticPilot,
    sent_symbols: &[Complex64],
    decided_symbols: &[Complex64],
) -> Result<SelectionMetrics, MetricsError> {
    if sent_symbols.len() != decided_symbols.len() {
        return Err(MetricsError::LengthMismatch {
            expected: sent_symbols.len(),
            actual: decided_symbols.len(),
        });
    }
    let error_free: Vec<bool> =
        sent_symbols.iter().zip(decided_symbols).map(|(a, b)| a == b).collect();
    let total_error_free = error_free.iter().filter(|&&ef| ef).count();
    let selected_error_free =
        pilot.indices().iter().filter(|&&i| error_free[i]).count();

    let n = pilot.len();
    let k = sent_symbols.len();
    Ok(SelectionMetrics {
        reliability: (n > 0).then(|| selected_error_free as f64 / n as f64),
        detection_rate: (total_error_free > 0)
            .then(|| selected_error_free as f64 / total_error_free as f64),
        selection_ratio: n as f64 / k as f64,
    })
}

/// Neumaier-compensated running sum; permutation-invariant to well below
/// 1e-12 for the value ranges aggregated here.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Mean and standard error over a stream of values, with compensated sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanAccumulator {
    count: u64,
    sum: KahanSum,
    sum_sq: KahanSum,
}

impl MeanAccumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum.add(x);
        self.sum_sq.add(x * x);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum.value() / self.count as f64)
    }

    /// Standard error of the mean (sample variance over n).
    pub fn standard_error(&self) -> Option<f64> {
        if self.count < 2 {
            return None;
        }
        let n = self.count as f64;
        let mean = self.sum.value() / n;
        let var = ((self.sum_sq.value() - n * mean * mean) / (n - 1.0)).max(0.0);
        Some((var / n).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modem::qpsk_modulate;
    use crate::semantic::select_semantic_pilot;
    use crate::textcodec::{encode_text, Alphabet};
    use proptest::prelude::*;

    #[test]
    fn nmse_examples() {
        let h = Complex64::new(1.0, 0.0);
        assert_eq!(nmse(h, h).unwrap(), 0.0);
        assert_eq!(nmse(h, Complex64::new(0.0, 0.0)).unwrap(), 1.0);
        let v = nmse(h, Complex64::new(1.1, 0.1)).unwrap();
        assert!((v - 0.02).abs() < 1e-15);
        assert!(nmse(Complex64::new(0.0, 0.0), h).is_err());
    }

    #[test]
    fn phase_error_examples() {
        let h = Complex64::new(0.6, 0.8);
        assert_eq!(phase_error(h, h.scale(2.0)).unwrap(), 0.0);
        let rotated = h * Complex64::from_polar(1.0, PI / 4.0);
        assert!((phase_error(h, rotated).unwrap() - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn phase_error_wraps_across_the_branch_cut() {
        let h = Complex64::from_polar(1.0, 3.0);
        let h_hat = Complex64::from_polar(1.0, -3.0);
        let expected = TAU - 6.0; // ~0.2832, not 6.0
        assert!((phase_error(h, h_hat).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn ber_examples() {
        let a = vec![true, false, true, true];
        assert_eq!(ber(&a, &a).unwrap(), 0.0);
        let complement: Vec<bool> = a.iter().map(|b| !b).collect();
        assert_eq!(ber(&a, &complement).unwrap(), 1.0);

        let sent = vec![false; 180];
        let mut decoded = sent.clone();
        decoded[3] = true;
        decoded[77] = true;
        decoded[140] = true;
        assert!((ber(&sent, &decoded).unwrap() - 1.0 / 60.0).abs() < 1e-15);
        assert!(ber(&sent, &decoded[..10]).is_err());
    }

    fn fixture(decoded_text: &str, sent_text: &str) -> (SelectionMetrics, usize) {
        let a = Alphabet::standard();
        let sent = a.text(sent_text).unwrap();
        let decoded = a.text(decoded_text).unwrap();
        let sent_syms = qpsk_modulate(&encode_text(a, &sent).unwrap()).unwrap();
        let decided = qpsk_modulate(&encode_text(a, &decoded).unwrap()).unwrap();
        // Identity corrector: everything matches itself.
        let pilot = select_semantic_pilot(&decoded, &decoded, &decided, false).unwrap();
        (selection_metrics(&pilot, &sent_syms, &decided).unwrap(), pilot.len())
    }

    #[test]
    fn identity_corrector_selects_the_whole_payload() {
        let (m, n) = fixture("abcd", "abed");
        assert_eq!(m.selection_ratio, 1.0);
        assert_eq!(n, 12);
        // Detection is total: every error-free symbol is selected.
        assert_eq!(m.detection_rate, Some(1.0));
        // Reliability < 1: the erroneous character is selected too.
        assert!(m.reliability.unwrap() < 1.0);
    }

    #[test]
    fn empty_selection_reports_absent_reliability() {
        let a = Alphabet::standard();
        let decoded = a.text("ab").unwrap();
        let corrected = a.text("cd").unwrap();
        let syms = qpsk_modulate(&encode_text(a, &decoded).unwrap()).unwrap();
        let pilot = select_semantic_pilot(&decoded, &corrected, &syms, false).unwrap();
        let m = selection_metrics(&pilot, &syms, &syms).unwrap();
        assert_eq!(m.reliability, None);
        assert_eq!(m.selection_ratio, 0.0);
        assert_eq!(m.detection_rate, Some(0.0));
    }

    #[test]
    fn detection_undefined_when_nothing_decoded_correctly() {
        let a = Alphabet::standard();
        let sent = a.text("A").unwrap();
        let decoded = a.text(")").unwrap(); // code 63: all three symbols differ
        let sent_syms = qpsk_modulate(&encode_text(a, &sent).unwrap()).unwrap();
        let decided = qpsk_modulate(&encode_text(a, &decoded).unwrap()).unwrap();
        let pilot = select_semantic_pilot(&decoded, &decoded, &decided, false).unwrap();
        let m = selection_metrics(&pilot, &sent_syms, &decided).unwrap();
        assert_eq!(m.detection_rate, None);
        assert_eq!(m.reliability, Some(0.0));
    }

    #[test]
    fn cross_consistency_identity() {
        // reliability * N and detection_rate * (error-free count) both equal
        // the number of selected error-free symbols.
        let a = Alphabet::standard();
        let sent = a.text("some words here").unwrap();
        let decoded = a.text("sXme wordZ hire").unwrap();
        let corrected = a.text("sXme wordy hare").unwrap();
        let sent_syms = qpsk_modulate(&encode_text(a, &sent).unwrap()).unwrap();
        let decided = qpsk_modulate(&encode_text(a, &decoded).unwrap()).unwrap();
        let pilot = select_semantic_pilot(&decoded, &corrected, &decided, false).unwrap();
        let m = selection_metrics(&pilot, &sent_syms, &decided).unwrap();
        let error_free =
            sent_syms.iter().zip(&decided).filter(|(x, y)| x == y).count() as f64;
        let from_rel = m.reliability.unwrap() * pilot.len() as f64;
        let from_det = m.detection_rate.unwrap() * error_free;
        assert!((from_rel - from_det).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn mean_is_permutation_invariant(values in prop::collection::vec(-1e3_f64..1e3, 2..200),
                                         seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut acc = MeanAccumulator::default();
            for &v in &values {
                acc.push(v);
            }
            let mut shuffled = values.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let mut acc2 = MeanAccumulator::default();
            for &v in &shuffled {
                acc2.push(v);
            }
            prop_assert!((acc.mean().unwrap() - acc2.mean().unwrap()).abs() < 1e-12);
            prop_assert!((acc.standard_error().unwrap() - acc2.standard_error().unwrap()).abs() < 1e-12);
        }

        #[test]
        fn wrapped_phase_error_stays_in_range(a in -10.0_f64..10.0, b in -10.0_f64..10.0) {
            let h = Complex64::from_polar(1.0, a);
            let h_hat = Complex64::from_polar(2.0, b);
            let e = phase_error(h, h_hat).unwrap();
            prop_assert!((0.0..=PI).contains(&e));
            // Scaling either channel never changes the angle.
            let e2 = phase_error(h.scale(3.5), h_hat.scale(0.2)).unwrap();
            prop_assert!((e - e2).abs() < 1e-12);
        }
    }
}
