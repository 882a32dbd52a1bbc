//! Flat Rician SISO channel draw, AWGN, and frame transmission.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::modem::SymbolVector;

/// Received pilot and text segments of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedFrame {
    /// `y_p`, length `M`.
    pub pilot: SymbolVector,
    /// `y_t`, length `K = 3 * L`.
    pub text: SymbolVector,
}

/// Converts an SNR in dB to the noise variance per complex sample, assuming
/// unit symbol energy and a unit-mean-power channel: `sigma2 = 10^(-snr/10)`.
pub fn snr_to_sigma2(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// One circularly-symmetric complex Gaussian sample with variance `sigma2`
/// split evenly across the real and imaginary parts.
#[inline]
fn complex_gaussian(sigma2: f64, rng: &mut impl Rng) -> Complex64 {
    let s = (sigma2 / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// K-factors at or above this are treated as the pure line-of-sight limit.
pub const PURE_LOS_K: f64 = 1e12;

/// Draws a flat Rician channel coefficient with a line-of-sight phase fixed
/// at `los_phase`:
/// `h = sqrt(K/(K+1)) * e^{j*theta} + sqrt(1/(K+1)) * g`, `g ~ CN(0, 1)`.
///
/// Normalized so `E[|h|^2] = 1` for any `k_factor >= 0`; `k_factor = 0`
/// degenerates to Rayleigh fading and `k_factor >= 1e12` to a pure
/// unit-magnitude line-of-sight coefficient.
pub fn draw_channel_with_phase(k_factor: f64, los_phase: f64, rng: &mut impl Rng) -> Complex64 {
    assert!(k_factor >= 0.0, "Rician K-factor must be non-negative");
    if k_factor >= PURE_LOS_K {
        return Complex64::from_polar(1.0, los_phase);
    }
    let los = Complex64::from_polar((k_factor / (k_factor + 1.0)).sqrt(), los_phase);
    let scatter = complex_gaussian(1.0, rng) * (1.0 / (k_factor + 1.0)).sqrt();
    los + scatter
}

/// Draws a flat Rician channel coefficient with the line-of-sight phase
/// uniform on `[0, 2*pi)`.
pub fn draw_channel(k_factor: f64, rng: &mut impl Rng) -> Complex64 {
    let theta = rng.gen_range(0.0..TAU);
    draw_channel_with_phase(k_factor, theta, rng)
}

/// Passes symbols through the flat channel: `y[i] = h * x[i] + n[i]` with
/// `n[i]` i.i.d. `CN(0, sigma2)`.
pub fn transmit(x: &[Complex64], h: Complex64, sigma2: f64, rng: &mut impl Rng) -> SymbolVector {
    assert!(sigma2 >= 0.0, "noise variance must be non-negative");
    if sigma2 == 0.0 {
        return x.iter().map(|&s| h * s).collect();
    }
    x.iter().map(|&s| h * s + complex_gaussian(sigma2, rng)).collect()
}

/// Transmits the pilot and text segments of one frame over the same channel.
pub fn transmit_frame(
    pilot_tx: &[Complex64],
    text_tx: &[Complex64],
    h: Complex64,
    sigma2: f64,
    rng: &mut impl Rng,
) -> ReceivedFrame {
    ReceivedFrame {
        pilot: transmit(pilot_tx, h, sigma2, rng),
        text: transmit(text_tx, h, sigma2, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn snr_conversion() {
        assert_eq!(snr_to_sigma2(0.0), 1.0);
        assert!((snr_to_sigma2(10.0) - 0.1).abs() < 1e-15);
        // 10^(-0.7), evaluated independently
        assert!((snr_to_sigma2(7.0) - 0.19952623149688797).abs() < 1e-15);
        assert_eq!(snr_to_sigma2(f64::INFINITY), 0.0);
    }

    #[test]
    fn pure_los_limit_has_unit_magnitude() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let h = draw_channel(1e12, &mut rng);
            assert!((h.norm() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn rayleigh_limit_is_zero_mean_unit_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 200_000;
        let mut mean = Complex64::new(0.0, 0.0);
        let mut power = 0.0;
        for _ in 0..n {
            let h = draw_channel(0.0, &mut rng);
            mean += h;
            power += h.norm_sqr();
        }
        assert!((mean / n as f64).norm() < 0.01);
        assert!((power / n as f64 - 1.0).abs() < 0.01);
    }

    #[test]
    fn k10_power_is_normalized() {
        // Monte Carlo of the stated distribution: E[|h|^2] = 1 within 0.5%.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 1_000_000;
        let mut power = 0.0;
        for _ in 0..n {
            power += draw_channel(10.0, &mut rng).norm_sqr();
        }
        assert!((power / n as f64 - 1.0).abs() < 0.005);
    }

    #[test]
    fn fixed_phase_mode_controls_the_los_component() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = draw_channel_with_phase(1e12, 0.25, &mut rng);
        assert!((h.arg() - 0.25).abs() < 1e-6);
    }

    #[test]
    fn noiseless_transmission_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = Complex64::new(0.3, -0.8);
        let x = vec![Complex64::new(1.0, 1.0), Complex64::new(-1.0, 0.5)];
        let y = transmit(&x, h, 0.0, &mut rng);
        assert_eq!(y, vec![h * x[0], h * x[1]]);
        let y = transmit(&x, Complex64::new(1.0, 0.0), 0.0, &mut rng);
        assert_eq!(y, x);
    }

    #[test]
    fn noise_variance_matches_monte_carlo() {
        // h = 1, x = 0: the received samples are pure noise with variance
        // sigma2, split evenly between the parts.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let sigma2 = 0.37;
        let x = vec![Complex64::new(0.0, 0.0); 1_000_000];
        let y = transmit(&x, Complex64::new(1.0, 0.0), sigma2, &mut rng);
        let var: f64 = y.iter().map(|s| s.norm_sqr()).sum::<f64>() / y.len() as f64;
        assert!((var - sigma2).abs() / sigma2 < 0.01);
        let re_var: f64 = y.iter().map(|s| s.re * s.re).sum::<f64>() / y.len() as f64;
        assert!((re_var - sigma2 / 2.0).abs() / (sigma2 / 2.0) < 0.01);
    }

    #[test]
    fn same_seed_reproduces_everything() {
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            let h = draw_channel(10.0, &mut rng);
            let x = vec![Complex64::new(1.0, 0.0); 8];
            (h, transmit(&x, h, 0.5, &mut rng))
        };
        assert_eq!(run(), run());
    }
}
