//! Self-checks against analytic laws and algebraic identities. Each check
//! returns a structured outcome; the CLI prints one line per check and the
//! acceptance suite asserts on them.

use sempilot_core::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sempilot_core::channel::{draw_channel, transmit};
use sempilot_core::estimator::{
    ls_estimate, magnitude_scale, refine_phase, run_scheme, zf_equalize, SchemeId, SchemeInputs,
};
use sempilot_core::modem::{qpsk_decide, qpsk_modulate};
use sempilot_core::pilot::{zadoff_chu, PilotConfig};
use sempilot_core::semantic::SemanticPilot;

/// Result of one self-check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, pass: bool, detail: String) -> CheckOutcome {
        CheckOutcome { name, pass, detail }
    }
}

fn random_qpsk(rng: &mut impl Rng, symbols: usize) -> Vec<Complex64> {
    let bits: Vec<bool> = (0..2 * symbols).map(|_| rng.gen()).collect();
    qpsk_modulate(&bits).expect("even bit count")
}

/// Noiseless, error-free inputs: every scheme must return the channel almost
/// exactly and decode without bit errors.
pub fn check_noiseless_exactness(seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pilot = zadoff_chu(&PilotConfig::default()).expect("default pilot");
    let mut worst_rel = 0.0f64;
    let mut bit_errors = 0usize;
    for _ in 0..20 {
        let text_tx = random_qpsk(&mut rng, 90);
        let h = draw_channel(10.0, &mut rng);
        let pilot_rx = transmit(&pilot, h, 0.0, &mut rng);
        let text_rx = transmit(&text_tx, h, 0.0, &mut rng);
        let h_ls = ls_estimate(&pilot, &pilot_rx).expect("pilot energy");
        let (sent_bits, _) = qpsk_decide(&text_tx);
        let (_, decided) = qpsk_decide(&zf_equalize(&text_rx, h_ls).expect("nonzero estimate"));
        let semantic = SemanticPilot::full(&decided);
        let input = SchemeInputs {
            pilot_tx: &pilot,
            pilot_rx: &pilot_rx,
            text_rx: &text_rx,
            decided: &decided,
            semantic: &semantic,
            corrected: &decided,
            scaling_uses_corrected: false,
        };
        for id in SchemeId::ALL {
            let out = run_scheme(id, &input).expect("scheme runs");
            worst_rel = worst_rel.max((out.estimates.h_final - h).norm() / h.norm());
            bit_errors +=
                sent_bits.iter().zip(&out.payload_bits).filter(|(a, b)| a != b).count();
        }
    }
    CheckOutcome::new(
        "noiseless exactness",
        worst_rel < 1e-10 && bit_errors == 0,
        format!("worst relative error {worst_rel:.3e}, bit errors {bit_errors}"),
    )
}

/// Pilot-only LS error variance: mean |h_ls - h|^2 = sigma2 / M within the
/// given relative tolerance.
pub fn check_ls_variance(trials: usize, seed: u64, tolerance: f64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma2 = 0.1;
    let pilot = zadoff_chu(&PilotConfig::default()).expect("default pilot");
    let mut total = 0.0;
    for _ in 0..trials {
        let h = draw_channel(10.0, &mut rng);
        let rx = transmit(&pilot, h, sigma2, &mut rng);
        let est = ls_estimate(&pilot, &rx).expect("pilot energy");
        total += (est - h).norm_sqr();
    }
    let mean = total / trials as f64;
    let expected = sigma2 / pilot.len() as f64;
    let rel = (mean - expected).abs() / expected;
    CheckOutcome::new(
        "pilot-only LS error variance",
        rel < tolerance,
        format!("mean {mean:.6e} vs sigma2/M {expected:.6e} (rel err {rel:.4}, {trials} trials)"),
    )
}

/// Refinement error variance with an error-free N = 48 semantic pilot:
/// mean |h_r - h|^2 = sigma2 / (M + N) within the given tolerance.
pub fn check_refinement_variance(trials: usize, seed: u64, tolerance: f64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma2 = 0.1;
    let pilot = zadoff_chu(&PilotConfig::default()).expect("default pilot");
    let n = 48;
    let mut total = 0.0;
    for _ in 0..trials {
        let text_tx = random_qpsk(&mut rng, n);
        let h = draw_channel(10.0, &mut rng);
        let pilot_rx = transmit(&pilot, h, sigma2, &mut rng);
        let text_rx = transmit(&text_tx, h, sigma2, &mut rng);
        let semantic = SemanticPilot::full(&text_tx); // forced error-free
        let est = refine_phase(&pilot, &pilot_rx, &semantic, &text_rx).expect("pilot energy");
        total += (est - h).norm_sqr();
    }
    let mean = total / trials as f64;
    let expected = sigma2 / (pilot.len() + n) as f64;
    let rel = (mean - expected).abs() / expected;
    CheckOutcome::new(
        "refinement error variance",
        rel < tolerance,
        format!("mean {mean:.6e} vs sigma2/(M+N) {expected:.6e} (rel err {rel:.4}, {trials} trials)"),
    )
}

/// Scaling over the same set refinement used is the identity: gamma = 1 to
/// machine precision.
pub fn check_gamma_identity(trials: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pilot = zadoff_chu(&PilotConfig::default()).expect("default pilot");
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let text_tx = random_qpsk(&mut rng, 90);
        let h = draw_channel(10.0, &mut rng);
        let sigma2 = rng.gen_range(0.01..1.0);
        let pilot_rx = transmit(&pilot, h, sigma2, &mut rng);
        let text_rx = transmit(&text_tx, h, sigma2, &mut rng);
        let h_ls = ls_estimate(&pilot, &pilot_rx).expect("pilot energy");
        let (_, decided) = qpsk_decide(&zf_equalize(&text_rx, h_ls).expect("nonzero estimate"));
        let all = SemanticPilot::full(&decided);
        let h_r = refine_phase(&pilot, &pilot_rx, &all, &text_rx).expect("pilot energy");
        let gamma = magnitude_scale(h_r, &pilot, &pilot_rx, &decided, &text_rx)
            .expect("nonzero denominator");
        worst = worst.max((gamma - 1.0).abs());
    }
    CheckOutcome::new(
        "scaling identity over the refinement set",
        worst < 1e-12,
        format!("worst |gamma - 1| = {worst:.3e} over {trials} trials"),
    )
}

/// Both closed forms are minimizers: +/- epsilon perturbations (8 complex
/// directions for the refined estimate, 2 real directions for gamma) never
/// decrease their objectives.
pub fn check_closed_form_optimality(instances: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pilot = zadoff_chu(&PilotConfig::default()).expect("default pilot");
    let eps = 1e-4;
    let mut violations = 0usize;

    for _ in 0..instances {
        let text_tx = random_qpsk(&mut rng, 90);
        let h = draw_channel(10.0, &mut rng);
        let sigma2 = rng.gen_range(0.02..1.0);
        let pilot_rx = transmit(&pilot, h, sigma2, &mut rng);
        let text_rx = transmit(&text_tx, h, sigma2, &mut rng);
        let h_ls = ls_estimate(&pilot, &pilot_rx).expect("pilot energy");
        let (_, decided) = qpsk_decide(&zf_equalize(&text_rx, h_ls).expect("nonzero estimate"));

        // A random character-granular subset as the semantic pilot.
        let chars = decided.len() / 3;
        let keep: Vec<usize> = (0..chars)
            .filter(|_| rng.gen_bool(0.7))
            .flat_map(|c| 3 * c..3 * c + 3)
            .collect();
        let symbols = keep.iter().map(|&i| decided[i]).collect();
        let semantic = SemanticPilot::new(keep, symbols).expect("sorted indices");

        let refinement_objective = |est: Complex64| {
            let mut total = 0.0;
            for (x, y) in pilot.iter().zip(&pilot_rx) {
                total += (y - est * x).norm_sqr();
            }
            for (&i, x) in semantic.indices().iter().zip(semantic.symbols()) {
                total += (text_rx[i] - est * x).norm_sqr();
            }
            total
        };
        let h_r = refine_phase(&pilot, &pilot_rx, &semantic, &text_rx).expect("pilot energy");
        let base = refinement_objective(h_r);
        for k in 0..8 {
            let angle = std::f64::consts::TAU * k as f64 / 8.0;
            if refinement_objective(h_r + Complex64::from_polar(eps, angle)) < base {
                violations += 1;
            }
        }

        let gamma = magnitude_scale(h_r, &pilot, &pilot_rx, &decided, &text_rx)
            .expect("nonzero denominator");
        let scaling_objective = |g: f64| {
            let scaled = h_r.scale(g);
            let mut total = 0.0;
            for (x, y) in pilot.iter().zip(&pilot_rx) {
                total += (y - scaled * x).norm_sqr();
            }
            for (x, y) in decided.iter().zip(&text_rx) {
                total += (y - scaled * x).norm_sqr();
            }
            total
        };
        let base = scaling_objective(gamma);
        if scaling_objective(gamma + eps) < base || scaling_objective(gamma - eps) < base {
            violations += 1;
        }
    }

    CheckOutcome::new(
        "closed-form optimality",
        violations == 0,
        format!("{violations} objective decreases over {instances} instances"),
    )
}

/// The full check battery at the default scales.
pub fn run_all_checks(seed: u64) -> Vec<CheckOutcome> {
    vec![
        check_noiseless_exactness(seed),
        check_ls_variance(100_000, seed.wrapping_add(1), 0.02),
        check_refinement_variance(100_000, seed.wrapping_add(2), 0.02),
        check_gamma_identity(1_000, seed.wrapping_add(3)),
        check_closed_form_optimality(1_000, seed.wrapping_add(4)),
    ]
}
