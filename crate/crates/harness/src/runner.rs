//! Seeded Monte Carlo execution of all estimation schemes across SNRs, and
//! the per-(scheme, SNR) aggregation feeding the reports.

use std::sync::Arc;

use anyhow::{Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sempilot_core::channel::{draw_channel, draw_channel_with_phase, snr_to_sigma2, transmit_frame};
use sempilot_core::estimator::{
    ls_estimate, run_scheme, zf_equalize, EstimateSet, SchemeId, SchemeInputs,
};
use sempilot_core::metrics::{
    ber, bit_errors, nmse, phase_error, selection_metrics, MeanAccumulator, SelectionMetrics,
};
use sempilot_core::modem::{qpsk_decide, qpsk_modulate};
use sempilot_core::pilot::zadoff_chu;
use sempilot_core::semantic::{
    select_semantic_pilot, Corrector, CorrectionResult, CorrectorSource, IdentityCorrector,
    OracleCorrector, StochasticCorrector,
};
use sempilot_core::textcodec::{decode_text, encode_text, Alphabet, TextSequence};
use sempilot_core::Complex64;
use sempilot_llmclient::{PromptTemplate, RemoteClient, RemoteCorrector};

use crate::config::{CorrectorKind, ExperimentConfig};
use crate::corpus::Corpus;

/// Independent RNG streams consumed by one trial, so adding or removing a
/// consumer never shifts the others.
#[derive(Debug, Clone, Copy)]
pub enum RngStream {
    Text = 0,
    Channel = 1,
    Noise = 2,
    Corrector = 3,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed: a hash of (master seed, SNR index, trial index), so every
/// SNR point is reproducible on its own.
pub fn trial_seed(master_seed: u64, snr_index: usize, trial_index: usize) -> u64 {
    let mut s = splitmix64(master_seed);
    s = splitmix64(s ^ snr_index as u64);
    splitmix64(s ^ trial_index as u64)
}

fn stream_rng(seed: u64, stream: RngStream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ (stream as u64)))
}

/// Per-scheme results of one trial.
#[derive(Debug, Clone)]
pub struct SchemeTrialResult {
    pub estimates: EstimateSet,
    pub nmse: f64,
    pub phase_error: f64,
    pub bit_errors: usize,
    pub bits: usize,
    pub ber: f64,
}

/// Everything recorded for one (trial, SNR) point.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub snr_db: f64,
    pub trial_index: usize,
    pub seed: u64,
    pub text_len: usize,
    /// Semantic pilot size `N`.
    pub n_selected: usize,
    /// Data symbols `K = 3 * L`.
    pub k_symbols: usize,
    pub selection: SelectionMetrics,
    pub corrector_source: CorrectorSource,
    pub length_repaired: bool,
    /// Set when the corrector failed and the trial fell back to identity.
    pub corrector_fallback: bool,
    pub schemes: Vec<(SchemeId, SchemeTrialResult)>,
}

/// Immutable state shared by every trial of a run.
pub struct RunContext {
    pub config: ExperimentConfig,
    pub alphabet: Alphabet,
    pub corpus: Corpus,
    pub pilot_tx: Vec<Complex64>,
    pub remote: Option<Arc<RemoteClient>>,
}

impl RunContext {
    pub fn new(config: ExperimentConfig) -> Result<RunContext> {
        config.validate()?;
        let alphabet = config.alphabet()?;
        let corpus = match &config.corpus {
            Some(path) => Corpus::load(&alphabet, path)?,
            None => Corpus::builtin_sample(&alphabet),
        };
        let pilot_tx = zadoff_chu(&config.pilot.as_pilot_config())
            .map_err(|e| anyhow::anyhow!("pilot: {e}"))?;
        let remote = match config.corrector.kind {
            CorrectorKind::Remote => Some(RemoteClient::new(
                config.corrector.remote.as_remote_config(),
                PromptTemplate::default(),
            )?),
            _ => None,
        };
        Ok(RunContext { config, alphabet, corpus, pilot_tx, remote })
    }

    fn build_corrector(&self, truth: &TextSequence, seed: u64) -> Box<dyn Corrector> {
        match self.config.corrector.kind {
            CorrectorKind::Identity => Box::new(IdentityCorrector),
            CorrectorKind::Oracle => Box::new(OracleCorrector::new(truth.clone())),
            CorrectorKind::Stochastic => Box::new(StochasticCorrector::new(
                truth.clone(),
                self.config.corrector.stochastic_params(),
                self.alphabet.clone(),
                stream_rng(seed, RngStream::Corrector),
            )),
            CorrectorKind::Remote => Box::new(RemoteCorrector::new(
                Arc::clone(self.remote.as_ref().expect("remote client built for remote kind")),
                self.alphabet.clone(),
            )),
        }
    }
}

/// Runs the full pipeline for one trial: sample text, transmit, estimate,
/// decode, correct, select, then run every configured scheme against the
/// same channel, noise, and text.
pub fn run_trial(ctx: &RunContext, snr_index: usize, trial_index: usize) -> Result<TrialRecord> {
    let config = &ctx.config;
    let snr_db = config.snr_db[snr_index];
    let sigma2 = snr_to_sigma2(snr_db);
    let seed = trial_seed(config.master_seed, snr_index, trial_index);

    // Source text and transmitted signal.
    let mut text_rng = stream_rng(seed, RngStream::Text);
    let truth = ctx.corpus.sample_window(config.text_len, &mut text_rng)?;
    let sent_bits = encode_text(&ctx.alphabet, &truth)
        .map_err(|e| anyhow::anyhow!("encoding corpus window: {e}"))?;
    let text_tx = qpsk_modulate(&sent_bits).map_err(|e| anyhow::anyhow!("modulating: {e}"))?;

    // Channel and noise.
    let mut channel_rng = stream_rng(seed, RngStream::Channel);
    let k = config.channel.k_linear();
    let h = match config.channel.los_phase {
        Some(theta) => draw_channel_with_phase(k, theta, &mut channel_rng),
        None => draw_channel(k, &mut channel_rng),
    };
    let mut noise_rng = stream_rng(seed, RngStream::Noise);
    let frame = transmit_frame(&ctx.pilot_tx, &text_tx, h, sigma2, &mut noise_rng);

    // Initial estimate, equalization, and hard decisions.
    let h_ls = ls_estimate(&ctx.pilot_tx, &frame.pilot)
        .map_err(|e| anyhow::anyhow!("initial estimate: {e}"))?;
    let equalized =
        zf_equalize(&frame.text, h_ls).map_err(|e| anyhow::anyhow!("equalizing: {e}"))?;
    let (decided_bits, decided) = qpsk_decide(&equalized);
    let decoded = decode_text(&ctx.alphabet, &decided_bits)
        .map_err(|e| anyhow::anyhow!("decoding: {e}"))?;

    // Text correction, falling back to identity when the corrector fails.
    let mut corrector = ctx.build_corrector(&truth, seed);
    let (correction, corrector_fallback) = match corrector.correct(&decoded) {
        Ok(c) => (c, false),
        Err(_) => (
            CorrectionResult {
                corrected: decoded.clone(),
                length_repaired: false,
                source: CorrectorSource::Identity,
            },
            true,
        ),
    };

    // Semantic pilot and re-encoded corrected symbols.
    let semantic = select_semantic_pilot(
        &decoded,
        &correction.corrected,
        &decided,
        config.exclude_mask_matches,
    )
    .map_err(|e| anyhow::anyhow!("selecting semantic pilot: {e}"))?;
    let corrected_bits = encode_text(&ctx.alphabet, &correction.corrected)
        .map_err(|e| anyhow::anyhow!("re-encoding corrected text: {e}"))?;
    let corrected_syms =
        qpsk_modulate(&corrected_bits).map_err(|e| anyhow::anyhow!("modulating: {e}"))?;

    let selection = selection_metrics(&semantic, &text_tx, &decided)
        .map_err(|e| anyhow::anyhow!("selection metrics: {e}"))?;

    let input = SchemeInputs {
        pilot_tx: &ctx.pilot_tx,
        pilot_rx: &frame.pilot,
        text_rx: &frame.text,
        decided: &decided,
        semantic: &semantic,
        corrected: &corrected_syms,
        scaling_uses_corrected: config.scaling_uses_corrected,
    };

    let mut schemes = Vec::with_capacity(config.schemes.len());
    for id in config.scheme_ids() {
        let out = run_scheme(id, &input).map_err(|e| anyhow::anyhow!("scheme {id}: {e}"))?;
        let mut estimates = out.estimates;
        estimates.h_true = h;
        let errors = bit_errors(&sent_bits, &out.payload_bits)
            .map_err(|e| anyhow::anyhow!("bit errors: {e}"))?;
        schemes.push((
            id,
            SchemeTrialResult {
                estimates,
                nmse: nmse(h, estimates.h_final).map_err(|e| anyhow::anyhow!("nmse: {e}"))?,
                phase_error: phase_error(h, estimates.h_final)
                    .map_err(|e| anyhow::anyhow!("phase error: {e}"))?,
                bit_errors: errors,
                bits: sent_bits.len(),
                ber: ber(&sent_bits, &out.payload_bits)
                    .map_err(|e| anyhow::anyhow!("ber: {e}"))?,
            },
        ));
    }

    Ok(TrialRecord {
        snr_db,
        trial_index,
        seed,
        text_len: config.text_len,
        n_selected: semantic.len(),
        k_symbols: text_tx.len(),
        selection,
        corrector_source: correction.source,
        length_repaired: correction.length_repaired,
        corrector_fallback,
        schemes,
    })
}

/// All trial records for one SNR point, in trial order.
#[derive(Debug)]
pub struct SnrBlock {
    pub snr_index: usize,
    pub snr_db: f64,
    pub records: Vec<TrialRecord>,
}

/// Runs every (SNR, trial) pair. Trials execute in parallel on a local
/// thread pool; results come back in trial order, so output never depends
/// on scheduling.
pub fn run_all(ctx: &RunContext) -> Result<Vec<SnrBlock>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.config.workers)
        .build()
        .context("building worker pool")?;
    let mut blocks = Vec::with_capacity(ctx.config.snr_db.len());
    for snr_index in 0..ctx.config.snr_db.len() {
        let records: Result<Vec<TrialRecord>> = pool.install(|| {
            (0..ctx.config.trials)
                .into_par_iter()
                .map(|trial_index| run_trial(ctx, snr_index, trial_index))
                .collect()
        });
        blocks.push(SnrBlock {
            snr_index,
            snr_db: ctx.config.snr_db[snr_index],
            records: records?,
        });
    }
    Ok(blocks)
}

/// Aggregate over all trials of one (scheme, SNR) cell.
#[derive(Debug, Clone)]
pub struct SchemeAggregate {
    pub scheme: SchemeId,
    pub snr_db: f64,
    pub trials: usize,
    pub nmse_mean: f64,
    pub nmse_se: f64,
    pub phase_err_mean: f64,
    pub phase_err_se: f64,
    /// Total bit errors over total bits.
    pub ber: f64,
    pub total_bit_errors: u64,
    pub total_bits: u64,
    pub reliability_mean: Option<f64>,
    pub detection_mean: Option<f64>,
    pub selection_mean: f64,
    pub reliability_undefined: usize,
    pub detection_undefined: usize,
    pub gamma_nonpositive: usize,
}

/// Run-level summary: one row per (scheme, SNR) plus corrector counters.
#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub rows: Vec<SchemeAggregate>,
    pub schemes: Vec<SchemeId>,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub corpus_substitutions: usize,
    pub corrector_fallbacks: usize,
    pub length_repaired: usize,
}

/// Collapses trial records into per-(scheme, SNR) aggregates, in a fixed
/// order independent of how the trials were scheduled.
pub fn aggregate(ctx: &RunContext, blocks: &[SnrBlock]) -> ExperimentSummary {
    let schemes = ctx.config.scheme_ids();
    let mut rows = Vec::new();
    let mut corrector_fallbacks = 0;
    let mut length_repaired = 0;

    for block in blocks {
        corrector_fallbacks += block.records.iter().filter(|r| r.corrector_fallback).count();
        length_repaired += block.records.iter().filter(|r| r.length_repaired).count();

        // Selection metrics are per trial, not per scheme.
        let mut rel = MeanAccumulator::default();
        let mut det = MeanAccumulator::default();
        let mut sel = MeanAccumulator::default();
        let mut rel_undef = 0;
        let mut det_undef = 0;
        for record in &block.records {
            match record.selection.reliability {
                Some(v) => rel.push(v),
                None => rel_undef += 1,
            }
            match record.selection.detection_rate {
                Some(v) => det.push(v),
                None => det_undef += 1,
            }
            sel.push(record.selection.selection_ratio);
        }

        for (scheme_pos, &scheme) in schemes.iter().enumerate() {
            let mut nmse_acc = MeanAccumulator::default();
            let mut phase_acc = MeanAccumulator::default();
            let mut errors: u64 = 0;
            let mut bits: u64 = 0;
            let mut gamma_nonpositive = 0;
            for record in &block.records {
                let (id, result) = &record.schemes[scheme_pos];
                debug_assert_eq!(*id, scheme);
                nmse_acc.push(result.nmse);
                phase_acc.push(result.phase_error);
                errors += result.bit_errors as u64;
                bits += result.bits as u64;
                if result.estimates.gamma <= 0.0 {
                    gamma_nonpositive += 1;
                }
            }
            rows.push(SchemeAggregate {
                scheme,
                snr_db: block.snr_db,
                trials: block.records.len(),
                nmse_mean: nmse_acc.mean().unwrap_or(0.0),
                nmse_se: nmse_acc.standard_error().unwrap_or(0.0),
                phase_err_mean: phase_acc.mean().unwrap_or(0.0),
                phase_err_se: phase_acc.standard_error().unwrap_or(0.0),
                ber: if bits > 0 { errors as f64 / bits as f64 } else { 0.0 },
                total_bit_errors: errors,
                total_bits: bits,
                reliability_mean: rel.mean(),
                detection_mean: det.mean(),
                selection_mean: sel.mean().unwrap_or(0.0),
                reliability_undefined: rel_undef,
                detection_undefined: det_undef,
                gamma_nonpositive,
            });
        }
    }

    ExperimentSummary {
        rows,
        schemes,
        snr_db: ctx.config.snr_db.clone(),
        trials: ctx.config.trials,
        master_seed: ctx.config.master_seed,
        corpus_substitutions: ctx.corpus.substitutions(),
        corrector_fallbacks,
        length_repaired,
    }
}

/// Runs the whole experiment and writes the report files to the configured
/// output directory.
pub fn run_experiment(config: ExperimentConfig) -> Result<ExperimentSummary> {
    let ctx = RunContext::new(config)?;
    let blocks = run_all(&ctx)?;
    let summary = aggregate(&ctx, &blocks);
    crate::report::write_reports(&summary, &ctx.config.out_dir)?;
    Ok(summary)
}
