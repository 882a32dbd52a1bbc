//! CSV and Markdown emission. All formatting is fixed so identical summaries
//! serialize to identical bytes regardless of worker count.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};

use crate::runner::{ExperimentSummary, SchemeAggregate};

fn fmt_float(x: f64) -> String {
    format!("{x:.6e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// One row per (scheme, SNR) with every aggregate column.
pub fn summary_csv(summary: &ExperimentSummary) -> String {
    let mut out = String::from(
        "scheme,snr_db,trials,nmse_mean,nmse_se,phase_err_mean,phase_err_se,ber,\
         reliability_mean,detection_mean,selection_mean,undefined_counts,gamma_nonpositive_count\n",
    );
    for row in &summary.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},rel={};det={},{}",
            row.scheme.key(),
            row.snr_db,
            row.trials,
            fmt_float(row.nmse_mean),
            fmt_float(row.nmse_se),
            fmt_float(row.phase_err_mean),
            fmt_float(row.phase_err_se),
            fmt_float(row.ber),
            fmt_opt(row.reliability_mean),
            fmt_opt(row.detection_mean),
            fmt_float(row.selection_mean),
            row.reliability_undefined,
            row.detection_undefined,
            row.gamma_nonpositive,
        );
    }
    out
}

/// Channel-estimation error family: NMSE and phase error.
pub fn estimation_csv(summary: &ExperimentSummary) -> String {
    let mut out =
        String::from("scheme,snr_db,nmse_mean,nmse_se,phase_err_mean,phase_err_se\n");
    for row in &summary.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.scheme.key(),
            row.snr_db,
            fmt_float(row.nmse_mean),
            fmt_float(row.nmse_se),
            fmt_float(row.phase_err_mean),
            fmt_float(row.phase_err_se),
        );
    }
    out
}

/// BER family: total error bits over total bits per (scheme, SNR).
pub fn ber_csv(summary: &ExperimentSummary) -> String {
    let mut out = String::from("scheme,snr_db,ber,total_bit_errors,total_bits\n");
    for row in &summary.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.scheme.key(),
            row.snr_db,
            fmt_float(row.ber),
            row.total_bit_errors,
            row.total_bits,
        );
    }
    out
}

/// Selection family: per-SNR semantic-pilot quality (scheme-independent).
pub fn selection_csv(summary: &ExperimentSummary) -> String {
    let mut out = String::from(
        "snr_db,reliability_mean,detection_mean,selection_mean,\
         reliability_undefined,detection_undefined\n",
    );
    let first_scheme = match summary.schemes.first() {
        Some(&s) => s,
        None => return out,
    };
    for row in summary.rows.iter().filter(|r| r.scheme == first_scheme) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.snr_db,
            fmt_opt(row.reliability_mean),
            fmt_opt(row.detection_mean),
            fmt_float(row.selection_mean),
            row.reliability_undefined,
            row.detection_undefined,
        );
    }
    out
}

fn fmt_cell(x: f64) -> String {
    format!("{x:.4e}")
}

/// Human-readable run summary.
pub fn summary_markdown(summary: &ExperimentSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Run summary\n");
    let _ = writeln!(
        out,
        "- trials per SNR: {}\n- master seed: {}\n- corpus substitutions: {}\n- corrector fallbacks: {}\n- length-repaired corrections: {}\n",
        summary.trials,
        summary.master_seed,
        summary.corpus_substitutions,
        summary.corrector_fallbacks,
        summary.length_repaired,
    );

    fn nmse_cell(r: &SchemeAggregate) -> String {
        fmt_cell(r.nmse_mean)
    }
    fn phase_cell(r: &SchemeAggregate) -> String {
        fmt_cell(r.phase_err_mean)
    }
    fn ber_cell(r: &SchemeAggregate) -> String {
        fmt_cell(r.ber)
    }
    fn gamma_cell(r: &SchemeAggregate) -> String {
        r.gamma_nonpositive.to_string()
    }
    fn reliability_cell(r: &SchemeAggregate) -> String {
        fmt_opt(r.reliability_mean)
    }
    fn detection_cell(r: &SchemeAggregate) -> String {
        fmt_opt(r.detection_mean)
    }
    fn selection_cell(r: &SchemeAggregate) -> String {
        fmt_float(r.selection_mean)
    }
    fn rel_undef_cell(r: &SchemeAggregate) -> String {
        r.reliability_undefined.to_string()
    }
    fn det_undef_cell(r: &SchemeAggregate) -> String {
        r.detection_undefined.to_string()
    }

    type Getter = fn(&SchemeAggregate) -> String;

    let snr_header: String =
        summary.snr_db.iter().map(|snr| format!(" {snr} dB |")).collect();
    let rule: String = summary.snr_db.iter().map(|_| "---|").collect();
    let cell = |scheme, snr, f: Getter| -> String {
        summary
            .rows
            .iter()
            .find(|r| r.scheme == scheme && r.snr_db == snr)
            .map(f)
            .unwrap_or_default()
    };

    let scheme_tables: [(&str, Getter); 4] = [
        ("NMSE", nmse_cell),
        ("Phase error (rad)", phase_cell),
        ("BER", ber_cell),
        ("Gamma <= 0 trials", gamma_cell),
    ];
    for (title, getter) in scheme_tables {
        let _ = writeln!(out, "## {title}\n");
        let _ = writeln!(out, "| scheme |{snr_header}");
        let _ = writeln!(out, "|---|{rule}");
        for &scheme in &summary.schemes {
            let cells: String = summary
                .snr_db
                .iter()
                .map(|&snr| format!(" {} |", cell(scheme, snr, getter)))
                .collect();
            let _ = writeln!(out, "| {} |{cells}", scheme.display_name());
        }
        let _ = writeln!(out);
    }

    let _ = writeln!(out, "## Semantic pilot selection\n");
    let _ = writeln!(out, "| metric |{snr_header}");
    let _ = writeln!(out, "|---|{rule}");
    let first_scheme = summary.schemes.first().copied();
    let selection_rows: [(&str, Getter); 5] = [
        ("Reliability", reliability_cell),
        ("Detection rate", detection_cell),
        ("Selection ratio", selection_cell),
        ("Reliability undefined", rel_undef_cell),
        ("Detection undefined", det_undef_cell),
    ];
    for (name, getter) in selection_rows {
        if let Some(scheme) = first_scheme {
            let cells: String = summary
                .snr_db
                .iter()
                .map(|&snr| format!(" {} |", cell(scheme, snr, getter)))
                .collect();
            let _ = writeln!(out, "| {name} |{cells}");
        }
    }
    out
}

/// Writes every report file into `out_dir`.
pub fn write_reports(summary: &ExperimentSummary, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    for (name, content) in [
        ("summary.csv", summary_csv(summary)),
        ("estimation.csv", estimation_csv(summary)),
        ("ber.csv", ber_csv(summary)),
        ("selection.csv", selection_csv(summary)),
        ("summary.md", summary_markdown(summary)),
    ] {
        let path = out_dir.join(name);
        std::fs::write(&path, content)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
