//! CSV emission of aggregate rows.

use std::io::Write;

use crate::association::Tier;
use crate::error::{Error, Result};

use super::aggregate::AggregateMetrics;

pub const CSV_COLUMNS: [&str; 24] = [
    "axis_name",
    "axis_value",
    "env",
    "beta",
    "n_trials",
    "n_ue_total",
    "C1",
    "C1_ci",
    "C2",
    "C2_ci",
    "coverage_gain",
    "frac_decoupled",
    "frac_decoupled_ci",
    "share_dl_macro",
    "share_dl_smm",
    "share_dl_suhf",
    "share_ul_macro",
    "share_ul_smm",
    "share_ul_suhf",
    "mean_rate_dl_bps",
    "mean_rate_ul_dude_bps",
    "mean_rate_ul_coupled_bps",
    "median_rate_ul_dude_bps",
    "median_rate_ul_coupled_bps",
];

/// One output line: the swept axis, the environment and its metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub axis_name: String,
    pub axis_value: f64,
    pub env: String,
    pub beta: f64,
    pub metrics: AggregateMetrics,
}

/// Formats with 6 significant digits, `%g` style: fixed notation for
/// exponents in [-4, 6), scientific otherwise, trailing zeros trimmed.
/// Non-finite values print as `NaN`, `inf`, `-inf`.
pub fn format_sig6(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.') } else { s }
}

fn record(row: &ResultRow) -> Vec<String> {
    let m = &row.metrics;
    let mut out = vec![
        row.axis_name.clone(),
        format_sig6(row.axis_value),
        row.env.clone(),
        format_sig6(row.beta),
        m.n_trials.to_string(),
        m.n_ue_total.to_string(),
        format_sig6(m.c1),
        format_sig6(m.c1_ci),
        format_sig6(m.c2),
        format_sig6(m.c2_ci),
        format_sig6(m.coverage_gain.unwrap_or(f64::NAN)),
        format_sig6(m.frac_decoupled),
        format_sig6(m.frac_decoupled_ci),
    ];
    out.extend(Tier::ALL.iter().map(|t| format_sig6(m.share_dl[t.index()])));
    out.extend(Tier::ALL.iter().map(|t| format_sig6(m.share_ul[t.index()])));
    out.extend(
        [
            m.mean_rate_dl_bps,
            m.mean_rate_ul_dude_bps,
            m.mean_rate_ul_coupled_bps,
            m.median_rate_ul_dude_bps,
            m.median_rate_ul_coupled_bps,
        ]
        .map(format_sig6),
    );
    out
}

/// Writes the header and one line per row.
pub fn write_csv<W: Write>(rows: &[ResultRow], destination: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::invalid("no rows to write"));
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(destination);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}
