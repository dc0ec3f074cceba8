//! Deterministic CSV and JSON rendering of run results.

use fsoqkd_core::scenario::{BlockRecord, ClassicalRow, RunOutput, ScenarioConfig, SummaryOutcome};

/// Shortest-roundtrip float formatting (Rust's `Display` is deterministic).
fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v}")
    }
}

pub const BLOCK_CSV_HEADER: &str =
    "block_id,T_hat,xi_hat,T_worst,xi_worst,i_ab,chi_be,delta_fs,skr_symbol,skr_bps,discarded";

/// One block per line, columns fixed by [`BLOCK_CSV_HEADER`].
pub fn block_csv(rows: &[BlockRecord]) -> String {
    let mut out = String::from(BLOCK_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let (t_hat, xi_hat, t_worst, xi_worst) = match &row.estimate {
            Some(e) => (e.capital_t_hat, e.xi_hat, e.t_worst, e.xi_worst),
            None => (0.0, 0.0, 0.0, 0.0),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.block_id,
            fmt(t_hat),
            fmt(xi_hat),
            fmt(t_worst),
            fmt(xi_worst),
            fmt(row.report.i_ab),
            fmt(row.report.chi_be),
            fmt(row.report.delta_fs),
            fmt(row.report.skr_symbol),
            fmt(row.report.skr_bps),
            row.report.discarded,
        ));
    }
    out
}

pub const CLASSICAL_CSV_HEADER: &str = "block_id,channel_index,snr_db,ngmi";

pub fn classical_csv(rows: &[ClassicalRow]) -> String {
    let mut out = String::from(CLASSICAL_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.block_id,
            row.channel_index,
            fmt(row.snr_db),
            fmt(row.ngmi)
        ));
    }
    out
}

/// Summary JSON; records the throughput chain used so the bits/s accounting
/// is auditable from the artifact alone.
pub fn summary_json(out: &RunOutput, cfg: &ScenarioConfig) -> String {
    let chain = cfg.throughput_chain();
    let chain_json = format!(
        "{{\"symbol_rate\": {}, \"duty_pilot\": {}, \"duty_calibration\": {}, \
         \"duty_parameter_estimation\": {}}}",
        fmt(chain.symbol_rate),
        fmt(chain.duty_pilot),
        fmt(chain.duty_calibration),
        fmt(chain.duty_parameter_estimation)
    );
    match &out.summary {
        SummaryOutcome::Stats(s) => format!(
            "{{\n  \"n_blocks\": {},\n  \"n_used\": {},\n  \"discard_fraction\": {},\n  \
             \"median_T\": {},\n  \"iqr_T\": {},\n  \"t_outliers\": {},\n  \
             \"median_skr_symbol\": {},\n  \"iqr_skr\": {},\n  \"skr_outliers\": {},\n  \
             \"mean_xi\": {},\n  \"skr_bps_median\": {},\n  \
             \"throughput_chain\": {},\n  \"master_seed\": {}\n}}\n",
            s.n_blocks,
            s.n_used,
            fmt(s.discard_fraction),
            fmt(s.median_t),
            fmt(s.iqr_t),
            s.t_outliers,
            fmt(s.median_skr_symbol),
            fmt(s.iqr_skr),
            s.skr_outliers,
            fmt(s.mean_xi),
            fmt(s.skr_bps_median),
            chain_json,
            cfg.master_seed
        ),
        SummaryOutcome::Empty { n_blocks } => format!(
            "{{\n  \"n_blocks\": {},\n  \"n_used\": 0,\n  \"all_discarded\": true,\n  \
             \"throughput_chain\": {},\n  \"master_seed\": {}\n}}\n",
            n_blocks, chain_json, cfg.master_seed
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fsoqkd_core::scenario::{run, ScenarioConfig};

    fn tiny_run() -> (RunOutput, ScenarioConfig) {
        let cfg = ScenarioConfig {
            turbulence: None,
            preset_label: None,
            n_blocks: 2,
            block_symbols: 20_000,
            pilot_amplitude: 60.0,
            linewidth_hz: 0.0,
            master_seed: 3,
            ..ScenarioConfig::default()
        };
        (run(&cfg).unwrap(), cfg)
    }

    #[test]
    fn csv_has_fixed_columns_and_one_row_per_block() {
        let (out, _) = tiny_run();
        let csv = block_csv(&out.rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), BLOCK_CSV_HEADER);
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 2);
        for row in rows {
            assert_eq!(row.split(',').count(), 11);
        }
    }

    #[test]
    fn rendering_is_deterministic() {
        let (a, cfg) = tiny_run();
        let (b, _) = tiny_run();
        assert_eq!(block_csv(&a.rows), block_csv(&b.rows));
        assert_eq!(summary_json(&a, &cfg), summary_json(&b, &cfg));
    }

    #[test]
    fn summary_json_contains_pinned_keys() {
        let (out, cfg) = tiny_run();
        let json = summary_json(&out, &cfg);
        for key in [
            "median_T",
            "iqr_T",
            "median_skr_symbol",
            "iqr_skr",
            "mean_xi",
            "discard_fraction",
            "skr_bps_median",
            "throughput_chain",
        ] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
    }
}
