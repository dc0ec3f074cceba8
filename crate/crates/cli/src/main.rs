//! Command-line frontend: batch scenario runs, trace fitting, one-shot
//! key-rate and NGMI calculators.
//!
//! Exit codes: 0 success, 2 configuration/argument error, 3 runtime error.

use fsoqkd::config::{parse_config, ConfigError};
use fsoqkd::output::{block_csv, classical_csv, summary_json};
use fsoqkd::runner::run_parallel;
use fsoqkd::tracefile;
use fsoqkd_core::coex::{ngmi, simulate_qam_awgn};
use fsoqkd_core::scenario::ScenarioConfig;
use fsoqkd_core::security::{
    compute_skr, ChannelEstimate, SecurityParams, ThroughputChain,
};
use fsoqkd_core::turbulence::{fit_params, preset, PresetLabel, TurbulenceParams};
use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

const USAGE: &str = "\
fsoqkd <command> [options]

commands:
  run   --config <path> --out <dir> [--preset A..E] [--blocks N] [--seed S]
        [--threads K]
        batch scenario run; writes blocks.csv, summary.json and, when a
        classical lane is configured, classical.csv into <dir>
  fit   --trace <path> [--init-sigma2 X] [--init-gamma X] [--init-a0 X]
        maximum-likelihood fading-parameter fit of a recorded trace
        (two-column text or FSOT binary)
  skr   --va V --T T --xi X --eta E --vel V --beta B --N n --fer F
        [--pe-fraction P] [--eps E] [--worst-case] [--rate R]
        one-shot secret-key-rate report
  ngmi  --snr-db S --order M [--symbols N] [--seed S]
        one-shot NGMI of Gray-mapped QAM over AWGN
";

enum CliError {
    Config(String),
    Runtime(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<fsoqkd_core::Error> for CliError {
    fn from(e: fsoqkd_core::Error) -> Self {
        match e {
            fsoqkd_core::Error::InvalidArgument(m) => CliError::Config(m),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Splits `--key value` pairs and bare `--flag`s (only the known boolean
/// flags are bare).
fn parse_args(args: &[String], flags: &[&str]) -> Result<HashMap<String, String>, CliError> {
    let mut map = HashMap::new();
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        let key = a
            .strip_prefix("--")
            .ok_or_else(|| CliError::Config(format!("unexpected argument '{a}'")))?;
        if flags.contains(&key) {
            map.insert(key.to_string(), "true".to_string());
            i += 1;
            continue;
        }
        let value = args
            .get(i + 1)
            .ok_or_else(|| CliError::Config(format!("missing value for --{key}")))?;
        map.insert(key.to_string(), value.clone());
        i += 2;
    }
    Ok(map)
}

fn need(map: &HashMap<String, String>, key: &str) -> Result<String, CliError> {
    map.get(key)
        .cloned()
        .ok_or_else(|| CliError::Config(format!("missing required option --{key}")))
}

fn get_f64(map: &HashMap<String, String>, key: &str) -> Result<Option<f64>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("--{key}: '{v}' is not a number"))),
    }
}

fn need_f64(map: &HashMap<String, String>, key: &str) -> Result<f64, CliError> {
    get_f64(map, key)?.ok_or_else(|| CliError::Config(format!("missing required option --{key}")))
}

fn cmd_run(args: &[String]) -> Result<(), CliError> {
    let map = parse_args(args, &[])?;
    for key in map.keys() {
        if !["config", "out", "preset", "blocks", "seed", "threads"].contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown option --{key}")));
        }
    }
    let mut cfg: ScenarioConfig = match map.get("config") {
        Some(path) => parse_config(&std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config '{path}': {e}"))
        })?)?,
        None => {
            let mut c = ScenarioConfig::default();
            c.security.n_block = c.block_symbols;
            c
        }
    };
    if let Some(p) = map.get("preset") {
        let label = PresetLabel::parse(p)?;
        cfg.turbulence = Some(preset(label));
        cfg.preset_label = Some(label);
    }
    if let Some(b) = map.get("blocks") {
        cfg.n_blocks = b
            .parse()
            .map_err(|_| CliError::Config(format!("--blocks: '{b}' is not an integer")))?;
    }
    if let Some(s) = map.get("seed") {
        cfg.master_seed = s
            .parse()
            .map_err(|_| CliError::Config(format!("--seed: '{s}' is not an integer")))?;
    }
    let threads: usize = match map.get("threads") {
        Some(t) => t
            .parse()
            .map_err(|_| CliError::Config(format!("--threads: '{t}' is not an integer")))?,
        None => 1,
    };
    let out_dir = PathBuf::from(need(&map, "out")?);
    cfg.validate()?;
    std::fs::create_dir_all(&out_dir)?;

    let output = run_parallel(&cfg, threads.max(1))?;
    std::fs::write(out_dir.join("blocks.csv"), block_csv(&output.rows))?;
    std::fs::write(out_dir.join("summary.json"), summary_json(&output, &cfg))?;
    if !output.classical_rows.is_empty() {
        std::fs::write(
            out_dir.join("classical.csv"),
            classical_csv(&output.classical_rows),
        )?;
    }
    println!("wrote {} block rows to {}", output.rows.len(), out_dir.display());
    Ok(())
}

fn cmd_fit(args: &[String]) -> Result<(), CliError> {
    let map = parse_args(args, &[])?;
    for key in map.keys() {
        if !["trace", "init-sigma2", "init-gamma", "init-a0"].contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown option --{key}")));
        }
    }
    let path = PathBuf::from(need(&map, "trace")?);
    let trace = tracefile::read_path(&path)?;
    let init = TurbulenceParams {
        sigma2_ln: get_f64(&map, "init-sigma2")?.unwrap_or(0.01),
        gamma: get_f64(&map, "init-gamma")?.unwrap_or(3.0),
        a0: get_f64(&map, "init-a0")?.unwrap_or(1.0),
        mean_intensity: 1.0,
        tau_corr_ln: fsoqkd_core::turbulence::DEFAULT_TAU_CORR,
        tau_corr_pe: fsoqkd_core::turbulence::DEFAULT_TAU_CORR,
    };
    let fit = fit_params(&trace, &init)?;
    println!("sigma2_ln={}", fit.params.sigma2_ln);
    println!("gamma={}", fit.params.gamma);
    println!("a0={}", fit.params.a0);
    println!("mean_intensity={}", fit.params.mean_intensity);
    println!("analytic_si={}", fit.params.analytic_si());
    println!("neg_log_likelihood={}", fit.neg_log_likelihood);
    println!("converged={}", fit.converged);
    println!("iterations={}", fit.iterations);
    Ok(())
}

fn cmd_skr(args: &[String]) -> Result<(), CliError> {
    let map = parse_args(args, &["worst-case"])?;
    for key in map.keys() {
        if ![
            "va",
            "T",
            "xi",
            "eta",
            "vel",
            "beta",
            "N",
            "fer",
            "pe-fraction",
            "eps",
            "worst-case",
            "rate",
        ]
        .contains(&key.as_str())
        {
            return Err(CliError::Config(format!("unknown option --{key}")));
        }
    }
    let eps = get_f64(&map, "eps")?.unwrap_or(1e-10);
    let params = SecurityParams {
        va: need_f64(&map, "va")?,
        eta: need_f64(&map, "eta")?,
        v_el: need_f64(&map, "vel")?,
        beta: need_f64(&map, "beta")?,
        n_block: need_f64(&map, "N")? as usize,
        pe_fraction: get_f64(&map, "pe-fraction")?.unwrap_or(0.5),
        fer: need_f64(&map, "fer")?,
        eps_pe: eps,
        eps_smooth: eps,
        use_worst_case: map.contains_key("worst-case"),
    };
    let t = need_f64(&map, "T")?;
    let xi = need_f64(&map, "xi")?;
    let chain = ThroughputChain {
        symbol_rate: get_f64(&map, "rate")?.unwrap_or(250e6),
        ..ThroughputChain::default()
    };
    let est = ChannelEstimate::exact(t, xi, params.eta, params.n_block);
    let report = compute_skr(&est, &params, &chain)?;
    println!("i_ab={}", report.i_ab);
    println!("chi_be={}", report.chi_be);
    println!("delta_fs={}", report.delta_fs);
    println!("skr_raw={}", report.skr_raw);
    println!("skr_symbol={}", report.skr_symbol);
    println!("skr_net_symbol={}", report.skr_net_symbol);
    println!("skr_bps={}", report.skr_bps);
    println!("discarded={}", report.discarded);
    Ok(())
}

fn cmd_ngmi(args: &[String]) -> Result<(), CliError> {
    let map = parse_args(args, &[])?;
    for key in map.keys() {
        if !["snr-db", "order", "symbols", "seed"].contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown option --{key}")));
        }
    }
    let snr_db = need_f64(&map, "snr-db")?;
    let order = need_f64(&map, "order")? as u32;
    let n = get_f64(&map, "symbols")?.unwrap_or(100_000.0) as usize;
    let seed = get_f64(&map, "seed")?.unwrap_or(1.0) as u64;
    let (bits, llrs) = simulate_qam_awgn(order, snr_db, n, seed)?;
    let m = (order as f64).log2() as usize;
    let value = ngmi(&bits, &llrs, m)?;
    println!("ngmi={value}");
    Ok(())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first() else {
        eprintln!("{USAGE}");
        return ExitCode::from(2);
    };
    let rest = &args[1..];
    let result = match command.as_str() {
        "run" => cmd_run(rest),
        "fit" => cmd_fit(rest),
        "skr" => cmd_skr(rest),
        "ngmi" => cmd_ngmi(rest),
        "--help" | "-h" | "help" => {
            println!("{USAGE}");
            return ExitCode::SUCCESS;
        }
        other => {
            eprintln!("unknown command '{other}'\n{USAGE}");
            return ExitCode::from(2);
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
