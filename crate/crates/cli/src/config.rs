//! Scenario configuration files: flat `key = value` entries grouped into
//! `[section]` headers. Unknown sections or keys are errors (fail closed).

use fsoqkd_core::coex::ClassicalPlan;
use fsoqkd_core::scenario::{CalibrationMode, ClassicalConfig, ScenarioConfig};
use fsoqkd_core::turbulence::{preset, PresetLabel, TurbulenceParams, DEFAULT_TAU_CORR};

/// Configuration-file or argument error; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .map_err(|_| ConfigError(format!("key '{key}': '{v}' is not a number")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize, ConfigError> {
    // Accept scientific notation for counts (1e6 etc).
    if let Ok(n) = v.parse::<usize>() {
        return Ok(n);
    }
    let f = parse_f64(key, v)?;
    if f >= 0.0 && f.fract() == 0.0 && f <= usize::MAX as f64 {
        Ok(f as usize)
    } else {
        Err(ConfigError(format!(
            "key '{key}': '{v}' is not a non-negative integer"
        )))
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(ConfigError(format!("key '{key}': '{v}' is not a boolean"))),
    }
}

#[derive(Default)]
struct TurbOverride {
    sigma2_ln: Option<f64>,
    gamma: Option<f64>,
    a0: Option<f64>,
    mean_intensity: Option<f64>,
    tau_corr_ln: Option<f64>,
    tau_corr_pe: Option<f64>,
}

#[derive(Default)]
struct ClassicalOverride {
    n_channels: Option<usize>,
    baud: Option<f64>,
    bits_per_symbol: Option<u32>,
    fec_rate: Option<f64>,
    grid_spacing_hz: Option<f64>,
    center_freq_hz: Option<f64>,
    base_snr_db: Option<f64>,
    n_symbols: Option<usize>,
    channel_index: Option<usize>,
}

/// Parses a configuration text into a [`ScenarioConfig`], starting from the
/// defaults. `security.n_block` always tracks `block_symbols`.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig::default();
    let mut section = String::from("scenario");
    let mut turbulence_enabled = true;
    let mut turb = TurbOverride::default();
    let mut classical = ClassicalOverride::default();
    let mut saw_classical = false;
    let mut saw_turb_section = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = name.trim().to_lowercase();
            match section.as_str() {
                "scenario" | "security" | "turbulence" | "classical" => {}
                other => {
                    return Err(ConfigError(format!(
                        "line {}: unknown section '[{other}]'",
                        lineno + 1
                    )))
                }
            }
            if section == "classical" {
                saw_classical = true;
            }
            if section == "turbulence" {
                saw_turb_section = true;
            }
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            ConfigError(format!("line {}: expected 'key = value'", lineno + 1))
        })?;
        let key = key.trim();
        let v = value.trim();
        let fail = |k: &str| -> ConfigError {
            ConfigError(format!(
                "line {}: unknown key '{k}' in section [{section}]",
                lineno + 1
            ))
        };
        match section.as_str() {
            "scenario" => match key {
                "preset" => {
                    let label = PresetLabel::parse(v)
                        .map_err(|e| ConfigError(format!("line {}: {e}", lineno + 1)))?;
                    cfg.turbulence = Some(preset(label));
                    cfg.preset_label = Some(label);
                }
                "turbulence" => turbulence_enabled = parse_bool(key, v)?,
                "n_blocks" => cfg.n_blocks = parse_usize(key, v)?,
                "block_symbols" => cfg.block_symbols = parse_usize(key, v)?,
                "symbol_rate" => cfg.symbol_rate = parse_f64(key, v)?,
                "pilot_ratio" => cfg.pilot_ratio = parse_f64(key, v)?,
                "pilot_amplitude" => cfg.pilot_amplitude = parse_f64(key, v)?,
                "constellation_order" => cfg.constellation_order = parse_usize(key, v)? as u32,
                "shaping_nu" => cfg.shaping_nu = parse_f64(key, v)?,
                "path_transmittance" => cfg.path_transmittance = parse_f64(key, v)?,
                "xi_injected" => cfg.xi_injected = parse_f64(key, v)?,
                "leak_photons" => cfg.leak_photons = parse_f64(key, v)?,
                "freq_offset_hz" => cfg.freq_offset_hz = parse_f64(key, v)?,
                "linewidth_hz" => cfg.linewidth_hz = parse_f64(key, v)?,
                "phase_window" => cfg.phase_window = parse_usize(key, v)?,
                "min_pilot_snr_db" => cfg.min_pilot_snr_db = parse_f64(key, v)?,
                "estimate_frequency" => cfg.estimate_frequency = parse_bool(key, v)?,
                "duty_pilot" => cfg.duty_pilot = parse_f64(key, v)?,
                "duty_calibration" => cfg.duty_calibration = parse_f64(key, v)?,
                "duty_parameter_estimation" => {
                    cfg.duty_parameter_estimation = parse_f64(key, v)?
                }
                "turbulence_sample_rate" => cfg.turbulence_sample_rate = parse_f64(key, v)?,
                "capture_period_s" => cfg.capture_period_s = parse_f64(key, v)?,
                "calibration" => {
                    cfg.calibration = if v == "ideal" {
                        CalibrationMode::Ideal
                    } else if let Some(n) = v.strip_prefix("simulated:") {
                        CalibrationMode::Simulated {
                            n_samples: parse_usize(key, n)?,
                        }
                    } else {
                        return Err(ConfigError(format!(
                            "line {}: calibration must be 'ideal' or 'simulated:<n>'",
                            lineno + 1
                        )));
                    }
                }
                "master_seed" => cfg.master_seed = parse_usize(key, v)? as u64,
                _ => return Err(fail(key)),
            },
            "security" => match key {
                "va" => cfg.security.va = parse_f64(key, v)?,
                "eta" => cfg.security.eta = parse_f64(key, v)?,
                "v_el" => cfg.security.v_el = parse_f64(key, v)?,
                "beta" => cfg.security.beta = parse_f64(key, v)?,
                "pe_fraction" => cfg.security.pe_fraction = parse_f64(key, v)?,
                "fer" => cfg.security.fer = parse_f64(key, v)?,
                "eps_pe" => cfg.security.eps_pe = parse_f64(key, v)?,
                "eps_smooth" => cfg.security.eps_smooth = parse_f64(key, v)?,
                "use_worst_case" => cfg.security.use_worst_case = parse_bool(key, v)?,
                _ => return Err(fail(key)),
            },
            "turbulence" => match key {
                "sigma2_ln" => turb.sigma2_ln = Some(parse_f64(key, v)?),
                "gamma" => turb.gamma = Some(parse_f64(key, v)?),
                "a0" => turb.a0 = Some(parse_f64(key, v)?),
                "mean_intensity" => turb.mean_intensity = Some(parse_f64(key, v)?),
                "tau_corr_ln" => turb.tau_corr_ln = Some(parse_f64(key, v)?),
                "tau_corr_pe" => turb.tau_corr_pe = Some(parse_f64(key, v)?),
                _ => return Err(fail(key)),
            },
            "classical" => match key {
                "n_channels" => classical.n_channels = Some(parse_usize(key, v)?),
                "baud" => classical.baud = Some(parse_f64(key, v)?),
                "bits_per_symbol" => {
                    classical.bits_per_symbol = Some(parse_usize(key, v)? as u32)
                }
                "fec_rate" => classical.fec_rate = Some(parse_f64(key, v)?),
                "grid_spacing_hz" => classical.grid_spacing_hz = Some(parse_f64(key, v)?),
                "center_freq_hz" => classical.center_freq_hz = Some(parse_f64(key, v)?),
                "base_snr_db" => classical.base_snr_db = Some(parse_f64(key, v)?),
                "n_symbols" => classical.n_symbols = Some(parse_usize(key, v)?),
                "channel_index" => classical.channel_index = Some(parse_usize(key, v)?),
                _ => return Err(fail(key)),
            },
            _ => unreachable!(),
        }
    }

    if saw_turb_section {
        let gamma = turb
            .gamma
            .ok_or_else(|| ConfigError("[turbulence] requires 'gamma'".into()))?;
        let sigma2_ln = turb
            .sigma2_ln
            .ok_or_else(|| ConfigError("[turbulence] requires 'sigma2_ln'".into()))?;
        let a0 = turb.a0.unwrap_or(1.0);
        let beta = gamma * gamma;
        let mean_intensity = turb.mean_intensity.unwrap_or(a0 * beta / (beta + 1.0));
        cfg.turbulence = Some(TurbulenceParams {
            sigma2_ln,
            gamma,
            a0,
            mean_intensity,
            tau_corr_ln: turb.tau_corr_ln.unwrap_or(DEFAULT_TAU_CORR),
            tau_corr_pe: turb.tau_corr_pe.unwrap_or(DEFAULT_TAU_CORR),
        });
        cfg.preset_label = None;
    }
    if !turbulence_enabled {
        cfg.turbulence = None;
        cfg.preset_label = None;
    }
    if saw_classical {
        cfg.classical = Some(ClassicalConfig {
            plan: ClassicalPlan {
                n_channels: classical.n_channels.unwrap_or(15),
                baud: classical.baud.unwrap_or(45e9),
                bits_per_symbol: classical.bits_per_symbol.unwrap_or(6),
                fec_rate: classical.fec_rate.unwrap_or(0.75),
                grid_spacing_hz: classical.grid_spacing_hz.unwrap_or(50e9),
                center_freq_hz: classical.center_freq_hz.unwrap_or(192.4e12),
            },
            base_snr_db: classical.base_snr_db.unwrap_or(17.0),
            n_symbols: classical.n_symbols.unwrap_or(10_000),
            channel_index: classical.channel_index.unwrap_or(7),
        });
    }
    cfg.security.n_block = cfg.block_symbols;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip_through_empty_config() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.n_blocks, 48);
        assert_eq!(cfg.security.n_block, cfg.block_symbols);
    }

    #[test]
    fn full_config_parses() {
        let text = "
[scenario]
preset = E
n_blocks = 12         # comment
block_symbols = 1e5
master_seed = 7
calibration = simulated:50000

[security]
beta = 0.93
use_worst_case = true

[classical]
n_channels = 15
base_snr_db = 16.5
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.n_blocks, 12);
        assert_eq!(cfg.block_symbols, 100_000);
        assert_eq!(cfg.security.n_block, 100_000);
        assert_eq!(cfg.security.beta, 0.93);
        assert!(cfg.security.use_worst_case);
        assert_eq!(cfg.preset_label, Some(PresetLabel::E));
        assert!(matches!(
            cfg.calibration,
            CalibrationMode::Simulated { n_samples: 50_000 }
        ));
        let c = cfg.classical.unwrap();
        assert_eq!(c.plan.n_channels, 15);
        assert_eq!(c.base_snr_db, 16.5);
    }

    #[test]
    fn unknown_keys_fail_closed() {
        assert!(parse_config("[scenario]\nblocks = 3\n").is_err());
        assert!(parse_config("[scenario]\nn_blocks = 3\nfrobnicate = 1\n").is_err());
        assert!(parse_config("[mystery]\nx = 1\n").is_err());
        assert!(parse_config("[security]\nva = eight\n").is_err());
        assert!(parse_config("no_equals_sign\n").is_err());
    }

    #[test]
    fn explicit_turbulence_overrides_preset() {
        let text = "
[scenario]
preset = A

[turbulence]
sigma2_ln = 0.02
gamma = 3.0
";
        let cfg = parse_config(text).unwrap();
        let t = cfg.turbulence.unwrap();
        assert_eq!(t.gamma, 3.0);
        assert_eq!(t.sigma2_ln, 0.02);
        assert_eq!(cfg.preset_label, None);
        // Physical default mean: beta / (beta + 1).
        assert!((t.mean_intensity - 9.0 / 10.0).abs() < 1e-12);
    }

    #[test]
    fn turbulence_off_clears_model() {
        let cfg = parse_config("[scenario]\nturbulence = off\n").unwrap();
        assert!(cfg.turbulence.is_none());
    }
}
