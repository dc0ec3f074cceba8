//! Parameter estimation and secret-key-rate computation: heterodyne mutual
//! information, trusted-noise Holevo bounds (closed form, numeric symplectic
//! oracle, and a discrete-modulation variant), finite-size penalties and
//! throughput accounting.

pub mod estimate;
pub mod holevo;
pub mod skr;

pub use estimate::{estimate_channel, ChannelEstimate};
pub use holevo::{
    correlation_bound_z, entropy_g, holevo_bound_discrete, holevo_bound_gaussian,
    holevo_from_cm, holevo_numeric_oracle,
};
pub use skr::{compute_skr, finite_size_penalty, mutual_information, SkrReport, ThroughputChain};

use crate::{Error, Result};
use alloc::format;

/// Security-evaluation parameters for a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityParams {
    /// Modulation variance, SNU.
    pub va: f64,
    /// Detector quantum efficiency (trusted).
    pub eta: f64,
    /// Electronic noise, SNU (trusted).
    pub v_el: f64,
    /// Reconciliation efficiency.
    pub beta: f64,
    /// Quantum symbols per block.
    pub n_block: usize,
    /// Fraction of quantum symbols disclosed for parameter estimation.
    pub pe_fraction: f64,
    /// Frame error rate of the (external) error-correction stage.
    pub fer: f64,
    /// Parameter-estimation confidence epsilon.
    pub eps_pe: f64,
    /// Smoothing epsilon of the finite-size penalty.
    pub eps_smooth: f64,
    /// Evaluate the Holevo bound at the worst-case parameter bounds instead
    /// of the point estimates.
    pub use_worst_case: bool,
}

impl Default for SecurityParams {
    fn default() -> Self {
        SecurityParams {
            va: 8.0,
            eta: 0.35,
            v_el: 0.1,
            beta: 0.95,
            n_block: 1_000_000,
            pe_fraction: 0.5,
            fer: 0.1,
            eps_pe: 1e-10,
            eps_smooth: 1e-10,
            use_worst_case: false,
        }
    }
}

impl SecurityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "beta outside (0,1]: {}",
                self.beta
            )));
        }
        if !(self.pe_fraction > 0.0 && self.pe_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "pe_fraction outside (0,1): {}",
                self.pe_fraction
            )));
        }
        if !(self.fer >= 0.0 && self.fer < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "fer outside [0,1): {}",
                self.fer
            )));
        }
        for (name, eps) in [("eps_pe", self.eps_pe), ("eps_smooth", self.eps_smooth)] {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} outside (0,1): {eps}"
                )));
            }
        }
        if !(self.va > 0.0) {
            return Err(Error::InvalidArgument("va must be > 0".into()));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidArgument("eta outside (0,1]".into()));
        }
        if !(self.v_el >= 0.0) {
            return Err(Error::InvalidArgument("v_el must be >= 0".into()));
        }
        if self.n_block == 0 {
            return Err(Error::InvalidArgument("n_block must be > 0".into()));
        }
        Ok(())
    }
}
