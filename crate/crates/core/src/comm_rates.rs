//! Downlink and uplink rate bounds, the interference ledger behind them,
//! the CRB-limited residual radar power and Monte Carlo rate estimates.

use std::f64::consts::PI;

use serde::Serialize;

use crate::channels::{draw_channel, stream_rng, LinkLabel};
use crate::config::SystemConfig;
use crate::radar_est::CrbMatrix;
use crate::waveforms::WaveformMoments;

/// Every interference term entering the two SINR denominators, in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterferenceLedger {
    pub dl_dl: f64,
    pub dl_rad: f64,
    pub dl_ul: f64,
    pub ul_ul: f64,
    pub ul_dl: f64,
    pub ul_rad: f64,
}

impl InterferenceLedger {
    /// Ledger for simultaneous operation with a given radar-return suppression.
    pub fn new(cfg: &SystemConfig, k_rad_effective: f64) -> Self {
        let csi_dl = 1.0 - cfg.rho_dl * cfg.rho_dl;
        let csi_ul = 1.0 - cfg.rho_ul * cfg.rho_ul;
        let (om_dl, om_ul) = (cfg.omega_dl(), cfg.omega_ul());
        Self {
            dl_dl: csi_dl * om_dl * cfg.p_dl,
            dl_rad: csi_dl * om_dl * cfg.p_rad,
            dl_ul: cfg.k_co * cfg.p_ul,
            ul_ul: csi_ul * om_ul * cfg.p_ul,
            ul_dl: (cfg.k_self + cfg.k_boun) * cfg.p_dl,
            ul_rad: (cfg.k_self + k_rad_effective) * cfg.p_rad,
        }
    }

    /// Ledger with the radar switched off (orthogonal sharing).
    pub fn radar_free(cfg: &SystemConfig) -> Self {
        Self {
            dl_rad: 0.0,
            ul_rad: 0.0,
            ..Self::new(cfg, 0.0)
        }
    }

    pub fn dl_denominator(&self, sigma_z2: f64) -> f64 {
        self.dl_dl + self.dl_rad + self.dl_ul + sigma_z2
    }

    pub fn ul_denominator(&self, sigma_z2: f64) -> f64 {
        self.ul_ul + self.ul_dl + self.ul_rad + sigma_z2
    }
}

/// f_B·log₂(1 + ρ₁²·M·P_dl·Ω_dl / denominator) for an explicit ledger and band.
pub fn downlink_rate_with(cfg: &SystemConfig, ledger: &InterferenceLedger, bandwidth: f64) -> f64 {
    let signal = cfg.rho_dl * cfg.rho_dl * cfg.tx_antennas as f64 * cfg.p_dl * cfg.omega_dl();
    bandwidth * (1.0 + signal / ledger.dl_denominator(cfg.sigma_z2)).log2()
}

/// f_B·log₂(1 + ρ₂²·N·P_ul·Ω_ul / denominator) for an explicit ledger and band.
pub fn uplink_rate_with(cfg: &SystemConfig, ledger: &InterferenceLedger, bandwidth: f64) -> f64 {
    let signal = cfg.rho_ul * cfg.rho_ul * cfg.rx_antennas as f64 * cfg.p_ul * cfg.omega_ul();
    bandwidth * (1.0 + signal / ledger.ul_denominator(cfg.sigma_z2)).log2()
}

/// Downlink rate bound in bits/s.
pub fn downlink_rate_bound(cfg: &SystemConfig) -> f64 {
    downlink_rate_with(cfg, &InterferenceLedger::new(cfg, 0.0), cfg.f_b)
}

/// Uplink rate bound in bits/s with radar suppression `k_rad_effective`.
pub fn uplink_rate_bound(cfg: &SystemConfig, k_rad_effective: f64) -> f64 {
    uplink_rate_with(cfg, &InterferenceLedger::new(cfg, k_rad_effective), cfg.f_b)
}

/// Bound on the residual radar-return power after reconstruction and
/// subtraction with CRB-limited parameter estimates, one CRB per target.
///
/// The moments are energy-normalised so that only the estimator floor
/// K_t·σ₀²/(δ·T_c·f_B) remains when every CRB entry vanishes.
pub fn residual_radar_power(cfg: &SystemConfig, crbs: &[CrbMatrix], moments: &WaveformMoments) -> f64 {
    let scale = cfg.tx_antennas as f64 * cfg.p_rad;
    let (t2, cross) = (moments.normalized_t2(), moments.normalized_cross());
    let crb_part: f64 = crbs
        .iter()
        .map(|c| {
            let v =
                4.0 * PI * PI * moments.b_rms2 * c.tau_tau() + t2 * c.omega_omega() + cross * c.tau_omega();
            scale * v.max(0.0)
        })
        .sum();
    let floor = cfg.targets as f64 * cfg.sigma_02 / (cfg.duty * cfg.t_c * cfg.f_b);
    crb_part + floor
}

/// K_rad* = P_I / P_rad.
pub fn k_rad_star(cfg: &SystemConfig, crbs: &[CrbMatrix], moments: &WaveformMoments) -> f64 {
    residual_radar_power(cfg, crbs, moments) / cfg.p_rad
}

/// Warning text when a configured suppression beats the theoretical limit.
pub fn suppression_warning(k_rad: f64, k_star: f64) -> Option<String> {
    (k_rad < k_star).then(|| {
        format!("unachievable suppression: K_rad = {k_rad:.3e} is below the limit K_rad* = {k_star:.3e}")
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Link {
    Downlink,
    Uplink,
}

/// Sample mean of an instantaneous rate and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
}

/// Monte Carlo mean of f_B·log₂(1 + SINR) with MRT/MRC towards the channel
/// estimate, over `trials` independent draws.
///
/// Trial `t` always uses the same random stream, so the estimate does not
/// depend on how many threads run it.
pub fn mc_rate(cfg: &SystemConfig, link: Link, k_rad_effective: f64, trials: usize, seed: u64) -> McEstimate {
    mc_rate_with(
        cfg,
        link,
        &InterferenceLedger::new(cfg, k_rad_effective),
        cfg.f_b,
        trials,
        seed,
    )
}

/// [`mc_rate`] for an explicit ledger and band.
pub fn mc_rate_with(
    cfg: &SystemConfig,
    link: Link,
    ledger: &InterferenceLedger,
    bandwidth: f64,
    trials: usize,
    seed: u64,
) -> McEstimate {
    let (omega, n, rho, power, denom, label) = match link {
        Link::Downlink => (
            cfg.omega_dl(),
            cfg.tx_antennas,
            cfg.rho_dl,
            cfg.p_dl,
            ledger.dl_denominator(cfg.sigma_z2),
            LinkLabel::Downlink,
        ),
        Link::Uplink => (
            cfg.omega_ul(),
            cfg.rx_antennas,
            cfg.rho_ul,
            cfg.p_ul,
            ledger.ul_denominator(cfg.sigma_z2),
            LinkLabel::Uplink,
        ),
    };
    let one = |t: usize| {
        let mut rng = stream_rng(seed, t as u64, label);
        let h = draw_channel(omega, n, rho, &mut rng);
        bandwidth * (1.0 + rho * rho * h.est_energy() * power / denom).log2()
    };

    #[cfg(feature = "parallel")]
    let samples: Vec<f64> = {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let samples: Vec<f64> = (0..trials).map(one).collect();

    let n_t = samples.len().max(1) as f64;
    let mean = samples.iter().sum::<f64>() / n_t;
    let var = if samples.len() > 1 {
        samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n_t - 1.0)
    } else {
        0.0
    };
    McEstimate {
        mean,
        std_err: (var / n_t).sqrt(),
        trials,
    }
}

/// Monte Carlo columns attached to a [`RatePoint`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McColumns {
    pub r_dl: McEstimate,
    pub r_ul: McEstimate,
}

/// One fully evaluated operating point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePoint {
    pub scheme: String,
    pub p_rad: f64,
    pub p_dl: f64,
    pub p_ul: f64,
    pub t_c: f64,
    pub r_dl: f64,
    pub r_ul: f64,
    pub r_theta: f64,
    pub r_dist: f64,
    pub r_vel: f64,
    /// Suppression factor actually used for the uplink.
    pub k_rad_resolved: f64,
    /// Theoretical suppression limit at this point, when it was computed.
    pub k_rad_star: Option<f64>,
    pub ledger: InterferenceLedger,
    pub sigma_z2: f64,
    /// Radar noise level σ̄² used for the CRBs.
    pub sigma_bar2: f64,
    pub mc: Option<McColumns>,
}
