//! Fisher information and Cramér-Rao bounds for direction, delay and Doppler
//! of a point target, and the estimation rates derived from them.
//!
//! Two routes are provided. [`assemble_fim`] builds the full 5×5 Fisher
//! matrix over (Re α, Im α, θ, τ, ω) from a sampled return and arbitrary
//! Kronecker-structured noise; [`reduce_crb`] takes the Schur complement of
//! the α block and inverts. The closed forms ([`crb_theta_closed`],
//! [`crb_lfm_closed`]) cover white noise, a half-wavelength ULA and the LFM
//! pulse train, and are what the scenario layer uses at full scale.

mod closed;
mod fim;

pub use closed::{crb_lfm_closed, crb_theta_closed, fim_tau_omega_general, LfmCrb, ENDFIRE_GUARD};
pub use fim::{
    assemble_fim, assemble_fim_with_limit, radar_return_samples, reduce_crb, RadarReturn, DEFAULT_DENSE_LIMIT,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::config::SystemConfig;

pub const RE_ALPHA: usize = 0;
pub const IM_ALPHA: usize = 1;
pub const THETA: usize = 2;
pub const TAU: usize = 3;
pub const OMEGA: usize = 4;

/// Variances of the target's dynamic process between CPIs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynVar {
    /// rad².
    pub theta: f64,
    /// m².
    pub dist: f64,
    /// (m/s)².
    pub vel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    /// Combined path loss and reflection factor.
    pub alpha: Complex64,
    /// Direction, rad.
    pub theta: f64,
    /// Round-trip delay, s.
    pub tau: f64,
    /// Doppler, rad/s.
    pub omega: f64,
    pub dyn_var: DynVar,
}

impl Target {
    /// The configured default target with a real reflection factor.
    pub fn from_config(cfg: &SystemConfig) -> Self {
        Self {
            alpha: Complex64::new(cfg.alpha_sq().sqrt(), 0.0),
            theta: cfg.target.theta,
            tau: cfg.target_delay(),
            omega: cfg.target_doppler(),
            dyn_var: DynVar {
                theta: cfg.target.sigma_theta2,
                dist: cfg.target.sigma_d2,
                vel: cfg.target.sigma_v2,
            },
        }
    }
}

/// Noise covariance Γ ⊗ Λ of the stacked (time ⊗ space) return.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    /// Λ, N×N.
    pub spatial: DMatrix<Complex64>,
    /// Γ, L×L.
    pub temporal: DMatrix<Complex64>,
    /// Equivalent white level; exact when both factors are scaled identities.
    pub combined_scalar: f64,
}

impl NoiseModel {
    /// Λ = σ̄²·I_N, Γ = I_L.
    pub fn white(n_rx: usize, samples: usize, sigma_bar2: f64) -> Self {
        Self {
            spatial: DMatrix::from_diagonal_element(n_rx, n_rx, Complex64::new(sigma_bar2, 0.0)),
            temporal: DMatrix::identity(samples, samples),
            combined_scalar: sigma_bar2,
        }
    }

    pub fn new(spatial: DMatrix<Complex64>, temporal: DMatrix<Complex64>) -> Self {
        let mean_diag =
            |m: &DMatrix<Complex64>| m.diagonal().iter().map(|c| c.re).sum::<f64>() / m.nrows().max(1) as f64;
        let combined_scalar = mean_diag(&spatial) * mean_diag(&temporal);
        Self {
            spatial,
            temporal,
            combined_scalar,
        }
    }
}

/// 5×5 Fisher information over (Re α, Im α, θ, τ, ω).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherMatrix {
    pub m: [[f64; 5]; 5],
}

impl FisherMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }
}

/// 3×3 Cramér-Rao bound over (θ, τ, ω).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrbMatrix {
    pub m: [[f64; 3]; 3],
}

impl CrbMatrix {
    pub fn zeros() -> Self {
        Self { m: [[0.0; 3]; 3] }
    }

    /// Assemble from the decoupled direction bound and the delay-Doppler block.
    pub fn from_parts(theta_theta: f64, lfm: &LfmCrb) -> Self {
        Self {
            m: [
                [theta_theta, 0.0, 0.0],
                [0.0, lfm.tau_tau, lfm.tau_omega],
                [0.0, lfm.tau_omega, lfm.omega_omega],
            ],
        }
    }

    pub fn theta_theta(&self) -> f64 {
        self.m[0][0]
    }
    pub fn tau_tau(&self) -> f64 {
        self.m[1][1]
    }
    pub fn omega_omega(&self) -> f64 {
        self.m[2][2]
    }
    pub fn tau_omega(&self) -> f64 {
        self.m[1][2]
    }
    pub fn theta_tau(&self) -> f64 {
        self.m[0][1]
    }
    pub fn theta_omega(&self) -> f64 {
        self.m[0][2]
    }
}

/// The quantities the closed-form bounds depend on, so that sharing schemes
/// can shrink the band, the CPI or the noise without touching the config.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationSetup {
    pub n_rx: usize,
    /// Radar bandwidth, Hz.
    pub f_b: f64,
    /// Radar CPI, s.
    pub t_c: f64,
    pub t_r: f64,
    pub t_0: f64,
    pub p_rad: f64,
    /// White interference-plus-noise level σ̄², W.
    pub sigma_bar2: f64,
}

impl EstimationSetup {
    pub fn from_config(cfg: &SystemConfig) -> Self {
        Self {
            n_rx: cfg.rx_antennas,
            f_b: cfg.f_b,
            t_c: cfg.t_c,
            t_r: cfg.t_r,
            t_0: cfg.t_0,
            p_rad: cfg.p_rad,
            sigma_bar2: cfg.radar_noise_level(),
        }
    }

    pub fn duty(&self) -> f64 {
        self.t_0 / self.t_r
    }

    pub fn pulses(&self) -> usize {
        (self.t_c / self.t_r).round() as usize
    }

    /// ξ_r = f_B·T_c·δ·P_rad.
    pub fn xi(&self) -> f64 {
        self.f_b * self.t_c * self.duty() * self.p_rad
    }
}

/// Information rates in bits/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EstimationRates {
    pub r_theta: f64,
    pub r_dist: f64,
    pub r_vel: f64,
}

impl std::ops::Add for EstimationRates {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            r_theta: self.r_theta + o.r_theta,
            r_dist: self.r_dist + o.r_dist,
            r_vel: self.r_vel + o.r_vel,
        }
    }
}

impl std::iter::Sum for EstimationRates {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), |a, b| a + b)
    }
}

/// Per-target estimation rates over a CPI of length `t_c`.
///
/// Delay and Doppler bounds are mapped to range and velocity with
/// d = c₀τ/2 and v = c₀ω/(2ω_c).
pub fn estimation_rates(
    crb: &CrbMatrix,
    target: &Target,
    t_c: f64,
    c0: f64,
    omega_c: f64,
) -> EstimationRates {
    let rate = |ratio: f64| (1.0 + ratio).log2() / t_c;
    let dv = &target.dyn_var;
    EstimationRates {
        r_theta: rate(dv.theta / crb.theta_theta()),
        r_dist: rate(4.0 / (c0 * c0) * dv.dist / crb.tau_tau()),
        r_vel: rate(4.0 * omega_c * omega_c / (c0 * c0) * dv.vel / crb.omega_omega()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn target() -> Target {
        Target::from_config(&SystemConfig::paper_defaults())
    }

    #[test]
    fn matched_variance_gives_one_bit_per_cpi() {
        let t = target();
        let crb = CrbMatrix {
            m: [[t.dyn_var.theta, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        };
        let r = estimation_rates(&crb, &t, 0.05, 3e8, 1e9);
        assert_eq!(r.r_theta, 1.0 / 0.05);
    }

    #[test]
    fn vanishing_information() {
        let t = target();
        let crb = CrbMatrix {
            m: [[1e300, 0.0, 0.0], [0.0, 1e300, 0.0], [0.0, 0.0, 1e300]],
        };
        let r = estimation_rates(&crb, &t, 0.05, 3e8, 1e9);
        assert!(r.r_theta < 1e-290 && r.r_dist < 1e-290 && r.r_vel < 1e-290);
    }

    #[test]
    fn rates_add_over_targets() {
        let a = EstimationRates {
            r_theta: 1.0,
            r_dist: 2.0,
            r_vel: 3.0,
        };
        let s: EstimationRates = [a, a, a].into_iter().sum();
        assert_eq!(
            s,
            EstimationRates {
                r_theta: 3.0,
                r_dist: 6.0,
                r_vel: 9.0
            }
        );
    }

    #[test]
    fn default_target() {
        let cfg = SystemConfig::paper_defaults();
        let t = Target::from_config(&cfg);
        assert!((t.alpha.norm_sqr() - 0.25).abs() < 1e-15);
        assert!((t.tau - 400.0 / 3e8).abs() < 1e-20);
    }
}
