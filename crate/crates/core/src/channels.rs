//! Rayleigh channel draws with imperfect CSI, path-loss statistics and
//! ULA steering vectors.

use std::f64::consts::{FRAC_PI_2, LN_10, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::PathLoss;
use crate::error::{JrcError, Result};

/// Which link a random stream belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum LinkLabel {
    Downlink = 1,
    Uplink = 2,
    Shadowing = 3,
    Codes = 4,
}

/// Independent, reproducible generator for one (trial, link) pair.
///
/// The stream id packs the link label above the trial counter, so results
/// never depend on how trials are distributed over workers.
pub fn stream_rng(seed: u64, trial: u64, label: LinkLabel) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((label as u64) << 48) ^ trial);
    rng
}

/// Uniform linear array response toward `theta` (half-wavelength spacing).
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    pub theta: f64,
    pub values: Vec<Complex64>,
    /// ∂a/∂θ.
    pub derivative: Vec<Complex64>,
}

impl SteeringVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn steering(theta: f64, n: usize) -> Result<SteeringVector> {
    if !(theta.abs() < FRAC_PI_2) {
        return Err(JrcError::Domain(format!(
            "steering direction must satisfy |theta| < pi/2, got {theta}"
        )));
    }
    let (s, c) = theta.sin_cos();
    let values: Vec<Complex64> = (0..n)
        .map(|k| {
            if k == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, k as f64 * PI * s)
            }
        })
        .collect();
    let derivative = values
        .iter()
        .enumerate()
        .map(|(k, v)| Complex64::new(0.0, k as f64 * PI * c) * v)
        .collect();
    Ok(SteeringVector {
        theta,
        values,
        derivative,
    })
}

/// Ω = E[10^(β/10)] / (1 + (d/d0)^l) with β ~ N(0, σ_s²) in dB.
pub fn mean_pathloss_gain(pl: &PathLoss, d: f64) -> f64 {
    let s = pl.shadowing_std_db * LN_10 / 10.0;
    (0.5 * s * s).exp() / (1.0 + (d / pl.d0).powf(pl.exponent))
}

/// One shadowed gain realisation 10^(β/10) / (1 + (d/d0)^l).
pub fn draw_pathloss_gain<R: Rng + ?Sized>(pl: &PathLoss, d: f64, rng: &mut R) -> f64 {
    let beta: f64 = rng.sample::<f64, _>(StandardNormal) * pl.shadowing_std_db;
    10f64.powf(beta / 10.0) / (1.0 + (d / pl.d0).powf(pl.exponent))
}

/// Circular complex Gaussian with E|x|² = `var`.
pub fn complex_gaussian<R: Rng + ?Sized>(var: f64, rng: &mut R) -> Complex64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// A channel realisation split into its estimate and estimation error.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub h_true: Vec<Complex64>,
    pub h_est: Vec<Complex64>,
    pub eps: Vec<Complex64>,
    pub rho: f64,
    pub omega: f64,
}

impl ChannelDraw {
    /// Σ|h_est|².
    pub fn est_energy(&self) -> f64 {
        self.h_est.iter().map(|h| h.norm_sqr()).sum()
    }
}

/// Draw h = ρ·ĥ + √(1−ρ²)·ε with ĥ, ε i.i.d. CN(0, Ω).
///
/// With ρ = 1 no error samples are drawn and `eps` is all zero.
pub fn draw_channel<R: Rng + ?Sized>(omega: f64, n: usize, rho: f64, rng: &mut R) -> ChannelDraw {
    let h_est: Vec<Complex64> = (0..n).map(|_| complex_gaussian(omega, rng)).collect();
    let eps: Vec<Complex64> = if rho >= 1.0 {
        vec![Complex64::new(0.0, 0.0); n]
    } else {
        (0..n).map(|_| complex_gaussian(omega, rng)).collect()
    };
    let w = (1.0 - rho * rho).max(0.0).sqrt();
    let h_true = h_est.iter().zip(&eps).map(|(h, e)| h * rho + e * w).collect();
    ChannelDraw {
        h_true,
        h_est,
        eps,
        rho,
        omega,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(sigma: f64) -> PathLoss {
        PathLoss {
            shadowing_std_db: sigma,
            d0: 200.0,
            exponent: 3.8,
            d_dl: 500.0,
            d_ul: 500.0,
        }
    }

    #[test]
    fn steering_examples() {
        let a = steering(0.0, 4).unwrap();
        assert!(a.values.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        for (k, d) in a.derivative.iter().enumerate() {
            assert!((d - Complex64::new(0.0, k as f64 * PI)).norm() < 1e-15);
        }
        assert_eq!(a.derivative[0], Complex64::new(0.0, 0.0));

        let a = steering(PI / 6.0, 2).unwrap();
        assert!((a.values[1] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let a = steering(-PI / 6.0, 2).unwrap();
        assert!((a.values[1] - Complex64::new(0.0, -1.0)).norm() < 1e-15);

        assert!(steering(FRAC_PI_2, 4).is_err());
        assert!(steering(-2.0, 4).is_err());
    }

    #[test]
    fn pathloss_examples() {
        let mut p = pl(0.0);
        p.d0 = 1.0;
        assert_eq!(mean_pathloss_gain(&p, 1.0), 0.5);
        assert!((mean_pathloss_gain(&pl(0.0), 500.0) - 0.029832).abs() < 1e-6);
        // 0.5·exp((0.8·ln10)²/2)
        assert!((mean_pathloss_gain(&pl(8.0), 200.0) - 2.727_70).abs() < 1e-5);
    }

    #[test]
    fn pathloss_mean_matches_sampling() {
        let p = pl(8.0);
        let mut rng = stream_rng(7, 0, LinkLabel::Shadowing);
        let n = 1_000_000;
        let mean = (0..n)
            .map(|_| draw_pathloss_gain(&p, 500.0, &mut rng))
            .sum::<f64>()
            / n as f64;
        let exact = mean_pathloss_gain(&p, 500.0);
        assert!((mean / exact - 1.0).abs() < 0.02, "{mean} vs {exact}");
    }

    #[test]
    fn perfect_csi_is_exact() {
        let mut rng = stream_rng(1, 0, LinkLabel::Uplink);
        let d = draw_channel(1.0, 16, 1.0, &mut rng);
        assert_eq!(d.h_true, d.h_est);
    }

    #[test]
    fn second_moments_and_correlation() {
        let mut rng = stream_rng(3, 0, LinkLabel::Downlink);
        let (n, draws) = (64, 100_000 / 64 + 1);
        let (mut e_true, mut e_est, mut cross) = (0.0, 0.0, 0.0);
        let mut count = 0.0;
        for _ in 0..draws {
            let d = draw_channel(1.0, n, 0.95, &mut rng);
            for (t, e) in d.h_true.iter().zip(&d.h_est) {
                e_true += t.norm_sqr();
                e_est += e.norm_sqr();
                cross += (t * e.conj()).re;
                count += 1.0;
            }
        }
        assert!((e_true / count - 1.0).abs() < 0.01);
        let corr = cross / (e_true * e_est).sqrt();
        assert!((corr - 0.95).abs() < 0.01, "{corr}");
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = stream_rng(5, 3, LinkLabel::Uplink).random();
        let b: f64 = stream_rng(5, 3, LinkLabel::Uplink).random();
        let c: f64 = stream_rng(5, 4, LinkLabel::Uplink).random();
        let d: f64 = stream_rng(5, 3, LinkLabel::Downlink).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }
}
