use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::comm_rates::{k_rad_star, mc_rate, uplink_rate_bound, Link};
use crate::config::{RadarSuppression, SystemConfig};
use crate::error::Result;
use crate::radar_est::{
    assemble_fim, crb_lfm_closed, crb_theta_closed, fim_tau_omega_general, reduce_crb, CrbMatrix, DynVar,
    EstimationSetup, NoiseModel, Target,
};
use crate::scenarios::waveform_moments;
use crate::waveforms::{PhaseCodes, PulseGeometry, SampledWaveform};

/// One line of the `validate` report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl CheckResult {
    fn below(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            limit,
            passed: value.is_finite() && value < limit,
        }
    }

    fn failed(name: &str, limit: f64) -> Self {
        Self {
            name: name.to_string(),
            value: f64::NAN,
            limit,
            passed: false,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

struct DeskInstance {
    target: Target,
    wave: SampledWaveform,
    setup: EstimationSetup,
}

fn desk_instance(rng: &mut ChaCha8Rng) -> Result<DeskInstance> {
    let n_rx = [2, 4, 8][rng.random_range(0..3)];
    let m_tx = [1, 2, 4][rng.random_range(0..3)];
    let (f_b, k_max) = if rng.random::<bool>() {
        (80e3, 6)
    } else {
        (160e3, 3)
    };
    let pulses = rng.random_range(2..=k_max);
    let (t_r, t_0) = (5e-4, 1e-4);
    let geom = PulseGeometry::new(f_b, t_r, t_0, pulses)?;
    let p_rad = rng.random_range(0.05..2.0);
    let wave = SampledWaveform::new(geom, m_tx, p_rad, &PhaseCodes::walsh(m_tx, &geom)?)?;
    let alpha2: f64 = rng.random_range(0.1..1.0);
    let target = Target {
        alpha: Complex64::from_polar(alpha2.sqrt(), rng.random_range(-PI..PI)),
        theta: rng.random_range(-PI / 3.0..PI / 3.0),
        tau: rng.random_range(0.0..t_r - t_0),
        omega: rng.random_range(-2000.0..2000.0),
        dyn_var: DynVar {
            theta: 1.0,
            dist: 1.0,
            vel: 1.0,
        },
    };
    let setup = EstimationSetup {
        n_rx,
        f_b,
        t_c: pulses as f64 * t_r,
        t_r,
        t_0,
        p_rad,
        sigma_bar2: rng.random_range(0.5..2.0),
    };
    Ok(DeskInstance { target, wave, setup })
}

/// Closed-form direction bound against the dense Fisher path, and the
/// direction cross terms of the dense CRB.
fn direction_checks(instances: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst, mut cross) = (0.0f64, 0.0f64);
    for _ in 0..instances {
        let d = desk_instance(&mut rng)?;
        let noise = NoiseModel::white(d.setup.n_rx, d.wave.len(), d.setup.sigma_bar2);
        let crb = reduce_crb(&assemble_fim(&d.target, &d.wave, &noise)?)?;
        worst = worst.max(rel(crb_theta_closed(&d.setup, &d.target)?, crb.theta_theta()));
        let th = crb.theta_theta();
        cross = cross
            .max(crb.theta_tau().abs() / (th * crb.tau_tau()).sqrt())
            .max(crb.theta_omega().abs() / (th * crb.omega_omega()).sqrt());
    }
    Ok((worst, cross))
}

/// Closed-form delay/Doppler bounds against the general discrete block.
fn lfm_check() -> Result<f64> {
    let mut worst = 0.0f64;
    for pulses in [2, 4, 8] {
        let geom = PulseGeometry::new(200e3, 1e-3, 1e-4, pulses)?;
        let wave = SampledWaveform::new(geom, 1, 0.1, &PhaseCodes::zeros(1, &geom))?;
        let target = Target {
            alpha: Complex64::new(0.5, 0.0),
            theta: 0.0,
            tau: 0.0,
            omega: 0.0,
            dyn_var: DynVar {
                theta: 1.0,
                dist: 1.0,
                vel: 1.0,
            },
        };
        let setup = EstimationSetup {
            n_rx: 4,
            f_b: 200e3,
            t_c: pulses as f64 * 1e-3,
            t_r: 1e-3,
            t_0: 1e-4,
            p_rad: 0.1,
            sigma_bar2: 1.0,
        };
        let f = fim_tau_omega_general(&wave, &target, setup.sigma_bar2, setup.n_rx);
        let det = f[0][0] * f[1][1] - f[0][1] * f[0][1];
        let closed = crb_lfm_closed(&setup, &target)?;
        worst = worst
            .max(rel(closed.tau_tau, f[1][1] / det))
            .max(rel(closed.omega_omega, f[0][0] / det));
    }
    Ok(worst)
}

/// Relative Jensen gap of the uplink, or NaN if the Monte Carlo mean
/// exceeds the bound.
fn jensen_gap(cfg: &SystemConfig, trials: usize, seed: u64) -> f64 {
    let k = match cfg.k_rad {
        RadarSuppression::Fixed(k) => k,
        RadarSuppression::TheoreticalLimit => 0.0,
    };
    let bound = uplink_rate_bound(cfg, k);
    let mc = mc_rate(cfg, Link::Uplink, k, trials, seed).mean;
    if mc > bound {
        f64::NAN
    } else {
        1.0 - mc / bound
    }
}

fn floor_check(cfg: &SystemConfig) -> Result<f64> {
    let moments = waveform_moments(cfg)?;
    let got = k_rad_star(cfg, &vec![CrbMatrix::zeros(); cfg.targets], &moments);
    let duty = cfg.t_0 / cfg.t_r;
    let want = cfg.targets as f64 * cfg.sigma_02 / (duty * cfg.t_c * cfg.f_b * cfg.p_rad);
    Ok(rel(got, want))
}

/// Closed forms against the numeric paths, the Jensen bound against Monte
/// Carlo, and the suppression floor at the loaded scenario.
pub fn run_validation(cfg: &SystemConfig, trials: usize, seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    match direction_checks(20, seed) {
        Ok((agree, cross)) => {
            out.push(CheckResult::below(
                "direction CRB closed vs dense (rel)",
                agree,
                1e-2,
            ));
            out.push(CheckResult::below("direction cross terms (rel)", cross, 1e-8));
        }
        Err(_) => {
            out.push(CheckResult::failed("direction CRB closed vs dense (rel)", 1e-2));
            out.push(CheckResult::failed("direction cross terms (rel)", 1e-8));
        }
    }
    out.push(match lfm_check() {
        Ok(v) => CheckResult::below("LFM delay/Doppler closed vs general (rel)", v, 1e-2),
        Err(_) => CheckResult::failed("LFM delay/Doppler closed vs general (rel)", 1e-2),
    });
    out.push(CheckResult::below(
        "uplink Jensen gap (rel)",
        jensen_gap(cfg, trials, seed),
        2e-2,
    ));
    out.push(match floor_check(cfg) {
        Ok(v) => CheckResult::below("suppression floor (rel)", v, 1e-12),
        Err(_) => CheckResult::failed("suppression floor (rel)", 1e-12),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_pass() {
        let results = run_validation(&SystemConfig::paper_defaults(), 2000, 3);
        for r in &results {
            assert!(r.passed, "{r:?}");
        }
        assert_eq!(results.len(), 5);
    }
}
