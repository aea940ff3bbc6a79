use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::{EstimationSetup, Target};
use crate::error::{JrcError, Result};
use crate::waveforms::SampledWaveform;

/// Minimum distance from endfire, rad, for the direction bound.
pub const ENDFIRE_GUARD: f64 = 1e-3;

/// Delay-Doppler block of the CRB for the LFM train.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LfmCrb {
    /// s².
    pub tau_tau: f64,
    /// (rad/s)².
    pub omega_omega: f64,
    /// rad.
    pub tau_omega: f64,
}

/// Direction CRB for a half-wavelength ULA in white noise:
/// 6σ̄² / (|α|²·N(N²−1)·ξ_r·π²cos²θ).
pub fn crb_theta_closed(setup: &EstimationSetup, target: &Target) -> Result<f64> {
    if target.theta.abs() >= FRAC_PI_2 - ENDFIRE_GUARD {
        return Err(JrcError::Domain(format!(
            "direction {} rad within {ENDFIRE_GUARD} rad of endfire",
            target.theta
        )));
    }
    if setup.n_rx < 2 {
        return Err(JrcError::Domain(
            "direction bound needs at least two receive antennas".into(),
        ));
    }
    let n = setup.n_rx as f64;
    let c = target.theta.cos();
    Ok(6.0 * setup.sigma_bar2 / (target.alpha.norm_sqr() * n * (n * n - 1.0) * setup.xi() * PI * PI * c * c))
}

/// α-projected delay-Doppler Fisher block from discrete sums over the grid,
/// `[[F′ττ, F′τω], [F′τω, F′ωω]]`, for white noise of level `sigma_bar2`.
///
/// Sums run per transmit antenna, i.e. the codes are taken as orthogonal.
pub fn fim_tau_omega_general(
    w: &SampledWaveform,
    target: &Target,
    sigma_bar2: f64,
    n_rx: usize,
) -> [[f64; 2]; 2] {
    let (mut e, mut e_t, mut e_t2, mut e_d) = (0.0, 0.0, 0.0, 0.0);
    let mut ds = Complex64::new(0.0, 0.0);
    let mut t_ds = Complex64::new(0.0, 0.0);
    for i in 0..w.antennas() {
        for l in 0..w.len() {
            let s = w.sample(i, l);
            let p = s.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let d = w.derivative(i, l);
            let t = w.time(l);
            e += p;
            e_t += t * p;
            e_t2 += t * t * p;
            e_d += d.norm_sqr();
            ds += d.conj() * s;
            t_ds += t * d.conj() * s;
        }
    }
    let g = 2.0 * n_rx as f64 * target.alpha.norm_sqr() / sigma_bar2;
    let tt = g * (e_d - ds.norm_sqr() / e);
    let to = g * (t_ds.im - ds.im * e_t / e);
    let oo = g * (e_t2 - e_t * e_t / e);
    [[tt, to], [to, oo]]
}

/// Closed-form delay and Doppler CRBs for the LFM train in white noise.
///
/// With G = 2N|α|²/σ̄² and E = δ·T_c·P_rad·f_B the Fisher block is
/// G·E·[[π²f_B²/3, −πf_B·T_0/6], [·, ((K²−1)T_R² + T_0²)/12]], whose
/// determinant is proportional to (K²−1)T_R², so a single pulse carries no
/// Doppler information.
pub fn crb_lfm_closed(setup: &EstimationSetup, target: &Target) -> Result<LfmCrb> {
    let k = setup.pulses() as f64;
    let spread = (k * k - 1.0) * setup.t_r * setup.t_r;
    if !(spread > 0.0) {
        return Err(JrcError::DegenerateGeometry(format!(
            "{} pulse(s): delay and Doppler cannot be separated",
            setup.pulses()
        )));
    }
    let fb = setup.f_b;
    let t0 = setup.t_0;
    let energy = setup.duty() * setup.t_c * setup.p_rad * fb;
    let g = 2.0 * setup.n_rx as f64 * target.alpha.norm_sqr() / setup.sigma_bar2;
    let a = PI * PI * fb * fb / 3.0;
    let b = -PI * fb * t0 / 6.0;
    let c = (spread + t0 * t0) / 12.0;
    let det = g * energy * (a * c - b * b);
    Ok(LfmCrb {
        tau_tau: c / det,
        omega_omega: a / det,
        tau_omega: -b / det,
    })
}
