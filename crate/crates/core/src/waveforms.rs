//! Phase-coded LFM pulse trains on the critically sampled grid, plus the
//! spectral and temporal moments of the delayed radar return.
//!
//! Within each pulse antenna `i` transmits
//! `√(P_rad/M) · exp(jπ(f_B/T_0)(u − T_0/2)² + j(π/2)·b_i)` where `u` is the
//! time since the pulse started, so the chirp sweeps exactly ±f_B/2.
//! Samples are generated on demand; a paper-scale train is 250 000 samples
//! per antenna and there is no need to hold it in memory.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;

use crate::channels::{stream_rng, LinkLabel};
use crate::config::SystemConfig;
use crate::error::{JrcError, Result};

const GRID_SLACK: f64 = 1e-6;

/// Pulse timing expressed on the sample grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseGeometry {
    pub pulses: usize,
    /// Samples per PRI, f_B·T_R.
    pub samples_per_pri: usize,
    /// Samples (chips) per pulse, f_B·T_0.
    pub chips_per_pulse: usize,
    pub f_b: f64,
    pub t_r: f64,
    pub t_0: f64,
}

fn whole(x: f64, what: &str) -> Result<usize> {
    let r = x.round();
    if r < 1.0 || (x - r).abs() > GRID_SLACK * r.max(1.0) {
        return Err(JrcError::DegenerateGeometry(format!(
            "{what} must be a positive whole number of samples, got {x}"
        )));
    }
    Ok(r as usize)
}

impl PulseGeometry {
    pub fn new(f_b: f64, t_r: f64, t_0: f64, pulses: usize) -> Result<Self> {
        if pulses == 0 {
            return Err(JrcError::DegenerateGeometry("no pulses in the CPI".into()));
        }
        let samples_per_pri = whole(f_b * t_r, "f_B*T_R")?;
        let chips_per_pulse = whole(f_b * t_0, "f_B*T_0")?;
        if chips_per_pulse > samples_per_pri {
            return Err(JrcError::DegenerateGeometry("pulse longer than the PRI".into()));
        }
        Ok(Self {
            pulses,
            samples_per_pri,
            chips_per_pulse,
            f_b,
            t_r,
            t_0,
        })
    }

    pub fn from_config(cfg: &SystemConfig) -> Result<Self> {
        Self::new(cfg.f_b, cfg.t_r, cfg.t_0, cfg.pulse_count())
    }

    pub fn sample_count(&self) -> usize {
        self.pulses * self.samples_per_pri
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.f_b
    }

    /// Chips per antenna over the whole train.
    pub fn code_length(&self) -> usize {
        self.pulses * self.chips_per_pulse
    }
}

/// Per-antenna phase codes, one chip per on-pulse sample, values in {−1, 0, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCodes {
    pub chips: Vec<Vec<i8>>,
}

impl PhaseCodes {
    pub fn zeros(antennas: usize, geom: &PulseGeometry) -> Self {
        Self {
            chips: vec![vec![0; geom.code_length()]; antennas],
        }
    }

    /// Independent ±1 sequences, one seeded stream per antenna.
    pub fn pseudo_random(antennas: usize, geom: &PulseGeometry, seed: u64) -> Self {
        let chips = (0..antennas)
            .map(|i| {
                let mut rng = stream_rng(seed, i as u64, LinkLabel::Codes);
                (0..geom.code_length())
                    .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                    .collect()
            })
            .collect();
        Self { chips }
    }

    /// Walsh–Hadamard rows repeated in every pulse.
    ///
    /// Distinct antennas are exactly orthogonal within each pulse, which needs
    /// a power-of-two chip count of at least the antenna count.
    pub fn walsh(antennas: usize, geom: &PulseGeometry) -> Result<Self> {
        let n = geom.chips_per_pulse;
        if !n.is_power_of_two() || antennas > n {
            return Err(JrcError::DegenerateGeometry(format!(
                "Walsh codes need a power-of-two chip count >= {antennas}, got {n}"
            )));
        }
        let chips = (0..antennas)
            .map(|i| {
                let row: Vec<i8> = (0..n)
                    .map(|c| if (i & c).count_ones() % 2 == 0 { 1 } else { -1 })
                    .collect();
                row.iter().copied().cycle().take(geom.code_length()).collect()
            })
            .collect();
        Ok(Self { chips })
    }
}

/// A coded LFM pulse train for `M` transmit antennas.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveform {
    pub geometry: PulseGeometry,
    /// Total radar power P_rad, W.
    pub total_power: f64,
    /// Per-antenna amplitude √(P_rad/M).
    pub amplitude: f64,
    /// π·f_B/T_0, rad/s².
    pub chirp_rate: f64,
    codes: PhaseCodes,
}

/// Synthesize the train for `cfg`, one code sequence per transmit antenna.
pub fn lfm_pulse_train(cfg: &SystemConfig, codes: &PhaseCodes) -> Result<SampledWaveform> {
    let geom = PulseGeometry::from_config(cfg)?;
    SampledWaveform::new(geom, cfg.tx_antennas, cfg.p_rad, codes)
}

impl SampledWaveform {
    pub fn new(
        geometry: PulseGeometry,
        antennas: usize,
        total_power: f64,
        codes: &PhaseCodes,
    ) -> Result<Self> {
        if codes.chips.len() != antennas {
            return Err(JrcError::Validation(format!(
                "{} code sequences for {antennas} antennas",
                codes.chips.len()
            )));
        }
        if let Some(bad) = codes.chips.iter().find(|c| c.len() != geometry.code_length()) {
            return Err(JrcError::Validation(format!(
                "code length {} does not match {} pulses x {} chips",
                bad.len(),
                geometry.pulses,
                geometry.chips_per_pulse
            )));
        }
        Ok(Self {
            geometry,
            total_power,
            amplitude: (total_power / antennas as f64).sqrt(),
            chirp_rate: PI * geometry.f_b / geometry.t_0,
            codes: codes.clone(),
        })
    }

    pub fn antennas(&self) -> usize {
        self.codes.chips.len()
    }

    pub fn len(&self) -> usize {
        self.geometry.sample_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dt(&self) -> f64 {
        self.geometry.dt()
    }

    pub fn time(&self, l: usize) -> f64 {
        l as f64 * self.dt()
    }

    pub fn codes(&self) -> &PhaseCodes {
        &self.codes
    }

    fn chirp(&self, i: usize, pulse: usize, chip: usize, u: f64) -> Complex64 {
        let b = self.codes.chips[i][pulse * self.geometry.chips_per_pulse + chip];
        let x = u - 0.5 * self.geometry.t_0;
        Complex64::from_polar(self.amplitude, self.chirp_rate * x * x + FRAC_PI_2 * b as f64)
    }

    /// Instantaneous angular frequency of the chirp at offset `u` into a pulse.
    fn inst_freq(&self, u: f64) -> f64 {
        2.0 * self.chirp_rate * (u - 0.5 * self.geometry.t_0)
    }

    /// s_i(ℓΔt).
    pub fn sample(&self, i: usize, l: usize) -> Complex64 {
        let g = &self.geometry;
        let (pulse, off) = (l / g.samples_per_pri, l % g.samples_per_pri);
        if pulse >= g.pulses || off >= g.chips_per_pulse {
            return Complex64::new(0.0, 0.0);
        }
        self.chirp(i, pulse, off, off as f64 * self.dt())
    }

    /// ∂s_i/∂t at ℓΔt; the code is piecewise constant and contributes nothing.
    pub fn derivative(&self, i: usize, l: usize) -> Complex64 {
        let off = l % self.geometry.samples_per_pri;
        let s = self.sample(i, l);
        s * Complex64::new(0.0, self.inst_freq(off as f64 * self.dt()))
    }

    /// Map an instant to (pulse, chip, offset into the pulse). Instants within
    /// rounding distance of a grid point snap to it, so that `value_at` on the
    /// grid agrees exactly with `sample`.
    fn locate(&self, t: f64) -> Option<(usize, usize, f64)> {
        let g = &self.geometry;
        let mut x = t * g.f_b;
        if (x - x.round()).abs() < GRID_SLACK {
            x = x.round();
        }
        if !(x >= 0.0) {
            return None;
        }
        let spp = g.samples_per_pri as f64;
        let pulse = (x / spp).floor();
        if pulse >= g.pulses as f64 {
            return None;
        }
        let off = x - pulse * spp;
        if off >= g.chips_per_pulse as f64 {
            return None;
        }
        let chip = (off.floor() as usize).min(g.chips_per_pulse - 1);
        Some((pulse as usize, chip, off * self.dt()))
    }

    /// s_i(t) at an arbitrary instant.
    pub fn value_at(&self, i: usize, t: f64) -> Complex64 {
        match self.locate(t) {
            Some((pulse, chip, u)) => self.chirp(i, pulse, chip, u),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// ∂s_i/∂t at an arbitrary instant.
    pub fn derivative_at(&self, i: usize, t: f64) -> Complex64 {
        match self.locate(t) {
            Some((pulse, chip, u)) => self.chirp(i, pulse, chip, u) * Complex64::new(0.0, self.inst_freq(u)),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Σ_i s_i(t).
    pub fn sum_at(&self, t: f64) -> Complex64 {
        (0..self.antennas()).map(|i| self.value_at(i, t)).sum()
    }

    /// Σ_i ∂s_i/∂t.
    pub fn sum_derivative_at(&self, t: f64) -> Complex64 {
        (0..self.antennas()).map(|i| self.derivative_at(i, t)).sum()
    }

    /// Δt·Σ_ℓ |s_i(ℓΔt)|².
    pub fn antenna_energy(&self, i: usize) -> f64 {
        self.dt() * (0..self.len()).map(|l| self.sample(i, l).norm_sqr()).sum::<f64>()
    }

    /// Σ_i Σ_ℓ |s_i(ℓΔt)|², the discrete counterpart of ξ_r.
    pub fn discrete_energy(&self) -> f64 {
        (0..self.antennas())
            .map(|i| (0..self.len()).map(|l| self.sample(i, l).norm_sqr()).sum::<f64>())
            .sum()
    }

    /// Dense `M × L` sample matrix.
    pub fn materialize(&self) -> Vec<Vec<Complex64>> {
        (0..self.antennas())
            .map(|i| (0..self.len()).map(|l| self.sample(i, l)).collect())
            .collect()
    }

    /// Dense `M × L` derivative matrix.
    pub fn materialize_derivative(&self) -> Vec<Vec<Complex64>> {
        (0..self.antennas())
            .map(|i| (0..self.len()).map(|l| self.derivative(i, l)).collect())
            .collect()
    }

    /// Write `t, re_0, im_0, re_1, im_1, …` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io = |source| JrcError::Io {
            path: path.display().to_string(),
            source,
        };
        let file = std::fs::File::create(path).map_err(io)?;
        let mut out = std::io::BufWriter::new(file);
        let mut header = String::from("t");
        for i in 0..self.antennas() {
            header.push_str(&format!(",re_{i},im_{i}"));
        }
        writeln!(out, "{header}").map_err(io)?;
        for l in 0..self.len() {
            let mut row = format!("{:.11e}", self.time(l));
            for i in 0..self.antennas() {
                let s = self.sample(i, l);
                row.push_str(&format!(",{:.11e},{:.11e}", s.re, s.im));
            }
            writeln!(out, "{row}").map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

/// Spectral and temporal moments of the delayed return, summed over antennas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveformMoments {
    /// B_rms², Hz².
    pub b_rms2: f64,
    /// Δt·Σ t²|S(t−τ)|².
    pub m_t2: f64,
    /// Δt·Σ 2t·Im{S*(t−τ)·∂S(t−τ)/∂τ}.
    pub m_cross: f64,
    /// Δt·Σ |S(t−τ)|².
    pub energy: f64,
}

impl WaveformMoments {
    /// Energy-weighted mean of t².
    pub fn normalized_t2(&self) -> f64 {
        if self.energy > 0.0 {
            self.m_t2 / self.energy
        } else {
            0.0
        }
    }

    /// Energy-weighted mean of the cross term.
    pub fn normalized_cross(&self) -> f64 {
        if self.energy > 0.0 {
            self.m_cross / self.energy
        } else {
            0.0
        }
    }
}

/// Σ f²|S(f)|² and Σ |S(f)|² of one row, frequencies centred on DC.
fn spectral_sums(planner: &mut FftPlanner<f64>, mut buf: Vec<Complex64>, f_b: f64) -> (f64, f64) {
    let n = buf.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    planner.plan_fft_forward(n).process(&mut buf);
    let (mut num, mut den) = (0.0, 0.0);
    for (k, v) in buf.iter().enumerate() {
        let centred = if k < n.div_ceil(2) {
            k as f64
        } else {
            k as f64 - n as f64
        };
        let f = centred * f_b / n as f64;
        let p = v.norm_sqr();
        num += f * f * p;
        den += p;
    }
    (num, den)
}

fn average_bandwidth(rows: impl Iterator<Item = Vec<Complex64>>, f_b: f64) -> Result<f64> {
    let mut planner = FftPlanner::<f64>::new();
    let (mut acc, mut used) = (0.0, 0usize);
    for row in rows {
        let (num, den) = spectral_sums(&mut planner, row, f_b);
        if den > 0.0 {
            acc += num / den;
            used += 1;
        }
    }
    if used == 0 {
        return Err(JrcError::Domain("rms bandwidth of an all-zero waveform".into()));
    }
    Ok(acc / used as f64)
}

/// B_rms² of arbitrary per-antenna sample rows, averaged over the rows that
/// carry energy.
pub fn rms_bandwidth_of(rows: &[Vec<Complex64>], f_b: f64) -> Result<f64> {
    average_bandwidth(rows.iter().cloned(), f_b)
}

/// B_rms² of the pulse train.
pub fn rms_bandwidth(w: &SampledWaveform) -> Result<f64> {
    let rows = (0..w.antennas()).map(|i| (0..w.len()).map(|l| w.sample(i, l)).collect());
    average_bandwidth(rows, w.geometry.f_b)
}

/// Moments of the return delayed by `tau`, with t measured from CPI start.
pub fn temporal_moments(w: &SampledWaveform, tau: f64) -> Result<WaveformMoments> {
    if !(0.0..w.geometry.t_r).contains(&tau) {
        return Err(JrcError::Domain(format!(
            "delay {tau} s outside [0, T_R = {} s)",
            w.geometry.t_r
        )));
    }
    let dt = w.dt();
    let (mut m_t2, mut m_cross, mut energy) = (0.0, 0.0, 0.0);
    for i in 0..w.antennas() {
        for l in 0..w.len() {
            let t = w.time(l);
            let s = w.value_at(i, t - tau);
            let p = s.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let ds_dtau = -w.derivative_at(i, t - tau);
            energy += p;
            m_t2 += t * t * p;
            m_cross += 2.0 * t * (s.conj() * ds_dtau).im;
        }
    }
    let b_rms2 = if energy > 0.0 { rms_bandwidth(w)? } else { 0.0 };
    Ok(WaveformMoments {
        b_rms2,
        m_t2: dt * m_t2,
        m_cross: dt * m_cross,
        energy: dt * energy,
    })
}
