//! Browser bindings for the rate-region, CPI and waveform views.
//!
//! Each export takes plain numbers or TOML text and returns a JSON string.
//! The `*_json` functions are the same operations for native callers.

use fdjrc_core::config::{dbm_to_watts, parse_config, SystemConfig, DEFAULT_SCENARIO};
use fdjrc_core::scenarios::{cpi_sweep, sweep_region, SchemeSpec, SweepAxis, SweepSpec};
use fdjrc_core::waveforms::{rms_bandwidth, PhaseCodes, PulseGeometry, SampledWaveform};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Result<T> = std::result::Result<T, String>;

fn config(text: &str) -> Result<SystemConfig> {
    if text.trim().is_empty() {
        return parse_config(DEFAULT_SCENARIO).map_err(|e| e.to_string());
    }
    parse_config(text).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CurveView {
    scheme: String,
    axis_dbm: Vec<f64>,
    r_dl: Vec<f64>,
    r_ul: Vec<f64>,
    r_theta: Vec<f64>,
    r_dist: Vec<f64>,
    r_vel: Vec<f64>,
    k_rad: Vec<f64>,
}

/// Sweep `axis` (`p_ul`, `p_dl` or `p_rad`) from `start_dbm` to `stop_dbm`
/// for every scheme in the comma-separated list. The stop value becomes the
/// configured maximum for the swept power.
pub fn rate_region_json(
    config_toml: &str,
    axis: &str,
    start_dbm: f64,
    stop_dbm: f64,
    count: usize,
    schemes: &str,
) -> Result<String> {
    let axis: SweepAxis = axis.parse().map_err(|e: fdjrc_core::JrcError| e.to_string())?;
    if !axis.is_power() {
        return Err("region sweeps run over p_ul, p_dl or p_rad".into());
    }
    if count == 0 || count > 400 {
        return Err("point count must be between 1 and 400".into());
    }
    if stop_dbm.is_nan() || start_dbm.is_nan() || stop_dbm < start_dbm {
        return Err("stop must not be below start".into());
    }
    let cfg = axis
        .apply(&config(config_toml)?, dbm_to_watts(stop_dbm))
        .map_err(|e| e.to_string())?;
    let dbm: Vec<f64> = (0..count)
        .map(|k| {
            if count == 1 {
                stop_dbm
            } else {
                start_dbm + (stop_dbm - start_dbm) * k as f64 / (count - 1) as f64
            }
        })
        .collect();
    let spec = SweepSpec::new(axis, dbm.iter().map(|d| dbm_to_watts(*d)).collect());
    let mut curves = Vec::new();
    for s in schemes.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let scheme: SchemeSpec = s.parse().map_err(|e: fdjrc_core::JrcError| e.to_string())?;
        let c = sweep_region(&cfg, scheme, &spec).map_err(|e| e.to_string())?;
        let col = |f: fn(&fdjrc_core::comm_rates::RatePoint) -> f64| c.points.iter().map(f).collect();
        curves.push(CurveView {
            scheme: c.scheme.clone(),
            axis_dbm: dbm.clone(),
            r_dl: col(|p| p.r_dl),
            r_ul: col(|p| p.r_ul),
            r_theta: col(|p| p.r_theta),
            r_dist: col(|p| p.r_dist),
            r_vel: col(|p| p.r_vel),
            k_rad: col(|p| p.k_rad_resolved),
        });
    }
    to_json(&curves)
}

/// Estimation information per CPI and per second for CPI lengths on a
/// grid in milliseconds. Each length must be a whole number of PRIs.
pub fn cpi_curve_json(config_toml: &str, start_ms: f64, stop_ms: f64, count: usize) -> Result<String> {
    if count == 0 || count > 400 {
        return Err("point count must be between 1 and 400".into());
    }
    let cfg = config(config_toml)?;
    let grid: Vec<f64> = (0..count)
        .map(|k| {
            let ms = if count == 1 {
                start_ms
            } else {
                start_ms + (stop_ms - start_ms) * k as f64 / (count - 1) as f64
            };
            ms * 1e-3
        })
        .collect();
    to_json(&cpi_sweep(&cfg, &grid).map_err(|e| e.to_string())?)
}

#[derive(Serialize)]
struct WaveformView {
    time_us: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
    freq_khz: Vec<f64>,
    spectrum_db: Vec<f64>,
    rms_bandwidth_khz: f64,
}

/// First PRI of antenna 0 of a coded LFM train, plus the centred magnitude
/// spectrum of the whole train for that antenna.
pub fn lfm_waveform_json(
    f_b_khz: f64,
    t_r_us: f64,
    t_0_us: f64,
    pulses: usize,
    antennas: usize,
) -> Result<String> {
    if pulses == 0 || pulses > 64 || antennas == 0 || antennas > 16 {
        return Err("use 1..64 pulses and 1..16 antennas".into());
    }
    let geom =
        PulseGeometry::new(f_b_khz * 1e3, t_r_us * 1e-6, t_0_us * 1e-6, pulses).map_err(|e| e.to_string())?;
    if geom.sample_count() > 1 << 16 {
        return Err(format!(
            "{} samples is more than the demo draws",
            geom.sample_count()
        ));
    }
    let codes =
        PhaseCodes::walsh(antennas, &geom).unwrap_or_else(|_| PhaseCodes::pseudo_random(antennas, &geom, 1));
    let w = SampledWaveform::new(geom, antennas, 1.0, &codes).map_err(|e| e.to_string())?;

    let first: Vec<Complex64> = (0..geom.samples_per_pri).map(|l| w.sample(0, l)).collect();
    let mut buf: Vec<Complex64> = (0..w.len()).map(|l| w.sample(0, l)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    let n = buf.len();
    let peak = buf
        .iter()
        .map(|c| c.norm_sqr())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    // fftshift so DC sits in the middle
    let order: Vec<usize> = (0..n).map(|k| (k + n.div_ceil(2)) % n).collect();
    let freq_khz = order
        .iter()
        .map(|&k| {
            let signed = if k >= n.div_ceil(2) {
                k as f64 - n as f64
            } else {
                k as f64
            };
            signed * f_b_khz / n as f64
        })
        .collect();
    let spectrum_db = order
        .iter()
        .map(|&k| 10.0 * (buf[k].norm_sqr() / peak).max(1e-12).log10())
        .collect();

    to_json(&WaveformView {
        time_us: (0..first.len()).map(|l| w.time(l) * 1e6).collect(),
        re: first.iter().map(|c| c.re).collect(),
        im: first.iter().map(|c| c.im).collect(),
        freq_khz,
        spectrum_db,
        rms_bandwidth_khz: rms_bandwidth(&w).map_err(|e| e.to_string())?.sqrt() * 1e-3,
    })
}

fn js<T>(r: Result<T>) -> std::result::Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// The built-in baseline scenario as TOML.
#[wasm_bindgen(js_name = defaultConfig)]
pub fn default_config() -> String {
    DEFAULT_SCENARIO.to_string()
}

#[wasm_bindgen(js_name = rateRegion)]
pub fn rate_region(
    config_toml: &str,
    axis: &str,
    start_dbm: f64,
    stop_dbm: f64,
    count: usize,
    schemes: &str,
) -> std::result::Result<String, JsError> {
    js(rate_region_json(
        config_toml,
        axis,
        start_dbm,
        stop_dbm,
        count,
        schemes,
    ))
}

#[wasm_bindgen(js_name = cpiCurve)]
pub fn cpi_curve(
    config_toml: &str,
    start_ms: f64,
    stop_ms: f64,
    count: usize,
) -> std::result::Result<String, JsError> {
    js(cpi_curve_json(config_toml, start_ms, stop_ms, count))
}

#[wasm_bindgen(js_name = lfmWaveform)]
pub fn lfm_waveform(
    f_b_khz: f64,
    t_r_us: f64,
    t_0_us: f64,
    pulses: usize,
    antennas: usize,
) -> std::result::Result<String, JsError> {
    js(lfm_waveform_json(f_b_khz, t_r_us, t_0_us, pulses, antennas))
}
