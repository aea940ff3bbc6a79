//! Scenario parameters, unit conversions and derived quantities.
//!
//! A [`SystemConfig`] is parsed from a flat TOML document whose keys mirror
//! the field names. Powers are given in dBm (`*_dbm` keys) and stored in
//! watts; suppression factors may be given linear (`k_self`) or in dB
//! (`k_self_db`). Everything downstream works in linear SI units.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::Deserialize;

use crate::channels::mean_pathloss_gain;
use crate::error::{JrcError, Result};

/// Built-in baseline scenario document.
pub const DEFAULT_SCENARIO: &str = include_str!("../defaults.toml");

/// Relative slack used when checking that T_c is a whole number of PRIs.
const GRID_TOLERANCE: f64 = 1e-9;

pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    10f64.powf(p_dbm / 10.0) * 1e-3
}

pub fn watts_to_dbm(p_watts: f64) -> f64 {
    10.0 * (p_watts * 1e3).log10()
}

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Radar-return suppression factor K_rad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadarSuppression {
    /// A fixed linear factor in [0, 1].
    Fixed(f64),
    /// Resolved per operating point from the CRB-limited residual power.
    TheoreticalLimit,
}

impl RadarSuppression {
    pub fn label(&self) -> String {
        match self {
            RadarSuppression::Fixed(k) => format!("fixed:{k:e}"),
            RadarSuppression::TheoreticalLimit => "theoretical-limit".to_string(),
        }
    }
}

/// Large-scale fading model: log-normal shadowing over a bounded path-loss law.
#[derive(Debug, Clone, PartialEq)]
pub struct PathLoss {
    /// Shadowing standard deviation in dB.
    pub shadowing_std_db: f64,
    /// Reference distance, m.
    pub d0: f64,
    pub exponent: f64,
    /// Downlink user distance, m.
    pub d_dl: f64,
    /// Uplink user distance, m.
    pub d_ul: f64,
}

/// Default target geometry and dynamic-process variances.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSetup {
    /// One-way range to the target, m.
    pub range: f64,
    /// Direction, rad.
    pub theta: f64,
    /// Radial velocity, m/s.
    pub velocity: f64,
    /// |α|² override; `None` uses the two-way path-loss gain at `range`.
    pub alpha_sq: Option<f64>,
    /// Direction variance, rad².
    pub sigma_theta2: f64,
    /// Range variance, m².
    pub sigma_d2: f64,
    /// Velocity variance, (m/s)².
    pub sigma_v2: f64,
}

/// Every scalar parameter of a joint radar-communication scenario.
///
/// Fields are public for read access; build modified copies through
/// [`SystemConfig::validate`] after changing them.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    /// Radar transmit power, W.
    pub p_rad: f64,
    /// Downlink transmit power, W.
    pub p_dl: f64,
    /// Uplink transmit power, W.
    pub p_ul: f64,
    /// Shared bandwidth, Hz.
    pub f_b: f64,
    /// Coherent processing interval, s.
    pub t_c: f64,
    /// Pulse repetition interval, s.
    pub t_r: f64,
    /// Pulse width, s.
    pub t_0: f64,
    /// Duty factor T_0 / T_R.
    pub duty: f64,
    pub rho_dl: f64,
    pub rho_ul: f64,
    pub k_self: f64,
    pub k_boun: f64,
    pub k_co: f64,
    pub k_rad: RadarSuppression,
    /// Thermal noise variance in the rate formulas, W.
    pub sigma_z2: f64,
    /// Thermal noise variance at the radar channel estimator, W.
    pub sigma_02: f64,
    /// Carrier angular frequency, rad/s.
    pub omega_c: f64,
    /// Propagation speed, m/s.
    pub c0: f64,
    pub pathloss: PathLoss,
    /// Number of (identical, well separated) targets.
    pub targets: usize,
    pub target: TargetSetup,
}

/// Quantities that follow from a [`SystemConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQuantities {
    pub pulse_count: usize,
    /// Δt = 1 / f_B.
    pub sample_step: f64,
    /// L = round(f_B · T_c).
    pub sample_count: usize,
    /// ξ_r = f_B · T_c · δ · P_rad.
    pub xi_r: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawKRad {
    Linear(f64),
    Policy(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    tx_antennas: i64,
    rx_antennas: i64,
    p_rad_dbm: f64,
    p_dl_dbm: f64,
    p_ul_dbm: f64,
    f_b: f64,
    t_c: f64,
    t_r: f64,
    t_0: f64,
    duty: Option<f64>,
    rho_dl: f64,
    rho_ul: f64,
    k_self: Option<f64>,
    k_self_db: Option<f64>,
    k_boun: Option<f64>,
    k_boun_db: Option<f64>,
    k_co: Option<f64>,
    k_co_db: Option<f64>,
    k_rad: Option<RawKRad>,
    k_rad_db: Option<f64>,
    sigma_z2: f64,
    sigma_02: Option<f64>,
    omega_c: f64,
    c0: f64,
    shadowing_std_db: f64,
    d0: f64,
    pathloss_exponent: f64,
    d_dl: f64,
    d_ul: f64,
    targets: Option<i64>,
    target_range: Option<f64>,
    target_theta: Option<f64>,
    target_velocity: Option<f64>,
    alpha_sq: Option<f64>,
    sigma_theta2: Option<f64>,
    sigma_d2: Option<f64>,
    sigma_v2: Option<f64>,
}

fn field_error(field: &str, message: impl Into<String>) -> JrcError {
    JrcError::Parse {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Pull the first back-quoted identifier out of a serde message.
fn field_from_message(msg: &str) -> String {
    msg.split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "document".to_string())
}

fn suppression(name: &str, linear: Option<f64>, db: Option<f64>) -> Result<f64> {
    match (linear, db) {
        (Some(_), Some(_)) => Err(field_error(
            name,
            format!("give either `{name}` or `{name}_db`, not both"),
        )),
        (Some(v), None) => Ok(v),
        (None, Some(v)) => Ok(db_to_linear(v)),
        (None, None) => Err(field_error(name, "missing field")),
    }
}

fn count(name: &str, v: i64) -> Result<usize> {
    if v < 1 {
        return Err(field_error(name, format!("must be a positive integer, got {v}")));
    }
    Ok(v as usize)
}

/// Parse and validate a scenario document.
pub fn parse_config(text: &str) -> Result<SystemConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        JrcError::Parse {
            field: field_from_message(&msg),
            message: msg,
        }
    })?;

    let k_rad = match (raw.k_rad, raw.k_rad_db) {
        (Some(_), Some(_)) => {
            return Err(field_error(
                "k_rad",
                "give either `k_rad` or `k_rad_db`, not both",
            ))
        }
        (Some(RawKRad::Linear(v)), None) => RadarSuppression::Fixed(v),
        (Some(RawKRad::Policy(p)), None) if p == "theoretical-limit" => RadarSuppression::TheoreticalLimit,
        (Some(RawKRad::Policy(p)), None) => {
            return Err(field_error(
                "k_rad",
                format!("expected a number or \"theoretical-limit\", got \"{p}\""),
            ))
        }
        (None, Some(db)) => RadarSuppression::Fixed(db_to_linear(db)),
        (None, None) => return Err(field_error("k_rad", "missing field")),
    };

    let duty = raw.duty.unwrap_or(raw.t_0 / raw.t_r);
    let cfg = SystemConfig {
        tx_antennas: count("tx_antennas", raw.tx_antennas)?,
        rx_antennas: count("rx_antennas", raw.rx_antennas)?,
        p_rad: dbm_to_watts(raw.p_rad_dbm),
        p_dl: dbm_to_watts(raw.p_dl_dbm),
        p_ul: dbm_to_watts(raw.p_ul_dbm),
        f_b: raw.f_b,
        t_c: raw.t_c,
        t_r: raw.t_r,
        t_0: raw.t_0,
        duty,
        rho_dl: raw.rho_dl,
        rho_ul: raw.rho_ul,
        k_self: suppression("k_self", raw.k_self, raw.k_self_db)?,
        k_boun: suppression("k_boun", raw.k_boun, raw.k_boun_db)?,
        k_co: suppression("k_co", raw.k_co, raw.k_co_db)?,
        k_rad,
        sigma_z2: raw.sigma_z2,
        sigma_02: raw.sigma_02.unwrap_or(raw.sigma_z2),
        omega_c: raw.omega_c,
        c0: raw.c0,
        pathloss: PathLoss {
            shadowing_std_db: raw.shadowing_std_db,
            d0: raw.d0,
            exponent: raw.pathloss_exponent,
            d_dl: raw.d_dl,
            d_ul: raw.d_ul,
        },
        targets: count("targets", raw.targets.unwrap_or(1))?,
        target: TargetSetup {
            range: raw.target_range.unwrap_or(200.0),
            theta: raw.target_theta.unwrap_or(0.0),
            velocity: raw.target_velocity.unwrap_or(0.0),
            alpha_sq: raw.alpha_sq,
            sigma_theta2: raw.sigma_theta2.unwrap_or((1f64).to_radians().powi(2)),
            sigma_d2: raw.sigma_d2.unwrap_or(1.0),
            sigma_v2: raw.sigma_v2.unwrap_or(1.0),
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Read a scenario file; the literal path `defaults` selects the built-in baseline.
pub fn load_config(path: &Path) -> Result<SystemConfig> {
    if path.as_os_str() == "defaults" {
        return parse_config(DEFAULT_SCENARIO);
    }
    let text = std::fs::read_to_string(path).map_err(|source| JrcError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(JrcError::Validation(format!(
            "{name} must be finite and > 0, got {v}"
        )));
    }
    Ok(())
}

fn unit_interval(name: &str, v: f64, open_below: bool) -> Result<()> {
    let ok = if open_below {
        v > 0.0 && v <= 1.0
    } else {
        (0.0..=1.0).contains(&v)
    };
    if !ok {
        let range = if open_below { "(0, 1]" } else { "[0, 1]" };
        return Err(JrcError::Validation(format!(
            "{name} must lie in {range}, got {v}"
        )));
    }
    Ok(())
}

impl SystemConfig {
    /// The built-in baseline scenario.
    pub fn paper_defaults() -> Self {
        parse_config(DEFAULT_SCENARIO).expect("built-in scenario is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.tx_antennas == 0 || self.rx_antennas == 0 || self.targets == 0 {
            return Err(JrcError::Validation(
                "antenna and target counts must be >= 1".into(),
            ));
        }
        for (name, v) in [
            ("p_rad", self.p_rad),
            ("p_dl", self.p_dl),
            ("p_ul", self.p_ul),
            ("f_b", self.f_b),
            ("t_c", self.t_c),
            ("t_r", self.t_r),
            ("t_0", self.t_0),
            ("sigma_z2", self.sigma_z2),
            ("sigma_02", self.sigma_02),
            ("omega_c", self.omega_c),
            ("c0", self.c0),
            ("d0", self.pathloss.d0),
            ("d_dl", self.pathloss.d_dl),
            ("d_ul", self.pathloss.d_ul),
            ("target_range", self.target.range),
            ("sigma_theta2", self.target.sigma_theta2),
            ("sigma_d2", self.target.sigma_d2),
            ("sigma_v2", self.target.sigma_v2),
        ] {
            positive(name, v)?;
        }
        if !(self.pathloss.shadowing_std_db >= 0.0 && self.pathloss.exponent >= 0.0) {
            return Err(JrcError::Validation(
                "shadowing_std_db and pathloss_exponent must be >= 0".into(),
            ));
        }
        unit_interval("rho_dl", self.rho_dl, true)?;
        unit_interval("rho_ul", self.rho_ul, true)?;
        unit_interval("k_self", self.k_self, false)?;
        unit_interval("k_boun", self.k_boun, false)?;
        unit_interval("k_co", self.k_co, false)?;
        if let RadarSuppression::Fixed(k) = self.k_rad {
            unit_interval("k_rad", k, false)?;
        }

        let ratio = self.t_c / self.t_r;
        let k = ratio.round();
        if k < 1.0 || (ratio - k).abs() > GRID_TOLERANCE * k.max(1.0) {
            return Err(JrcError::Validation(format!(
                "T_c not integer multiple of T_R (T_c/T_R = {ratio})"
            )));
        }
        unit_interval("duty", self.duty, true)?;
        if (self.duty - self.t_0 / self.t_r).abs() > GRID_TOLERANCE {
            return Err(JrcError::Validation(format!(
                "duty {} inconsistent with T_0/T_R = {}",
                self.duty,
                self.t_0 / self.t_r
            )));
        }

        if self.target.theta.abs() >= FRAC_PI_2 {
            return Err(JrcError::Validation(format!(
                "target_theta must satisfy |theta| < pi/2, got {}",
                self.target.theta
            )));
        }
        if self.target_delay() >= self.t_r {
            return Err(JrcError::Validation(format!(
                "target delay {} s not below T_R {} s",
                self.target_delay(),
                self.t_r
            )));
        }
        if let Some(a) = self.target.alpha_sq {
            positive("alpha_sq", a)?;
        }
        Ok(())
    }

    pub fn derived(&self) -> DerivedQuantities {
        DerivedQuantities {
            pulse_count: self.pulse_count(),
            sample_step: 1.0 / self.f_b,
            sample_count: (self.f_b * self.t_c).round() as usize,
            xi_r: self.xi_r(),
        }
    }

    /// K = T_c / T_R.
    pub fn pulse_count(&self) -> usize {
        (self.t_c / self.t_r).round() as usize
    }

    pub fn xi_r(&self) -> f64 {
        self.f_b * self.t_c * self.duty * self.p_rad
    }

    pub fn omega_dl(&self) -> f64 {
        mean_pathloss_gain(&self.pathloss, self.pathloss.d_dl)
    }

    pub fn omega_ul(&self) -> f64 {
        mean_pathloss_gain(&self.pathloss, self.pathloss.d_ul)
    }

    /// |α|²: the override if set, otherwise the deterministic two-way gain
    /// of the bounded path-loss law at the target range.
    pub fn alpha_sq(&self) -> f64 {
        self.target.alpha_sq.unwrap_or_else(|| {
            let one_way = 1.0 / (1.0 + (self.target.range / self.pathloss.d0).powf(self.pathloss.exponent));
            one_way * one_way
        })
    }

    /// Round-trip delay to the target, s.
    pub fn target_delay(&self) -> f64 {
        2.0 * self.target.range / self.c0
    }

    /// Doppler angular frequency of the target, rad/s.
    pub fn target_doppler(&self) -> f64 {
        2.0 * self.omega_c * self.target.velocity / self.c0
    }

    /// White interference-plus-noise level seen by the radar after the uplink
    /// has been decoded and subtracted.
    pub fn radar_noise_level(&self) -> f64 {
        (1.0 - self.rho_ul * self.rho_ul) * self.omega_ul() * self.p_ul
            + (self.k_self + self.k_boun) * self.p_dl
            + self.sigma_z2
    }
}
