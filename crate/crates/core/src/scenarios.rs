//! Operating points, power sweeps and CPI sweeps under the four
//! spectrum-sharing schemes.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::comm_rates::{
    downlink_rate_with, k_rad_star, mc_rate_with, uplink_rate_with, InterferenceLedger, Link, McColumns,
    RatePoint,
};
use crate::config::{RadarSuppression, SystemConfig};
use crate::error::{JrcError, Result};
use crate::radar_est::{
    crb_lfm_closed, crb_theta_closed, estimation_rates, CrbMatrix, EstimationRates, EstimationSetup, Target,
};
use crate::waveforms::{lfm_pulse_train, temporal_moments, PhaseCodes, PulseGeometry, WaveformMoments};

/// Seed of the code family used when the residual-radar moments are needed.
pub const MOMENT_CODE_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SchemeSpec {
    /// Suppress the radar return, decode the uplink, then estimate.
    AltSic,
    /// Decode the uplink with the radar return still present.
    TradSic,
    /// Communicate for a fraction η of each frame, sense for the rest.
    Tdma(f64),
    /// Communicate on a fraction μ of the band, sense on the rest.
    Fdma(f64),
}

impl SchemeSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SchemeSpec::Tdma(f) | SchemeSpec::Fdma(f) if !(f > 0.0 && f < 1.0) => Err(JrcError::Validation(
                format!("sharing fraction must lie strictly inside (0, 1), got {f}"),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeSpec::AltSic => write!(f, "alt-sic"),
            SchemeSpec::TradSic => write!(f, "trad-sic"),
            SchemeSpec::Tdma(x) => write!(f, "tdma:{x}"),
            SchemeSpec::Fdma(x) => write!(f, "fdma:{x}"),
        }
    }
}

impl FromStr for SchemeSpec {
    type Err = JrcError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            JrcError::Validation(format!(
                "unknown scheme `{s}` (alt-sic, trad-sic, tdma:<eta>, fdma:<mu>)"
            ))
        };
        let scheme = match s.split_once(':') {
            None if s == "alt-sic" => SchemeSpec::AltSic,
            None if s == "trad-sic" => SchemeSpec::TradSic,
            Some(("tdma", x)) => SchemeSpec::Tdma(x.parse().map_err(|_| bad())?),
            Some(("fdma", x)) => SchemeSpec::Fdma(x.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepAxis {
    PUl,
    PDl,
    PRad,
    Tc,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::PUl => "p_ul",
            SweepAxis::PDl => "p_dl",
            SweepAxis::PRad => "p_rad",
            SweepAxis::Tc => "t_c",
        }
    }

    pub fn is_power(&self) -> bool {
        !matches!(self, SweepAxis::Tc)
    }

    /// The configured value of this axis (W or s).
    pub fn current(&self, cfg: &SystemConfig) -> f64 {
        match self {
            SweepAxis::PUl => cfg.p_ul,
            SweepAxis::PDl => cfg.p_dl,
            SweepAxis::PRad => cfg.p_rad,
            SweepAxis::Tc => cfg.t_c,
        }
    }

    /// A copy of `cfg` with this axis set to `value` (W or s), revalidated.
    pub fn apply(&self, cfg: &SystemConfig, value: f64) -> Result<SystemConfig> {
        let mut c = cfg.clone();
        match self {
            SweepAxis::PUl => c.p_ul = value,
            SweepAxis::PDl => c.p_dl = value,
            SweepAxis::PRad => c.p_rad = value,
            SweepAxis::Tc => c.t_c = value,
        }
        c.validate()?;
        Ok(c)
    }
}

impl FromStr for SweepAxis {
    type Err = JrcError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "p_ul" => SweepAxis::PUl,
            "p_dl" => SweepAxis::PDl,
            "p_rad" => SweepAxis::PRad,
            "t_c" => SweepAxis::Tc,
            _ => {
                return Err(JrcError::Validation(format!(
                    "unknown sweep axis `{s}` (p_ul, p_dl, p_rad, t_c)"
                )))
            }
        })
    }
}

/// The five rates of a [`RatePoint`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateKind {
    Dl,
    Ul,
    Theta,
    Dist,
    Vel,
}

impl RateKind {
    pub const ESTIMATION: [RateKind; 3] = [RateKind::Theta, RateKind::Dist, RateKind::Vel];

    pub fn of(&self, p: &RatePoint) -> f64 {
        match self {
            RateKind::Dl => p.r_dl,
            RateKind::Ul => p.r_ul,
            RateKind::Theta => p.r_theta,
            RateKind::Dist => p.r_dist,
            RateKind::Vel => p.r_vel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    /// Linear values, W or s, strictly increasing.
    pub grid: Vec<f64>,
    /// Rate of interest on the y-axis, when the caller has one.
    pub y: Option<RateKind>,
}

impl SweepSpec {
    pub fn new(axis: SweepAxis, grid: Vec<f64>) -> Self {
        Self { axis, grid, y: None }
    }

    pub fn validate(&self, cfg: &SystemConfig) -> Result<()> {
        if self.grid.is_empty() {
            return Err(JrcError::Validation("sweep grid is empty".into()));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(JrcError::Validation(
                "sweep grid must be strictly increasing".into(),
            ));
        }
        if self.axis.is_power() {
            let max = self.axis.current(cfg);
            if let Some(v) = self
                .grid
                .iter()
                .find(|v| !(**v > 0.0) || **v > max * (1.0 + 1e-9))
            {
                return Err(JrcError::Validation(format!(
                    "{} sweep value {v} W outside (0, {max}] W",
                    self.axis.name()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionCurve {
    pub scheme: String,
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub points: Vec<RatePoint>,
}

/// Estimation results at one CPI length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CpiPoint {
    pub t_c: f64,
    /// Bits per CPI.
    pub info_theta: f64,
    pub info_dist: f64,
    pub info_vel: f64,
    /// Bits per second.
    pub r_theta: f64,
    pub r_dist: f64,
    pub r_vel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpiCurve {
    pub scheme: String,
    pub points: Vec<CpiPoint>,
}

/// Radar operating conditions left over by a scheme.
pub fn radar_setup(cfg: &SystemConfig, scheme: SchemeSpec) -> Result<EstimationSetup> {
    let mut setup = EstimationSetup::from_config(cfg);
    match scheme {
        SchemeSpec::AltSic | SchemeSpec::TradSic => {}
        SchemeSpec::Tdma(eta) => {
            let pulses = ((1.0 - eta) * cfg.pulse_count() as f64 + 1e-9).floor();
            if pulses < 1.0 {
                return Err(JrcError::DegenerateGeometry(format!(
                    "tdma:{eta} leaves no radar pulses out of {}",
                    cfg.pulse_count()
                )));
            }
            setup.t_c = pulses * cfg.t_r;
            setup.sigma_bar2 = cfg.sigma_z2;
        }
        SchemeSpec::Fdma(mu) => {
            setup.f_b = (1.0 - mu) * cfg.f_b;
            setup.sigma_bar2 = cfg.sigma_z2;
        }
    }
    Ok(setup)
}

/// Closed-form 3×3 CRB for the configured target.
pub fn closed_crb(setup: &EstimationSetup, target: &Target) -> Result<CrbMatrix> {
    Ok(CrbMatrix::from_parts(
        crb_theta_closed(setup, target)?,
        &crb_lfm_closed(setup, target)?,
    ))
}

/// Moments of the configured pulse train delayed to the configured target.
pub fn waveform_moments(cfg: &SystemConfig) -> Result<WaveformMoments> {
    let geom = PulseGeometry::from_config(cfg)?;
    let codes = PhaseCodes::pseudo_random(cfg.tx_antennas, &geom, MOMENT_CODE_SEED);
    temporal_moments(&lfm_pulse_train(cfg, &codes)?, cfg.target_delay())
}

/// Unclamped K_rad* at the configured operating point.
pub fn k_rad_limit(cfg: &SystemConfig) -> Result<f64> {
    let target = Target::from_config(cfg);
    let crb = closed_crb(&EstimationSetup::from_config(cfg), &target)?;
    Ok(k_rad_star(cfg, &vec![crb; cfg.targets], &waveform_moments(cfg)?))
}

/// Resolve the radar suppression for simultaneous operation.
///
/// Returns the factor used and, under the theoretical-limit policy, the
/// limit itself (never above 1).
fn resolve_k_rad(
    cfg: &SystemConfig,
    crb: &CrbMatrix,
    moments: Option<&WaveformMoments>,
) -> Result<(f64, Option<f64>)> {
    match cfg.k_rad {
        RadarSuppression::Fixed(k) => Ok((k, None)),
        RadarSuppression::TheoreticalLimit => {
            let owned;
            let m = match moments {
                Some(m) => m,
                None => {
                    owned = waveform_moments(cfg)?;
                    &owned
                }
            };
            let k = k_rad_star(cfg, &vec![*crb; cfg.targets], m).min(1.0);
            Ok((k, Some(k)))
        }
    }
}

fn point_with(
    cfg: &SystemConfig,
    scheme: SchemeSpec,
    moments: Option<&WaveformMoments>,
) -> Result<RatePoint> {
    scheme.validate()?;
    let target = Target::from_config(cfg);
    let setup = radar_setup(cfg, scheme)?;
    let crb = closed_crb(&setup, &target)?;
    let est: EstimationRates = estimation_rates(&crb, &target, cfg.t_c, cfg.c0, cfg.omega_c);
    let k_t = cfg.targets as f64;

    let (ledger, bandwidth, share, k_rad, k_star) = match scheme {
        SchemeSpec::AltSic => {
            let (k, star) = resolve_k_rad(cfg, &crb, moments)?;
            (InterferenceLedger::new(cfg, k), cfg.f_b, 1.0, k, star)
        }
        SchemeSpec::TradSic => {
            let k = cfg.alpha_sq();
            (InterferenceLedger::new(cfg, k), cfg.f_b, 1.0, k, None)
        }
        SchemeSpec::Tdma(eta) => (InterferenceLedger::radar_free(cfg), cfg.f_b, eta, 0.0, None),
        SchemeSpec::Fdma(mu) => (InterferenceLedger::radar_free(cfg), mu * cfg.f_b, 1.0, 0.0, None),
    };

    Ok(RatePoint {
        scheme: scheme.to_string(),
        p_rad: cfg.p_rad,
        p_dl: cfg.p_dl,
        p_ul: cfg.p_ul,
        t_c: cfg.t_c,
        r_dl: share * downlink_rate_with(cfg, &ledger, bandwidth),
        r_ul: share * uplink_rate_with(cfg, &ledger, bandwidth),
        r_theta: k_t * est.r_theta,
        r_dist: k_t * est.r_dist,
        r_vel: k_t * est.r_vel,
        k_rad_resolved: k_rad,
        k_rad_star: k_star,
        ledger,
        sigma_z2: cfg.sigma_z2,
        sigma_bar2: setup.sigma_bar2,
        mc: None,
    })
}

/// Evaluate every rate of one operating point.
pub fn eval_point(cfg: &SystemConfig, scheme: SchemeSpec) -> Result<RatePoint> {
    point_with(cfg, scheme, None)
}

/// Attach Monte Carlo estimates of both communication rates to `point`.
pub fn attach_mc(cfg: &SystemConfig, scheme: SchemeSpec, point: &mut RatePoint, trials: usize, seed: u64) {
    let (bandwidth, share) = match scheme {
        SchemeSpec::Tdma(eta) => (cfg.f_b, eta),
        SchemeSpec::Fdma(mu) => (mu * cfg.f_b, 1.0),
        _ => (cfg.f_b, 1.0),
    };
    let scale = |mut e: crate::comm_rates::McEstimate| {
        e.mean *= share;
        e.std_err *= share;
        e
    };
    point.mc = Some(McColumns {
        r_dl: scale(mc_rate_with(
            cfg,
            Link::Downlink,
            &point.ledger,
            bandwidth,
            trials,
            seed,
        )),
        r_ul: scale(mc_rate_with(
            cfg,
            Link::Uplink,
            &point.ledger,
            bandwidth,
            trials,
            seed,
        )),
    });
}

fn map_ordered<T: Send, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Evaluate `scheme` at every grid value of the swept axis, the other axes
/// held at their configured values.
pub fn sweep_region(cfg: &SystemConfig, scheme: SchemeSpec, sweep: &SweepSpec) -> Result<RegionCurve> {
    sweep.validate(cfg)?;
    scheme.validate()?;
    // Normalised moments do not depend on the powers, only on the pulse train.
    let shared = if sweep.axis.is_power()
        && scheme == SchemeSpec::AltSic
        && cfg.k_rad == RadarSuppression::TheoreticalLimit
    {
        Some(waveform_moments(cfg)?)
    } else {
        None
    };
    let points = map_ordered(sweep.grid.len(), |k| {
        let c = sweep.axis.apply(cfg, sweep.grid[k])?;
        point_with(&c, scheme, shared.as_ref())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(RegionCurve {
        scheme: scheme.to_string(),
        axis: sweep.axis,
        grid: sweep.grid.clone(),
        points,
    })
}

/// Estimation information per CPI and per second over a grid of CPI lengths.
pub fn cpi_sweep(cfg: &SystemConfig, grid: &[f64]) -> Result<CpiCurve> {
    SweepSpec::new(SweepAxis::Tc, grid.to_vec()).validate(cfg)?;
    let target = Target::from_config(cfg);
    let points = grid
        .iter()
        .map(|&t_c| {
            let c = SweepAxis::Tc.apply(cfg, t_c)?;
            let crb = closed_crb(&EstimationSetup::from_config(&c), &target)?;
            let r = estimation_rates(&crb, &target, t_c, c.c0, c.omega_c);
            let k_t = c.targets as f64;
            Ok(CpiPoint {
                t_c,
                info_theta: k_t * r.r_theta * t_c,
                info_dist: k_t * r.r_dist * t_c,
                info_vel: k_t * r.r_vel * t_c,
                r_theta: k_t * r.r_theta,
                r_dist: k_t * r.r_dist,
                r_vel: k_t * r.r_vel,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CpiCurve {
        scheme: SchemeSpec::AltSic.to_string(),
        points,
    })
}

/// True when some point of `curve` is at least as good as `p` in both the
/// uplink rate and the estimation rate `kind`.
pub fn weakly_dominated(p: &RatePoint, curve: &RegionCurve, kind: RateKind) -> bool {
    let tol = |x: f64| x * (1.0 + 1e-12);
    curve
        .points
        .iter()
        .any(|q| tol(q.r_ul) >= p.r_ul && tol(kind.of(q)) >= kind.of(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::dbm_to_watts;

    fn desk() -> SystemConfig {
        let mut cfg = SystemConfig::paper_defaults();
        cfg.f_b = 200e3;
        cfg
    }

    #[test]
    fn scheme_labels_round_trip() {
        for s in ["alt-sic", "trad-sic", "tdma:0.5", "fdma:0.25"] {
            assert_eq!(s.parse::<SchemeSpec>().unwrap().to_string(), s);
        }
        assert!("tdma:1".parse::<SchemeSpec>().is_err());
        assert!("fdma:0".parse::<SchemeSpec>().is_err());
        assert!("sic".parse::<SchemeSpec>().is_err());
    }

    #[test]
    fn ideal_alt_sic_is_mrc_bound() {
        let mut cfg = SystemConfig::paper_defaults();
        cfg.rho_dl = 1.0;
        cfg.rho_ul = 1.0;
        cfg.k_self = 0.0;
        cfg.k_boun = 0.0;
        cfg.k_co = 0.0;
        cfg.k_rad = RadarSuppression::Fixed(0.0);
        let p = eval_point(&cfg, SchemeSpec::AltSic).unwrap();
        let want = cfg.f_b * (1.0 + cfg.rx_antennas as f64 * cfg.p_ul * cfg.omega_ul() / cfg.sigma_z2).log2();
        assert_eq!(p.r_ul, want);
    }

    #[test]
    fn tdma_scales_radar_free_rates() {
        let cfg = SystemConfig::paper_defaults();
        let free = InterferenceLedger::radar_free(&cfg);
        for eta in [0.1, 0.5, 0.9] {
            let p = eval_point(&cfg, SchemeSpec::Tdma(eta)).unwrap();
            assert_eq!(p.r_ul, eta * uplink_rate_with(&cfg, &free, cfg.f_b));
            assert_eq!(p.r_dl, eta * downlink_rate_with(&cfg, &free, cfg.f_b));
        }
    }

    #[test]
    fn alt_sic_beats_trad_sic() {
        let cfg = SystemConfig::paper_defaults();
        let a = eval_point(&cfg, SchemeSpec::AltSic).unwrap();
        let t = eval_point(&cfg, SchemeSpec::TradSic).unwrap();
        assert!(a.r_ul > t.r_ul);
        assert_eq!(a.r_theta, t.r_theta);
    }

    #[test]
    fn sweeps_move_the_right_way() {
        let cfg = desk();
        let grid: Vec<f64> = (0..=10).map(|k| dbm_to_watts(2.0 * k as f64)).collect();
        let c = sweep_region(
            &cfg,
            SchemeSpec::AltSic,
            &SweepSpec::new(SweepAxis::PUl, grid.clone()),
        )
        .unwrap();
        for w in c.points.windows(2) {
            assert!(w[1].r_ul >= w[0].r_ul);
            assert!(w[1].r_dl <= w[0].r_dl);
        }
        let c = sweep_region(&cfg, SchemeSpec::AltSic, &SweepSpec::new(SweepAxis::PRad, grid)).unwrap();
        for w in c.points.windows(2) {
            assert!(w[1].r_theta >= w[0].r_theta && w[1].r_dist >= w[0].r_dist && w[1].r_vel >= w[0].r_vel);
            assert!(w[1].r_ul <= w[0].r_ul);
        }
    }

    #[test]
    fn single_value_sweep_is_a_point() {
        let cfg = desk();
        let c = sweep_region(
            &cfg,
            SchemeSpec::Fdma(0.3),
            &SweepSpec::new(SweepAxis::PDl, vec![cfg.p_dl]),
        )
        .unwrap();
        assert_eq!(c.points, vec![eval_point(&cfg, SchemeSpec::Fdma(0.3)).unwrap()]);
    }

    #[test]
    fn bad_sweeps() {
        let cfg = desk();
        assert!(sweep_region(&cfg, SchemeSpec::AltSic, &SweepSpec::new(SweepAxis::PUl, vec![])).is_err());
        assert!(sweep_region(
            &cfg,
            SchemeSpec::AltSic,
            &SweepSpec::new(SweepAxis::PUl, vec![0.1, 0.05])
        )
        .is_err());
        assert!(sweep_region(
            &cfg,
            SchemeSpec::AltSic,
            &SweepSpec::new(SweepAxis::PUl, vec![1.0])
        )
        .is_err());
        assert!(cpi_sweep(&cfg, &[0.0105]).is_err());
    }

    #[test]
    fn theoretical_limit_is_resolved_and_capped() {
        let mut cfg = desk();
        cfg.k_rad = RadarSuppression::TheoreticalLimit;
        let grid: Vec<f64> = (0..=4).map(|k| dbm_to_watts(-20.0 + 10.0 * k as f64)).collect();
        let c = sweep_region(&cfg, SchemeSpec::AltSic, &SweepSpec::new(SweepAxis::PRad, grid)).unwrap();
        for p in &c.points {
            assert!(p.k_rad_resolved <= 1.0 && p.k_rad_resolved > 0.0);
            assert_eq!(Some(p.k_rad_resolved), p.k_rad_star);
        }
        assert_eq!(c.points[0].k_rad_resolved, 1.0);
    }

    #[test]
    fn eval_point_is_pure() {
        let cfg = desk();
        let a = eval_point(&cfg, SchemeSpec::Tdma(0.4)).unwrap();
        let b = eval_point(&cfg, SchemeSpec::Tdma(0.4)).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
