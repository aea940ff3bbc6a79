//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fdjrc_core::comm_rates::{downlink_rate_bound, k_rad_star, mc_rate, uplink_rate_bound, Link};
use fdjrc_core::config::{dbm_to_watts, watts_to_dbm, RadarSuppression, SystemConfig};
use fdjrc_core::radar_est::{
    assemble_fim, crb_lfm_closed, crb_theta_closed, estimation_rates, fim_tau_omega_general, reduce_crb,
    CrbMatrix, DynVar, EstimationSetup, NoiseModel, Target,
};
use fdjrc_core::scenarios::{
    cpi_sweep, k_rad_limit, sweep_region, waveform_moments, weakly_dominated, RateKind, SchemeSpec,
    SweepAxis, SweepSpec,
};
use fdjrc_core::waveforms::{PhaseCodes, PulseGeometry, SampledWaveform};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

struct Instance {
    target: Target,
    wave: SampledWaveform,
    setup: EstimationSetup,
}

/// N ∈ {2,4,8}, M ∈ {1,2,4} Walsh-coded, L ≤ 256, θ uniform in ±60°.
fn desk_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n_rx = [2usize, 4, 8][rng.random_range(0..3)];
    let m_tx = [1usize, 2, 4][rng.random_range(0..3)];
    let t_r: f64 = 5e-4;
    let t_0 = 1e-4;
    let f_b = if rng.random::<bool>() { 80e3 } else { 160e3 };
    let per_pri = (f_b * t_r).round() as usize;
    let pulses = rng.random_range(2..=256 / per_pri);
    let geom = PulseGeometry::new(f_b, t_r, t_0, pulses).unwrap();
    assert!(geom.sample_count() <= 256);
    let p_rad = rng.random_range(0.01..1.0);
    let codes = PhaseCodes::walsh(m_tx, &geom).unwrap();
    let wave = SampledWaveform::new(geom, m_tx, p_rad, &codes).unwrap();
    let alpha2: f64 = rng.random_range(0.05..1.0);
    let target = Target {
        alpha: Complex64::from_polar(alpha2.sqrt(), rng.random_range(-PI..PI)),
        theta: rng.random_range(-PI / 3.0..=PI / 3.0),
        tau: rng.random_range(0.0..=t_r - t_0),
        omega: rng.random_range(-5e3..5e3),
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
        sigma_bar2: rng.random_range(0.1..3.0),
    };
    Instance { target, wave, setup }
}

fn oracle_instances() -> Vec<(Instance, CrbMatrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    (0..50)
        .map(|_| {
            let d = desk_instance(&mut rng);
            let noise = NoiseModel::white(d.setup.n_rx, d.wave.len(), d.setup.sigma_bar2);
            let crb = reduce_crb(&assemble_fim(&d.target, &d.wave, &noise).unwrap()).unwrap();
            (d, crb)
        })
        .collect()
}

fn c1_direction_closed_form(cases: &[(Instance, CrbMatrix)], took: Duration) -> Outcome {
    let worst = cases
        .iter()
        .map(|(d, crb)| rel(crb_theta_closed(&d.setup, &d.target).unwrap(), crb.theta_theta()))
        .fold(0.0, f64::max);
    outcome(
        worst < 1e-2 && took < Duration::from_secs(60),
        format!(
            "{} instances, max rel err {worst:.3e} (< 1e-2), {:.2} s",
            cases.len(),
            took.as_secs_f64()
        ),
    )
}

fn c2_lfm_closed_form() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for pulses in [2usize, 4, 8] {
        let (f_b, t_r, t_0) = (200e3, 1e-3, 1e-4);
        let geom = PulseGeometry::new(f_b, t_r, t_0, pulses).unwrap();
        let wave = SampledWaveform::new(geom, 1, 0.1, &PhaseCodes::zeros(1, &geom)).unwrap();
        let target = Target {
            alpha: Complex64::new(0.3, 0.4),
            theta: 0.1,
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
            f_b,
            t_c: pulses as f64 * t_r,
            t_r,
            t_0,
            p_rad: 0.1,
            sigma_bar2: 1.0,
        };
        let f = fim_tau_omega_general(&wave, &target, setup.sigma_bar2, setup.n_rx);
        let det = f[0][0] * f[1][1] - f[0][1] * f[0][1];
        let closed = crb_lfm_closed(&setup, &target).unwrap();
        worst = worst
            .max(rel(closed.tau_tau, f[1][1] / det))
            .max(rel(closed.omega_omega, f[0][0] / det));
    }
    let took = start.elapsed();
    outcome(
        worst < 1e-2 && took < Duration::from_secs(60),
        format!("K in {{2,4,8}} at 200 kHz, max rel err {worst:.3e} (< 1e-2)"),
    )
}

fn c3_decoupling(cases: &[(Instance, CrbMatrix)]) -> Outcome {
    let (mut w_tau, mut w_omega) = (0.0f64, 0.0f64);
    for (_, c) in cases {
        w_tau = w_tau.max(c.theta_tau().abs() / (c.theta_theta() * c.tau_tau()).sqrt());
        w_omega = w_omega.max(c.theta_omega().abs() / (c.theta_theta() * c.omega_omega()).sqrt());
    }
    outcome(
        w_tau < 1e-8 && w_omega < 1e-8,
        format!("max |C(th,tau)| {w_tau:.2e}, max |C(th,om)| {w_omega:.2e} (normalised, < 1e-8)"),
    )
}

fn c4_jensen() -> Outcome {
    let start = Instant::now();
    let cfg = SystemConfig::paper_defaults();
    let k = match cfg.k_rad {
        RadarSuppression::Fixed(k) => k,
        RadarSuppression::TheoreticalLimit => k_rad_limit(&cfg).unwrap().min(1.0),
    };
    let gap = |cfg: &SystemConfig| {
        let bound = uplink_rate_bound(cfg, k);
        let mc = mc_rate(cfg, Link::Uplink, k, 10_000, 7).mean;
        (mc <= bound, 1.0 - mc / bound)
    };
    assert_eq!(cfg.rx_antennas, 64);
    let (below64, gap64) = gap(&cfg);
    let mut single = cfg.clone();
    single.rx_antennas = 1;
    let (below1, gap1) = gap(&single);
    let took = start.elapsed();
    outcome(
        below64 && below1 && gap64 < 2e-2 && gap1 > gap64 && took < Duration::from_secs(30),
        format!(
            "N=64 gap {gap64:.3e} (< 2e-2), N=1 gap {gap1:.3e}, {:.2} s",
            took.as_secs_f64()
        ),
    )
}

fn c5_suppression_floor() -> Outcome {
    let cfg = SystemConfig::paper_defaults();
    assert_eq!(cfg.targets, 1);
    let moments = waveform_moments(&cfg).unwrap();
    let floor = k_rad_star(&cfg, &[CrbMatrix::zeros()], &moments);
    let exact = (floor - 4e-4).abs() <= 4.0 * f64::EPSILON * 4e-4;
    let ks: Vec<f64> = (0..=20)
        .map(|i| {
            let mut c = cfg.clone();
            c.p_rad = dbm_to_watts(10.0 + i as f64);
            k_rad_limit(&c).unwrap()
        })
        .collect();
    let decreasing = ks.windows(2).all(|w| w[1] < w[0]);
    outcome(
        exact && decreasing,
        format!("floor {floor:e} (4e-4), K_rad* over 10..30 dBm strictly decreasing: {decreasing}"),
    )
}

/// Undominated TDMA/FDMA points and AltSic-vs-TradSic uplink ordering on
/// power sweeps ending at the configured powers.
fn dominance(cfg: &SystemConfig, axis: SweepAxis) -> (usize, bool) {
    let max_dbm = watts_to_dbm(axis.current(cfg));
    let grid: Vec<f64> = (0..=20)
        .map(|i| dbm_to_watts(max_dbm - 20.0 + i as f64))
        .collect();
    let spec = SweepSpec::new(axis, grid);
    let alt = sweep_region(cfg, SchemeSpec::AltSic, &spec).unwrap();
    let trad = sweep_region(cfg, SchemeSpec::TradSic, &spec).unwrap();
    let mut misses = 0;
    for share in (1..=9).map(|i| i as f64 / 10.0) {
        for scheme in [SchemeSpec::Tdma(share), SchemeSpec::Fdma(share)] {
            let curve = sweep_region(cfg, scheme, &spec).unwrap();
            for p in &curve.points {
                misses += RateKind::ESTIMATION
                    .iter()
                    .filter(|k| !weakly_dominated(p, &alt, **k))
                    .count();
            }
        }
    }
    let trad_ok = alt.points.iter().zip(&trad.points).all(|(a, t)| a.r_ul >= t.r_ul);
    (misses, trad_ok)
}

fn c6_dominance() -> Outcome {
    let mut cfg = SystemConfig::paper_defaults();
    cfg.f_b = 200e3;
    let mut notes = Vec::new();
    let mut ok = true;
    for axis in [SweepAxis::PUl, SweepAxis::PDl, SweepAxis::PRad] {
        let (misses, trad_ok) = dominance(&cfg, axis);
        ok &= misses == 0 && trad_ok;
        notes.push(format!(
            "{}: {misses} undominated, alt>=trad {trad_ok}",
            axis.name()
        ));
    }
    // Not part of the criterion: the same sweeps with K_rad at its limit.
    cfg.k_rad = RadarSuppression::TheoreticalLimit;
    for axis in [SweepAxis::PUl, SweepAxis::PRad] {
        let (misses, trad_ok) = dominance(&cfg, axis);
        notes.push(format!(
            "[info, limit K_rad] {}: {misses} undominated, alt>=trad {trad_ok}",
            axis.name()
        ));
    }
    outcome(ok, notes.join("; "))
}

fn unimodal(v: &[f64]) -> bool {
    let peak = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    v[..=peak].windows(2).all(|w| w[1] >= w[0]) && v[peak..].windows(2).all(|w| w[1] <= w[0])
}

fn c7_cpi_shape() -> Outcome {
    let cfg = SystemConfig::paper_defaults();
    let grid: Vec<f64> = (1..=20).map(|i| i as f64 * 0.01).collect();
    let curve = cpi_sweep(&cfg, &grid).unwrap();
    let col = |f: fn(&fdjrc_core::scenarios::CpiPoint) -> f64| curve.points.iter().map(f).collect::<Vec<_>>();
    let inc = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
    let dec = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let info_ok = inc(&col(|p| p.info_theta)) && inc(&col(|p| p.info_dist)) && inc(&col(|p| p.info_vel));
    let r_vel = col(|p| p.r_vel);
    let vel_ok = unimodal(&r_vel);
    let peak = grid[r_vel
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0];
    let rates_ok = dec(&col(|p| p.r_theta)) && dec(&col(|p| p.r_dist));
    outcome(
        info_ok && vel_ok && rates_ok,
        format!(
            "info increasing {info_ok}, r_vel unimodal {vel_ok} (peak {:.0} ms), r_theta/r_dist decreasing {rates_ok}",
            peak * 1e3
        ),
    )
}

fn c8_trivial_limits() -> Outcome {
    let mut cfg = SystemConfig::paper_defaults();
    cfg.rho_dl = 1.0;
    cfg.rho_ul = 1.0;
    cfg.k_self = 0.0;
    cfg.k_boun = 0.0;
    cfg.k_co = 0.0;
    let dl_want = cfg.f_b * (1.0 + cfg.tx_antennas as f64 * cfg.p_dl * cfg.omega_dl() / cfg.sigma_z2).log2();
    let ul_want = cfg.f_b * (1.0 + cfg.rx_antennas as f64 * cfg.p_ul * cfg.omega_ul() / cfg.sigma_z2).log2();
    let dl_err = rel(downlink_rate_bound(&cfg), dl_want);
    let ul_err = rel(uplink_rate_bound(&cfg, 0.0), ul_want);

    let base = SystemConfig::paper_defaults();
    let mut target = Target::from_config(&base);
    let setup = EstimationSetup::from_config(&base);
    let th = crb_theta_closed(&setup, &target).unwrap();
    let lfm = crb_lfm_closed(&setup, &target).unwrap();
    let crb = CrbMatrix::from_parts(th, &lfm);
    target.dyn_var = DynVar {
        theta: th,
        dist: lfm.tau_tau * base.c0 * base.c0 / 4.0,
        vel: lfm.omega_omega * base.c0 * base.c0 / (4.0 * base.omega_c * base.omega_c),
    };
    let r = estimation_rates(&crb, &target, base.t_c, base.c0, base.omega_c);
    let want = 1.0 / base.t_c;
    let est_err = rel(r.r_theta, want)
        .max(rel(r.r_dist, want))
        .max(rel(r.r_vel, want));
    let tol = 4.0 * f64::EPSILON;
    outcome(
        dl_err <= tol && ul_err <= tol && est_err <= tol,
        format!("rate bound errs {dl_err:.1e}/{ul_err:.1e}, estimation-rate err {est_err:.1e} (<= 4 ulp)"),
    )
}

fn run_cli(dir: &Path, name: &str, args: &[&str], threads: &str) -> Vec<u8> {
    let out = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_fdjrc"))
        .args(args)
        .args(["--reproducible", "--out"])
        .arg(&out)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .expect("spawn fdjrc");
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let mut bytes = std::fs::read(&out).unwrap();
    bytes.extend(std::fs::read(out.with_extension("json")).unwrap());
    bytes
}

fn c9_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let studies: [&[&str]; 3] = [
        &[
            "point",
            "--scheme",
            "alt-sic,trad-sic,tdma:0.5,fdma:0.5",
            "--trials",
            "2000",
            "--seed",
            "11",
        ],
        &[
            "region",
            "--scheme",
            "alt-sic,tdma:0.3",
            "--sweep",
            "p_ul:0:23:12dBm",
            "--trials",
            "500",
        ],
        &["cpi", "--sweep", "t_c:10:200:20ms"],
    ];
    let mut same = 0;
    for (k, args) in studies.iter().enumerate() {
        let a = run_cli(dir.path(), &format!("a{k}.csv"), args, "1");
        let b = run_cli(dir.path(), &format!("b{k}.csv"), args, "1");
        let c = run_cli(dir.path(), &format!("c{k}.csv"), args, "4");
        if a == b && a == c {
            same += 1;
        }
    }
    outcome(
        same == studies.len(),
        format!(
            "{same}/{} studies byte-identical across reruns and 1 vs 4 threads",
            studies.len()
        ),
    )
}

fn main() {
    let start = Instant::now();
    let cases = oracle_instances();
    let oracle_time = start.elapsed();

    let results = [
        (
            "1 direction CRB closed form vs dense oracle",
            c1_direction_closed_form(&cases, oracle_time),
        ),
        (
            "2 LFM delay/Doppler closed form vs general sums",
            c2_lfm_closed_form(),
        ),
        ("3 direction decoupling", c3_decoupling(&cases)),
        ("4 Jensen bound vs Monte Carlo", c4_jensen()),
        ("5 radar suppression floor", c5_suppression_floor()),
        ("6 rate-region dominance", c6_dominance()),
        ("7 CPI behaviour", c7_cpi_shape()),
        ("8 trivial-limit identities", c8_trivial_limits()),
        ("9 reproducible output", c9_determinism()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "{} criterion {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.passed {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
