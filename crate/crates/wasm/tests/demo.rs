use fdjrc_wasm::{cpi_curve_json, lfm_waveform_json, rate_region_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn region_curves_follow_the_sweep() {
    let v = parse(&rate_region_json("", "p_rad", 0.0, 20.0, 11, "alt-sic, tdma:0.5").unwrap());
    let curves = v.as_array().unwrap();
    assert_eq!(curves.len(), 2);
    assert_eq!(curves[0]["scheme"], "alt-sic");
    let r_ul: Vec<f64> = curves[0]["r_ul"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let r_th: Vec<f64> = curves[0]["r_theta"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(r_ul.len(), 11);
    assert!(r_ul.windows(2).all(|w| w[1] <= w[0]));
    assert!(r_th.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn region_sweep_may_exceed_the_baseline_power() {
    assert!(rate_region_json("", "p_ul", 0.0, 30.0, 4, "alt-sic").is_ok());
    assert!(rate_region_json("", "t_c", 0.0, 30.0, 4, "alt-sic").is_err());
    assert!(rate_region_json("", "p_ul", 0.0, 30.0, 4, "cdma").is_err());
    assert!(rate_region_json("not toml", "p_ul", 0.0, 30.0, 4, "alt-sic").is_err());
}

#[test]
fn cpi_curve_has_one_point_per_length() {
    let v = parse(&cpi_curve_json("", 10.0, 200.0, 20).unwrap());
    assert_eq!(v["points"].as_array().unwrap().len(), 20);
    assert!(cpi_curve_json("", 10.5, 200.0, 2).is_err());
}

#[test]
fn waveform_view_is_consistent() {
    let v = parse(&lfm_waveform_json(200.0, 1000.0, 100.0, 4, 2).unwrap());
    assert_eq!(v["re"].as_array().unwrap().len(), 200);
    assert_eq!(v["freq_khz"].as_array().unwrap().len(), 800);
    let b = v["rms_bandwidth_khz"].as_f64().unwrap();
    // close to the flat-band value f_B/√12
    assert!((b / (200.0 / 12f64.sqrt()) - 1.0).abs() < 0.2, "{b}");
    assert!(lfm_waveform_json(200.0, 1000.0, 1500.0, 4, 2).is_err());
}
