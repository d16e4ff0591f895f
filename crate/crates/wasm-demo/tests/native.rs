use drcss_wasm::{column_iapr, describe, heatmap, metrics_report, rho_sweep};

#[test]
fn describe_reports_shape() {
    let v: serde_json::Value = serde_json::from_str(&describe("T4", 5, true).unwrap()).unwrap();
    assert_eq!(
        (v["K"].as_u64(), v["M"].as_u64(), v["N"].as_u64()),
        (Some(4), Some(4), Some(5))
    );
    assert_eq!(v["e"], 3);
    assert!(describe("T1", 7, true).is_err());
    assert!(describe("T6", 7, false).is_err());
}

#[test]
fn heatmap_is_square_with_central_peak() {
    let px = heatmap("T1", 5, true, 0, 0, false).unwrap();
    assert_eq!(px.len(), 81);
    assert_eq!(px[40], 255);
    let cross = heatmap("T1", 5, true, 1, 3, false).unwrap();
    assert!(cross.iter().all(|&g| g == 0 || g == 51));
    let log = heatmap("T1", 5, true, 1, 3, true).unwrap();
    assert!(log.iter().zip(&cross).all(|(l, c)| l >= c));
    assert!(heatmap("T1", 5, false, 0, 6, false).is_err());
}

#[test]
fn metrics_and_sweep() {
    let m: serde_json::Value =
        serde_json::from_str(&metrics_report("T5", 7, false, 0, 0).unwrap()).unwrap();
    assert!((m["theta_max"].as_f64().unwrap() - 6.0).abs() < 1e-6);
    assert!(metrics_report("T5", 7, false, 9, 1).is_err());

    let rows: serde_json::Value =
        serde_json::from_str(&rho_sweep("T3", &[5, 11]).unwrap()).unwrap();
    assert!((rows[1]["theta_opt"].as_f64().unwrap() - 9.2657).abs() < 5e-5);
    assert!((rows[1]["rho"].as_f64().unwrap() - 1.1872).abs() < 5e-5);
}

#[test]
fn iapr_of_dft_column_peaks_at_p() {
    let curve = column_iapr("T1", 7, false, 2, 3, 14).unwrap();
    assert_eq!(curve.len(), 7 * 14);
    let peak = curve.iter().copied().fold(0.0, f64::max);
    assert!((peak - 7.0).abs() < 1e-9);
    let mean = curve.iter().sum::<f64>() / curve.len() as f64;
    assert!((mean - 1.0).abs() < 1e-9);
    assert!(column_iapr("T1", 7, false, 2, 7, 14).is_err());
    assert!(column_iapr("T1", 7, false, 2, 0, 2).is_err());
}
