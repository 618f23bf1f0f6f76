use saltflow::estimates::*;
use saltflow::lie::VectorFieldXi;
use saltflow::noise::NoiseBasis;
use saltflow::spectral::Grid;

fn small() -> LabConfig {
    LabConfig {
        resolutions: vec![64, 128, 256],
        ..LabConfig::default()
    }
}

#[test]
fn growth_exponent_recovers_power_laws() {
    let sweep = [64.0, 128.0, 256.0, 512.0];
    for p in [-1.0, 0.0, 0.5, 2.0] {
        let r: Vec<f64> = sweep.iter().map(|n: &f64| 3.0 * n.powf(p)).collect();
        assert!((growth_exponent(&sweep, &r) - p).abs() < 1e-12);
    }
    let bounded = EstimateReport::new(
        "x",
        sweep.to_vec(),
        vec![1.0, 1.1, 1.05, 1.08],
        Criterion::GrowthAtMost(0.1),
    );
    assert!(bounded.pass);
    let growing = EstimateReport::new(
        "y",
        sweep.to_vec(),
        vec![1.0, 2.0, 4.0, 8.0],
        Criterion::GrowthAtMost(0.1),
    );
    assert!(!growing.pass);
    let nan = EstimateReport::new(
        "z",
        sweep.to_vec(),
        vec![1.0, f64::NAN, 1.0, 1.0],
        Criterion::Informational,
    );
    assert!(!nan.pass);
}

#[test]
fn constant_transport_cancels_exactly() {
    let grid = Grid::one_d(256).unwrap();
    let xi = VectorFieldXi::constant(grid, &[0.8]).unwrap();
    let basis = NoiseBasis::from_fields(grid, vec![xi]).unwrap();
    for entry in corpus(&Roughness::STANDARD, 2, 3) {
        let f = entry.field(grid, 4.0, 1);
        let (q, first) = cancellation_terms(&basis, &f, 4.0).unwrap();
        assert!(q.abs() < 1e-10 * first.abs(), "{q} vs {first}");
    }
}

#[test]
fn cancellation_suite_on_a_short_ladder() {
    let [cancel, first] = check_cancellation(&small()).unwrap();
    assert!(cancel.pass, "{cancel:?}");
    assert!(first.exponent > cancel.exponent + 0.5);
    assert_eq!(cancel.sweep, vec![64.0, 128.0, 256.0]);
}

#[test]
fn reports_write_columnar_text() {
    let r = check_kato_ponce(&small()).unwrap();
    let mut out = Vec::new();
    r.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
    let table = summary_table(std::slice::from_ref(&r));
    assert!(table.contains("kato_ponce"));
}

#[test]
fn selection_by_id() {
    let cfg = small();
    assert_eq!(run_estimate("te_commutator", &cfg).unwrap().len(), 1);
    let err = run_estimate("no_such_check", &cfg).unwrap_err().to_string();
    for id in ESTIMATE_IDS {
        assert!(err.contains(id), "{err}");
    }
}

#[test]
fn corpus_is_reproducible_and_nested_across_resolutions() {
    let a = corpus(&Roughness::STANDARD, 2, 11);
    assert_eq!(a, corpus(&Roughness::STANDARD, 2, 11));
    let coarse = a[1].field(Grid::one_d(64).unwrap(), 4.0, 0);
    let fine = a[1].field(Grid::one_d(128).unwrap(), 4.0, 0);
    for k in 1..20 {
        assert_eq!(coarse.coeff([k, 0]), fine.coeff([k, 0]));
    }
}
