use saltflow::noise::{sample_path, BrownianPath, Decay, NoiseBasis};
use saltflow::spectral::Grid;

#[test]
fn increments_have_variance_dt_and_no_cross_correlation() {
    let dt = 1e-3;
    let p = sample_path(11, dt, 100_000, 3).unwrap();
    let p = &p;
    let col = |k: usize| (0..p.n_steps()).map(move |n| p.step(n)[k]);
    for k in 0..3 {
        let var = col(k).map(|w| w * w).sum::<f64>() / p.n_steps() as f64;
        assert!(var > 0.99 * dt && var < 1.01 * dt, "channel {k}: {var}");
        let mean = col(k).sum::<f64>() / p.n_steps() as f64;
        assert!(mean.abs() < 5.0 * (dt / p.n_steps() as f64).sqrt());
    }
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let c = col(a).zip(col(b)).map(|(x, y)| x * y).sum::<f64>() / (p.n_steps() as f64 * dt);
        assert!(c.abs() < 0.01, "channels {a},{b}: {c}");
    }
}

#[test]
fn paths_are_seed_determined() {
    let a = sample_path(5, 0.01, 50, 4).unwrap();
    let b = sample_path(5, 0.01, 50, 4).unwrap();
    let c = sample_path(6, 0.01, 50, 4).unwrap();
    assert_eq!(a.increments(), b.increments());
    assert_ne!(a.increments(), c.increments());
}

#[test]
fn coarsening_preserves_the_path() {
    let fine = sample_path(3, 0.001, 64, 2).unwrap();
    let coarse = fine.coarsen(4).unwrap();
    assert_eq!(coarse.n_steps(), 16);
    assert!((coarse.dt() - 0.004).abs() < 1e-18);
    for k in 0..2 {
        assert!((coarse.terminal_value(k) - fine.terminal_value(k)).abs() < 1e-14);
    }
    for n in 0..16 {
        let s: f64 = (0..4).map(|j| fine.step(4 * n + j)[1]).sum();
        assert_eq!(coarse.step(n)[1], s);
    }
    let twice = fine.coarsen(2).unwrap().coarsen(2).unwrap();
    for (a, b) in twice.increments().iter().zip(coarse.increments()) {
        assert!((a - b).abs() < 1e-15);
    }
    assert!(fine.coarsen(3).is_err());
}

#[test]
fn path_files_round_trip_exactly() {
    let p = sample_path(9, 1.0 / 3.0, 20, 3).unwrap();
    let mut csv = Vec::new();
    p.write_csv(&mut csv).unwrap();
    let q = BrownianPath::read_csv(csv.as_slice()).unwrap();
    assert_eq!(p, q);
    let mut bin = Vec::new();
    p.write_binary(&mut bin).unwrap();
    assert_eq!(BrownianPath::read_binary(bin.as_slice()).unwrap(), p);
    assert!(BrownianPath::read_binary(&bin[..bin.len() - 3]).is_err());
}

#[test]
fn basis_norms_match_targets() {
    let g1 = Grid::one_d(128).unwrap();
    for decay in [Decay::Geometric { ratio: 0.5 }, Decay::Polynomial { exponent: 2.0 }] {
        let b = NoiseBasis::build_1d(g1, 10, decay, 4.0).unwrap();
        for (k, xi) in b.fields().iter().enumerate() {
            let t = decay.target(k + 1);
            assert!((xi.sobolev_norm(4.0) - t).abs() < 1e-10 * t.max(1e-300));
        }
        assert!((b.partial_sum(4.0) - (1..=10).map(|k| decay.target(k)).sum::<f64>()).abs() < 1e-10);
    }
    let g2 = Grid::two_d(64).unwrap();
    let b = NoiseBasis::build_sqg(g2, 8, Decay::default(), 3.0).unwrap();
    assert!(b.max_divergence() < 1e-12);
    for (k, xi) in b.fields().iter().enumerate() {
        let t = Decay::default().target(k + 1);
        assert!((xi.sobolev_norm(3.0) - t).abs() < 1e-10);
    }
}

#[test]
fn tail_bounds_dominate_the_dropped_sum() {
    for decay in [
        Decay::Geometric { ratio: 0.5 },
        Decay::Geometric { ratio: 0.9 },
        Decay::Polynomial { exponent: 1.5 },
        Decay::Polynomial { exponent: 3.0 },
    ] {
        for k in [0usize, 1, 8, 20] {
            let dropped: f64 = (k + 1..2_000_000).map(|j| decay.target(j)).sum();
            let bound = decay.tail_bound(k);
            assert!(bound * (1.0 + 1e-12) >= dropped, "{decay:?} K={k}: {bound} < {dropped}");
            assert!(bound <= 3.0 * dropped + 1e-300, "{decay:?} K={k} bound too loose");
        }
    }
    assert!(Decay::Polynomial { exponent: 1.0 }.tail_bound(5).is_infinite());
    let g = Grid::one_d(64).unwrap();
    assert!(NoiseBasis::build_1d(g, 4, Decay::Polynomial { exponent: 0.8 }, 2.0).is_err());
    assert!(NoiseBasis::build_1d(g, 4, Decay::Geometric { ratio: 1.0 }, 2.0).is_err());
}

#[test]
fn basis_beyond_the_band_is_rejected() {
    let g = Grid::one_d(16).unwrap();
    assert!(NoiseBasis::build_1d(g, 12, Decay::default(), 2.0).is_err());
    let b = NoiseBasis::build_1d(g, 4, Decay::default(), 2.0).unwrap();
    assert!(b.field(4).is_err());
}
