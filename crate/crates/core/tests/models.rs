mod common;

use common::*;
use saltflow::models::{ModelKind, ModelOps, ModelState};
use saltflow::noise::{Decay, NoiseBasis};
use saltflow::spectral::ops::product;
use saltflow::spectral::*;

fn band_state_1d(seed: u64, grid: Grid, two: bool) -> (SpectralField, SpectralField) {
    let mut r = rng(seed);
    let u = trig(grid, &mut r, grid.dealias_max() / 2, 1.5);
    let eta = if two {
        &trig(grid, &mut r, grid.dealias_max() / 2, 1.5)
            + &SpectralField::from_modes(grid, &[([0, 0], Complex64::new(0.4, 0.0))])
    } else {
        SpectralField::zeros(grid)
    };
    (u, eta)
}

fn ops(kind: ModelKind, grid: Grid, k: usize) -> ModelOps {
    ops_eps(kind, grid, k, 0.5)
}

fn ops_eps(kind: ModelKind, grid: Grid, k: usize, eps: f64) -> ModelOps {
    let basis = match (kind, k) {
        (_, 0) => NoiseBasis::empty(grid),
        (ModelKind::Sqg, _) => NoiseBasis::build_sqg(grid, k, Decay::Geometric { ratio: 0.5 }, 3.0).unwrap(),
        _ => NoiseBasis::build_1d(grid, k, Decay::Geometric { ratio: 0.5 }, 3.0).unwrap(),
    };
    ModelOps::new(kind, basis, eps).unwrap()
}

fn parts(x: &ModelState) -> (SpectralField, SpectralField) {
    match x {
        ModelState::Sch2 { u, eta } => (u.clone(), eta.clone()),
        _ => panic!("not sch2"),
    }
}

#[test]
fn sch2_regular_drift_matches_primitives() {
    let grid = Grid::one_d(128).unwrap();
    let (u, eta) = band_state_1d(1, grid, true);
    let o = ops(ModelKind::Sch2, grid, 0);
    let (bu, be) = parts(
        &o.b(&ModelState::Sch2 {
            u: u.clone(),
            eta: eta.clone(),
        })
        .unwrap(),
    );
    let ux = derivative(&u, 0);
    let inner = &(&product(&u, &u).scaled(0.5) + &product(&ux, &ux)) + &product(&eta, &eta).scaled(0.5);
    let expect_u = derivative(&bessel(&inner, -2.0), 0).scaled(-1.0);
    let expect_e = product(&eta, &ux).scaled(-1.0);
    assert!(rel_diff(&bu, &expect_u) < 1e-11);
    assert!(rel_diff(&be, &expect_e) < 1e-11);
}

/// With the `½u² + u_x²` nonlocal term the energy `∫u² + u_x² + η²` obeys
/// `dE/dt = ∫u_x³`; the η contributions cancel.
#[test]
fn sch2_energy_rate_identity() {
    let grid = Grid::one_d(128).unwrap();
    let o = ops(ModelKind::Sch2, grid, 0);
    for seed in 0..5 {
        let (u, eta) = band_state_1d(10 + seed, grid, true);
        let x = ModelState::Sch2 {
            u: u.clone(),
            eta: eta.clone(),
        };
        let v = o.b(&x).unwrap().axpy(1.0, &o.g(&x).unwrap()).unwrap();
        let (du, de) = parts(&v);
        let rate = 2.0 * (sobolev_inner(&u, &du, 1.0) + eta.inner(&de));
        let ux = derivative(&u, 0);
        let cube = ux.inner(&product(&ux, &ux));
        assert!((rate - cube).abs() < 1e-11 * cube.abs().max(1.0), "{rate} vs {cube}");
    }
}

/// `d/dt mean θ = Σ|k||θ̂_k|²` for the deterministic CCF drift.
#[test]
fn ccf_mean_rate_is_half_derivative_energy() {
    let grid = Grid::one_d(128).unwrap();
    let o = ops(ModelKind::Ccf, grid, 0);
    let mut r = rng(3);
    for _ in 0..5 {
        let th = trig(grid, &mut r, 20, 1.0);
        let x = ModelState::Ccf { theta: th.clone() };
        let v = o.g(&x).unwrap();
        let rate = v.means()[0];
        let expect = homogeneous_inner(&th, &th, 0.5);
        assert!(expect > 0.0);
        assert!((rate - expect).abs() < 1e-12 * expect, "{rate} vs {expect}");
    }
}

#[test]
fn sqg_transport_is_skew() {
    let grid = Grid::two_d(64).unwrap();
    let o = ops(ModelKind::Sqg, grid, 0);
    let mut r = rng(4);
    for _ in 0..3 {
        let th = trig(grid, &mut r, 20, 1.5);
        let x = ModelState::Sqg { theta: th.clone() };
        let v = o.g(&x).unwrap();
        let ModelState::Sqg { theta: d } = v else { panic!() };
        assert!(d.inner(&th).abs() < 1e-10 * th.inner(&th));
        assert!(d.coeff([0, 0]).norm() < 1e-13);
    }
}

#[test]
fn conserved_means_of_every_increment() {
    let g1 = Grid::one_d(128).unwrap();
    let (u, eta) = band_state_1d(5, g1, true);
    let mut r = rng(5);
    // b is not mollified, so the η mean of b + g_ε is exact only while J_ε
    // is the identity on the band: ε·42 < 1 here
    let cases = vec![
        (
            ops_eps(ModelKind::Sch2, g1, 6, 0.01),
            ModelState::Sch2 { u, eta },
            1usize,
        ),
        (
            ops(ModelKind::Ccf, g1, 6),
            ModelState::Ccf {
                theta: trig(g1, &mut r, 20, 1.0),
            },
            0,
        ),
    ];
    for (o, x, comp) in &cases {
        for eps_form in [false, true] {
            let g = if eps_form { o.g_eps(x) } else { o.g(x) }.unwrap();
            let b = o.b(x).unwrap();
            if matches!(x, ModelState::Sch2 { .. }) {
                // -ηu_x and -uη_x only combine into a derivative together
                let total = b.axpy(1.0, &g).unwrap();
                assert!(total.means()[*comp].abs() < 1e-13);
                assert!(b.means()[*comp].abs() > 1e-6);
            }
            for k in 0..6 {
                let h = if eps_form { o.h_eps(x, k) } else { o.h(x, k) }.unwrap();
                assert!(h.means()[*comp].abs() < 1e-13);
            }
        }
    }
    let g2 = Grid::two_d(64).unwrap();
    let o = ops(ModelKind::Sqg, g2, 6);
    let x = ModelState::Sqg {
        theta: trig(g2, &mut r, 10, 1.0),
    };
    assert!(o.g_eps(&x).unwrap().means()[0].abs() < 1e-13);
    for k in 0..6 {
        assert!(o.h_eps(&x, k).unwrap().means()[0].abs() < 1e-13);
    }
}

#[test]
fn mollified_operators_agree_with_plain_ones_on_low_modes() {
    let grid = Grid::one_d(128).unwrap();
    let (u, eta) = band_state_1d(6, grid, true);
    let basis = NoiseBasis::build_1d(grid, 4, Decay::Geometric { ratio: 0.5 }, 3.0).unwrap();
    // ĵ(ε|k|) = 1 for |k| ≤ 1/ε = 100, beyond the 2/3 band of 42
    let o = ModelOps::new(ModelKind::Sch2, basis, 0.01).unwrap();
    let x = ModelState::Sch2 { u, eta };
    let d = o.g_eps(&x).unwrap().sub(&o.g(&x).unwrap()).unwrap();
    assert!(d.max_abs_coeff() < 1e-12 * o.g(&x).unwrap().max_abs_coeff());
    let d = o.h_eps(&x, 2).unwrap().sub(&o.h(&x, 2).unwrap()).unwrap();
    assert_eq!(d.max_abs_coeff(), 0.0);
}

#[test]
fn strat_and_ito_drift_differ_by_the_correction() {
    let grid = Grid::one_d(128).unwrap();
    let mut r = rng(7);
    let o = ops(ModelKind::Ccf, grid, 4);
    let th = trig(grid, &mut r, 12, 1.0);
    let x = ModelState::Ccf { theta: th.clone() };
    let ito = o.b(&x).unwrap().axpy(1.0, &o.g_eps(&x).unwrap()).unwrap();
    let strat = o.strat_drift(&x).unwrap();
    let j = |f: &SpectralField| mollify(f, 0.5).unwrap();
    let corr = j(&j(&j(
        &saltflow::lie::ito_correction_spectral(o.basis(), &j(&th)).unwrap()
    )));
    let ModelState::Ccf { theta: diff } = ito.sub(&strat).unwrap() else {
        panic!()
    };
    assert!(rel_diff(&diff, &corr) < 1e-12);
}
