//! One test per acceptance criterion. Each prints a `[PASS]`/`[FAIL]` line
//! (visible with `--nocapture`) before asserting.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use walkzeta::coins::{
    crw_coin, flip_flop, fourier_matrix, grover_matrix, hadamard, oqrw_example_pair, oqrw_lift,
    positive_support_grover, rw_coin, symmetric_rw, three_state_grover, Coin,
};
use walkzeta::linalg::{CMatrix, C64, ONE};
use walkzeta::symbol::{symbol, verify_factorization, TorusGrid};
use walkzeta::walk::{
    evolve, oqrw_step, spin_up_density, step, total_measure, uniform_internal, OqrwState, TorusConfig, WalkState,
};
use walkzeta::zeta::{
    c_2l_closed_1d, c_r_closed_1d, c_r_direct, c_r_dp, c_r_fourier, c_r_limit, catalog, catalog_entry, catalog_verify,
    central_binomial_identity, hyp2f1_at_one_exact, hyp2f1_terminating, prefactor_remainder, series_consistency,
    zeta_inv_finite, CATALOG_TOL,
};

fn report(id: &str, passed: bool, detail: String) {
    println!("[{}] {id} {detail}", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "{id} failed: {detail}");
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn cfg(d: usize, n: usize) -> TorusConfig {
    TorusConfig::new(d, n).unwrap()
}

#[test]
fn ac01_factorization() {
    let start = Instant::now();
    let us = [
        C64::new(0.3, 0.0),
        C64::new(-0.5, 0.2),
        C64::new(0.1, 0.7),
        C64::new(0.8, -0.4),
        C64::new(-0.25, -0.6),
        C64::new(0.0, 0.95),
    ];
    let one_dim = [hadamard(), crw_coin(0.6), rw_coin(0.9), three_state_grover()];
    let two_dim = [
        grover_matrix(4).unwrap(),
        fourier_matrix(4).unwrap(),
        positive_support_grover(4).unwrap(),
    ];
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (coins, d, ns) in [(&one_dim[..], 1, [2, 4, 6]), (&two_dim[..], 2, [2, 3, 4])] {
        for coin in coins {
            for n in ns {
                worst = worst.max(verify_factorization(coin, cfg(d, n), &us).unwrap().max_rel_err);
                cases += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        "AC1",
        worst < 1e-8 && secs < 10.0,
        format!("{cases} cases, max rel err {worst:.2e}, {secs:.2}s"),
    );
}

#[test]
fn ac02_symmetric_rw_series() {
    let walk = symmetric_rw();
    let want = |r: usize| -> C64 {
        if r % 2 == 1 {
            return re(0.0);
        }
        let l = r / 2;
        // (1/2)^{2l} C(2l, l) by an exact running product
        let mut v = 1.0;
        for i in 1..=l {
            v *= (l + i) as f64 / (4.0 * i as f64);
        }
        re(v)
    };
    let tables = [
        c_r_fourier(&walk, cfg(1, 32), 20).unwrap(),
        c_r_direct(&walk, cfg(1, 8), 6).unwrap(),
        c_r_limit(&walk, 1, 20, 64).unwrap(),
        c_r_closed_1d(walk.matrix(), 20).unwrap(),
    ];
    let mut worst = 0.0f64;
    for t in &tables {
        for r in 1..=t.rmax() {
            worst = worst.max((t.get(r).unwrap() - want(r)).norm());
        }
    }
    report(
        "AC2",
        worst < 1e-10,
        format!("fourier/direct/quadrature/closed max abs err {worst:.2e}"),
    );
}

#[test]
fn ac03_limit_equals_return_trace() {
    let start = Instant::now();
    let g2 = grover_matrix(4).unwrap();
    let g3f = flip_flop(&grover_matrix(6).unwrap(), 3).unwrap();
    let cases: [(&str, &Coin, usize, usize); 4] = [
        ("hadamard", &hadamard(), 1, 20),
        ("crw(0.5)", &crw_coin(0.5), 1, 20),
        ("grover2-m", &g2, 2, 12),
        ("grover3-f", &g3f, 3, 10),
    ];
    let mut details = Vec::new();
    let mut worst = 0.0f64;
    for (name, coin, d, rmax) in cases {
        let q = c_r_limit(coin, d, rmax, rmax + 1).unwrap();
        let dp = c_r_dp(coin, rmax).unwrap();
        let err = q.max_abs_diff(&dp);
        worst = worst.max(err);
        details.push(format!("{name} {err:.1e}"));
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        "AC3",
        worst < 1e-9 && secs < 60.0,
        format!("{} ({secs:.2}s)", details.join(", ")),
    );
}

fn random_unitary(rng: &mut ChaCha8Rng) -> CMatrix {
    let (t, a, b, g) = (
        rng.gen_range(0.1..1.4),
        rng.gen_range(-PI..PI),
        rng.gen_range(-PI..PI),
        rng.gen_range(-PI..PI),
    );
    let (s, c) = f64::sin_cos(t);
    let e = |x: f64| C64::from_polar(1.0, x);
    CMatrix::from_rows(&[vec![e(g + a) * c, e(g + b) * s], vec![-e(g - b) * s, e(g - a) * c]]).unwrap()
}

fn random_stochastic(rng: &mut ChaCha8Rng) -> CMatrix {
    let p: f64 = rng.gen_range(0.05..0.95);
    let q: f64 = rng.gen_range(0.05..0.95);
    CMatrix::real(&[&[p, q], &[1.0 - p, 1.0 - q]])
}

#[test]
fn ac04_closed_form_random_coins() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let a = if i % 2 == 0 {
            random_unitary(&mut rng)
        } else {
            random_stochastic(&mut rng)
        };
        let coin = Coin::custom(a.clone()).unwrap();
        let dp = c_r_dp(&coin, 16).unwrap();
        let (a11, a12, a21, a22) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
        for l in 1..=8u64 {
            let truth = dp.get(2 * l as usize).unwrap();
            let finite = c_2l_closed_1d(&a, l).unwrap();
            let z = a12 * a21 / (a11 * a22);
            let hyper = (a11 * a22).powu(l as u32 - 1) * a12 * a21 * hyp2f1_terminating(l, z) * (2.0 * l as f64);
            let scale = truth.norm().max(f64::MIN_POSITIVE);
            worst = worst
                .max((finite - truth).norm() / scale)
                .max((hyper - truth).norm() / scale);
        }
    }
    report(
        "AC4",
        worst < 1e-9,
        format!("20 coins, l <= 8, max rel err {worst:.2e}"),
    );
}

#[test]
fn ac05_catalog_residuals() {
    let mut failed = Vec::new();
    let mut worst = 0.0f64;
    let mut ps3 = String::new();
    for entry in catalog(0.6) {
        let r = catalog_verify(&entry, 100, 5).unwrap();
        if entry.id == "ps3d-m" {
            ps3 = format!(
                "ps3d-m verbatim {:.1e}, {}",
                r.max_abs_err,
                r.variants
                    .iter()
                    .map(|v| format!("{} {:.1e}", v.name, v.max_abs_err))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            match r.matching_formula() {
                Some(name) => ps3.push_str(&format!(" -> {name} matches")),
                None => failed.push(entry.id.clone()),
            }
            continue;
        }
        worst = worst.max(r.max_abs_err);
        if !r.passed {
            failed.push(format!("{} ({:.1e})", entry.id, r.max_abs_err));
        }
    }
    report(
        "AC5",
        failed.is_empty() && worst < CATALOG_TOL,
        format!("max err {worst:.2e}; {ps3}; failed: {failed:?}"),
    );
}

#[test]
fn ac06_localisation_prefactors() {
    let mut worst = 0.0f64;
    let mut count = 0;
    for id in [
        "grover3-f",
        "grover3-m",
        "grover2-m",
        "grover2-f",
        "ps2-f",
        "grover3d-f",
        "ps3d-f",
    ] {
        let entry = catalog_entry(0.6, id).unwrap();
        let grid = TorusGrid::new(entry.d, [0, 50, 8, 4][entry.d]);
        for i in 0..50 {
            let w = grid.point(i * grid.len() / 50);
            worst = worst.max(prefactor_remainder(&entry, &w).unwrap());
            count += 1;
        }
    }
    report(
        "AC6",
        worst < 1e-9,
        format!("{count} divisions, max remainder {worst:.2e}"),
    );
}

#[test]
fn ac07_wraparound() {
    let n = 8;
    let h = c_r_fourier(&hadamard(), cfg(1, n), n).unwrap();
    let h_lim = c_r_dp(&hadamard(), n).unwrap();
    let below = (1..n)
        .map(|r| (h.get(r).unwrap() - h_lim.get(r).unwrap()).norm())
        .fold(0.0, f64::max);
    let s = c_r_fourier(&symmetric_rw(), cfg(1, n), n).unwrap();
    let s_lim = c_r_dp(&symmetric_rw(), n).unwrap();
    let at_n = (s.get(n).unwrap() - s_lim.get(n).unwrap()).norm();
    report(
        "AC7",
        below < 1e-10 && at_n > 1e-6,
        format!("hadamard r<8 max err {below:.2e}; sym-rw r=8 gap {at_n:.3e}"),
    );
}

#[test]
fn ac08_series_zeta_consistency() {
    let us = [re(0.1), re(0.2), re(0.3)];
    let mut worst = 0.0f64;
    for coin in [hadamard(), symmetric_rw()] {
        let rep = series_consistency(&coin, cfg(1, 8), 30, &us).unwrap();
        for (s, &u) in rep.samples.iter().zip(&us) {
            let inv = zeta_inv_finite(&coin, cfg(1, 8), u).unwrap().zeta_inv;
            worst = worst.max((s.series * inv - ONE).norm());
        }
    }
    report("AC8", worst < 1e-7, format!("max |series * zeta^-1 - 1| {worst:.2e}"));
}

fn drift(coin: &Coin, config: TorusConfig, p: u32, steps: usize) -> f64 {
    let mut state = WalkState::at_origin(config, &uniform_internal(coin.states(), p));
    let first = total_measure(&state, p).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..steps {
        state = step(&state, coin).unwrap();
        worst = worst.max((total_measure(&state, p).unwrap() - first).abs());
    }
    worst
}

#[test]
fn ac09_conservation() {
    let stochastic_2d = Coin::custom(CMatrix::real(&[&[0.25; 4], &[0.25; 4], &[0.25; 4], &[0.25; 4]])).unwrap();
    let unitary = [
        drift(&hadamard(), cfg(1, 16), 2, 50),
        drift(&grover_matrix(4).unwrap(), cfg(2, 8), 2, 50),
        drift(&fourier_matrix(4).unwrap(), cfg(2, 8), 2, 50),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let stochastic = [
        drift(&symmetric_rw(), cfg(1, 16), 1, 50),
        drift(&stochastic_2d, cfg(2, 8), 1, 50),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let (b, c) = oqrw_example_pair();
    let pair = oqrw_lift(&b, &c).unwrap();
    let mut rho = OqrwState::from_density(cfg(1, 16), &spin_up_density()).unwrap();
    let mut oqrw = 0.0f64;
    for _ in 0..100 {
        rho = oqrw_step(&rho, &pair).unwrap();
        oqrw = oqrw.max((rho.total_trace() - 1.0).abs());
    }

    let ps = positive_support_grover(4).unwrap();
    let start = WalkState::at_origin(cfg(2, 8), &uniform_internal(4, 1));
    let growth = total_measure(&evolve(&start, &ps, 5).unwrap(), 1).unwrap() / total_measure(&start, 1).unwrap();

    let passed = unitary < 1e-10 && stochastic < 1e-10 && oqrw < 1e-10 && growth > 2.0;
    report(
        "AC9",
        passed,
        format!("unitary drift {unitary:.1e}, stochastic {stochastic:.1e}, oqrw {oqrw:.1e}, ps growth x{growth:.0}"),
    );
}

#[test]
fn ac10_exact_combinatorics() {
    let central = (1..=20).all(|n| matches!(central_binomial_identity(n), Some((l, r)) if l == r));
    let gamma = (1..=12).all(|n| matches!(hyp2f1_at_one_exact(n), Some((l, r)) if l == r));
    report(
        "AC10",
        central && gamma,
        format!("central binomial n<=20: {central}; 2F1 at 1 n<=12: {gamma}"),
    );
}

#[test]
fn symbol_at_origin_sums_kernel() {
    // guards the grid convention used by AC6
    let s = symbol(&hadamard(), &[0.0]).unwrap();
    assert!(s.matrix.max_abs_diff(hadamard().matrix()) < 1e-15);
}
