use serde::Serialize;
use walkzeta::coins::{fourier_matrix, grover_matrix, hadamard, symmetric_rw};
use walkzeta::linalg::C64;
use walkzeta::symbol::verify_factorization;
use walkzeta::walk::{infinite_cap, oqrw_step, spin_up_density, OqrwState, OPERATOR_CAP};
use walkzeta::zeta::{
    c_r_dp, c_r_limit, catalog, catalog_verify, central_binomial_identity, hyp2f1_at_one_exact, series_consistency,
    CatalogWalk, SeriesMethod, CATALOG_TOL,
};

use crate::args::{Cli, Format, Suite};
use crate::commands::{coin_measures, config, grid_m, series_table};
use crate::model::{build_walk, norm_exponent};
use crate::CliError;

const FACTORIZATION_TOL: f64 = 1e-9;
const SERIES_TOL: f64 = 1e-9;
const CONSERVATION_TOL: f64 = 1e-10;
const CATALOG_SAMPLES: usize = 100;
const CATALOG_SEED: u64 = 2024;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub passed: bool,
    pub metric: &'static str,
    pub value: f64,
    pub tol: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

fn result(suite: &'static str, metric: &'static str, value: f64, tol: f64, detail: String) -> SuiteResult {
    SuiteResult {
        suite,
        passed: value < tol,
        metric,
        value,
        tol,
        detail,
    }
}

fn default_u_samples() -> Vec<C64> {
    vec![
        C64::new(0.3, 0.0),
        C64::new(-0.5, 0.2),
        C64::new(0.1, 0.7),
        C64::new(0.8, -0.4),
        C64::new(0.0, 0.95),
    ]
}

fn factorization(cli: &Cli, walk: &CatalogWalk) -> Result<SuiteResult, CliError> {
    let us = if cli.u.is_empty() {
        default_u_samples()
    } else {
        cli.u.clone()
    };
    let r = verify_factorization(walk, config(cli)?, &us)?;
    Ok(result(
        "factorization",
        "max_rel_err",
        r.max_rel_err,
        FACTORIZATION_TOL,
        format!("{} u samples", us.len()),
    ))
}

fn series(cli: &Cli, walk: &CatalogWalk) -> Result<SuiteResult, CliError> {
    let fourier = series_table(cli, walk, SeriesMethod::Fourier)?;
    let states = walkzeta::kernel::Walk::kernel(walk)?.states();
    let mut worst = 0.0f64;
    let mut compared = vec![];
    if states * cli.n.pow(cli.d as u32) <= OPERATOR_CAP {
        worst = worst.max(fourier.max_abs_diff(&series_table(cli, walk, SeriesMethod::Direct)?));
        compared.push("fourier/direct");
    }
    if infinite_cap(cli.d).is_some_and(|cap| cli.rmax <= cap) {
        let dp = c_r_dp(walk, cli.rmax)?;
        worst = worst.max(c_r_limit(walk, cli.d, cli.rmax, grid_m(cli))?.max_abs_diff(&dp));
        compared.push("quadrature/dp");
        if let Ok(closed) = series_table(cli, walk, SeriesMethod::Closed) {
            worst = worst.max(closed.max_abs_diff(&dp));
            compared.push("closed/dp");
        }
    }
    Ok(result("series", "max_abs_diff", worst, SERIES_TOL, compared.join(", ")))
}

fn consistency(cli: &Cli, walk: &CatalogWalk) -> Result<SuiteResult, CliError> {
    let us = if cli.u.is_empty() {
        vec![C64::new(0.1, 0.0), C64::new(0.2, 0.0)]
    } else {
        cli.u.clone()
    };
    let r = series_consistency(walk, config(cli)?, cli.rmax, &us)?;
    // ratio of error to the per-sample tail bound; below 1 passes
    let ratio = r.samples.iter().map(|s| s.abs_err / s.tol).fold(0.0, f64::max);
    Ok(result(
        "consistency",
        "err_over_bound",
        ratio,
        1.0,
        format!("rmax {}, spectral bound {:.6}", r.rmax, r.spectral_bound),
    ))
}

fn catalog_suite(cli: &Cli) -> Result<SuiteResult, CliError> {
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for entry in catalog(cli.xi) {
        let r = catalog_verify(&entry, CATALOG_SAMPLES, CATALOG_SEED)?;
        if r.passed {
            worst = worst.max(r.max_abs_err);
            continue;
        }
        match r.matching_formula() {
            Some(name) => {
                let v = r
                    .variants
                    .iter()
                    .find(|v| v.name == name)
                    .map_or(f64::INFINITY, |v| v.max_abs_err);
                worst = worst.max(v);
                notes.push(format!("{} matches variant {name}", r.id));
            }
            None => {
                worst = worst.max(r.max_abs_err);
                notes.push(format!("{} fails ({:.2e})", r.id, r.max_abs_err));
            }
        }
    }
    Ok(result("catalog", "max_abs_err", worst, CATALOG_TOL, notes.join("; ")))
}

fn conservation(cli: &Cli, walk: &CatalogWalk) -> Result<SuiteResult, CliError> {
    let cfg = config(cli)?;
    let p = norm_exponent(cli, walk)?;
    match walk {
        CatalogWalk::Oqrw(pair) => {
            let mut state = OqrwState::from_density(cfg, &spin_up_density())?;
            let mut drift = 0.0f64;
            for _ in 0..cli.steps {
                state = oqrw_step(&state, pair)?;
                drift = drift.max((state.total_trace() - 1.0).abs());
            }
            Ok(result(
                "conservation",
                "trace_drift",
                drift,
                CONSERVATION_TOL,
                format!("{} steps", cli.steps),
            ))
        }
        CatalogWalk::Coin(coin) => {
            let totals: Vec<f64> = coin_measures(coin, cfg, p, cli.steps)?
                .iter()
                .map(|m| m.iter().sum())
                .collect();
            let drift = totals.iter().map(|t| (t - totals[0]).abs()).fold(0.0, f64::max);
            let conserving = (coin.model().is_unitary() && p == 2) || (coin.model().is_stochastic() && p == 1);
            if conserving {
                Ok(result(
                    "conservation",
                    "measure_drift",
                    drift,
                    CONSERVATION_TOL,
                    format!("p = {p}, {} steps", cli.steps),
                ))
            } else {
                let growth = totals.last().copied().unwrap_or(1.0) / totals[0];
                Ok(SuiteResult {
                    suite: "conservation",
                    passed: true,
                    metric: "growth",
                    value: growth,
                    tol: f64::INFINITY,
                    detail: format!("{:?} coin with p = {p} is not measure preserving", coin.model()),
                })
            }
        }
    }
}

fn combinatorics() -> SuiteResult {
    let central = (1..=20)
        .filter(|&n| !matches!(central_binomial_identity(n), Some((l, r)) if l == r))
        .count();
    let gamma = (1..=12)
        .filter(|&n| !matches!(hyp2f1_at_one_exact(n), Some((l, r)) if l == r))
        .count();
    result(
        "combinatorics",
        "failures",
        (central + gamma) as f64,
        0.5,
        "central binomial n <= 20, 2F1 at 1 n <= 12".into(),
    )
}

/// Sanity of the fixed reference walks, independent of `--model`.
fn references() -> Result<Vec<f64>, CliError> {
    Ok(vec![
        (c_r_dp(&symmetric_rw(), 2)?.get(2).unwrap_or_default() - C64::new(0.5, 0.0)).norm(),
        (c_r_dp(&hadamard(), 4)?.get(4).unwrap_or_default() - C64::new(-0.5, 0.0)).norm(),
        grover_matrix(4)?.matrix().unitarity_defect(),
        fourier_matrix(4)?.matrix().unitarity_defect(),
    ])
}

pub fn run(cli: &Cli) -> Result<(String, bool), CliError> {
    config(cli)?;
    let walk = build_walk(cli)?;
    let all = cli.suite == Suite::All;
    let mut suites = Vec::new();
    if all || cli.suite == Suite::Factorization {
        suites.push(factorization(cli, &walk)?);
    }
    if all || cli.suite == Suite::Series {
        suites.push(series(cli, &walk)?);
    }
    if all || cli.suite == Suite::Consistency {
        suites.push(consistency(cli, &walk)?);
    }
    if all || cli.suite == Suite::Catalog {
        suites.push(catalog_suite(cli)?);
    }
    if all || cli.suite == Suite::Conservation {
        suites.push(conservation(cli, &walk)?);
    }
    if all || cli.suite == Suite::Combinatorics {
        let mut c = combinatorics();
        let worst = references()?.into_iter().fold(0.0, f64::max);
        if worst > 1e-12 {
            c.passed = false;
            c.detail.push_str(&format!("; reference walks off by {worst:.2e}"));
        }
        suites.push(c);
    }
    let report = VerifyReport {
        passed: suites.iter().all(|s| s.passed),
        suites,
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serialises") + "\n",
        Format::Csv => {
            let mut out = String::from("suite,passed,metric,value,tol\n");
            for s in &report.suites {
                out.push_str(&format!(
                    "{},{},{},{:.16e},{:.16e}\n",
                    s.suite, s.passed, s.metric, s.value, s.tol
                ));
            }
            out
        }
    };
    Ok((text, report.passed))
}
