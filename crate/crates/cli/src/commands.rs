use serde::Serialize;
use walkzeta::coins::Coin;
use walkzeta::linalg::{CMatrix, C64};
use walkzeta::walk::{
    measure, oqrw_step, spin_up_density, step, uniform_internal, MeasureSeries, OqrwState, TorusConfig, WalkState,
};
use walkzeta::zeta::{
    c_r_closed_1d, c_r_direct, c_r_dp, c_r_fourier, c_r_limit, zeta_inv_finite, zeta_inv_limit, CatalogWalk,
    SeriesMethod, SeriesTable, ZetaEvaluation,
};
use walkzeta::Error;

use crate::args::{Cli, Format};
use crate::model::{build_walk, norm_exponent};
use crate::CliError;

/// Relative tolerance between the `M` and `2M` quadrature grids.
pub const LIMIT_TOL: f64 = 1e-10;

pub fn config(cli: &Cli) -> Result<TorusConfig, CliError> {
    if !(1..=3).contains(&cli.d) {
        return Err(CliError::Config(format!("--d must be 1, 2 or 3, got {}", cli.d)));
    }
    if cli.n < 2 {
        return Err(CliError::Config(format!("--N must be at least 2, got {}", cli.n)));
    }
    if cli.rmax == 0 || cli.rmax > walkzeta::zeta::RMAX_CAP {
        return Err(CliError::Config(format!(
            "--rmax must be in 1..={}, got {}",
            walkzeta::zeta::RMAX_CAP,
            cli.rmax
        )));
    }
    Ok(TorusConfig::new(cli.d, cli.n)?)
}

pub fn grid_m(cli: &Cli) -> usize {
    cli.grid_m.unwrap_or_else(|| (cli.rmax + 1).max(64))
}

pub fn u_values(cli: &Cli) -> Vec<C64> {
    if cli.u.is_empty() {
        vec![C64::new(0.1, 0.0)]
    } else {
        cli.u.clone()
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serialises");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct MatrixDump<'a> {
    name: &'a str,
    rows: Vec<Vec<C64>>,
}

fn rows(m: &CMatrix) -> Vec<Vec<C64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn matrices_csv(mats: &[MatrixDump]) -> String {
    let mut out = String::from("matrix,row,col,re,im\n");
    for m in mats {
        for (i, row) in m.rows.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                out.push_str(&format!("{},{i},{j},{:.16e},{:.16e}\n", m.name, z.re, z.im));
            }
        }
    }
    out
}

pub fn coin(cli: &Cli) -> Result<String, CliError> {
    config(cli)?;
    let walk = build_walk(cli)?;
    match (&walk, cli.format) {
        (CatalogWalk::Coin(c), Format::Json) => Ok(json(&c.to_record())),
        (CatalogWalk::Coin(c), Format::Csv) => Ok(matrices_csv(&[MatrixDump {
            name: "A",
            rows: rows(c.matrix()),
        }])),
        (CatalogWalk::Oqrw(pair), fmt) => {
            let mats = [
                MatrixDump {
                    name: "B",
                    rows: rows(pair.b()),
                },
                MatrixDump {
                    name: "C",
                    rows: rows(pair.c()),
                },
            ];
            Ok(match fmt {
                Format::Json => json(&mats),
                Format::Csv => matrices_csv(&mats),
            })
        }
    }
}

pub fn evolve(cli: &Cli) -> Result<String, CliError> {
    let cfg = config(cli)?;
    let walk = build_walk(cli)?;
    let p = norm_exponent(cli, &walk)?;
    let measures = match &walk {
        CatalogWalk::Coin(coin) => coin_measures(coin, cfg, p, cli.steps)?,
        CatalogWalk::Oqrw(pair) => {
            let mut state = OqrwState::from_density(cfg, &spin_up_density())?;
            let mut out = vec![state.measure()];
            for _ in 0..cli.steps {
                state = oqrw_step(&state, pair)?;
                out.push(state.measure());
            }
            out
        }
    };
    let series = MeasureSeries {
        config: cfg,
        p,
        measures,
    };
    Ok(match cli.format {
        Format::Json => series.to_json() + "\n",
        Format::Csv => series.to_csv(),
    })
}

pub fn coin_measures(coin: &Coin, cfg: TorusConfig, p: u32, steps: usize) -> Result<Vec<Vec<f64>>, Error> {
    let mut state = WalkState::at_origin(cfg, &uniform_internal(coin.states(), p));
    let mut out = vec![measure(&state, p)?];
    for _ in 0..steps {
        state = step(&state, coin)?;
        out.push(measure(&state, p)?);
    }
    Ok(out)
}

fn evaluations_csv(evals: &[ZetaEvaluation]) -> String {
    let mut out = String::from("u_re,u_im,re,im,log_re,log_im,imag_residual,branch_risk\n");
    for e in evals {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
            e.u.re,
            e.u.im,
            e.zeta_inv.re,
            e.zeta_inv.im,
            e.log_zeta_inv.re,
            e.log_zeta_inv.im,
            e.imag_residual,
            e.branch_risk
        ));
    }
    out
}

pub fn zeta(cli: &Cli) -> Result<String, CliError> {
    let cfg = config(cli)?;
    let walk = build_walk(cli)?;
    let evals = u_values(cli)
        .into_iter()
        .map(|u| zeta_inv_finite(&walk, cfg, u))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match cli.format {
        Format::Json => json(&evals),
        Format::Csv => evaluations_csv(&evals),
    })
}

pub fn zeta_limit(cli: &Cli) -> Result<String, CliError> {
    config(cli)?;
    let walk = build_walk(cli)?;
    let m = grid_m(cli);
    let mut reports = Vec::new();
    for u in u_values(cli) {
        match zeta_inv_limit(&walk, cli.d, u, m, LIMIT_TOL) {
            Ok(r) => reports.push(r),
            Err(e @ Error::NotConverged { .. }) => return Err(CliError::Failed(format!("u = {u}: {e}"))),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(match cli.format {
        Format::Json => json(&reports),
        Format::Csv => {
            let mut out = String::from("u_re,u_im,re,im,coarse_re,coarse_im,abs_diff,grid_m\n");
            for r in &reports {
                out.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{m}\n",
                    r.value.u.re,
                    r.value.u.im,
                    r.value.zeta_inv.re,
                    r.value.zeta_inv.im,
                    r.coarse.zeta_inv.re,
                    r.coarse.zeta_inv.im,
                    r.abs_diff
                ));
            }
            out
        }
    })
}

pub fn series_table(cli: &Cli, walk: &CatalogWalk, method: SeriesMethod) -> Result<SeriesTable, CliError> {
    let cfg = config(cli)?;
    Ok(match method {
        SeriesMethod::Fourier => c_r_fourier(walk, cfg, cli.rmax)?,
        SeriesMethod::Direct => c_r_direct(walk, cfg, cli.rmax)?,
        SeriesMethod::Dp => c_r_dp(walk, cli.rmax)?,
        SeriesMethod::Quadrature => c_r_limit(walk, cli.d, cli.rmax, grid_m(cli))?,
        SeriesMethod::Closed => match walk {
            CatalogWalk::Coin(c) if cli.d == 1 && c.states() == 2 => c_r_closed_1d(c.matrix(), cli.rmax)?,
            _ => {
                return Err(CliError::Config(
                    "--method closed needs a one-dimensional two-state coin".into(),
                ))
            }
        },
    })
}

pub fn cr(cli: &Cli) -> Result<String, CliError> {
    config(cli)?;
    let walk = build_walk(cli)?;
    let tables = cli
        .method
        .iter()
        .map(|&m| series_table(cli, &walk, m))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match cli.format {
        Format::Json => json(&tables),
        Format::Csv => {
            let mut out = String::new();
            for t in &tables {
                let csv = t.to_csv();
                // one header for the whole file
                out.push_str(if out.is_empty() {
                    &csv
                } else {
                    csv.split_once('\n').map_or("", |(_, rest)| rest)
                });
            }
            out
        }
    })
}
