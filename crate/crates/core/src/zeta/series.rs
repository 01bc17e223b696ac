use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::closed::c_2l_closed_1d;
use super::evaluate::{check_dim, zeta_inv_finite};
use crate::error::{Error, Result};
use crate::kernel::Walk;
use crate::linalg::{CMatrix, C64, ONE, ZERO};
use crate::symbol::{symbol, TorusGrid};
use crate::walk::{assemble_ma, return_traces, TorusConfig};

/// Largest series order computed by any route.
pub const RMAX_CAP: usize = 64;

/// Where a table of `C_r` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesMethod {
    Fourier,
    Direct,
    Dp,
    Closed,
    Quadrature,
}

impl SeriesMethod {
    pub const ALL: [SeriesMethod; 5] = [
        SeriesMethod::Fourier,
        SeriesMethod::Direct,
        SeriesMethod::Dp,
        SeriesMethod::Closed,
        SeriesMethod::Quadrature,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeriesMethod::Fourier => "fourier",
            SeriesMethod::Direct => "direct",
            SeriesMethod::Dp => "dp",
            SeriesMethod::Closed => "closed",
            SeriesMethod::Quadrature => "quadrature",
        }
    }
}

impl fmt::Display for SeriesMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeriesMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown series method `{s}`")))
    }
}

/// `C_1, ..., C_rmax` with their provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTable {
    pub method: SeriesMethod,
    pub values: Vec<C64>,
}

impl SeriesTable {
    pub fn rmax(&self) -> usize {
        self.values.len()
    }

    /// `C_r`, 1-based.
    pub fn get(&self, r: usize) -> Option<C64> {
        r.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }

    /// Largest `|C_r - C'_r|` over the common range.
    pub fn max_abs_diff(&self, other: &SeriesTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("series serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Header `r,re,im,method`; 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,re,im,method\n");
        out.push_str(&self.csv_rows());
        out
    }

    pub(crate) fn csv_rows(&self) -> String {
        self.values
            .iter()
            .enumerate()
            .map(|(i, z)| format!("{},{:.16e},{:.16e},{}\n", i + 1, z.re, z.im, self.method))
            .collect()
    }

    /// Parses one table; every row must carry the same method.
    pub fn from_csv(csv: &str) -> Result<Self> {
        let tables = tables_from_csv(csv)?;
        match <[SeriesTable; 1]>::try_from(tables) {
            Ok([t]) => Ok(t),
            Err(v) => Err(Error::Parse(format!("expected one series, found {}", v.len()))),
        }
    }
}

/// Parses `r,re,im,method` rows into one table per method, in order of appearance.
pub fn tables_from_csv(csv: &str) -> Result<Vec<SeriesTable>> {
    let mut lines = csv.lines();
    if lines.next().map(str::trim) != Some("r,re,im,method") {
        return Err(Error::Parse("missing `r,re,im,method` header".into()));
    }
    let mut out: Vec<SeriesTable> = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let bad = || Error::Parse(format!("bad series row `{line}`"));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(bad());
        }
        let r: usize = f[0].parse().map_err(|_| bad())?;
        let z = C64::new(f[1].parse().map_err(|_| bad())?, f[2].parse().map_err(|_| bad())?);
        let method: SeriesMethod = f[3].parse()?;
        let table = match out.iter_mut().find(|t| t.method == method) {
            Some(t) => t,
            None => {
                out.push(SeriesTable {
                    method,
                    values: Vec::new(),
                });
                out.last_mut().expect("just pushed")
            }
        };
        if r != table.values.len() + 1 {
            return Err(bad());
        }
        table.values.push(z);
    }
    Ok(out)
}

fn check_rmax(rmax: usize) -> Result<()> {
    if rmax == 0 || rmax > RMAX_CAP {
        return Err(Error::CapExceeded {
            requested: rmax,
            cap: RMAX_CAP,
        });
    }
    Ok(())
}

/// `(1/|grid|) Σ_k Tr M̂(k)^r` for `r = 1..=rmax`.
fn symbol_trace_mean<W: Walk + Sync + ?Sized>(walk: &W, grid: TorusGrid, rmax: usize) -> Result<Vec<C64>> {
    let per_point: Vec<Vec<C64>> = (0..grid.len())
        .into_par_iter()
        .map(|i| symbol(walk, &grid.point(i))?.matrix.power_traces(rmax))
        .collect::<Result<_>>()?;
    let n = grid.len() as f64;
    Ok((0..rmax)
        .map(|r| per_point.iter().fold(ZERO, |acc, t| acc + t[r]) / n)
        .collect())
}

/// `C_r = (1/N^d) Σ_k Tr M̂(k)^r` on `T^d_N`.
pub fn c_r_fourier<W: Walk + Sync + ?Sized>(walk: &W, config: TorusConfig, rmax: usize) -> Result<SeriesTable> {
    check_rmax(rmax)?;
    check_dim(walk, config.d)?;
    let values = symbol_trace_mean(walk, TorusGrid::new(config.d, config.n), rmax)?;
    Ok(SeriesTable {
        method: SeriesMethod::Fourier,
        values,
    })
}

/// `C_r = (1/N^d) Tr M_A^r` from the assembled position-space operator.
pub fn c_r_direct<W: Walk + ?Sized>(walk: &W, config: TorusConfig, rmax: usize) -> Result<SeriesTable> {
    check_rmax(rmax)?;
    let op = assemble_ma(walk, config)?;
    let n = config.sites() as f64;
    let values = op.power_traces(rmax).into_iter().map(|t| t / n).collect();
    Ok(SeriesTable {
        method: SeriesMethod::Direct,
        values,
    })
}

/// `lim_N C_r` by uniform quadrature with `grid_m` points per axis. The
/// integrand is a trigonometric polynomial of degree `r` per axis, so the
/// rule is exact once `grid_m > rmax`; coarser grids alias and are refused.
pub fn c_r_limit<W: Walk + Sync + ?Sized>(walk: &W, d: usize, rmax: usize, grid_m: usize) -> Result<SeriesTable> {
    check_rmax(rmax)?;
    check_dim(walk, d)?;
    if grid_m <= rmax {
        return Err(Error::GridTooCoarse { grid_m, rmax });
    }
    let values = symbol_trace_mean(walk, TorusGrid::new(d, grid_m), rmax)?;
    Ok(SeriesTable {
        method: SeriesMethod::Quadrature,
        values,
    })
}

/// `lim_N C_r = Tr Φ_r^(∞)(0)` from the infinite-lattice path sum.
pub fn c_r_dp<W: Walk + ?Sized>(walk: &W, rmax: usize) -> Result<SeriesTable> {
    check_rmax(rmax)?;
    Ok(SeriesTable {
        method: SeriesMethod::Dp,
        values: return_traces(walk, rmax)?,
    })
}

/// `lim_N C_r` for a one-dimensional two-state coin with nonzero entries;
/// odd orders vanish.
pub fn c_r_closed_1d(a: &CMatrix, rmax: usize) -> Result<SeriesTable> {
    check_rmax(rmax)?;
    let values = (1..=rmax)
        .map(|r| {
            if r % 2 == 1 {
                Ok(ZERO)
            } else {
                c_2l_closed_1d(a, (r / 2) as u64)
            }
        })
        .collect::<Result<_>>()?;
    Ok(SeriesTable {
        method: SeriesMethod::Closed,
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencySample {
    pub u: C64,
    /// `exp(Σ_{r ≤ rmax} C_r u^r / r)`
    pub series: C64,
    /// `1/ζ̄^{-1}(u)`
    pub zeta: C64,
    pub abs_err: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub rmax: usize,
    /// `max_k ‖M̂(k)‖_∞`, a bound on every symbol's spectral radius.
    pub spectral_bound: f64,
    pub samples: Vec<ConsistencySample>,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.samples.iter().all(|s| s.abs_err <= s.tol)
    }
}

/// Largest `|u| · spectral_bound` accepted by [`series_consistency`].
pub const RADIUS_LIMIT: f64 = 0.8;

/// Compares the truncated series `exp(Σ C_r u^r / r)` with `ζ̄(u)` on `T^d_N`.
/// The tolerance per sample is the tail bound
/// `|ζ̄| · (ρ|u|)^{rmax+1} / (1 - ρ|u|) · d_c` plus a rounding floor,
/// where `ρ` is the spectral bound.
pub fn series_consistency<W: Walk + Sync + ?Sized>(
    walk: &W,
    config: TorusConfig,
    rmax: usize,
    u_samples: &[C64],
) -> Result<ConsistencyReport> {
    check_rmax(rmax)?;
    check_dim(walk, config.d)?;
    let grid = TorusGrid::new(config.d, config.n);
    let bounds: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| Ok(symbol(walk, &grid.point(i))?.matrix.norm_inf()))
        .collect::<Result<_>>()?;
    let spectral_bound = bounds.iter().fold(0.0f64, |m, b| m.max(*b));
    let states = walk.kernel()?.states() as f64;
    let table = c_r_fourier(walk, config, rmax)?;

    let mut samples = Vec::with_capacity(u_samples.len());
    for &u in u_samples {
        let x = u.norm() * spectral_bound;
        if x >= RADIUS_LIMIT {
            return Err(Error::RadiusViolation {
                value: x,
                limit: RADIUS_LIMIT,
            });
        }
        let mut log = ZERO;
        let mut power = ONE;
        for (r, c) in table.values.iter().enumerate() {
            power *= u;
            log += c * power / (r + 1) as f64;
        }
        let series = log.exp();
        let zeta = zeta_inv_finite(walk, config, u)?.zeta_inv.inv();
        let tail = states * x.powi(rmax as i32 + 1) / (1.0 - x);
        let tol = zeta.norm() * (tail * 2.0 + 1e-12);
        samples.push(ConsistencySample {
            u,
            series,
            zeta,
            abs_err: (series - zeta).norm(),
            tol,
        });
    }
    Ok(ConsistencyReport {
        rmax,
        spectral_bound,
        samples,
    })
}
