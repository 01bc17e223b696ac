use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Walk;
use crate::linalg::{C64, ZERO};
use crate::symbol::{det_one_minus_u, symbol, TorusGrid};
use crate::walk::TorusConfig;

/// Determinants smaller than this make the log-sum meaningless.
pub const DET_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    /// Exact sum over the dual of `T^d_N`.
    Finite { d: usize, n: usize },
    /// Uniform `m^d` quadrature of the `N -> ∞` integral.
    Quadrature { d: usize, m: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaEvaluation {
    pub u: C64,
    pub log_zeta_inv: C64,
    pub zeta_inv: C64,
    /// `|Im log ζ̄^{-1}|`; zero up to rounding for real coins at real `u`.
    pub imag_residual: f64,
    pub grid: GridSpec,
    /// Some grid determinant sat on the negative real axis, where the
    /// principal logarithm jumps.
    pub branch_risk: bool,
}

impl ZetaEvaluation {
    /// `ζ̄ = 1/ζ̄^{-1}`; `None` at a zero of `ζ̄^{-1}`.
    pub fn zeta(&self) -> Option<C64> {
        (self.zeta_inv != ZERO).then(|| self.zeta_inv.inv())
    }
}

struct LogSum {
    mean: C64,
    branch_risk: bool,
}

/// `(1/|grid|) Σ_k Log det(I - u M̂(k))`, with each `{k, -k}` pair summed
/// first so that conjugate imaginary parts cancel exactly.
fn log_det_mean<W: Walk + Sync + ?Sized>(walk: &W, grid: TorusGrid, u: C64) -> Result<LogSum> {
    let groups = grid.conjugate_groups();
    let partial: Vec<(C64, bool)> = groups
        .par_iter()
        .map(|grp| {
            let mut acc = ZERO;
            let mut risk = false;
            for &i in grp {
                let det = det_one_minus_u(&symbol(walk, &grid.point(i))?, u)?;
                let magnitude = det.norm();
                if magnitude < DET_FLOOR {
                    return Err(Error::DetNearZero { index: i, magnitude });
                }
                risk |= det.re < 0.0 && det.im.abs() <= 1e-12 * magnitude;
                acc += det.ln();
            }
            Ok((acc, risk))
        })
        .collect::<Result<_>>()?;
    let (sum, branch_risk) = partial.iter().fold((ZERO, false), |(s, r), (v, k)| (s + v, r || *k));
    Ok(LogSum {
        mean: sum / grid.len() as f64,
        branch_risk,
    })
}

fn evaluation(u: C64, log: LogSum, grid: GridSpec) -> ZetaEvaluation {
    ZetaEvaluation {
        u,
        log_zeta_inv: log.mean,
        zeta_inv: log.mean.exp(),
        imag_residual: log.mean.im.abs(),
        grid,
        branch_risk: log.branch_risk,
    }
}

/// `ζ̄^{-1}(u) = exp[(1/N^d) Σ_k Log det(I - u M̂(k))]` on `T^d_N`.
pub fn zeta_inv_finite<W: Walk + Sync + ?Sized>(walk: &W, config: TorusConfig, u: C64) -> Result<ZetaEvaluation> {
    check_dim(walk, config.d)?;
    let log = log_det_mean(walk, TorusGrid::new(config.d, config.n), u)?;
    Ok(evaluation(
        u,
        log,
        GridSpec::Finite {
            d: config.d,
            n: config.n,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    /// Value on the finer `2m` grid.
    pub value: ZetaEvaluation,
    pub coarse: ZetaEvaluation,
    pub abs_diff: f64,
    pub tol: f64,
}

/// `lim_{N→∞} ζ̄^{-1}(u)` by uniform quadrature, compared on `m` and `2m`
/// points per axis. Fails with `NotConverged` when the two disagree by more
/// than `tol` relative to the finer value.
pub fn zeta_inv_limit<W: Walk + Sync + ?Sized>(
    walk: &W,
    d: usize,
    u: C64,
    grid_m: usize,
    tol: f64,
) -> Result<LimitReport> {
    check_dim(walk, d)?;
    if grid_m < 2 {
        return Err(Error::InvalidParameter(format!(
            "quadrature grid {grid_m} must be at least 2"
        )));
    }
    let at = |m: usize| -> Result<ZetaEvaluation> {
        let log = log_det_mean(walk, TorusGrid::new(d, m), u)?;
        Ok(evaluation(u, log, GridSpec::Quadrature { d, m }))
    };
    let coarse = at(grid_m)?;
    let value = at(2 * grid_m)?;
    let abs_diff = (value.zeta_inv - coarse.zeta_inv).norm();
    if abs_diff > tol * value.zeta_inv.norm() {
        return Err(Error::NotConverged { diff: abs_diff, tol });
    }
    Ok(LimitReport {
        value,
        coarse,
        abs_diff,
        tol,
    })
}

pub(crate) fn check_dim<W: Walk + ?Sized>(walk: &W, d: usize) -> Result<()> {
    let kd = walk.kernel()?.dim();
    if kd != d {
        return Err(Error::DimensionMismatch(format!(
            "{kd}-dimensional walk evaluated in {d} dimensions"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::{flip_flop, hadamard, symmetric_rw};
    use crate::linalg::ONE;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn zero_u_gives_one() {
        let e = zeta_inv_finite(&hadamard(), TorusConfig::new(1, 4).unwrap(), ZERO).unwrap();
        assert_eq!(e.zeta_inv, ONE);
    }

    #[test]
    fn symmetric_rw_two_site_value() {
        let e = zeta_inv_finite(&symmetric_rw(), TorusConfig::new(1, 2).unwrap(), re(0.5)).unwrap();
        assert!((e.zeta_inv - re(3f64.sqrt() / 2.0)).norm() < 1e-15);
        assert!(e.imag_residual < 1e-15);
    }

    #[test]
    fn symmetric_rw_matches_cosine_sum() {
        let n = 7;
        let u = 0.6;
        let e = zeta_inv_finite(&symmetric_rw(), TorusConfig::new(1, n).unwrap(), re(u)).unwrap();
        let direct: f64 = (0..n)
            .map(|k| (1.0 - (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos() * u).ln())
            .sum::<f64>();
        assert!((e.zeta_inv - re((direct / n as f64).exp())).norm() < 1e-14);
    }

    #[test]
    fn limit_equals_finite_at_same_grid() {
        let c = flip_flop(&hadamard(), 1).unwrap();
        let r = zeta_inv_limit(&c, 1, re(0.3), 512, 1e-10).unwrap();
        let f = zeta_inv_finite(&c, TorusConfig::new(1, 512).unwrap(), re(0.3)).unwrap();
        assert_eq!(r.coarse.zeta_inv, f.zeta_inv);
        assert!(r.abs_diff < 1e-10);
    }

    #[test]
    fn symmetric_rw_limit_closed_form() {
        let a: f64 = 0.9;
        let r = zeta_inv_limit(&symmetric_rw(), 1, re(a), 256, 1e-12).unwrap();
        let want = (1.0 + (1.0 - a * a).sqrt()) / 2.0;
        assert!((r.value.zeta_inv - re(want)).norm() < 1e-12);
    }

    #[test]
    fn singular_point_is_reported() {
        // det(I - M̂(0)) vanishes for any stochastic coin
        let err = zeta_inv_finite(&symmetric_rw(), TorusConfig::new(1, 4).unwrap(), ONE).unwrap_err();
        assert!(matches!(err, Error::DetNearZero { index: 0, .. }));
    }

    #[test]
    fn wrong_dimension() {
        assert!(zeta_inv_finite(&hadamard(), TorusConfig::new(2, 4).unwrap(), ZERO).is_err());
    }
}
