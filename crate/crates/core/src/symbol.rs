//! Momentum-space symbols `M̂(k)` and the factorisation of `det(I - u M_A)`
//! over the dual torus.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Walk;
use crate::linalg::{CMatrix, Polynomial, C64, ONE};
use crate::walk::{assemble_ma, TorusConfig};

/// Largest `d_c N^d` for which the dense position-space determinant is taken.
pub const DENSE_DET_CAP: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolPoint {
    pub k: Vec<f64>,
    pub matrix: CMatrix,
}

/// `M̂(k) = Σ e^{i<offset, k>} T` over the walk's jumps.
pub fn symbol<W: Walk + ?Sized>(walk: &W, k: &[f64]) -> Result<SymbolPoint> {
    let matrix = walk.kernel()?.symbol(k)?;
    Ok(SymbolPoint { k: k.to_vec(), matrix })
}

/// `det(I - u M̂(k))` by LU.
pub fn det_one_minus_u(point: &SymbolPoint, u: C64) -> Result<C64> {
    let n = point.matrix.rows();
    (&CMatrix::identity(n) - &point.matrix.scale(u)).det()
}

/// Coefficients of `det(I - u M̂(k))` in `u`: the reversed characteristic polynomial.
pub fn det_polynomial(point: &SymbolPoint) -> Result<Polynomial> {
    let cp = point.matrix.charpoly()?;
    let n = point.matrix.rows();
    // reverse over the full length n + 1 so trailing zero roots become high-order zeros
    Ok(Polynomial::new((0..=n).map(|i| cp.coeff(n - i)).collect()))
}

/// The dual torus `{2πm/N}^d`, angles taken in `(-π, π]` so that `k` and
/// `-k` are exact negatives of each other. Points are in lexicographic order of `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    pub d: usize,
    pub n: usize,
}

impl TorusGrid {
    pub fn new(d: usize, n: usize) -> Self {
        Self { d, n }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn angle(&self, m: usize) -> f64 {
        let m = m as i64;
        let n = self.n as i64;
        let shifted = if 2 * m <= n { m } else { m - n };
        2.0 * PI * shifted as f64 / n as f64
    }

    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let mut k = vec![0.0; self.d];
        for axis in (0..self.d).rev() {
            k[axis] = self.angle(index % self.n);
            index /= self.n;
        }
        k
    }

    /// Index of `-k`.
    pub fn conjugate(&self, mut index: usize) -> usize {
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.d {
            let m = index % self.n;
            out += ((self.n - m) % self.n) * scale;
            scale *= self.n;
            index /= self.n;
        }
        out
    }

    /// Grid indices grouped into `{k, -k}` pairs (singletons when `k = -k`),
    /// ordered by first member.
    pub fn conjugate_groups(&self) -> Vec<Vec<usize>> {
        (0..self.len())
            .filter_map(|i| {
                let j = self.conjugate(i);
                match i.cmp(&j) {
                    std::cmp::Ordering::Less => Some(vec![i, j]),
                    std::cmp::Ordering::Equal => Some(vec![i]),
                    std::cmp::Ordering::Greater => None,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationSample {
    pub u: C64,
    pub lhs: C64,
    pub rhs: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub max_rel_err: f64,
    pub samples: Vec<FactorizationSample>,
}

impl FactorizationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Checks `det(I - u M_A) = Π_k det(I - u M̂(k))` at each sample `u`,
/// with the left side from the assembled position-space operator.
pub fn verify_factorization<W: Walk + Sync + ?Sized>(
    walk: &W,
    config: TorusConfig,
    u_samples: &[C64],
) -> Result<FactorizationReport> {
    let op = assemble_ma(walk, config)?;
    if op.dim() > DENSE_DET_CAP {
        return Err(Error::SizeExceeded {
            size: op.dim(),
            limit: DENSE_DET_CAP,
        });
    }
    let dense = op.to_dense();
    let identity = CMatrix::identity(op.dim());
    let grid = TorusGrid::new(config.d, config.n);
    let points: Vec<SymbolPoint> = (0..grid.len())
        .into_par_iter()
        .map(|i| symbol(walk, &grid.point(i)))
        .collect::<Result<_>>()?;

    let mut samples = Vec::with_capacity(u_samples.len());
    let mut max_rel_err = 0.0f64;
    for &u in u_samples {
        let lhs = (&identity - &dense.scale(u)).det()?;
        let factors: Vec<C64> = points
            .par_iter()
            .map(|p| det_one_minus_u(p, u))
            .collect::<Result<_>>()?;
        let rhs = factors.iter().fold(ONE, |acc, f| acc * f);
        let scale = lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
        max_rel_err = max_rel_err.max((lhs - rhs).norm() / scale);
        samples.push(FactorizationSample { u, lhs, rhs });
    }
    Ok(FactorizationReport { max_rel_err, samples })
}
