use rayon::prelude::*;

use super::lattice::TorusConfig;
use crate::error::{Error, Result};
use crate::kernel::Walk;
use crate::linalg::{CMatrix, C64, ZERO};

/// Largest dimension `d_c N^d` for which the evolution operator is assembled.
pub const OPERATOR_CAP: usize = 20_000;

/// The evolution operator `M_A` on the torus in compressed-row form.
/// Row and column `x·d_c + a` address internal state `a` at site `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C64>,
}

impl SparseOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries of row `i` as `(column, value)`, columns ascending.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_start[i]..self.row_start[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a {}-dim operator",
                v.len(),
                self.dim
            )));
        }
        Ok((0..self.dim)
            .into_par_iter()
            .map(|i| self.row(i).fold(ZERO, |acc, (j, m)| acc + m * v[j]))
            .collect())
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, m) in self.row(i) {
                out[(i, j)] = m;
            }
        }
        out
    }

    /// `Tr M^r` for `r = 1..=rmax`, column by column: `(M^r)_{ii}` is read
    /// off while repeatedly applying the operator to the basis vector `e_i`.
    pub fn power_traces(&self, rmax: usize) -> Vec<C64> {
        let diag: Vec<Vec<C64>> = (0..self.dim)
            .into_par_iter()
            .map(|i| {
                let mut v = vec![ZERO; self.dim];
                v[i] = C64::new(1.0, 0.0);
                (0..rmax)
                    .map(|_| {
                        v = (0..self.dim)
                            .map(|row| self.row(row).fold(ZERO, |acc, (j, m)| acc + m * v[j]))
                            .collect();
                        v[i]
                    })
                    .collect()
            })
            .collect();
        (0..rmax).map(|r| diag.iter().fold(ZERO, |acc, d| acc + d[r])).collect()
    }
}

/// Assembles `M_A` so that `apply` on a flattened state equals one `step`.
pub fn assemble_ma<W: Walk + ?Sized>(walk: &W, config: TorusConfig) -> Result<SparseOperator> {
    let kernel = walk.kernel()?;
    if kernel.dim() != config.d {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional walk on a {}-dimensional torus",
            kernel.dim(),
            config.d
        )));
    }
    let dc = kernel.states();
    let dim = dc * config.sites();
    if dim > OPERATOR_CAP {
        return Err(Error::SizeExceeded {
            size: dim,
            limit: OPERATOR_CAP,
        });
    }
    let lattice = config.lattice();
    let tables = lattice.neighbour_tables(&kernel);
    let mut row_start = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut values = Vec::new();
    row_start.push(0);
    for x in 0..config.sites() {
        for a in 0..dc {
            // small N can map several jumps onto one source site
            let mut entries: Vec<(usize, C64)> = Vec::new();
            for (jump, table) in kernel.jumps().iter().zip(&tables) {
                let src = table[x].expect("torus is periodic");
                for b in 0..dc {
                    let m = jump.matrix[(a, b)];
                    if m != ZERO {
                        entries.push((src * dc + b, m));
                    }
                }
            }
            entries.sort_by_key(|e| e.0);
            for (j, m) in entries {
                match cols.last() {
                    Some(&last) if last == j && values.len() > row_start[row_start.len() - 1] => {
                        *values.last_mut().expect("nonempty") += m;
                    }
                    _ => {
                        cols.push(j);
                        values.push(m);
                    }
                }
            }
            row_start.push(values.len());
        }
    }
    Ok(SparseOperator {
        dim,
        row_start,
        cols,
        values,
    })
}
