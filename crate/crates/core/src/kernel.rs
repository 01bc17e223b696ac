//! Transition kernels: the common currency between coins, evolution and
//! Fourier symbols.
//!
//! A kernel is a list of jumps `(offset, T)` acting as
//! `Ψ'(x) = Σ T Ψ(x + offset)`. Its symbol is `Σ e^{i<offset, k>} T`.

use crate::error::{Error, Result};
use crate::linalg::{cis, CMatrix, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub offset: Vec<i64>,
    pub matrix: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    dim: usize,
    states: usize,
    jumps: Vec<Jump>,
}

impl Kernel {
    pub fn new(dim: usize, states: usize, jumps: Vec<Jump>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("kernel dimension must be at least 1".into()));
        }
        for j in &jumps {
            if j.offset.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "offset of length {} in a {dim}-dimensional kernel",
                    j.offset.len()
                )));
            }
            if j.matrix.rows() != states || j.matrix.cols() != states {
                return Err(Error::DimensionMismatch(format!(
                    "{}x{} jump matrix in a {states}-state kernel",
                    j.matrix.rows(),
                    j.matrix.cols()
                )));
            }
        }
        Ok(Self { dim, states, jumps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// Largest |offset| component; the walker's speed.
    pub fn reach(&self) -> usize {
        self.jumps
            .iter()
            .flat_map(|j| j.offset.iter().map(|o| o.unsigned_abs() as usize))
            .max()
            .unwrap_or(0)
    }

    /// Fourier symbol `Σ e^{i<offset, k>} T` at momentum `k`.
    pub fn symbol(&self, k: &[f64]) -> Result<CMatrix> {
        if k.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "{} momenta for a {}-dimensional walk",
                k.len(),
                self.dim
            )));
        }
        let mut out = CMatrix::zeros(self.states, self.states);
        for j in &self.jumps {
            let angle: f64 = j.offset.iter().zip(k).map(|(&o, &kk)| o as f64 * kk).sum();
            let phase = if j.offset.iter().all(|&o| o == 0) {
                crate::linalg::ONE
            } else {
                cis(angle)
            };
            out = &out + &j.matrix.scale(phase);
        }
        Ok(out)
    }

    /// Sum of all jump matrices (the symbol at k = 0).
    pub fn total(&self) -> CMatrix {
        self.jumps
            .iter()
            .fold(CMatrix::zeros(self.states, self.states), |acc, j| &acc + &j.matrix)
    }

    pub fn is_nonzero(&self) -> bool {
        self.jumps
            .iter()
            .any(|j| j.matrix.as_slice().iter().any(|z| *z != ZERO))
    }
}

/// Anything that drives a walk on the lattice.
pub trait Walk {
    fn kernel(&self) -> Result<Kernel>;
}

impl Walk for Kernel {
    fn kernel(&self) -> Result<Kernel> {
        Ok(self.clone())
    }
}

impl<W: Walk + ?Sized> Walk for &W {
    fn kernel(&self) -> Result<Kernel> {
        (**self).kernel()
    }
}

/// Unit vector `±e_axis` in `dim` dimensions.
pub(crate) fn unit_offset(dim: usize, axis: usize, sign: i64) -> Vec<i64> {
    let mut v = vec![0; dim];
    v[axis] = sign;
    v
}
