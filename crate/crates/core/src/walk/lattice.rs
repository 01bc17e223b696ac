use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;

/// Largest dimension supported by the dense position-space routines.
pub const MAX_DENSE_DIM: usize = 3;

/// The torus `(Z mod N)^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusConfig {
    pub d: usize,
    pub n: usize,
}

impl TorusConfig {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d == 0 || d > MAX_DENSE_DIM {
            return Err(Error::InvalidParameter(format!(
                "dimension {d} outside 1..={MAX_DENSE_DIM}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!("torus side {n} must be at least 2")));
        }
        let sites = n.checked_pow(d as u32).ok_or(Error::SizeExceeded {
            size: usize::MAX,
            limit: 1 << 32,
        })?;
        if sites > 1 << 32 {
            return Err(Error::SizeExceeded {
                size: sites,
                limit: 1 << 32,
            });
        }
        Ok(Self { d, n })
    }

    pub fn sites(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub(crate) fn lattice(&self) -> Lattice {
        Lattice {
            dim: self.d,
            side: self.n,
            offset: 0,
            periodic: true,
        }
    }

    /// Lexicographic coordinates of a site index, `x_1` most significant.
    pub fn coords(&self, index: usize) -> Vec<usize> {
        self.lattice().coords(index).into_iter().map(|c| c as usize).collect()
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0, |acc, &c| acc * self.n + c % self.n)
    }
}

/// A box of sites, either periodic (torus) or with hard-zero boundary
/// (a window of the infinite lattice centred on the origin).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Lattice {
    pub dim: usize,
    pub side: usize,
    /// Coordinate of box index 0 along every axis.
    pub offset: i64,
    pub periodic: bool,
}

impl Lattice {
    pub fn window(dim: usize, radius: usize) -> Self {
        Lattice {
            dim,
            side: 2 * radius + 1,
            offset: -(radius as i64),
            periodic: false,
        }
    }

    pub fn sites(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn coords(&self, mut index: usize) -> Vec<i64> {
        let mut c = vec![0; self.dim];
        for axis in (0..self.dim).rev() {
            c[axis] = (index % self.side) as i64 + self.offset;
            index /= self.side;
        }
        c
    }

    pub fn index_of(&self, coords: &[i64]) -> Option<usize> {
        let side = self.side as i64;
        let mut idx = 0usize;
        for &c in coords {
            let mut local = c - self.offset;
            if self.periodic {
                local = local.rem_euclid(side);
            } else if !(0..side).contains(&local) {
                return None;
            }
            idx = idx * self.side + local as usize;
        }
        Some(idx)
    }

    pub fn origin(&self) -> usize {
        self.index_of(&vec![0; self.dim]).expect("origin lies in every box")
    }

    /// For every jump, the source site `x + offset` of each target site `x`.
    pub fn neighbour_tables(&self, kernel: &Kernel) -> Vec<Vec<Option<usize>>> {
        kernel
            .jumps()
            .iter()
            .map(|j| {
                (0..self.sites())
                    .map(|i| {
                        let c: Vec<i64> = self.coords(i).iter().zip(&j.offset).map(|(a, b)| a + b).collect();
                        self.index_of(&c)
                    })
                    .collect()
            })
            .collect()
    }
}
