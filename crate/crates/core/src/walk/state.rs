use rayon::prelude::*;

use super::lattice::{Lattice, TorusConfig};
use crate::error::{Error, Result};
use crate::kernel::{Kernel, Walk};
use crate::linalg::{C64, ZERO};

/// Per-site internal state vectors on the torus, sites in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    config: TorusConfig,
    states: usize,
    amplitudes: Vec<C64>,
}

impl WalkState {
    pub fn zeros(config: TorusConfig, states: usize) -> Self {
        Self {
            config,
            states,
            amplitudes: vec![ZERO; config.sites() * states],
        }
    }

    pub fn from_amplitudes(config: TorusConfig, states: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != config.sites() * states {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {} sites x {states} states",
                amplitudes.len(),
                config.sites()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            config,
            states,
            amplitudes,
        })
    }

    /// Walker localised at the origin with internal vector `internal`.
    pub fn at_origin(config: TorusConfig, internal: &[C64]) -> Self {
        let mut s = Self::zeros(config, internal.len());
        s.amplitudes[..internal.len()].copy_from_slice(internal);
        s
    }

    pub fn config(&self) -> TorusConfig {
        self.config
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn site(&self, index: usize) -> &[C64] {
        &self.amplitudes[index * self.states..(index + 1) * self.states]
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }
}

/// Uniform internal vector with unit `p`-norm.
pub fn uniform_internal(states: usize, p: u32) -> Vec<C64> {
    let v = (states as f64).powf(-1.0 / p as f64);
    vec![C64::new(v, 0.0); states]
}

/// A kernel bound to a lattice, with precomputed neighbour tables.
#[derive(Debug, Clone)]
pub(crate) struct Propagator {
    kernel: Kernel,
    tables: Vec<Vec<Option<usize>>>,
    sites: usize,
}

impl Propagator {
    pub fn new(kernel: Kernel, lattice: &Lattice) -> Self {
        let tables = lattice.neighbour_tables(&kernel);
        Self {
            kernel,
            tables,
            sites: lattice.sites(),
        }
    }

    /// Applies the kernel to a field of `states x width` blocks, one block
    /// per site: `out(x) = Σ_j T_j in(x + offset_j)`. Each output block is
    /// computed independently in a fixed order, so the result does not
    /// depend on the thread count.
    pub fn apply(&self, input: &[C64], width: usize) -> Vec<C64> {
        self.apply_masked(input, width, |_| true)
    }

    /// As [`apply`](Self::apply), leaving sites rejected by `active` zero.
    pub fn apply_masked(&self, input: &[C64], width: usize, active: impl Fn(usize) -> bool + Sync) -> Vec<C64> {
        let dc = self.kernel.states();
        let block = dc * width;
        debug_assert_eq!(input.len(), self.sites * block);
        let mut out = vec![ZERO; input.len()];
        out.par_chunks_mut(block).enumerate().for_each(|(site, dst)| {
            if !active(site) {
                return;
            }
            for (jump, table) in self.kernel.jumps().iter().zip(&self.tables) {
                let Some(src_site) = table[site] else { continue };
                let src = &input[src_site * block..(src_site + 1) * block];
                let t = jump.matrix.as_slice();
                for a in 0..dc {
                    let row = &t[a * dc..(a + 1) * dc];
                    let out_row = &mut dst[a * width..(a + 1) * width];
                    for (b, &tab) in row.iter().enumerate() {
                        if tab == ZERO {
                            continue;
                        }
                        let src_row = &src[b * width..(b + 1) * width];
                        for (o, s) in out_row.iter_mut().zip(src_row) {
                            *o += tab * s;
                        }
                    }
                }
            }
        });
        out
    }
}

fn check_compatible(kernel: &Kernel, config: TorusConfig, states: usize) -> Result<()> {
    if kernel.dim() != config.d || kernel.states() != states {
        return Err(Error::DimensionMismatch(format!(
            "{}-state walk in {} dimensions applied to {states}-state field on a {}-dimensional torus",
            kernel.states(),
            kernel.dim(),
            config.d
        )));
    }
    Ok(())
}

/// One step: `Ψ'(x) = Σ_j [P_{2j-1} A Ψ(x + e_j) + P_{2j} A Ψ(x - e_j)]`
/// (plus the stay term for three-state coins).
pub fn step<W: Walk + ?Sized>(state: &WalkState, walk: &W) -> Result<WalkState> {
    evolve(state, walk, 1)
}

/// `n` applications of [`step`].
pub fn evolve<W: Walk + ?Sized>(state: &WalkState, walk: &W, n: usize) -> Result<WalkState> {
    Ok(trajectory(state, walk, n)?
        .pop()
        .expect("trajectory holds the initial state"))
}

/// States `Ψ_0, ..., Ψ_n`.
pub fn trajectory<W: Walk + ?Sized>(state: &WalkState, walk: &W, n: usize) -> Result<Vec<WalkState>> {
    let kernel = walk.kernel()?;
    check_compatible(&kernel, state.config, state.states)?;
    let prop = Propagator::new(kernel, &state.config.lattice());
    let mut out = Vec::with_capacity(n + 1);
    out.push(state.clone());
    for _ in 0..n {
        let prev = out.last().expect("nonempty");
        let amplitudes = prop.apply(&prev.amplitudes, 1);
        out.push(WalkState {
            config: state.config,
            states: state.states,
            amplitudes,
        });
    }
    Ok(out)
}

/// Site measure `μ(x) = Σ_j |Ψ^j(x)|^p` for `p ∈ {1, 2}`.
pub fn measure(state: &WalkState, p: u32) -> Result<Vec<f64>> {
    let f: fn(&C64) -> f64 = match p {
        1 => |z| z.norm(),
        2 => |z| z.norm_sqr(),
        _ => return Err(Error::InvalidParameter(format!("norm exponent {p} not in {{1, 2}}"))),
    };
    Ok(state
        .amplitudes
        .chunks(state.states)
        .map(|site| site.iter().map(f).sum())
        .collect())
}

pub fn total_measure(state: &WalkState, p: u32) -> Result<f64> {
    Ok(measure(state, p)?.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::{hadamard, symmetric_rw, Coin};
    use crate::linalg::{CMatrix, ONE};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn one_step_hadamard_by_hand() {
        let cfg = TorusConfig::new(1, 4).unwrap();
        let s0 = WalkState::at_origin(cfg, &[ONE, ZERO]);
        let s1 = step(&s0, &hadamard()).unwrap();
        let r = 1.0 / 2f64.sqrt();
        // A(1,0) = (r, r): the first component (P_1) is fed from x + 1, so it
        // lands at x = -1 = 3; the second (P_2) lands at x = +1.
        assert!((s1.site(3)[0] - c(r)).norm() < 1e-15);
        assert_eq!(s1.site(3)[1], ZERO);
        assert!((s1.site(1)[1] - c(r)).norm() < 1e-15);
        assert_eq!(s1.site(1)[0], ZERO);
        assert_eq!(s1.site(0), &[ZERO, ZERO]);
        assert_eq!(s1.site(2), &[ZERO, ZERO]);
    }

    #[test]
    fn identity_coin_splits_components() {
        let cfg = TorusConfig::new(1, 5).unwrap();
        let coin = Coin::custom(CMatrix::identity(2)).unwrap();
        let s0 = WalkState::at_origin(cfg, &[c(0.3), c(0.7)]);
        let s2 = evolve(&s0, &coin, 2).unwrap();
        assert_eq!(s2.site(3), &[c(0.3), ZERO]);
        assert_eq!(s2.site(2), &[ZERO, c(0.7)]);
    }

    #[test]
    fn unitary_step_preserves_norm() {
        let cfg = TorusConfig::new(1, 7).unwrap();
        let s0 = WalkState::at_origin(cfg, &uniform_internal(2, 2));
        let s1 = step(&s0, &hadamard()).unwrap();
        assert!((total_measure(&s1, 2).unwrap() - total_measure(&s0, 2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn evolve_zero_steps_is_identity() {
        let cfg = TorusConfig::new(2, 3).unwrap();
        let s0 = WalkState::at_origin(cfg, &uniform_internal(4, 2));
        assert_eq!(evolve(&s0, &crate::coins::grover_matrix(4).unwrap(), 0).unwrap(), s0);
    }

    #[test]
    fn symmetric_rw_two_steps() {
        // four equally likely two-step paths, two of which return
        let cfg = TorusConfig::new(1, 5).unwrap();
        let s0 = WalkState::at_origin(cfg, &uniform_internal(2, 1));
        let s2 = evolve(&s0, &symmetric_rw(), 2).unwrap();
        let mu = measure(&s2, 1).unwrap();
        assert!((mu[0] - 0.5).abs() < 1e-15);
        assert!((mu[2] - 0.25).abs() < 1e-15);
        assert!((mu[3] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn mismatched_walk_is_rejected() {
        let cfg = TorusConfig::new(2, 3).unwrap();
        let s0 = WalkState::at_origin(cfg, &uniform_internal(2, 2));
        assert!(matches!(step(&s0, &hadamard()), Err(Error::DimensionMismatch(_))));
        assert!(measure(&s0, 3).is_err());
    }
}
