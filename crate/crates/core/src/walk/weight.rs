use super::lattice::{Lattice, TorusConfig};
use super::state::{Propagator, WalkState};
use crate::error::{Error, Result};
use crate::kernel::{Kernel, Walk};
use crate::linalg::{CMatrix, C64, ONE, ZERO};

/// Largest `r` accepted by the infinite-lattice DP, per dimension.
pub fn infinite_cap(d: usize) -> Option<usize> {
    match d {
        1 => Some(40),
        2 => Some(32),
        3 => Some(24),
        _ => None,
    }
}

/// The path-sum weight `Φ_n(x)` at every torus site.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixWeight {
    config: TorusConfig,
    steps: usize,
    weights: Vec<CMatrix>,
}

impl MatrixWeight {
    pub fn config(&self) -> TorusConfig {
        self.config
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn at(&self, site: usize) -> &CMatrix {
        &self.weights[site]
    }

    pub fn origin(&self) -> &CMatrix {
        &self.weights[0]
    }

    pub fn weights(&self) -> &[CMatrix] {
        &self.weights
    }

    /// `Ψ_n(x) = Φ_n(x) Ψ_0` for a walker started at the origin with internal vector `psi0`.
    pub fn apply(&self, psi0: &[C64]) -> Result<WalkState> {
        let mut amps = Vec::with_capacity(self.weights.len() * psi0.len());
        for w in &self.weights {
            amps.extend(w.mul_vec(psi0)?);
        }
        WalkState::from_amplitudes(self.config, psi0.len(), amps)
    }
}

/// `Φ_n` on the torus by the recursion `Φ_{m+1}(x) = Σ T Φ_m(x + offset)`,
/// one matrix product per jump and site.
pub fn matrix_weight_torus<W: Walk + ?Sized>(walk: &W, config: TorusConfig, n: usize) -> Result<MatrixWeight> {
    let kernel = walk.kernel()?;
    if kernel.dim() != config.d {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional walk on a {}-dimensional torus",
            kernel.dim(),
            config.d
        )));
    }
    let dc = kernel.states();
    let lattice = config.lattice();
    let sites = config.sites();
    let sources: Vec<Vec<usize>> = kernel
        .jumps()
        .iter()
        .map(|j| {
            (0..sites)
                .map(|x| {
                    let c: Vec<i64> = lattice.coords(x).iter().zip(&j.offset).map(|(a, b)| a + b).collect();
                    lattice.index_of(&c).expect("torus is periodic")
                })
                .collect()
        })
        .collect();
    let mut weights = vec![CMatrix::zeros(dc, dc); sites];
    weights[0] = CMatrix::identity(dc);
    for _ in 0..n {
        let mut next = Vec::with_capacity(sites);
        for x in 0..sites {
            let mut acc = CMatrix::zeros(dc, dc);
            for (jump, src) in kernel.jumps().iter().zip(&sources) {
                acc = &acc + &jump.matrix.matmul(&weights[src[x]])?;
            }
            next.push(acc);
        }
        weights = next;
    }
    Ok(MatrixWeight {
        config,
        steps: n,
        weights,
    })
}

/// `Φ_r^(∞)(0)`, the return weight on the infinite lattice.
pub fn matrix_weight_infinite<W: Walk + ?Sized>(walk: &W, r: usize) -> Result<CMatrix> {
    Ok(return_weights(walk, r)?.pop().expect("r + 1 weights"))
}

/// `Φ_0^(∞)(0), ..., Φ_rmax^(∞)(0)`.
///
/// Runs the DP on a box of radius `reach·⌊rmax/2⌋` with a hard-zero
/// boundary. At step `s` only sites within L1 distance `reach·min(s, rmax - s)`
/// are kept: anything further out either cannot have been reached yet or
/// cannot return to the origin by step `rmax`, so the result is exact.
pub fn return_weights<W: Walk + ?Sized>(walk: &W, rmax: usize) -> Result<Vec<CMatrix>> {
    let kernel = walk.kernel()?;
    let d = kernel.dim();
    let cap = infinite_cap(d).ok_or_else(|| Error::InvalidParameter(format!("dimension {d} outside 1..=3")))?;
    if rmax > cap {
        return Err(Error::CapExceeded { requested: rmax, cap });
    }
    let reach = l1_reach(&kernel);
    let lattice = Lattice::window(d, reach * (rmax / 2));
    let dc = kernel.states();
    let origin = lattice.origin();
    let norms: Vec<usize> = (0..lattice.sites())
        .map(|x| lattice.coords(x).iter().map(|c| c.unsigned_abs() as usize).sum())
        .collect();
    let prop = Propagator::new(kernel, &lattice);

    let block = dc * dc;
    let mut field = vec![ZERO; lattice.sites() * block];
    for a in 0..dc {
        field[origin * block + a * dc + a] = ONE;
    }
    let read_origin = |f: &[C64]| {
        CMatrix::from_vec(dc, dc, f[origin * block..(origin + 1) * block].to_vec()).map_err(|_| Error::NonFinite)
    };
    let mut out = vec![read_origin(&field)?];
    for s in 1..=rmax {
        let limit = reach * s.min(rmax - s);
        field = prop.apply_masked(&field, dc, |x| norms[x] <= limit);
        out.push(read_origin(&field)?);
    }
    Ok(out)
}

/// `Tr Φ_r^(∞)(0)` for `r = 1..=rmax`.
pub fn return_traces<W: Walk + ?Sized>(walk: &W, rmax: usize) -> Result<Vec<C64>> {
    return_weights(walk, rmax)?.iter().skip(1).map(CMatrix::trace).collect()
}

fn l1_reach(kernel: &Kernel) -> usize {
    kernel
        .jumps()
        .iter()
        .map(|j| j.offset.iter().map(|o| o.unsigned_abs() as usize).sum())
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::{grover_matrix, hadamard, qw_coin, three_state_grover};
    use crate::walk::state::{evolve, uniform_internal};

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        a.max_abs_diff(b) < tol
    }

    #[test]
    fn phi0_is_identity_at_origin() {
        let cfg = TorusConfig::new(2, 3).unwrap();
        let w = matrix_weight_torus(&grover_matrix(4).unwrap(), cfg, 0).unwrap();
        assert_eq!(w.origin(), &CMatrix::identity(4));
        assert!(w.weights()[1..].iter().all(|m| m.max_abs() == 0.0));
    }

    #[test]
    fn hadamard_phi2_by_paths() {
        // P_1 A P_2 A + P_2 A P_1 A
        let a = hadamard().matrix().clone();
        let p1 = CMatrix::basis_projection(2, 0);
        let p2 = CMatrix::basis_projection(2, 1);
        let pa = |p: &CMatrix| p.matmul(&a).unwrap();
        let want = &pa(&p1).matmul(&pa(&p2)).unwrap() + &pa(&p2).matmul(&pa(&p1)).unwrap();
        let expect = CMatrix::real(&[&[0.5, -0.5], &[0.5, 0.5]]);
        assert!(close(&want, &expect, 1e-15));

        let cfg = TorusConfig::new(1, 8).unwrap();
        let torus = matrix_weight_torus(&hadamard(), cfg, 2).unwrap();
        assert!(close(torus.origin(), &expect, 1e-15));
        let inf = matrix_weight_infinite(&hadamard(), 2).unwrap();
        assert!(close(&inf, &expect, 1e-15));
        assert!((inf.trace().unwrap() - ONE).norm() < 1e-15);
    }

    #[test]
    fn grover_2d_two_step_return_by_paths() {
        // Φ_2(0,0) = Σ_j (P_{2j-1}A P_{2j}A + P_{2j}A P_{2j-1}A): the walker
        // must step out and back along one axis.
        let a = grover_matrix(4).unwrap().matrix().clone();
        let pa = |i| CMatrix::basis_projection(4, i).matmul(&a).unwrap();
        let mut want = CMatrix::zeros(4, 4);
        for j in 0..2 {
            want = &want + &pa(2 * j).matmul(&pa(2 * j + 1)).unwrap();
            want = &want + &pa(2 * j + 1).matmul(&pa(2 * j)).unwrap();
        }
        let cfg = TorusConfig::new(2, 5).unwrap();
        let torus = matrix_weight_torus(&grover_matrix(4).unwrap(), cfg, 2).unwrap();
        assert!(close(torus.origin(), &want, 1e-15));
    }

    #[test]
    fn odd_returns_vanish_in_1d() {
        let w = return_weights(&qw_coin(0.4), 9).unwrap();
        for r in (1..=9).step_by(2) {
            assert_eq!(w[r].max_abs(), 0.0);
        }
    }

    #[test]
    fn torus_matches_infinite_below_n() {
        let cfg = TorusConfig::new(1, 9).unwrap();
        let inf = return_weights(&hadamard(), 8).unwrap();
        for (r, want) in inf.iter().enumerate() {
            let torus = matrix_weight_torus(&hadamard(), cfg, r).unwrap();
            assert!(close(torus.origin(), want, 1e-12), "r = {r}");
        }
        let cfg2 = TorusConfig::new(2, 7).unwrap();
        let g = grover_matrix(4).unwrap();
        let inf2 = return_weights(&g, 6).unwrap();
        let torus2 = matrix_weight_torus(&g, cfg2, 6).unwrap();
        assert!(close(torus2.origin(), &inf2[6], 1e-12));
    }

    #[test]
    fn pruned_dp_matches_unpruned_single_r() {
        // all r up to 10 from one pass agree with separate passes
        let c = three_state_grover();
        let all = return_weights(&c, 10).unwrap();
        for (r, w) in all.iter().enumerate().skip(1) {
            assert!(close(&matrix_weight_infinite(&c, r).unwrap(), w, 1e-13));
        }
    }

    #[test]
    fn weight_reproduces_evolution() {
        let cfg = TorusConfig::new(1, 8).unwrap();
        let psi0 = uniform_internal(2, 2);
        let w = matrix_weight_torus(&hadamard(), cfg, 3).unwrap();
        let via_weight = w.apply(&psi0).unwrap();
        let via_step = evolve(&WalkState::at_origin(cfg, &psi0), &hadamard(), 3).unwrap();
        let diff = via_weight
            .amplitudes()
            .iter()
            .zip(via_step.amplitudes())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(diff < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            return_weights(&hadamard(), 41),
            Err(Error::CapExceeded { requested: 41, cap: 40 })
        ));
    }
}
