use super::lattice::TorusConfig;
use super::state::{evolve, WalkState};
use crate::coins::OqrwPair;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// Per-site 2x2 densities of an open quantum random walk on the cycle,
/// stored as row-major vectors `(ρ11, ρ12, ρ21, ρ22)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OqrwState {
    inner: WalkState,
}

impl OqrwState {
    /// Density `rho` placed at the origin.
    pub fn from_density(config: TorusConfig, rho: &CMatrix) -> Result<Self> {
        if config.d != 1 {
            return Err(Error::DimensionMismatch(format!(
                "open walks live on the cycle, not d = {}",
                config.d
            )));
        }
        if rho.rows() != 2 || rho.cols() != 2 {
            return Err(Error::DimensionMismatch("density must be 2x2".into()));
        }
        Ok(Self {
            inner: WalkState::at_origin(config, rho.as_slice()),
        })
    }

    pub fn config(&self) -> TorusConfig {
        self.inner.config()
    }

    pub fn as_walk_state(&self) -> &WalkState {
        &self.inner
    }

    pub fn density_at(&self, site: usize) -> CMatrix {
        CMatrix::from_vec(2, 2, self.inner.site(site).to_vec()).expect("finite 2x2 block")
    }

    /// `μ(x) = Re(ρ11 + ρ22)`.
    pub fn measure(&self) -> Vec<f64> {
        self.inner.amplitudes().chunks(4).map(|v| (v[0] + v[3]).re).collect()
    }

    /// Largest `|Im(ρ11 + ρ22)|` over sites; zero up to rounding for valid states.
    pub fn trace_imag_defect(&self) -> f64 {
        self.inner
            .amplitudes()
            .chunks(4)
            .fold(0.0, |m, v| m.max((v[0] + v[3]).im.abs()))
    }

    pub fn total_trace(&self) -> f64 {
        self.measure().iter().sum()
    }
}

/// `ρ_{n+1}(x) = P̃_B ρ_n(x + 1) + P̃_C ρ_n(x - 1)`.
pub fn oqrw_step(state: &OqrwState, pair: &OqrwPair) -> Result<OqrwState> {
    oqrw_evolve(state, pair, 1)
}

pub fn oqrw_evolve(state: &OqrwState, pair: &OqrwPair, n: usize) -> Result<OqrwState> {
    Ok(OqrwState {
        inner: evolve(&state.inner, pair, n)?,
    })
}

/// `diag(1, 0)`.
pub fn spin_up_density() -> CMatrix {
    CMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
}
