//! Position-space dynamics on the torus and on the infinite lattice.

mod dump;
mod lattice;
mod operator;
mod oqrw;
mod state;
mod weight;

pub use dump::{state_csv, MeasureSeries};
pub use lattice::{TorusConfig, MAX_DENSE_DIM};
pub use operator::{assemble_ma, SparseOperator, OPERATOR_CAP};
pub use oqrw::{oqrw_evolve, oqrw_step, spin_up_density, OqrwState};
pub use state::{evolve, measure, step, total_measure, trajectory, uniform_internal, WalkState};
pub use weight::{
    infinite_cap, matrix_weight_infinite, matrix_weight_torus, return_traces, return_weights, MatrixWeight,
};
