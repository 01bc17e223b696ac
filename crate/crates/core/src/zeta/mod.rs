//! The walk-type zeta function, its series coefficients and the catalog of
//! closed-form determinant factorisations.

mod catalog;
mod closed;
mod evaluate;
mod series;

pub use catalog::{
    catalog, catalog_entry, catalog_f, catalog_verify, e_cos, elementary_symmetric, prefactor_remainder, CatalogEntry,
    CatalogReport, CatalogWalk, VariantResidual, CATALOG_TOL,
};
pub use closed::{
    binomial, binomial_exact, bracket, c_2l_closed_1d, central_binomial_identity, hyp2f1_at_one_exact,
    hyp2f1_terminating, phi_2l_closed_1d, BINOMIAL_MAX, FORM_TOL,
};
pub use evaluate::{zeta_inv_finite, zeta_inv_limit, GridSpec, LimitReport, ZetaEvaluation, DET_FLOOR};
pub use series::{
    c_r_closed_1d, c_r_direct, c_r_dp, c_r_fourier, c_r_limit, series_consistency, tables_from_csv, ConsistencyReport,
    ConsistencySample, SeriesMethod, SeriesTable, RADIUS_LIMIT, RMAX_CAP,
};
