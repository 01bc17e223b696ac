//! Dense complex linear algebra: just enough for coins, symbols and
//! small-torus evolution operators.

mod matrix;
mod poly;

pub use matrix::{CMatrix, C64, CHARPOLY_MAX, ONE, PIVOT_EPS, ZERO};
pub use poly::Polynomial;

/// `e^{iθ}` with `sin` odd and `cos` even, so `cis(-θ) == cis(θ).conj()` bitwise.
pub fn cis(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}
