use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};

/// Largest `n` accepted by [`binomial`].
pub const BINOMIAL_MAX: u64 = 30;

/// Tolerance between the finite-sum and hypergeometric forms, relative to
/// the size of the individual terms.
pub const FORM_TOL: f64 = 1e-12;

/// `C(n, k)` in 64-bit integers, refusing `n > 30`.
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if n > BINOMIAL_MAX {
        return Err(Error::Overflow(n as usize));
    }
    Ok(binomial_exact(n, k).expect("C(30, k) fits in u128") as u64)
}

/// `C(n, k)` in 128-bit integers; `None` on overflow.
pub fn binomial_exact(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc · (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `₂F₁(1-l, 1-l; 2; z)`, a polynomial of degree `l - 1` in `z`.
pub fn hyp2f1_terminating(l: u64, z: C64) -> C64 {
    if l == 0 {
        return ONE;
    }
    let a = 1.0 - l as f64;
    let mut term = ONE;
    let mut sum = ONE;
    for k in 0..(l - 1) {
        let kf = k as f64;
        term *= z * ((a + kf) * (a + kf) / ((2.0 + kf) * (kf + 1.0)));
        sum += term;
    }
    sum
}

/// `n · ₂F₁(1-n, 1-n; 2; 1)` and `n · (2n-1)!/(n!)²` as exact integers,
/// via `Σ_k C(n-1,k-1)²/k = (1/n) Σ_k C(n-1,k-1) C(n,k)`.
pub fn hyp2f1_at_one_exact(n: u64) -> Option<(u128, u128)> {
    let mut series: u128 = 0;
    for k in 1..=n {
        series = series.checked_add(binomial_exact(n - 1, k - 1)?.checked_mul(binomial_exact(n, k)?)?)?;
    }
    // n (2n-1)!/(n!)^2 = C(2n, n)/2
    let gamma = binomial_exact(2 * n, n)? / 2;
    Some((series, gamma))
}

/// Both sides of `2n Σ_k (1/k) C(n-1,k-1)² = C(2n, n)` in exact integers.
pub fn central_binomial_identity(n: u64) -> Option<(u128, u128)> {
    let mut lhs: u128 = 0;
    for k in 1..=n {
        // 2n · C(n-1,k-1)²/k = 2 · C(n-1,k-1) · C(n,k)
        lhs = lhs.checked_add(2 * binomial_exact(n - 1, k - 1)?.checked_mul(binomial_exact(n, k)?)?)?;
    }
    Some((lhs, binomial_exact(2 * n, n)?))
}

fn entries(a: &CMatrix) -> Result<[C64; 4]> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "closed form needs a 2x2 coin, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let e = [a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]];
    if e.contains(&ZERO) {
        return Err(Error::ZeroEntry);
    }
    Ok(e)
}

/// `lim_N C_{2l}` for a two-state coin with all entries nonzero:
/// `2l (a11 a22)^l Σ_{m=1}^l (1/m) C(l-1, m-1)² z^m`, `z = a12 a21/(a11 a22)`.
/// The hypergeometric form `2l (a11 a22)^{l-1} a12 a21 ₂F₁(1-l, 1-l; 2; z)`
/// is evaluated alongside and must agree.
pub fn c_2l_closed_1d(a: &CMatrix, l: u64) -> Result<C64> {
    let [a11, a12, a21, a22] = entries(a)?;
    if l == 0 {
        return Err(Error::InvalidParameter("l must be at least 1".into()));
    }
    let diag = a11 * a22;
    let z = a12 * a21 / diag;
    let lf = l as f64;
    let mut sum = ZERO;
    let mut scale = 0.0;
    for m in 1..=l {
        let b = binomial(l - 1, m - 1)? as f64;
        let t = z.powu(m as u32) * (b * b / m as f64);
        sum += t;
        scale += t.norm();
    }
    let prefactor = diag.powu(l as u32) * (2.0 * lf);
    let finite = prefactor * sum;
    let hyper = diag.powu(l as u32 - 1) * a12 * a21 * hyp2f1_terminating(l, z) * (2.0 * lf);
    let tol = FORM_TOL * (prefactor.norm() * scale).max(f64::MIN_POSITIVE);
    if (finite - hyper).norm() > tol {
        return Err(Error::FormMismatch((finite - hyper).norm()));
    }
    Ok(finite)
}

/// `Φ_{2l}^(∞)(0)` from the matrix form
/// `(a11 a22)^l Σ_m z^m C(l-1,m-1)² [((l-m)/(a11 m)) Q_1 + ((l-m)/(a22 m)) Q_2 + Q_3/a12 + Q_4/a21]`
/// with `Q_1 = P_1 A`, `Q_2 = P_2 A`, `Q_3 = σ P_1 A`, `Q_4 = σ P_2 A`.
pub fn phi_2l_closed_1d(a: &CMatrix, l: u64) -> Result<CMatrix> {
    let [a11, a12, a21, a22] = entries(a)?;
    if l == 0 {
        return Ok(CMatrix::identity(2));
    }
    let z = a12 * a21 / (a11 * a22);
    let mut out = CMatrix::zeros(2, 2);
    for m in 1..=l {
        let b = binomial(l - 1, m - 1)? as f64;
        let bracket = bracket(a, l, m)?;
        out = &out + &bracket.scale(z.powu(m as u32) * (b * b));
    }
    Ok(out.scale((a11 * a22).powu(l as u32)))
}

/// The bracketed combination whose trace is `2l/m`.
pub fn bracket(a: &CMatrix, l: u64, m: u64) -> Result<CMatrix> {
    let [a11, a12, a21, a22] = entries(a)?;
    let p1 = CMatrix::basis_projection(2, 0);
    let p2 = CMatrix::basis_projection(2, 1);
    let sigma = CMatrix::sigma();
    let q1 = p1.matmul(a)?;
    let q2 = p2.matmul(a)?;
    let q3 = sigma.matmul(&q1)?;
    let q4 = sigma.matmul(&q2)?;
    let r = (l as f64 - m as f64) / m as f64;
    Ok(&(&(&q1.scale(r / a11) + &q2.scale(r / a22)) + &q3.scale(a12.inv())) + &q4.scale(a21.inv()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::{crw_coin, flip_flop, hadamard, qw_coin, symmetric_rw};
    use crate::walk::return_weights;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(5, 2).unwrap(), 10);
        assert_eq!(binomial(30, 15).unwrap(), 155_117_520);
        assert_eq!(binomial(4, 7).unwrap(), 0);
        assert_eq!(binomial(31, 1).unwrap_err(), Error::Overflow(31));
        assert_eq!(binomial_exact(40, 20), Some(137_846_528_820));
    }

    #[test]
    fn hypergeometric_low_orders() {
        let z = C64::new(0.3, -1.7);
        assert_eq!(hyp2f1_terminating(1, z), ONE);
        assert!((hyp2f1_terminating(2, z) - (ONE + z / 2.0)).norm() < 1e-15);
        // l = 3: term ratios 4z/2 and z/6
        let direct = ONE + z * (4.0 / 2.0) + z * z * (4.0 * 1.0 / 12.0);
        assert!((hyp2f1_terminating(3, z) - direct).norm() < 1e-14);
    }

    #[test]
    fn hypergeometric_at_one_is_gamma_ratio() {
        for n in 1..=12u64 {
            let (num, gamma) = hyp2f1_at_one_exact(n).unwrap();
            assert_eq!(num, gamma, "n = {n}");
            let f = hyp2f1_terminating(n, ONE).re;
            let want = gamma as f64 / n as f64;
            assert!((f - want).abs() <= 1e-14 * want);
        }
    }

    #[test]
    fn central_binomial() {
        for n in 1..=20 {
            let (l, r) = central_binomial_identity(n).unwrap();
            assert_eq!(l, r);
        }
    }

    #[test]
    fn hadamard_values() {
        let a = hadamard().matrix().clone();
        assert!((c_2l_closed_1d(&a, 1).unwrap() - ONE).norm() < 1e-15);
        assert!((c_2l_closed_1d(&a, 2).unwrap() - re(-0.5)).norm() < 1e-15);
    }

    #[test]
    fn crw_and_qw_flipflop_values() {
        let v = c_2l_closed_1d(crw_coin(std::f64::consts::FRAC_PI_4).matrix(), 1).unwrap();
        assert!((v - re(0.5)).norm() < 1e-15);
        let xi: f64 = 0.7;
        let f = flip_flop(&qw_coin(xi), 1).unwrap();
        let v = c_2l_closed_1d(f.matrix(), 1).unwrap();
        assert!((v - re(-2.0 * xi.cos().powi(2))).norm() < 1e-15);
    }

    #[test]
    fn symmetric_rw_is_central_binomial() {
        for l in 1..=10u64 {
            let v = c_2l_closed_1d(symmetric_rw().matrix(), l).unwrap();
            let want = binomial(2 * l, l).unwrap() as f64 / 4f64.powi(l as i32);
            assert!((v - re(want)).norm() < 1e-14);
        }
    }

    #[test]
    fn matrix_form_matches_dp() {
        let a = qw_coin(0.9).matrix().clone();
        let dp = return_weights(&qw_coin(0.9), 12).unwrap();
        for l in 1..=6 {
            let m = phi_2l_closed_1d(&a, l).unwrap();
            assert!(m.max_abs_diff(&dp[2 * l as usize]) < 1e-13, "l = {l}");
        }
    }

    #[test]
    fn bracket_trace() {
        let a = CMatrix::real(&[&[0.2, -1.3], &[0.7, 2.1]]);
        for l in 1..=6 {
            for m in 1..=l {
                let t = bracket(&a, l, m).unwrap().trace().unwrap();
                assert!((t - re(2.0 * l as f64 / m as f64)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_entry_refused() {
        assert_eq!(c_2l_closed_1d(&CMatrix::identity(2), 1).unwrap_err(), Error::ZeroEntry);
        assert!(c_2l_closed_1d(&CMatrix::identity(3), 1).is_err());
    }
}
