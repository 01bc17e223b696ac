use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use super::poly::Polynomial;
use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Pivots smaller than this make `det` return exactly zero.
pub const PIVOT_EPS: f64 = 1e-14;

/// Largest matrix accepted by [`CMatrix::charpoly`].
pub const CHARPOLY_MAX: usize = 16;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.concat())
    }

    /// Convenience for real-valued literals. Panics on ragged input.
    pub fn real(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Rank-one projection onto the `i`-th standard basis vector of C^n.
    pub fn basis_projection(n: usize, i: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, i)] = ONE;
        m
    }

    /// The 2x2 exchange matrix.
    pub fn sigma() -> Self {
        Self::real(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, m, p) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * p];
        for i in 0..n {
            let out_row = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let a = self.data[i * m + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * p..(k + 1) * p];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(CMatrix {
            rows: n,
            cols: p,
            data: out,
        })
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(ZERO, |acc, (a, b)| acc + a * b))
            .collect())
    }

    /// Kronecker product; block (i, j) is `self[i, j] * other`.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        CMatrix::from_fn(rows, cols, |r, c| {
            self[(r / other.rows, c / other.cols)] * other[(r % other.rows, c % other.cols)]
        })
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn trace(&self) -> Result<C64> {
        let n = self.require_square()?;
        Ok((0..n).fold(ZERO, |acc, i| acc + self[(i, i)]))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Elementwise max |a - b|; `f64::INFINITY` on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// `max |A*A - I|` over entries.
    pub fn unitarity_defect(&self) -> f64 {
        match self.adjoint().matmul(self) {
            Ok(p) if self.is_square() => p.max_abs_diff(&CMatrix::identity(self.rows)),
            _ => f64::INFINITY,
        }
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.data.iter().all(|z| z.im.abs() < tol)
    }

    /// Determinant by LU factorisation with partial pivoting.
    pub fn det(&self) -> Result<C64> {
        let n = self.require_square()?;
        let mut a = self.data.clone();
        let mut det = ONE;
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm();
            for r in col + 1..n {
                let v = a[r * n + col].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < PIVOT_EPS {
                return Ok(ZERO);
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            let inv = p.inv();
            for r in col + 1..n {
                let f = a[r * n + col] * inv;
                if f == ZERO {
                    continue;
                }
                for j in col + 1..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
            }
        }
        Ok(det)
    }

    /// Coefficients of `det(λI - A)` in ascending powers of λ, by Faddeev–LeVerrier.
    pub fn charpoly(&self) -> Result<Polynomial> {
        let n = self.require_square()?;
        if n > CHARPOLY_MAX {
            return Err(Error::SizeExceeded {
                size: n,
                limit: CHARPOLY_MAX,
            });
        }
        let mut coeffs = vec![ZERO; n + 1];
        coeffs[n] = ONE;
        let ident = CMatrix::identity(n);
        let mut m = CMatrix::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            m = &self.matmul(&m)? + &ident.scale(coeffs[n - k + 1]);
            let am = self.matmul(&m)?;
            coeffs[n - k] = -am.trace()? / k as f64;
        }
        Ok(Polynomial::new(coeffs))
    }

    /// `Tr(A^r)` by repeated multiplication.
    pub fn matpow_trace(&self, r: usize) -> Result<C64> {
        self.require_square()?;
        if r == 0 {
            return Ok(C64::new(self.rows as f64, 0.0));
        }
        let mut p = self.clone();
        for _ in 1..r {
            p = p.matmul(self)?;
        }
        p.trace()
    }

    /// `[Tr(A), Tr(A^2), ..., Tr(A^rmax)]`.
    pub fn power_traces(&self, rmax: usize) -> Result<Vec<C64>> {
        self.require_square()?;
        let mut out = Vec::with_capacity(rmax);
        let mut p = CMatrix::identity(self.rows);
        for _ in 0..rmax {
            p = p.matmul(self)?;
            out.push(p.trace()?);
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Panics on shape mismatch; use [`CMatrix::matmul`] for the checked form.
impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMatrix {
        CMatrix::from_fn(r, c, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn naive_matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
        CMatrix::from_fn(a.rows(), b.cols(), |i, j| {
            let mut s = ZERO;
            for k in 0..a.cols() {
                s += a[(i, k)] * b[(k, j)];
            }
            s
        })
    }

    fn cofactor_det(a: &CMatrix) -> C64 {
        let n = a.rows();
        if n == 1 {
            return a[(0, 0)];
        }
        let mut s = ZERO;
        for j in 0..n {
            let minor = CMatrix::from_fn(n - 1, n - 1, |r, c| a[(r + 1, if c < j { c } else { c + 1 })]);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            s += a[(0, j)] * cofactor_det(&minor) * sign;
        }
        s
    }

    #[test]
    fn identity_and_sigma_products() {
        let s = CMatrix::sigma();
        assert_eq!(CMatrix::identity(2).matmul(&s).unwrap(), s);
        assert_eq!(s.matmul(&s).unwrap(), CMatrix::identity(2));
    }

    #[test]
    fn matmul_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random(&mut rng, 3, 3);
        let b = random(&mut rng, 3, 3);
        assert!(a.matmul(&b).unwrap().max_abs_diff(&naive_matmul(&a, &b)) < 1e-12);
    }

    #[test]
    fn matmul_rejects_bad_shapes() {
        let a = CMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn kron_with_identity() {
        let s = CMatrix::sigma();
        let k = CMatrix::identity(3).kron(&s);
        assert_eq!((k.rows(), k.cols()), (6, 6));
        for b in 0..3 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(k[(2 * b + i, 2 * b + j)], s[(i, j)]);
                }
            }
        }
        assert_eq!(k.as_slice().iter().filter(|z| **z != ZERO).count(), 6);
        assert_eq!(CMatrix::identity(1).kron(&s), s);
    }

    #[test]
    fn kron_with_conjugate() {
        let r = 1.0 / 3f64.sqrt();
        let b = CMatrix::real(&[&[r, r], &[0.0, r]]);
        let lifted = b.kron(&b.conj());
        let expected = CMatrix::real(&[
            &[1.0, 1.0, 1.0, 1.0],
            &[0.0, 1.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 1.0],
            &[0.0, 0.0, 0.0, 1.0],
        ])
        .scale(C64::new(1.0 / 3.0, 0.0));
        assert!(lifted.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn det_simple_cases() {
        assert_eq!(CMatrix::identity(4).det().unwrap(), ONE);
        let d = CMatrix::diagonal(&[C64::new(2.0, 0.0), C64::new(0.0, 3.0)]);
        assert!((d.det().unwrap() - C64::new(0.0, 6.0)).norm() < 1e-15);
        assert!(matches!(CMatrix::zeros(2, 3).det(), Err(Error::NotSquare { .. })));
        assert_eq!(CMatrix::zeros(3, 3).det().unwrap(), ZERO);
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = random(&mut rng, 4, 4);
            let lu = a.det().unwrap();
            let cf = cofactor_det(&a);
            assert!((lu - cf).norm() / cf.norm() < 1e-10);
        }
    }

    #[test]
    fn charpoly_of_sigma_and_zero() {
        let p = CMatrix::sigma().charpoly().unwrap();
        assert_eq!(p.coeffs(), &[C64::new(-1.0, 0.0), ZERO, ONE]);
        let z = CMatrix::zeros(2, 2).charpoly().unwrap();
        assert_eq!(z.coeffs(), &[ZERO, ZERO, ONE]);
    }

    #[test]
    fn charpoly_of_grover4() {
        let g = CMatrix::from_fn(4, 4, |i, j| C64::new(if i == j { -0.5 } else { 0.5 }, 0.0));
        let p = g.charpoly().unwrap();
        // (λ-1)(λ+1)^3 = λ^4 + 2λ^3 - 2λ - 1
        let expected = [-1.0, -2.0, 0.0, 2.0, 1.0];
        for (c, e) in p.coeffs().iter().zip(expected) {
            assert!((c - C64::new(e, 0.0)).norm() < 1e-12);
        }
        for lam in [0.3, -1.7, 2.5, 0.0, 4.0] {
            let l = C64::new(lam, 0.0);
            let direct = (&CMatrix::identity(4).scale(l) - &g).det().unwrap();
            assert!((p.eval(l) - direct).norm() < 1e-10 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn charpoly_size_cap() {
        assert!(matches!(
            CMatrix::identity(17).charpoly(),
            Err(Error::SizeExceeded { size: 17, limit: 16 })
        ));
    }

    #[test]
    fn matpow_trace_cases() {
        assert_eq!(CMatrix::identity(3).matpow_trace(7).unwrap(), C64::new(3.0, 0.0));
        assert_eq!(CMatrix::sigma().matpow_trace(2).unwrap(), C64::new(2.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random(&mut rng, 4, 4);
        let mut p = a.clone();
        for _ in 0..4 {
            p = naive_matmul(&p, &a);
        }
        let naive: C64 = (0..4).map(|i| p[(i, i)]).sum();
        assert!((a.matpow_trace(5).unwrap() - naive).norm() < 1e-10);
        let all = a.power_traces(5).unwrap();
        assert!((all[4] - naive).norm() < 1e-10);
    }

    #[test]
    fn from_vec_rejects_non_finite() {
        assert_eq!(
            CMatrix::from_vec(1, 1, vec![C64::new(f64::NAN, 0.0)]).unwrap_err(),
            Error::NonFinite
        );
    }
}
