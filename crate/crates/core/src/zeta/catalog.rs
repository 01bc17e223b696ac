use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coins::{
    crw_coin, flip_flop, fourier_matrix, grover_matrix, oqrw_crw_pair, oqrw_example_pair, oqrw_lift, oqrw_reduce,
    positive_support_grover, qw_coin, rw_coin, symmetric_rw, three_state_grover, Coin, OqrwPair, ShiftKind,
};
use crate::error::{Error, Result};
use crate::kernel::{Kernel, Walk};
use crate::linalg::{cis, Polynomial, C64, ONE};
use crate::symbol::{det_one_minus_u, det_polynomial, symbol};

/// Tolerance for a catalog formula to count as matching the determinant.
pub const CATALOG_TOL: f64 = 1e-9;

type Formula = Arc<dyn Fn(&[f64], C64) -> C64 + Send + Sync>;

/// The walk an entry describes.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogWalk {
    Coin(Coin),
    Oqrw(OqrwPair),
}

impl Walk for CatalogWalk {
    fn kernel(&self) -> Result<Kernel> {
        match self {
            CatalogWalk::Coin(c) => c.kernel(),
            CatalogWalk::Oqrw(p) => p.kernel(),
        }
    }
}

/// One closed-form factorisation `det(I - u M̂(w)) = prefactor(u) · F(w, u)`.
#[derive(Clone)]
pub struct CatalogEntry {
    pub id: String,
    pub d: usize,
    pub shift: ShiftKind,
    /// Localisation factor; `1` when there is none.
    pub prefactor: Polynomial,
    pub walk: CatalogWalk,
    f: Formula,
    /// Alternative readings of `F`, reported but not required to match.
    variants: Vec<(String, Formula)>,
}

impl fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("id", &self.id)
            .field("d", &self.d)
            .field("shift", &self.shift)
            .field("prefactor", &self.prefactor)
            .field("variants", &self.variants.iter().map(|v| &v.0).collect::<Vec<_>>())
            .finish()
    }
}

impl CatalogEntry {
    fn new(
        id: &str,
        d: usize,
        shift: ShiftKind,
        prefactor: Polynomial,
        walk: CatalogWalk,
        f: impl Fn(&[f64], C64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            id: id.into(),
            d,
            shift,
            prefactor,
            walk,
            f: Arc::new(f),
            variants: Vec::new(),
        }
    }

    fn variant(mut self, name: &str, f: impl Fn(&[f64], C64) -> C64 + Send + Sync + 'static) -> Self {
        self.variants.push((name.into(), Arc::new(f)));
        self
    }

    pub fn variant_names(&self) -> Vec<&str> {
        self.variants.iter().map(|v| v.0.as_str()).collect()
    }

    fn check(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "{} angles for the {}-dimensional entry {}",
                w.len(),
                self.d,
                self.id
            )));
        }
        Ok(())
    }

    /// `F(w, u)` without the prefactor.
    pub fn f_poly(&self, w: &[f64], u: C64) -> Result<C64> {
        self.check(w)?;
        Ok((self.f)(w, u))
    }
}

/// `prefactor(u) · F(w, u)`.
pub fn catalog_f(entry: &CatalogEntry, w: &[f64], u: C64) -> Result<C64> {
    Ok(entry.prefactor.eval(u) * entry.f_poly(w, u)?)
}

/// `e_j` of `(cos w_1, ..., cos w_n)`, reading only the first `n` angles.
pub fn e_cos(j: usize, n: usize, w: &[f64]) -> f64 {
    let xs: Vec<f64> = w.iter().take(n).map(|x| x.cos()).collect();
    elementary_symmetric(j, &xs)
}

/// Elementary symmetric polynomial `e_j(x_1, ..., x_n)`.
pub fn elementary_symmetric(j: usize, xs: &[f64]) -> f64 {
    // e[i] after processing a prefix holds e_i of that prefix
    let mut e = vec![0.0; j + 1];
    e[0] = 1.0;
    for &x in xs {
        for i in (1..=j).rev() {
            e[i] += e[i - 1] * x;
        }
    }
    e[j]
}

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn localisation(k: usize) -> Polynomial {
    Polynomial::one_minus_sq_pow(k)
}

fn one_dim_entries(xi: f64) -> Vec<CatalogEntry> {
    let (s, c) = xi.sin_cos();
    let (s2, c2, cos2) = (s * s, c * c, (2.0 * xi).cos());
    let m = ShiftKind::Moving;
    let f = ShiftKind::FlipFlop;
    let ff = |coin: &Coin| CatalogWalk::Coin(flip_flop(coin, 1).expect("two-state coin"));
    let one = Polynomial::one();
    let qw = qw_coin(xi);
    let crw = crw_coin(xi);
    let rw = rw_coin(xi);
    let sym = symmetric_rw();
    let g3 = three_state_grover();
    let grover3 = |gamma: f64| {
        move |w: &[f64], u: C64| {
            let sign = if gamma == 1.0 { -1.0 } else { 1.0 };
            ONE - u * (sign * 2.0 / 3.0 * (1.0 + 2.0 * w[0].cos() + gamma * (1.0 - w[0].cos()))) + u * u
        }
    };
    let (b, cc) = oqrw_example_pair();
    let (rb, rc) = oqrw_crw_pair(xi);
    vec![
        CatalogEntry::new("qw-m", 1, m, one.clone(), CatalogWalk::Coin(qw.clone()), move |w, u| {
            ONE - I * (2.0 * c * w[0].sin()) * u - u * u
        }),
        CatalogEntry::new("qw-f", 1, f, one.clone(), ff(&qw), move |w, u| {
            ONE - u * (2.0 * s * w[0].cos()) + u * u
        }),
        CatalogEntry::new(
            "crw-m",
            1,
            m,
            one.clone(),
            CatalogWalk::Coin(crw.clone()),
            move |w, u| ONE - u * (2.0 * c2 * w[0].cos()) + u * u * cos2,
        ),
        CatalogEntry::new("crw-f", 1, f, one.clone(), ff(&crw), move |w, u| {
            ONE - u * (2.0 * s2 * w[0].cos()) - u * u * cos2
        }),
        CatalogEntry::new("rw-m", 1, m, one.clone(), CatalogWalk::Coin(rw.clone()), move |w, u| {
            ONE - (I * (2.0 * c2 * w[0].sin()) + cis(-w[0])) * u
        }),
        CatalogEntry::new("rw-f", 1, f, one.clone(), ff(&rw), move |w, u| {
            ONE + (I * (2.0 * c2 * w[0].sin()) - cis(w[0])) * u
        }),
        CatalogEntry::new("sym-rw-m", 1, m, one.clone(), CatalogWalk::Coin(sym.clone()), |w, u| {
            ONE - u * w[0].cos()
        }),
        CatalogEntry::new("sym-rw-f", 1, f, one.clone(), ff(&sym), |w, u| ONE - u * w[0].cos()),
        CatalogEntry::new(
            "grover3-m",
            1,
            m,
            Polynomial::real(&[1.0, -1.0]),
            CatalogWalk::Coin(g3.clone()),
            grover3(1.0),
        ),
        CatalogEntry::new("grover3-f", 1, f, Polynomial::real(&[1.0, 1.0]), ff(&g3), grover3(0.0)),
        CatalogEntry::new(
            "oqrw",
            1,
            m,
            one.clone(),
            CatalogWalk::Oqrw(oqrw_lift(&b, &cc).expect("example pair is trace preserving")),
            |w, u| {
                let cw = w[0].cos();
                ONE - u * (8.0 * cw / 3.0) + u.powu(2) * ((8.0 * cw * cw + 1.0) / 3.0)
                    - u.powu(3) * (16.0 / 27.0 * cw * (2.0 * cw * cw + 1.0))
                    + u.powu(4) * (4.0 / 81.0 * cw * cw * (4.0 * cw * cw + 5.0))
            },
        ),
        CatalogEntry::new(
            "oqrw-crw",
            1,
            m,
            one,
            CatalogWalk::Coin(oqrw_reduce(&rb, &rc).expect("column-structured pair")),
            move |w, u| ONE - u * (2.0 * c2 * w[0].cos()) + u * u * cos2,
        ),
    ]
}

fn two_dim_entries() -> Vec<CatalogEntry> {
    let m = ShiftKind::Moving;
    let f = ShiftKind::FlipFlop;
    let ff = |coin: &Coin| CatalogWalk::Coin(flip_flop(coin, 2).expect("four-state coin"));
    let g = grover_matrix(4).expect("n = 4");
    let fr = fourier_matrix(4).expect("n = 4");
    let ps = positive_support_grover(4).expect("n = 4");
    let sum_cs = |w: &[f64]| w[0].cos() + w[0].sin() + w[1].cos() + w[1].sin();
    let half_1pi = C64::new(0.5, 0.5);
    let half_1mi = C64::new(0.5, -0.5);
    // `sign` picks between 1 + cos(w1 - w2) and 1 - cos(w1 - w2) at order u^2
    let fourier_m = move |sign: f64| {
        move |w: &[f64], u: C64| {
            ONE - half_1pi * sum_cs(w) * u - half_1mi * (1.0 + sign * (w[0] - w[1]).cos()) * u.powu(2)
                + half_1pi * sum_cs(w) * u.powu(3)
                - I * u.powu(4)
        }
    };
    vec![
        CatalogEntry::new(
            "grover2-m",
            2,
            m,
            localisation(1),
            CatalogWalk::Coin(g.clone()),
            |w, u| ONE + u * (w[0].cos() + w[1].cos()) + u * u,
        ),
        CatalogEntry::new("grover2-f", 2, f, localisation(1), ff(&g), |w, u| {
            ONE - u * (w[0].cos() + w[1].cos()) + u * u
        }),
        CatalogEntry::new(
            "fourier2-m",
            2,
            m,
            Polynomial::one(),
            CatalogWalk::Coin(fr.clone()),
            fourier_m(1.0),
        )
        .variant("u2-with-one-minus-cos", fourier_m(-1.0)),
        CatalogEntry::new("fourier2-f", 2, f, Polynomial::one(), ff(&fr), move |w, u| {
            let dc = w[0].cos() - w[1].cos();
            ONE - u * dc + half_1mi * (1.0 - (w[0] - w[1]).cos()) * u.powu(2) + I * dc * u.powu(3) - I * u.powu(4)
        }),
        CatalogEntry::new(
            "ps2-m",
            2,
            m,
            Polynomial::one(),
            CatalogWalk::Coin(ps.clone()),
            |w, u| {
                let (c1, c2) = (w[0].cos(), w[1].cos());
                ONE - u.powu(2) * (2.0 * (1.0 + 2.0 * c1 * c2)) - u.powu(3) * (4.0 * (c1 + c2)) - u.powu(4) * 3.0
            },
        ),
        CatalogEntry::new("ps2-f", 2, f, localisation(1), ff(&ps), |w, u| {
            ONE - u * (2.0 * (w[0].cos() + w[1].cos())) + u * u * 3.0
        }),
    ]
}

fn higher_dim_entries() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for d in [3usize, 4] {
        let g = grover_matrix(2 * d).expect("2d >= 2");
        let ps = positive_support_grover(2 * d).expect("2d >= 2");
        let df = d as f64;
        out.push(CatalogEntry::new(
            &format!("grover{d}d-f"),
            d,
            ShiftKind::FlipFlop,
            localisation(d - 1),
            CatalogWalk::Coin(flip_flop(&g, d).expect("2d-state coin")),
            move |w, u| ONE - u * (2.0 / df * e_cos(1, d, w)) + u * u,
        ));
        out.push(CatalogEntry::new(
            &format!("ps{d}d-f"),
            d,
            ShiftKind::FlipFlop,
            localisation(d - 1),
            CatalogWalk::Coin(flip_flop(&ps, d).expect("2d-state coin")),
            move |w, u| ONE - u * (2.0 * e_cos(1, d, w)) + u * u * (2.0 * df - 1.0),
        ));
    }
    let g3 = grover_matrix(6).expect("n = 6");
    out.push(CatalogEntry::new(
        "grover3d-m",
        3,
        ShiftKind::Moving,
        localisation(1),
        CatalogWalk::Coin(g3),
        |w, u| {
            let (e1, e2) = (e_cos(1, 3, w), e_cos(2, 3, w));
            ONE + u * (4.0 / 3.0 * e1) + u.powu(2) * (2.0 + 4.0 / 3.0 * e2) + u.powu(3) * (4.0 / 3.0 * e1) + u.powu(4)
        },
    ));
    let ps3 = positive_support_grover(6).expect("n = 6");
    // The u^5 coefficient reads e_1 of the first two cosines only; the
    // variant uses all three.
    let ps3m = |n5: usize| {
        move |w: &[f64], u: C64| {
            let (e1, e2, e3) = (e_cos(1, 3, w), e_cos(2, 3, w), e_cos(3, 3, w));
            ONE - u.powu(2) * (3.0 + 4.0 * e2)
                - u.powu(3) * (8.0 * (e1 + 2.0 * e3))
                - u.powu(4) * (3.0 * (3.0 + 4.0 * e2))
                - u.powu(5) * (8.0 * e_cos(1, n5, w))
                - u.powu(6) * 5.0
        }
    };
    out.push(
        CatalogEntry::new(
            "ps3d-m",
            3,
            ShiftKind::Moving,
            Polynomial::one(),
            CatalogWalk::Coin(ps3),
            ps3m(2),
        )
        .variant("e1-of-three-cosines", ps3m(3)),
    );
    out
}

/// Every closed-form factorisation, with `ξ` parameterising the
/// one-dimensional QW, CRW, RW and reduced-OQRW families.
pub fn catalog(xi: f64) -> Vec<CatalogEntry> {
    let mut out = one_dim_entries(xi);
    out.extend(two_dim_entries());
    out.extend(higher_dim_entries());
    out
}

pub fn catalog_entry(xi: f64, id: &str) -> Option<CatalogEntry> {
    catalog(xi).into_iter().find(|e| e.id == id)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantResidual {
    pub name: String,
    pub max_abs_err: f64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogReport {
    pub id: String,
    pub samples: usize,
    pub max_abs_err: f64,
    pub passed: bool,
    pub variants: Vec<VariantResidual>,
}

impl CatalogReport {
    /// Name of the first formula (the entry itself, then its variants) that
    /// matches the determinant.
    pub fn matching_formula(&self) -> Option<&str> {
        if self.passed {
            return Some("primary");
        }
        self.variants.iter().find(|v| v.matches).map(|v| v.name.as_str())
    }
}

/// Compares the entry with `det(I - u M̂(w))` at `samples` random points,
/// `w` uniform on the torus and `u` uniform in the closed unit disk.
pub fn catalog_verify(entry: &CatalogEntry, samples: usize, seed: u64) -> Result<CatalogReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err = 0.0f64;
    let mut variant_err = vec![0.0f64; entry.variants.len()];
    for _ in 0..samples {
        let w: Vec<f64> = (0..entry.d).map(|_| rng.gen_range(-PI..PI)).collect();
        let u = C64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI));
        let det = det_one_minus_u(&symbol(&entry.walk, &w)?, u)?;
        let pre = entry.prefactor.eval(u);
        max_err = max_err.max((pre * (entry.f)(&w, u) - det).norm());
        for (slot, (_, f)) in variant_err.iter_mut().zip(&entry.variants) {
            *slot = slot.max((pre * f(&w, u) - det).norm());
        }
    }
    Ok(CatalogReport {
        id: entry.id.clone(),
        samples,
        max_abs_err: max_err,
        passed: max_err < CATALOG_TOL,
        variants: entry
            .variants
            .iter()
            .zip(variant_err)
            .map(|((name, _), e)| VariantResidual {
                name: name.clone(),
                max_abs_err: e,
                matches: e < CATALOG_TOL,
            })
            .collect(),
    })
}

/// Largest remainder coefficient of `det(I - u M̂(w))` divided by the
/// entry's localisation prefactor.
pub fn prefactor_remainder(entry: &CatalogEntry, w: &[f64]) -> Result<f64> {
    entry.check(w)?;
    let poly = det_polynomial(&symbol(&entry.walk, w)?)?;
    let (_, rem) = poly.div_rem(&entry.prefactor)?;
    Ok(rem.max_abs_coeff())
}
