//! Coin matrices: quantum, correlated-random and random walk families,
//! Grover/Fourier coins, positive supports, flip-flop conversion and the
//! open-quantum-random-walk lift.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{unit_offset, Jump, Kernel, Walk};
use crate::linalg::{cis, CMatrix, C64, ONE, ZERO};

/// Tolerance for unitarity, stochasticity and trace-preservation checks.
pub const COIN_TOL: f64 = 1e-10;

/// Entries below this are treated as exact zeros in structural checks.
pub const STRUCTURE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftKind {
    Moving,
    #[serde(rename = "flipflop")]
    FlipFlop,
}

impl ShiftKind {
    pub fn toggled(self) -> Self {
        match self {
            ShiftKind::Moving => ShiftKind::FlipFlop,
            ShiftKind::FlipFlop => ShiftKind::Moving,
        }
    }
}

impl fmt::Display for ShiftKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShiftKind::Moving => "m",
            ShiftKind::FlipFlop => "f",
        })
    }
}

impl FromStr for ShiftKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m" | "M" | "moving" => Ok(ShiftKind::Moving),
            "f" | "F" | "flipflop" | "flip-flop" => Ok(ShiftKind::FlipFlop),
            other => Err(Error::Parse(format!("unknown shift kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Qw,
    Crw,
    Rw,
    Grover,
    Fourier,
    PositiveSupportGrover,
    ThreeStateGrover,
    OqrwReduced,
    Custom,
}

impl Model {
    pub fn is_stochastic(self) -> bool {
        matches!(self, Model::Crw | Model::Rw | Model::OqrwReduced)
    }

    pub fn is_unitary(self) -> bool {
        matches!(
            self,
            Model::Qw | Model::Grover | Model::Fourier | Model::ThreeStateGrover
        )
    }
}

/// A coin matrix with its shift convention and model tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Coin {
    matrix: CMatrix,
    shift_kind: ShiftKind,
    model: Model,
}

impl Coin {
    /// Validates the model invariants and fails loudly on violation.
    pub fn new(matrix: CMatrix, model: Model, shift_kind: ShiftKind) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let n = matrix.rows();
        if n < 2 {
            return Err(Error::BadSize(n));
        }
        if model == Model::OqrwReduced && n != 2 {
            return Err(Error::InvalidCoin("reduced OQRW coins are 2x2".into()));
        }
        if model == Model::ThreeStateGrover && n != 3 {
            return Err(Error::InvalidCoin("three-state Grover coin must be 3x3".into()));
        }
        if model.is_stochastic() {
            check_stochastic(&matrix)?;
        }
        if model.is_unitary() {
            let defect = matrix.unitarity_defect();
            if defect >= COIN_TOL {
                return Err(Error::InvalidCoin(format!("not unitary: |A*A - I| = {defect:e}")));
            }
        }
        Ok(Self {
            matrix,
            shift_kind,
            model,
        })
    }

    pub fn custom(matrix: CMatrix) -> Result<Self> {
        Self::new(matrix, Model::Custom, ShiftKind::Moving)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn states(&self) -> usize {
        self.matrix.rows()
    }

    pub fn shift_kind(&self) -> ShiftKind {
        self.shift_kind
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// True only for three-state coins, whose middle state stays put.
    pub fn has_stay(&self) -> bool {
        self.states() == 3
    }

    /// Lattice dimension the coin drives.
    pub fn dimension(&self) -> usize {
        if self.has_stay() || self.model == Model::OqrwReduced {
            1
        } else {
            self.states() / 2
        }
    }

    /// Norm exponent for the site measure: 1 for non-negative coins, 2 otherwise.
    pub fn default_norm(&self) -> u32 {
        if self.model.is_stochastic() || self.model == Model::PositiveSupportGrover {
            1
        } else {
            2
        }
    }

    pub fn to_record(&self) -> CoinRecord {
        CoinRecord {
            model: self.model,
            states: self.states(),
            shift_kind: self.shift_kind,
            entries: self.matrix.as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_record(rec: &CoinRecord) -> Result<Self> {
        let data = rec.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
        Self::new(
            CMatrix::from_vec(rec.states, rec.states, data)?,
            rec.model,
            rec.shift_kind,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("coin record serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: CoinRecord = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_record(&rec)
    }
}

impl Walk for Coin {
    fn kernel(&self) -> Result<Kernel> {
        let n = self.states();
        if n != 3 && !n.is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!("{n} states is neither 2d nor 3")));
        }
        let a = &self.matrix;
        let proj = |i| CMatrix::basis_projection(n, i);
        let jumps = if self.model == Model::OqrwReduced {
            // moves with A P_1 to the left and A P_2 to the right
            vec![
                Jump {
                    offset: vec![1],
                    matrix: a * &proj(0),
                },
                Jump {
                    offset: vec![-1],
                    matrix: a * &proj(1),
                },
            ]
        } else if self.has_stay() {
            vec![
                Jump {
                    offset: vec![1],
                    matrix: &proj(0) * a,
                },
                Jump {
                    offset: vec![0],
                    matrix: &proj(1) * a,
                },
                Jump {
                    offset: vec![-1],
                    matrix: &proj(2) * a,
                },
            ]
        } else {
            let d = n / 2;
            (0..d)
                .flat_map(|j| {
                    [
                        Jump {
                            offset: unit_offset(d, j, 1),
                            matrix: &proj(2 * j) * a,
                        },
                        Jump {
                            offset: unit_offset(d, j, -1),
                            matrix: &proj(2 * j + 1) * a,
                        },
                    ]
                })
                .collect()
        };
        Kernel::new(self.dimension(), n, jumps)
    }
}

/// JSON form of a coin: `{model, states, shift_kind, entries: [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoinRecord {
    pub model: Model,
    pub states: usize,
    pub shift_kind: ShiftKind,
    pub entries: Vec<[f64; 2]>,
}

fn check_stochastic(m: &CMatrix) -> Result<()> {
    for z in m.as_slice() {
        if z.im.abs() > COIN_TOL || z.re < -COIN_TOL || z.re > 1.0 + COIN_TOL {
            return Err(Error::InvalidCoin(format!("entry {z} outside [0, 1]")));
        }
    }
    for j in 0..m.cols() {
        let s: f64 = (0..m.rows()).map(|i| m[(i, j)].re).sum();
        if (s - 1.0).abs() > COIN_TOL {
            return Err(Error::InvalidCoin(format!("column {j} sums to {s}")));
        }
    }
    Ok(())
}

/// `[[cos ξ, sin ξ], [sin ξ, -cos ξ]]`, M-type.
pub fn qw_coin(xi: f64) -> Coin {
    let (s, c) = xi.sin_cos();
    Coin::new(CMatrix::real(&[&[c, s], &[s, -c]]), Model::Qw, ShiftKind::Moving).expect("unitary")
}

pub fn hadamard() -> Coin {
    qw_coin(PI / 4.0)
}

/// `[[cos²ξ, sin²ξ], [sin²ξ, cos²ξ]]`, M-type.
pub fn crw_coin(xi: f64) -> Coin {
    let (s, c) = xi.sin_cos();
    let (s2, c2) = (s * s, c * c);
    Coin::new(CMatrix::real(&[&[c2, s2], &[s2, c2]]), Model::Crw, ShiftKind::Moving).expect("stochastic")
}

/// `[[cos²ξ, cos²ξ], [sin²ξ, sin²ξ]]`, M-type: left with probability cos²ξ.
pub fn rw_coin(xi: f64) -> Coin {
    let (s, c) = xi.sin_cos();
    let (s2, c2) = (s * s, c * c);
    Coin::new(CMatrix::real(&[&[c2, c2], &[s2, s2]]), Model::Rw, ShiftKind::Moving).expect("stochastic")
}

/// The symmetric random walk, `rw_coin(π/4)`.
pub fn symmetric_rw() -> Coin {
    rw_coin(PI / 4.0)
}

fn grover_entries(n: usize) -> CMatrix {
    let off = 2.0 / n as f64;
    CMatrix::from_fn(n, n, |a, b| C64::new(if a == b { off - 1.0 } else { off }, 0.0))
}

/// `n x n` Grover matrix: `2/n - 1` on the diagonal, `2/n` elsewhere.
pub fn grover_matrix(n: usize) -> Result<Coin> {
    if n < 2 {
        return Err(Error::BadSize(n));
    }
    let model = if n == 3 { Model::ThreeStateGrover } else { Model::Grover };
    Coin::new(grover_entries(n), model, ShiftKind::Moving)
}

/// `n x n` Fourier matrix, entry `(a, b)` = `ω^{ab} / √n` with `ω = e^{2πi/n}`.
pub fn fourier_matrix(n: usize) -> Result<Coin> {
    if n < 2 {
        return Err(Error::BadSize(n));
    }
    let norm = 1.0 / (n as f64).sqrt();
    let m = CMatrix::from_fn(n, n, |a, b| {
        // reduce the exponent mod n first so the phases are exact roots of unity
        let e = (a * b) % n;
        quarter_exact_root(e, n) * norm
    });
    Coin::new(m, Model::Fourier, ShiftKind::Moving)
}

fn quarter_exact_root(e: usize, n: usize) -> C64 {
    if (4 * e).is_multiple_of(n) {
        match 4 * e / n {
            0 => ONE,
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    } else {
        cis(2.0 * PI * e as f64 / n as f64)
    }
}

/// Entry 1 where the source entry is positive, 0 otherwise.
pub fn positive_support(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_real(STRUCTURE_TOL) {
        return Err(Error::NotReal);
    }
    Ok(a.map(|z| if z.re > 0.0 { ONE } else { ZERO }))
}

/// Positive support of the `n x n` Grover matrix.
pub fn positive_support_grover(n: usize) -> Result<Coin> {
    if n < 2 {
        return Err(Error::BadSize(n));
    }
    Coin::new(
        positive_support(&grover_entries(n))?,
        Model::PositiveSupportGrover,
        ShiftKind::Moving,
    )
}

/// Flip-flop conversion `A -> (I_d ⊗ σ) A`; for three-state coins the
/// left and right states are exchanged instead. Involutive.
pub fn flip_flop(coin: &Coin, d: usize) -> Result<Coin> {
    let exchange = if coin.has_stay() && d == 1 {
        CMatrix::real(&[&[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]])
    } else if coin.states() == 2 * d {
        CMatrix::identity(d).kron(&CMatrix::sigma())
    } else {
        return Err(Error::DimensionMismatch(format!(
            "{}-state coin cannot be flip-flopped in {d} dimensions",
            coin.states()
        )));
    };
    Coin::new(
        exchange.matmul(coin.matrix())?,
        coin.model(),
        coin.shift_kind().toggled(),
    )
}

/// Returns the coin converted to the requested shift convention.
pub fn with_shift(coin: Coin, shift: ShiftKind) -> Result<Coin> {
    if coin.shift_kind() == shift {
        Ok(coin)
    } else {
        let d = coin.dimension();
        flip_flop(&coin, d)
    }
}

/// Three-state coin `G^(3)`, moving shift.
pub fn three_state_grover() -> Coin {
    grover_matrix(3).expect("n = 3 is valid")
}

/// `(P_1, P_0, P_2)`: move left, stay, move right.
pub fn three_state_projections() -> (CMatrix, CMatrix, CMatrix) {
    (
        CMatrix::basis_projection(3, 0),
        CMatrix::basis_projection(3, 1),
        CMatrix::basis_projection(3, 2),
    )
}

/// Kraus pair of an open quantum random walk and its vectorised lift.
#[derive(Debug, Clone, PartialEq)]
pub struct OqrwPair {
    b: CMatrix,
    c: CMatrix,
    lifted_b: CMatrix,
    lifted_c: CMatrix,
}

impl OqrwPair {
    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    /// `B ⊗ conj(B)`, acting on row-major vectorised densities.
    pub fn lifted_b(&self) -> &CMatrix {
        &self.lifted_b
    }

    pub fn lifted_c(&self) -> &CMatrix {
        &self.lifted_c
    }

    /// Restriction of the lifts to the diagonal density entries (ρ11, ρ22).
    pub fn diagonal_blocks(&self) -> (CMatrix, CMatrix) {
        let pick = |m: &CMatrix| CMatrix::from_fn(2, 2, |i, j| m[(3 * i, 3 * j)]);
        (pick(&self.lifted_b), pick(&self.lifted_c))
    }
}

impl Walk for OqrwPair {
    fn kernel(&self) -> Result<Kernel> {
        Kernel::new(
            1,
            4,
            vec![
                Jump {
                    offset: vec![1],
                    matrix: self.lifted_b.clone(),
                },
                Jump {
                    offset: vec![-1],
                    matrix: self.lifted_c.clone(),
                },
            ],
        )
    }
}

fn check_kraus(b: &CMatrix, c: &CMatrix) -> Result<()> {
    for m in [b, c] {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::DimensionMismatch("Kraus operators must be 2x2".into()));
        }
    }
    let sum = &b.adjoint().matmul(b)? + &c.adjoint().matmul(c)?;
    let defect = sum.max_abs_diff(&CMatrix::identity(2));
    if defect >= COIN_TOL {
        return Err(Error::NotTracePreserving(defect));
    }
    Ok(())
}

/// Builds the lifted 4x4 pair `B ⊗ conj(B)`, `C ⊗ conj(C)`.
pub fn oqrw_lift(b: &CMatrix, c: &CMatrix) -> Result<OqrwPair> {
    check_kraus(b, c)?;
    Ok(OqrwPair {
        b: b.clone(),
        c: c.clone(),
        lifted_b: b.kron(&b.conj()),
        lifted_c: c.kron(&c.conj()),
    })
}

/// `B = [[1, 1], [0, 1]]/√3`, `C = [[1, 0], [-1, 1]]/√3`.
pub fn oqrw_example_pair() -> (CMatrix, CMatrix) {
    let r = 1.0 / 3f64.sqrt();
    (
        CMatrix::real(&[&[r, r], &[0.0, r]]),
        CMatrix::real(&[&[r, 0.0], &[-r, r]]),
    )
}

/// Reduces a column-structured Kraus pair to a two-state stochastic coin
/// `[[|b11|², |c12|²], [|b21|², |c22|²]]` that moves with `A P_1` / `A P_2`.
pub fn oqrw_reduce(b: &CMatrix, c: &CMatrix) -> Result<Coin> {
    check_kraus(b, c)?;
    let zero_col = |m: &CMatrix, j: usize| (0..2).all(|i| m[(i, j)].norm() < STRUCTURE_TOL);
    if !zero_col(b, 1) || !zero_col(c, 0) {
        return Err(Error::NotReducible);
    }
    let sq = |z: C64| C64::new(z.norm_sqr(), 0.0);
    let a = CMatrix::from_rows(&[vec![sq(b[(0, 0)]), sq(c[(0, 1)])], vec![sq(b[(1, 0)]), sq(c[(1, 1)])]])?;
    Coin::new(a, Model::OqrwReduced, ShiftKind::Moving)
}

/// Column-structured Kraus pair whose reduction is `crw_coin(ξ)`.
pub fn oqrw_crw_pair(xi: f64) -> (CMatrix, CMatrix) {
    let (s, c) = xi.sin_cos();
    (
        CMatrix::real(&[&[c, 0.0], &[s, 0.0]]),
        CMatrix::real(&[&[0.0, s], &[0.0, c]]),
    )
}
