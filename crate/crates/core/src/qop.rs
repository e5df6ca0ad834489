//! Shift and coin operators on `H_C ⊗ H_P`.
//!
//! Basis ordering is coin-major: the basis state `|c_j⟩ ⊗ |v⟩` has global
//! index `j * n + v` (0-based `j` and `v`). Under this ordering the shift
//! operator is block diagonal, one `n x n` block per coin label, and block
//! `j` sends `v` to `Rot(v, j)`.
//!
//! Shift entries are exact integers, so unitarity of a shift is decided
//! without tolerance. Coins are complex and checked to [`COIN_TOLERANCE`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rotmap::RotationMap;
use crate::walk::WalkState;
use crate::FORMAT_VERSION;

/// Max-abs entry of `C·C† − I` tolerated for a coin.
pub const COIN_TOLERANCE: f64 = 1e-12;

/// Largest `d·n` for which dense products and dumps are produced.
pub const DENSE_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QopError {
    #[error("dimension mismatch: operator acts on {expected} amplitudes, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("coin {kind} is not defined for d={d}")]
    CoinKind { kind: CoinKind, d: usize },
    #[error("coin matrix is not unitary (max |C·C† − I| = {0:e})")]
    NotUnitary(f64),
    #[error("coin matrix must be square and non-empty")]
    CoinShape,
    #[error("dense output limited to d·n <= {DENSE_LIMIT}, got {0}")]
    TooLarge(usize),
}

/// The coin-conditioned shift `Σ_j Σ_v |c_j⟩⟨c_j| ⊗ |Rot(v, j)⟩⟨v|`.
///
/// Stored as one target row per column: every column holds exactly one 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftOperator {
    n: usize,
    d: usize,
    targets: Vec<usize>,
}

/// Global coin-major index of `(label, vertex)`.
#[inline]
pub fn basis_index(n: usize, label: usize, vertex: usize) -> usize {
    label * n + vertex
}

/// Builds the shift operator of a rotation map. Consistency is not required.
pub fn build_shift(rot: &RotationMap) -> ShiftOperator {
    let (n, d) = (rot.n(), rot.d());
    let mut targets = vec![0; n * d];
    for j in 0..d {
        for v in 0..n {
            targets[basis_index(n, j, v)] = basis_index(n, j, rot.get(v, j));
        }
    }
    ShiftOperator { n, d, targets }
}

impl ShiftOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.targets.len()
    }

    /// Row of the single nonzero in column `col`.
    pub fn target(&self, col: usize) -> usize {
        self.targets[col]
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        let mut rows = vec![Vec::new(); self.dim()];
        for (col, &row) in self.targets.iter().enumerate() {
            rows[row].push((col, 1));
        }
        SparseMatrix::from_rows(rows)
    }

    /// `S†`, which for a real 0/1 matrix is the transpose.
    pub fn adjoint(&self) -> SparseMatrix {
        let rows = self.targets.iter().map(|&row| vec![(row, 1)]).collect();
        SparseMatrix::from_rows(rows)
    }

    /// True when every row also has exactly one nonzero.
    pub fn is_permutation(&self) -> bool {
        let mut hit = vec![false; self.dim()];
        for &t in &self.targets {
            if std::mem::replace(&mut hit[t], true) {
                return false;
            }
        }
        true
    }

    pub fn apply_slice(&self, amps: &[Complex64]) -> Result<Vec<Complex64>, QopError> {
        self.check_dim(amps.len())?;
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (col, &row) in self.targets.iter().enumerate() {
            out[row] += amps[col];
        }
        Ok(out)
    }

    pub fn apply_adjoint_slice(&self, amps: &[Complex64]) -> Result<Vec<Complex64>, QopError> {
        self.check_dim(amps.len())?;
        Ok(self.targets.iter().map(|&row| amps[row]).collect())
    }

    fn check_dim(&self, found: usize) -> Result<(), QopError> {
        if found != self.dim() {
            return Err(QopError::Dimension { expected: self.dim(), found });
        }
        Ok(())
    }

    pub fn dump(&self) -> Result<OperatorDump, QopError> {
        let dense = self.to_sparse().to_dense();
        OperatorDump::integer("shift", self.n, self.d, &dense)
    }
}

/// Integer sparse matrix in row-compressed form, columns sorted per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    fn from_rows(mut rows: Vec<Vec<(usize, i64)>>) -> Self {
        for r in &mut rows {
            r.sort_unstable_by_key(|&(c, _)| c);
        }
        Self { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, r: usize) -> &[(usize, i64)] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.rows[r].binary_search_by_key(&c, |&(col, _)| col).map_or(0, |i| self.rows[r][i].1)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows = vec![Vec::new(); self.dim()];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, x) in row {
                rows[c].push((r, x));
            }
        }
        SparseMatrix::from_rows(rows)
    }

    /// Exact product `self · rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.dim(), rhs.dim(), "square operands of equal size");
        let mut acc = vec![0i64; self.dim()];
        let mut touched = Vec::new();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                for &(k, a) in row {
                    for &(c, b) in &rhs.rows[k] {
                        if acc[c] == 0 {
                            touched.push(c);
                        }
                        acc[c] += a * b;
                    }
                }
                let out: Vec<(usize, i64)> =
                    touched.drain(..).map(|c| (c, std::mem::take(&mut acc[c]))).filter(|&(_, x)| x != 0).collect();
                out
            })
            .collect();
        SparseMatrix::from_rows(rows)
    }

    /// `max |self − I|` over all entries.
    pub fn identity_defect(&self) -> i64 {
        let mut defect = 0;
        for (r, row) in self.rows.iter().enumerate() {
            let mut diag = 0;
            for &(c, x) in row {
                if c == r {
                    diag = x;
                } else {
                    defect = defect.max(x.abs());
                }
            }
            defect = defect.max((diag - 1).abs());
        }
        defect
    }

    pub fn trace(&self) -> i64 {
        (0..self.dim()).map(|r| self.get(r, r)).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0; self.dim()]; self.dim()];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, x) in row {
                m[r][c] = x;
            }
        }
        m
    }
}

/// Result of checking `S·S† = I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitarityReport {
    /// `max |S·S† − I|`, exact.
    pub defect: i64,
    /// Dense `S·S†` when `d·n <= DENSE_LIMIT`.
    pub product: Option<Vec<Vec<i64>>>,
}

/// Builds the shift of `rot` and measures how far `S·S†` is from the
/// identity. Zero exactly when every column of `rot` is a permutation.
pub fn unitarity_defect(rot: &RotationMap) -> UnitarityReport {
    let s = build_shift(rot);
    let product = s.to_sparse().mul(&s.adjoint());
    let defect = product.identity_defect();
    let dense = (s.dim() <= DENSE_LIMIT).then(|| product.to_dense());
    UnitarityReport { defect, product: dense }
}

/// `max |S†·S − I|`, the other half of unitarity.
pub fn adjoint_product_defect(rot: &RotationMap) -> i64 {
    let s = build_shift(rot);
    s.adjoint().mul(&s.to_sparse()).identity_defect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoinKind {
    Hadamard,
    Grover,
    Dft,
    Identity,
    Custom,
}

impl std::fmt::Display for CoinKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CoinKind::Hadamard => "hadamard",
            CoinKind::Grover => "grover",
            CoinKind::Dft => "dft",
            CoinKind::Identity => "identity",
            CoinKind::Custom => "custom",
        })
    }
}

impl std::str::FromStr for CoinKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hadamard" => Ok(CoinKind::Hadamard),
            "grover" => Ok(CoinKind::Grover),
            "dft" => Ok(CoinKind::Dft),
            "identity" => Ok(CoinKind::Identity),
            _ => Err(format!("unknown coin {s:?} (expected hadamard|grover|dft|identity)")),
        }
    }
}

/// A `d x d` unitary applied identically at every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinOperator {
    d: usize,
    kind: CoinKind,
    matrix: Vec<Complex64>,
}

/// Standard coins: Hadamard (`d = 2`), Grover `2/d·J − I`, DFT
/// `ω^{jk}/√d`, and the identity.
pub fn build_coin(kind: CoinKind, d: usize) -> Result<CoinOperator, QopError> {
    if d == 0 {
        return Err(QopError::CoinKind { kind, d });
    }
    let re = |x: f64| Complex64::new(x, 0.0);
    let matrix: Vec<Complex64> = match kind {
        CoinKind::Hadamard => {
            if d != 2 {
                return Err(QopError::CoinKind { kind, d });
            }
            let h = std::f64::consts::FRAC_1_SQRT_2;
            vec![re(h), re(h), re(h), re(-h)]
        }
        CoinKind::Grover => {
            let off = 2.0 / d as f64;
            (0..d * d).map(|i| re(if i / d == i % d { off - 1.0 } else { off })).collect()
        }
        CoinKind::Dft => {
            let scale = 1.0 / (d as f64).sqrt();
            (0..d * d)
                .map(|i| {
                    let (j, k) = (i / d, i % d);
                    // Reduce the exponent mod d before scaling to keep the phase accurate.
                    let angle = 2.0 * PI * ((j * k) % d) as f64 / d as f64;
                    Complex64::from_polar(scale, angle)
                })
                .collect()
        }
        CoinKind::Identity => (0..d * d).map(|i| re(if i / d == i % d { 1.0 } else { 0.0 })).collect(),
        CoinKind::Custom => return Err(QopError::CoinKind { kind, d }),
    };
    Ok(CoinOperator { d, kind, matrix })
}

impl CoinOperator {
    /// Wraps a caller-supplied matrix, given as rows, after checking it is
    /// unitary within [`COIN_TOLERANCE`].
    pub fn custom(rows: &[Vec<Complex64>]) -> Result<Self, QopError> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(QopError::CoinShape);
        }
        let coin = CoinOperator { d, kind: CoinKind::Custom, matrix: rows.concat() };
        let err = coin.unitarity_error();
        if err > COIN_TOLERANCE {
            return Err(QopError::NotUnitary(err));
        }
        Ok(coin)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> CoinKind {
        self.kind
    }

    #[inline]
    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.matrix[j * self.d + k]
    }

    /// `max |C·C† − I|`.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.d;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let s: Complex64 = (0..d).map(|k| self.entry(i, k) * self.entry(j, k).conj()).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    pub fn adjoint(&self) -> CoinOperator {
        let d = self.d;
        let matrix = (0..d * d).map(|i| self.entry(i % d, i / d).conj()).collect();
        CoinOperator { d, kind: self.kind, matrix }
    }

    /// Applies `C ⊗ I_n` to a coin-major amplitude vector.
    pub fn apply_slice(&self, n: usize, amps: &[Complex64]) -> Result<Vec<Complex64>, QopError> {
        let d = self.d;
        if amps.len() != n * d {
            return Err(QopError::Dimension { expected: n * d, found: amps.len() });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for j in 0..d {
            let dst = &mut out[j * n..(j + 1) * n];
            for k in 0..d {
                let c = self.entry(j, k);
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (o, &a) in dst.iter_mut().zip(&amps[k * n..(k + 1) * n]) {
                    *o += c * a;
                }
            }
        }
        Ok(out)
    }

    pub fn dump(&self) -> OperatorDump {
        let d = self.d;
        let matrix = (0..d).map(|j| (0..d).map(|k| [self.entry(j, k).re, self.entry(j, k).im]).collect()).collect();
        OperatorDump { version: FORMAT_VERSION.into(), kind: format!("coin:{}", self.kind), n: 1, d, ordering: "coin-major".into(), matrix }
    }
}

/// An operator that can act on a [`WalkState`].
pub trait StateOperator {
    fn apply_to(&self, state: &WalkState) -> Result<WalkState, QopError>;
}

impl StateOperator for ShiftOperator {
    fn apply_to(&self, state: &WalkState) -> Result<WalkState, QopError> {
        if state.n() != self.n || state.d() != self.d {
            return Err(QopError::Dimension { expected: self.dim(), found: state.amplitudes().len() });
        }
        let amps = self.apply_slice(state.amplitudes())?;
        Ok(state.with_amplitudes(amps))
    }
}

impl StateOperator for CoinOperator {
    fn apply_to(&self, state: &WalkState) -> Result<WalkState, QopError> {
        if state.d() != self.d {
            return Err(QopError::Dimension { expected: self.d * state.n(), found: state.amplitudes().len() });
        }
        let amps = self.apply_slice(state.n(), state.amplitudes())?;
        Ok(state.with_amplitudes(amps))
    }
}

/// Applies a shift or an extended coin to a state. The step counter is
/// left unchanged.
pub fn apply<O: StateOperator + ?Sized>(op: &O, state: &WalkState) -> Result<WalkState, QopError> {
    op.apply_to(state)
}

/// Dense operator dump: header plus a matrix of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorDump {
    pub version: String,
    pub kind: String,
    pub n: usize,
    pub d: usize,
    pub ordering: String,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl OperatorDump {
    pub fn integer(kind: &str, n: usize, d: usize, dense: &[Vec<i64>]) -> Result<Self, QopError> {
        if n * d > DENSE_LIMIT {
            return Err(QopError::TooLarge(n * d));
        }
        let matrix = dense.iter().map(|r| r.iter().map(|&x| [x as f64, 0.0]).collect()).collect();
        Ok(OperatorDump { version: FORMAT_VERSION.into(), kind: kind.into(), n, d, ordering: "coin-major".into(), matrix })
    }
}
