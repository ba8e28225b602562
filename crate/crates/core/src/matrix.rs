//! Bit-packed ±1 matrices, dense real data, and exact interaction strengths.
//!
//! Binary data is stored column-major with one bit per entry (`1` ↔ `+1`,
//! `0` ↔ `-1`). Each column occupies `ceil(n / 64)` words and the bits past
//! `n_rows` in the final word are always zero, so popcounts over whole words
//! never need masking when both operands are packed the same way.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, XyzError};

pub const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(n_rows: usize) -> usize {
    n_rows.div_ceil(WORD_BITS)
}

#[inline]
fn tail_mask(n_rows: usize) -> u64 {
    match n_rows % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Column-major bit-packed matrix over `{-1, +1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackedMatrix {
    n_rows: usize,
    n_cols: usize,
    words_per_col: usize,
    words: Vec<u64>,
}

impl PackedMatrix {
    /// Builds a matrix where `f(i, j)` returns `true` for `+1`.
    pub fn from_fn(
        n_rows: usize,
        n_cols: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        check_shape(n_rows, n_cols)?;
        let words_per_col = words_for(n_rows);
        let mut words = vec![0u64; words_per_col * n_cols];
        for j in 0..n_cols {
            let col = &mut words[j * words_per_col..(j + 1) * words_per_col];
            for i in 0..n_rows {
                if f(i, j) {
                    col[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
                }
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            words_per_col,
            words,
        })
    }

    /// Column-major `±1` values.
    pub fn from_signs(n_rows: usize, n_cols: usize, values: &[i8]) -> Result<Self> {
        check_shape(n_rows, n_cols)?;
        if values.len() != n_rows * n_cols {
            return Err(XyzError::DimensionMismatch {
                what: "packed matrix values",
                expected: n_rows * n_cols,
                got: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|&v| v != 1 && v != -1) {
            return Err(XyzError::InvalidParameter(format!(
                "entry at row {}, column {} is {}, expected -1 or +1",
                pos % n_rows,
                pos / n_rows,
                values[pos]
            )));
        }
        Self::from_fn(n_rows, n_cols, |i, j| values[j * n_rows + i] == 1)
    }

    pub fn from_columns(columns: &[Vec<i8>]) -> Result<Self> {
        let n_cols = columns.len();
        let n_rows = columns.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(n_rows * n_cols);
        for col in columns {
            if col.len() != n_rows {
                return Err(XyzError::DimensionMismatch {
                    what: "column length",
                    expected: n_rows,
                    got: col.len(),
                });
            }
            flat.extend_from_slice(col);
        }
        Self::from_signs(n_rows, n_cols, &flat)
    }

    /// Wraps raw words laid out as `n_cols` blocks of `ceil(n_rows/64)` words.
    /// Padding bits must be zero.
    pub fn from_words(n_rows: usize, n_cols: usize, words: Vec<u64>) -> Result<Self> {
        check_shape(n_rows, n_cols)?;
        let words_per_col = words_for(n_rows);
        if words.len() != words_per_col * n_cols {
            return Err(XyzError::DimensionMismatch {
                what: "packed words",
                expected: words_per_col * n_cols,
                got: words.len(),
            });
        }
        let mask = tail_mask(n_rows);
        for j in 0..n_cols {
            let last = words[(j + 1) * words_per_col - 1];
            if last & !mask != 0 {
                return Err(XyzError::InvalidParameter(format!(
                    "column {j} has nonzero padding bits"
                )));
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            words_per_col,
            words,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn words_per_col(&self) -> usize {
        self.words_per_col
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[u64] {
        &self.words[j * self.words_per_col..(j + 1) * self.words_per_col]
    }

    /// `true` when entry `(i, j)` is `+1`.
    #[inline]
    pub fn bit(&self, i: usize, j: usize) -> bool {
        (self.words[j * self.words_per_col + i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        if self.bit(i, j) {
            1
        } else {
            -1
        }
    }

    /// Number of rows where column `j` of `self` and column `k` of `other`
    /// differ.
    #[inline]
    pub fn column_mismatches(&self, j: usize, other: &PackedMatrix, k: usize) -> u32 {
        self.column(j)
            .iter()
            .zip(other.column(k))
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }

    pub fn to_signs(&self) -> Vec<i8> {
        let mut out = Vec::with_capacity(self.n_rows * self.n_cols);
        for j in 0..self.n_cols {
            for i in 0..self.n_rows {
                out.push(self.get(i, j));
            }
        }
        out
    }

    pub fn to_real(&self) -> RealMatrix {
        let data = self.to_signs().into_iter().map(f64::from).collect();
        RealMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data,
        }
    }

    pub(crate) fn index_check(&self, j: usize) -> Result<()> {
        if j >= self.n_cols {
            Err(XyzError::IndexOutOfRange {
                index: j,
                len: self.n_cols,
            })
        } else {
            Ok(())
        }
    }
}

fn check_shape(n_rows: usize, n_cols: usize) -> Result<()> {
    if n_rows == 0 {
        return Err(XyzError::Empty("matrix has no rows"));
    }
    if n_cols == 0 {
        return Err(XyzError::Empty("matrix has no columns"));
    }
    Ok(())
}

/// A response in `{-1, +1}^n`, kept both as values and packed bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignVector {
    values: Vec<i8>,
    bits: Vec<u64>,
}

impl SignVector {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if values.is_empty() {
            return Err(XyzError::Empty("sign vector"));
        }
        if let Some(pos) = values.iter().position(|&v| v != 1 && v != -1) {
            return Err(XyzError::InvalidParameter(format!(
                "sign vector entry {pos} is {}, expected -1 or +1",
                values[pos]
            )));
        }
        let mut bits = vec![0u64; words_for(values.len())];
        for (i, &v) in values.iter().enumerate() {
            if v == 1 {
                bits[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
            }
        }
        Ok(Self { values, bits })
    }

    /// Sign pattern of a real vector; zeros map to `+1`.
    pub fn sign_of(y: &RealVector) -> Self {
        let values = y
            .as_slice()
            .iter()
            .map(|&v| if v < 0.0 { -1 } else { 1 })
            .collect();
        Self::new(values).expect("nonempty sign pattern")
    }

    pub fn negated(&self) -> Self {
        Self::new(self.values.iter().map(|v| -v).collect()).expect("valid signs")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn to_real(&self) -> RealVector {
        RealVector(self.values.iter().map(|&v| f64::from(v)).collect())
    }
}

/// Dense column-major real matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn from_col_major(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        check_shape(n_rows, n_cols)?;
        if data.len() != n_rows * n_cols {
            return Err(XyzError::DimensionMismatch {
                what: "real matrix values",
                expected: n_rows * n_cols,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(XyzError::NonFinite {
                row: pos % n_rows,
                col: pos / n_rows,
            });
        }
        Ok(Self {
            n_rows,
            n_cols,
            data,
        })
    }

    pub fn from_fn(
        n_rows: usize,
        n_cols: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for j in 0..n_cols {
            for i in 0..n_rows {
                data.push(f(i, j));
            }
        }
        Self::from_col_major(n_rows, n_cols, data)
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n_rows = columns.first().map_or(0, Vec::len);
        for col in columns {
            if col.len() != n_rows {
                return Err(XyzError::DimensionMismatch {
                    what: "column length",
                    expected: n_rows,
                    got: col.len(),
                });
            }
        }
        Self::from_col_major(n_rows, columns.len(), columns.concat())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.n_rows..(j + 1) * self.n_rows]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.n_rows + i]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `Some` when every entry is exactly `±1`.
    pub fn to_packed_if_binary(&self) -> Option<PackedMatrix> {
        if self.data.iter().all(|&v| v == 1.0 || v == -1.0) {
            PackedMatrix::from_fn(self.n_rows, self.n_cols, |i, j| self.get(i, j) > 0.0).ok()
        } else {
            None
        }
    }

    /// Copy restricted to the given rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        Self::from_fn(rows.len(), self.n_cols, |i, j| self.get(rows[i], j))
    }

    pub(crate) fn index_check(&self, j: usize) -> Result<()> {
        if j >= self.n_cols {
            Err(XyzError::IndexOutOfRange {
                index: j,
                len: self.n_cols,
            })
        } else {
            Ok(())
        }
    }
}

/// Finite real vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealVector(Vec<f64>);

impl RealVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(XyzError::Empty("real vector"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(XyzError::NonFinite { row: pos, col: 0 });
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).sum()
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|v| -v).collect())
    }

    pub fn select(&self, rows: &[usize]) -> Self {
        Self(rows.iter().map(|&i| self.0[i]).collect())
    }
}

/// Inverse-CDF sampler over row indices.
#[derive(Clone, Debug)]
pub struct WeightedSampler {
    cumulative: Vec<f64>,
}

impl WeightedSampler {
    /// Nonnegative weights with positive sum; normalized internally.
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(XyzError::Empty("sampler weights"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(XyzError::InvalidParameter(
                "sampler weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(XyzError::ZeroResponse);
        }
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        // Pin the top to exactly 1 so no draw can fall past the table; trailing
        // zero-weight entries keep their (already 1) value.
        let last_positive = weights.iter().rposition(|w| *w > 0.0).expect("positive total");
        for c in &mut cumulative[last_positive..] {
            *c = 1.0;
        }
        Ok(Self { cumulative })
    }

    /// Weights `|y_i| / ||y||_1`.
    pub fn from_response(y: &RealVector) -> Result<Self> {
        let w: Vec<f64> = y.as_slice().iter().map(|v| v.abs()).collect();
        Self::new(&w)
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        // First index whose cumulative weight exceeds u; zero-weight entries
        // share their predecessor's value and are never selected.
        self.cumulative.partition_point(|&c| c <= u)
    }
}

/// Randomized binarization of real entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    /// `sgn(x)`, with a fair coin on exact zeros.
    Sign,
    /// `P(+1) = (x + 1) / 2`, requires `x ∈ [-1, 1]`.
    Unbiased,
}

impl Transform {
    /// `E[x̃]` for a single entry.
    #[inline]
    pub fn expected_value(self, x: f64) -> f64 {
        match self {
            Transform::Sign => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            Transform::Unbiased => x,
        }
    }

    /// One draw; `true` for `+1`.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(self, x: f64, rng: &mut R) -> bool {
        match self {
            Transform::Sign => {
                if x > 0.0 {
                    true
                } else if x < 0.0 {
                    false
                } else {
                    rng.random::<bool>()
                }
            }
            Transform::Unbiased => rng.random::<f64>() < (x + 1.0) * 0.5,
        }
    }

    pub fn check_domain(self, x: &RealMatrix) -> Result<()> {
        if self == Transform::Unbiased {
            for j in 0..x.n_cols() {
                for (i, &v) in x.column(j).iter().enumerate() {
                    if !(-1.0..=1.0).contains(&v) {
                        return Err(XyzError::EntryOutOfRange {
                            row: i,
                            col: j,
                            value: v,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// `Z_ij = Y_i X_ij`, computed as `NOT(x XOR y)` on packed words.
pub fn build_z(x: &PackedMatrix, y: &SignVector) -> Result<PackedMatrix> {
    if y.len() != x.n_rows {
        return Err(XyzError::DimensionMismatch {
            what: "response length",
            expected: x.n_rows,
            got: y.len(),
        });
    }
    let wpc = x.words_per_col;
    let mask = tail_mask(x.n_rows);
    let mut words = Vec::with_capacity(x.words.len());
    for j in 0..x.n_cols {
        for (w, (&a, &b)) in x.column(j).iter().zip(&y.bits).enumerate() {
            let z = !(a ^ b);
            words.push(if w + 1 == wpc { z & mask } else { z });
        }
    }
    Ok(PackedMatrix {
        n_rows: x.n_rows,
        n_cols: x.n_cols,
        words_per_col: wpc,
        words,
    })
}

/// Fraction of rows where `Y_i = X_ij X_ik`, read off as agreement between
/// `Z_j` and `X_k`.
pub fn interaction_strength(x: &PackedMatrix, z: &PackedMatrix, j: usize, k: usize) -> Result<f64> {
    if x.n_rows != z.n_rows || x.n_cols != z.n_cols {
        return Err(XyzError::DimensionMismatch {
            what: "X and Z shapes",
            expected: x.n_rows * x.n_cols,
            got: z.n_rows * z.n_cols,
        });
    }
    x.index_check(j)?;
    x.index_check(k)?;
    Ok(packed_strength(x, z, j, k))
}

#[inline]
pub(crate) fn packed_strength(x: &PackedMatrix, z: &PackedMatrix, j: usize, k: usize) -> f64 {
    let mismatches = z.column_mismatches(j, x, k);
    (x.n_rows - mismatches as usize) as f64 / x.n_rows as f64
}

/// `Σ |Y_i| 1{sgn(Y_i) = X_ij X_ik} / ||Y||_1`.
pub fn weighted_interaction_strength(
    x: &PackedMatrix,
    y: &RealVector,
    j: usize,
    k: usize,
) -> Result<f64> {
    if y.len() != x.n_rows {
        return Err(XyzError::DimensionMismatch {
            what: "response length",
            expected: x.n_rows,
            got: y.len(),
        });
    }
    x.index_check(j)?;
    x.index_check(k)?;
    let total = y.l1_norm();
    if total == 0.0 {
        return Err(XyzError::ZeroResponse);
    }
    let mut agree = 0.0;
    for (i, &yi) in y.as_slice().iter().enumerate() {
        let product_positive = x.bit(i, j) == x.bit(i, k);
        if (yi > 0.0 && product_positive) || (yi < 0.0 && !product_positive) {
            agree += yi.abs();
        }
    }
    Ok(agree / total)
}

/// Precomputed weighted strength for repeated evaluation against a fixed
/// response: `Z = sgn(Y) ∘ X` plus normalized weights.
#[derive(Clone, Debug)]
pub(crate) struct WeightedStrength {
    weights: Vec<f64>,
}

impl WeightedStrength {
    pub(crate) fn new(y: &RealVector) -> Result<Self> {
        let total = y.l1_norm();
        if total == 0.0 {
            return Err(XyzError::ZeroResponse);
        }
        Ok(Self {
            weights: y.as_slice().iter().map(|v| v.abs() / total).collect(),
        })
    }

    /// Weight of rows where `X_j` and `Z_k` agree.
    #[inline]
    pub(crate) fn eval(&self, x: &PackedMatrix, z: &PackedMatrix, j: usize, k: usize) -> f64 {
        let mut acc = 0.0;
        for (w, (a, b)) in x.column(j).iter().zip(z.column(k)).enumerate() {
            let mut agree = !(a ^ b);
            let base = w * WORD_BITS;
            let stop = (x.n_rows - base).min(WORD_BITS);
            if stop < WORD_BITS {
                agree &= (1u64 << stop) - 1;
            }
            while agree != 0 {
                let t = agree.trailing_zeros() as usize;
                acc += self.weights[base + t];
                agree &= agree - 1;
            }
        }
        acc
    }
}

/// Expected match probability under a transform:
/// `1/2 + Σ Y_i E[x̃_ij] E[x̃_ik] / (2 ||Y||_1)` for `j != k`.
pub fn transformed_strength(
    x: &RealMatrix,
    y: &RealVector,
    transform: Transform,
    j: usize,
    k: usize,
) -> Result<f64> {
    if y.len() != x.n_rows {
        return Err(XyzError::DimensionMismatch {
            what: "response length",
            expected: x.n_rows,
            got: y.len(),
        });
    }
    x.index_check(j)?;
    x.index_check(k)?;
    let total = y.l1_norm();
    if total == 0.0 {
        return Err(XyzError::ZeroResponse);
    }
    Ok(transformed_strength_raw(x, y.as_slice(), total, transform, j, k))
}

#[inline]
pub(crate) fn transformed_strength_raw(
    x: &RealMatrix,
    y: &[f64],
    l1: f64,
    transform: Transform,
    j: usize,
    k: usize,
) -> f64 {
    let (cj, ck) = (x.column(j), x.column(k));
    let dot: f64 = match transform {
        Transform::Unbiased => y.iter().zip(cj).zip(ck).map(|((y, a), b)| y * a * b).sum(),
        Transform::Sign => y
            .iter()
            .zip(cj)
            .zip(ck)
            .map(|((y, &a), &b)| y * transform.expected_value(a) * transform.expected_value(b))
            .sum(),
    };
    0.5 + dot / (2.0 * l1)
}

pub fn sign_transform<R: Rng + ?Sized>(x: &RealMatrix, rng: &mut R) -> PackedMatrix {
    PackedMatrix::from_fn(x.n_rows, x.n_cols, |i, j| Transform::Sign.sample(x.get(i, j), rng))
        .expect("shape already validated")
}

pub fn unbiased_transform_sample<R: Rng + ?Sized>(
    x: &RealMatrix,
    rng: &mut R,
) -> Result<PackedMatrix> {
    Transform::Unbiased.check_domain(x)?;
    Ok(PackedMatrix::from_fn(x.n_rows, x.n_cols, |i, j| {
        Transform::Unbiased.sample(x.get(i, j), rng)
    })
    .expect("shape already validated"))
}

/// Divides row `i` by `ν_i = max_j |X_ij|` and multiplies `Y_i` by `ν_i²`.
pub fn rescale_rows(x: &RealMatrix, y: &RealVector) -> Result<(RealMatrix, RealVector)> {
    if y.len() != x.n_rows {
        return Err(XyzError::DimensionMismatch {
            what: "response length",
            expected: x.n_rows,
            got: y.len(),
        });
    }
    let nu = row_max_abs(x);
    if let Some(row) = nu.iter().position(|&v| v == 0.0) {
        return Err(XyzError::ZeroRow { row });
    }
    let scaled = RealMatrix::from_fn(x.n_rows, x.n_cols, |i, j| x.get(i, j) / nu[i])?;
    let y_scaled = y
        .as_slice()
        .iter()
        .zip(&nu)
        .map(|(v, s)| v * s * s)
        .collect();
    Ok((scaled, RealVector(y_scaled)))
}

pub(crate) fn row_max_abs(x: &RealMatrix) -> Vec<f64> {
    let mut nu = vec![0.0f64; x.n_rows];
    for j in 0..x.n_cols {
        for (m, v) in nu.iter_mut().zip(x.column(j)) {
            *m = m.max(v.abs());
        }
    }
    nu
}

pub fn cap_entries(x: &RealMatrix, c: f64) -> Result<RealMatrix> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(XyzError::InvalidParameter(format!(
            "cap must be positive and finite, got {c}"
        )));
    }
    Ok(RealMatrix {
        n_rows: x.n_rows,
        n_cols: x.n_cols,
        data: x.data.iter().map(|v| v.clamp(-c, c)).collect(),
    })
}
