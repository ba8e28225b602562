use crate::error::{Result, XyzError};
use crate::matrix::{RealMatrix, RealVector};

/// `X_j ∘ X_k` minus its mean.
pub fn interaction_column(x: &RealMatrix, j: usize, k: usize) -> Result<Vec<f64>> {
    x.index_check(j)?;
    x.index_check(k)?;
    if j > k {
        return Err(XyzError::InvalidParameter(format!(
            "interaction indices must satisfy j <= k, got ({j}, {k})"
        )));
    }
    Ok(centered_product(x.column(j), x.column(k)).0)
}

pub(crate) fn centered_product(a: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let mut w: Vec<f64> = a.iter().zip(b).map(|(u, v)| u * v).collect();
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    for v in &mut w {
        *v -= mean;
    }
    (w, mean)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// Column-centred design with on-demand centred interaction columns, plus a
/// row-rescaled copy in `[-1, 1]` used to screen interactions.
#[derive(Clone, Debug)]
pub struct CenteredDesign {
    x: RealMatrix,
    means: Vec<f64>,
    binary: bool,
    /// Rows with a nonzero entry, divided by their largest absolute entry.
    scaled: RealMatrix,
    kept_rows: Vec<usize>,
    /// `ν_i²` for each kept row.
    row_scale_sq: Vec<f64>,
    diagonal_usable: Vec<bool>,
}

impl CenteredDesign {
    pub fn new(x: &RealMatrix) -> Result<Self> {
        let (n, p) = (x.n_rows(), x.n_cols());
        let binary = x.as_slice().iter().all(|&v| v == 1.0 || v == -1.0);
        let mut data = Vec::with_capacity(n * p);
        let mut means = Vec::with_capacity(p);
        for j in 0..p {
            let col = x.column(j);
            let m = col.iter().sum::<f64>() / n as f64;
            means.push(m);
            data.extend(col.iter().map(|v| v - m));
        }
        let x = RealMatrix::from_col_major(n, p, data)?;

        let nu: Vec<f64> = (0..n)
            .map(|i| (0..p).map(|j| x.get(i, j).abs()).fold(0.0, f64::max))
            .collect();
        let kept_rows: Vec<usize> = (0..n).filter(|&i| nu[i] > 0.0).collect();
        let row_scale_sq = kept_rows.iter().map(|&i| nu[i] * nu[i]).collect();
        let scaled = RealMatrix::from_fn(kept_rows.len().max(1), p, |r, j| {
            kept_rows.get(r).map_or(0.0, |&i| (x.get(i, j) / nu[i]).clamp(-1.0, 1.0))
        })?;

        let diagonal_usable = (0..p)
            .map(|j| {
                let (w, _) = centered_product(x.column(j), x.column(j));
                dot(&w, &w) / n as f64 > 1e-20
            })
            .collect();
        Ok(Self {
            x,
            means,
            binary,
            scaled,
            kept_rows,
            row_scale_sq,
            diagonal_usable,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.x.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.x.n_cols()
    }

    /// Whether every raw entry was `±1`.
    pub fn is_binary(&self) -> bool {
        self.binary
    }

    pub fn centered(&self) -> &RealMatrix {
        &self.x
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn main_column(&self, j: usize) -> &[f64] {
        self.x.column(j)
    }

    /// Centred `X̃_j ∘ X̃_k` and the mean that was removed.
    pub fn pair_column(&self, j: usize, k: usize) -> (Vec<f64>, f64) {
        centered_product(self.x.column(j), self.x.column(k))
    }

    /// `X̃_j ∘ X̃_j` is not identically zero after centring. Squares of
    /// balanced `±1` columns are constant and drop out.
    pub fn diagonal_usable(&self, j: usize) -> bool {
        self.diagonal_usable[j]
    }

    pub(crate) fn scaled(&self) -> &RealMatrix {
        &self.scaled
    }

    /// `r_i ν_i²` on the kept rows, so that the scaled design reproduces
    /// `r^T (X̃_j ∘ X̃_k)`.
    pub(crate) fn scaled_residual(&self, r: &[f64]) -> Result<RealVector> {
        RealVector::new(
            self.kept_rows
                .iter()
                .zip(&self.row_scale_sq)
                .map(|(&i, s)| r[i] * s)
                .collect(),
        )
    }

    pub(crate) fn has_kept_rows(&self) -> bool {
        !self.kept_rows.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interaction_column_examples() {
        let x = RealMatrix::from_columns(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(interaction_column(&x, 0, 1).unwrap(), vec![-2.5, 2.5]);
        let b = RealMatrix::from_columns(&[vec![1.0, -1.0, -1.0, 1.0, 1.0]]).unwrap();
        assert!(interaction_column(&b, 0, 0).unwrap().iter().all(|&v| v == 0.0));
        assert!(interaction_column(&x, 1, 0).is_err());
        assert!(interaction_column(&x, 0, 2).is_err());
    }

    #[test]
    fn served_columns_are_centered() {
        let x = RealMatrix::from_fn(37, 5, |i, j| ((i * 7 + j * 13) % 11) as f64 - 3.7).unwrap();
        let d = CenteredDesign::new(&x).unwrap();
        for j in 0..5 {
            assert!(d.main_column(j).iter().sum::<f64>().abs() < 1e-10);
            for k in j..5 {
                assert!(d.pair_column(j, k).0.iter().sum::<f64>().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn scaled_design_reproduces_products() {
        let x = RealMatrix::from_fn(20, 4, |i, j| ((i * 3 + j * 5) % 7) as f64 * 0.9 - 2.0).unwrap();
        let d = CenteredDesign::new(&x).unwrap();
        let r: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).sin()).collect();
        let rs = d.scaled_residual(&r).unwrap();
        assert!(d.scaled().max_abs() <= 1.0);
        for j in 0..4 {
            for k in j + 1..4 {
                let exact: f64 = (0..20).map(|i| r[i] * d.centered().get(i, j) * d.centered().get(i, k)).sum();
                let via: f64 = (0..d.scaled().n_rows())
                    .map(|t| rs.as_slice()[t] * d.scaled().get(t, j) * d.scaled().get(t, k))
                    .sum();
                assert!((exact - via).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn binary_detection_and_diagonal() {
        let x = RealMatrix::from_columns(&[vec![1.0, -1.0, 1.0, -1.0], vec![1.0, 1.0, 1.0, -1.0]]).unwrap();
        let d = CenteredDesign::new(&x).unwrap();
        assert!(d.is_binary());
        assert!(!d.diagonal_usable(0));
        assert!(d.diagonal_usable(1));
    }
}
