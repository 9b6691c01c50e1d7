//! Dense complex SVD utilities: equilibration, sorted spectra and numerical
//! nullspaces.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const SVD_EPS: f64 = 1e-15;
const SVD_MAX_ITERATIONS: usize = 10_000;

/// Singular values in descending order with matching right singular vectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Singular values, descending; padded with zeros up to the column count.
    pub values: Vec<f64>,
    /// Column `j` is the right singular vector of `values[j]`.
    pub right: DMatrix<Complex64>,
}

impl Spectrum {
    /// Largest singular value (zero for an empty matrix).
    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `tol · σ_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let cutoff = tol * self.max();
        self.values
            .iter()
            .filter(|&&s| s > cutoff && s > 0.0)
            .count()
    }

    /// Right singular vectors spanning the numerical nullspace at `tol`.
    pub fn nullspace(&self, tol: f64) -> DMatrix<Complex64> {
        let rank = self.rank(tol);
        self.right
            .columns(rank, self.right.ncols() - rank)
            .into_owned()
    }
}

/// Full SVD with every right singular vector, sorted by descending value.
///
/// Wide matrices are padded with zero rows so the full right basis is returned.
///
/// # Errors
/// [`Error::Numeric`] if the iteration does not converge or the input is not finite.
pub fn spectrum(a: &DMatrix<Complex64>) -> Result<Spectrum> {
    let n = a.ncols();
    if n == 0 {
        return Ok(Spectrum {
            values: Vec::new(),
            right: DMatrix::zeros(0, 0),
        });
    }
    if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    let padded = if a.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.rows_mut(0, a.nrows()).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded
        .try_svd(false, true, SVD_EPS, SVD_MAX_ITERATIONS)
        .ok_or_else(|| Error::Numeric("SVD did not converge".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numeric("SVD returned no right vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let mut right = DMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        values.push(svd.singular_values[k]);
        for row in 0..n {
            right[(row, col)] = v_t[(k, row)].conj();
        }
    }
    Ok(Spectrum { values, right })
}

/// Descending singular values.
///
/// # Errors
/// As [`spectrum`].
pub fn singular_values(a: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return Ok(vec![0.0; a.ncols()]);
    }
    if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    let mut values: Vec<f64> = a
        .clone()
        .try_svd(false, false, SVD_EPS, SVD_MAX_ITERATIONS)
        .ok_or_else(|| Error::Numeric("SVD did not converge".into()))?
        .singular_values
        .iter()
        .copied()
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values.resize(a.ncols().max(values.len()), 0.0);
    Ok(values)
}

/// Drops zero rows, scales rows to unit norm, then columns to unit norm
/// (zero columns are left unscaled). Returns the matrix and the column norms
/// divided out.
pub fn equilibrate(a: &DMatrix<Complex64>) -> (DMatrix<Complex64>, Vec<f64>) {
    let kept: Vec<usize> = (0..a.nrows()).filter(|&i| a.row(i).norm() > 0.0).collect();
    let mut out = DMatrix::zeros(kept.len(), a.ncols());
    for (target, &i) in kept.iter().enumerate() {
        let row = a.row(i);
        let norm = row.norm();
        out.row_mut(target).copy_from(&row.unscale(norm));
    }
    let scales = column_scales(&out);
    scale_columns(&mut out, &scales);
    (out, scales)
}

/// Euclidean column norms, with zero norms replaced by one.
pub fn column_scales(a: &DMatrix<Complex64>) -> Vec<f64> {
    (0..a.ncols())
        .map(|j| {
            let n = a.column(j).norm();
            if n > 0.0 { n } else { 1.0 }
        })
        .collect()
}

/// Divides each column by its scale.
pub fn scale_columns(a: &mut DMatrix<Complex64>, scales: &[f64]) {
    for (j, &s) in scales.iter().enumerate() {
        a.column_mut(j).unscale_mut(s);
    }
}
