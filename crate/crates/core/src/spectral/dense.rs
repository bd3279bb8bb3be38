//! Full spectra of small operators, for plots and oracle checks.

use faer::{Mat, Side};
use num_complex::Complex64;

use super::operator::LinearOperator;
use crate::error::{Error, Result};

pub const DEFAULT_DENSE_CAP: usize = 5000;

/// Materialises `op` column by column.
pub fn to_dense(op: &dyn LinearOperator) -> Mat<f64> {
    let n = op.dim();
    let mut out = Mat::<f64>::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        e[j] = 0.0;
        for (i, &v) in col.iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    out
}

fn check_cap(dim: usize, cap: usize) -> Result<()> {
    if dim > cap {
        Err(Error::DenseCapExceeded { dim, cap })
    } else {
        Ok(())
    }
}

/// All eigenvalues, by decreasing magnitude (ties: larger real part first).
pub fn dense_spectrum(op: &dyn LinearOperator, cap: usize) -> Result<Vec<Complex64>> {
    check_cap(op.dim(), cap)?;
    if op.dim() == 0 {
        return Ok(Vec::new());
    }
    let mut vals = to_dense(op)
        .eigenvalues()
        .map_err(|e| Error::DenseEigen(format!("{e:?}")))?;
    vals.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.re.total_cmp(&a.re)).then(b.im.total_cmp(&a.im)));
    Ok(vals)
}

/// Eigenvalues of a symmetric operator in decreasing order.
pub fn dense_symmetric_spectrum(op: &dyn LinearOperator, cap: usize) -> Result<Vec<f64>> {
    check_cap(op.dim(), cap)?;
    if op.dim() == 0 {
        return Ok(Vec::new());
    }
    let mut vals = to_dense(op)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::DenseEigen(format!("{e:?}")))?;
    vals.reverse();
    Ok(vals)
}
