//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Left singular vectors (as columns of a `rows x rows` matrix) and singular
/// values of `a`, sorted in non-increasing order. Ties keep the order of the
/// decomposition output.
///
/// Wide or tall matrices are handled by zero-padding to at least `rows`
/// columns, which leaves the left singular structure unchanged and makes the
/// returned basis a complete unitary matrix.
pub fn left_svd(a: &CMatrix) -> (CMatrix, Vec<f64>) {
    let rows = a.nrows();
    let padded;
    let m = if a.ncols() < rows {
        padded = a.clone().resize_horizontally(rows, Complex64::default());
        &padded
    } else {
        a
    };
    let svd = m.clone().svd_unordered(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sv = svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));

    let mut basis = CMatrix::zeros(rows, rows);
    for (dst, &src) in order.iter().enumerate() {
        basis.set_column(dst, &u.column(src));
    }
    let values = order.iter().map(|&i| sv[i]).collect();
    (basis, values)
}

/// Singular values in non-increasing order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = a.singular_values_unordered().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn frobenius_sq(a: &CMatrix) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum()
}
