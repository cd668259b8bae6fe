//! Floating-point spectral helpers on `nalgebra` complex matrices.

use nalgebra::DMatrix;

use crate::scalar::C64;

pub type CMat = DMatrix<C64>;

/// Eigenvalues in ascending order with matching eigenvector columns.
/// `m` is assumed Hermitian; only its lower triangle is read.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

pub fn trace_norm(m: &CMat) -> f64 {
    singular_values(m).into_iter().sum()
}

/// Groups indices of ascending `values` into runs whose consecutive gaps
/// are at most `tol`.
pub fn cluster(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(run) if (v - values[*run.last().expect("nonempty")]).abs() <= tol => run.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

/// Columns spanning the eigenspace of eigenvalues at most `tol` of a
/// positive semidefinite Hermitian matrix.
pub fn psd_kernel(m: &CMat, tol: f64) -> CMat {
    let (values, vectors) = hermitian_eigen(m);
    let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] <= tol).collect();
    CMat::from_fn(m.nrows(), keep.len(), |i, j| vectors[(i, keep[j])])
}

/// Numerical rank from singular values relative to the largest.
pub fn numerical_rank(m: &CMat, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Dimension of the span of `vectors`, by SVD.
pub fn column_span_dim(vectors: &[Vec<C64>], rel_tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let n = vectors[0].len();
    let m = CMat::from_fn(n, vectors.len(), |i, j| vectors[j][i]);
    numerical_rank(&m, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_norms() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        );
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let v = vecs.column(0).into_owned();
        assert!(((&m * &v) - v * C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-12);
        assert!((trace_norm(&m) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn clustering() {
        assert_eq!(cluster(&[0.0, 1e-9, 1.0, 2.0, 2.0], 1e-7), vec![vec![0, 1], vec![2], vec![3, 4]]);
    }
}
