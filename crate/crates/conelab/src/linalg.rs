//! Small shared linear-algebra helpers used across modules.

use nalgebra::{DMatrix, DVector};

/// Kernel of a rectangular matrix via SVD.
///
/// Singular values below `rel_tol * sigma_max` are treated as zero. Returns the
/// orthonormal kernel basis (columns) together with the kernel gap, the ratio
/// of the smallest kept singular value to the largest dropped one (`f64::INFINITY`
/// when one side is empty).
pub fn svd_kernel(m: &DMatrix<f64>, rel_tol: f64) -> (Vec<DVector<f64>>, f64) {
    let ncols = m.ncols();
    if m.nrows() == 0 || ncols == 0 {
        return ((0..ncols).map(|i| DVector::from_fn(ncols, |r, _| if r == i { 1.0 } else { 0.0 })).collect(), f64::INFINITY);
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd requested v_t");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let cut = rel_tol * sigma_max.max(f64::MIN_POSITIVE);
    // v_t has min(nrows, ncols) rows; columns of V beyond the rank are implicit.
    let mut kept_min = f64::INFINITY;
    let mut dropped_max = 0.0_f64;
    let mut kernel = Vec::new();
    for (r, &s) in svd.singular_values.iter().enumerate() {
        if s <= cut {
            kernel.push(v_t.row(r).transpose());
            dropped_max = dropped_max.max(s);
        } else {
            kept_min = kept_min.min(s);
        }
    }
    // nalgebra's thin SVD returns v_t with min(nrows, ncols) rows; for wide
    // matrices the remaining null directions come from the orthogonal
    // complement of those rows.
    if v_t.nrows() < ncols {
        let mut basis: Vec<DVector<f64>> = (0..v_t.nrows()).map(|r| v_t.row(r).transpose()).collect();
        for i in 0..ncols {
            let mut v = DVector::zeros(ncols);
            v[i] = 1.0;
            for b in &basis {
                let c = b.dot(&v);
                v -= b * c;
            }
            if v.norm() > 1e-9 {
                v /= v.norm();
                kernel.push(v.clone());
                basis.push(v);
            }
        }
    }
    let gap = if kernel.is_empty() || kept_min == f64::INFINITY || dropped_max == 0.0 {
        f64::INFINITY
    } else {
        kept_min / dropped_max
    };
    (kernel, gap)
}

/// Rank-revealing orthonormalization of a set of vectors (Euclidean inner
/// product): returns an orthonormal basis of their span, dropping directions
/// whose singular value falls below `rel_tol` times the largest.
pub fn orthonormal_span(vectors: &[DVector<f64>], rel_tol: f64) -> Vec<DVector<f64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let n = vectors[0].len();
    let m = DMatrix::from_fn(n, vectors.len(), |r, c| vectors[c][r]);
    let svd = m.svd(true, false);
    let u = svd.u.expect("svd requested u");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let mut basis = Vec::new();
    for (r, &s) in svd.singular_values.iter().enumerate() {
        if s > rel_tol * sigma_max && s > 0.0 {
            basis.push(u.column(r).into_owned());
        }
    }
    basis
}

/// Symmetric positive-definite square root and inverse square root.
pub fn spd_sqrt_pair(g: &DMatrix<f64>) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let eig = g.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    if eig.eigenvalues.iter().any(|&l| l <= 1e-12 * max) {
        return None;
    }
    let q = &eig.eigenvectors;
    let sqrt = q * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * q.transpose();
    let inv_sqrt = q * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt())) * q.transpose();
    Some((sqrt, inv_sqrt))
}

/// FNV-1a hash of the little-endian bytes of a float slice. Used to bind
/// serialized coefficient blocks to the basis that produced them.
pub fn fnv1a_f64(data: impl IntoIterator<Item = f64>) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for x in data {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}
