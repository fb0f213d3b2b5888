//! Independent oracles built from plain vectors and Gram–Schmidt, so they
//! share no code path with the library's SVD-based formulas.

#![allow(dead_code)]

use sparse_ginv::DenseMatrix;

pub fn unit(n: usize, m: usize, a: usize, b: usize) -> DenseMatrix {
    let mut e = DenseMatrix::zeros(n, m);
    e[(a, b)] = 1.0;
    e
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Orthonormal basis of the span of `vectors`, Gram–Schmidt with one
/// reorthogonalization pass.
pub fn orthonormal_basis(vectors: &[Vec<f64>], rel_tol: f64) -> Vec<Vec<f64>> {
    let scale = vectors.iter().map(|v| dot(v, v).sqrt()).fold(0.0, f64::max);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = dot(&w, &w).sqrt();
        if norm > rel_tol * scale.max(1e-300) {
            basis.push(w.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

pub fn rank_of(vectors: &[Vec<f64>], rel_tol: f64) -> usize {
    orthonormal_basis(vectors, rel_tol).len()
}

/// `target` minus its orthogonal projection onto the span of `vectors`.
pub fn residual_off_span(vectors: &[Vec<f64>], target: &[f64]) -> Vec<f64> {
    let basis = orthonormal_basis(vectors, 1e-10);
    let mut r = target.to_vec();
    for _ in 0..2 {
        for q in &basis {
            let c = dot(&r, q);
            r.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
    }
    r
}

/// Row vectors (in column-major `vec(H)` coordinates) of the linear map `f`
/// on `n × m` matrices.
pub fn operator_rows(f: &dyn Fn(&DenseMatrix) -> DenseMatrix, n: usize, m: usize) -> Vec<Vec<f64>> {
    let images: Vec<Vec<f64>> = (0..m)
        .flat_map(|b| (0..n).map(move |a| (a, b)))
        .map(|(a, b)| f(&unit(n, m, a, b)).vec_col_major())
        .collect();
    let outputs = images[0].len();
    (0..outputs).map(|k| images.iter().map(|col| col[k]).collect()).collect()
}

/// Euclidean projection of `v` onto `{H : f(H) = f(h0)}` for every map `f`.
pub fn affine_projection(
    maps: &[&dyn Fn(&DenseMatrix) -> DenseMatrix],
    h0: &DenseMatrix,
    v: &DenseMatrix,
) -> DenseMatrix {
    let (n, m) = v.shape();
    let rows: Vec<Vec<f64>> = maps.iter().flat_map(|f| operator_rows(*f, n, m)).collect();
    let basis = orthonormal_basis(&rows, 1e-10);
    let mut d: Vec<f64> = (v - h0).vec_col_major();
    for q in &basis {
        let c = dot(&d, q);
        d.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
    }
    let h = h0.vec_col_major().iter().zip(&d).map(|(a, b)| a + b).collect::<Vec<_>>();
    DenseMatrix::from_vec_col_major(n, m, &h).unwrap()
}

/// Small deterministic pseudo-random matrix with entries in `[-1, 1]`.
pub fn lcg_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    DenseMatrix::from_fn(rows, cols, |_, _| {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    })
}
