//! Dense row-major kernels used by the forward and backward passes.

/// y += W x, W is rows × cols.
#[inline]
pub fn matvec_add(w: &[f64], rows: usize, cols: usize, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(w.len(), rows * cols);
    for (row, yi) in w.chunks_exact(cols).zip(y.iter_mut()) {
        *yi += dot(row, x);
    }
}

/// y += Wᵀ x, W is rows × cols.
#[inline]
pub fn matvec_t_add(w: &[f64], cols: usize, x: &[f64], y: &mut [f64]) {
    for (row, &xi) in w.chunks_exact(cols).zip(x) {
        if xi != 0.0 {
            axpy(xi, row, y);
        }
    }
}

/// G += a bᵀ, G is a.len() × b.len().
#[inline]
pub fn outer_add(g: &mut [f64], a: &[f64], b: &[f64]) {
    for (row, &ai) in g.chunks_exact_mut(b.len()).zip(a) {
        if ai != 0.0 {
            axpy(ai, b, row);
        }
    }
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four accumulators; the summation order is fixed, so results are reproducible.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        let j = i * 4;
        acc[0] += a[j] * b[j];
        acc[1] += a[j + 1] * b[j + 1];
        acc[2] += a[j + 2] * b[j + 2];
        acc[3] += a[j + 3] * b[j + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for j in chunks * 4..a.len() {
        s += a[j] * b[j];
    }
    s
}

pub fn frobenius(w: &[f64]) -> f64 {
    w.iter().map(|x| x * x).sum::<f64>().sqrt()
}
