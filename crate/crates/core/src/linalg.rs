//! Dense complex Hermitian eigensolver: unitary Householder reduction to a
//! real symmetric tridiagonal matrix followed by implicit-shift QL iteration
//! (the classic EISPACK `htridi`/`tql2` pair). Self-contained because the
//! matrices this crate cares about — density operators and their partial
//! transposes — carry large clusters of (near-)zero eigenvalues, which the
//! general-purpose pure-Rust solvers available here do not handle reliably.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Matching eigenvectors as columns; `None` when only values were asked
    /// for.
    pub vectors: Option<DMatrix<Complex64>>,
}

/// Reduces Hermitian `a` to real symmetric tridiagonal form `(d, e)` with
/// `a = q T q^H`; `e[i]` couples `d[i]` and `d[i+1]`.
fn tridiagonalize(
    a: &DMatrix<Complex64>,
    with_vectors: bool,
) -> (Vec<f64>, Vec<f64>, Option<DMatrix<Complex64>>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut q = with_vectors.then(|| DMatrix::<Complex64>::identity(n, n));

    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let norm = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm <= f64::MIN_POSITIVE {
            a[(k + 1, k)] = Complex64::new(0.0, 0.0);
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase =
            if x0.norm() <= f64::MIN_POSITIVE { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;

        // Unit Householder vector v with (I - 2 v v^H) x = alpha e1.
        let mut v: Vec<Complex64> = (0..len).map(|i| a[(k + 1 + i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm <= f64::MIN_POSITIVE {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }

        // Trailing-block update B = A - 2 v w~^H - 2 w~ v^H with
        // w = A v, c = v^H w (real), w~ = w - c v.
        let mut w = vec![Complex64::new(0.0, 0.0); len];
        for (i, wi) in w.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, vj) in v.iter().enumerate() {
                acc += a[(k + 1 + i, k + 1 + j)] * vj;
            }
            *wi = acc;
        }
        let c: f64 = v.iter().zip(&w).map(|(vi, wi)| (vi.conj() * wi).re).sum();
        let wt: Vec<Complex64> = w.iter().zip(&v).map(|(wi, vi)| wi - vi * c).collect();
        for i in 0..len {
            for j in 0..len {
                let delta = v[i] * wt[j].conj() + wt[i] * v[j].conj();
                let entry = a[(k + 1 + i, k + 1 + j)] - delta * 2.0;
                a[(k + 1 + i, k + 1 + j)] = entry;
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
            a[(k, i)] = Complex64::new(0.0, 0.0);
        }

        // Accumulate Q <- Q (I - 2 v v^H) on the trailing columns.
        if let Some(q) = q.as_mut() {
            for r in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for (j, vj) in v.iter().enumerate() {
                    s += q[(r, k + 1 + j)] * vj;
                }
                let s2 = s * 2.0;
                for (j, vj) in v.iter().enumerate() {
                    let entry = q[(r, k + 1 + j)] - s2 * vj.conj();
                    q[(r, k + 1 + j)] = entry;
                }
            }
        }
    }

    // Strip phases off the (complex) off-diagonal so the tridiagonal matrix
    // is real: T_real = Phi^H T Phi with a diagonal unitary Phi.
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    for i in 0..n {
        d[i] = a[(i, i)].re;
    }
    let mut phi = Complex64::new(1.0, 0.0);
    for i in 0..n.saturating_sub(1) {
        let off = a[(i + 1, i)];
        let mag = off.norm();
        e[i] = mag;
        let prev = phi;
        phi = if mag <= f64::MIN_POSITIVE { prev } else { off / mag * prev };
        if let Some(q) = q.as_mut() {
            for r in 0..n {
                let entry = q[(r, i + 1)] * phi;
                q[(r, i + 1)] = entry;
            }
        }
    }
    (d, e, q)
}

/// Implicit-shift QL iteration on a real symmetric tridiagonal matrix, with
/// optional accumulation of the rotations into complex eigenvector columns.
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut DMatrix<Complex64>>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let rows = z.as_ref().map_or(0, |z| z.nrows());
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::domain(
                    "tridiagonal QL iteration failed to converge in 60 sweeps".to_string(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(if g == 0.0 { 1.0 } else { g }));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut underflow = false;
            let mut i = m as isize - 1;
            while i >= l as isize {
                let iu = i as usize;
                let f = s * e[iu];
                let b = c * e[iu];
                r = f.hypot(g);
                e[iu + 1] = r;
                if r == 0.0 {
                    d[iu + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[iu + 1] - p;
                r = (d[iu] - g) * s + 2.0 * c * b;
                p = s * r;
                d[iu + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_mut() {
                    for k in 0..rows {
                        let fz = z[(k, iu + 1)];
                        let zi = z[(k, iu)];
                        z[(k, iu + 1)] = zi * s + fz * c;
                        z[(k, iu)] = zi * c - fz * s;
                    }
                }
                i -= 1;
            }
            if underflow && i >= l as isize {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Full eigendecomposition of a Hermitian matrix (the caller is responsible
/// for symmetrizing). Eigenvalues ascend; `vectors` columns match them.
pub(crate) fn hermitian_eigen(a: &DMatrix<Complex64>, with_vectors: bool) -> Result<HermitianEigen> {
    let n = a.nrows();
    if n == 0 {
        return Ok(HermitianEigen { values: Vec::new(), vectors: None });
    }
    let (mut d, mut e, mut q) = tridiagonalize(a, with_vectors);
    tql2(&mut d, &mut e, q.as_mut())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("QL output is finite"));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors = q.map(|q| {
        let mut sorted = DMatrix::<Complex64>::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            for r in 0..n {
                sorted[(r, dst)] = q[(r, src)];
            }
        }
        sorted
    });
    Ok(HermitianEigen { values, vectors })
}
