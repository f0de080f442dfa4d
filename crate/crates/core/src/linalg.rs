//! Small dense complex factorizations that report results in log scale.

use num_complex::Complex64;

/// `ln |R_jj|` for the thin QR factorization of `cols` (column-major),
/// computed by Gram-Schmidt with one reorthogonalization pass.
///
/// The Gram determinant of the leading `k+1` columns is
/// `Π_{j≤k} |R_jj|^2`. Once a column is numerically dependent the remaining
/// entries are `-inf`.
pub(crate) fn qr_log_diagonal(cols: &[Vec<Complex64>]) -> Vec<f64> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(cols.len());
    let mut out = Vec::with_capacity(cols.len());
    for col in cols {
        if out.last() == Some(&f64::NEG_INFINITY) {
            out.push(f64::NEG_INFINITY);
            continue;
        }
        let mut v = col.clone();
        for _ in 0..2 {
            for q in &basis {
                let r: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= r * qi;
                }
            }
        }
        let norm = norm2(&v);
        if norm == 0.0 || !norm.is_finite() {
            out.push(f64::NEG_INFINITY);
            continue;
        }
        out.push(norm.ln());
        basis.push(v.into_iter().map(|x| x / norm).collect());
    }
    out
}

/// Changes `ln det G'_k - ln det G_k`, `k = 0..=n`, of the leading Gram
/// determinants when the columns `cols` move to `cols + delta`.
///
/// With `C = QR` and `X = delta R^{-1}` the new Gram matrix is
/// `R* (I + S) R` where `S = A + A* + X*X`, `A = Q*X`. The leading minors of
/// `I + S` come from a Cholesky factorization whose pivots are formed as
/// `1 + t`, so `ln(1 + t)` keeps its relative accuracy for small `t`.
/// `None` when the columns are dependent or the new minors vanish.
pub(crate) fn log_gram_increments(
    cols: &[Vec<Complex64>],
    delta: &[Vec<Complex64>],
) -> Option<Vec<f64>> {
    let m = cols.len();
    // modified Gram-Schmidt with one reorthogonalization pass, keeping R
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut r = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for (j, col) in cols.iter().enumerate() {
        let mut v = col.clone();
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let c: Complex64 = qi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                r[i][j] += c;
                for (vk, qk) in v.iter_mut().zip(qi) {
                    *vk -= c * qk;
                }
            }
        }
        let norm = norm2(&v);
        if !(norm > 0.0 && norm.is_finite()) {
            return None;
        }
        r[j][j] = Complex64::new(norm, 0.0);
        q.push(v.into_iter().map(|x| x / norm).collect());
    }
    // X R = delta, column by column
    let mut x: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    for j in 0..m {
        let mut col = delta[j].clone();
        for (i, xi) in x.iter().enumerate() {
            for (ck, xk) in col.iter_mut().zip(xi) {
                *ck -= r[i][j] * xk;
            }
        }
        let d = r[j][j];
        x.push(col.into_iter().map(|c| c / d).collect());
    }
    let inner = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(s, t)| s.conj() * t).sum()
    };
    // a[i][j] = <q_i, x_j>
    let a: Vec<Vec<Complex64>> = q
        .iter()
        .map(|qi| x.iter().map(|xj| inner(qi, xj)).collect())
        .collect();
    let s: Vec<Vec<Complex64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| a[i][j] + a[j][i].conj() + inner(&x[i], &x[j]))
                .collect()
        })
        .collect();
    // Cholesky of I + S, pivots kept as 1 + t
    let mut l = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    let mut out = Vec::with_capacity(m);
    let mut acc = 0.0;
    for j in 0..m {
        let t = s[j][j].re - (0..j).map(|p| l[j][p].norm_sqr()).sum::<f64>();
        if !(t > -1.0) {
            return None;
        }
        let pivot = (1.0 + t).sqrt();
        l[j][j] = Complex64::new(pivot, 0.0);
        for i in j + 1..m {
            let overlap: Complex64 = l[i][..j]
                .iter()
                .zip(&l[j][..j])
                .map(|(a, b)| a * b.conj())
                .sum();
            l[i][j] = (s[i][j] - overlap) / pivot;
        }
        acc += t.ln_1p();
        out.push(acc);
    }
    Some(out)
}

fn norm2(v: &[Complex64]) -> f64 {
    let big = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if big == 0.0 || !big.is_finite() {
        return big;
    }
    big * v.iter().map(|x| (x / big).norm_sqr()).sum::<f64>().sqrt()
}

/// `(ln |det A|, arg det A)` by LU with partial pivoting; `A` is row-major.
/// A singular matrix gives `(-inf, 0)`.
pub(crate) fn log_det(mut a: Vec<Vec<Complex64>>) -> (f64, f64) {
    let n = a.len();
    let mut log_mag = 0.0;
    let mut phase = 0.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[pivot][col].norm() == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            phase += std::f64::consts::PI;
        }
        let p = a[col][col];
        log_mag += p.norm().ln();
        phase += p.arg();
        for row in col + 1..n {
            let factor = a[row][col] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            let (upper, lower) = a.split_at_mut(row);
            for (target, &pivot_entry) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *target -= factor * pivot_entry;
            }
        }
    }
    (log_mag, wrap_phase(phase))
}

/// Angle reduced to `(-π, π]`.
pub fn wrap_phase(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    t
}
