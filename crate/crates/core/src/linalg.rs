//! Dense linear algebra sized for desk-scale matrices (n ≤ 64).
//!
//! General real eigenvalues go through the characteristic polynomial with
//! Durand-Kerner root finding for n ≤ 8 and a shifted Hessenberg QR iteration
//! above that. Symmetric eigendecompositions use Householder
//! tridiagonalization followed by implicit-shift QL; the LMI solver calls
//! this in its inner loop, so it avoids per-call allocations where practical.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use thiserror::Error;

/// Cutoff below which eigenvalue imaginary parts are snapped to zero.
pub const IMAG_SNAP: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("eigenvalue iteration failed to converge for {n}x{n} matrix")]
    ConvergenceFailure { n: usize },
}

/// All eigenvalues of a general real square matrix.
///
/// Imaginary parts below [`IMAG_SNAP`] are snapped to exact reals and the
/// result is sorted by (re, im) so callers see a deterministic order.
pub fn spectrum(m: &Array2<f64>) -> Result<Vec<Complex64>, LinalgError> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(LinalgError::NotSquare { rows, cols });
    }
    let n = rows;
    let mut eigs = if n == 0 {
        Vec::new()
    } else if n == 1 {
        vec![Complex64::new(m[[0, 0]], 0.0)]
    } else if is_symmetric(m) {
        // symmetric input: the QL path is exact on repeated eigenvalues where
        // polynomial root finding loses half the digits
        sym_eigvals(m).iter().map(|&v| Complex64::new(v, 0.0)).collect()
    } else if n <= 8 {
        let coeffs = char_poly(m);
        durand_kerner(&coeffs).ok_or(LinalgError::ConvergenceFailure { n })?
    } else {
        hessenberg_qr_eigenvalues(m).ok_or(LinalgError::ConvergenceFailure { n })?
    };
    snap_and_pair(&mut eigs);
    eigs.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(eigs)
}

fn is_symmetric(m: &Array2<f64>) -> bool {
    let n = m.nrows();
    let scale = m.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[[i, j]] - m[[j, i]]).abs() > 1e-12 * scale {
                return false;
            }
        }
    }
    true
}

/// Monic characteristic polynomial coefficients via Faddeev-LeVerrier.
///
/// Returns `c` with `p(λ) = λ^n + c[0] λ^(n-1) + ... + c[n-1]`.
pub fn char_poly(m: &Array2<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut coeffs = Vec::with_capacity(n);
    let mut mk = m.clone();
    for k in 1..=n {
        let ck = -mk.diag().sum() / k as f64;
        coeffs.push(ck);
        if k < n {
            for i in 0..n {
                mk[[i, i]] += ck;
            }
            mk = m.dot(&mk);
        }
    }
    coeffs
}

fn eval_monic(coeffs: &[f64], z: Complex64) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    for &c in coeffs {
        p = p * z + c;
    }
    p
}

/// Simultaneous Durand-Kerner iteration on a monic polynomial.
fn durand_kerner(coeffs: &[f64]) -> Option<Vec<Complex64>> {
    let n = coeffs.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let radius = 1.0 + coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.3;
            radius * Complex64::new(angle.cos(), angle.sin()) * seed / seed.norm()
        })
        .collect();
    for _ in 0..1000 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                // collided starting points; nudge and continue
                z[i] += Complex64::new(1e-6, 1e-6);
                max_step = f64::INFINITY;
                continue;
            }
            let step = eval_monic(coeffs, z[i]) / denom;
            z[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 * (1.0 + radius) {
            break;
        }
    }
    let tol = 1e-7 * (1.0 + radius.powi(n as i32));
    if z.iter().any(|&zi| eval_monic(coeffs, zi).norm() > tol) {
        return None;
    }
    Some(z)
}

/// Snap near-real eigenvalues to the real axis and symmetrize conjugate pairs.
fn snap_and_pair(eigs: &mut [Complex64]) {
    for e in eigs.iter_mut() {
        if e.im.abs() < IMAG_SNAP {
            e.im = 0.0;
        }
    }
    let n = eigs.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] || eigs[i].im <= 0.0 {
            continue;
        }
        // best conjugate partner
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if i == j || used[j] || eigs[j].im >= 0.0 {
                continue;
            }
            let d = (eigs[i] - eigs[j].conj()).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        if let Some((j, d)) = best {
            if d < 1e-6 * (1.0 + eigs[i].norm()) {
                let re = 0.5 * (eigs[i].re + eigs[j].re);
                let im = 0.5 * (eigs[i].im - eigs[j].im);
                eigs[i] = Complex64::new(re, im);
                eigs[j] = Complex64::new(re, -im);
                used[i] = true;
                used[j] = true;
            }
        }
    }
}

/// Eigenvalues of a general real matrix by balancing, Householder reduction
/// to upper Hessenberg form and the shifted QR iteration (values only).
fn hessenberg_qr_eigenvalues(m: &Array2<f64>) -> Option<Vec<Complex64>> {
    let n = m.nrows();
    let mut a = m.clone();
    balance(&mut a);
    hessenberg(&mut a);
    hqr(&mut a, n)
}

/// In-place norm balancing (diagonal similarity with powers of 2).
fn balance(a: &mut Array2<f64>) {
    let n = a.nrows();
    let radix: f64 = 2.0;
    let sqrdx = radix * radix;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[[j, i]].abs();
                    r += a[[i, j]].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / radix;
                let mut f = 1.0;
                let s = c + r;
                let mut c2 = c;
                while c2 < g {
                    f *= radix;
                    c2 *= sqrdx;
                }
                g = r * radix;
                while c2 > g {
                    f /= radix;
                    c2 /= sqrdx;
                }
                if (c2 + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[[i, j]] *= g;
                    }
                    for j in 0..n {
                        a[[j, i]] *= f;
                    }
                }
            }
        }
        if done {
            break;
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut Array2<f64>) {
    let n = a.nrows();
    for k in 1..n.saturating_sub(1) {
        // eliminate column k-1 below row k
        let mut scale = 0.0;
        for i in k..n {
            scale += a[[i, k - 1]].abs();
        }
        if scale == 0.0 {
            continue;
        }
        let mut h = 0.0;
        let mut v = vec![0.0; n];
        for i in k..n {
            v[i] = a[[i, k - 1]] / scale;
            h += v[i] * v[i];
        }
        let mut g = h.sqrt();
        if v[k] >= 0.0 {
            g = -g;
        }
        h -= v[k] * g;
        v[k] -= g;
        // apply P = I - v v^T / h from both sides
        for j in 0..n {
            let mut f = 0.0;
            for i in k..n {
                f += v[i] * a[[i, j]];
            }
            f /= h;
            for i in k..n {
                a[[i, j]] -= f * v[i];
            }
        }
        for i in 0..n {
            let mut f = 0.0;
            for j in k..n {
                f += v[j] * a[[i, j]];
            }
            f /= h;
            for j in k..n {
                a[[i, j]] -= f * v[j];
            }
        }
        a[[k, k - 1]] = scale * g;
        for i in (k + 1)..n {
            a[[i, k - 1]] = 0.0;
        }
    }
}

/// Shifted QR iteration on an upper Hessenberg matrix (Francis double step),
/// returning eigenvalues only.
fn hqr(a: &mut Array2<f64>, n: usize) -> Option<Vec<Complex64>> {
    let mut eigs = Vec::with_capacity(n);
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[[i, j]].abs();
        }
    }
    if anorm == 0.0 {
        return Some(vec![Complex64::new(0.0, 0.0); n]);
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            // look for a small subdiagonal element
            let mut l = nn;
            while l >= 1 {
                let s = a[[(l - 1) as usize, (l - 1) as usize]].abs()
                    + a[[l as usize, l as usize]].abs();
                let s = if s == 0.0 { anorm } else { s };
                if a[[l as usize, (l - 1) as usize]].abs() <= f64::EPSILON * s {
                    a[[l as usize, (l - 1) as usize]] = 0.0;
                    break;
                }
                l -= 1;
            }
            let x = a[[nn as usize, nn as usize]];
            if l == nn {
                eigs.push(Complex64::new(x + t, 0.0));
                nn -= 1;
                break;
            }
            let y = a[[(nn - 1) as usize, (nn - 1) as usize]];
            let w = a[[nn as usize, (nn - 1) as usize]] * a[[(nn - 1) as usize, nn as usize]];
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let x2 = x + t;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    eigs.push(Complex64::new(x2 + z, 0.0));
                    if z != 0.0 {
                        eigs.push(Complex64::new(x2 - w / z, 0.0));
                    } else {
                        eigs.push(Complex64::new(x2, 0.0));
                    }
                } else {
                    eigs.push(Complex64::new(x2 + p, z));
                    eigs.push(Complex64::new(x2 + p, -z));
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return None;
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for i in 0..=nn as usize {
                    a[[i, i]] -= x;
                }
                let s = a[[nn as usize, (nn - 1) as usize]].abs()
                    + a[[(nn - 1) as usize, (nn - 2) as usize]].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            // form shift and look for two consecutive small subdiagonals
            let mut m = nn - 2;
            let (mut p, mut q, mut r) = (0.0, 0.0, 0.0);
            while m >= l {
                let z = a[[m as usize, m as usize]];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[[(m + 1) as usize, m as usize]] + a[[m as usize, (m + 1) as usize]];
                q = a[[(m + 1) as usize, (m + 1) as usize]] - z - rr - ss;
                r = a[[(m + 2) as usize, (m + 1) as usize]];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[[m as usize, (m - 1) as usize]].abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (a[[(m - 1) as usize, (m - 1) as usize]].abs()
                        + a[[m as usize, m as usize]].abs()
                        + a[[(m + 1) as usize, (m + 1) as usize]].abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a[[i as usize, (i - 2) as usize]] = 0.0;
                if i > m + 2 {
                    a[[i as usize, (i - 3) as usize]] = 0.0;
                }
            }
            // double QR step on rows l..=nn
            for k in m..=(nn - 1) {
                if k != m {
                    p = a[[k as usize, (k - 1) as usize]];
                    q = a[[(k + 1) as usize, (k - 1) as usize]];
                    r = if k != nn - 1 {
                        a[[(k + 2) as usize, (k - 1) as usize]]
                    } else {
                        0.0
                    };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[[k as usize, (k - 1) as usize]] = -a[[k as usize, (k - 1) as usize]];
                    }
                } else {
                    a[[k as usize, (k - 1) as usize]] = -s * x;
                }
                p += s;
                let px = p / s;
                let qy = q / s;
                let rz = r / s;
                q /= p;
                r /= p;
                for j in (k as usize)..=(nn as usize) {
                    let mut pp = a[[k as usize, j]] + q * a[[(k + 1) as usize, j]];
                    if k != nn - 1 {
                        pp += r * a[[(k + 2) as usize, j]];
                        a[[(k + 2) as usize, j]] -= pp * rz;
                    }
                    a[[(k + 1) as usize, j]] -= pp * qy;
                    a[[k as usize, j]] -= pp * px;
                }
                let mmin = if nn < k + 3 { nn } else { k + 3 };
                for i in (l as usize)..=(mmin as usize) {
                    let mut pp = px * a[[i, k as usize]] + qy * a[[i, (k + 1) as usize]];
                    if k != nn - 1 {
                        pp += rz * a[[i, (k + 2) as usize]];
                        a[[i, (k + 2) as usize]] -= pp * r;
                    }
                    a[[i, (k + 1) as usize]] -= pp * q;
                    a[[i, k as usize]] -= pp;
                }
            }
        }
    }
    Some(eigs)
}

/// Eigendecomposition of a real symmetric matrix.
///
/// Returns eigenvalues in ascending order and the orthonormal eigenvectors as
/// matching columns. Only the lower triangle of the input is referenced.
pub fn sym_eig(m: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = m.nrows();
    let mut v = m.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    ql_implicit(&mut v, &mut d, &mut e);
    // sort ascending, carrying vectors
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let vals = Array1::from_iter(order.iter().map(|&i| d[i]));
    let mut vecs = Array2::zeros((n, n));
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vecs[[r, new]] = v[[r, old]];
        }
    }
    (vals, vecs)
}

/// Eigenvalues only of a real symmetric matrix, ascending.
pub fn sym_eigvals(m: &Array2<f64>) -> Array1<f64> {
    sym_eig(m).0
}

/// Householder reduction of a symmetric matrix to tridiagonal form,
/// accumulating the transformation in place (tred2).
fn tridiagonalize(v: &mut Array2<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = v.nrows();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += v[[i, k]].abs();
            }
            if scale == 0.0 {
                e[i] = v[[i, l]];
            } else {
                for k in 0..=l {
                    v[[i, k]] /= scale;
                    h += v[[i, k]] * v[[i, k]];
                }
                let f = v[[i, l]];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                v[[i, l]] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    v[[j, i]] = v[[i, j]] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += v[[j, k]] * v[[i, k]];
                    }
                    for k in (j + 1)..=l {
                        g += v[[k, j]] * v[[i, k]];
                    }
                    e[j] = g / h;
                    f_acc += e[j] * v[[i, j]];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = v[[i, j]];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let upd = f * e[k] + g * v[[i, k]];
                        v[[j, k]] -= upd;
                    }
                }
            }
        } else {
            e[i] = v[[i, l]];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += v[[i, k]] * v[[k, j]];
                }
                for k in 0..i {
                    let upd = g * v[[k, i]];
                    v[[k, j]] -= upd;
                }
            }
        }
        d[i] = v[[i, i]];
        v[[i, i]] = 1.0;
        for j in 0..i {
            v[[j, i]] = 0.0;
            v[[i, j]] = 0.0;
        }
    }
}

/// Implicit-shift QL iteration on a tridiagonal matrix with accumulated
/// transformations (tql2).
fn ql_implicit(v: &mut Array2<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    if n <= 1 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
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
            if iter > 50 {
                // symmetric QL essentially always converges; accept current
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = v[[k, i + 1]];
                    v[[k, i + 1]] = s * v[[k, i]] + c * f;
                    v[[k, i]] = c * v[[k, i]] - s * f;
                }
            }
            if r == 0.0 && m > l {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Determinant by LU decomposition with partial pivoting.
pub fn det(m: &Array2<f64>) -> f64 {
    let n = m.nrows();
    let mut a = m.clone();
    let mut sign = 1.0;
    for k in 0..n {
        let mut piv = k;
        for i in (k + 1)..n {
            if a[[i, k]].abs() > a[[piv, k]].abs() {
                piv = i;
            }
        }
        if a[[piv, k]] == 0.0 {
            return 0.0;
        }
        if piv != k {
            for j in 0..n {
                let tmp = a[[k, j]];
                a[[k, j]] = a[[piv, j]];
                a[[piv, j]] = tmp;
            }
            sign = -sign;
        }
        for i in (k + 1)..n {
            let f = a[[i, k]] / a[[k, k]];
            for j in k..n {
                let upd = f * a[[k, j]];
                a[[i, j]] -= upd;
            }
        }
    }
    let mut d = sign;
    for k in 0..n {
        d *= a[[k, k]];
    }
    d
}

/// Complex determinant by LU with partial pivoting (used for residual checks).
pub fn det_complex(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    let mut a: Vec<Vec<Complex64>> = m.to_vec();
    let mut sign = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut piv = k;
        for i in (k + 1)..n {
            if a[i][k].norm() > a[piv][k].norm() {
                piv = i;
            }
        }
        if a[piv][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != k {
            a.swap(piv, k);
            sign = -sign;
        }
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                let upd = f * a[k][j];
                a[i][j] -= upd;
            }
        }
    }
    let mut d = sign;
    for k in 0..n {
        d *= a[k][k];
    }
    d
}
