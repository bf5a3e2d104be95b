//! Dense eigensolvers sized for the 6x6 two-electron problem.
//!
//! Two routines: eigenvalues of a general complex matrix (Householder
//! reduction to upper Hessenberg followed by shifted QR with deflation), and
//! a cyclic Jacobi diagonalization for real symmetric matrices that also
//! returns eigenvectors (needed for the gamma = 0 ground state). Both are
//! self-contained; the matrices here are tiny, so clarity and robustness win
//! over blocked performance.

// Index loops mirror the textbook rotation formulas; iterator forms would
// obscure the simultaneous row/column updates.
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

use crate::error::{H2Error, Result};

type C = Complex64;

/// Flat row-major complex matrix helpers.
struct Mat {
    n: usize,
    a: Vec<C>,
}

impl Mat {
    fn get(&self, i: usize, j: usize) -> C {
        self.a[i * self.n + j]
    }
    fn set(&mut self, i: usize, j: usize, v: C) {
        self.a[i * self.n + j] = v;
    }
}

/// Householder reduction to upper Hessenberg form (in place).
fn hessenberg(m: &mut Mat) {
    let n = m.n;
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        // Norm of the column under the subdiagonal.
        let mut xnorm2 = 0.0;
        for i in k + 1..n {
            xnorm2 += m.get(i, k).norm_sqr();
        }
        if xnorm2 == 0.0 {
            continue;
        }
        let x0 = m.get(k + 1, k);
        let xnorm = xnorm2.sqrt();
        // alpha = -phase(x0) * |x|, so u = x - alpha e1 never cancels.
        let phase = if x0.norm() == 0.0 {
            C::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let mut v: Vec<C> = (k + 1..n).map(|i| m.get(i, k)).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let vn = vnorm2.sqrt();
        for z in v.iter_mut() {
            *z /= vn;
        }
        // A := P A with P = I - 2 v v^H acting on rows k+1..n.
        for j in 0..n {
            let mut dot = C::new(0.0, 0.0);
            for (idx, i) in (k + 1..n).enumerate() {
                dot += v[idx].conj() * m.get(i, j);
            }
            let dot2 = dot * 2.0;
            for (idx, i) in (k + 1..n).enumerate() {
                let cur = m.get(i, j);
                m.set(i, j, cur - v[idx] * dot2);
            }
        }
        // A := A P acting on columns k+1..n.
        for i in 0..n {
            let mut dot = C::new(0.0, 0.0);
            for (idx, j) in (k + 1..n).enumerate() {
                dot += m.get(i, j) * v[idx];
            }
            let dot2 = dot * 2.0;
            for (idx, j) in (k + 1..n).enumerate() {
                let cur = m.get(i, j);
                m.set(i, j, cur - dot2 * v[idx].conj());
            }
        }
    }
    // Zero out the numerically negligible entries below the subdiagonal.
    for i in 2..n {
        for j in 0..i - 1 {
            m.set(i, j, C::new(0.0, 0.0));
        }
    }
}

/// Complex Givens rotation zeroing g: returns (c, s) with c real, such that
/// [c, s; -conj(s), c] [f; g] = [r; 0].
fn givens(f: C, g: C) -> (f64, C) {
    if g.norm() == 0.0 {
        return (1.0, C::new(0.0, 0.0));
    }
    if f.norm() == 0.0 {
        return (0.0, g.conj() / g.norm());
    }
    let denom = (f.norm_sqr() + g.norm_sqr()).sqrt();
    let c = f.norm() / denom;
    let s = (f / f.norm()) * g.conj() / denom;
    (c, s)
}

/// Eigenvalues of the trailing 2x2 block [[a, b], [c, d]].
fn eig2(a: C, b: C, c: C, d: C) -> (C, C) {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - det * 4.0).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    (l1, l2)
}

/// Shifted QR iteration on an upper Hessenberg matrix; returns all
/// eigenvalues (unordered) or a convergence error.
fn hessenberg_qr(m: &mut Mat) -> Result<Vec<C>> {
    let n = m.n;
    let mut eigs = vec![C::new(0.0, 0.0); n];
    let mut hi = n; // active block is rows/cols 0..hi
    let mut iter_in_block = 0usize;
    let max_iter = 40 * n.max(1);
    let mut total_iter = 0usize;

    while hi > 0 {
        // Deflate tiny subdiagonals anywhere in the active block.
        for i in 1..hi {
            let sub = m.get(i, i - 1).norm();
            let scale = m.get(i - 1, i - 1).norm() + m.get(i, i).norm();
            if sub <= f64::EPSILON * scale.max(1e-300) {
                m.set(i, i - 1, C::new(0.0, 0.0));
            }
        }
        if hi == 1 || m.get(hi - 1, hi - 2).norm() == 0.0 {
            eigs[hi - 1] = m.get(hi - 1, hi - 1);
            hi -= 1;
            iter_in_block = 0;
            continue;
        }
        if hi == 2 || m.get(hi - 2, hi - 3).norm() == 0.0 {
            let (l1, l2) = eig2(
                m.get(hi - 2, hi - 2),
                m.get(hi - 2, hi - 1),
                m.get(hi - 1, hi - 2),
                m.get(hi - 1, hi - 1),
            );
            eigs[hi - 2] = l1;
            eigs[hi - 1] = l2;
            hi -= 2;
            iter_in_block = 0;
            continue;
        }

        total_iter += 1;
        iter_in_block += 1;
        if total_iter > max_iter {
            return Err(H2Error::EigenConvergence { sweeps: total_iter });
        }

        // Wilkinson shift: the trailing 2x2 eigenvalue closer to the corner;
        // an occasional exceptional shift breaks rare cycles.
        let corner = m.get(hi - 1, hi - 1);
        let mut mu = {
            let (l1, l2) = eig2(
                m.get(hi - 2, hi - 2),
                m.get(hi - 2, hi - 1),
                m.get(hi - 1, hi - 2),
                m.get(hi - 1, hi - 1),
            );
            if (l1 - corner).norm() < (l2 - corner).norm() {
                l1
            } else {
                l2
            }
        };
        if iter_in_block % 12 == 0 {
            mu += C::new(1.5 * m.get(hi - 1, hi - 2).norm(), 0.0);
        }

        // Explicit shifted QR sweep on the active block via Givens chains.
        let mut rots: Vec<(f64, C)> = Vec::with_capacity(hi - 1);
        for i in 0..hi {
            let cur = m.get(i, i);
            m.set(i, i, cur - mu);
        }
        for i in 0..hi - 1 {
            let (c, s) = givens(m.get(i, i), m.get(i + 1, i));
            rots.push((c, s));
            for j in i..hi {
                let f = m.get(i, j);
                let g = m.get(i + 1, j);
                m.set(i, j, f * c + g * s);
                m.set(i + 1, j, -f * s.conj() + g * c);
            }
        }
        for (i, (c, s)) in rots.iter().enumerate() {
            for r in 0..(i + 2).min(hi) {
                let f = m.get(r, i);
                let g = m.get(r, i + 1);
                m.set(r, i, f * *c + g * s.conj());
                m.set(r, i + 1, -f * *s + g * *c);
            }
        }
        for i in 0..hi {
            let cur = m.get(i, i);
            m.set(i, i, cur + mu);
        }
    }
    Ok(eigs)
}

/// Eigenvalues of a general complex matrix given as nested rows.
///
/// # Arguments
/// * `rows` - square matrix, rows[i][j]
///
/// # Returns
/// Unordered eigenvalues, or `EigenConvergence` if the QR iteration stalls.
pub fn complex_eigenvalues(rows: &[Vec<C>]) -> Result<Vec<C>> {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
    let mut m = Mat {
        n,
        a: rows.iter().flatten().copied().collect(),
    };
    hessenberg(&mut m);
    hessenberg_qr(&mut m)
}

/// Eigenvalues of a 6x6 complex matrix.
pub fn eigenvalues6(m: &[[C; 6]; 6]) -> Result<[C; 6]> {
    let rows: Vec<Vec<C>> = m.iter().map(|r| r.to_vec()).collect();
    let v = complex_eigenvalues(&rows)?;
    let mut out = [C::new(0.0, 0.0); 6];
    out.copy_from_slice(&v);
    Ok(out)
}

/// Cyclic Jacobi diagonalization of a real symmetric matrix.
///
/// # Arguments
/// * `rows` - symmetric matrix
///
/// # Returns
/// `(eigenvalues, eigenvectors)` with eigenvalues ascending and
/// `eigenvectors[k]` the unit eigenvector of `eigenvalues[k]`; or
/// `EigenConvergence` if the off-diagonal norm refuses to vanish.
pub fn symmetric_eigen(rows: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale: f64 = a
        .iter()
        .flatten()
        .fold(0.0_f64, |acc, x| acc.max(x.abs()))
        .max(1e-300);

    for _sweep in 0..100 {
        let mut off = 0.0_f64;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(a[i][j].abs());
            }
        }
        if off <= 1e-15 * scale {
            // Sort ascending, carrying eigenvectors along.
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&p, &q| a[p][p].partial_cmp(&a[q][q]).unwrap());
            let evals: Vec<f64> = idx.iter().map(|&p| a[p][p]).collect();
            let evecs: Vec<Vec<f64>> = idx
                .iter()
                .map(|&p| (0..n).map(|r| v[r][p]).collect())
                .collect();
            return Ok((evals, evecs));
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                // Classic Jacobi rotation angle.
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(H2Error::EigenConvergence { sweeps: 100 })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Greedy multiset match: each wanted eigenvalue consumes its nearest
    /// remaining computed one. A sorted comparison would misalign conjugate
    /// pairs whose real parts differ only by roundoff.
    fn assert_spectra_match(got: &[C], want: &[C], tol: f64) {
        let mut pool: Vec<C> = got.to_vec();
        for w in want {
            let (idx, best) = pool
                .iter()
                .enumerate()
                .map(|(i, g)| (i, (g - w).norm()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .expect("as many eigenvalues as wanted values");
            assert!(best < tol, "no eigenvalue near {w}: best distance {best:e}");
            pool.swap_remove(idx);
        }
    }

    #[test]
    fn recovers_spectrum_of_rotated_diagonal() {
        // A = Q D Q^T with Q a product of plane rotations keeps D's spectrum.
        let lambda = [
            C::new(-3.7, 0.0),
            C::new(-2.5, 0.4),
            C::new(-2.5, -0.4),
            C::new(-1.8, 0.0),
            C::new(0.3, 1.1),
            C::new(0.3, -1.1),
        ];
        let n = 6;
        let mut q = vec![vec![0.0_f64; n]; n];
        for (i, row) in q.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let rot = |q: &mut Vec<Vec<f64>>, p: usize, r: usize, ang: f64| {
            let (c, s) = (ang.cos(), ang.sin());
            for row in q.iter_mut() {
                let xp = row[p];
                let xr = row[r];
                row[p] = c * xp - s * xr;
                row[r] = s * xp + c * xr;
            }
        };
        rot(&mut q, 0, 3, 0.6);
        rot(&mut q, 1, 4, -1.1);
        rot(&mut q, 2, 5, 0.35);
        rot(&mut q, 0, 5, 1.9);
        let mut a = vec![vec![C::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = C::new(0.0, 0.0);
                for (k, &lk) in lambda.iter().enumerate() {
                    acc += lk * q[i][k] * q[j][k];
                }
                a[i][j] = acc;
            }
        }
        let got = complex_eigenvalues(&a).unwrap();
        assert_spectra_match(&got, &lambda, 1e-10);
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        // Deterministic pseudo-random complex matrix.
        let n = 6;
        let mut seed = 0x2545f4914f6cdd1d_u64;
        let mut rnd = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _case in 0..20 {
            let a: Vec<Vec<C>> = (0..n)
                .map(|_| (0..n).map(|_| C::new(rnd() * 4.0, rnd() * 4.0)).collect())
                .collect();
            let eigs = complex_eigenvalues(&a).unwrap();
            let tr: C = (0..n).map(|i| a[i][i]).sum();
            let sum: C = eigs.iter().sum();
            assert!(
                (tr - sum).norm() < 1e-10 * tr.norm().max(1.0),
                "trace {tr}, eig sum {sum}"
            );
        }
    }

    #[test]
    fn jacobi_diagonalizes_known_symmetric_matrix() {
        // Tridiagonal (-1, 2, -1) of size 4: eigenvalues 2 - 2 cos(k pi / 5).
        let n = 4;
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = 2.0;
            if i + 1 < n {
                a[i][i + 1] = -1.0;
                a[i + 1][i] = -1.0;
            }
        }
        let (evals, evecs) = symmetric_eigen(&a).unwrap();
        for (k, ev) in evals.iter().enumerate() {
            let want = 2.0 - 2.0 * (std::f64::consts::PI * (k as f64 + 1.0) / 5.0).cos();
            assert!((ev - want).abs() < 1e-12, "k = {k}: {ev} vs {want}");
        }
        // Residual ||A v - lambda v|| and orthonormality.
        for (k, vec_k) in evecs.iter().enumerate() {
            let mut res = 0.0_f64;
            for i in 0..n {
                let av: f64 = (0..n).map(|j| a[i][j] * vec_k[j]).sum();
                res = res.max((av - evals[k] * vec_k[i]).abs());
            }
            assert!(res < 1e-12);
            for (l, vec_l) in evecs.iter().enumerate() {
                let dot: f64 = (0..n).map(|i| vec_k[i] * vec_l[i]).sum();
                let want = if k == l { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
    }
}
