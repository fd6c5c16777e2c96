//! Singular value decomposition by one-sided Jacobi rotations, generic over the
//! real field so it runs at any working precision.

use super::{Matrix, Real, Scalar};

/// `A = U diag(s) V^T` with `s` in decreasing order; `U` is `m x k`, `V` is
/// `n x k`, `k = min(m, n)`.
#[derive(Clone, Debug)]
pub struct Svd<R> {
    pub u: Matrix<R>,
    pub s: Vec<R>,
    pub v: Matrix<R>,
}

/// Result of a minimum-norm least-squares solve.
#[derive(Clone, Debug)]
pub struct Lstsq<R> {
    pub x: Vec<R>,
    /// Number of singular values kept.
    pub rank: usize,
    pub singular_values: Vec<R>,
}

fn zero<R: Real>() -> R {
    R::from_i64_prec(0, 2)
}

fn max_prec<R: Real>(a: &Matrix<R>) -> u32 {
    a.data().iter().map(|x| x.prec()).max().unwrap_or(53)
}

// Columns stored contiguously: cols[j][i].
struct ColMajor<R> {
    m: usize,
    cols: Vec<Vec<R>>,
}

impl<R: Real> ColMajor<R> {
    fn from(a: &Matrix<R>) -> Self {
        let cols = (0..a.cols()).map(|j| (0..a.rows()).map(|i| a.get(i, j).clone()).collect()).collect();
        ColMajor { m: a.rows(), cols }
    }
}

fn dot<R: Real>(x: &[R], y: &[R]) -> R {
    let mut acc = zero::<R>();
    for (a, b) in x.iter().zip(y) {
        acc += a.clone() * b;
    }
    acc
}

// Householder QR of a tall matrix held by columns. Returns R (n x n, by columns)
// and the reflectors, each acting on rows k.. of a vector.
fn householder_qr<R: Real>(a: &mut ColMajor<R>) -> (Vec<Vec<R>>, Vec<Option<(Vec<R>, R)>>) {
    let m = a.m;
    let n = a.cols.len();
    let mut refl = Vec::with_capacity(n);
    for k in 0..n {
        let x = &a.cols[k][k..];
        let norm = dot(x, x).sqrt();
        if norm == zero() {
            refl.push(None);
            continue;
        }
        let alpha = if x[0] > zero() { -norm } else { norm };
        let mut v: Vec<R> = x.to_vec();
        v[0] = v[0].clone() - &alpha;
        let vtv = dot(&v, &v);
        if vtv == zero() {
            refl.push(None);
            continue;
        }
        for j in k..n {
            let col = &mut a.cols[j][k..m];
            let f = dot(&v, col).mul_pow2(1) / &vtv;
            for (c, vi) in col.iter_mut().zip(&v) {
                *c -= f.clone() * vi;
            }
        }
        refl.push(Some((v, vtv)));
    }
    let r = (0..n)
        .map(|j| (0..n).map(|i| if i <= j { a.cols[j][i].clone() } else { zero() }).collect())
        .collect();
    (r, refl)
}

fn apply_reflectors<R: Real>(refl: &[Option<(Vec<R>, R)>], b: &mut [R]) {
    for (k, r) in refl.iter().enumerate() {
        if let Some((v, vtv)) = r {
            let seg = &mut b[k..];
            let f = dot(v, seg).mul_pow2(1) / vtv;
            for (c, vi) in seg.iter_mut().zip(v) {
                *c -= f.clone() * vi;
            }
        }
    }
}

// One-sided Jacobi on the columns of `w` (m rows). Returns V (n x n, by columns).
fn jacobi<R: Real>(w: &mut [Vec<R>], prec: u32) -> Vec<Vec<R>> {
    let n = w.len();
    let mut v: Vec<Vec<R>> = (0..n)
        .map(|j| (0..n).map(|i| R::from_i64_prec(if i == j { 1 } else { 0 }, 2)).collect())
        .collect();
    let tol = R::unit_roundoff(prec) * &R::from_i64_prec(n.max(1) as i64, prec);
    let one = R::from_i64_prec(1, 2);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == zero() || gamma.abs() <= tol.clone() * &(alpha.clone() * &beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - &alpha) / &gamma.mul_pow2(1);
                let t = {
                    let den = zeta.abs() + &(one.clone() + &(zeta.clone() * &zeta)).sqrt();
                    let t = one.clone() / &den;
                    if zeta < zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = one.clone() / &(one.clone() + &(t.clone() * &t)).sqrt();
                let s = c.clone() * &t;
                rotate(w, p, q, &c, &s);
                rotate(&mut v, p, q, &c, &s);
            }
        }
        if !rotated {
            break;
        }
    }
    v
}

fn rotate<R: Real>(m: &mut [Vec<R>], p: usize, q: usize, c: &R, s: &R) {
    let (a, b) = m.split_at_mut(q);
    let (cp, cq) = (&mut a[p], &mut b[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let nx = c.clone() * &*x - &(s.clone() * &*y);
        let ny = s.clone() * &*x + &(c.clone() * &*y);
        *x = nx;
        *y = ny;
    }
}

struct Core<R> {
    // W = U_R * Sigma by columns, sorted
    w: Vec<Vec<R>>,
    s: Vec<R>,
    v: Vec<Vec<R>>,
    refl: Vec<Option<(Vec<R>, R)>>,
}

// Tall case (m >= n).
fn core<R: Real>(a: &Matrix<R>) -> Core<R> {
    let prec = max_prec(a);
    let mut cm = ColMajor::from(a);
    let (mut w, refl) = householder_qr(&mut cm);
    let v = jacobi(&mut w, prec);
    let s: Vec<R> = w.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).unwrap_or(std::cmp::Ordering::Equal));
    Core {
        w: idx.iter().map(|&i| w[i].clone()).collect(),
        s: idx.iter().map(|&i| s[i].clone()).collect(),
        v: idx.iter().map(|&i| v[i].clone()).collect(),
        refl,
    }
}

/// Full thin SVD of a real matrix.
pub fn svd<R: Real>(a: &Matrix<R>) -> Svd<R> {
    if a.rows() < a.cols() {
        let t = svd(&a.transpose());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    let (m, n) = (a.rows(), a.cols());
    let c = core(a);
    // U = Q * [U_R; 0]
    let mut u_cols = Vec::with_capacity(n);
    for (j, wj) in c.w.iter().enumerate() {
        let mut col: Vec<R> = vec![zero(); m];
        if c.s[j] != zero() {
            for i in 0..n {
                col[i] = wj[i].clone() / &c.s[j];
            }
        }
        // apply reflectors in reverse to get Q * col
        for (k, r) in c.refl.iter().enumerate().rev() {
            if let Some((v, vtv)) = r {
                let seg = &mut col[k..];
                let f = dot(v, seg).mul_pow2(1) / vtv;
                for (x, vi) in seg.iter_mut().zip(v) {
                    *x -= f.clone() * vi;
                }
            }
        }
        u_cols.push(col);
    }
    Svd {
        u: Matrix::from_fn(m, n, |i, j| u_cols[j][i].clone()),
        s: c.s,
        v: Matrix::from_fn(n, n, |i, j| c.v[j][i].clone()),
    }
}

/// Singular values of a real matrix in decreasing order.
pub fn singular_values<R: Real>(a: &Matrix<R>) -> Vec<R> {
    if a.rows() < a.cols() {
        return core(&a.transpose()).s;
    }
    core(a).s
}

/// `[[Re, -Im], [Im, Re]]`, whose singular values are those of `a`, each twice.
pub fn real_embedding<S: Scalar>(a: &Matrix<S>) -> Matrix<S::Real> {
    let (m, n) = (a.rows(), a.cols());
    if !S::IS_COMPLEX {
        return a.map(|x| x.re());
    }
    Matrix::from_fn(2 * m, 2 * n, |i, j| {
        let x = a.get(i % m, j % n);
        match (i < m, j < n) {
            (true, true) | (false, false) => x.re(),
            (true, false) => -x.im(),
            (false, true) => x.im(),
        }
    })
}

/// Singular values of a real or complex matrix, decreasing.
pub fn singular_values_of<S: Scalar>(a: &Matrix<S>) -> Vec<S::Real> {
    let e = real_embedding(a);
    let s = singular_values(&e);
    if S::IS_COMPLEX {
        s.into_iter().step_by(2).collect()
    } else {
        s
    }
}

/// SVD of `A` with `U^T b` precomputed, so the truncated pseudoinverse
/// solution can be formed for several drop tolerances.
#[derive(Clone, Debug)]
pub struct PinvFactor<R> {
    pub singular_values: Vec<R>,
    // (u_j . b) / s_j, zero for vanishing s_j
    coef: Vec<R>,
    // right singular vectors by columns
    v: Vec<Vec<R>>,
}

impl<R: Real> PinvFactor<R> {
    pub fn new(a: &Matrix<R>, b: &[R]) -> Self {
        let (m, n) = (a.rows(), a.cols());
        assert_eq!(b.len(), m, "right-hand side length");
        if m < n {
            let t = svd(a);
            let coef = (0..t.s.len())
                .map(|j| {
                    if t.s[j] == zero() {
                        return zero();
                    }
                    let uj: Vec<R> = (0..m).map(|i| t.u.get(i, j).clone()).collect();
                    dot(&uj, b) / &t.s[j]
                })
                .collect();
            let v = (0..t.s.len()).map(|j| (0..n).map(|i| t.v.get(i, j).clone()).collect()).collect();
            return PinvFactor { singular_values: t.s, coef, v };
        }
        let c = core(a);
        let mut qb = b.to_vec();
        apply_reflectors(&c.refl, &mut qb);
        let qb = &qb[..n];
        let coef = (0..n)
            .map(|j| if c.s[j] == zero() { zero() } else { dot(&c.w[j], qb) / &c.s[j] / &c.s[j] })
            .collect();
        PinvFactor { singular_values: c.s, coef, v: c.v }
    }

    /// Minimum-norm solution keeping singular values `> droptol * sigma_1`.
    pub fn solve(&self, droptol: f64) -> Lstsq<R> {
        let n = self.v.first().map(|c| c.len()).unwrap_or(0);
        let mut x: Vec<R> = vec![zero(); n];
        let mut rank = 0;
        if let Some(s1) = self.singular_values.first() {
            let cut = s1.clone() * &R::from_f64_prec(droptol, s1.prec());
            for (j, sj) in self.singular_values.iter().enumerate() {
                if *sj <= cut || *sj == zero() {
                    continue;
                }
                rank += 1;
                for (xi, vi) in x.iter_mut().zip(&self.v[j]) {
                    *xi += self.coef[j].clone() * vi;
                }
            }
        }
        Lstsq { x, rank, singular_values: self.singular_values.clone() }
    }
}

/// Minimum-norm solution of `min ||A x - b||` through the pseudoinverse,
/// discarding singular values `<= droptol * sigma_1`.
pub fn lstsq_pinv<R: Real>(a: &Matrix<R>, b: &[R], droptol: f64) -> Lstsq<R> {
    PinvFactor::new(a, b).solve(droptol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{BigReal, Complex};

    fn reconstruct(s: &Svd<f64>) -> Matrix<f64> {
        let (m, k) = (s.u.rows(), s.s.len());
        let n = s.v.rows();
        Matrix::from_fn(m, n, |i, j| (0..k).map(|l| s.u.get(i, l) * s.s[l] * s.v.get(j, l)).sum())
    }

    #[test]
    fn reconstructs_tall_and_wide() {
        let a = Matrix::from_fn(7, 4, |i, j| ((i * 3 + j * 5) % 7) as f64 - 2.5 + (i as f64) * 0.1);
        for m in [a.clone(), a.transpose()] {
            let s = svd(&m);
            let r = reconstruct(&s);
            for (x, y) in r.data().iter().zip(m.data()) {
                assert!((x - y).abs() < 1e-12);
            }
            assert!(s.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn known_values_2x2() {
        // [[2,0],[0,1]] rotated
        let a = Matrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let s = singular_values(&a);
        assert!((s[0] - 2f64.sqrt()).abs() < 1e-15 && (s[1] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn complex_values_not_duplicated() {
        let a = Matrix::from_rows(vec![
            vec![Complex::new(0.0, 3.0), Complex::new(0.0, 0.0)],
            vec![Complex::new(0.0, 0.0), Complex::new(1.0, 1.0)],
        ])
        .unwrap();
        let s = singular_values_of(&a);
        assert_eq!(s.len(), 2);
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn lstsq_matches_normal_equations_high_precision() {
        let a = Matrix::from_fn(6, 3, |i, j| BigReal::from_i64(((i + 1) * (j + 2) % 5) as i64 + (i == j) as i64, 200));
        let b: Vec<BigReal> = (0..6).map(|i| BigReal::from_i64(i as i64 - 2, 200)).collect();
        let sol = lstsq_pinv(&a, &b, 1e-50);
        assert_eq!(sol.rank, 3);
        // residual orthogonal to range: A^T (A x - b) = 0
        for j in 0..3 {
            let mut acc = BigReal::from_i64(0, 200);
            for i in 0..6 {
                let mut r = BigReal::from_i64(0, 200);
                for k in 0..3 {
                    r += a.get(i, k).clone() * &sol.x[k];
                }
                r -= &b[i];
                acc += a.get(i, j).clone() * &r;
            }
            assert!(acc.abs().to_f64() < 1e-55, "{acc}");
        }
    }

    #[test]
    fn droptol_truncates_rank() {
        let a = Matrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-14], vec![0.0, 0.0]]).unwrap();
        let sol = lstsq_pinv(&a, &[1.0, 1.0, 0.0], 1e-10);
        assert_eq!(sol.rank, 1);
        assert!((sol.x[0] - 0.5).abs() < 1e-10 && (sol.x[1] - 0.5).abs() < 1e-10);
    }
}
