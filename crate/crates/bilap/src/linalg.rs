//! Banded linear algebra kernels: symmetric band storage, band Cholesky,
//! complex band LU with partial pivoting, and compensated (extended
//! precision) dot products used wherever cancellation would otherwise
//! drown a measurement.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Symmetric banded matrix stored by upper diagonals.
///
/// `diag[d][i]` holds the entry `(i, i + d)` for `d = 0..=half_bandwidth`.
#[derive(Debug, Clone)]
pub struct SymBanded {
    n: usize,
    hbw: usize,
    diags: Vec<Vec<f64>>,
}

impl SymBanded {
    pub fn zeros(n: usize, hbw: usize) -> Self {
        let diags = (0..=hbw).map(|d| vec![0.0; n - d.min(n)]).collect();
        SymBanded { n, hbw, diags }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.hbw
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        if d > self.hbw {
            0.0
        } else {
            self.diags[d][lo]
        }
    }

    /// Adds `v` to the entry `(i, j)` (and by symmetry `(j, i)`).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        assert!(d <= self.hbw, "entry outside band");
        self.diags[d][lo] += v;
    }

    /// Adds `mu` to the diagonal.
    pub fn shift(&mut self, mu: f64) {
        for v in self.diags[0].iter_mut() {
            *v += mu;
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        y[..n].fill(0.0);
        for i in 0..n {
            let mut acc = self.diags[0][i] * x[i];
            for d in 1..=self.hbw {
                if i + d < n {
                    acc += self.diags[d][i] * x[i + d];
                }
                if i >= d {
                    acc += self.diags[d][i - d] * x[i - d];
                }
            }
            y[i] = acc;
        }
    }

    pub fn matvec_alloc(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// Matrix-vector product applied to a complex vector (real matrix).
    pub fn matvec_complex(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.n;
        for yy in y.iter_mut().take(n) {
            *yy = Complex64::new(0.0, 0.0);
        }
        for i in 0..n {
            let mut acc = x[i] * self.diags[0][i];
            for d in 1..=self.hbw {
                if i + d < n {
                    acc += x[i + d] * self.diags[d][i];
                }
                if i >= d {
                    acc += x[i - d] * self.diags[d][i - d];
                }
            }
            y[i] = acc;
        }
    }

    /// Compensated residual of `y = A x` computed with exact fma products and
    /// Neumaier accumulation; returns `A x` to roughly doubled precision.
    pub fn matvec_compensated(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for (i, yy) in y.iter_mut().enumerate() {
            let mut acc = CompAcc::new();
            acc.add_product(self.diags[0][i], x[i]);
            for d in 1..=self.hbw {
                if i + d < n {
                    acc.add_product(self.diags[d][i], x[i + d]);
                }
                if i >= d {
                    acc.add_product(self.diags[d][i - d], x[i - d]);
                }
            }
            *yy = acc.value();
        }
        y
    }

    /// Quadratic form `x^T A x` with compensated accumulation.
    pub fn quadratic_form_compensated(&self, x: &[f64]) -> f64 {
        let ax = self.matvec_compensated(x);
        comp_dot(&ax, x)
    }

    /// Symmetric banded product `C = A * A` with ascending-index accumulation.
    /// The half bandwidth doubles.
    pub fn square(&self) -> SymBanded {
        let n = self.n;
        let hbw2 = (2 * self.hbw).min(n - 1);
        let mut c = SymBanded::zeros(n, hbw2);
        for i in 0..n {
            for j in i..=(i + hbw2).min(n - 1) {
                // sum_k a(i,k) a(k,j), k ascending over the band intersection
                let klo = i.saturating_sub(self.hbw).max(j.saturating_sub(self.hbw));
                let khi = ((i + self.hbw).min(j + self.hbw)).min(n - 1);
                let mut acc = 0.0;
                for k in klo..=khi {
                    acc += self.get(i, k) * self.get(k, j);
                }
                c.diags[j - i][i] = acc;
            }
        }
        c
    }

    /// All stored entries as `(row, col, value)` triplets covering both
    /// triangles, sorted by row then column. Zeros inside the band are
    /// skipped.
    pub fn coo_triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            let lo = i.saturating_sub(self.hbw);
            let hi = (i + self.hbw).min(self.n - 1);
            for j in lo..=hi {
                let v = self.get(i, j);
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// Max-norm of `A - A^T`; zero by construction of the storage.
    pub fn asymmetry(&self) -> f64 {
        0.0
    }

    /// Dense copy, for small cross-checks.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }
}

/// Cholesky factorization of a symmetric positive definite banded matrix.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    hbw: usize,
    /// Lower factor by diagonals: `l[d][j] = L(j + d, j)`.
    l: Vec<Vec<f64>>,
}

impl BandCholesky {
    pub fn new(a: &SymBanded) -> Result<Self> {
        let n = a.n;
        let hbw = a.hbw;
        let mut l: Vec<Vec<f64>> = (0..=hbw).map(|d| vec![0.0; n - d.min(n)]).collect();
        for j in 0..n {
            let mut s = a.diags[0][j];
            let klo = j.saturating_sub(hbw);
            for k in klo..j {
                let v = l[j - k][k];
                s -= v * v;
            }
            if s <= 0.0 || !s.is_finite() {
                return Err(Error::Factorization(format!(
                    "nonpositive pivot {s:e} at column {j}"
                )));
            }
            let pj = s.sqrt();
            l[0][j] = pj;
            for i in (j + 1)..=(j + hbw).min(n - 1) {
                let mut s = a.get(i, j);
                let klo = i.saturating_sub(hbw);
                for k in klo..j {
                    s -= l[i - k][k] * l[j - k][k];
                }
                l[i - j][j] = s / pj;
            }
        }
        Ok(BandCholesky { n, hbw, l })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        // forward: L y = b
        for j in 0..n {
            b[j] /= self.l[0][j];
            let bj = b[j];
            for i in (j + 1)..=(j + self.hbw).min(n - 1) {
                b[i] -= self.l[i - j][j] * bj;
            }
        }
        // backward: L^T x = y
        for j in (0..n).rev() {
            let mut s = b[j];
            for i in (j + 1)..=(j + self.hbw).min(n - 1) {
                s -= self.l[i - j][j] * b[i];
            }
            b[j] = s / self.l[0][j];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solves for the real and imaginary parts of a complex right-hand side.
    pub fn solve_complex(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut re: Vec<f64> = b.iter().map(|z| z.re).collect();
        let mut im: Vec<f64> = b.iter().map(|z| z.im).collect();
        self.solve_in_place(&mut re);
        self.solve_in_place(&mut im);
        re.into_iter()
            .zip(im)
            .map(|(r, i)| Complex64::new(r, i))
            .collect()
    }
}

/// General complex banded matrix in LAPACK `gbtrf`-style storage, with
/// `kl` sub- and `ku` superdiagonals plus `kl` fill rows for pivoting.
#[derive(Debug, Clone)]
pub struct BandLuZ {
    n: usize,
    kl: usize,
    kuw: usize, // working upper width = ku + kl
    ldab: usize,
    ab: Vec<Complex64>,
    piv: Vec<usize>,
}

impl BandLuZ {
    /// Factorizes the complex banded matrix given by `entry(i, j)` for
    /// `|i - j| <= kl` (square band, `ku = kl`).
    pub fn factor<F: Fn(usize, usize) -> Complex64>(n: usize, kl: usize, entry: F) -> Result<Self> {
        let kuw = 2 * kl;
        let ldab = kl + kuw + 1;
        let mut ab = vec![Complex64::new(0.0, 0.0); ldab * n];
        let idx = |i: usize, j: usize| -> usize { j * ldab + (i + kuw - j) };
        for j in 0..n {
            let ilo = j.saturating_sub(kl);
            let ihi = (j + kl).min(n - 1);
            for i in ilo..=ihi {
                ab[idx(i, j)] = entry(i, j);
            }
        }
        let mut piv = vec![0usize; n];
        for k in 0..n {
            // pivot search in column k, rows k..=k+kl
            let ihi = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = ab[idx(k, k)].norm_sqr();
            for i in (k + 1)..=ihi {
                let v = ab[idx(i, k)].norm_sqr();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Factorization(format!(
                    "exactly singular band matrix at column {k}"
                )));
            }
            piv[k] = p;
            let jhi = (k + kuw).min(n - 1);
            if p != k {
                for j in k..=jhi {
                    ab.swap(idx(k, j), idx(p, j));
                }
            }
            let pivot = ab[idx(k, k)];
            for i in (k + 1)..=ihi {
                let m = ab[idx(i, k)] / pivot;
                ab[idx(i, k)] = m;
                if m != Complex64::new(0.0, 0.0) {
                    for j in (k + 1)..=jhi {
                        let t = ab[idx(k, j)];
                        ab[idx(i, j)] -= m * t;
                    }
                }
            }
        }
        Ok(BandLuZ {
            n,
            kl,
            kuw,
            ldab,
            ab,
            piv,
        })
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.ab[j * self.ldab + (i + self.kuw - j)]
    }

    /// Smallest pivot magnitude relative to the largest, a cheap singularity
    /// diagnostic.
    pub fn pivot_ratio(&self) -> f64 {
        let mut min = f64::INFINITY;
        let mut max: f64 = 0.0;
        for k in 0..self.n {
            let v = self.at(k, k).norm();
            min = min.min(v);
            max = max.max(v);
        }
        if max == 0.0 {
            0.0
        } else {
            min / max
        }
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in (k + 1)..=(k + self.kl).min(n - 1) {
                let m = self.at(i, k);
                b[i] -= m * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in (k + 1)..=(k + self.kuw).min(n - 1) {
                s -= self.at(k, j) * b[j];
            }
            b[k] = s / self.at(k, k);
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solves `conj(A) x = b` reusing the factorization of `A`.
    pub fn solve_conj(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x: Vec<Complex64> = b.iter().map(|z| z.conj()).collect();
        self.solve_in_place(&mut x);
        for z in x.iter_mut() {
            *z = z.conj();
        }
        x
    }
}

/// Two-term compensated accumulator (Neumaier) with exact fma products.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompAcc {
    s: f64,
    c: f64,
}

impl CompAcc {
    pub fn new() -> Self {
        CompAcc { s: 0.0, c: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.s + v;
        if self.s.abs() >= v.abs() {
            self.c += (self.s - t) + v;
        } else {
            self.c += (v - t) + self.s;
        }
        self.s = t;
    }

    /// Adds `a * b` exactly split into product and fma remainder.
    #[inline]
    pub fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        let e = a.mul_add(b, -p);
        self.add(p);
        self.add(e);
    }

    pub fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Compensated dot product.
pub fn comp_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = CompAcc::new();
    for (x, y) in a.iter().zip(b) {
        acc.add_product(*x, *y);
    }
    acc.value()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

pub fn dot_z(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm2_z(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigen-decomposition of a small dense symmetric matrix with eigenvalues
/// sorted ascending; columns of the returned matrix are the eigenvectors.
pub fn symmetric_eigen_sorted(
    m: nalgebra::DMatrix<f64>,
) -> (Vec<f64>, nalgebra::DMatrix<f64>) {
    let n = m.nrows();
    let se = nalgebra::SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = nalgebra::DMatrix::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vecs.set_column(j, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_spd_band(n: usize, hbw: usize, seed: u64) -> SymBanded {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = SymBanded::zeros(n, hbw);
        for d in 1..=hbw {
            for i in 0..(n - d) {
                a.diags[d][i] = rng.gen_range(-1.0..1.0);
            }
        }
        // diagonally dominant
        for i in 0..n {
            let mut s = 0.0;
            for d in 1..=hbw {
                if i + d < n {
                    s += a.diags[d][i].abs();
                }
                if i >= d {
                    s += a.diags[d][i - d].abs();
                }
            }
            a.diags[0][i] = s + 1.0 + rng.gen_range(0.0..1.0);
        }
        a
    }

    #[test]
    fn cholesky_solves_banded_system() {
        let n = 60;
        let a = random_spd_band(n, 3, 7);
        let chol = BandCholesky::new(&a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = chol.solve(&b);
        let ax = a.matvec_alloc(&x);
        let res: f64 = ax
            .iter()
            .zip(&b)
            .map(|(u, v)| (u - v) * (u - v))
            .sum::<f64>()
            .sqrt();
        assert!(res / norm2(&b) < 1e-12, "residual {res}");
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = SymBanded::zeros(5, 1);
        for i in 0..5 {
            a.diags[0][i] = -1.0;
        }
        assert!(BandCholesky::new(&a).is_err());
    }

    #[test]
    fn band_lu_matches_dense_solve() {
        let n = 40;
        let kl = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut dense = nalgebra::DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) <= kl {
                    dense[(i, j)] =
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
        }
        let lu = BandLuZ::factor(n, kl, |i, j| dense[(i, j)]).unwrap();
        let b: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let x = lu.solve(&b);
        let xv = nalgebra::DVector::from_column_slice(&x);
        let bv = nalgebra::DVector::from_column_slice(&b);
        let res = (&dense * &xv - &bv).norm() / bv.norm();
        assert!(res < 1e-11, "residual {res}");
        // conjugate solve
        let xc = lu.solve_conj(&b);
        let xcv = nalgebra::DVector::from_column_slice(&xc);
        let denc = dense.map(|z| z.conj());
        let resc = (&denc * &xcv - &bv).norm() / bv.norm();
        assert!(resc < 1e-11, "conj residual {resc}");
    }

    #[test]
    fn square_matches_dense_product() {
        let a = random_spd_band(30, 2, 11);
        let c = a.square();
        let ad = a.to_dense();
        let cd = &ad * &ad;
        for i in 0..30 {
            for j in 0..30 {
                assert!((c.get(i, j) - cd[(i, j)]).abs() <= 1e-13 * cd[(i, j)].abs().max(1.0));
            }
        }
    }

    #[test]
    fn compensated_dot_beats_cancellation() {
        // sum of large cancelling terms plus small signal
        let a = vec![1e16, 1.0, -1e16, 1e-3];
        let b = vec![1.0, 1.0, 1.0, 1.0];
        let d = comp_dot(&a, &b);
        assert!((d - (1.0 + 1e-3)).abs() < 1e-12);
    }
}
