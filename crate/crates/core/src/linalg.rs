//! Dense and sparse complex linear algebra used across the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Compressed sparse row matrix with complex entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_ptr: vec![0; n_rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, ONE)))
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed
    /// and exact zeros dropped.
    pub fn from_triplets<I>(n_rows: usize, n_cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); n_rows];
        for (r, c, v) in triplets {
            assert!(r < n_rows && c < n_cols, "triplet ({r}, {c}) out of bounds");
            rows[r].push((c, v));
        }
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let mut iter = row.into_iter().peekable();
            while let Some((c, mut v)) = iter.next() {
                while let Some(&(c2, v2)) = iter.peek() {
                    if c2 != c {
                        break;
                    }
                    v += v2;
                    iter.next();
                }
                if v != ZERO {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self { n_rows, n_cols, row_ptr, col_idx, values }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.n_rows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[range.clone()].binary_search(&c) {
            Ok(k) => self.values[range.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n_cols);
        (0..self.n_rows)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.values[k] * x[self.col_idx[k]])
                    .sum()
            })
            .collect()
    }

    pub fn scale(&self, alpha: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, other: &Self, alpha: C64) -> Self {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        Self::from_triplets(
            self.n_rows,
            self.n_cols,
            self.iter().chain(other.iter().map(|(r, c, v)| (r, c, alpha * v))),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n_cols, other.n_rows);
        let mut triplets = Vec::new();
        for (r, k, a) in self.iter() {
            for idx in other.row_ptr[k]..other.row_ptr[k + 1] {
                triplets.push((r, other.col_idx[idx], a * other.values[idx]));
            }
        }
        Self::from_triplets(self.n_rows, other.n_cols, triplets)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).add_scaled(&other.mul(self), -ONE)
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.n_rows, self.n_cols);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n_rows)
            .map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(|k| self.values[k].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Orthonormal basis of the kernel of `a`, from a full SVD.
///
/// Singular values below `tol * max(1, sigma_max)` count as zero. Rows are
/// zero-padded so that wide matrices still expose their whole kernel.
pub fn null_space(a: &CMatrix, tol: f64) -> Vec<CVector> {
    let n = a.ncols();
    if n == 0 {
        return Vec::new();
    }
    let rows = a.nrows().max(n);
    let mut padded = CMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol * sigma_max.max(1.0);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cutoff)
        .map(|(k, _)| v_t.row(k).transpose().map(|x| x.conj()))
        .collect()
}

/// Right singular vector of the smallest singular value of a square matrix.
pub fn smallest_singular_vector(a: &CMatrix) -> (f64, CVector) {
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let (k, s) = svd
        .singular_values
        .iter()
        .cloned()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("non-empty matrix");
    (s, v_t.row(k).transpose().map(|x| x.conj()))
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = m
        .clone()
        .try_schur(1e-15, 10_000)
        .ok_or_else(|| Error::Linalg("Schur iteration did not converge".into()))?;
    let ev = schur
        .eigenvalues()
        .ok_or_else(|| Error::Linalg("Schur form not triangular".into()))?;
    Ok(ev.iter().cloned().collect())
}

/// Eigenpairs of a matrix with simple spectrum. Each eigenvector is the null
/// vector of `m - lambda I`, normalized to unit length.
pub fn eigenpairs(m: &CMatrix) -> Result<Vec<(C64, CVector)>> {
    let n = m.nrows();
    let values = eigenvalues(m)?;
    Ok(values
        .into_iter()
        .map(|lambda| {
            let shifted = m - CMatrix::identity(n, n) * lambda;
            let (_, v) = smallest_singular_vector(&shifted);
            (lambda, v)
        })
        .collect())
}

/// Parlett-Reinsch balancing by powers of two; returns the balanced copy.
pub fn balance(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut a = m.clone();
    let radix = 2.0_f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].norm();
                    r += a[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            let mut rr = r;
            while cc < rr / radix {
                cc *= radix;
                rr /= radix;
                f *= radix;
            }
            while cc >= rr * radix {
                cc /= radix;
                rr *= radix;
                f /= radix;
            }
            if (cc + rr) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
    a
}

/// Roots of `sum_k coeffs[k] t^k` as eigenvalues of the balanced companion
/// matrix. Trailing (highest-degree) zero coefficients are an error.
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[degree];
    if lead == ZERO {
        return Err(Error::Linalg("leading coefficient vanishes".into()));
    }
    let mut companion = CMatrix::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = ONE;
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -coeffs[i] / lead;
    }
    let roots = eigenvalues(&balance(&companion))?;
    // One Newton polish step on the original polynomial per root.
    Ok(roots
        .into_iter()
        .map(|r| {
            let (p, dp) = horner_with_derivative(coeffs, r);
            if dp.norm() > 0.0 {
                let refined = r - p / dp;
                if horner_with_derivative(coeffs, refined).0.norm() <= p.norm() {
                    return refined;
                }
            }
            r
        })
        .collect())
}

pub fn horner(coeffs: &[C64], t: C64) -> C64 {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * t + c)
}

pub fn horner_with_derivative(coeffs: &[C64], t: C64) -> (C64, C64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &c in coeffs.iter().rev() {
        dp = dp * t + p;
        p = p * t + c;
    }
    (p, dp)
}

/// Multiplies two polynomials given by ascending coefficients.
pub fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Sort key that treats real parts closer than `tol` as equal.
pub fn canonical_cmp(a: C64, b: C64, tol: f64) -> std::cmp::Ordering {
    if (a.re - b.re).abs() > tol {
        a.re.total_cmp(&b.re)
    } else {
        a.im.total_cmp(&b.im)
    }
}

/// `n` points on the circle `|t - center| = radius`, each nudged forward in
/// angle until it is at least `exclusion` away from every point of `avoid`.
pub fn circle_samples(center: C64, radius: f64, n: usize, avoid: &[C64], exclusion: f64) -> Vec<C64> {
    let step = std::f64::consts::TAU / n as f64;
    (0..n)
        .map(|k| {
            // The irrational offset keeps samples off symmetric configurations.
            let mut theta = (k as f64 + 0.318_309_886) * step;
            let mut t = center + C64::from_polar(radius, theta);
            for _ in 0..64 {
                if avoid.iter().all(|a| (t - a).norm() >= exclusion) {
                    break;
                }
                theta += step / 64.0;
                t = center + C64::from_polar(radius, theta);
            }
            t
        })
        .collect()
}
