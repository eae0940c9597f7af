//! Finite-dimensional representations of sl2 and sl3, truncated Verma
//! modules, tensor-product spaces and singular vectors.
//!
//! Generator matrices are stored with exact integer entries so commutation
//! relations can be checked without rounding. Bases are chosen so that every
//! Cartan generator is diagonal.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{null_space, CMatrix, SparseMatrix, C64, ZERO};

pub type IntMatrix = DMatrix<i64>;

/// Singular-value cutoff for kernels of integer matrices.
pub const KERNEL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algebra {
    Sl2,
    Sl3,
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algebra::Sl2 => write!(f, "sl2"),
            Algebra::Sl3 => write!(f, "sl3"),
        }
    }
}

/// Dominant integral weight: the sl2 highest weight, or sl3 fundamental-weight
/// coordinates `(n1, n2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    Sl2(u32),
    Sl3(u32, u32),
}

impl Weight {
    pub fn algebra(&self) -> Algebra {
        match self {
            Weight::Sl2(_) => Algebra::Sl2,
            Weight::Sl3(..) => Algebra::Sl3,
        }
    }

    /// Dynkin labels as signed integers.
    pub fn labels(&self) -> Vec<i64> {
        match *self {
            Weight::Sl2(l) => vec![l as i64],
            Weight::Sl3(a, b) => vec![a as i64, b as i64],
        }
    }

    pub fn sl2_value(&self) -> Option<u32> {
        match *self {
            Weight::Sl2(l) => Some(l),
            Weight::Sl3(..) => None,
        }
    }

    /// Diagonal-matrix form `diag(a1, a2, a3)` of an sl3 weight, with
    /// `omega_1 = diag(2/3, -1/3, -1/3)` and `omega_2 = diag(1/3, 1/3, -2/3)`.
    pub fn sl3_diagonal(n1: f64, n2: f64) -> [f64; 3] {
        [
            (2.0 * n1 + n2) / 3.0,
            (n2 - n1) / 3.0,
            -(n1 + 2.0 * n2) / 3.0,
        ]
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Sl2(l) => write!(f, "{l}"),
            Weight::Sl3(a, b) => write!(f, "({a},{b})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    E,
    H,
    F,
    E1,
    E2,
    F1,
    F2,
    H1,
    H2,
}

/// Explicit matrices of a representation.
#[derive(Debug, Clone, PartialEq)]
pub struct IrrepRealization {
    pub algebra: Algebra,
    /// Highest weight in Dynkin labels; negative for Verma modules.
    pub highest_weight: Vec<i64>,
    pub dim: usize,
    /// Basis index of the highest-weight vector.
    pub highest_index: usize,
    /// Set when the raising/lowering action was cut off at a degree bound.
    pub truncated: bool,
    generators: BTreeMap<Generator, IntMatrix>,
}

fn commutator(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    a * b - b * a
}

fn to_complex(m: &IntMatrix) -> CMatrix {
    m.map(|x| C64::new(x as f64, 0.0))
}

impl IrrepRealization {
    pub fn generator(&self, g: Generator) -> &IntMatrix {
        self.generators
            .get(&g)
            .unwrap_or_else(|| panic!("{g:?} is not a generator of {}", self.algebra))
    }

    pub fn complex(&self, g: Generator) -> CMatrix {
        to_complex(self.generator(g))
    }

    pub fn generators(&self) -> impl Iterator<Item = (&Generator, &IntMatrix)> {
        self.generators.iter()
    }

    /// Raising generators (simple roots).
    pub fn raising(&self) -> Vec<&IntMatrix> {
        match self.algebra {
            Algebra::Sl2 => vec![self.generator(Generator::E)],
            Algebra::Sl3 => vec![self.generator(Generator::E1), self.generator(Generator::E2)],
        }
    }

    /// Diagonal Cartan generators.
    pub fn cartan(&self) -> Vec<&IntMatrix> {
        match self.algebra {
            Algebra::Sl2 => vec![self.generator(Generator::H)],
            Algebra::Sl3 => vec![self.generator(Generator::H1), self.generator(Generator::H2)],
        }
    }

    /// Weight (Cartan eigenvalues) of basis vector `k`.
    pub fn basis_weight(&self, k: usize) -> Vec<i64> {
        self.cartan().iter().map(|h| h[(k, k)]).collect()
    }

    /// Root vectors `(E_alpha, F_alpha)` for every positive root, with
    /// `tr(E_alpha F_alpha) = 1` in the defining representation.
    pub fn root_pairs(&self) -> Vec<(IntMatrix, IntMatrix)> {
        match self.algebra {
            Algebra::Sl2 => vec![(self.generator(Generator::E).clone(), self.generator(Generator::F).clone())],
            Algebra::Sl3 => {
                let (e1, e2) = (self.generator(Generator::E1), self.generator(Generator::E2));
                let (f1, f2) = (self.generator(Generator::F1), self.generator(Generator::F2));
                vec![
                    (e1.clone(), f1.clone()),
                    (e2.clone(), f2.clone()),
                    (commutator(e1, e2), commutator(f2, f1)),
                ]
            }
        }
    }

    /// The split Casimir `sum_a J_a (x) J_a` written in Chevalley generators:
    /// a list of `(coefficient, X, Y)` meaning `coefficient * X (x) Y`.
    pub fn split_casimir(&self) -> Vec<(f64, IntMatrix, IntMatrix)> {
        let mut terms = Vec::new();
        for (e, f) in self.root_pairs() {
            terms.push((1.0, e.clone(), f.clone()));
            terms.push((1.0, f, e));
        }
        match self.algebra {
            Algebra::Sl2 => {
                let h = self.generator(Generator::H).clone();
                terms.push((0.5, h.clone(), h));
            }
            Algebra::Sl3 => {
                // Inverse of the trace Gram matrix [[2,-1],[-1,2]] on (h1, h2).
                let h1 = self.generator(Generator::H1).clone();
                let h2 = self.generator(Generator::H2).clone();
                terms.push((2.0 / 3.0, h1.clone(), h1.clone()));
                terms.push((1.0 / 3.0, h1.clone(), h2.clone()));
                terms.push((1.0 / 3.0, h2.clone(), h1));
                terms.push((2.0 / 3.0, h2.clone(), h2));
            }
        }
        terms
    }

    /// Orthonormal basis `{J_a}` of the algebra (with respect to the trace
    /// form of the defining representation), represented in this module.
    pub fn orthonormal_basis(&self) -> Vec<CMatrix> {
        let s2 = std::f64::consts::SQRT_2;
        let i = C64::new(0.0, 1.0);
        let mut basis = Vec::new();
        for (e, f) in self.root_pairs() {
            let (e, f) = (to_complex(&e), to_complex(&f));
            basis.push((&e + &f) / C64::new(s2, 0.0));
            basis.push((&e - &f) * (i / s2));
        }
        match self.algebra {
            Algebra::Sl2 => basis.push(self.complex(Generator::H) / C64::new(s2, 0.0)),
            Algebra::Sl3 => {
                let h1 = self.complex(Generator::H1);
                let h2 = self.complex(Generator::H2);
                basis.push(&h1 / C64::new(s2, 0.0));
                basis.push((&h1 + &h2 * C64::new(2.0, 0.0)) / C64::new(6f64.sqrt(), 0.0));
            }
        }
        basis
    }

    /// Value of the quadratic Casimir `sum_a J_a J_a` on this module
    /// (read off at the highest-weight vector).
    pub fn casimir_value(&self) -> C64 {
        let k = self.highest_index;
        self.orthonormal_basis()
            .iter()
            .map(|j| (j * j)[(k, k)])
            .sum()
    }
}

/// Finite-dimensional sl2 irrep on `x^0 .. x^lambda` (lowest weight first).
pub fn sl2_irrep(lambda: u32) -> IrrepRealization {
    let l = lambda as i64;
    let n = lambda as usize + 1;
    let mut e = IntMatrix::zeros(n, n);
    let mut f = IntMatrix::zeros(n, n);
    let mut h = IntMatrix::zeros(n, n);
    for k in 0..n {
        let ki = k as i64;
        h[(k, k)] = 2 * ki - l;
        if k + 1 < n {
            e[(k + 1, k)] = l - ki;
        }
        if k > 0 {
            f[(k - 1, k)] = ki;
        }
    }
    IrrepRealization {
        algebra: Algebra::Sl2,
        highest_weight: vec![l],
        dim: n,
        highest_index: n - 1,
        truncated: false,
        generators: BTreeMap::from([(Generator::E, e), (Generator::H, h), (Generator::F, f)]),
    }
}

/// Verma module of highest weight `-lambda-2` on polynomials `X^0 .. X^d`,
/// with `f = X`, `h = -2 X d/dX - (lambda+2)`, `e = -X d^2/dX^2 - (lambda+2) d/dX`.
/// The action of `f` on `X^d` leaves the truncation and is dropped.
pub fn verma_truncated(lambda: u32, cutoff: usize) -> IrrepRealization {
    assert!(cutoff >= 1, "degree cutoff must be positive");
    let l = lambda as i64;
    let n = cutoff + 1;
    let mut e = IntMatrix::zeros(n, n);
    let mut f = IntMatrix::zeros(n, n);
    let mut h = IntMatrix::zeros(n, n);
    for k in 0..n {
        let ki = k as i64;
        h[(k, k)] = -2 * ki - l - 2;
        if k + 1 < n {
            f[(k + 1, k)] = 1;
        }
        if k > 0 {
            e[(k - 1, k)] = -ki * (ki + l + 1);
        }
    }
    IrrepRealization {
        algebra: Algebra::Sl2,
        highest_weight: vec![-l - 2],
        dim: n,
        highest_index: 0,
        truncated: true,
        generators: BTreeMap::from([(Generator::E, e), (Generator::H, h), (Generator::F, f)]),
    }
}

fn unit(n: usize, r: usize, c: usize) -> IntMatrix {
    let mut m = IntMatrix::zeros(n, n);
    m[(r, c)] = 1;
    m
}

fn sl3_defining() -> BTreeMap<Generator, IntMatrix> {
    BTreeMap::from([
        (Generator::E1, unit(3, 0, 1)),
        (Generator::E2, unit(3, 1, 2)),
        (Generator::F1, unit(3, 1, 0)),
        (Generator::F2, unit(3, 2, 1)),
        (Generator::H1, IntMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1, -1, 0]))),
        (Generator::H2, IntMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0, 1, -1]))),
    ])
}

/// Coordinates of a traceless 3x3 integer matrix in the basis
/// `[E1, E2, E3, H1, H2, F1, F2, F3]`.
fn adjoint_coordinates(m: &IntMatrix) -> [i64; 8] {
    [
        m[(0, 1)],
        m[(1, 2)],
        m[(0, 2)],
        m[(0, 0)],
        -m[(2, 2)],
        m[(1, 0)],
        m[(2, 1)],
        m[(2, 0)],
    ]
}

/// Small sl3 irreps: defining `(1,0)`, dual `(0,1)` and adjoint `(1,1)`.
pub fn sl3_irrep(weight: Weight) -> Result<IrrepRealization> {
    let Weight::Sl3(n1, n2) = weight else {
        return Err(Error::UnsupportedWeight(format!("{weight} is not an sl3 weight")));
    };
    let defining = sl3_defining();
    let (generators, highest_index) = match (n1, n2) {
        (1, 0) => (defining, 0),
        (0, 1) => (
            defining.into_iter().map(|(g, m)| (g, -m.transpose())).collect(),
            2,
        ),
        (1, 1) => {
            let e3 = unit(3, 0, 2);
            let f3 = unit(3, 2, 0);
            let basis = [
                defining[&Generator::E1].clone(),
                defining[&Generator::E2].clone(),
                e3,
                defining[&Generator::H1].clone(),
                defining[&Generator::H2].clone(),
                defining[&Generator::F1].clone(),
                defining[&Generator::F2].clone(),
                f3,
            ];
            let ad = |x: &IntMatrix| {
                let mut m = IntMatrix::zeros(8, 8);
                for (col, b) in basis.iter().enumerate() {
                    for (row, v) in adjoint_coordinates(&commutator(x, b)).into_iter().enumerate() {
                        m[(row, col)] = v;
                    }
                }
                m
            };
            (defining.iter().map(|(g, m)| (*g, ad(m))).collect(), 2)
        }
        _ => return Err(Error::UnsupportedWeight(format!("sl3 weight {weight}"))),
    };
    let dim = generators[&Generator::H1].nrows();
    Ok(IrrepRealization {
        algebra: Algebra::Sl3,
        highest_weight: vec![n1 as i64, n2 as i64],
        dim,
        highest_index,
        truncated: false,
        generators,
    })
}

pub fn irrep(weight: Weight) -> Result<IrrepRealization> {
    match weight {
        Weight::Sl2(l) => Ok(sl2_irrep(l)),
        Weight::Sl3(..) => sl3_irrep(weight),
    }
}

/// Tensor product of site modules with row-major multi-index basis
/// (site 1 is the most significant digit).
#[derive(Debug, Clone)]
pub struct TensorSpace {
    reps: Vec<IrrepRealization>,
    strides: Vec<usize>,
    dim: usize,
}

/// Coefficients of a vector in a [`TensorSpace`] basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorVector(pub Vec<C64>);

impl TensorVector {
    pub fn norm(&self) -> f64 {
        crate::linalg::vec_norm(&self.0)
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TensorSpace {
    pub fn new(reps: Vec<IrrepRealization>) -> Self {
        let mut strides = vec![1; reps.len()];
        for i in (0..reps.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * reps[i + 1].dim;
        }
        let dim = reps.iter().map(|r| r.dim).product();
        Self { reps, strides, dim }
    }

    pub fn from_weights(weights: &[Weight]) -> Result<Self> {
        Ok(Self::new(weights.iter().map(|&w| irrep(w)).collect::<Result<_>>()?))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sites(&self) -> usize {
        self.reps.len()
    }

    pub fn rep(&self, site: usize) -> &IrrepRealization {
        &self.reps[site]
    }

    pub fn algebra(&self) -> Algebra {
        self.reps.first().map_or(Algebra::Sl2, |r| r.algebra)
    }

    pub fn multi_index(&self, index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .zip(&self.reps)
            .map(|(&s, r)| (index / s) % r.dim)
            .collect()
    }

    pub fn index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(k, s)| k * s).sum()
    }

    /// Tensor product of the site highest-weight vectors.
    pub fn vacuum(&self) -> TensorVector {
        let multi: Vec<usize> = self.reps.iter().map(|r| r.highest_index).collect();
        let mut v = vec![ZERO; self.dim];
        v[self.index(&multi)] = C64::new(1.0, 0.0);
        TensorVector(v)
    }

    /// Total weight of basis vector `index`.
    pub fn basis_weight(&self, index: usize) -> Vec<i64> {
        let multi = self.multi_index(index);
        let mut w = vec![0; self.reps.first().map_or(1, |r| r.cartan().len())];
        for (rep, k) in self.reps.iter().zip(multi) {
            for (acc, x) in w.iter_mut().zip(rep.basis_weight(k)) {
                *acc += x;
            }
        }
        w
    }

    /// Embeds a product of local operators `ops = [(site, matrix), ...]`
    /// (distinct sites) as a sparse operator on the whole space.
    pub fn embed_product(&self, ops: &[(usize, &CMatrix)], coeff: C64) -> SparseMatrix {
        // Column-wise nonzero pattern of each local operator.
        let local: Vec<(usize, Vec<Vec<(usize, C64)>>)> = ops
            .iter()
            .map(|&(site, m)| {
                let cols = (0..m.ncols())
                    .map(|c| {
                        (0..m.nrows())
                            .filter(|&r| m[(r, c)] != ZERO)
                            .map(|r| (r, m[(r, c)]))
                            .collect()
                    })
                    .collect();
                (site, cols)
            })
            .collect();
        let mut triplets = Vec::new();
        for col in 0..self.dim {
            let multi = self.multi_index(col);
            let mut frontier = vec![(col, coeff)];
            for (site, cols) in &local {
                let k = multi[*site];
                let stride = self.strides[*site];
                let mut next = Vec::new();
                for &(idx, amp) in &frontier {
                    for &(r, v) in &cols[k] {
                        next.push((idx - k * stride + r * stride, amp * v));
                    }
                }
                frontier = next;
            }
            triplets.extend(frontier.into_iter().map(|(row, v)| (row, col, v)));
        }
        SparseMatrix::from_triplets(self.dim, self.dim, triplets)
    }

    pub fn site_operator(&self, site: usize, g: Generator) -> SparseMatrix {
        let m = self.reps[site].complex(g);
        self.embed_product(&[(site, &m)], C64::new(1.0, 0.0))
    }

    /// `sum_i a^(i)` for a generator `a`.
    pub fn total_operator(&self, g: Generator) -> SparseMatrix {
        (0..self.sites()).fold(SparseMatrix::zeros(self.dim, self.dim), |acc, i| {
            acc.add_scaled(&self.site_operator(i, g), C64::new(1.0, 0.0))
        })
    }

    /// `Omega^(ij) = sum_a J_a^(i) J_a^(j)` for `i != j`.
    pub fn casimir_pair(&self, i: usize, j: usize) -> SparseMatrix {
        assert_ne!(i, j);
        let mut acc = SparseMatrix::zeros(self.dim, self.dim);
        let terms_i = self.reps[i].split_casimir();
        let terms_j = self.reps[j].split_casimir();
        for ((c, x, _), (_, _, y)) in terms_i.iter().zip(&terms_j) {
            let (x, y) = (to_complex(x), to_complex(y));
            let term = self.embed_product(&[(i, &x), (j, &y)], C64::new(*c, 0.0));
            acc = acc.add_scaled(&term, C64::new(1.0, 0.0));
        }
        acc
    }
}

/// Orthonormal basis of highest-weight vectors of total weight `target`.
pub fn singular_vectors(space: &TensorSpace, target: Weight) -> Result<Vec<TensorVector>> {
    if target.algebra() != space.algebra() {
        return Err(Error::UnsupportedWeight(format!(
            "sector {target} does not match a {} tensor space",
            space.algebra()
        )));
    }
    let labels = target.labels();
    let columns: Vec<usize> = (0..space.dim()).filter(|&k| space.basis_weight(k) == labels).collect();
    if columns.is_empty() {
        return Ok(Vec::new());
    }
    let raising: Vec<SparseMatrix> = match space.algebra() {
        Algebra::Sl2 => vec![space.total_operator(Generator::E)],
        Algebra::Sl3 => vec![space.total_operator(Generator::E1), space.total_operator(Generator::E2)],
    };
    // Rows touched by the raising operators acting on the weight space.
    let mut row_of = BTreeMap::new();
    let mut entries = Vec::new();
    for (block, op) in raising.iter().enumerate() {
        let col_pos: BTreeMap<usize, usize> = columns.iter().enumerate().map(|(p, &c)| (c, p)).collect();
        for (r, c, v) in op.iter() {
            if let Some(&p) = col_pos.get(&c) {
                let next = row_of.len();
                let row = *row_of.entry((block, r)).or_insert(next);
                entries.push((row, p, v));
            }
        }
    }
    let mut a = CMatrix::zeros(row_of.len(), columns.len());
    for (r, c, v) in entries {
        a[(r, c)] += v;
    }
    Ok(null_space(&a, KERNEL_TOLERANCE)
        .into_iter()
        .map(|k| {
            let mut v = vec![ZERO; space.dim()];
            for (p, &c) in columns.iter().enumerate() {
                v[c] = k[p];
            }
            TensorVector(v)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_sl2_relations(rep: &IrrepRealization, safe: usize) {
        let e = rep.generator(Generator::E);
        let f = rep.generator(Generator::F);
        let h = rep.generator(Generator::H);
        let ef = commutator(e, f);
        let he = commutator(h, e);
        let hf = commutator(h, f);
        for k in 0..safe {
            for r in 0..rep.dim {
                assert_eq!(ef[(r, k)], h[(r, k)], "[e,f] = h at column {k}");
                assert_eq!(he[(r, k)], 2 * e[(r, k)], "[h,e] = 2e at column {k}");
                assert_eq!(hf[(r, k)], -2 * f[(r, k)], "[h,f] = -2f at column {k}");
            }
        }
    }

    #[test]
    fn trivial_irrep_is_zero() {
        let rep = sl2_irrep(0);
        for (_, m) in rep.generators() {
            assert_eq!(m, &IntMatrix::zeros(1, 1));
        }
    }

    #[test]
    fn spin_half_conventions() {
        let rep = sl2_irrep(1);
        assert_eq!(rep.generator(Generator::H), &IntMatrix::from_row_slice(2, 2, &[-1, 0, 0, 1]));
        // e: x^0 -> x^1, f: x^1 -> x^0
        assert_eq!(rep.generator(Generator::E), &IntMatrix::from_row_slice(2, 2, &[0, 0, 1, 0]));
        assert_eq!(rep.generator(Generator::F), &IntMatrix::from_row_slice(2, 2, &[0, 1, 0, 0]));
        assert_eq!(rep.highest_index, 1);
    }

    #[test]
    fn spin_one_commutator() {
        let rep = sl2_irrep(2);
        let ef = commutator(rep.generator(Generator::E), rep.generator(Generator::F));
        assert_eq!(ef, IntMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-2, 0, 2])));
        check_sl2_relations(&rep, 3);
    }

    #[test]
    fn sl2_relations_all_small_weights() {
        for l in 0..8 {
            let rep = sl2_irrep(l);
            check_sl2_relations(&rep, rep.dim);
            // e kills the highest-weight vector, f kills the lowest.
            assert!(rep.generator(Generator::E).column(rep.highest_index).iter().all(|&x| x == 0));
            assert!(rep.generator(Generator::F).column(0).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn verma_action() {
        let rep = verma_truncated(1, 3);
        assert_eq!(rep.generator(Generator::H)[(0, 0)], -3);
        let f = rep.generator(Generator::F);
        for k in 0..3 {
            assert_eq!(f[(k + 1, k)], 1);
        }
        assert!(f.column(3).iter().all(|&x| x == 0), "overflow is dropped");
        assert!(rep.truncated);
        // X^0 is a highest-weight vector of weight -lambda-2.
        assert!(rep.generator(Generator::E).column(0).iter().all(|&x| x == 0));
        assert_eq!(rep.highest_weight, vec![-3]);
    }

    #[test]
    fn verma_relations_on_safe_degrees() {
        for l in 0..4 {
            let d = 6;
            let rep = verma_truncated(l, d);
            check_sl2_relations(&rep, d - 1);
        }
    }

    #[test]
    fn sl3_chevalley_relations() {
        for w in [Weight::Sl3(1, 0), Weight::Sl3(0, 1), Weight::Sl3(1, 1)] {
            let rep = sl3_irrep(w).unwrap();
            let g = |x| rep.generator(x).clone();
            let cartan = [[2, -1], [-1, 2]];
            let es = [g(Generator::E1), g(Generator::E2)];
            let fs = [g(Generator::F1), g(Generator::F2)];
            let hs = [g(Generator::H1), g(Generator::H2)];
            for i in 0..2 {
                for j in 0..2 {
                    let ef = commutator(&es[i], &fs[j]);
                    if i == j {
                        assert_eq!(ef, hs[i]);
                    } else {
                        assert_eq!(ef, IntMatrix::zeros(rep.dim, rep.dim));
                    }
                    assert_eq!(commutator(&hs[i], &es[j]), &es[j] * cartan[j][i]);
                    assert_eq!(commutator(&hs[i], &fs[j]), &fs[j] * (-cartan[j][i]));
                }
                assert_eq!(commutator(&hs[0], &hs[1]), IntMatrix::zeros(rep.dim, rep.dim));
            }
            // Serre relations: ad(e_i)^2 e_j = 0 for i != j.
            for (i, j) in [(0, 1), (1, 0)] {
                let inner = commutator(&es[i], &es[j]);
                assert_eq!(commutator(&es[i], &inner), IntMatrix::zeros(rep.dim, rep.dim));
                let inner = commutator(&fs[i], &fs[j]);
                assert_eq!(commutator(&fs[i], &inner), IntMatrix::zeros(rep.dim, rep.dim));
            }
            assert_eq!(rep.basis_weight(rep.highest_index), w.labels());
            for e in rep.raising() {
                assert!(e.column(rep.highest_index).iter().all(|&x| x == 0));
            }
        }
    }

    #[test]
    fn sl3_defining_weights_and_conventions() {
        let rep = sl3_irrep(Weight::Sl3(1, 0)).unwrap();
        let weights: Vec<_> = (0..3).map(|k| rep.basis_weight(k)).collect();
        // omega_1, omega_1 - alpha_1, omega_1 - alpha_1 - alpha_2
        assert_eq!(weights, vec![vec![1, 0], vec![-1, 1], vec![0, -1]]);
        assert_eq!(rep.generator(Generator::E1), &unit(3, 0, 1));
    }

    #[test]
    fn sl3_orthonormal_basis_and_casimir() {
        let rep = sl3_irrep(Weight::Sl3(1, 0)).unwrap();
        let basis = rep.orthonormal_basis();
        assert_eq!(basis.len(), 8);
        for (a, ja) in basis.iter().enumerate() {
            for (b, jb) in basis.iter().enumerate() {
                let tr = (ja * jb).trace();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((tr - C64::new(expected, 0.0)).norm() < 1e-14);
            }
        }
        let cas = basis.iter().fold(CMatrix::zeros(3, 3), |acc, j| acc + j * j);
        assert!((cas - CMatrix::identity(3, 3) * C64::new(8.0 / 3.0, 0.0)).norm() < 1e-14);
        // Casimir (lambda, lambda + 2 rho) with Gram [[2,-1],[-1,2]] on simple roots.
        let adj = sl3_irrep(Weight::Sl3(1, 1)).unwrap();
        assert!((adj.casimir_value() - C64::new(6.0, 0.0)).norm() < 1e-13);
        let dual = sl3_irrep(Weight::Sl3(0, 1)).unwrap();
        assert!((dual.casimir_value() - C64::new(8.0 / 3.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn split_casimir_matches_orthonormal_basis() {
        for w in [Weight::Sl2(1), Weight::Sl3(1, 0)] {
            let space = TensorSpace::from_weights(&[w, w]).unwrap();
            let exact = space.casimir_pair(0, 1).to_dense();
            let basis = space.rep(0).orthonormal_basis();
            let mut from_basis = CMatrix::zeros(space.dim(), space.dim());
            for j in &basis {
                from_basis += space.embed_product(&[(0, j), (1, j)], C64::new(1.0, 0.0)).to_dense();
            }
            assert!((exact - from_basis).norm() < 1e-13);
        }
    }

    #[test]
    fn unsupported_sl3_weight() {
        assert!(matches!(sl3_irrep(Weight::Sl3(2, 0)), Err(Error::UnsupportedWeight(_))));
    }

    #[test]
    fn tensor_indexing_roundtrip() {
        let space = TensorSpace::from_weights(&[Weight::Sl2(1), Weight::Sl2(2), Weight::Sl2(3)]).unwrap();
        assert_eq!(space.dim(), 24);
        for k in 0..space.dim() {
            assert_eq!(space.index(&space.multi_index(k)), k);
        }
        assert_eq!(space.multi_index(1), vec![0, 0, 1]);
    }

    fn sector_dim(weights: &[u32], target: u32) -> usize {
        let ws: Vec<_> = weights.iter().map(|&l| Weight::Sl2(l)).collect();
        let space = TensorSpace::from_weights(&ws).unwrap();
        singular_vectors(&space, Weight::Sl2(target)).unwrap().len()
    }

    #[test]
    fn clebsch_gordan_sectors() {
        assert_eq!(sector_dim(&[1, 1], 0), 1);
        assert_eq!(sector_dim(&[1, 1], 2), 1);
        assert_eq!(sector_dim(&[1, 1], 1), 0);
        assert_eq!(sector_dim(&[1, 1, 1], 1), 2);
        assert_eq!(sector_dim(&[1, 1, 1], 3), 1);
    }

    #[test]
    fn complete_reducibility_dimension_count() {
        for weights in [vec![1, 1, 1, 1], vec![2, 1, 3], vec![3, 3]] {
            let total: u32 = weights.iter().sum();
            let dim: usize = weights.iter().map(|&l| l as usize + 1).product();
            let count: usize = (0..=total).map(|l| sector_dim(&weights, l) * (l as usize + 1)).sum();
            assert_eq!(count, dim, "weights {weights:?}");
        }
    }

    #[test]
    fn singular_vectors_have_exact_weight() {
        let space = TensorSpace::from_weights(&[Weight::Sl2(2), Weight::Sl2(1), Weight::Sl2(1)]).unwrap();
        let h = space.total_operator(Generator::H);
        let e = space.total_operator(Generator::E);
        for v in singular_vectors(&space, Weight::Sl2(2)).unwrap() {
            let hv = h.matvec(v.as_slice());
            for (a, b) in hv.iter().zip(v.as_slice()) {
                assert!((a - b * 2.0).norm() < 1e-13);
            }
            assert!(crate::linalg::vec_norm(&e.matvec(v.as_slice())) < 1e-12);
        }
    }

    #[test]
    fn sl3_singular_sectors_of_3x3() {
        let space = TensorSpace::from_weights(&[Weight::Sl3(1, 0), Weight::Sl3(1, 0)]).unwrap();
        assert_eq!(singular_vectors(&space, Weight::Sl3(2, 0)).unwrap().len(), 1);
        assert_eq!(singular_vectors(&space, Weight::Sl3(0, 1)).unwrap().len(), 1);
        assert_eq!(singular_vectors(&space, Weight::Sl3(1, 1)).unwrap().len(), 0);
    }
}
