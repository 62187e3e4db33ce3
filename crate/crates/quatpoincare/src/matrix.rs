//! Dense exact linear algebra over Q and Q(i).
//!
//! Everything here is deterministic: elimination always picks the leftmost
//! pivot column, and within a column the candidate row whose (denominator
//! cleared) numerator has smallest magnitude, ties broken by smallest row
//! index. Nullspace bases are read off the canonical reduced row echelon
//! form, so identical inputs produce identical bases on every platform.

use crate::scalar::{Rational, Scalar};
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<S: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

pub type RatMatrix = Matrix<Rational>;

impl<S: Scalar> std::fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format!("{}", self.at(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut S {
        &mut self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    /// Entrywise conjugate (identity over Q).
    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| Scalar::conj(self.at(r, c)))
    }

    pub fn map<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> Matrix<T> {
        Matrix::from_fn(self.rows, self.cols, |r, c| f(self.at(r, c)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |r, c| {
            self.at(r, c).clone() + other.at(r, c).clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |r, c| {
            self.at(r, c).clone() - other.at(r, c).clone()
        })
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| -self.at(r, c).clone())
    }

    pub fn scale(&self, k: &S) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self.at(r, c).clone() * k.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(r, c).clone();
                    out.set(r, c, cur + a.clone() * b.clone());
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = S::zero();
                for c in 0..self.cols {
                    if !self.at(r, c).is_zero() && !v[c].is_zero() {
                        acc = acc + self.at(r, c).clone() * v[c].clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Kronecker product; `(A (x) B)(C (x) D) = AC (x) BD` whenever the shapes
    /// compose.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.at(k, l);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(i * other.rows + k, j * other.cols + l, a.clone() * b.clone());
                    }
                }
            }
        }
        out
    }

    pub fn block_diag(blocks: &[&Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    if !b.at(r, c).is_zero() {
                        out.set(ro + r, co + c, b.at(r, c).clone());
                    }
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols { self.at(r, c).clone() } else { other.at(r, c - self.cols).clone() }
        })
    }

    pub fn column(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn flatten(&self) -> Vec<S> {
        self.data.clone()
    }

    /// Fraction-free Gaussian elimination (Bareiss updates on denominator
    /// cleared rows) followed by back substitution to the canonical RREF.
    /// Returns the RREF together with the pivot columns.
    fn rref(&self) -> (Matrix<S>, Vec<usize>) {
        let mut m: Vec<Vec<S>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let (nr, nc) = (self.rows, self.cols);
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut pivot_row = 0usize;
        let mut prev_pivot = S::one();
        for col in 0..nc {
            if pivot_row == nr {
                break;
            }
            // deterministic pivot: smallest numerator magnitude, then
            // smallest row index
            let mut best: Option<(num_bigint::BigUint, usize)> = None;
            for r in pivot_row..nr {
                if !m[r][col].is_zero() {
                    let sz = m[r][col].pivot_size();
                    match &best {
                        Some((bs, _)) if *bs <= sz => {}
                        _ => best = Some((sz, r)),
                    }
                }
            }
            let Some((_, r)) = best else { continue };
            m.swap(pivot_row, r);
            let p = m[pivot_row][col].clone();
            for r2 in pivot_row + 1..nr {
                if m[r2][col].is_zero() {
                    // Bareiss still rescales untouched rows to keep the
                    // division exact at the next step
                    for c2 in col..nc {
                        if !m[r2][c2].is_zero() {
                            let v = m[r2][c2].clone() * p.clone() / prev_pivot.clone();
                            m[r2][c2] = v;
                        }
                    }
                    continue;
                }
                let f = m[r2][col].clone();
                for c2 in col..nc {
                    let v = (m[r2][c2].clone() * p.clone()
                        - m[pivot_row][c2].clone() * f.clone())
                        / prev_pivot.clone();
                    m[r2][c2] = v;
                }
            }
            prev_pivot = p;
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }
        // back substitution to the canonical reduced form
        for k in (0..pivots.len()).rev() {
            let (pr, pc) = pivots[k];
            let p = m[pr][pc].clone();
            for c in pc..nc {
                if !m[pr][c].is_zero() {
                    let v = m[pr][c].clone() / p.clone();
                    m[pr][c] = v;
                }
            }
            for r in 0..pr {
                if !m[r][pc].is_zero() {
                    let f = m[r][pc].clone();
                    for c in pc..nc {
                        let v = m[r][c].clone() - f.clone() * m[pr][c].clone();
                        m[r][c] = v;
                    }
                }
            }
        }
        (Matrix { rows: nr, cols: nc, data: m.into_iter().flatten().collect() }, pivots.into_iter().map(|(_, c)| c).collect())
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{ v : A v = 0 }`, read off the canonical RREF; the basis
    /// vectors carry a 1 in their free coordinate.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let (rref, pivots) = self.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![S::zero(); self.cols];
            v[free] = S::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -rref.at(row, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Exact solution of `A x = b` (particular solution with free variables
    /// set to zero), or `None` when inconsistent.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert_eq!(self.rows, b.len());
        let aug = self.hcat(&Matrix { rows: self.rows, cols: 1, data: b.to_vec() });
        let (rref, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the rhs column
        }
        let mut x = vec![S::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = rref.at(row, self.cols).clone();
        }
        Some(x)
    }

    /// Exact inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let aug = self.hcat(&Self::identity(n));
        let (rref, pivots) = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
            return None;
        }
        Some(Self::from_fn(n, n, |r, c| rref.at(r, n + c).clone()))
    }

    /// Returns `c` with `self = c * other` exactly, if such a scalar exists.
    /// A zero `self` yields `c = 0`.
    pub fn solve_proportionality(&self, other: &Self) -> Option<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        assert!(!other.is_zero(), "proportionality target must be nonzero");
        let mut c = S::zero();
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            if !b.is_zero() {
                c = a.clone() / b.clone();
                break;
            }
            if !a.is_zero() {
                return None;
            }
        }
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            if a.clone() != c.clone() * b.clone() {
                return None;
            }
        }
        Some(c)
    }
}

/// Sylvester inertia of a symmetric rational matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inertia {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl Inertia {
    pub fn is_positive_definite(&self) -> bool {
        self.n_minus == 0 && self.n_zero == 0
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not skew-symmetric")]
    NotSkewSymmetric,
}

impl Matrix<Rational> {
    /// Sylvester inertia via symmetric LDL^T elimination with 1x1 and 2x2
    /// pivots, entirely over Q.
    pub fn inertia(&self) -> Result<Inertia, LinAlgError> {
        if self.rows != self.cols || *self != self.transpose() {
            return Err(LinAlgError::NotSymmetric);
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut idx: Vec<usize> = (0..n).collect(); // active trailing indices
        let mut inertia = Inertia { n_plus: 0, n_minus: 0, n_zero: 0 };
        while !idx.is_empty() {
            // prefer a 1x1 pivot on the first nonzero diagonal entry
            if let Some(pos) = idx.iter().position(|&i| !m.at(i, i).is_zero()) {
                let k = idx.remove(pos);
                let p = m.at(k, k).clone();
                if p.numer().is_positive() {
                    inertia.n_plus += 1;
                } else {
                    inertia.n_minus += 1;
                }
                for &i in &idx {
                    if m.at(i, k).is_zero() {
                        continue;
                    }
                    let f = m.at(i, k).clone() / p.clone();
                    for &j in &idx {
                        let v = m.at(i, j).clone() - f.clone() * m.at(k, j).clone();
                        m.set(i, j, v);
                    }
                }
                continue;
            }
            // all trailing diagonal entries vanish: look for a 2x2 pivot
            // [[0,a],[a,0]], which contributes one positive and one
            // negative eigenvalue
            let mut pair = None;
            'outer: for (pi, &i) in idx.iter().enumerate() {
                for (pj, &j) in idx.iter().enumerate().skip(pi + 1) {
                    if !m.at(i, j).is_zero() {
                        pair = Some((pi, pj));
                        break 'outer;
                    }
                }
            }
            let Some((pi, pj)) = pair else {
                inertia.n_zero += idx.len();
                break;
            };
            let j = idx.remove(pj);
            let i = idx.remove(pi);
            let a = m.at(i, j).clone();
            inertia.n_plus += 1;
            inertia.n_minus += 1;
            for &r in &idx {
                let u = m.at(r, i).clone();
                let v = m.at(r, j).clone();
                if u.is_zero() && v.is_zero() {
                    continue;
                }
                // subtract (v/a) row_i + (u/a) row_j
                let c1 = v / a.clone();
                let c2 = u / a.clone();
                for &s in &idx {
                    let val = m.at(r, s).clone()
                        - c1.clone() * m.at(i, s).clone()
                        - c2.clone() * m.at(j, s).clone();
                    m.set(r, s, val);
                }
            }
        }
        Ok(inertia)
    }

    /// Exact symmetric congruence diagonalization: returns `(P, d)` with
    /// `P^T S P = diag(d)`, `P` invertible. Isotropic pivots are repaired by
    /// the standard deterministic column addition.
    pub fn congruence_diagonalize(&self) -> Result<(RatMatrix, Vec<Rational>), LinAlgError> {
        if self.rows != self.cols || *self != self.transpose() {
            return Err(LinAlgError::NotSymmetric);
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut p = RatMatrix::identity(n);
        // column operation col_i += f * col_j applied congruently
        let col_add = |m: &mut RatMatrix, p: &mut RatMatrix, i: usize, j: usize, f: &Rational| {
            for r in 0..n {
                let v = m.at(r, i).clone() + f.clone() * m.at(r, j).clone();
                m.set(r, i, v);
            }
            for c in 0..n {
                let v = m.at(i, c).clone() + f.clone() * m.at(j, c).clone();
                m.set(i, c, v);
            }
            for r in 0..n {
                let v = p.at(r, i).clone() + f.clone() * p.at(r, j).clone();
                p.set(r, i, v);
            }
        };
        let swap = |m: &mut RatMatrix, p: &mut RatMatrix, i: usize, j: usize| {
            for r in 0..n {
                let (a, b) = (m.at(r, i).clone(), m.at(r, j).clone());
                m.set(r, i, b);
                m.set(r, j, a);
            }
            for c in 0..n {
                let (a, b) = (m.at(i, c).clone(), m.at(j, c).clone());
                m.set(i, c, b);
                m.set(j, c, a);
            }
            for r in 0..n {
                let (a, b) = (p.at(r, i).clone(), p.at(r, j).clone());
                p.set(r, i, b);
                p.set(r, j, a);
            }
        };
        for k in 0..n {
            if m.at(k, k).is_zero() {
                if let Some(j) = (k + 1..n).find(|&j| !m.at(j, j).is_zero()) {
                    swap(&mut m, &mut p, k, j);
                } else if let Some((i, j)) = (k..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !m.at(i, j).is_zero())
                {
                    col_add(&mut m, &mut p, i, j, &Rational::one());
                    if i != k {
                        swap(&mut m, &mut p, k, i);
                    }
                } else {
                    break; // trailing block is zero
                }
            }
            let pk = m.at(k, k).clone();
            for i in k + 1..n {
                if m.at(k, i).is_zero() {
                    continue;
                }
                let f = -m.at(k, i).clone() / pk.clone();
                col_add(&mut m, &mut p, i, k, &f);
            }
        }
        let d = (0..n).map(|i| m.at(i, i).clone()).collect();
        Ok((p, d))
    }

    /// Exact Darboux reduction of a skew form: returns `(P, pairs)` with
    /// `P^T A P` consisting of `pairs` leading `[[0,1],[-1,0]]` blocks
    /// followed by zeros. The first unmatched vector always pairs with its
    /// earliest non-orthogonal partner.
    pub fn darboux_reduce(&self) -> Result<(RatMatrix, usize), LinAlgError> {
        if self.rows != self.cols || *self != self.transpose().neg() {
            return Err(LinAlgError::NotSkewSymmetric);
        }
        let n = self.rows;
        let pairing = |a: &RatMatrix, u: &[Rational], v: &[Rational]| -> Rational {
            let av = a.mul_vec(v);
            u.iter().zip(av.iter()).map(|(x, y)| x.clone() * y.clone()).fold(Rational::zero(), |s, t| s + t)
        };
        let mut remaining: Vec<Vec<Rational>> =
            (0..n).map(|c| RatMatrix::identity(n).column(c)).collect();
        let mut pairs: Vec<(Vec<Rational>, Vec<Rational>)> = Vec::new();
        let mut kernel: Vec<Vec<Rational>> = Vec::new();
        while let Some(u) = if remaining.is_empty() { None } else { Some(remaining.remove(0)) } {
            let partner = remaining.iter().position(|v| !pairing(self, &u, v).is_zero());
            let Some(pidx) = partner else {
                kernel.push(u);
                continue;
            };
            let mut v = remaining.remove(pidx);
            let c = pairing(self, &u, &v);
            v = v.iter().map(|x| x.clone() / c.clone()).collect(); // A(u,v) = 1
            for w in remaining.iter_mut().chain(kernel.iter_mut()) {
                let a_uw = pairing(self, &u, w);
                let a_vw = pairing(self, &v, w);
                // w := w - A(u,w) v + A(v,w) u kills both pairings
                for i in 0..n {
                    let val = w[i].clone() - a_uw.clone() * v[i].clone()
                        + a_vw.clone() * u[i].clone();
                    w[i] = val;
                }
            }
            pairs.push((u, v));
        }
        let npairs = pairs.len();
        let mut cols: Vec<Vec<Rational>> = Vec::with_capacity(n);
        for (u, v) in pairs {
            cols.push(u);
            cols.push(v);
        }
        cols.extend(kernel);
        let p = RatMatrix::from_fn(n, n, |r, c| cols[c][r].clone());
        Ok((p, npairs))
    }
}

/// Incremental canonical row reducer: maintains the unique RREF of the span
/// of every inserted vector. Used for large sparse linear systems (rows are
/// folded in one by one) and for exact span arithmetic (membership, span
/// equality, quotient coordinates).
#[derive(Clone)]
pub struct RowReducer<S: Scalar> {
    cols: usize,
    rows: Vec<Vec<S>>,       // RREF rows ordered by pivot column
    pivot_cols: Vec<usize>,  // ascending
}

impl<S: Scalar> RowReducer<S> {
    pub fn new(cols: usize) -> Self {
        RowReducer { cols, rows: Vec::new(), pivot_cols: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Reduces `v` against the current basis (returns the residual).
    pub fn reduce(&self, mut v: Vec<S>) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        for (row, &pc) in self.rows.iter().zip(self.pivot_cols.iter()) {
            if !v[pc].is_zero() {
                let f = v[pc].clone();
                for c in pc..self.cols {
                    if !row[c].is_zero() {
                        let val = v[c].clone() - f.clone() * row[c].clone();
                        v[c] = val;
                    }
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[S]) -> bool {
        self.reduce(v.to_vec()).iter().all(|x| x.is_zero())
    }

    /// Inserts a vector; returns `true` if it enlarged the span.
    pub fn insert(&mut self, v: Vec<S>) -> bool {
        let mut v = self.reduce(v);
        let Some(lead) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let p = v[lead].clone();
        for c in lead..self.cols {
            if !v[c].is_zero() {
                let val = v[c].clone() / p.clone();
                v[c] = val;
            }
        }
        // eliminate the new pivot column from existing rows
        for row in self.rows.iter_mut() {
            if !row[lead].is_zero() {
                let f = row[lead].clone();
                for c in lead..self.cols {
                    if !v[c].is_zero() {
                        let val = row[c].clone() - f.clone() * v[c].clone();
                        row[c] = val;
                    }
                }
            }
        }
        let pos = self.pivot_cols.partition_point(|&c| c < lead);
        self.pivot_cols.insert(pos, lead);
        self.rows.insert(pos, v);
        true
    }

    pub fn insert_all<I: IntoIterator<Item = Vec<S>>>(&mut self, it: I) {
        for v in it {
            self.insert(v);
        }
    }

    /// Canonical basis of the span (RREF rows); two spans are equal iff
    /// these agree.
    pub fn canonical_rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn same_span(&self, other: &RowReducer<S>) -> bool {
        self.cols == other.cols
            && self.pivot_cols == other.pivot_cols
            && self.rows == other.rows
    }

    /// Treats the stored rows as a homogeneous system and returns the
    /// canonical nullspace basis.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        if self.rows.is_empty() {
            return Matrix::<S>::zeros(1, self.cols).nullspace();
        }
        Matrix::from_rows(self.rows.clone()).nullspace()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gauss, rat, rint, GaussianRational};
    use num_traits::Zero;

    fn rm(rows: &[&[i64]]) -> RatMatrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rint(x)).collect()).collect())
    }

    #[test]
    fn nullspace_zero_map() {
        let a = RatMatrix::zeros(2, 2);
        assert_eq!(a.nullspace().len(), 2);
    }

    #[test]
    fn nullspace_injective() {
        let a = RatMatrix::identity(3);
        assert!(a.nullspace().is_empty());
    }

    #[test]
    fn nullspace_rank_one() {
        // [[1,2],[2,4]] has kernel spanned by a vector proportional to (2,-1)
        let a = rm(&[&[1, 2], &[2, 4]]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert!(a.mul_vec(v).iter().all(|x| x.is_zero()));
        assert_eq!(v[0].clone() * rint(-1), v[1].clone() * rint(2));
        assert_eq!(a.rank() + ns.len(), 2);
    }

    #[test]
    fn nullspace_exactness_property() {
        let a = rm(&[&[3, 1, 4, 1], &[5, 9, 2, 6], &[8, 10, 6, 7]]);
        let ns = a.nullspace();
        for v in &ns {
            assert!(a.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        assert_eq!(a.rank() + ns.len(), a.cols());
    }

    #[test]
    fn inertia_examples() {
        assert_eq!(
            RatMatrix::identity(4).inertia().unwrap(),
            Inertia { n_plus: 4, n_minus: 0, n_zero: 0 }
        );
        let d = rm(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, 0]]);
        assert_eq!(d.inertia().unwrap(), Inertia { n_plus: 1, n_minus: 1, n_zero: 1 });
        // leading principal minors 2 and 3 are positive
        let s = rm(&[&[2, 1], &[1, 2]]);
        assert_eq!(s.inertia().unwrap(), Inertia { n_plus: 2, n_minus: 0, n_zero: 0 });
        // hyperbolic plane needs the 2x2 pivot path
        let h = rm(&[&[0, 1], &[1, 0]]);
        assert_eq!(h.inertia().unwrap(), Inertia { n_plus: 1, n_minus: 1, n_zero: 0 });
        assert_eq!(rm(&[&[0, 1], &[0, 0]]).inertia(), Err(LinAlgError::NotSymmetric));
    }

    #[test]
    fn inertia_congruence_invariance() {
        // deterministic pseudo-random invertible congruences
        let s = rm(&[&[2, 1, 0], &[1, -3, 1], &[0, 1, 0]]);
        let base = s.inertia().unwrap();
        let mut seed: i64 = 9;
        for _ in 0..6 {
            let mut p = rm(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
            for r in 0..3 {
                for c in 0..3 {
                    if r != c {
                        seed = (seed * 31 + 7) % 11;
                        p.set(r, c, rint(seed - 5));
                    }
                }
            }
            if p.inverse().is_none() {
                continue;
            }
            let congruent = p.transpose().mul(&s).mul(&p);
            assert_eq!(congruent.inertia().unwrap(), base);
        }
    }

    #[test]
    fn kron_examples() {
        let i2 = RatMatrix::identity(2);
        assert_eq!(i2.kron(&i2), RatMatrix::identity(4));
        let c = rm(&[&[1, 0], &[0, -1]]);
        let expect = rm(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, -1, 0], &[0, 0, 0, -1]]);
        assert_eq!(c.kron(&i2), expect);
        let a = rm(&[&[0, 1], &[1, 0]]);
        let b = rm(&[&[0, 1], &[-1, 0]]);
        let ab = a.kron(&b);
        let expect = rm(&[
            &[0, 0, 0, 1],
            &[0, 0, -1, 0],
            &[0, 1, 0, 0],
            &[-1, 0, 0, 0],
        ]);
        assert_eq!(ab, expect);
        // mixed-product property
        let lhs = a.kron(&b).mul(&c.kron(&i2));
        let rhs = a.mul(&c).kron(&b.mul(&i2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn proportionality() {
        let t = rm(&[&[1, 2], &[0, 1]]);
        let s = t.scale(&rint(2));
        assert_eq!(s.solve_proportionality(&t), Some(rint(2)));
        let z = RatMatrix::zeros(2, 2);
        assert_eq!(z.solve_proportionality(&t), Some(rint(0)));
        let s = rm(&[&[1, 0], &[0, 2]]);
        assert_eq!(s.solve_proportionality(&RatMatrix::identity(2)), None);
    }

    #[test]
    fn solve_and_inverse() {
        let a = rm(&[&[2, 1], &[1, 1]]);
        let x = a.solve(&[rint(3), rint(2)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![rint(3), rint(2)]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), RatMatrix::identity(2));
        let sing = rm(&[&[1, 2], &[2, 4]]);
        assert!(sing.inverse().is_none());
        assert!(sing.solve(&[rint(1), rint(0)]).is_none());
    }

    #[test]
    fn congruence_diagonalize_hyperbolic() {
        let h = rm(&[&[0, 1], &[1, 0]]);
        let (p, d) = h.congruence_diagonalize().unwrap();
        let m = p.transpose().mul(&h).mul(&p);
        for i in 0..2 {
            for j in 0..2 {
                if i == j {
                    assert_eq!(m.at(i, j), &d[i]);
                } else {
                    assert!(m.at(i, j).is_zero());
                }
            }
        }
        assert!(p.inverse().is_some());
        assert!(d.iter().all(|x| !x.is_zero()));
    }

    #[test]
    fn darboux_reduces_skew_form() {
        let a = rm(&[
            &[0, 2, 1, 0],
            &[-2, 0, 0, 3],
            &[-1, 0, 0, 1],
            &[0, -3, -1, 0],
        ]);
        let (p, pairs) = a.darboux_reduce().unwrap();
        assert_eq!(pairs, 2);
        let red = p.transpose().mul(&a).mul(&p);
        let expect = RatMatrix::block_diag(&[&rm(&[&[0, 1], &[-1, 0]]), &rm(&[&[0, 1], &[-1, 0]])]);
        assert_eq!(red, expect);
    }

    #[test]
    fn reducer_matches_batch_nullspace() {
        let a = rm(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let mut red = RowReducer::new(3);
        for r in 0..3 {
            red.insert(a.row(r).to_vec());
        }
        assert_eq!(red.rank(), 2);
        assert_eq!(red.nullspace(), a.nullspace());
        assert!(red.contains(&[rint(3), rint(6), rint(9)]));
        assert!(!red.contains(&[rint(1), rint(0), rint(0)]));
    }

    #[test]
    fn gaussian_rational_elimination() {
        let i = gauss(rint(0), rint(1));
        let one: GaussianRational = gauss(rint(1), rint(0));
        // rank over Q(i): [[1, i],[i, -1]] has rank 1
        let m = Matrix::from_rows(vec![
            vec![one.clone(), i.clone()],
            vec![i.clone(), -one.clone()],
        ]);
        assert_eq!(m.rank(), 1);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        for v in &ns {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        let _ = rat(1, 2);
    }
}
