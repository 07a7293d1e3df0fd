//! Exact integer linear algebra.
//!
//! Everything in this crate that talks about homology ends up here: boundary
//! and incidence matrices, Koszul differentials, subgroup lattices. Matrices
//! hold arbitrary precision integers and the central routine is a Smith normal
//! form with the convention `S = U * A * V`, where `U` and `V` are unimodular.
//! Pivoting is deterministic (smallest magnitude nonzero entry, lowest
//! row-major index on ties), so the same input always yields the same
//! decomposition.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("not a complex: outgoing differential composed with incoming differential is nonzero")]
    NotAComplex,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Dense integer matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row-major entries. Panics if the length is not
    /// `rows * cols`.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must equal rows * cols");
        Self { rows, cols, entries }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Convenience constructor for small literal matrices. All rows must have
    /// length `cols`; `cols` is needed so that `0 x n` matrices are expressible.
    pub fn from_i64_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row");
            entries.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Self {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let cols = columns.len();
        Self::from_fn(rows, cols, |i, j| {
            assert_eq!(columns[j].len(), rows, "column length mismatch");
            columns[j][i].clone()
        })
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[BigInt]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Columns `range` of `self`, as a new matrix.
    pub fn select_columns(&self, cols: impl IntoIterator<Item = usize>) -> Self {
        let picked: Vec<usize> = cols.into_iter().collect();
        Self::from_fn(self.rows, picked.len(), |i, j| self.get(i, picked[j]).clone())
    }

    pub fn select_rows(&self, rows: impl IntoIterator<Item = usize>) -> Self {
        let picked: Vec<usize> = rows.into_iter().collect();
        Self::from_fn(picked.len(), self.cols, |i, j| self.get(picked[i], j).clone())
    }

    /// Horizontal concatenation. Both sides must have the same row count.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            let (a, b) = (i / other.rows, i % other.rows);
            let (c, d) = (j / other.cols, j % other.cols);
            self.get(a, c) * other.get(b, d)
        })
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x * c).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        smith(self).rank()
    }

    /// Determinant of a square matrix by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !m.get(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                m.swap_rows(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += c * row[src]
    fn add_row_multiple(&mut self, target: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let delta = c * &self.entries[src * self.cols + j];
            self.entries[target * self.cols + j] += delta;
        }
    }

    /// col[target] += c * col[src]
    fn add_col_multiple(&mut self, target: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let delta = c * &self.entries[i * self.cols + src];
            self.entries[i * self.cols + target] += delta;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let e = &mut self.entries[i * self.cols + j];
            *e = -std::mem::take(e);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let e = &mut self.entries[i * self.cols + j];
            *e = -std::mem::take(e);
        }
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerMatrix({}x{})", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Mul for &IntegerMatrix {
    type Output = IntegerMatrix;

    fn mul(self, rhs: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "cannot multiply {}x{} by {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = IntegerMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

/// `U * A * V = S` with `U`, `V` unimodular and `S` diagonal with
/// `d_1 | d_2 | ...`, all nonnegative. The inverses of `U` and `V` are kept as
/// well since quotient coordinates need them.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntegerMatrix,
    pub s: IntegerMatrix,
    pub v: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub v_inv: IntegerMatrix,
    rank: usize,
}

impl SmithDecomposition {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }

    /// The nonzero invariant factors `d_1 | ... | d_rank`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.s.get(i, i).clone()).collect()
    }
}

/// Smith normal form with deterministic pivoting.
pub fn smith(a: &IntegerMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut u_inv = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);
    let mut v_inv = IntegerMatrix::identity(n);
    let mut rank = 0;

    // Row/column operations are mirrored on U, V and their inverses.
    let row_add = |s: &mut IntegerMatrix,
                   u: &mut IntegerMatrix,
                   u_inv: &mut IntegerMatrix,
                   target: usize,
                   src: usize,
                   c: &BigInt| {
        s.add_row_multiple(target, src, c);
        u.add_row_multiple(target, src, c);
        u_inv.add_col_multiple(src, target, &-c);
    };
    let col_add = |s: &mut IntegerMatrix,
                   v: &mut IntegerMatrix,
                   v_inv: &mut IntegerMatrix,
                   target: usize,
                   src: usize,
                   c: &BigInt| {
        s.add_col_multiple(target, src, c);
        v.add_col_multiple(target, src, c);
        v_inv.add_row_multiple(src, target, &-c);
    };

    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = s.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if s.get(bi, bj).abs() <= x.abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return SmithDecomposition {
                    u,
                    s,
                    v,
                    u_inv,
                    v_inv,
                    rank,
                };
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let pivot = s.get(t, t).clone();
            let mut cleared = true;
            for i in t + 1..m {
                let q = s.get(i, t) / &pivot;
                row_add(&mut s, &mut u, &mut u_inv, i, t, &-q);
                if !s.get(i, t).is_zero() {
                    cleared = false;
                }
            }
            for j in t + 1..n {
                let q = s.get(t, j) / &pivot;
                col_add(&mut s, &mut v, &mut v_inv, j, t, &-q);
                if !s.get(t, j).is_zero() {
                    cleared = false;
                }
            }
            if !cleared {
                continue;
            }
            // Row and column are clear; the pivot must divide the remaining block.
            let offender = (t + 1..m).find(|&i| {
                (t + 1..n).any(|j| !s.get(i, j).is_multiple_of(&pivot))
            });
            match offender {
                Some(i) => row_add(&mut s, &mut u, &mut u_inv, t, i, &BigInt::one()),
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        rank += 1;
    }
    SmithDecomposition {
        u,
        s,
        v,
        u_inv,
        v_inv,
        rank,
    }
}

/// Finitely generated abelian group `Z^free_rank ⊕ Z/t_1 ⊕ ... ⊕ Z/t_k` with
/// `t_1 | t_2 | ... | t_k` and every `t_i > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AbelianGroupStructure {
    pub free_rank: usize,
    pub torsion_invariants: Vec<BigInt>,
}

impl AbelianGroupStructure {
    pub fn free(rank: usize) -> Self {
        Self {
            free_rank: rank,
            torsion_invariants: Vec::new(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion_invariants.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion_invariants.is_empty()
    }

    /// Direct sum, renormalized into invariant factor form.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let tors: Vec<BigInt> = self
            .torsion_invariants
            .iter()
            .chain(&other.torsion_invariants)
            .cloned()
            .collect();
        let k = tors.len();
        let mut out = cokernel_structure(&IntegerMatrix::diagonal(k, k, &tors));
        out.free_rank = self.free_rank + other.free_rank;
        out
    }

    /// `copies` fold direct sum of `self`.
    pub fn repeated(&self, copies: usize) -> Self {
        (0..copies).fold(Self::default(), |acc, _| acc.direct_sum(self))
    }
}

impl fmt::Display for AbelianGroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion_invariants.iter().map(|t| format!("Z/{t}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// Columns form a basis of the saturated kernel `{x : A x = 0}`.
pub fn kernel_basis(a: &IntegerMatrix) -> IntegerMatrix {
    let snf = smith(a);
    snf.v.select_columns(snf.rank..a.cols)
}

/// Columns form a basis of the image lattice `A Z^cols`.
pub fn image_basis(a: &IntegerMatrix) -> IntegerMatrix {
    let snf = smith(a);
    // A V = U^{-1} S, so the image is spanned by d_i times the columns of U^{-1}.
    let cols: Vec<Vec<BigInt>> = (0..snf.rank)
        .map(|i| {
            let d = snf.s.get(i, i);
            snf.u_inv.column(i).into_iter().map(|x| x * d).collect()
        })
        .collect();
    IntegerMatrix::from_columns(a.rows, &cols)
}

/// Structure of `Z^rows / A Z^cols`, read off the Smith diagonal.
pub fn cokernel_structure(a: &IntegerMatrix) -> AbelianGroupStructure {
    let snf = smith(a);
    AbelianGroupStructure {
        free_rank: a.rows - snf.rank,
        torsion_invariants: snf
            .invariant_factors()
            .into_iter()
            .filter(|d| !d.is_one())
            .collect(),
    }
}

/// Coordinates `y` with `basis * y = target`, if `target` lies in the lattice
/// spanned by the columns of `basis`. Columns of `basis` are assumed linearly
/// independent; with dependent columns any solution is returned.
pub fn solve_in_lattice(basis: &IntegerMatrix, target: &[BigInt]) -> Option<Vec<BigInt>> {
    let t = IntegerMatrix::from_columns(target.len(), &[target.to_vec()]);
    solve_columns(basis, &t).map(|y| y.column(0))
}

/// Column-wise [`solve_in_lattice`]: `Y` with `basis * Y = targets`.
pub fn solve_columns(basis: &IntegerMatrix, targets: &IntegerMatrix) -> Option<IntegerMatrix> {
    assert_eq!(basis.rows, targets.rows, "target length mismatch");
    let snf = smith(basis);
    let z = &snf.u * targets;
    let mut w = IntegerMatrix::zeros(basis.cols, targets.cols);
    for i in 0..z.rows {
        for j in 0..z.cols {
            let zij = z.get(i, j);
            if i < snf.rank {
                let (q, r) = zij.div_rem(snf.s.get(i, i));
                if !r.is_zero() {
                    return None;
                }
                w.set(i, j, q);
            } else if !zij.is_zero() {
                return None;
            }
        }
    }
    Some(&snf.v * &w)
}

/// Whether every column of `sub` lies in the lattice spanned by `basis`.
pub fn lattice_contains(basis: &IntegerMatrix, sub: &IntegerMatrix) -> bool {
    solve_columns(basis, sub).is_some()
}

/// `ker(d_out) / im(d_in)` for composable `d_in: Z^k -> Z^m`, `d_out: Z^m -> Z^p`.
pub fn homology_at(
    d_in: &IntegerMatrix,
    d_out: &IntegerMatrix,
) -> Result<AbelianGroupStructure, LinalgError> {
    if d_in.rows != d_out.cols {
        return Err(LinalgError::DimensionMismatch(format!(
            "incoming differential has {} rows, outgoing has {} columns",
            d_in.rows, d_out.cols
        )));
    }
    if !(d_out * d_in).is_zero() {
        return Err(LinalgError::NotAComplex);
    }
    let snf = smith(d_out);
    // Last (m - rank) columns of V span ker(d_out); coordinates of im(d_in)
    // in that basis are the corresponding rows of V^{-1} d_in.
    let coords = &snf.v_inv * d_in;
    let in_kernel = coords.select_rows(snf.rank..d_out.cols);
    Ok(cokernel_structure(&in_kernel))
}
