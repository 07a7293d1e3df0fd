//! Divided-power Koszul complexes of homomorphisms of free abelian groups.
//!
//! For `ε: E -> F` and a total degree `n`, the complex `Kos^n(ε)` has terms
//! `Γ_{n-q}(E) ⊗ Λ^q(F)` and differential
//!
//! ```text
//! d(γ_{n_1}(e_1)···γ_{n_r}(e_r) ⊗ y) = Σ_i γ_{n_1}(e_1)···γ_{n_i-1}(e_i)···γ_{n_r}(e_r) ⊗ ε(e_i) ∧ y
//! ```
//!
//! Divided powers are handled by exponent bookkeeping only, so everything
//! stays over the integers. Term bases are ordered with the divided monomial
//! as the outer index (lexicographically descending exponents, i.e. graded
//! lex within a fixed degree) and the wedge monomial as the inner index
//! (lexicographically ascending index sets).

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactla::{
    cokernel_structure, homology_at, image_basis, lattice_contains, smith, solve_columns,
    AbelianGroupStructure, IntegerMatrix,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KoszulError {
    #[error("matrix is {rows}x{cols} but the map was declared {target}x{source_rank}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        source_rank: usize,
        target: usize,
    },
    #[error("subgroup basis has {rows} rows but the target group has rank {target}")]
    SubgroupShape { rows: usize, target: usize },
}

/// A homomorphism `ε: Z^source_rank -> Z^target_rank`, stored as a
/// `target_rank x source_rank` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeAbelianMap {
    source_rank: usize,
    target_rank: usize,
    matrix: IntegerMatrix,
}

impl FreeAbelianMap {
    pub fn new(
        source_rank: usize,
        target_rank: usize,
        matrix: IntegerMatrix,
    ) -> Result<Self, KoszulError> {
        if matrix.rows() != target_rank || matrix.cols() != source_rank {
            return Err(KoszulError::ShapeMismatch {
                rows: matrix.rows(),
                cols: matrix.cols(),
                source_rank,
                target: target_rank,
            });
        }
        Ok(Self {
            source_rank,
            target_rank,
            matrix,
        })
    }

    pub fn from_matrix(matrix: IntegerMatrix) -> Self {
        Self {
            source_rank: matrix.cols(),
            target_rank: matrix.rows(),
            matrix,
        }
    }

    pub fn zero(source_rank: usize, target_rank: usize) -> Self {
        Self::from_matrix(IntegerMatrix::zeros(target_rank, source_rank))
    }

    pub fn source_rank(&self) -> usize {
        self.source_rank
    }

    pub fn target_rank(&self) -> usize {
        self.target_rank
    }

    pub fn matrix(&self) -> &IntegerMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn kernel_rank(&self) -> usize {
        self.source_rank - self.rank()
    }

    pub fn cokernel(&self) -> AbelianGroupStructure {
        cokernel_structure(&self.matrix)
    }
}

/// `γ_{n_1}(e_1)···γ_{n_r}(e_r)`, one exponent per basis element of `E`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DividedMonomial {
    pub exponents: Vec<usize>,
}

impl DividedMonomial {
    pub fn degree(&self) -> usize {
        self.exponents.iter().sum()
    }

    /// All monomials of total degree `degree` in `rank` variables, graded lex
    /// order (first exponent largest first).
    pub fn basis(rank: usize, degree: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut current = vec![0; rank];
        compositions(degree, 0, &mut current, &mut out);
        out.into_iter().map(|exponents| Self { exponents }).collect()
    }
}

fn compositions(remaining: usize, slot: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if slot == current.len() {
        if remaining == 0 {
            out.push(current.clone());
        }
        return;
    }
    if slot + 1 == current.len() {
        current[slot] = remaining;
        out.push(current.clone());
        current[slot] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        current[slot] = k;
        compositions(remaining - k, slot + 1, current, out);
    }
    current[slot] = 0;
}

impl fmt::Display for DividedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<String> = self
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, k)| format!("g{k}(e{})", i + 1))
            .collect();
        if factors.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", factors.join("*"))
        }
    }
}

/// `f_{i_1} ∧ ... ∧ f_{i_q}` with strictly increasing indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WedgeMonomial {
    pub indices: Vec<usize>,
}

impl WedgeMonomial {
    /// All `q`-subsets of `0..rank` in lexicographic order.
    pub fn basis(rank: usize, q: usize) -> Vec<Self> {
        subsets(rank, q)
            .into_iter()
            .map(|indices| Self { indices })
            .collect()
    }

    /// `f_j ∧ self`, as (sign, sorted monomial), or `None` if `j` already occurs.
    pub fn prepend(&self, j: usize) -> Option<(i32, Self)> {
        let pos = match self.indices.binary_search(&j) {
            Ok(_) => return None,
            Err(pos) => pos,
        };
        let mut indices = self.indices.clone();
        indices.insert(pos, j);
        let sign = if pos % 2 == 0 { 1 } else { -1 };
        Some((sign, Self { indices }))
    }
}

impl fmt::Display for WedgeMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.indices.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.indices.iter().map(|i| format!("f{}", i + 1)).collect();
        write!(f, "{}", parts.join("^"))
    }
}

pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            if n - i < k - current.len() {
                break;
            }
            current.push(i);
            go(i + 1, n, k, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Rank of `Γ_degree(Z^rank)`: the number of monomials of that degree.
pub fn multichoose(rank: usize, degree: usize) -> usize {
    if degree == 0 {
        1
    } else if rank == 0 {
        0
    } else {
        binomial(rank + degree - 1, degree)
    }
}

/// `Kos^n(ε)` with explicit bases and differential matrices.
#[derive(Clone, Debug)]
pub struct KoszulComplex {
    map: FreeAbelianMap,
    n: usize,
    divided: Vec<Vec<DividedMonomial>>,
    wedges: Vec<Vec<WedgeMonomial>>,
    differentials: Vec<IntegerMatrix>,
}

impl KoszulComplex {
    pub fn map(&self) -> &FreeAbelianMap {
        &self.map
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Highest cohomological index with a (possibly zero) term.
    pub fn top(&self) -> usize {
        self.n
    }

    pub fn term_dim(&self, q: usize) -> usize {
        if q > self.n {
            0
        } else {
            self.divided[q].len() * self.wedges[q].len()
        }
    }

    pub fn term_dims(&self) -> Vec<usize> {
        (0..=self.n).map(|q| self.term_dim(q)).collect()
    }

    /// Ordered basis of the term at `q`.
    pub fn term_basis(&self, q: usize) -> Vec<(DividedMonomial, WedgeMonomial)> {
        if q > self.n {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(self.term_dim(q));
        for g in &self.divided[q] {
            for w in &self.wedges[q] {
                out.push((g.clone(), w.clone()));
            }
        }
        out
    }

    /// `d^q: term(q) -> term(q+1)`. Outside `0..n` this is the appropriate
    /// zero map.
    pub fn differential(&self, q: isize) -> IntegerMatrix {
        if q >= 0 && (q as usize) < self.n {
            return self.differentials[q as usize].clone();
        }
        let src = if q >= 0 { self.term_dim(q as usize) } else { 0 };
        let dst = if q + 1 >= 0 { self.term_dim((q + 1) as usize) } else { 0 };
        IntegerMatrix::zeros(dst, src)
    }

    /// Dimension of `Γ_{n-q}(E)` and of `Λ^q(F)` at `q`.
    pub fn factor_dims(&self, q: usize) -> (usize, usize) {
        if q > self.n {
            (0, 0)
        } else {
            (self.divided[q].len(), self.wedges[q].len())
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.n)
            .map(|q| {
                let d = self.term_dim(q) as i64;
                if q % 2 == 0 {
                    d
                } else {
                    -d
                }
            })
            .sum()
    }
}

pub fn build_complex(map: &FreeAbelianMap, n: usize) -> KoszulComplex {
    let (e, f) = (map.source_rank, map.target_rank);
    let divided: Vec<Vec<DividedMonomial>> =
        (0..=n).map(|q| DividedMonomial::basis(e, n - q)).collect();
    let wedges: Vec<Vec<WedgeMonomial>> = (0..=n).map(|q| WedgeMonomial::basis(f, q)).collect();

    let mut differentials = Vec::with_capacity(n);
    for q in 0..n {
        let target_div = &divided[q + 1];
        let target_wedge = &wedges[q + 1];
        let rows = target_div.len() * target_wedge.len();
        let cols = divided[q].len() * wedges[q].len();
        let mut d = IntegerMatrix::zeros(rows, cols);
        let mut col = 0;
        for g in &divided[q] {
            for w in &wedges[q] {
                for (i, &k) in g.exponents.iter().enumerate() {
                    if k == 0 {
                        continue;
                    }
                    let mut lowered = g.clone();
                    lowered.exponents[i] -= 1;
                    let gi = target_div
                        .binary_search_by(|x| lowered.cmp(x))
                        .expect("lowered monomial present in basis");
                    for j in 0..f {
                        let a = map.matrix.get(j, i);
                        if a.is_zero() {
                            continue;
                        }
                        let Some((sign, wj)) = w.prepend(j) else {
                            continue;
                        };
                        let wi = target_wedge
                            .binary_search(&wj)
                            .expect("wedge monomial present in basis");
                        let row = gi * target_wedge.len() + wi;
                        let cur = d.get(row, col).clone();
                        d.set(row, col, cur + a * BigInt::from(sign));
                    }
                }
                col += 1;
            }
        }
        differentials.push(d);
    }
    KoszulComplex {
        map: map.clone(),
        n,
        divided,
        wedges,
        differentials,
    }
}

/// `H^p(Kos^n(ε))` as an abstract group.
pub fn cohomology(complex: &KoszulComplex, p: usize) -> AbelianGroupStructure {
    if p > complex.n {
        return AbelianGroupStructure::default();
    }
    let d_in = complex.differential(p as isize - 1);
    let d_out = complex.differential(p as isize);
    homology_at(&d_in, &d_out).expect("Koszul differentials form a complex")
}

/// Expected `rank Γ_{n-p}(ker ε) ⊗ Λ^p(coker ε)` when the cokernel is free.
pub fn closed_form_rank(map: &FreeAbelianMap, n: usize, p: usize) -> usize {
    if p > n {
        return 0;
    }
    let r = map.rank();
    multichoose(map.source_rank - r, n - p) * binomial(map.target_rank - r, p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyComparison {
    pub p: usize,
    pub computed: AbelianGroupStructure,
    pub expected_rank: usize,
}

impl CohomologyComparison {
    pub fn matches(&self) -> bool {
        self.computed.is_free() && self.computed.free_rank == self.expected_rank
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LemmaOutcome<T> {
    Checked(T),
    HypothesisFails(String),
}

/// Degreewise comparison of computed cohomology against the closed form for
/// maps with free cokernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClosedFormReport {
    pub n: usize,
    pub outcome: LemmaOutcome<Vec<CohomologyComparison>>,
}

impl CohomologyClosedFormReport {
    pub fn passed(&self) -> bool {
        match &self.outcome {
            LemmaOutcome::Checked(rows) => rows.iter().all(CohomologyComparison::matches),
            LemmaOutcome::HypothesisFails(_) => false,
        }
    }

    pub fn hypothesis_holds(&self) -> bool {
        matches!(self.outcome, LemmaOutcome::Checked(_))
    }
}

pub fn verify_cohomology_closed_form(map: &FreeAbelianMap, n: usize) -> CohomologyClosedFormReport {
    if !map.cokernel().is_free() {
        return CohomologyClosedFormReport {
            n,
            outcome: LemmaOutcome::HypothesisFails(
                "lemma hypothesis fails: cokernel has torsion".to_string(),
            ),
        };
    }
    let complex = build_complex(map, n);
    let rows = (0..=n)
        .map(|p| CohomologyComparison {
            p,
            computed: cohomology(&complex, p),
            expected_rank: closed_form_rank(map, n, p),
        })
        .collect();
    CohomologyClosedFormReport {
        n,
        outcome: LemmaOutcome::Checked(rows),
    }
}

/// A subgroup `G ⊆ F` (columns of `g_basis`) and a filtration level `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSubgroupSpec {
    pub g_basis: IntegerMatrix,
    pub m: isize,
}

impl WeightSubgroupSpec {
    pub fn new(g_basis: IntegerMatrix, m: isize) -> Self {
        Self { g_basis, m }
    }

    pub fn at_level(&self, m: isize) -> Self {
        Self {
            g_basis: self.g_basis.clone(),
            m,
        }
    }

    pub fn quotient(&self) -> AbelianGroupStructure {
        cokernel_structure(&self.g_basis)
    }

    fn check_shape(&self, target_rank: usize) -> Result<(), KoszulError> {
        if self.g_basis.rows() != target_rank {
            return Err(KoszulError::SubgroupShape {
                rows: self.g_basis.rows(),
                target: target_rank,
            });
        }
        Ok(())
    }
}

/// Coefficients of `v_1 ∧ ... ∧ v_q` in the standard basis of `Λ^q(Z^f)`.
fn wedge_of_vectors(vectors: &[Vec<BigInt>], f: usize) -> Vec<BigInt> {
    let q = vectors.len();
    WedgeMonomial::basis(f, q)
        .iter()
        .map(|k| {
            IntegerMatrix::from_fn(q, q, |i, j| vectors[j][k.indices[i]].clone()).determinant()
        })
        .collect()
}

/// Basis of `W(G)_m Λ^q(F)`, the image of `Λ^{q-m}G ⊗ Λ^m F -> Λ^q F`.
fn wedge_filtration_basis(g: &IntegerMatrix, f: usize, q: usize, m: isize) -> IntegerMatrix {
    let dim = binomial(f, q);
    if m < 0 {
        return IntegerMatrix::zeros(dim, 0);
    }
    let m = m as usize;
    if m >= q {
        return IntegerMatrix::identity(dim);
    }
    let g_cols = g.columns();
    let unit = |j: usize| -> Vec<BigInt> {
        (0..f)
            .map(|i| if i == j { BigInt::one() } else { BigInt::zero() })
            .collect()
    };
    let mut generators = Vec::new();
    for s in subsets(g_cols.len(), q - m) {
        for t in subsets(f, m) {
            let mut vectors: Vec<Vec<BigInt>> = s.iter().map(|&i| g_cols[i].clone()).collect();
            vectors.extend(t.iter().map(|&j| unit(j)));
            generators.push(wedge_of_vectors(&vectors, f));
        }
    }
    image_basis(&IntegerMatrix::from_columns(dim, &generators))
}

/// Per `q`, a basis (columns, ambient coordinates) of `W(G)_m Kos^n(ε)^q`.
pub fn weight_subcomplex(
    complex: &KoszulComplex,
    spec: &WeightSubgroupSpec,
) -> Result<Vec<IntegerMatrix>, KoszulError> {
    let f = complex.map.target_rank;
    spec.check_shape(f)?;
    let g = image_basis(&spec.g_basis);
    Ok((0..=complex.n)
        .map(|q| {
            let (gamma_dim, _) = complex.factor_dims(q);
            let wedge = wedge_filtration_basis(&g, f, q, spec.m);
            IntegerMatrix::identity(gamma_dim).kron(&wedge)
        })
        .collect())
}

/// Whether `d` maps `W(G)_m` into itself in every degree.
pub fn check_filtration_stability(
    complex: &KoszulComplex,
    spec: &WeightSubgroupSpec,
) -> Result<bool, KoszulError> {
    let w = weight_subcomplex(complex, spec)?;
    Ok((0..complex.n).all(|q| {
        let image = &complex.differentials[q] * &w[q];
        lattice_contains(&w[q + 1], &image)
    }))
}

/// One degree of the graded-piece comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedDegreeRow {
    pub q: usize,
    pub graded_rank: usize,
    pub model_rank: usize,
    pub graded_cohomology: AbelianGroupStructure,
    pub model_cohomology: AbelianGroupStructure,
}

impl GradedDegreeRow {
    pub fn matches(&self) -> bool {
        self.graded_rank == self.model_rank && self.graded_cohomology == self.model_cohomology
    }
}

/// `Gr_m^{W(G)} Kos^n(ε)` against `Kos^{n-m}(ε_G)[-m] ⊗ Λ^m(F/G)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPieceReport {
    pub n: usize,
    pub m: isize,
    pub outcome: LemmaOutcome<Vec<GradedDegreeRow>>,
}

impl GradedPieceReport {
    pub fn passed(&self) -> bool {
        match &self.outcome {
            LemmaOutcome::Checked(rows) => rows.iter().all(GradedDegreeRow::matches),
            LemmaOutcome::HypothesisFails(_) => false,
        }
    }
}

/// A complex given by its per-degree dimensions and differentials
/// `d[q]: dims[q] -> dims[q+1]`.
struct ExplicitComplex {
    dims: Vec<usize>,
    differentials: Vec<IntegerMatrix>,
}

impl ExplicitComplex {
    fn cohomology(&self, q: usize) -> AbelianGroupStructure {
        let d_in = if q == 0 {
            IntegerMatrix::zeros(self.dims[0], 0)
        } else {
            self.differentials[q - 1].clone()
        };
        let d_out = if q + 1 < self.dims.len() {
            self.differentials[q].clone()
        } else {
            IntegerMatrix::zeros(0, self.dims[q])
        };
        homology_at(&d_in, &d_out).expect("induced differentials form a complex")
    }
}

/// The quotient complex `W_m / W_{m-1}` in Smith coordinates.
fn graded_quotient(
    complex: &KoszulComplex,
    upper: &[IntegerMatrix],
    lower: &[IntegerMatrix],
) -> Result<ExplicitComplex, String> {
    let top = complex.n;
    let mut projections = Vec::with_capacity(top + 1);
    let mut lifts = Vec::with_capacity(top + 1);
    for q in 0..=top {
        let inclusion = solve_columns(&upper[q], &lower[q])
            .ok_or_else(|| format!("W_(m-1) is not contained in W_m at degree {q}"))?;
        let snf = smith(&inclusion);
        if snf.invariant_factors().iter().any(|d| !d.is_one()) {
            return Err(format!("graded piece has torsion at degree {q}"));
        }
        let r = upper[q].cols();
        projections.push(snf.u.select_rows(snf.rank()..r));
        lifts.push(snf.u_inv.select_columns(snf.rank()..r));
    }
    let mut differentials = Vec::with_capacity(top);
    for q in 0..top {
        let image = &complex.differentials[q] * &upper[q];
        let in_upper = solve_columns(&upper[q + 1], &image)
            .ok_or_else(|| format!("differential leaves W_m at degree {q}"))?;
        differentials.push(&(&projections[q + 1] * &in_upper) * &lifts[q]);
    }
    Ok(ExplicitComplex {
        dims: lifts.iter().map(IntegerMatrix::cols).collect(),
        differentials,
    })
}

/// `Kos^{n-m}(ε_G)[-m] ⊗ Λ^m(F/G)` placed in degrees `0..=n`.
fn graded_model(
    eps_g: &FreeAbelianMap,
    n: usize,
    m: isize,
    quotient_rank: usize,
) -> ExplicitComplex {
    let zero_complex = || ExplicitComplex {
        dims: vec![0; n + 1],
        differentials: (0..n).map(|_| IntegerMatrix::zeros(0, 0)).collect(),
    };
    if m < 0 || m as usize > n {
        return zero_complex();
    }
    let m = m as usize;
    let copies = binomial(quotient_rank, m);
    let inner = build_complex(eps_g, n - m);
    let eye = IntegerMatrix::identity(copies);
    let dims: Vec<usize> = (0..=n)
        .map(|q| if q < m { 0 } else { inner.term_dim(q - m) * copies })
        .collect();
    let differentials = (0..n)
        .map(|q| {
            if q < m {
                IntegerMatrix::zeros(dims[q + 1], dims[q])
            } else {
                inner.differential((q - m) as isize).kron(&eye)
            }
        })
        .collect();
    ExplicitComplex {
        dims,
        differentials,
    }
}

pub fn graded_piece_iso_check(
    complex: &KoszulComplex,
    spec: &WeightSubgroupSpec,
) -> Result<GradedPieceReport, KoszulError> {
    let f = complex.map.target_rank;
    spec.check_shape(f)?;
    let n = complex.n;
    let fail = |reason: String| GradedPieceReport {
        n,
        m: spec.m,
        outcome: LemmaOutcome::HypothesisFails(reason),
    };
    let g = image_basis(&spec.g_basis);
    let Some(eps_g) = solve_columns(&g, complex.map.matrix()) else {
        return Ok(fail("hypothesis fails: image of the map is not contained in G".into()));
    };
    let quotient = cokernel_structure(&g);
    if !quotient.is_free() {
        return Ok(fail("hypothesis fails: F/G has torsion".into()));
    }

    let upper = weight_subcomplex(complex, spec)?;
    let lower = weight_subcomplex(complex, &spec.at_level(spec.m - 1))?;
    let graded = match graded_quotient(complex, &upper, &lower) {
        Ok(c) => c,
        Err(reason) => return Ok(fail(reason)),
    };
    let model = graded_model(&FreeAbelianMap::from_matrix(eps_g), n, spec.m, quotient.free_rank);

    let rows = (0..=n)
        .map(|q| GradedDegreeRow {
            q,
            graded_rank: graded.dims[q],
            model_rank: model.dims[q],
            graded_cohomology: graded.cohomology(q),
            model_cohomology: model.cohomology(q),
        })
        .collect();
    Ok(GradedPieceReport {
        n,
        m: spec.m,
        outcome: LemmaOutcome::Checked(rows),
    })
}
