//! Weight-graded invariants of the limit mixed Hodge structure `H^1_lim`.
//!
//! Everything here is combinatorial: the weight 0 and weight 2 pieces are the
//! cycle space of the dual graph (and its dual), the weight 1 piece is the
//! first cohomology of the normalization. Tate twists are carried as integer
//! labels only.

use serde::Serialize;

use crate::curve::{betti1, cycle_basis, dual_graph, DualGraph, NodalCurve};
use crate::exactla::IntegerMatrix;

/// `D = Σ n_p p` with `incidence * D = 0`. Coefficients are indexed by node,
/// in file order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LatticeElement {
    pub coefficients: Vec<i64>,
}

impl LatticeElement {
    pub fn new(coefficients: Vec<i64>) -> Self {
        Self { coefficients }
    }

    pub fn zero(nodes: usize) -> Self {
        Self::new(vec![0; nodes])
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0)
    }

    pub fn scaled(&self, k: i64) -> Self {
        Self::new(self.coefficients.iter().map(|c| c * k).collect())
    }

    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.coefficients.len(), other.coefficients.len());
        Self::new(
            self.coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Integer combination `Σ k_i basis_i`.
    pub fn combination(basis: &[LatticeElement], coeffs: &[i64], nodes: usize) -> Self {
        basis
            .iter()
            .zip(coeffs)
            .fold(Self::zero(nodes), |acc, (b, &k)| acc.plus(&b.scaled(k)))
    }
}

/// Hodge numbers of one graded piece, as `((p, q), h^{p,q})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HodgeNumbers {
    pub weight: u32,
    pub label: &'static str,
    pub numbers: Vec<((i32, i32), usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedSummary {
    pub gr0_dim: usize,
    pub gr1_dim: usize,
    pub gr2_dim: usize,
    pub hodge_numbers: Vec<HodgeNumbers>,
    /// Genus of the smooth fiber, `Σ g_i + b_1`.
    pub genus: usize,
    pub betti1: usize,
    /// Rank of the torus in `1 -> torus -> Pic^0(X_0) -> Pic^0(X_0[1]) -> 1`,
    /// `d + c - n`.
    pub torus_rank: usize,
    pub components: usize,
    pub nodes: usize,
    pub connected_components: usize,
}

impl GradedSummary {
    pub fn total_dim(&self) -> usize {
        self.gr0_dim + self.gr1_dim + self.gr2_dim
    }
}

/// Basis of `L = ker(H_0(X_0[2]) -> H_0(X_0[1]))`: the cycle basis of the dual graph.
pub fn lattice_l(curve: &NodalCurve) -> Vec<LatticeElement> {
    cycle_basis(&dual_graph(curve))
        .into_iter()
        .map(LatticeElement::new)
        .collect()
}

/// `(dim W_0 H^1(X_0), dim Gr_1^W H^1(X_0))`.
pub fn curve_h1(curve: &NodalCurve) -> (usize, usize) {
    let g = dual_graph(curve);
    (betti1(&g), 2 * curve.genus_sum() as usize)
}

pub fn limit_graded(curve: &NodalCurve) -> GradedSummary {
    let graph = dual_graph(curve);
    let b1 = betti1(&graph);
    let g = curve.genus_sum() as usize;
    GradedSummary {
        gr0_dim: b1,
        gr1_dim: 2 * g,
        gr2_dim: b1,
        hodge_numbers: vec![
            HodgeNumbers {
                weight: 0,
                label: "Gr^W_0 H^1_lim",
                numbers: vec![((0, 0), b1)],
            },
            HodgeNumbers {
                weight: 1,
                label: "Gr^W_1 H^1_lim",
                numbers: vec![((1, 0), g), ((0, 1), g)],
            },
            HodgeNumbers {
                weight: 2,
                label: "Gr^W_2 H^1_lim",
                numbers: vec![((1, 1), b1)],
            },
        ],
        genus: g + b1,
        betti1: b1,
        torus_rank: graph.edge_count() + graph.connected_components - graph.vertex_count(),
        components: graph.vertex_count(),
        nodes: graph.edge_count(),
        connected_components: graph.connected_components,
    }
}

/// The weight-2 row of the monodromy weight spectral sequence:
/// `0 -> H^0(X_0[2])(1) -> H^2(X_0[1])(1)`, whose middle map is the incidence
/// matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralRow {
    /// `(E_1^{-2,2}, E_1^{-1,2}, E_1^{0,2}) = (0, d, n)`.
    pub e1_terms: (usize, usize, usize),
    /// Cohomology at the middle and right positions: `(b_1, c)`.
    pub e2_terms: (usize, usize),
    pub twist: i32,
}

impl SpectralRow {
    pub fn kernel_dim(&self) -> usize {
        self.e2_terms.0
    }
}

pub fn spectral_row(curve: &NodalCurve) -> SpectralRow {
    let graph = dual_graph(curve);
    spectral_row_of(&graph)
}

pub(crate) fn spectral_row_of(graph: &DualGraph) -> SpectralRow {
    let (n, d) = (graph.vertex_count(), graph.edge_count());
    let rank = graph.incidence.rank();
    SpectralRow {
        e1_terms: (0, d, n),
        e2_terms: (d - rank, n - rank),
        twist: 1,
    }
}

/// `N` on the graded pieces: `Gr_2 -> Gr_0` is the identity in matched cycle
/// bases, and `N` kills `Gr_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyGraded {
    pub gr2_to_gr0: IntegerMatrix,
    pub on_gr1: IntegerMatrix,
}

pub fn monodromy_graded(curve: &NodalCurve) -> MonodromyGraded {
    let b1 = lattice_l(curve).len();
    let gr1 = 2 * curve.genus_sum() as usize;
    MonodromyGraded {
        gr2_to_gr0: IntegerMatrix::identity(b1),
        on_gr1: IntegerMatrix::zeros(gr1, gr1),
    }
}

/// `incidence * D`, as plain integers.
pub fn boundary_of(curve: &NodalCurve, d: &LatticeElement) -> Vec<i64> {
    dual_graph(curve).boundary(&d.coefficients)
}

pub fn is_in_lattice(curve: &NodalCurve, d: &LatticeElement) -> bool {
    d.coefficients.len() == curve.node_count() && boundary_of(curve, d).iter().all(|&x| x == 0)
}
