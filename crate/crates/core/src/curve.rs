//! Central fibers: nodal curves, their normalizations and dual graphs.
//!
//! A curve file lists components (label, genus, marked points with rational
//! coordinates) and nodes. Each node names the two preimages `p'` and `p''`
//! in the normalization as (component, mark) pairs. The dual graph orients
//! every edge from the `p''` component (tail) to the `p'` component (head).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::IntegerMatrix;

pub type Rational = BigRational;

/// Parses `"a/b"` (b > 0, reduced) or a plain integer `"a"`.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| format!("invalid rational {s:?}: bad numerator"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| format!("invalid rational {s:?}: bad denominator"))?;
    if den.is_zero() {
        return Err(format!("invalid rational {s:?}: zero denominator"));
    }
    if den < BigInt::zero() {
        return Err(format!("invalid rational {s:?}: denominator must be positive"));
    }
    let q = Rational::new(num.clone(), den.clone());
    if q.numer() != &num || q.denom() != &den {
        return Err(format!("invalid rational {s:?}: not in lowest terms"));
    }
    Ok(q)
}

/// Canonical `"a/b"` rendering with `b > 0`.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub(crate) mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match q {
                Some(q) => s.serialize_str(&format_rational(q)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            let s = Option::<String>::deserialize(d)?;
            s.map(|s| parse_rational(&s).map_err(D::Error::custom))
                .transpose()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MarkCoordinate(#[serde(with = "serde_rational::option")] pub Option<Rational>);

/// An irreducible component of the central fiber. Marks are the node
/// preimages on its normalization, keyed by name. A coordinate may be omitted
/// (`null`) on components of positive genus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub label: String,
    pub genus: u32,
    #[serde(default)]
    pub marks: BTreeMap<String, MarkCoordinate>,
}

impl Component {
    pub fn new(label: impl Into<String>, genus: u32) -> Self {
        Self {
            label: label.into(),
            genus,
            marks: BTreeMap::new(),
        }
    }

    pub fn with_mark(mut self, key: impl Into<String>, coordinate: Option<Rational>) -> Self {
        self.marks.insert(key.into(), MarkCoordinate(coordinate));
        self
    }

    pub fn coordinate(&self, mark: &str) -> Option<&Rational> {
        self.marks.get(mark).and_then(|c| c.0.as_ref())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEnd {
    pub component: String,
    pub mark: String,
}

impl NodeEnd {
    pub fn new(component: impl Into<String>, mark: impl Into<String>) -> Self {
        Self {
            component: component.into(),
            mark: mark.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: String,
    pub prime: NodeEnd,
    pub double_prime: NodeEnd,
}

impl Node {
    pub fn new(id: impl Into<String>, prime: NodeEnd, double_prime: NodeEnd) -> Self {
        Self {
            id: id.into(),
            prime,
            double_prime,
        }
    }

    pub fn is_self_node(&self) -> bool {
        self.prime.component == self.double_prime.component
    }
}

/// The raw, unchecked content of a curve file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDescription {
    pub components: Vec<Component>,
    pub nodes: Vec<Node>,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
}

impl CurveDescription {
    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Serialized form with sorted keys.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("curve descriptions always serialize")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("json values always serialize")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ValidationOptions {
    pub require_stable: bool,
    pub allow_disconnected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    EmptyCurve,
    DuplicateComponentLabel { label: String },
    DuplicateNodeId { id: String },
    DanglingComponent { node: String, end: String, component: String },
    DanglingMark { node: String, end: String, component: String, mark: String },
    MarkReused { component: String, mark: String, nodes: Vec<String> },
    DuplicateCoordinate { component: String, marks: Vec<String>, coordinate: String },
    SelfNodeSameMark { node: String },
    OrientationReversed { node: String, prime: String, double_prime: String },
    Disconnected { connected_components: usize },
    Unstable { component: String, genus: u32, node_ends: usize, required: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::EmptyCurve => write!(f, "curve has no components"),
            Diagnostic::DuplicateComponentLabel { label } => {
                write!(f, "duplicate component label {label:?}")
            }
            Diagnostic::DuplicateNodeId { id } => write!(f, "duplicate node id {id:?}"),
            Diagnostic::DanglingComponent { node, end, component } => write!(
                f,
                "dangling reference: node {node:?} {end} end names missing component {component:?}"
            ),
            Diagnostic::DanglingMark {
                node,
                end,
                component,
                mark,
            } => write!(
                f,
                "dangling reference: node {node:?} {end} end names missing mark {mark:?} on component {component:?}"
            ),
            Diagnostic::MarkReused {
                component,
                mark,
                nodes,
            } => write!(
                f,
                "mark {mark:?} on component {component:?} is used by several node ends ({})",
                nodes.join(", ")
            ),
            Diagnostic::DuplicateCoordinate {
                component,
                marks,
                coordinate,
            } => write!(
                f,
                "duplicate mark coordinate {coordinate} on component {component:?} (marks {})",
                marks.join(", ")
            ),
            Diagnostic::SelfNodeSameMark { node } => {
                write!(f, "self-node {node:?} uses the same mark for both preimages")
            }
            Diagnostic::OrientationReversed {
                node,
                prime,
                double_prime,
            } => write!(
                f,
                "node {node:?}: prime end must lie on the earlier component, but {prime:?} comes after {double_prime:?}"
            ),
            Diagnostic::Disconnected {
                connected_components,
            } => write!(f, "curve is disconnected ({connected_components} connected components)"),
            Diagnostic::Unstable {
                component,
                genus,
                node_ends,
                required,
            } => write!(
                f,
                "stability failure: genus-{genus} component {component:?} has {node_ends} node ends, needs at least {required}"
            ),
        }
    }
}

/// Outcome of [`validate`]. Notices are informational and never make a curve
/// invalid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
    pub notices: Vec<String>,
    pub connected_components: Option<usize>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            writeln!(f, "valid")?;
        } else {
            writeln!(f, "invalid ({} diagnostics)", self.diagnostics.len())?;
        }
        for d in &self.diagnostics {
            writeln!(f, "  error: {d}")?;
        }
        for n in &self.notices {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut x = x;
        while self.0[x] != r {
            let next = self.0[x];
            self.0[x] = r;
            x = next;
        }
        r
    }

    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }

    fn count_roots(&mut self) -> usize {
        (0..self.0.len()).filter(|&i| self.find(i) == i).count()
    }
}

pub fn validate(desc: &CurveDescription, options: &ValidationOptions) -> ValidationReport {
    let mut report = ValidationReport::default();
    let diags = &mut report.diagnostics;
    if desc.components.is_empty() {
        diags.push(Diagnostic::EmptyCurve);
    }

    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, c) in desc.components.iter().enumerate() {
        if index.insert(c.label.as_str(), i).is_some() {
            diags.push(Diagnostic::DuplicateComponentLabel {
                label: c.label.clone(),
            });
        }
    }
    let mut ids = BTreeSet::new();
    for n in &desc.nodes {
        if !ids.insert(n.id.as_str()) {
            diags.push(Diagnostic::DuplicateNodeId { id: n.id.clone() });
        }
    }

    for c in &desc.components {
        let mut by_value: BTreeMap<&Rational, Vec<String>> = BTreeMap::new();
        for (key, coord) in &c.marks {
            if let Some(q) = &coord.0 {
                by_value.entry(q).or_default().push(key.clone());
            }
        }
        for (q, marks) in by_value {
            if marks.len() > 1 {
                diags.push(Diagnostic::DuplicateCoordinate {
                    component: c.label.clone(),
                    marks,
                    coordinate: format_rational(q),
                });
            }
        }
    }

    let mut users: BTreeMap<(&str, &str), Vec<String>> = BTreeMap::new();
    let mut end_counts = vec![0usize; desc.components.len()];
    let mut resolved = true;
    let mut uf = UnionFind::new(desc.components.len());
    for n in &desc.nodes {
        let mut ends = Vec::with_capacity(2);
        for (name, end) in [("prime", &n.prime), ("double_prime", &n.double_prime)] {
            let Some(&ci) = index.get(end.component.as_str()) else {
                diags.push(Diagnostic::DanglingComponent {
                    node: n.id.clone(),
                    end: name.into(),
                    component: end.component.clone(),
                });
                resolved = false;
                continue;
            };
            if !desc.components[ci].marks.contains_key(&end.mark) {
                diags.push(Diagnostic::DanglingMark {
                    node: n.id.clone(),
                    end: name.into(),
                    component: end.component.clone(),
                    mark: end.mark.clone(),
                });
                resolved = false;
            }
            users
                .entry((end.component.as_str(), end.mark.as_str()))
                .or_default()
                .push(n.id.clone());
            end_counts[ci] += 1;
            ends.push(ci);
        }
        if let [i, j] = ends[..] {
            uf.union(i, j);
            if i == j {
                if n.prime.mark == n.double_prime.mark {
                    diags.push(Diagnostic::SelfNodeSameMark { node: n.id.clone() });
                } else {
                    report.notices.push(format!(
                        "self-node {:?}: p' = mark {:?}, p'' = mark {:?} by declared order",
                        n.id, n.prime.mark, n.double_prime.mark
                    ));
                }
            } else if i > j {
                diags.push(Diagnostic::OrientationReversed {
                    node: n.id.clone(),
                    prime: n.prime.component.clone(),
                    double_prime: n.double_prime.component.clone(),
                });
            }
        }
    }
    for ((component, mark), nodes) in users {
        if nodes.len() > 1 {
            diags.push(Diagnostic::MarkReused {
                component: component.into(),
                mark: mark.into(),
                nodes,
            });
        }
    }

    if resolved && !desc.components.is_empty() {
        let c = uf.count_roots();
        report.connected_components = Some(c);
        if c > 1 && !options.allow_disconnected {
            diags.push(Diagnostic::Disconnected {
                connected_components: c,
            });
        }
    }

    if options.require_stable {
        for (c, &ends) in desc.components.iter().zip(&end_counts) {
            let required = match c.genus {
                0 => 3,
                1 => 1,
                _ => 0,
            };
            if ends < required {
                diags.push(Diagnostic::Unstable {
                    component: c.label.clone(),
                    genus: c.genus,
                    node_ends: ends,
                    required,
                });
            }
        }
    }
    report
}

/// A validated central fiber. Construction goes through [`NodalCurve::new`],
/// so every node end resolves to a component and a mark.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodalCurve {
    description: CurveDescription,
    /// (prime component index, double-prime component index) per node.
    ends: Vec<(usize, usize)>,
    connected_components: usize,
}

impl NodalCurve {
    pub fn new(
        description: CurveDescription,
        options: &ValidationOptions,
    ) -> Result<Self, ValidationReport> {
        let report = validate(&description, options);
        if !report.is_valid() {
            return Err(report);
        }
        let index: BTreeMap<&str, usize> = description
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| (c.label.as_str(), i))
            .collect();
        let ends = description
            .nodes
            .iter()
            .map(|n| {
                (
                    index[n.prime.component.as_str()],
                    index[n.double_prime.component.as_str()],
                )
            })
            .collect();
        let connected_components = report.connected_components.unwrap_or(1);
        Ok(Self {
            description,
            ends,
            connected_components,
        })
    }

    pub fn from_json(text: &str, options: &ValidationOptions) -> Result<Self, CurveLoadError> {
        let desc = CurveDescription::from_json(text)?;
        Self::new(desc, options).map_err(CurveLoadError::Invalid)
    }

    pub fn description(&self) -> &CurveDescription {
        &self.description
    }

    pub fn components(&self) -> &[Component] {
        &self.description.components
    }

    pub fn nodes(&self) -> &[Node] {
        &self.description.nodes
    }

    pub fn component_count(&self) -> usize {
        self.description.components.len()
    }

    pub fn node_count(&self) -> usize {
        self.description.nodes.len()
    }

    pub fn connected_components(&self) -> usize {
        self.connected_components
    }

    /// Component index holding `p'` of node `k`.
    pub fn prime_component(&self, k: usize) -> usize {
        self.ends[k].0
    }

    /// Component index holding `p''` of node `k`.
    pub fn double_prime_component(&self, k: usize) -> usize {
        self.ends[k].1
    }

    pub fn genus_sum(&self) -> u64 {
        self.components().iter().map(|c| u64::from(c.genus)).sum()
    }

    pub fn self_nodes(&self) -> Vec<&str> {
        self.nodes()
            .iter()
            .filter(|n| n.is_self_node())
            .map(|n| n.id.as_str())
            .collect()
    }

    pub fn all_rational(&self) -> bool {
        self.components().iter().all(|c| c.genus == 0)
    }
}

#[derive(Debug, Error)]
pub enum CurveLoadError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid curve:\n{0}")]
    Invalid(ValidationReport),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// Vertices are components, edges are nodes oriented `p''` -> `p'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    pub vertices: Vec<String>,
    pub genera: Vec<u32>,
    pub edges: Vec<Edge>,
    /// `n x d`: +1 at the head, -1 at the tail, zero column for a loop.
    pub incidence: IntegerMatrix,
    pub connected_components: usize,
}

pub fn dual_graph(curve: &NodalCurve) -> DualGraph {
    let n = curve.component_count();
    let edges: Vec<Edge> = curve
        .nodes()
        .iter()
        .enumerate()
        .map(|(k, node)| Edge {
            id: node.id.clone(),
            tail: curve.double_prime_component(k),
            head: curve.prime_component(k),
        })
        .collect();
    let mut incidence = IntegerMatrix::zeros(n, edges.len());
    for (k, e) in edges.iter().enumerate() {
        if !e.is_loop() {
            incidence.set(e.head, k, BigInt::one());
            incidence.set(e.tail, k, -BigInt::one());
        }
    }
    DualGraph {
        vertices: curve.components().iter().map(|c| c.label.clone()).collect(),
        genera: curve.components().iter().map(|c| c.genus).collect(),
        edges,
        incidence,
        connected_components: curve.connected_components(),
    }
}

impl DualGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `incidence * v` for an edge vector.
    pub fn boundary(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.vertex_count()];
        for (e, &c) in self.edges.iter().zip(v) {
            if !e.is_loop() {
                out[e.head] += c;
                out[e.tail] -= c;
            }
        }
        out
    }
}

/// Fundamental cycles of the spanning forest built from edges in index order.
/// Each non-forest edge `e` gives `e` plus the forest path from `head(e)`
/// back to `tail(e)`, signed by traversal direction.
pub fn cycle_basis(graph: &DualGraph) -> Vec<Vec<i64>> {
    let n = graph.vertex_count();
    let d = graph.edge_count();
    let mut uf = UnionFind::new(n);
    let mut in_forest = vec![false; d];
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, e) in graph.edges.iter().enumerate() {
        if uf.union(e.tail, e.head) {
            in_forest[k] = true;
            adjacency[e.tail].push(k);
            adjacency[e.head].push(k);
        }
    }

    let mut basis = Vec::new();
    for (k, e) in graph.edges.iter().enumerate() {
        if in_forest[k] {
            continue;
        }
        let mut v = vec![0i64; d];
        v[k] = 1;
        for (edge, forward) in forest_path(graph, &adjacency, e.head, e.tail) {
            v[edge] += if forward { 1 } else { -1 };
        }
        basis.push(v);
    }
    basis
}

/// Edges on the unique forest path `from -> to`, with `true` when traversed
/// tail to head.
fn forest_path(
    graph: &DualGraph,
    adjacency: &[Vec<usize>],
    from: usize,
    to: usize,
) -> Vec<(usize, bool)> {
    let n = graph.vertex_count();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(x) = stack.pop() {
        if x == to {
            break;
        }
        for &k in &adjacency[x] {
            let e = &graph.edges[k];
            let y = if e.tail == x { e.head } else { e.tail };
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some((x, k));
                stack.push(y);
            }
        }
    }
    let mut path = Vec::new();
    let mut y = to;
    while y != from {
        let (x, k) = parent[y].expect("endpoints of a non-forest edge share a tree");
        path.push((k, graph.edges[k].tail == x));
        y = x;
    }
    path.reverse();
    path
}

/// `d - n + c`.
pub fn betti1(graph: &DualGraph) -> usize {
    graph.edge_count() + graph.connected_components - graph.vertex_count()
}
