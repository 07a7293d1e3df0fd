//! Built-in example curves and random curve generation.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::curve::{
    Component, CurveDescription, NodalCurve, Node, NodeEnd, Rational, ValidationOptions,
};

pub const TRIANGLE_JSON: &str = include_str!("../corpus/triangle.json");
pub const BANANA_JSON: &str = include_str!("../corpus/banana.json");
pub const NODAL_CUBIC_JSON: &str = include_str!("../corpus/nodal_cubic.json");
pub const TREE12_JSON: &str = include_str!("../corpus/tree12.json");
pub const MIXED_CYCLE_JSON: &str = include_str!("../corpus/mixed_cycle.json");

/// Names accepted by [`builtin`], besides `ngon:N`.
pub const NAMES: [&str; 5] = ["triangle", "banana", "nodal-cubic", "tree12", "mixed-cycle"];

fn load(text: &str) -> NodalCurve {
    NodalCurve::from_json(text, &ValidationOptions::default()).expect("built-in corpus is valid")
}

/// Three rational components in a cycle.
pub fn triangle() -> NodalCurve {
    load(TRIANGLE_JSON)
}

/// Two rational components meeting in two nodes.
pub fn banana() -> NodalCurve {
    load(BANANA_JSON)
}

/// One rational component with a self-node.
pub fn nodal_cubic() -> NodalCurve {
    load(NODAL_CUBIC_JSON)
}

/// Components of genus 1 and 2 joined at one node.
pub fn tree12() -> NodalCurve {
    load(TREE12_JSON)
}

/// An elliptic and a rational component meeting in two nodes.
pub fn mixed_cycle() -> NodalCurve {
    load(MIXED_CYCLE_JSON)
}

/// Raw text of a built-in curve: one of [`NAMES`] or `ngon:N`.
pub fn builtin_text(name: &str) -> Option<String> {
    let text = match name {
        "triangle" => TRIANGLE_JSON,
        "banana" => BANANA_JSON,
        "nodal-cubic" => NODAL_CUBIC_JSON,
        "tree12" => TREE12_JSON,
        "mixed-cycle" => MIXED_CYCLE_JSON,
        _ => {
            let n: usize = name.strip_prefix("ngon:")?.parse().ok()?;
            if n == 0 {
                return None;
            }
            return Some(ngon_description(n).to_json());
        }
    };
    Some(text.to_string())
}

/// A cycle of `n >= 1` rational components. Node `p{k}` joins `C{k}` and
/// `C{k+1 mod n}`; for `n = 1` it is a self-node.
pub fn ngon_description(n: usize) -> CurveDescription {
    assert!(n >= 1, "an n-gon needs at least one component");
    let mut components: Vec<Component> = (0..n).map(|i| Component::new(format!("C{i}"), 0)).collect();
    let mut next_coord = vec![0i64; n];
    let mut place = |components: &mut Vec<Component>, c: usize, mark: String| {
        let coord = next_coord[c];
        next_coord[c] = coord + c as i64 + 1;
        components[c] = components[c]
            .clone()
            .with_mark(mark, Some(Rational::from_integer(BigInt::from(coord))));
    };
    let mut nodes = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b) = (k, (k + 1) % n);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let id = format!("p{k}");
        let (pm, dm) = (format!("{id}'"), format!("{id}''"));
        place(&mut components, lo, pm.clone());
        place(&mut components, hi, dm.clone());
        nodes.push(Node::new(
            id,
            NodeEnd::new(format!("C{lo}"), pm),
            NodeEnd::new(format!("C{hi}"), dm),
        ));
    }
    CurveDescription { components, nodes }
}

pub fn ngon(n: usize) -> NodalCurve {
    NodalCurve::new(ngon_description(n), &ValidationOptions::default())
        .expect("n-gons are valid")
}

#[derive(Clone, Copy, Debug)]
pub struct FuzzParams {
    pub max_components: usize,
    pub max_nodes: usize,
    pub max_genus: u32,
    pub rational_only: bool,
}

impl Default for FuzzParams {
    fn default() -> Self {
        Self {
            max_components: 6,
            max_nodes: 8,
            max_genus: 3,
            rational_only: false,
        }
    }
}

/// A random connected curve: a random spanning tree plus extra edges
/// (self-nodes included), shuffled so the spanning forest used for cycle
/// bases varies. Mark coordinates are distinct small rationals.
pub fn random_description(rng: &mut impl Rng, params: &FuzzParams) -> CurveDescription {
    let n = rng.gen_range(1..=params.max_components.max(1));
    let min_nodes = n - 1;
    let d = rng.gen_range(min_nodes..=params.max_nodes.max(min_nodes));
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|k| (rng.gen_range(0..k), k)).collect();
    while pairs.len() < d {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        pairs.push((a.min(b), a.max(b)));
    }
    pairs.shuffle(rng);

    let mut components: Vec<Component> = (0..n)
        .map(|i| {
            let genus = if params.rational_only {
                0
            } else {
                rng.gen_range(0..=params.max_genus)
            };
            Component::new(format!("C{i}"), genus)
        })
        .collect();
    let fresh_mark = |rng: &mut _, components: &mut Vec<Component>, c: usize| -> String {
        let key = format!("m{}", components[c].marks.len());
        let coord = loop {
            let q = random_rational(rng);
            if components[c].marks.values().all(|m| m.0.as_ref() != Some(&q)) {
                break q;
            }
        };
        components[c] = components[c].clone().with_mark(key.clone(), Some(coord));
        key
    };
    let mut nodes = Vec::with_capacity(d);
    for (k, &(a, b)) in pairs.iter().enumerate() {
        let pm = fresh_mark(rng, &mut components, a);
        let dm = fresh_mark(rng, &mut components, b);
        nodes.push(Node::new(
            format!("n{k}"),
            NodeEnd::new(format!("C{a}"), pm),
            NodeEnd::new(format!("C{b}"), dm),
        ));
    }
    CurveDescription { components, nodes }
}

fn random_rational(rng: &mut impl Rng) -> Rational {
    let num = rng.gen_range(-20i64..=20);
    let den = rng.gen_range(1i64..=4);
    Rational::new(num.into(), den.into())
}

pub fn random_curve(rng: &mut impl Rng, params: &FuzzParams) -> NodalCurve {
    NodalCurve::new(random_description(rng, params), &ValidationOptions::default())
        .expect("generated curves are valid")
}

/// Reorders components by `perm` (new position `i` holds old component
/// `perm[i]`) and swaps node ends where needed to keep `p'` on the earlier
/// component.
pub fn permute_components(desc: &CurveDescription, perm: &[usize]) -> CurveDescription {
    let components: Vec<Component> = perm.iter().map(|&i| desc.components[i].clone()).collect();
    let position = |label: &str| {
        components
            .iter()
            .position(|c| c.label == label)
            .expect("permutation keeps every label")
    };
    let nodes = desc
        .nodes
        .iter()
        .map(|n| {
            let mut n = n.clone();
            if position(&n.prime.component) > position(&n.double_prime.component) {
                std::mem::swap(&mut n.prime, &mut n.double_prime);
            }
            n
        })
        .collect();
    CurveDescription { components, nodes }
}
