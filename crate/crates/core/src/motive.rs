//! The geometric 1-motive `ν_t: L -> Pic^0(X_0)`.
//!
//! For `D = Σ n_p p` in `L`, `ν_t(D)` is the line bundle
//! `O_{X_0[1]}(Σ n_p (p' - p''))` glued at each node by `u^{n_p}` on the `p'`
//! branch and `(1/v)^{n_p}` on the `p''` branch, where `uv = t`.
//!
//! On an all-rational curve the class is determined by its torus part, which
//! is computed exactly: trivialize the divisor on each component by a monic
//! factored rational function, read off leading coefficients at the node
//! preimages, and multiply the resulting gluing scalars around each basis
//! cycle. The local coordinates are fixed as `u = z - z(p')` and
//! `v = w - w(p'')`; other choices change coefficients but never `t`-exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::curve::{
    cycle_basis, dual_graph, serde_rational, Component, NodalCurve, Rational,
};
use crate::exactla::IntegerMatrix;
use crate::limitmhs::{boundary_of, is_in_lattice, LatticeElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MotiveError {
    #[error("not in L: incidence * D = {boundary:?}")]
    NotInLattice { boundary: Vec<i64> },
    #[error("divisor has {got} coefficients but the curve has {expected} nodes")]
    WrongLength { got: usize, expected: usize },
    #[error("not principal-representable: component {component:?} has positive genus")]
    PositiveGenus { component: String },
    #[error("divisor point {mark:?} is not a finite mark of component {component:?}")]
    UnmatchedPoint { component: String, mark: String },
    #[error("divisor on component {component:?} has degree {degree}, expected 0")]
    NonzeroDegree { component: String, degree: i64 },
    #[error("expected {expected} gauge scalars, got {got}")]
    GaugeLength { got: usize, expected: usize },
    #[error("gauge scalar for component {component:?} is zero")]
    ZeroGauge { component: String },
}

/// `coeff * t^texp` with `coeff != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusScalar {
    #[serde(with = "serde_rational")]
    pub coeff: Rational,
    pub texp: i64,
}

impl TorusScalar {
    pub fn new(coeff: Rational, texp: i64) -> Self {
        assert!(!coeff.is_zero(), "torus scalars have nonzero coefficient");
        Self { coeff, texp }
    }

    pub fn one() -> Self {
        Self::new(Rational::one(), 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeff.is_one() && self.texp == 0
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.coeff.recip(), -self.texp)
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let e = k.unsigned_abs();
        let coeff = num_traits::pow::Pow::pow(&base.coeff, e);
        Self::new(coeff, base.texp * e as i64)
    }
}

impl Mul for &TorusScalar {
    type Output = TorusScalar;

    fn mul(self, rhs: &TorusScalar) -> TorusScalar {
        TorusScalar::new(&self.coeff * &rhs.coeff, self.texp + rhs.texp)
    }
}

impl fmt::Display for TorusScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.texp {
            0 => write!(f, "{}", self.coeff),
            1 => write!(f, "{}*t", self.coeff),
            k => write!(f, "{}*t^{k}", self.coeff),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorPoint {
    pub mark: String,
    #[serde(serialize_with = "serialize_opt_rational")]
    pub coordinate: Option<Rational>,
    pub multiplicity: i64,
}

fn serialize_opt_rational<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    serde_rational::option::serialize(q, s)
}

/// The restriction of `Σ n_p (p' - p'')` to one component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentDivisor {
    pub component: String,
    pub points: Vec<DivisorPoint>,
}

impl ComponentDivisor {
    pub fn degree(&self) -> i64 {
        self.points.iter().map(|p| p.multiplicity).sum()
    }
}

fn check_element(curve: &NodalCurve, d: &LatticeElement) -> Result<(), MotiveError> {
    if d.coefficients.len() != curve.node_count() {
        return Err(MotiveError::WrongLength {
            got: d.coefficients.len(),
            expected: curve.node_count(),
        });
    }
    if !is_in_lattice(curve, d) {
        return Err(MotiveError::NotInLattice {
            boundary: boundary_of(curve, d),
        });
    }
    Ok(())
}

/// Component `i` gets `+n_p` at each `p'` on it and `-n_p` at each `p''`.
pub fn divisor_of(
    curve: &NodalCurve,
    d: &LatticeElement,
) -> Result<Vec<ComponentDivisor>, MotiveError> {
    check_element(curve, d)?;
    let mut per: Vec<BTreeMap<String, i64>> = vec![BTreeMap::new(); curve.component_count()];
    for (k, (node, &n)) in curve.nodes().iter().zip(&d.coefficients).enumerate() {
        if n == 0 {
            continue;
        }
        *per[curve.prime_component(k)]
            .entry(node.prime.mark.clone())
            .or_default() += n;
        *per[curve.double_prime_component(k)]
            .entry(node.double_prime.mark.clone())
            .or_default() -= n;
    }
    Ok(curve
        .components()
        .iter()
        .zip(per)
        .map(|(c, marks)| ComponentDivisor {
            component: c.label.clone(),
            points: marks
                .into_iter()
                .filter(|&(_, m)| m != 0)
                .map(|(mark, multiplicity)| DivisorPoint {
                    coordinate: c.coordinate(&mark).cloned(),
                    mark,
                    multiplicity,
                })
                .collect(),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GluingDescriptor {
    pub node: String,
    pub exponent: i64,
    /// `t^{n_p} λ''_p / λ'_p`, present only when evaluated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scalar: Option<TorusScalar>,
}

/// One descriptor per node, exponent `n_p`, no scalars.
pub fn gluing_descriptors(
    curve: &NodalCurve,
    d: &LatticeElement,
) -> Result<Vec<GluingDescriptor>, MotiveError> {
    check_element(curve, d)?;
    Ok(curve
        .nodes()
        .iter()
        .zip(&d.coefficients)
        .map(|(node, &n)| GluingDescriptor {
            node: node.id.clone(),
            exponent: n,
            scalar: None,
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChartKind {
    /// A small neighborhood of a node.
    Node { node: String },
    /// A component minus its node preimages.
    Complement { component: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chart {
    pub name: String,
    #[serde(flatten)]
    pub kind: ChartKind,
    /// `n_α`: `n_p` on node charts, 1 on nodeless charts.
    pub exponent: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Prime,
    DoublePrime,
}

/// `(w^α)^{n_α} / (w^β)^{n_β}` on one connected piece of `U_α ∩ U_β`, with
/// `α` a node chart and `β` the complement chart of the branch's component.
/// Since `w^β = 1`, only the numerator is nontrivial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Overlap {
    pub node_chart: String,
    pub complement_chart: String,
    pub component: String,
    pub branch: Branch,
    /// `u_p` on the `p'` branch, `1/v_p` on the `p''` branch.
    pub local_function: String,
    pub exponent: i64,
    pub expression: String,
}

impl Overlap {
    pub fn is_identity(&self) -> bool {
        self.exponent == 0
    }
}

/// Čech representative `((1, ..., 1), {(w^α)^{n_α} / (w^β)^{n_β}})` on the
/// cover by node charts and component complements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CechCocycle {
    /// The node-constant part, always all ones.
    pub node_constants: Vec<(String, i64)>,
    pub charts: Vec<Chart>,
    pub overlaps: Vec<Overlap>,
}

impl fmt::Display for CechCocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ones: Vec<String> = self.node_constants.iter().map(|(_, c)| c.to_string()).collect();
        writeln!(f, "node constants: ({})", ones.join(", "))?;
        for o in &self.overlaps {
            writeln!(
                f,
                "  {} ∩ {} [{} branch on {}]: {}",
                o.node_chart,
                o.complement_chart,
                match o.branch {
                    Branch::Prime => "p'",
                    Branch::DoublePrime => "p''",
                },
                o.component,
                o.expression
            )?;
        }
        Ok(())
    }
}

fn power_expression(base: &str, exponent: i64) -> String {
    match exponent {
        0 => "1".to_string(),
        1 => base.to_string(),
        k => format!("({base})^{k}"),
    }
}

pub fn cech_representative(
    curve: &NodalCurve,
    d: &LatticeElement,
) -> Result<CechCocycle, MotiveError> {
    check_element(curve, d)?;
    let mut charts: Vec<Chart> = curve
        .nodes()
        .iter()
        .zip(&d.coefficients)
        .map(|(node, &n)| Chart {
            name: format!("U_{}", node.id),
            kind: ChartKind::Node {
                node: node.id.clone(),
            },
            exponent: n,
        })
        .collect();
    charts.extend(curve.components().iter().map(|c| Chart {
        name: format!("U_{}", c.label),
        kind: ChartKind::Complement {
            component: c.label.clone(),
        },
        exponent: 1,
    }));

    let mut overlaps = Vec::with_capacity(2 * curve.node_count());
    for (k, (node, &n)) in curve.nodes().iter().zip(&d.coefficients).enumerate() {
        for (branch, ci, base) in [
            (Branch::Prime, curve.prime_component(k), format!("u_{}", node.id)),
            (
                Branch::DoublePrime,
                curve.double_prime_component(k),
                format!("1/v_{}", node.id),
            ),
        ] {
            let label = &curve.components()[ci].label;
            overlaps.push(Overlap {
                node_chart: format!("U_{}", node.id),
                complement_chart: format!("U_{label}"),
                component: label.clone(),
                branch,
                expression: power_expression(&base, n),
                local_function: base,
                exponent: n,
            });
        }
    }
    Ok(CechCocycle {
        node_constants: curve.nodes().iter().map(|n| (n.id.clone(), 1)).collect(),
        charts,
        overlaps,
    })
}

/// `scale * Π (z - root)^mult`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredRational {
    pub scale: Rational,
    pub factors: Vec<(Rational, i64)>,
}

impl FactoredRational {
    pub fn constant(scale: Rational) -> Self {
        Self {
            scale,
            factors: Vec::new(),
        }
    }

    pub fn degree(&self) -> i64 {
        self.factors.iter().map(|(_, m)| m).sum()
    }

    /// `(order, leading coefficient)` of the expansion in `z - point`.
    pub fn leading_term(&self, point: &Rational) -> (i64, Rational) {
        let mut order = 0;
        let mut coeff = self.scale.clone();
        for (root, m) in &self.factors {
            if root == point {
                order += m;
            } else {
                let base = point - root;
                coeff *= num_traits::pow::Pow::pow(&base, *m as i32);
            }
        }
        (order, coeff)
    }

    pub fn evaluate(&self, z: &Rational) -> Option<Rational> {
        let mut value = self.scale.clone();
        for (root, m) in &self.factors {
            let base = z - root;
            if base.is_zero() {
                return if *m > 0 { Some(Rational::zero()) } else { None };
            }
            value *= num_traits::pow::Pow::pow(&base, *m as i32);
        }
        Some(value)
    }
}

impl fmt::Display for FactoredRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factor = |root: &Rational, m: i64| {
            let base = if root.is_zero() {
                "z".to_string()
            } else if root.is_negative() {
                format!("(z + {})", -root)
            } else {
                format!("(z - {root})")
            };
            if m == 1 {
                base
            } else {
                format!("{base}^{m}")
            }
        };
        let num: Vec<String> = self
            .factors
            .iter()
            .filter(|(_, m)| *m > 0)
            .map(|(r, m)| factor(r, *m))
            .collect();
        let den: Vec<String> = self
            .factors
            .iter()
            .filter(|(_, m)| *m < 0)
            .map(|(r, m)| factor(r, -m))
            .collect();
        let mut numerator = num.join("*");
        if !self.scale.is_one() {
            numerator = if numerator.is_empty() {
                self.scale.to_string()
            } else {
                format!("{}*{numerator}", self.scale)
            };
        }
        if numerator.is_empty() {
            numerator = "1".to_string();
        }
        match den.len() {
            0 => write!(f, "{numerator}"),
            1 => write!(f, "{numerator}/{}", den[0]),
            _ => write!(f, "{numerator}/({})", den.join("*")),
        }
    }
}

/// The monic function `Π (z - q_k)^{m_k}` with divisor `divisor` on a
/// rational component; its value at infinity is 1 since the degree is zero.
pub fn trivializing_function(
    component: &Component,
    divisor: &ComponentDivisor,
) -> Result<FactoredRational, MotiveError> {
    if component.genus > 0 {
        return Err(MotiveError::PositiveGenus {
            component: component.label.clone(),
        });
    }
    let degree = divisor.degree();
    if degree != 0 {
        return Err(MotiveError::NonzeroDegree {
            component: component.label.clone(),
            degree,
        });
    }
    let mut factors = Vec::with_capacity(divisor.points.len());
    for p in &divisor.points {
        let Some(root) = component.coordinate(&p.mark) else {
            return Err(MotiveError::UnmatchedPoint {
                component: component.label.clone(),
                mark: p.mark.clone(),
            });
        };
        if p.multiplicity != 0 {
            factors.push((root.clone(), p.multiplicity));
        }
    }
    Ok(FactoredRational {
        scale: Rational::one(),
        factors,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MotiveImage {
    pub divisor: LatticeElement,
    pub divisors: Vec<ComponentDivisor>,
    pub gluings: Vec<GluingDescriptor>,
    /// Coordinates of `ν_t(D)` along each cycle basis element; only for
    /// all-rational curves.
    pub torus_coordinates: Option<Vec<TorusScalar>>,
    pub cycle_basis: Vec<Vec<i64>>,
    pub symbolic_cocycle: CechCocycle,
    /// Trivializing function per component, when evaluated.
    pub trivializations: Option<Vec<String>>,
    pub notices: Vec<String>,
}

impl MotiveImage {
    pub fn is_evaluated(&self) -> bool {
        self.torus_coordinates.is_some()
    }
}

pub fn nu_t(curve: &NodalCurve, d: &LatticeElement) -> Result<MotiveImage, MotiveError> {
    let ones = vec![Rational::one(); curve.component_count()];
    nu_t_with_gauge(curve, d, &ones)
}

/// [`nu_t`] with component `i`'s trivializing function multiplied by
/// `gauge[i]`. Cycle coordinates do not depend on the gauge.
pub fn nu_t_with_gauge(
    curve: &NodalCurve,
    d: &LatticeElement,
    gauge: &[Rational],
) -> Result<MotiveImage, MotiveError> {
    if gauge.len() != curve.component_count() {
        return Err(MotiveError::GaugeLength {
            got: gauge.len(),
            expected: curve.component_count(),
        });
    }
    if let Some(i) = gauge.iter().position(Zero::is_zero) {
        return Err(MotiveError::ZeroGauge {
            component: curve.components()[i].label.clone(),
        });
    }
    let divisors = divisor_of(curve, d)?;
    let mut gluings = gluing_descriptors(curve, d)?;
    let symbolic_cocycle = cech_representative(curve, d)?;
    let basis = cycle_basis(&dual_graph(curve));
    let mut notices = Vec::new();
    for id in curve.self_nodes() {
        notices.push(format!(
            "self-node {id:?}: p'/p'' assignment follows the declared mark order"
        ));
    }

    let positive: Vec<&str> = curve
        .components()
        .iter()
        .filter(|c| c.genus > 0)
        .map(|c| c.label.as_str())
        .collect();
    if !positive.is_empty() {
        notices.push(format!(
            "abelian part not evaluated: components of positive genus ({})",
            positive.join(", ")
        ));
        return Ok(MotiveImage {
            divisor: d.clone(),
            divisors,
            gluings,
            torus_coordinates: None,
            cycle_basis: basis,
            symbolic_cocycle,
            trivializations: None,
            notices,
        });
    }

    let functions = curve
        .components()
        .iter()
        .zip(&divisors)
        .zip(gauge)
        .map(|((c, div), s)| {
            trivializing_function(c, div).map(|mut f| {
                f.scale *= s;
                f
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    for (k, (node, g)) in curve.nodes().iter().zip(gluings.iter_mut()).enumerate() {
        let head = &curve.components()[curve.prime_component(k)];
        let tail = &curve.components()[curve.double_prime_component(k)];
        let z_prime = head
            .coordinate(&node.prime.mark)
            .ok_or_else(|| MotiveError::UnmatchedPoint {
                component: head.label.clone(),
                mark: node.prime.mark.clone(),
            })?;
        let w_double = tail
            .coordinate(&node.double_prime.mark)
            .ok_or_else(|| MotiveError::UnmatchedPoint {
                component: tail.label.clone(),
                mark: node.double_prime.mark.clone(),
            })?;
        let (order_p, lambda_p) = functions[curve.prime_component(k)].leading_term(z_prime);
        let (order_pp, lambda_pp) =
            functions[curve.double_prime_component(k)].leading_term(w_double);
        debug_assert_eq!(order_p, g.exponent);
        debug_assert_eq!(order_pp, -g.exponent);
        g.scalar = Some(TorusScalar::new(lambda_pp / lambda_p, g.exponent));
    }

    let torus_coordinates = basis
        .iter()
        .map(|cycle| {
            cycle
                .iter()
                .zip(&gluings)
                .fold(TorusScalar::one(), |acc, (&m, g)| {
                    &acc * &g.scalar.as_ref().expect("evaluated above").pow(m)
                })
        })
        .collect();

    Ok(MotiveImage {
        divisor: d.clone(),
        divisors,
        gluings,
        torus_coordinates: Some(torus_coordinates),
        cycle_basis: basis,
        symbolic_cocycle,
        trivializations: Some(functions.iter().map(ToString::to_string).collect()),
        notices,
    })
}

/// Entry `(i, j)` is the `t`-exponent of the coordinate of `ν_t(γ_j)` along
/// `γ_i`, for the cycle basis `γ`. On curves with positive genus components
/// the exponents come from the gluing data alone.
pub fn pairing_matrix(curve: &NodalCurve) -> IntegerMatrix {
    let basis = cycle_basis(&dual_graph(curve));
    let b = basis.len();
    let mut out = IntegerMatrix::zeros(b, b);
    for (j, gamma_j) in basis.iter().enumerate() {
        let d = LatticeElement::new(gamma_j.clone());
        let image = nu_t(curve, &d).expect("cycle basis elements lie in L");
        for (i, gamma_i) in basis.iter().enumerate() {
            let texp = match &image.torus_coordinates {
                Some(coords) => coords[i].texp,
                None => gamma_i
                    .iter()
                    .zip(&image.gluings)
                    .map(|(&m, g)| m * g.exponent)
                    .sum(),
            };
            out.set(i, j, BigInt::from(texp));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::limitmhs::lattice_l;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn point(mark: &str, multiplicity: i64) -> DivisorPoint {
        DivisorPoint {
            mark: mark.into(),
            coordinate: None,
            multiplicity,
        }
    }

    fn rational_line(marks: &[(&str, i64)]) -> Component {
        marks
            .iter()
            .fold(Component::new("P", 0), |c, (k, v)| c.with_mark(*k, Some(q(*v))))
    }

    #[test]
    fn torus_scalar_group_laws() {
        let a = TorusScalar::new(Rational::new(3.into(), 2.into()), 2);
        let b = TorusScalar::new(q(-4), -1);
        assert_eq!(&a * &b, TorusScalar::new(q(-6), 1));
        assert!((&a * &a.inverse()).is_one());
        assert_eq!(a.pow(-2), TorusScalar::new(Rational::new(4.into(), 9.into()), -4));
        assert_eq!(a.pow(0), TorusScalar::one());
        assert_eq!(b.to_string(), "-4*t^-1");
    }

    #[test]
    fn torus_scalar_json() {
        let s = TorusScalar::new(q(-36), 3);
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"coeff":"-36/1","texp":3}"#
        );
    }

    #[test]
    fn trivializing_examples() {
        let c = rational_line(&[("a", 0), ("b", 1), ("c", 2)]);
        let div = ComponentDivisor {
            component: "P".into(),
            points: vec![point("a", 1), point("b", -1)],
        };
        let f = trivializing_function(&c, &div).unwrap();
        assert_eq!(f.to_string(), "z/(z - 1)");

        let empty = ComponentDivisor {
            component: "P".into(),
            points: vec![],
        };
        assert_eq!(trivializing_function(&c, &empty).unwrap().to_string(), "1");

        let div = ComponentDivisor {
            component: "P".into(),
            points: vec![point("a", 2), point("b", -1), point("c", -1)],
        };
        let f = trivializing_function(&c, &div).unwrap();
        assert_eq!(f.to_string(), "z^2/((z - 1)*(z - 2))");
        // Value at a far point tends to 1: f(1000) = 10^6 / (999 * 998).
        assert_eq!(
            f.evaluate(&q(1000)).unwrap(),
            Rational::new(1_000_000.into(), (999 * 998).into())
        );
    }

    #[test]
    fn trivializing_errors() {
        let e = Component::new("E", 1).with_mark("x", None);
        let div = ComponentDivisor {
            component: "E".into(),
            points: vec![],
        };
        assert_eq!(
            trivializing_function(&e, &div).unwrap_err().to_string(),
            "not principal-representable: component \"E\" has positive genus"
        );
        let c = rational_line(&[("a", 0)]);
        let div = ComponentDivisor {
            component: "P".into(),
            points: vec![point("a", 1), point("zz", -1)],
        };
        assert!(matches!(
            trivializing_function(&c, &div),
            Err(MotiveError::UnmatchedPoint { .. })
        ));
    }

    #[test]
    fn leading_terms() {
        let f = FactoredRational {
            scale: Rational::one(),
            factors: vec![(q(0), 1), (q(1), -1)],
        };
        assert_eq!(f.leading_term(&q(0)), (1, q(-1)));
        assert_eq!(f.leading_term(&q(1)), (-1, q(1)));
        assert_eq!(f.leading_term(&q(2)), (0, q(2)));
    }

    #[test]
    fn triangle_divisors() {
        let c = corpus::triangle();
        let gen = &lattice_l(&c)[0];
        let divs = divisor_of(&c, gen).unwrap();
        for (div, comp) in divs.iter().zip(c.components()) {
            assert_eq!(div.degree(), 0);
            assert_eq!(div.points.len(), 2);
            assert_eq!(div.component, comp.label);
        }
        // A holds p1' and p3'; generator is (-1, -1, 1).
        assert_eq!(divs[0].points[0].multiplicity, -1);
        assert_eq!(divs[0].points[1].multiplicity, 1);

        let zero = LatticeElement::zero(3);
        assert!(divisor_of(&c, &zero).unwrap().iter().all(|d| d.points.is_empty()));
    }

    #[test]
    fn banana_divisor_signs() {
        let c = corpus::banana();
        let d = LatticeElement::new(vec![1, -1]);
        let divs = divisor_of(&c, &d).unwrap();
        let mults = |i: usize| -> Vec<i64> { divs[i].points.iter().map(|p| p.multiplicity).collect() };
        // A: +n_e1 at a1, +n_e2 at a2. B: -n_e1 at b1, -n_e2 at b2.
        assert_eq!(mults(0), vec![1, -1]);
        assert_eq!(mults(1), vec![-1, 1]);
    }

    #[test]
    fn rejects_non_lattice_elements() {
        let c = corpus::triangle();
        let err = divisor_of(&c, &LatticeElement::new(vec![1, 0, 0])).unwrap_err();
        assert_eq!(
            err,
            MotiveError::NotInLattice {
                boundary: vec![1, -1, 0]
            }
        );
        assert!(matches!(
            nu_t(&c, &LatticeElement::new(vec![1])),
            Err(MotiveError::WrongLength { .. })
        ));
    }

    #[test]
    fn gluing_exponents() {
        let c = corpus::triangle();
        let gen = lattice_l(&c)[0].clone();
        let g = gluing_descriptors(&c, &gen).unwrap();
        assert_eq!(g.len(), 3);
        assert!(g.iter().all(|x| x.exponent.abs() == 1));
        let g2 = gluing_descriptors(&c, &gen.scaled(2)).unwrap();
        for (a, b) in g.iter().zip(&g2) {
            assert_eq!(b.exponent, 2 * a.exponent);
        }
        let g0 = gluing_descriptors(&c, &LatticeElement::zero(3)).unwrap();
        assert!(g0.iter().all(|x| x.exponent == 0));
    }

    #[test]
    fn cech_on_nodal_cubic() {
        let c = corpus::nodal_cubic();
        let cocycle = cech_representative(&c, &LatticeElement::new(vec![1])).unwrap();
        assert_eq!(cocycle.charts.len(), 2);
        assert_eq!(cocycle.charts[0].exponent, 1);
        assert_eq!(cocycle.charts[1].exponent, 1);
        let exprs: Vec<&str> = cocycle.overlaps.iter().map(|o| o.expression.as_str()).collect();
        assert_eq!(exprs, vec!["u_p", "1/v_p"]);

        let zero = cech_representative(&c, &LatticeElement::zero(1)).unwrap();
        assert!(zero.overlaps.iter().all(Overlap::is_identity));
        assert!(zero.node_constants.iter().all(|(_, v)| *v == 1));
    }

    #[test]
    fn cech_on_triangle() {
        let c = corpus::triangle();
        let gen = lattice_l(&c)[0].clone();
        let cocycle = cech_representative(&c, &gen).unwrap();
        let node_charts: Vec<i64> = cocycle
            .charts
            .iter()
            .filter(|ch| matches!(ch.kind, ChartKind::Node { .. }))
            .map(|ch| ch.exponent.abs())
            .collect();
        assert_eq!(node_charts, vec![1, 1, 1]);
        assert_eq!(cocycle.overlaps.len(), 6);
    }

    #[test]
    fn nodal_cubic_coordinate() {
        // f = z/(z-1); λ' = -1 at z = 0 (order 1), λ'' = 1 at z = 1 (order -1).
        let c = corpus::nodal_cubic();
        let image = nu_t(&c, &LatticeElement::new(vec![1])).unwrap();
        assert_eq!(image.torus_coordinates.unwrap(), vec![TorusScalar::new(q(-1), 1)]);
        assert_eq!(image.notices.len(), 1);
    }

    #[test]
    fn triangle_coordinate() {
        // -(a1 - a3)^2 (b1 - b2)^2 (c2 - c3)^2 t^3 = -(1 * 4 * 9) t^3.
        let c = corpus::triangle();
        let gen = lattice_l(&c)[0].clone();
        assert_eq!(gen.coefficients, vec![-1, -1, 1]);
        let image = nu_t(&c, &gen).unwrap();
        assert_eq!(image.torus_coordinates.unwrap(), vec![TorusScalar::new(q(-36), 3)]);
        let neg = nu_t(&c, &gen.scaled(-1)).unwrap();
        assert_eq!(neg.torus_coordinates.unwrap(), vec![TorusScalar::new(q(-36), 3).inverse()]);
        let two = nu_t(&c, &gen.scaled(2)).unwrap();
        assert_eq!(two.torus_coordinates.unwrap(), vec![TorusScalar::new(q(1296), 6)]);
    }

    #[test]
    fn gauge_leaves_cycle_coordinates_fixed() {
        let c = corpus::triangle();
        let gen = lattice_l(&c)[0].clone();
        let base = nu_t(&c, &gen).unwrap();
        let scaled = nu_t_with_gauge(&c, &gen, &[q(2), q(-3), Rational::new(5.into(), 7.into())])
            .unwrap();
        assert_eq!(base.torus_coordinates, scaled.torus_coordinates);
        assert_ne!(base.gluings, scaled.gluings);
    }

    #[test]
    fn torus_scalar_roundtrip() {
        let s = TorusScalar::new(Rational::new((-7).into(), 3.into()), -2);
        let back: TorusScalar = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn zero_divisor_is_identity() {
        for c in [corpus::triangle(), corpus::banana(), corpus::nodal_cubic(), corpus::ngon(5)] {
            let image = nu_t(&c, &LatticeElement::zero(c.node_count())).unwrap();
            assert!(image.torus_coordinates.unwrap().iter().all(TorusScalar::is_one));
        }
    }

    #[test]
    fn mixed_genus_is_symbolic() {
        let c = corpus::mixed_cycle();
        let gen = lattice_l(&c)[0].clone();
        let image = nu_t(&c, &gen).unwrap();
        assert!(!image.is_evaluated());
        assert!(image.gluings.iter().all(|g| g.scalar.is_none()));
        assert!(image.notices.iter().any(|n| n.starts_with("abelian part not evaluated")));
        assert_eq!(pairing_matrix(&c), IntegerMatrix::from_i64_rows(&[vec![2]], 1));
    }

    #[test]
    fn pairing_examples() {
        let one = |x| IntegerMatrix::from_i64_rows(&[vec![x]], 1);
        assert_eq!(pairing_matrix(&corpus::triangle()), one(3));
        assert_eq!(pairing_matrix(&corpus::banana()), one(2));
        assert_eq!(pairing_matrix(&corpus::nodal_cubic()), one(1));
        assert_eq!(pairing_matrix(&corpus::tree12()).rows(), 0);
    }

    #[test]
    fn gauge_validation() {
        let c = corpus::triangle();
        let gen = lattice_l(&c)[0].clone();
        assert!(matches!(
            nu_t_with_gauge(&c, &gen, &[q(1)]),
            Err(MotiveError::GaugeLength { .. })
        ));
        assert!(matches!(
            nu_t_with_gauge(&c, &gen, &[q(1), q(0), q(1)]),
            Err(MotiveError::ZeroGauge { .. })
        ));
    }
}
