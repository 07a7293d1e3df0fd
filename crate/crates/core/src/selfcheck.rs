//! Seeded random instances for the Koszul-complex checks.
//!
//! Two families are generated: maps `ε: Z^e -> Z^f` with free cokernel for
//! the closed-form cohomology check, and admissible triples `(ε, G, m)` with
//! `ε(E) ⊆ G` and `F/G` free for the graded-piece comparison. Every
//! generated complex is also checked for `d² = 0`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exactla::IntegerMatrix;
use crate::koszul::{
    build_complex, check_filtration_stability, graded_piece_iso_check,
    verify_cohomology_closed_form, FreeAbelianMap, KoszulComplex, LemmaOutcome,
    WeightSubgroupSpec,
};

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const DEFAULT_MAX_RANK: usize = 3;
pub const MAX_DEGREE: usize = 4;
pub const ENTRY_BOUND: i64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SelfCheckConfig {
    pub seed: u64,
    pub max_rank: usize,
    pub closed_form_instances: usize,
    pub graded_instances: usize,
}

impl Default for SelfCheckConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            max_rank: DEFAULT_MAX_RANK,
            closed_form_instances: 200,
            graded_instances: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedFormInstance {
    pub epsilon: Vec<Vec<i64>>,
    pub source_rank: usize,
    pub target_rank: usize,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedInstance {
    pub epsilon: Vec<Vec<i64>>,
    pub source_rank: usize,
    pub target_rank: usize,
    /// Columns span `G`.
    pub g_basis: Vec<Vec<i64>>,
    pub g_rank: usize,
    pub n: usize,
    pub m: isize,
}

impl ClosedFormInstance {
    pub fn map(&self) -> FreeAbelianMap {
        FreeAbelianMap::from_matrix(IntegerMatrix::from_i64_rows(&self.epsilon, self.source_rank))
    }
}

impl GradedInstance {
    pub fn map(&self) -> FreeAbelianMap {
        FreeAbelianMap::from_matrix(IntegerMatrix::from_i64_rows(&self.epsilon, self.source_rank))
    }

    pub fn spec(&self) -> WeightSubgroupSpec {
        WeightSubgroupSpec::new(IntegerMatrix::from_i64_rows(&self.g_basis, self.g_rank), self.m)
    }
}

fn random_rows(rng: &mut impl Rng, rows: usize, cols: usize) -> Vec<Vec<i64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-ENTRY_BOUND..=ENTRY_BOUND)).collect())
        .collect()
}

fn mul_rows(a: &[Vec<i64>], b: &[Vec<i64>], inner: usize, cols: usize) -> Vec<Vec<i64>> {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// A random `f x f` matrix of determinant `±1`, from elementary operations.
pub fn random_unimodular(rng: &mut impl Rng, f: usize) -> Vec<Vec<i64>> {
    let mut u: Vec<Vec<i64>> = (0..f)
        .map(|i| (0..f).map(|j| i64::from(i == j)).collect())
        .collect();
    if f < 2 {
        if f == 1 && rng.gen_bool(0.5) {
            u[0][0] = -1;
        }
        return u;
    }
    for _ in 0..3 * f {
        let i = rng.gen_range(0..f);
        let j = (i + rng.gen_range(1..f)) % f;
        match rng.gen_range(0..3) {
            0 => u.swap(i, j),
            1 => u[i].iter_mut().for_each(|x| *x = -*x),
            _ => {
                let k = rng.gen_range(-2..=2);
                let row_j = u[j].clone();
                for (x, y) in u[i].iter_mut().zip(row_j) {
                    *x += k * y;
                }
            }
        }
    }
    u
}

/// Draws maps until one has free cokernel. `None` if `max_rank` is 0.
pub fn closed_form_instance(rng: &mut impl Rng, max_rank: usize) -> Option<ClosedFormInstance> {
    if max_rank == 0 {
        return None;
    }
    loop {
        let e = rng.gen_range(0..=max_rank);
        let f = rng.gen_range(0..=max_rank);
        let n = rng.gen_range(0..=MAX_DEGREE);
        let inst = ClosedFormInstance {
            epsilon: random_rows(rng, f, e),
            source_rank: e,
            target_rank: f,
            n,
        };
        if inst.map().cokernel().is_free() {
            return Some(inst);
        }
    }
}

/// `G` is spanned by the first `g` columns of a random unimodular matrix, so
/// `F/G` is free, and `ε = G · C` for random `C`.
pub fn graded_instance(rng: &mut impl Rng, max_rank: usize) -> Option<GradedInstance> {
    if max_rank == 0 {
        return None;
    }
    let f = rng.gen_range(1..=max_rank);
    let e = rng.gen_range(0..=max_rank);
    let g = rng.gen_range(0..=f);
    let n = rng.gen_range(0..=MAX_DEGREE);
    let m = rng.gen_range(0..=n) as isize;
    let u = random_unimodular(rng, f);
    let g_basis: Vec<Vec<i64>> = u.iter().map(|row| row[..g].to_vec()).collect();
    let c = random_rows(rng, g, e);
    let epsilon = mul_rows(&g_basis, &c, g, e);
    Some(GradedInstance {
        epsilon,
        source_rank: e,
        target_rank: f,
        g_basis,
        g_rank: g,
        n,
        m,
    })
}

pub fn chain_condition_holds(complex: &KoszulComplex) -> bool {
    (0..complex.top()).all(|q| {
        let q = q as isize;
        (&complex.differential(q + 1) * &complex.differential(q)).is_zero()
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Failure {
    ClosedForm {
        instance: ClosedFormInstance,
        reason: String,
    },
    ChainCondition {
        epsilon: Vec<Vec<i64>>,
        n: usize,
    },
    Stability {
        instance: GradedInstance,
    },
    GradedPiece {
        instance: GradedInstance,
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelfCheckSummary {
    pub seed: u64,
    pub max_rank: usize,
    pub closed_form_instances: usize,
    pub graded_piece_instances: usize,
    pub chain_condition_checks: usize,
    pub stability_checks: usize,
    pub failures: Vec<Failure>,
}

impl SelfCheckSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn is_vacuous(&self) -> bool {
        self.closed_form_instances + self.graded_piece_instances == 0
    }
}

pub fn run_closed_form(rng: &mut impl Rng, count: usize, max_rank: usize, summary: &mut SelfCheckSummary) {
    for _ in 0..count {
        let Some(inst) = closed_form_instance(rng, max_rank) else {
            return;
        };
        let map = inst.map();
        let complex = build_complex(&map, inst.n);
        summary.chain_condition_checks += 1;
        if !chain_condition_holds(&complex) {
            summary.failures.push(Failure::ChainCondition {
                epsilon: inst.epsilon.clone(),
                n: inst.n,
            });
        }
        let report = verify_cohomology_closed_form(&map, inst.n);
        summary.closed_form_instances += 1;
        if !report.passed() {
            let reason = match report.outcome {
                LemmaOutcome::HypothesisFails(r) => r,
                LemmaOutcome::Checked(rows) => rows
                    .iter()
                    .filter(|r| !r.matches())
                    .map(|r| format!("H^{} = {} but expected rank {}", r.p, r.computed, r.expected_rank))
                    .collect::<Vec<_>>()
                    .join("; "),
            };
            summary.failures.push(Failure::ClosedForm { instance: inst, reason });
        }
    }
}

pub fn run_graded(rng: &mut impl Rng, count: usize, max_rank: usize, summary: &mut SelfCheckSummary) {
    for _ in 0..count {
        let Some(inst) = graded_instance(rng, max_rank) else {
            return;
        };
        let complex = build_complex(&inst.map(), inst.n);
        let spec = inst.spec();
        summary.chain_condition_checks += 1;
        if !chain_condition_holds(&complex) {
            summary.failures.push(Failure::ChainCondition {
                epsilon: inst.epsilon.clone(),
                n: inst.n,
            });
        }
        summary.stability_checks += 1;
        if !check_filtration_stability(&complex, &spec).unwrap_or(false) {
            summary.failures.push(Failure::Stability {
                instance: inst.clone(),
            });
        }
        summary.graded_piece_instances += 1;
        match graded_piece_iso_check(&complex, &spec) {
            Ok(report) if report.passed() => {}
            Ok(report) => {
                let reason = match report.outcome {
                    LemmaOutcome::HypothesisFails(r) => r,
                    LemmaOutcome::Checked(rows) => rows
                        .iter()
                        .filter(|r| !r.matches())
                        .map(|r| {
                            format!(
                                "degree {}: graded rank {} vs model {}, H = {} vs {}",
                                r.q, r.graded_rank, r.model_rank, r.graded_cohomology, r.model_cohomology
                            )
                        })
                        .collect::<Vec<_>>()
                        .join("; "),
                };
                summary.failures.push(Failure::GradedPiece { instance: inst, reason });
            }
            Err(e) => summary.failures.push(Failure::GradedPiece {
                instance: inst,
                reason: e.to_string(),
            }),
        }
    }
}

pub fn run(config: &SelfCheckConfig) -> SelfCheckSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut summary = SelfCheckSummary {
        seed: config.seed,
        max_rank: config.max_rank,
        closed_form_instances: 0,
        graded_piece_instances: 0,
        chain_condition_checks: 0,
        stability_checks: 0,
        failures: Vec::new(),
    };
    run_closed_form(&mut rng, config.closed_form_instances, config.max_rank, &mut summary);
    run_graded(&mut rng, config.graded_instances, config.max_rank, &mut summary);
    summary
}
