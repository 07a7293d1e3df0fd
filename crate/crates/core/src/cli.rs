//! Command-line front end.
//!
//! [`run`] parses arguments and returns the captured output and exit code,
//! so the binary is a thin wrapper and commands are testable in-process.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::corpus;
use crate::curve::{dual_graph, validate, CurveDescription, NodalCurve, ValidationOptions};
use crate::limitmhs::{lattice_l, limit_graded, spectral_row, LatticeElement};
use crate::motive::{nu_t, pairing_matrix, MotiveError, MotiveImage};
use crate::selfcheck::{self, Failure, SelfCheckConfig, SelfCheckSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFCHECK_FAILED: i32 = 1;
pub const EXIT_DIAGNOSTIC: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

pub const SEED_ENV: &str = "LIMITMOTIVE_SEED";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "limitmotive",
    version,
    about = "Limit mixed Hodge invariants and the 1-motive of a nodal degeneration"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Seed for the self-check generator.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = selfcheck::DEFAULT_SEED)]
    pub seed: u64,
    /// Largest rank of E and F in self-check instances.
    #[arg(long, global = true, default_value_t = selfcheck::DEFAULT_MAX_RANK)]
    pub max_rank: usize,
    /// Reject curves with unstable rational components.
    #[arg(long, global = true)]
    pub stable: bool,
    /// Accept curves whose dual graph is disconnected.
    #[arg(long, global = true)]
    pub allow_disconnected: bool,
}

impl RunConfig {
    fn validation_options(&self) -> ValidationOptions {
        ValidationOptions {
            require_stable: self.stable,
            allow_disconnected: self.allow_disconnected,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a curve description and list diagnostics.
    Validate { path: String },
    /// Dual graph, graded dimensions, Hodge numbers, L and the pairing.
    Report { path: String },
    /// The image of divisors in L under the 1-motive.
    Motive {
        path: String,
        /// Comma-separated node coefficients; defaults to each basis element of L.
        #[arg(long, allow_hyphen_values = true)]
        divisor: Option<String>,
    },
    /// Run the seeded Koszul-complex checks.
    KoszulSelfcheck,
    /// Print the dual graph in DOT format.
    Dot { path: String },
}

/// Captured result of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }

    fn fail(code: i32, stderr: String) -> Self {
        Self {
            stdout: String::new(),
            stderr,
            code,
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome::ok(e.to_string()),
                _ => Outcome::fail(EXIT_INPUT, e.to_string()),
            };
        }
    };
    execute(&cli.command, &cli.config)
}

pub fn execute(command: &Command, config: &RunConfig) -> Outcome {
    match command {
        Command::Validate { path } => cmd_validate(path, config),
        Command::Report { path } => cmd_report(path, config),
        Command::Motive { path, divisor } => cmd_motive(path, divisor.as_deref(), config),
        Command::KoszulSelfcheck => cmd_koszul_selfcheck(config),
        Command::Dot { path } => cmd_dot(path, config),
    }
}

/// Reads `path`, or a built-in curve for `builtin:NAME`.
pub fn read_input(path: &str) -> Result<String, String> {
    if let Some(name) = path.strip_prefix("builtin:") {
        return corpus::builtin_text(name).ok_or_else(|| {
            format!(
                "unknown built-in curve {name:?} (available: {}, ngon:N)",
                corpus::NAMES.join(", ")
            )
        });
    }
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))
}

fn json_text<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("reports serialize");
    let mut s = serde_json::to_string_pretty(&value).expect("json values serialize");
    s.push('\n');
    s
}

fn load_description(path: &str) -> Result<CurveDescription, Outcome> {
    let text = read_input(path).map_err(|e| Outcome::fail(EXIT_INPUT, format!("error: {e}\n")))?;
    CurveDescription::from_json(&text)
        .map_err(|e| Outcome::fail(EXIT_INPUT, format!("error: {path}: parse error at {e}\n")))
}

fn load_curve(path: &str, config: &RunConfig) -> Result<NodalCurve, Outcome> {
    let desc = load_description(path)?;
    NodalCurve::new(desc, &config.validation_options())
        .map_err(|report| Outcome::fail(EXIT_DIAGNOSTIC, format!("error: {path}: {report}")))
}

pub fn cmd_validate(path: &str, config: &RunConfig) -> Outcome {
    let desc = match load_description(path) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let report = validate(&desc, &config.validation_options());
    let text = match config.format {
        OutputFormat::Text => report.to_string(),
        OutputFormat::Json => json_text(&report),
    };
    Outcome {
        code: if report.is_valid() { EXIT_OK } else { EXIT_DIAGNOSTIC },
        stdout: text,
        stderr: String::new(),
    }
}

fn self_node_notices(curve: &NodalCurve) -> Vec<String> {
    curve
        .self_nodes()
        .into_iter()
        .map(|id| format!("self-node {id:?}: p'/p'' assignment follows the declared mark order"))
        .collect()
}

/// The full invariant report as a JSON value with sorted keys.
pub fn report_value(curve: &NodalCurve) -> Value {
    let graph = dual_graph(curve);
    let summary = limit_graded(curve);
    let row = spectral_row(curve);
    let basis: Vec<Vec<i64>> = lattice_l(curve).into_iter().map(|d| d.coefficients).collect();
    let pairing = pairing_matrix(curve);
    let pairing_rows: Vec<Vec<i64>> = (0..pairing.rows())
        .map(|i| {
            pairing
                .row(i)
                .iter()
                .map(|x| x.to_i64().expect("pairing entries are small"))
                .collect()
        })
        .collect();
    let hodge: Vec<Value> = summary
        .hodge_numbers
        .iter()
        .map(|h| {
            json!({
                "label": h.label,
                "weight": h.weight,
                "numbers": h.numbers.iter().map(|((p, q), v)| json!({"p": p, "q": q, "h": v})).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "curve": curve.description().to_json_value(),
        "dual_graph": {
            "vertices": graph.vertices.iter().zip(&graph.genera).map(|(v, g)| json!({"label": v, "genus": g})).collect::<Vec<_>>(),
            "edges": graph.edges.iter().map(|e| json!({"id": e.id, "tail": graph.vertices[e.tail], "head": graph.vertices[e.head]})).collect::<Vec<_>>(),
        },
        "components": summary.components,
        "nodes": summary.nodes,
        "connected_components": summary.connected_components,
        "genus_sum": curve.genus_sum(),
        "betti1": summary.betti1,
        "genus": summary.genus,
        "graded_dims": {
            "Gr^W_0 H^1_lim": summary.gr0_dim,
            "Gr^W_1 H^1_lim": summary.gr1_dim,
            "Gr^W_2 H^1_lim": summary.gr2_dim,
        },
        "hodge_numbers": hodge,
        "spectral_row": {
            "E_1": [row.e1_terms.0, row.e1_terms.1, row.e1_terms.2],
            "E_2": [row.e2_terms.0, row.e2_terms.1],
            "twist": row.twist,
        },
        "lattice_basis": basis,
        "lattice_rank": basis.len(),
        "torus_rank": summary.torus_rank,
        "pairing_matrix": pairing_rows,
        "notices": self_node_notices(curve),
    })
}

fn report_text(curve: &NodalCurve) -> String {
    let graph = dual_graph(curve);
    let s = limit_graded(curve);
    let row = spectral_row(curve);
    let basis = lattice_l(curve);
    let pairing = pairing_matrix(curve);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "curve: {} components, {} nodes, {} connected",
        s.components, s.nodes, s.connected_components
    );
    for (v, g) in graph.vertices.iter().zip(&graph.genera) {
        let _ = writeln!(out, "  component {v}: genus {g}");
    }
    for e in &graph.edges {
        let _ = writeln!(
            out,
            "  node {}: {} -> {}",
            e.id, graph.vertices[e.tail], graph.vertices[e.head]
        );
    }
    let _ = writeln!(out, "b1 = {}", s.betti1);
    let _ = writeln!(out, "genus of smooth fiber = {}", s.genus);
    let _ = writeln!(out, "graded dims (Gr_0, Gr_1, Gr_2) = ({}, {}, {})", s.gr0_dim, s.gr1_dim, s.gr2_dim);
    for h in &s.hodge_numbers {
        let numbers: Vec<String> = h
            .numbers
            .iter()
            .map(|((p, q), v)| format!("h^{{{p},{q}}} = {v}"))
            .collect();
        let _ = writeln!(out, "  {}: {}", h.label, numbers.join(", "));
    }
    let _ = writeln!(
        out,
        "weight-2 row: E_1 = ({}, {}, {}), E_2 = ({}, {}), twist {}",
        row.e1_terms.0, row.e1_terms.1, row.e1_terms.2, row.e2_terms.0, row.e2_terms.1, row.twist
    );
    let _ = writeln!(out, "L rank = {}", basis.len());
    for (i, d) in basis.iter().enumerate() {
        let _ = writeln!(out, "  gamma_{} = {:?}", i + 1, d.coefficients);
    }
    let _ = writeln!(out, "torus rank = {}", s.torus_rank);
    let _ = writeln!(out, "pairing matrix:");
    for i in 0..pairing.rows() {
        let entries: Vec<String> = pairing.row(i).iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "  [{}]", entries.join(", "));
    }
    for n in self_node_notices(curve) {
        let _ = writeln!(out, "note: {n}");
    }
    out
}

pub fn cmd_report(path: &str, config: &RunConfig) -> Outcome {
    let curve = match load_curve(path, config) {
        Ok(c) => c,
        Err(o) => return o,
    };
    Outcome::ok(match config.format {
        OutputFormat::Text => report_text(&curve),
        OutputFormat::Json => json_text(&report_value(&curve)),
    })
}

pub fn parse_divisor(text: &str) -> Result<Vec<i64>, String> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<i64>()
                .map_err(|e| format!("invalid divisor coefficient {:?}: {e}", s.trim()))
        })
        .collect()
}

fn motive_text(image: &MotiveImage) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "D = {:?}", image.divisor.coefficients);
    for div in &image.divisors {
        let terms: Vec<String> = div
            .points
            .iter()
            .map(|p| format!("{:+}*{}", p.multiplicity, p.mark))
            .collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" ") };
        let _ = writeln!(out, "  divisor on {}: {body}", div.component);
    }
    if let Some(fs) = &image.trivializations {
        for (div, f) in image.divisors.iter().zip(fs) {
            let _ = writeln!(out, "  f_{} = {f}", div.component);
        }
    }
    for g in &image.gluings {
        match &g.scalar {
            Some(s) => {
                let _ = writeln!(out, "  gluing at {}: n = {}, scalar {s}", g.node, g.exponent);
            }
            None => {
                let _ = writeln!(out, "  gluing at {}: n = {}", g.node, g.exponent);
            }
        }
    }
    let _ = write!(out, "  cocycle: {}", image.symbolic_cocycle);
    match &image.torus_coordinates {
        Some(coords) => {
            for (gamma, c) in image.cycle_basis.iter().zip(coords) {
                let _ = writeln!(out, "  coordinate along {gamma:?}: {c}");
            }
        }
        None => {
            let _ = writeln!(out, "  torus coordinates: symbolic only");
        }
    }
    for n in &image.notices {
        let _ = writeln!(out, "  note: {n}");
    }
    out
}

pub fn cmd_motive(path: &str, divisor: Option<&str>, config: &RunConfig) -> Outcome {
    let curve = match load_curve(path, config) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let divisors = match divisor {
        Some(text) => match parse_divisor(text) {
            Ok(v) => vec![LatticeElement::new(v)],
            Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}\n")),
        },
        None => lattice_l(&curve),
    };
    let mut images = Vec::with_capacity(divisors.len());
    for d in &divisors {
        match nu_t(&curve, d) {
            Ok(image) => images.push(image),
            Err(e @ (MotiveError::NotInLattice { .. } | MotiveError::WrongLength { .. })) => {
                return Outcome::fail(EXIT_DIAGNOSTIC, format!("error: {e}\n"));
            }
            Err(e) => return Outcome::fail(EXIT_DIAGNOSTIC, format!("error: {e}\n")),
        }
    }
    Outcome::ok(match config.format {
        OutputFormat::Json => json_text(&json!({ "images": images })),
        OutputFormat::Text if images.is_empty() => "L = 0: nothing to evaluate\n".to_string(),
        OutputFormat::Text => images.iter().map(motive_text).collect::<Vec<_>>().join("\n"),
    })
}

fn failure_text(f: &Failure) -> String {
    match f {
        Failure::ClosedForm { instance, reason } => format!(
            "closed-form cohomology: epsilon = {:?} ({}x{}), n = {}: {reason}",
            instance.epsilon, instance.target_rank, instance.source_rank, instance.n
        ),
        Failure::ChainCondition { epsilon, n } => {
            format!("chain condition: epsilon = {epsilon:?}, n = {n}: d^2 != 0")
        }
        Failure::Stability { instance } => format!(
            "filtration stability: epsilon = {:?}, G = {:?}, n = {}, m = {}",
            instance.epsilon, instance.g_basis, instance.n, instance.m
        ),
        Failure::GradedPiece { instance, reason } => format!(
            "graded piece: epsilon = {:?}, G = {:?}, n = {}, m = {}: {reason}",
            instance.epsilon, instance.g_basis, instance.n, instance.m
        ),
    }
}

fn selfcheck_text(s: &SelfCheckSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "seed {}, max rank {}", s.seed, s.max_rank);
    let _ = writeln!(out, "closed-form cohomology: {} instances", s.closed_form_instances);
    let _ = writeln!(out, "graded pieces: {} instances", s.graded_piece_instances);
    let _ = writeln!(out, "chain condition: {} complexes", s.chain_condition_checks);
    let _ = writeln!(out, "filtration stability: {} instances", s.stability_checks);
    if s.is_vacuous() {
        let _ = writeln!(out, "note: zero instances generated, pass is vacuous");
    }
    for f in &s.failures {
        let _ = writeln!(out, "FAIL {}", failure_text(f));
    }
    let _ = writeln!(
        out,
        "{}",
        if s.passed() {
            "all checks passed".to_string()
        } else {
            format!("{} failures", s.failures.len())
        }
    );
    out
}

pub fn cmd_koszul_selfcheck(config: &RunConfig) -> Outcome {
    let summary = selfcheck::run(&SelfCheckConfig {
        seed: config.seed,
        max_rank: config.max_rank,
        ..SelfCheckConfig::default()
    });
    selfcheck_outcome(&summary, config.format)
}

pub fn selfcheck_outcome(summary: &SelfCheckSummary, format: OutputFormat) -> Outcome {
    let stdout = match format {
        OutputFormat::Text => selfcheck_text(summary),
        OutputFormat::Json => {
            let mut value = serde_json::to_value(summary).expect("summary serializes");
            value["passed"] = json!(summary.passed());
            value["vacuous"] = json!(summary.is_vacuous());
            json_text(&value)
        }
    };
    Outcome {
        stdout,
        stderr: String::new(),
        code: if summary.passed() { EXIT_OK } else { EXIT_SELFCHECK_FAILED },
    }
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn dot_text(curve: &NodalCurve) -> String {
    let graph = dual_graph(curve);
    let mut out = String::from("digraph dual_graph {\n");
    for (v, g) in graph.vertices.iter().zip(&graph.genera) {
        let _ = writeln!(
            out,
            "  {} [label={}];",
            dot_quote(v),
            dot_quote(&format!("{v} (g={g})"))
        );
    }
    for e in &graph.edges {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            dot_quote(&graph.vertices[e.tail]),
            dot_quote(&graph.vertices[e.head]),
            dot_quote(&e.id)
        );
    }
    out.push_str("}\n");
    out
}

pub fn cmd_dot(path: &str, config: &RunConfig) -> Outcome {
    match load_curve(path, config) {
        Ok(c) => Outcome::ok(dot_text(&c)),
        Err(o) => o,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("limitmotive").chain(args.iter().copied()))
    }

    #[test]
    fn validate_builtins() {
        for name in corpus::NAMES {
            let o = run_args(&["validate", &format!("builtin:{name}")]);
            assert_eq!(o.code, EXIT_OK, "{name}: {}", o.stdout);
        }
        assert_eq!(run_args(&["validate", "builtin:nope"]).code, EXIT_INPUT);
    }

    #[test]
    fn report_json_fields() {
        let o = run_args(&["report", "--format", "json", "builtin:triangle"]);
        assert_eq!(o.code, EXIT_OK);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["betti1"], 1);
        assert_eq!(v["lattice_rank"], 1);
        assert_eq!(v["torus_rank"], 1);
        assert_eq!(v["pairing_matrix"], json!([[3]]));
        assert_eq!(v["graded_dims"]["Gr^W_2 H^1_lim"], 1);
    }

    #[test]
    fn motive_rejects_boundary() {
        let o = run_args(&["motive", "--divisor", "1,0,0", "builtin:triangle"]);
        assert_eq!(o.code, EXIT_DIAGNOSTIC);
        assert!(o.stderr.contains("not in L"), "{}", o.stderr);
        assert!(o.stderr.contains("[1, -1, 0]"), "{}", o.stderr);
        let o = run_args(&["motive", "--divisor", "-1,-1,1", "builtin:triangle"]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        assert!(o.stdout.contains("-36*t^3"), "{}", o.stdout);
        assert_eq!(run_args(&["motive", "--divisor", "1,x", "builtin:triangle"]).code, EXIT_INPUT);
    }

    #[test]
    fn dot_shapes() {
        let o = run_args(&["dot", "builtin:nodal-cubic"]);
        assert!(o.stdout.contains("\"X\" -> \"X\" [label=\"p\"]"), "{}", o.stdout);
        let o = run_args(&["dot", "builtin:triangle"]);
        assert_eq!(o.stdout.matches("->").count(), 3);
        assert!(o.stdout.contains("\"B\" -> \"A\" [label=\"p1\"]"), "{}", o.stdout);
    }

    #[test]
    fn failing_selfcheck_exits_one() {
        let summary = SelfCheckSummary {
            seed: 1,
            max_rank: 1,
            closed_form_instances: 0,
            graded_piece_instances: 0,
            chain_condition_checks: 1,
            stability_checks: 0,
            failures: vec![Failure::ChainCondition {
                epsilon: vec![vec![1]],
                n: 2,
            }],
        };
        let o = selfcheck_outcome(&summary, OutputFormat::Text);
        assert_eq!(o.code, EXIT_SELFCHECK_FAILED);
        assert!(o.stdout.contains("FAIL chain condition: epsilon = [[1]], n = 2"));
        let o = selfcheck_outcome(&summary, OutputFormat::Json);
        assert_eq!(o.code, EXIT_SELFCHECK_FAILED);
        assert!(o.stdout.contains("\"passed\": false"));
    }

    #[test]
    fn parses_divisors() {
        assert_eq!(parse_divisor("1, -2,3").unwrap(), vec![1, -2, 3]);
        assert_eq!(parse_divisor("").unwrap(), Vec::<i64>::new());
        assert!(parse_divisor("1,,2").is_err());
    }

    #[test]
    fn usage_errors_are_input_errors() {
        assert_eq!(run_args(&["frobnicate"]).code, EXIT_INPUT);
        assert_eq!(run_args(&["--help"]).code, EXIT_OK);
    }
}
