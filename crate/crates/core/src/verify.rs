//! The identity suite.
//!
//! [`run_suite`] expands a [`SuiteConfig`] into independent jobs, runs them on
//! a rayon pool and assembles a [`VerificationReport`]. Job order, and hence
//! the report body, depends only on the configuration; wall-clock timings are
//! kept in a separate `timing` section that is excluded from the body digest.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::combinat::{indices_of_degree, MultiIndex};
use crate::durrmeyer::{apply_operator, composition_coefficients, DurrmeyerOperator, OperatorSpec};
use crate::error::{BdkError, Result};
use crate::kernels::{
    inner_sum_lemma, kernel_closed_twofold, kernel_definition_threefold, kernel_definition_twofold,
    kernel_legendre, kernel_single, univariate_threefold_closed, univariate_twofold_closed,
    KernelPolynomial,
};
use crate::poly::{BarycentricPoint, CartesianPolynomial};
use crate::rational::Rational;

pub const REPORT_SCHEMA: &str = "bdk-report/1";

/// Largest denominator of the sampled rational points.
pub const MAX_POINT_DENOMINATOR: i64 = 97;

/// Deliberate corruptions used to check that the suite catches mismatches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Doubles the prefactor of the multivariate two-fold closed form.
    DoubleTwofoldScale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCap {
    pub d: usize,
    pub max_degree: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Dimensions `d` to check.
    pub dims: Vec<usize>,
    /// Max `m, n` for the multivariate two-fold kernel, per dimension.
    pub degree_caps: Vec<DegreeCap>,
    pub univariate_cap: u32,
    pub legendre_cap: u32,
    /// Max degree of each factor in three-fold compositions (`d = 1`).
    pub threefold_cap: u32,
    pub combination_cap: u32,
    pub operator_cap: u32,
    /// Max total degree of the monomial test functions.
    pub monomial_degree_cap: u32,
    pub moment_cap: u32,
    pub lemma_degree_cap: u32,
    /// Max `|β|` in the inner-sum identity.
    pub lemma_index_cap: u32,
    pub lemma_points: usize,
    /// Operator, combination and lemma checks run for `d <= aux_dim_cap`.
    pub aux_dim_cap: usize,
    pub seed: u64,
    /// Worker threads; 0 lets rayon decide. Recorded under timing, not in
    /// the body, since it cannot change any result.
    #[serde(skip)]
    pub parallelism: usize,
    /// Skip kernel jobs whose multi-index pair count exceeds this.
    pub max_pairs: Option<u64>,
    pub mutation: Option<Mutation>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            dims: vec![1, 2, 3],
            degree_caps: vec![
                DegreeCap { d: 1, max_degree: 8 },
                DegreeCap { d: 2, max_degree: 6 },
                DegreeCap { d: 3, max_degree: 4 },
            ],
            univariate_cap: 10,
            legendre_cap: 8,
            threefold_cap: 5,
            combination_cap: 5,
            operator_cap: 5,
            monomial_degree_cap: 4,
            moment_cap: 6,
            lemma_degree_cap: 4,
            lemma_index_cap: 4,
            lemma_points: 5,
            aux_dim_cap: 2,
            seed: 0x5eed,
            parallelism: 0,
            max_pairs: None,
            mutation: None,
        }
    }
}

impl SuiteConfig {
    /// Fallback two-fold cap for dimensions without an explicit entry.
    const FALLBACK_CAP: u32 = 2;

    pub fn degree_cap(&self, d: usize) -> u32 {
        self.degree_caps
            .iter()
            .find(|c| c.d == d)
            .map_or(Self::FALLBACK_CAP, |c| c.max_degree)
    }

    /// Sets the two-fold cap for `d`, replacing any existing entry.
    pub fn set_degree_cap(&mut self, d: usize, max_degree: u32) {
        self.degree_caps.retain(|c| c.d != d);
        self.degree_caps.push(DegreeCap { d, max_degree });
        self.degree_caps.sort_by_key(|c| c.d);
    }

    /// Clamps every degree cap to at most `cap`.
    pub fn with_max_degree(mut self, cap: u32) -> Self {
        for d in self.dims.clone() {
            let c = self.degree_cap(d).min(cap);
            self.set_degree_cap(d, c);
        }
        for c in &mut self.degree_caps {
            c.max_degree = c.max_degree.min(cap);
        }
        for c in [
            &mut self.univariate_cap,
            &mut self.legendre_cap,
            &mut self.threefold_cap,
            &mut self.combination_cap,
            &mut self.operator_cap,
            &mut self.monomial_degree_cap,
            &mut self.moment_cap,
            &mut self.lemma_degree_cap,
            &mut self.lemma_index_cap,
        ] {
            *c = (*c).min(cap);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(BdkError::invalid("at least one dimension is required"));
        }
        if self.dims.contains(&0) {
            return Err(BdkError::invalid("dimensions must be >= 1"));
        }
        Ok(())
    }

    fn has_univariate(&self) -> bool {
        self.dims.contains(&1)
    }

    fn aux_dims(&self) -> impl Iterator<Item = usize> + '_ {
        self.dims.iter().copied().filter(|&d| d <= self.aux_dim_cap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Counterexample attached to a failing check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x_exp: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub y_exp: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub left: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub right: Option<String>,
}

impl Witness {
    fn message(msg: impl Into<String>) -> Self {
        Witness {
            message: msg.into(),
            x_exp: None,
            y_exp: None,
            left: None,
            right: None,
        }
    }

    fn values(msg: impl Into<String>, left: &Rational, right: &Rational) -> Self {
        Witness {
            left: Some(left.to_string()),
            right: Some(right.to_string()),
            ..Self::message(msg)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub params: Value,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

impl CheckRecord {
    fn pass(name: &str, params: Value) -> Self {
        CheckRecord {
            name: name.to_string(),
            params,
            status: Status::Pass,
            witness: None,
        }
    }

    fn fail(name: &str, params: Value, witness: Witness) -> Self {
        CheckRecord {
            name: name.to_string(),
            params,
            status: Status::Fail,
            witness: Some(witness),
        }
    }

    fn from_bool(name: &str, params: Value, ok: bool, witness: impl FnOnce() -> Witness) -> Self {
        if ok {
            Self::pass(name, params)
        } else {
            Self::fail(name, params, witness())
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// Deterministic part of a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportBody {
    pub schema: String,
    pub version: String,
    pub config: SuiteConfig,
    /// False when any job was skipped by a resource cap.
    pub complete: bool,
    pub summary: Summary,
    pub checks: Vec<CheckRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobTiming {
    pub job: String,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub threads: usize,
    pub total_millis: f64,
    pub jobs: Vec<JobTiming>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(flatten)]
    pub body: ReportBody,
    /// SHA-256 of [`VerificationReport::body_json`].
    pub body_sha256: String,
    pub timing: Timing,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.body.summary.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.body.checks.iter().filter(|c| c.status == Status::Fail)
    }

    /// Canonical serialization of the body; byte-identical across runs with
    /// the same configuration.
    pub fn body_json(&self) -> String {
        body_json(&self.body)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn body_json(body: &ReportBody) -> String {
    serde_json::to_string_pretty(body).expect("serializable")
}

#[derive(Debug, Clone)]
enum Job {
    Twofold { d: usize, m: u32, n: u32 },
    Single { d: usize, n: u32 },
    Univariate { m: u32, n: u32 },
    Legendre { m: u32, n: u32 },
    Threefold { a: u32, b: u32, c: u32 },
    ThreefoldSymmetry { a: u32, b: u32, c: u32 },
    Combination { d: usize, m: u32, n: u32 },
    Lemma { n: u32, beta: MultiIndex, points: Vec<BarycentricPoint> },
    Operator { d: usize, n: u32 },
    OperatorPair { d: usize, m: u32, n: u32 },
    Moment { n: u32 },
}

fn count(n: u32, d: usize) -> u64 {
    indices_count(n as u64, d as u64)
}

fn indices_count(n: u64, d: u64) -> u64 {
    // C(n + d, d) without overflow for the sizes used here
    (1..=d).fold(1u64, |acc, i| acc.saturating_mul(n + i) / i)
}

impl Job {
    fn label(&self) -> String {
        match self {
            Job::Twofold { d, m, n } => format!("twofold d={d} m={m} n={n}"),
            Job::Single { d, n } => format!("single d={d} n={n}"),
            Job::Univariate { m, n } => format!("univariate m={m} n={n}"),
            Job::Legendre { m, n } => format!("legendre m={m} n={n}"),
            Job::Threefold { a, b, c } => format!("threefold {a},{b},{c}"),
            Job::ThreefoldSymmetry { a, b, c } => format!("threefold-symmetry {a},{b},{c}"),
            Job::Combination { d, m, n } => format!("combination d={d} m={m} n={n}"),
            Job::Lemma { n, beta, .. } => format!("lemma n={n} beta={beta}"),
            Job::Operator { d, n } => format!("operator d={d} n={n}"),
            Job::OperatorPair { d, m, n } => format!("operator-pair d={d} m={m} n={n}"),
            Job::Moment { n } => format!("moment n={n}"),
        }
    }

    /// Number of multi-index pairs (or triples) the job enumerates.
    fn pairs(&self) -> u64 {
        match *self {
            Job::Twofold { d, m, n } | Job::Combination { d, m, n } => count(m, d) * count(n, d),
            Job::Univariate { m, n } => count(m, 1) * count(n, 1),
            Job::Threefold { a, b, c } => count(a, 1) * count(b, 1) * count(c, 1),
            Job::ThreefoldSymmetry { a, b, c } => 6 * count(a, 1) * count(b, 1) * count(c, 1),
            _ => 0,
        }
    }

    fn primary_check(&self) -> &'static str {
        match self {
            Job::Twofold { .. } => "multivariate_twofold",
            Job::Single { .. } => "stochasticity",
            Job::Univariate { .. } => "univariate_twofold",
            Job::Legendre { .. } => "legendre_form",
            Job::Threefold { .. } => "univariate_threefold",
            Job::ThreefoldSymmetry { .. } => "threefold_permutation_symmetry",
            Job::Combination { .. } => "linear_combination",
            Job::Lemma { .. } => "inner_sum_lemma",
            Job::Operator { .. } => "operator_reproduces_one",
            Job::OperatorPair { .. } => "operator_commute",
            Job::Moment { .. } => "first_moment",
        }
    }

    fn params(&self) -> Value {
        match self {
            Job::Twofold { d, m, n } | Job::Combination { d, m, n } | Job::OperatorPair { d, m, n } => {
                json!({"d": d, "m": m, "n": n})
            }
            Job::Single { d, n } | Job::Operator { d, n } => json!({"d": d, "n": n}),
            Job::Univariate { m, n } | Job::Legendre { m, n } => json!({"d": 1, "m": m, "n": n}),
            Job::Threefold { a, b, c } | Job::ThreefoldSymmetry { a, b, c } => {
                json!({"d": 1, "n3": a, "n2": b, "n1": c})
            }
            Job::Lemma { n, beta, points } => json!({
                "d": beta.dim(),
                "n": n,
                "beta": beta.parts(),
                "points": points
                    .iter()
                    .map(|p| p.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            }),
            Job::Moment { n } => json!({"d": 1, "n": n}),
        }
    }
}

fn build_jobs(cfg: &SuiteConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    for &d in &cfg.dims {
        let cap = cfg.degree_cap(d);
        for m in 0..=cap {
            for n in 0..=cap {
                jobs.push(Job::Twofold { d, m, n });
            }
        }
        for n in 0..=cap {
            jobs.push(Job::Single { d, n });
        }
    }
    if cfg.has_univariate() {
        for m in 0..=cfg.univariate_cap {
            for n in 0..=cfg.univariate_cap {
                jobs.push(Job::Univariate { m, n });
            }
        }
        for m in 0..=cfg.legendre_cap {
            for n in 0..=cfg.legendre_cap {
                jobs.push(Job::Legendre { m, n });
            }
        }
        let t = cfg.threefold_cap;
        for a in 0..=t {
            for b in 0..=t {
                for c in 0..=t {
                    jobs.push(Job::Threefold { a, b, c });
                    if a <= b && b <= c {
                        jobs.push(Job::ThreefoldSymmetry { a, b, c });
                    }
                }
            }
        }
        for n in 0..=cfg.moment_cap {
            jobs.push(Job::Moment { n });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for d in cfg.aux_dims() {
        for m in 0..=cfg.combination_cap {
            for n in 0..=cfg.combination_cap {
                jobs.push(Job::Combination { d, m, n });
            }
        }
        for n in 0..=cfg.lemma_degree_cap {
            for size in 0..=cfg.lemma_index_cap {
                for beta in indices_of_degree(size, d) {
                    let points = (0..cfg.lemma_points).map(|_| random_point(&mut rng, d)).collect();
                    jobs.push(Job::Lemma { n, beta, points });
                }
            }
        }
        for n in 0..=cfg.operator_cap {
            jobs.push(Job::Operator { d, n });
            for m in 0..=n {
                jobs.push(Job::OperatorPair { d, m, n });
            }
        }
    }
    jobs
}

/// Rational point with coordinates `p/q`, `1 <= q <= 97`, `0 <= p <= q`.
fn random_point(rng: &mut ChaCha8Rng, d: usize) -> BarycentricPoint {
    let coords = (0..d)
        .map(|_| {
            let q = rng.gen_range(1..=MAX_POINT_DENOMINATOR);
            let p = rng.gen_range(0..=q);
            Rational::new(BigInt::from(p), BigInt::from(q))
        })
        .collect();
    BarycentricPoint::new(coords).expect("d >= 1")
}

fn with(params: &Value, extra: Value) -> Value {
    let mut p = params.clone();
    if let (Value::Object(base), Value::Object(more)) = (&mut p, extra) {
        base.extend(more);
    }
    p
}

fn kernel_equality(name: &str, params: Value, left: &KernelPolynomial, right: &KernelPolynomial) -> CheckRecord {
    match left.first_difference(right) {
        None => CheckRecord::pass(name, params),
        Some(diff) => CheckRecord::fail(
            name,
            params,
            Witness {
                message: "canonical polynomials differ".into(),
                x_exp: Some(diff.x_exp),
                y_exp: Some(diff.y_exp),
                left: Some(diff.left.to_string()),
                right: Some(diff.right.to_string()),
            },
        ),
    }
}

fn stochasticity(params: Value, form: &str, k: &KernelPolynomial) -> CheckRecord {
    let marginal = k.integrate_y();
    let one = CartesianPolynomial::one(k.dim());
    let params = with(&params, json!({"form": form}));
    if marginal == one {
        return CheckRecord::pass("stochasticity", params);
    }
    let residual = &marginal - &one;
    let (exp, coef) = residual.terms().next().expect("nonzero residual");
    CheckRecord::fail(
        "stochasticity",
        params,
        Witness {
            message: "∫ K(x,y) dy differs from 1".into(),
            x_exp: Some(exp.clone()),
            y_exp: None,
            left: Some((coef + one.coefficient(exp)).to_string()),
            right: Some(one.coefficient(exp).to_string()),
        },
    )
}

fn symmetry(params: Value, form: &str, k: &KernelPolynomial) -> CheckRecord {
    let name = "kernel_symmetry";
    let params = with(&params, json!({"form": form}));
    match k.first_difference(&k.swap_variables()) {
        None => CheckRecord::pass(name, params),
        Some(diff) => CheckRecord::fail(
            name,
            params,
            Witness {
                message: "K(x,y) != K(y,x)".into(),
                x_exp: Some(diff.x_exp),
                y_exp: Some(diff.y_exp),
                left: Some(diff.left.to_string()),
                right: Some(diff.right.to_string()),
            },
        ),
    }
}

/// Monomials `x^e` with `|e| <= max_degree` in graded order.
fn monomial_basis(d: usize, max_degree: u32) -> Vec<(Vec<u32>, CartesianPolynomial)> {
    let mut out = Vec::new();
    for deg in 0..=max_degree {
        for a in indices_of_degree(deg, d) {
            let e = a.parts()[1..].to_vec();
            if e.iter().sum::<u32>() == deg {
                out.push((e.clone(), CartesianPolynomial::monomial(d, e, Rational::one())));
            }
        }
    }
    out
}

fn run_job(job: &Job, cfg: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    let params = job.params();
    let mut out = Vec::new();
    match *job {
        Job::Twofold { d, m, n } => {
            let def = kernel_definition_twofold(m, n, d)?;
            let mut closed = kernel_closed_twofold(m, n, d)?;
            if cfg.mutation == Some(Mutation::DoubleTwofoldScale) {
                let doubled = closed.scale() * Rational::from_integer(BigInt::from(2));
                closed = closed.with_scale(doubled);
            }
            let canon = closed.to_canonical();
            out.push(kernel_equality("multivariate_twofold", params.clone(), &canon, &def));
            out.push(stochasticity(params.clone(), "definition", &def));
            out.push(stochasticity(params.clone(), "closed", &canon));
            out.push(symmetry(params.clone(), "definition", &def));
            let swapped = kernel_closed_twofold(n, m, d)?;
            out.push(CheckRecord::from_bool(
                "degree_swap_symmetry",
                params.clone(),
                swapped.normalized() == kernel_closed_twofold(m, n, d)?.normalized(),
                || Witness::message("closed form changes under m <-> n"),
            ));
            let top = closed.max_index_degree().unwrap_or(0);
            out.push(CheckRecord::from_bool(
                "diagonal_truncation",
                params,
                top <= m.min(n),
                || Witness::message(format!("index of degree {top} exceeds min(m,n)")),
            ));
        }
        Job::Single { d, n } => {
            let k = kernel_single(n, d)?.to_canonical();
            out.push(stochasticity(params.clone(), "single", &k));
            out.push(symmetry(params, "single", &k));
        }
        Job::Univariate { m, n } => {
            let uni = univariate_twofold_closed(m, n)?.to_canonical();
            let multi = kernel_closed_twofold(m, n, 1)?.to_canonical();
            let def = kernel_definition_twofold(m, n, 1)?;
            out.push(kernel_equality(
                "univariate_twofold",
                with(&params, json!({"against": "closed"})),
                &uni,
                &multi,
            ));
            out.push(kernel_equality(
                "univariate_twofold",
                with(&params, json!({"against": "definition"})),
                &uni,
                &def,
            ));
            out.push(stochasticity(params, "univariate", &uni));
        }
        Job::Legendre { m, n } => {
            let leg = kernel_legendre(m, n)?;
            let uni = univariate_twofold_closed(m, n)?.to_canonical();
            out.push(kernel_equality("legendre_form", params.clone(), &leg, &uni));
            out.push(stochasticity(params, "legendre", &leg));
        }
        Job::Threefold { a, b, c } => {
            let def = kernel_definition_threefold(a, b, c, 1)?;
            let closed = univariate_threefold_closed(a, b, c)?.to_canonical();
            out.push(kernel_equality("univariate_threefold", params.clone(), &closed, &def));
            out.push(stochasticity(params.clone(), "threefold_definition", &def));
            out.push(stochasticity(params, "threefold_closed", &closed));
        }
        Job::ThreefoldSymmetry { a, b, c } => {
            let base_def = kernel_definition_threefold(a, b, c, 1)?;
            let base_closed = univariate_threefold_closed(a, b, c)?;
            let perms = [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)];
            let mut failure = None;
            for (p, q, r) in perms {
                let def = kernel_definition_threefold(p, q, r, 1)?;
                if let Some(diff) = def.first_difference(&base_def) {
                    failure = Some(Witness {
                        message: format!("definitional kernel differs for order ({p},{q},{r})"),
                        x_exp: Some(diff.x_exp),
                        y_exp: Some(diff.y_exp),
                        left: Some(diff.left.to_string()),
                        right: Some(diff.right.to_string()),
                    });
                    break;
                }
                if univariate_threefold_closed(p, q, r)?.normalized() != base_closed.normalized() {
                    failure = Some(Witness::message(format!("closed form differs for order ({p},{q},{r})")));
                    break;
                }
            }
            out.push(match failure {
                None => CheckRecord::pass("threefold_permutation_symmetry", params),
                Some(w) => CheckRecord::fail("threefold_permutation_symmetry", params, w),
            });
        }
        Job::Combination { d, m, n } => {
            let coeffs = composition_coefficients(m, n, d)?;
            let sum: Rational = coeffs.iter().sum();
            let positive = coeffs.iter().all(|c| c > &Rational::zero());
            out.push(CheckRecord::from_bool(
                "composition_coefficients",
                with(
                    &params,
                    json!({"coefficients": coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>()}),
                ),
                sum.is_one() && positive,
                || Witness::values("coefficients must be positive and sum to 1", &sum, &Rational::one()),
            ));
            let mut combo = KernelPolynomial::zero(d);
            for (k, c) in coeffs.iter().enumerate() {
                combo.merge(&kernel_single(k as u32, d)?.to_canonical().scale(c));
            }
            let def = kernel_definition_twofold(m, n, d)?;
            out.push(kernel_equality("linear_combination", params, &combo, &def));
        }
        Job::Lemma {
            n,
            ref beta,
            ref points,
        } => {
            let mut failure = None;
            for (i, y) in points.iter().enumerate() {
                let (lhs, rhs) = inner_sum_lemma(n, beta, y)?;
                if lhs != rhs {
                    failure = Some(Witness::values(format!("sides differ at point {i}"), &lhs, &rhs));
                    break;
                }
            }
            out.push(match failure {
                None => CheckRecord::pass("inner_sum_lemma", params),
                Some(w) => CheckRecord::fail("inner_sum_lemma", params, w),
            });
        }
        Job::Operator { d, n } => {
            let op = DurrmeyerOperator::new(OperatorSpec::new(n, d)?);
            let one = CartesianPolynomial::one(d);
            let image_one = op.apply(&one)?;
            out.push(CheckRecord::from_bool(
                "operator_reproduces_one",
                params.clone(),
                image_one == one,
                || Witness::message(format!("M_n 1 = {}", image_one.to_json())),
            ));
            let basis = monomial_basis(d, cfg.monomial_degree_cap);
            let images = basis
                .iter()
                .map(|(_, f)| op.apply(f))
                .collect::<Result<Vec<_>>>()?;
            let mut adjoint = None;
            let mut integral = None;
            let mut degree = None;
            'outer: for ((ef, f), mf) in basis.iter().zip(&images) {
                if integral.is_none() && mf.integrate_simplex() != f.integrate_simplex() {
                    integral = Some(Witness::values(
                        format!("f = x^{ef:?}"),
                        &mf.integrate_simplex(),
                        &f.integrate_simplex(),
                    ));
                }
                if degree.is_none() && mf.degree().unwrap_or(0) > n {
                    degree = Some(Witness::message(format!(
                        "f = x^{ef:?} maps to degree {}",
                        mf.degree().unwrap_or(0)
                    )));
                }
                for ((eg, g), mg) in basis.iter().zip(&images) {
                    let l = mf.inner_product(g)?;
                    let r = f.inner_product(mg)?;
                    if l != r {
                        adjoint = Some(Witness::values(format!("f = x^{ef:?}, g = x^{eg:?}"), &l, &r));
                        break 'outer;
                    }
                }
            }
            let mono = with(&params, json!({"max_monomial_degree": cfg.monomial_degree_cap}));
            for (name, w) in [
                ("operator_self_adjoint", adjoint),
                ("operator_integral_preserved", integral),
                ("operator_degree_bound", degree),
            ] {
                out.push(match w {
                    None => CheckRecord::pass(name, mono.clone()),
                    Some(w) => CheckRecord::fail(name, mono.clone(), w),
                });
            }
        }
        Job::OperatorPair { d, m, n } => {
            let op_m = DurrmeyerOperator::new(OperatorSpec::new(m, d)?);
            let op_n = DurrmeyerOperator::new(OperatorSpec::new(n, d)?);
            let coeffs = composition_coefficients(m, n, d)?;
            let singles = (0..=m.min(n))
                .map(|k| OperatorSpec::new(k, d).map(DurrmeyerOperator::new))
                .collect::<Result<Vec<_>>>()?;
            let mut commute = None;
            let mut combo = None;
            for (e, f) in monomial_basis(d, cfg.monomial_degree_cap) {
                let mn = op_m.apply(&op_n.apply(&f)?)?;
                let nm = op_n.apply(&op_m.apply(&f)?)?;
                if commute.is_none() && mn != nm {
                    commute = Some(Witness::message(format!("f = x^{e:?}: {} vs {}", mn.to_json(), nm.to_json())));
                }
                let mut lin = CartesianPolynomial::zero(d);
                for (op, c) in singles.iter().zip(&coeffs) {
                    lin = &lin + &op.apply(&f)?.scale(c);
                }
                if combo.is_none() && lin != mn {
                    combo = Some(Witness::message(format!("f = x^{e:?}: {} vs {}", mn.to_json(), lin.to_json())));
                }
            }
            let mono = with(&params, json!({"max_monomial_degree": cfg.monomial_degree_cap}));
            for (name, w) in [("operator_commute", commute), ("operator_linear_combination", combo)] {
                out.push(match w {
                    None => CheckRecord::pass(name, mono.clone()),
                    Some(w) => CheckRecord::fail(name, mono.clone(), w),
                });
            }
        }
        Job::Moment { n } => {
            let x = CartesianPolynomial::variable(1, 1);
            let image = apply_operator(OperatorSpec::new(n, 1)?, &x)?;
            let denom = Rational::from_integer(BigInt::from(n + 2));
            let expected = CartesianPolynomial::from_terms(
                1,
                [
                    (vec![0], Rational::one() / &denom),
                    (vec![1], Rational::from_integer(BigInt::from(n)) / &denom),
                ],
            )?;
            out.push(CheckRecord::from_bool("first_moment", params, image == expected, || {
                Witness::message(format!("M_n x = {}", image.to_json()))
            }));
        }
    }
    Ok(out)
}

/// Runs every check implied by `cfg`.
pub fn run_suite(cfg: &SuiteConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let started = Instant::now();
    let jobs = build_jobs(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| BdkError::invalid(format!("thread pool: {e}")))?;

    let results: Vec<(Result<Vec<CheckRecord>>, bool, f64)> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let t = Instant::now();
                if cfg.max_pairs.is_some_and(|cap| job.pairs() > cap) {
                    let skipped = CheckRecord {
                        name: job.primary_check().to_string(),
                        params: with(&job.params(), json!({"pairs": job.pairs()})),
                        status: Status::Skipped,
                        witness: None,
                    };
                    return (Ok(vec![skipped]), true, 0.0);
                }
                let r = run_job(job, cfg);
                (r, false, t.elapsed().as_secs_f64() * 1e3)
            })
            .collect()
    });

    let mut checks = Vec::new();
    let mut timings = Vec::with_capacity(jobs.len());
    let mut complete = true;
    for (job, (records, skipped, millis)) in jobs.iter().zip(results) {
        checks.extend(records?);
        complete &= !skipped;
        timings.push(JobTiming {
            job: job.label(),
            millis,
        });
    }

    let mut summary = Summary {
        total: checks.len(),
        ..Summary::default()
    };
    for c in &checks {
        match c.status {
            Status::Pass => summary.passed += 1,
            Status::Fail => summary.failed += 1,
            Status::Skipped => summary.skipped += 1,
        }
    }
    let body = ReportBody {
        schema: REPORT_SCHEMA.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        complete,
        summary,
        checks,
    };
    let body_sha256 = hex::encode(Sha256::digest(body_json(&body).as_bytes()));
    Ok(VerificationReport {
        body,
        body_sha256,
        timing: Timing {
            threads: pool.current_num_threads(),
            total_millis: started.elapsed().as_secs_f64() * 1e3,
            jobs: timings,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SuiteConfig {
        SuiteConfig {
            dims: vec![1, 2],
            ..SuiteConfig::default()
        }
        .with_max_degree(2)
    }

    #[test]
    fn trivial_suite_passes() {
        let cfg = SuiteConfig {
            dims: vec![1],
            ..SuiteConfig::default()
        }
        .with_max_degree(0);
        let report = run_suite(&cfg).unwrap();
        assert!(report.passed());
        assert!(report.body.complete);
        assert!(report.body.summary.total > 0);
        assert!(report.body.checks.iter().any(|c| c.name == "multivariate_twofold"));
    }

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let a = run_suite(&tiny()).unwrap();
        let b = run_suite(&SuiteConfig { parallelism: 1, ..tiny() }).unwrap();
        assert!(a.passed(), "{:?}", a.failures().next());
        assert_eq!(a.body_json(), b.body_json());
        let c = run_suite(&tiny()).unwrap();
        assert_eq!(a.body_json(), c.body_json());
        assert_eq!(a.body_sha256, c.body_sha256);
    }

    #[test]
    fn seed_changes_sampled_points() {
        let a = run_suite(&tiny()).unwrap();
        let b = run_suite(&SuiteConfig { seed: 7, ..tiny() }).unwrap();
        assert_ne!(a.body_json(), b.body_json());
        assert!(b.passed());
    }

    #[test]
    fn mutation_is_caught_with_witness() {
        let cfg = SuiteConfig {
            mutation: Some(Mutation::DoubleTwofoldScale),
            ..tiny()
        };
        let report = run_suite(&cfg).unwrap();
        assert!(!report.passed());
        let f = report.failures().find(|c| c.name == "multivariate_twofold").unwrap();
        let w = f.witness.as_ref().unwrap();
        assert!(w.x_exp.is_some() && w.y_exp.is_some());
        assert_ne!(w.left, w.right);
    }

    #[test]
    fn resource_cap_marks_report_incomplete() {
        let cfg = SuiteConfig {
            max_pairs: Some(4),
            ..tiny()
        };
        let report = run_suite(&cfg).unwrap();
        assert!(!report.body.complete);
        assert!(report.body.summary.skipped > 0);
        assert!(report.passed());
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(run_suite(&SuiteConfig { dims: vec![], ..tiny() }).is_err());
        assert!(run_suite(&SuiteConfig { dims: vec![0], ..tiny() }).is_err());
    }

    #[test]
    fn report_json_shape() {
        let report = run_suite(&SuiteConfig {
            dims: vec![1],
            ..SuiteConfig::default()
        }
        .with_max_degree(0))
        .unwrap();
        let v: Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(v["schema"], REPORT_SCHEMA);
        assert!(v["timing"]["jobs"].is_array());
        let back: VerificationReport = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(back.body, report.body);
    }

    #[test]
    fn pair_counts() {
        assert_eq!(indices_count(2, 2), 6);
        assert_eq!(indices_count(4, 3), 35);
        assert_eq!(indices_count(0, 5), 1);
    }
}
