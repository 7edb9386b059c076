//! Seeded verification suites over the library's identities.
//!
//! Each suite draws its cases from a fixed-seed generator, evaluates one
//! family of identities, and reports case/skip/failure counts with the
//! worst observed error. Suites run the production code paths; a
//! [`Mutation`] replaces exactly one formula with a sign-flipped variant so
//! the suites' sensitivity can be demonstrated (see CONTRIBUTING.md).

use crate::calculus::{
    bracket_number, deformed_derivative, inverse_derivative, DerivativeConfig, InverseConfig,
    RealFunction,
};
use crate::eigen::{
    eigen_series, function_invariance_check, EigenfunctionEvaluator,
};
use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::mobius::MobiusMatrix;
use crate::operator::{two_parameter_mu_limit, ComposedOperator, OmegaOperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Check tolerances, each pinned where the identity is stated.
pub mod tolerances {
    /// Both Leibniz identities are algebraically exact; the bound covers
    /// rounding amplified by the quotient denominator, which the sampler
    /// keeps above 0.02.
    pub const LEIBNIZ_REL: f64 = 1e-10;
    /// The chain-rule quotient identity shares every sub-expression
    /// between its two sides, so only division rounding remains.
    pub const CHAIN_REL: f64 = 1e-12;
    /// `D x = 1` and `D c = 0` hold exactly away from fixed points.
    pub const AXIOM_ABS: f64 = 1e-14;
    pub const Q_SPECIALIZATION_REL: f64 = 1e-11;
    pub const BRACKET_REL: f64 = 1e-11;
    /// Round trip `D (D^-1 f) = f`; the truncation mismatch between the
    /// two series evaluations is a few tail terms.
    pub const INVERSE_ROUND_TRIP: f64 = 1e-8;
    pub const EIGEN_RESIDUAL: f64 = 1e-6;
    pub const REPRESENTATION_AGREEMENT: f64 = 1e-5;
    pub const TRANSLATION_EIGENVALUE: f64 = 1e-8;
    pub const Q_RECIPROCAL: f64 = 1e-6;
    pub const INVARIANCE: f64 = 1e-6;
    /// h-periodic functions are exactly shift-invariant up to sin rounding.
    pub const PERIODIC: f64 = 1e-12;
    pub const MOBIUS: f64 = 1e-12;
    /// First-order limits: halving the parameter must scale the error by
    /// a factor inside [1.5, 2.5].
    pub const RATIO_LOW: f64 = 1.5;
    pub const RATIO_HIGH: f64 = 2.5;
    pub const IDENTITY_LIMIT: f64 = 1e-8;
    pub const MU_CROSS_CHECK: f64 = 1e-5;
}

/// The runnable suites, one per identity family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Leibniz,
    Chain,
    Inverse,
    Eigen,
    Mobius,
    Limits,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Leibniz,
        Suite::Chain,
        Suite::Inverse,
        Suite::Eigen,
        Suite::Mobius,
        Suite::Limits,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Leibniz => "leibniz",
            Suite::Chain => "chain",
            Suite::Inverse => "inverse",
            Suite::Eigen => "eigen",
            Suite::Mobius => "mobius",
            Suite::Limits => "limits",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.iter().copied().find(|s| s.name() == name)
    }
}

/// A deliberately injected sign error in one formula, used to show that
/// the suites detect it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Difference quotient numerator becomes `f(omega(x)) + f(x)`.
    DerivativeSign,
    /// The inner quotient of the chain-rule identity flips its denominator.
    ChainInnerSign,
    /// Bracket numbers sum powers of `-r` instead of `r`.
    BracketSign,
    /// Inverse-derivative terms use `(omega(y) - y) f(y)`.
    InverseTermSign,
    /// Eigenfunction factors become `1/(1 - increment)`.
    EigenFactorSign,
    /// The translation factor of the composite matrix carries `-h`.
    MobiusEntrySign,
    /// The two-parameter limit returns `x - lambda`.
    MuLimitSign,
}

impl Mutation {
    pub const ALL: [Mutation; 8] = [
        Mutation::None,
        Mutation::DerivativeSign,
        Mutation::ChainInnerSign,
        Mutation::BracketSign,
        Mutation::InverseTermSign,
        Mutation::EigenFactorSign,
        Mutation::MobiusEntrySign,
        Mutation::MuLimitSign,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Mutation::None => "none",
            Mutation::DerivativeSign => "derivative-sign",
            Mutation::ChainInnerSign => "chain-inner-sign",
            Mutation::BracketSign => "bracket-sign",
            Mutation::InverseTermSign => "inverse-term-sign",
            Mutation::EigenFactorSign => "eigen-factor-sign",
            Mutation::MobiusEntrySign => "mobius-entry-sign",
            Mutation::MuLimitSign => "mu-limit-sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Mutation> {
        Mutation::ALL.iter().copied().find(|m| m.name() == name)
    }
}

/// Outcome of one named check inside a suite.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub suite: &'static str,
    pub check: &'static str,
    pub cases: usize,
    pub skipped: usize,
    pub failures: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// NaN-aware threshold test: a non-finite error is always a failure.
fn fails(error: f64, tolerance: f64) -> bool {
    error.is_nan() || error > tolerance
}

/// Runs one suite with the production formulas.
pub fn run_suite(suite: Suite, seed: u64) -> Vec<CheckReport> {
    run_suite_mutated(suite, seed, Mutation::None)
}

/// Runs every suite in order.
pub fn run_all(seed: u64) -> Vec<CheckReport> {
    run_all_mutated(seed, Mutation::None)
}

pub fn run_all_mutated(seed: u64, mutation: Mutation) -> Vec<CheckReport> {
    Suite::ALL
        .iter()
        .flat_map(|s| run_suite_mutated(*s, seed, mutation))
        .collect()
}

/// Runs one suite with at most one formula replaced by its mutated form.
pub fn run_suite_mutated(suite: Suite, seed: u64, mutation: Mutation) -> Vec<CheckReport> {
    let ctx = Ctx { mutation };
    match suite {
        Suite::Leibniz => vec![
            leibniz_rule(&ctx, seed, false),
            leibniz_rule(&ctx, seed, true),
            derivative_axioms(&ctx),
            q_specialization(&ctx, seed),
            bracket_identity(&ctx),
        ],
        Suite::Chain => vec![chain_rule(&ctx, seed)],
        Suite::Inverse => vec![inverse_round_trip(&ctx), inverse_divergence(&ctx)],
        Suite::Eigen => vec![
            eigen_residual_check(&ctx, seed),
            representation_agreement(),
            translation_eigenvalue(),
            q_reciprocal(),
            product_invariance(),
            periodic_invariance(),
        ],
        Suite::Mobius => vec![
            composite_entries(&ctx, seed),
            action_agreement(&ctx, seed),
            composition_order_witness(),
            matrix_group_closure(seed),
            operator_group_law(seed),
        ],
        Suite::Limits => vec![
            classical_limit(&ctx),
            mu_limit(&ctx),
            identity_limit(),
        ],
    }
}

// ---------------------------------------------------------------------------
// mutation-aware formula routing

#[derive(Clone, Copy)]
struct Ctx {
    mutation: Mutation,
}

impl Ctx {
    /// The deformed derivative; under `DerivativeSign` the numerator adds.
    fn derive(&self, op: &OmegaOperator, f: &RealFunction, x: f64, cfg: &DerivativeConfig) -> Result<f64> {
        if self.mutation != Mutation::DerivativeSign {
            return deformed_derivative(op, f, x, cfg);
        }
        let wx = op.apply(x)?;
        let w = wx - x;
        if w.abs() < cfg.singular_eps {
            return f.classical_derivative(x, cfg.fd_step);
        }
        Ok((f.eval(wx)? + f.eval(x)?) / w)
    }

    fn bracket(&self, n: u32, lambda: f64, k: u32, x: f64) -> Result<f64> {
        if self.mutation != Mutation::BracketSign {
            return bracket_number(n, lambda, k, x);
        }
        // sign error: sum powers of -r
        let base = 1.0 + lambda * f64::from(k) * x.powi(k as i32);
        if base <= 0.0 || base.is_nan() {
            return Err(Error::Domain { x, reason: "bracket base not positive" });
        }
        let r = -1.0 / crate::operator::kth_root(base, k);
        let mut sum = 0.0;
        let mut power = 1.0;
        for _ in 0..n {
            sum += power;
            power *= r;
        }
        Ok(sum)
    }

    fn inverse_derive(&self, op: &OmegaOperator, f: &RealFunction, x: f64, cfg: &InverseConfig) -> Result<f64> {
        if self.mutation != Mutation::InverseTermSign {
            return inverse_derivative(op, f, x, cfg);
        }
        let mut sum = 0.0;
        let mut point = x;
        for terms in 1..=cfg.max_terms {
            let next = op.apply(point)?;
            let term = (next - point) * f.eval(point)?;
            sum += term;
            if !term.is_finite() || !sum.is_finite() {
                return Err(Error::SeriesDiverged { terms, last_term: term });
            }
            if term.abs() <= cfg.tail_tol * sum.abs().max(1.0) {
                return Ok(sum);
            }
            point = next;
        }
        Err(Error::SeriesDiverged { terms: cfg.max_terms, last_term: f64::NAN })
    }

    /// Forward eigen product; under `EigenFactorSign` the factor flips.
    fn eigen_value(&self, op: &OmegaOperator, x: f64, tol: f64, max_factors: usize) -> Result<f64> {
        if self.mutation != Mutation::EigenFactorSign {
            return EigenfunctionEvaluator::with_tolerances(*op, tol, max_factors)
                .product(x)
                .map(|p| p.value);
        }
        let mut value = 1.0;
        let mut point = x;
        for _ in 0..max_factors {
            let next = op.apply(point)?;
            let denominator = 1.0 - (next - point);
            value /= denominator;
            if ((1.0 / denominator) - 1.0).abs() <= tol || value.abs() <= tol {
                return Ok(value);
            }
            point = next;
        }
        Ok(value)
    }

    fn composite_matrix(&self, lambda: f64, q: f64, h: f64) -> Result<MobiusMatrix> {
        let shift = if self.mutation == Mutation::MobiusEntrySign {
            MobiusMatrix::translation(-h)
        } else {
            MobiusMatrix::translation(h)
        };
        Ok(MobiusMatrix::reduced(lambda)
            .multiply(&MobiusMatrix::dilation(q)?)
            .multiply(&shift))
    }

    fn mu_limit_value(&self, lambda: f64, x: f64) -> f64 {
        if self.mutation == Mutation::MuLimitSign {
            x - lambda
        } else {
            two_parameter_mu_limit(lambda, x)
        }
    }
}

// ---------------------------------------------------------------------------
// shared corpus and samplers

fn expression_corpus() -> Vec<Expr> {
    [
        "x",
        "x^2",
        "x^3",
        "1+x",
        "2*x+1",
        "x^2-3*x+1",
        "exp(x)",
        "exp(-x)",
        "ln(1+x)",
        "sin(x)",
        "cos(x)",
        "sqrt(1+x)",
        "1/(1+x)",
        "x*exp(-x)",
    ]
    .iter()
    .map(|s| parse(s).expect("corpus expression"))
    .collect()
}

fn operator_pool() -> Vec<OmegaOperator> {
    let mut pool = Vec::new();
    for h in [0.25, 0.5, 1.0] {
        pool.push(OmegaOperator::translation(h).unwrap());
    }
    for q in [0.3, 0.5, 0.7, 1.5, 2.0] {
        pool.push(OmegaOperator::dilation(q).unwrap());
    }
    for (lambda, k) in [(0.2, 1), (-0.2, 1), (0.5, 1), (0.2, 2), (0.5, 2), (0.2, 3)] {
        pool.push(OmegaOperator::power_deformation(lambda, k).unwrap());
    }
    for (lambda, mu) in [(0.3, 1.0), (0.3, 2.0), (-0.2, 0.5)] {
        pool.push(OmegaOperator::two_parameter(lambda, mu).unwrap());
    }
    pool
}

/// One sampled case: operator, two corpus functions, and a point with the
/// quotient denominator bounded away from zero and values bounded, so the
/// stated tolerances hold with margin.
struct SampledCase {
    op: OmegaOperator,
    f: Expr,
    g: Expr,
    x: f64,
    wx: f64,
}

fn sample_case(
    rng: &mut ChaCha8Rng,
    corpus: &[Expr],
    pool: &[OmegaOperator],
) -> Option<SampledCase> {
    let op = pool[rng.gen_range(0..pool.len())];
    let f = corpus[rng.gen_range(0..corpus.len())].clone();
    let g = corpus[rng.gen_range(0..corpus.len())].clone();
    let x = rng.gen_range(0.05..1.8);
    let wx = op.apply(x).ok()?;
    if (wx - x).abs() < 0.02 {
        return None;
    }
    for e in [&f, &g] {
        for point in [x, wx] {
            let v = e.eval(point).ok()?;
            if !v.is_finite() || v.abs() > 10.0 {
                return None;
            }
        }
    }
    Some(SampledCase { op, f, g, x, wx })
}

fn scale(values: &[f64]) -> f64 {
    values.iter().fold(1.0, |acc, v| acc.max(v.abs()))
}

// ---------------------------------------------------------------------------
// leibniz suite

fn leibniz_rule(ctx: &Ctx, seed: u64, second_form: bool) -> CheckReport {
    let corpus = expression_corpus();
    let pool = operator_pool();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ if second_form { 0x1ef2 } else { 0x1ef1 });
    let cfg = DerivativeConfig::default();
    let mut skipped = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    let cases = 500;
    for _ in 0..cases {
        let Some(case) = sample_case(&mut rng, &corpus, &pool) else {
            skipped += 1;
            continue;
        };
        let f = RealFunction::from_expr(case.f.clone());
        let g = RealFunction::from_expr(case.g.clone());
        let fe = case.f.clone();
        let ge = case.g.clone();
        let product = RealFunction::fallible(move |t| Ok(fe.eval(t)? * ge.eval(t)?));
        let outcome = (|| -> Result<f64> {
            let lhs = ctx.derive(&case.op, &product, case.x, &cfg)?;
            let df = ctx.derive(&case.op, &f, case.x, &cfg)?;
            let dg = ctx.derive(&case.op, &g, case.x, &cfg)?;
            let rhs = if second_form {
                f.eval(case.x)? * dg + df * g.eval(case.wx)?
            } else {
                df * g.eval(case.x)? + f.eval(case.wx)? * dg
            };
            Ok((lhs - rhs).abs() / scale(&[lhs, rhs]))
        })();
        match outcome {
            Ok(err) => {
                max_error = max_error.max(err);
                if fails(err, tolerances::LEIBNIZ_REL) {
                    failures += 1;
                }
            }
            Err(_) => skipped += 1,
        }
    }
    CheckReport {
        suite: "leibniz",
        check: if second_form { "leibniz-rule-2" } else { "leibniz-rule-1" },
        cases,
        skipped,
        failures,
        max_error,
        tolerance: tolerances::LEIBNIZ_REL,
    }
}

fn derivative_axioms(ctx: &Ctx) -> CheckReport {
    let ops = [
        OmegaOperator::translation(0.5).unwrap(),
        OmegaOperator::dilation(0.7).unwrap(),
        OmegaOperator::power_deformation(0.3, 2).unwrap(),
        OmegaOperator::two_parameter(0.3, 1.5).unwrap(),
    ];
    let cfg = DerivativeConfig::default();
    let identity = RealFunction::identity();
    let constant = RealFunction::constant(4.25);
    let mut cases = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    for op in &ops {
        for i in 0..20 {
            let x = 0.1 + 0.09 * i as f64;
            cases += 1;
            let result = (|| -> Result<f64> {
                let one = ctx.derive(op, &identity, x, &cfg)?;
                let zero = ctx.derive(op, &constant, x, &cfg)?;
                Ok((one - 1.0).abs().max(zero.abs()))
            })();
            match result {
                Ok(err) => {
                    max_error = max_error.max(err);
                    if fails(err, tolerances::AXIOM_ABS) {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
    }
    CheckReport {
        suite: "leibniz",
        check: "derivative-axioms",
        cases,
        skipped: 0,
        failures,
        max_error,
        tolerance: tolerances::AXIOM_ABS,
    }
}

fn q_specialization(ctx: &Ctx, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9c0f);
    let cfg = DerivativeConfig::default();
    let mut cases = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    for q in [0.3, 0.7, 1.5] {
        let op = OmegaOperator::dilation(q).unwrap();
        for n in 1..=8u32 {
            for _ in 0..20 {
                let x: f64 = rng.gen_range(0.1..2.0);
                cases += 1;
                let expected = (q.powi(n as i32) - 1.0) / (q - 1.0) * x.powi(n as i32 - 1);
                match ctx.derive(&op, &RealFunction::monomial(n), x, &cfg) {
                    Ok(lhs) => {
                        let err = (lhs - expected).abs() / expected.abs().max(1.0);
                        max_error = max_error.max(err);
                        if fails(err, tolerances::Q_SPECIALIZATION_REL) {
                            failures += 1;
                        }
                    }
                    Err(_) => failures += 1,
                }
            }
        }
    }
    CheckReport {
        suite: "leibniz",
        check: "q-specialization",
        cases,
        skipped: 0,
        failures,
        max_error,
        tolerance: tolerances::Q_SPECIALIZATION_REL,
    }
}

fn bracket_identity(ctx: &Ctx) -> CheckReport {
    let cfg = DerivativeConfig::default();
    let mut cases = 0;
    let mut skipped = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    for lambda in [-0.2, 0.2, 0.5] {
        for k in 1..=3u32 {
            for n in 1..=6u32 {
                for x in [0.2f64, 0.5, 0.8, 1.1] {
                    cases += 1;
                    let base = 1.0 + lambda * f64::from(k) * x.powi(k as i32);
                    // keep a margin from the boundary and from r = 1,
                    // where the quotient loses relative accuracy
                    if base < 0.1 || (1.0 / crate::operator::kth_root(base, k) - 1.0).abs() < 1e-3
                    {
                        skipped += 1;
                        continue;
                    }
                    let op = OmegaOperator::power_deformation(lambda, k).unwrap();
                    let outcome = (|| -> Result<f64> {
                        let lhs = ctx.derive(&op, &RealFunction::monomial(n), x, &cfg)?;
                        let rhs = ctx.bracket(n, lambda, k, x)? * x.powi(n as i32 - 1);
                        Ok((lhs - rhs).abs() / rhs.abs().max(1.0))
                    })();
                    match outcome {
                        Ok(err) => {
                            max_error = max_error.max(err);
                            if fails(err, tolerances::BRACKET_REL) {
                                failures += 1;
                            }
                        }
                        Err(_) => failures += 1,
                    }
                }
            }
        }
    }
    CheckReport {
        suite: "leibniz",
        check: "bracket-identity",
        cases,
        skipped,
        failures,
        max_error,
        tolerance: tolerances::BRACKET_REL,
    }
}

// ---------------------------------------------------------------------------
// chain suite

fn chain_rule(ctx: &Ctx, seed: u64) -> CheckReport {
    let corpus = expression_corpus();
    let pool = operator_pool();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc4a1);
    let mut skipped = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    let cases = 500;
    for _ in 0..cases {
        let op = pool[rng.gen_range(0..pool.len())];
        let f = &corpus[rng.gen_range(0..corpus.len())];
        let g = &corpus[rng.gen_range(0..corpus.len())];
        let x: f64 = rng.gen_range(0.05..1.8);
        let Ok(wx) = op.apply(x) else {
            skipped += 1;
            continue;
        };
        let w = wx - x;
        let values = (|| -> Result<(f64, f64, f64, f64)> {
            let gx = g.eval(x)?;
            let gwx = g.eval(wx)?;
            Ok((gx, gwx, f.eval(gx)?, f.eval(gwx)?))
        })();
        let Ok((gx, gwx, fgx, fgwx)) = values else {
            skipped += 1;
            continue;
        };
        let inner = gwx - gx;
        // degenerate when the quotient identity's middle factor vanishes
        if w == 0.0 || inner == 0.0 {
            skipped += 1;
            continue;
        }
        let lhs = (fgwx - fgx) / w;
        let first = if ctx.mutation == Mutation::ChainInnerSign {
            (fgwx - fgx) / -inner
        } else {
            (fgwx - fgx) / inner
        };
        let rhs = first * (inner / w);
        if !lhs.is_finite() || !rhs.is_finite() {
            skipped += 1;
            continue;
        }
        let err = (lhs - rhs).abs() / lhs.abs().max(1.0);
        max_error = max_error.max(err);
        if fails(err, tolerances::CHAIN_REL) {
            failures += 1;
        }
    }
    CheckReport {
        suite: "chain",
        check: "chain-rule-quotient",
        cases,
        skipped,
        failures,
        max_error,
        tolerance: tolerances::CHAIN_REL,
    }
}

// ---------------------------------------------------------------------------
// inverse suite

fn inverse_round_trip(ctx: &Ctx) -> CheckReport {
    let dcfg = DerivativeConfig::default();
    let rows: Vec<(OmegaOperator, InverseConfig)> = vec![
        (OmegaOperator::dilation(0.3).unwrap(), InverseConfig::default()),
        (OmegaOperator::dilation(0.5).unwrap(), InverseConfig::default()),
        (OmegaOperator::dilation(0.7).unwrap(), InverseConfig::default()),
        // the power-deformation orbit contracts algebraically, so the
        // series needs more headroom than the geometric default
        (
            OmegaOperator::power_deformation(0.25, 1).unwrap(),
            InverseConfig { max_terms: 1_000_000, tail_tol: 1e-10 },
        ),
        (
            OmegaOperator::power_deformation(0.5, 1).unwrap(),
            InverseConfig { max_terms: 1_000_000, tail_tol: 1e-10 },
        ),
    ];
    let mut cases = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    for (op, cfg) in rows {
        for n in 0..=6u32 {
            for x in [0.25f64, 0.5, 1.0] {
                cases += 1;
                let ctx2 = *ctx;
                let monomial = RealFunction::monomial(n);
                let anti = RealFunction::fallible(move |y| {
                    ctx2.inverse_derive(&op, &monomial, y, &cfg)
                });
                let expected = x.powi(n as i32);
                match ctx.derive(&op, &anti, x, &dcfg) {
                    Ok(got) => {
                        let err = (got - expected).abs() / (1.0 + expected.abs());
                        max_error = max_error.max(err);
                        if fails(err, tolerances::INVERSE_ROUND_TRIP) {
                            failures += 1;
                        }
                    }
                    Err(_) => failures += 1,
                }
            }
        }
    }
    CheckReport {
        suite: "inverse",
        check: "inverse-round-trip",
        cases,
        skipped: 0,
        failures,
        max_error,
        tolerance: tolerances::INVERSE_ROUND_TRIP,
    }
}

fn inverse_divergence(ctx: &Ctx) -> CheckReport {
    let op = OmegaOperator::dilation(2.0).unwrap();
    let result = ctx.inverse_derive(
        &op,
        &RealFunction::monomial(2),
        1.0,
        &InverseConfig::default(),
    );
    let diverged = matches!(result, Err(Error::SeriesDiverged { .. }));
    CheckReport {
        suite: "inverse",
        check: "inverse-divergence-detected",
        cases: 1,
        skipped: 0,
        failures: usize::from(!diverged),
        max_error: 0.0,
        tolerance: 0.0,
    }
}

// ---------------------------------------------------------------------------
// eigen suite

struct EigenRow {
    op: OmegaOperator,
    product_tol: f64,
    max_factors: usize,
    x_lo: f64,
    x_hi: f64,
}

fn eigen_rows() -> Vec<EigenRow> {
    vec![
        EigenRow {
            op: OmegaOperator::dilation(0.3).unwrap(),
            product_tol: 1e-14,
            max_factors: 10_000,
            x_lo: -0.9,
            x_hi: 0.9,
        },
        EigenRow {
            op: OmegaOperator::dilation(0.7).unwrap(),
            product_tol: 1e-14,
            max_factors: 10_000,
            x_lo: -0.9,
            x_hi: 0.9,
        },
        EigenRow {
            op: OmegaOperator::translation(0.25).unwrap(),
            product_tol: 1e-14,
            max_factors: 10_000,
            x_lo: -1.0,
            x_hi: 1.0,
        },
        // algebraic orbit contraction: tighter factor tolerance and a
        // deeper cap keep the truncated value accurate
        EigenRow {
            op: OmegaOperator::power_deformation(0.5, 1).unwrap(),
            product_tol: 1e-10,
            max_factors: 1_000_000,
            x_lo: 0.1,
            x_hi: 1.0,
        },
    ]
}

fn eigen_residual_check(ctx: &Ctx, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xe16e);
    let dcfg = DerivativeConfig::default();
    let mut cases = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    for row in eigen_rows() {
        for _ in 0..10 {
            let x = rng.gen_range(row.x_lo..row.x_hi);
            cases += 1;
            let ctx2 = *ctx;
            let op = row.op;
            let (tol, max_factors) = (row.product_tol, row.max_factors);
            let e_fn =
                RealFunction::fallible(move |y| ctx2.eigen_value(&op, y, tol, max_factors));
            let outcome = (|| -> Result<f64> {
                let derivative = deformed_derivative(&row.op, &e_fn, x, &dcfg)?;
                let at_x = ctx.eigen_value(&row.op, x, tol, max_factors)?;
                Ok((derivative - at_x).abs())
            })();
            match outcome {
                Ok(residual) => {
                    max_error = max_error.max(residual);
                    if fails(residual, tolerances::EIGEN_RESIDUAL) {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
    }
    CheckReport {
        suite: "eigen",
        check: "eigen-residual",
        cases,
        skipped: 0,
        failures,
        max_error,
        tolerance: tolerances::EIGEN_RESIDUAL,
    }
}

fn representation_agreement() -> CheckReport {
    let mut cases = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    let rows: Vec<(OmegaOperator, f64, usize, InverseConfig, usize)> = vec![
        (
            OmegaOperator::dilation(0.3).unwrap(),
            1e-14,
            10_000,
            InverseConfig::default(),
            40,
        ),
        (
            OmegaOperator::dilation(0.7).unwrap(),
            1e-14,
            10_000,
            InverseConfig::default(),
            40,
        ),
        (
            OmegaOperator::power_deformation(0.5, 1).unwrap(),
            1e-12,
            4_000_000,
            InverseConfig { max_terms: 4_000_000, tail_tol: 1e-12 },
            25,
        ),
    ];
    for (op, tol, max_factors, series_cfg, j_max) in rows {
        let ev = EigenfunctionEvaluator::with_tolerances(op, tol, max_factors);
        for x in [0.05, 0.1, 0.2] {
            cases += 1;
            let outcome = (|| -> Result<f64> {
                let product = ev.product(x)?.value;
                let series = eigen_series(&op, x, &series_cfg, j_max)?.value;
                Ok((product - series).abs())
            })();
            match outcome {
                Ok(err) => {
                    max_error = max_error.max(err);
                    if fails(err, tolerances::REPRESENTATION_AGREEMENT) {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
    }
    CheckReport {
        suite: "eigen",
        check: "representation-agreement",
        cases,
        skipped: 0,
        failures,
        max_error,
        tolerance: tolerances::REPRESENTATION_AGREEMENT,
    }
}

fn translation_eigenvalue() -> CheckReport {
    let mut cases = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    for h in [0.25, 0.5] {
        let op = OmegaOperator::translation(h).unwrap();
        let ev = EigenfunctionEvaluator::new(op);
        for x in [-0.4, 0.0, 0.3] {
            cases += 1;
            match ev.scaled_residual(1.0, x) {
                Ok(residual) => {
                    max_error = max_error.max(residual);
                    if fails(residual, tolerances::TRANSLATION_EIGENVALUE) {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
    }
    CheckReport {
        suite: "eigen",
        check: "translation-eigenvalue",
        cases,
        skipped: 0,
        failures,
        max_error,
        tolerance: tolerances::TRANSLATION_EIGENVALUE,
    }
}

fn q_reciprocal() -> CheckReport {
    let q = 0.5;
    let mut cases = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    for x in [0.05, 0.1] {
        cases += 1;
        let outcome = (|| -> Result<f64> {
            let forward = EigenfunctionEvaluator::new(OmegaOperator::dilation(q).unwrap())
                .product(x)?;
            let reindexed =
                EigenfunctionEvaluator::new(OmegaOperator::dilation(1.0 / q).unwrap())
                    .product_reindexed(-x)?;
            let route_error = (1.0 / forward.value - reindexed.value).abs();

            // matched-truncation bijection: the m-th reindexed factor
            // equals the reciprocal of the (m-1)-th forward factor, i.e.
            // it equals that factor's denominator
            let fwd_op = OmegaOperator::dilation(q).unwrap();
            let back_op = OmegaOperator::dilation(1.0 / q).unwrap().inverse();
            let mut fwd_point = x;
            let mut back_prev = -x;
            let mut bijection_error = 0.0f64;
            for _ in 0..40 {
                let fwd_next = fwd_op.apply(fwd_point)?;
                let forward_denominator = 1.0 + (fwd_next - fwd_point);
                let back_cur = back_op.apply(back_prev)?;
                let reindexed_factor = 1.0 + (back_prev - back_cur);
                bijection_error =
                    bijection_error.max((reindexed_factor - forward_denominator).abs());
                fwd_point = fwd_next;
                back_prev = back_cur;
            }
            Ok(route_error.max(bijection_error))
        })();
        match outcome {
            Ok(err) => {
                max_error = max_error.max(err);
                if fails(err, tolerances::Q_RECIPROCAL) {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    CheckReport {
        suite: "eigen",
        check: "q-reciprocal",
        cases,
        skipped: 0,
        failures,
        max_error,
        tolerance: tolerances::Q_RECIPROCAL,
    }
}

fn product_invariance() -> CheckReport {
    let mut cases = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    for q in [0.3, 0.5] {
        let ev = EigenfunctionEvaluator::new(OmegaOperator::dilation(q).unwrap());
        for x in [0.0, 0.1, 0.2] {
            cases += 1;
            match ev.invariant_product_check(x) {
                Ok(check) => {
                    let err = check.invariance.max(check.derivative_residual);
                    max_error = max_error.max(err);
                    if fails(err, tolerances::INVARIANCE) {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
    }
    CheckReport {
        suite: "eigen",
        check: "product-invariance",
        cases,
        skipped: 0,
        failures,
        max_error,
        tolerance: tolerances::INVARIANCE,
    }
}

fn periodic_invariance() -> CheckReport {
    let cfg = DerivativeConfig::default();
    let mut cases = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    for h in [0.25, 0.5] {
        let op = OmegaOperator::translation(h).unwrap();
        let f = RealFunction::from_fn(move |x| (2.0 * std::f64::consts::PI * x / h).sin());
        for x in [-0.8, -0.2, 0.0, 0.3, 1.1] {
            cases += 1;
            match function_invariance_check(&op, &f, x, &cfg) {
                Ok((map_res, deriv_res)) => {
                    let err = map_res.max(deriv_res);
                    max_error = max_error.max(err);
                    if fails(err, tolerances::PERIODIC) {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
    }
    CheckReport {
        suite: "eigen",
        check: "periodic-invariance",
        cases,
        skipped: 0,
        failures,
        max_error,
        tolerance: tolerances::PERIODIC,
    }
}

// ---------------------------------------------------------------------------
// mobius suite

fn composite_entries(ctx: &Ctx, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x30b1);
    let mut cases = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    for _ in 0..50 {
        let lambda = rng.gen_range(-1.0..1.0);
        let q = rng.gen_range(0.2..3.0);
        let h = rng.gen_range(-1.0..1.0);
        cases += 1;
        let Ok(m) = ctx.composite_matrix(lambda, q, h) else {
            failures += 1;
            continue;
        };
        let s = q.sqrt();
        let (a, b, c, d) = m.entries();
        let err = (a - s)
            .abs()
            .max((b - s * h).abs())
            .max((c - s * lambda).abs())
            .max((d - (s * lambda * h + 1.0 / s)).abs())
            .max((m.det() - 1.0).abs());
        max_error = max_error.max(err);
        if fails(err, tolerances::MOBIUS) {
            failures += 1;
        }
    }
    CheckReport {
        suite: "mobius",
        check: "composite-entries",
        cases,
        skipped: 0,
        failures,
        max_error,
        tolerance: tolerances::MOBIUS,
    }
}

fn action_agreement(ctx: &Ctx, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xac70);
    let mut cases = 0;
    let mut skipped = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    while cases < 200 {
        let lambda = rng.gen_range(-1.0..1.0);
        let q = rng.gen_range(0.2..3.0);
        let h = rng.gen_range(-1.0..1.0);
        let x = rng.gen_range(-2.0..2.0);
        // the operator route needs the scaled point inside the
        // power-deformation domain, with a margin
        let scaled = q * (x + h);
        if 1.0 + lambda * scaled < 0.1 {
            continue;
        }
        cases += 1;
        let outcome = (|| -> Result<f64> {
            let m = ctx.composite_matrix(lambda, q, h)?;
            let matrix_route = m.act(x)?;
            let shift = OmegaOperator::translation(h)?.apply(x)?;
            let dilated = if q == 1.0 {
                shift
            } else {
                OmegaOperator::dilation(q)?.apply(shift)?
            };
            let operator_route =
                OmegaOperator::power_deformation(lambda, 1)?.apply(dilated)?;
            Ok((matrix_route - operator_route).abs())
        })();
        match outcome {
            Ok(err) => {
                max_error = max_error.max(err);
                if fails(err, tolerances::MOBIUS) {
                    failures += 1;
                }
            }
            Err(_) => skipped += 1,
        }
    }
    CheckReport {
        suite: "mobius",
        check: "action-agreement",
        cases,
        skipped,
        failures,
        max_error,
        tolerance: tolerances::MOBIUS,
    }
}

fn composition_order_witness() -> CheckReport {
    let forward = MobiusMatrix::composite(0.3, 2.0, 1.0).unwrap();
    let reversed = MobiusMatrix::translation(1.0)
        .multiply(&MobiusMatrix::dilation(2.0).unwrap())
        .multiply(&MobiusMatrix::reduced(0.3));
    let x = 0.7;
    let difference =
        (forward.act(x).unwrap() - reversed.act(x).unwrap()).abs();
    CheckReport {
        suite: "mobius",
        check: "composition-order-witness",
        cases: 1,
        skipped: 0,
        failures: usize::from(difference <= 1e-3),
        max_error: difference,
        tolerance: 1e-3,
    }
}

fn matrix_group_closure(seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x96c1);
    let mut cases = 0;
    let mut skipped = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    while cases < 100 {
        let entries: Vec<f64> = (0..8).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let x = rng.gen_range(-2.0..2.0);
        let (Ok(m1), Ok(m2)) = (
            MobiusMatrix::new(entries[0], entries[1], entries[2], entries[3]),
            MobiusMatrix::new(entries[4], entries[5], entries[6], entries[7]),
        ) else {
            continue;
        };
        if m1.det().abs() < 0.1 || m2.det().abs() < 0.1 {
            continue;
        }
        cases += 1;
        let outcome = (|| -> Result<f64> {
            let inner = m2.act(x)?;
            let chained = m1.act(inner)?;
            let direct = m1.multiply(&m2).act(x)?;
            // away-from-pole guard: huge intermediate values amplify rounding
            if inner.abs() > 50.0 || chained.abs() > 50.0 || direct.abs() > 50.0 {
                return Err(Error::Pole { denominator: 0.0 });
            }
            Ok((chained - direct).abs())
        })();
        match outcome {
            Ok(err) => {
                max_error = max_error.max(err);
                if fails(err, tolerances::MOBIUS) {
                    failures += 1;
                }
            }
            Err(_) => skipped += 1,
        }
    }
    CheckReport {
        suite: "mobius",
        check: "matrix-group-closure",
        cases,
        skipped,
        failures,
        max_error,
        tolerance: tolerances::MOBIUS,
    }
}

fn operator_group_law(seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6a01);
    let mut cases = 0;
    let mut skipped = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    while cases < 200 {
        let lambda = rng.gen_range(-0.4..0.4);
        let mu = rng.gen_range(-0.4..0.4);
        let x: f64 = rng.gen_range(-1.5..1.5);
        let outer = OmegaOperator::power_deformation(lambda, 1).unwrap();
        let inner = OmegaOperator::power_deformation(mu, 1).unwrap();
        if 1.0 + mu * x < 0.1 {
            continue;
        }
        cases += 1;
        let outcome = (|| -> Result<f64> {
            let composed = match outer.compose_same_family(&inner)? {
                ComposedOperator::PowerDeformation { lambda, k } => {
                    OmegaOperator::power_deformation(lambda, k)?
                }
                _ => unreachable!(),
            };
            let step = inner.apply(x)?;
            let chained = outer.apply(step)?;
            let direct = composed.apply(x)?;
            // the matrix side composes exactly
            let matrix = MobiusMatrix::reduced(lambda).multiply(&MobiusMatrix::reduced(mu));
            let (_, _, c, _) = matrix.entries();
            Ok((direct - chained).abs().max((c - (lambda + mu)).abs()))
        })();
        match outcome {
            Ok(err) => {
                max_error = max_error.max(err);
                if fails(err, tolerances::MOBIUS) {
                    failures += 1;
                }
            }
            Err(_) => skipped += 1,
        }
    }
    CheckReport {
        suite: "mobius",
        check: "operator-group-law",
        cases,
        skipped,
        failures,
        max_error,
        tolerance: tolerances::MOBIUS,
    }
}

// ---------------------------------------------------------------------------
// limits suite

type SmoothCase = (RealFunction, fn(f64) -> f64);

fn classical_limit(ctx: &Ctx) -> CheckReport {
    let cfg = DerivativeConfig::default();
    let functions: Vec<SmoothCase> = vec![
        (RealFunction::monomial(3), |x| 3.0 * x * x),
        (RealFunction::from_fn(f64::exp), f64::exp),
        (RealFunction::from_fn(f64::sin), f64::cos),
    ];
    let mut cases = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    for (f, df) in &functions {
        for k in 1..=3u32 {
            for x in [0.7, 1.0] {
                for lambda0 in [1e-4, 1e-5, 1e-6] {
                    cases += 1;
                    let err_at = |lambda: f64| -> Result<f64> {
                        let op = OmegaOperator::power_deformation(lambda, k)?;
                        let d = ctx.derive(&op, f, x, &cfg)?;
                        Ok((d - df(x)).abs())
                    };
                    let outcome = (|| -> Result<f64> {
                        Ok(err_at(lambda0)? / err_at(lambda0 / 2.0)?)
                    })();
                    match outcome {
                        Ok(ratio) => {
                            let deviation = (ratio - 2.0).abs();
                            max_error = max_error.max(deviation);
                            if !(tolerances::RATIO_LOW..=tolerances::RATIO_HIGH)
                                .contains(&ratio)
                            {
                                failures += 1;
                            }
                        }
                        Err(_) => failures += 1,
                    }
                }
            }
        }
    }
    CheckReport {
        suite: "limits",
        check: "classical-limit-ratio",
        cases,
        skipped: 0,
        failures,
        max_error,
        tolerance: 0.5,
    }
}

fn mu_limit(ctx: &Ctx) -> CheckReport {
    let mut cases = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    for (lambda, x) in [(0.7, 1.0), (-0.3, 0.4), (0.5, -0.2)] {
        // the limit itself is exact
        cases += 1;
        let exact = (ctx.mu_limit_value(lambda, x) - (x + lambda)).abs();
        max_error = max_error.max(exact);
        if exact != 0.0 {
            failures += 1;
        }

        // numeric cross-check at a tiny mu
        cases += 1;
        let op = OmegaOperator::two_parameter(lambda, 1e-6).unwrap();
        match op.apply(x) {
            Ok(v) => {
                let err = (v - ctx.mu_limit_value(lambda, x)).abs();
                max_error = max_error.max(err);
                if fails(err, tolerances::MU_CROSS_CHECK) {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }

        // O(mu) decay of the error under halving
        let err_at = |mu: f64| -> Result<f64> {
            let op = OmegaOperator::two_parameter(lambda, mu)?;
            Ok((op.apply(x)? - ctx.mu_limit_value(lambda, x)).abs())
        };
        let mut mu = 1e-3;
        for _ in 0..2 {
            cases += 1;
            match (err_at(mu), err_at(mu / 2.0)) {
                (Ok(e1), Ok(e2)) if e2 > 0.0 => {
                    let ratio = e1 / e2;
                    max_error = max_error.max((ratio - 2.0).abs());
                    if !(tolerances::RATIO_LOW..=tolerances::RATIO_HIGH).contains(&ratio) {
                        failures += 1;
                    }
                }
                _ => failures += 1,
            }
            mu /= 2.0;
        }
    }
    CheckReport {
        suite: "limits",
        check: "mu-limit",
        cases,
        skipped: 0,
        failures,
        max_error,
        tolerance: 0.5,
    }
}

fn identity_limit() -> CheckReport {
    let mut cases = 0;
    let mut failures = 0;
    let mut max_error = 0.0f64;
    for k in 1..=3u32 {
        let op = OmegaOperator::power_deformation(1e-9, k).unwrap();
        let mut x = -2.0;
        while x <= 2.0 {
            if op.in_domain(x) {
                cases += 1;
                match op.apply(x) {
                    Ok(y) => {
                        let err = (y - x).abs() / (1.0 + x.abs());
                        max_error = max_error.max(err);
                        if fails(err, tolerances::IDENTITY_LIMIT) {
                            failures += 1;
                        }
                    }
                    Err(_) => failures += 1,
                }
            }
            x += 0.2;
        }
    }
    CheckReport {
        suite: "limits",
        check: "identity-limit",
        cases,
        skipped: 0,
        failures,
        max_error,
        tolerance: tolerances::IDENTITY_LIMIT,
    }
}
