//! Seeded verification suites.
//!
//! Trial `t` of every suite draws from `SeededRng::substream(seed, t)`, so a
//! report depends only on the model, the seed, the trial count and the
//! tolerance overrides.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use super::gen;
use crate::calculus::{self, RealFunction};
use crate::compression::{self, Projection};
use crate::error::{Error, Result};
use crate::matrix;
use crate::ous::{Element, ModelContext, ModelKind};
use crate::report::{Check, Relation, VerificationReport};
use crate::rng::SeededRng;
use crate::spin::{self, SpinProjection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    CompressionAxioms,
    BaseIdentity,
    Complementarity,
    Decomposition,
    Rickart,
    RsConvergence,
    Calculus,
    JbCondition,
    CommuteEquivalence,
    Block,
    /// Matrix model only.
    MatrixJb,
    /// Spin model only.
    Duality,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::CompressionAxioms,
        Suite::BaseIdentity,
        Suite::Complementarity,
        Suite::Decomposition,
        Suite::Rickart,
        Suite::RsConvergence,
        Suite::Calculus,
        Suite::JbCondition,
        Suite::CommuteEquivalence,
        Suite::Block,
        Suite::MatrixJb,
        Suite::Duality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CompressionAxioms => "compression-axioms",
            Suite::BaseIdentity => "base-identity",
            Suite::Complementarity => "complementarity",
            Suite::Decomposition => "decomposition",
            Suite::Rickart => "rickart",
            Suite::RsConvergence => "rs-convergence",
            Suite::Calculus => "calculus",
            Suite::JbCondition => "jb-condition",
            Suite::CommuteEquivalence => "commute-equivalence",
            Suite::Block => "block",
            Suite::MatrixJb => "matrix-jb",
            Suite::Duality => "duality",
        }
    }

    pub fn applies_to(self, ctx: &ModelContext) -> bool {
        match self {
            Suite::MatrixJb => ctx.matrix_size().is_some(),
            Suite::Duality => ctx.norm_oracle().is_some(),
            _ => true,
        }
    }

    /// Every suite applicable to the model, in canonical order.
    pub fn all_for(ctx: &ModelContext) -> Vec<Suite> {
        Suite::ALL.into_iter().filter(|s| s.applies_to(ctx)).collect()
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub model: ModelContext,
    pub seed: u64,
    pub trials: u64,
    pub suites: Vec<Suite>,
    /// Threshold overrides by check name, in the order given.
    pub overrides: Vec<(String, f64)>,
    /// Record wall time in the report (breaks byte-for-byte reproducibility).
    pub timing: bool,
}

impl SuiteConfig {
    /// Configuration running every applicable suite.
    pub fn new(model: ModelContext, seed: u64, trials: u64) -> Result<Self> {
        let suites = Suite::all_for(&model);
        SuiteConfig::with_suites(model, seed, trials, suites)
    }

    pub fn with_suites(model: ModelContext, seed: u64, trials: u64, mut suites: Vec<Suite>) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Contract("trials must be at least 1".into()));
        }
        if suites.is_empty() {
            suites = Suite::all_for(&model);
        }
        suites.sort();
        suites.dedup();
        for s in &suites {
            if !s.applies_to(&model) {
                return Err(Error::Contract(format!("suite `{s}` does not apply to {}", model.descriptor())));
            }
        }
        Ok(SuiteConfig {
            model,
            seed,
            trials,
            suites,
            overrides: Vec::new(),
            timing: false,
        })
    }

    pub fn override_tolerance(mut self, check: impl Into<String>, value: f64) -> Self {
        self.overrides.push((check.into(), value));
        self
    }

    fn tol(&self, check: &str, default: f64) -> f64 {
        self.overrides
            .iter()
            .rev()
            .find(|(k, _)| k == check)
            .map_or(default, |(_, v)| *v)
    }

    fn suite_label(&self) -> String {
        if self.suites == Suite::all_for(&self.model) {
            "all".to_string()
        } else {
            self.suites.iter().map(|s| s.name()).collect::<Vec<_>>().join("+")
        }
    }
}

struct Entry {
    name: String,
    relation: Relation,
    threshold: f64,
    value: f64,
    seen: bool,
    witness: Vec<Element>,
}

/// Worst value per check over the trials, keeping the elements that
/// attained it.
struct Acc<'a> {
    cfg: &'a SuiteConfig,
    entries: Vec<Entry>,
}

impl<'a> Acc<'a> {
    fn new(cfg: &'a SuiteConfig) -> Self {
        Acc { cfg, entries: Vec::new() }
    }

    fn entry(&mut self, name: &str, relation: Relation, default: f64) -> &mut Entry {
        let i = match self.entries.iter().position(|e| e.name == name) {
            Some(i) => i,
            None => {
                self.entries.push(Entry {
                    name: name.to_string(),
                    relation,
                    threshold: self.cfg.tol(name, default),
                    value: 0.0,
                    seen: false,
                    witness: Vec::new(),
                });
                self.entries.len() - 1
            }
        };
        &mut self.entries[i]
    }

    fn le(&mut self, name: &str, threshold: f64, value: f64, elems: &[&Element]) {
        let e = self.entry(name, Relation::AtMost, threshold);
        if !e.seen || value > e.value || (value.is_nan() && !e.value.is_nan()) {
            e.seen = true;
            e.value = value;
            e.witness = elems.iter().map(|x| (*x).clone()).collect();
        }
    }

    fn ge(&mut self, name: &str, threshold: f64, value: f64, elems: &[&Element]) {
        let e = self.entry(name, Relation::AtLeast, threshold);
        if !e.seen || value < e.value || (value.is_nan() && !e.value.is_nan()) {
            e.seen = true;
            e.value = value;
            e.witness = elems.iter().map(|x| (*x).clone()).collect();
        }
    }

    fn finish(self, suite: Suite, ctx: &ModelContext) -> Result<VerificationReport> {
        let cfg = self.cfg;
        let mut report = VerificationReport::new(suite.name(), ctx.descriptor()).with_seed(cfg.seed, cfg.trials);
        let mut witnesses = Vec::new();
        for e in self.entries {
            let check = Check::new(e.name.clone(), e.value, e.relation, e.threshold);
            if !check.passed && !e.witness.is_empty() {
                let elems = e
                    .witness
                    .iter()
                    .map(|x| ctx.format_element(x))
                    .collect::<Result<Vec<_>>>()?;
                witnesses.push((e.name, e.value, elems));
            }
            report.push(check);
        }
        for (label, value, elems) in witnesses {
            report.witness(label, value, elems);
        }
        report.finalize();
        Ok(report)
    }
}

fn trial_rng(cfg: &SuiteConfig, t: u64) -> SeededRng {
    SeededRng::substream(cfg.seed, t)
}

/// Runs the configured suites and folds them into one report.
pub fn run_suite(cfg: &SuiteConfig) -> VerificationReport {
    let start = Instant::now();
    let ctx = &cfg.model;
    let mut report = VerificationReport::new(cfg.suite_label(), ctx.descriptor()).with_seed(cfg.seed, cfg.trials);
    report.config("model", ctx.descriptor());
    report.config("seed", cfg.seed);
    report.config("trials", cfg.trials);
    report.config("suites", cfg.suites.iter().map(|s| s.name()).collect::<Vec<_>>().join(","));
    for (k, v) in &cfg.overrides {
        report.config(format!("tolerance.{k}"), format!("{v:e}"));
    }
    for &suite in &cfg.suites {
        match run_one(cfg, suite) {
            Ok(sub) => report.absorb(sub),
            Err(err) => {
                let mut sub = VerificationReport::new(suite.name(), ctx.descriptor());
                sub.push(Check::new("internal-error", f64::INFINITY, Relation::AtMost, 0.0));
                sub.note(format!("internal error: {err}"));
                sub.finalize();
                report.absorb(sub);
            }
        }
    }
    report.finalize();
    if cfg.timing {
        report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    report
}

/// Runs one suite on its own.
pub fn run_one(cfg: &SuiteConfig, suite: Suite) -> Result<VerificationReport> {
    if !suite.applies_to(&cfg.model) {
        return Err(Error::Contract(format!("suite `{suite}` does not apply to {}", cfg.model.descriptor())));
    }
    match suite {
        Suite::CompressionAxioms => compression_axioms(cfg),
        Suite::BaseIdentity => base_identity(cfg),
        Suite::Complementarity => complementarity(cfg),
        Suite::Decomposition => decomposition(cfg),
        Suite::Rickart => rickart(cfg),
        Suite::RsConvergence => rs_convergence(cfg),
        Suite::Calculus => calculus_laws(cfg),
        Suite::JbCondition => jb_condition(cfg),
        Suite::CommuteEquivalence => commute_equivalence(cfg),
        Suite::Block => block(cfg),
        Suite::MatrixJb => matrix_jb(cfg),
        Suite::Duality => duality(cfg),
    }
}

fn compression_axioms(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let ctx = &cfg.model;
    let mut acc = Acc::new(cfg);
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg, t);
        let p = gen::random_projection(ctx, &mut rng)?;
        let f = gen::random_effect(ctx, &mut rng)?;
        let r = compression::compression_axiom_residuals(ctx, &p, std::slice::from_ref(&f))?;
        let w = [p.element(), &f];
        acc.le("F1", compression::AXIOM_TOL, r.f1, &w);
        acc.le("F2", compression::AXIOM_TOL, r.f2, &w);
        acc.le("F3", compression::AXIOM_TOL, r.f3, &w);
        acc.le("positivity", compression::AXIOM_TOL, r.positivity, &w);

        // principal foci: e, f <= p with e + f <= 1 gives e + f <= p
        let e1 = ctx.compress(&p, &f)?.scaled(0.5);
        let e2 = ctx.compress(&p, &gen::random_effect(ctx, &mut rng)?)?.scaled(0.5);
        if let Some(v) = compression::principal_focus_residual(ctx, &p, &e1, &e2)? {
            acc.le("principal-focus", compression::AXIOM_TOL, v, &[p.element(), &e1, &e2]);
        }
    }
    acc.finish(Suite::CompressionAxioms, ctx)
}

fn base_identity(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let ctx = &cfg.model;
    let mut acc = Acc::new(cfg);
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg, t);
        let [p, q, r] = gen::random_orthogonal_triple(ctx, &mut rng)?;
        let a = gen::random_element(ctx, &mut rng)?;
        let v = compression::verify_base_identity(ctx, &p, &q, &r, std::slice::from_ref(&a))?;
        acc.le("base-identity", compression::RESIDUAL_TOL, v, &[p.element(), q.element(), r.element(), &a]);
    }
    acc.finish(Suite::BaseIdentity, ctx)
}

fn complementarity(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let ctx = &cfg.model;
    let mut acc = Acc::new(cfg);
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg, t);
        let p = gen::random_projection(ctx, &mut rng)?;
        let f = gen::random_effect(ctx, &mut rng)?;
        let v = compression::complementarity_residual(ctx, &p, std::slice::from_ref(&f))?;
        acc.le("complementarity", compression::RESIDUAL_TOL, v, &[p.element(), &f]);
        let m = compression::commuting_meet_residual(ctx, &ctx.compress(&p, &f)?, &p)?;
        acc.le("commuting-meet", compression::RESIDUAL_TOL, m, &[p.element(), &f]);
    }
    acc.finish(Suite::Complementarity, ctx)
}

/// Alternates clustered and generic elements.
fn mixed_element(ctx: &ModelContext, t: u64, rng: &mut SeededRng) -> Result<Element> {
    if t.is_multiple_of(2) {
        gen::random_clustered_element(ctx, rng)
    } else {
        gen::random_element(ctx, rng)
    }
}

/// Distance between the spectral and the least-projection decompositions.
pub fn decomposition_agreement(ctx: &ModelContext, a: &Element) -> Result<f64> {
    let d1 = compression::orthogonal_decomposition(ctx, a)?;
    let d2 = compression::least_projection_decomposition(ctx, a)?;
    Ok(ctx
        .distance(&d1.a_plus, &d2.a_plus)?
        .max(ctx.distance(&d1.a_minus, &d2.a_minus)?)
        .max(ctx.distance(d1.p.element(), d2.p.element())?))
}

fn decomposition(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let ctx = &cfg.model;
    let mut acc = Acc::new(cfg);
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg, t);
        let a = mixed_element(ctx, t, &mut rng)?;
        acc.le("agreement", compression::RESIDUAL_TOL, decomposition_agreement(ctx, &a)?, &[&a]);
        let d = compression::orthogonal_decomposition(ctx, &a)?;
        acc.le("invariants", compression::RESIDUAL_TOL, d.residual(ctx, &a)?, &[&a]);
        if ctx.matrix_size().is_some() {
            let prod = matrix::jordan_product(ctx, &d.a_plus, &d.a_minus)?;
            acc.le("plus-times-minus", compression::RESIDUAL_TOL, ctx.order_unit_norm(&prod)?, &[&a]);
        }
    }
    acc.finish(Suite::Decomposition, ctx)
}

/// `‖a* - max{q ∈ P(a) : a C q, J_q(a) = 0}‖`, or infinity when the set
/// has no largest element.
pub fn rickart_identity_residual(ctx: &ModelContext, a: &Element) -> Result<f64> {
    let star = compression::rickart_map(ctx, a)?;
    let query = compression::bicommutant(ctx, a)?;
    let mut admissible = Vec::new();
    for q in &query.projections {
        if compression::rickart_sides(ctx, a, &star, q)?.1 {
            admissible.push(q);
        }
    }
    for q in &admissible {
        let mut largest = true;
        for r in &admissible {
            if !ctx.order_leq(r.element(), q.element())? {
                largest = false;
                break;
            }
        }
        if largest {
            return ctx.distance(q.element(), star.element());
        }
    }
    Ok(f64::INFINITY)
}

fn rickart(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let ctx = &cfg.model;
    let trivial_probes = matches!(ctx.kind(), ModelKind::Spin { norm } if norm.dim() == 1);
    let mut acc = Acc::new(cfg);
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg, t);
        let a = gen::random_clustered_element(ctx, &mut rng)?;
        let probes = (0..3)
            .map(|_| gen::random_atom(ctx, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        let check = compression::rickart_biconditional(ctx, &a, &probes)?;
        let mut w: Vec<&Element> = vec![&a];
        w.extend(probes.iter().map(|p| p.element()));
        acc.le("biconditional-mismatches", 0.0, check.mismatches.len() as f64, &w);
        acc.le("identity", compression::RESIDUAL_TOL, rickart_identity_residual(ctx, &a)?, &[&a]);

        let clusters = ctx.spectrum(&a)?.len();
        let has_kernel = ctx.order_unit_norm(check.star.element())? > 0.5;
        if has_kernel && clusters >= 2 && !trivial_probes {
            let missing = if check.incompatible_probes > 0 { 0.0 } else { 1.0 };
            acc.le("incompatible-probe-missing", 0.0, missing, &w);
        }

        let e = gen::random_effect(ctx, &mut rng)?;
        let cover = compression::projection_cover(ctx, &e)?;
        let mut cands = compression::bicommutant(ctx, &e)?.projections;
        cands.push(gen::random_projection(ctx, &mut rng)?);
        let (covers, violations) = compression::cover_minimality(ctx, &e, &cover, &cands)?;
        acc.le("cover-dominates", 0.0, if covers { 0.0 } else { 1.0 }, &[&e]);
        acc.le("cover-minimality", 0.0, violations as f64, &[&e]);
        let star_e = compression::rickart_map(ctx, &e)?;
        acc.le(
            "effect-star",
            compression::RESIDUAL_TOL,
            ctx.distance(star_e.element(), cover.complement(ctx).element())?,
            &[&e],
        );
    }
    acc.finish(Suite::Rickart, ctx)
}

/// Mesh sequence of the convergence suite.
pub const RS_MESHES: [f64; 4] = [1.0, 0.5, 0.25, 0.125];
/// Slack allowed when comparing errors of successive meshes.
pub const RS_MONOTONE_SLACK: f64 = 1e-12;

/// `(max(err - mesh), max increase of err under mesh halving)`.
pub fn rs_profile(ctx: &ModelContext, a: &Element) -> Result<(f64, f64)> {
    let mut excess = f64::NEG_INFINITY;
    let mut increase = 0.0f64;
    let mut prev: Option<f64> = None;
    for mesh in RS_MESHES {
        let (_, err) = calculus::rs_integral_approx(ctx, a, mesh)?;
        excess = excess.max(err - mesh);
        if let Some(p) = prev {
            increase = increase.max(err - p);
        }
        prev = Some(err);
    }
    Ok((excess, increase))
}

fn rs_convergence(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let ctx = &cfg.model;
    let mut acc = Acc::new(cfg);
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg, t);
        let a = mixed_element(ctx, t, &mut rng)?;
        let (excess, increase) = rs_profile(ctx, &a)?;
        acc.le("error-minus-mesh", 1e-9, excess, &[&a]);
        acc.le("monotone", RS_MONOTONE_SLACK, increase, &[&a]);
    }
    acc.finish(Suite::RsConvergence, ctx)
}

fn poly_product(g: &[f64], h: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; g.len() + h.len() - 1];
    for (i, x) in g.iter().enumerate() {
        for (j, y) in h.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn calculus_laws(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let ctx = &cfg.model;
    let mut acc = Acc::new(cfg);
    let orders: Vec<u32> = (1..=32).map(|k| 2 * k).collect();
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg, t);
        let a = mixed_element(ctx, t, &mut rng)?;
        let res = calculus::spectral_resolution(ctx, &a)?;
        let w = [&a];

        let id = calculus::continuous_fc(ctx, &a, &RealFunction::Identity)?;
        acc.le("identity", 1e-9, ctx.distance(&id, &a)?, &w);
        let one = calculus::continuous_fc(ctx, &a, &RealFunction::Const(1.0))?;
        acc.le("unital", 1e-9, ctx.distance(&one, &ctx.unit())?, &w);

        let (dg, dh) = (1 + rng.index(3), 1 + rng.index(3));
        let g: Vec<f64> = rng.gaussian_vec(dg);
        let h: Vec<f64> = rng.gaussian_vec(dh);
        let gh = poly_product(&g, &h);
        let ga = calculus::continuous_fc(ctx, &a, &RealFunction::Poly(g.clone()))?;
        let ha = calculus::continuous_fc(ctx, &a, &RealFunction::Poly(h.clone()))?;
        let gha = calculus::continuous_fc(ctx, &a, &RealFunction::Poly(gh))?;
        acc.le("multiplicative", 1e-8, ctx.distance(&gha, &ctx.jordan_product(&ga, &ha)?)?, &w);
        let lin = calculus::continuous_fc(ctx, &a, &RealFunction::Poly(vec![g[0] + h[0]]))?;
        let lin_ref = calculus::continuous_fc(ctx, &a, &RealFunction::Const(g[0]))?
            + calculus::continuous_fc(ctx, &a, &RealFunction::Const(h[0]))?;
        acc.le("linear", 1e-9, ctx.distance(&lin, &lin_ref)?, &w);

        // (t - c)² + d >= 0
        let c = rng.gaussian();
        let d = rng.uniform(0.0, 1.0);
        let pos_fn = RealFunction::Poly(vec![c * c + d, -2.0 * c, 1.0]);
        let pa = calculus::continuous_fc(ctx, &a, &pos_fn)?;
        acc.le("positive", 1e-9, ctx.cone_violation(&pa)?, &w);
        let sup = res
            .jumps
            .iter()
            .map(|l| pos_fn.eval(*l).unwrap_or(f64::NAN).abs())
            .fold(0.0, f64::max);
        acc.le("norm-identity", 1e-9 * (1.0 + sup), (ctx.order_unit_norm(&pa)? - sup).abs(), &w);

        let d = compression::orthogonal_decomposition(ctx, &a)?;
        let plus = calculus::continuous_fc(ctx, &a, &RealFunction::Pos)?;
        let abs = calculus::continuous_fc(ctx, &a, &RealFunction::Abs)?;
        acc.le("pos-is-a-plus", 1e-9, ctx.distance(&plus, &d.a_plus)?, &w);
        acc.le("abs-is-modulus", 1e-9, ctx.distance(&abs, &d.abs)?, &w);

        for g in [RealFunction::Square, RealFunction::Abs, RealFunction::Pos] {
            let mut lambdas: Vec<f64> = res.jumps.iter().filter_map(|l| g.eval(*l)).collect();
            let top = lambdas.iter().copied().fold(0.0, f64::max);
            for _ in 0..3 {
                lambdas.push(rng.uniform(-1.0, top + 1.0));
            }
            for l in lambdas {
                let v = calculus::pushforward_check(ctx, &a, &g, l)?;
                acc.le(&format!("pushforward-{g}"), 1e-9, v, &w);
            }
        }

        let (lo, hi) = (res.lower(), res.upper());
        let mut lambdas = res.jumps.clone();
        while lambdas.len() < res.jumps.len() + 20 {
            lambdas.push(rng.uniform(lo - 1.0, hi + 1.0));
        }
        for l in lambdas {
            let v = calculus::resolution_definition_residual(ctx, &res, &a, l)?;
            acc.le("resolution-definition", 1e-9, v, &w);
        }
        let (lb, ub) = calculus::spectral_bounds_by_bisection(ctx, &a)?;
        let scale = 1.0 + ctx.order_unit_norm(&a)?;
        acc.le("bounds-bisection", 1e-8, (lb - lo).abs().max((ub - hi).abs()) / scale, &w);

        // Borel calculus: indicators land in P(a), max of indicators is the join
        let u1 = rng.uniform(lo - 1.0, hi + 1.0);
        let u2 = rng.uniform(lo - 1.0, hi + 1.0);
        let (b1, b2) = (RealFunction::Chi(f64::NEG_INFINITY, u1), RealFunction::Chi(u2, f64::INFINITY));
        let p1 = calculus::borel_fc(ctx, &a, &b1)?;
        let p2 = calculus::borel_fc(ctx, &a, &b2)?;
        let p1_sharp = ctx.certify_projection(p1.clone()).is_ok();
        let p2_sharp = ctx.certify_projection(p2.clone()).is_ok();
        acc.le("indicator-sharp", 0.0, if p1_sharp && p2_sharp { 0.0 } else { 1.0 }, &w);
        let joined = calculus::borel_fc(
            ctx,
            &a,
            &RealFunction::Custom {
                name: "max-of-indicators".into(),
                continuous: false,
                eval: std::sync::Arc::new(move |x| Some(if x <= u1 || x > u2 { 1.0 } else { 0.0 })),
            },
        )?;
        let join = &p1 + &p2 - ctx.jordan_product(&p1, &p2)?;
        acc.le("indicator-join", 1e-9, ctx.distance(&joined, &join)?, &w);

        let e = gen::effect_with_gap(ctx, 0.1, &mut rng)?;
        let sl = calculus::support_limit(ctx, &e, &orders)?;
        acc.le("support-limit-bound", 1e-9, sl.bound_violation(), &[&e]);
        acc.le("support-limit-monotone", 1e-9, sl.monotonicity, &[&e]);
    }
    acc.finish(Suite::Calculus, ctx)
}

/// Projection pair for the JB suite: two random projections (mostly atoms
/// in the spin model).
fn jb_pair(ctx: &ModelContext, rng: &mut SeededRng) -> Result<(Projection, Projection)> {
    Ok((gen::random_projection(ctx, rng)?, gen::random_projection(ctx, rng)?))
}

fn jb_condition(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let ctx = &cfg.model;
    let mut acc = Acc::new(cfg);
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg, t);
        let (p, q) = jb_pair(ctx, &mut rng)?;
        let w = [p.element(), q.element()];
        acc.le("eq7", compression::RESIDUAL_TOL, compression::jb_condition_residual(ctx, &p, &q)?, &w);
        acc.le("t-condition", compression::RESIDUAL_TOL, compression::t_condition_residual(ctx, &p, &q)?, &w);
    }
    acc.finish(Suite::JbCondition, ctx)
}

/// `a` with clustered spectrum and `b` sharing, partially sharing, or not
/// sharing its eigenbasis, by trial index.
fn commute_pair(ctx: &ModelContext, t: u64, rng: &mut SeededRng) -> Result<(Element, Element)> {
    match ctx.kind() {
        ModelKind::Matrix { n } => {
            let n = *n;
            const PALETTE: [f64; 4] = [-1.0, 0.0, 1.0, 2.0];
            let values: Vec<f64> = (0..n).map(|_| PALETTE[rng.index(PALETTE.len())]).collect();
            let q = gen::random_orthogonal(n, rng);
            let mut q2 = match t % 4 {
                0 => q.clone(),
                1 => gen::random_orthogonal(n, rng),
                _ => {
                    // rotate inside each eigenspace of a: still commutes
                    let mut r = DMatrix::<f64>::identity(n, n);
                    let mut groups: Vec<Vec<usize>> = Vec::new();
                    for v in PALETTE {
                        let g: Vec<usize> = (0..n).filter(|&i| values[i] == v).collect();
                        if g.len() > 1 {
                            groups.push(g);
                        }
                    }
                    for g in &groups {
                        let o = gen::random_orthogonal(g.len(), rng);
                        for (x, &i) in g.iter().enumerate() {
                            for (y, &j) in g.iter().enumerate() {
                                r[(i, j)] = o[(x, y)];
                            }
                        }
                    }
                    &q * r
                }
            };
            if t % 4 == 3 && n >= 2 {
                // mix two eigenvectors of (generically) different eigenvalues
                let (i, j) = (0, 1 + rng.index(n - 1));
                let th = rng.uniform(0.1, 1.4);
                let (ci, cj) = (q2.column(i).clone_owned(), q2.column(j).clone_owned());
                q2.set_column(i, &(&ci * th.cos() - &cj * th.sin()));
                q2.set_column(j, &(&ci * th.sin() + &cj * th.cos()));
            }
            let a = ctx.from_matrix(&(&q * DMatrix::from_diagonal(&DVector::from_vec(values)) * q.transpose()))?;
            let d2 = DVector::from_vec(rng.gaussian_vec(n));
            let b = ctx.from_matrix(&(&q2 * DMatrix::from_diagonal(&d2) * q2.transpose()))?;
            Ok((a, b))
        }
        ModelKind::Spin { norm } => {
            let y = rng.unit_dual(norm);
            let r = rng.uniform(0.0, 2.0);
            let a = ctx.spin_element(rng.gaussian(), &y.iter().map(|v| v * r).collect::<Vec<_>>())?;
            let z = match t % 3 {
                0 => y.iter().map(|v| -v).collect(),
                1 => rng.unit_dual(norm),
                _ => vec![0.0; y.len()],
            };
            let s = rng.uniform(0.0, 2.0);
            let b = ctx.spin_element(rng.gaussian(), &z.iter().map(|v| v * s).collect::<Vec<_>>())?;
            Ok((a, b))
        }
    }
}

/// Whether the two commutation notions disagree on `(a, b)`.
pub fn commute_disagreement(ctx: &ModelContext, a: &Element, b: &Element) -> Result<bool> {
    let ext = compression::extended_commute(ctx, a, b)?;
    let other = match ctx.kind() {
        ModelKind::Matrix { .. } => matrix::operator_commute(ctx, a, b)?,
        ModelKind::Spin { .. } => compression::extended_commute_exhaustive(ctx, a, b)?,
    };
    Ok(ext != other)
}

fn commute_equivalence(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let ctx = &cfg.model;
    let mut acc = Acc::new(cfg);
    let mut commuting = 0u64;
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg, t);
        let (a, b) = commute_pair(ctx, t, &mut rng)?;
        let bad = commute_disagreement(ctx, &a, &b)?;
        if compression::extended_commute(ctx, &a, &b)? {
            commuting += 1;
        }
        acc.le("disagreements", 0.0, if bad { 1.0 } else { 0.0 }, &[&a, &b]);
    }
    let mut report = acc.finish(Suite::CommuteEquivalence, ctx)?;
    report.config("commuting_pairs", commuting);
    Ok(report)
}

fn block(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let ctx = &cfg.model;
    let mut acc = Acc::new(cfg);
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg, t);
        let generators = match ctx.kind() {
            ModelKind::Matrix { .. } => gen::random_orthogonal_triple(ctx, &mut rng)?.to_vec(),
            ModelKind::Spin { .. } => vec![gen::random_projection(ctx, &mut rng)?],
        };
        let pool = if t % 2 == 0 {
            gen::spectral_pool(ctx, rng.next_u64(), 2)?
        } else {
            Vec::new()
        };
        let r = compression::block_and_cblock(ctx, &generators, &pool, &mut rng)?;
        let w: Vec<&Element> = generators.iter().map(|g| g.element()).collect();
        for c in &r.checks {
            acc.le(&c.name, c.threshold, c.value, &w);
        }
    }
    acc.finish(Suite::Block, ctx)
}

fn matrix_jb(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let ctx = &cfg.model;
    let mut acc = Acc::new(cfg);
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg, t);
        let a = gen::random_element(ctx, &mut rng)?;
        let b = gen::random_element(ctx, &mut rng)?;
        let scale = 1.0 + ctx.order_unit_norm(&a)?.powi(2) * ctx.order_unit_norm(&b)?;
        let u = matrix::quadratic_map(ctx, &a, &b)?;
        let u_direct = matrix::quadratic_map_direct(ctx, &a, &b)?;
        acc.le("quadratic-map", matrix::OPERATOR_TOL, ctx.distance(&u, &u_direct)? / scale, &[&a, &b]);
        let c = gen::random_element(ctx, &mut rng)?;
        let t1 = matrix::triple_product(ctx, &a, &b, &c)?;
        let t2 = matrix::triple_product(ctx, &c, &b, &a)?;
        acc.le("triple-symmetry", matrix::OPERATOR_TOL, ctx.distance(&t1, &t2)? / scale, &[&a, &b, &c]);

        let a2 = ctx.jordan_product(&a, &a)?;
        let lhs = ctx.jordan_product(&ctx.jordan_product(&a2, &b)?, &a)?;
        let rhs = ctx.jordan_product(&a2, &ctx.jordan_product(&b, &a)?)?;
        let scale3 = 1.0 + ctx.order_unit_norm(&a)?.powi(3) * ctx.order_unit_norm(&b)?;
        acc.le("jordan-identity", matrix::OPERATOR_TOL, ctx.distance(&lhs, &rhs)? / scale3, &[&a, &b]);
        let ab = ctx.jordan_product(&a, &b)?;
        acc.le("jordan-commutative", matrix::OPERATOR_TOL, ctx.distance(&ab, &ctx.jordan_product(&b, &a)?)? / scale, &[&a, &b]);

        let p = gen::random_projection(ctx, &mut rng)?;
        lattice_checks(ctx, &p, &mut rng, &mut acc)?;
        let v = matrix::mult_operator_identity_check(ctx, &p, &a)?;
        acc.le("operator-identities", matrix::OPERATOR_TOL * (1.0 + ctx.order_unit_norm(&a)?), v, &[p.element(), &a]);

        let jb = matrix::jb_norm_axioms(ctx, &a, &b)?;
        for ch in &jb.checks {
            acc.ge(&format!("jb-norm-{}", ch.name), ch.threshold, ch.value, &[&a, &b]);
        }

        let e = gen::effect_with_gap(ctx, 0.1, &mut rng)?;
        let ann = matrix::annihilator_check(ctx, &e)?;
        for ch in &ann.checks {
            acc.le(&format!("annihilator-{}", ch.name), ch.threshold, ch.value, &[&e]);
        }
    }
    acc.finish(Suite::MatrixJb, ctx)
}

/// Meet and join of `p` with a random `q`: idempotent, bounds in the right
/// direction, absorption `p ∧ (p ∨ q) = p`. Pairs whose rank decision is
/// ambiguous are redrawn.
fn lattice_checks(ctx: &ModelContext, p: &Projection, rng: &mut SeededRng, acc: &mut Acc) -> Result<()> {
    for _ in 0..LATTICE_REDRAWS {
        let q = gen::random_projection(ctx, rng)?;
        let (meet, join) = match (matrix::lattice_meet(ctx, p, &q), matrix::lattice_join(ctx, p, &q)) {
            (Ok(m), Ok(j)) => (m, j),
            (Err(Error::RankAmbiguous { .. }), _) | (_, Err(Error::RankAmbiguous { .. })) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        let absorbed = match matrix::lattice_meet(ctx, p, &join) {
            Ok(m) => m,
            Err(Error::RankAmbiguous { .. }) => continue,
            Err(e) => return Err(e),
        };
        let w = [p.element(), q.element()];
        let mut worst = 0.0f64;
        for m in [&meet, &join] {
            let m2 = ctx.jordan_product(m.element(), m.element())?;
            worst = worst.max(ctx.distance(&m2, m.element())?);
        }
        // x <= y for projections iff x∘y = x
        for (lo, hi) in [(&meet, p), (&meet, &q), (p, &join), (&q, &join)] {
            let prod = ctx.jordan_product(lo.element(), hi.element())?;
            worst = worst.max(ctx.distance(&prod, lo.element())?);
        }
        acc.le("lattice-order", matrix::OPERATOR_TOL, worst, &w);
        acc.le("lattice-absorption", matrix::OPERATOR_TOL, ctx.distance(absorbed.element(), p.element())?, &w);
        return Ok(());
    }
    Ok(())
}

const LATTICE_REDRAWS: usize = 10;

/// Trials of the duality suite that also run the ascent-based uniqueness
/// probe, which is slow.
const UNIQUENESS_PROBES: u64 = 20;

fn duality(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let ctx = &cfg.model;
    let norm = ctx.require_spin()?;
    let mut acc = Acc::new(cfg);
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg, t);
        let y = rng.unit_dual(norm);
        let x = spin::duality_map(norm, &y)?;
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let xn = spin::duality_map(norm, &neg)?;
        let odd = x.iter().zip(&xn).fold(0.0f64, |m, (a, b)| m.max((a + b).abs()));
        let atom = SpinProjection::Atom(y.clone()).to_element(ctx)?;
        let w = [&atom];
        acc.le("primal-norm", spin::DUALITY_TOL, (norm.primal_norm(&x) - 1.0).abs(), &w);
        acc.le("pairing", spin::DUALITY_TOL, (spin::dot(&y, &x) - 1.0).abs(), &w);
        acc.le("odd", spin::DUALITY_TOL, odd, &w);
        if t < UNIQUENESS_PROBES {
            let starts = vec![rng.gaussian_vec(norm.dim())];
            let spread = spin::norming_point_spread(norm, &y, &starts)?;
            acc.le("norming-uniqueness", spin::UNIQUENESS_TOL, spread, &w);
        }

        let a = gen::random_element(ctx, &mut rng)?;
        let n1 = ctx.order_unit_norm(&a)?;
        let n2 = ctx.norm_by_bisection(&a)?;
        acc.le("norm-bisection", 1e-8, (n1 - n2).abs() / (1.0 + n1), &[&a]);

        if norm.is_euclidean() {
            let b = gen::random_element(ctx, &mut rng)?;
            let qs = spin::quarter_square_product(ctx, &a, &b)?;
            let hp = spin::hilbert_jordan_product(ctx, &a, &b)?;
            acc.le("product-agreement", 1e-9 * (1.0 + n1 * ctx.order_unit_norm(&b)?), ctx.distance(&qs, &hp)?, &[&a, &b]);
        }
    }
    if norm.is_euclidean() {
        let mut rng = SeededRng::substream(cfg.seed, cfg.trials);
        let basis: Vec<Vec<f64>> = (0..norm.dim())
            .map(|i| (0..norm.dim()).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let g = spin::psi_gram(norm, &basis, 100, &mut rng)?;
        let gram = (g.gram - DMatrix::<f64>::identity(norm.dim(), norm.dim())).amax();
        acc.le("psi-gram", 1e-9, gram, &[]);
        acc.le("psi-linearity", 1e-8, g.linearity_defect, &[]);
    }
    acc.finish(Suite::Duality, ctx)
}

/// Recomputes a witness's residual from its elements, for the checks whose
/// witness determines the value.
pub fn replay_witness(ctx: &ModelContext, suite: Suite, check: &str, elems: &[Element]) -> Result<f64> {
    let proj = |i: usize| ctx.certify_projection(elems[i].clone());
    let need = |k: usize| -> Result<()> {
        if elems.len() == k {
            Ok(())
        } else {
            Err(Error::Contract(format!("witness for `{check}` needs {k} elements")))
        }
    };
    match (suite, check) {
        (Suite::CompressionAxioms, "F1" | "F2" | "F3" | "positivity") => {
            need(2)?;
            let r = compression::compression_axiom_residuals(ctx, &proj(0)?, &elems[1..])?;
            Ok(match check {
                "F1" => r.f1,
                "F2" => r.f2,
                "F3" => r.f3,
                _ => r.positivity,
            })
        }
        (Suite::BaseIdentity, "base-identity") => {
            need(4)?;
            compression::verify_base_identity(ctx, &proj(0)?, &proj(1)?, &proj(2)?, &elems[3..])
        }
        (Suite::Complementarity, "complementarity") => {
            need(2)?;
            compression::complementarity_residual(ctx, &proj(0)?, &elems[1..])
        }
        (Suite::JbCondition, "eq7") => {
            need(2)?;
            compression::jb_condition_residual(ctx, &proj(0)?, &proj(1)?)
        }
        (Suite::JbCondition, "t-condition") => {
            need(2)?;
            compression::t_condition_residual(ctx, &proj(0)?, &proj(1)?)
        }
        (Suite::Decomposition, "agreement") => {
            need(1)?;
            decomposition_agreement(ctx, &elems[0])
        }
        (Suite::Rickart, "identity") => {
            need(1)?;
            rickart_identity_residual(ctx, &elems[0])
        }
        (Suite::RsConvergence, "error-minus-mesh") => {
            need(1)?;
            Ok(rs_profile(ctx, &elems[0])?.0)
        }
        (Suite::RsConvergence, "monotone") => {
            need(1)?;
            Ok(rs_profile(ctx, &elems[0])?.1)
        }
        (Suite::CommuteEquivalence, "disagreements") => {
            need(2)?;
            Ok(if commute_disagreement(ctx, &elems[0], &elems[1])? { 1.0 } else { 0.0 })
        }
        _ => Err(Error::Contract(format!("no replay rule for {suite}/{check}"))),
    }
}
