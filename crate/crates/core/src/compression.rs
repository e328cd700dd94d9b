//! Compression bases, commutation and the structures built from them.
//!
//! Every function here is model-generic: it only touches the compressions
//! `J_p` (via [`ModelContext::compress`]), the order, and spectra. In the
//! matrix model `J_p(a) = pap`; in the spin model `J_p` is the atom
//! compression of [`crate::spin::compression_apply`].

use nalgebra::DMatrix;

use crate::error::{contract, Error, Result};
use crate::matrix;
use crate::ous::{Element, ModelContext, ModelKind};
use crate::report::VerificationReport;
use crate::rng::SeededRng;
use crate::spin::{self, SpinProjection};

/// Idempotency tolerance for certifying projections.
pub const PROJECTION_TOL: f64 = 1e-9;
/// Default residual tolerance for algebraic identities.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Residual tolerance of the compression axioms.
pub const AXIOM_TOL: f64 = 1e-8;
/// Largest number of spectral clusters whose Boolean algebra is enumerated.
pub const MAX_CLUSTERS: usize = 20;
/// Boolean closure of `P(a)` is re-verified pairwise up to this many atoms.
const CLOSURE_CHECK_ATOMS: usize = 8;

/// A sharp element: the focus of a compression.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection(Element);

impl Projection {
    pub(crate) fn new_unchecked(e: Element) -> Self {
        Projection(e)
    }

    pub fn element(&self) -> &Element {
        &self.0
    }

    pub fn into_element(self) -> Element {
        self.0
    }

    /// `1 - p`.
    pub fn complement(&self, ctx: &ModelContext) -> Projection {
        Projection(ctx.unit() - &self.0)
    }
}

impl ModelContext {
    pub fn zero_projection(&self) -> Projection {
        Projection(self.zero())
    }

    pub fn unit_projection(&self) -> Projection {
        Projection(self.unit())
    }

    /// Certifies `e` as a projection: idempotent with `0 <= e <= 1` in the
    /// matrix model, one of `0`, `1`, `½(1, y)` in the spin model.
    pub fn certify_projection(&self, e: Element) -> Result<Projection> {
        self.check(&e)?;
        match self.kind() {
            ModelKind::Matrix { .. } => {
                let residual = self.distance(&matrix::jordan_product(self, &e, &e)?, &e)?;
                if residual > PROJECTION_TOL || !self.is_effect(&e)? {
                    return Err(Error::NotProjection { residual });
                }
                Ok(Projection(e))
            }
            ModelKind::Spin { .. } => {
                let sp = SpinProjection::classify(self, &e)?;
                Ok(Projection(sp.to_element(self)?))
            }
        }
    }

    /// The compression `J_p(a)`.
    pub fn compress(&self, p: &Projection, a: &Element) -> Result<Element> {
        self.check_pair(p.element(), a)?;
        match self.kind() {
            ModelKind::Matrix { .. } => matrix::quadratic_map_direct(self, p.element(), a),
            ModelKind::Spin { .. } => {
                let sp = SpinProjection::classify(self, p.element())?;
                spin::compression_apply(self, &sp, a)
            }
        }
    }

    /// Jordan product of the model: `(ab + ba)/2` for matrices, the
    /// quarter-square product `¼[(a+b)² - (a-b)²]` for spin factors.
    pub fn jordan_product(&self, a: &Element, b: &Element) -> Result<Element> {
        match self.kind() {
            ModelKind::Matrix { .. } => matrix::jordan_product(self, a, b),
            ModelKind::Spin { .. } => spin::quarter_square_product(self, a, b),
        }
    }

    /// `T_p = ½(I + J_p - J_{1-p})`.
    pub fn t_operator(&self, p: &Projection, a: &Element) -> Result<Element> {
        let jp = self.compress(p, a)?;
        let jq = self.compress(&p.complement(self), a)?;
        Ok((a + &jp - &jq) * 0.5)
    }

    fn tol(&self, a: &Element) -> Result<f64> {
        Ok(RESIDUAL_TOL * (1.0 + self.order_unit_norm(a)?))
    }
}

/// Maximum residual of each compression axiom for one focus.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AxiomResiduals {
    /// `‖J(1) - p‖`.
    pub f1: f64,
    /// `‖J(e) - e‖` over effects `e <= p`, plus any failure of `e <= p`.
    pub f2: f64,
    /// Kernel effects `k` (`J(k) = 0`): `‖J(k)‖` plus the failure of
    /// `k <= 1 - p`.
    pub f3: f64,
    /// Largest cone violation of `J(e)` (positivity of `J`).
    pub positivity: f64,
}

impl AxiomResiduals {
    pub fn max(&self) -> f64 {
        self.f1.max(self.f2).max(self.f3).max(self.positivity)
    }

    pub fn merge(&mut self, other: &AxiomResiduals) {
        self.f1 = self.f1.max(other.f1);
        self.f2 = self.f2.max(other.f2);
        self.f3 = self.f3.max(other.f3);
        self.positivity = self.positivity.max(other.positivity);
    }
}

/// Evaluates (F1) `J(1) = p`, (F2) `e <= p ⟹ J(e) = e` and
/// (F3) `J(e) = 0 ⟹ e <= 1 - p` on the given effects.
///
/// F2 is exercised on `J_p(f)`, which lies in `[0, p]`; F3 on `J_{1-p}(f)`,
/// which lies in the kernel of `J_p`.
pub fn compression_axiom_residuals(ctx: &ModelContext, p: &Projection, samples: &[Element]) -> Result<AxiomResiduals> {
    let q = p.complement(ctx);
    let mut r = AxiomResiduals {
        f1: ctx.distance(&ctx.compress(p, &ctx.unit())?, p.element())?,
        ..Default::default()
    };
    for f in samples {
        let e = ctx.compress(p, f)?;
        r.positivity = r.positivity.max(ctx.cone_violation(&e)?);
        let below = ctx.cone_violation(&(p.element() - &e))?;
        r.f2 = r.f2.max(ctx.distance(&ctx.compress(p, &e)?, &e)?.max(below));

        let k = ctx.compress(&q, f)?;
        let kernel = ctx.order_unit_norm(&ctx.compress(p, &k)?)?;
        let under = ctx.cone_violation(&(q.element() - &k))?;
        r.f3 = r.f3.max(kernel.max(under));
    }
    Ok(r)
}

pub fn verify_compression_axioms(ctx: &ModelContext, p: &Projection, samples: &[Element]) -> Result<VerificationReport> {
    for e in samples {
        if !ctx.is_effect(e)? {
            return contract("compression axioms are sampled on effects only");
        }
    }
    let r = compression_axiom_residuals(ctx, p, samples)?;
    let mut report = VerificationReport::new("compression-axioms", ctx.descriptor());
    report.trials = samples.len() as u64;
    report.check_le("F1", r.f1, AXIOM_TOL);
    report.check_le("F2", r.f2, AXIOM_TOL);
    report.check_le("F3", r.f3, AXIOM_TOL);
    report.check_le("positivity", r.positivity, AXIOM_TOL);
    report.finalize();
    if !report.passed() {
        report.witness("focus", r.max(), vec![ctx.format_element(p.element())?]);
    }
    Ok(report)
}

/// `max_a ‖J_{p+r}(J_{q+r}(a)) - J_r(a)‖` for orthogonal `p, q, r`.
///
/// Inputs violating `p + q + r <= 1` or pairwise commutation are rejected
/// with a contract error.
pub fn verify_base_identity(
    ctx: &ModelContext,
    p: &Projection,
    q: &Projection,
    r: &Projection,
    samples: &[Element],
) -> Result<f64> {
    let total = p.element() + q.element() + r.element();
    if !ctx.order_leq(&total, &ctx.unit())? {
        return contract("rejected input: p + q + r is not below 1");
    }
    for (x, y) in [(p, q), (p, r), (q, r)] {
        if !commutes(ctx, x.element(), y)? {
            return contract("rejected input: projections do not lie in one block");
        }
    }
    let pr = Projection(p.element() + r.element());
    let qr = Projection(q.element() + r.element());
    let mut worst = 0.0f64;
    for a in samples {
        let lhs = ctx.compress(&pr, &ctx.compress(&qr, a)?)?;
        let rhs = ctx.compress(r, a)?;
        worst = worst.max(ctx.distance(&lhs, &rhs)?);
    }
    Ok(worst)
}

/// `max ‖J_p(J_{1-p}(f))‖` and `max ‖J_{1-p}(k) - k‖` over kernel elements
/// `k = J_{1-p}(f)`: the positive kernel of `J_p` is the positive image of
/// `J_{1-p}`.
pub fn complementarity_residual(ctx: &ModelContext, p: &Projection, samples: &[Element]) -> Result<f64> {
    let q = p.complement(ctx);
    let mut worst = 0.0f64;
    for f in samples {
        let k = ctx.compress(&q, f)?;
        worst = worst.max(ctx.order_unit_norm(&ctx.compress(p, &k)?)?);
        worst = worst.max(ctx.distance(&ctx.compress(&q, &k)?, &k)?);
        let img = ctx.compress(p, f)?;
        worst = worst.max(ctx.order_unit_norm(&ctx.compress(&q, &img)?)?);
    }
    Ok(worst)
}

/// `‖a - J_p(a) - J_{1-p}(a)‖`.
pub fn commute_residual(ctx: &ModelContext, a: &Element, p: &Projection) -> Result<f64> {
    let jp = ctx.compress(p, a)?;
    let jq = ctx.compress(&p.complement(ctx), a)?;
    ctx.order_unit_norm(&(a - &jp - &jq))
}

/// `a C p`: `a = J_p(a) + J_{1-p}(a)`.
pub fn commutes(ctx: &ModelContext, a: &Element, p: &Projection) -> Result<bool> {
    Ok(commute_residual(ctx, a, p)? <= ctx.tol(a)?)
}

/// For an effect `e` commuting with `p`, `J_p(e)` is a lower bound of both
/// `e` and `p`; returns the larger of the two order violations.
pub fn commuting_meet_residual(ctx: &ModelContext, e: &Element, p: &Projection) -> Result<f64> {
    let jp = ctx.compress(p, e)?;
    Ok(ctx
        .cone_violation(&(e - &jp))?
        .max(ctx.cone_violation(&(p.element() - &jp))?))
}

/// Which certificate settled a compatibility question.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// One effect lies below the other.
    Ordered,
    /// Both are projections; decided by `commutes`.
    ProjectionCommutation,
    /// The effects operator commute (matrix model).
    OperatorCommutation,
    /// The effects have pairwise commuting spectral projections.
    JointSpectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compatibility {
    Compatible(Certificate),
    Incompatible(Certificate),
    /// No implemented certificate applies.
    Unknown,
}

impl Compatibility {
    pub fn is_compatible(self) -> Option<bool> {
        match self {
            Compatibility::Compatible(_) => Some(true),
            Compatibility::Incompatible(_) => Some(false),
            Compatibility::Unknown => None,
        }
    }
}

/// Mackey compatibility of two effects, certified rather than decided.
///
/// When a commutation certificate fires, the decomposition
/// `e = c + a1`, `f = c + b1` with `c + a1 + b1 ∈ E` is built and checked.
pub fn mackey_compatible(ctx: &ModelContext, e: &Element, f: &Element) -> Result<Compatibility> {
    if !ctx.is_effect(e)? || !ctx.is_effect(f)? {
        return contract("mackey_compatible needs effects");
    }
    if ctx.order_leq(e, f)? || ctx.order_leq(f, e)? {
        return Ok(Compatibility::Compatible(Certificate::Ordered));
    }
    if let (Ok(p), Ok(q)) = (ctx.certify_projection(e.clone()), ctx.certify_projection(f.clone())) {
        return Ok(if commutes(ctx, p.element(), &q)? {
            Compatibility::Compatible(Certificate::ProjectionCommutation)
        } else {
            Compatibility::Incompatible(Certificate::ProjectionCommutation)
        });
    }
    let certificate = match ctx.kind() {
        ModelKind::Matrix { .. } if matrix::operator_commute(ctx, e, f)? => Certificate::OperatorCommutation,
        _ if extended_commute(ctx, e, f)? => Certificate::JointSpectral,
        _ => return Ok(Compatibility::Unknown),
    };
    let (c, a1, b1) = common_part(ctx, e, f)?;
    let sum = &c + &a1 + &b1;
    for x in [&c, &a1, &b1, &sum] {
        if !ctx.is_effect(x)? {
            return contract("commutation certificate produced no Mackey decomposition");
        }
    }
    Ok(Compatibility::Compatible(certificate))
}

/// `(c, e - c, f - c)` with `c` the pointwise minimum of `e` and `f` over
/// their joint spectral atoms.
fn common_part(ctx: &ModelContext, e: &Element, f: &Element) -> Result<(Element, Element, Element)> {
    let se = ctx.spectrum(e)?;
    let sf = ctx.spectrum(f)?;
    let mut c = ctx.zero();
    for pe in &se.points {
        for pf in &sf.points {
            let atom = ctx.compress(&pe.projection, pf.projection.element())?;
            c.axpy(pe.value.min(pf.value), &atom);
        }
    }
    let a1 = e - &c;
    let b1 = f - &c;
    Ok((c, a1, b1))
}

/// Canonical P-orthogonal decomposition `a = a⁺ - a⁻`.
#[derive(Debug, Clone)]
pub struct OrthogonalDecomposition {
    pub p: Projection,
    pub a_plus: Element,
    pub a_minus: Element,
    /// `|a| = a⁺ + a⁻`.
    pub abs: Element,
}

impl OrthogonalDecomposition {
    /// Largest violation of `a = a⁺ - a⁻`, `a^± >= 0`, `J_p(a⁺) = a⁺`,
    /// `J_p(a⁻) = 0`.
    pub fn residual(&self, ctx: &ModelContext, a: &Element) -> Result<f64> {
        let split = ctx.distance(a, &(&self.a_plus - &self.a_minus))?;
        let pos = ctx
            .cone_violation(&self.a_plus)?
            .max(ctx.cone_violation(&self.a_minus)?);
        let fix = ctx.distance(&ctx.compress(&self.p, &self.a_plus)?, &self.a_plus)?;
        let kill = ctx.order_unit_norm(&ctx.compress(&self.p, &self.a_minus)?)?;
        Ok(split.max(pos).max(fix).max(kill))
    }
}

/// Spectral construction: `p` is the sum of the spectral projections with
/// value above the cluster threshold, `a⁺ = Σ_{λ>0} λ p_λ`,
/// `a⁻ = Σ_{λ<0} -λ p_λ`.
pub fn orthogonal_decomposition(ctx: &ModelContext, a: &Element) -> Result<OrthogonalDecomposition> {
    let s = ctx.spectrum(a)?;
    let tau = s.tau;
    let p = s.projection_where(ctx, |v| v > tau);
    let a_plus = s.apply(ctx, |v| if v > tau { v } else { 0.0 });
    let a_minus = s.apply(ctx, |v| if v < -tau { -v } else { 0.0 });
    let abs = &a_plus + &a_minus;
    Ok(OrthogonalDecomposition {
        p,
        a_plus,
        a_minus,
        abs,
    })
}

/// Independent construction: searches `P(a)` for the projections `q` with
/// `J_{1-q}(a) <= 0 <= J_q(a)`, takes the least one, and sets
/// `a⁺ = J_q(a)`, `a⁻ = -J_{1-q}(a)`.
pub fn least_projection_decomposition(ctx: &ModelContext, a: &Element) -> Result<OrthogonalDecomposition> {
    let query = bicommutant(ctx, a)?;
    let mut candidates = Vec::new();
    for q in &query.projections {
        let up = ctx.compress(q, a)?;
        let down = ctx.compress(&q.complement(ctx), a)?;
        if ctx.cone_contains(&up)? && ctx.cone_contains(&(-&down))? {
            candidates.push((q.clone(), up, -down));
        }
    }
    let least = candidates
        .iter()
        .position(|(q, _, _)| {
            candidates
                .iter()
                .all(|(r, _, _)| ctx.order_leq(q.element(), r.element()).unwrap_or(false))
        })
        .ok_or_else(|| Error::Contract("no least comparability projection in P(a)".into()))?;
    let (p, a_plus, a_minus) = candidates.swap_remove(least);
    let abs = &a_plus + &a_minus;
    Ok(OrthogonalDecomposition {
        p,
        a_plus,
        a_minus,
        abs,
    })
}

/// Carrier `s(a)`: the sum of the spectral projections with nonzero value.
pub fn support(ctx: &ModelContext, a: &Element) -> Result<Projection> {
    let s = ctx.spectrum(a)?;
    let tau = s.tau;
    Ok(s.projection_where(ctx, |v| v.abs() > tau))
}

/// Rickart projection `a* = 1 - s(a)`.
pub fn rickart_map(ctx: &ModelContext, a: &Element) -> Result<Projection> {
    Ok(support(ctx, a)?.complement(ctx))
}

/// Both sides of `q <= a*  ⟺  (a C q and J_q(a) = 0)`.
pub fn rickart_sides(ctx: &ModelContext, a: &Element, star: &Projection, q: &Projection) -> Result<(bool, bool)> {
    let lhs = ctx.order_leq(q.element(), star.element())?;
    let rhs = commutes(ctx, a, q)? && ctx.order_unit_norm(&ctx.compress(q, a)?)? <= ctx.tol(a)?;
    Ok((lhs, rhs))
}

#[derive(Debug, Clone)]
pub struct RickartCheck {
    pub star: Projection,
    pub checked: usize,
    pub mismatches: Vec<Projection>,
    /// Probes outside `C(a)` on which the right side failed.
    pub incompatible_probes: usize,
}

/// Verifies the Rickart biconditional on every projection of `P(a)` and on
/// the extra probes.
pub fn rickart_biconditional(ctx: &ModelContext, a: &Element, probes: &[Projection]) -> Result<RickartCheck> {
    let star = rickart_map(ctx, a)?;
    let query = bicommutant(ctx, a)?;
    let mut mismatches = Vec::new();
    let mut incompatible_probes = 0;
    let mut checked = 0;
    for (q, is_probe) in query
        .projections
        .iter()
        .map(|q| (q, false))
        .chain(probes.iter().map(|q| (q, true)))
    {
        let (lhs, rhs) = rickart_sides(ctx, a, &star, q)?;
        checked += 1;
        if is_probe && !commutes(ctx, a, q)? {
            incompatible_probes += 1;
        }
        if lhs != rhs {
            mismatches.push(q.clone());
        }
    }
    Ok(RickartCheck {
        star,
        checked,
        mismatches,
        incompatible_probes,
    })
}

/// Projection cover `e° = s(e)` of an effect.
pub fn projection_cover(ctx: &ModelContext, e: &Element) -> Result<Projection> {
    if !ctx.is_effect(e)? {
        return contract("projection_cover needs an effect");
    }
    support(ctx, e)
}

/// Number of `candidates` that dominate `e` without dominating `cover`
/// (violations of minimality), plus whether `e <= cover`.
pub fn cover_minimality(ctx: &ModelContext, e: &Element, cover: &Projection, candidates: &[Projection]) -> Result<(bool, usize)> {
    let covers = ctx.order_leq(e, cover.element())?;
    let mut violations = 0;
    for q in candidates {
        if ctx.order_leq(e, q.element())? && !ctx.order_leq(cover.element(), q.element())? {
            violations += 1;
        }
    }
    Ok((covers, violations))
}

/// `P(a)` and the spanning set of `CC(a)`.
#[derive(Debug, Clone)]
pub struct CommutantQuery {
    pub generator: Element,
    /// Spectral projections; the atoms of `P(a)` and a basis of `CC(a)`.
    pub span_basis: Vec<Projection>,
    /// All `2^k` sums of atoms; entry `m` is the sum over the bits of `m`.
    pub projections: Vec<Projection>,
    /// `‖a - Σ λ_i p_i‖`.
    pub span_residual: f64,
    /// Worst deviation of complements and meets (computed as `J_p(q)`) from
    /// the Boolean structure; `None` when too many atoms to check pairwise.
    pub closure_residual: Option<f64>,
}

/// Enumerates the Boolean algebra generated by the spectral projections of
/// `a` and checks that `a` lies in their span.
pub fn bicommutant(ctx: &ModelContext, a: &Element) -> Result<CommutantQuery> {
    let s = ctx.spectrum(a)?;
    let k = s.len();
    if k > MAX_CLUSTERS {
        return Err(Error::TooManyClusters {
            clusters: k,
            cap: MAX_CLUSTERS,
        });
    }
    let span_basis: Vec<Projection> = s.points.iter().map(|pt| pt.projection.clone()).collect();
    let projections = boolean_algebra(ctx, &span_basis);
    let span_residual = ctx.distance(a, &s.apply(ctx, |v| v))?;
    let closure_residual = if k <= CLOSURE_CHECK_ATOMS {
        Some(boolean_closure_residual(ctx, &projections)?)
    } else {
        None
    };
    Ok(CommutantQuery {
        generator: a.clone(),
        span_basis,
        projections,
        span_residual,
        closure_residual,
    })
}

/// All sums of subsets of `atoms`, indexed by bitmask.
pub fn boolean_algebra(ctx: &ModelContext, atoms: &[Projection]) -> Vec<Projection> {
    (0..1usize << atoms.len())
        .map(|mask| {
            let mut e = ctx.zero();
            for (i, atom) in atoms.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    e.axpy(1.0, atom.element());
                }
            }
            Projection(e)
        })
        .collect()
}

fn boolean_closure_residual(ctx: &ModelContext, algebra: &[Projection]) -> Result<f64> {
    let full = algebra.len() - 1;
    let mut worst = 0.0f64;
    for (m, p) in algebra.iter().enumerate() {
        worst = worst.max(ctx.distance(p.complement(ctx).element(), algebra[full ^ m].element())?);
        for (n, q) in algebra.iter().enumerate().skip(m) {
            let meet = ctx.compress(p, q.element())?;
            worst = worst.max(ctx.distance(&meet, algebra[m & n].element())?);
        }
    }
    Ok(worst)
}

/// `aCb`: every spectral projection of `a` is compatible with every spectral
/// projection of `b`. Compatibility with the atoms extends to the Boolean
/// algebras they generate.
pub fn extended_commute(ctx: &ModelContext, a: &Element, b: &Element) -> Result<bool> {
    let sa = ctx.spectrum(a)?;
    let sb = ctx.spectrum(b)?;
    for pa in &sa.points {
        for pb in &sb.points {
            if !commutes(ctx, pa.projection.element(), &pb.projection)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `aCb` by brute force over `P(a) x P(b)`.
pub fn extended_commute_exhaustive(ctx: &ModelContext, a: &Element, b: &Element) -> Result<bool> {
    let pa = bicommutant(ctx, a)?.projections;
    let pb = bicommutant(ctx, b)?.projections;
    for p in &pa {
        for q in &pb {
            if !commutes(ctx, p.element(), q)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `‖J_p(q) + J_{1-p}(1-q) - J_q(p) - J_{1-q}(1-p)‖`.
pub fn jb_condition_residual(ctx: &ModelContext, p: &Projection, q: &Projection) -> Result<f64> {
    let (pc, qc) = (p.complement(ctx), q.complement(ctx));
    let lhs = ctx.compress(p, q.element())? + ctx.compress(&pc, qc.element())?;
    let rhs = ctx.compress(q, p.element())? + ctx.compress(&qc, pc.element())?;
    ctx.distance(&lhs, &rhs)
}

/// `‖T_p(q) - T_q(p)‖`.
pub fn t_condition_residual(ctx: &ModelContext, p: &Projection, q: &Projection) -> Result<f64> {
    ctx.distance(&ctx.t_operator(p, q.element())?, &ctx.t_operator(q, p.element())?)
}

/// Atoms of the Boolean algebra generated by pairwise compatible
/// projections.
pub fn generated_atoms(ctx: &ModelContext, generators: &[Projection]) -> Result<Vec<Projection>> {
    let mut atoms = vec![ctx.unit_projection()];
    for g in generators {
        atoms = refine(ctx, &atoms, g)?;
    }
    Ok(atoms)
}

fn refine(ctx: &ModelContext, atoms: &[Projection], g: &Projection) -> Result<Vec<Projection>> {
    let gc = g.complement(ctx);
    let mut out = Vec::with_capacity(atoms.len() * 2);
    for atom in atoms {
        for side in [g, &gc] {
            let piece = ctx.compress(atom, side.element())?;
            if ctx.order_unit_norm(&piece)? > 0.5 {
                out.push(Projection(piece));
            }
        }
    }
    Ok(out)
}

/// Refinement of `atoms` by `cand` when `cand` is compatible with all of
/// them and splits at least one.
fn try_refine(ctx: &ModelContext, atoms: &[Projection], cand: &Projection) -> Result<Option<Vec<Projection>>> {
    for atom in atoms {
        if !commutes(ctx, cand.element(), atom)? {
            return Ok(None);
        }
    }
    let refined = refine(ctx, atoms, cand)?;
    Ok((refined.len() > atoms.len()).then_some(refined))
}

/// Dimension of `{x : x C α for every atom α}`.
fn commutant_dimension(ctx: &ModelContext, atoms: &[Projection]) -> Result<usize> {
    let len = ctx.coord_len();
    let mut m = DMatrix::zeros(len * atoms.len(), len);
    for k in 0..len {
        let mut c = vec![0.0; len];
        c[k] = 1.0;
        let e = ctx.element(c)?;
        for (i, atom) in atoms.iter().enumerate() {
            let d = &e - ctx.compress(atom, &e)? - ctx.compress(&atom.complement(ctx), &e)?;
            for (r, v) in d.coords().iter().enumerate() {
                m[(i * len + r, k)] = *v;
            }
        }
    }
    Ok(len - matrix::numerical_rank(&m)?)
}

/// Closes pairwise compatible `generators` into a Boolean algebra `B`,
/// extends it greedily with compatible projections from `pool`, completes it
/// to a block with spectral projections of seeded corner elements, and checks
/// that the commutant `C(B)` equals `span(B)` and is associative.
pub fn block_and_cblock(
    ctx: &ModelContext,
    generators: &[Projection],
    pool: &[Projection],
    rng: &mut SeededRng,
) -> Result<VerificationReport> {
    for (i, p) in generators.iter().enumerate() {
        for q in &generators[i + 1..] {
            if !commutes(ctx, p.element(), q)? {
                return Err(Error::Incompatible);
            }
        }
    }
    let mut atoms = generated_atoms(ctx, generators)?;
    let generated = atoms.len();
    let mut used = 0;
    for cand in pool {
        if let Some(refined) = try_refine(ctx, &atoms, cand)? {
            atoms = refined;
            used += 1;
        }
    }
    // Complete to a block with the spectral projections of corner elements
    // J_α(x): they commute with every atom and split α whenever it is not
    // minimal.
    let mut completions = 0;
    loop {
        let mut changed = false;
        for i in 0..atoms.len() {
            let x = crate::harness::gen::random_element(ctx, rng)?;
            let corner = ctx.compress(&atoms[i], &x)?;
            for pt in ctx.spectrum(&corner)?.points {
                if let Some(refined) = try_refine(ctx, &atoms, &pt.projection)? {
                    atoms = refined;
                    completions += 1;
                    changed = true;
                }
            }
            if changed {
                break;
            }
        }
        if !changed {
            break;
        }
    }

    let span_dim = atoms.len();
    let commutant_dim = commutant_dimension(ctx, &atoms)?;
    let mut assoc = 0.0f64;
    for _ in 0..16 {
        let mut pick = || {
            let mut x = ctx.zero();
            for atom in &atoms {
                x.axpy(rng.gaussian(), atom.element());
            }
            x
        };
        let (x, y, z) = (pick(), pick(), pick());
        let left = ctx.jordan_product(&ctx.jordan_product(&x, &y)?, &z)?;
        let right = ctx.jordan_product(&x, &ctx.jordan_product(&y, &z)?)?;
        assoc = assoc.max(ctx.distance(&left, &right)? / (1.0 + ctx.order_unit_norm(&left)?));
    }

    let mut report = VerificationReport::new("block", ctx.descriptor());
    report.config("generated_atoms", generated);
    report.config("atoms", span_dim);
    report.config("boolean_size", format!("2^{span_dim}"));
    report.config("pool_size", pool.len());
    report.config("pool_used", used);
    report.config("completions", completions);
    report.config("span_dim", span_dim);
    report.config("commutant_dim", commutant_dim);
    report.check_le("cblock-span-defect", commutant_dim.abs_diff(span_dim) as f64, 0.0);
    report.check_le("associativity", assoc, 1e-9);
    report.finalize();
    if !report.passed() {
        let elems = atoms
            .iter()
            .map(|a| ctx.format_element(a.element()))
            .collect::<Result<Vec<_>>>()?;
        report.witness("atoms", report.max_residual, elems);
    }
    Ok(report)
}

/// For `e, f <= p` with `e + f <= 1`, the violation of `e + f <= p`.
pub fn principal_focus_residual(ctx: &ModelContext, p: &Projection, e: &Element, f: &Element) -> Result<Option<f64>> {
    let sum = e + f;
    if !(ctx.order_leq(e, p.element())? && ctx.order_leq(f, p.element())? && ctx.order_leq(&sum, &ctx.unit())?) {
        return Ok(None);
    }
    Ok(Some(ctx.cone_violation(&(p.element() - &sum))?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(n: usize) -> ModelContext {
        ModelContext::matrix(n).unwrap()
    }

    fn proj(ctx: &ModelContext, d: &[f64]) -> Projection {
        ctx.certify_projection(ctx.diag(d).unwrap()).unwrap()
    }

    fn effects(ctx: &ModelContext, seed: u64, count: usize) -> Vec<Element> {
        (0..count)
            .map(|i| crate::harness::gen::random_effect(ctx, &mut SeededRng::substream(seed, i as u64)).unwrap())
            .collect()
    }

    #[test]
    fn certify_rejects_non_projections() {
        let ctx = mat(2);
        assert!(ctx.certify_projection(ctx.scalar(0.5)).is_err());
        assert!(ctx.certify_projection(ctx.scalar(-1.0)).is_err());
        assert!(ctx.certify_projection(ctx.from_row_major(&[0.5, 0.5, 0.5, 0.5]).unwrap()).is_ok());
    }

    #[test]
    fn axioms_hold_for_identity_and_diag() {
        let ctx = mat(3);
        let samples = effects(&ctx, 0, 200);
        let r = verify_compression_axioms(&ctx, &ctx.unit_projection(), &samples).unwrap();
        assert!(r.passed());
        assert_eq!(r.check("F1").unwrap().value, 0.0);
        assert!(r.max_residual <= 1e-14);
        let r = verify_compression_axioms(&ctx, &proj(&ctx, &[1.0, 1.0, 0.0]), &samples).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn axioms_hold_for_spin_atom() {
        let ctx = ModelContext::spin_lp(2.0, 3).unwrap();
        let samples = effects(&ctx, 1, 200);
        let p = spin::sharp_projection(ctx.norm_oracle().unwrap(), &[1.0, -2.0, 0.5])
            .unwrap()
            .to_projection(&ctx)
            .unwrap();
        assert!(verify_compression_axioms(&ctx, &p, &samples).unwrap().passed());
    }

    #[test]
    fn base_identity_examples() {
        let ctx = mat(3);
        let samples = effects(&ctx, 2, 20);
        let p = proj(&ctx, &[1.0, 0.0, 0.0]);
        let q = proj(&ctx, &[0.0, 1.0, 0.0]);
        let r = proj(&ctx, &[0.0, 0.0, 1.0]);
        assert!(verify_base_identity(&ctx, &p, &q, &r, &samples).unwrap() <= 1e-9);
        let zero = ctx.zero_projection();
        let pc = p.complement(&ctx);
        assert!(verify_base_identity(&ctx, &p, &pc, &zero, &samples).unwrap() <= 1e-15);
        assert!(verify_base_identity(&ctx, &zero, &zero, &r, &samples).unwrap() <= 1e-15);
        assert!(verify_base_identity(&ctx, &p, &p, &r, &samples).is_err());
    }

    #[test]
    fn commutes_examples() {
        let ctx = mat(2);
        let p = proj(&ctx, &[1.0, 0.0]);
        assert!(commutes(&ctx, &ctx.diag(&[1.0, 2.0]).unwrap(), &p).unwrap());
        let s = ctx.from_row_major(&[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(!commutes(&ctx, &s, &p).unwrap());
        assert!(commutes(&ctx, &s, &ctx.unit_projection()).unwrap());

        let spin = ModelContext::spin_lp(2.0, 2).unwrap();
        let atom = SpinProjection::Atom(vec![1.0, 0.0]).to_projection(&spin).unwrap();
        let a = spin.spin_element(0.0, &[0.0, 1.0]).unwrap();
        // J_p(a) = J_{1-p}(a) = 0, so a ≠ J_p(a) + J_{1-p}(a)
        assert!(!commutes(&spin, &a, &atom).unwrap());
        let b = spin.spin_element(0.5, &[0.3, 0.0]).unwrap();
        assert!(commutes(&spin, &b, &atom).unwrap());
        assert!(commuting_meet_residual(&spin, &b, &atom).unwrap() <= 1e-12);
    }

    #[test]
    fn mackey_examples() {
        let ctx = mat(2);
        let e = ctx.diag(&[0.2, 0.1]).unwrap();
        let f = ctx.diag(&[0.5, 0.5]).unwrap();
        assert_eq!(mackey_compatible(&ctx, &e, &f).unwrap(), Compatibility::Compatible(Certificate::Ordered));
        let g = ctx.diag(&[0.7, 0.1]).unwrap();
        let h = ctx.diag(&[0.2, 0.6]).unwrap();
        assert_eq!(
            mackey_compatible(&ctx, &g, &h).unwrap(),
            Compatibility::Compatible(Certificate::OperatorCommutation)
        );
        let p = ctx.diag(&[1.0, 0.0]).unwrap();
        let q = ctx.from_row_major(&[0.5, 0.5, 0.5, 0.5]).unwrap();
        assert_eq!(
            mackey_compatible(&ctx, &p, &q).unwrap(),
            Compatibility::Incompatible(Certificate::ProjectionCommutation)
        );
        let r = ctx.from_row_major(&[0.5, 0.2, 0.2, 0.3]).unwrap();
        assert_eq!(mackey_compatible(&ctx, &g, &r).unwrap(), Compatibility::Unknown);
    }

    #[test]
    fn decomposition_examples() {
        let ctx = mat(2);
        let a = ctx.diag(&[2.0, -3.0]).unwrap();
        let d = orthogonal_decomposition(&ctx, &a).unwrap();
        assert_eq!(d.a_plus, ctx.diag(&[2.0, 0.0]).unwrap());
        assert_eq!(d.a_minus, ctx.diag(&[0.0, 3.0]).unwrap());
        assert_eq!(d.p.element(), &ctx.diag(&[1.0, 0.0]).unwrap());
        assert!(d.residual(&ctx, &a).unwrap() <= 1e-12);

        let pos = ctx.diag(&[2.0, 0.0]).unwrap();
        let d = orthogonal_decomposition(&ctx, &pos).unwrap();
        assert_eq!(d.a_plus, pos);
        assert_eq!(d.p.element(), support(&ctx, &pos).unwrap().element());

        let spin = ModelContext::spin_lp(2.0, 2).unwrap();
        let a = spin.spin_element(0.0, &[1.0, 0.0]).unwrap();
        let d = orthogonal_decomposition(&spin, &a).unwrap();
        assert_eq!(d.p.element(), &SpinProjection::Atom(vec![1.0, 0.0]).to_element(&spin).unwrap());
        assert_eq!(d.a_plus, spin.spin_element(0.5, &[0.5, 0.0]).unwrap());
        assert_eq!(d.a_minus, spin.spin_element(0.5, &[-0.5, 0.0]).unwrap());
        let l = least_projection_decomposition(&spin, &a).unwrap();
        assert!(spin.distance(&l.a_plus, &d.a_plus).unwrap() <= 1e-12);
    }

    #[test]
    fn rickart_examples() {
        let ctx = mat(2);
        assert_eq!(rickart_map(&ctx, &ctx.zero()).unwrap().element(), &ctx.unit());
        assert_eq!(rickart_map(&ctx, &ctx.unit()).unwrap().element(), &ctx.zero());
        let a = ctx.from_row_major(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let check = rickart_biconditional(&ctx, &a, &[proj(&ctx, &[1.0, 0.0])]).unwrap();
        assert!(check.mismatches.is_empty());
        assert_eq!(check.incompatible_probes, 1);
    }

    #[test]
    fn cover_examples() {
        let ctx = mat(2);
        let p = ctx.diag(&[1.0, 0.0]).unwrap();
        assert_eq!(projection_cover(&ctx, &p).unwrap().element(), &p);
        assert_eq!(projection_cover(&ctx, &ctx.scalar(0.5)).unwrap().element(), &ctx.unit());
        let e = ctx.diag(&[0.5, 0.0]).unwrap();
        let cover = projection_cover(&ctx, &e).unwrap();
        assert_eq!(cover.element(), &p);
        let cands = bicommutant(&ctx, &e).unwrap().projections;
        assert_eq!(cover_minimality(&ctx, &e, &cover, &cands).unwrap(), (true, 0));
        assert!(projection_cover(&ctx, &ctx.scalar(2.0)).is_err());
    }

    #[test]
    fn bicommutant_examples() {
        let ctx = mat(3);
        let q = bicommutant(&ctx, &ctx.unit()).unwrap();
        assert_eq!(q.projections.len(), 2);
        let q = bicommutant(&ctx, &ctx.diag(&[1.0, 1.0, 2.0]).unwrap()).unwrap();
        assert_eq!(q.projections.len(), 4);
        assert!(q.span_residual <= 1e-12);
        assert!(q.closure_residual.unwrap() <= 1e-12);

        let spin = ModelContext::spin_lp(3.0, 2).unwrap();
        let q = bicommutant(&spin, &spin.spin_element(0.2, &[0.4, -0.1]).unwrap()).unwrap();
        assert_eq!(q.projections.len(), 4);
        assert!(q.closure_residual.unwrap() <= 1e-12);
    }

    #[test]
    fn extended_commute_examples() {
        let ctx = mat(2);
        let a = ctx.from_row_major(&[1.0, 2.0, 2.0, -1.0]).unwrap();
        let poly = &matrix::jordan_product(&ctx, &a, &a).unwrap() * 2.0 + &a * 3.0 + ctx.unit();
        assert!(extended_commute(&ctx, &a, &poly).unwrap());
        assert!(extended_commute_exhaustive(&ctx, &a, &poly).unwrap());
        let d = ctx.diag(&[1.0, 2.0]).unwrap();
        let s = ctx.from_row_major(&[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(!extended_commute(&ctx, &d, &s).unwrap());
        assert!(extended_commute(&ctx, &s, &ctx.unit()).unwrap());
    }

    #[test]
    fn jb_condition_in_matrix_model() {
        let ctx = mat(2);
        let p = proj(&ctx, &[1.0, 0.0]);
        let q = ctx.certify_projection(ctx.from_row_major(&[0.5, 0.5, 0.5, 0.5]).unwrap()).unwrap();
        assert!(jb_condition_residual(&ctx, &p, &q).unwrap() <= 1e-12);
        assert!(t_condition_residual(&ctx, &p, &q).unwrap() <= 1e-12);
    }

    #[test]
    fn block_examples() {
        let ctx = mat(3);
        let mut rng = SeededRng::new(0);
        let gens = [proj(&ctx, &[1.0, 0.0, 0.0]), proj(&ctx, &[0.0, 1.0, 0.0])];
        let r = block_and_cblock(&ctx, &gens, &[], &mut rng).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert_eq!(r.config.iter().find(|(k, _)| k == "boolean_size").unwrap().1, "2^3");
        assert_eq!(r.config.iter().find(|(k, _)| k == "span_dim").unwrap().1, "3");

        let trivial = [ctx.zero_projection(), ctx.unit_projection()];
        let pool = crate::harness::gen::spectral_pool(&ctx, 0, 2).unwrap();
        let r = block_and_cblock(&ctx, &trivial, &pool, &mut rng).unwrap();
        assert!(r.passed(), "{}", r.to_text());

        let spin = ModelContext::spin_lp(2.0, 3).unwrap();
        let p = SpinProjection::Atom(vec![0.0, 1.0, 0.0]).to_projection(&spin).unwrap();
        let r = block_and_cblock(&spin, &[p], &[], &mut rng).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert_eq!(r.config.iter().find(|(k, _)| k == "commutant_dim").unwrap().1, "2");

        let bad = [proj(&ctx, &[1.0, 0.0, 0.0]), ctx.certify_projection(
            ctx.from_row_major(&[0.5, 0.5, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0]).unwrap()).unwrap()];
        assert!(matches!(block_and_cblock(&ctx, &bad, &[], &mut rng), Err(Error::Incompatible)));
    }
}
