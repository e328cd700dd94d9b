//! Spectral resolutions, Riemann–Stieltjes sums and functional calculus.
//!
//! Spectra are finite, so continuous and bounded Borel functions both act by
//! evaluation on the spectral points: `g(a) = Σ g(λ_i) atom_i`.

use std::fmt;
use std::sync::Arc;

use crate::compression::{orthogonal_decomposition, rickart_map, Projection};
use crate::error::{contract, Error, Result};
use crate::ous::{Element, ModelContext};

/// Step function `λ ↦ p_{a,λ}`.
#[derive(Debug, Clone)]
pub struct SpectralResolution {
    /// Ascending, pairwise separated by more than `tau`.
    pub jumps: Vec<f64>,
    /// Increment of the resolution at each jump.
    pub atoms: Vec<Projection>,
    /// `cumulative[i] = Σ_{j<=i} atoms[j]`.
    pub cumulative: Vec<Projection>,
    pub tau: f64,
}

impl SpectralResolution {
    /// `p_{a,λ}`: the sum of the atoms with jump `<= λ` (right-continuous).
    pub fn at(&self, ctx: &ModelContext, lambda: f64) -> Projection {
        match self.jumps.iter().rposition(|&j| j <= lambda + self.tau) {
            Some(i) => self.cumulative[i].clone(),
            None => ctx.zero_projection(),
        }
    }

    pub fn lower(&self) -> f64 {
        self.jumps[0]
    }

    pub fn upper(&self) -> f64 {
        self.jumps[self.jumps.len() - 1]
    }

    /// `Σ g(λ_i) atom_i`.
    pub fn apply<F>(&self, ctx: &ModelContext, mut g: F) -> Element
    where
        F: FnMut(f64) -> f64,
    {
        let mut out = ctx.zero();
        for (l, atom) in self.jumps.iter().zip(&self.atoms) {
            out.axpy(g(*l), atom.element());
        }
        out
    }
}

pub fn spectral_resolution(ctx: &ModelContext, a: &Element) -> Result<SpectralResolution> {
    let s = ctx.spectrum(a)?;
    let mut jumps = Vec::with_capacity(s.len());
    let mut atoms = Vec::with_capacity(s.len());
    let mut cumulative = Vec::with_capacity(s.len());
    let mut acc = ctx.zero();
    for pt in s.points {
        acc.axpy(1.0, pt.projection.element());
        // a cluster within tau of zero is the kernel
        jumps.push(if pt.value.abs() <= s.tau { 0.0 } else { pt.value });
        atoms.push(pt.projection);
        cumulative.push(Projection::new_unchecked(acc.clone()));
    }
    Ok(SpectralResolution {
        jumps,
        atoms,
        cumulative,
        tau: s.tau,
    })
}

/// `‖p_{a,λ} - ((a - λ)⁺)*‖`: the resolution against its definition.
pub fn resolution_definition_residual(ctx: &ModelContext, res: &SpectralResolution, a: &Element, lambda: f64) -> Result<f64> {
    let shifted = a - &ctx.scalar(lambda);
    let plus = orthogonal_decomposition(ctx, &shifted)?.a_plus;
    let star = rickart_map(ctx, &plus)?;
    ctx.distance(res.at(ctx, lambda).element(), star.element())
}

/// `(L_a, U_a)`, the extreme spectral points.
pub fn spectral_bounds(ctx: &ModelContext, a: &Element) -> Result<(f64, f64)> {
    let res = spectral_resolution(ctx, a)?;
    Ok((res.lower(), res.upper()))
}

/// `(L_a, U_a)` from the order alone: bisection for `sup{λ : λ <= a}` and
/// `inf{λ : a <= λ}`.
pub fn spectral_bounds_by_bisection(ctx: &ModelContext, a: &Element) -> Result<(f64, f64)> {
    let r = ctx.order_unit_norm(a)? + 1.0;
    let unit = ctx.unit();
    let (mut lo, mut hi) = (-r, r);
    for _ in 0..crate::ous::BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if ctx.order_leq(&unit.scaled(mid), a)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lower = lo;
    let (mut lo, mut hi) = (-r, r);
    for _ in 0..crate::ous::BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if ctx.order_leq(a, &unit.scaled(mid))? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lower, hi))
}

/// Riemann–Stieltjes sum `Σ λ_i (p_{a,λ_i} - p_{a,λ_{i-1}})` on the grid
/// `U_a - k·mesh`, `k = 0..K`, where `K` is the first index reaching
/// `L_a - mesh`. Returns the sum and `‖a - sum‖`.
///
/// The grid is anchored at `U_a`, so halving the mesh refines it and the
/// error cannot grow.
pub fn rs_integral_approx(ctx: &ModelContext, a: &Element, mesh: f64) -> Result<(Element, f64)> {
    if !(mesh > 0.0 && mesh.is_finite()) {
        return contract("mesh must be positive");
    }
    let res = spectral_resolution(ctx, a)?;
    let (lower, upper) = (res.lower(), res.upper());
    let steps = ((upper - lower) / mesh).ceil() as usize + 1;
    let grid: Vec<f64> = (0..=steps).rev().map(|k| upper - k as f64 * mesh).collect();
    let mut sum = ctx.zero();
    let mut prev = res.at(ctx, grid[0]);
    for &lambda in &grid[1..] {
        let cur = res.at(ctx, lambda);
        let inc = cur.element() - prev.element();
        sum.axpy(lambda, &inc);
        prev = cur;
    }
    let err = ctx.distance(a, &sum)?;
    Ok((sum, err))
}

/// A real function acting on finite spectra.
#[derive(Clone)]
pub enum RealFunction {
    Identity,
    Const(f64),
    /// Coefficients `c0 + c1 t + ... + ck t^k`.
    Poly(Vec<f64>),
    Square,
    Pos,
    Abs,
    /// `χ_{(u,v]}`.
    Chi(f64, f64),
    /// `t^{1/n}` on `t >= 0`.
    Root(u32),
    Custom {
        name: String,
        continuous: bool,
        eval: Arc<dyn Fn(f64) -> Option<f64> + Send + Sync>,
    },
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealFunction({self})")
    }
}

impl fmt::Display for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealFunction::Identity => write!(f, "id"),
            RealFunction::Const(c) => write!(f, "const {c:?}"),
            RealFunction::Poly(cs) => {
                write!(f, "poly")?;
                for c in cs {
                    write!(f, " {c:?}")?;
                }
                Ok(())
            }
            RealFunction::Square => write!(f, "square"),
            RealFunction::Pos => write!(f, "pos"),
            RealFunction::Abs => write!(f, "abs"),
            RealFunction::Chi(u, v) => write!(f, "chi {u:?} {v:?}"),
            RealFunction::Root(n) => write!(f, "root {n}"),
            RealFunction::Custom { name, .. } => write!(f, "{name}"),
        }
    }
}

/// Values slightly below zero still count as nonnegative for `root`.
const ROOT_SLACK: f64 = 1e-9;

impl RealFunction {
    /// Parses `poly c0 .. ck`, `pos`, `abs`, `chi u v`, `root n`, as well as
    /// `id`, `square` and `const c`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut parts = spec.split_whitespace();
        let head = parts.next().ok_or_else(|| Error::Parse("empty function spec".into()))?;
        let args: Vec<&str> = parts.collect();
        let nums = || -> Result<Vec<f64>> {
            args.iter()
                .map(|s| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{s}`"))))
                .collect()
        };
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!("`{head}` takes {n} argument(s)")))
            }
        };
        let f = match head {
            "id" => {
                arity(0)?;
                RealFunction::Identity
            }
            "square" => {
                arity(0)?;
                RealFunction::Square
            }
            "pos" => {
                arity(0)?;
                RealFunction::Pos
            }
            "abs" => {
                arity(0)?;
                RealFunction::Abs
            }
            "const" => {
                arity(1)?;
                RealFunction::Const(nums()?[0])
            }
            "poly" => {
                let cs = nums()?;
                if cs.is_empty() {
                    return Err(Error::Parse("`poly` needs at least one coefficient".into()));
                }
                RealFunction::Poly(cs)
            }
            "chi" => {
                arity(2)?;
                let v = nums()?;
                if v[0] > v[1] {
                    return Err(Error::Parse("`chi u v` needs u <= v".into()));
                }
                RealFunction::Chi(v[0], v[1])
            }
            "root" => {
                arity(1)?;
                let n: u32 = args[0]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad root order `{}`", args[0])))?;
                if n == 0 {
                    return Err(Error::Parse("root order must be positive".into()));
                }
                RealFunction::Root(n)
            }
            other => return Err(Error::Parse(format!("unknown function `{other}`"))),
        };
        if !coefficients(&f).iter().all(|c| c.is_finite()) {
            return Err(Error::Parse("non-finite coefficient".into()));
        }
        Ok(f)
    }

    pub fn is_continuous(&self) -> bool {
        match self {
            RealFunction::Chi(..) => false,
            RealFunction::Custom { continuous, .. } => *continuous,
            _ => true,
        }
    }

    /// `None` outside the domain.
    pub fn eval(&self, t: f64) -> Option<f64> {
        match self {
            RealFunction::Identity => Some(t),
            RealFunction::Const(c) => Some(*c),
            RealFunction::Poly(cs) => Some(cs.iter().rev().fold(0.0, |acc, c| acc * t + c)),
            RealFunction::Square => Some(t * t),
            RealFunction::Pos => Some(t.max(0.0)),
            RealFunction::Abs => Some(t.abs()),
            RealFunction::Chi(u, v) => Some(if *u < t && t <= *v { 1.0 } else { 0.0 }),
            RealFunction::Root(n) => {
                if t < -ROOT_SLACK {
                    None
                } else {
                    Some(t.max(0.0).powf(1.0 / *n as f64))
                }
            }
            RealFunction::Custom { eval, .. } => eval(t),
        }
    }

    /// `g^{-1}((-∞, λ])` as a union of intervals, for the kinds with a
    /// declared rule.
    pub fn preimage_le(&self, lambda: f64) -> Result<Vec<Interval>> {
        let all = || vec![Interval::all()];
        Ok(match self {
            RealFunction::Identity => vec![Interval::up_to(lambda)],
            RealFunction::Const(c) => {
                if *c <= lambda {
                    all()
                } else {
                    vec![]
                }
            }
            RealFunction::Poly(cs) if cs.len() <= 2 => {
                let c0 = cs[0];
                let c1 = cs.get(1).copied().unwrap_or(0.0);
                if c1 > 0.0 {
                    vec![Interval::up_to((lambda - c0) / c1)]
                } else if c1 < 0.0 {
                    vec![Interval::closed((lambda - c0) / c1, f64::INFINITY)]
                } else if c0 <= lambda {
                    all()
                } else {
                    vec![]
                }
            }
            RealFunction::Square | RealFunction::Abs => {
                if lambda < 0.0 {
                    vec![]
                } else {
                    let r = if matches!(self, RealFunction::Square) { lambda.sqrt() } else { lambda };
                    vec![Interval::closed(-r, r)]
                }
            }
            RealFunction::Pos => {
                if lambda < 0.0 {
                    vec![]
                } else {
                    vec![Interval::up_to(lambda)]
                }
            }
            RealFunction::Chi(u, v) => {
                if lambda < 0.0 {
                    vec![]
                } else if lambda < 1.0 {
                    vec![Interval::up_to(*u), Interval::half_open(*v, f64::INFINITY)]
                } else {
                    all()
                }
            }
            RealFunction::Root(n) => {
                if lambda < 0.0 {
                    vec![]
                } else {
                    vec![Interval::closed(0.0, lambda.powi(*n as i32))]
                }
            }
            _ => return Err(Error::PreimageUndeclared(self.to_string())),
        })
    }
}

fn coefficients(f: &RealFunction) -> Vec<f64> {
    match f {
        RealFunction::Poly(cs) => cs.clone(),
        RealFunction::Chi(u, v) => vec![*u, *v],
        RealFunction::Const(c) => vec![*c],
        _ => vec![],
    }
}

/// Interval with a closed upper end (`+∞` allowed) and a lower end that is
/// open `(lo, hi]` or closed `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
}

impl Interval {
    /// `(lo, hi]`.
    pub fn half_open(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_closed: false }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_closed: true }
    }

    /// `(-∞, hi]`.
    pub fn up_to(hi: f64) -> Self {
        Interval::half_open(f64::NEG_INFINITY, hi)
    }

    pub fn all() -> Self {
        Interval::half_open(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Membership with closed ends widened and open ends narrowed by `tol`.
    pub fn contains(&self, t: f64, tol: f64) -> bool {
        let above = if self.lo_closed { t >= self.lo - tol } else { t > self.lo + tol };
        above && t <= self.hi + tol
    }
}

fn evaluate(ctx: &ModelContext, a: &Element, g: &RealFunction) -> Result<Element> {
    let res = spectral_resolution(ctx, a)?;
    let mut out = ctx.zero();
    for (l, atom) in res.jumps.iter().zip(&res.atoms) {
        let v = g.eval(*l).ok_or_else(|| Error::FunctionDomain {
            name: g.to_string(),
            at: *l,
        })?;
        out.axpy(v, atom.element());
    }
    Ok(out)
}

/// `g(a)` for continuous `g`.
pub fn continuous_fc(ctx: &ModelContext, a: &Element, g: &RealFunction) -> Result<Element> {
    if !g.is_continuous() {
        return contract(format!("`{g}` is not continuous; use the Borel calculus"));
    }
    evaluate(ctx, a, g)
}

/// `g(a)` for bounded Borel `g`.
pub fn borel_fc(ctx: &ModelContext, a: &Element, g: &RealFunction) -> Result<Element> {
    evaluate(ctx, a, g)
}

/// `ξ_a(B)`: sum of the atoms whose jump lies in the union `B`.
pub fn spectral_measure(ctx: &ModelContext, a: &Element, set: &[Interval]) -> Result<Projection> {
    let res = spectral_resolution(ctx, a)?;
    Ok(measure_of(ctx, &res, set))
}

fn measure_of(ctx: &ModelContext, res: &SpectralResolution, set: &[Interval]) -> Projection {
    let mut out = ctx.zero();
    for (l, atom) in res.jumps.iter().zip(&res.atoms) {
        if set.iter().any(|b| b.contains(*l, res.tau)) {
            out.axpy(1.0, atom.element());
        }
    }
    Projection::new_unchecked(out)
}

/// `‖p_{g(a),λ} - ξ_a(g^{-1}((-∞, λ]))‖`.
pub fn pushforward_check(ctx: &ModelContext, a: &Element, g: &RealFunction, lambda: f64) -> Result<f64> {
    let pre = g.preimage_le(lambda)?;
    let ga = borel_fc(ctx, a, g)?;
    let lhs = spectral_resolution(ctx, &ga)?.at(ctx, lambda);
    let rhs = spectral_measure(ctx, a, &pre)?;
    ctx.distance(lhs.element(), rhs.element())
}

/// Root sequence `e^{1/n}` against the support `s(e)`.
#[derive(Debug, Clone)]
pub struct SupportLimit {
    pub orders: Vec<u32>,
    /// `‖e^{1/n} - s(e)‖`.
    pub errors: Vec<f64>,
    /// `1 - λ_min^{1/n}` with `λ_min` the smallest nonzero spectral point.
    pub bounds: Vec<f64>,
    /// Largest order violation of `e^{1/n} <= e^{1/m}` for consecutive orders.
    pub monotonicity: f64,
}

impl SupportLimit {
    pub fn bound_violation(&self) -> f64 {
        self.errors
            .iter()
            .zip(&self.bounds)
            .fold(0.0, |m: f64, (e, b)| m.max(e - b))
    }
}

pub fn support_limit(ctx: &ModelContext, e: &Element, orders: &[u32]) -> Result<SupportLimit> {
    if !ctx.is_effect(e)? {
        return contract("support_limit needs an effect");
    }
    let res = spectral_resolution(ctx, e)?;
    let lambda_min = res
        .jumps
        .iter()
        .copied()
        .filter(|l| l.abs() > res.tau)
        .fold(f64::INFINITY, f64::min);
    let s = crate::compression::support(ctx, e)?;
    let mut errors = Vec::with_capacity(orders.len());
    let mut bounds = Vec::with_capacity(orders.len());
    let mut monotonicity = 0.0f64;
    let mut prev: Option<Element> = None;
    for &n in orders {
        let root = borel_fc(ctx, e, &RealFunction::Root(n))?;
        errors.push(ctx.distance(&root, s.element())?);
        bounds.push(if lambda_min.is_finite() { 1.0 - lambda_min.powf(1.0 / n as f64) } else { 0.0 });
        if let Some(p) = &prev {
            monotonicity = monotonicity.max(ctx.cone_violation(&(&root - p))?);
        }
        prev = Some(root);
    }
    Ok(SupportLimit {
        orders: orders.to_vec(),
        errors,
        bounds,
        monotonicity,
    })
}
