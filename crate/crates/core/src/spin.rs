//! Generalized spin factors `A = R x X*` over a finite-dimensional normed
//! space `X`.
//!
//! The positive cone is `{(alpha, y) : ‖y‖* <= alpha}` and the order unit is
//! `(1, 0)`. Sharp elements are `0`, `1` and the atoms `p = ½(1, y)` with
//! `‖y‖* = 1`; the compression with focus an atom is
//! `U_p(alpha, w) = (alpha + <w, x_y>) p`, where `x_y` is the norming point of
//! `y` on the unit sphere of `X`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::compression::{self, Projection};
use crate::error::{contract, Error, Result};
use crate::ous::{Element, ModelContext, SpectralPoint, Spectrum, CLUSTER_GAP};
use crate::rng::SeededRng;

/// Required accuracy of `‖x_y‖ = 1` and `<y, x_y> = 1`.
pub const DUALITY_TOL: f64 = 1e-8;
/// Step size at which the norming-point ascent stops.
pub const ASCENT_STEP_TOL: f64 = 1e-10;
const ASCENT_MAX_ITERS: usize = 20_000;
/// Norming points farther apart than this count as distinct; ascent alone is
/// accurate to roughly 1e-4.
pub const UNIQUENESS_TOL: f64 = 1e-3;
/// Tolerance used to recognise `0`, `1` and atoms among spin elements.
const SHARP_TOL: f64 = 1e-8;

/// A norm on `X` supplied from outside the crate.
///
/// All callbacks must be total, stateless functions of their argument.
pub trait NormPlugin: Send + Sync {
    fn name(&self) -> String;
    /// Norm on `X`.
    fn primal_norm(&self, x: &[f64]) -> f64;
    /// Dual norm on `X*`.
    fn dual_norm(&self, y: &[f64]) -> f64;
    /// Norming point of a unit dual vector; `None` lets the crate find it by
    /// ascent.
    fn duality_map(&self, _y: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

#[derive(Clone)]
pub enum NormKind {
    /// `l_p` on `X`, so `X*` carries `l_q`, `1/p + 1/q = 1`.
    Lp { p: f64, q: f64 },
    Custom(Arc<dyn NormPlugin>),
}

impl fmt::Debug for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Lp { p, q } => write!(f, "Lp {{ p: {p}, q: {q} }}"),
            NormKind::Custom(plugin) => write!(f, "Custom({})", plugin.name()),
        }
    }
}

/// A norm on `X` together with its dual norm and duality map.
#[derive(Debug, Clone)]
pub struct NormOracle {
    dim: usize,
    kind: NormKind,
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl NormOracle {
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return contract(format!("l_p exponent must satisfy 1 < p < inf, got {p}"));
        }
        if dim == 0 {
            return contract("norm dimension must be >= 1");
        }
        Ok(NormOracle {
            dim,
            kind: NormKind::Lp { p, q: p / (p - 1.0) },
        })
    }

    pub fn custom(dim: usize, plugin: Arc<dyn NormPlugin>) -> Result<Self> {
        if dim == 0 {
            return contract("norm dimension must be >= 1");
        }
        Ok(NormOracle {
            dim,
            kind: NormKind::Custom(plugin),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    /// The primal exponent `p` for `l_p` norms.
    pub fn exponent(&self) -> Option<f64> {
        match self.kind {
            NormKind::Lp { p, .. } => Some(p),
            NormKind::Custom(_) => None,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        self.exponent() == Some(2.0)
    }

    pub fn label(&self) -> String {
        match &self.kind {
            NormKind::Lp { p, .. } => format!("{p}"),
            NormKind::Custom(plugin) => plugin.name(),
        }
    }

    pub fn primal_norm(&self, x: &[f64]) -> f64 {
        match &self.kind {
            NormKind::Lp { p, .. } => lp_norm(x, *p),
            NormKind::Custom(plugin) => plugin.primal_norm(x),
        }
    }

    pub fn dual_norm(&self, y: &[f64]) -> f64 {
        match &self.kind {
            NormKind::Lp { q, .. } => lp_norm(y, *q),
            NormKind::Custom(plugin) => plugin.dual_norm(y),
        }
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(())
    }
}

/// Norming point `x_y`: `‖x_y‖ = 1` and `<y, x_y> = 1` for a unit dual
/// vector `y`.
///
/// `l_p` norms use the closed form `(x_y)_i = sign(y_i) |y_i|^(q-1)`; custom
/// norms use the plugin's map when present and otherwise maximise
/// `<y, x> / ‖x‖` by gradient ascent started at `y / ‖y‖`. The result is
/// validated either way.
pub fn duality_map(norm: &NormOracle, y: &[f64]) -> Result<Vec<f64>> {
    norm.check_dim(y)?;
    let ny = norm.dual_norm(y);
    if (ny - 1.0).abs() > DUALITY_TOL {
        return contract(format!("duality_map needs a unit dual vector, got norm {ny}"));
    }
    let x = match &norm.kind {
        NormKind::Lp { q, .. } => {
            let y: Vec<f64> = y.iter().map(|v| v / ny).collect();
            y.iter().map(|v| v.signum() * v.abs().powf(q - 1.0)).collect()
        }
        NormKind::Custom(plugin) => match plugin.duality_map(y) {
            Some(x) => x,
            None => norming_ascent(norm, y, y),
        },
    };
    norm.check_dim(&x)?;
    let residual = (norm.primal_norm(&x) - 1.0)
        .abs()
        .max((dot(y, &x) - ny).abs());
    if residual.is_nan() || residual > DUALITY_TOL {
        return Err(Error::DualityMap {
            residual,
            witness: y.to_vec(),
        });
    }
    Ok(x)
}

fn norming_ascent(norm: &NormOracle, y: &[f64], start: &[f64]) -> Vec<f64> {
    let normalize = |x: &[f64]| -> Vec<f64> {
        let n = norm.primal_norm(x);
        x.iter().map(|v| v / n).collect()
    };
    let objective = |x: &[f64]| dot(y, x) / norm.primal_norm(x);
    let mut x = normalize(start);
    let mut f = objective(&x);
    let mut step = 1.0;
    for _ in 0..ASCENT_MAX_ITERS {
        // gradient of <y,x>/‖x‖ on the unit sphere, with a central-difference
        // gradient of the norm
        let h = 1e-6;
        let grad: Vec<f64> = (0..x.len())
            .map(|i| {
                let mut up = x.clone();
                let mut dn = x.clone();
                up[i] += h;
                dn[i] -= h;
                let dnorm = (norm.primal_norm(&up) - norm.primal_norm(&dn)) / (2.0 * h);
                y[i] - f * dnorm
            })
            .collect();
        let mut moved = false;
        while step > 1e-16 {
            let cand: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a + step * g).collect();
            let cand = normalize(&cand);
            let fc = objective(&cand);
            if fc > f {
                let delta = cand
                    .iter()
                    .zip(&x)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                x = cand;
                f = fc;
                step *= 2.0;
                moved = delta >= ASCENT_STEP_TOL;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    x
}

/// Largest distance between `duality_map(y)` and the norming points reached
/// by projected ascent from `starts`. Ascent results that are not norming
/// points are ignored. A spread above [`UNIQUENESS_TOL`] means the norming
/// point of `y` is not unique; the sharp elements stay `{0, 1, atoms}` all
/// the same.
pub fn norming_point_spread(norm: &NormOracle, y: &[f64], starts: &[Vec<f64>]) -> Result<f64> {
    let x = duality_map(norm, y)?;
    let mut spread = 0.0f64;
    for s in starts {
        norm.check_dim(s)?;
        if norm.primal_norm(s) == 0.0 {
            continue;
        }
        let z = norming_ascent(norm, y, s);
        let valid = (norm.primal_norm(&z) - 1.0).abs() <= DUALITY_TOL && (dot(y, &z) - 1.0).abs() <= DUALITY_TOL;
        if valid {
            spread = spread.max(x.iter().zip(&z).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())));
        }
    }
    Ok(spread)
}

/// Sharp elements of a spin factor.
#[derive(Debug, Clone, PartialEq)]
pub enum SpinProjection {
    Zero,
    One,
    /// `½(1, y)` for a unit dual vector `y`.
    Atom(Vec<f64>),
}

impl SpinProjection {
    pub fn to_element(&self, ctx: &ModelContext) -> Result<Element> {
        match self {
            SpinProjection::Zero => Ok(ctx.zero()),
            SpinProjection::One => Ok(ctx.unit()),
            SpinProjection::Atom(y) => {
                let half: Vec<f64> = y.iter().map(|v| 0.5 * v).collect();
                ctx.spin_element(0.5, &half)
            }
        }
    }

    pub fn to_projection(&self, ctx: &ModelContext) -> Result<Projection> {
        Ok(Projection::new_unchecked(self.to_element(ctx)?))
    }

    /// `1 - p`; for an atom `½(1, y)` this is `½(1, -y)`.
    pub fn complement(&self) -> SpinProjection {
        match self {
            SpinProjection::Zero => SpinProjection::One,
            SpinProjection::One => SpinProjection::Zero,
            SpinProjection::Atom(y) => SpinProjection::Atom(y.iter().map(|v| -v).collect()),
        }
    }

    /// Recognises a sharp element of the spin model.
    pub fn classify(ctx: &ModelContext, e: &Element) -> Result<SpinProjection> {
        let norm = ctx.require_spin()?;
        ctx.check(e)?;
        let alpha = e.coords()[0];
        let y = &e.coords()[1..];
        let r = norm.dual_norm(y);
        if r <= SHARP_TOL {
            if alpha.abs() <= SHARP_TOL {
                return Ok(SpinProjection::Zero);
            }
            if (alpha - 1.0).abs() <= SHARP_TOL {
                return Ok(SpinProjection::One);
            }
        } else if (alpha - 0.5).abs() <= SHARP_TOL && (r - 0.5).abs() <= SHARP_TOL {
            return Ok(SpinProjection::Atom(y.iter().map(|v| v / r).collect()));
        }
        let residual = (alpha - 0.5).abs().max((r - 0.5).abs());
        Err(Error::NotProjection { residual })
    }
}

/// `½(1, y / ‖y‖*)`.
pub fn sharp_projection(norm: &NormOracle, y: &[f64]) -> Result<SpinProjection> {
    norm.check_dim(y)?;
    let r = norm.dual_norm(y);
    if r == 0.0 {
        return contract("sharp_projection needs a nonzero dual vector");
    }
    Ok(SpinProjection::Atom(y.iter().map(|v| v / r).collect()))
}

/// `U_p(alpha, w) = (alpha + <w, x_y>) ½(1, y)` for an atom, `0` for the zero
/// projection and the identity for `1`.
pub fn compression_apply(ctx: &ModelContext, p: &SpinProjection, a: &Element) -> Result<Element> {
    let norm = ctx.require_spin()?;
    ctx.check(a)?;
    match p {
        SpinProjection::Zero => Ok(ctx.zero()),
        SpinProjection::One => Ok(a.clone()),
        SpinProjection::Atom(y) => {
            let x = duality_map(norm, y)?;
            let c = a.coords()[0] + dot(&a.coords()[1..], &x);
            Ok(p.to_element(ctx)?.scaled(c))
        }
    }
}

/// Spectral decomposition `(alpha, w) = (alpha + r) p + (alpha - r)(1 - p)`
/// with `r = ‖w‖*` and `p = ½(1, w/r)`; a single point when `r` is below the
/// cluster threshold.
pub fn spectrum(ctx: &ModelContext, a: &Element) -> Result<Spectrum> {
    let norm = ctx.require_spin()?;
    ctx.check(a)?;
    let alpha = a.coords()[0];
    let w = &a.coords()[1..];
    let r = norm.dual_norm(w);
    let tau = CLUSTER_GAP * (1.0 + alpha.abs() + r);
    if 2.0 * r <= tau {
        return Ok(Spectrum {
            points: vec![SpectralPoint {
                value: alpha,
                projection: Projection::new_unchecked(ctx.unit()),
            }],
            tau,
        });
    }
    let p = SpinProjection::Atom(w.iter().map(|v| v / r).collect());
    Ok(Spectrum {
        points: vec![
            SpectralPoint {
                value: alpha - r,
                projection: p.complement().to_projection(ctx)?,
            },
            SpectralPoint {
                value: alpha + r,
                projection: p.to_projection(ctx)?,
            },
        ],
        tau,
    })
}

/// Outcome of the JB-condition probe on a pair of sharp elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JbGap {
    /// `‖J_p(q) + J_{1-p}(1-q) - J_q(p) - J_{1-q}(1-p)‖`.
    pub residual: f64,
    /// `|<z, x_y> - <y, x_z>|` for atoms `p = ½(1,y)`, `q = ½(1,z)`.
    pub symmetry_defect: Option<f64>,
}

pub fn jb_condition_gap(ctx: &ModelContext, p: &SpinProjection, q: &SpinProjection) -> Result<JbGap> {
    let norm = ctx.require_spin()?;
    let residual =
        compression::jb_condition_residual(ctx, &p.to_projection(ctx)?, &q.to_projection(ctx)?)?;
    let symmetry_defect = match (p, q) {
        (SpinProjection::Atom(y), SpinProjection::Atom(z)) => {
            let xy = duality_map(norm, y)?;
            let xz = duality_map(norm, z)?;
            Some((dot(z, &xy) - dot(y, &xz)).abs())
        }
        _ => None,
    };
    Ok(JbGap {
        residual,
        symmetry_defect,
    })
}

/// `psi(y) = ‖y‖ x_{y/‖y‖}`, `psi(0) = 0`.
pub fn psi(norm: &NormOracle, y: &[f64]) -> Result<Vec<f64>> {
    norm.check_dim(y)?;
    let r = norm.dual_norm(y);
    if r == 0.0 {
        return Ok(vec![0.0; y.len()]);
    }
    let unit: Vec<f64> = y.iter().map(|v| v / r).collect();
    Ok(duality_map(norm, &unit)?.into_iter().map(|v| r * v).collect())
}

/// Gram matrix of the candidate inner product `(y, z) = <y, psi(z)>` and the
/// worst observed failure of additivity of `psi`.
#[derive(Debug, Clone)]
pub struct PsiGram {
    pub gram: DMatrix<f64>,
    pub linearity_defect: f64,
    /// `(y, z, w)` attaining the defect.
    pub witness: Option<[Vec<f64>; 3]>,
}

/// `|<w, psi(y + z) - psi(y) - psi(z)>|`.
pub fn psi_additivity_defect(norm: &NormOracle, y: &[f64], z: &[f64], w: &[f64]) -> Result<f64> {
    let sum: Vec<f64> = y.iter().zip(z).map(|(a, b)| a + b).collect();
    let (ps, py, pz) = (psi(norm, &sum)?, psi(norm, y)?, psi(norm, z)?);
    let diff: Vec<f64> = (0..ps.len()).map(|i| ps[i] - py[i] - pz[i]).collect();
    Ok(dot(w, &diff).abs())
}

/// Builds `G_ij = <v_i, psi(v_j)>` and samples `samples` unit triples from
/// `rng` for the additivity defect.
pub fn psi_gram(norm: &NormOracle, basis: &[Vec<f64>], samples: usize, rng: &mut SeededRng) -> Result<PsiGram> {
    for v in basis {
        norm.check_dim(v)?;
        if norm.dual_norm(v) == 0.0 {
            return contract("psi_gram needs nonzero basis vectors");
        }
    }
    let images = basis.iter().map(|v| psi(norm, v)).collect::<Result<Vec<_>>>()?;
    let k = basis.len();
    let gram = DMatrix::from_fn(k, k, |i, j| dot(&basis[i], &images[j]));
    let mut defect = 0.0f64;
    let mut witness = None;
    for _ in 0..samples {
        let y = rng.unit_dual(norm);
        let z = rng.unit_dual(norm);
        let w = rng.unit_dual(norm);
        let d = psi_additivity_defect(norm, &y, &z, &w)?;
        if d > defect {
            defect = d;
            witness = Some([y, z, w]);
        }
    }
    Ok(PsiGram {
        gram,
        linearity_defect: defect,
        witness,
    })
}

/// `a²` through the spectral decomposition.
pub fn square(ctx: &ModelContext, a: &Element) -> Result<Element> {
    ctx.require_spin()?;
    Ok(ctx.spectrum(a)?.apply(ctx, |t| t * t))
}

/// `a∘b = ¼[(a+b)² - (a-b)²]` with squares from the spectral decomposition.
pub fn quarter_square_product(ctx: &ModelContext, a: &Element, b: &Element) -> Result<Element> {
    ctx.check_pair(a, b)?;
    let plus = square(ctx, &(a + b))?;
    let minus = square(ctx, &(a - b))?;
    Ok((plus - minus) * 0.25)
}

/// `‖(a+b)∘c - a∘c - b∘c‖` for the quarter-square product.
pub fn bilinearity_defect(ctx: &ModelContext, a: &Element, b: &Element, c: &Element) -> Result<f64> {
    let lhs = quarter_square_product(ctx, &(a + b), c)?;
    let rhs = quarter_square_product(ctx, a, c)? + quarter_square_product(ctx, b, c)?;
    ctx.distance(&lhs, &rhs)
}

/// Hilbert spin-factor product `(αβ + (y,z), αz + βy)`; Euclidean norm only.
pub fn hilbert_jordan_product(ctx: &ModelContext, a: &Element, b: &Element) -> Result<Element> {
    let norm = ctx.require_spin()?;
    if !norm.is_euclidean() {
        return contract("the explicit spin-factor product needs the Euclidean norm");
    }
    ctx.check_pair(a, b)?;
    let (alpha, y) = (a.coords()[0], &a.coords()[1..]);
    let (beta, z) = (b.coords()[0], &b.coords()[1..]);
    let v: Vec<f64> = y.iter().zip(z).map(|(yi, zi)| alpha * zi + beta * yi).collect();
    ctx.spin_element(alpha * beta + dot(y, z), &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn l2(n: usize) -> ModelContext {
        ModelContext::spin_lp(2.0, n).unwrap()
    }

    fn two_pow(e: f64) -> f64 {
        2f64.powf(e)
    }

    #[test]
    fn duality_examples() {
        let n2 = NormOracle::lp(2.0, 2).unwrap();
        let y = [0.6, -0.8];
        let x = duality_map(&n2, &y).unwrap();
        assert_abs_diff_eq!(x[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(x[1], -0.8, epsilon = 1e-15);

        let n3 = NormOracle::lp(3.0, 2).unwrap();
        assert_eq!(duality_map(&n3, &[1.0, 0.0]).unwrap(), vec![1.0, 0.0]);
        let c = two_pow(-2.0 / 3.0);
        let x = duality_map(&n3, &[c, c]).unwrap();
        assert_abs_diff_eq!(x[0], two_pow(-1.0 / 3.0), epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], two_pow(-1.0 / 3.0), epsilon = 1e-14);
        assert_abs_diff_eq!(dot(&[c, c], &x), 1.0, epsilon = 1e-14);

        assert!(duality_map(&n3, &[2.0, 0.0]).is_err());
    }

    struct SupNormish;

    impl NormPlugin for SupNormish {
        fn name(&self) -> String {
            "l4-plugin".into()
        }
        fn primal_norm(&self, x: &[f64]) -> f64 {
            lp_norm(x, 4.0)
        }
        fn dual_norm(&self, y: &[f64]) -> f64 {
            lp_norm(y, 4.0 / 3.0)
        }
    }

    #[test]
    fn ascent_matches_closed_form() {
        let custom = NormOracle::custom(3, Arc::new(SupNormish)).unwrap();
        let closed = NormOracle::lp(4.0, 3).unwrap();
        let raw = [0.3, -1.2, 0.7];
        let r = closed.dual_norm(&raw);
        let y: Vec<f64> = raw.iter().map(|v| v / r).collect();
        let xa = duality_map(&custom, &y).unwrap();
        let xc = duality_map(&closed, &y).unwrap();
        for (a, b) in xa.iter().zip(&xc) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-4);
        }
        // deterministic
        assert_eq!(xa, duality_map(&custom, &y).unwrap());
    }

    /// `l1` primal, `l_inf` dual: `y = (1, 1)` is normed by every point of a
    /// face of the unit ball.
    struct Taxicab;

    impl NormPlugin for Taxicab {
        fn name(&self) -> String {
            "l1-plugin".into()
        }
        fn primal_norm(&self, x: &[f64]) -> f64 {
            x.iter().map(|v| v.abs()).sum()
        }
        fn dual_norm(&self, y: &[f64]) -> f64 {
            y.iter().fold(0.0, |m, v| m.max(v.abs()))
        }
    }

    #[test]
    fn uniqueness_probe() {
        let starts = vec![vec![1.0, 0.2], vec![0.1, 1.0], vec![-0.3, 0.5]];
        let smooth = NormOracle::lp(3.0, 2).unwrap();
        let y = [two_pow(-2.0 / 3.0), two_pow(-2.0 / 3.0)];
        assert!(norming_point_spread(&smooth, &y, &starts).unwrap() < UNIQUENESS_TOL);
        let flat = NormOracle::custom(2, Arc::new(Taxicab)).unwrap();
        let spread = norming_point_spread(&flat, &[1.0, 1.0], &starts).unwrap();
        assert!(spread > 0.3, "{spread}");
    }

    #[test]
    fn compression_examples() {
        let ctx = l2(2);
        let p = SpinProjection::Atom(vec![1.0, 0.0]);
        let a = ctx.spin_element(0.0, &[1.0, 0.0]).unwrap();
        let half = ctx.spin_element(0.5, &[0.5, 0.0]).unwrap();
        assert_eq!(compression_apply(&ctx, &p, &a).unwrap(), half);
        let b = ctx.spin_element(0.0, &[0.0, 1.0]).unwrap();
        assert_eq!(compression_apply(&ctx, &p, &b).unwrap(), ctx.zero());
        assert_eq!(compression_apply(&ctx, &SpinProjection::One, &b).unwrap(), b);
        assert_eq!(compression_apply(&ctx, &SpinProjection::Zero, &b).unwrap(), ctx.zero());
    }

    #[test]
    fn jb_gap_examples() {
        let ctx = ModelContext::spin_lp(3.0, 2).unwrap();
        let c = two_pow(-2.0 / 3.0);
        let p = SpinProjection::Atom(vec![c, c]);
        let q = SpinProjection::Atom(vec![1.0, 0.0]);
        let gap = jb_condition_gap(&ctx, &p, &q).unwrap();
        let oracle = (two_pow(-1.0 / 3.0) - two_pow(-2.0 / 3.0)).abs();
        assert_abs_diff_eq!(gap.symmetry_defect.unwrap(), oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(oracle, 0.1637, epsilon = 1e-4);
        // the JB-condition difference is (defect / 2) * 1, whose norm is defect / 2
        assert_abs_diff_eq!(gap.residual, 0.5 * oracle, epsilon = 1e-12);

        let same = jb_condition_gap(&ctx, &p, &p).unwrap();
        assert!(same.residual < 1e-15);

        let l2 = l2(3);
        let y = sharp_projection(l2.norm_oracle().unwrap(), &[1.0, 2.0, -1.0]).unwrap();
        let z = sharp_projection(l2.norm_oracle().unwrap(), &[0.5, 0.0, 3.0]).unwrap();
        let gap = jb_condition_gap(&l2, &y, &z).unwrap();
        assert!(gap.residual <= 1e-9 && gap.symmetry_defect.unwrap() <= 1e-9);
    }

    #[test]
    fn sharp_examples() {
        let n2 = NormOracle::lp(2.0, 2).unwrap();
        assert_eq!(sharp_projection(&n2, &[2.0, 0.0]).unwrap(), SpinProjection::Atom(vec![1.0, 0.0]));
        let n3 = NormOracle::lp(3.0, 2).unwrap();
        match sharp_projection(&n3, &[1.0, 1.0]).unwrap() {
            SpinProjection::Atom(y) => {
                // 2 t^(3/2) = 1
                assert_abs_diff_eq!(y[0], two_pow(-2.0 / 3.0), epsilon = 1e-14);
                assert_abs_diff_eq!(y[1], two_pow(-2.0 / 3.0), epsilon = 1e-14);
            }
            other => panic!("expected atom, got {other:?}"),
        }
        assert!(sharp_projection(&n3, &[0.0, 0.0]).is_err());

        let ctx = ModelContext::spin_lp(3.0, 2).unwrap();
        let p = sharp_projection(&n3, &[1.0, 1.0]).unwrap();
        let sum = p.to_element(&ctx).unwrap() + p.complement().to_element(&ctx).unwrap();
        assert!(ctx.distance(&sum, &ctx.unit()).unwrap() < 1e-15);
    }

    #[test]
    fn psi_examples() {
        let n2 = NormOracle::lp(2.0, 3).unwrap();
        let basis = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let mut rng = SeededRng::new(0);
        let g = psi_gram(&n2, &basis, 50, &mut rng).unwrap();
        assert!((g.gram - DMatrix::<f64>::identity(3, 3)).abs().max() < 1e-15);
        assert!(g.linearity_defect <= 1e-8);

        let n5 = NormOracle::lp(5.0, 3).unwrap();
        let y = [0.3, -0.4, 1.1];
        let py = psi(&n5, &y).unwrap();
        for t in [-2.0, 0.5] {
            let ty: Vec<f64> = y.iter().map(|v| t * v).collect();
            let pty = psi(&n5, &ty).unwrap();
            for (a, b) in pty.iter().zip(&py) {
                assert_abs_diff_eq!(a, &(t * b), epsilon = 1e-12);
            }
        }
        assert!(psi_gram(&n5, &[vec![0.0; 3]], 1, &mut rng).is_err());
    }

    #[test]
    fn square_examples() {
        let ctx = l2(2);
        assert_eq!(square(&ctx, &ctx.unit()).unwrap(), ctx.unit());
        let a = ctx.spin_element(0.0, &[1.0, 0.0]).unwrap();
        assert!(ctx.distance(&square(&ctx, &a).unwrap(), &ctx.unit()).unwrap() < 1e-15);

        let b = ctx.spin_element(0.7, &[-1.0, 2.0]).unwrap();
        let qs = quarter_square_product(&ctx, &a, &b).unwrap();
        let hj = hilbert_jordan_product(&ctx, &a, &b).unwrap();
        assert!(ctx.distance(&qs, &hj).unwrap() < 1e-12);
    }

    #[test]
    fn l3_bilinearity_fails() {
        let ctx = ModelContext::spin_lp(3.0, 2).unwrap();
        let a = ctx.spin_element(0.0, &[1.0, 0.0]).unwrap();
        let b = ctx.spin_element(0.0, &[0.0, 1.0]).unwrap();
        let c = ctx.spin_element(0.0, &[1.0, 1.0]).unwrap();
        assert!(bilinearity_defect(&ctx, &a, &b, &c).unwrap() > 1e-3);
        let l2 = l2(2);
        let (a, b, c) = (
            l2.spin_element(0.0, &[1.0, 0.0]).unwrap(),
            l2.spin_element(0.0, &[0.0, 1.0]).unwrap(),
            l2.spin_element(0.0, &[1.0, 1.0]).unwrap(),
        );
        assert!(bilinearity_defect(&l2, &a, &b, &c).unwrap() <= 1e-8);
    }

    #[test]
    fn spectrum_of_spin_element() {
        let ctx = l2(2);
        let a = ctx.spin_element(1.0, &[2.0, 0.0]).unwrap();
        let s = spectrum(&ctx, &a).unwrap();
        assert_eq!(s.values(), vec![-1.0, 3.0]);
        assert_eq!(
            s.points[1].projection.element(),
            &SpinProjection::Atom(vec![1.0, 0.0]).to_element(&ctx).unwrap()
        );
        let c = spectrum(&ctx, &ctx.scalar(4.0)).unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn classify_sharp_elements() {
        let ctx = ModelContext::spin_lp(3.0, 2).unwrap();
        assert_eq!(SpinProjection::classify(&ctx, &ctx.zero()).unwrap(), SpinProjection::Zero);
        assert_eq!(SpinProjection::classify(&ctx, &ctx.unit()).unwrap(), SpinProjection::One);
        assert!(SpinProjection::classify(&ctx, &ctx.scalar(0.5)).is_err());
    }
}
