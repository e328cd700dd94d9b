//! Order unit space layer shared by both models.
//!
//! An [`Element`] is a coordinate vector tagged with the model it lives in. All
//! model-dependent behaviour (positive cone, order unit norm, spectrum) is
//! dispatched through a [`ModelContext`].
//!
//! Coordinate layouts:
//! - matrix model of size `n`: upper triangle of a symmetric matrix, row-major,
//!   `n(n+1)/2` coordinates;
//! - spin model over `X` of dimension `n`: `(alpha, y_1, .., y_n)` with `y` in
//!   the dual space `X*`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::compression::Projection;
use crate::error::{contract, Error, Result};
use crate::matrix;
use crate::spin::{self, NormOracle};

/// Default relative cone tolerance.
pub const DEFAULT_EPS_CONE: f64 = 1e-9;
/// Default element equality tolerance.
pub const DEFAULT_EPS_EQ: f64 = 1e-9;
/// Relative gap under which two spectral values are the same point.
pub const CLUSTER_GAP: f64 = 1e-8;
/// Number of halvings used by [`ModelContext::norm_by_bisection`].
pub const BISECTION_STEPS: usize = 60;

/// Identity of the coordinate space an element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelTag {
    Matrix(usize),
    Spin(usize),
}

impl ModelTag {
    pub fn coord_len(self) -> usize {
        match self {
            ModelTag::Matrix(n) => n * (n + 1) / 2,
            ModelTag::Spin(n) => n + 1,
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelTag::Matrix(n) => write!(f, "matrix:{n}"),
            ModelTag::Spin(n) => write!(f, "spin:{n}"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum ModelKind {
    /// Real symmetric `n x n` matrices.
    Matrix { n: usize },
    /// Generalized spin factor `R x X*` over the given norm on `X`.
    Spin { norm: NormOracle },
}

/// A model together with its numeric tolerances.
#[derive(Debug, Clone)]
pub struct ModelContext {
    kind: ModelKind,
    eps_cone: f64,
    eps_eq: f64,
}

/// A member of an order unit space.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    tag: ModelTag,
    coords: Vec<f64>,
}

/// One distinct spectral value with its spectral projection.
#[derive(Debug, Clone)]
pub struct SpectralPoint {
    pub value: f64,
    pub projection: Projection,
}

/// Finite spectral decomposition `a = sum value_i * projection_i` with
/// ascending, pairwise distinct values and mutually orthogonal projections
/// summing to the unit.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub points: Vec<SpectralPoint>,
    /// Threshold under which two spectral values were merged.
    pub tau: f64,
}

impl Spectrum {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `sum g(value_i) * projection_i`.
    pub fn apply<F>(&self, ctx: &ModelContext, mut g: F) -> Element
    where
        F: FnMut(f64) -> f64,
    {
        let mut out = ctx.zero();
        for pt in &self.points {
            out.axpy(g(pt.value), pt.projection.element());
        }
        out
    }

    /// Sum of the projections whose value satisfies `keep`.
    pub fn projection_where<F>(&self, ctx: &ModelContext, mut keep: F) -> Projection
    where
        F: FnMut(f64) -> bool,
    {
        let mut out = ctx.zero();
        for pt in self.points.iter().filter(|pt| keep(pt.value)) {
            out.axpy(1.0, pt.projection.element());
        }
        Projection::new_unchecked(out)
    }
}

impl Element {
    pub fn tag(&self) -> ModelTag {
        self.tag
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub(crate) fn from_parts(tag: ModelTag, coords: Vec<f64>) -> Self {
        debug_assert_eq!(tag.coord_len(), coords.len());
        Element { tag, coords }
    }

    /// `self += t * other`.
    pub fn axpy(&mut self, t: f64, other: &Element) {
        assert_eq!(self.tag, other.tag, "model mismatch in axpy");
        for (x, y) in self.coords.iter_mut().zip(&other.coords) {
            *x += t * y;
        }
    }

    pub fn scaled(&self, t: f64) -> Element {
        Element {
            tag: self.tag,
            coords: self.coords.iter().map(|x| t * x).collect(),
        }
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn zip_with(&self, other: &Element, f: impl Fn(f64, f64) -> f64) -> Element {
        assert_eq!(
            self.tag, other.tag,
            "model mismatch: {} vs {}",
            self.tag, other.tag
        );
        Element {
            tag: self.tag,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Element> for &Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                self.zip_with(rhs, |a, b| a $op b)
            }
        }
        impl $tr<Element> for Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Element> for Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                (&self).$method(rhs)
            }
        }
        impl $tr<Element> for &Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scaled(-1.0)
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for &Element {
    type Output = Element;
    fn mul(self, t: f64) -> Element {
        self.scaled(t)
    }
}

impl Mul<f64> for Element {
    type Output = Element;
    fn mul(self, t: f64) -> Element {
        self.scaled(t)
    }
}

impl Mul<&Element> for f64 {
    type Output = Element;
    fn mul(self, a: &Element) -> Element {
        a.scaled(self)
    }
}

/// Index of entry `(i, j)`, `i <= j`, in the upper-triangle layout.
pub(crate) fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * n - i * i.saturating_sub(1) / 2 + j - i
}

impl ModelContext {
    pub fn matrix(n: usize) -> Result<Self> {
        if n == 0 {
            return contract("matrix model needs n >= 1");
        }
        Ok(ModelContext {
            kind: ModelKind::Matrix { n },
            eps_cone: DEFAULT_EPS_CONE,
            eps_eq: DEFAULT_EPS_EQ,
        })
    }

    pub fn spin(norm: NormOracle) -> Result<Self> {
        if norm.dim() == 0 {
            return contract("spin model needs dimension >= 1");
        }
        Ok(ModelContext {
            kind: ModelKind::Spin { norm },
            eps_cone: DEFAULT_EPS_CONE,
            eps_eq: DEFAULT_EPS_EQ,
        })
    }

    /// Spin factor over `l_p` of dimension `n`.
    pub fn spin_lp(p: f64, n: usize) -> Result<Self> {
        Self::spin(NormOracle::lp(p, n)?)
    }

    pub fn with_tolerances(mut self, eps_cone: f64, eps_eq: f64) -> Result<Self> {
        for (name, v) in [("eps_cone", eps_cone), ("eps_eq", eps_eq)] {
            if !(v > 0.0 && v < 1e-3) {
                return contract(format!("{name} must lie in (0, 1e-3), got {v}"));
            }
        }
        self.eps_cone = eps_cone;
        self.eps_eq = eps_eq;
        Ok(self)
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn eps_cone(&self) -> f64 {
        self.eps_cone
    }

    pub fn eps_eq(&self) -> f64 {
        self.eps_eq
    }

    pub fn tag(&self) -> ModelTag {
        match &self.kind {
            ModelKind::Matrix { n } => ModelTag::Matrix(*n),
            ModelKind::Spin { norm } => ModelTag::Spin(norm.dim()),
        }
    }

    pub fn coord_len(&self) -> usize {
        self.tag().coord_len()
    }

    /// `matrix:N` or `spin:P:N`, the descriptor accepted by the CLI.
    pub fn descriptor(&self) -> String {
        match &self.kind {
            ModelKind::Matrix { n } => format!("matrix:{n}"),
            ModelKind::Spin { norm } => format!("spin:{}:{}", norm.label(), norm.dim()),
        }
    }

    /// Inverse of [`ModelContext::descriptor`] for `l_p` spin factors.
    pub fn from_descriptor(desc: &str) -> Result<Self> {
        let parts: Vec<&str> = desc.split(':').collect();
        match parts.as_slice() {
            ["matrix", n] => ModelContext::matrix(parse_num(Some(n))?),
            ["spin", p, n] => ModelContext::spin_lp(parse_num(Some(p))?, parse_num(Some(n))?),
            _ => Err(Error::Parse(format!(
                "model `{desc}` is not of the form matrix:N or spin:P:N"
            ))),
        }
    }

    pub fn norm_oracle(&self) -> Option<&NormOracle> {
        match &self.kind {
            ModelKind::Spin { norm } => Some(norm),
            ModelKind::Matrix { .. } => None,
        }
    }

    pub fn matrix_size(&self) -> Option<usize> {
        match self.kind {
            ModelKind::Matrix { n } => Some(n),
            ModelKind::Spin { .. } => None,
        }
    }

    pub fn zero(&self) -> Element {
        Element::from_parts(self.tag(), vec![0.0; self.coord_len()])
    }

    pub fn unit(&self) -> Element {
        let mut e = self.zero();
        match &self.kind {
            ModelKind::Matrix { n } => {
                for i in 0..*n {
                    e.coords[tri_index(*n, i, i)] = 1.0;
                }
            }
            ModelKind::Spin { .. } => e.coords[0] = 1.0,
        }
        e
    }

    /// `t * 1`.
    pub fn scalar(&self, t: f64) -> Element {
        self.unit().scaled(t)
    }

    /// Builds an element from raw model coordinates.
    pub fn element(&self, coords: Vec<f64>) -> Result<Element> {
        let e = Element {
            tag: self.tag(),
            coords,
        };
        self.check(&e)?;
        Ok(e)
    }

    /// Builds a matrix-model element from a row-major `n x n` array; the
    /// input is symmetrized.
    pub fn from_row_major(&self, data: &[f64]) -> Result<Element> {
        let n = self.require_matrix()?;
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        self.from_matrix(&DMatrix::from_row_slice(n, n, data))
    }

    /// Matrix-model element from an `n x n` matrix; the input is symmetrized.
    pub fn from_matrix(&self, m: &DMatrix<f64>) -> Result<Element> {
        let n = self.require_matrix()?;
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: m.nrows() * m.ncols(),
            });
        }
        let mut coords = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                coords.push(0.5 * (m[(i, j)] + m[(j, i)]));
            }
        }
        self.element(coords)
    }

    /// Diagonal matrix-model element.
    pub fn diag(&self, d: &[f64]) -> Result<Element> {
        let n = self.require_matrix()?;
        if d.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: d.len(),
            });
        }
        self.from_matrix(&DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    /// The full symmetric matrix of a matrix-model element.
    pub fn to_matrix(&self, a: &Element) -> Result<DMatrix<f64>> {
        let n = self.require_matrix()?;
        self.check(a)?;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = a.coords[tri_index(n, i, j)];
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// Spin-model element `(alpha, y)`.
    pub fn spin_element(&self, alpha: f64, y: &[f64]) -> Result<Element> {
        self.require_spin()?;
        let mut coords = Vec::with_capacity(y.len() + 1);
        coords.push(alpha);
        coords.extend_from_slice(y);
        self.element(coords)
    }

    pub(crate) fn require_matrix(&self) -> Result<usize> {
        match self.kind {
            ModelKind::Matrix { n } => Ok(n),
            ModelKind::Spin { .. } => Err(Error::WrongModel {
                expected: "matrix",
                found: self.tag(),
            }),
        }
    }

    pub(crate) fn require_spin(&self) -> Result<&NormOracle> {
        match &self.kind {
            ModelKind::Spin { norm } => Ok(norm),
            ModelKind::Matrix { .. } => Err(Error::WrongModel {
                expected: "spin",
                found: self.tag(),
            }),
        }
    }

    /// Checks that `a` belongs to this model and is finite.
    pub fn check(&self, a: &Element) -> Result<()> {
        let tag = self.tag();
        if a.coords.len() != tag.coord_len() {
            return Err(Error::DimensionMismatch {
                expected: tag.coord_len(),
                found: a.coords.len(),
            });
        }
        if a.tag != tag {
            return Err(Error::ModelMismatch {
                left: tag,
                right: a.tag,
            });
        }
        if let Some(i) = a.coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(())
    }

    pub(crate) fn check_pair(&self, a: &Element, b: &Element) -> Result<()> {
        self.check(a)?;
        self.check(b)
    }

    /// Amount by which `a` fails to be positive, together with its order unit
    /// norm: `(violation, norm)`. Matrix model: `max(0, -lambda_min)`; spin
    /// model: `max(0, |y|* - alpha)`.
    pub fn cone_violation_and_norm(&self, a: &Element) -> Result<(f64, f64)> {
        self.check(a)?;
        match &self.kind {
            ModelKind::Matrix { .. } => {
                let vals = matrix::eigenvalues(self, a)?;
                let lo = vals[0];
                let hi = vals[vals.len() - 1];
                Ok(((-lo).max(0.0), lo.abs().max(hi.abs())))
            }
            ModelKind::Spin { norm } => {
                let alpha = a.coords[0];
                let r = norm.dual_norm(&a.coords[1..]);
                Ok(((r - alpha).max(0.0), alpha.abs() + r))
            }
        }
    }

    pub fn cone_violation(&self, a: &Element) -> Result<f64> {
        Ok(self.cone_violation_and_norm(a)?.0)
    }

    /// Membership in the positive cone up to `eps_cone * max(1, |a|)`.
    pub fn cone_contains(&self, a: &Element) -> Result<bool> {
        let (v, nrm) = self.cone_violation_and_norm(a)?;
        Ok(v <= self.eps_cone * nrm.max(1.0))
    }

    /// `a <= b`.
    pub fn order_leq(&self, a: &Element, b: &Element) -> Result<bool> {
        self.check_pair(a, b)?;
        self.cone_contains(&(b - a))
    }

    /// Order unit norm in closed form: largest absolute eigenvalue (matrix) or
    /// `|alpha| + |y|*` (spin).
    pub fn order_unit_norm(&self, a: &Element) -> Result<f64> {
        Ok(self.cone_violation_and_norm(a)?.1)
    }

    /// Order unit norm as `inf { t >= 0 : -t <= a <= t }`, found by bisection
    /// with exact cone membership as the oracle.
    pub fn norm_by_bisection(&self, a: &Element) -> Result<f64> {
        self.check(a)?;
        let unit = self.unit();
        let inside = |t: f64| -> Result<bool> {
            let upper = self.cone_violation(&(unit.scaled(t) - a))?;
            let lower = self.cone_violation(&(unit.scaled(t) + a))?;
            Ok(upper <= 0.0 && lower <= 0.0)
        };
        let mut lo = 0.0;
        let mut hi: f64 = a.coords.iter().map(|x| x.abs()).sum();
        // custom norms need not be dominated by the l1 sum of coordinates
        let mut guard = 0;
        while !inside(hi)? {
            hi = 2.0 * hi.max(1e-300);
            guard += 1;
            if guard > 2100 {
                return contract("norm bisection could not bracket the norm");
            }
        }
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if inside(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// `0 <= e <= 1`.
    pub fn is_effect(&self, e: &Element) -> Result<bool> {
        Ok(self.cone_contains(e)? && self.order_leq(e, &self.unit())?)
    }

    /// Threshold under which spectral values of `a` are identified.
    pub fn cluster_threshold(&self, a: &Element) -> Result<f64> {
        Ok(CLUSTER_GAP * (1.0 + self.order_unit_norm(a)?))
    }

    /// Finite spectral decomposition of `a`.
    pub fn spectrum(&self, a: &Element) -> Result<Spectrum> {
        self.check(a)?;
        match &self.kind {
            ModelKind::Matrix { .. } => Ok(matrix::eigen_decompose(self, a)?.into_spectrum()),
            ModelKind::Spin { .. } => spin::spectrum(self, a),
        }
    }

    /// `‖a - b‖` in the order unit norm.
    pub fn distance(&self, a: &Element, b: &Element) -> Result<f64> {
        self.check_pair(a, b)?;
        self.order_unit_norm(&(a - b))
    }

    /// Text encoding of `a` in the element file format.
    pub fn format_element(&self, a: &Element) -> Result<String> {
        self.check(a)?;
        let mut out = String::new();
        match &self.kind {
            ModelKind::Matrix { n } => {
                let m = self.to_matrix(a)?;
                out.push_str(&format!("matrix n {n} rowmajor"));
                for i in 0..*n {
                    for j in 0..*n {
                        out.push_str(&format!(" {:?}", m[(i, j)] + 0.0));
                    }
                }
            }
            ModelKind::Spin { norm } => {
                let p = norm.exponent().ok_or_else(|| {
                    Error::Contract("custom norms have no text encoding".into())
                })?;
                // `+ 0.0` prints negative zero as `0.0`
                out.push_str(&format!("spin p {p:?} alpha {:?} y", a.coords[0] + 0.0));
                for y in &a.coords[1..] {
                    out.push_str(&format!(" {:?}", y + 0.0));
                }
            }
        }
        Ok(out)
    }
}

/// Parses one element in the text format
/// `matrix n <n> rowmajor <n*n floats>` or
/// `spin p <p> alpha <float> y <n floats>`, returning the model it implies
/// (default tolerances) and the element.
pub fn parse_element(text: &str) -> Result<(ModelContext, Element)> {
    let mut tok = text.split_whitespace();
    let mut expect = |word: &str| -> Result<()> {
        match tok.next() {
            Some(w) if w == word => Ok(()),
            Some(w) => Err(Error::Parse(format!("expected `{word}`, found `{w}`"))),
            None => Err(Error::Parse(format!("expected `{word}`, found end of input"))),
        }
    };
    let head = text.split_whitespace().next();
    match head {
        Some("matrix") => {
            expect("matrix")?;
            expect("n")?;
            let rest: Vec<&str> = text.split_whitespace().skip(2).collect();
            let n: usize = parse_num(rest.first().copied())?;
            if rest.get(1).copied() != Some("rowmajor") {
                return Err(Error::Parse("expected `rowmajor`".into()));
            }
            let data = rest[2..]
                .iter()
                .map(|s| parse_num::<f64>(Some(s)))
                .collect::<Result<Vec<_>>>()?;
            let ctx = ModelContext::matrix(n)?;
            let a = ctx.from_row_major(&data)?;
            Ok((ctx, a))
        }
        Some("spin") => {
            let toks: Vec<&str> = text.split_whitespace().collect();
            if toks.len() < 6 || toks[1] != "p" || toks[3] != "alpha" || toks[5] != "y" {
                return Err(Error::Parse(
                    "expected `spin p <p> alpha <float> y <floats>`".into(),
                ));
            }
            let p: f64 = parse_num(Some(toks[2]))?;
            let alpha: f64 = parse_num(Some(toks[4]))?;
            let y = toks[6..]
                .iter()
                .map(|s| parse_num::<f64>(Some(s)))
                .collect::<Result<Vec<_>>>()?;
            if y.is_empty() {
                return Err(Error::Parse("spin element needs at least one y coordinate".into()));
            }
            let ctx = ModelContext::spin_lp(p, y.len())?;
            let a = ctx.spin_element(alpha, &y)?;
            Ok((ctx, a))
        }
        Some(other) => Err(Error::Parse(format!("unknown model `{other}`"))),
        None => Err(Error::Parse("empty element".into())),
    }
}

fn parse_num<T: std::str::FromStr>(s: Option<&str>) -> Result<T> {
    let s = s.ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
    s.parse()
        .map_err(|_| Error::Parse(format!("invalid number `{s}`")))
}
