//! The JB-algebra of real symmetric matrices.
//!
//! Jordan product `a∘b = (ab + ba)/2`, quadratic map `U_a b = aba`, and
//! the eigenstructure that realizes spectra and spectral projections.

mod jacobi;

pub use jacobi::{jacobi_eigen, jacobi_eigen_polished, JacobiEigen, JACOBI_MAX_SWEEPS, JACOBI_TOLERANCE};

use nalgebra::DMatrix;

use crate::compression::Projection;
use crate::error::{contract, Error, Result};
use crate::ous::{Element, ModelContext, SpectralPoint, Spectrum, CLUSTER_GAP};
use crate::report::VerificationReport;

/// Singular values below `RANK_CUTOFF * sigma_max` count as zero.
pub const RANK_CUTOFF: f64 = 1e-8;
/// Values within this factor of the cutoff (either side) are ambiguous.
const RANK_AMBIGUITY: f64 = 1e2;
/// Extra Jacobi sweeps when eigenvectors feed a subspace comparison.
const POLISH_SWEEPS: usize = 2;
/// Tolerance for operator commutation and identity residuals.
pub const OPERATOR_TOL: f64 = 1e-9;

/// Eigenstructure of a symmetric matrix with clustered eigenvalues.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, one per column.
    pub eigenvectors: DMatrix<f64>,
    /// Partition of eigenvalue indices; eigenvalues within `tau` of a
    /// neighbour share a cluster.
    pub clusters: Vec<Vec<usize>>,
    /// Mean eigenvalue of each cluster.
    pub cluster_values: Vec<f64>,
    pub spectral_projections: Vec<Projection>,
    pub tau: f64,
}

impl EigenSystem {
    /// `‖a - sum λ_i v_i v_iᵀ‖` in the order unit norm.
    pub fn reconstruction_error(&self, ctx: &ModelContext, a: &Element) -> Result<f64> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.eigenvalues.clone()));
        let rebuilt = &self.eigenvectors * d * self.eigenvectors.transpose();
        ctx.distance(a, &ctx.from_matrix(&rebuilt)?)
    }

    pub fn into_spectrum(self) -> Spectrum {
        let points = self
            .cluster_values
            .into_iter()
            .zip(self.spectral_projections)
            .map(|(value, projection)| SpectralPoint { value, projection })
            .collect();
        Spectrum {
            points,
            tau: self.tau,
        }
    }
}

/// Ascending eigenvalues of a matrix-model element.
pub fn eigenvalues(ctx: &ModelContext, a: &Element) -> Result<Vec<f64>> {
    Ok(jacobi_eigen(&ctx.to_matrix(a)?)?.values)
}

/// Eigen decomposition with clusters of width `tau = 1e-8 (1 + ‖a‖)`.
pub fn eigen_decompose(ctx: &ModelContext, a: &Element) -> Result<EigenSystem> {
    let m = ctx.to_matrix(a)?;
    let n = m.nrows();
    let eig = jacobi_eigen(&m)?;
    let norm = eig.values[0].abs().max(eig.values[n - 1].abs());
    let tau = CLUSTER_GAP * (1.0 + norm);

    let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..n {
        if eig.values[i] - eig.values[i - 1] <= tau {
            clusters.last_mut().unwrap().push(i);
        } else {
            clusters.push(vec![i]);
        }
    }
    let cluster_values = clusters
        .iter()
        .map(|c| c.iter().map(|&i| eig.values[i]).sum::<f64>() / c.len() as f64)
        .collect();
    let spectral_projections = clusters
        .iter()
        .map(|c| {
            let cols = DMatrix::from_fn(n, c.len(), |r, k| eig.vectors[(r, c[k])]);
            Ok(Projection::new_unchecked(ctx.from_matrix(&(&cols * cols.transpose()))?))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(EigenSystem {
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
        clusters,
        cluster_values,
        spectral_projections,
        tau,
    })
}

/// `(ab + ba) / 2`.
pub fn jordan_product(ctx: &ModelContext, a: &Element, b: &Element) -> Result<Element> {
    let (ma, mb) = (ctx.to_matrix(a)?, ctx.to_matrix(b)?);
    ctx.from_matrix(&((&ma * &mb + &mb * &ma) * 0.5))
}

/// Jordan triple product `{abc} = (a∘b)∘c + (b∘c)∘a - (a∘c)∘b`.
pub fn triple_product(ctx: &ModelContext, a: &Element, b: &Element, c: &Element) -> Result<Element> {
    let ab_c = jordan_product(ctx, &jordan_product(ctx, a, b)?, c)?;
    let bc_a = jordan_product(ctx, &jordan_product(ctx, b, c)?, a)?;
    let ac_b = jordan_product(ctx, &jordan_product(ctx, a, c)?, b)?;
    Ok(ab_c + bc_a - ac_b)
}

/// `U_a b = 2a∘(a∘b) - a²∘b`, built from the Jordan product alone.
pub fn quadratic_map(ctx: &ModelContext, a: &Element, b: &Element) -> Result<Element> {
    let a2 = jordan_product(ctx, a, a)?;
    let left = jordan_product(ctx, a, &jordan_product(ctx, a, b)?)?;
    Ok(left * 2.0 - jordan_product(ctx, &a2, b)?)
}

/// The matrix product `aba`.
pub fn quadratic_map_direct(ctx: &ModelContext, a: &Element, b: &Element) -> Result<Element> {
    let (ma, mb) = (ctx.to_matrix(a)?, ctx.to_matrix(b)?);
    ctx.from_matrix(&(&ma * &mb * &ma))
}

/// Multiplication operator `T_a b = a∘b`.
pub fn mult_operator(ctx: &ModelContext, a: &Element, b: &Element) -> Result<Element> {
    jordan_product(ctx, a, b)
}

/// Residual of the operator identities `U_p = 2T_p² - T_p` and
/// `T_p = (I + U_p - U_{1-p}) / 2` evaluated at `a`.
pub fn mult_operator_identity_check(ctx: &ModelContext, p: &Projection, a: &Element) -> Result<f64> {
    let p = p.element();
    if ctx.distance(&jordan_product(ctx, p, p)?, p)? > crate::compression::PROJECTION_TOL {
        return contract("mult_operator_identity_check needs an idempotent p");
    }
    let tp_a = mult_operator(ctx, p, a)?;
    let tp_tp_a = mult_operator(ctx, p, &tp_a)?;
    let up_a = quadratic_map(ctx, p, a)?;
    let q = ctx.unit() - p;
    let uq_a = quadratic_map(ctx, &q, a)?;
    let first = ctx.order_unit_norm(&(&up_a - (tp_tp_a * 2.0 - &tp_a)))?;
    let second = ctx.order_unit_norm(&(&tp_a - (a + &up_a - &uq_a) * 0.5))?;
    Ok(first.max(second))
}

/// Orthonormal basis of the null space of a sum of projections, with the
/// rank decision guarded against ambiguity. Such sums have scale at least 1
/// unless they vanish, so the cutoff is taken relative to `max(σ_max, 1)`;
/// a sum that is zero up to rounding then has a full null space.
fn psd_null_space(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = jacobi_eigen_polished(m, POLISH_SWEEPS)?;
    let n = m.nrows();
    let top = eig.values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let cutoff = RANK_CUTOFF * top;
    let mut cols = Vec::new();
    for (i, v) in eig.values.iter().enumerate() {
        let v = v.abs();
        if v > cutoff / RANK_AMBIGUITY && v < cutoff * RANK_AMBIGUITY {
            return Err(Error::RankAmbiguous { value: v, cutoff });
        }
        if v <= cutoff {
            cols.push(i);
        }
    }
    Ok(DMatrix::from_fn(n, cols.len(), |r, k| eig.vectors[(r, cols[k])]))
}

/// Numerical rank of an arbitrary matrix by singular values.
pub fn numerical_rank(m: &DMatrix<f64>) -> Result<usize> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Ok(0);
    }
    let sv = m.singular_values();
    let top = sv.iter().fold(0.0f64, |acc, v| acc.max(*v));
    if top == 0.0 {
        return Ok(0);
    }
    let cutoff = RANK_CUTOFF * top;
    let mut rank = 0;
    for &v in sv.iter() {
        if v > cutoff / RANK_AMBIGUITY && v < cutoff * RANK_AMBIGUITY {
            return Err(Error::RankAmbiguous { value: v, cutoff });
        }
        if v > cutoff {
            rank += 1;
        }
    }
    Ok(rank)
}

/// Orthonormal bases of the range and of the kernel of a square matrix.
///
/// The rank comes from the singular values; the bases from Jacobi
/// eigenvectors of `MMᵀ` and `MᵀM`, which stay accurate when singular values
/// repeat.
fn range_and_kernel(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    assert_eq!(m.nrows(), m.ncols(), "range_and_kernel needs a square matrix");
    let n = m.nrows();
    let rank = numerical_rank(m)?;
    let left = jacobi_eigen_polished(&(m * m.transpose()), POLISH_SWEEPS)?;
    let right = jacobi_eigen_polished(&(m.transpose() * m), POLISH_SWEEPS)?;
    // eigenvalues ascend: the range is spanned by the last `rank` vectors
    let range = DMatrix::from_fn(n, rank, |r, k| left.vectors[(r, n - rank + k)]);
    let kernel = DMatrix::from_fn(n, n - rank, |r, k| right.vectors[(r, k)]);
    Ok((range, kernel))
}

/// Orthogonal projection onto `range(p) ∩ range(q)`, from the null space of
/// `(1 - p) + (1 - q)`.
pub fn lattice_meet(ctx: &ModelContext, p: &Projection, q: &Projection) -> Result<Projection> {
    let n = ctx.require_matrix()?;
    let id = DMatrix::<f64>::identity(n, n);
    let m = (&id - ctx.to_matrix(p.element())?) + (&id - ctx.to_matrix(q.element())?);
    let basis = psd_null_space(&m)?;
    Ok(Projection::new_unchecked(
        ctx.from_matrix(&(&basis * basis.transpose()))?,
    ))
}

/// `1 - ((1 - p) ∧ (1 - q))`.
pub fn lattice_join(ctx: &ModelContext, p: &Projection, q: &Projection) -> Result<Projection> {
    let meet = lattice_meet(ctx, &p.complement(ctx), &q.complement(ctx))?;
    Ok(meet.complement(ctx))
}

/// Symmetric-matrix basis matching the coordinate layout: `E_ii` and
/// `E_ij + E_ji`.
pub fn coordinate_basis(ctx: &ModelContext) -> Vec<Element> {
    let len = ctx.coord_len();
    (0..len)
        .map(|k| {
            let mut c = vec![0.0; len];
            c[k] = 1.0;
            ctx.element(c).expect("basis coordinates are finite")
        })
        .collect()
}

/// `(max_e ‖T_aT_b e - T_bT_a e‖, ‖ab - ba‖_F)` over the coordinate basis.
pub fn operator_commute_residuals(ctx: &ModelContext, a: &Element, b: &Element) -> Result<(f64, f64)> {
    ctx.check_pair(a, b)?;
    let mut worst = 0.0f64;
    for e in coordinate_basis(ctx) {
        let ab = mult_operator(ctx, a, &mult_operator(ctx, b, &e)?)?;
        let ba = mult_operator(ctx, b, &mult_operator(ctx, a, &e)?)?;
        worst = worst.max(ctx.order_unit_norm(&(ab - ba))?);
    }
    let (ma, mb) = (ctx.to_matrix(a)?, ctx.to_matrix(b)?);
    let comm = (&ma * &mb - &mb * &ma).norm();
    Ok((worst, comm))
}

/// Whether `T_aT_b = T_bT_a`, cross-validated against `ab = ba`.
pub fn operator_commute(ctx: &ModelContext, a: &Element, b: &Element) -> Result<bool> {
    let (op, comm) = operator_commute_residuals(ctx, a, b)?;
    let scale = 1.0f64.max(ctx.order_unit_norm(a)? * ctx.order_unit_norm(b)?);
    let by_operator = op <= OPERATOR_TOL * scale;
    let by_commutator = comm <= OPERATOR_TOL * scale;
    if by_operator != by_commutator {
        return contract(format!(
            "operator residual {op:e} and commutator {comm:e} disagree"
        ));
    }
    Ok(by_operator)
}

/// Checks the annihilator property for a positive `a`: the set
/// `{b : U_b(a) = 0}` equals `U_p(A)` for `p = 1 - s(a)`.
///
/// For positive `a`, `U_b(a) = 0` iff `a∘b = 0`, so the annihilator is the
/// kernel of `T_a`; it is compared with the range of `U_p` by dimension
/// counts on the stacked bases.
pub fn annihilator_check(ctx: &ModelContext, a: &Element) -> Result<VerificationReport> {
    ctx.require_matrix()?;
    if !ctx.cone_contains(a)? {
        return contract("annihilator_check needs a positive element");
    }
    let mut report = VerificationReport::new("annihilator", ctx.descriptor());
    let support = crate::compression::support(ctx, a)?;
    let p = support.complement(ctx);

    let basis = coordinate_basis(ctx);
    let len = basis.len();
    let columns = |f: &dyn Fn(&Element) -> Result<Element>| -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(len, len);
        for (k, e) in basis.iter().enumerate() {
            let img = f(e)?;
            for (r, v) in img.coords().iter().enumerate() {
                m[(r, k)] = *v;
            }
        }
        Ok(m)
    };
    let t_a = columns(&|e| mult_operator(ctx, a, e))?;
    let u_p = columns(&|e| quadratic_map_direct(ctx, p.element(), e))?;

    let (_, kernel) = range_and_kernel(&t_a)?;
    let (range, _) = range_and_kernel(&u_p)?;
    let dim_k = kernel.ncols();
    let dim_r = range.ncols();
    let mut stacked = DMatrix::zeros(len, dim_k + dim_r);
    stacked.columns_mut(0, dim_k).copy_from(&kernel);
    stacked.columns_mut(dim_k, dim_r).copy_from(&range);
    let dim_sum = numerical_rank(&stacked)?;

    let to_elem = |col: nalgebra::DVectorView<f64>| ctx.element(col.iter().copied().collect());
    let mut annihilation = 0.0f64;
    for col in range.column_iter() {
        let b = to_elem(col)?;
        annihilation = annihilation.max(ctx.order_unit_norm(&quadratic_map_direct(ctx, &b, a)?)?);
    }
    let mut containment = 0.0f64;
    for col in kernel.column_iter() {
        let b = to_elem(col)?;
        let pb = quadratic_map_direct(ctx, p.element(), &b)?;
        containment = containment.max(ctx.distance(&b, &pb)?);
    }

    report.config("dim_annihilator", dim_k);
    report.config("dim_range", dim_r);
    report.config("dim_sum", dim_sum);
    report.check_le("dimension-defect", ((dim_sum - dim_k) + (dim_sum - dim_r)) as f64, 0.0);
    let scale = 1.0 + ctx.order_unit_norm(a)?;
    report.check_le("range-annihilates", annihilation, OPERATOR_TOL * scale);
    report.check_le("kernel-in-range", containment, OPERATOR_TOL * scale);
    report.finalize();
    if !report.passed() {
        report.witness(
            "element",
            report.max_residual,
            vec![ctx.format_element(a)?, ctx.format_element(p.element())?],
        );
    }
    Ok(report)
}

/// Slacks of the JB norm axioms:
/// `‖a‖‖b‖ - ‖a∘b‖`, `‖a‖² - ‖a²‖`, `‖a² + b²‖ - ‖a²‖`.
pub fn jb_norm_axioms(ctx: &ModelContext, a: &Element, b: &Element) -> Result<VerificationReport> {
    let na = ctx.order_unit_norm(a)?;
    let nb = ctx.order_unit_norm(b)?;
    let a2 = jordan_product(ctx, a, a)?;
    let b2 = jordan_product(ctx, b, b)?;
    let nab = ctx.order_unit_norm(&jordan_product(ctx, a, b)?)?;
    let na2 = ctx.order_unit_norm(&a2)?;
    let nsum = ctx.order_unit_norm(&(&a2 + &b2))?;
    let mut report = VerificationReport::new("jb-norm", ctx.descriptor());
    report.check_ge("product", na * nb - nab, -OPERATOR_TOL);
    report.check_ge("square", na * na - na2, -OPERATOR_TOL);
    report.check_ge("sum-of-squares", nsum - na2, -OPERATOR_TOL);
    report.finalize();
    if !report.passed() {
        report.witness("pair", 0.0, vec![ctx.format_element(a)?, ctx.format_element(b)?]);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn m2() -> ModelContext {
        ModelContext::matrix(2).unwrap()
    }

    #[test]
    fn jordan_examples() {
        let ctx = m2();
        let a = ctx.from_row_major(&[0.0, 1.0, 1.0, 0.0]).unwrap();
        let b = ctx.diag(&[1.0, -1.0]).unwrap();
        assert_eq!(jordan_product(&ctx, &a, &ctx.unit()).unwrap(), a);
        let d = ctx.diag(&[2.0, -3.0]).unwrap();
        assert_eq!(jordan_product(&ctx, &d, &ctx.unit()).unwrap(), d);
        assert!(jordan_product(&ctx, &a, &b).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn triple_product_examples() {
        let ctx = m2();
        let a = ctx.from_row_major(&[0.0, 1.0, 1.0, 0.0]).unwrap();
        let b = ctx.diag(&[1.0, 0.0]).unwrap();
        let one = ctx.unit();
        let t = triple_product(&ctx, &a, &b, &one).unwrap();
        let expected = ctx.from_row_major(&[0.0, 0.5, 0.5, 0.0]).unwrap();
        assert!(ctx.distance(&t, &expected).unwrap() < 1e-14);
        assert_eq!(triple_product(&ctx, &one, &b, &one).unwrap(), b);
        let a2 = jordan_product(&ctx, &a, &a).unwrap();
        assert!(ctx.distance(&triple_product(&ctx, &a, &one, &a).unwrap(), &a2).unwrap() < 1e-14);
    }

    #[test]
    fn quadratic_map_examples() {
        let ctx = m2();
        let p = ctx.diag(&[1.0, 0.0]).unwrap();
        let b = ctx.from_row_major(&[1.0, 2.0, 2.0, 3.0]).unwrap();
        assert_eq!(quadratic_map(&ctx, &p, &b).unwrap(), ctx.diag(&[1.0, 0.0]).unwrap());
        assert_eq!(quadratic_map(&ctx, &ctx.unit(), &b).unwrap(), b);
        let b2 = jordan_product(&ctx, &b, &b).unwrap();
        assert!(ctx.distance(&quadratic_map(&ctx, &b, &ctx.unit()).unwrap(), &b2).unwrap() < 1e-13);
    }

    #[test]
    fn eigen_examples() {
        let ctx = ModelContext::matrix(3).unwrap();
        let a = ctx.diag(&[3.0, 1.0, 1.0]).unwrap();
        let es = eigen_decompose(&ctx, &a).unwrap();
        assert_eq!(es.clusters.len(), 2);
        assert_eq!(es.cluster_values, vec![1.0, 3.0]);
        assert_eq!(es.spectral_projections[0].element(), &ctx.diag(&[0.0, 1.0, 1.0]).unwrap());
        assert_eq!(es.spectral_projections[1].element(), &ctx.diag(&[1.0, 0.0, 0.0]).unwrap());

        let z = eigen_decompose(&ctx, &ctx.zero()).unwrap();
        assert_eq!(z.clusters.len(), 1);
        assert_eq!(z.spectral_projections[0].element(), &ctx.unit());

        let ctx = m2();
        let a = ctx.from_row_major(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let es = eigen_decompose(&ctx, &a).unwrap();
        assert_abs_diff_eq!(es.cluster_values[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(es.cluster_values[1], 2.0, epsilon = 1e-15);
        assert!(es.reconstruction_error(&ctx, &a).unwrap() < 1e-14);
    }

    #[test]
    fn identity_check_examples() {
        let ctx = m2();
        let a = ctx.diag(&[1.0, -1.0]).unwrap();
        let one = Projection::new_unchecked(ctx.unit());
        assert!(mult_operator_identity_check(&ctx, &one, &a).unwrap() < 1e-15);
        let p = Projection::new_unchecked(ctx.from_row_major(&[0.5, 0.5, 0.5, 0.5]).unwrap());
        assert!(mult_operator_identity_check(&ctx, &p, &a).unwrap() <= 1e-9);
        let bad = Projection::new_unchecked(ctx.scalar(0.5));
        assert!(mult_operator_identity_check(&ctx, &bad, &a).is_err());
    }

    #[test]
    fn lattice_examples() {
        let ctx = m2();
        let p = Projection::new_unchecked(ctx.diag(&[1.0, 0.0]).unwrap());
        let q = Projection::new_unchecked(ctx.diag(&[0.0, 1.0]).unwrap());
        let r = Projection::new_unchecked(ctx.from_row_major(&[0.5, 0.5, 0.5, 0.5]).unwrap());
        assert!(ctx.distance(lattice_meet(&ctx, &p, &p).unwrap().element(), p.element()).unwrap() < 1e-12);
        assert!(ctx.distance(lattice_join(&ctx, &p, &p).unwrap().element(), p.element()).unwrap() < 1e-12);
        assert!(lattice_meet(&ctx, &p, &q).unwrap().element().max_abs() < 1e-12);
        assert!(ctx.distance(lattice_join(&ctx, &p, &q).unwrap().element(), &ctx.unit()).unwrap() < 1e-12);
        assert!(lattice_meet(&ctx, &p, &r).unwrap().element().max_abs() < 1e-12);
        assert!(ctx.distance(lattice_join(&ctx, &p, &r).unwrap().element(), &ctx.unit()).unwrap() < 1e-12);
        // units carrying rounding noise still meet to the unit
        let one = Projection::new_unchecked(ctx.from_row_major(&[1.0 + 1e-15, 1e-17, 1e-17, 1.0]).unwrap());
        let meet = lattice_meet(&ctx, &one, &ctx.unit_projection()).unwrap();
        assert!(ctx.distance(meet.element(), &ctx.unit()).unwrap() < 1e-12);
    }

    #[test]
    fn operator_commute_examples() {
        let ctx = m2();
        let a = ctx.from_row_major(&[1.0, 2.0, 2.0, -1.0]).unwrap();
        let a2 = jordan_product(&ctx, &a, &a).unwrap();
        assert!(operator_commute(&ctx, &a, &a2).unwrap());
        assert!(operator_commute(&ctx, &a, &ctx.unit()).unwrap());
        let d = ctx.diag(&[1.0, 2.0]).unwrap();
        let s = ctx.from_row_major(&[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(!operator_commute(&ctx, &d, &s).unwrap());
    }

    #[test]
    fn annihilator_examples() {
        let ctx = m2();
        let r = annihilator_check(&ctx, &ctx.unit()).unwrap();
        assert!(r.passed());
        assert_eq!(r.config[0], ("dim_annihilator".to_string(), "0".to_string()));

        let r = annihilator_check(&ctx, &ctx.diag(&[1.0, 0.0]).unwrap()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert_eq!(r.config[0].1, "1");

        let a = ctx.from_row_major(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let p = crate::compression::rickart_map(&ctx, &a).unwrap();
        let expected = ctx.from_row_major(&[0.5, -0.5, -0.5, 0.5]).unwrap();
        assert!(ctx.distance(p.element(), &expected).unwrap() < 1e-12);
        assert!(annihilator_check(&ctx, &a).unwrap().passed());

        assert!(annihilator_check(&ctx, &ctx.diag(&[1.0, -1.0]).unwrap()).is_err());
    }

    #[test]
    fn jb_norm_examples() {
        let ctx = ModelContext::matrix(3).unwrap();
        let one = ctx.unit();
        let r = jb_norm_axioms(&ctx, &one, &one).unwrap();
        let slacks: Vec<f64> = r.checks.iter().map(|c| c.value).collect();
        assert_eq!(slacks, vec![0.0, 0.0, 1.0]);
        let a = ctx.diag(&[2.0, -1.0, 0.5]).unwrap();
        let r = jb_norm_axioms(&ctx, &a, &ctx.zero()).unwrap();
        assert_eq!(r.checks[2].value, 0.0);
        assert!(r.passed());
    }
}
