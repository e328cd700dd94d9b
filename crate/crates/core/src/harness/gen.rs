//! Seeded instance generators.
//!
//! Every generator draws only from the stream it is handed, so trial `i` of
//! a run is reproducible from `SeededRng::substream(seed, i)` alone.

use nalgebra::DMatrix;

use crate::compression::Projection;
use crate::error::Result;
use crate::ous::{Element, ModelContext, ModelKind};
use crate::rng::SeededRng;
use crate::spin::SpinProjection;

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
/// sign of `R`'s diagonal folded into `Q`).
pub fn random_orthogonal(n: usize, rng: &mut SeededRng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.gaussian());
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Symmetrised Gaussian matrix, or `(α, y)` with Gaussian coordinates.
pub fn random_element(ctx: &ModelContext, rng: &mut SeededRng) -> Result<Element> {
    match ctx.kind() {
        ModelKind::Matrix { n } => {
            let g = DMatrix::from_fn(*n, *n, |_, _| rng.gaussian());
            ctx.from_matrix(&((&g + g.transpose()) * 0.5))
        }
        ModelKind::Spin { .. } => ctx.element(rng.gaussian_vec(ctx.coord_len())),
    }
}

/// Element with the given spectral values. In the spin model `values` has
/// one or two entries.
pub fn element_with_spectrum(ctx: &ModelContext, values: &[f64], rng: &mut SeededRng) -> Result<Element> {
    match ctx.kind() {
        ModelKind::Matrix { n } => {
            assert_eq!(values.len(), *n, "one spectral value per dimension");
            let q = random_orthogonal(*n, rng);
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values));
            ctx.from_matrix(&(&q * d * q.transpose()))
        }
        ModelKind::Spin { norm } => {
            let (lo, hi) = match values {
                [v] => (*v, *v),
                [a, b] => (a.min(*b), a.max(*b)),
                _ => panic!("spin spectra have one or two points"),
            };
            let y = rng.unit_dual(norm);
            let r = 0.5 * (hi - lo);
            let w: Vec<f64> = y.iter().map(|v| r * v).collect();
            ctx.spin_element(0.5 * (lo + hi), &w)
        }
    }
}

fn spectrum_len(ctx: &ModelContext) -> usize {
    match ctx.kind() {
        ModelKind::Matrix { n } => *n,
        ModelKind::Spin { .. } => 2,
    }
}

/// Effect whose spectral values are `0` (20%), `1` (10%) or uniform on
/// `[0, 1)`.
pub fn random_effect(ctx: &ModelContext, rng: &mut SeededRng) -> Result<Element> {
    let values: Vec<f64> = (0..spectrum_len(ctx))
        .map(|_| {
            let u = rng.uniform(0.0, 1.0);
            if u < 0.2 {
                0.0
            } else if u < 0.3 {
                1.0
            } else {
                rng.uniform(0.0, 1.0)
            }
        })
        .collect();
    element_with_spectrum(ctx, &values, rng)
}

/// Effect whose nonzero spectral values lie in `[lo, 1]`, with at least one
/// zero when the model has room for it.
pub fn effect_with_gap(ctx: &ModelContext, lo: f64, rng: &mut SeededRng) -> Result<Element> {
    let k = spectrum_len(ctx);
    let values: Vec<f64> = (0..k)
        .map(|i| if i == 0 || rng.chance(0.25) { 0.0 } else { rng.uniform(lo, 1.0) })
        .collect();
    element_with_spectrum(ctx, &values, rng)
}

/// Element with repeated spectral values drawn from a small integer palette,
/// so clusters and kernels are common. At most `n` distinct values.
pub fn random_clustered_element(ctx: &ModelContext, rng: &mut SeededRng) -> Result<Element> {
    const PALETTE: [f64; 6] = [-2.0, -1.0, 0.0, 0.0, 1.0, 3.0];
    let values: Vec<f64> = (0..spectrum_len(ctx))
        .map(|_| PALETTE[rng.index(PALETTE.len())])
        .collect();
    element_with_spectrum(ctx, &values, rng)
}

/// Projection onto a random subspace of uniformly drawn dimension, or in
/// the spin model `0` (10%), `1` (10%) or a random atom.
pub fn random_projection(ctx: &ModelContext, rng: &mut SeededRng) -> Result<Projection> {
    match ctx.kind() {
        ModelKind::Matrix { n } => {
            let k = rng.index(n + 1);
            let q = random_orthogonal(*n, rng);
            matrix_projection(ctx, &q, &(0..k).collect::<Vec<_>>())
        }
        ModelKind::Spin { norm } => {
            let u = rng.uniform(0.0, 1.0);
            let sp = if u < 0.1 {
                SpinProjection::Zero
            } else if u < 0.2 {
                SpinProjection::One
            } else {
                SpinProjection::Atom(rng.unit_dual(norm))
            };
            sp.to_projection(ctx)
        }
    }
}

/// Random atom (rank-one projection / spin atom).
pub fn random_atom(ctx: &ModelContext, rng: &mut SeededRng) -> Result<Projection> {
    match ctx.kind() {
        ModelKind::Matrix { n } => {
            let q = random_orthogonal(*n, rng);
            matrix_projection(ctx, &q, &[0])
        }
        ModelKind::Spin { norm } => SpinProjection::Atom(rng.unit_dual(norm)).to_projection(ctx),
    }
}

/// `Σ_{j ∈ cols} q_j q_jᵀ`.
fn matrix_projection(ctx: &ModelContext, q: &DMatrix<f64>, cols: &[usize]) -> Result<Projection> {
    let n = q.nrows();
    let mut m = DMatrix::zeros(n, n);
    for &j in cols {
        let c = q.column(j);
        m += c * c.transpose();
    }
    ctx.certify_projection(ctx.from_matrix(&m)?)
}

/// Pairwise orthogonal `p, q, r` (so `p + q + r <= 1`) inside one block.
pub fn random_orthogonal_triple(ctx: &ModelContext, rng: &mut SeededRng) -> Result<[Projection; 3]> {
    match ctx.kind() {
        ModelKind::Matrix { n } => {
            let q = random_orthogonal(*n, rng);
            // column j goes to p, q, r or nowhere
            let mut groups: [Vec<usize>; 4] = Default::default();
            for j in 0..*n {
                groups[rng.index(4)].push(j);
            }
            Ok([
                matrix_projection(ctx, &q, &groups[0])?,
                matrix_projection(ctx, &q, &groups[1])?,
                matrix_projection(ctx, &q, &groups[2])?,
            ])
        }
        ModelKind::Spin { norm } => {
            let atom = SpinProjection::Atom(rng.unit_dual(norm));
            let mut parts = if rng.chance(0.2) {
                vec![SpinProjection::One, SpinProjection::Zero, SpinProjection::Zero]
            } else {
                let third = if rng.chance(0.5) { SpinProjection::Zero } else { atom.complement() };
                vec![atom, third, SpinProjection::Zero]
            };
            // random order of the three slots
            for i in (1..3).rev() {
                let j = rng.index(i + 1);
                parts.swap(i, j);
            }
            Ok([
                parts[0].to_projection(ctx)?,
                parts[1].to_projection(ctx)?,
                parts[2].to_projection(ctx)?,
            ])
        }
    }
}

/// Candidate pool for block extension: the spectral projections of `count`
/// random elements drawn from `seed`.
pub fn spectral_pool(ctx: &ModelContext, seed: u64, count: usize) -> Result<Vec<Projection>> {
    let mut pool = Vec::new();
    for i in 0..count {
        let mut rng = SeededRng::substream(seed, i as u64);
        let a = random_element(ctx, &mut rng)?;
        pool.extend(ctx.spectrum(&a)?.points.into_iter().map(|p| p.projection));
    }
    Ok(pool)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_is_orthogonal() {
        let q = random_orthogonal(5, &mut SeededRng::new(3));
        assert!((q.transpose() * &q - DMatrix::identity(5, 5)).amax() < 1e-12);
    }

    #[test]
    fn generators_respect_their_contracts() {
        for ctx in [ModelContext::matrix(4).unwrap(), ModelContext::spin_lp(3.0, 3).unwrap()] {
            for t in 0..50 {
                let mut rng = SeededRng::substream(9, t);
                assert!(ctx.is_effect(&random_effect(&ctx, &mut rng).unwrap()).unwrap());
                let p = random_projection(&ctx, &mut rng).unwrap();
                assert!(ctx.certify_projection(p.into_element()).is_ok());
                let [p, q, r] = random_orthogonal_triple(&ctx, &mut rng).unwrap();
                let total = p.element() + q.element() + r.element();
                assert!(ctx.order_leq(&total, &ctx.unit()).unwrap());
                let c = random_clustered_element(&ctx, &mut rng).unwrap();
                assert!(ctx.spectrum(&c).unwrap().len() <= 4);
            }
        }
    }

    #[test]
    fn element_with_spectrum_round_trips() {
        let ctx = ModelContext::matrix(3).unwrap();
        let a = element_with_spectrum(&ctx, &[1.0, -2.0, 1.0], &mut SeededRng::new(0)).unwrap();
        let v = ctx.spectrum(&a).unwrap().values();
        assert_eq!(v.len(), 2);
        assert!((v[0] + 2.0).abs() < 1e-10 && (v[1] - 1.0).abs() < 1e-10);
        let spin = ModelContext::spin_lp(5.0, 2).unwrap();
        let b = element_with_spectrum(&spin, &[0.25, 2.0], &mut SeededRng::new(0)).unwrap();
        let v = spin.spectrum(&b).unwrap().values();
        assert!((v[0] - 0.25).abs() < 1e-12 && (v[1] - 2.0).abs() < 1e-12);
    }
}
