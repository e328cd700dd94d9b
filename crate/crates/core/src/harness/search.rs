//! Seeded counterexample search in spin factors.
//!
//! Each target measures how far a non-Euclidean spin factor is from being a
//! JB-algebra. A report passes when no sample reaches the threshold and
//! fails with the best witness otherwise.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ous::{Element, ModelContext};
use crate::report::VerificationReport;
use crate::rng::SeededRng;
use crate::spin::{self, NormOracle, SpinProjection};

/// Default witness threshold.
pub const SEARCH_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// Symmetry defect `|<z, x_y> - <y, x_z>|` of atom pairs.
    Eq7,
    /// `‖(a+b)∘c - a∘c - b∘c‖` of the quarter-square product.
    Bilinearity,
    /// `|<w, psi(y+z) - psi(y) - psi(z)>|`.
    PsiLinearity,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Eq7 => "eq7",
            Target::Bilinearity => "bilinearity",
            Target::PsiLinearity => "psi-linearity",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Target::Eq7, Target::Bilinearity, Target::PsiLinearity]
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown target `{s}`")))
    }
}

/// `(0, v)`: a dual vector packed as a spin element so witnesses share the
/// element text format.
fn vector_element(ctx: &ModelContext, v: &[f64]) -> Result<Element> {
    ctx.spin_element(0.0, v)
}

/// Unit primal vector: a Gaussian direction normalised in `‖·‖`.
fn unit_primal(norm: &NormOracle, rng: &mut SeededRng) -> Vec<f64> {
    loop {
        let v = rng.gaussian_vec(norm.dim());
        let r = norm.primal_norm(&v);
        if r > 1e-6 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

fn random_spin(ctx: &ModelContext, norm: &NormOracle, rng: &mut SeededRng) -> Result<Element> {
    let alpha = rng.gaussian();
    let y = rng.unit_dual(norm);
    ctx.spin_element(alpha, &y)
}

/// Draws sample `i` and returns its defect with the witness elements.
fn sample(ctx: &ModelContext, target: Target, rng: &mut SeededRng) -> Result<(f64, Vec<Element>)> {
    let norm = ctx.require_spin()?;
    match target {
        Target::Eq7 => {
            let p = SpinProjection::Atom(rng.unit_dual(norm));
            let q = SpinProjection::Atom(rng.unit_dual(norm));
            let gap = spin::jb_condition_gap(ctx, &p, &q)?;
            Ok((gap.symmetry_defect.unwrap_or(0.0), vec![p.to_element(ctx)?, q.to_element(ctx)?]))
        }
        Target::Bilinearity => {
            let (a, b, c) = (random_spin(ctx, norm, rng)?, random_spin(ctx, norm, rng)?, random_spin(ctx, norm, rng)?);
            let d = spin::bilinearity_defect(ctx, &a, &b, &c)?;
            Ok((d, vec![a, b, c]))
        }
        Target::PsiLinearity => {
            let y = rng.unit_dual(norm);
            let z = rng.unit_dual(norm);
            let w = unit_primal(norm, rng);
            let d = spin::psi_additivity_defect(norm, &y, &z, &w)?;
            Ok((d, vec![vector_element(ctx, &y)?, vector_element(ctx, &z)?, vector_element(ctx, &w)?]))
        }
    }
}

/// Recomputes the defect of a witness produced by [`find_counterexample`].
pub fn replay(ctx: &ModelContext, target: Target, elems: &[Element]) -> Result<f64> {
    let norm = ctx.require_spin()?;
    if elems.len() != if target == Target::Eq7 { 2 } else { 3 } {
        return Err(Error::Contract(format!("wrong witness arity for {target}")));
    }
    match target {
        Target::Eq7 => {
            let p = SpinProjection::classify(ctx, &elems[0])?;
            let q = SpinProjection::classify(ctx, &elems[1])?;
            Ok(spin::jb_condition_gap(ctx, &p, &q)?.symmetry_defect.unwrap_or(0.0))
        }
        Target::Bilinearity => spin::bilinearity_defect(ctx, &elems[0], &elems[1], &elems[2]),
        Target::PsiLinearity => {
            let v = |i: usize| elems[i].coords()[1..].to_vec();
            spin::psi_additivity_defect(norm, &v(0), &v(1), &v(2))
        }
    }
}

/// Samples `samples` seeded instances (sample `i` from
/// `SeededRng::substream(seed, i)`) and reports the largest defect.
pub fn find_counterexample(ctx: &ModelContext, target: Target, seed: u64, samples: u64, threshold: f64) -> Result<VerificationReport> {
    if samples == 0 {
        return Err(Error::Contract("samples must be at least 1".into()));
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_index = 0;
    let mut best_elems = Vec::new();
    let mut first_hit = None;
    for i in 0..samples {
        let mut rng = SeededRng::substream(seed, i);
        let (d, elems) = sample(ctx, target, &mut rng)?;
        if d >= threshold && first_hit.is_none() {
            first_hit = Some(i);
        }
        if d > best {
            best = d;
            best_index = i;
            best_elems = elems;
        }
    }
    let mut report = VerificationReport::new(format!("counterexample-{target}"), ctx.descriptor()).with_seed(seed, samples);
    report.config("target", target);
    report.config("threshold", format!("{threshold:e}"));
    report.config("samples", samples);
    report.check_le("defect", best, threshold);
    report.config("best_sample", best_index);
    match first_hit {
        Some(i) => {
            report.config("first_hit", i);
            let elems = best_elems.iter().map(|e| ctx.format_element(e)).collect::<Result<Vec<_>>>()?;
            report.witness(target.name(), best, elems);
        }
        None => report.note(format!("no sample reached the threshold in {samples} draws")),
    }
    report.finalize();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_has_no_witness() {
        let ctx = ModelContext::spin_lp(2.0, 3).unwrap();
        for t in [Target::Eq7, Target::Bilinearity, Target::PsiLinearity] {
            let r = find_counterexample(&ctx, t, 0, 500, SEARCH_THRESHOLD).unwrap();
            assert!(r.passed(), "{}", r.to_text());
            assert!(r.witnesses.is_empty());
        }
    }

    #[test]
    fn l3_witnesses_replay() {
        let ctx = ModelContext::spin_lp(3.0, 2).unwrap();
        for t in [Target::Eq7, Target::Bilinearity, Target::PsiLinearity] {
            let r = find_counterexample(&ctx, t, 0, 200, SEARCH_THRESHOLD).unwrap();
            assert!(!r.passed(), "{t}");
            let w = &r.witnesses[0];
            let elems: Vec<Element> = w.elements.iter().map(|s| crate::ous::parse_element(s).unwrap().1).collect();
            let v = replay(&ctx, t, &elems).unwrap();
            assert!((v - w.value).abs() <= 0.01 * w.value, "{t}: {v} vs {}", w.value);
        }
    }

    #[test]
    fn target_names() {
        assert_eq!("psi-linearity".parse::<Target>().unwrap(), Target::PsiLinearity);
        assert!("eq8".parse::<Target>().is_err());
    }
}
