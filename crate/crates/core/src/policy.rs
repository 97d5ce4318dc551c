//! Configurable realizations that spend the available slack.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dictionary::{weak_select, Selection};
use crate::element::{Element, Functional};
use crate::engine::{Realization, StepContext};
use crate::error::Result;
use crate::projection::{perturbed_approximant, Approximation};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionalRule {
    /// Norming functional of `f_{n-1}`.
    #[default]
    Exact,
    /// `(1 - s) F_x + s N` with a seeded random unit functional `N`, using the `delta` slack.
    Perturbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AtomRule {
    /// Maximizer of `F_{n-1}`.
    #[default]
    Greedy,
    /// Smallest `F_{n-1}(g)` still satisfying the weak-selection inequality.
    WeakestAdmissible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApproximantRule {
    /// Best approximant.
    #[default]
    Exact,
    /// Moves the best approximant along the latest atom until `||f - G||` uses
    /// 99.9% of the `(1 + eta) E + eta'` allowance.
    MaxSlack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Policy {
    pub functional: FunctionalRule,
    pub atom: AtomRule,
    pub approximant: ApproximantRule,
    pub seed: u64,
}

impl Policy {
    pub fn exact() -> Self {
        Policy::default()
    }

    /// Every rule set to spend its slack.
    pub fn adversarial(seed: u64) -> Self {
        Policy { functional: FunctionalRule::Perturbed, atom: AtomRule::WeakestAdmissible, approximant: ApproximantRule::MaxSlack, seed }
    }
}

const SLACK_USE: f64 = 0.999;

impl<T: Scalar> Realization<T> for Policy {
    fn functional(&mut self, ctx: &StepContext<T>) -> Result<Functional<T>> {
        let exact = ctx.space.norming_functional(ctx.residual)?;
        if self.functional == FunctionalRule::Exact {
            return Ok(exact);
        }
        let x = ctx.residual_norm;
        let slack = T::of(ctx.params.delta) * x + T::of(ctx.params.delta_prime);
        // F(x) >= (1 - 2s) ||x|| for a convex mix with a unit functional
        let s = (slack / (x + x)).min(T::one()) * T::of(SLACK_USE);
        if s <= T::zero() {
            return Ok(exact);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (ctx.n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut coeffs = Element::zero();
        for j in ctx.residual.support() {
            let v: f64 = StandardNormal.sample(&mut rng);
            coeffs.set(j, T::of(v))?;
        }
        let raw = Functional::new(coeffs, T::one());
        let dn = ctx.space.dual_norm(&raw)?;
        if dn == T::zero() {
            return Ok(exact);
        }
        let noise = Functional::new(raw.coeffs.scale(dn.recip()), T::one());
        Ok(exact.mix(&noise, s))
    }

    fn select(&mut self, ctx: &StepContext<T>, functional: &Functional<T>) -> Result<Selection<T>> {
        let (t, tp) = (T::of(ctx.params.t), T::of(ctx.params.t_prime));
        match self.atom {
            AtomRule::Greedy => weak_select(ctx.dict, functional, t, tp, None),
            AtomRule::WeakestAdmissible => ctx.dict.weakest_admissible(functional, t, tp),
        }
    }

    fn approximant(&mut self, ctx: &StepContext<T>, span: &[Element<T>], exact: &Approximation<T>) -> Result<(Element<T>, Element<T>)> {
        let (eta, eta_p) = (T::of(ctx.params.eta), T::of(ctx.params.eta_prime));
        let slack = eta * exact.error + eta_p;
        if self.approximant == ApproximantRule::Exact || slack <= T::zero() {
            return Ok((exact.g.clone(), exact.residual.clone()));
        }
        let d = span.last().expect("span holds the latest atom");
        let target = exact.error + T::of(SLACK_USE) * slack;
        let at = |m: T| -> Result<T> { ctx.space.norm(&exact.residual.axpy(-m, d)) };
        let mut hi = slack;
        let mut guard = 0;
        while at(hi)? < target && guard < 200 {
            hi = hi + hi;
            guard += 1;
        }
        let mut lo = T::zero();
        for _ in 0..80 {
            let mid = (lo + hi) * T::of(0.5);
            if at(mid)? <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        perturbed_approximant(ctx.space, span, exact, eta, eta_p, Some((d, lo)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::canonical_dictionary;
    use crate::engine::{run_gawcga, EngineOptions};
    use crate::schedule::{Schedules, SeqSpec};
    use crate::space::LqSpace;

    #[test]
    fn adversarial_policy_spends_slack() {
        let l2 = LqSpace::<f64>::new(2.0).unwrap();
        let dict = canonical_dictionary(&l2, 1, 6).unwrap();
        let f = Element::from_dense(1, &[1.0, -0.8, 0.6, 0.4, -0.2, 0.1]).unwrap();
        let c = SeqSpec::constant(0.1);
        let sched = Schedules {
            t: SeqSpec::constant(1.0),
            t_prime: c.clone(),
            delta: c.clone(),
            delta_prime: c.clone(),
            eta: c.clone(),
            eta_prime: c,
        };
        let opts = EngineOptions { max_steps: 3, ..Default::default() };
        let tr = run_gawcga(&l2, &dict, &f, &sched, &mut Policy::adversarial(7), &opts).unwrap();
        for s in &tr.steps {
            assert!(s.margin_functional >= -1e-9);
            assert!(s.margin_approx >= -1e-9 && s.margin_approx < 0.01);
            assert!(s.residual_norm > s.error);
            assert!(s.margin_select >= -1e-9);
        }
        let again = run_gawcga(&l2, &dict, &f, &sched, &mut Policy::adversarial(7), &opts).unwrap();
        assert_eq!(tr.residual_norms(), again.residual_norms());
    }

    #[test]
    fn exact_policy_matches_default() {
        let l3 = LqSpace::<f64>::new(3.0).unwrap();
        let dict = canonical_dictionary(&l3, 1, 4).unwrap();
        let f = Element::from_dense(1, &[0.3, -1.0, 0.7]).unwrap();
        let opts = EngineOptions::default();
        let a = run_gawcga(&l3, &dict, &f, &Schedules::default(), &mut Policy::exact(), &opts).unwrap();
        let b = run_gawcga(&l3, &dict, &f, &Schedules::default(), &mut crate::engine::ExactRealization, &opts).unwrap();
        assert_eq!(a.atom_ids(), b.atom_ids());
        assert_eq!(a.atom_ids(), vec![2, 3, 1]);
    }
}
