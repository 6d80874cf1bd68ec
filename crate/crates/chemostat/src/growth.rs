//! Growth-rate abstraction and the shipped Monod-with-inhibition instance.
//!
//! A [`GrowthModel`] supplies, for each species, a growth rate `f_i(S, x_j)`
//! that vanishes at `S = 0`, increases in the substrate, and decreases in
//! the competitor's concentration. Anything satisfying those two conditions
//! can be plugged into the analysis modules; [`MonodInhibition`] is the
//! default concrete pair.

use crate::error::{Error, Result};
use crate::Scalar;

/// Index of one of the two competing species.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    One,
    Two,
}

impl Species {
    pub fn other(self) -> Species {
        match self {
            Species::One => Species::Two,
            Species::Two => Species::One,
        }
    }

    pub const BOTH: [Species; 2] = [Species::One, Species::Two];
}

/// The fixed biological constants of the model, plus optional yields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BioParams<F> {
    /// Maximum growth rates.
    pub m1: F,
    pub m2: F,
    /// Half-saturation constants.
    pub k1: F,
    pub k2: F,
    /// Inhibition factors: `beta1` is the inhibition of species 1 by
    /// species 2, and vice versa.
    pub beta1: F,
    pub beta2: F,
    /// Retention decoupling coefficients, in `[0, 1]`.
    pub alpha1: F,
    pub alpha2: F,
    /// Death rates.
    pub a1: F,
    pub a2: F,
    /// Yield coefficients, in `(0, 1]`.
    pub y1: F,
    pub y2: F,
}

/// Reference parameter set used in all worked examples.
impl<F: Scalar> Default for BioParams<F> {
    fn default() -> Self {
        BioParams {
            m1: F::c(4.0),
            m2: F::c(2.2),
            k1: F::c(1.5),
            k2: F::c(2.0),
            beta1: F::c(1.2),
            beta2: F::c(0.1),
            alpha1: F::c(0.2),
            alpha2: F::c(0.5),
            a1: F::c(0.8),
            a2: F::c(0.2),
            y1: F::one(),
            y2: F::one(),
        }
    }
}

impl<F: Scalar> BioParams<F> {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            (self.m1, "m1"),
            (self.m2, "m2"),
            (self.k1, "k1"),
            (self.k2, "k2"),
        ];
        for (v, name) in pos {
            if !(v > F::zero()) || !v.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        let nonneg = [
            (self.beta1, "beta1"),
            (self.beta2, "beta2"),
            (self.a1, "a1"),
            (self.a2, "a2"),
        ];
        for (v, name) in nonneg {
            if !(v >= F::zero()) || !v.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        for (v, name) in [(self.alpha1, "alpha1"), (self.alpha2, "alpha2")] {
            if !(v >= F::zero() && v <= F::one()) {
                return Err(Error::InvalidParams(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        for (y, name) in [(self.y1, "y1"), (self.y2, "y2")] {
            if !(y > F::zero() && y <= F::one()) {
                return Err(Error::InvalidParams(format!(
                    "{name} must lie in (0, 1], got {y}"
                )));
            }
        }
        for i in Species::BOTH {
            if self.alpha(i) == F::zero() && self.death_rate(i) == F::zero() {
                return Err(Error::InvalidParams(format!(
                    "species {i:?}: alpha and a cannot both be zero (removal rate would vanish)"
                )));
            }
        }
        Ok(())
    }

    pub fn max_rate(&self, i: Species) -> F {
        match i {
            Species::One => self.m1,
            Species::Two => self.m2,
        }
    }

    pub fn half_saturation(&self, i: Species) -> F {
        match i {
            Species::One => self.k1,
            Species::Two => self.k2,
        }
    }

    pub fn inhibition(&self, i: Species) -> F {
        match i {
            Species::One => self.beta1,
            Species::Two => self.beta2,
        }
    }

    pub fn alpha(&self, i: Species) -> F {
        match i {
            Species::One => self.alpha1,
            Species::Two => self.alpha2,
        }
    }

    pub fn death_rate(&self, i: Species) -> F {
        match i {
            Species::One => self.a1,
            Species::Two => self.a2,
        }
    }

    pub fn yield_coeff(&self, i: Species) -> F {
        match i {
            Species::One => self.y1,
            Species::Two => self.y2,
        }
    }

    /// Removal rate `D_i = alpha_i * D + a_i`.
    pub fn removal_rate(&self, i: Species, dilution: F) -> F {
        self.alpha(i) * dilution + self.death_rate(i)
    }
}

/// A pair of interspecific density-dependent growth rates.
///
/// `rate(i, s, x_other)` is the growth rate of species `i` at substrate
/// level `s` with the competing species at concentration `x_other`.
/// Implementations must guarantee `rate(i, 0, x) = 0`, a strictly positive
/// substrate partial, and a strictly negative competitor partial (for
/// `s, x > 0` where the inhibition is active).
///
/// The partials default to central finite differences with a
/// magnitude-scaled step; models with cheap closed forms should override
/// them.
pub trait GrowthModel<F: Scalar>: Send + Sync {
    fn rate(&self, i: Species, s: F, x_other: F) -> F;

    /// Limit of `rate(i, s, 0)` as `s -> infinity`; may be `infinity`.
    fn sup_rate(&self, i: Species) -> F;

    /// Partial derivative of the rate w.r.t. the substrate.
    fn rate_ds(&self, i: Species, s: F, x_other: F) -> F {
        let h = fd_step(s);
        let (sp, sm) = (s + h, (s - h).max(F::zero()));
        (self.rate(i, sp, x_other) - self.rate(i, sm, x_other)) / (sp - sm)
    }

    /// Partial derivative of the rate w.r.t. the other species.
    fn rate_dx(&self, i: Species, s: F, x_other: F) -> F {
        let h = fd_step(x_other);
        let (xp, xm) = (x_other + h, (x_other - h).max(F::zero()));
        (self.rate(i, s, xp) - self.rate(i, s, xm)) / (xp - xm)
    }
}

fn fd_step<F: Scalar>(at: F) -> F {
    F::c(1e-6) * F::one().max(at.abs())
}

/// The derivative data `E, F, G, H` entering every stability formula:
/// substrate partials of both rates and the (sign-flipped, hence positive)
/// competitor partials.
#[derive(Debug, Clone, Copy)]
pub struct Partials<F> {
    /// `d f1 / dS`
    pub e: F,
    /// `d f2 / dS`
    pub f: F,
    /// `-d f1 / d x2`
    pub g: F,
    /// `-d f2 / d x1`
    pub h: F,
}

pub fn partials<F: Scalar>(model: &dyn GrowthModel<F>, s: F, x1: F, x2: F) -> Partials<F> {
    Partials {
        e: model.rate_ds(Species::One, s, x2),
        f: model.rate_ds(Species::Two, s, x1),
        g: -model.rate_dx(Species::One, s, x2),
        h: -model.rate_dx(Species::Two, s, x1),
    }
}

/// `f_i(S, x) = m_i S / (K_i + S + beta_i x)`.
#[derive(Debug, Clone)]
pub struct MonodInhibition<F> {
    params: BioParams<F>,
}

impl<F: Scalar> MonodInhibition<F> {
    pub fn new(params: BioParams<F>) -> Result<Self> {
        params.validate()?;
        Ok(MonodInhibition { params })
    }

    pub fn params(&self) -> &BioParams<F> {
        &self.params
    }
}

impl<F: Scalar> GrowthModel<F> for MonodInhibition<F> {
    fn rate(&self, i: Species, s: F, x_other: F) -> F {
        let p = &self.params;
        p.max_rate(i) * s / (p.half_saturation(i) + s + p.inhibition(i) * x_other)
    }

    fn sup_rate(&self, i: Species) -> F {
        self.params.max_rate(i)
    }

    fn rate_ds(&self, i: Species, s: F, x_other: F) -> F {
        let p = &self.params;
        let denom = p.half_saturation(i) + s + p.inhibition(i) * x_other;
        p.max_rate(i) * (p.half_saturation(i) + p.inhibition(i) * x_other) / (denom * denom)
    }

    fn rate_dx(&self, i: Species, s: F, x_other: F) -> F {
        let p = &self.params;
        let denom = p.half_saturation(i) + s + p.inhibition(i) * x_other;
        -p.max_rate(i) * s * p.inhibition(i) / (denom * denom)
    }
}

/// Change of variables absorbing the yield coefficients: wraps a pair of
/// growth rates `mu_i` in the original species units and exposes
/// `f1(S, x2) = Y1 mu1(S, Y2 x2)`, `f2(S, x1) = Y2 mu2(S, Y1 x1)`.
///
/// With unit yields the wrapper is the identity.
#[derive(Debug, Clone)]
pub struct YieldRescaled<M> {
    inner: M,
    y1: f64,
    y2: f64,
}

impl<M> YieldRescaled<M> {
    pub fn new<F: Scalar>(inner: M, params: &BioParams<F>) -> Result<Self>
    where
        M: GrowthModel<F>,
    {
        for (y, name) in [(params.y1, "y1"), (params.y2, "y2")] {
            if !(y > F::zero() && y <= F::one()) {
                return Err(Error::InvalidParams(format!(
                    "{name} must lie in (0, 1], got {y}"
                )));
            }
        }
        Ok(YieldRescaled {
            inner,
            y1: params.y1.to_f64().unwrap(),
            y2: params.y2.to_f64().unwrap(),
        })
    }

    fn yields<F: Scalar>(&self, i: Species) -> (F, F) {
        let (y1, y2) = (F::c(self.y1), F::c(self.y2));
        match i {
            Species::One => (y1, y2),
            Species::Two => (y2, y1),
        }
    }
}

impl<F: Scalar, M: GrowthModel<F>> GrowthModel<F> for YieldRescaled<M> {
    fn rate(&self, i: Species, s: F, x_other: F) -> F {
        let (yi, yj) = self.yields::<F>(i);
        yi * self.inner.rate(i, s, yj * x_other)
    }

    fn sup_rate(&self, i: Species) -> F {
        let (yi, _) = self.yields::<F>(i);
        yi * self.inner.sup_rate(i)
    }

    fn rate_ds(&self, i: Species, s: F, x_other: F) -> F {
        let (yi, yj) = self.yields::<F>(i);
        yi * self.inner.rate_ds(i, s, yj * x_other)
    }

    fn rate_dx(&self, i: Species, s: F, x_other: F) -> F {
        let (yi, yj) = self.yields::<F>(i);
        yi * yj * self.inner.rate_dx(i, s, yj * x_other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model() -> MonodInhibition<f64> {
        MonodInhibition::new(BioParams::default()).unwrap()
    }

    #[test]
    fn rate_matches_hand_evaluation() {
        let m = model();
        assert_relative_eq!(m.rate(Species::One, 1.0, 0.0), 1.6, max_relative = 1e-12);
        assert_relative_eq!(
            m.rate(Species::Two, 1.0, 0.0),
            2.2 / 3.0,
            max_relative = 1e-12
        );
        assert_eq!(m.rate(Species::Two, 0.0, 5.0), 0.0);
    }

    #[test]
    fn partials_match_hand_differentiation() {
        let m = model();
        assert_relative_eq!(m.rate_ds(Species::One, 1.0, 0.0), 0.96, max_relative = 1e-12);
        assert_relative_eq!(
            m.rate_dx(Species::One, 1.0, 0.0),
            -0.768,
            max_relative = 1e-12
        );
        assert_eq!(m.rate_dx(Species::One, 0.0, 3.0), 0.0);
    }

    #[test]
    fn removal_rate_formula() {
        let p = BioParams::<f64>::default();
        assert_relative_eq!(p.removal_rate(Species::One, 0.7), 0.94);
        assert_relative_eq!(p.removal_rate(Species::Two, 0.7), 0.55);
        assert_relative_eq!(p.removal_rate(Species::One, 0.0), 0.8);
    }

    #[test]
    fn rejects_invalid_params() {
        let mut p = BioParams::<f64>::default();
        p.m1 = 0.0;
        assert!(MonodInhibition::new(p).is_err());

        let mut p = BioParams::<f64>::default();
        p.alpha1 = 0.0;
        p.a1 = 0.0;
        assert!(p.validate().is_err());

        let mut p = BioParams::<f64>::default();
        p.y2 = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn unit_yield_rescaling_is_identity() {
        let p = BioParams::<f64>::default();
        let scaled = YieldRescaled::new(model(), &p).unwrap();
        let base = model();
        for &(s, x) in &[(0.3, 0.1), (1.0, 0.0), (2.5, 3.0)] {
            for i in Species::BOTH {
                assert_eq!(scaled.rate(i, s, x), base.rate(i, s, x));
            }
        }
    }

    #[test]
    fn half_yield_rescaling_matches_substitution() {
        let mut p = BioParams::<f64>::default();
        p.y1 = 0.5;
        p.y2 = 0.8;
        let scaled = YieldRescaled::new(model(), &p).unwrap();
        let base = model();
        let (s, x2) = (0.9, 0.4);
        assert_relative_eq!(
            scaled.rate(Species::One, s, x2),
            0.5 * base.rate(Species::One, s, 0.8 * x2),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            scaled.rate(Species::Two, s, x2),
            0.8 * base.rate(Species::Two, s, 0.5 * x2),
            max_relative = 1e-14
        );
        assert_relative_eq!(scaled.sup_rate(Species::One), 2.0);
    }

    #[test]
    fn rescaled_model_keeps_hypotheses() {
        let mut p = BioParams::<f64>::default();
        p.y1 = 0.6;
        p.y2 = 0.9;
        let scaled = YieldRescaled::new(model(), &p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let s = rng.gen_range(1e-3..5.0);
            let x = rng.gen_range(1e-3..5.0);
            for i in Species::BOTH {
                assert_eq!(scaled.rate(i, 0.0, x), 0.0);
                assert!(scaled.rate_ds(i, s, x) > 0.0);
                assert!(scaled.rate_dx(i, s, x) < 0.0);
            }
        }
    }

    #[test]
    fn finite_difference_agreement_at_random_points() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let s: f64 = rng.gen_range(1e-3..10.0);
            let x = rng.gen_range(0.0..10.0);
            for i in Species::BOTH {
                let h = 1e-6 * s.max(1.0);
                let fd_s = (m.rate(i, s + h, x) - m.rate(i, s - h, x)) / (2.0 * h);
                let an_s = m.rate_ds(i, s, x);
                assert!((an_s - fd_s).abs() / an_s.abs().max(1.0) <= 1e-6);

                let h = 1e-6 * x.max(1.0);
                if x >= h {
                    let fd_x = (m.rate(i, s, x + h) - m.rate(i, s, x - h)) / (2.0 * h);
                    let an_x = m.rate_dx(i, s, x);
                    assert!((an_x - fd_x).abs() / an_x.abs().max(1.0) <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn rate_is_monotone_and_saturates() {
        let m = model();
        let grid: Vec<f64> = (0..50).map(|k| 0.05 + 0.2 * k as f64).collect();
        for i in Species::BOTH {
            for w in grid.windows(2) {
                // increasing in S at fixed x
                assert!(m.rate(i, w[1], 1.0) > m.rate(i, w[0], 1.0));
                // decreasing in x at fixed S
                assert!(m.rate(i, 1.0, w[1]) < m.rate(i, 1.0, w[0]));
            }
            for &s in &grid {
                assert!(m.rate(i, s, 0.0) < m.params().max_rate(i));
            }
        }
    }

    #[test]
    fn default_finite_difference_partials_are_close_to_analytic() {
        // A model that does not override the partials falls back to central
        // differences; compare against MonodInhibition's closed forms.
        struct Fd(MonodInhibition<f64>);
        impl GrowthModel<f64> for Fd {
            fn rate(&self, i: Species, s: f64, x: f64) -> f64 {
                self.0.rate(i, s, x)
            }
            fn sup_rate(&self, i: Species) -> f64 {
                self.0.sup_rate(i)
            }
        }
        let fd = Fd(model());
        let m = model();
        for &(s, x) in &[(0.4, 0.2), (1.3, 1.7), (3.0, 0.0)] {
            for i in Species::BOTH {
                assert_relative_eq!(
                    fd.rate_ds(i, s, x),
                    m.rate_ds(i, s, x),
                    max_relative = 1e-8
                );
                if x > 0.0 {
                    assert_relative_eq!(
                        fd.rate_dx(i, s, x),
                        m.rate_dx(i, s, x),
                        max_relative = 1e-8
                    );
                }
            }
        }
    }
}
