//! Break-even concentrations, boundary equilibria, the curves `F1`/`F2`,
//! the three-case classification, and the coexistence equilibrium.

use crate::error::{Error, Result};
use crate::growth::{GrowthModel, BioParams, Species};
use crate::roots;
use crate::Scalar;

/// Residual tolerance on the right-hand side at a reported steady state.
pub fn residual_tol<F: Scalar>() -> F {
    F::c(1e-8)
}

/// Tie band around case/region boundaries; comparisons closer than this
/// are reported as boundary/degenerate rather than forced into a case.
pub fn tie_band<F: Scalar>() -> F {
    F::c(1e-9)
}

/// A point `(S_in, D)` in the operating-parameter plane, both strictly
/// positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint<F> {
    pub s_in: F,
    pub d: F,
}

impl<F: Scalar> OperatingPoint<F> {
    pub fn new(s_in: F, d: F) -> Result<Self> {
        if !(s_in > F::zero()) || !s_in.is_finite() {
            return Err(Error::InvalidOperatingPoint(format!(
                "S_in must be strictly positive, got {s_in}"
            )));
        }
        if !(d > F::zero()) || !d.is_finite() {
            return Err(Error::InvalidOperatingPoint(format!(
                "D must be strictly positive, got {d}"
            )));
        }
        Ok(OperatingPoint { s_in, d })
    }

    pub fn removal_rate(&self, i: Species, p: &BioParams<F>) -> F {
        p.removal_rate(i, self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SteadyStateKind {
    /// Washout: both species extinct.
    E0,
    /// Only species 1 persists.
    E1,
    /// Only species 2 persists.
    E2,
    /// Coexistence of both species.
    Coexistence,
}

impl std::fmt::Display for SteadyStateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SteadyStateKind::E0 => write!(f, "E0"),
            SteadyStateKind::E1 => write!(f, "E1"),
            SteadyStateKind::E2 => write!(f, "E2"),
            SteadyStateKind::Coexistence => write!(f, "E*"),
        }
    }
}

/// A labeled equilibrium of the system together with the right-hand-side
/// residual at the reported state.
#[derive(Debug, Clone, Copy)]
pub struct SteadyState<F> {
    pub kind: SteadyStateKind,
    pub s: F,
    pub x1: F,
    pub x2: F,
    pub residual: F,
}

impl<F: Scalar> SteadyState<F> {
    pub fn state(&self) -> [F; 3] {
        [self.s, self.x1, self.x2]
    }
}

/// The four comparison values deciding the case classification.
#[derive(Debug, Clone, Copy)]
pub struct CaseValues<F> {
    pub x_tilde1: F,
    pub x_bar1: F,
    pub x_tilde2: F,
    pub x_bar2: F,
}

/// Relative position of the curve intercepts, deciding whether a
/// coexistence equilibrium exists.
///
/// Equality compares the variant only, not the attached values.
#[derive(Debug, Clone, Copy)]
pub enum CaseLabel<F> {
    /// `x_bar1 < x_tilde1` and `x_tilde2 < x_bar2`: species 1 excludes
    /// species 2.
    Case1(CaseValues<F>),
    /// Both `x_bar_i < x_tilde_i`: bistability with a unique coexistence
    /// equilibrium.
    Case2(CaseValues<F>),
    /// `x_tilde1 < x_bar1` and `x_bar2 < x_tilde2`: species 2 excludes
    /// species 1.
    Case3(CaseValues<F>),
    /// Some comparison sits inside the tie band; the point is degenerate.
    Boundary(CaseValues<F>),
    /// `S_in <= lambda_i(D)` for some `i`: the comparison values are not
    /// all defined.
    Undefined,
}

impl<F: Copy> CaseLabel<F> {
    pub fn values(&self) -> Option<CaseValues<F>> {
        match self {
            CaseLabel::Case1(v)
            | CaseLabel::Case2(v)
            | CaseLabel::Case3(v)
            | CaseLabel::Boundary(v) => Some(*v),
            CaseLabel::Undefined => None,
        }
    }

    pub fn is_case2(&self) -> bool {
        matches!(self, CaseLabel::Case2(_))
    }
}

impl<F> PartialEq for CaseLabel<F> {
    fn eq(&self, other: &Self) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}
impl<F> Eq for CaseLabel<F> {}

/// Break-even concentration `lambda_i(D)`: the substrate level at which
/// species `i`'s growth balances its removal rate. `None` when the growth
/// rate cannot reach the removal rate.
pub fn lambda<F: Scalar>(
    i: Species,
    dilution: F,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> Option<F> {
    let removal = p.removal_rate(i, dilution);
    if removal <= F::zero() || removal >= model.sup_rate(i) {
        return None;
    }
    let target = move |s: F| model.rate(i, s, F::zero()) - removal;
    roots::bisect_expanding(target, F::zero(), F::one(), roots::default_xtol(), 200)
}

/// `x_tilde_i = D (S_in - lambda_i(D)) / D_i`, the species-`i` level at the
/// boundary equilibrium. `None` when `lambda_i` is undefined.
pub fn x_tilde<F: Scalar>(
    i: Species,
    op: &OperatingPoint<F>,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> Option<F> {
    let lam = lambda(i, op.d, model, p)?;
    Some(op.d * (op.s_in - lam) / op.removal_rate(i, p))
}

/// `x_bar_i`: the unique root of `x -> f_j(S_in - D_i x / D, x) - D_j` on
/// `[0, D S_in / D_i]`. `None` when the strictly decreasing map has no sign
/// change there (i.e. `S_in <= lambda_j(D)`).
pub fn x_bar<F: Scalar>(
    i: Species,
    op: &OperatingPoint<F>,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> Option<F> {
    let j = i.other();
    let di = op.removal_rate(i, p);
    let dj = op.removal_rate(j, p);
    let g = move |x: F| model.rate(j, op.s_in - di * x / op.d, x) - dj;
    let hi = op.d * op.s_in / di;
    if g(F::zero()) <= F::zero() {
        return None;
    }
    // g(hi) = f_j(0, hi) - D_j = -D_j < 0, so a sign change is guaranteed.
    roots::bisect(g, F::zero(), hi, roots::default_xtol()).ok()
}

/// The level curve `F1` (for `which = One`) or `F2` (for `which = Two`):
/// the unique `x2` with `f1(S_in - D1 x1/D - D2 x2/D, x2) = D1`, resp.
/// `f2(S_in - D1 x1/D - D2 x2/D, x1) = D2`.
pub fn curve_f<F: Scalar>(
    which: Species,
    x1: F,
    op: &OperatingPoint<F>,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> Result<F> {
    let d1 = op.removal_rate(Species::One, p);
    let d2 = op.removal_rate(Species::Two, p);
    let domain_hi = match which {
        Species::One => x_tilde(Species::One, op, model, p),
        Species::Two => x_bar(Species::One, op, model, p),
    }
    .ok_or_else(|| Error::Domain(format!("curve {which:?} undefined at (S_in, D) = ({}, {})", op.s_in, op.d)))?;
    let slack = F::c(1e-9) * F::one().max(domain_hi);
    if x1 < -slack || x1 > domain_hi + slack {
        return Err(Error::Domain(format!(
            "x1 = {x1} outside curve domain [0, {domain_hi}]"
        )));
    }
    let x1 = x1.max(F::zero()).min(domain_hi);
    let substrate = move |x2: F| op.s_in - d1 * x1 / op.d - d2 * x2 / op.d;
    let g: Box<dyn Fn(F) -> F> = match which {
        Species::One => Box::new(move |x2: F| model.rate(Species::One, substrate(x2), x2) - d1),
        Species::Two => Box::new(move |x2: F| model.rate(Species::Two, substrate(x2), x1) - d2),
    };
    let hi = (op.d * op.s_in - d1 * x1) / d2;
    if g(F::zero()) <= F::zero() {
        // Root pinned at the axis (up to the argument tolerance).
        return Ok(F::zero());
    }
    roots::bisect(&*g, F::zero(), hi, roots::default_xtol())
}

/// Classifies the relative position of the curve intercepts per the sign
/// pattern of `(x_bar_i - x_tilde_i)`, cross-checked against the growth
/// rate inequalities at the boundary equilibria.
pub fn classify_case<F: Scalar>(
    op: &OperatingPoint<F>,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> Result<CaseLabel<F>> {
    let band = tie_band::<F>();
    let (lam1, lam2) = (
        lambda(Species::One, op.d, model, p),
        lambda(Species::Two, op.d, model, p),
    );
    let (lam1, lam2) = match (lam1, lam2) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(CaseLabel::Undefined),
    };
    if op.s_in <= lam1 + band || op.s_in <= lam2 + band {
        if op.s_in > lam1 - band && op.s_in > lam2 - band {
            // within the tie band of one of the lambda curves
            let zero = F::zero();
            return Ok(CaseLabel::Boundary(CaseValues {
                x_tilde1: zero,
                x_bar1: zero,
                x_tilde2: zero,
                x_bar2: zero,
            }));
        }
        return Ok(CaseLabel::Undefined);
    }

    let v = CaseValues {
        x_tilde1: x_tilde(Species::One, op, model, p).expect("lambda1 defined"),
        x_bar1: x_bar(Species::One, op, model, p)
            .ok_or_else(|| Error::Inconsistency("x_bar1 missing with S_in > lambda2".into()))?,
        x_tilde2: x_tilde(Species::Two, op, model, p).expect("lambda2 defined"),
        x_bar2: x_bar(Species::Two, op, model, p)
            .ok_or_else(|| Error::Inconsistency("x_bar2 missing with S_in > lambda1".into()))?,
    };
    let diff1 = v.x_bar1 - v.x_tilde1;
    let diff2 = v.x_bar2 - v.x_tilde2;
    if diff1.abs() <= band || diff2.abs() <= band {
        return Ok(CaseLabel::Boundary(v));
    }

    // Independent criterion: the equivalences via the growth rates at the
    // boundary equilibria.
    let d1 = op.removal_rate(Species::One, p);
    let d2 = op.removal_rate(Species::Two, p);
    let equiv1 = model.rate(Species::Two, lam1, op.d * (op.s_in - lam1) / d1) - d2;
    let equiv2 = model.rate(Species::One, lam2, op.d * (op.s_in - lam2) / d2) - d1;
    for (diff, equiv, name) in [(diff1, equiv1, "x_bar1 vs x_tilde1"), (diff2, equiv2, "x_bar2 vs x_tilde2")] {
        if equiv.abs() > band && diff.signum() != equiv.signum() {
            return Err(Error::Inconsistency(format!(
                "{name}: intercept comparison ({diff}) disagrees with growth-rate criterion ({equiv})"
            )));
        }
    }

    match (diff1 < F::zero(), diff2 < F::zero()) {
        (true, false) => Ok(CaseLabel::Case1(v)),
        (true, true) => Ok(CaseLabel::Case2(v)),
        (false, true) => Ok(CaseLabel::Case3(v)),
        (false, false) => Err(Error::Inconsistency(
            "impossible sign pattern: x_tilde_i < x_bar_i for both species".into(),
        )),
    }
}

/// All steady states at the given operating point: the washout always, the
/// boundary equilibria when `S_in > lambda_i(D)`, and the coexistence
/// equilibrium exactly in Case 2.
pub fn find_steady_states<F: Scalar>(
    op: &OperatingPoint<F>,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> Result<Vec<SteadyState<F>>> {
    let mut out = Vec::with_capacity(4);
    let mut push = |kind, s: F, x1: F, x2: F| {
        let rhs = crate::dynamics::rhs(&[s, x1, x2], op, model, p);
        let residual = rhs[0].abs().max(rhs[1].abs()).max(rhs[2].abs());
        out.push(SteadyState {
            kind,
            s,
            x1,
            x2,
            residual,
        });
    };

    push(SteadyStateKind::E0, op.s_in, F::zero(), F::zero());

    let lam1 = lambda(Species::One, op.d, model, p);
    if let Some(lam1) = lam1 {
        if op.s_in > lam1 {
            let xt1 = op.d * (op.s_in - lam1) / op.removal_rate(Species::One, p);
            push(SteadyStateKind::E1, lam1, xt1, F::zero());
        }
    }
    let lam2 = lambda(Species::Two, op.d, model, p);
    if let Some(lam2) = lam2 {
        if op.s_in > lam2 {
            let xt2 = op.d * (op.s_in - lam2) / op.removal_rate(Species::Two, p);
            push(SteadyStateKind::E2, lam2, F::zero(), xt2);
        }
    }

    if let CaseLabel::Case2(v) = classify_case(op, model, p)? {
        // F = F1 - F2 is strictly increasing on (0, x_bar1) with
        // F(0) = x_bar2 - x_tilde2 < 0 and F(x_bar1) = F1(x_bar1) > 0.
        let gap = |x1: F| -> Result<F> {
            Ok(curve_f(Species::One, x1, op, model, p)?
                - curve_f(Species::Two, x1, op, model, p)?)
        };
        let lo = F::zero();
        let hi = v.x_bar1;
        let glo = gap(lo)?;
        let ghi = gap(hi)?;
        if !(glo < F::zero() && ghi > F::zero()) {
            return Err(Error::Inconsistency(format!(
                "coexistence bracket lost its sign change: F(0)={glo}, F(x_bar1)={ghi}"
            )));
        }
        // Manual bisection: the map itself is Result-valued.
        let (mut lo, mut hi) = (lo, hi);
        let xtol = roots::default_xtol::<F>();
        let two = F::c(2.0);
        while hi - lo > xtol {
            let mid = (lo + hi) / two;
            if mid <= lo || mid >= hi {
                break;
            }
            if gap(mid)? < F::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x1 = (lo + hi) / two;
        let x2 = curve_f(Species::One, x1, op, model, p)?;
        let d1 = op.removal_rate(Species::One, p);
        let d2 = op.removal_rate(Species::Two, p);
        let s = op.s_in - d1 * x1 / op.d - d2 * x2 / op.d;
        if !(s > F::zero()) {
            return Err(Error::Inconsistency(format!(
                "coexistence substrate level not positive: S* = {s}"
            )));
        }
        push(SteadyStateKind::Coexistence, s, x1, x2);
    }

    Ok(out)
}
