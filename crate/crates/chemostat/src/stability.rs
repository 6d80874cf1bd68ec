//! Jacobian assembly and local stability classification of steady states.
//!
//! Each steady state is classified twice: once through the factored
//! characteristic polynomial (the cheap analytic route) and once through a
//! numeric eigenvalue solve of the full Jacobian. The two must agree
//! outside the marginal band.

use num_complex::Complex;

use crate::equilibria::{OperatingPoint, SteadyState, SteadyStateKind};
use crate::error::{Error, Result};
use crate::growth::{partials, BioParams, GrowthModel, Species};
use crate::Scalar;

/// Eigenvalue real parts (and analytic inequality residuals) within this
/// band of zero are reported as marginal rather than classified.
pub fn marginal_band<F: Scalar>() -> F {
    F::c(1e-9)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Locally exponentially stable.
    Les,
    Unstable,
    /// Within the marginal band of a stability boundary.
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// The characteristic polynomial factors into explicit roots (washout)
    /// or a linear times a positive quadratic factor (boundary states).
    FactoredPolynomial,
    /// Sign of the cubic coefficients (coexistence state).
    RouthHurwitz,
    /// Direct numeric eigenvalue solve.
    Eigenvalues,
}

/// Characteristic-polynomial data backing a classification.
#[derive(Debug, Clone, Copy)]
pub enum Coefficients<F> {
    /// Washout: the three explicit eigenvalues.
    Washout { eigs: [F; 3] },
    /// Boundary state: the transversal eigenvalue and the quadratic factor
    /// `lambda^2 + q1 lambda + q2` (both `q` coefficients are positive).
    Boundary { transversal: F, q1: F, q2: F },
    /// Coexistence state: cubic coefficients `c1, c2, c3`; `c3 < 0` always.
    Coexistence { c1: F, c2: F, c3: F },
}

#[derive(Debug, Clone, Copy)]
pub struct StabilityReport<F> {
    pub classification: Classification,
    pub method: Method,
    pub eigenvalues: [Complex<F>; 3],
    pub coefficients: Coefficients<F>,
}

/// Jacobian of the system at an arbitrary state.
pub fn jacobian<F: Scalar>(
    state: &[F; 3],
    op: &OperatingPoint<F>,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> [[F; 3]; 3] {
    let [s, x1, x2] = *state;
    let f1 = model.rate(Species::One, s, x2);
    let f2 = model.rate(Species::Two, s, x1);
    let d1 = op.removal_rate(Species::One, p);
    let d2 = op.removal_rate(Species::Two, p);
    let pt = partials(model, s, x1, x2);
    [
        [-op.d - x1 * pt.e - x2 * pt.f, -f1 + x2 * pt.h, x1 * pt.g - f2],
        [x1 * pt.e, f1 - d1, -x1 * pt.g],
        [x2 * pt.f, -x2 * pt.h, f2 - d2],
    ]
}

/// Eigenvalues of a 3x3 real matrix via the closed-form cubic solve,
/// sorted by real part descending.
pub fn eigenvalues<F: Scalar>(m: &[[F; 3]; 3]) -> Result<[Complex<F>; 3]> {
    for row in m {
        for v in row {
            if !v.is_finite() {
                return Err(Error::Domain("non-finite matrix entry".into()));
            }
        }
    }
    // Characteristic polynomial lambda^3 - tr lambda^2 + m2 lambda - det.
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minor = |a: usize, b: usize| m[a][a] * m[b][b] - m[a][b] * m[b][a];
    let m2 = minor(0, 1) + minor(0, 2) + minor(1, 2);
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut roots = cubic_roots(-tr, m2, -det);
    roots.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
    Ok(roots)
}

/// Roots of `x^3 + a x^2 + b x + c` with real coefficients.
fn cubic_roots<F: Scalar>(a: F, b: F, c: F) -> [Complex<F>; 3] {
    let third = F::one() / F::c(3.0);
    let shift = a * third;
    // depressed cubic t^3 + p t + q
    let p = b - a * a * third;
    let q = F::c(2.0) * a * a * a / F::c(27.0) - a * b * third + c;
    let half_q = q / F::c(2.0);
    let disc = half_q * half_q + p * p * p / F::c(27.0);
    let roots: [Complex<F>; 3];
    if disc > F::zero() {
        // one real root, one complex pair
        let sq = disc.sqrt();
        let u = cbrt(-half_q + sq);
        let v = cbrt(-half_q - sq);
        let t0 = u + v;
        let re = -t0 / F::c(2.0);
        let im = (u - v) * F::c(3.0).sqrt() / F::c(2.0);
        roots = [
            Complex::new(t0, F::zero()),
            Complex::new(re, im),
            Complex::new(re, -im),
        ];
    } else {
        // three real roots (trigonometric form)
        let r = (-p * third).max(F::zero()).sqrt();
        if r == F::zero() {
            roots = [Complex::new(F::zero(), F::zero()); 3];
        } else {
            let arg = (-half_q / (r * r * r)).max(-F::one()).min(F::one());
            let phi = arg.acos() * third;
            let two = F::c(2.0);
            let tau = F::c(2.0 * std::f64::consts::PI) * third;
            roots = [
                Complex::new(two * r * phi.cos(), F::zero()),
                Complex::new(two * r * (phi - tau).cos(), F::zero()),
                Complex::new(two * r * (phi + tau).cos(), F::zero()),
            ];
        }
    }
    roots.map(|t| t - Complex::new(shift, F::zero()))
}

fn cbrt<F: Scalar>(x: F) -> F {
    let third = F::one() / F::c(3.0);
    if x >= F::zero() {
        x.powf(third)
    } else {
        -(-x).powf(third)
    }
}

fn classify_real_parts<F: Scalar>(eigs: &[Complex<F>; 3], band: F) -> Classification {
    let max_re = eigs.iter().map(|e| e.re).fold(F::neg_infinity(), F::max);
    if max_re < -band {
        Classification::Les
    } else if max_re > band {
        Classification::Unstable
    } else {
        Classification::Marginal
    }
}

/// Classifies a steady state per the factored characteristic polynomials,
/// cross-checked against a numeric eigenvalue solve of the Jacobian.
pub fn classify<F: Scalar>(
    ss: &SteadyState<F>,
    op: &OperatingPoint<F>,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> Result<StabilityReport<F>> {
    if ss.residual > crate::equilibria::residual_tol::<F>() {
        return Err(Error::Domain(format!(
            "state is not an equilibrium: residual = {}",
            ss.residual
        )));
    }
    let band = marginal_band::<F>();
    let d1 = op.removal_rate(Species::One, p);
    let d2 = op.removal_rate(Species::Two, p);

    let (analytic, method, coefficients) = match ss.kind {
        SteadyStateKind::E0 => {
            let e1 = model.rate(Species::One, op.s_in, F::zero()) - d1;
            let e2 = model.rate(Species::Two, op.s_in, F::zero()) - d2;
            let eigs = [-op.d, e1, e2];
            let worst = e1.max(e2);
            let cls = if worst < -band {
                Classification::Les
            } else if worst > band {
                Classification::Unstable
            } else {
                Classification::Marginal
            };
            (cls, Method::FactoredPolynomial, Coefficients::Washout { eigs })
        }
        SteadyStateKind::E1 | SteadyStateKind::E2 => {
            let (i, di, dj, xi) = match ss.kind {
                SteadyStateKind::E1 => (Species::One, d1, d2, ss.x1),
                _ => (Species::Two, d2, d1, ss.x2),
            };
            let j = i.other();
            let lam = ss.s;
            let transversal = model.rate(j, lam, xi) - dj;
            let e = model.rate_ds(i, lam, F::zero());
            let q1 = op.d * (F::one() + e * (op.s_in - lam) / di);
            let q2 = op.d * e * (op.s_in - lam);
            if !(q1 > F::zero() && q2 > F::zero()) {
                return Err(Error::Inconsistency(format!(
                    "quadratic factor of {} lost positivity: q1={q1}, q2={q2}",
                    ss.kind
                )));
            }
            let cls = if transversal < -band {
                Classification::Les
            } else if transversal > band {
                Classification::Unstable
            } else {
                Classification::Marginal
            };
            (
                cls,
                Method::FactoredPolynomial,
                Coefficients::Boundary { transversal, q1, q2 },
            )
        }
        SteadyStateKind::Coexistence => {
            let pt = partials(model, ss.s, ss.x1, ss.x2);
            let (x1, x2) = (ss.x1, ss.x2);
            let c1 = op.d + pt.e * x1 + pt.f * x2;
            let c2 = d1 * pt.e * x1 + d2 * pt.f * x2
                - (pt.g * pt.h + pt.f * pt.g + pt.e * pt.h) * x1 * x2;
            let c3 = -(op.d * pt.g * pt.h + d1 * pt.f * pt.g + d2 * pt.e * pt.h) * x1 * x2;
            if !(c3 < F::zero()) {
                return Err(Error::Inconsistency(format!(
                    "coexistence cubic coefficient c3 = {c3} not negative"
                )));
            }
            (
                Classification::Unstable,
                Method::RouthHurwitz,
                Coefficients::Coexistence { c1, c2, c3 },
            )
        }
    };

    let jac = jacobian(&ss.state(), op, model, p);
    let eigs = eigenvalues(&jac)?;
    let numeric = classify_real_parts(&eigs, band);
    if analytic != numeric
        && analytic != Classification::Marginal
        && numeric != Classification::Marginal
    {
        return Err(Error::Inconsistency(format!(
            "{}: analytic route says {analytic:?}, eigenvalues say {numeric:?} (eigs = {eigs:?})",
            ss.kind
        )));
    }

    Ok(StabilityReport {
        classification: analytic,
        method,
        eigenvalues: eigs,
        coefficients,
    })
}
