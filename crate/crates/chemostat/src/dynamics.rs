//! Trajectory integration of the full system and basin-of-attraction
//! probing.
//!
//! The integrator is an embedded Dormand-Prince 5(4) pair with standard
//! proportional step control. Integrations stop early once the state has
//! sat within `convergence_radius` of a known equilibrium for 50
//! consecutive accepted steps.

use rayon::prelude::*;

use crate::equilibria::{find_steady_states, OperatingPoint, SteadyState, SteadyStateKind};
use crate::error::{Error, Result};
use crate::growth::{BioParams, GrowthModel, Species};
use crate::Scalar;

/// Right-hand side of the model at a state `(S, x1, x2)`.
pub fn rhs<F: Scalar>(
    state: &[F; 3],
    op: &OperatingPoint<F>,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> [F; 3] {
    let [s, x1, x2] = *state;
    let f1 = model.rate(Species::One, s, x2);
    let f2 = model.rate(Species::Two, s, x1);
    [
        op.d * (op.s_in - s) - f1 * x1 - f2 * x2,
        (f1 - op.removal_rate(Species::One, p)) * x1,
        (f2 - op.removal_rate(Species::Two, p)) * x2,
    ]
}

#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig<F> {
    pub rtol: F,
    pub atol: F,
    pub h_init: F,
    pub h_max: F,
    pub t_end: F,
    /// Distance at which a trajectory is declared settled on an equilibrium.
    pub convergence_radius: F,
}

impl<F: Scalar> Default for IntegratorConfig<F> {
    fn default() -> Self {
        IntegratorConfig {
            rtol: F::c(1e-8),
            atol: F::c(1e-10),
            h_init: F::c(1e-3),
            h_max: F::c(5.0),
            t_end: F::c(500.0),
            convergence_radius: F::c(1e-6),
        }
    }
}

impl<F: Scalar> IntegratorConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > F::zero() && self.atol > F::zero()) {
            return Err(Error::InvalidParams("rtol and atol must be positive".into()));
        }
        if !(self.t_end > F::zero()) {
            return Err(Error::InvalidParams("t_end must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Attractor a trajectory ended on, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attractor {
    Equilibrium(SteadyStateKind),
    Unsettled,
}

#[derive(Debug, Clone)]
pub struct Trajectory<F> {
    pub times: Vec<F>,
    pub states: Vec<[F; 3]>,
    pub stats: StepStats,
    pub attractor: Attractor,
}

impl<F: Scalar> Trajectory<F> {
    pub fn last_state(&self) -> [F; 3] {
        *self.states.last().expect("trajectory is never empty")
    }

    /// CSV export: header `t,S,x1,x2`, one row per accepted step.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "t,S,x1,x2")?;
        for (t, st) in self.times.iter().zip(&self.states) {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_sig(*t),
                fmt_sig(st[0]),
                fmt_sig(st[1]),
                fmt_sig(st[2])
            )?;
        }
        Ok(())
    }
}

/// 12-significant-digit, locale-independent numeric formatting shared by
/// all CSV emitters.
pub fn fmt_sig<F: Scalar>(v: F) -> String {
    let v = v.to_f64().unwrap_or(f64::NAN);
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.11e}")
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const SETTLE_STEPS: usize = 50;

/// Integrates from `ic` until `t_end` or until the trajectory settles on a
/// known equilibrium. States are clamped to zero on output only; the
/// internal integrator state is never clamped.
pub fn integrate<F: Scalar>(
    ic: [F; 3],
    op: &OperatingPoint<F>,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
    cfg: &IntegratorConfig<F>,
) -> Result<Trajectory<F>> {
    cfg.validate()?;
    for v in ic {
        if !(v >= F::zero()) {
            return Err(Error::Domain(format!("initial condition has negative component: {v}")));
        }
    }
    let equilibria = find_steady_states(op, model, p)?;
    integrate_with_targets(ic, op, model, p, cfg, &equilibria)
}

fn dist<F: Scalar>(a: &[F; 3], b: &[F; 3]) -> F {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    (d0 * d0 + d1 * d1 + d2 * d2).sqrt()
}

fn clamp_nonneg<F: Scalar>(y: &[F; 3]) -> [F; 3] {
    [y[0].max(F::zero()), y[1].max(F::zero()), y[2].max(F::zero())]
}

pub(crate) fn integrate_with_targets<F: Scalar>(
    ic: [F; 3],
    op: &OperatingPoint<F>,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
    cfg: &IntegratorConfig<F>,
    equilibria: &[SteadyState<F>],
) -> Result<Trajectory<F>> {
    let mut t = F::zero();
    let mut y = ic;
    let mut h = cfg.h_init.min(cfg.h_max).min(cfg.t_end);
    let mut stats = StepStats::default();
    let mut times = vec![t];
    let mut states = vec![clamp_nonneg(&y)];
    let mut near: Option<(SteadyStateKind, usize)> = None;
    let mut attractor = Attractor::Unsettled;

    let f = |y: &[F; 3]| rhs(y, op, model, p);
    let mut k0 = f(&y);

    while t < cfg.t_end {
        h = h.min(cfg.t_end - t).min(cfg.h_max);
        if h < F::c(1e-14) * F::one().max(t.abs()) {
            return Err(Error::StepUnderflow {
                t: t.to_f64().unwrap_or(f64::NAN),
                s: y[0].to_f64().unwrap_or(f64::NAN),
                x1: y[1].to_f64().unwrap_or(f64::NAN),
                x2: y[2].to_f64().unwrap_or(f64::NAN),
            });
        }

        let mut k = [[F::zero(); 3]; 7];
        k[0] = k0;
        for stage in 0..6 {
            let mut yn = y;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                let a = F::c(A[stage][j]);
                for dim in 0..3 {
                    yn[dim] = yn[dim] + h * a * kj[dim];
                }
            }
            k[stage + 1] = f(&yn);
        }

        let mut y5 = y;
        let mut err = F::zero();
        for dim in 0..3 {
            let mut acc5 = F::zero();
            let mut acc4 = F::zero();
            for (j, kj) in k.iter().enumerate() {
                acc5 = acc5 + F::c(B5[j]) * kj[dim];
                acc4 = acc4 + F::c(B4[j]) * kj[dim];
            }
            y5[dim] = y[dim] + h * acc5;
            let y4 = y[dim] + h * acc4;
            let scale = cfg.atol + cfg.rtol * y[dim].abs().max(y5[dim].abs());
            let e = (y5[dim] - y4) / scale;
            err = err + e * e;
        }
        err = (err / F::c(3.0)).sqrt();

        if err <= F::one() {
            t = t + h;
            y = y5;
            k0 = k[6]; // FSAL
            stats.accepted += 1;
            times.push(t);
            states.push(clamp_nonneg(&y));

            let clamped = clamp_nonneg(&y);
            let mut hit = None;
            for eq in equilibria {
                if dist(&clamped, &eq.state()) < cfg.convergence_radius {
                    hit = Some(eq.kind);
                    break;
                }
            }
            near = match (hit, near) {
                (Some(kind), Some((prev, n))) if kind == prev => Some((kind, n + 1)),
                (Some(kind), _) => Some((kind, 1)),
                (None, _) => None,
            };
            if let Some((kind, n)) = near {
                if n >= SETTLE_STEPS {
                    attractor = Attractor::Equilibrium(kind);
                    break;
                }
            }
        } else {
            stats.rejected += 1;
        }

        let order = F::one() / F::c(5.0);
        let factor = if err == F::zero() {
            F::c(5.0)
        } else {
            (F::c(0.9) * err.powf(-order)).max(F::c(0.2)).min(F::c(5.0))
        };
        h = h * factor;
    }

    if attractor == Attractor::Unsettled {
        // horizon reached; label if the endpoint is already close
        let last = clamp_nonneg(&y);
        for eq in equilibria {
            if dist(&last, &eq.state()) < F::c(10.0) * cfg.convergence_radius {
                attractor = Attractor::Equilibrium(eq.kind);
                break;
            }
        }
    }

    Ok(Trajectory {
        times,
        states,
        stats,
        attractor,
    })
}

/// Integrates every initial condition and labels it with the equilibrium it
/// settles on, returning `(final state, attractor)` pairs. Runs in
/// parallel; the output order matches the input order.
pub fn basin_probe<F: Scalar>(
    op: &OperatingPoint<F>,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
    ic_grid: &[[F; 3]],
    cfg: &IntegratorConfig<F>,
) -> Result<Vec<([F; 3], Attractor)>> {
    let equilibria = find_steady_states(op, model, p)?;
    ic_grid
        .par_iter()
        .map(|ic| {
            integrate_with_targets(*ic, op, model, p, cfg, &equilibria)
                .map(|traj| (traj.last_state(), traj.attractor))
        })
        .collect()
}
