//! Operating diagram over `(S_in, D)`: boundary curves, region
//! classification, one-parameter bifurcation scans, and codimension-2
//! candidate points.

use rayon::prelude::*;

use crate::equilibria::{
    classify_case, find_steady_states, lambda, tie_band, CaseLabel, OperatingPoint,
    SteadyStateKind,
};
use crate::error::{Error, Result};
use crate::growth::{BioParams, GrowthModel, Species};
use crate::roots;
use crate::stability::{classify, Classification};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    /// Washout only.
    J0,
    /// Species 1 persists, species 2 cannot invade.
    J1,
    /// Species 2 persists, species 1 cannot invade.
    J2,
    /// Bistability of both boundary states, unstable coexistence state.
    J3,
    /// Both boundary states exist, species 2 wins.
    J4,
    /// Both boundary states exist, species 1 wins.
    J5,
    /// Within the tie band of a region boundary.
    Boundary,
}

impl std::fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegionLabel::J0 => "J0",
            RegionLabel::J1 => "J1",
            RegionLabel::J2 => "J2",
            RegionLabel::J3 => "J3",
            RegionLabel::J4 => "J4",
            RegionLabel::J5 => "J5",
            RegionLabel::Boundary => "boundary",
        };
        write!(f, "{s}")
    }
}

/// Existence and stability letters implied by a region label, in the order
/// (E0, E1, E2, E*). `None` means the steady state does not exist there.
pub type RegionProfile = [Option<Classification>; 4];

impl RegionLabel {
    pub fn profile(&self) -> Option<RegionProfile> {
        use Classification::{Les, Unstable};
        match self {
            RegionLabel::J0 => Some([Some(Les), None, None, None]),
            RegionLabel::J1 => Some([Some(Unstable), Some(Les), None, None]),
            RegionLabel::J2 => Some([Some(Unstable), None, Some(Les), None]),
            RegionLabel::J3 => Some([Some(Unstable), Some(Les), Some(Les), Some(Unstable)]),
            RegionLabel::J4 => Some([Some(Unstable), Some(Unstable), Some(Les), None]),
            RegionLabel::J5 => Some([Some(Unstable), Some(Les), Some(Unstable), None]),
            RegionLabel::Boundary => None,
        }
    }
}

/// A region label together with the steady-state profile it implies.
#[derive(Debug, Clone, Copy)]
pub struct OperatingRegion {
    pub label: RegionLabel,
    pub profile: Option<RegionProfile>,
}

/// The four curves separating the regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveId {
    /// `S_in = lambda_1(D)`.
    U1,
    /// `S_in = lambda_2(D)`.
    U2,
    /// `x_tilde_1 = x_bar_1`.
    U1c,
    /// `x_tilde_2 = x_bar_2`.
    U2c,
}

impl CurveId {
    pub const ALL: [CurveId; 4] = [CurveId::U1, CurveId::U2, CurveId::U1c, CurveId::U2c];

    /// Plot color per the diagram conventions.
    pub fn color(&self) -> &'static str {
        match self {
            CurveId::U1 => "black",
            CurveId::U2 => "blue",
            CurveId::U1c => "red",
            CurveId::U2c => "magenta",
        }
    }
}

impl std::fmt::Display for CurveId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CurveId::U1 => "U1",
            CurveId::U2 => "U2",
            CurveId::U1c => "U1c",
            CurveId::U2c => "U2c",
        };
        write!(f, "{s}")
    }
}

/// An ordered polyline of `(S_in, D)` samples on one boundary curve.
#[derive(Debug, Clone)]
pub struct BoundaryCurve<F> {
    pub id: CurveId,
    pub samples: Vec<(F, F)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BifurcationType {
    Transcritical,
}

/// A one-parameter bifurcation point: two steady states collide as `D`
/// crosses the value.
#[derive(Debug, Clone, Copy)]
pub struct BifurcationPoint<F> {
    pub d: F,
    pub kind: BifurcationType,
    pub pair: (SteadyStateKind, SteadyStateKind),
    pub curve: CurveId,
}

/// A candidate codimension-2 point: either a genuine intersection of two
/// boundary curves, or a point on `U1`/`U2` where the two non-critical
/// eigenvalues of the washout state sum to zero.
#[derive(Debug, Clone)]
pub struct Codim2Candidate<F> {
    pub s_in: F,
    pub d: F,
    pub curves: Vec<CurveId>,
    pub state: [F; 3],
}

/// Region label from the break-even comparisons, cross-validated against
/// the independently computed existence + stability profile.
pub fn classify_region<F: Scalar>(
    op: &OperatingPoint<F>,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> Result<OperatingRegion> {
    let band = tie_band::<F>();
    let lam1 = lambda(Species::One, op.d, model, p);
    let lam2 = lambda(Species::Two, op.d, model, p);
    // An undefined break-even concentration acts as +infinity: that species
    // can never reach its removal rate.
    let above = |lam: Option<F>| -> Option<bool> {
        match lam {
            Some(l) => {
                if (op.s_in - l).abs() <= band {
                    None
                } else {
                    Some(op.s_in > l)
                }
            }
            None => Some(false),
        }
    };
    let (Some(above1), Some(above2)) = (above(lam1), above(lam2)) else {
        return Ok(OperatingRegion {
            label: RegionLabel::Boundary,
            profile: None,
        });
    };

    let label = match (above1, above2) {
        (false, false) => RegionLabel::J0,
        (true, false) => RegionLabel::J1,
        (false, true) => RegionLabel::J2,
        (true, true) => match classify_case(op, model, p)? {
            CaseLabel::Case1(_) => RegionLabel::J5,
            CaseLabel::Case2(_) => RegionLabel::J3,
            CaseLabel::Case3(_) => RegionLabel::J4,
            CaseLabel::Boundary(_) => RegionLabel::Boundary,
            CaseLabel::Undefined => {
                return Err(Error::Inconsistency(
                    "case undefined although S_in > lambda_i for both species".into(),
                ))
            }
        },
    };

    let profile = label.profile();
    if let Some(expected) = profile {
        let computed = steady_state_profile(op, model, p)?;
        match computed {
            Some(computed) if computed == expected => {}
            Some(computed) => {
                return Err(Error::Inconsistency(format!(
                    "region {label} implies profile {expected:?} but computed {computed:?} at (S_in, D) = ({}, {})",
                    op.s_in, op.d
                )))
            }
            // A marginal classification near the boundary: report Boundary.
            None => {
                return Ok(OperatingRegion {
                    label: RegionLabel::Boundary,
                    profile: None,
                })
            }
        }
    }

    Ok(OperatingRegion { label, profile })
}

/// The full (E0, E1, E2, E*) profile at a point, `None` when any state is
/// classified marginal.
fn steady_state_profile<F: Scalar>(
    op: &OperatingPoint<F>,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> Result<Option<RegionProfile>> {
    let mut profile: RegionProfile = [None; 4];
    for ss in find_steady_states(op, model, p)? {
        let report = classify(&ss, op, model, p)?;
        if report.classification == Classification::Marginal {
            return Ok(None);
        }
        let slot = match ss.kind {
            SteadyStateKind::E0 => 0,
            SteadyStateKind::E1 => 1,
            SteadyStateKind::E2 => 2,
            SteadyStateKind::Coexistence => 3,
        };
        profile[slot] = Some(report.classification);
    }
    Ok(Some(profile))
}

/// `S_in` coordinate of a boundary curve at dilution rate `d`, when the
/// curve exists there.
pub fn curve_s_in<F: Scalar>(
    id: CurveId,
    d: F,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
    warm_start: Option<F>,
) -> Option<F> {
    match id {
        CurveId::U1 => lambda(Species::One, d, model, p),
        CurveId::U2 => lambda(Species::Two, d, model, p),
        CurveId::U1c => collision_curve_s_in(Species::One, d, model, p, warm_start),
        CurveId::U2c => collision_curve_s_in(Species::Two, d, model, p, warm_start),
    }
}

/// Solves `x_tilde_i(S_in, D) = x_bar_i(S_in, D)` for `S_in` at fixed `D`,
/// using the growth-rate form of the condition:
/// `f_j(lambda_i(D), D (S_in - lambda_i)/D_i) = D_j`.
fn collision_curve_s_in<F: Scalar>(
    i: Species,
    d: F,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
    warm_start: Option<F>,
) -> Option<F> {
    let j = i.other();
    let lam_i = lambda(i, d, model, p)?;
    let di = p.removal_rate(i, d);
    let dj = p.removal_rate(j, d);
    // Strictly decreasing in S_in; a root exists iff the value at
    // S_in = lambda_i is positive.
    let g = move |s_in: F| model.rate(j, lam_i, d * (s_in - lam_i) / di) - dj;
    if g(lam_i) <= F::zero() {
        return None;
    }
    let mut hi = warm_start
        .filter(|w| *w > lam_i)
        .unwrap_or(lam_i + F::one());
    let cap = F::c(1e9);
    while g(hi) > F::zero() {
        hi = hi * F::c(2.0);
        if hi > cap {
            return None;
        }
    }
    roots::bisect(g, lam_i, hi, roots::default_xtol()).ok()
}

/// Samples one boundary curve over a dilution range. Samples where the
/// curve does not exist are omitted.
pub fn trace_boundary<F: Scalar>(
    id: CurveId,
    d_range: (F, F),
    n: usize,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> Result<BoundaryCurve<F>> {
    if n < 2 {
        return Err(Error::InvalidParams("need at least 2 samples".into()));
    }
    let (d_lo, d_hi) = d_range;
    if !(d_lo > F::zero() && d_hi > d_lo) {
        return Err(Error::InvalidParams(format!(
            "invalid dilution range ({d_lo}, {d_hi})"
        )));
    }
    let mut samples = Vec::with_capacity(n);
    let mut warm = None;
    let step = (d_hi - d_lo) / F::from_usize(n - 1).unwrap();
    for k in 0..n {
        let d = d_lo + step * F::from_usize(k).unwrap();
        // warm start from the previous solution; fall back to a fresh
        // bracket when continuation loses the root
        let s_in = curve_s_in(id, d, model, p, warm)
            .or_else(|| curve_s_in(id, d, model, p, None));
        if let Some(s_in) = s_in {
            samples.push((s_in, d));
            warm = Some(s_in * F::c(2.0));
        } else {
            warm = None;
        }
    }
    Ok(BoundaryCurve { id, samples })
}

/// Residual of a curve's defining equation at a point.
pub fn curve_residual<F: Scalar>(
    id: CurveId,
    s_in: F,
    d: F,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> Option<F> {
    match id {
        CurveId::U1 => lambda(Species::One, d, model, p).map(|l| s_in - l),
        CurveId::U2 => lambda(Species::Two, d, model, p).map(|l| s_in - l),
        CurveId::U1c | CurveId::U2c => {
            let i = if id == CurveId::U1c {
                Species::One
            } else {
                Species::Two
            };
            let j = i.other();
            let lam_i = lambda(i, d, model, p)?;
            let di = p.removal_rate(i, d);
            let dj = p.removal_rate(j, d);
            Some(model.rate(j, lam_i, d * (s_in - lam_i) / di) - dj)
        }
    }
}

/// Transcritical bifurcation points along a vertical line `S_in = const`:
/// sign changes of the four curve indicators in `D`, refined by bisection.
/// Output is sorted by decreasing `D`.
pub fn scan_dilution<F: Scalar>(
    s_in: F,
    d_range: (F, F),
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> Result<Vec<BifurcationPoint<F>>> {
    scan_dilution_with_grid(s_in, d_range, 2000, model, p)
}

pub fn scan_dilution_with_grid<F: Scalar>(
    s_in: F,
    d_range: (F, F),
    n_grid: usize,
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> Result<Vec<BifurcationPoint<F>>> {
    let (d_lo, d_hi) = d_range;
    if !(s_in > F::zero() && d_lo > F::zero() && d_hi > d_lo) {
        return Err(Error::InvalidParams("invalid scan range".into()));
    }
    use SteadyStateKind::*;
    let specs: [(CurveId, (SteadyStateKind, SteadyStateKind)); 4] = [
        (CurveId::U1, (E0, E1)),
        (CurveId::U2, (E0, E2)),
        (CurveId::U1c, (E1, Coexistence)),
        (CurveId::U2c, (E2, Coexistence)),
    ];

    // log-spaced grid: the critical values can span an order of magnitude
    let ratio = (d_hi / d_lo).ln();
    let grid: Vec<F> = (0..=n_grid)
        .map(|k| d_lo * (ratio * F::from_usize(k).unwrap() / F::from_usize(n_grid).unwrap()).exp())
        .collect();

    let mut out = Vec::new();
    for (curve, pair) in specs {
        let indicator = |d: F| -> Option<F> {
            match curve {
                CurveId::U1 => lambda(Species::One, d, model, p).map(|l| s_in - l),
                CurveId::U2 => lambda(Species::Two, d, model, p).map(|l| s_in - l),
                CurveId::U1c | CurveId::U2c => {
                    let i = if curve == CurveId::U1c {
                        Species::One
                    } else {
                        Species::Two
                    };
                    let lam = lambda(i, d, model, p)?;
                    // the collision indicator only makes sense where the
                    // boundary equilibrium exists
                    (s_in > lam).then(|| curve_residual(curve, s_in, d, model, p))?
                }
            }
        };
        let mut prev: Option<(F, F)> = None;
        for &d in &grid {
            let val = indicator(d);
            if let (Some((d0, v0)), Some(v1)) = (prev, val) {
                if v0.signum() != v1.signum() && v0 != F::zero() {
                    let refined = roots::bisect(
                        |d| indicator(d).unwrap_or(v0),
                        d0,
                        d,
                        F::c(1e-8),
                    )?;
                    out.push(BifurcationPoint {
                        d: refined,
                        kind: BifurcationType::Transcritical,
                        pair,
                        curve,
                    });
                }
            }
            if let Some(v) = val {
                prev = Some((d, v));
            } else {
                prev = None;
            }
        }
    }
    out.sort_by(|a, b| b.d.partial_cmp(&a.d).unwrap());
    Ok(out)
}

/// One row of the existence/stability table along a dilution sweep.
#[derive(Debug, Clone)]
pub struct BranchRow<F> {
    pub d: F,
    /// (E0, E1, E2, E*) entries; `None` where the state does not exist.
    pub profile: RegionProfile,
    pub states: Vec<crate::equilibria::SteadyState<F>>,
}

/// Existence and stability of every steady state at each requested `D`.
pub fn branch_table<F: Scalar>(
    s_in: F,
    d_values: &[F],
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> Result<Vec<BranchRow<F>>> {
    d_values
        .iter()
        .map(|&d| {
            let op = OperatingPoint::new(s_in, d)?;
            let states = find_steady_states(&op, model, p)?;
            let mut profile: RegionProfile = [None; 4];
            for ss in &states {
                let report = classify(ss, &op, model, p)?;
                let slot = match ss.kind {
                    SteadyStateKind::E0 => 0,
                    SteadyStateKind::E1 => 1,
                    SteadyStateKind::E2 => 2,
                    SteadyStateKind::Coexistence => 3,
                };
                profile[slot] = Some(report.classification);
            }
            Ok(BranchRow {
                d,
                profile,
                states,
            })
        })
        .collect()
}

/// A rasterized operating diagram: cell-center labels plus the traced
/// boundary curves.
#[derive(Debug, Clone)]
pub struct DiagramGrid<F> {
    pub s_in_values: Vec<F>,
    pub d_values: Vec<F>,
    /// Row-major, indexed `[d_index * s_in_values.len() + s_in_index]`.
    pub labels: Vec<RegionLabel>,
    pub curves: Vec<BoundaryCurve<F>>,
}

/// Labels every cell center of a `(S_in, D)` window in parallel and traces
/// the four boundary curves across it.
pub fn grid_diagram<F: Scalar>(
    s_in_range: (F, F),
    d_range: (F, F),
    resolution: (usize, usize),
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
) -> Result<DiagramGrid<F>> {
    let (ns, nd) = resolution;
    if ns < 2 || nd < 2 {
        return Err(Error::InvalidParams("resolution must be at least 2 per axis".into()));
    }
    let centers = |lo: F, hi: F, n: usize| -> Vec<F> {
        let width = (hi - lo) / F::from_usize(n).unwrap();
        (0..n)
            .map(|k| lo + width * (F::from_usize(k).unwrap() + F::c(0.5)))
            .collect()
    };
    let s_in_values = centers(s_in_range.0.max(F::zero()), s_in_range.1, ns);
    let d_values = centers(d_range.0.max(F::zero()), d_range.1, nd);

    let labels: Result<Vec<RegionLabel>> = d_values
        .par_iter()
        .flat_map(|&d| {
            s_in_values
                .par_iter()
                .map(move |&s_in| match OperatingPoint::new(s_in, d) {
                    Ok(op) => classify_region(&op, model, p).map(|r| r.label),
                    // cell centers on the axes cannot be classified
                    Err(_) => Ok(RegionLabel::Boundary),
                })
        })
        .collect();

    let curves = CurveId::ALL
        .iter()
        .map(|&id| trace_boundary(id, (d_values[0], *d_values.last().unwrap()), 4 * nd, model, p))
        .collect::<Result<Vec<_>>>()?;

    Ok(DiagramGrid {
        s_in_values,
        d_values,
        labels: labels?,
        curves,
    })
}

/// Codimension-2 candidate points within a dilution range: pairwise
/// intersections of the boundary curves, plus points on `U1`/`U2` where
/// the washout Jacobian's two non-critical eigenvalues sum to zero.
pub fn codim2_candidates<F: Scalar>(
    model: &dyn GrowthModel<F>,
    p: &BioParams<F>,
    d_range: (F, F),
) -> Result<Vec<Codim2Candidate<F>>> {
    let (d_lo, d_hi) = d_range;
    if !(d_lo > F::zero() && d_hi > d_lo) {
        return Err(Error::InvalidParams("invalid dilution range".into()));
    }
    let n_grid = 400;
    let step = (d_hi - d_lo) / F::from_usize(n_grid).unwrap();
    let grid: Vec<F> = (0..=n_grid)
        .map(|k| d_lo + step * F::from_usize(k).unwrap())
        .collect();

    let mut found: Vec<Codim2Candidate<F>> = Vec::new();
    let mut add = |s_in: F, d: F, curves: &[CurveId]| {
        let merge_tol = F::c(1e-6);
        for existing in &mut found {
            if (existing.s_in - s_in).abs() < merge_tol && (existing.d - d).abs() < merge_tol {
                for &c in curves {
                    if !existing.curves.contains(&c) {
                        existing.curves.push(c);
                    }
                }
                return;
            }
        }
        found.push(Codim2Candidate {
            s_in,
            d,
            curves: curves.to_vec(),
            state: [s_in, F::zero(), F::zero()],
        });
    };

    // pairwise curve intersections
    for (ai, &a) in CurveId::ALL.iter().enumerate() {
        for &b in &CurveId::ALL[ai + 1..] {
            let gap = |d: F| -> Option<F> {
                Some(curve_s_in(a, d, model, p, None)? - curve_s_in(b, d, model, p, None)?)
            };
            let mut prev: Option<(F, F)> = None;
            for &d in &grid {
                let val = gap(d);
                if let (Some((d0, v0)), Some(v1)) = (prev, val) {
                    if v0.signum() != v1.signum() || v1 == F::zero() {
                        if let Ok(d_star) =
                            roots::bisect(|d| gap(d).unwrap_or(v0), d0, d, F::c(1e-10))
                        {
                            if let Some(s_star) = curve_s_in(a, d_star, model, p, None) {
                                add(s_star, d_star, &[a, b]);
                            }
                        }
                    }
                }
                prev = val.map(|v| (d, v));
            }
        }
    }

    // eigenvalue-sum degeneracies along the two transcritical curves: at
    // the washout state on U_i the eigenvalues are (-D, 0, e_j); a zero
    // pair sum -D + e_j = 0 marks a resonance candidate
    for (id, i) in [(CurveId::U1, Species::One), (CurveId::U2, Species::Two)] {
        let j = i.other();
        let res = |d: F| -> Option<F> {
            let lam = lambda(i, d, model, p)?;
            Some(model.rate(j, lam, F::zero()) - p.removal_rate(j, d) - d)
        };
        let mut prev: Option<(F, F)> = None;
        for &d in &grid {
            let val = res(d);
            if let (Some((d0, v0)), Some(v1)) = (prev, val) {
                if v0.signum() != v1.signum() {
                    if let Ok(d_star) = roots::bisect(|d| res(d).unwrap_or(v0), d0, d, F::c(1e-10))
                    {
                        if let Some(s_star) = lambda(i, d_star, model, p) {
                            add(s_star, d_star, &[id]);
                        }
                    }
                }
            }
            prev = val.map(|v| (d, v));
        }
    }

    found.sort_by(|a, b| b.d.partial_cmp(&a.d).unwrap());
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::MonodInhibition;

    fn setup() -> (MonodInhibition<f64>, BioParams<f64>) {
        let p = BioParams::default();
        (MonodInhibition::new(p).unwrap(), p)
    }

    #[test]
    fn region_labels_at_reference_points() {
        let (m, p) = setup();
        for (d, want) in [(0.7, RegionLabel::J5), (0.5, RegionLabel::J3), (0.2, RegionLabel::J4)] {
            let op = OperatingPoint::new(1.0, d).unwrap();
            assert_eq!(classify_region(&op, &m, &p).unwrap().label, want);
        }
        let op = OperatingPoint::new(1.0, 5.0).unwrap();
        assert_eq!(classify_region(&op, &m, &p).unwrap().label, RegionLabel::J0);
    }

    #[test]
    fn vertical_line_crosses_regions_in_order() {
        let (m, p) = setup();
        // interval midpoints between the four critical values at S_in = 1
        let expected = [
            (4.5, RegionLabel::J0),
            (2.0, RegionLabel::J1),
            (0.85, RegionLabel::J5),
            (0.5, RegionLabel::J3),
            (0.2, RegionLabel::J4),
        ];
        for (d, want) in expected {
            let op = OperatingPoint::new(1.0, d).unwrap();
            assert_eq!(classify_region(&op, &m, &p).unwrap().label, want, "at D={d}");
        }
    }

    #[test]
    fn u1_passes_through_known_point() {
        let (m, p) = setup();
        let s = curve_s_in(CurveId::U1, 0.7, &m, &p, None).unwrap();
        assert!((s - 0.4607).abs() < 1e-4);
        let s = curve_s_in(CurveId::U2, 0.361063, &m, &p, None).unwrap();
        assert!((s - 0.418289).abs() < 1e-4);
    }

    #[test]
    fn collision_curves_pass_through_sigma_points() {
        let (m, p) = setup();
        let s = curve_s_in(CurveId::U1c, 0.352069, &m, &p, None).unwrap();
        assert!((s - 1.0).abs() < 1e-4, "U1c at sigma4: {s}");
        let s = curve_s_in(CurveId::U2c, 0.644734, &m, &p, None).unwrap();
        assert!((s - 1.0).abs() < 1e-4, "U2c at sigma3: {s}");
    }

    #[test]
    fn traced_curves_satisfy_their_equations() {
        let (m, p) = setup();
        for id in CurveId::ALL {
            let curve = trace_boundary(id, (0.05, 2.0), 50, &m, &p).unwrap();
            for &(s_in, d) in &curve.samples {
                let res = curve_residual(id, s_in, d, &m, &p).unwrap();
                assert!(res.abs() <= 1e-8, "{id} residual {res} at ({s_in}, {d})");
            }
        }
    }

    #[test]
    fn empty_curve_range_is_not_an_error() {
        let (m, p) = setup();
        // U2c requires lambda_2 > lambda_1, which fails below D = 0.361
        let curve = trace_boundary(CurveId::U2c, (0.05, 0.3), 20, &m, &p).unwrap();
        assert!(curve.samples.is_empty());
    }

    #[test]
    fn dilution_scan_finds_the_four_critical_values() {
        let (m, p) = setup();
        let points = scan_dilution(1.0, (0.05, 5.0), &m, &p).unwrap();
        assert_eq!(points.len(), 4);
        let expected = [
            (4.0, (SteadyStateKind::E0, SteadyStateKind::E1)),
            (1.0666, (SteadyStateKind::E0, SteadyStateKind::E2)),
            (0.6447, (SteadyStateKind::E2, SteadyStateKind::Coexistence)),
            (0.352, (SteadyStateKind::E1, SteadyStateKind::Coexistence)),
        ];
        for (pt, (d, pair)) in points.iter().zip(expected) {
            assert!((pt.d - d).abs() < 5e-3, "expected {d}, got {}", pt.d);
            assert_eq!(pt.pair, pair);
            assert_eq!(pt.kind, BifurcationType::Transcritical);
        }
    }

    #[test]
    fn dilution_scan_is_stable_under_grid_doubling() {
        let (m, p) = setup();
        let coarse = scan_dilution_with_grid(1.0, (0.05, 5.0), 2000, &m, &p).unwrap();
        let fine = scan_dilution_with_grid(1.0, (0.05, 5.0), 4000, &m, &p).unwrap();
        assert_eq!(coarse.len(), fine.len());
        for (a, b) in coarse.iter().zip(&fine) {
            assert!((a.d - b.d).abs() < 1e-6);
        }
    }

    #[test]
    fn scan_on_low_feed_line_may_be_empty() {
        let (m, p) = setup();
        let points = scan_dilution(0.1, (1.0, 5.0), &m, &p).unwrap();
        assert!(points.is_empty());
    }

    #[test]
    fn branch_rows_match_expected_profiles() {
        use Classification::*;
        let (m, p) = setup();
        let rows = branch_table(1.0, &[5.0, 2.0, 0.85, 0.45, 0.2], &m, &p).unwrap();
        let want: [[Option<Classification>; 4]; 5] = [
            [Some(Les), None, None, None],
            [Some(Unstable), Some(Les), None, None],
            [Some(Unstable), Some(Les), Some(Unstable), None],
            [Some(Unstable), Some(Les), Some(Les), Some(Unstable)],
            [Some(Unstable), Some(Unstable), Some(Les), None],
        ];
        for (row, want) in rows.iter().zip(want) {
            assert_eq!(row.profile, want, "at D={}", row.d);
        }
    }

    #[test]
    fn crossing_each_sigma_changes_exactly_the_predicted_pair() {
        let (m, p) = setup();
        let points = scan_dilution(1.0, (0.05, 5.0), &m, &p).unwrap();
        for pt in &points {
            let eps = 1e-3;
            let rows = branch_table(1.0, &[pt.d + eps, pt.d - eps], &m, &p).unwrap();
            let (above, below) = (&rows[0].profile, &rows[1].profile);
            let slot = |k: SteadyStateKind| match k {
                SteadyStateKind::E0 => 0,
                SteadyStateKind::E1 => 1,
                SteadyStateKind::E2 => 2,
                SteadyStateKind::Coexistence => 3,
            };
            let changed: Vec<usize> = (0..4).filter(|&s| above[s] != below[s]).collect();
            let allowed = [slot(pt.pair.0), slot(pt.pair.1)];
            // every change involves the colliding pair, and the branch that
            // appears or exchanges stability definitely changes: E0 may keep
            // its classification when the other break-even is already crossed
            assert!(
                !changed.is_empty() && changed.iter().all(|s| allowed.contains(s)),
                "at sigma = {}: changed {changed:?}, pair {allowed:?}",
                pt.d
            );
            assert!(changed.contains(&allowed[1]), "at sigma = {}", pt.d);
        }
    }

    #[test]
    fn small_grid_contains_expected_labels() {
        let (m, p) = setup();
        let grid = grid_diagram((0.0, 1.0), (0.0, 2.0), (40, 40), &m, &p).unwrap();
        assert_eq!(grid.labels.len(), 1600);
        for want in [
            RegionLabel::J0,
            RegionLabel::J1,
            RegionLabel::J2,
            RegionLabel::J3,
            RegionLabel::J4,
            RegionLabel::J5,
        ] {
            assert!(grid.labels.contains(&want), "missing {want}");
        }
        assert_eq!(grid.curves.len(), 4);
    }

    #[test]
    fn codim2_candidates_include_the_quadruple_point() {
        let (m, p) = setup();
        let cands = codim2_candidates(&m, &p, (0.02, 2.0)).unwrap();
        let quad = cands
            .iter()
            .find(|c| (c.d - 0.361063).abs() < 1e-4)
            .expect("quadruple point present");
        assert!((quad.s_in - 0.418289).abs() < 1e-4);
        assert_eq!(quad.state, [quad.s_in, 0.0, 0.0]);
        assert!(quad.curves.contains(&CurveId::U1) && quad.curves.contains(&CurveId::U2));

        let second = cands
            .iter()
            .find(|c| (c.d - 0.1046).abs() < 1e-3)
            .expect("second candidate present");
        assert!((second.s_in - 0.387348).abs() < 1e-4);
    }

    #[test]
    fn codim2_range_without_candidates_is_empty() {
        let (m, p) = setup();
        let cands = codim2_candidates(&m, &p, (1.0, 2.0)).unwrap();
        assert!(cands.is_empty());
    }
}
