//! Minimal self-contained SVG emitters: everything is inline styles and a
//! viewbox fitted to the data window.

use chemostat::diagram::{
    BifurcationPoint, BranchRow, Codim2Candidate, DiagramGrid, RegionLabel,
};
use chemostat::dynamics::Trajectory;
use chemostat::equilibria::{SteadyState, SteadyStateKind};
use chemostat::stability::Classification;
use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 50.0;

/// Data window -> pixel mapping with a fixed margin and flipped y.
struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Frame {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    fn from_points<'a>(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        if !x_min.is_finite() {
            (x_min, x_max, y_min, y_max) = (0.0, 1.0, 0.0, 1.0);
        }
        if x_max - x_min < 1e-12 {
            x_max = x_min + 1.0;
        }
        if y_max - y_min < 1e-12 {
            y_max = y_min + 1.0;
        }
        Frame::new(x_min, x_max, y_min, y_max)
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (H - 2.0 * MARGIN)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" \
         width=\"{W}\" height=\"{H}\">\n\
         <rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"14\">{title}</text>\n",
        W / 2.0
    );
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let _ = write!(
        out,
        "<rect x=\"{m}\" y=\"{m}\" width=\"{w}\" height=\"{h}\" fill=\"none\" \
         stroke=\"black\" stroke-width=\"1\"/>\n\
         <text x=\"{cx}\" y=\"{by}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\">{x_label}</text>\n\
         <text x=\"15\" y=\"{cy}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\" transform=\"rotate(-90 15 {cy})\">{y_label}</text>\n\
         <text x=\"{m}\" y=\"{by}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"10\">{x0:.3}</text>\n\
         <text x=\"{rx}\" y=\"{by}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"10\">{x1:.3}</text>\n\
         <text x=\"{lx}\" y=\"{bm}\" text-anchor=\"end\" font-family=\"sans-serif\" \
         font-size=\"10\">{y0:.3}</text>\n\
         <text x=\"{lx}\" y=\"{tm}\" text-anchor=\"end\" font-family=\"sans-serif\" \
         font-size=\"10\">{y1:.3}</text>\n",
        m = MARGIN,
        w = W - 2.0 * MARGIN,
        h = H - 2.0 * MARGIN,
        cx = W / 2.0,
        cy = H / 2.0,
        by = H - 15.0,
        bm = H - MARGIN,
        tm = MARGIN + 4.0,
        rx = W - MARGIN,
        lx = MARGIN - 5.0,
        x0 = f.x_min,
        x1 = f.x_max,
        y0 = f.y_min,
        y1 = f.y_max,
    );
}

fn polyline(out: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str, dashed: bool) {
    if pts.len() < 2 {
        return;
    }
    let mut coords = String::new();
    for (x, y) in pts {
        let _ = write!(coords, "{:.2},{:.2} ", f.px(*x), f.py(*y));
    }
    let dash = if dashed {
        " stroke-dasharray=\"6,4\""
    } else {
        ""
    };
    let _ = write!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash}/>\n",
        coords.trim_end()
    );
}

fn marker(out: &mut String, f: &Frame, x: f64, y: f64, color: &str) {
    let _ = write!(
        out,
        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{color}\" stroke=\"black\" \
         stroke-width=\"1\"/>\n",
        f.px(x),
        f.py(y)
    );
}

fn region_fill(label: RegionLabel) -> &'static str {
    match label {
        RegionLabel::J0 => "white",
        RegionLabel::J1 | RegionLabel::J5 => "green",
        RegionLabel::J2 | RegionLabel::J4 => "pink",
        RegionLabel::J3 => "yellow",
        RegionLabel::Boundary => "lightgray",
    }
}

/// Operating diagram: region cells, boundary curves in their fixed
/// colors, and codimension-2 candidates as markers.
pub fn diagram(grid: &DiagramGrid<f64>, codim2: &[Codim2Candidate<f64>]) -> String {
    let ns = grid.s_in_values.len();
    let nd = grid.d_values.len();
    let half_s = (grid.s_in_values[1] - grid.s_in_values[0]) / 2.0;
    let half_d = (grid.d_values[1] - grid.d_values[0]) / 2.0;
    let f = Frame::new(
        grid.s_in_values[0] - half_s,
        grid.s_in_values[ns - 1] + half_s,
        grid.d_values[0] - half_d,
        grid.d_values[nd - 1] + half_d,
    );
    let mut out = String::new();
    header(&mut out, "Operating diagram");
    let cell_w = f.px(grid.s_in_values[0] + half_s) - f.px(grid.s_in_values[0] - half_s);
    let cell_h = f.py(grid.d_values[0] - half_d) - f.py(grid.d_values[0] + half_d);
    for (di, &d) in grid.d_values.iter().enumerate() {
        for (si, &s_in) in grid.s_in_values.iter().enumerate() {
            let fill = region_fill(grid.labels[di * ns + si]);
            if fill == "white" {
                continue;
            }
            let _ = write!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
                 fill=\"{fill}\" fill-opacity=\"0.5\"/>\n",
                f.px(s_in - half_s),
                f.py(d + half_d),
                cell_w,
                cell_h,
            );
        }
    }
    for curve in &grid.curves {
        let pts: Vec<(f64, f64)> = curve
            .samples
            .iter()
            .filter(|(s, d)| {
                *s >= f.x_min && *s <= f.x_max && *d >= f.y_min && *d <= f.y_max
            })
            .copied()
            .collect();
        polyline(&mut out, &f, &pts, curve.id.color(), false);
    }
    for cand in codim2 {
        if cand.s_in >= f.x_min && cand.s_in <= f.x_max && cand.d >= f.y_min && cand.d <= f.y_max
        {
            marker(&mut out, &f, cand.s_in, cand.d, "red");
        }
    }
    axes(&mut out, &f, "S_in", "D");
    out.push_str("</svg>\n");
    out
}

const BRANCH_COLORS: [&str; 4] = ["black", "red", "blue", "purple"];

/// One-parameter bifurcation diagram: S-component of each branch against
/// D; LES arcs solid, unstable arcs dashed, transcritical points marked.
pub fn bifurcation(rows: &[BranchRow<f64>], sigma: &[BifurcationPoint<f64>]) -> String {
    let f = Frame::from_points(
        rows.iter()
            .flat_map(|r| r.states.iter().map(move |s| (r.d, s.s))),
    );
    let mut out = String::new();
    header(&mut out, "Bifurcation diagram (S vs D)");
    for (slot, kind) in [
        SteadyStateKind::E0,
        SteadyStateKind::E1,
        SteadyStateKind::E2,
        SteadyStateKind::Coexistence,
    ]
    .into_iter()
    .enumerate()
    {
        // contiguous runs of equal stability become one polyline each
        let mut run: Vec<(f64, f64)> = Vec::new();
        let mut run_class: Option<Classification> = None;
        let flush = |run: &mut Vec<(f64, f64)>, class: Option<Classification>, out: &mut String| {
            let dashed = class != Some(Classification::Les);
            polyline(out, &f, run, BRANCH_COLORS[slot], dashed);
            run.clear();
        };
        for row in rows {
            match (row.states.iter().find(|s| s.kind == kind), row.profile[slot]) {
                (Some(ss), class) => {
                    if class != run_class && !run.is_empty() {
                        // repeat the joint point so arcs stay connected
                        let last = *run.last().unwrap();
                        flush(&mut run, run_class, &mut out);
                        run.push(last);
                    }
                    run_class = class;
                    run.push((row.d, ss.s));
                }
                (None, _) => {
                    flush(&mut run, run_class, &mut out);
                    run_class = None;
                }
            }
        }
        flush(&mut run, run_class, &mut out);
    }
    for pt in sigma {
        // the colliding branches meet on the washout/boundary curve; mark
        // on the S axis position of the E0 branch at that D when available
        let s = rows
            .iter()
            .min_by(|a, b| {
                (a.d - pt.d).abs().partial_cmp(&(b.d - pt.d).abs()).unwrap()
            })
            .and_then(|row| row.states.iter().find(|s| s.kind == pt.pair.1).map(|s| s.s));
        if let Some(s) = s {
            marker(&mut out, &f, pt.d, s, "orange");
        }
    }
    axes(&mut out, &f, "D", "S");
    out.push_str("</svg>\n");
    out
}

/// Phase-plane projection of trajectories onto `(x1, x2)` with the steady
/// states marked.
pub fn phase(trajectories: &[Trajectory<f64>], equilibria: &[SteadyState<f64>]) -> String {
    let f = Frame::from_points(
        trajectories
            .iter()
            .flat_map(|t| t.states.iter().map(|s| (s[1], s[2])))
            .chain(equilibria.iter().map(|e| (e.x1, e.x2))),
    );
    let mut out = String::new();
    header(&mut out, "Phase plane (x1, x2)");
    for (k, traj) in trajectories.iter().enumerate() {
        let pts: Vec<(f64, f64)> = traj.states.iter().map(|s| (s[1], s[2])).collect();
        polyline(
            &mut out,
            &f,
            &pts,
            BRANCH_COLORS[k % BRANCH_COLORS.len()],
            false,
        );
    }
    for e in equilibria {
        marker(&mut out, &f, e.x1, e.x2, "black");
    }
    axes(&mut out, &f, "x1", "x2");
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_maps_corners_to_margins() {
        let f = Frame::new(0.0, 2.0, 0.0, 4.0);
        assert_eq!(f.px(0.0), MARGIN);
        assert_eq!(f.px(2.0), W - MARGIN);
        assert_eq!(f.py(0.0), H - MARGIN);
        assert_eq!(f.py(4.0), MARGIN);
    }

    #[test]
    fn degenerate_extent_is_padded() {
        let f = Frame::from_points([(1.0, 1.0)].into_iter());
        assert!(f.x_max > f.x_min && f.y_max > f.y_min);
    }

    #[test]
    fn region_fills_follow_the_table() {
        assert_eq!(region_fill(RegionLabel::J0), "white");
        assert_eq!(region_fill(RegionLabel::J1), "green");
        assert_eq!(region_fill(RegionLabel::J2), "pink");
        assert_eq!(region_fill(RegionLabel::J3), "yellow");
        assert_eq!(region_fill(RegionLabel::J4), "pink");
        assert_eq!(region_fill(RegionLabel::J5), "green");
    }
}
