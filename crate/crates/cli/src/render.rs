//! Hand-written SVG: grid trajectories and front scatter plots.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use prefplan_core::problem::GridDocument;
use prefplan_core::{Cost, Plan, Wts};

const CELL: usize = 48;
const MARGIN: usize = 24;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Parses a grid state name `x{x}_{y}`.
fn cell_of(name: &str) -> Option<(usize, usize)> {
    let (x, y) = name.strip_prefix('x')?.split_once('_')?;
    Some((x.parse().ok()?, y.parse().ok()?))
}

/// The grid with labeled cells, the start marker and one arrow per step.
pub fn trajectory_svg(grid: Option<&GridDocument>, wts: &Wts, plan: &Plan) -> Result<String> {
    let Some(grid) = grid else {
        bail!("trajectory rendering needs a grid-shorthand system");
    };
    let traj = wts.apply_plan(plan)?;
    let (w, h) = (grid.width, grid.height);
    // North is up: row `y` is drawn at the bottom for y = 0.
    let center = |(x, y): (usize, usize)| {
        (
            MARGIN + x * CELL + CELL / 2,
            MARGIN + (h - 1 - y) * CELL + CELL / 2,
        )
    };
    let mut svg = String::new();
    let (width, height) = (2 * MARGIN + w * CELL, 2 * MARGIN + h * CELL);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    svg.push_str(concat!(
        r#"<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" orient="auto-start-reverse">"#,
        r#"<path d="M 0 0 L 10 5 L 0 10 z" fill="firebrick"/></marker></defs>"#,
        "\n"
    ));
    let labels = grid.cell_labels();
    for y in 0..h {
        for x in 0..w {
            let (px, py) = (MARGIN + x * CELL, MARGIN + (h - 1 - y) * CELL);
            let fill = if labels.contains_key(&(x, y)) { "#e8eef7" } else { "white" };
            let _ = writeln!(
                svg,
                r##"<rect x="{px}" y="{py}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#999"/>"##
            );
        }
    }
    for ((x, y), props) in &labels {
        let (cx, cy) = center((*x, *y));
        let text: Vec<&str> = props.iter().map(String::as_str).collect();
        let _ = writeln!(
            svg,
            r#"<text x="{cx}" y="{}" font-size="10" text-anchor="middle" font-family="sans-serif">{}</text>"#,
            cy - CELL / 4,
            escape(&text.join(","))
        );
    }
    let cells = traj
        .states()
        .iter()
        .map(|&s| cell_of(wts.state_name(s)))
        .collect::<Option<Vec<_>>>();
    let Some(cells) = cells else {
        bail!("state names are not grid cells");
    };
    let (sx, sy) = center(cells[0]);
    let _ = writeln!(
        svg,
        r#"<circle class="robot" cx="{sx}" cy="{sy}" r="8" fill="steelblue"/>"#
    );
    for pair in cells.windows(2) {
        let ((x1, y1), (x2, y2)) = (center(pair[0]), center(pair[1]));
        let _ = writeln!(
            svg,
            r#"<line class="step" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="firebrick" stroke-width="2" marker-end="url(#arrow)"/>"#
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Scatter of `(cost, μ)` points with labeled axes.
pub fn front_svg(points: &[(Cost, Cost)]) -> String {
    let (width, height, pad) = (480.0, 360.0, 56.0);
    let xs: Vec<f64> = points.iter().map(|p| p.0.to_f64()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.to_f64()).collect();
    let range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if v.is_empty() {
            (0.0, 1.0)
        } else if hi > lo {
            (lo, hi)
        } else {
            (lo - 1.0, hi + 1.0)
        }
    };
    let (x0, x1) = range(&xs);
    let (y0, y1) = range(&ys);
    let px = |x: f64| pad + (x - x0) / (x1 - x0) * (width - 2.0 * pad);
    let py = |y: f64| height - pad - (y - y0) / (y1 - y0) * (height - 2.0 * pad);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{pad}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{pad}" y1="{pad}" x2="{pad}" y2="{b}" stroke="black"/>"#,
        b = height - pad,
        r = width - pad
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle" font-family="sans-serif">cost</text>"#,
        width / 2.0,
        height - 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" font-size="14" text-anchor="middle" font-family="sans-serif" transform="rotate(-90 18 {})">μ</text>"#,
        height / 2.0,
        height / 2.0
    );
    for (x, y) in xs.iter().zip(&ys) {
        let _ = writeln!(
            svg,
            r#"<circle class="point" cx="{:.1}" cy="{:.1}" r="5" fill="steelblue"/>"#,
            px(*x),
            py(*y)
        );
    }
    for (c, m) in points {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" font-family="sans-serif">({c}, {m})</text>"#,
            px(c.to_f64()) + 7.0,
            py(m.to_f64()) - 7.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use prefplan_core::model::example_grid;
    use prefplan_core::problem::CellLabels;

    fn grid() -> GridDocument {
        GridDocument {
            width: 3,
            height: 3,
            cost: Cost::ONE,
            labels: vec![CellLabels {
                cell: [2, 2],
                props: vec!["charge".into()],
            }],
            initial: None,
            atomic_props: vec![],
        }
    }

    #[test]
    fn one_arrow_per_step() {
        let wts = example_grid(Cost::ONE);
        let plan = wts.parse_plan("East East West North North East").unwrap();
        let svg = trajectory_svg(Some(&grid()), &wts, &plan).unwrap();
        assert_eq!(svg.matches(r#"class="step""#).count(), 6);
        assert_eq!(svg.matches(r#"class="robot""#).count(), 1);
        let empty = trajectory_svg(Some(&grid()), &wts, &Plan::new(vec![])).unwrap();
        assert_eq!(empty.matches(r#"class="step""#).count(), 0);
        assert_eq!(empty.matches(r#"class="robot""#).count(), 1);
        assert!(trajectory_svg(None, &wts, &plan).is_err());
    }

    #[test]
    fn scatter_markers() {
        let one = front_svg(&[(Cost::integer(6), Cost::integer(4))]);
        assert_eq!(one.matches(r#"class="point""#).count(), 1);
        let two = front_svg(&[(Cost::integer(6), Cost::integer(4)), (Cost::integer(8), Cost::ZERO)]);
        assert_eq!(two.matches(r#"class="point""#).count(), 2);
        assert!(two.contains(">cost<") && two.contains(">μ<"));
    }
}
