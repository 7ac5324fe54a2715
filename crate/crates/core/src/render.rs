//! Deterministic SVG rendering of layouts, precedence graphs and
//! parking/exit maneuver frames, plus DOT/JSON precedence exports.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::access::LayoutConditions;
use crate::adjacency::parked_vehicle_bounds;
use crate::error::Result;
use crate::geometry::{LotSpec, Side};
use crate::layout::{Layout, StallDims};
use crate::planner::{LayoutPlanner, Path as PlanPath};
use crate::sequencing::SequencePair;

const SCALE: f64 = 30.0;
const MARGIN: f64 = 20.0;

struct Canvas {
    body: String,
    width: f64,
    height: f64,
    // world bounds
    x0: f64,
    y1: f64,
}

impl Canvas {
    fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Canvas {
            body: String::new(),
            width: (x1 - x0) * SCALE + 2.0 * MARGIN,
            height: (y1 - y0) * SCALE + 2.0 * MARGIN,
            x0,
            y1,
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) * SCALE
    }

    /// SVG y axis points down; world y axis points up.
    fn py(&self, y: f64) -> f64 {
        MARGIN + (self.y1 - y) * SCALE
    }

    fn rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, style: &str) {
        writeln!(
            self.body,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" {}/>"#,
            self.px(x0),
            self.py(y1),
            (x1 - x0) * SCALE,
            (y1 - y0) * SCALE,
            style
        )
        .unwrap();
    }

    fn poly(&mut self, pts: &[[f64; 2]], style: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.3},{:.3}", self.px(p[0]), self.py(p[1])))
            .collect();
        writeln!(
            self.body,
            r#"<polygon points="{}" {}/>"#,
            coords.join(" "),
            style
        )
        .unwrap();
    }

    fn polyline(&mut self, pts: &[[f64; 2]], style: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.3},{:.3}", self.px(p[0]), self.py(p[1])))
            .collect();
        writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" {}/>"#,
            coords.join(" "),
            style
        )
        .unwrap();
    }

    fn line(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, style: &str) {
        writeln!(
            self.body,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" {}/>"#,
            self.px(x0),
            self.py(y0),
            self.px(x1),
            self.py(y1),
            style
        )
        .unwrap();
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, content: &str) {
        writeln!(
            self.body,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="{anchor}" font-family="sans-serif" font-size="12">{content}</text>"#,
            self.px(x),
            self.py(y),
        )
        .unwrap();
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        )
    }
}

fn draw_lot(canvas: &mut Canvas, lot: &LotSpec) {
    canvas.rect(
        0.0,
        0.0,
        lot.length,
        lot.width,
        r#"fill="white" stroke="black" stroke-width="2""#,
    );
    for e in &lot.entrances {
        let (p0, p1) = match e.side {
            Side::Left => ([0.0, e.span[0]], [0.0, e.span[1]]),
            Side::Right => ([lot.length, e.span[0]], [lot.length, e.span[1]]),
            Side::Bottom => ([e.span[0], 0.0], [e.span[1], 0.0]),
            Side::Top => ([e.span[0], lot.width], [e.span[1], lot.width]),
        };
        canvas.line(
            p0[0],
            p0[1],
            p1[0],
            p1[1],
            r#"stroke="green" stroke-width="4" stroke-dasharray="6,4""#,
        );
    }
}

fn draw_stalls(canvas: &mut Canvas, layout: &Layout, dims: StallDims, label: bool) {
    for s in &layout.stalls {
        let (x0, y0, x1, y1) = s.bounds(dims);
        canvas.rect(
            x0,
            y0,
            x1,
            y1,
            r#"fill="none" stroke="steelblue" stroke-width="1.5" class="stall""#,
        );
        if label {
            let (cx, cy) = s.center(dims);
            canvas.text(cx, cy, "middle", &s.index.to_string());
        }
    }
}

/// One layout with stall rectangles, indices and entrance markers.
pub fn render_layout_svg(layout: &Layout, lot: &LotSpec, dims: StallDims) -> String {
    let mut canvas = Canvas::new(-1.0, -1.0, lot.length + 1.0, lot.width + 1.0);
    draw_lot(&mut canvas, lot);
    draw_stalls(&mut canvas, layout, dims, true);
    canvas.finish()
}

/// Precedence-graph JSON: a directed edge `y_i -> y_j` for singleton
/// clauses, and an AND node per multi-literal clause collecting its sources.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecedenceGraph {
    pub nodes: Vec<String>,
    pub and_nodes: Vec<AndNode>,
    pub edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AndNode {
    pub id: String,
    pub clause: Vec<usize>,
    pub target: usize,
}

pub fn precedence_graph_json(conds: &LayoutConditions) -> PrecedenceGraph {
    let n = conds.n_stalls();
    let nodes = (0..n).map(|i| format!("y{i}")).collect();
    let mut and_nodes = Vec::new();
    let mut edges = Vec::new();
    for (target, cond) in conds.per_stall.iter().enumerate() {
        for clause in cond.clause_sets() {
            match clause.len() {
                0 => {}
                1 => edges.push([format!("y{}", clause[0]), format!("y{target}")]),
                _ => {
                    let id = format!("and{}", and_nodes.len());
                    for &src in &clause {
                        edges.push([format!("y{src}"), id.clone()]);
                    }
                    edges.push([id.clone(), format!("y{target}")]);
                    and_nodes.push(AndNode { id, clause, target });
                }
            }
        }
    }
    PrecedenceGraph {
        nodes,
        and_nodes,
        edges,
    }
}

pub fn precedence_dot(conds: &LayoutConditions) -> String {
    let g = precedence_graph_json(conds);
    let mut out = String::from("digraph precedence {\n");
    for node in &g.nodes {
        writeln!(out, "  {node} [shape=circle];").unwrap();
    }
    for a in &g.and_nodes {
        writeln!(out, "  {} [shape=box,label=\"AND\"];", a.id).unwrap();
    }
    for [u, v] in &g.edges {
        writeln!(out, "  {u} -> {v};").unwrap();
    }
    out.push_str("}\n");
    out
}

/// Precedence graph as SVG: stall nodes laid out on a circle, AND nodes at
/// the centroid of their sources.
pub fn render_precedence_svg(conds: &LayoutConditions) -> String {
    let n = conds.n_stalls().max(1);
    let radius = 4.0;
    let mut canvas = Canvas::new(-radius - 1.5, -radius - 1.5, radius + 1.5, radius + 1.5);
    let node_pos = |i: usize| -> [f64; 2] {
        let angle = std::f64::consts::PI / 2.0 - 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        [radius * angle.cos(), radius * angle.sin()]
    };
    let g = precedence_graph_json(conds);
    let mut and_pos = Vec::new();
    for a in &g.and_nodes {
        let mut cx = 0.0;
        let mut cy = 0.0;
        for &src in &a.clause {
            cx += node_pos(src)[0];
            cy += node_pos(src)[1];
        }
        let k = a.clause.len() as f64 + 1.0;
        let t = node_pos(a.target);
        and_pos.push([(cx + t[0]) / k, (cy + t[1]) / k]);
    }
    let pos_of = |label: &str| -> [f64; 2] {
        if let Some(rest) = label.strip_prefix('y') {
            node_pos(rest.parse().unwrap())
        } else {
            let idx: usize = label.strip_prefix("and").unwrap().parse().unwrap();
            and_pos[idx]
        }
    };
    for [u, v] in &g.edges {
        let a = pos_of(u);
        let b = pos_of(v);
        canvas.line(a[0], a[1], b[0], b[1], r#"stroke="gray" stroke-width="1""#);
        // arrow head
        let dx = b[0] - a[0];
        let dy = b[1] - a[1];
        let len = dx.hypot(dy).max(1e-9);
        let tip = [b[0] - 0.45 * dx / len, b[1] - 0.45 * dy / len];
        let left = [
            tip[0] - 0.18 * dy / len - 0.18 * dx / len,
            tip[1] + 0.18 * dx / len - 0.18 * dy / len,
        ];
        let right = [
            tip[0] + 0.18 * dy / len - 0.18 * dx / len,
            tip[1] - 0.18 * dx / len - 0.18 * dy / len,
        ];
        canvas.poly(&[tip, left, right], r#"fill="gray" class="arrow""#);
    }
    for (i, _) in g.nodes.iter().enumerate() {
        let p = node_pos(i);
        writeln!(
            canvas.body,
            r#"<circle cx="{:.3}" cy="{:.3}" r="14" fill="lightsteelblue" stroke="black" class="var"/>"#,
            canvas.px(p[0]),
            canvas.py(p[1]),
        )
        .unwrap();
        canvas.text(p[0], p[1] - 0.15, "middle", &format!("y{i}"));
    }
    for (a, p) in g.and_nodes.iter().zip(&and_pos) {
        canvas.rect(
            p[0] - 0.5,
            p[1] - 0.3,
            p[0] + 0.5,
            p[1] + 0.3,
            r#"fill="khaki" stroke="black" class="and""#,
        );
        canvas.text(p[0], p[1] - 0.15, "middle", "AND");
        let _ = a;
    }
    canvas.finish()
}

fn draw_parked(canvas: &mut Canvas, planner: &LayoutPlanner, occupied: &[usize]) {
    for &s in occupied {
        let b = parked_vehicle_bounds(&planner.layout.stalls[s], planner.dims, &planner.vehicle);
        canvas.rect(
            b.0,
            b.1,
            b.2,
            b.3,
            r#"fill="lightgray" stroke="dimgray" class="parked""#,
        );
    }
}

fn draw_maneuver(canvas: &mut Canvas, planner: &LayoutPlanner, path: &PlanPath, fill: &str) {
    for wp in &path.waypoints {
        let fp = crate::geometry::footprint(&wp.pose(), &planner.vehicle);
        canvas.poly(
            &fp.corners(),
            &format!(r#"fill="{fill}" fill-opacity="0.15" stroke="{fill}" stroke-width="0.5""#),
        );
    }
    let pts: Vec<[f64; 2]> = path.waypoints.iter().map(|w| [w.x, w.y]).collect();
    canvas.polyline(
        &pts,
        r#"stroke="green" stroke-width="2" class="trajectory""#,
    );
}

/// One frame per parking step and one per exit step for a sequence pair:
/// the moving vehicle's footprints along its maneuver plus the waypoint
/// polyline, with already-parked vehicles shown in gray. Frames are laid
/// out in two rows (parking on top, exit below).
pub fn render_pair_svg(planner: &LayoutPlanner, pair: &SequencePair) -> Result<String> {
    let n = pair.park.len();
    let lot = &planner.lot;
    let depth = crate::geometry::APRON_DEPTH_FACTOR * planner.vehicle.length;
    let frame_w = (lot.length + depth + 2.0) * SCALE + 2.0 * MARGIN;
    let frame_h = (lot.width + 2.0) * SCALE + 2.0 * MARGIN + 18.0;
    let mut frames: Vec<String> = Vec::new();

    // Parking frames: step k parks pair.park[k], reversing the exit maneuver
    // computed with the earlier arrivals still parked.
    for k in 0..n {
        let occupied: Vec<usize> = pair.park[..k].to_vec();
        let p = pair.park[k];
        let path = exit_path_any_entrance(planner, p, &occupied)?;
        let mut canvas = Canvas::new(-depth - 1.0, -1.0, lot.length + 1.0, lot.width + 1.0);
        draw_lot(&mut canvas, lot);
        draw_stalls(&mut canvas, &planner.layout, planner.dims, true);
        draw_parked(&mut canvas, planner, &occupied);
        let reversed = reverse_path(&path);
        draw_maneuver(&mut canvas, planner, &reversed, "goldenrod");
        canvas.text(
            (lot.length - depth) / 2.0,
            lot.width + 0.6,
            "middle",
            &format!("park step {} -&gt; stall {}", k + 1, p),
        );
        frames.push(canvas.finish());
    }
    // Exit frames: step k retrieves pair.exit[k]; later stalls still parked.
    for k in 0..n {
        let occupied: Vec<usize> = pair.exit[k + 1..].to_vec();
        let p = pair.exit[k];
        let path = exit_path_any_entrance(planner, p, &occupied)?;
        let mut canvas = Canvas::new(-depth - 1.0, -1.0, lot.length + 1.0, lot.width + 1.0);
        draw_lot(&mut canvas, lot);
        draw_stalls(&mut canvas, &planner.layout, planner.dims, true);
        draw_parked(&mut canvas, planner, &occupied);
        draw_maneuver(&mut canvas, planner, &path, "seagreen");
        canvas.text(
            (lot.length - depth) / 2.0,
            lot.width + 0.6,
            "middle",
            &format!("exit step {} -&gt; stall {}", k + 1, p),
        );
        frames.push(canvas.finish());
    }

    let total_w = frame_w * n as f64;
    let total_h = frame_h * 2.0;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\">\n",
        total_w, total_h
    );
    for (i, frame) in frames.iter().enumerate() {
        let col = i % n;
        let row = i / n;
        writeln!(
            out,
            "<g class=\"frame\" transform=\"translate({:.0},{:.0})\">",
            col as f64 * frame_w,
            row as f64 * frame_h
        )
        .unwrap();
        // strip outer svg element of the frame
        let inner = frame
            .trim_start()
            .split_once('\n')
            .map_or("", |(_, rest)| rest)
            .trim_end()
            .trim_end_matches("</svg>");
        out.push_str(inner);
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn exit_path_any_entrance(
    planner: &LayoutPlanner,
    p: usize,
    occupied: &[usize],
) -> Result<PlanPath> {
    let mask = occupied.iter().fold(0u64, |m, &s| m | (1 << s));
    for e in 0..planner.lot.entrances.len() {
        if let Some(path) = planner.exit_query(p, e, mask)? {
            return Ok(path);
        }
    }
    Err(crate::error::Error::InfeasibleLayout(
        0,
        format!("no exit path for stall {p} while rendering"),
    ))
}

/// Time-reverse an exit path into a parking path with mirrored gears.
pub fn reverse_path(path: &PlanPath) -> PlanPath {
    let mut waypoints: Vec<crate::planner::Waypoint> =
        path.waypoints.iter().rev().cloned().collect();
    let segments: Vec<crate::planner::Segment> = path
        .segments
        .iter()
        .rev()
        .map(|s| crate::planner::Segment {
            gear: match s.gear {
                crate::planner::Gear::Forward => crate::planner::Gear::Reverse,
                crate::planner::Gear::Reverse => crate::planner::Gear::Forward,
            },
            ..*s
        })
        .collect();
    for (i, wp) in waypoints.iter_mut().enumerate() {
        let gear = if i == 0 {
            segments.first().map(|s| s.gear)
        } else {
            segments.get(i - 1).map(|s| s.gear)
        };
        if let Some(g) = gear {
            wp.gear = g;
        }
    }
    PlanPath {
        cost: path.cost,
        waypoints,
        segments,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::AccessCondition;

    fn sample_conds() -> LayoutConditions {
        LayoutConditions {
            per_stall: vec![
                AccessCondition::top(),
                AccessCondition::from_clause_sets(&[vec![0], vec![2, 3, 4]]),
                AccessCondition::from_clause_sets(&[vec![0], vec![3, 4]]),
                AccessCondition::from_clause_sets(&[vec![0], vec![4]]),
                AccessCondition::top(),
            ],
        }
    }

    #[test]
    fn precedence_graph_has_and_nodes_for_multi_literal_clauses() {
        let g = precedence_graph_json(&sample_conds());
        assert_eq!(g.nodes.len(), 5);
        let clauses: Vec<Vec<usize>> = g.and_nodes.iter().map(|a| a.clause.clone()).collect();
        assert!(clauses.contains(&vec![2, 3, 4]));
        assert!(clauses.contains(&vec![3, 4]));
        assert_eq!(g.and_nodes.len(), 2);
        // singleton clauses become direct edges
        assert!(g.edges.contains(&["y0".into(), "y3".into()]));
    }

    #[test]
    fn dot_export_mentions_every_node() {
        let dot = precedence_dot(&sample_conds());
        for i in 0..5 {
            assert!(dot.contains(&format!("y{i}")));
        }
        assert!(dot.contains("AND"));
    }

    #[test]
    fn layout_svg_contains_stall_rects_and_entrance_marker() {
        let lot = LotSpec::with_full_left_entrance(15.0, 12.0).unwrap();
        let dims = StallDims::default();
        let layouts = crate::layout::solve_max_packing(&lot, dims).unwrap();
        let unique = crate::layout::canonicalize_unique(&layouts, dims);
        let svg = render_layout_svg(&unique[0], &lot, dims);
        assert_eq!(svg.matches("class=\"stall\"").count(), 5);
        assert!(svg.contains("stroke=\"green\""));
        // deterministic output
        assert_eq!(svg, render_layout_svg(&unique[0], &lot, dims));
    }
}
