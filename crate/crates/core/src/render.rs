//! Deterministic SVG output for laid-out summaries.
//!
//! Every event type keeps one color across techniques, links are stroked in
//! proportion to their support, and sequence counts sit next to nodes for
//! linear sets and on links for trees and DAGs. Coordinates are written
//! with exactly two decimals so output is byte-stable.

use alloc::borrow::Cow;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::layout::{EdgeRoute, LayoutResult, Point, RouteShape};
use crate::model::EventId;
use crate::summary::{NodeId, Summary, SummaryKind};

/// Categorical palette, assigned by event id.
pub const PALETTE: [&str; 20] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5", "#c49c94", "#f7b6d2", "#c7c7c7",
    "#dbdb8d", "#9edae5",
];

pub const MAX_LABEL_CHARS: usize = 18;

const MARGIN: f64 = 24.0;
/// Extra room above the drawing for links leaving hidden nodes.
const TOP_MARGIN: f64 = 40.0;
/// Extra room on the right for counts printed beside linear-set nodes.
const COUNT_GUTTER: f64 = 40.0;
const LINK_COLOR: &str = "#9a9a9a";

#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub palette: Vec<&'static str>,
    pub font_size: f64,
    pub background: &'static str,
}

impl Default for Style {
    fn default() -> Self {
        Style { palette: PALETTE.to_vec(), font_size: 12.0, background: "#ffffff" }
    }
}

impl Style {
    pub fn color(&self, event: EventId) -> &'static str {
        self.palette[event.index() % self.palette.len()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    #[error("node {0} has no layout position")]
    MissingPosition(NodeId),
    #[error("edge {0}->{1} has no route")]
    MissingRoute(NodeId, NodeId),
    #[error("style palette is empty")]
    EmptyPalette,
}

/// Fixed two-decimal formatting without negative zero.
pub fn num(x: f64) -> String {
    let s = alloc::format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

pub fn escape_xml(s: &str) -> Cow<'_, str> {
    if !s.contains(['&', '<', '>', '"', '\'']) {
        return Cow::Borrowed(s);
    }
    let mut out = String::with_capacity(s.len() + 8);
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    Cow::Owned(out)
}

/// Label text shortened to [`MAX_LABEL_CHARS`] characters plus an ellipsis.
pub fn truncate_label(label: &str) -> Cow<'_, str> {
    match label.char_indices().nth(MAX_LABEL_CHARS) {
        None => Cow::Borrowed(label),
        Some((cut, _)) => Cow::Owned(alloc::format!("{}\u{2026}", &label[..cut])),
    }
}

fn path_data(route: &EdgeRoute, dx: f64, dy: f64) -> String {
    let p = |pt: &Point| alloc::format!("{} {}", num(pt.x + dx), num(pt.y + dy));
    let mut d = alloc::format!("M {}", p(&route.points[0]));
    match route.shape {
        RouteShape::Cubic => {
            let _ = write!(d, " C {}, {}, {}", p(&route.points[1]), p(&route.points[2]), p(&route.points[3]));
        }
        RouteShape::Line => {
            for pt in &route.points[1..] {
                let _ = write!(d, " L {}", p(pt));
            }
        }
    }
    d
}

/// Renders `summary` at the positions in `layout` as an SVG 1.1 document.
pub fn render_svg(summary: &Summary, layout: &LayoutResult, style: &Style) -> Result<String, RenderError> {
    if style.palette.is_empty() {
        return Err(RenderError::EmptyPalette);
    }
    for n in &summary.nodes {
        if !layout.positions.contains_key(&n.id) {
            return Err(RenderError::MissingPosition(n.id));
        }
    }
    let route = |s: NodeId, t: NodeId| layout.routes.iter().find(|r| r.source == s && r.target == t);
    for e in &summary.edges {
        if route(e.source, e.target).is_none() {
            return Err(RenderError::MissingRoute(e.source, e.target));
        }
    }

    let cfg = &layout.config;
    let gutter = if summary.kind == SummaryKind::LinearSet { COUNT_GUTTER } else { 0.0 };
    let width = layout.width + 2.0 * MARGIN + gutter;
    let height = layout.height + MARGIN + TOP_MARGIN;
    let (dx, dy) = (MARGIN, TOP_MARGIN);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="{fs}">"#,
        w = num(width),
        h = num(height),
        fs = num(style.font_size),
    );
    let _ = writeln!(svg, r#"<rect x="0.00" y="0.00" width="{}" height="{}" fill="{}"/>"#, num(width), num(height), style.background);
    if summary.nodes.is_empty() {
        svg.push_str("</svg>\n");
        return Ok(svg);
    }

    let hidden = |id: NodeId| summary.node(id).is_some_and(|n| n.hidden);
    let mut labels = String::new();
    svg.push_str("<g class=\"links\">\n");
    for e in &summary.edges {
        if hidden(e.target) {
            continue;
        }
        let r = route(e.source, e.target).unwrap();
        let stroke = num(cfg.link_width(e.support));
        let (d, mid) = if hidden(e.source) {
            // Links out of hidden nodes start at the top of the canvas.
            let end = *r.points.last().unwrap();
            let d = alloc::format!("M {} {} L {} {}", num(end.x + dx), num(0.0), num(end.x + dx), num(end.y + dy));
            (d, Point { x: end.x, y: (end.y - dy) / 2.0 })
        } else {
            (path_data(r, dx, dy), r.midpoint())
        };
        let _ = writeln!(
            svg,
            r#"<path d="{d}" fill="none" stroke="{LINK_COLOR}" stroke-opacity="0.7" stroke-width="{stroke}"/>"#
        );
        if summary.kind != SummaryKind::LinearSet {
            let _ = writeln!(
                labels,
                r#"<text class="count" x="{}" y="{}" text-anchor="start" dominant-baseline="middle">{}</text>"#,
                num(mid.x + dx + 4.0),
                num(mid.y + dy),
                e.support
            );
        }
    }
    svg.push_str("</g>\n<g class=\"nodes\">\n");
    for n in summary.visible_nodes() {
        let p = layout.positions[&n.id];
        let (x, y) = (p.x + dx, p.y + dy);
        let fill = n.event.map_or(LINK_COLOR, |e| style.color(e));
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{}" height="{}" rx="4.00" fill="{fill}"/>"#,
            num(x),
            num(y),
            num(cfg.node_width),
            num(cfg.node_height)
        );
        let _ = writeln!(
            svg,
            r##"<text x="{}" y="{}" text-anchor="middle" dominant-baseline="middle" fill="#ffffff">{}</text>"##,
            num(x + cfg.node_width / 2.0),
            num(y + cfg.node_height / 2.0),
            escape_xml(&truncate_label(summary.label(n)))
        );
        if summary.kind == SummaryKind::LinearSet {
            let _ = writeln!(
                labels,
                r#"<text class="count" x="{}" y="{}" text-anchor="start" dominant-baseline="middle">{}</text>"#,
                num(x + cfg.node_width + 4.0),
                num(y + cfg.node_height / 2.0),
                n.support
            );
        }
    }
    svg.push_str("</g>\n<g class=\"counts\">\n");
    svg.push_str(&labels);
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}
