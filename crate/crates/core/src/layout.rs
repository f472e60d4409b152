//! Node placement and edge routing for the three summary kinds.
//!
//! - Trees use a Reingold–Tilford tidy layout: subtrees are packed as close
//!   as their contours allow and parents sit centered over their children.
//! - DAGs use a layered (Sugiyama) layout: longest-path layering, dummy
//!   vertices on long edges, and barycenter sweeps to reduce crossings.
//! - Linear sets are drawn as equidistant columns, one per pattern, with
//!   vertical position taken from each node's average index.
//!
//! Positions are the top-left corners of node rectangles; every rectangle
//! lies inside `(0, 0)..(width, height)`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::summary::{NodeId, Summary, SummaryKind, Violation};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutConfig {
    pub node_width: f64,
    pub node_height: f64,
    pub horizontal_gap: f64,
    pub vertical_gap: f64,
    pub canvas_width: f64,
    /// Height the largest average index maps to in linear-set layouts.
    pub canvas_height: f64,
    /// Link stroke per sequence, clamped to `[1, node_height]`.
    pub link_width_per_sequence: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            node_width: 120.0,
            node_height: 28.0,
            horizontal_gap: 24.0,
            vertical_gap: 36.0,
            canvas_width: 960.0,
            canvas_height: 480.0,
            link_width_per_sequence: 1.0,
        }
    }
}

impl LayoutConfig {
    pub fn is_valid(&self) -> bool {
        [
            self.node_width,
            self.node_height,
            self.horizontal_gap,
            self.vertical_gap,
            self.canvas_width,
            self.canvas_height,
            self.link_width_per_sequence,
        ]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0)
    }

    pub fn link_width(&self, support: usize) -> f64 {
        (support as f64 * self.link_width_per_sequence).clamp(1.0, self.node_height)
    }

    fn row_step(&self) -> f64 {
        self.node_height + self.vertical_gap
    }

    fn column_step(&self) -> f64 {
        self.node_width + self.horizontal_gap
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteShape {
    Line,
    /// Four points: start, two control points, end.
    Cubic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRoute {
    pub source: NodeId,
    pub target: NodeId,
    pub shape: RouteShape,
    pub points: Vec<Point>,
}

impl EdgeRoute {
    /// Point halfway along the route, used for count labels.
    pub fn midpoint(&self) -> Point {
        match self.shape {
            RouteShape::Cubic => {
                let [p0, p1, p2, p3] = [self.points[0], self.points[1], self.points[2], self.points[3]];
                Point {
                    x: 0.125 * p0.x + 0.375 * p1.x + 0.375 * p2.x + 0.125 * p3.x,
                    y: 0.125 * p0.y + 0.375 * p1.y + 0.375 * p2.y + 0.125 * p3.y,
                }
            }
            RouteShape::Line => {
                let n = self.points.len();
                let (a, b) = if n.is_multiple_of(2) {
                    (self.points[n / 2 - 1], self.points[n / 2])
                } else {
                    (self.points[n / 2], self.points[n / 2])
                };
                Point { x: (a.x + b.x) / 2.0, y: (a.y + b.y) / 2.0 }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutResult {
    pub positions: BTreeMap<NodeId, Point>,
    /// Nodes that carry a position but are not drawn.
    pub hidden: BTreeSet<NodeId>,
    pub routes: Vec<EdgeRoute>,
    pub width: f64,
    pub height: f64,
    /// Configuration the layout was computed with.
    pub config: LayoutConfig,
}

impl LayoutResult {
    fn from_positions(
        summary: &Summary,
        cfg: &LayoutConfig,
        positions: BTreeMap<NodeId, Point>,
        routes: Vec<EdgeRoute>,
    ) -> Self {
        let width = positions.values().map(|p| p.x + cfg.node_width).fold(0.0, f64::max);
        let height = positions.values().map(|p| p.y + cfg.node_height).fold(0.0, f64::max);
        let hidden = summary.nodes.iter().filter(|n| n.hidden).map(|n| n.id).collect();
        LayoutResult { positions, hidden, routes, width, height, config: *cfg }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LayoutError {
    #[error("expected a {expected} summary, found {found}")]
    WrongKind { expected: &'static str, found: &'static str },
    #[error("summary is structurally invalid: {0:?}")]
    Invalid(Vec<Violation>),
    #[error("summary graph contains a cycle")]
    Cycle,
    #[error("layout configuration must be finite and positive")]
    BadConfig,
}

pub fn layout(summary: &Summary, cfg: &LayoutConfig) -> Result<LayoutResult, LayoutError> {
    match summary.kind {
        SummaryKind::Tree => layout_tree(summary, cfg),
        SummaryKind::Dag => layout_dag(summary, cfg),
        SummaryKind::LinearSet => layout_linear_set(summary, cfg),
    }
}

fn expect_kind(summary: &Summary, kind: SummaryKind, cfg: &LayoutConfig) -> Result<(), LayoutError> {
    if !cfg.is_valid() {
        return Err(LayoutError::BadConfig);
    }
    if summary.kind != kind {
        return Err(LayoutError::WrongKind { expected: kind.as_str(), found: summary.kind.as_str() });
    }
    Ok(())
}

fn bottom_center(p: Point, cfg: &LayoutConfig) -> Point {
    Point { x: p.x + cfg.node_width / 2.0, y: p.y + cfg.node_height }
}

fn top_center(p: Point, cfg: &LayoutConfig) -> Point {
    Point { x: p.x + cfg.node_width / 2.0, y: p.y }
}

// ---------------------------------------------------------------- tree

/// Horizontal extent of a subtree at each depth, relative to its root.
struct Contour {
    left: Vec<f64>,
    right: Vec<f64>,
}

struct TidyTree<'a> {
    children: &'a BTreeMap<NodeId, Vec<NodeId>>,
    /// x offset of each node relative to its parent.
    offset: BTreeMap<NodeId, f64>,
    separation: f64,
}

impl TidyTree<'_> {
    fn place(&mut self, node: NodeId) -> Contour {
        let kids = self.children.get(&node).cloned().unwrap_or_default();
        let mut merged: Option<Contour> = None;
        let mut offsets = Vec::with_capacity(kids.len());
        for &child in &kids {
            let c = self.place(child);
            let shift = match &merged {
                None => 0.0,
                Some(m) => m
                    .right
                    .iter()
                    .zip(&c.left)
                    .map(|(r, l)| r + self.separation - l)
                    .fold(f64::NEG_INFINITY, f64::max),
            };
            offsets.push(shift);
            merged = Some(match merged {
                None => c,
                Some(mut m) => {
                    for d in 0..c.left.len() {
                        if d < m.left.len() {
                            m.right[d] = c.right[d] + shift;
                        } else {
                            m.left.push(c.left[d] + shift);
                            m.right.push(c.right[d] + shift);
                        }
                    }
                    m
                }
            });
        }
        let center = match (offsets.first(), offsets.last()) {
            (Some(a), Some(b)) => (a + b) / 2.0,
            _ => 0.0,
        };
        for (&child, off) in kids.iter().zip(offsets) {
            self.offset.insert(child, off - center);
        }
        let mut contour = Contour { left: vec![0.0], right: vec![0.0] };
        if let Some(m) = merged {
            contour.left.extend(m.left.iter().map(|x| x - center));
            contour.right.extend(m.right.iter().map(|x| x - center));
        }
        contour
    }
}

/// Tidy tree layout; `y = depth * (node_height + vertical_gap)`.
pub fn layout_tree(summary: &Summary, cfg: &LayoutConfig) -> Result<LayoutResult, LayoutError> {
    expect_kind(summary, SummaryKind::Tree, cfg)?;
    let violations: Vec<Violation> = summary
        .validate()
        .into_iter()
        .filter(|v| {
            matches!(
                v,
                Violation::Cycle
                    | Violation::TreeRoot { .. }
                    | Violation::MultipleParents(_)
                    | Violation::DanglingEdge { .. }
                    | Violation::DuplicateNode(_)
                    | Violation::SelfLoop(_)
            )
        })
        .collect();
    if !violations.is_empty() {
        return Err(LayoutError::Invalid(violations));
    }
    if summary.nodes.is_empty() {
        return Ok(LayoutResult::from_positions(summary, cfg, BTreeMap::new(), Vec::new()));
    }

    let mut children: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    let targets: BTreeSet<NodeId> = summary.edges.iter().map(|e| e.target).collect();
    for e in &summary.edges {
        children.entry(e.source).or_default().push(e.target);
    }
    children.values_mut().for_each(|v| v.sort());
    let root = summary.nodes.iter().map(|n| n.id).find(|id| !targets.contains(id)).unwrap();

    let mut tidy = TidyTree { children: &children, offset: BTreeMap::new(), separation: cfg.column_step() };
    tidy.place(root);

    let mut positions = BTreeMap::new();
    let mut stack = vec![(root, 0.0, 0usize)];
    while let Some((id, x, depth)) = stack.pop() {
        positions.insert(id, Point { x, y: depth as f64 * cfg.row_step() });
        for c in children.get(&id).map(Vec::as_slice).unwrap_or(&[]) {
            stack.push((*c, x + tidy.offset[c], depth + 1));
        }
    }
    let min_x = positions.values().map(|p| p.x).fold(f64::INFINITY, f64::min);
    positions.values_mut().for_each(|p| p.x -= min_x);

    let routes = summary
        .edges
        .iter()
        .map(|e| {
            let a = bottom_center(positions[&e.source], cfg);
            let b = top_center(positions[&e.target], cfg);
            let mid = (a.y + b.y) / 2.0;
            EdgeRoute {
                source: e.source,
                target: e.target,
                shape: RouteShape::Cubic,
                points: vec![a, Point { x: a.x, y: mid }, Point { x: b.x, y: mid }, b],
            }
        })
        .collect();
    Ok(LayoutResult::from_positions(summary, cfg, positions, routes))
}

// ---------------------------------------------------------------- dag

/// A vertex of the layered graph: a summary node or a dummy on a long edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LayerVertex {
    Node(NodeId),
    /// `n`-th dummy vertex, in creation order.
    Dummy(usize),
}

/// Layer assignment and within-layer orders produced for a DAG.
#[derive(Debug, Clone, PartialEq)]
pub struct Layering {
    pub layer_of: BTreeMap<NodeId, usize>,
    /// Order before crossing reduction.
    pub initial: Vec<Vec<LayerVertex>>,
    /// Order after crossing reduction.
    pub ordered: Vec<Vec<LayerVertex>>,
    /// Segments between adjacent layers; `segments[i]` joins layer `i` to
    /// layer `i + 1`.
    pub segments: Vec<Vec<(LayerVertex, LayerVertex)>>,
    /// Per summary edge, the dummy chain it passes through.
    pub chains: Vec<(NodeId, NodeId, Vec<LayerVertex>)>,
}

pub const BARYCENTER_PASSES: usize = 4;

fn crossings(order: &[Vec<LayerVertex>], segments: &[Vec<(LayerVertex, LayerVertex)>]) -> usize {
    let rank: BTreeMap<LayerVertex, usize> =
        order.iter().flat_map(|layer| layer.iter().enumerate().map(|(i, v)| (*v, i))).collect();
    segments
        .iter()
        .map(|segs| {
            let mut count = 0;
            for (i, (a1, b1)) in segs.iter().enumerate() {
                for (a2, b2) in &segs[i + 1..] {
                    let (u1, u2, v1, v2) = (rank[a1], rank[a2], rank[b1], rank[b2]);
                    if (u1 < u2 && v1 > v2) || (u1 > u2 && v1 < v2) {
                        count += 1;
                    }
                }
            }
            count
        })
        .sum()
}

fn sweep(order: &mut [Vec<LayerVertex>], segments: &[Vec<(LayerVertex, LayerVertex)>], downward: bool) {
    let layers = order.len();
    let indices: Vec<usize> = if downward { (1..layers).collect() } else { (0..layers.saturating_sub(1)).rev().collect() };
    for i in indices {
        let fixed_layer = if downward { i - 1 } else { i + 1 };
        let fixed: BTreeMap<LayerVertex, usize> =
            order[fixed_layer].iter().enumerate().map(|(k, v)| (*v, k)).collect();
        let mut sums: BTreeMap<LayerVertex, (f64, usize)> = BTreeMap::new();
        let segs = if downward { &segments[i - 1] } else { &segments[i] };
        for &(upper, lower) in segs {
            let (moving, anchor) = if downward { (lower, upper) } else { (upper, lower) };
            let e = sums.entry(moving).or_insert((0.0, 0));
            e.0 += fixed[&anchor] as f64;
            e.1 += 1;
        }
        let mut keyed: Vec<(f64, usize, LayerVertex)> = order[i]
            .iter()
            .enumerate()
            .map(|(k, v)| match sums.get(v) {
                Some(&(s, n)) => (s / n as f64, k, *v),
                None => (k as f64, k, *v),
            })
            .collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        order[i] = keyed.into_iter().map(|(_, _, v)| v).collect();
    }
}

/// Longest-path layering with dummy vertices and barycenter ordering.
///
/// Runs [`BARYCENTER_PASSES`] down-then-up sweep pairs and keeps the
/// ordering with the fewest crossings seen, the initial one included.
pub fn layer_dag(summary: &Summary) -> Result<Layering, LayoutError> {
    let topo = summary.topological_order().ok_or(LayoutError::Cycle)?;
    let mut layer_of: BTreeMap<NodeId, usize> = topo.iter().map(|&id| (id, 0)).collect();
    let succ = summary.successors();
    for id in &topo {
        let l = layer_of[id];
        for e in &succ[id] {
            let t = layer_of.get_mut(&e.target).ok_or(LayoutError::Cycle)?;
            *t = (*t).max(l + 1);
        }
    }
    let depth = layer_of.values().copied().max().map_or(0, |m| m + 1);
    let mut initial: Vec<Vec<LayerVertex>> = vec![Vec::new(); depth];
    for (&id, &l) in &layer_of {
        initial[l].push(LayerVertex::Node(id));
    }
    let mut segments: Vec<Vec<(LayerVertex, LayerVertex)>> = vec![Vec::new(); depth.saturating_sub(1)];
    let mut chains = Vec::with_capacity(summary.edges.len());
    let mut dummies = 0;
    let mut edges: Vec<_> = summary.edges.iter().collect();
    edges.sort_by_key(|e| (e.source, e.target));
    for e in edges {
        let (ls, lt) = (layer_of[&e.source], layer_of[&e.target]);
        let mut prev = LayerVertex::Node(e.source);
        let mut chain = Vec::new();
        for l in ls + 1..lt {
            let d = LayerVertex::Dummy(dummies);
            dummies += 1;
            initial[l].push(d);
            segments[l - 1].push((prev, d));
            chain.push(d);
            prev = d;
        }
        segments[lt - 1].push((prev, LayerVertex::Node(e.target)));
        chains.push((e.source, e.target, chain));
    }

    let mut best = initial.clone();
    let mut best_crossings = crossings(&best, &segments);
    let mut order = initial.clone();
    for _ in 0..BARYCENTER_PASSES {
        for downward in [true, false] {
            sweep(&mut order, &segments, downward);
            let c = crossings(&order, &segments);
            if c < best_crossings {
                best_crossings = c;
                best = order.clone();
            }
        }
    }
    Ok(Layering { layer_of, initial, ordered: best, segments, chains })
}

/// Layered DAG layout; `y = layer * (node_height + vertical_gap)` and each
/// layer is centered on the widest one.
pub fn layout_dag(summary: &Summary, cfg: &LayoutConfig) -> Result<LayoutResult, LayoutError> {
    expect_kind(summary, SummaryKind::Dag, cfg)?;
    let layering = layer_dag(summary)?;
    let step = cfg.column_step();
    let widest = layering.ordered.iter().map(Vec::len).max().unwrap_or(0) as f64;
    let mut slot: BTreeMap<LayerVertex, Point> = BTreeMap::new();
    for (l, layer) in layering.ordered.iter().enumerate() {
        let indent = (widest - layer.len() as f64) * step / 2.0;
        for (k, v) in layer.iter().enumerate() {
            slot.insert(*v, Point { x: indent + k as f64 * step, y: l as f64 * cfg.row_step() });
        }
    }
    let positions: BTreeMap<NodeId, Point> = slot
        .iter()
        .filter_map(|(v, p)| match v {
            LayerVertex::Node(id) => Some((*id, *p)),
            LayerVertex::Dummy(_) => None,
        })
        .collect();
    let routes = layering
        .chains
        .iter()
        .map(|(s, t, chain)| {
            let mut points = vec![bottom_center(positions[s], cfg)];
            for d in chain {
                let p = slot[d];
                points.push(Point { x: p.x + cfg.node_width / 2.0, y: p.y + cfg.node_height / 2.0 });
            }
            points.push(top_center(positions[t], cfg));
            EdgeRoute { source: *s, target: *t, shape: RouteShape::Line, points }
        })
        .collect();
    Ok(LayoutResult::from_positions(summary, cfg, positions, routes))
}

// ---------------------------------------------------------- linear set

/// Equidistant columns, one per pattern, ordered by descending cluster size
/// (ties keep summary order). Within a column a node sits at
/// `avg_index * scale`, pushed down to clear the node above it.
pub fn layout_linear_set(summary: &Summary, cfg: &LayoutConfig) -> Result<LayoutResult, LayoutError> {
    expect_kind(summary, SummaryKind::LinearSet, cfg)?;
    let by_id: BTreeMap<NodeId, f64> = summary.nodes.iter().map(|n| (n.id, n.avg_index)).collect();
    if let Some(id) = summary.patterns.iter().flat_map(|p| &p.nodes).find(|id| !by_id.contains_key(id)) {
        return Err(LayoutError::Invalid(vec![Violation::UnknownPatternNode(*id)]));
    }
    let max_avg = by_id.values().copied().fold(0.0, f64::max);
    let scale = if max_avg > 0.0 { (cfg.canvas_height - cfg.node_height).max(0.0) / max_avg } else { 0.0 };

    let mut columns: Vec<usize> = (0..summary.patterns.len()).collect();
    columns.sort_by(|&a, &b| summary.patterns[b].cluster_size.cmp(&summary.patterns[a].cluster_size).then(a.cmp(&b)));

    let mut positions = BTreeMap::new();
    for (k, &p) in columns.iter().enumerate() {
        let x = k as f64 * cfg.column_step();
        let mut floor = f64::NEG_INFINITY;
        for id in &summary.patterns[p].nodes {
            let y = (by_id[id] * scale).max(floor).max(0.0);
            positions.insert(*id, Point { x, y });
            floor = y + cfg.node_height;
        }
    }
    let routes = summary
        .edges
        .iter()
        .filter(|e| positions.contains_key(&e.source) && positions.contains_key(&e.target))
        .map(|e| EdgeRoute {
            source: e.source,
            target: e.target,
            shape: RouteShape::Line,
            points: vec![bottom_center(positions[&e.source], cfg), top_center(positions[&e.target], cfg)],
        })
        .collect();
    Ok(LayoutResult::from_positions(summary, cfg, positions, routes))
}
