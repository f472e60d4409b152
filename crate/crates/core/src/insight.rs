//! Automated content checks of a summary against ground-truth insights.
//!
//! An insight names key events in order and the number of sequences that
//! follow them. A summary "contains the key events" when one directed path
//! of visible nodes (trees, DAGs) or one pattern (linear sets) has them as
//! an in-order subsequence. The matched count is the bottleneck support
//! between the first and last matched node, maximized over all matches.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::EventId;
use crate::summary::{NodeId, Summary, SummaryKind};
use crate::util::greedy_match;

pub const DEFAULT_TOLERANCE: f64 = 0.10;

#[derive(Debug, Clone, PartialEq)]
pub struct InsightQuery {
    pub events: Vec<String>,
    pub expected_count: usize,
    /// Relative tolerance in `[0, 1)`.
    pub tolerance: f64,
    pub description: String,
}

impl InsightQuery {
    pub fn new(events: Vec<String>, expected_count: usize) -> Self {
        InsightQuery { events, expected_count, tolerance: DEFAULT_TOLERANCE, description: String::new() }
    }

    pub fn is_valid(&self) -> bool {
        !self.events.is_empty() && (0.0..1.0).contains(&self.tolerance)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsightVerdict {
    pub contains_key_events: bool,
    pub matched_count: Option<usize>,
    pub numbers_match: bool,
    /// Nodes of the best match, from the first to the last matched node.
    pub matched_path: Vec<NodeId>,
}

impl InsightVerdict {
    fn miss() -> Self {
        InsightVerdict { contains_key_events: false, matched_count: None, numbers_match: false, matched_path: vec![] }
    }

    /// Content tags for this verdict: one on key events, one on counts.
    pub fn tags(&self) -> [&'static str; 2] {
        [
            if self.contains_key_events { "Contains Key Events" } else { "Missing Key Events" },
            if self.numbers_match { "Numbers Match Text Description" } else { "Numbers Do Not Match Text Description" },
        ]
    }
}

/// `|matched - expected| <= tolerance * expected`.
pub fn counts_match(matched: usize, expected: usize, tolerance: f64) -> bool {
    (matched as f64 - expected as f64).abs() <= tolerance * expected as f64 + 1e-9
}

pub fn evaluate(summary: &Summary, query: &InsightQuery) -> InsightVerdict {
    let resolved: Option<Vec<EventId>> = query
        .events
        .iter()
        .map(|label| summary.meta.alphabet.iter().position(|l| l == label).map(|i| EventId(i as u32)))
        .collect();
    let Some(events) = resolved.filter(|e| !e.is_empty()) else {
        return InsightVerdict::miss();
    };
    let best = match summary.kind {
        SummaryKind::LinearSet => best_in_patterns(summary, &events),
        SummaryKind::Tree | SummaryKind::Dag => best_on_paths(summary, &events),
    };
    match best {
        None => InsightVerdict::miss(),
        Some((count, path)) => InsightVerdict {
            contains_key_events: true,
            matched_count: Some(count),
            numbers_match: counts_match(count, query.expected_count, query.tolerance),
            matched_path: path,
        },
    }
}

fn best_in_patterns(summary: &Summary, events: &[EventId]) -> Option<(usize, Vec<NodeId>)> {
    let event_of: BTreeMap<NodeId, Option<EventId>> = summary.nodes.iter().map(|n| (n.id, n.event)).collect();
    let mut best: Option<(usize, Vec<NodeId>)> = None;
    for p in &summary.patterns {
        let seq: Vec<Option<EventId>> = p.nodes.iter().map(|id| event_of.get(id).copied().flatten()).collect();
        let wanted: Vec<Option<EventId>> = events.iter().copied().map(Some).collect();
        if let Some(pos) = greedy_match(&wanted, &seq) {
            if best.as_ref().is_none_or(|(c, _)| p.cluster_size > *c) {
                let path = p.nodes[pos[0]..=*pos.last().unwrap()].to_vec();
                best = Some((p.cluster_size, path));
            }
        }
    }
    best
}

/// Dynamic program over a topological order. `state[v][k]` holds the best
/// bottleneck of a path segment ending at `v` that has matched the first
/// `k` query events, starting at a node matching the first event.
fn best_on_paths(summary: &Summary, events: &[EventId]) -> Option<(usize, Vec<NodeId>)> {
    let order = summary.topological_order()?;
    let m = events.len();
    let node: BTreeMap<NodeId, _> = summary.nodes.iter().filter(|n| !n.hidden).map(|n| (n.id, n)).collect();
    let mut preds: BTreeMap<NodeId, Vec<(NodeId, usize)>> = BTreeMap::new();
    for e in &summary.edges {
        if node.contains_key(&e.source) && node.contains_key(&e.target) {
            preds.entry(e.target).or_default().push((e.source, e.support));
        }
    }
    // (bottleneck, predecessor state) per (node, matched)
    type Cell = Option<(usize, Option<(NodeId, usize)>)>;
    let mut state: BTreeMap<NodeId, Vec<Cell>> = BTreeMap::new();
    let better = |cell: &Cell, value: usize| cell.is_none_or(|(b, _)| value > b);

    for id in order {
        let Some(n) = node.get(&id) else { continue };
        let mut cells: Vec<Cell> = vec![None; m + 1];
        if n.event == Some(events[0]) {
            cells[1] = Some((n.support, None));
        }
        for &(p, edge_support) in preds.get(&id).map(Vec::as_slice).unwrap_or(&[]) {
            let Some(pc) = state.get(&p) else { continue };
            for k in 1..m {
                let Some((b, _)) = pc[k] else { continue };
                let value = b.min(edge_support).min(n.support);
                let k2 = if n.event == Some(events[k]) { k + 1 } else { k };
                if better(&cells[k2], value) {
                    cells[k2] = Some((value, Some((p, k))));
                }
                // Also allow passing through without consuming the match.
                if k2 != k && better(&cells[k], value) {
                    cells[k] = Some((value, Some((p, k))));
                }
            }
        }
        state.insert(id, cells);
    }

    let (end, count) = state
        .iter()
        .filter_map(|(&id, cells)| cells[m].map(|(b, _)| (id, b)))
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))?;
    let mut path = vec![end];
    let (mut id, mut k) = (end, m);
    while let Some((_, Some((p, pk)))) = state[&id][k] {
        path.push(p);
        id = p;
        k = pk;
    }
    path.reverse();
    Some((count, path))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub verdicts: Vec<InsightVerdict>,
    /// Fraction of queries whose key events are present; `None` for no queries.
    pub contains_fraction: Option<f64>,
    pub numbers_fraction: Option<f64>,
}

pub fn score_report(summary: &Summary, queries: &[InsightQuery]) -> ScoreReport {
    let verdicts: Vec<InsightVerdict> = queries.iter().map(|q| evaluate(summary, q)).collect();
    let fraction = |pred: fn(&InsightVerdict) -> bool| {
        (!verdicts.is_empty()).then(|| verdicts.iter().filter(|v| pred(v)).count() as f64 / verdicts.len() as f64)
    };
    ScoreReport {
        contains_fraction: fraction(|v| v.contains_key_events),
        numbers_fraction: fraction(|v| v.numbers_match),
        verdicts,
    }
}
