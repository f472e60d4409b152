//! SentenTree-style frequent pattern growth into a DAG.
//!
//! Growth starts from the empty pattern supported by every sequence. The
//! active pattern with the highest support is extended by the best
//! single-event insertion (any gap, greedy left-to-right matching). The
//! extension becomes a new pattern that shares the parent's nodes plus one
//! new node, while the parent stays active over its full support and keeps
//! looking for further extensions. A candidate whose events are a
//! subsequence of an already generated pattern is skipped, so every pattern
//! adds something new. Because extensions only insert, every pattern orders
//! its shared nodes the same way and the merged graph is acyclic.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::model::{Dataset, EventId};
use crate::summary::{NodeId, Summary, SummaryEdge, SummaryKind, SummaryMeta, SummaryNode};
use crate::util::{greedy_match, is_subsequence};
use crate::{MinSupport, MiningError};

pub const DEFAULT_MAX_NODES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SentenTreeConfig {
    /// Growth stops once this many nodes exist. `None` grows until no
    /// extension reaches the threshold.
    pub max_nodes: Option<usize>,
}

impl Default for SentenTreeConfig {
    fn default() -> Self {
        SentenTreeConfig { max_nodes: Some(DEFAULT_MAX_NODES) }
    }
}

/// Number of sequences containing `pattern` as a (not necessarily
/// contiguous) subsequence.
pub fn subsequence_support<'a, I>(seqs: I, pattern: &[EventId]) -> usize
where
    I: IntoIterator<Item = &'a [EventId]>,
{
    seqs.into_iter().filter(|s| is_subsequence(pattern, s)).count()
}

/// A pattern being grown, with its sequence support set.
#[derive(Debug, Clone)]
pub struct GrowthPattern {
    pub events: Vec<EventId>,
    nodes: Vec<usize>,
    /// Dataset indices of supporting sequences, ascending.
    pub support: Vec<usize>,
}

struct Extension {
    event: EventId,
    gap: usize,
    support: Vec<usize>,
    position_sum: usize,
}

impl Extension {
    /// Orders better extensions first: higher support, then lower average
    /// index of the inserted event, then lower event id, then earlier gap.
    fn rank_key(&self) -> (core::cmp::Reverse<usize>, Mean, EventId, usize) {
        (
            core::cmp::Reverse(self.support.len()),
            Mean { sum: self.position_sum, count: self.support.len() },
            self.event,
            self.gap,
        )
    }
}

/// Exact mean compared by cross-multiplication.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Mean {
    sum: usize,
    count: usize,
}

impl PartialOrd for Mean {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mean {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        (self.sum as u128 * other.count as u128).cmp(&(other.sum as u128 * self.count as u128))
    }
}

struct Grower<'a> {
    data: &'a Dataset,
    threshold: usize,
    node_events: Vec<EventId>,
    node_avg: Vec<f64>,
    generated: Vec<Vec<EventId>>,
}

impl Grower<'_> {
    fn seq(&self, i: usize) -> &[EventId] {
        &self.data.sequences()[i].events
    }

    fn best_extension(&self, p: &GrowthPattern) -> Option<Extension> {
        let mut best: Option<Extension> = None;
        let mut candidate = Vec::with_capacity(p.events.len() + 1);
        for ev in self.data.alphabet() {
            for gap in 0..=p.events.len() {
                candidate.clear();
                candidate.extend_from_slice(&p.events[..gap]);
                candidate.push(ev.id);
                candidate.extend_from_slice(&p.events[gap..]);
                if self.generated.iter().any(|g| is_subsequence(&candidate, g)) {
                    continue;
                }
                let mut support = Vec::new();
                let mut position_sum = 0;
                for &i in &p.support {
                    if let Some(pos) = greedy_match(&candidate, self.seq(i)) {
                        support.push(i);
                        position_sum += pos[gap];
                    }
                }
                if support.len() < self.threshold {
                    continue;
                }
                let ext = Extension { event: ev.id, gap, support, position_sum };
                if best.as_ref().is_none_or(|b| ext.rank_key() < b.rank_key()) {
                    best = Some(ext);
                }
            }
        }
        best
    }

    fn extend(&mut self, p: &GrowthPattern, ext: Extension) -> GrowthPattern {
        let node = self.node_events.len();
        self.node_events.push(ext.event);
        self.node_avg.push(ext.position_sum as f64 / ext.support.len() as f64);
        let mut events = p.events.clone();
        events.insert(ext.gap, ext.event);
        let mut nodes = p.nodes.clone();
        nodes.insert(ext.gap, node);
        self.generated.push(events.clone());
        GrowthPattern { events, nodes, support: ext.support }
    }
}

/// Runs pattern growth and returns the final pattern set, in the order the
/// patterns stopped growing, together with the per-node events and
/// average indices.
fn grow(
    data: &Dataset,
    min_support: MinSupport,
    config: SentenTreeConfig,
) -> (Vec<GrowthPattern>, Vec<EventId>, Vec<f64>) {
    let mut g = Grower {
        data,
        threshold: min_support.absolute_threshold(data.len()),
        node_events: Vec::new(),
        node_avg: Vec::new(),
        generated: Vec::new(),
    };
    let mut active =
        alloc::vec![GrowthPattern { events: Vec::new(), nodes: Vec::new(), support: (0..data.len()).collect() }];
    let mut finished = Vec::new();

    while !active.is_empty() {
        if config.max_nodes.is_some_and(|cap| g.node_events.len() >= cap) {
            break;
        }
        // Highest support first; ties go to the longer pattern, then the
        // earliest created.
        let pick = active
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| {
                a.support
                    .len()
                    .cmp(&b.support.len())
                    .then(a.events.len().cmp(&b.events.len()))
                    .then(ib.cmp(ia))
            })
            .map(|(i, _)| i)
            .unwrap();
        match g.best_extension(&active[pick]) {
            Some(ext) => {
                let child = g.extend(&active[pick], ext);
                active.push(child);
            }
            None => finished.push(active.remove(pick)),
        }
    }
    finished.extend(active);
    finished.retain(|p| !p.events.is_empty());
    (finished, g.node_events, g.node_avg)
}

/// Final pattern set without merging, for inspection and testing.
pub fn growth_patterns(
    data: &Dataset,
    min_support: MinSupport,
    config: SentenTreeConfig,
) -> Result<Vec<GrowthPattern>, MiningError> {
    if data.is_empty() {
        return Err(MiningError::EmptyDataset);
    }
    Ok(grow(data, min_support, config).0)
}

/// Mines a SentenTree DAG. Nodes are shared between a pattern and the
/// patterns grown from it; node and edge supports count the distinct
/// sequences of the final patterns that pass through them.
pub fn mine_sententree(
    data: &Dataset,
    min_support: MinSupport,
    config: SentenTreeConfig,
) -> Result<Summary, MiningError> {
    if data.is_empty() {
        return Err(MiningError::EmptyDataset);
    }
    let (patterns, node_events, node_avg) = grow(data, min_support, config);

    let mut node_seqs: Vec<BTreeSet<usize>> = alloc::vec![BTreeSet::new(); node_events.len()];
    let mut edge_seqs: BTreeMap<(usize, usize), BTreeSet<usize>> = BTreeMap::new();
    for p in &patterns {
        for &n in &p.nodes {
            node_seqs[n].extend(p.support.iter().copied());
        }
        for w in p.nodes.windows(2) {
            edge_seqs.entry((w[0], w[1])).or_default().extend(p.support.iter().copied());
        }
    }

    let mut summary = Summary {
        kind: SummaryKind::Dag,
        meta: SummaryMeta {
            technique: "sententree".into(),
            granularity: min_support.fraction(),
            dataset: data.name().into(),
            alphabet: data.alphabet().iter().map(|e| e.label.clone()).collect(),
        },
        nodes: node_events
            .iter()
            .zip(&node_avg)
            .zip(&node_seqs)
            .enumerate()
            .map(|(i, ((&event, &avg_index), seqs))| SummaryNode {
                id: NodeId(i as u32),
                event: Some(event),
                support: seqs.len(),
                avg_index,
                hidden: false,
            })
            .collect(),
        edges: edge_seqs
            .into_iter()
            .map(|((s, t), seqs)| SummaryEdge {
                source: NodeId(s as u32),
                target: NodeId(t as u32),
                support: seqs.len(),
            })
            .collect(),
        patterns: Vec::new(),
    };
    summary.canonicalize();
    Ok(summary)
}
