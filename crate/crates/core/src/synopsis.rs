//! Sequence Synopsis: MDL-driven clustering by greedy pairwise merging.
//!
//! Every sequence starts as its own cluster whose pattern is the sequence
//! itself. A merge replaces two clusters by one whose pattern is the LCS of
//! the two patterns. The merge with the largest decrease of
//!
//! ```text
//! DL = w * sum(|pattern|) + sum(edit cost of each member from its pattern)
//! ```
//!
//! is applied until no merge strictly decreases `DL`. Edits are insertions
//! and deletions only, so `edit(p, s) = |p| + |s| - 2 * LCS(p, s)`. The
//! pattern weight is `w = (1 - lambda) * mean sequence length`; a larger
//! `lambda` makes patterns cheap and keeps more of them.
//!
//! Each cluster pattern stays a subsequence of every member (the LCS of two
//! subsequences of a member is one too). That makes a member's edit cost
//! `|member| - |pattern|`, which is what the merge-gain computation uses.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::model::{Dataset, EventId};
use crate::summary::{NodeId, Pattern, Summary, SummaryEdge, SummaryKind, SummaryMeta, SummaryNode};
use crate::util::greedy_match;
use crate::MiningError;

/// Smallest objective decrease accepted as a strict improvement.
const MIN_GAIN: f64 = 1e-9;

/// Length of the longest common subsequence.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// A longest common subsequence that keeps the earliest possible elements
/// of `a`.
pub fn lcs<T: PartialEq + Clone>(a: &[T], b: &[T]) -> Vec<T> {
    let (n, m) = (a.len(), b.len());
    // suffix[i][j] = LCS length of a[i..], b[j..]
    let mut suffix = vec![0usize; (n + 1) * (m + 1)];
    let at = |i: usize, j: usize| i * (m + 1) + j;
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            suffix[at(i, j)] = if a[i] == b[j] {
                suffix[at(i + 1, j + 1)] + 1
            } else {
                suffix[at(i + 1, j)].max(suffix[at(i, j + 1)])
            };
        }
    }
    let mut out = Vec::with_capacity(suffix[0]);
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] {
            out.push(a[i].clone());
            i += 1;
            j += 1;
        } else if suffix[at(i, j + 1)] >= suffix[at(i + 1, j)] {
            j += 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Minimum number of insertions and deletions turning `pattern` into `seq`.
pub fn edit_cost<T: PartialEq>(pattern: &[T], seq: &[T]) -> usize {
    pattern.len() + seq.len() - 2 * lcs_len(pattern, seq)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynopsisParams {
    lambda: f64,
    pattern_weight: f64,
}

impl SynopsisParams {
    pub fn new(lambda: f64, data: &Dataset) -> Result<Self, MiningError> {
        if !(lambda.is_finite() && lambda > 0.0 && lambda <= 1.0) {
            return Err(MiningError::InvalidGranularity(lambda));
        }
        if data.is_empty() {
            return Err(MiningError::EmptyDataset);
        }
        let mean_len = data.total_events() as f64 / data.len() as f64;
        Ok(SynopsisParams { lambda, pattern_weight: (1.0 - lambda) * mean_len })
    }

    /// Parameters with an explicit pattern weight.
    pub fn with_weight(lambda: f64, pattern_weight: f64) -> Self {
        SynopsisParams { lambda, pattern_weight: pattern_weight.max(0.0) }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn pattern_weight(&self) -> f64 {
        self.pattern_weight
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    /// Dataset indices of member sequences, ascending.
    pub members: Vec<usize>,
    pub pattern: Vec<EventId>,
    pub edit_cost: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptionLength {
    pub pattern_cost: f64,
    pub edit_cost: usize,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("cluster {0} has no members")]
    EmptyCluster(usize),
    #[error("sequence {0} is in more than one cluster")]
    Overlap(usize),
    #[error("sequence {0} is in no cluster")]
    Uncovered(usize),
    #[error("sequence index {0} is outside the dataset")]
    OutOfRange(usize),
}

/// Description length of a clustering, recomputing every member's edit
/// cost from scratch.
pub fn objective(
    data: &Dataset,
    clusters: &[Cluster],
    params: &SynopsisParams,
) -> Result<DescriptionLength, PartitionError> {
    let mut owner = vec![false; data.len()];
    for (k, c) in clusters.iter().enumerate() {
        if c.members.is_empty() {
            return Err(PartitionError::EmptyCluster(k));
        }
        for &m in &c.members {
            let slot = owner.get_mut(m).ok_or(PartitionError::OutOfRange(m))?;
            if core::mem::replace(slot, true) {
                return Err(PartitionError::Overlap(m));
            }
        }
    }
    if let Some(m) = owner.iter().position(|&o| !o) {
        return Err(PartitionError::Uncovered(m));
    }
    let pattern_len: usize = clusters.iter().map(|c| c.pattern.len()).sum();
    let edits: usize = clusters
        .iter()
        .flat_map(|c| c.members.iter().map(|&m| edit_cost(&c.pattern, &data.sequences()[m].events)))
        .sum();
    let pattern_cost = params.pattern_weight * pattern_len as f64;
    Ok(DescriptionLength { pattern_cost, edit_cost: edits, total: pattern_cost + edits as f64 })
}

/// Result of a clustering run.
#[derive(Debug, Clone, PartialEq)]
pub struct Synopsis {
    /// Surviving clusters, ordered by their smallest member.
    pub clusters: Vec<Cluster>,
    /// Objective before the first merge and after every accepted merge.
    pub trace: Vec<f64>,
}

struct Slot {
    members: Vec<usize>,
    pattern: Vec<EventId>,
    /// Sum of member lengths.
    mass: usize,
    alive: bool,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    gain: f64,
    size: usize,
    first: (usize, usize),
    a: usize,
    b: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    /// Max-heap order: larger gain, then smaller combined cluster, then
    /// lexicographically smaller member ids.
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then(other.size.cmp(&self.size))
            .then(other.first.cmp(&self.first))
    }
}

fn merge_candidate(slots: &[Slot], weight: f64, a: usize, b: usize) -> Candidate {
    let (sa, sb) = (&slots[a], &slots[b]);
    let merged = lcs_len(&sa.pattern, &sb.pattern);
    let (na, nb) = (sa.members.len(), sb.members.len());
    let (pa, pb) = (sa.pattern.len(), sb.pattern.len());
    // Pattern symbols saved and extra member edits incurred by the merge.
    let saved = pa + pb - merged;
    let extra = (na * pa + nb * pb) - (na + nb) * merged;
    let first = (sa.members[0].min(sb.members[0]), sa.members[0].max(sb.members[0]));
    Candidate { gain: weight * saved as f64 - extra as f64, size: na + nb, first, a, b }
}

/// Clusters the dataset by greedy MDL merging.
pub fn cluster(data: &Dataset, params: &SynopsisParams) -> Result<Synopsis, MiningError> {
    if data.is_empty() {
        return Err(MiningError::EmptyDataset);
    }
    let weight = params.pattern_weight;
    let mut slots: Vec<Slot> = data
        .sequences()
        .iter()
        .enumerate()
        .map(|(i, s)| Slot { members: vec![i], pattern: s.events.clone(), mass: s.len(), alive: true })
        .collect();

    let mut heap = BinaryHeap::new();
    for a in 0..slots.len() {
        for b in a + 1..slots.len() {
            let c = merge_candidate(&slots, weight, a, b);
            if c.gain > MIN_GAIN {
                heap.push(c);
            }
        }
    }

    let slot_edits = |s: &Slot| s.mass - s.members.len() * s.pattern.len();
    let mut pattern_len: usize = slots.iter().map(|s| s.pattern.len()).sum();
    let mut edits = 0usize;
    let mut trace = vec![weight * pattern_len as f64];

    while let Some(c) = heap.pop() {
        if !(slots[c.a].alive && slots[c.b].alive) {
            continue;
        }
        let pattern = lcs(&slots[c.a].pattern, &slots[c.b].pattern);
        let retired = slot_edits(&slots[c.a]) + slot_edits(&slots[c.b]);
        pattern_len = pattern_len + pattern.len() - slots[c.a].pattern.len() - slots[c.b].pattern.len();
        let mut members = core::mem::take(&mut slots[c.a].members);
        members.append(&mut slots[c.b].members);
        members.sort_unstable();
        let merged = Slot { members, pattern, mass: slots[c.a].mass + slots[c.b].mass, alive: true };
        edits = edits + slot_edits(&merged) - retired;
        slots[c.a].alive = false;
        slots[c.b].alive = false;
        slots.push(merged);
        trace.push(weight * pattern_len as f64 + edits as f64);

        let new = slots.len() - 1;
        for other in 0..new {
            if slots[other].alive {
                let c = merge_candidate(&slots, weight, other, new);
                if c.gain > MIN_GAIN {
                    heap.push(c);
                }
            }
        }
    }

    let mut clusters: Vec<Cluster> = slots
        .into_iter()
        .filter(|s| s.alive)
        .map(|s| Cluster { edit_cost: slot_edits(&s), members: s.members, pattern: s.pattern })
        .collect();
    clusters.sort_by_key(|c| c.members[0]);
    Ok(Synopsis { clusters, trace })
}

/// Mines a Sequence Synopsis summary: one linear pattern per cluster.
///
/// Patterns are listed by descending cluster size (ties by smallest
/// member). Node support is the cluster size and node average index is the
/// mean matched position over the members.
pub fn mine_synopsis(data: &Dataset, params: &SynopsisParams) -> Result<Summary, MiningError> {
    let synopsis = cluster(data, params)?;
    Ok(to_summary(data, params, &synopsis))
}

pub fn to_summary(data: &Dataset, params: &SynopsisParams, synopsis: &Synopsis) -> Summary {
    let mut order: Vec<&Cluster> = synopsis.clusters.iter().collect();
    order.sort_by(|x, y| y.members.len().cmp(&x.members.len()).then(x.members[0].cmp(&y.members[0])));

    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut patterns = Vec::new();
    for c in order {
        let size = c.members.len();
        let mut sums = vec![0usize; c.pattern.len()];
        for &m in &c.members {
            let pos = greedy_match(&c.pattern, &data.sequences()[m].events)
                .expect("cluster pattern is a subsequence of every member");
            sums.iter_mut().zip(pos).for_each(|(s, p)| *s += p);
        }
        let ids: Vec<NodeId> = (0..c.pattern.len()).map(|k| NodeId((nodes.len() + k) as u32)).collect();
        for ((&id, &event), sum) in ids.iter().zip(&c.pattern).zip(sums) {
            nodes.push(SummaryNode {
                id,
                event: Some(event),
                support: size,
                avg_index: sum as f64 / size as f64,
                hidden: false,
            });
        }
        for w in ids.windows(2) {
            edges.push(SummaryEdge { source: w[0], target: w[1], support: size });
        }
        patterns.push(Pattern { nodes: ids, cluster_size: size });
    }
    let mut summary = Summary {
        kind: SummaryKind::LinearSet,
        meta: SummaryMeta {
            technique: "synopsis".into(),
            granularity: params.lambda,
            dataset: data.name().into(),
            alphabet: data.alphabet().iter().map(|e| e.label.clone()).collect(),
        },
        nodes,
        edges,
        patterns,
    };
    summary.canonicalize();
    summary
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<EventId> {
        v.iter().copied().map(EventId).collect()
    }

    #[test]
    fn edit_cost_examples() {
        assert_eq!(edit_cost(&ids(&[0, 1]), &ids(&[0, 1])), 0);
        assert_eq!(edit_cost(&ids(&[]), &ids(&[0, 1, 2])), 3);
        assert_eq!(edit_cost(&ids(&[0, 1, 2]), &ids(&[2, 1, 0])), 4);
    }

    #[test]
    fn lcs_prefers_earliest_match() {
        assert_eq!(lcs(&[1, 2], &[2, 1]), vec![1]);
        assert_eq!(lcs(&[0, 1, 2], &[0, 1, 3]), vec![0, 1]);
        assert_eq!(lcs::<u8>(&[], &[1]), Vec::<u8>::new());
        assert_eq!(lcs_len(&[1, 2, 3, 4], &[2, 4, 3]), 2);
    }

    #[test]
    fn duplicates_merge() {
        let d = Dataset::from_labels("dup", vec![("1", vec!["A", "B"]), ("2", vec!["A", "B"])]).unwrap();
        for lambda in [0.15, 0.5, 0.9] {
            let p = SynopsisParams::new(lambda, &d).unwrap();
            let s = cluster(&d, &p).unwrap();
            assert_eq!(s.clusters.len(), 1);
            assert_eq!(s.clusters[0].pattern, ids(&[0, 1]));
            assert_eq!(s.clusters[0].edit_cost, 0);
            assert_eq!(s.clusters[0].members, vec![0, 1]);
        }
    }

    #[test]
    fn lambda_one_never_merges_distinct_sequences() {
        let d = Dataset::from_labels("x", vec![("1", vec!["A"]), ("2", vec!["A", "B"])]).unwrap();
        let p = SynopsisParams::new(1.0, &d).unwrap();
        assert_eq!(cluster(&d, &p).unwrap().clusters.len(), 2);
    }

    #[test]
    fn objective_examples() {
        let d = Dataset::from_labels("ab", vec![("1", vec!["A"]), ("2", vec!["B"])]).unwrap();
        let p = SynopsisParams::with_weight(0.5, 3.0);
        let one = [Cluster { members: vec![0, 1], pattern: vec![], edit_cost: 2 }];
        let dl = objective(&d, &one, &p).unwrap();
        assert_eq!((dl.total, dl.edit_cost), (2.0, 2));

        let singletons = [
            Cluster { members: vec![0], pattern: ids(&[0]), edit_cost: 0 },
            Cluster { members: vec![1], pattern: ids(&[1]), edit_cost: 0 },
        ];
        assert_eq!(objective(&d, &singletons, &p).unwrap().total, 3.0 * 2.0);
    }

    #[test]
    fn objective_rejects_bad_partitions() {
        let d = Dataset::from_labels("ab", vec![("1", vec!["A"]), ("2", vec!["B"])]).unwrap();
        let p = SynopsisParams::with_weight(0.5, 1.0);
        let c = |m: Vec<usize>| Cluster { members: m, pattern: vec![], edit_cost: 0 };
        assert_eq!(objective(&d, &[c(vec![0])], &p), Err(PartitionError::Uncovered(1)));
        assert_eq!(objective(&d, &[c(vec![0, 1]), c(vec![1])], &p), Err(PartitionError::Overlap(1)));
        assert_eq!(objective(&d, &[c(vec![0, 1]), c(vec![])], &p), Err(PartitionError::EmptyCluster(1)));
        assert_eq!(objective(&d, &[c(vec![0, 1, 2])], &p), Err(PartitionError::OutOfRange(2)));
    }

    #[test]
    fn summary_shape() {
        let d = Dataset::from_labels(
            "s",
            vec![("1", vec!["A", "B"]), ("2", vec!["X", "A", "B"]), ("3", vec!["C"])],
        )
        .unwrap();
        let p = SynopsisParams::with_weight(0.5, 1.0);
        let s = mine_synopsis(&d, &p).unwrap();
        assert!(s.validate().is_empty());
        assert_eq!(s.patterns.len(), 2);
        assert_eq!(s.patterns[0].cluster_size, 2);
        let a = s.node(s.patterns[0].nodes[0]).unwrap();
        assert_eq!((s.label(a), a.avg_index), ("A", 0.5));
    }

    #[test]
    fn trace_starts_at_singleton_cost() {
        let d = Dataset::from_labels("t", vec![("1", vec!["A", "B"]), ("2", vec!["A", "B", "C"])]).unwrap();
        let p = SynopsisParams::new(0.15, &d).unwrap();
        let s = cluster(&d, &p).unwrap();
        assert_eq!(s.trace[0], p.pattern_weight() * 5.0);
        assert_eq!(s.trace.len(), 2);
        assert!(s.trace[1] < s.trace[0]);
    }

    #[test]
    fn params_validation() {
        let d = Dataset::from_labels("t", vec![("1", vec!["A"])]).unwrap();
        assert!(SynopsisParams::new(0.0, &d).is_err());
        assert!(SynopsisParams::new(1.1, &d).is_err());
        let empty = Dataset::new("e", vec![], vec![]).unwrap();
        assert_eq!(SynopsisParams::new(0.5, &empty), Err(MiningError::EmptyDataset));
        assert!((SynopsisParams::new(0.15, &d).unwrap().pattern_weight() - 0.85).abs() < 1e-12);
    }
}
