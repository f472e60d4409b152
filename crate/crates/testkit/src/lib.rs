//! Test support for seqsum: random fixtures and deliberately naive reference
//! implementations. Nothing here shares code paths with `seqsum-core`
//! beyond its plain data types.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use seqsum_core::layout::{LayerVertex, LayoutResult};
use seqsum_core::summary::NodeId;
use seqsum_core::{Dataset, Summary, SummaryKind};

/// Random dataset with `1..=max_seqs` sequences of length `1..=max_len`
/// over labels `e0..e{max_events-1}`.
pub fn random_dataset<R: Rng>(rng: &mut R, max_seqs: usize, max_events: usize, max_len: usize) -> Dataset {
    let n = rng.gen_range(1..=max_seqs);
    let seqs: Vec<(String, Vec<String>)> = (0..n)
        .map(|i| {
            let len = rng.gen_range(1..=max_len);
            let events = (0..len).map(|_| format!("e{}", rng.gen_range(0..max_events))).collect();
            (format!("s{i}"), events)
        })
        .collect();
    Dataset::from_labels("random", seqs).unwrap()
}

/// Dataset over labels `e{k}` from raw symbol vectors.
pub fn dataset_from_raw(seqs: &[Vec<u32>]) -> Dataset {
    Dataset::from_labels(
        "generated",
        seqs.iter()
            .enumerate()
            .map(|(i, s)| (format!("s{i}"), s.iter().map(|e| format!("e{e}")).collect::<Vec<_>>())),
    )
    .unwrap()
}

pub fn raw(d: &Dataset) -> Vec<Vec<u32>> {
    d.sequences().iter().map(|s| s.events.iter().map(|e| e.0).collect()).collect()
}

// ------------------------------------------------------------- counting

#[derive(Debug, PartialEq)]
pub struct CountedStats {
    pub sequences: usize,
    pub total: usize,
    pub unique: usize,
    pub min: usize,
    pub max: usize,
    pub median: f64,
}

/// One-pass tally followed by a counting-sort median.
pub fn count_stats(seqs: &[Vec<u32>]) -> CountedStats {
    let mut total = 0;
    let mut min = usize::MAX;
    let mut max = 0;
    let mut unique = BTreeSet::new();
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for s in seqs {
        total += s.len();
        min = min.min(s.len());
        max = max.max(s.len());
        unique.extend(s.iter().copied());
        *histogram.entry(s.len()).or_default() += 1;
    }
    let expanded: Vec<usize> = histogram.iter().flat_map(|(&len, &k)| std::iter::repeat_n(len, k)).collect();
    let n = expanded.len();
    let median = if n % 2 == 1 {
        expanded[n / 2] as f64
    } else {
        (expanded[n / 2 - 1] as f64 + expanded[n / 2] as f64) * 0.5
    };
    CountedStats { sequences: seqs.len(), total, unique: unique.len(), min, max, median }
}

/// Exhaustive scan for the mean first-occurrence index of `event`.
pub fn scan_avg_index(seqs: &[Vec<u32>], event: u32) -> Option<f64> {
    let mut hits = Vec::new();
    for s in seqs {
        for (i, &e) in s.iter().enumerate() {
            if e == event {
                hits.push(i as f64);
                break;
            }
        }
    }
    if hits.is_empty() {
        None
    } else {
        Some(hits.iter().sum::<f64>() / hits.len() as f64)
    }
}

// ------------------------------------------------------- dynamic programs

/// Insert/delete edit distance by the textbook quadratic table.
pub fn dp_edit_distance(a: &[u32], b: &[u32]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            d[i][j] = if a[i - 1] == b[j - 1] {
                d[i - 1][j - 1]
            } else {
                1 + d[i - 1][j].min(d[i][j - 1])
            };
        }
    }
    d[a.len()][b.len()]
}

/// `reach[i][j]`: the first `i` pattern symbols embed in the first `j`
/// sequence symbols.
pub fn dp_is_subsequence(pattern: &[u32], seq: &[u32]) -> bool {
    let mut reach = vec![vec![false; seq.len() + 1]; pattern.len() + 1];
    for j in 0..=seq.len() {
        reach[0][j] = true;
    }
    for i in 1..=pattern.len() {
        for j in 1..=seq.len() {
            reach[i][j] = reach[i][j - 1] || (reach[i - 1][j - 1] && pattern[i - 1] == seq[j - 1]);
        }
    }
    reach[pattern.len()][seq.len()]
}

/// All subsequences of `s` (with repeats), by bitmask enumeration.
pub fn all_subsequences(s: &[u32]) -> Vec<Vec<u32>> {
    (0u32..(1 << s.len()))
        .map(|mask| s.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &e)| e).collect())
        .collect()
}

// ------------------------------------------------------------- coreflow

#[derive(Debug, Clone, PartialEq)]
pub struct RefNode {
    pub event: u32,
    pub support: usize,
    pub avg_index: f64,
    pub children: Vec<RefNode>,
}

/// Straightforward recursive rank-divide-trim over owned, physically
/// trimmed sequences. `offset` tracks where each remainder started.
pub fn reference_coreflow(seqs: &[Vec<u32>], threshold: usize) -> Vec<RefNode> {
    let group: Vec<(usize, Vec<u32>)> = seqs.iter().map(|s| (0, s.clone())).collect();
    reference_branch(&group, threshold)
}

fn reference_branch(group: &[(usize, Vec<u32>)], threshold: usize) -> Vec<RefNode> {
    if group.is_empty() {
        return Vec::new();
    }
    let events: BTreeSet<u32> = group.iter().flat_map(|(_, s)| s.iter().copied()).collect();
    // (event, count, relative position sum)
    let mut best: Option<(u32, usize, usize)> = None;
    for e in events {
        let firsts: Vec<usize> = group.iter().filter_map(|(_, s)| s.iter().position(|&x| x == e)).collect();
        let count = firsts.len();
        if count < threshold {
            continue;
        }
        let sum: usize = firsts.iter().sum();
        let better = match best {
            None => true,
            Some((_, bc, bs)) => count > bc || (count == bc && sum < bs),
        };
        if better {
            best = Some((e, count, sum));
        }
    }
    let Some((top, count, _)) = best else {
        return Vec::new();
    };
    let mut containing = Vec::new();
    let mut rest = Vec::new();
    let mut absolute = 0;
    for (offset, s) in group {
        match s.iter().position(|&x| x == top) {
            Some(p) => {
                absolute += offset + p;
                containing.push((offset + p + 1, s[p + 1..].to_vec()));
            }
            None => rest.push((*offset, s.clone())),
        }
    }
    let mut out = vec![RefNode {
        event: top,
        support: count,
        avg_index: absolute as f64 / count as f64,
        children: reference_branch(&containing, threshold),
    }];
    out.extend(reference_branch(&rest, threshold));
    out
}

/// Nested view of a tree summary below its root, children in id order.
pub fn tree_view(s: &Summary) -> Vec<RefNode> {
    let mut kids: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for e in &s.edges {
        kids.entry(e.source).or_default().push(e.target);
    }
    kids.values_mut().for_each(|v| v.sort());
    fn walk(s: &Summary, kids: &BTreeMap<NodeId, Vec<NodeId>>, id: NodeId) -> Vec<RefNode> {
        kids.get(&id)
            .map(|v| {
                v.iter()
                    .map(|c| {
                        let n = s.node(*c).unwrap();
                        RefNode {
                            event: n.event.unwrap().0,
                            support: n.support,
                            avg_index: n.avg_index,
                            children: walk(s, kids, *c),
                        }
                    })
                    .collect()
            })
            .unwrap_or_default()
    }
    let root = s.nodes.iter().find(|n| n.hidden).map(|n| n.id).unwrap_or(NodeId(0));
    walk(s, &kids, root)
}

/// Multiset of (root-to-node event path, support) over a nested tree.
pub fn tree_paths(nodes: &[RefNode]) -> BTreeMap<(Vec<u32>, usize), usize> {
    fn walk(nodes: &[RefNode], prefix: &mut Vec<u32>, out: &mut BTreeMap<(Vec<u32>, usize), usize>) {
        for n in nodes {
            prefix.push(n.event);
            *out.entry((prefix.clone(), n.support)).or_default() += 1;
            walk(&n.children, prefix, out);
            prefix.pop();
        }
    }
    let mut out = BTreeMap::new();
    walk(nodes, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------- description length

/// Description length of one cluster for a given pattern.
pub fn cluster_dl(pattern: &[u32], members: &[Vec<u32>], weight: f64) -> f64 {
    weight * pattern.len() as f64 + members.iter().map(|m| dp_edit_distance(pattern, m)).sum::<usize>() as f64
}

/// Best single-cluster pattern over every subsequence of every member.
pub fn exhaustive_best_pattern(members: &[Vec<u32>], weight: f64) -> (Vec<u32>, f64) {
    let mut best: Option<(Vec<u32>, f64)> = None;
    for m in members {
        for p in all_subsequences(m) {
            let dl = cluster_dl(&p, members, weight);
            if best.as_ref().is_none_or(|(_, b)| dl < *b) {
                best = Some((p, dl));
            }
        }
    }
    best.unwrap()
}

// ------------------------------------------------------------- paths

/// Best bottleneck support over every directed path of visible nodes that
/// embeds `query` with the path starting and ending on matched nodes.
pub fn brute_force_best_path(s: &Summary, query: &[u32]) -> Option<usize> {
    let visible: BTreeMap<NodeId, (u32, usize)> =
        s.nodes.iter().filter(|n| !n.hidden).map(|n| (n.id, (n.event.unwrap().0, n.support))).collect();
    let mut out: BTreeMap<NodeId, Vec<(NodeId, usize)>> = BTreeMap::new();
    for e in &s.edges {
        if visible.contains_key(&e.source) && visible.contains_key(&e.target) {
            out.entry(e.source).or_default().push((e.target, e.support));
        }
    }
    let mut paths: Vec<(Vec<NodeId>, Vec<usize>)> = Vec::new();
    fn extend(
        out: &BTreeMap<NodeId, Vec<(NodeId, usize)>>,
        nodes: &mut Vec<NodeId>,
        edges: &mut Vec<usize>,
        paths: &mut Vec<(Vec<NodeId>, Vec<usize>)>,
    ) {
        paths.push((nodes.clone(), edges.clone()));
        let last = *nodes.last().unwrap();
        for &(t, sup) in out.get(&last).map(Vec::as_slice).unwrap_or(&[]) {
            nodes.push(t);
            edges.push(sup);
            extend(out, nodes, edges, paths);
            nodes.pop();
            edges.pop();
        }
    }
    for &id in visible.keys() {
        extend(&out, &mut vec![id], &mut Vec::new(), &mut paths);
    }
    let mut best = None;
    for (nodes, edges) in paths {
        let events: Vec<u32> = nodes.iter().map(|n| visible[n].0).collect();
        if events.first() != query.first() || events.last() != query.last() {
            continue;
        }
        if !dp_is_subsequence(query, &events) {
            continue;
        }
        let b = nodes.iter().map(|n| visible[n].1).chain(edges.iter().copied()).min().unwrap();
        best = best.max(Some(b));
    }
    best
}

// ------------------------------------------------------------- geometry

#[derive(Debug, Clone, Copy)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn overlaps(&self, o: &Rect) -> bool {
        let eps = 1e-9;
        self.x + self.w > o.x + eps && o.x + o.w > self.x + eps && self.y + self.h > o.y + eps && o.y + o.h > self.y + eps
    }
}

pub fn visible_rects(s: &Summary, l: &LayoutResult) -> Vec<(NodeId, Rect)> {
    s.nodes
        .iter()
        .filter(|n| !n.hidden)
        .map(|n| {
            let p = l.positions[&n.id];
            (n.id, Rect { x: p.x, y: p.y, w: l.config.node_width, h: l.config.node_height })
        })
        .collect()
}

/// Every geometric rule a layout must satisfy; returns the broken ones.
pub fn geometry_violations(s: &Summary, l: &LayoutResult) -> Vec<String> {
    let mut bad = Vec::new();
    let rects = visible_rects(s, l);
    for (i, (a, ra)) in rects.iter().enumerate() {
        for (b, rb) in &rects[i + 1..] {
            if ra.overlaps(rb) {
                bad.push(format!("{a} overlaps {b}"));
            }
        }
        if ra.x < -1e-9 || ra.y < -1e-9 || ra.x + ra.w > l.width + 1e-9 || ra.y + ra.h > l.height + 1e-9 {
            bad.push(format!("{a} outside canvas"));
        }
    }
    if s.kind != SummaryKind::LinearSet {
        for e in &s.edges {
            if l.positions[&e.target].y <= l.positions[&e.source].y {
                bad.push(format!("edge {}->{} not downward", e.source, e.target));
            }
        }
    }
    if s.kind == SummaryKind::Dag {
        for n in &s.nodes {
            for e in s.edges.iter().filter(|e| e.target == n.id) {
                if l.positions[&n.id].y <= l.positions[&e.source].y {
                    bad.push(format!("{} not below predecessor {}", n.id, e.source));
                }
            }
        }
    }
    bad
}

/// True when two sibling subtrees interleave: at some shared depth a node
/// of an earlier sibling is not fully left of every node of a later one.
pub fn sibling_subtrees_interleave(s: &Summary, l: &LayoutResult) -> bool {
    let mut kids: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for e in &s.edges {
        kids.entry(e.source).or_default().push(e.target);
    }
    fn extents(
        kids: &BTreeMap<NodeId, Vec<NodeId>>,
        l: &LayoutResult,
        id: NodeId,
        depth: usize,
        out: &mut BTreeMap<usize, (f64, f64)>,
    ) {
        let x = l.positions[&id].x;
        let e = out.entry(depth).or_insert((x, x));
        e.0 = e.0.min(x);
        e.1 = e.1.max(x);
        for c in kids.get(&id).map(Vec::as_slice).unwrap_or(&[]) {
            extents(kids, l, *c, depth + 1, out);
        }
    }
    kids.values().any(|children| {
        let mut sorted = children.clone();
        sorted.sort_by(|a, b| l.positions[a].x.total_cmp(&l.positions[b].x));
        let spans: Vec<BTreeMap<usize, (f64, f64)>> = sorted
            .iter()
            .map(|c| {
                let mut m = BTreeMap::new();
                extents(&kids, l, *c, 0, &mut m);
                m
            })
            .collect();
        spans.iter().enumerate().any(|(i, a)| {
            spans[i + 1..].iter().any(|b| {
                a.iter().any(|(d, (_, hi))| b.get(d).is_some_and(|(lo, _)| hi + l.config.node_width > *lo + 1e-9))
            })
        })
    })
}

/// Pairwise segment crossings between adjacent layers.
pub fn count_crossings(order: &[Vec<LayerVertex>], segments: &[Vec<(LayerVertex, LayerVertex)>]) -> usize {
    let index = |v: &LayerVertex| {
        order.iter().find_map(|layer| layer.iter().position(|x| x == v)).expect("vertex in some layer")
    };
    let mut total = 0;
    for segs in segments {
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                let (a, b) = (index(&segs[i].0) as i64 - index(&segs[j].0) as i64, index(&segs[i].1) as i64 - index(&segs[j].1) as i64);
                if a * b < 0 {
                    total += 1;
                }
            }
        }
    }
    total
}

/// Random DAG summary with edges only from lower to higher ids.
pub fn random_dag<R: Rng>(rng: &mut R, max_nodes: usize) -> Summary {
    use seqsum_core::summary::{meta_for, SummaryEdge, SummaryNode};
    use seqsum_core::EventId;
    let n = rng.gen_range(1..=max_nodes);
    let nodes: Vec<SummaryNode> = (0..n)
        .map(|i| SummaryNode {
            id: NodeId(i as u32),
            event: Some(EventId(rng.gen_range(0..3))),
            support: rng.gen_range(1..=12),
            avg_index: i as f64,
            hidden: false,
        })
        .collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.3) {
                let cap = nodes[a].support.min(nodes[b].support);
                edges.push(SummaryEdge { source: NodeId(a as u32), target: NodeId(b as u32), support: rng.gen_range(1..=cap) });
            }
        }
    }
    Summary { kind: SummaryKind::Dag, meta: meta_for("random", 0.1, "random", &["A", "B", "C"]), nodes, edges, patterns: vec![] }
}
