//! Technique-agnostic mining output.
//!
//! A [`Summary`] is one of three structures: a set of linear patterns
//! (Sequence Synopsis), a tree under a hidden virtual root (CoreFlow), or a
//! DAG (SentenTree). [`Summary::validate`] checks the structural rules for
//! each kind and reports every violation it finds.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::EventId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SummaryKind {
    LinearSet,
    Tree,
    Dag,
}

impl SummaryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SummaryKind::LinearSet => "linear-set",
            SummaryKind::Tree => "tree",
            SummaryKind::Dag => "dag",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linear-set" => Some(SummaryKind::LinearSet),
            "tree" => Some(SummaryKind::Tree),
            "dag" => Some(SummaryKind::Dag),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Technique {
    CoreFlow,
    SentenTree,
    Synopsis,
}

impl Technique {
    pub const ALL: [Technique; 3] = [Technique::CoreFlow, Technique::SentenTree, Technique::Synopsis];

    pub fn as_str(self) -> &'static str {
        match self {
            Technique::CoreFlow => "coreflow",
            Technique::SentenTree => "sententree",
            Technique::Synopsis => "synopsis",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Technique::ALL.into_iter().find(|t| t.as_str() == s)
    }

    pub fn kind(self) -> SummaryKind {
        match self {
            Technique::CoreFlow => SummaryKind::Tree,
            Technique::SentenTree => SummaryKind::Dag,
            Technique::Synopsis => SummaryKind::LinearSet,
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryNode {
    pub id: NodeId,
    /// `None` marks the virtual root sentinel.
    pub event: Option<EventId>,
    /// Number of sequences represented by the node.
    pub support: usize,
    pub avg_index: f64,
    pub hidden: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SummaryEdge {
    pub source: NodeId,
    pub target: NodeId,
    pub support: usize,
}

/// One Sequence Synopsis cluster: its representative pattern and size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub nodes: Vec<NodeId>,
    pub cluster_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryMeta {
    pub technique: String,
    pub granularity: f64,
    pub dataset: String,
    /// Event labels indexed by [`EventId`], so a summary can be read
    /// without its source dataset.
    pub alphabet: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub kind: SummaryKind,
    pub meta: SummaryMeta,
    pub nodes: Vec<SummaryNode>,
    pub edges: Vec<SummaryEdge>,
    pub patterns: Vec<Pattern>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    DuplicateNode(NodeId),
    DanglingEdge { source: NodeId, target: NodeId },
    SelfLoop(NodeId),
    ZeroSupport(NodeId),
    NegativeAvgIndex(NodeId),
    EdgeExceedsEndpoint { source: NodeId, target: NodeId },
    Cycle,
    TreeRoot { roots: usize },
    VisibleRoot(NodeId),
    MultipleParents(NodeId),
    ChildrenExceedParent(NodeId),
    PatternsOnGraph,
    PatternCoverage(NodeId),
    UnknownPatternNode(NodeId),
    NonChainEdge { source: NodeId, target: NodeId },
    PatternSupport(NodeId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNode(n) => write!(f, "duplicate node id {n}"),
            Violation::DanglingEdge { source, target } => {
                write!(f, "edge {source}->{target} references a missing node")
            }
            Violation::SelfLoop(n) => write!(f, "self loop on {n}"),
            Violation::ZeroSupport(n) => write!(f, "node {n} has zero support"),
            Violation::NegativeAvgIndex(n) => write!(f, "node {n} has a negative or NaN average index"),
            Violation::EdgeExceedsEndpoint { source, target } => {
                write!(f, "edge {source}->{target} support exceeds an endpoint")
            }
            Violation::Cycle => f.write_str("cycle"),
            Violation::TreeRoot { roots } => write!(f, "tree has {roots} roots, expected 1"),
            Violation::VisibleRoot(n) => write!(f, "tree root {n} is not hidden"),
            Violation::MultipleParents(n) => write!(f, "node {n} has more than one parent"),
            Violation::ChildrenExceedParent(n) => {
                write!(f, "children of {n} carry more support than the node")
            }
            Violation::PatternsOnGraph => f.write_str("patterns are only allowed on linear sets"),
            Violation::PatternCoverage(n) => write!(f, "node {n} is not in exactly one pattern"),
            Violation::UnknownPatternNode(n) => write!(f, "pattern references missing node {n}"),
            Violation::NonChainEdge { source, target } => {
                write!(f, "edge {source}->{target} does not chain consecutive pattern members")
            }
            Violation::PatternSupport(n) => write!(f, "node {n} support differs from its cluster size"),
        }
    }
}

impl Summary {
    pub fn empty(kind: SummaryKind, meta: SummaryMeta) -> Self {
        Summary { kind, meta, nodes: Vec::new(), edges: Vec::new(), patterns: Vec::new() }
    }

    pub fn node(&self, id: NodeId) -> Option<&SummaryNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn visible_nodes(&self) -> impl Iterator<Item = &SummaryNode> {
        self.nodes.iter().filter(|n| !n.hidden)
    }

    pub fn label(&self, node: &SummaryNode) -> &str {
        node.event
            .and_then(|e| self.meta.alphabet.get(e.index()))
            .map(String::as_str)
            .unwrap_or("")
    }

    /// Sorts nodes by id and edges by endpoints, the order used for
    /// serialization and rendering.
    pub fn canonicalize(&mut self) {
        self.nodes.sort_by_key(|n| n.id);
        self.edges.sort_by_key(|e| (e.source, e.target));
    }

    /// Node ids in a topological order (Kahn, smallest id first), or `None`
    /// when the edges contain a cycle. Edges to unknown nodes are ignored.
    pub fn topological_order(&self) -> Option<Vec<NodeId>> {
        let ids: BTreeSet<NodeId> = self.nodes.iter().map(|n| n.id).collect();
        let mut indegree: BTreeMap<NodeId, usize> = ids.iter().map(|&id| (id, 0)).collect();
        let mut out: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for e in &self.edges {
            if ids.contains(&e.source) && ids.contains(&e.target) {
                *indegree.get_mut(&e.target).unwrap() += 1;
                out.entry(e.source).or_default().push(e.target);
            }
        }
        let mut ready: BTreeSet<NodeId> =
            indegree.iter().filter(|(_, &d)| d == 0).map(|(&id, _)| id).collect();
        let mut order = Vec::with_capacity(ids.len());
        while let Some(id) = ready.pop_first() {
            order.push(id);
            for t in out.get(&id).map(Vec::as_slice).unwrap_or(&[]) {
                let d = indegree.get_mut(t).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(*t);
                }
            }
        }
        (order.len() == ids.len()).then_some(order)
    }

    /// Checks every structural invariant of the summary's kind. An empty
    /// result means the summary is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        let mut by_id: BTreeMap<NodeId, &SummaryNode> = BTreeMap::new();
        for n in &self.nodes {
            if by_id.insert(n.id, n).is_some() {
                report.push(Violation::DuplicateNode(n.id));
            }
            if n.support == 0 {
                report.push(Violation::ZeroSupport(n.id));
            }
            if n.avg_index.is_nan() || n.avg_index < 0.0 {
                report.push(Violation::NegativeAvgIndex(n.id));
            }
        }
        for e in &self.edges {
            if e.source == e.target {
                report.push(Violation::SelfLoop(e.source));
            }
            match (by_id.get(&e.source), by_id.get(&e.target)) {
                (Some(s), Some(t)) => {
                    if self.kind != SummaryKind::LinearSet && e.support > s.support.min(t.support) {
                        report.push(Violation::EdgeExceedsEndpoint { source: e.source, target: e.target });
                    }
                }
                _ => report.push(Violation::DanglingEdge { source: e.source, target: e.target }),
            }
        }
        if self.topological_order().is_none() {
            report.push(Violation::Cycle);
        }
        match self.kind {
            SummaryKind::Tree => self.validate_tree(&by_id, &mut report),
            SummaryKind::Dag => {
                if !self.patterns.is_empty() {
                    report.push(Violation::PatternsOnGraph);
                }
            }
            SummaryKind::LinearSet => self.validate_linear(&by_id, &mut report),
        }
        report
    }

    fn validate_tree(&self, by_id: &BTreeMap<NodeId, &SummaryNode>, report: &mut Vec<Violation>) {
        if !self.patterns.is_empty() {
            report.push(Violation::PatternsOnGraph);
        }
        if self.nodes.is_empty() {
            return;
        }
        let mut parents: BTreeMap<NodeId, usize> = by_id.keys().map(|&id| (id, 0)).collect();
        let mut child_support: BTreeMap<NodeId, usize> = BTreeMap::new();
        for e in &self.edges {
            if let Some(p) = parents.get_mut(&e.target) {
                *p += 1;
                if *p == 2 {
                    report.push(Violation::MultipleParents(e.target));
                }
            }
            *child_support.entry(e.source).or_default() += e.support;
        }
        let roots: Vec<NodeId> = parents.iter().filter(|(_, &p)| p == 0).map(|(&id, _)| id).collect();
        if roots.len() != 1 {
            report.push(Violation::TreeRoot { roots: roots.len() });
        }
        for r in &roots {
            if by_id.get(r).is_some_and(|n| !n.hidden) {
                report.push(Violation::VisibleRoot(*r));
            }
        }
        for (id, total) in child_support {
            if by_id.get(&id).is_some_and(|n| total > n.support) {
                report.push(Violation::ChildrenExceedParent(id));
            }
        }
    }

    fn validate_linear(&self, by_id: &BTreeMap<NodeId, &SummaryNode>, report: &mut Vec<Violation>) {
        let mut owner: BTreeMap<NodeId, usize> = BTreeMap::new();
        let mut seen: BTreeMap<NodeId, usize> = by_id.keys().map(|&id| (id, 0)).collect();
        let mut chain = BTreeSet::new();
        for (k, p) in self.patterns.iter().enumerate() {
            for &id in &p.nodes {
                match seen.get_mut(&id) {
                    Some(count) => {
                        *count += 1;
                        owner.insert(id, k);
                        if by_id[&id].support != p.cluster_size {
                            report.push(Violation::PatternSupport(id));
                        }
                    }
                    None => report.push(Violation::UnknownPatternNode(id)),
                }
            }
            for w in p.nodes.windows(2) {
                chain.insert((w[0], w[1]));
            }
        }
        for (&id, &count) in &seen {
            if count != 1 {
                report.push(Violation::PatternCoverage(id));
            }
        }
        for e in &self.edges {
            if !chain.contains(&(e.source, e.target)) {
                report.push(Violation::NonChainEdge { source: e.source, target: e.target });
            }
        }
    }

    /// Successor lists keyed by node id.
    pub fn successors(&self) -> BTreeMap<NodeId, Vec<&SummaryEdge>> {
        let mut out: BTreeMap<NodeId, Vec<&SummaryEdge>> =
            self.nodes.iter().map(|n| (n.id, Vec::new())).collect();
        for e in &self.edges {
            out.entry(e.source).or_default().push(e);
        }
        out
    }
}

/// Meta block built from string slices.
pub fn meta_for(technique: &str, granularity: f64, dataset: &str, alphabet: &[&str]) -> SummaryMeta {
    SummaryMeta {
        technique: technique.into(),
        granularity,
        dataset: dataset.into(),
        alphabet: alphabet.iter().map(|s| String::from(*s)).collect(),
    }
}

pub(crate) fn hidden_root(id: NodeId, support: usize) -> SummaryNode {
    SummaryNode { id, event: None, support, avg_index: 0.0, hidden: true }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn node(id: u32, event: u32, support: usize) -> SummaryNode {
        SummaryNode { id: NodeId(id), event: Some(EventId(event)), support, avg_index: 0.0, hidden: false }
    }

    fn edge(s: u32, t: u32, support: usize) -> SummaryEdge {
        SummaryEdge { source: NodeId(s), target: NodeId(t), support }
    }

    fn meta() -> SummaryMeta {
        meta_for("test", 0.5, "d", &["A", "B", "C"])
    }

    #[test]
    fn empty_summaries_are_valid() {
        for kind in [SummaryKind::LinearSet, SummaryKind::Tree, SummaryKind::Dag] {
            assert!(Summary::empty(kind, meta()).validate().is_empty());
        }
    }

    #[test]
    fn dag_cycle_is_reported() {
        let mut s = Summary::empty(SummaryKind::Dag, meta());
        s.nodes = vec![node(0, 0, 2), node(1, 1, 2)];
        s.edges = vec![edge(0, 1, 1), edge(1, 0, 1)];
        assert_eq!(s.validate(), vec![Violation::Cycle]);
        assert_eq!(Violation::Cycle.to_string(), "cycle");
    }

    #[test]
    fn tree_rules() {
        let mut s = Summary::empty(SummaryKind::Tree, meta());
        s.nodes = vec![hidden_root(NodeId(0), 3), node(1, 0, 3), node(2, 1, 2), node(3, 2, 2)];
        s.edges = vec![edge(0, 1, 3), edge(1, 2, 2), edge(1, 3, 2)];
        assert_eq!(s.validate(), vec![Violation::ChildrenExceedParent(NodeId(1))]);

        s.edges = vec![edge(0, 1, 3), edge(1, 2, 2), edge(2, 3, 2)];
        assert!(s.validate().is_empty());

        s.edges.push(edge(1, 3, 1));
        assert!(s.validate().contains(&Violation::MultipleParents(NodeId(3))));

        s.edges = vec![edge(0, 1, 3), edge(1, 2, 2)];
        assert!(s.validate().contains(&Violation::TreeRoot { roots: 2 }));

        s.nodes[0].hidden = false;
        s.edges = vec![edge(0, 1, 3), edge(1, 2, 2), edge(2, 3, 2)];
        assert_eq!(s.validate(), vec![Violation::VisibleRoot(NodeId(0))]);
    }

    #[test]
    fn edge_support_bounded_by_endpoints() {
        let mut s = Summary::empty(SummaryKind::Dag, meta());
        s.nodes = vec![node(0, 0, 2), node(1, 1, 5)];
        s.edges = vec![edge(0, 1, 3)];
        assert_eq!(
            s.validate(),
            vec![Violation::EdgeExceedsEndpoint { source: NodeId(0), target: NodeId(1) }]
        );
    }

    #[test]
    fn linear_set_rules() {
        let mut s = Summary::empty(SummaryKind::LinearSet, meta());
        s.nodes = vec![node(0, 0, 2), node(1, 1, 2), node(2, 2, 1)];
        s.patterns = vec![
            Pattern { nodes: vec![NodeId(0), NodeId(1)], cluster_size: 2 },
            Pattern { nodes: vec![NodeId(2)], cluster_size: 1 },
        ];
        s.edges = vec![edge(0, 1, 2)];
        assert!(s.validate().is_empty());

        s.edges.push(edge(1, 2, 1));
        assert_eq!(
            s.validate(),
            vec![Violation::NonChainEdge { source: NodeId(1), target: NodeId(2) }]
        );
        s.edges.pop();

        s.patterns[1].nodes.push(NodeId(1));
        let report = s.validate();
        assert!(report.contains(&Violation::PatternCoverage(NodeId(1))));
        assert!(report.contains(&Violation::PatternSupport(NodeId(1))));
    }

    #[test]
    fn misc_violations() {
        let mut s = Summary::empty(SummaryKind::Dag, meta());
        s.nodes = vec![node(0, 0, 0), node(0, 1, 1)];
        s.nodes[1].avg_index = -1.0;
        s.edges = vec![edge(0, 0, 0), edge(0, 9, 1)];
        s.patterns = vec![Pattern { nodes: vec![], cluster_size: 1 }];
        let report = s.validate();
        for v in [
            Violation::DuplicateNode(NodeId(0)),
            Violation::ZeroSupport(NodeId(0)),
            Violation::NegativeAvgIndex(NodeId(0)),
            Violation::SelfLoop(NodeId(0)),
            Violation::DanglingEdge { source: NodeId(0), target: NodeId(9) },
            Violation::PatternsOnGraph,
        ] {
            assert!(report.contains(&v), "missing {v}");
        }
    }

    #[test]
    fn topological_order_prefers_small_ids() {
        let mut s = Summary::empty(SummaryKind::Dag, meta());
        s.nodes = vec![node(3, 0, 1), node(1, 1, 1), node(2, 2, 1)];
        s.edges = vec![edge(3, 1, 1)];
        assert_eq!(s.topological_order(), Some(vec![NodeId(2), NodeId(3), NodeId(1)]));
    }
}
