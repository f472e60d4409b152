//! CoreFlow: recursive rank-divide-trim mining into a tree.
//!
//! Starting from every sequence under a hidden virtual root, each step
//! ranks events by how many working sequences contain them, adds the top
//! event as a child, splits the working set by containment, trims the
//! containing sequences past the first occurrence, and recurses on both
//! halves. A branch stops once no event reaches the global threshold.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{Dataset, EventId};
use crate::summary::{hidden_root, NodeId, Summary, SummaryEdge, SummaryKind, SummaryMeta, SummaryNode};
use crate::{MinSupport, MiningError};

/// A sequence still being mined, viewed from `offset` onwards.
#[derive(Debug, Clone, Copy)]
struct Cursor {
    seq: usize,
    offset: usize,
}

struct Miner<'a> {
    data: &'a Dataset,
    threshold: usize,
    nodes: Vec<SummaryNode>,
    edges: Vec<SummaryEdge>,
}

/// Per-event tallies for one rank step.
#[derive(Clone, Copy, Default)]
struct Tally {
    count: usize,
    /// Sum of first-occurrence positions relative to each cursor.
    relative: usize,
    /// Same occurrences, in untrimmed sequence coordinates.
    absolute: usize,
}

impl Miner<'_> {
    fn events(&self, c: Cursor) -> &[EventId] {
        &self.data.sequences()[c.seq].events[c.offset..]
    }

    fn rank(&self, group: &[Cursor]) -> Option<(EventId, Tally)> {
        let width = self.data.alphabet().len();
        let mut tallies = vec![Tally::default(); width];
        let mut seen = vec![false; width];
        for &c in group {
            seen.iter_mut().for_each(|s| *s = false);
            for (pos, e) in self.events(c).iter().enumerate() {
                if !seen[e.index()] {
                    seen[e.index()] = true;
                    let t = &mut tallies[e.index()];
                    t.count += 1;
                    t.relative += pos;
                    t.absolute += c.offset + pos;
                }
            }
        }
        // Equal counts make the relative sums directly comparable as means.
        tallies
            .into_iter()
            .enumerate()
            .filter(|(_, t)| t.count >= self.threshold)
            .min_by(|(ea, a), (eb, b)| {
                b.count.cmp(&a.count).then(a.relative.cmp(&b.relative)).then(ea.cmp(eb))
            })
            .map(|(e, t)| (EventId(e as u32), t))
    }

    fn grow(&mut self, mut group: Vec<Cursor>, parent: NodeId) {
        while !group.is_empty() {
            let Some((event, tally)) = self.rank(&group) else {
                break;
            };
            let id = NodeId(self.nodes.len() as u32);
            self.nodes.push(SummaryNode {
                id,
                event: Some(event),
                support: tally.count,
                avg_index: tally.absolute as f64 / tally.count as f64,
                hidden: false,
            });
            self.edges.push(SummaryEdge { source: parent, target: id, support: tally.count });

            let mut containing = Vec::with_capacity(tally.count);
            let mut rest = Vec::with_capacity(group.len() - tally.count);
            for c in group {
                match self.events(c).iter().position(|&e| e == event) {
                    Some(p) => containing.push(Cursor { seq: c.seq, offset: c.offset + p + 1 }),
                    None => rest.push(c),
                }
            }
            self.grow(containing, id);
            group = rest;
        }
    }
}

/// Mines a CoreFlow tree. Node ids are assigned in pre-order with the
/// hidden root as node 0.
pub fn mine_coreflow(data: &Dataset, min_support: MinSupport) -> Result<Summary, MiningError> {
    if data.is_empty() {
        return Err(MiningError::EmptyDataset);
    }
    let mut miner = Miner {
        data,
        threshold: min_support.absolute_threshold(data.len()),
        nodes: vec![hidden_root(NodeId(0), data.len())],
        edges: Vec::new(),
    };
    let all = (0..data.len()).map(|seq| Cursor { seq, offset: 0 }).collect();
    miner.grow(all, NodeId(0));

    let mut summary = Summary {
        kind: SummaryKind::Tree,
        meta: SummaryMeta {
            technique: "coreflow".into(),
            granularity: min_support.fraction(),
            dataset: data.name().into(),
            alphabet: data.alphabet().iter().map(|e| e.label.clone()).collect(),
        },
        nodes: miner.nodes,
        edges: miner.edges,
        patterns: Vec::new(),
    };
    summary.canonicalize();
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Dataset {
        Dataset::from_labels(
            "abc",
            vec![("1", vec!["A", "B", "C"]), ("2", vec!["A", "B", "D"]), ("3", vec!["A", "C", "D"])],
        )
        .unwrap()
    }

    fn shape(s: &Summary) -> Vec<(u32, Option<u32>, usize, u32)> {
        s.edges
            .iter()
            .map(|e| {
                let t = s.node(e.target).unwrap();
                (e.source.0, t.event.map(|e| e.0), t.support, e.target.0)
            })
            .collect()
    }

    #[test]
    fn worked_example() {
        let s = mine_coreflow(&abc(), MinSupport::new(0.5).unwrap()).unwrap();
        // Root(0) -> A(1, support 3) -> B(2, support 2)
        assert_eq!(shape(&s), vec![(0, Some(0), 3, 1), (1, Some(1), 2, 2)]);
        assert_eq!(s.nodes.len(), 3);
        assert!(s.nodes[0].hidden);
        assert_eq!(s.nodes[0].support, 3);
        assert_eq!(s.nodes[1].avg_index, 0.0);
        assert_eq!(s.nodes[2].avg_index, 1.0);
        assert!(s.validate().is_empty());
    }

    #[test]
    fn single_sequence_chain() {
        let d = Dataset::from_labels("one", vec![("s", vec!["A", "B"])]).unwrap();
        let s = mine_coreflow(&d, MinSupport::new(1.0).unwrap()).unwrap();
        assert_eq!(shape(&s), vec![(0, Some(0), 1, 1), (1, Some(1), 1, 2)]);
    }

    #[test]
    fn repeated_events_along_a_path() {
        let d = Dataset::from_labels("rep", vec![("s", vec!["A", "A", "A"])]).unwrap();
        let s = mine_coreflow(&d, MinSupport::new(1.0).unwrap()).unwrap();
        assert_eq!(s.nodes.len(), 4);
        let avg: Vec<f64> = s.nodes.iter().skip(1).map(|n| n.avg_index).collect();
        assert_eq!(avg, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn not_containing_group_stays_under_parent() {
        let d = Dataset::from_labels(
            "split",
            vec![("1", vec!["A"]), ("2", vec!["A"]), ("3", vec!["B"]), ("4", vec!["B", "C"])],
        )
        .unwrap();
        let s = mine_coreflow(&d, MinSupport::new(0.5).unwrap()).unwrap();
        // A wins the count tie on event id; B is mined from the remainder.
        assert_eq!(shape(&s), vec![(0, Some(0), 2, 1), (0, Some(1), 2, 2)]);
    }

    #[test]
    fn threshold_is_global() {
        // Inside the A branch (2 sequences) C appears once; 1/2 of the branch
        // would pass a rescaled threshold but not the global one of 2.
        let d = Dataset::from_labels(
            "g",
            vec![("1", vec!["A", "C"]), ("2", vec!["A"]), ("3", vec!["B"]), ("4", vec!["B"])],
        )
        .unwrap();
        let s = mine_coreflow(&d, MinSupport::new(0.5).unwrap()).unwrap();
        assert_eq!(s.nodes.len(), 3);
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let d = Dataset::new("e", vec![], vec![]).unwrap();
        assert_eq!(mine_coreflow(&d, MinSupport::new(0.5).unwrap()), Err(MiningError::EmptyDataset));
    }

    #[test]
    fn min_support_validation() {
        assert!(MinSupport::new(0.0).is_err());
        assert!(MinSupport::new(1.5).is_err());
        assert!(MinSupport::new(f64::NAN).is_err());
        assert_eq!(MinSupport::new(0.3).unwrap().absolute_threshold(10), 3);
        assert_eq!(MinSupport::new(0.05).unwrap().absolute_threshold(3), 1);
    }
}
