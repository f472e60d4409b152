//! Summary JSON.
//!
//! ```json
//! {"kind": "tree", "meta": {...}, "nodes": [{"id", "event", "support", "avgIndex", "hidden"}],
//!  "edges": [{"source", "target", "support"}], "patterns": [{"nodes": [...], "clusterSize": n}]}
//! ```
//!
//! `event` is an index into `meta.alphabet`, or `null` for the virtual root.
//! Output is canonical: nodes sorted by id, edges by endpoints, object keys
//! sorted, so equal summaries serialize to identical bytes.

use serde::{Deserialize, Serialize};
use seqsum_core::summary::{NodeId, Pattern};
use seqsum_core::{EventId, Summary, SummaryEdge, SummaryKind, SummaryMeta, SummaryNode};

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct SummaryFile {
    kind: String,
    meta: MetaFile,
    nodes: Vec<NodeFile>,
    edges: Vec<EdgeFile>,
    #[serde(default)]
    patterns: Vec<PatternFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct MetaFile {
    technique: String,
    granularity: f64,
    dataset: String,
    #[serde(default)]
    alphabet: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct NodeFile {
    id: u32,
    event: Option<u32>,
    support: usize,
    avg_index: f64,
    #[serde(default)]
    hidden: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct EdgeFile {
    source: u32,
    target: u32,
    support: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct PatternFile {
    nodes: Vec<u32>,
    cluster_size: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum SchemaError {
    #[error("invalid summary JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown summary kind {0:?}")]
    Kind(String),
}

pub fn to_json(summary: &Summary) -> String {
    let mut s = summary.clone();
    s.canonicalize();
    let file = SummaryFile {
        kind: s.kind.as_str().into(),
        meta: MetaFile {
            technique: s.meta.technique,
            granularity: s.meta.granularity,
            dataset: s.meta.dataset,
            alphabet: s.meta.alphabet,
        },
        nodes: s
            .nodes
            .iter()
            .map(|n| NodeFile { id: n.id.0, event: n.event.map(|e| e.0), support: n.support, avg_index: n.avg_index, hidden: n.hidden })
            .collect(),
        edges: s.edges.iter().map(|e| EdgeFile { source: e.source.0, target: e.target.0, support: e.support }).collect(),
        patterns: s
            .patterns
            .iter()
            .map(|p| PatternFile { nodes: p.nodes.iter().map(|n| n.0).collect(), cluster_size: p.cluster_size })
            .collect(),
    };
    // Going through `Value` sorts object keys.
    let value = serde_json::to_value(&file).expect("summary serializes");
    let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
    out.push('\n');
    out
}

pub fn from_json(text: &str) -> Result<Summary, SchemaError> {
    let f: SummaryFile = serde_json::from_str(text)?;
    let kind = SummaryKind::parse(&f.kind).ok_or(SchemaError::Kind(f.kind.clone()))?;
    Ok(Summary {
        kind,
        meta: SummaryMeta {
            technique: f.meta.technique,
            granularity: f.meta.granularity,
            dataset: f.meta.dataset,
            alphabet: f.meta.alphabet,
        },
        nodes: f
            .nodes
            .into_iter()
            .map(|n| SummaryNode {
                id: NodeId(n.id),
                event: n.event.map(EventId),
                support: n.support,
                avg_index: n.avg_index,
                hidden: n.hidden,
            })
            .collect(),
        edges: f
            .edges
            .into_iter()
            .map(|e| SummaryEdge { source: NodeId(e.source), target: NodeId(e.target), support: e.support })
            .collect(),
        patterns: f
            .patterns
            .into_iter()
            .map(|p| Pattern { nodes: p.nodes.into_iter().map(NodeId).collect(), cluster_size: p.cluster_size })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = r#"{
        "kind": "tree",
        "meta": {"technique": "coreflow", "granularity": 0.5, "dataset": "toy", "alphabet": ["A", "B"]},
        "nodes": [
            {"id": 0, "event": null, "support": 3, "avgIndex": 0.0, "hidden": true},
            {"id": 1, "event": 0, "support": 3, "avgIndex": 0.0, "hidden": false},
            {"id": 2, "event": 1, "support": 2, "avgIndex": 1.0, "hidden": false}
        ],
        "edges": [{"source": 0, "target": 1, "support": 3}, {"source": 1, "target": 2, "support": 2}],
        "patterns": []
    }"#;

    #[test]
    fn fixture_parses() {
        let s = from_json(FIXTURE).unwrap();
        assert_eq!((s.nodes.len(), s.edges.len()), (3, 2));
        assert!(s.validate().is_empty());
        assert_eq!(s.nodes[0].event, None);
    }

    #[test]
    fn round_trip_and_determinism() {
        let s = from_json(FIXTURE).unwrap();
        let a = to_json(&s);
        assert_eq!(from_json(&a).unwrap(), s);
        assert_eq!(to_json(&from_json(&a).unwrap()), a);
    }

    #[test]
    fn schema_mismatch() {
        assert!(matches!(from_json(&FIXTURE.replace("\"tree\"", "\"forest\"")), Err(SchemaError::Kind(_))));
        assert!(matches!(from_json(&FIXTURE.replace("avgIndex", "avg")), Err(SchemaError::Json(_))));
        assert!(from_json("[]").is_err());
    }
}
