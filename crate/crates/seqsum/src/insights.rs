//! Insight query files and evaluation reports.
//!
//! Input is a JSON array of `{"events": [...], "expectedCount": n,
//! "tolerance": 0.1, "description": "..."}`. Entries with
//! `"type": "absence"` describe something that did *not* happen; they are
//! kept in the report as unsupported rather than evaluated.

use serde::{Deserialize, Serialize};
use seqsum_core::insight::{evaluate, InsightQuery, DEFAULT_TOLERANCE};
use seqsum_core::Summary;

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct QueryFile {
    #[serde(default, rename = "type")]
    kind: Option<String>,
    #[serde(default)]
    events: Vec<String>,
    #[serde(default)]
    expected_count: usize,
    #[serde(default)]
    tolerance: Option<f64>,
    #[serde(default)]
    description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Insight {
    Query(InsightQuery),
    Unsupported { description: String, reason: String },
}

#[derive(Debug, thiserror::Error)]
pub enum InsightError {
    #[error("invalid insights JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("insight {index}: {message}")]
    Invalid { index: usize, message: String },
}

pub fn parse_insights(text: &str) -> Result<Vec<Insight>, InsightError> {
    let raw: Vec<QueryFile> = serde_json::from_str(text)?;
    raw.into_iter()
        .enumerate()
        .map(|(index, q)| match q.kind.as_deref() {
            None | Some("sequence") => {
                let query = InsightQuery {
                    events: q.events,
                    expected_count: q.expected_count,
                    tolerance: q.tolerance.unwrap_or(DEFAULT_TOLERANCE),
                    description: q.description,
                };
                if query.is_valid() {
                    Ok(Insight::Query(query))
                } else {
                    Err(InsightError::Invalid { index, message: "events must be non-empty and tolerance in [0, 1)".into() })
                }
            }
            Some("absence") => {
                Ok(Insight::Unsupported { description: q.description, reason: "absence queries are not supported".into() })
            }
            Some(other) => Err(InsightError::Invalid { index, message: format!("unknown insight type {other:?}") }),
        })
        .collect()
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportEntry {
    pub description: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contains_key_events: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matched_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numbers_match: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub matched_path: Vec<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub technique: String,
    pub dataset: String,
    pub granularity: f64,
    pub queries: Vec<ReportEntry>,
    /// Over evaluated queries only; `null` when there are none.
    pub contains_fraction: Option<f64>,
    pub numbers_fraction: Option<f64>,
}

pub fn report(summary: &Summary, insights: &[Insight]) -> Report {
    let mut queries = Vec::with_capacity(insights.len());
    let (mut evaluated, mut contains, mut numbers) = (0usize, 0usize, 0usize);
    for insight in insights {
        queries.push(match insight {
            Insight::Query(q) => {
                let v = evaluate(summary, q);
                evaluated += 1;
                contains += v.contains_key_events as usize;
                numbers += v.numbers_match as usize;
                ReportEntry {
                    description: q.description.clone(),
                    status: "evaluated",
                    events: q.events.clone(),
                    expected_count: Some(q.expected_count),
                    contains_key_events: Some(v.contains_key_events),
                    matched_count: v.matched_count,
                    numbers_match: Some(v.numbers_match),
                    matched_path: v.matched_path.iter().map(|n| n.0).collect(),
                    tags: v.tags().to_vec(),
                    reason: None,
                }
            }
            Insight::Unsupported { description, reason } => ReportEntry {
                description: description.clone(),
                status: "unsupported",
                events: vec![],
                expected_count: None,
                contains_key_events: None,
                matched_count: None,
                numbers_match: None,
                matched_path: vec![],
                tags: vec![],
                reason: Some(reason.clone()),
            },
        });
    }
    let fraction = |k: usize| (evaluated > 0).then(|| k as f64 / evaluated as f64);
    Report {
        technique: summary.meta.technique.clone(),
        dataset: summary.meta.dataset.clone(),
        granularity: summary.meta.granularity,
        queries,
        contains_fraction: fraction(contains),
        numbers_fraction: fraction(numbers),
    }
}

pub fn report_json(r: &Report) -> String {
    let mut out = serde_json::to_string_pretty(r).expect("report serializes");
    out.push('\n');
    out
}
