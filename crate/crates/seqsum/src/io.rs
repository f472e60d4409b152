//! Dataset files and atomic output.
//!
//! CSV files carry a `sequence_id,event` header; rows for one sequence may be
//! grouped or interleaved and their file order is the event order. JSON files
//! hold `{"name": ..., "sequences": [{"id": ..., "events": [...]}]}`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use seqsum_core::{Dataset, EventId, EventType, ModelError, Sequence};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}: unknown dataset format, expected .csv or .json")]
    UnknownFormat(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetFile {
    name: String,
    sequences: Vec<SequenceFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceFile {
    id: String,
    events: Vec<String>,
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io { path: path.into(), source })
}

fn non_empty(d: Dataset) -> Result<Dataset, IoError> {
    if d.is_empty() {
        Err(ModelError::EmptyDataset.into())
    } else {
        Ok(d)
    }
}

/// Loads a dataset, choosing the format from the file extension. CSV
/// datasets are named after the file stem.
pub fn load_dataset(path: &Path) -> Result<Dataset, IoError> {
    let text = read(path)?;
    match Format::from_path(path) {
        Some(Format::Csv) => {
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
            parse_csv(name, &text)
        }
        Some(Format::Json) => parse_json(&text),
        None => Err(IoError::UnknownFormat(path.into())),
    }
}

pub fn parse_csv(name: &str, text: &str) -> Result<Dataset, IoError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let csv_err = |e: csv::Error| IoError::Csv { line: e.position().map_or(0, |p| p.line()), message: e.to_string() };
    let headers = reader.headers().map_err(csv_err)?.clone();
    if headers.iter().map(str::trim).ne(["sequence_id", "event"]) {
        return Err(IoError::Csv { line: 1, message: format!("expected header sequence_id,event, found {:?}", headers.as_slice()) });
    }
    let mut order: Vec<String> = Vec::new();
    let mut events: BTreeMap<String, Vec<EventId>> = BTreeMap::new();
    let mut labels: BTreeMap<String, EventId> = BTreeMap::new();
    let mut alphabet: Vec<EventType> = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_err)?;
        let line = row.position().map_or(0, |p| p.line());
        let (id, event) = (row[0].trim(), row[1].trim());
        if id.is_empty() || event.is_empty() {
            return Err(IoError::Csv { line, message: "empty sequence_id or event".into() });
        }
        let event = *labels.entry(event.to_string()).or_insert_with(|| {
            let e = EventId(alphabet.len() as u32);
            alphabet.push(EventType { id: e, label: event.to_string() });
            e
        });
        events
            .entry(id.to_string())
            .or_insert_with(|| {
                order.push(id.to_string());
                Vec::new()
            })
            .push(event);
    }
    let sequences = order
        .into_iter()
        .map(|id| {
            let e = events.remove(&id).unwrap_or_default();
            Sequence { id, events: e }
        })
        .collect();
    non_empty(Dataset::new(name, alphabet, sequences)?)
}

pub fn parse_json(text: &str) -> Result<Dataset, IoError> {
    let file: DatasetFile = serde_json::from_str(text)?;
    let d = Dataset::from_labels(file.name, file.sequences.into_iter().map(|s| (s.id, s.events)))?;
    non_empty(d)
}

/// Canonical JSON form: pretty-printed, trailing newline.
pub fn dataset_to_json(d: &Dataset) -> String {
    let file = DatasetFile {
        name: d.name().to_string(),
        sequences: d
            .sequences()
            .iter()
            .map(|s| SequenceFile {
                id: s.id.clone(),
                events: s.events.iter().map(|&e| d.label(e).unwrap_or_default().to_string()).collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("dataset serializes");
    out.push('\n');
    out
}

pub fn dataset_to_csv(d: &Dataset) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["sequence_id", "event"]).expect("in-memory write");
    for s in d.sequences() {
        for &e in &s.events {
            w.write_record([s.id.as_str(), d.label(e).unwrap_or_default()]).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Writes `bytes` to a temporary file next to `path`, then renames it over
/// `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let wrap = |source| IoError::Io { path: path.into(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(wrap)?;
    tmp.write_all(bytes).map_err(wrap)?;
    tmp.as_file().sync_all().map_err(wrap)?;
    tmp.persist(path).map_err(|e| wrap(e.error))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    read(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_row_csv() {
        let d = parse_csv("t", "sequence_id,event\ns1,A\ns1,B\ns1,A\n").unwrap();
        assert_eq!(d.alphabet().iter().map(|e| e.label.as_str()).collect::<Vec<_>>(), ["A", "B"]);
        assert_eq!(d.sequences()[0].events, vec![EventId(0), EventId(1), EventId(0)]);
    }

    #[test]
    fn interleaved_rows_keep_file_order() {
        let d = parse_csv("t", "sequence_id,event\na,X\nb,Y\na,Z\nb,X\n").unwrap();
        assert_eq!(d.sequences()[0].id, "a");
        assert_eq!(d.sequences()[0].events, vec![EventId(0), EventId(2)]);
        assert_eq!(d.sequences()[1].events, vec![EventId(1), EventId(0)]);
    }

    #[test]
    fn malformed_row_reports_line() {
        match parse_csv("t", "sequence_id,event\ns1,A\ns1\n") {
            Err(IoError::Csv { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse_csv("t", "sequence_id,event\ns1,A\n,B\n") {
            Err(IoError::Csv { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert!(matches!(parse_csv("t", "sequence_id,event\n"), Err(IoError::Model(ModelError::EmptyDataset))));
        assert!(matches!(parse_csv("t", ""), Err(IoError::Csv { .. })));
        assert!(matches!(parse_json(r#"{"name":"x","sequences":[]}"#), Err(IoError::Model(ModelError::EmptyDataset))));
    }

    #[test]
    fn wrong_header() {
        assert!(matches!(parse_csv("t", "id,label\ns,A\n"), Err(IoError::Csv { line: 1, .. })));
    }

    #[test]
    fn json_round_trip_is_fixed_point() {
        let text = dataset_to_json(&parse_json(r#"{"name":"x","sequences":[{"id":"a","events":["P","Q"]},{"id":"b","events":["Q"]}]}"#).unwrap());
        assert_eq!(dataset_to_json(&parse_json(&text).unwrap()), text);
        let csv = dataset_to_csv(&parse_json(&text).unwrap());
        assert_eq!(parse_csv("x", &csv).unwrap(), parse_json(&text).unwrap());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
