//! Event-sequence data model and dataset statistics.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Dense index into a dataset's event alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub u32);

impl EventId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventType {
    pub id: EventId,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    pub id: String,
    pub events: Vec<EventId>,
}

impl Sequence {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("dataset contains no sequences")]
    EmptyDataset,
    #[error("sequence {0:?} has no events")]
    EmptySequence(String),
    #[error("duplicate sequence id {0:?}")]
    DuplicateSequence(String),
    #[error("duplicate event label {0:?}")]
    DuplicateLabel(String),
    #[error("alphabet entry {position} has id {found}, expected dense ids")]
    NonDenseAlphabet { position: usize, found: EventId },
    #[error("sequence {sequence:?} uses event {event} outside the alphabet")]
    UnknownEvent { sequence: String, event: EventId },
}

/// An immutable collection of event sequences over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    name: String,
    alphabet: Vec<EventType>,
    sequences: Vec<Sequence>,
}

impl Dataset {
    /// Builds a dataset from already-indexed parts, checking every invariant.
    ///
    /// An empty sequence list is allowed here; consumers that need data
    /// report [`ModelError::EmptyDataset`] themselves.
    pub fn new(
        name: impl Into<String>,
        alphabet: Vec<EventType>,
        sequences: Vec<Sequence>,
    ) -> Result<Self, ModelError> {
        let mut labels = BTreeSet::new();
        for (position, ev) in alphabet.iter().enumerate() {
            if ev.id.index() != position {
                return Err(ModelError::NonDenseAlphabet { position, found: ev.id });
            }
            if !labels.insert(ev.label.as_str()) {
                return Err(ModelError::DuplicateLabel(ev.label.clone()));
            }
        }
        let mut ids = BTreeSet::new();
        for seq in &sequences {
            if seq.events.is_empty() {
                return Err(ModelError::EmptySequence(seq.id.clone()));
            }
            if !ids.insert(seq.id.as_str()) {
                return Err(ModelError::DuplicateSequence(seq.id.clone()));
            }
            if let Some(&event) = seq.events.iter().find(|e| e.index() >= alphabet.len()) {
                return Err(ModelError::UnknownEvent { sequence: seq.id.clone(), event });
            }
        }
        Ok(Dataset { name: name.into(), alphabet, sequences })
    }

    /// Builds a dataset from labelled sequences, assigning event ids in
    /// order of first appearance.
    pub fn from_labels<I, S, L>(name: impl Into<String>, sequences: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (S, Vec<L>)>,
        S: Into<String>,
        L: AsRef<str>,
    {
        let mut alphabet: Vec<EventType> = Vec::new();
        let mut index: BTreeMap<String, EventId> = BTreeMap::new();
        let mut seqs = Vec::new();
        for (id, labels) in sequences {
            let mut events = Vec::with_capacity(labels.len());
            for label in labels {
                let label = label.as_ref();
                let id = match index.get(label) {
                    Some(&id) => id,
                    None => {
                        let id = EventId(alphabet.len() as u32);
                        alphabet.push(EventType { id, label: label.into() });
                        index.insert(label.into(), id);
                        id
                    }
                };
                events.push(id);
            }
            seqs.push(Sequence { id: id.into(), events });
        }
        Dataset::new(name, alphabet, seqs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &[EventType] {
        &self.alphabet
    }

    pub fn sequences(&self) -> &[Sequence] {
        &self.sequences
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn label(&self, id: EventId) -> Option<&str> {
        self.alphabet.get(id.index()).map(|e| e.label.as_str())
    }

    pub fn event_id(&self, label: &str) -> Option<EventId> {
        self.alphabet.iter().find(|e| e.label == label).map(|e| e.id)
    }

    pub fn total_events(&self) -> usize {
        self.sequences.iter().map(Sequence::len).sum()
    }

    pub fn stats(&self) -> Result<DatasetStats, ModelError> {
        if self.sequences.is_empty() {
            return Err(ModelError::EmptyDataset);
        }
        let mut lengths: Vec<usize> = self.sequences.iter().map(Sequence::len).collect();
        lengths.sort_unstable();
        let n = lengths.len();
        let median_len = if n % 2 == 1 {
            lengths[n / 2] as f64
        } else {
            (lengths[n / 2 - 1] + lengths[n / 2]) as f64 / 2.0
        };
        let used: BTreeSet<EventId> =
            self.sequences.iter().flat_map(|s| s.events.iter().copied()).collect();
        Ok(DatasetStats {
            num_sequences: n,
            total_events: lengths.iter().sum(),
            unique_events: used.len(),
            min_len: lengths[0],
            max_len: lengths[n - 1],
            median_len,
        })
    }

    /// Mean 0-based position of the first occurrence of `event`, over the
    /// sequences that contain it.
    pub fn avg_index(&self, event: EventId) -> Option<f64> {
        avg_first_index(self.sequences.iter().map(|s| s.events.as_slice()), event)
    }
}

/// Mean position of the first occurrence of `event` across `seqs`, skipping
/// sequences that lack it.
pub fn avg_first_index<'a, I>(seqs: I, event: EventId) -> Option<f64>
where
    I: IntoIterator<Item = &'a [EventId]>,
{
    let (sum, count) = seqs
        .into_iter()
        .filter_map(|s| s.iter().position(|&e| e == event))
        .fold((0usize, 0usize), |(sum, count), p| (sum + p, count + 1));
    (count > 0).then(|| sum as f64 / count as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetStats {
    pub num_sequences: usize,
    pub total_events: usize,
    /// Distinct events actually used by the sequences.
    pub unique_events: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Midpoint of the two central lengths when the count is even.
    pub median_len: f64,
}
