//! JSON file formats.
//!
//! Rationals are written as strings, `"p/q"` or a bare integer; integer JSON
//! numbers are accepted on input. Per-outcome tables are objects keyed by
//! outcome label.
//!
//! ```json
//! {"grid": ["0","1/2","1"], "outcomes": ["w1","w2"], "probs": ["1/2","1/2"],
//!  "partitions": [[["w1","w2"]], [["w1"],["w2"]], [["w1"],["w2"]]]}
//! {"values": {"w1": ["0","1/2","1"], "w2": ["0","1/2","1"]}}
//! {"kind": "mixed", "sections": {"w1": {"breaks": ["0","1/2","1"], "values": [0,1]}, ...}}
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use stoptime_core::error::Error as CoreError;
use stoptime_core::prelude::*;
use stoptime_core::rational::{format_rational, ParseRationalError};
use stoptime_core::step::StepError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error("unknown outcome label {0:?}")]
    UnknownOutcome(String),
    #[error("no entry for outcome {0:?}")]
    MissingOutcome(String),
    #[error("outcome {outcome:?}: {source}")]
    Section { outcome: String, source: StepError },
    #[error("outcome {outcome:?}: expected {expected} grid entries, found {found}")]
    RowLength { outcome: String, expected: usize, found: usize },
    #[error(transparent)]
    Space(#[from] CoreError),
    #[error("unrecognized file: expected a space, a process or a stopping time")]
    UnknownDocument,
}

/// A rational that (de)serializes as a string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct QVisitor;

        impl Visitor<'_> for QVisitor {
            type Value = Q;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
                parse_rational(v).map(Q).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
                Ok(Q(int(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
                i64::try_from(v).map(|v| Q(int(v))).map_err(E::custom)
            }
        }

        d.deserialize_any(QVisitor)
    }
}

fn qs(values: &[Rational]) -> Vec<Q> {
    values.iter().cloned().map(Q).collect()
}

fn unq(values: Vec<Q>) -> Vec<Rational> {
    values.into_iter().map(|q| q.0).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceFile {
    pub grid: Vec<Q>,
    pub outcomes: Vec<String>,
    pub probs: Vec<Q>,
    pub partitions: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProcessFile {
    pub values: BTreeMap<String, Vec<Q>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectionFile {
    pub breaks: Vec<Q>,
    pub values: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StopFile {
    Pure { stop: BTreeMap<String, usize> },
    Mixed { sections: BTreeMap<String, SectionFile> },
    Randomized { paths: BTreeMap<String, Vec<Q>> },
    Distribution { mass: BTreeMap<String, Vec<Q>> },
}

impl SpaceFile {
    pub fn from_space(space: &FilteredSpace) -> Self {
        let label = |o: &usize| space.label(*o).to_string();
        Self {
            grid: qs(space.grid()),
            outcomes: space.outcomes().to_vec(),
            probs: qs(space.probs()),
            partitions: space
                .partitions()
                .iter()
                .map(|p| p.blocks().iter().map(|b| b.iter().map(label).collect()).collect())
                .collect(),
        }
    }

    pub fn into_space(self) -> Result<FilteredSpace, FormatError> {
        let index = |l: &String| {
            self.outcomes
                .iter()
                .position(|o| o == l)
                .ok_or_else(|| FormatError::UnknownOutcome(l.clone()))
        };
        let partitions = self
            .partitions
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|block| block.iter().map(index).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        build_space(self.outcomes.clone(), unq(self.probs), unq(self.grid), partitions)
            .map_err(|e| FormatError::Space(CoreError::InvalidSpace(e)))
    }
}

/// Reorders a label-keyed map into space order, rejecting unknown or missing labels.
fn by_outcome<T>(space: &FilteredSpace, mut map: BTreeMap<String, T>) -> Result<Vec<T>, FormatError> {
    if let Some(extra) = map.keys().find(|k| space.outcome_index(k).is_none()) {
        return Err(FormatError::UnknownOutcome(extra.clone()));
    }
    space
        .outcomes()
        .iter()
        .map(|o| map.remove(o).ok_or_else(|| FormatError::MissingOutcome(o.clone())))
        .collect()
}

fn table(space: &FilteredSpace, map: BTreeMap<String, Vec<Q>>) -> Result<Vec<Vec<Rational>>, FormatError> {
    let rows = by_outcome(space, map)?;
    rows.into_iter()
        .enumerate()
        .map(|(o, row)| {
            if row.len() != space.n_times() {
                return Err(FormatError::RowLength {
                    outcome: space.label(o).to_string(),
                    expected: space.n_times(),
                    found: row.len(),
                });
            }
            Ok(unq(row))
        })
        .collect()
}

fn labelled<T>(space: &FilteredSpace, rows: impl IntoIterator<Item = T>) -> BTreeMap<String, T> {
    space.outcomes().iter().cloned().zip(rows).collect()
}

impl ProcessFile {
    pub fn from_process(space: &FilteredSpace, process: &Process) -> Self {
        Self { values: labelled(space, process.rows().iter().map(|r| qs(r))) }
    }

    pub fn into_process(self, space: &FilteredSpace) -> Result<Process, FormatError> {
        Ok(Process::new(table(space, self.values)?))
    }
}

impl StopFile {
    pub fn from_stopping_time(space: &FilteredSpace, st: &StoppingTime) -> Self {
        match st {
            StoppingTime::Pure(s) => StopFile::Pure { stop: labelled(space, s.stop.iter().copied()) },
            StoppingTime::Mixed(m) => StopFile::Mixed {
                sections: labelled(
                    space,
                    m.sections.iter().map(|s| SectionFile { breaks: qs(s.breaks()), values: s.values().to_vec() }),
                ),
            },
            StoppingTime::Randomized(r) => StopFile::Randomized { paths: labelled(space, r.paths.iter().map(|p| qs(p))) },
            StoppingTime::Distribution(d) => StopFile::Distribution { mass: labelled(space, d.mass.iter().map(|p| qs(p))) },
        }
    }

    pub fn into_stopping_time(self, space: &FilteredSpace) -> Result<StoppingTime, FormatError> {
        Ok(match self {
            StopFile::Pure { stop } => PureSt { stop: by_outcome(space, stop)? }.into(),
            StopFile::Mixed { sections } => {
                let rows = by_outcome(space, sections)?;
                let sections = rows
                    .into_iter()
                    .enumerate()
                    .map(|(o, s)| {
                        StepFunction::new(unq(s.breaks), s.values).map_err(|source| FormatError::Section {
                            outcome: space.label(o).to_string(),
                            source,
                        })
                    })
                    .collect::<Result<_, _>>()?;
                MixedSt { sections }.into()
            }
            StopFile::Randomized { paths } => RandomizedSt { paths: table(space, paths)? }.into(),
            StopFile::Distribution { mass } => DistributionSt { mass: table(space, mass)? }.into(),
        })
    }
}

/// Any document the CLI can be handed.
#[derive(Debug, Clone)]
pub enum Document {
    Space(SpaceFile),
    Process(ProcessFile),
    Stop(StopFile),
}

pub fn parse_document(text: &str) -> Result<Document, FormatError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let obj = value.as_object().ok_or(FormatError::UnknownDocument)?;
    if obj.contains_key("kind") {
        Ok(Document::Stop(serde_json::from_value(value)?))
    } else if obj.contains_key("grid") {
        Ok(Document::Space(serde_json::from_value(value)?))
    } else if obj.contains_key("values") {
        Ok(Document::Process(serde_json::from_value(value)?))
    } else {
        Err(FormatError::UnknownDocument)
    }
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn read_space(path: &Path) -> Result<FilteredSpace, FormatError> {
    serde_json::from_str::<SpaceFile>(&read_text(path)?)?.into_space()
}

pub fn read_process(path: &Path, space: &FilteredSpace) -> Result<Process, FormatError> {
    serde_json::from_str::<ProcessFile>(&read_text(path)?)?.into_process(space)
}

pub fn read_stopping_time(path: &Path, space: &FilteredSpace) -> Result<StoppingTime, FormatError> {
    serde_json::from_str::<StopFile>(&read_text(path)?)?.into_stopping_time(space)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    fs::write(path, text).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPACE: &str = r#"{"grid": ["0","1/2","1"], "outcomes": ["w1","w2"], "probs": ["1/2","1/2"],
        "partitions": [[["w1","w2"]], [["w1"],["w2"]], [["w1"],["w2"]]]}"#;

    fn space() -> FilteredSpace {
        serde_json::from_str::<SpaceFile>(SPACE).unwrap().into_space().unwrap()
    }

    #[test]
    fn reads_space() {
        let s = space();
        assert_eq!(s.grid(), &[int(0), rat(1, 2), int(1)]);
        assert_eq!(s.partition(0).len(), 1);
        let again = serde_json::to_string(&SpaceFile::from_space(&s)).unwrap();
        assert_eq!(serde_json::from_str::<SpaceFile>(&again).unwrap().into_space().unwrap(), s);
    }

    #[test]
    fn reads_process_with_integer_numbers() {
        let s = space();
        let p: ProcessFile = serde_json::from_str(r#"{"values": {"w1": [0, "1/2", "1"], "w2": ["0","1/2",1]}}"#).unwrap();
        assert_eq!(p.into_process(&s).unwrap(), Process::time(&s));
    }

    #[test]
    fn mixed_sections() {
        let s = space();
        let text = r#"{"kind": "mixed", "sections": {
            "w1": {"breaks": ["0","1/2","1"], "values": [0,1]},
            "w2": {"breaks": ["0","1"], "values": [2]}}}"#;
        let st = serde_json::from_str::<StopFile>(text).unwrap().into_stopping_time(&s).unwrap();
        let StoppingTime::Mixed(m) = &st else { panic!("kind") };
        assert_eq!(m.sections[1], StepFunction::constant(2));
        let out = serde_json::to_string(&StopFile::from_stopping_time(&s, &st)).unwrap();
        assert!(out.contains(r#""kind":"mixed""#));
        assert_eq!(serde_json::from_str::<StopFile>(&out).unwrap().into_stopping_time(&s).unwrap(), st);
    }

    #[test]
    fn input_errors() {
        let s = space();
        let missing = r#"{"kind": "pure", "stop": {"w1": 0}}"#;
        assert!(matches!(
            serde_json::from_str::<StopFile>(missing).unwrap().into_stopping_time(&s),
            Err(FormatError::MissingOutcome(l)) if l == "w2"
        ));
        let extra = r#"{"kind": "pure", "stop": {"w1": 0, "w2": 0, "w9": 1}}"#;
        assert!(matches!(
            serde_json::from_str::<StopFile>(extra).unwrap().into_stopping_time(&s),
            Err(FormatError::UnknownOutcome(_))
        ));
        let short = r#"{"kind": "randomized", "paths": {"w1": ["1"], "w2": ["1"]}}"#;
        assert!(matches!(
            serde_json::from_str::<StopFile>(short).unwrap().into_stopping_time(&s),
            Err(FormatError::RowLength { .. })
        ));
        let bad = r#"{"kind": "mixed", "sections": {"w1": {"breaks": ["0","1/2"], "values": [0]}, "w2": {"breaks": ["0","1"], "values": [0]}}}"#;
        assert!(matches!(
            serde_json::from_str::<StopFile>(bad).unwrap().into_stopping_time(&s),
            Err(FormatError::Section { .. })
        ));
        assert!(serde_json::from_str::<ProcessFile>(r#"{"values": {"w1": ["x"]}}"#).is_err());
        let unsummed = r#"{"grid": ["0"], "outcomes": ["a","b"], "probs": ["1/2","1/3"], "partitions": [[["a","b"]]]}"#;
        assert!(matches!(
            serde_json::from_str::<SpaceFile>(unsummed).unwrap().into_space(),
            Err(FormatError::Space(_))
        ));
    }

    #[test]
    fn document_detection() {
        assert!(matches!(parse_document(SPACE).unwrap(), Document::Space(_)));
        assert!(matches!(parse_document(r#"{"values": {}}"#).unwrap(), Document::Process(_)));
        assert!(matches!(parse_document(r#"{"kind": "pure", "stop": {}}"#).unwrap(), Document::Stop(_)));
        assert!(matches!(parse_document("[]"), Err(FormatError::UnknownDocument)));
    }
}
