//! Labeled C-space sample sets and their on-disk forms.
//!
//! The JSON form is the primary interchange format; CSV ingestion exists for
//! sample files produced by external tools (header `theta_0,...,theta_{n-1},label`).

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Collision-checker verdict for one configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    Free,
    Collision,
}

// On disk a label is 0 (Free) or 1 (Collision).
impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(match self {
            Label::Free => 0,
            Label::Collision => 1,
        })
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(Label::Free),
            1 => Ok(Label::Collision),
            other => Err(serde::de::Error::custom(format!(
                "label must be 0 or 1, got {other}"
            ))),
        }
    }
}

/// A set of m sampled configurations with collision labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub n_joints: usize,
    pub workspace_id: String,
    pub seed: u64,
    pub samples: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
}

impl Dataset {
    /// Number of samples.
    pub fn m(&self) -> usize {
        self.samples.len()
    }

    pub fn free_count(&self) -> usize {
        self.labels.iter().filter(|l| **l == Label::Free).count()
    }

    /// Checks the structural invariants: matching lengths, per-sample joint
    /// count, and every angle inside [-pi, pi].
    pub fn validate(&self) -> Result<()> {
        if self.samples.len() != self.labels.len() {
            return Err(Error::LabelCountMismatch {
                samples: self.samples.len(),
                labels: self.labels.len(),
            });
        }
        for q in &self.samples {
            if q.len() != self.n_joints {
                return Err(Error::DimensionMismatch {
                    expected: self.n_joints,
                    got: q.len(),
                });
            }
            for &a in q {
                if !(-std::f64::consts::PI..=std::f64::consts::PI).contains(&a) {
                    return Err(Error::AngleOutOfRange(a));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ds: Dataset = serde_json::from_str(text)?;
        ds.validate()?;
        Ok(ds)
    }

    /// CSV with header `theta_0,...,theta_{n-1},label`. Angles are written with
    /// the shortest representation that parses back to the same f64.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 0..self.n_joints {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "theta_{j}");
        }
        out.push_str(",label\n");
        for (q, label) in self.samples.iter().zip(&self.labels) {
            for (j, a) in q.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{a}");
            }
            let code = match label {
                Label::Free => 0,
                Label::Collision => 1,
            };
            let _ = write!(out, ",{code}\n");
        }
        out
    }

    /// Parses the CSV form. The format carries no workspace or seed metadata,
    /// so those fields default to "imported" and 0.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::CsvFormat("missing header".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 2 || cols[cols.len() - 1] != "label" {
            return Err(Error::CsvFormat(
                "header must be theta_0,...,theta_{n-1},label".into(),
            ));
        }
        let n_joints = cols.len() - 1;
        for (j, col) in cols[..n_joints].iter().enumerate() {
            if *col != format!("theta_{j}") {
                return Err(Error::CsvFormat(format!(
                    "expected column theta_{j}, found {col}"
                )));
            }
        }
        let mut samples = Vec::new();
        let mut labels = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != n_joints + 1 {
                return Err(Error::CsvFormat(format!(
                    "row {} has {} fields, expected {}",
                    lineno + 2,
                    fields.len(),
                    n_joints + 1
                )));
            }
            let mut q = Vec::with_capacity(n_joints);
            for f in &fields[..n_joints] {
                q.push(f.parse::<f64>().map_err(|e| {
                    Error::CsvFormat(format!("row {}: bad angle {f:?}: {e}", lineno + 2))
                })?);
            }
            let label = match fields[n_joints] {
                "0" => Label::Free,
                "1" => Label::Collision,
                other => {
                    return Err(Error::CsvFormat(format!(
                        "row {}: label must be 0 or 1, got {other:?}",
                        lineno + 2
                    )))
                }
            };
            samples.push(q);
            labels.push(label);
        }
        let ds = Dataset {
            n_joints,
            workspace_id: "imported".into(),
            seed: 0,
            samples,
            labels,
        };
        ds.validate()?;
        Ok(ds)
    }

    /// Reads a dataset file, dispatching on the `.json` / `.csv` extension.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Self::from_csv(&text),
            _ => Self::from_json(&text),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => self.to_csv(),
            _ => self.to_json()?,
        };
        std::fs::write(path, text)?;
        Ok(())
    }
}
