//! JSON documents for instances, bases and verification reports, plus
//! content digests.
//!
//! Complex numbers are written as `[re, im]` pairs. Symbol, edge and table
//! order in a file is the canonical order. For an instance with alphabet
//! `["0", "1"]` and edges `["e1", "e2"]`, a function with scope
//! `["e1", "e2"]` lists its table as the values at
//! `(e1,e2) = (0,0), (0,1), (1,0), (1,1)`, first edge most significant.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::assignment::{space_size, Alphabet, EdgeSet, Scope};
use crate::basis::Basis;
use crate::engine::{HolantInstance, VerificationReport};
use crate::error::HolantError;
use crate::function::{FnTable, Scalar};

pub const INSTANCE_SCHEMA: &str = "holant-instance/1";
pub const BASIS_SCHEMA: &str = "holant-basis/1";
pub const REPORT_SCHEMA: &str = "holant-report/1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },

    #[error("{path}: unsupported schema-version `{found}` (expected `{expected}`)")]
    Schema { path: PathBuf, found: String, expected: &'static str },

    #[error("{path}: {function}: table has {found} entries, expected {expected}")]
    TableLength { path: PathBuf, function: String, expected: usize, found: usize },

    #[error("{path}: {context}: {source}")]
    Invalid { path: PathBuf, context: String, source: HolantError },
}

/// Serde adapter writing a [`Scalar`] as `[re, im]`.
pub mod scalar_pair {
    use super::Scalar;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        [v.re, v.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Scalar::new(re, im))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDocument {
    pub scope: Vec<String>,
    pub table: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    #[serde(rename = "schema-version")]
    pub schema_version: String,
    pub alphabet: Vec<String>,
    pub edges: Vec<String>,
    pub generators: Vec<FunctionDocument>,
    pub recognizers: Vec<FunctionDocument>,
    /// Path of a basis file, relative to the instance file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    /// Seed the instance was generated from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisDocument {
    #[serde(rename = "schema-version")]
    pub schema_version: String,
    pub alphabet: Vec<String>,
    /// `|A|` rows of `|A|` entries; column `j` is basis element `j`.
    pub matrix: Vec<Vec<[f64; 2]>>,
    /// Optional names of the basis elements.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    #[serde(rename = "schema-version")]
    pub schema_version: String,
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Seconds since the Unix epoch at which the report was written.
    pub wall_clock_unix: f64,
    pub report: VerificationReport,
}

fn pair(v: &Scalar) -> [f64; 2] {
    [v.re, v.im]
}

fn function_document(f: &FnTable) -> FunctionDocument {
    FunctionDocument {
        scope: f.scope().labels().map(str::to_string).collect(),
        table: f.values().iter().map(pair).collect(),
    }
}

impl InstanceDocument {
    pub fn from_instance(inst: &HolantInstance) -> Self {
        Self {
            schema_version: INSTANCE_SCHEMA.to_string(),
            alphabet: inst.alphabet().symbols().to_vec(),
            edges: inst.edges().labels().to_vec(),
            generators: inst.generators().iter().map(function_document).collect(),
            recognizers: inst.recognizers().iter().map(function_document).collect(),
            basis: None,
            seed: None,
        }
    }

    /// Validates the document and builds the instance. `origin` is used in
    /// diagnostics only.
    pub fn to_instance(&self, origin: &Path) -> Result<HolantInstance, IoError> {
        let invalid = |context: &str, source| IoError::Invalid {
            path: origin.to_path_buf(),
            context: context.to_string(),
            source,
        };
        if self.schema_version != INSTANCE_SCHEMA {
            return Err(IoError::Schema {
                path: origin.to_path_buf(),
                found: self.schema_version.clone(),
                expected: INSTANCE_SCHEMA,
            });
        }
        let alphabet = Arc::new(Alphabet::new(self.alphabet.clone()).map_err(|e| invalid("alphabet", e))?);
        let edges = Arc::new(EdgeSet::new(self.edges.clone()).map_err(|e| invalid("edges", e))?);
        let side = |docs: &[FunctionDocument], name: &str| -> Result<Vec<FnTable>, IoError> {
            docs.iter()
                .enumerate()
                .map(|(i, d)| {
                    let label = format!("{name}[{i}]");
                    let scope = Scope::new(edges.clone(), &d.scope).map_err(|e| invalid(&label, e))?;
                    if !scope.labels().eq(d.scope.iter().map(String::as_str)) {
                        return Err(invalid(
                            &label,
                            HolantError::InvalidArgument("scope labels must follow the order of `edges`".into()),
                        ));
                    }
                    let expected = space_size(alphabet.len(), scope.len()).map_err(|e| invalid(&label, e))?;
                    if d.table.len() != expected {
                        return Err(IoError::TableLength {
                            path: origin.to_path_buf(),
                            function: label,
                            expected,
                            found: d.table.len(),
                        });
                    }
                    let values = d.table.iter().map(|[re, im]| Scalar::new(*re, *im)).collect();
                    FnTable::new(alphabet.clone(), scope, values).map_err(|e| invalid(&label, e))
                })
                .collect()
        };
        let generators = side(&self.generators, "generators")?;
        let recognizers = side(&self.recognizers, "recognizers")?;
        HolantInstance::new(alphabet.clone(), edges.clone(), generators, recognizers)
            .map_err(|e| invalid("instance", e))
    }
}

impl BasisDocument {
    pub fn from_basis(basis: &Basis) -> Self {
        let labels = basis.element_alphabet().symbols();
        let default = (1..=basis.len()).map(|j| format!("b{j}")).collect::<Vec<_>>();
        Self {
            schema_version: BASIS_SCHEMA.to_string(),
            alphabet: basis.alphabet().symbols().to_vec(),
            matrix: basis.rows().iter().map(|r| r.iter().map(pair).collect()).collect(),
            elements: (labels != default.as_slice()).then(|| labels.to_vec()),
        }
    }

    pub fn to_basis(&self, origin: &Path) -> Result<Basis, IoError> {
        let invalid = |context: &str, source| IoError::Invalid {
            path: origin.to_path_buf(),
            context: context.to_string(),
            source,
        };
        if self.schema_version != BASIS_SCHEMA {
            return Err(IoError::Schema {
                path: origin.to_path_buf(),
                found: self.schema_version.clone(),
                expected: BASIS_SCHEMA,
            });
        }
        let alphabet = Arc::new(Alphabet::new(self.alphabet.clone()).map_err(|e| invalid("alphabet", e))?);
        let rows: Vec<Vec<Scalar>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|[re, im]| Scalar::new(*re, *im)).collect())
            .collect();
        let basis = Basis::from_rows(alphabet, &rows).map_err(|e| invalid("matrix", e))?;
        match &self.elements {
            Some(names) => {
                let labels = Alphabet::new(names.clone()).map_err(|e| invalid("elements", e))?;
                basis.with_labels(labels).map_err(|e| invalid("elements", e))
            }
            None => Ok(basis),
        }
    }
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io { path: path.to_path_buf(), source })
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, path: &Path) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).expect("documents serialize");
    text.push('\n');
    fs::write(path, text).map_err(|source| IoError::Io { path: path.to_path_buf(), source })
}

pub fn parse_instance_document(text: &str, origin: &Path) -> Result<InstanceDocument, IoError> {
    parse(text, origin)
}

pub fn load_instance_document(path: &Path) -> Result<InstanceDocument, IoError> {
    parse(&read(path)?, path)
}

pub fn load_instance(path: &Path) -> Result<HolantInstance, IoError> {
    load_instance_document(path)?.to_instance(path)
}

pub fn save_instance(inst: &HolantInstance, path: &Path) -> Result<(), IoError> {
    save_instance_document(&InstanceDocument::from_instance(inst), path)
}

pub fn save_instance_document(doc: &InstanceDocument, path: &Path) -> Result<(), IoError> {
    write_json(doc, path)
}

pub fn load_basis(path: &Path) -> Result<Basis, IoError> {
    parse::<BasisDocument>(&read(path)?, path)?.to_basis(path)
}

pub fn save_basis(basis: &Basis, path: &Path) -> Result<(), IoError> {
    write_json(&BasisDocument::from_basis(basis), path)
}

pub fn save_report(doc: &ReportDocument, path: &Path) -> Result<(), IoError> {
    write_json(doc, path)
}

pub fn load_report(path: &Path) -> Result<ReportDocument, IoError> {
    parse(&read(path)?, path)
}

/// Length-prefixed canonical encoding fed to the digests.
struct DigestWriter(Sha256);

impl DigestWriter {
    fn new(tag: &str) -> Self {
        let mut w = Self(Sha256::new());
        w.str(tag);
        w
    }

    fn usize(&mut self, v: usize) {
        self.0.update((v as u64).to_le_bytes());
    }

    fn str(&mut self, s: &str) {
        self.usize(s.len());
        self.0.update(s.as_bytes());
    }

    fn strs<'a>(&mut self, items: impl ExactSizeIterator<Item = &'a str>) {
        self.usize(items.len());
        for s in items {
            self.str(s);
        }
    }

    fn scalars(&mut self, values: &[Scalar]) {
        self.usize(values.len());
        for v in values {
            self.0.update(v.re.to_bits().to_le_bytes());
            self.0.update(v.im.to_bits().to_le_bytes());
        }
    }

    fn finish(self) -> String {
        let bytes = self.0.finalize();
        bytes.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

/// SHA-256 over alphabet, edges and every table (scope labels and the exact
/// bit patterns of the entries), hex encoded.
pub fn instance_digest(inst: &HolantInstance) -> String {
    let mut w = DigestWriter::new(INSTANCE_SCHEMA);
    w.strs(inst.alphabet().symbols().iter().map(String::as_str));
    w.strs(inst.edges().labels().iter().map(String::as_str));
    for side in [inst.generators(), inst.recognizers()] {
        w.usize(side.len());
        for f in side {
            let labels: Vec<&str> = f.scope().labels().collect();
            w.strs(labels.into_iter());
            w.scalars(f.values());
        }
    }
    w.finish()
}

/// SHA-256 over the alphabet, element labels and the matrix bits.
pub fn basis_digest(basis: &Basis) -> String {
    let mut w = DigestWriter::new(BASIS_SCHEMA);
    w.strs(basis.alphabet().symbols().iter().map(String::as_str));
    w.strs(basis.element_alphabet().symbols().iter().map(String::as_str));
    w.scalars(basis.matrix());
    w.finish()
}
