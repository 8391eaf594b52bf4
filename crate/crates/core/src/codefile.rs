//! JSON code files holding either a linear code or an operator-matrix code.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::Budget;
use crate::construction::{CodeParams, LinearLrcCode, Replication};
use crate::error::{Error, Result};
use crate::f4family::{F4Operator, Family, OperatorCode, OperatorMatrix};
use crate::gf::{FieldElement, FieldSpec, GaloisField};
use crate::linalg::FieldMatrix;

pub const FORMAT_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A code of either kind, as held in memory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyCode {
    Linear(LinearLrcCode),
    Operator(OperatorCode),
}

impl AnyCode {
    pub fn n(&self) -> usize {
        match self {
            AnyCode::Linear(c) => c.params.n,
            AnyCode::Operator(c) => c.matrix.n(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            AnyCode::Linear(c) => c.params.k,
            AnyCode::Operator(c) => c.matrix.k(),
        }
    }

    /// Declared locality.
    pub fn r(&self) -> usize {
        match self {
            AnyCode::Linear(c) => c.params.r,
            AnyCode::Operator(c) => c.r,
        }
    }

    pub fn field_spec(&self) -> FieldSpec {
        match self {
            AnyCode::Linear(c) => c.field().spec(),
            AnyCode::Operator(_) => FieldSpec::F4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileParams {
    pub n: usize,
    pub k: usize,
    pub r: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorPayload {
    Family { family: Family, i: usize },
    Custom { ops: Vec<Vec<F4Operator>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Payload {
    Linear {
        generator: Vec<Vec<FieldElement>>,
        groups: Vec<Vec<usize>>,
        #[serde(default)]
        replication: Option<Replication>,
    },
    Operator {
        operator: OperatorPayload,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    pub version: u32,
    #[serde(flatten)]
    pub payload: Payload,
    pub field: FieldSpec,
    pub params: FileParams,
    #[serde(default)]
    pub repair_sets: Option<Vec<Option<Vec<usize>>>>,
    pub provenance: Provenance,
}

impl CodeFile {
    pub fn from_code(code: &AnyCode, seed: Option<u64>) -> Self {
        let (payload, repair_sets) = match code {
            AnyCode::Linear(c) => (
                Payload::Linear {
                    generator: c.generator.to_rows(),
                    groups: c.groups.clone(),
                    replication: c.replication,
                },
                None,
            ),
            AnyCode::Operator(c) => {
                let operator = match c.matrix.origin() {
                    Some((family, i)) => OperatorPayload::Family { family, i },
                    None => OperatorPayload::Custom {
                        ops: c.matrix.grid(),
                    },
                };
                (Payload::Operator { operator }, Some(c.repair_sets.clone()))
            }
        };
        CodeFile {
            version: FORMAT_VERSION,
            payload,
            field: code.field_spec(),
            params: FileParams {
                n: code.n(),
                k: code.k(),
                r: code.r(),
            },
            repair_sets,
            provenance: Provenance {
                seed,
                tool_version: TOOL_VERSION.to_string(),
            },
        }
    }

    /// Rebuilds the code, validating shapes against the stated parameters.
    /// Operator files without cached repair sets have them rediscovered.
    pub fn to_code(&self, budget: &Budget) -> Result<AnyCode> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported format version {}",
                self.version
            )));
        }
        let FileParams { n, k, r } = self.params;
        match &self.payload {
            Payload::Linear {
                generator,
                groups,
                replication,
            } => {
                let field = GaloisField::from_spec(self.field)?;
                if generator.len() != k {
                    return Err(Error::Format(format!(
                        "generator has {} rows, k = {k}",
                        generator.len()
                    )));
                }
                let g = FieldMatrix::from_rows(field.clone(), generator)?;
                let params = CodeParams {
                    n,
                    k,
                    r,
                    q: field.order() as u64,
                };
                Ok(AnyCode::Linear(LinearLrcCode::from_parts(
                    params,
                    g,
                    groups.clone(),
                    *replication,
                )?))
            }
            Payload::Operator { operator } => {
                if self.field != FieldSpec::F4 {
                    return Err(Error::Format("operator codes live over F4".into()));
                }
                let matrix = match operator {
                    OperatorPayload::Family { family, i } => OperatorMatrix::family(*family, *i)?,
                    OperatorPayload::Custom { ops } => OperatorMatrix::custom(ops.clone())?,
                };
                if (matrix.n(), matrix.k()) != (n, k) {
                    return Err(Error::Format(format!(
                        "operator grid is {}x{}, params say {k}x{n}",
                        matrix.k(),
                        matrix.n()
                    )));
                }
                let code = match &self.repair_sets {
                    Some(sets) => OperatorCode::with_repair_sets(matrix, r, sets.clone())?,
                    None => {
                        let mut code = OperatorCode::new(matrix, budget)?;
                        code.r = r;
                        code
                    }
                };
                Ok(AnyCode::Operator(code))
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}
