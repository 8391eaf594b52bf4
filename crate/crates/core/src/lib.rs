pub mod analysis;
pub mod codebook;
pub mod codefile;
pub mod construction;
pub mod error;
pub mod f4family;
pub mod gf;
pub mod linalg;
pub mod repairsim;

pub use analysis::{Budget, CodeReport, Verdict};
pub use codebook::Codebook;
pub use codefile::{AnyCode, CodeFile};
pub use construction::{CodeParams, FeasibilityMode, LinearLrcCode};
pub use error::{Error, Result};
pub use f4family::{F4Operator, Family, OperatorCode, OperatorMatrix};
pub use gf::{FieldElement, FieldSpec, GaloisField};
pub use linalg::{Circuit, FieldMatrix};
pub use repairsim::{erase, simulate, ErasedWord, RepairContext, RepairOutcome};
