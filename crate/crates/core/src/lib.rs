//! Exact invariants of multiparameter persistence modules over prime fields:
//! Jordan types of slice operators, Jordan-module rank tables, zigzag
//! multiranks and barcodes, erosion and landscape distances.

#![allow(clippy::needless_range_loop, clippy::result_large_err)]

pub mod distance;
pub mod error;
pub mod examples;
pub mod field;
pub mod hom;
pub mod intmat;
pub mod jordan;
pub mod module;
mod par;
pub mod poset;
pub mod rank;
pub mod schema;
pub mod zigzag;

pub use distance::{
    check_stability, erosion_distance, erosion_distance_at_s, landscape, landscape_distance_at_s, ErosionResult,
    Landscape, StabilityReport,
};
pub use error::{Error, Result};
pub use field::{FieldMatrix, PrimeField, DEFAULT_PRIME};
pub use hom::{interleaving_issues, verify_interleaving, InterleavingCertificate, ModuleHom};
pub use jordan::{
    an_decomposition_counts, filtered_rank, jordan_module_family, jordan_type, nilpotent_operator, JordanModuleFamily,
    JordanType, NilpotentOperator,
};
pub use module::{PersModule, Violation};
pub use poset::{GridPoset, Point, Poset, PosetKind, SliceSequence, ZigzagPoset};
pub use rank::{rank_invariant, RankInvariantTable, RankValue};
pub use schema::{CertificateFile, ModuleFile, PosetSpec};
pub use zigzag::{
    barcode_from_r, interval_r_matrix, is_isomorphic, multirank, planted_module, r_vector, Barcode, MultirankVector,
};
