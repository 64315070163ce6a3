//! Minimal-controls geometry synthesis, compression profiles, panel choice
//! and layout linting.

pub mod address;
pub mod autonomy;
pub mod choose;
pub mod error;
pub mod hierarchy;
pub mod matrix;
pub mod scale;

pub use address::{synthesize_address, synthesize_address_field, AddressPlan};
pub use autonomy::{lint_autonomy, CellRef, Function, LintError, LintReport, Subject, Violation};
pub use choose::{choose_panel, synthetic_plant, Constraints, Rejection, SynthesisResult};
pub use error::SynthesisError;
pub use hierarchy::{synthesize_hierarchy, synthesize_hierarchy_with_cost, HierarchyCost, HierarchyPlan};
pub use matrix::{synthesize_matrix, synthesize_matrix_with_select, MatrixGeometry};
pub use scale::{compression_profile, enumerate_scale, representatives, CompressionProfile, ScaleEntry};
