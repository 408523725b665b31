//! Weights for incomplete pairwise comparison matrices whose preferences form
//! a directed acyclic graph, and tools to probe whether those weights respect
//! the stated preferences.
//!
//! Two weighting methods are implemented:
//!
//! - [`llsm::llsm_exact`] / [`llsm::llsm_float`]: log least squares weights,
//!   solved through the Laplacian of the comparison graph — exactly (rational
//!   coefficients of `log b`) for ordinal matrices, in floats otherwise;
//! - [`em::em_weights`]: the dominant-eigenvector weights of the completion
//!   that minimizes the dominant eigenvalue.
//!
//! [`lop::check_lop`] reports the edges whose preference a weight vector
//! contradicts, [`search::run_search`] scans every pattern of a given size
//! for such contradictions (or for eigenvector rankings that depend on the
//! preference intensity), and [`family`] builds a parametric pattern family
//! with a closed-form contradiction gap.
//!
//! Conventions: alternatives are labeled 1..n everywhere in the public API
//! and reports, matching the usual matrix notation; vectors are indexed from
//! 1 through accessors like [`weights::Weights::get`]. Patterns are always in
//! topological labeling (every edge (i, j) has i < j), so acyclicity is
//! structural.

pub mod em;
pub mod error;
pub mod family;
pub mod graph;
pub mod linalg;
pub mod llsm;
pub mod lop;
pub mod pcm;
pub mod search;
pub mod weights;

pub use em::{cr_index, em_complete, em_weights, estimate_random_index, perron, CompletionResult, PerronResult};
pub use error::{Error, Result};
pub use family::{family_gap_closed_form, family_gap_via_reduced_system, generate_family, FamilyParams};
pub use graph::{enumerate_patterns, DagPattern};
pub use llsm::{llsm_exact, llsm_exact_digraph, llsm_float, llsm_objective, LaplacianSystem};
pub use lop::{check_lop, check_lop_edges, check_lop_exact, compare_rankings, lop_gap, LopReport};
pub use pcm::{realize, GeneralPcm, OrdinalPcm};
pub use search::{run_search, search_em_reversals, search_llsm_violations, Method, SearchHit, SearchOutput, SearchSummary, SearchTask};
pub use weights::{LogWeights, Weights};
