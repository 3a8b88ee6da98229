//! Frequent time-interval-relation pattern mining over symbolic interval
//! data, with semantic adjacency pruning.
//!
//! Raw measurements are abstracted into symbolic intervals
//! ([`abstraction`]), mined with the Karma/Lego enumeration
//! ([`karmalego`]) under an optional adjacency criterion ([`sac`]), and the
//! resulting patterns are detected in held-out entities to build feature
//! matrices ([`detect`]). [`oracle`] is an exhaustive reference miner used
//! to validate the fast path.

pub mod abstraction;
pub mod bench;
pub mod detect;
pub mod error;
pub mod folds;
pub mod io;
pub mod karmalego;
pub mod model;
pub mod oracle;
pub mod relations;
pub mod sac;
pub mod synth;

mod par;

pub use error::{Error, Result};
pub use karmalego::{mine, EnumerationTree, MinSupport, MiningConfig, SupportStats, Tirp};
pub use model::{
    ConceptId, DatabaseBuilder, EntityRecord, IntervalDatabase, Symbol, SymbolTable,
    SymbolicInterval, TimeStamp, ValidityWindow, ValueId,
};
pub use relations::{Relation, RelationConfig, RelationMode};
pub use sac::SacMode;
