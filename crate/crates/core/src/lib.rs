//! Strict and general linearizability checking for concurrent queue models,
//! with an exhaustive schedule explorer.

pub mod checker;
pub mod explorer;
pub mod history;
pub mod models;
pub mod registry;
pub mod repro;
pub mod spec;
pub mod value;

pub use checker::{CheckMode, CheckReport, RecordedExecution};
pub use explorer::{parse_program, Program};
pub use history::{linearizes, parse_history, Event, History, OpId, Operation};
pub use models::ObjectModel;
pub use spec::{AbstractionFunction, RenamingFunction, SeqSpec};
pub use value::Value;
