//! Cognate database engine.

pub mod cldf;
pub mod cli;
pub mod entry;
pub mod model;
pub mod orthonorm;
pub mod reflex;
pub mod service;
pub mod stats;
pub mod text;

pub use model::{CognateSet, Database, Form, Language, ModelError, Source, SourceRef};
