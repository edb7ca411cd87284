//! Spec-file front end for the `nonlocal` command.

pub mod run;
pub mod spec;

pub use run::{exit_code, resolve, run, Outcome};
pub use spec::{parse_spec, serialize_spec, Job, OperatorSpec};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
