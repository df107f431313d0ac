//! Random well-typed terms and the property suites run over them.

pub mod gen;
pub mod suites;

pub use gen::{gen_well_typed, Exhausted, GenConfig, Generator};
pub use suites::{run_suite, Suite, SuiteConfig, SuiteReport};
