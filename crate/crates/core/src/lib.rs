//! A small proof-assistant kernel for homotopy type theory with a primitive
//! interval type: paths are functions out of the interval, transport is `coe`,
//! and univalence holds definitionally through the `iso` type former.

pub mod conversion;
pub mod corpus;
pub mod diagnostic;
pub mod frontend;
pub mod globals;
pub mod harness;
pub mod nbe;
pub mod oracle;
pub mod session;
pub mod syntax;
pub mod typechecker;

pub use conversion::convert_terms;
pub use diagnostic::{Code, Diagnostic, Span};
pub use globals::Globals;
pub use nbe::normalize;
pub use session::{FileReport, Session};
pub use syntax::{Binder, Context, Term};
