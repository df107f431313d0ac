//! The `.hti` surface language: parsing, printing, and elaboration to core.

pub mod elab;
pub mod parser;
pub mod pretty;
pub mod surface;

pub use elab::{elab_term_in, elaborate, elaborate_decl};
pub use parser::{parse, parse_term};
pub use pretty::{distill, print, print_decl, print_decls, term_to_string};
pub use surface::{Declaration, Kind, Scoped, Surface};
