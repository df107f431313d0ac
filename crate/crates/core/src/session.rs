//! Checking whole files against a growing set of definitions.

use std::path::{Path, PathBuf};

use crate::diagnostic::{Code, Diagnostic};
use crate::frontend::{elaborate, parse};
use crate::globals::Globals;
use crate::nbe::Nbe;
use crate::syntax::Term;
use crate::typechecker::ElaboratedDecl;

/// The standard prelude shipped with the kernel.
pub const PRELUDE: &str = include_str!("../../../corpus/prelude.hti");

/// Environment variable naming a prelude file to use instead of [`PRELUDE`].
pub const PRELUDE_ENV: &str = "HTI_PRELUDE";

/// Diagnostics of one file, with the text needed to render them.
#[derive(Clone, Debug)]
pub struct FileReport {
    pub file: String,
    pub source: String,
    pub decls: Vec<ElaboratedDecl>,
    pub diagnostics: Vec<Diagnostic>,
}

impl FileReport {
    pub fn is_clean(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn rendered(&self) -> Vec<String> {
        self.diagnostics
            .iter()
            .map(|d| d.render(&self.file, &self.source))
            .collect()
    }
}

/// A checking session: definitions from every file loaded so far.
#[derive(Clone, Debug, Default)]
pub struct Session {
    globals: Globals,
}

impl Session {
    pub fn new() -> Session {
        Session::default()
    }

    /// A session with the built-in prelude loaded.
    pub fn with_prelude() -> Session {
        let mut session = Session::new();
        let report = session.load("prelude.hti", PRELUDE);
        assert!(
            report.is_clean(),
            "built-in prelude must check: {:?}",
            report.rendered()
        );
        session
    }

    /// A session with the prelude named by `HTI_PRELUDE`, or the built-in one.
    pub fn with_configured_prelude() -> Result<Session, FileReport> {
        match std::env::var_os(PRELUDE_ENV) {
            Some(path) => {
                let path = PathBuf::from(path);
                let mut session = Session::new();
                let report = session.load_file(&path);
                if report.is_clean() {
                    Ok(session)
                } else {
                    Err(report)
                }
            }
            None => Ok(Session::with_prelude()),
        }
    }

    pub fn globals(&self) -> &Globals {
        &self.globals
    }

    /// Parse, elaborate and check `source`. Declarations that pass stay
    /// available to later files.
    pub fn load(&mut self, file: &str, source: &str) -> FileReport {
        let (decls, diagnostics) = match parse(source) {
            Ok(decls) => elaborate(&mut self.globals, &decls),
            Err(d) => (Vec::new(), vec![d]),
        };
        FileReport {
            file: file.to_owned(),
            source: source.to_owned(),
            decls,
            diagnostics,
        }
    }

    /// Like [`Session::load`], reading the file from disk. IO failures are
    /// reported as a diagnostic without a span.
    pub fn load_file(&mut self, path: &Path) -> FileReport {
        let file = path.display().to_string();
        match std::fs::read_to_string(path) {
            Ok(source) => self.load(&file, &source),
            Err(e) => FileReport {
                file: file.clone(),
                source: String::new(),
                decls: Vec::new(),
                diagnostics: vec![Diagnostic::error(
                    Code::Internal,
                    format!("cannot read {file}: {e}"),
                )],
            },
        }
    }

    /// The normal form of a definition's body, printed in surface syntax.
    pub fn normal_form(&self, name: &str) -> Option<String> {
        let term = self.normalize_def(name)?;
        Some(crate::frontend::term_to_string(&[], &term))
    }

    /// The normal form of a definition's body.
    pub fn normalize_def(&self, name: &str) -> Option<Term> {
        let (_, entry) = self.globals.lookup(name)?;
        Some(Nbe::new(&self.globals).normalize_at(0, &entry.body))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prelude_checks() {
        let session = Session::with_prelude();
        assert!(session.globals().lookup("not").is_some());
        assert_eq!(session.normal_form("id").unwrap(), "\\_ => \\x => x");
    }

    #[test]
    fn file_definitions_shadow_prelude() {
        let mut session = Session::with_prelude();
        let report = session.load("f.hti", "def not : Bool => true\ndef t : Bool => not");
        assert!(report.is_clean(), "{:?}", report.rendered());
        assert_eq!(session.normal_form("t").unwrap(), "true");
    }

    #[test]
    fn reports_render_with_positions() {
        let mut session = Session::new();
        let report = session.load("f.hti", "def a : Bool => true\ndef b : Bool => left");
        assert_eq!(
            report.rendered(),
            vec!["f.hti:2:17: error[E-CONV]: type mismatch\nexpected: Bool\nactual: I"]
        );
    }
}
