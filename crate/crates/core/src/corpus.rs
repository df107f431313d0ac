//! The `.hti` standard library and its negative test files.

use std::path::{Path, PathBuf};

use crate::diagnostic::Code;

/// What checking a corpus file should produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Clean,
    /// Every diagnostic has this code, and there is at least one.
    Fails(Code),
}

#[derive(Clone, Debug)]
pub struct CorpusFile {
    pub path: PathBuf,
    pub expected: Expectation,
}

/// The `corpus/` directory of the source tree.
pub fn corpus_dir() -> PathBuf {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    dir.canonicalize().unwrap_or(dir)
}

/// Read the `-- expect: E-CODE` header of a negative file.
pub fn expected_code(source: &str) -> Option<Code> {
    source
        .lines()
        .take_while(|l| l.trim_start().starts_with("--") || l.trim().is_empty())
        .find_map(|l| {
            l.trim_start()
                .strip_prefix("--")?
                .trim()
                .strip_prefix("expect:")
        })
        .and_then(|code| Code::parse(code.trim()))
}

fn hti_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "hti"))
        .collect();
    files.sort();
    Ok(files)
}

/// Every corpus file with its expected outcome. Positive files come first.
pub fn corpus_files() -> std::io::Result<Vec<CorpusFile>> {
    let dir = corpus_dir();
    let mut out: Vec<CorpusFile> = hti_files(&dir)?
        .into_iter()
        .map(|path| CorpusFile {
            path,
            expected: Expectation::Clean,
        })
        .collect();
    for path in hti_files(&dir.join("negative"))? {
        let source = std::fs::read_to_string(&path)?;
        let expected = match expected_code(&source) {
            Some(code) => Expectation::Fails(code),
            None => {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("{} has no `-- expect:` header", path.display()),
                ))
            }
        };
        out.push(CorpusFile { path, expected });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_expect_header() {
        assert_eq!(
            expected_code("-- expect: E-CONV\ndef a : I => left"),
            Some(Code::Conv)
        );
        assert_eq!(
            expected_code("-- note\n-- expect: E-SCOPE\n"),
            Some(Code::Scope)
        );
        assert_eq!(expected_code("def a : I => left\n-- expect: E-CONV"), None);
    }

    #[test]
    fn lists_positive_and_negative_files() {
        let files = corpus_files().unwrap();
        assert!(files
            .iter()
            .any(|f| f.path.ends_with("jrule.hti") && f.expected == Expectation::Clean));
        assert!(files
            .iter()
            .any(|f| f.path.ends_with("endpoints.hti")
                && f.expected == Expectation::Fails(Code::Conv)));
    }
}
