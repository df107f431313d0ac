//! Every corpus file checks, or fails with exactly its annotated code.

use hti_core::corpus::{corpus_dir, corpus_files, Expectation};
use hti_core::frontend::{parse, print_decls};
use hti_core::syntax::alpha_eq;
use hti_core::typechecker::check;
use hti_core::{convert_terms, normalize, Context, Session};

#[test]
fn corpus_files_meet_expectations() {
    let files = corpus_files().unwrap();
    assert!(files.len() >= 4);
    let mut failures = Vec::new();
    for file in files {
        if file.path.ends_with("prelude.hti") {
            continue;
        }
        let mut session = Session::with_prelude();
        let report = session.load_file(&file.path);
        let ok = match file.expected {
            Expectation::Clean => report.is_clean(),
            Expectation::Fails(code) => {
                !report.diagnostics.is_empty() && report.diagnostics.iter().all(|d| d.code == code)
            }
        };
        if !ok {
            failures.push(format!(
                "{:?}: {:?}\n{}",
                file.path,
                file.expected,
                report.rendered().join("\n")
            ));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n\n"));
}

#[test]
fn prelude_checks_without_prelude() {
    let mut session = Session::new();
    let report = session.load_file(&corpus_dir().join("prelude.hti"));
    assert!(report.is_clean(), "{:?}", report.rendered());
}

fn positive_sources() -> Vec<(String, String)> {
    corpus_files()
        .unwrap()
        .into_iter()
        .filter(|f| f.expected == Expectation::Clean)
        .map(|f| {
            let source = std::fs::read_to_string(&f.path).unwrap();
            (f.path.display().to_string(), source)
        })
        .collect()
}

#[test]
fn printing_parsed_corpus_is_a_fixpoint() {
    for (path, source) in positive_sources() {
        let printed = print_decls(&parse(&source).unwrap());
        let reparsed =
            parse(&printed).unwrap_or_else(|d| panic!("{path}: {}", d.render(&path, &printed)));
        assert_eq!(print_decls(&reparsed), printed, "{path}");

        // The printed file means the same thing.
        let mut original = Session::with_prelude();
        let mut round = Session::with_prelude();
        let a = original.load(&path, &source);
        let b = round.load(&path, &printed);
        assert!(b.is_clean(), "{path}: {:?}", b.rendered());
        let cores = |r: &hti_core::FileReport| {
            r.decls
                .iter()
                .map(|d| (d.name.clone(), d.ty.clone(), d.body.clone()))
                .collect::<Vec<_>>()
        };
        assert_eq!(cores(&a), cores(&b), "{path}");
    }
}

#[test]
fn corpus_definitions_are_well_typed_and_normalize_stably() {
    for (path, source) in positive_sources() {
        let mut session = Session::with_prelude();
        let report = session.load(&path, &source);
        let globals = session.globals();
        let ctx = Context::new();
        for decl in &report.decls {
            check(globals, &ctx, &decl.body, &decl.ty)
                .unwrap_or_else(|d| panic!("{}: {d}", decl.name));
            let nf = normalize(globals, &ctx, &decl.body);
            assert_eq!(
                normalize(globals, &ctx, &nf),
                nf,
                "{} is not idempotent",
                decl.name
            );
            assert!(
                convert_terms(globals, &ctx, &decl.body, &nf),
                "{}",
                decl.name
            );
            check(globals, &ctx, &nf, &decl.ty)
                .unwrap_or_else(|d| panic!("normal form of {}: {d}", decl.name));
        }
    }
}

#[test]
fn j_at_refl_computes_to_its_base_case() {
    let mut session = Session::with_prelude();
    let report = session.load_file(&corpus_dir().join("jrule.hti"));
    assert!(report.is_clean(), "{:?}", report.rendered());
    let redex = "def redex : (A : Type0) -> (a : A) -> (C : (x : A) -> a = x -> Type0) -> (d : C a refl) -> C a refl =>\n  \\A => \\a => \\C => \\d => J A a C d a refl\n";
    let report = session.load("redex.hti", redex);
    assert!(report.is_clean(), "{:?}", report.rendered());
    assert_eq!(
        session.normal_form("redex").unwrap(),
        "\\_ => \\_ => \\_ => \\d => d"
    );
}

#[test]
fn alpha_equivalent_sources_elaborate_equal() {
    let mut session = Session::new();
    let report = session.load(
        "a.hti",
        "def f : Bool -> Bool => \\x => x\ndef g : Bool -> Bool => \\y => y",
    );
    assert!(report.is_clean());
    assert!(alpha_eq(&report.decls[0].body, &report.decls[1].body));
}
