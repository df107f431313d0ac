//! Property suites over generated terms.
//!
//! Each case draws from its own random stream, so cases can be sharded across
//! threads and merged back in index order with identical results. Threads do
//! not share kernel state: each builds its own (empty) definition environment.

use std::fmt;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::conversion::convert_terms;
use crate::frontend::term_to_string;
use crate::globals::Globals;
use crate::harness::gen::{default_targets, identity_iso, GenConfig, Generator};
use crate::nbe::{Closure, CoeRule, Env, Nbe};
use crate::oracle::OraclePair;
use crate::syntax::{Binder, Context, Term};
use crate::typechecker;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Multi-rule `coe` redexes: every matching rule and every rule order agree.
    Overlap,
    /// `coe` along an identity iso agrees with the constant-family answer.
    IsoIdentity,
    /// Normal forms keep their type.
    SubjectReduction,
    /// Normalizing a normal form changes nothing.
    Idempotence,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Overlap,
        Suite::IsoIdentity,
        Suite::SubjectReduction,
        Suite::Idempotence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Overlap => "overlap",
            Suite::IsoIdentity => "iso-identity",
            Suite::SubjectReduction => "subject-reduction",
            Suite::Idempotence => "idempotence",
        }
    }

    pub fn parse(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn default_cases(self) -> usize {
        match self {
            Suite::Overlap => 200,
            Suite::IsoIdentity => 100,
            Suite::SubjectReduction | Suite::Idempotence => 500,
        }
    }
}

/// Settings shared by all suites; plain data so it can cross threads.
#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Number of cases; `None` uses the suite's default.
    pub cases: Option<usize>,
    pub max_depth: usize,
    pub jobs: usize,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig {
            seed: 1,
            cases: None,
            max_depth: 4,
            jobs: 1,
        }
    }
}

impl SuiteConfig {
    fn gen_config(&self, iso_enabled: bool) -> GenConfig {
        GenConfig {
            seed: self.seed,
            max_depth: self.max_depth,
            iso_enabled,
            ..GenConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub property: String,
    pub cases: usize,
    /// Failing case indices with details.
    pub failures: Vec<(usize, String)>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn lines(&self) -> Vec<String> {
        if self.passed() {
            return vec![format!("PASS {} {} cases", self.property, self.cases)];
        }
        self.failures
            .iter()
            .map(|(i, why)| format!("FAIL {} case {i}: {why}", self.property))
            .collect()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lines().join("\n"))
    }
}

/// Run `case` for indices `0..n` on up to `jobs` threads; results in index order.
pub fn run_cases<F>(n: usize, jobs: usize, case: F) -> Vec<Result<(), String>>
where
    F: Fn(&Globals, usize) -> Result<(), String> + Sync,
{
    let jobs = jobs.clamp(1, n.max(1));
    if jobs == 1 {
        let globals = Globals::new();
        return (0..n).map(|i| case(&globals, i)).collect();
    }
    let mut results: Vec<Option<Result<(), String>>> = vec![None; n];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|worker| {
                let case = &case;
                scope.spawn(move || {
                    let globals = Globals::new();
                    (worker..n)
                        .step_by(jobs)
                        .map(|i| (i, case(&globals, i)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for handle in handles {
            for (i, r) in handle.join().expect("suite worker panicked") {
                results[i] = Some(r);
            }
        }
    });
    results
        .into_iter()
        .map(|r| r.expect("every case ran"))
        .collect()
}

pub fn run_suite(suite: Suite, config: &SuiteConfig) -> SuiteReport {
    let n = config.cases.unwrap_or(suite.default_cases());
    let config = *config;
    let results = run_cases(n, config.jobs, |globals, i| match suite {
        Suite::Overlap => overlap_case(globals, &config.gen_config(false), i),
        Suite::IsoIdentity => iso_identity_case(globals, &config.gen_config(false), i),
        Suite::SubjectReduction => subject_reduction_case(globals, &config.gen_config(true), i),
        Suite::Idempotence => idempotence_case(globals, &config.gen_config(true), i),
    });
    SuiteReport {
        property: suite.name().to_owned(),
        cases: n,
        failures: results
            .into_iter()
            .enumerate()
            .filter_map(|(i, r)| r.err().map(|why| (i, why)))
            .collect(),
    }
}

fn show(t: &Term) -> String {
    term_to_string(&[], t)
}

/// A target type and a closed, kernel-checked term of it.
fn generate_case(globals: &Globals, cfg: &GenConfig, index: usize) -> Result<(Term, Term), String> {
    let mut g = Generator::new(globals, cfg.case_rng(index), cfg);
    let ty = cfg
        .type_targets
        .choose(g.rng())
        .cloned()
        .expect("at least one target type");
    let t = g
        .generate(&ty, cfg.max_depth)
        .map_err(|e| format!("generator exhausted at {}", show(&e.target)))?;
    Ok((ty, t))
}

const ORDERS: [[CoeRule; 3]; 3] = [
    [CoeRule::Left, CoeRule::Constant, CoeRule::Iso],
    [CoeRule::Constant, CoeRule::Left, CoeRule::Iso],
    [CoeRule::Iso, CoeRule::Constant, CoeRule::Left],
];

/// A family over `I` that is constant at `ty` once normalized, with `ty : Type level`.
fn constant_family(g: &mut Generator<'_>, ty: &Term, level: u8) -> Binder {
    let up = crate::syntax::shift(ty, 0, 1);
    match g.rng().gen_range(0..4) {
        0 => Binder::constant(ty),
        1 => Binder::new("x", Term::coe("y", Term::Universe(level), up, Term::Var(0))),
        2 => Binder::new("x", Term::at(Term::refl(&up), Term::Var(0), up.clone(), up)),
        _ => {
            let s = Term::coe("_", Term::BoolType, Term::True, Term::Var(0));
            Binder::new(
                "x",
                Term::bool_elim("_", Term::Universe(level), up.clone(), up, s),
            )
        }
    }
}

/// An interval term that evaluates to `left`.
fn left_point(g: &mut Generator<'_>) -> Term {
    match g.rng().gen_range(0..3) {
        0 => Term::Left,
        1 => Term::coe("_", Term::Interval, Term::Left, Term::Right),
        _ => Term::at(
            Term::path_lam("j", Term::Var(0)),
            Term::Left,
            Term::Left,
            Term::Right,
        ),
    }
}

fn overlap_case(globals: &Globals, cfg: &GenConfig, index: usize) -> Result<(), String> {
    let ctx = Context::new();
    let mut g = Generator::new(globals, cfg.case_rng(index), cfg);
    let ty = cfg.type_targets.choose(g.rng()).cloned().expect("targets");
    let level = match typechecker::infer(globals, &ctx, &ty) {
        Ok(Term::Universe(l)) => l,
        other => return Err(format!("target {} is not a type: {other:?}", show(&ty))),
    };
    let family = constant_family(&mut g, &ty, level);
    let base = g
        .generate(&ty, cfg.max_depth.saturating_sub(1).max(1))
        .map_err(|e| format!("generator exhausted at {}", show(&e.target)))?;
    let target = left_point(&mut g);
    let redex = Term::Coe(family.clone(), Rc::new(base), Rc::new(target.clone()));
    typechecker::check(globals, &ctx, &redex, &ty)
        .map_err(|d| format!("generated redex {} does not check: {d}", show(&redex)))?;

    let nbe = Nbe::new(globals);
    let env = Env::new();
    let closure = Closure::new(env.clone(), family);
    let base_v = nbe.eval(0, &env, &redex_base(&redex));
    let target_v = nbe.eval(0, &env, &target);
    let fired = nbe.coe_matches(0, &closure, &base_v, &target_v);
    if fired.len() < 2 {
        return Err(format!(
            "{} matches {} rule(s), expected an overlap",
            show(&redex),
            fired.len()
        ));
    }
    let (first_rule, first) = &fired[0];
    let first_nf = nbe.quote(0, first);
    for (rule, value) in &fired[1..] {
        if !nbe.convert(0, first, value) || nbe.quote(0, value) != first_nf {
            return Err(format!(
                "{}: rule {} gives {} but rule {} gives {}",
                show(&redex),
                first_rule.name(),
                show(&first_nf),
                rule.name(),
                show(&nbe.quote(0, value))
            ));
        }
    }
    let normal_forms: Vec<Term> = ORDERS
        .iter()
        .map(|order| nbe.with_coe_order(*order).normalize_at(0, &redex))
        .collect();
    if let Some(k) = normal_forms.iter().position(|nf| nf != &normal_forms[0]) {
        return Err(format!(
            "{}: rule order {:?} normalizes to {} but {:?} gives {}",
            show(&redex),
            ORDERS[0].map(CoeRule::name),
            show(&normal_forms[0]),
            ORDERS[k].map(CoeRule::name),
            show(&normal_forms[k])
        ));
    }
    Ok(())
}

fn redex_base(redex: &Term) -> Term {
    match redex {
        Term::Coe(_, base, _) => (**base).clone(),
        _ => unreachable!("overlap cases are coe redexes"),
    }
}

fn iso_identity_case(globals: &Globals, cfg: &GenConfig, index: usize) -> Result<(), String> {
    let ctx = Context::new();
    let mut g = Generator::new(globals, cfg.case_rng(index), cfg);
    let small = [
        Term::BoolType,
        Term::UnitType,
        Term::Interval,
        Term::pi("_", Term::BoolType, Term::BoolType),
    ];
    let ty = small.choose(g.rng()).cloned().expect("small types");
    let a = g
        .generate(&ty, cfg.max_depth)
        .map_err(|e| format!("generator exhausted at {}", show(&e.target)))?;
    let redex = Term::coe("x", identity_iso(&ty, Term::Var(0)), a.clone(), Term::Right);
    typechecker::check(globals, &ctx, &redex, &ty)
        .map_err(|d| format!("{} does not check: {d}", show(&redex)))?;
    if !convert_terms(globals, &ctx, &redex, &a) {
        return Err(format!(
            "{} is not convertible to {}",
            show(&redex),
            show(&a)
        ));
    }
    Ok(())
}

fn subject_reduction_case(globals: &Globals, cfg: &GenConfig, index: usize) -> Result<(), String> {
    let ctx = Context::new();
    let (ty, t) = generate_case(globals, cfg, index)?;
    let nf = crate::nbe::normalize(globals, &ctx, &t);
    typechecker::check(globals, &ctx, &nf, &ty).map_err(|d| {
        format!(
            "{} : {} but its normal form {} does not check: {d}",
            show(&t),
            show(&ty),
            show(&nf)
        )
    })?;
    if let (Ok(before), Ok(after)) = (
        typechecker::infer(globals, &ctx, &t),
        typechecker::infer(globals, &ctx, &nf),
    ) {
        if !convert_terms(globals, &ctx, &before, &after) {
            return Err(format!(
                "{} infers {} but its normal form {} infers {}",
                show(&t),
                show(&before),
                show(&nf),
                show(&after)
            ));
        }
    }
    Ok(())
}

fn idempotence_case(globals: &Globals, cfg: &GenConfig, index: usize) -> Result<(), String> {
    let ctx = Context::new();
    let (_, t) = generate_case(globals, cfg, index)?;
    let once = crate::nbe::normalize(globals, &ctx, &t);
    let twice = crate::nbe::normalize(globals, &ctx, &once);
    if once != twice {
        return Err(format!(
            "{} normalizes to {} and then to {}",
            show(&t),
            show(&once),
            show(&twice)
        ));
    }
    if !convert_terms(globals, &ctx, &t, &once) {
        return Err(format!(
            "{} is not convertible to its normal form",
            show(&t)
        ));
    }
    Ok(())
}

/// `count` generated closed iso-free terms, each paired with its normal form.
pub fn oracle_pairs(globals: &Globals, seed: u64, count: usize) -> Vec<Result<OraclePair, String>> {
    let cfg = GenConfig {
        seed,
        iso_enabled: false,
        type_targets: default_targets(),
        ..GenConfig::default()
    };
    (0..count)
        .map(|i| {
            let (ty, t) = generate_case(globals, &cfg, i)?;
            let nf = crate::nbe::normalize(globals, &Context::new(), &t);
            Ok(OraclePair {
                left: t,
                right: nf,
                ty,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gen::not_iso;
    use crate::nbe::Value;

    #[test]
    fn suites_pass_on_a_small_sample() {
        for suite in Suite::ALL {
            let report = run_suite(
                suite,
                &SuiteConfig {
                    cases: Some(20),
                    ..SuiteConfig::default()
                },
            );
            assert!(report.passed(), "{report}");
        }
    }

    #[test]
    fn sharding_does_not_change_results() {
        let one = SuiteConfig {
            cases: Some(12),
            ..SuiteConfig::default()
        };
        let four = SuiteConfig { jobs: 4, ..one };
        assert_eq!(
            run_suite(Suite::Overlap, &one),
            run_suite(Suite::Overlap, &four)
        );
    }

    #[test]
    fn constant_family_at_left_matches_two_rules() {
        let g = Globals::new();
        let nbe = Nbe::new(&g);
        let family = Closure::new(Env::new(), Binder::constant(&Term::BoolType));
        let fired = nbe.coe_matches(0, &family, &Rc::new(Value::True), &Rc::new(Value::Left));
        let rules: Vec<CoeRule> = fired.iter().map(|(r, _)| *r).collect();
        assert_eq!(rules, vec![CoeRule::Left, CoeRule::Constant]);
        assert!(fired.iter().all(|(_, v)| matches!(**v, Value::True)));
    }

    #[test]
    fn iso_family_at_left_matches_only_the_left_rule() {
        let g = Globals::new();
        let nbe = Nbe::new(&g);
        let family = Closure::new(Env::new(), Binder::new("x", not_iso(Term::Var(0))));
        let fired = nbe.coe_matches(0, &family, &Rc::new(Value::True), &Rc::new(Value::Left));
        let rules: Vec<CoeRule> = fired.iter().map(|(r, _)| *r).collect();
        assert_eq!(rules, vec![CoeRule::Left]);
    }

    #[test]
    fn ill_typed_control_is_rejected() {
        let g = Globals::new();
        let bad = Term::app(Term::True, Term::True);
        assert!(typechecker::check(&g, &Context::new(), &bad, &Term::BoolType).is_err());
    }

    #[test]
    fn report_lines() {
        let report = SuiteReport {
            property: "overlap".into(),
            cases: 3,
            failures: vec![(1, "boom".into())],
        };
        assert_eq!(report.lines(), vec!["FAIL overlap case 1: boom"]);
    }
}
