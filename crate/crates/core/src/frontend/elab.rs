//! Elaboration of surface syntax into fully annotated core terms.
//!
//! A single bidirectional pass over the surface tree, sharing the kernel's
//! context and evaluator. Sugar is expanded on the way: `a = a'` becomes a
//! path over a constant family, `refl` a constant path abstraction, and every
//! `p @ i` gets its endpoint annotations from the type of `p`.

use std::rc::Rc;

use crate::diagnostic::{Code, Diagnostic};
use crate::globals::Globals;
use crate::nbe::{RcValue, Value};
use crate::syntax::{Binder, Context, IsoTerm, Term};
use crate::typechecker::{check_decl, iso_premise, same_iso_level, Checker, ElaboratedDecl};

use super::surface::{Declaration, Kind, Scoped, Surface};

type Elab<T> = Result<T, Diagnostic>;

struct Elaborator<'c, 'g> {
    checker: &'c mut Checker<'g>,
}

impl Elaborator<'_, '_> {
    fn resolve(&self, name: &str) -> Option<(Term, RcValue)> {
        if name != "_" {
            if let Some(pos) = self.checker.names().iter().rposition(|n| n == name) {
                let index = self.checker.depth() - 1 - pos;
                let ty = self.checker.var_type(index).cloned()?;
                return Some((Term::Var(index), ty));
            }
        }
        self.checker
            .globals()
            .lookup(name)
            .map(|(id, entry)| (Term::Global(id, name.into()), entry.ty_value.clone()))
    }

    fn under<T>(&mut self, name: &str, ty: RcValue, f: impl FnOnce(&mut Self) -> T) -> T {
        self.checker.push(name, ty);
        let result = f(self);
        self.checker.pop();
        result
    }

    fn binder(
        &mut self,
        scope: &Scoped,
        ty: RcValue,
        f: impl FnOnce(&mut Self, &Surface) -> Elab<Term>,
    ) -> Elab<Binder> {
        let body = self.under(&scope.name, ty, |e| f(e, &scope.body))?;
        Ok(Binder::new(scope.name.as_str(), body))
    }

    fn interval(&self) -> RcValue {
        Rc::new(Value::Interval)
    }

    /// Elaborate a type; returns it with its universe level.
    fn ty(&mut self, s: &Surface) -> Elab<(Term, u8)> {
        let (term, ty) = self.infer(s)?;
        match self.checker.universe_level(&ty) {
            Some(level) => Ok((term, level)),
            None => Err(Diagnostic::error(
                Code::NotType,
                format!(
                    "expected a type, found a term of type {}",
                    self.checker.show(&ty)
                ),
            )
            .with_span(s.span)),
        }
    }

    /// Elaborate a type family over `I`; returns the binder and its level.
    fn family(&mut self, scope: &Scoped) -> Elab<(Binder, u8)> {
        let mut level = 0;
        let binder = self.binder(scope, self.interval(), |e, body| {
            let (t, l) = e.ty(body)?;
            level = l;
            Ok(t)
        })?;
        Ok((binder, level))
    }

    fn infer(&mut self, s: &Surface) -> Elab<(Term, RcValue)> {
        self.infer_kind(s).map_err(|e| e.or_span(s.span))
    }

    fn infer_kind(&mut self, s: &Surface) -> Elab<(Term, RcValue)> {
        let universe = |l: u8| Rc::new(Value::Universe(l));
        let c = |v: Value| Rc::new(v);
        Ok(match &s.kind {
            Kind::Var(name) => self.resolve(name).ok_or_else(|| {
                Diagnostic::error(Code::Scope, format!("unresolved identifier {name}"))
            })?,
            Kind::Universe(l) => (Term::Universe(*l), self.checker.universe(*l)?),
            Kind::Interval => (Term::Interval, universe(0)),
            Kind::UnitType => (Term::UnitType, universe(0)),
            Kind::BoolType => (Term::BoolType, universe(0)),
            Kind::Left => (Term::Left, c(Value::Interval)),
            Kind::Right => (Term::Right, c(Value::Interval)),
            Kind::UnitVal => (Term::UnitVal, c(Value::UnitType)),
            Kind::True => (Term::True, c(Value::BoolType)),
            Kind::False => (Term::False, c(Value::BoolType)),
            Kind::Refl => {
                return Err(Diagnostic::error(
                    Code::Infer,
                    "cannot infer the type of refl; state the path type it should have",
                ))
            }
            Kind::Lam(_) => {
                return Err(Diagnostic::error(
                    Code::Infer,
                    "cannot infer the type of a lambda; it needs an expected function type",
                ))
            }
            Kind::Pair(..) => {
                return Err(Diagnostic::error(
                    Code::Infer,
                    "cannot infer the type of a pair; it needs an expected Sigma type",
                ))
            }
            Kind::Pi(name, dom, cod) | Kind::Sigma(name, dom, cod) => {
                let (dom, dom_level) = self.ty(dom)?;
                let dom_value = self.checker.eval(&dom);
                let name = name.as_deref().unwrap_or("_");
                let mut cod_level = 0;
                let cod = self.under(name, dom_value, |e| {
                    let (t, l) = e.ty(cod)?;
                    cod_level = l;
                    Ok::<_, Diagnostic>(t)
                })?;
                let cod = Binder::new(name, cod);
                let term = if matches!(s.kind, Kind::Pi(..)) {
                    Term::Pi(Rc::new(dom), cod)
                } else {
                    Term::Sigma(Rc::new(dom), cod)
                };
                (term, universe(dom_level.max(cod_level)))
            }
            Kind::App(fun, arg) => {
                let (fun, fun_ty) = self.infer(fun)?;
                let Value::Pi(dom, cod) = fun_ty.as_ref() else {
                    return Err(Diagnostic::error(
                        Code::NotFun,
                        format!(
                            "applied a term of non-function type {}",
                            self.checker.show(&fun_ty)
                        ),
                    ));
                };
                let arg = self.check(arg, dom)?;
                let ty = self.checker.apply(cod, self.checker.eval(&arg));
                (Term::app(fun, arg), ty)
            }
            Kind::Proj1(p) | Kind::Proj2(p) => {
                let (p, pair_ty) = self.infer(p)?;
                let Value::Sigma(fst, snd) = pair_ty.as_ref() else {
                    return Err(Diagnostic::error(
                        Code::NotPair,
                        format!(
                            "projected from a term of type {}",
                            self.checker.show(&pair_ty)
                        ),
                    ));
                };
                if matches!(s.kind, Kind::Proj1(_)) {
                    (Term::proj1(p), fst.clone())
                } else {
                    let first = self.checker.nbe().proj1(self.checker.eval(&p));
                    let ty = self.checker.apply(snd, first);
                    (Term::proj2(p), ty)
                }
            }
            Kind::BoolElim(motive, on_true, on_false, scrut) => {
                let motive = self.binder(motive, c(Value::BoolType), |e, body| {
                    e.ty(body).map(|(t, _)| t)
                })?;
                let closure = self.checker.closure(&motive);
                let on_true = self.check(on_true, &self.checker.apply(&closure, c(Value::True)))?;
                let on_false =
                    self.check(on_false, &self.checker.apply(&closure, c(Value::False)))?;
                let scrut = self.check(scrut, &Value::BoolType)?;
                let ty = self.checker.apply(&closure, self.checker.eval(&scrut));
                (
                    Term::BoolElim(motive, Rc::new(on_true), Rc::new(on_false), Rc::new(scrut)),
                    ty,
                )
            }
            Kind::Coe(family, base, target) => {
                let (family, _) = self.family(family)?;
                let closure = self.checker.closure(&family);
                let base = self.check(base, &self.checker.apply(&closure, c(Value::Left)))?;
                let target = self.check(target, &Value::Interval)?;
                let ty = self.checker.apply(&closure, self.checker.eval(&target));
                (Term::Coe(family, Rc::new(base), Rc::new(target)), ty)
            }
            Kind::Path(family, left, right) => {
                let (family, level) = self.family(family)?;
                let closure = self.checker.closure(&family);
                let left = self.check(left, &self.checker.apply(&closure, c(Value::Left)))?;
                let right = self.check(right, &self.checker.apply(&closure, c(Value::Right)))?;
                (
                    Term::Path(family, Rc::new(left), Rc::new(right)),
                    universe(level),
                )
            }
            Kind::PathLam(scope) => {
                let mut line = Term::UnitType;
                let body = self.binder(scope, self.interval(), |e, body| {
                    let (t, ty) = e.infer(body)?;
                    line = e.checker.quote(&ty);
                    Ok(t)
                })?;
                let family = self
                    .checker
                    .closure(&Binder::new(scope.name.as_str(), line));
                let closure = self.checker.closure(&body);
                let ty = Value::Path(
                    family,
                    self.checker.apply(&closure, c(Value::Left)),
                    self.checker.apply(&closure, c(Value::Right)),
                );
                (Term::PathLam(body), c(ty))
            }
            Kind::At(path, arg) => {
                let (path, path_ty) = self.infer(path)?;
                let Value::Path(family, left, right) = path_ty.as_ref() else {
                    return Err(Diagnostic::error(
                        Code::NotPath,
                        format!(
                            "`@` applied to a term of non-path type {}",
                            self.checker.show(&path_ty)
                        ),
                    ));
                };
                let arg = self.check(arg, &Value::Interval)?;
                let ty = self.checker.apply(family, self.checker.eval(&arg));
                let term = Term::at(
                    path,
                    arg,
                    self.checker.quote(left),
                    self.checker.quote(right),
                );
                (term, ty)
            }
            Kind::Eq(left, right) => {
                let (left, ty) = self.infer(left)?;
                let right = self.check(right, &ty)?;
                let ty_term = self.checker.quote(&ty);
                let level = self
                    .checker
                    .infer(&ty_term)
                    .ok()
                    .and_then(|u| self.checker.universe_level(&u))
                    .ok_or_else(|| {
                        Diagnostic::error(
                            Code::NotType,
                            format!("the endpoints of `=` have type {}, which is not small enough to form a path type", self.checker.show(&ty)),
                        )
                    })?;
                (Term::identity(&ty_term, left, right), universe(level))
            }
            Kind::Iso(iso) => {
                let (ty_a, level_a) = self.ty(&iso.ty_a).map_err(|e| iso_premise(0, e))?;
                let (ty_b, level_b) = self.ty(&iso.ty_b).map_err(|e| iso_premise(1, e))?;
                same_iso_level(level_a, level_b)?;
                let a = self.checker.eval(&ty_a);
                let b = self.checker.eval(&ty_b);
                let fwd = self
                    .binder(&iso.fwd, a.clone(), |e, body| e.check(body, &b))
                    .map_err(|e| iso_premise(2, e))?;
                let bwd = self
                    .binder(&iso.bwd, b.clone(), |e, body| e.check(body, &a))
                    .map_err(|e| iso_premise(3, e))?;
                let fwd_closure = self.checker.closure(&fwd);
                let bwd_closure = self.checker.closure(&bwd);
                let sect_left_ty = self.checker.section_type(&a, &fwd_closure, &bwd_closure);
                let sect_left = self
                    .binder(&iso.sect_left, a.clone(), |e, body| {
                        e.check(body, &sect_left_ty)
                    })
                    .map_err(|e| iso_premise(4, e))?;
                let sect_right_ty = self.checker.section_type(&b, &bwd_closure, &fwd_closure);
                let sect_right = self
                    .binder(&iso.sect_right, b.clone(), |e, body| {
                        e.check(body, &sect_right_ty)
                    })
                    .map_err(|e| iso_premise(5, e))?;
                let arg = self
                    .check(&iso.arg, &Value::Interval)
                    .map_err(|e| iso_premise(6, e))?;
                let term = Term::Iso(Rc::new(IsoTerm {
                    ty_a: Rc::new(ty_a),
                    ty_b: Rc::new(ty_b),
                    fwd,
                    bwd,
                    sect_left,
                    sect_right,
                    arg: Rc::new(arg),
                }));
                (term, universe(level_a))
            }
        })
    }

    fn check(&mut self, s: &Surface, expected: &Value) -> Elab<Term> {
        self.check_kind(s, expected).map_err(|e| e.or_span(s.span))
    }

    fn check_kind(&mut self, s: &Surface, expected: &Value) -> Elab<Term> {
        match (&s.kind, expected) {
            (Kind::Lam(scope), Value::Pi(dom, cod)) => {
                let cod = self.checker.nbe().instantiate(self.checker.depth(), cod);
                let body = self.binder(scope, dom.clone(), |e, body| e.check(body, &cod))?;
                Ok(Term::Lam(body))
            }
            (Kind::Pair(fst, snd), Value::Sigma(fst_ty, snd_ty)) => {
                let fst = self.check(fst, fst_ty)?;
                let snd_ty = self.checker.apply(snd_ty, self.checker.eval(&fst));
                let snd = self.check(snd, &snd_ty)?;
                Ok(Term::pair(fst, snd))
            }
            (Kind::PathLam(scope), Value::Path(family, left, right)) => {
                let line = self.checker.nbe().instantiate(self.checker.depth(), family);
                let body = self.binder(scope, self.interval(), |e, body| e.check(body, &line))?;
                self.checker
                    .check_endpoints(&self.checker.closure(&body), left, right)?;
                Ok(Term::PathLam(body))
            }
            (Kind::Refl, Value::Path(..)) => {
                let Value::Path(_, left, _) = expected else {
                    unreachable!()
                };
                let term = Term::refl(&self.checker.quote(left));
                self.checker.check(&term, expected)?;
                Ok(term)
            }
            (Kind::Lam(_) | Kind::Pair(..) | Kind::Refl, _) => {
                let what = match s.kind {
                    Kind::Lam(_) => "a lambda",
                    Kind::Pair(..) => "a pair",
                    _ => "refl",
                };
                Err(Diagnostic::error(
                    Code::Conv,
                    format!("found {what} where a term of this type is expected"),
                )
                .with_expected(self.checker.show(expected)))
            }
            _ => {
                let (term, actual) = self.infer(s)?;
                if self.checker.convert(expected, &actual) {
                    Ok(term)
                } else {
                    Err(self.checker.mismatch("type mismatch", expected, &actual))
                }
            }
        }
    }
}

/// Elaborate a term in `ctx`, checking against `expected` (a core type in
/// `ctx`) or inferring. Returns the core term and its type.
pub fn elab_term_in(
    globals: &Globals,
    ctx: &Context,
    surface: &Surface,
    expected: Option<&Term>,
) -> Result<(Term, Term), Diagnostic> {
    let mut checker = Checker::from_context(globals, ctx)?;
    let mut e = Elaborator {
        checker: &mut checker,
    };
    match expected {
        Some(ty) => {
            let ty_value = e.checker.eval(ty);
            let term = e.check(surface, &ty_value)?;
            Ok((term, ty.clone()))
        }
        None => {
            let (term, ty) = e.infer(surface)?;
            let ty = e.checker.quote(&ty);
            Ok((term, ty))
        }
    }
}

/// Elaborate one declaration against the definitions checked so far.
pub fn elaborate_decl(globals: &Globals, decl: &Declaration) -> Result<ElaboratedDecl, Diagnostic> {
    let mut checker = Checker::new(globals);
    let mut e = Elaborator {
        checker: &mut checker,
    };
    let (ty, _) = e.ty(&decl.ty).map_err(|d| d.or_span(decl.ty.span))?;
    let ty_value = e.checker.eval(&ty);
    let body = e.check(&decl.body, &ty_value)?;
    Ok(ElaboratedDecl {
        name: decl.name.clone(),
        ty,
        body,
        span: decl.span,
    })
}

/// Elaborate and kernel-check declarations in order, adding each one that
/// passes to `globals`. A failed declaration is skipped; later references to
/// it are unresolved.
pub fn elaborate(
    globals: &mut Globals,
    decls: &[Declaration],
) -> (Vec<ElaboratedDecl>, Vec<Diagnostic>) {
    let mut done = Vec::new();
    let mut diagnostics = Vec::new();
    for decl in decls {
        let checked = elaborate_decl(globals, decl).and_then(|elaborated| {
            check_decl(globals, &elaborated)?;
            Ok(elaborated)
        });
        match checked {
            Ok(elaborated) => done.push(elaborated),
            Err(d) => diagnostics.push(d.or_span(decl.span)),
        }
    }
    (done, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parser::{parse, parse_term};

    fn elab(src: &str, ty: Option<&Term>) -> Result<(Term, Term), Diagnostic> {
        elab_term_in(
            &Globals::new(),
            &Context::new(),
            &parse_term(src).unwrap(),
            ty,
        )
    }

    #[test]
    fn refl_becomes_constant_path() {
        let ty = Term::identity(&Term::Interval, Term::Left, Term::Left);
        let (t, _) = elab("refl", Some(&ty)).unwrap();
        assert_eq!(t, Term::path_lam("_", Term::Left));
    }

    #[test]
    fn eq_sugar_builds_constant_family() {
        let (t, ty) = elab("left = left", None).unwrap();
        assert_eq!(t, Term::identity(&Term::Interval, Term::Left, Term::Left));
        assert_eq!(ty, Term::Universe(0));
    }

    #[test]
    fn at_gets_annotations() {
        let ctx = Context::new().with(
            "p",
            Term::path("x", Term::BoolType, Term::True, Term::False),
        );
        let (t, ty) = elab_term_in(
            &Globals::new(),
            &ctx,
            &parse_term("p @ left").unwrap(),
            None,
        )
        .unwrap();
        assert_eq!(
            t,
            Term::at(Term::Var(0), Term::Left, Term::True, Term::False)
        );
        assert_eq!(ty, Term::BoolType);
    }

    #[test]
    fn alpha_equivalent_sources_elaborate_equal() {
        let ty = Term::pi("x", Term::BoolType, Term::BoolType);
        let (a, _) = elab("\\x => x", Some(&ty)).unwrap();
        let (b, _) = elab("\\y => y", Some(&ty)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unresolved_identifier() {
        let src = "def y : Bool => x";
        let mut g = Globals::new();
        let (_, diags) = elaborate(&mut g, &parse(src).unwrap());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::Scope);
        assert_eq!(diags[0].message, "unresolved identifier x");
        assert_eq!(diags[0].span.unwrap().line_col(src), (1, 17));
    }

    #[test]
    fn at_on_non_path() {
        assert_eq!(elab("true @ left", None).unwrap_err().code, Code::NotPath);
    }

    #[test]
    fn later_declarations_see_earlier_ones() {
        let src = "def b : Bool => true\ndef p : b = true => refl\ndef q : Bool => b";
        let mut g = Globals::new();
        let (done, diags) = elaborate(&mut g, &parse(src).unwrap());
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(done.len(), 3);
        assert_eq!(g.len(), 3);
    }
}
