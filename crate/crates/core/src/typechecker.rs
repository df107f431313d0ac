//! Bidirectional type checking of core terms.
//!
//! `Lam`, `Pair` and a bare `PathLam` against a known `Path` type are checked;
//! everything else is inferred and compared by conversion. Universes are
//! Russell style with no cumulativity: `Pi` and `Sigma` live at the maximum of
//! their components' levels, `I`, `Unit` and `Bool` live in `Type0`.

use std::rc::Rc;

use crate::diagnostic::{Code, Diagnostic, Span};
use crate::frontend::pretty;
use crate::globals::{GlobalEntry, Globals};
use crate::nbe::{Closure, Env, Level, Nbe, RcValue, Value};
use crate::syntax::{Binder, Context, IsoTerm, Term, MAX_UNIVERSE};

/// A typing context of evaluated types, with display names.
pub struct Checker<'g> {
    nbe: Nbe<'g>,
    names: Vec<String>,
    types: Vec<RcValue>,
}

impl<'g> Checker<'g> {
    pub fn new(globals: &'g Globals) -> Checker<'g> {
        Checker {
            nbe: Nbe::new(globals),
            names: Vec::new(),
            types: Vec::new(),
        }
    }

    /// Check that every entry of `ctx` is a type in its prefix.
    pub fn from_context(globals: &'g Globals, ctx: &Context) -> Result<Checker<'g>, Diagnostic> {
        let mut checker = Checker::new(globals);
        for (name, ty) in ctx.entries() {
            checker.check_type(ty)?;
            let ty = checker.eval(ty);
            checker.push(name, ty);
        }
        Ok(checker)
    }

    pub fn nbe(&self) -> Nbe<'g> {
        self.nbe
    }

    pub fn globals(&self) -> &'g Globals {
        self.nbe.globals()
    }

    pub fn depth(&self) -> usize {
        self.types.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn env(&self) -> Env {
        Env::identity(self.depth())
    }

    pub fn push(&mut self, name: &str, ty: RcValue) {
        self.names.push(name.to_owned());
        self.types.push(ty);
    }

    pub fn pop(&mut self) {
        self.names.pop();
        self.types.pop();
    }

    /// Run `f` with one more variable in scope.
    pub fn under<T>(&mut self, name: &str, ty: RcValue, f: impl FnOnce(&mut Self) -> T) -> T {
        self.push(name, ty);
        let result = f(self);
        self.pop();
        result
    }

    /// The next variable to be bound.
    pub fn fresh(&self) -> RcValue {
        Value::var(Level(self.depth()))
    }

    pub fn eval(&self, term: &Term) -> RcValue {
        self.nbe.eval(self.depth(), &self.env(), term)
    }

    pub fn closure(&self, binder: &Binder) -> Closure {
        Closure::new(self.env(), binder.clone())
    }

    pub fn apply(&self, closure: &Closure, arg: RcValue) -> RcValue {
        self.nbe.apply_closure(self.depth(), closure, arg)
    }

    pub fn quote(&self, value: &Value) -> Term {
        self.nbe.quote(self.depth(), value)
    }

    pub fn convert(&self, a: &Value, b: &Value) -> bool {
        self.nbe.convert(self.depth(), a, b)
    }

    /// Render a value's normal form in surface syntax.
    pub fn show(&self, value: &Value) -> String {
        self.show_term(&self.quote(value))
    }

    pub fn show_term(&self, term: &Term) -> String {
        pretty::term_to_string(&self.names, term)
    }

    pub fn mismatch(&self, message: &str, expected: &Value, actual: &Value) -> Diagnostic {
        Diagnostic::error(Code::Conv, message)
            .with_expected(self.show(expected))
            .with_actual(self.show(actual))
    }

    /// The type of the variable with de Bruijn index `index`.
    pub fn var_type(&self, index: usize) -> Option<&RcValue> {
        let depth = self.depth();
        index
            .checked_add(1)
            .and_then(|i| depth.checked_sub(i))
            .map(|l| &self.types[l])
    }

    /// Check that `term` is a type; return its universe level.
    pub fn check_type(&mut self, term: &Term) -> Result<u8, Diagnostic> {
        let ty = self.infer(term)?;
        self.universe_level(&ty).ok_or_else(|| {
            Diagnostic::error(
                Code::NotType,
                format!("expected a type, found a term of type {}", self.show(&ty)),
            )
        })
    }

    pub fn universe_level(&self, ty: &Value) -> Option<u8> {
        match ty {
            Value::Universe(l) => Some(*l),
            _ => None,
        }
    }

    pub fn universe(&self, level: u8) -> Result<RcValue, Diagnostic> {
        if level >= MAX_UNIVERSE {
            return Err(Diagnostic::error(
                Code::Universe,
                format!("Type{level} has no type: the universe tower stops at Type{MAX_UNIVERSE}"),
            ));
        }
        Ok(Rc::new(Value::Universe(level + 1)))
    }

    pub fn infer(&mut self, term: &Term) -> Result<RcValue, Diagnostic> {
        match term {
            Term::Var(i) => self.var_type(*i).cloned().ok_or_else(|| {
                Diagnostic::error(Code::Scope, format!("unbound variable index {i}"))
            }),
            Term::Global(id, name) => match self.globals().get(*id) {
                Some(entry) => Ok(entry.ty_value.clone()),
                None => Err(Diagnostic::error(
                    Code::Scope,
                    format!("unknown definition {}", name.as_str()),
                )),
            },
            Term::Universe(l) => self.universe(*l),
            Term::Pi(dom, cod) | Term::Sigma(dom, cod) => {
                let dom_level = self.check_type(dom)?;
                let dom = self.eval(dom);
                let cod_level = self.under(cod.name.as_str(), dom, |c| c.check_type(&cod.body))?;
                Ok(Rc::new(Value::Universe(dom_level.max(cod_level))))
            }
            Term::Lam(_) => Err(Diagnostic::error(
                Code::Infer,
                "cannot infer the type of a lambda; it needs an expected function type",
            )),
            Term::Pair(..) => Err(Diagnostic::error(
                Code::Infer,
                "cannot infer the type of a pair; it needs an expected Sigma type",
            )),
            Term::App(fun, arg) => {
                let fun_ty = self.infer(fun)?;
                match fun_ty.as_ref() {
                    Value::Pi(dom, cod) => {
                        self.check(arg, dom)?;
                        let arg = self.eval(arg);
                        Ok(self.apply(cod, arg))
                    }
                    _ => Err(Diagnostic::error(
                        Code::NotFun,
                        format!("applied a term of non-function type {}", self.show(&fun_ty)),
                    )),
                }
            }
            Term::Proj1(p) | Term::Proj2(p) => {
                let pair_ty = self.infer(p)?;
                match pair_ty.as_ref() {
                    Value::Sigma(fst, snd) => match term {
                        Term::Proj1(_) => Ok(fst.clone()),
                        _ => {
                            let fst = self.nbe.proj1(self.eval(p));
                            Ok(self.apply(snd, fst))
                        }
                    },
                    _ => Err(Diagnostic::error(
                        Code::NotPair,
                        format!("projected from a term of type {}", self.show(&pair_ty)),
                    )),
                }
            }
            Term::UnitType | Term::BoolType | Term::Interval => Ok(Rc::new(Value::Universe(0))),
            Term::UnitVal => Ok(Rc::new(Value::UnitType)),
            Term::True | Term::False => Ok(Rc::new(Value::BoolType)),
            Term::Left | Term::Right => Ok(Rc::new(Value::Interval)),
            Term::BoolElim(motive, on_true, on_false, scrut) => {
                self.under(motive.name.as_str(), Rc::new(Value::BoolType), |c| {
                    c.check_type(&motive.body)
                })?;
                let motive = self.closure(motive);
                self.check(on_true, &self.apply(&motive, Rc::new(Value::True)))?;
                self.check(on_false, &self.apply(&motive, Rc::new(Value::False)))?;
                self.check(scrut, &Value::BoolType)?;
                Ok(self.apply(&motive, self.eval(scrut)))
            }
            Term::Coe(family, base, target) => {
                self.under(family.name.as_str(), Rc::new(Value::Interval), |c| {
                    c.check_type(&family.body)
                })?;
                let family = self.closure(family);
                self.check(base, &self.apply(&family, Rc::new(Value::Left)))?;
                self.check(target, &Value::Interval)?;
                Ok(self.apply(&family, self.eval(target)))
            }
            Term::Path(family, left, right) => {
                let level = self.under(family.name.as_str(), Rc::new(Value::Interval), |c| {
                    c.check_type(&family.body)
                })?;
                let family = self.closure(family);
                self.check(left, &self.apply(&family, Rc::new(Value::Left)))?;
                self.check(right, &self.apply(&family, Rc::new(Value::Right)))?;
                Ok(Rc::new(Value::Universe(level)))
            }
            Term::PathLam(body) => {
                let line = self.under(body.name.as_str(), Rc::new(Value::Interval), |c| {
                    c.infer(&body.body).map(|ty| c.quote(&ty))
                })?;
                let family = self.closure(&Binder {
                    name: body.name.clone(),
                    body: Rc::new(line),
                });
                let body = self.closure(body);
                Ok(Rc::new(Value::Path(
                    family,
                    self.apply(&body, Rc::new(Value::Left)),
                    self.apply(&body, Rc::new(Value::Right)),
                )))
            }
            Term::At {
                path,
                arg,
                annot_left,
                annot_right,
            } => {
                let path_ty = self.infer(path)?;
                let Value::Path(family, left, right) = path_ty.as_ref() else {
                    return Err(Diagnostic::error(
                        Code::NotPath,
                        format!(
                            "applied a term of non-path type {} to an interval point",
                            self.show(&path_ty)
                        ),
                    ));
                };
                self.check(arg, &Value::Interval)?;
                let annot_left = self.eval(annot_left);
                if !self.convert(left, &annot_left) {
                    return Err(self.mismatch(
                        "left annotation of @ is not the path's left endpoint",
                        left,
                        &annot_left,
                    ));
                }
                let annot_right = self.eval(annot_right);
                if !self.convert(right, &annot_right) {
                    return Err(self.mismatch(
                        "right annotation of @ is not the path's right endpoint",
                        right,
                        &annot_right,
                    ));
                }
                Ok(self.apply(family, self.eval(arg)))
            }
            Term::Iso(iso) => {
                let level = self.check_iso(iso)?;
                Ok(Rc::new(Value::Universe(level)))
            }
        }
    }

    pub fn check(&mut self, term: &Term, expected: &Value) -> Result<(), Diagnostic> {
        match (term, expected) {
            (Term::Lam(body), Value::Pi(dom, cod)) => {
                let cod = self.nbe.instantiate(self.depth(), cod);
                self.under(body.name.as_str(), dom.clone(), |c| {
                    c.check(&body.body, &cod)
                })
            }
            (Term::Lam(_), _) => Err(Diagnostic::error(
                Code::Conv,
                "found a lambda where a non-function type is expected",
            )
            .with_expected(self.show(expected))),
            (Term::Pair(fst, snd), Value::Sigma(fst_ty, snd_ty)) => {
                self.check(fst, fst_ty)?;
                let snd_ty = self.apply(snd_ty, self.eval(fst));
                self.check(snd, &snd_ty)
            }
            (Term::Pair(..), _) => Err(Diagnostic::error(
                Code::Conv,
                "found a pair where a non-Sigma type is expected",
            )
            .with_expected(self.show(expected))),
            (Term::PathLam(body), Value::Path(family, left, right)) => {
                let line = self.nbe.instantiate(self.depth(), family);
                self.under(body.name.as_str(), Rc::new(Value::Interval), |c| {
                    c.check(&body.body, &line)
                })?;
                self.check_endpoints(&self.closure(body), left, right)
            }
            _ => {
                let actual = self.infer(term)?;
                if self.convert(expected, &actual) {
                    Ok(())
                } else {
                    Err(self.mismatch("type mismatch", expected, &actual))
                }
            }
        }
    }

    /// A path abstraction's endpoints must match the expected ones.
    pub fn check_endpoints(
        &self,
        body: &Closure,
        left: &Value,
        right: &Value,
    ) -> Result<(), Diagnostic> {
        let at_left = self.apply(body, Rc::new(Value::Left));
        if !self.convert(left, &at_left) {
            return Err(self.mismatch(
                "path's left endpoint does not match its type",
                left,
                &at_left,
            ));
        }
        let at_right = self.apply(body, Rc::new(Value::Right));
        if !self.convert(right, &at_right) {
            return Err(self.mismatch(
                "path's right endpoint does not match its type",
                right,
                &at_right,
            ));
        }
        Ok(())
    }

    /// The type `there ; back` must satisfy under a fresh variable of type `ty`:
    /// `back (there x) = x`. The result lives one variable deeper.
    pub fn section_type(&self, ty: &RcValue, there: &Closure, back: &Closure) -> RcValue {
        let x = self.fresh();
        let depth = self.depth() + 1;
        let round_trip =
            self.nbe
                .apply_closure(depth, back, self.nbe.apply_closure(depth, there, x.clone()));
        Rc::new(Value::Path(Closure::constant(ty.clone()), round_trip, x))
    }

    /// The seven premises of `iso`, in order:
    ///
    /// ```text
    /// Γ ⊢ A    Γ ⊢ B    Γ, x : A ⊢ b : B    Γ, y : B ⊢ a : A
    /// Γ, x : A ⊢ p : a[y := b] = x    Γ, y : B ⊢ q : b[x := a] = y    Γ ⊢ i : I
    /// ```
    ///
    /// `A` and `B` must share a universe level, which is the level of the result.
    pub fn check_iso(&mut self, iso: &IsoTerm) -> Result<u8, Diagnostic> {
        let level_a = self.check_type(&iso.ty_a).map_err(|e| iso_premise(0, e))?;
        let level_b = self.check_type(&iso.ty_b).map_err(|e| iso_premise(1, e))?;
        same_iso_level(level_a, level_b)?;
        let ty_a = self.eval(&iso.ty_a);
        let ty_b = self.eval(&iso.ty_b);
        self.under(iso.fwd.name.as_str(), ty_a.clone(), |c| {
            c.check(&iso.fwd.body, &ty_b)
        })
        .map_err(|e| iso_premise(2, e))?;
        self.under(iso.bwd.name.as_str(), ty_b.clone(), |c| {
            c.check(&iso.bwd.body, &ty_a)
        })
        .map_err(|e| iso_premise(3, e))?;
        let fwd = self.closure(&iso.fwd);
        let bwd = self.closure(&iso.bwd);
        let sect_left_ty = self.section_type(&ty_a, &fwd, &bwd);
        self.under(iso.sect_left.name.as_str(), ty_a.clone(), |c| {
            c.check(&iso.sect_left.body, &sect_left_ty)
        })
        .map_err(|e| iso_premise(4, e))?;
        let sect_right_ty = self.section_type(&ty_b, &bwd, &fwd);
        self.under(iso.sect_right.name.as_str(), ty_b.clone(), |c| {
            c.check(&iso.sect_right.body, &sect_right_ty)
        })
        .map_err(|e| iso_premise(5, e))?;
        self.check(&iso.arg, &Value::Interval)
            .map_err(|e| iso_premise(6, e))?;
        Ok(level_a)
    }
}

/// The premises of `iso`, as they appear in diagnostics.
pub const ISO_PREMISES: [&str; 7] = [
    "`Γ ⊢ A`",
    "`Γ ⊢ B`",
    "`Γ, x : A ⊢ b : B`",
    "`Γ, y : B ⊢ a : A`",
    "`Γ, x : A ⊢ p : a[y := b] = x`",
    "`Γ, y : B ⊢ q : b[x := a] = y`",
    "`Γ ⊢ i : I`",
];

/// Report the failure of premise `index` of `iso`.
pub fn iso_premise(index: usize, cause: Diagnostic) -> Diagnostic {
    Diagnostic::wrap(
        Code::IsoPremise,
        format!("iso premise {} failed", ISO_PREMISES[index]),
        cause,
    )
}

pub fn same_iso_level(level_a: u8, level_b: u8) -> Result<(), Diagnostic> {
    if level_a == level_b {
        return Ok(());
    }
    Err(Diagnostic::error(
        Code::IsoPremise,
        format!(
            "iso premise {} failed: B lives in Type{level_b} but A lives in Type{level_a}",
            ISO_PREMISES[1]
        ),
    ))
}

/// Infer the type of `term` in `ctx`, as a normal form.
pub fn infer(globals: &Globals, ctx: &Context, term: &Term) -> Result<Term, Diagnostic> {
    let mut checker = Checker::from_context(globals, ctx)?;
    let ty = checker.infer(term)?;
    Ok(checker.quote(&ty))
}

/// Check `term` against `ty`, which must be a type in `ctx`.
pub fn check(globals: &Globals, ctx: &Context, term: &Term, ty: &Term) -> Result<(), Diagnostic> {
    let mut checker = Checker::from_context(globals, ctx)?;
    let ty = checker.eval(ty);
    checker.check(term, &ty)
}

/// Check an `iso` node; returns its universe.
pub fn check_iso(globals: &Globals, ctx: &Context, iso: &IsoTerm) -> Result<Term, Diagnostic> {
    let mut checker = Checker::from_context(globals, ctx)?;
    checker.check_iso(iso).map(Term::Universe)
}

/// A declaration after elaboration: closed core terms.
#[derive(Clone, Debug)]
pub struct ElaboratedDecl {
    pub name: String,
    pub ty: Term,
    pub body: Term,
    pub span: Span,
}

/// Check a closed declaration and add it to `globals`; returns its id.
pub fn check_decl(globals: &mut Globals, decl: &ElaboratedDecl) -> Result<usize, Diagnostic> {
    let (ty_value, value) = {
        let mut checker = Checker::new(globals);
        checker
            .check_type(&decl.ty)
            .map_err(|e| e.or_span(decl.span))?;
        let ty_value = checker.eval(&decl.ty);
        checker
            .check(&decl.body, &ty_value)
            .map_err(|e| e.or_span(decl.span))?;
        (ty_value, checker.eval(&decl.body))
    };
    Ok(globals.push(GlobalEntry {
        name: decl.name.clone(),
        ty: decl.ty.clone(),
        body: decl.body.clone(),
        ty_value,
        value,
    }))
}

/// Check declarations in order, extending `globals` with each one that passes.
/// Definitions unfold transparently in later declarations.
pub fn check_decls(globals: &mut Globals, decls: &[ElaboratedDecl]) -> Vec<Diagnostic> {
    decls
        .iter()
        .filter_map(|decl| check_decl(globals, decl).err())
        .collect()
}
