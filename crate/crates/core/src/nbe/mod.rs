//! Normalization by evaluation.
//!
//! Terms are evaluated into [`Value`]s in weak head normal form and read back
//! into beta-normal [`Term`]s. Every operation takes the current context depth:
//! all neutral variables reachable from the arguments have a level below it,
//! so `Level(depth)` is always fresh.
//!
//! `coe` computes by three rules, tried in a fixed order:
//!
//! 1. `coe(x. A, a, left) ≡ a`
//! 2. `coe(x. A, a, i) ≡ a` when `x` does not occur in the normal form of `A`
//! 3. `coe(x. iso(A, B, x'.b, y.a, x'.p, y.q, x), a₀, right) ≡ b[x' := a₀]`
//!    when `x` occurs in none of the six data components
//!
//! When none applies the coercion is a stuck neutral. Closed terms of base type
//! can therefore be stuck; the theory has no canonicity.

mod value;

pub use value::{Closure, Elim, Env, Head, IsoValue, Level, RcValue, StuckCoe, Value};

use std::rc::Rc;

use crate::globals::Globals;
use crate::syntax::{free_var_occurs, subst, Binder, Context, IsoTerm, Term};

/// A computation rule for `coe`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoeRule {
    Left,
    Constant,
    Iso,
}

impl CoeRule {
    pub const ALL: [CoeRule; 3] = [CoeRule::Left, CoeRule::Constant, CoeRule::Iso];

    pub fn name(self) -> &'static str {
        match self {
            CoeRule::Left => "left",
            CoeRule::Constant => "constant",
            CoeRule::Iso => "iso",
        }
    }
}

/// The evaluator: global definitions plus the order in which `coe` rules are tried.
#[derive(Clone, Copy)]
pub struct Nbe<'g> {
    globals: &'g Globals,
    coe_order: [CoeRule; 3],
}

impl<'g> Nbe<'g> {
    pub fn new(globals: &'g Globals) -> Nbe<'g> {
        Nbe {
            globals,
            coe_order: CoeRule::ALL,
        }
    }

    /// Try the `coe` rules in a different order. Only used to test that
    /// overlapping rules agree.
    pub fn with_coe_order(self, coe_order: [CoeRule; 3]) -> Nbe<'g> {
        Nbe { coe_order, ..self }
    }

    pub fn globals(&self) -> &'g Globals {
        self.globals
    }

    pub fn eval(&self, depth: usize, env: &Env, term: &Term) -> RcValue {
        let closure = |b: &Binder| Closure::new(env.clone(), b.clone());
        let go = |t: &Term| self.eval(depth, env, t);
        match term {
            Term::Var(i) => match env.get(*i) {
                Some(v) => v.clone(),
                None => panic!("internal error: unbound index {i} in evaluation"),
            },
            Term::Global(id, _) => match self.globals.get(*id) {
                Some(entry) => entry.value.clone(),
                None => panic!("internal error: unknown global {id}"),
            },
            Term::Universe(l) => Rc::new(Value::Universe(*l)),
            Term::Pi(a, b) => Rc::new(Value::Pi(go(a), closure(b))),
            Term::Lam(b) => Rc::new(Value::Lam(closure(b))),
            Term::App(f, a) => self.apply(depth, go(f), go(a)),
            Term::Sigma(a, b) => Rc::new(Value::Sigma(go(a), closure(b))),
            Term::Pair(a, b) => Rc::new(Value::Pair(go(a), go(b))),
            Term::Proj1(p) => self.proj1(go(p)),
            Term::Proj2(p) => self.proj2(go(p)),
            Term::UnitType => Rc::new(Value::UnitType),
            Term::UnitVal => Rc::new(Value::UnitVal),
            Term::BoolType => Rc::new(Value::BoolType),
            Term::True => Rc::new(Value::True),
            Term::False => Rc::new(Value::False),
            Term::BoolElim(m, t, f, s) => self.bool_elim(depth, closure(m), go(t), go(f), go(s)),
            Term::Interval => Rc::new(Value::Interval),
            Term::Left => Rc::new(Value::Left),
            Term::Right => Rc::new(Value::Right),
            Term::Coe(fam, base, target) => self.coe(depth, &closure(fam), go(base), go(target)),
            Term::Path(fam, l, r) => Rc::new(Value::Path(closure(fam), go(l), go(r))),
            Term::PathLam(b) => Rc::new(Value::PathLam(closure(b))),
            Term::At {
                path,
                arg,
                annot_left,
                annot_right,
            } => self.at(depth, go(path), go(arg), go(annot_left), go(annot_right)),
            Term::Iso(iso) => self.iso_form(IsoValue {
                ty_a: go(&iso.ty_a),
                ty_b: go(&iso.ty_b),
                fwd: closure(&iso.fwd),
                bwd: closure(&iso.bwd),
                sect_left: closure(&iso.sect_left),
                sect_right: closure(&iso.sect_right),
                arg: go(&iso.arg),
            }),
        }
    }

    pub fn apply_closure(&self, depth: usize, closure: &Closure, arg: RcValue) -> RcValue {
        self.eval(depth, &closure.env.extend(arg), &closure.binder.body)
    }

    /// Instantiate a closure at the fresh variable `Level(depth)`. The result
    /// lives at `depth + 1`.
    pub fn instantiate(&self, depth: usize, closure: &Closure) -> RcValue {
        self.apply_closure(depth + 1, closure, Value::var(Level(depth)))
    }

    pub fn apply(&self, depth: usize, fun: RcValue, arg: RcValue) -> RcValue {
        match fun.as_ref() {
            Value::Lam(body) => self.apply_closure(depth, body, arg),
            Value::Neutral(head, spine) => push_elim(head, spine, Elim::App(arg)),
            _ => panic!("internal error: applied a non-function"),
        }
    }

    pub fn proj1(&self, pair: RcValue) -> RcValue {
        match pair.as_ref() {
            Value::Pair(a, _) => a.clone(),
            Value::Neutral(head, spine) => push_elim(head, spine, Elim::Proj1),
            _ => panic!("internal error: projected from a non-pair"),
        }
    }

    pub fn proj2(&self, pair: RcValue) -> RcValue {
        match pair.as_ref() {
            Value::Pair(_, b) => b.clone(),
            Value::Neutral(head, spine) => push_elim(head, spine, Elim::Proj2),
            _ => panic!("internal error: projected from a non-pair"),
        }
    }

    pub fn bool_elim(
        &self,
        _depth: usize,
        motive: Closure,
        on_true: RcValue,
        on_false: RcValue,
        scrut: RcValue,
    ) -> RcValue {
        match scrut.as_ref() {
            Value::True => on_true,
            Value::False => on_false,
            Value::Neutral(head, spine) => {
                push_elim(head, spine, Elim::BoolElim(motive, on_true, on_false))
            }
            _ => panic!("internal error: eliminated a non-boolean"),
        }
    }

    /// Path application `p @_{a,a'} i`. Beta first, then the endpoint rules.
    pub fn at(
        &self,
        depth: usize,
        path: RcValue,
        arg: RcValue,
        annot_left: RcValue,
        annot_right: RcValue,
    ) -> RcValue {
        if let Value::PathLam(body) = path.as_ref() {
            return self.apply_closure(depth, body, arg);
        }
        match arg.as_ref() {
            Value::Left => return annot_left,
            Value::Right => return annot_right,
            _ => {}
        }
        match path.as_ref() {
            Value::Neutral(head, spine) => push_elim(
                head,
                spine,
                Elim::At {
                    arg,
                    annot_left,
                    annot_right,
                },
            ),
            _ => panic!("internal error: applied a non-path to an interval point"),
        }
    }

    /// `iso(A, B, …, i)`: `A` at `left`, `B` at `right`, otherwise a stuck type.
    pub fn iso_form(&self, iso: IsoValue) -> RcValue {
        match iso.arg.as_ref() {
            Value::Left => iso.ty_a,
            Value::Right => iso.ty_b,
            _ => Rc::new(Value::Iso(Rc::new(iso))),
        }
    }

    pub fn coe(&self, depth: usize, family: &Closure, base: RcValue, target: RcValue) -> RcValue {
        for rule in self.coe_order {
            if let Some(result) = self.try_coe_rule(depth, rule, family, &base, &target) {
                return result;
            }
        }
        Rc::new(Value::Neutral(
            Head::Coe(Rc::new(StuckCoe {
                family: family.clone(),
                base,
                target,
            })),
            Vec::new(),
        ))
    }

    /// The rules whose left hand side matches this coercion.
    pub fn coe_matches(
        &self,
        depth: usize,
        family: &Closure,
        base: &RcValue,
        target: &RcValue,
    ) -> Vec<(CoeRule, RcValue)> {
        CoeRule::ALL
            .into_iter()
            .filter_map(|rule| {
                self.try_coe_rule(depth, rule, family, base, target)
                    .map(|v| (rule, v))
            })
            .collect()
    }

    /// Fire a single `coe` rule, if its side conditions hold.
    pub fn try_coe_rule(
        &self,
        depth: usize,
        rule: CoeRule,
        family: &Closure,
        base: &RcValue,
        target: &RcValue,
    ) -> Option<RcValue> {
        match rule {
            CoeRule::Left => matches!(target.as_ref(), Value::Left).then(|| base.clone()),
            CoeRule::Constant => {
                let line = self.quote(depth + 1, &self.instantiate(depth, family));
                (!free_var_occurs(&line, 0)).then(|| base.clone())
            }
            CoeRule::Iso => {
                if !matches!(target.as_ref(), Value::Right) {
                    return None;
                }
                let line = self.instantiate(depth, family);
                let Value::Iso(iso) = line.as_ref() else {
                    return None;
                };
                if !iso.arg.is_var(Level(depth)) {
                    return None;
                }
                let iso = self.quote_iso(depth + 1, iso);
                let data_mentions_line = free_var_occurs(&iso.ty_a, 0)
                    || free_var_occurs(&iso.ty_b, 0)
                    || [&iso.fwd, &iso.bwd, &iso.sect_left, &iso.sect_right]
                        .iter()
                        .any(|b| free_var_occurs(&b.body, 1));
                if data_mentions_line {
                    return None;
                }
                // Rebuild the forward map without the line variable so no
                // reference to `Level(depth)` escapes.
                let fwd = subst(&iso.fwd.body, 1, &Term::Left);
                let env = Env::identity(depth).extend(base.clone());
                Some(self.eval(depth, &env, &fwd))
            }
        }
    }

    pub fn quote(&self, depth: usize, value: &Value) -> Term {
        match value {
            Value::Universe(l) => Term::Universe(*l),
            Value::Pi(a, b) => {
                Term::Pi(Rc::new(self.quote(depth, a)), self.quote_closure(depth, b))
            }
            Value::Lam(b) => Term::Lam(self.quote_closure(depth, b)),
            Value::Sigma(a, b) => {
                Term::Sigma(Rc::new(self.quote(depth, a)), self.quote_closure(depth, b))
            }
            Value::Pair(a, b) => Term::pair(self.quote(depth, a), self.quote(depth, b)),
            Value::UnitType => Term::UnitType,
            Value::UnitVal => Term::UnitVal,
            Value::BoolType => Term::BoolType,
            Value::True => Term::True,
            Value::False => Term::False,
            Value::Interval => Term::Interval,
            Value::Left => Term::Left,
            Value::Right => Term::Right,
            Value::Path(fam, l, r) => Term::Path(
                self.quote_closure(depth, fam),
                Rc::new(self.quote(depth, l)),
                Rc::new(self.quote(depth, r)),
            ),
            Value::PathLam(b) => Term::PathLam(self.quote_closure(depth, b)),
            Value::Iso(iso) => Term::Iso(Rc::new(self.quote_iso(depth, iso))),
            Value::Neutral(head, spine) => {
                let head = match head {
                    Head::Var(level) => Term::Var(index_of(depth, *level)),
                    Head::Coe(coe) => Term::Coe(
                        self.quote_closure(depth, &coe.family),
                        Rc::new(self.quote(depth, &coe.base)),
                        Rc::new(self.quote(depth, &coe.target)),
                    ),
                };
                spine.iter().fold(head, |acc, elim| match elim {
                    Elim::App(a) => Term::app(acc, self.quote(depth, a)),
                    Elim::Proj1 => Term::proj1(acc),
                    Elim::Proj2 => Term::proj2(acc),
                    Elim::BoolElim(m, t, f) => Term::BoolElim(
                        self.quote_closure(depth, m),
                        Rc::new(self.quote(depth, t)),
                        Rc::new(self.quote(depth, f)),
                        Rc::new(acc),
                    ),
                    Elim::At {
                        arg,
                        annot_left,
                        annot_right,
                    } => Term::at(
                        acc,
                        self.quote(depth, arg),
                        self.quote(depth, annot_left),
                        self.quote(depth, annot_right),
                    ),
                })
            }
        }
    }

    pub fn quote_closure(&self, depth: usize, closure: &Closure) -> Binder {
        let body = self.instantiate(depth, closure);
        Binder {
            name: closure.name().clone(),
            body: Rc::new(self.quote(depth + 1, &body)),
        }
    }

    fn quote_iso(&self, depth: usize, iso: &IsoValue) -> IsoTerm {
        IsoTerm {
            ty_a: Rc::new(self.quote(depth, &iso.ty_a)),
            ty_b: Rc::new(self.quote(depth, &iso.ty_b)),
            fwd: self.quote_closure(depth, &iso.fwd),
            bwd: self.quote_closure(depth, &iso.bwd),
            sect_left: self.quote_closure(depth, &iso.sect_left),
            sect_right: self.quote_closure(depth, &iso.sect_right),
            arg: Rc::new(self.quote(depth, &iso.arg)),
        }
    }

    /// Evaluate in a context of `depth` variables and read back.
    pub fn normalize_at(&self, depth: usize, term: &Term) -> Term {
        let value = self.eval(depth, &Env::identity(depth), term);
        self.quote(depth, &value)
    }

    pub fn normalize(&self, ctx: &Context, term: &Term) -> Term {
        self.normalize_at(ctx.len(), term)
    }
}

fn push_elim(head: &Head, spine: &[Elim], elim: Elim) -> RcValue {
    let mut spine = spine.to_vec();
    spine.push(elim);
    Rc::new(Value::Neutral(head.clone(), spine))
}

fn index_of(depth: usize, level: Level) -> usize {
    match depth.checked_sub(level.0 + 1) {
        Some(index) => index,
        None => panic!(
            "internal error: level {} out of scope at depth {depth}",
            level.0
        ),
    }
}

/// Normalize a term in a context.
pub fn normalize(globals: &Globals, ctx: &Context, term: &Term) -> Term {
    Nbe::new(globals).normalize(ctx, term)
}
