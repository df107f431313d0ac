//! Core syntax.
//!
//! Terms use de Bruijn indices: `Var(0)` is the innermost binder. Binders keep
//! a name [`Hint`] for printing, but hints never take part in equality, so the
//! derived `PartialEq` on [`Term`] is alpha-equivalence.

use std::cell::Cell;
use std::fmt;
use std::rc::Rc;

pub type RcTerm = Rc<Term>;

/// Highest universe level. The tower is `Type0 : Type1 : Type2`.
pub const MAX_UNIVERSE: u8 = 2;

/// A binder name used only for display. All hints compare equal.
#[derive(Clone)]
pub struct Hint(Rc<str>);

impl Hint {
    pub fn new(name: &str) -> Hint {
        Hint(Rc::from(name))
    }

    pub fn anon() -> Hint {
        Hint::new("_")
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl PartialEq for Hint {
    fn eq(&self, _: &Hint) -> bool {
        true
    }
}

impl Eq for Hint {}

impl fmt::Debug for Hint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Hint {
    fn from(name: &str) -> Hint {
        Hint::new(name)
    }
}

/// A term with one extra variable in scope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binder {
    pub name: Hint,
    pub body: RcTerm,
}

impl Binder {
    pub fn new(name: impl Into<Hint>, body: Term) -> Binder {
        Binder {
            name: name.into(),
            body: Rc::new(body),
        }
    }

    /// A binder whose body ignores the bound variable.
    pub fn constant(body: &Term) -> Binder {
        Binder::new(Hint::anon(), shift(body, 0, 1))
    }

    fn map(&self, f: impl FnOnce(&Term) -> Term) -> Binder {
        Binder {
            name: self.name.clone(),
            body: Rc::new(f(&self.body)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoTerm {
    pub ty_a: RcTerm,
    pub ty_b: RcTerm,
    /// `x. b` with `x : A`
    pub fwd: Binder,
    /// `y. a` with `y : B`
    pub bwd: Binder,
    /// `x. p` with `p : a[y := b] = x`
    pub sect_left: Binder,
    /// `y. q` with `q : b[x := a] = y`
    pub sect_right: Binder,
    pub arg: RcTerm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(usize),
    /// A top-level definition, unfolded during evaluation.
    Global(usize, Hint),
    Universe(u8),

    Pi(RcTerm, Binder),
    Lam(Binder),
    App(RcTerm, RcTerm),

    Sigma(RcTerm, Binder),
    Pair(RcTerm, RcTerm),
    Proj1(RcTerm),
    Proj2(RcTerm),

    UnitType,
    UnitVal,
    BoolType,
    True,
    False,
    /// `elimBool (x. motive) on_true on_false scrutinee`
    BoolElim(Binder, RcTerm, RcTerm, RcTerm),

    Interval,
    Left,
    Right,
    /// `coe (x. A) base target`
    Coe(Binder, RcTerm, RcTerm),
    /// `Path (x. A) left_end right_end`
    Path(Binder, RcTerm, RcTerm),
    PathLam(Binder),
    /// `path @_{left_annot, right_annot} arg`
    At {
        path: RcTerm,
        arg: RcTerm,
        annot_left: RcTerm,
        annot_right: RcTerm,
    },
    Iso(Rc<IsoTerm>),
}

impl Term {
    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Rc::new(fun), Rc::new(arg))
    }

    pub fn pi(name: &str, dom: Term, cod: Term) -> Term {
        Term::Pi(Rc::new(dom), Binder::new(name, cod))
    }

    pub fn lam(name: &str, body: Term) -> Term {
        Term::Lam(Binder::new(name, body))
    }

    pub fn sigma(name: &str, fst: Term, snd: Term) -> Term {
        Term::Sigma(Rc::new(fst), Binder::new(name, snd))
    }

    pub fn pair(fst: Term, snd: Term) -> Term {
        Term::Pair(Rc::new(fst), Rc::new(snd))
    }

    pub fn proj1(p: Term) -> Term {
        Term::Proj1(Rc::new(p))
    }

    pub fn proj2(p: Term) -> Term {
        Term::Proj2(Rc::new(p))
    }

    pub fn bool_elim(name: &str, motive: Term, on_true: Term, on_false: Term, scrut: Term) -> Term {
        Term::BoolElim(
            Binder::new(name, motive),
            Rc::new(on_true),
            Rc::new(on_false),
            Rc::new(scrut),
        )
    }

    pub fn coe(name: &str, family: Term, base: Term, target: Term) -> Term {
        Term::Coe(Binder::new(name, family), Rc::new(base), Rc::new(target))
    }

    pub fn path(name: &str, family: Term, left: Term, right: Term) -> Term {
        Term::Path(Binder::new(name, family), Rc::new(left), Rc::new(right))
    }

    /// The identity type `left = right` over a closed-in-context type.
    pub fn identity(ty: &Term, left: Term, right: Term) -> Term {
        Term::Path(Binder::constant(ty), Rc::new(left), Rc::new(right))
    }

    pub fn path_lam(name: &str, body: Term) -> Term {
        Term::PathLam(Binder::new(name, body))
    }

    /// `refl` at a term: a path abstraction ignoring its variable.
    pub fn refl(at: &Term) -> Term {
        Term::PathLam(Binder::constant(at))
    }

    pub fn at(path: Term, arg: Term, annot_left: Term, annot_right: Term) -> Term {
        Term::At {
            path: Rc::new(path),
            arg: Rc::new(arg),
            annot_left: Rc::new(annot_left),
            annot_right: Rc::new(annot_right),
        }
    }

    pub fn iso(
        ty_a: Term,
        ty_b: Term,
        fwd: Binder,
        bwd: Binder,
        sect_left: Binder,
        sect_right: Binder,
        arg: Term,
    ) -> Term {
        Term::Iso(Rc::new(IsoTerm {
            ty_a: Rc::new(ty_a),
            ty_b: Rc::new(ty_b),
            fwd,
            bwd,
            sect_left,
            sect_right,
            arg: Rc::new(arg),
        }))
    }

    /// Does the term contain an `iso` node? Globals are not looked through.
    pub fn mentions_iso(&self) -> bool {
        let mut found = false;
        self.visit(&mut |t| found |= matches!(t, Term::Iso(_)));
        found
    }

    /// Pre-order traversal of every subterm.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Var(_)
            | Term::Global(..)
            | Term::Universe(_)
            | Term::UnitType
            | Term::UnitVal
            | Term::BoolType
            | Term::True
            | Term::False
            | Term::Interval
            | Term::Left
            | Term::Right => {}
            Term::Pi(a, b) | Term::Sigma(a, b) => {
                a.visit(f);
                b.body.visit(f);
            }
            Term::Lam(b) | Term::PathLam(b) => b.body.visit(f),
            Term::App(a, b) | Term::Pair(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Term::Proj1(a) | Term::Proj2(a) => a.visit(f),
            Term::BoolElim(m, t, e, s) => {
                m.body.visit(f);
                t.visit(f);
                e.visit(f);
                s.visit(f);
            }
            Term::Coe(fam, a, i) => {
                fam.body.visit(f);
                a.visit(f);
                i.visit(f);
            }
            Term::Path(fam, l, r) => {
                fam.body.visit(f);
                l.visit(f);
                r.visit(f);
            }
            Term::At {
                path,
                arg,
                annot_left,
                annot_right,
            } => {
                path.visit(f);
                arg.visit(f);
                annot_left.visit(f);
                annot_right.visit(f);
            }
            Term::Iso(iso) => {
                iso.ty_a.visit(f);
                iso.ty_b.visit(f);
                iso.fwd.body.visit(f);
                iso.bwd.body.visit(f);
                iso.sect_left.body.visit(f);
                iso.sect_right.body.visit(f);
                iso.arg.visit(f);
            }
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

/// Rebuild a term, transforming variables. `on_var(depth, index)` is called
/// with the number of binders crossed so far.
fn map_vars(t: &Term, depth: usize, on_var: &impl Fn(usize, usize) -> Term) -> Term {
    let go = |t: &RcTerm| Rc::new(map_vars(t, depth, on_var));
    let under = |b: &Binder| b.map(|body| map_vars(body, depth + 1, on_var));
    match t {
        Term::Var(i) => on_var(depth, *i),
        Term::Global(..)
        | Term::Universe(_)
        | Term::UnitType
        | Term::UnitVal
        | Term::BoolType
        | Term::True
        | Term::False
        | Term::Interval
        | Term::Left
        | Term::Right => t.clone(),
        Term::Pi(a, b) => Term::Pi(go(a), under(b)),
        Term::Lam(b) => Term::Lam(under(b)),
        Term::App(f, a) => Term::App(go(f), go(a)),
        Term::Sigma(a, b) => Term::Sigma(go(a), under(b)),
        Term::Pair(a, b) => Term::Pair(go(a), go(b)),
        Term::Proj1(p) => Term::Proj1(go(p)),
        Term::Proj2(p) => Term::Proj2(go(p)),
        Term::BoolElim(m, tt, ff, s) => Term::BoolElim(under(m), go(tt), go(ff), go(s)),
        Term::Coe(fam, a, i) => Term::Coe(under(fam), go(a), go(i)),
        Term::Path(fam, l, r) => Term::Path(under(fam), go(l), go(r)),
        Term::PathLam(b) => Term::PathLam(under(b)),
        Term::At {
            path,
            arg,
            annot_left,
            annot_right,
        } => Term::At {
            path: go(path),
            arg: go(arg),
            annot_left: go(annot_left),
            annot_right: go(annot_right),
        },
        Term::Iso(iso) => Term::Iso(Rc::new(IsoTerm {
            ty_a: go(&iso.ty_a),
            ty_b: go(&iso.ty_b),
            fwd: under(&iso.fwd),
            bwd: under(&iso.bwd),
            sect_left: under(&iso.sect_left),
            sect_right: under(&iso.sect_right),
            arg: go(&iso.arg),
        })),
    }
}

/// Add `amount` to every index `>= cutoff`.
///
/// Panics if an index would become negative: that is a scoping bug in the
/// caller, never a user error.
pub fn shift(t: &Term, cutoff: usize, amount: isize) -> Term {
    if amount == 0 {
        return t.clone();
    }
    map_vars(t, 0, &|depth, i| {
        if i >= cutoff + depth {
            let shifted = i as isize + amount;
            assert!(
                shifted >= depth as isize,
                "internal error: de Bruijn shift underflow (index {i}, amount {amount})"
            );
            Term::Var(shifted as usize)
        } else {
            Term::Var(i)
        }
    })
}

/// Replace index `j` by `s` and close the gap: indices above `j` move down by one.
pub fn subst(t: &Term, j: usize, s: &Term) -> Term {
    map_vars(t, 0, &|depth, i| {
        if i == j + depth {
            shift(s, 0, depth as isize)
        } else if i > j + depth {
            Term::Var(i - 1)
        } else {
            Term::Var(i)
        }
    })
}

/// Instantiate a binder body with `s`.
pub fn instantiate(binder: &Binder, s: &Term) -> Term {
    subst(&binder.body, 0, s)
}

/// Is index `j` free in `t`?
pub fn free_var_occurs(t: &Term, j: usize) -> bool {
    fn go(t: &Term, j: usize) -> bool {
        let under = |b: &Binder| go(&b.body, j + 1);
        match t {
            Term::Var(i) => *i == j,
            Term::Global(..)
            | Term::Universe(_)
            | Term::UnitType
            | Term::UnitVal
            | Term::BoolType
            | Term::True
            | Term::False
            | Term::Interval
            | Term::Left
            | Term::Right => false,
            Term::Pi(a, b) | Term::Sigma(a, b) => go(a, j) || under(b),
            Term::Lam(b) | Term::PathLam(b) => under(b),
            Term::App(a, b) | Term::Pair(a, b) => go(a, j) || go(b, j),
            Term::Proj1(p) | Term::Proj2(p) => go(p, j),
            Term::BoolElim(m, tt, ff, s) => under(m) || go(tt, j) || go(ff, j) || go(s, j),
            Term::Coe(fam, a, i) => under(fam) || go(a, j) || go(i, j),
            Term::Path(fam, l, r) => under(fam) || go(l, j) || go(r, j),
            Term::At {
                path,
                arg,
                annot_left,
                annot_right,
            } => go(path, j) || go(arg, j) || go(annot_left, j) || go(annot_right, j),
            Term::Iso(iso) => {
                go(&iso.ty_a, j)
                    || go(&iso.ty_b, j)
                    || under(&iso.fwd)
                    || under(&iso.bwd)
                    || under(&iso.sect_left)
                    || under(&iso.sect_right)
                    || go(&iso.arg, j)
            }
        }
    }
    go(t, j)
}

/// Alpha-equivalence. With de Bruijn indices this is tree equality.
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    t == u
}

/// Is every index bound within `binders` enclosing binders?
pub fn is_scoped(t: &Term, binders: usize) -> bool {
    max_free_var(t).is_none_or(|i| i < binders)
}

/// The largest free index, if any variable is free.
pub fn max_free_var(t: &Term) -> Option<usize> {
    let max = Cell::new(None);
    map_vars(t, 0, &|depth, i| {
        if i >= depth {
            max.set(max.get().max(Some(i - depth)));
        }
        Term::Var(i)
    });
    max.get()
}

/// Typing context: a telescope of types with display names.
///
/// Entry `k` (counting from the outside) is well scoped in the first `k` entries.
#[derive(Clone, Debug, Default)]
pub struct Context {
    entries: Vec<(String, Term)>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, name: &str, ty: Term) {
        self.entries.push((name.to_owned(), ty));
    }

    pub fn pop(&mut self) -> Option<(String, Term)> {
        self.entries.pop()
    }

    pub fn with(mut self, name: &str, ty: Term) -> Context {
        self.push(name, ty);
        self
    }

    /// Entries from the outermost inward.
    pub fn entries(&self) -> &[(String, Term)] {
        &self.entries
    }

    /// Display names, innermost last.
    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_examples() {
        assert_eq!(shift(&Term::Var(0), 0, 1), Term::Var(1));
        let lam0 = Term::lam("x", Term::Var(0));
        assert_eq!(shift(&lam0, 0, 5), lam0);
        assert_eq!(
            shift(&Term::lam("x", Term::Var(1)), 0, 2),
            Term::lam("x", Term::Var(3))
        );
    }

    #[test]
    #[should_panic(expected = "underflow")]
    fn shift_underflow_is_internal_error() {
        shift(&Term::Var(0), 0, -1);
    }

    #[test]
    fn subst_examples() {
        assert_eq!(subst(&Term::Var(0), 0, &Term::Left), Term::Left);
        assert_eq!(
            subst(&Term::path_lam("x", Term::Var(1)), 0, &Term::Right),
            Term::path_lam("x", Term::Right)
        );
        assert_eq!(subst(&Term::Var(3), 1, &Term::True), Term::Var(2));
    }

    #[test]
    fn free_var_examples() {
        assert!(free_var_occurs(&Term::Var(0), 0));
        assert!(!free_var_occurs(&Term::lam("x", Term::Var(0)), 0));
        let iso = Term::iso(
            Term::Var(3),
            Term::Var(4),
            Binder::new("x", Term::Var(0)),
            Binder::new("y", Term::Var(0)),
            Binder::new("x", Term::Var(0)),
            Binder::new("y", Term::Var(0)),
            Term::Var(2),
        );
        assert!(free_var_occurs(&iso, 2));
        assert!(!free_var_occurs(&iso, 0));
    }

    #[test]
    fn hints_do_not_affect_equality() {
        assert!(alpha_eq(
            &Term::lam("x", Term::Var(0)),
            &Term::lam("y", Term::Var(0))
        ));
        assert!(!alpha_eq(&Term::Left, &Term::Right));
    }

    #[test]
    fn scoping() {
        assert!(is_scoped(&Term::lam("x", Term::Var(0)), 0));
        assert!(!is_scoped(&Term::lam("x", Term::Var(1)), 0));
        assert!(is_scoped(&Term::lam("x", Term::Var(1)), 1));
    }
}
