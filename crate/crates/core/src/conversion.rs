//! Definitional equality.
//!
//! Conversion is untyped. Canonical forms are compared structurally and
//! neutrals spine by spine. When an introduction form meets a neutral the
//! neutral is eta-expanded: functions by application to a fresh variable, pairs
//! by projections, and paths by application to a fresh interval variable, with
//! endpoint annotations taken from the path abstraction.

use std::rc::Rc;

use crate::globals::Globals;
use crate::nbe::{Closure, Elim, Env, Head, Level, Nbe, Value};
use crate::syntax::{Context, Term};

impl Nbe<'_> {
    pub fn convert(&self, depth: usize, left: &Value, right: &Value) -> bool {
        use Value as V;
        match (left, right) {
            (V::Universe(a), V::Universe(b)) => a == b,
            (V::UnitType, V::UnitType)
            | (V::UnitVal, V::UnitVal)
            | (V::BoolType, V::BoolType)
            | (V::True, V::True)
            | (V::False, V::False)
            | (V::Interval, V::Interval)
            | (V::Left, V::Left)
            | (V::Right, V::Right) => true,

            (V::Pi(a1, b1), V::Pi(a2, b2)) | (V::Sigma(a1, b1), V::Sigma(a2, b2)) => {
                self.convert(depth, a1, a2) && self.convert_closures(depth, b1, b2)
            }
            (V::Lam(b1), V::Lam(b2)) | (V::PathLam(b1), V::PathLam(b2)) => {
                self.convert_closures(depth, b1, b2)
            }
            (V::Lam(body), other @ V::Neutral(..)) | (other @ V::Neutral(..), V::Lam(body)) => {
                let x = Value::var(Level(depth));
                let applied = self.apply(depth + 1, Rc::new(other.clone()), x);
                self.convert(depth + 1, &self.instantiate(depth, body), &applied)
            }
            (V::Pair(a1, b1), V::Pair(a2, b2)) => {
                self.convert(depth, a1, a2) && self.convert(depth, b1, b2)
            }
            (V::Pair(a, b), other @ V::Neutral(..)) | (other @ V::Neutral(..), V::Pair(a, b)) => {
                let other = Rc::new(other.clone());
                self.convert(depth, a, &self.proj1(other.clone()))
                    && self.convert(depth, b, &self.proj2(other))
            }
            (V::PathLam(body), other @ V::Neutral(..))
            | (other @ V::Neutral(..), V::PathLam(body)) => {
                let annot_left = self.apply_closure(depth, body, Rc::new(V::Left));
                let annot_right = self.apply_closure(depth, body, Rc::new(V::Right));
                let i = Value::var(Level(depth));
                let applied = self.at(
                    depth + 1,
                    Rc::new(other.clone()),
                    i,
                    annot_left,
                    annot_right,
                );
                self.convert(depth + 1, &self.instantiate(depth, body), &applied)
            }
            (V::Path(f1, l1, r1), V::Path(f2, l2, r2)) => {
                self.convert_closures(depth, f1, f2)
                    && self.convert(depth, l1, l2)
                    && self.convert(depth, r1, r2)
            }
            (V::Iso(i1), V::Iso(i2)) => {
                self.convert(depth, &i1.ty_a, &i2.ty_a)
                    && self.convert(depth, &i1.ty_b, &i2.ty_b)
                    && self.convert_closures(depth, &i1.fwd, &i2.fwd)
                    && self.convert_closures(depth, &i1.bwd, &i2.bwd)
                    && self.convert_closures(depth, &i1.sect_left, &i2.sect_left)
                    && self.convert_closures(depth, &i1.sect_right, &i2.sect_right)
                    && self.convert(depth, &i1.arg, &i2.arg)
            }
            (V::Neutral(h1, s1), V::Neutral(h2, s2)) => {
                self.convert_heads(depth, h1, h2)
                    && s1.len() == s2.len()
                    && s1
                        .iter()
                        .zip(s2)
                        .all(|(e1, e2)| self.convert_elims(depth, e1, e2))
            }
            _ => false,
        }
    }

    fn convert_closures(&self, depth: usize, c1: &Closure, c2: &Closure) -> bool {
        self.convert(
            depth + 1,
            &self.instantiate(depth, c1),
            &self.instantiate(depth, c2),
        )
    }

    fn convert_heads(&self, depth: usize, h1: &Head, h2: &Head) -> bool {
        match (h1, h2) {
            (Head::Var(l1), Head::Var(l2)) => l1 == l2,
            (Head::Coe(c1), Head::Coe(c2)) => {
                self.convert_closures(depth, &c1.family, &c2.family)
                    && self.convert(depth, &c1.base, &c2.base)
                    && self.convert(depth, &c1.target, &c2.target)
            }
            _ => false,
        }
    }

    fn convert_elims(&self, depth: usize, e1: &Elim, e2: &Elim) -> bool {
        match (e1, e2) {
            (Elim::App(a1), Elim::App(a2)) => self.convert(depth, a1, a2),
            (Elim::Proj1, Elim::Proj1) | (Elim::Proj2, Elim::Proj2) => true,
            (Elim::BoolElim(m1, t1, f1), Elim::BoolElim(m2, t2, f2)) => {
                self.convert_closures(depth, m1, m2)
                    && self.convert(depth, t1, t2)
                    && self.convert(depth, f1, f2)
            }
            (
                Elim::At {
                    arg: a1,
                    annot_left: l1,
                    annot_right: r1,
                },
                Elim::At {
                    arg: a2,
                    annot_left: l2,
                    annot_right: r2,
                },
            ) => {
                self.convert(depth, a1, a2)
                    && self.convert(depth, l1, l2)
                    && self.convert(depth, r1, r2)
            }
            _ => false,
        }
    }

    /// Evaluate both terms in the identity environment of `depth` variables
    /// and compare.
    pub fn convert_terms_at(&self, depth: usize, t: &Term, u: &Term) -> bool {
        let env = Env::identity(depth);
        let tv = self.eval(depth, &env, t);
        let uv = self.eval(depth, &env, u);
        self.convert(depth, &tv, &uv)
    }
}

/// Are `t` and `u` definitionally equal in `ctx`?
pub fn convert_terms(globals: &Globals, ctx: &Context, t: &Term, u: &Term) -> bool {
    Nbe::new(globals).convert_terms_at(ctx.len(), t, u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conv(depth: usize, t: &Term, u: &Term) -> bool {
        let g = Globals::new();
        Nbe::new(&g).convert_terms_at(depth, t, u)
    }

    #[test]
    fn rule_examples() {
        assert!(conv(
            0,
            &Term::coe("x", Term::BoolType, Term::True, Term::Left),
            &Term::True
        ));
        let at_right = Term::at(
            Term::path_lam("x", Term::Var(0)),
            Term::Right,
            Term::Left,
            Term::Right,
        );
        assert!(conv(0, &at_right, &Term::Right));
        assert!(!conv(0, &Term::True, &Term::False));
        assert!(conv(0, &Term::Left, &Term::Left));
        assert!(!conv(0, &Term::Left, &Term::Right));
    }

    #[test]
    fn path_eta() {
        // p : Path(_. Bool, true, false) at index 0
        let eta = Term::path_lam(
            "x",
            Term::at(Term::Var(1), Term::Var(0), Term::True, Term::False),
        );
        assert!(conv(1, &Term::Var(0), &eta));
        assert!(conv(1, &eta, &Term::Var(0)));
    }

    #[test]
    fn function_and_pair_eta() {
        let eta = Term::lam("x", Term::app(Term::Var(1), Term::Var(0)));
        assert!(conv(1, &eta, &Term::Var(0)));
        let pair = Term::pair(Term::proj1(Term::Var(0)), Term::proj2(Term::Var(0)));
        assert!(conv(1, &Term::Var(0), &pair));
        assert!(!conv(2, &Term::Var(0), &Term::Var(1)));
    }
}
