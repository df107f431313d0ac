//! Printing surface syntax, and reading core terms back into it.
//!
//! The printer inserts the minimum parentheses for the parser's precedence
//! levels, so `parse(print(s))` gives back `s` up to spans. Core terms are
//! printed with their `@` annotations elided; binders whose variable is unused
//! print as `_`, as a plain arrow, or as a plain product.

use std::collections::HashSet;

use crate::frontend::surface::{is_keyword, Declaration, Kind, Scoped, Surface, SurfaceIso};
use crate::syntax::{free_var_occurs, Binder, Term};

const EXPR: u8 = 0;
const PROD: u8 = 1;
const EQ: u8 = 2;
const AT: u8 = 3;
const APP: u8 = 4;
const ATOM: u8 = 5;

fn level(kind: &Kind) -> u8 {
    match kind {
        Kind::Lam(_) | Kind::Pi(..) => EXPR,
        Kind::Sigma(Some(_), ..) => EXPR,
        Kind::Sigma(None, ..) => PROD,
        Kind::Eq(..) => EQ,
        Kind::At(..) => AT,
        Kind::App(..)
        | Kind::Proj1(_)
        | Kind::Proj2(_)
        | Kind::BoolElim(..)
        | Kind::Coe(..)
        | Kind::Path(..)
        | Kind::PathLam(_)
        | Kind::Iso(_) => APP,
        _ => ATOM,
    }
}

pub fn print(s: &Surface) -> String {
    let mut out = String::new();
    write(s, EXPR, &mut out);
    out
}

pub fn print_decl(decl: &Declaration) -> String {
    format!(
        "def {} : {} =>\n  {}\n",
        decl.name,
        print(&decl.ty),
        print(&decl.body)
    )
}

pub fn print_decls(decls: &[Declaration]) -> String {
    decls.iter().map(print_decl).collect::<Vec<_>>().join("\n")
}

fn write(s: &Surface, min: u8, out: &mut String) {
    let parens = level(&s.kind) < min;
    if parens {
        out.push('(');
    }
    write_kind(&s.kind, out);
    if parens {
        out.push(')');
    }
}

fn write_scope(scope: &Scoped, out: &mut String) {
    out.push('(');
    out.push_str(&scope.name);
    out.push_str(". ");
    write(&scope.body, EXPR, out);
    out.push(')');
}

fn write_args(args: &[&Surface], out: &mut String) {
    for arg in args {
        out.push(' ');
        write(arg, ATOM, out);
    }
}

fn write_kind(kind: &Kind, out: &mut String) {
    match kind {
        Kind::Var(name) => out.push_str(name),
        Kind::Universe(l) => out.push_str(&format!("Type{l}")),
        Kind::Interval => out.push('I'),
        Kind::Left => out.push_str("left"),
        Kind::Right => out.push_str("right"),
        Kind::UnitType => out.push_str("Unit"),
        Kind::UnitVal => out.push_str("unit"),
        Kind::BoolType => out.push_str("Bool"),
        Kind::True => out.push_str("true"),
        Kind::False => out.push_str("false"),
        Kind::Refl => out.push_str("refl"),
        Kind::Lam(scope) => {
            out.push('\\');
            out.push_str(&scope.name);
            out.push_str(" => ");
            write(&scope.body, EXPR, out);
        }
        Kind::Pi(name, dom, cod) | Kind::Sigma(name, dom, cod) => {
            let op = if matches!(kind, Kind::Pi(..)) {
                "->"
            } else {
                "*"
            };
            match name {
                Some(name) => {
                    out.push_str(&format!("({name} : "));
                    write(dom, EXPR, out);
                    out.push_str(&format!(") {op} "));
                    write(cod, EXPR, out);
                }
                None if op == "->" => {
                    write(dom, PROD, out);
                    out.push_str(" -> ");
                    write(cod, EXPR, out);
                }
                None => {
                    write(dom, EQ, out);
                    out.push_str(" * ");
                    write(cod, PROD, out);
                }
            }
        }
        Kind::App(fun, arg) => {
            write(fun, APP, out);
            write_args(&[arg], out);
        }
        Kind::Pair(a, b) => {
            out.push('(');
            write(a, EXPR, out);
            out.push_str(", ");
            write(b, EXPR, out);
            out.push(')');
        }
        Kind::Proj1(p) => {
            out.push_str("proj1");
            write_args(&[p], out);
        }
        Kind::Proj2(p) => {
            out.push_str("proj2");
            write_args(&[p], out);
        }
        Kind::BoolElim(motive, t, f, s) => {
            out.push_str("elimBool ");
            write_scope(motive, out);
            write_args(&[t, f, s], out);
        }
        Kind::Coe(family, base, target) => {
            out.push_str("coe ");
            write_scope(family, out);
            write_args(&[base, target], out);
        }
        Kind::Path(family, l, r) => {
            out.push_str("Path ");
            write_scope(family, out);
            write_args(&[l, r], out);
        }
        Kind::PathLam(body) => {
            out.push_str("path ");
            write_scope(body, out);
        }
        Kind::At(p, i) => {
            write(p, AT, out);
            out.push_str(" @");
            write_args(&[i], out);
        }
        Kind::Eq(a, b) => {
            write(a, AT, out);
            out.push_str(" = ");
            write(b, AT, out);
        }
        Kind::Iso(iso) => {
            out.push_str("iso");
            write_args(&[&iso.ty_a, &iso.ty_b], out);
            for scope in [&iso.fwd, &iso.bwd, &iso.sect_left, &iso.sect_right] {
                out.push(' ');
                write_scope(scope, out);
            }
            write_args(&[&iso.arg], out);
        }
    }
}

/// Read a core term back into surface syntax. `names` are the display names
/// of the enclosing context, outermost first.
pub fn distill(names: &[String], term: &Term) -> Surface {
    let mut reserved = HashSet::new();
    term.visit(&mut |t| {
        if let Term::Global(_, name) = t {
            reserved.insert(name.as_str().to_owned());
        }
    });
    let mut d = Distiller {
        scope: names.to_vec(),
        reserved,
    };
    d.term(term)
}

/// Print a core term in surface syntax.
pub fn term_to_string(names: &[String], term: &Term) -> String {
    print(&distill(names, term))
}

struct Distiller {
    scope: Vec<String>,
    reserved: HashSet<String>,
}

impl Distiller {
    fn fresh(&self, hint: &str) -> String {
        let base = if hint.is_empty() || hint == "_" {
            "x"
        } else {
            hint
        };
        let taken = |n: &str| {
            is_keyword(n) || self.reserved.contains(n) || self.scope.iter().any(|s| s == n)
        };
        if !taken(base) {
            return base.to_owned();
        }
        (1..)
            .map(|k| format!("{base}{k}"))
            .find(|n| !taken(n))
            .expect("infinitely many candidate names")
    }

    /// Name the binder (`_` when unused) and distill its body.
    fn binder(&mut self, binder: &Binder) -> (Option<String>, Surface) {
        let used = free_var_occurs(&binder.body, 0);
        let name = if used {
            self.fresh(binder.name.as_str())
        } else {
            "_".to_owned()
        };
        self.scope.push(name.clone());
        let body = self.term(&binder.body);
        self.scope.pop();
        (used.then_some(name), body)
    }

    fn scoped(&mut self, binder: &Binder) -> Scoped {
        let (name, body) = self.binder(binder);
        Scoped::new(name.unwrap_or_else(|| "_".to_owned()), body)
    }

    fn boxed(&mut self, t: &Term) -> Box<Surface> {
        Box::new(self.term(t))
    }

    fn term(&mut self, t: &Term) -> Surface {
        let kind = match t {
            Term::Var(i) => {
                let name = self
                    .scope
                    .len()
                    .checked_sub(i + 1)
                    .map_or_else(|| format!("#{i}"), |l| self.scope[l].clone());
                Kind::Var(name)
            }
            Term::Global(_, name) => Kind::Var(name.as_str().to_owned()),
            Term::Universe(l) => Kind::Universe(*l),
            Term::Pi(dom, cod) => {
                let dom = self.boxed(dom);
                let (name, cod) = self.binder(cod);
                Kind::Pi(name, dom, Box::new(cod))
            }
            Term::Sigma(dom, cod) => {
                let dom = self.boxed(dom);
                let (name, cod) = self.binder(cod);
                Kind::Sigma(name, dom, Box::new(cod))
            }
            Term::Lam(body) => Kind::Lam(self.scoped(body)),
            Term::App(f, a) => Kind::App(self.boxed(f), self.boxed(a)),
            Term::Pair(a, b) => Kind::Pair(self.boxed(a), self.boxed(b)),
            Term::Proj1(p) => Kind::Proj1(self.boxed(p)),
            Term::Proj2(p) => Kind::Proj2(self.boxed(p)),
            Term::UnitType => Kind::UnitType,
            Term::UnitVal => Kind::UnitVal,
            Term::BoolType => Kind::BoolType,
            Term::True => Kind::True,
            Term::False => Kind::False,
            Term::BoolElim(m, tt, ff, s) => {
                let m = self.scoped(m);
                Kind::BoolElim(m, self.boxed(tt), self.boxed(ff), self.boxed(s))
            }
            Term::Interval => Kind::Interval,
            Term::Left => Kind::Left,
            Term::Right => Kind::Right,
            Term::Coe(fam, base, target) => {
                let fam = self.scoped(fam);
                Kind::Coe(fam, self.boxed(base), self.boxed(target))
            }
            Term::Path(fam, l, r) => {
                let fam = self.scoped(fam);
                Kind::Path(fam, self.boxed(l), self.boxed(r))
            }
            Term::PathLam(body) => Kind::PathLam(self.scoped(body)),
            Term::At { path, arg, .. } => Kind::At(self.boxed(path), self.boxed(arg)),
            Term::Iso(iso) => Kind::Iso(Box::new(SurfaceIso {
                ty_a: self.term(&iso.ty_a),
                ty_b: self.term(&iso.ty_b),
                fwd: self.scoped(&iso.fwd),
                bwd: self.scoped(&iso.bwd),
                sect_left: self.scoped(&iso.sect_left),
                sect_right: self.scoped(&iso.sect_right),
                arg: self.term(&iso.arg),
            })),
        };
        Surface::synth(kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parser::parse_term;

    fn round_trip(src: &str) -> String {
        print(&parse_term(src).unwrap())
    }

    #[test]
    fn prints_minimal_parentheses() {
        assert_eq!(round_trip("(A -> B) -> C"), "(A -> B) -> C");
        assert_eq!(round_trip("A -> (B -> C)"), "A -> B -> C");
        assert_eq!(round_trip("(f x) y"), "f x y");
        assert_eq!(round_trip("f (g x)"), "f (g x)");
        assert_eq!(round_trip("(p @ i) = (q @ j)"), "p @ i = q @ j");
        assert_eq!(round_trip("(\\x => x) y"), "(\\x => x) y");
        assert_eq!(round_trip("A * (B * C)"), "A * B * C");
        assert_eq!(round_trip("(A * B) * C"), "(A * B) * C");
        assert_eq!(round_trip("A * ((x : B) * C)"), "A * ((x : B) * C)");
    }

    #[test]
    fn distills_core_terms() {
        let names = vec![];
        let t = Term::lam(
            "e",
            Term::lam("x", Term::app(Term::proj1(Term::Var(1)), Term::Var(0))),
        );
        assert_eq!(term_to_string(&names, &t), "\\e => \\x => proj1 e x");
        let arrow = Term::pi("x", Term::BoolType, Term::BoolType);
        assert_eq!(term_to_string(&names, &arrow), "Bool -> Bool");
        let refl = Term::refl(&Term::Left);
        assert_eq!(term_to_string(&names, &refl), "path (_. left)");
    }

    #[test]
    fn distill_avoids_capture() {
        // \x => \x' => x, where both hints are "x".
        let t = Term::lam("x", Term::lam("x", Term::Var(1)));
        assert_eq!(term_to_string(&[], &t), "\\x => \\_ => x");
        let t = Term::lam("x", Term::lam("x", Term::app(Term::Var(1), Term::Var(0))));
        assert_eq!(term_to_string(&[], &t), "\\x => \\x1 => x x1");
        let names = vec!["x".to_owned()];
        assert_eq!(
            term_to_string(
                &names,
                &Term::lam("x", Term::app(Term::Var(1), Term::Var(0)))
            ),
            "\\x1 => x x1"
        );
    }
}
