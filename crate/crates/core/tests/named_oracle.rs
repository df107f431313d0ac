//! De Bruijn operations against a named-variable reference implementation.
//!
//! The reference converts terms to named form, where bound variables get
//! globally unique names `b<n>` and the free variable with outer index `k` is
//! called `v<k>`. Shifting and substitution are then plain renaming and
//! replacement, with no index arithmetic and no capture to worry about.

use std::collections::BTreeSet;

use hti_core::syntax::{alpha_eq, free_var_occurs, shift, subst, Binder, IsoTerm, Term};
use proptest::prelude::*;
use std::rc::Rc;

/// A subterm position: whether it sits under the node's binder.
type Kids = Vec<(bool, Term)>;

fn children(t: &Term) -> Kids {
    let o = |t: &Rc<Term>| (false, (**t).clone());
    let b = |b: &Binder| (true, (*b.body).clone());
    match t {
        Term::Pi(a, c) | Term::Sigma(a, c) => vec![o(a), b(c)],
        Term::Lam(c) | Term::PathLam(c) => vec![b(c)],
        Term::App(x, y) | Term::Pair(x, y) => vec![o(x), o(y)],
        Term::Proj1(x) | Term::Proj2(x) => vec![o(x)],
        Term::BoolElim(m, x, y, s) => vec![b(m), o(x), o(y), o(s)],
        Term::Coe(f, x, i) | Term::Path(f, x, i) => vec![b(f), o(x), o(i)],
        Term::At {
            path,
            arg,
            annot_left,
            annot_right,
        } => vec![o(path), o(arg), o(annot_left), o(annot_right)],
        Term::Iso(iso) => vec![
            o(&iso.ty_a),
            o(&iso.ty_b),
            b(&iso.fwd),
            b(&iso.bwd),
            b(&iso.sect_left),
            b(&iso.sect_right),
            o(&iso.arg),
        ],
        _ => Vec::new(),
    }
}

/// `t` with its children replaced, in `children` order, and binders named `name`.
fn rebuild(t: &Term, kids: Vec<Term>, name: &str) -> Term {
    let mut it = kids.into_iter();
    let mut o = || Rc::new(it.next().expect("child"));
    match t {
        Term::Pi(..) => {
            let a = o();
            Term::Pi(a, Binder::new(name, (*o()).clone()))
        }
        Term::Sigma(..) => {
            let a = o();
            Term::Sigma(a, Binder::new(name, (*o()).clone()))
        }
        Term::Lam(_) => Term::Lam(Binder::new(name, (*o()).clone())),
        Term::PathLam(_) => Term::PathLam(Binder::new(name, (*o()).clone())),
        Term::App(..) => Term::App(o(), o()),
        Term::Pair(..) => Term::Pair(o(), o()),
        Term::Proj1(_) => Term::Proj1(o()),
        Term::Proj2(_) => Term::Proj2(o()),
        Term::BoolElim(..) => {
            let m = Binder::new(name, (*o()).clone());
            Term::BoolElim(m, o(), o(), o())
        }
        Term::Coe(..) => {
            let f = Binder::new(name, (*o()).clone());
            Term::Coe(f, o(), o())
        }
        Term::Path(..) => {
            let f = Binder::new(name, (*o()).clone());
            Term::Path(f, o(), o())
        }
        Term::At { .. } => Term::At {
            path: o(),
            arg: o(),
            annot_left: o(),
            annot_right: o(),
        },
        Term::Iso(_) => {
            let (ty_a, ty_b) = (o(), o());
            let mut bind = || Binder::new(name, (*o()).clone());
            Term::Iso(Rc::new(IsoTerm {
                ty_a,
                ty_b,
                fwd: bind(),
                bwd: bind(),
                sect_left: bind(),
                sect_right: bind(),
                arg: o(),
            }))
        }
        leaf => leaf.clone(),
    }
}

#[derive(Clone, Debug)]
enum Named {
    Var(String),
    /// A node with the shape of `template`, binding `binder` over the kids that
    /// sit under it.
    Node {
        template: Term,
        binder: String,
        kids: Vec<Named>,
    },
}

struct Namer(usize);

impl Namer {
    fn named(&mut self, t: &Term, scope: &mut Vec<String>) -> Named {
        if let Term::Var(i) = t {
            return Named::Var(match scope.len().checked_sub(i + 1) {
                Some(pos) => scope[pos].clone(),
                None => format!("v{}", i - scope.len()),
            });
        }
        self.0 += 1;
        let binder = format!("b{}", self.0);
        let kids = children(t)
            .into_iter()
            .map(|(bound, kid)| {
                if bound {
                    scope.push(binder.clone());
                }
                let n = self.named(&kid, scope);
                if bound {
                    scope.pop();
                }
                n
            })
            .collect();
        Named::Node {
            template: t.clone(),
            binder,
            kids,
        }
    }
}

fn to_named(t: &Term) -> Named {
    to_named_with(&mut Namer(0), t)
}

fn to_named_with(namer: &mut Namer, t: &Term) -> Named {
    namer.named(t, &mut Vec::new())
}

fn from_named(n: &Named, scope: &mut Vec<String>) -> Term {
    match n {
        Named::Var(x) => match scope.iter().rposition(|y| y == x) {
            Some(pos) => Term::Var(scope.len() - 1 - pos),
            None => {
                let k: usize = x
                    .strip_prefix('v')
                    .and_then(|k| k.parse().ok())
                    .expect("free name");
                Term::Var(k + scope.len())
            }
        },
        Named::Node {
            template,
            binder,
            kids,
        } => {
            let positions = children(template);
            let rebuilt = positions
                .iter()
                .zip(kids)
                .map(|((bound, _), kid)| {
                    if *bound {
                        scope.push(binder.clone());
                    }
                    let t = from_named(kid, scope);
                    if *bound {
                        scope.pop();
                    }
                    t
                })
                .collect();
            rebuild(template, rebuilt, binder)
        }
    }
}

fn to_term(n: &Named) -> Term {
    from_named(n, &mut Vec::new())
}

/// Replace free variables by name. Bound names are unique, so nothing is captured.
fn replace(n: &Named, f: &impl Fn(usize) -> Named) -> Named {
    match n {
        Named::Var(x) => match x.strip_prefix('v').and_then(|k| k.parse().ok()) {
            Some(k) => f(k),
            None => n.clone(),
        },
        Named::Node {
            template,
            binder,
            kids,
        } => Named::Node {
            template: template.clone(),
            binder: binder.clone(),
            kids: kids.iter().map(|k| replace(k, f)).collect(),
        },
    }
}

fn free_names(n: &Named, out: &mut BTreeSet<usize>) {
    match n {
        Named::Var(x) => {
            if let Some(k) = x.strip_prefix('v').and_then(|k| k.parse().ok()) {
                out.insert(k);
            }
        }
        Named::Node { kids, .. } => kids.iter().for_each(|k| free_names(k, out)),
    }
}

fn named_shift(t: &Term, cutoff: usize, amount: usize) -> Term {
    to_term(&replace(&to_named(t), &|k| {
        Named::Var(format!("v{}", if k >= cutoff { k + amount } else { k }))
    }))
}

fn named_subst(t: &Term, j: usize, s: &Term) -> Term {
    let mut namer = Namer(0);
    let t = to_named_with(&mut namer, t);
    let s = to_named_with(&mut namer, s);
    to_term(&replace(&t, &|k| match k.cmp(&j) {
        std::cmp::Ordering::Equal => s.clone(),
        std::cmp::Ordering::Greater => Named::Var(format!("v{}", k - 1)),
        std::cmp::Ordering::Less => Named::Var(format!("v{k}")),
    }))
}

fn named_free_vars(t: &Term) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    free_names(&to_named(t), &mut out);
    out
}

fn kernel_free_vars(t: &Term, bound: usize) -> BTreeSet<usize> {
    (0..bound).filter(|&j| free_var_occurs(t, j)).collect()
}

/// Random terms with indices below 6, bound or free, ignoring typing.
fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0usize..6).prop_map(Term::Var),
        Just(Term::Left),
        Just(Term::Right),
        Just(Term::True),
        Just(Term::BoolType),
        Just(Term::Interval),
        (0u8..3).prop_map(Term::Universe),
    ];
    leaf.prop_recursive(5, 48, 4, |inner| {
        let bind = |t: Term| Binder::new("x", t);
        prop_oneof![
            inner.clone().prop_map(move |b| Term::Lam(bind(b))),
            inner.clone().prop_map(move |b| Term::PathLam(bind(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(a, b)),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| Term::Pi(Rc::new(a), bind(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::pair(a, b)),
            inner.clone().prop_map(Term::proj2),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(move |(f, a, i)| Term::Coe(
                bind(f),
                Rc::new(a),
                Rc::new(i)
            )),
            (inner.clone(), inner.clone(), inner.clone(), inner.clone())
                .prop_map(|(p, i, l, r)| Term::at(p, i, l, r)),
            (inner.clone(), inner.clone(), inner.clone(), inner.clone()).prop_map(
                move |(m, t, f, s)| Term::BoolElim(bind(m), Rc::new(t), Rc::new(f), Rc::new(s))
            ),
            proptest::collection::vec(inner, 7).prop_map(move |k| Term::iso(
                k[0].clone(),
                k[1].clone(),
                bind(k[2].clone()),
                bind(k[3].clone()),
                bind(k[4].clone()),
                bind(k[5].clone()),
                k[6].clone(),
            )),
        ]
    })
}

#[test]
fn named_round_trip_is_identity() {
    let t = Term::lam("x", Term::app(Term::Var(0), Term::Var(3)));
    assert_eq!(to_term(&to_named(&t)), t);
}

#[test]
fn shift_example_under_binder() {
    let t = Term::lam("x", Term::Var(1));
    let expected = Term::lam("x", Term::Var(3));
    assert_eq!(named_shift(&t, 0, 2), expected);
    assert_eq!(shift(&t, 0, 2), expected);
}

#[test]
fn subst_example_into_coe_family() {
    // The family binds a variable, so its `Var 1` is the substituted index.
    let t = Term::coe("x", Term::Var(1), Term::Var(0), Term::Left);
    let expected = Term::coe("x", Term::True, Term::True, Term::Left);
    assert_eq!(named_subst(&t, 0, &Term::True), expected);
    assert_eq!(subst(&t, 0, &Term::True), expected);
}

#[test]
fn free_vars_of_iso_example() {
    let iso = Term::iso(
        Term::Var(3),
        Term::Var(4),
        Binder::new("x", Term::Var(0)),
        Binder::new("y", Term::Var(0)),
        Binder::new("x", Term::Var(0)),
        Binder::new("y", Term::Var(0)),
        Term::Var(2),
    );
    let named = named_free_vars(&iso);
    assert_eq!(named, BTreeSet::from([2, 3, 4]));
    assert_eq!(kernel_free_vars(&iso, 8), named);
    assert!(free_var_occurs(&iso, 2));
}

proptest! {
    #[test]
    fn shift_matches_renaming(t in arb_term(), cutoff in 0usize..4, amount in 0usize..4) {
        prop_assert_eq!(shift(&t, cutoff, amount as isize), named_shift(&t, cutoff, amount));
    }

    #[test]
    fn subst_matches_named_substitution(t in arb_term(), s in arb_term(), j in 0usize..4) {
        prop_assert_eq!(subst(&t, j, &s), named_subst(&t, j, &s));
    }

    #[test]
    fn free_vars_match(t in arb_term()) {
        prop_assert_eq!(kernel_free_vars(&t, 12), named_free_vars(&t));
    }

    #[test]
    fn shift_then_subst_cancels(t in arb_term(), s in arb_term()) {
        prop_assert_eq!(subst(&shift(&t, 0, 1), 0, &s), t);
    }

    #[test]
    fn substitution_introduces_only_free_vars_of_the_substitute(
        t in arb_term(), s in arb_term(), j in 0usize..4,
    ) {
        let before = kernel_free_vars(&t, 12);
        let mut expected: BTreeSet<usize> = before
            .iter()
            .filter(|&&k| k != j)
            .map(|&k| if k > j { k - 1 } else { k })
            .collect();
        if before.contains(&j) {
            expected.extend(kernel_free_vars(&s, 12));
        }
        prop_assert_eq!(kernel_free_vars(&subst(&t, j, &s), 20), expected);
    }

    #[test]
    fn alpha_eq_is_an_equivalence(t in arb_term(), u in arb_term()) {
        // Renaming every binder through the named form gives an alpha-variant.
        let renamed = to_term(&to_named(&t));
        prop_assert!(alpha_eq(&t, &t));
        prop_assert!(alpha_eq(&t, &renamed) && alpha_eq(&renamed, &t));
        prop_assert_eq!(alpha_eq(&t, &u), alpha_eq(&u, &t));
        if alpha_eq(&t, &renamed) && alpha_eq(&renamed, &u) {
            prop_assert!(alpha_eq(&t, &u));
        }
    }
}
