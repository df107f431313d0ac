//! A finite-set model with a one-point interval.
//!
//! Types denote finite sets, the interval denotes a single point, and a path
//! type is a singleton when its endpoints denote the same element and empty
//! otherwise. In this model `left` and `right` coincide, so it validates the K
//! axiom and cannot distinguish terms the kernel keeps apart. It can catch
//! unsound definitional equalities: whenever the kernel identifies two terms,
//! their denotations must agree.
//!
//! `iso` has no interpretation here, since it would force `A` and `B` to be
//! the same set. The universe is a bounded enumeration of non-dependent codes.
//! The evaluator shares no code with the kernel's evaluator or checker.

use std::cell::{Cell, RefCell};
use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use crate::diagnostic::{Code, Diagnostic};
use crate::globals::Globals;
use crate::syntax::Term;

/// The denotation of a type: a finite set, described structurally.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeDenotation {
    Unit,
    Bool,
    /// The one-point interval.
    Interval,
    /// A singleton or the empty set, over the set its endpoints live in.
    Path {
        ty: Box<TypeDenotation>,
        inhabited: bool,
    },
    /// Dependent functions; `cod[k]` is the codomain at the `k`-th element of `dom`.
    Pi {
        dom: Box<TypeDenotation>,
        cod: Vec<TypeDenotation>,
    },
    Sigma {
        fst: Box<TypeDenotation>,
        snd: Vec<TypeDenotation>,
    },
    /// A bounded enumeration of codes.
    Universe(u8),
}

/// The denotation of an element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Denotation {
    /// The point of the interval, of `Unit`, and of inhabited path types.
    Star,
    /// A boolean: `false` is 0, `true` is 1.
    Elem(u8),
    /// A function as its graph, in the domain's enumeration order.
    Fun(Vec<(Denotation, Denotation)>),
    Pair(Box<Denotation>, Box<Denotation>),
    /// A type, as an element of a universe.
    Code(TypeDenotation),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    /// The term mentions `iso`, which the model does not interpret.
    #[error("iso is outside the modelled fragment")]
    Iso,
    /// Enumeration exceeded the configured bound.
    #[error("enumeration bound exceeded: {0}")]
    Bound(String),
    /// The input is not well typed; it violates the oracle's precondition.
    #[error("ill-typed input: {0}")]
    IllTyped(String),
}

impl OracleError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        let code = match self {
            OracleError::Iso => Code::OracleIso,
            OracleError::Bound(_) => Code::OracleBound,
            OracleError::IllTyped(_) => Code::Internal,
        };
        Diagnostic::error(code, self.to_string())
    }
}

type Res<T> = Result<T, OracleError>;

/// Limits keeping the model finite.
#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Maximum nesting of type formers in universe codes; base types have depth 1.
    pub code_depth: usize,
    /// Maximum number of elements materialized while denoting one term.
    pub budget: usize,
}

impl Default for OracleConfig {
    fn default() -> OracleConfig {
        OracleConfig {
            code_depth: 2,
            budget: 200_000,
        }
    }
}

pub struct Oracle<'g> {
    globals: &'g Globals,
    config: OracleConfig,
    spent: Cell<usize>,
    elements: RefCell<HashMap<TypeDenotation, Rc<Vec<Denotation>>>>,
    global_cache: RefCell<HashMap<usize, (Denotation, TypeDenotation)>>,
}

/// Environment entries: an element and the set it belongs to, innermost last.
type Env = Vec<(Denotation, TypeDenotation)>;

fn ill_typed(what: &str) -> OracleError {
    OracleError::IllTyped(what.to_owned())
}

impl<'g> Oracle<'g> {
    pub fn new(globals: &'g Globals) -> Oracle<'g> {
        Oracle::with_config(globals, OracleConfig::default())
    }

    pub fn with_config(globals: &'g Globals, config: OracleConfig) -> Oracle<'g> {
        Oracle {
            globals,
            config,
            spent: Cell::new(0),
            elements: RefCell::new(HashMap::new()),
            global_cache: RefCell::new(HashMap::new()),
        }
    }

    fn spend(&self, n: usize) -> Res<()> {
        let spent = self.spent.get().saturating_add(n);
        self.spent.set(spent);
        if spent > self.config.budget {
            return Err(OracleError::Bound(format!(
                "more than {} elements",
                self.config.budget
            )));
        }
        Ok(())
    }

    /// Reset the budget; each top-level query gets a fresh one.
    fn fresh_budget(&self) {
        self.spent.set(0);
    }

    /// All elements of a set, in a fixed order.
    pub fn elements(&self, ty: &TypeDenotation) -> Res<Rc<Vec<Denotation>>> {
        if let Some(cached) = self.elements.borrow().get(ty) {
            return Ok(cached.clone());
        }
        let elems = match ty {
            TypeDenotation::Unit | TypeDenotation::Interval => vec![Denotation::Star],
            TypeDenotation::Bool => vec![Denotation::Elem(0), Denotation::Elem(1)],
            TypeDenotation::Path { inhabited, .. } => {
                if *inhabited {
                    vec![Denotation::Star]
                } else {
                    vec![]
                }
            }
            TypeDenotation::Pi { dom, cod } => {
                let dom = self.elements(dom)?;
                let mut graphs: Vec<Vec<(Denotation, Denotation)>> = vec![vec![]];
                for (x, c) in dom.iter().zip(cod) {
                    let outs = self.elements(c)?;
                    self.spend(graphs.len().saturating_mul(outs.len()))?;
                    graphs = graphs
                        .into_iter()
                        .flat_map(|g| {
                            outs.iter().map(move |y| {
                                let mut g = g.clone();
                                g.push((x.clone(), y.clone()));
                                g
                            })
                        })
                        .collect();
                }
                graphs.into_iter().map(Denotation::Fun).collect()
            }
            TypeDenotation::Sigma { fst, snd } => {
                let fsts = self.elements(fst)?;
                let mut out = Vec::new();
                for (a, s) in fsts.iter().zip(snd) {
                    let bs = self.elements(s)?;
                    self.spend(bs.len())?;
                    out.extend(
                        bs.iter()
                            .map(|b| Denotation::Pair(Box::new(a.clone()), Box::new(b.clone()))),
                    );
                }
                out
            }
            TypeDenotation::Universe(level) => self
                .codes(*level)?
                .into_iter()
                .map(Denotation::Code)
                .collect(),
        };
        self.spend(elems.len())?;
        let elems = Rc::new(elems);
        self.elements.borrow_mut().insert(ty.clone(), elems.clone());
        Ok(elems)
    }

    /// Codes of a universe: base sets, smaller universes and path types over
    /// them, closed under non-dependent `->` and `*` up to the depth bound.
    pub fn codes(&self, level: u8) -> Res<Vec<TypeDenotation>> {
        let mut bases = vec![
            TypeDenotation::Unit,
            TypeDenotation::Bool,
            TypeDenotation::Interval,
        ];
        bases.extend((0..level).map(TypeDenotation::Universe));
        let paths: Vec<_> = bases
            .iter()
            .flat_map(|b| {
                [true, false].map(|inhabited| TypeDenotation::Path {
                    ty: Box::new(b.clone()),
                    inhabited,
                })
            })
            .collect();
        bases.extend(paths);
        let mut codes = bases.clone();
        for _ in 1..self.config.code_depth {
            let mut next = bases.clone();
            for a in &codes {
                for b in &codes {
                    self.spend(2)?;
                    let n = self.elements(a)?.len();
                    next.push(TypeDenotation::Pi {
                        dom: Box::new(a.clone()),
                        cod: vec![b.clone(); n],
                    });
                    next.push(TypeDenotation::Sigma {
                        fst: Box::new(a.clone()),
                        snd: vec![b.clone(); n],
                    });
                }
            }
            codes = next;
        }
        Ok(codes)
    }

    fn position(&self, ty: &TypeDenotation, x: &Denotation) -> Res<usize> {
        self.elements(ty)?
            .iter()
            .position(|e| e == x)
            .ok_or_else(|| OracleError::Bound("element outside its enumerated set".into()))
    }

    /// Denote a closed type.
    pub fn denote_type(&self, term: &Term) -> Res<TypeDenotation> {
        self.fresh_budget();
        self.ty(&Vec::new(), term)
    }

    /// Denote a closed term at a closed type.
    pub fn denote(&self, term: &Term, ty: &Term) -> Res<Denotation> {
        self.fresh_budget();
        let env = Vec::new();
        let ty = self.ty(&env, ty)?;
        self.check(&env, term, &ty)
    }

    /// Denote a term in an environment of element denotations.
    pub fn denote_in(
        &self,
        env: &[(Denotation, TypeDenotation)],
        term: &Term,
        ty: &TypeDenotation,
    ) -> Res<Denotation> {
        self.fresh_budget();
        self.check(&env.to_vec(), term, ty)
    }

    fn ty(&self, env: &Env, term: &Term) -> Res<TypeDenotation> {
        match self.infer(env, term)?.0 {
            Denotation::Code(ty) => Ok(ty),
            _ => Err(ill_typed("expected a type")),
        }
    }

    fn extend(env: &Env, x: Denotation, ty: TypeDenotation) -> Env {
        let mut env = env.clone();
        env.push((x, ty));
        env
    }

    fn universe_level(&self, env: &Env, term: &Term) -> Res<u8> {
        match self.infer(env, term)?.1 {
            TypeDenotation::Universe(l) => Ok(l),
            _ => Err(ill_typed("expected a type")),
        }
    }

    /// Denote `x : dom ⊢ body` at every element of `dom`.
    fn family(&self, env: &Env, dom: &TypeDenotation, body: &Term) -> Res<Vec<TypeDenotation>> {
        self.elements(dom)?
            .iter()
            .map(|x| self.ty(&Oracle::extend(env, x.clone(), dom.clone()), body))
            .collect()
    }

    fn global(&self, id: usize) -> Res<(Denotation, TypeDenotation)> {
        if let Some(hit) = self.global_cache.borrow().get(&id) {
            return Ok(hit.clone());
        }
        let entry = self
            .globals
            .get(id)
            .ok_or_else(|| ill_typed("unknown definition"))?;
        let env = Vec::new();
        let ty = self.ty(&env, &entry.ty)?;
        let den = self.check(&env, &entry.body, &ty)?;
        self.global_cache
            .borrow_mut()
            .insert(id, (den.clone(), ty.clone()));
        Ok((den, ty))
    }

    fn infer(&self, env: &Env, term: &Term) -> Res<(Denotation, TypeDenotation)> {
        use Denotation as D;
        use TypeDenotation as T;
        self.spend(1)?;
        let code = |ty: T, level: u8| Ok((D::Code(ty), T::Universe(level)));
        match term {
            Term::Var(i) => env
                .len()
                .checked_sub(i + 1)
                .map(|l| env[l].clone())
                .ok_or_else(|| ill_typed("unbound variable")),
            Term::Global(id, _) => self.global(*id),
            Term::Universe(l) => code(T::Universe(*l), l + 1),
            Term::UnitType => code(T::Unit, 0),
            Term::BoolType => code(T::Bool, 0),
            Term::Interval => code(T::Interval, 0),
            Term::UnitVal => Ok((D::Star, T::Unit)),
            Term::True => Ok((D::Elem(1), T::Bool)),
            Term::False => Ok((D::Elem(0), T::Bool)),
            Term::Left | Term::Right => Ok((D::Star, T::Interval)),
            Term::Pi(dom, cod) | Term::Sigma(dom, cod) => {
                let dom_level = self.universe_level(env, dom)?;
                let dom = self.ty(env, dom)?;
                let cods = self.family(env, &dom, &cod.body)?;
                let cod_level = match self.elements(&dom)?.first() {
                    Some(x) => self
                        .universe_level(&Oracle::extend(env, x.clone(), dom.clone()), &cod.body)?,
                    None => dom_level,
                };
                let ty = if matches!(term, Term::Pi(..)) {
                    T::Pi {
                        dom: Box::new(dom),
                        cod: cods,
                    }
                } else {
                    T::Sigma {
                        fst: Box::new(dom),
                        snd: cods,
                    }
                };
                code(ty, dom_level.max(cod_level))
            }
            Term::App(f, a) => {
                let (f, f_ty) = self.infer(env, f)?;
                let (D::Fun(graph), T::Pi { dom, cod }) = (f, f_ty) else {
                    return Err(ill_typed("application of a non-function"));
                };
                let a = self.check(env, a, &dom)?;
                let k = self.position(&dom, &a)?;
                Ok((graph[k].1.clone(), cod[k].clone()))
            }
            Term::Proj1(p) | Term::Proj2(p) => {
                let (p, p_ty) = self.infer(env, p)?;
                let (D::Pair(a, b), T::Sigma { fst, snd }) = (p, p_ty) else {
                    return Err(ill_typed("projection from a non-pair"));
                };
                if matches!(term, Term::Proj1(_)) {
                    Ok((*a, *fst))
                } else {
                    let k = self.position(&fst, &a)?;
                    Ok((*b, snd[k].clone()))
                }
            }
            Term::BoolElim(motive, on_true, on_false, scrut) => {
                let s = self.check(env, scrut, &T::Bool)?;
                let ty = self.ty(&Oracle::extend(env, s.clone(), T::Bool), &motive.body)?;
                let branch = if s == D::Elem(1) { on_true } else { on_false };
                Ok((self.check(env, branch, &ty)?, ty))
            }
            Term::Coe(family, base, target) => {
                self.check(env, target, &T::Interval)?;
                let ty = self.ty(&Oracle::extend(env, D::Star, T::Interval), &family.body)?;
                Ok((self.check(env, base, &ty)?, ty))
            }
            Term::Path(family, left, right) => {
                let line = Oracle::extend(env, D::Star, T::Interval);
                let level = self.universe_level(&line, &family.body)?;
                let ty = self.ty(&line, &family.body)?;
                let l = self.check(env, left, &ty)?;
                let r = self.check(env, right, &ty)?;
                code(
                    T::Path {
                        ty: Box::new(ty),
                        inhabited: l == r,
                    },
                    level,
                )
            }
            Term::PathLam(body) => {
                let line = Oracle::extend(env, D::Star, T::Interval);
                let (_, ty) = self.infer(&line, &body.body)?;
                Ok((
                    D::Star,
                    T::Path {
                        ty: Box::new(ty),
                        inhabited: true,
                    },
                ))
            }
            Term::At {
                path,
                arg,
                annot_left,
                ..
            } => {
                let (_, path_ty) = self.infer(env, path)?;
                let T::Path { ty, .. } = path_ty else {
                    return Err(ill_typed("`@` on a non-path"));
                };
                self.check(env, arg, &T::Interval)?;
                Ok((self.check(env, annot_left, &ty)?, *ty))
            }
            Term::Iso(_) => Err(OracleError::Iso),
            Term::Lam(_) | Term::Pair(..) => {
                Err(ill_typed("uninferable term in inference position"))
            }
        }
    }

    fn check(&self, env: &Env, term: &Term, ty: &TypeDenotation) -> Res<Denotation> {
        use TypeDenotation as T;
        match (term, ty) {
            (Term::Lam(body), T::Pi { dom, cod }) => {
                let dom_elems = self.elements(dom)?;
                self.spend(dom_elems.len())?;
                let graph = dom_elems
                    .iter()
                    .zip(cod)
                    .map(|(x, c)| {
                        let env = Oracle::extend(env, x.clone(), (**dom).clone());
                        Ok((x.clone(), self.check(&env, &body.body, c)?))
                    })
                    .collect::<Res<Vec<_>>>()?;
                Ok(Denotation::Fun(graph))
            }
            (Term::Pair(a, b), T::Sigma { fst, snd }) => {
                let a = self.check(env, a, fst)?;
                let k = self.position(fst, &a)?;
                let b = self.check(env, b, &snd[k])?;
                Ok(Denotation::Pair(Box::new(a), Box::new(b)))
            }
            (Term::PathLam(body), T::Path { ty, .. }) => {
                let line = Oracle::extend(env, Denotation::Star, T::Interval);
                self.check(&line, &body.body, ty)?;
                Ok(Denotation::Star)
            }
            (Term::Lam(_) | Term::Pair(..), _) => {
                Err(ill_typed("introduction form at the wrong type"))
            }
            _ => Ok(self.infer(env, term)?.0),
        }
    }
}

/// The outcome for one pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Agree,
    Disagree,
    SkipIso,
    SkipBound,
}

/// A kernel-convertible pair of closed terms and their common type.
#[derive(Clone, Debug)]
pub struct OraclePair {
    pub left: Term,
    pub right: Term,
    pub ty: Term,
}

#[derive(Clone, Debug, Default)]
pub struct OracleReport {
    pub verdicts: Vec<Verdict>,
}

impl OracleReport {
    pub fn count(&self, verdict: &Verdict) -> usize {
        self.verdicts.iter().filter(|v| *v == verdict).count()
    }

    pub fn ok(&self) -> usize {
        self.count(&Verdict::Agree)
    }

    pub fn disagreements(&self) -> usize {
        self.count(&Verdict::Disagree)
    }

    pub fn skipped(&self) -> usize {
        self.count(&Verdict::SkipIso) + self.count(&Verdict::SkipBound)
    }

    pub fn summary(&self) -> String {
        format!(
            "oracle: {} ok, {} disagree, {} skipped",
            self.ok(),
            self.disagreements(),
            self.skipped()
        )
    }

    /// One line per pair, then the summary.
    pub fn lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .verdicts
            .iter()
            .enumerate()
            .map(|(i, v)| match v {
                Verdict::Agree => "OK".to_owned(),
                Verdict::Disagree => format!("DISAGREE {i}"),
                Verdict::SkipIso => format!("SKIP-ISO {i}"),
                Verdict::SkipBound => format!("SKIP-BOUND {i}"),
            })
            .collect();
        lines.push(self.summary());
        lines
    }
}

impl Oracle<'_> {
    /// Compare the denotations of both sides. Fragment violations are skips;
    /// an ill-typed pair counts as a disagreement, since it can only come
    /// from a kernel that accepted it.
    pub fn judge(&self, pair: &OraclePair) -> Verdict {
        let mut seen = HashSet::new();
        if [&pair.left, &pair.right, &pair.ty]
            .into_iter()
            .any(|t| self.mentions_iso(t, &mut seen))
        {
            return Verdict::SkipIso;
        }
        let both = self.denote(&pair.left, &pair.ty).and_then(|l| {
            let r = self.denote(&pair.right, &pair.ty)?;
            Ok(l == r)
        });
        match both {
            Ok(true) => Verdict::Agree,
            Ok(false) | Err(OracleError::IllTyped(_)) => Verdict::Disagree,
            Err(OracleError::Iso) => Verdict::SkipIso,
            Err(OracleError::Bound(_)) => Verdict::SkipBound,
        }
    }
}

impl Oracle<'_> {
    /// Whether `iso` occurs in `term` or in a definition it refers to.
    fn mentions_iso(&self, term: &Term, seen: &mut HashSet<usize>) -> bool {
        match term {
            Term::Iso(_) => true,
            Term::Global(id, _) => {
                seen.insert(*id)
                    && self.globals.get(*id).is_some_and(|e| {
                        self.mentions_iso(&e.ty, seen) || self.mentions_iso(&e.body, seen)
                    })
            }
            Term::Var(_)
            | Term::Universe(_)
            | Term::UnitType
            | Term::UnitVal
            | Term::BoolType
            | Term::True
            | Term::False
            | Term::Interval
            | Term::Left
            | Term::Right => false,
            Term::Pi(a, b) | Term::Sigma(a, b) => {
                self.mentions_iso(a, seen) || self.mentions_iso(&b.body, seen)
            }
            Term::Lam(b) | Term::PathLam(b) => self.mentions_iso(&b.body, seen),
            Term::App(a, b) | Term::Pair(a, b) => {
                self.mentions_iso(a, seen) || self.mentions_iso(b, seen)
            }
            Term::Proj1(p) | Term::Proj2(p) => self.mentions_iso(p, seen),
            Term::BoolElim(m, t, f, s) => [&m.body, t, f, s]
                .into_iter()
                .any(|t| self.mentions_iso(t, seen)),
            Term::Coe(fam, a, b) | Term::Path(fam, a, b) => [&fam.body, a, b]
                .into_iter()
                .any(|t| self.mentions_iso(t, seen)),
            Term::At {
                path,
                arg,
                annot_left,
                annot_right,
            } => [path, arg, annot_left, annot_right]
                .into_iter()
                .any(|t| self.mentions_iso(t, seen)),
        }
    }
}

/// Judge every pair.
pub fn oracle_check(globals: &Globals, pairs: &[OraclePair]) -> OracleReport {
    let oracle = Oracle::new(globals);
    OracleReport {
        verdicts: pairs.iter().map(|p| oracle.judge(p)).collect(),
    }
}
