//! Type-directed generation of well-typed core terms.
//!
//! The generator picks an introduction form for the target's head, an
//! elimination of a variable in scope, or a wrapper: a redex that computes
//! back to a term of the target type (a coe over a constant family, a path
//! beta redex, a projection out of a transported pair, and so on). Path
//! targets are filled by checking candidates against the kernel. Every
//! top-level result is re-checked by the kernel before it is returned, so the
//! generator's own reasoning is never trusted.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::globals::Globals;
use crate::nbe::Nbe;
use crate::syntax::{free_var_occurs, shift, subst, Binder, Context, Term};
use crate::typechecker;

/// Settings for one generation run.
#[derive(Clone, Debug)]
pub struct GenConfig {
    pub seed: u64,
    /// Maximum nesting of generated forms; at least 1.
    pub max_depth: usize,
    /// Number of cases a suite generates.
    pub max_terms: usize,
    /// Closed types to generate at.
    pub type_targets: Vec<Term>,
    pub iso_enabled: bool,
    /// Percent chance of choosing a wrapper redex over an introduction form.
    pub wrapper_weight: u32,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            seed: 1,
            max_depth: 4,
            max_terms: 500,
            type_targets: default_targets(),
            iso_enabled: false,
            wrapper_weight: 40,
        }
    }
}

impl GenConfig {
    /// A reproducible random stream for case `index`, independent of the
    /// order in which cases are generated.
    pub fn case_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

/// Bool, Unit, I, and small function, pair and path types over them.
pub fn default_targets() -> Vec<Term> {
    let bool_to_bool = Term::pi("_", Term::BoolType, Term::BoolType);
    vec![
        Term::BoolType,
        Term::BoolType,
        Term::Interval,
        Term::UnitType,
        bool_to_bool.clone(),
        Term::sigma("_", Term::BoolType, Term::Interval),
        Term::identity(&Term::BoolType, Term::True, Term::True),
        Term::identity(&Term::Interval, Term::Left, Term::Right),
        Term::identity(
            &bool_to_bool,
            Term::lam("x", Term::Var(0)),
            Term::lam("x", Term::Var(0)),
        ),
        Term::pi(
            "b",
            Term::BoolType,
            Term::bool_elim(
                "_",
                Term::Universe(0),
                Term::BoolType,
                Term::UnitType,
                Term::Var(0),
            ),
        ),
        Term::Universe(0),
    ]
}

/// The generator failed to produce a well-typed term within its retry budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exhausted {
    pub target: Term,
    pub attempts: usize,
}

const RETRIES: usize = 24;
const PATH_CANDIDATES: usize = 6;

pub struct Generator<'g> {
    globals: &'g Globals,
    rng: ChaCha8Rng,
    ctx: Context,
    iso_enabled: bool,
    wrapper_weight: u32,
}

/// `x. elimBool (_. Bool) false true x`
fn not_binder() -> Binder {
    Binder::new(
        "x",
        Term::bool_elim("_", Term::BoolType, Term::False, Term::True, Term::Var(0)),
    )
}

/// `x. elimBool (c. not (not c) = c) refl refl x`
fn not_not_binder() -> Binder {
    let not = |t: Term| Term::bool_elim("_", Term::BoolType, Term::False, Term::True, t);
    Binder::new(
        "x",
        Term::bool_elim(
            "c",
            Term::identity(&Term::BoolType, not(not(Term::Var(0))), Term::Var(0)),
            Term::refl(&Term::True),
            Term::refl(&Term::False),
            Term::Var(0),
        ),
    )
}

/// The negation iso on `Bool`, at interval point `arg`.
pub fn not_iso(arg: Term) -> Term {
    Term::iso(
        Term::BoolType,
        Term::BoolType,
        not_binder(),
        not_binder(),
        not_not_binder(),
        not_not_binder(),
        arg,
    )
}

/// The identity iso on a closed type, at interval point `arg`.
pub fn identity_iso(ty: &Term, arg: Term) -> Term {
    let refl_x = Term::refl(&Term::Var(0));
    Term::iso(
        ty.clone(),
        ty.clone(),
        Binder::new("x", Term::Var(0)),
        Binder::new("y", Term::Var(0)),
        Binder::new("x", refl_x.clone()),
        Binder::new("y", refl_x),
        arg,
    )
}

impl<'g> Generator<'g> {
    pub fn new(globals: &'g Globals, rng: ChaCha8Rng, cfg: &GenConfig) -> Generator<'g> {
        Generator {
            globals,
            rng,
            ctx: Context::new(),
            iso_enabled: cfg.iso_enabled,
            wrapper_weight: cfg.wrapper_weight,
        }
    }

    pub fn with_context(mut self, ctx: Context) -> Generator<'g> {
        self.ctx = ctx;
        self
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn depth(&self) -> usize {
        self.ctx.len()
    }

    fn norm(&self, t: &Term) -> Term {
        Nbe::new(self.globals).normalize_at(self.depth(), t)
    }

    fn accepts(&self, t: &Term, ty: &Term) -> bool {
        typechecker::check(self.globals, &self.ctx, t, ty).is_ok()
    }

    fn under<T>(&mut self, name: &str, ty: Term, f: impl FnOnce(&mut Self) -> T) -> T {
        self.ctx.push(name, ty);
        let result = f(self);
        self.ctx.pop();
        result
    }

    fn coin(&mut self, percent: u32) -> bool {
        self.rng.gen_range(0..100) < percent
    }

    /// A term of type `ty`, re-verified by the kernel; `ty` must be a type in
    /// the generator's context.
    pub fn generate(&mut self, ty: &Term, max_depth: usize) -> Result<Term, Exhausted> {
        let target = self.norm(ty);
        for _ in 0..RETRIES {
            if let Some(t) = self.gen(&target, max_depth) {
                if self.accepts(&t, &target) {
                    return Ok(t);
                }
            }
        }
        Err(Exhausted {
            target,
            attempts: RETRIES,
        })
    }

    /// A candidate of normalized type `ty`.
    pub fn gen(&mut self, ty: &Term, depth: usize) -> Option<Term> {
        if depth > 0 && self.coin(self.wrapper_weight) {
            if let Some(t) = self.wrapper(ty, depth - 1) {
                return Some(t);
            }
        }
        if self.coin(25) {
            if let Some(t) = self.eliminate_var(ty, depth) {
                return Some(t);
            }
        }
        self.intro(ty, depth)
            .or_else(|| self.eliminate_var(ty, depth))
            .or_else(|| {
                if depth > 0 {
                    self.wrapper(ty, depth - 1)
                } else {
                    None
                }
            })
    }

    fn gen_interval(&mut self, depth: usize) -> Option<Term> {
        self.gen(&Term::Interval, depth)
    }

    fn gen_bool(&mut self, depth: usize) -> Option<Term> {
        self.gen(&Term::BoolType, depth)
    }

    fn intro(&mut self, ty: &Term, depth: usize) -> Option<Term> {
        let sub = depth.saturating_sub(1);
        match ty {
            Term::BoolType => Some(if self.rng.gen() {
                Term::True
            } else {
                Term::False
            }),
            Term::UnitType => Some(Term::UnitVal),
            Term::Interval => Some(if self.rng.gen() {
                Term::Left
            } else {
                Term::Right
            }),
            Term::Universe(0) => self.small_type(depth),
            Term::Universe(1) => Some(if depth > 0 && self.rng.gen() {
                Term::pi("X", Term::Universe(0), Term::Var(0))
            } else {
                Term::Universe(0)
            }),
            Term::Pi(dom, cod) => {
                let body = self.under(cod.name.as_str(), (**dom).clone(), |g| {
                    g.gen(&cod.body, sub)
                })?;
                Some(Term::Lam(Binder::new(cod.name.clone(), body)))
            }
            Term::Sigma(fst, snd) => {
                let a = self.gen(fst, sub)?;
                let snd_ty = self.norm(&subst(&snd.body, 0, &a));
                let b = self.gen(&snd_ty, sub)?;
                Some(Term::pair(a, b))
            }
            Term::Path(family, left, right) => self.path(family, left, right, depth),
            Term::BoolElim(_, on_true, on_false, scrut) => {
                // A stuck large elimination: eliminate the same scrutinee.
                let lifted = shift(ty, 0, 1);
                let Term::BoolElim(m, t, f, _) = lifted else {
                    unreachable!()
                };
                let motive_here =
                    Binder::new("b", Term::BoolElim(m, t, f, std::rc::Rc::new(Term::Var(0))));
                let t = self.gen(&self.norm(on_true), sub)?;
                let f = self.gen(&self.norm(on_false), sub)?;
                Some(Term::BoolElim(
                    motive_here,
                    std::rc::Rc::new(t),
                    std::rc::Rc::new(f),
                    scrut.clone(),
                ))
            }
            _ => None,
        }
    }

    fn small_type(&mut self, depth: usize) -> Option<Term> {
        let sub = depth.saturating_sub(1);
        let bases = [Term::BoolType, Term::UnitType, Term::Interval];
        if depth == 0 {
            return bases.choose(&mut self.rng).cloned();
        }
        let kinds = if self.iso_enabled { 8 } else { 7 };
        Some(match self.rng.gen_range(0..kinds) {
            0 | 1 => bases.choose(&mut self.rng).cloned()?,
            2 => {
                let a = self.small_type(sub)?;
                let b = self.small_type(sub)?;
                Term::Pi(std::rc::Rc::new(a), Binder::constant(&b))
            }
            3 => {
                let a = self.small_type(sub)?;
                let b = self.small_type(sub)?;
                Term::Sigma(std::rc::Rc::new(a), Binder::constant(&b))
            }
            4 => {
                let l = self.gen_bool(sub)?;
                let r = self.gen_bool(sub)?;
                Term::identity(&Term::BoolType, l, r)
            }
            5 => {
                let a = self.small_type(sub)?;
                let b = self.small_type(sub)?;
                let s = self.gen_bool(sub)?;
                Term::bool_elim("_", Term::Universe(0), a, b, s)
            }
            // Endpoints may mention interval variables in scope, which gives
            // families that really vary along a line.
            6 => {
                let l = self.gen(&Term::Interval, sub)?;
                let r = self.gen(&Term::Interval, sub)?;
                Term::identity(&Term::Interval, l, r)
            }
            _ => not_iso(self.gen(&Term::Interval, sub)?),
        })
    }

    fn path(&mut self, family: &Binder, left: &Term, right: &Term, depth: usize) -> Option<Term> {
        let target = Term::Path(family.clone(), left.clone().into(), right.clone().into());
        let sub = depth.saturating_sub(1);
        let constant = !free_var_occurs(&family.body, 0);
        for _ in 0..PATH_CANDIDATES {
            let candidate = match self.rng.gen_range(0..4) {
                0 if constant => Some(Term::PathLam(Binder::new("i", shift(left, 0, 1)))),
                1 => Some(Term::path_lam("i", Term::Var(0))),
                2 => self.eliminate_var(&target, depth),
                _ => {
                    let line = (*family.body).clone();
                    self.under("i", Term::Interval, |g| g.gen(&line, sub))
                        .map(|body| Term::path_lam("i", body))
                }
            };
            if let Some(candidate) = candidate {
                if self.accepts(&candidate, &target) {
                    return Some(candidate);
                }
            }
        }
        None
    }

    /// A variable of the target type, or an elimination of one.
    fn eliminate_var(&mut self, ty: &Term, depth: usize) -> Option<Term> {
        let n = self.depth();
        let mut options = Vec::new();
        for (k, (_, entry)) in self.ctx.entries().iter().enumerate() {
            let index = n - 1 - k;
            let var_ty = self.norm(&shift(entry, 0, (n - k) as isize));
            if &var_ty == ty {
                options.push((index, var_ty, 0));
            } else {
                match &var_ty {
                    Term::Pi(_, cod)
                        if !free_var_occurs(&cod.body, 0) && &shift(&cod.body, 0, -1) == ty =>
                    {
                        options.push((index, var_ty.clone(), 1))
                    }
                    Term::Sigma(fst, _) if &**fst == ty => options.push((index, var_ty.clone(), 2)),
                    Term::Path(fam, _, _)
                        if !free_var_occurs(&fam.body, 0) && &shift(&fam.body, 0, -1) == ty =>
                    {
                        options.push((index, var_ty.clone(), 3))
                    }
                    _ => {}
                }
            }
        }
        let (index, var_ty, how) = options.choose(&mut self.rng)?.clone();
        let var = Term::Var(index);
        let sub = depth.saturating_sub(1);
        Some(match (how, var_ty) {
            (0, _) => var,
            (1, Term::Pi(dom, _)) => Term::app(var, self.gen(&dom, sub)?),
            (2, _) => Term::proj1(var),
            (3, Term::Path(_, l, r)) => {
                let i = self.gen_interval(sub)?;
                Term::at(var, i, (*l).clone(), (*r).clone())
            }
            _ => return None,
        })
    }

    /// A redex that computes to a term of type `ty`.
    fn wrapper(&mut self, ty: &Term, depth: usize) -> Option<Term> {
        let kinds = if self.iso_enabled && ty == &Term::BoolType {
            9
        } else {
            7
        };
        Some(match self.rng.gen_range(0..kinds) {
            0 => {
                let base = self.gen(ty, depth)?;
                let i = self.gen_interval(depth)?;
                Term::Coe(Binder::constant(ty), base.into(), i.into())
            }
            1 => {
                let a = self.gen(ty, depth)?;
                let i = self.gen_interval(depth)?;
                Term::at(Term::refl(&a), i, a.clone(), a)
            }
            2 => {
                let t = self.gen(ty, depth)?;
                let f = self.gen(ty, depth)?;
                let s = self.gen_bool(depth)?;
                Term::BoolElim(Binder::constant(ty), t.into(), f.into(), s.into())
            }
            3 => {
                let pair_ty = Term::Sigma(ty.clone().into(), Binder::constant(&Term::BoolType));
                let a = self.gen(ty, depth)?;
                let b = self.gen_bool(depth)?;
                let i = self.gen_interval(depth)?;
                Term::proj1(Term::Coe(
                    Binder::constant(&pair_ty),
                    Term::pair(a, b).into(),
                    i.into(),
                ))
            }
            4 => {
                let fun_ty = Term::Pi(Term::BoolType.into(), Binder::constant(ty));
                let body_ty = shift(ty, 0, 1);
                let body = self.under("b", Term::BoolType, |g| g.gen(&body_ty, depth))?;
                let i = self.gen_interval(depth)?;
                let arg = self.gen_bool(depth)?;
                Term::app(
                    Term::Coe(
                        Binder::constant(&fun_ty),
                        Term::lam("b", body).into(),
                        i.into(),
                    ),
                    arg,
                )
            }
            5 => {
                // A family that mentions its variable only under a redex.
                let ty_up = shift(ty, 0, 1);
                let family = Binder::new(
                    "x",
                    Term::at(Term::refl(&ty_up), Term::Var(0), ty_up.clone(), ty_up),
                );
                let base = self.gen(ty, depth)?;
                let i = self.gen_interval(depth)?;
                Term::Coe(family, base.into(), i.into())
            }
            6 if ty == &Term::BoolType => self.stuck_bool(depth)?,
            6 => {
                let a = self.gen(ty, depth)?;
                let i = self.gen_interval(depth)?;
                Term::Coe(Binder::constant(ty), a.into(), i.into())
            }
            7 => {
                let base = self.gen_bool(depth)?;
                let target = if self.rng.gen() {
                    Term::Right
                } else {
                    Term::Left
                };
                Term::Coe(
                    Binder::new("x", not_iso(Term::Var(0))),
                    base.into(),
                    target.into(),
                )
            }
            _ => {
                let base = self.gen_bool(depth)?;
                let line = Term::path_lam("j", identity_iso(&Term::BoolType, Term::Var(0)));
                let family = Term::at(line, Term::Var(0), Term::BoolType, Term::BoolType);
                Term::Coe(Binder::new("x", family), base.into(), Term::Right.into())
            }
        })
    }

    /// `coe (x. Path (_. I) left x -> Bool) (\_ => b) right (path (j. j))`:
    /// a closed boolean that does not compute to `true` or `false`.
    fn stuck_bool(&mut self, depth: usize) -> Option<Term> {
        let path_ty = Term::path("_", Term::Interval, Term::Left, Term::Var(0));
        let family = Binder::new(
            "x",
            Term::Pi(path_ty.into(), Binder::constant(&Term::BoolType)),
        );
        let body = self.under(
            "p",
            Term::identity(&Term::Interval, Term::Left, Term::Left),
            |g| g.gen_bool(depth),
        )?;
        Some(Term::app(
            Term::Coe(family, Term::lam("_", body).into(), Term::Right.into()),
            Term::path_lam("j", Term::Var(0)),
        ))
    }
}

/// `coe (x. Path (_. I) left x -> Bool) (\_ => true) right (path (j. j))`
pub fn non_canonical_bool() -> Term {
    let path_ty = Term::path("_", Term::Interval, Term::Left, Term::Var(0));
    let family = Binder::new(
        "x",
        Term::Pi(path_ty.into(), Binder::constant(&Term::BoolType)),
    );
    Term::app(
        Term::Coe(
            family,
            Term::lam("_", Term::True).into(),
            Term::Right.into(),
        ),
        Term::path_lam("j", Term::Var(0)),
    )
}

/// Generate a closed term at `ty` with case stream `index` of `cfg`.
pub fn gen_well_typed(
    cfg: &GenConfig,
    globals: &Globals,
    ctx: &Context,
    ty: &Term,
    index: usize,
) -> Result<Term, Exhausted> {
    let mut g = Generator::new(globals, cfg.case_rng(index), cfg).with_context(ctx.clone());
    g.generate(ty, cfg.max_depth.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64, depth: usize) -> GenConfig {
        GenConfig {
            seed,
            max_depth: depth,
            ..GenConfig::default()
        }
    }

    #[test]
    fn generated_terms_check() {
        let g = Globals::new();
        let c = cfg(3, 4);
        for (i, ty) in c
            .type_targets
            .iter()
            .enumerate()
            .cycle()
            .take(60)
            .enumerate()
            .map(|(k, (_, t))| (k, t))
        {
            let t = gen_well_typed(&c, &g, &Context::new(), ty, i).unwrap();
            assert!(typechecker::check(&g, &Context::new(), &t, ty).is_ok());
        }
    }

    #[test]
    fn deterministic() {
        let g = Globals::new();
        let c = cfg(9, 4);
        let a = gen_well_typed(&c, &g, &Context::new(), &Term::BoolType, 5).unwrap();
        let b = gen_well_typed(&c, &g, &Context::new(), &Term::BoolType, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn depth_one_refl_path() {
        let g = Globals::new();
        let ty = Term::identity(&Term::BoolType, Term::True, Term::True);
        let c = GenConfig {
            wrapper_weight: 0,
            ..cfg(1, 1)
        };
        let t = gen_well_typed(&c, &g, &Context::new(), &ty, 0).unwrap();
        assert!(crate::conversion::convert_terms(
            &g,
            &Context::new(),
            &t,
            &Term::refl(&Term::True)
        ));
    }

    #[test]
    fn distinct_booleans_are_not_connected() {
        let g = Globals::new();
        let ty = Term::identity(&Term::BoolType, Term::True, Term::False);
        for seed in 0..4 {
            assert!(gen_well_typed(&cfg(seed, 3), &g, &Context::new(), &ty, 0).is_err());
        }
    }
}
