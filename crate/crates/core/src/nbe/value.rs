//! The semantic domain.

use std::rc::Rc;

use crate::syntax::{Binder, Hint};

pub type RcValue = Rc<Value>;

/// De Bruijn level of a neutral variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level(pub usize);

/// Values for the variables in scope; index 0 is the last entry.
#[derive(Clone, Debug, Default)]
pub struct Env(Rc<Vec<RcValue>>);

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    /// The environment mapping every variable of a `depth`-long context to itself.
    pub fn identity(depth: usize) -> Env {
        Env(Rc::new((0..depth).map(|l| Value::var(Level(l))).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&RcValue> {
        let len = self.0.len();
        index
            .checked_add(1)
            .and_then(|i| len.checked_sub(i))
            .map(|l| &self.0[l])
    }

    pub fn extend(&self, value: RcValue) -> Env {
        let mut values = Vec::with_capacity(self.0.len() + 1);
        values.extend(self.0.iter().cloned());
        values.push(value);
        Env(Rc::new(values))
    }

    pub fn values(&self) -> &[RcValue] {
        &self.0
    }
}

/// A binder body paired with the environment it was evaluated in.
#[derive(Clone, Debug)]
pub struct Closure {
    pub env: Env,
    pub binder: Binder,
}

impl Closure {
    pub fn new(env: Env, binder: Binder) -> Closure {
        Closure { env, binder }
    }

    /// A closure returning `value` whatever it is applied to.
    pub fn constant(value: RcValue) -> Closure {
        use crate::syntax::Term;
        Closure {
            env: Env::new().extend(value),
            binder: Binder::new(Hint::anon(), Term::Var(1)),
        }
    }

    pub fn name(&self) -> &Hint {
        &self.binder.name
    }
}

#[derive(Clone, Debug)]
pub struct IsoValue {
    pub ty_a: RcValue,
    pub ty_b: RcValue,
    pub fwd: Closure,
    pub bwd: Closure,
    pub sect_left: Closure,
    pub sect_right: Closure,
    /// Always neutral: `left` and `right` reduce to the endpoint types.
    pub arg: RcValue,
}

/// The head of a stuck computation.
#[derive(Clone, Debug)]
pub enum Head {
    Var(Level),
    /// A coercion none of whose rules apply.
    Coe(Rc<StuckCoe>),
}

#[derive(Clone, Debug)]
pub struct StuckCoe {
    pub family: Closure,
    pub base: RcValue,
    pub target: RcValue,
}

/// One elimination in a neutral spine.
#[derive(Clone, Debug)]
pub enum Elim {
    App(RcValue),
    Proj1,
    Proj2,
    BoolElim(Closure, RcValue, RcValue),
    At {
        arg: RcValue,
        annot_left: RcValue,
        annot_right: RcValue,
    },
}

#[derive(Clone, Debug)]
pub enum Value {
    Universe(u8),
    Pi(RcValue, Closure),
    Lam(Closure),
    Sigma(RcValue, Closure),
    Pair(RcValue, RcValue),
    UnitType,
    UnitVal,
    BoolType,
    True,
    False,
    Interval,
    Left,
    Right,
    Path(Closure, RcValue, RcValue),
    PathLam(Closure),
    Iso(Rc<IsoValue>),
    Neutral(Head, Vec<Elim>),
}

impl Value {
    pub fn var(level: Level) -> RcValue {
        Rc::new(Value::Neutral(Head::Var(level), Vec::new()))
    }

    /// Is this exactly the variable at `level`, with nothing applied?
    pub fn is_var(&self, level: Level) -> bool {
        matches!(self, Value::Neutral(Head::Var(l), spine) if *l == level && spine.is_empty())
    }

    pub fn is_neutral(&self) -> bool {
        matches!(self, Value::Neutral(..))
    }
}
