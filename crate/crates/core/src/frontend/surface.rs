//! Named surface syntax.

use crate::diagnostic::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surface {
    pub kind: Kind,
    pub span: Span,
}

/// A bound name and the body it scopes over, as in `(x. t)` or `\x => t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scoped {
    pub name: String,
    pub body: Box<Surface>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceIso {
    pub ty_a: Surface,
    pub ty_b: Surface,
    pub fwd: Scoped,
    pub bwd: Scoped,
    pub sect_left: Scoped,
    pub sect_right: Scoped,
    pub arg: Surface,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Var(String),
    Universe(u8),
    Interval,
    Left,
    Right,
    UnitType,
    UnitVal,
    BoolType,
    True,
    False,
    Refl,
    Lam(Scoped),
    /// `(x : A) -> B`, or `A -> B` when the name is absent.
    Pi(Option<String>, Box<Surface>, Box<Surface>),
    /// `(x : A) * B`, or `A * B` when the name is absent.
    Sigma(Option<String>, Box<Surface>, Box<Surface>),
    App(Box<Surface>, Box<Surface>),
    Pair(Box<Surface>, Box<Surface>),
    Proj1(Box<Surface>),
    Proj2(Box<Surface>),
    BoolElim(Scoped, Box<Surface>, Box<Surface>, Box<Surface>),
    Coe(Scoped, Box<Surface>, Box<Surface>),
    Path(Scoped, Box<Surface>, Box<Surface>),
    PathLam(Scoped),
    /// `p @ i`; the endpoint annotations are filled in by elaboration.
    At(Box<Surface>, Box<Surface>),
    /// `a = a'`: a path over the constant family of `a`'s type.
    Eq(Box<Surface>, Box<Surface>),
    Iso(Box<SurfaceIso>),
}

impl Surface {
    pub fn new(kind: Kind, span: Span) -> Surface {
        Surface { kind, span }
    }

    /// A node without source position, for printing core terms.
    pub fn synth(kind: Kind) -> Surface {
        Surface::new(kind, Span::default())
    }
}

impl Scoped {
    pub fn new(name: impl Into<String>, body: Surface) -> Scoped {
        Scoped {
            name: name.into(),
            body: Box::new(body),
        }
    }
}

/// `def NAME : TYPE => BODY`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Declaration {
    pub name: String,
    pub ty: Surface,
    pub body: Surface,
    pub span: Span,
    pub name_span: Span,
}

/// Reserved words; none of them can name a variable.
pub const KEYWORDS: &[&str] = &[
    "def", "I", "left", "right", "Type0", "Type1", "Type2", "Unit", "unit", "Bool", "true",
    "false", "refl", "Path", "path", "coe", "iso", "proj1", "proj2", "elimBool",
];

pub fn is_keyword(name: &str) -> bool {
    KEYWORDS.contains(&name)
}
