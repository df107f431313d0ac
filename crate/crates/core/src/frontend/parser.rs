//! Lexer and recursive-descent parser for `.hti` files.
//!
//! ```text
//! file  := decl*
//! decl  := "def" IDENT ":" expr "=>" expr
//! expr  := "\" IDENT "=>" expr
//!        | "(" IDENT ":" expr ")" ("->" | "*") expr
//!        | prod ("->" expr)?
//! prod  := eq ("*" prod)?
//! eq    := at ("=" at)?
//! at    := app ("@" atom)*
//! app   := head atom*
//! head  := "proj1" atom | "proj2" atom
//!        | "Path" scope atom atom | "path" scope | "coe" scope atom atom
//!        | "iso" atom atom scope scope scope scope atom
//!        | "elimBool" scope atom atom atom
//!        | atom
//! scope := "(" IDENT "." expr ")"
//! atom  := IDENT | keyword constant | "(" expr ")" | "(" expr "," expr ")"
//! ```

use std::collections::HashMap;

use crate::diagnostic::{Code, Diagnostic, Span};
use crate::frontend::surface::{is_keyword, Declaration, Kind, Scoped, Surface, SurfaceIso};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    Backslash,
    FatArrow,
    Arrow,
    Star,
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    At,
    Equals,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("`{name}`"),
            Token::Backslash => "`\\`".into(),
            Token::FatArrow => "`=>`".into(),
            Token::Arrow => "`->`".into(),
            Token::Star => "`*`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Comma => "`,`".into(),
            Token::Dot => "`.`".into(),
            Token::Colon => "`:`".into(),
            Token::At => "`@`".into(),
            Token::Equals => "`=`".into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(source: &str) -> Result<Vec<(Token, Span)>, Diagnostic> {
    let mut tokens = Vec::new();
    let mut chars = source.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if source[start..].starts_with("--") {
            while chars.next_if(|&(_, c)| c != '\n').is_some() {}
            continue;
        }
        if is_ident_start(c) {
            let mut end = start;
            while let Some((i, c)) = chars.next_if(|&(_, c)| is_ident_continue(c)) {
                end = i + c.len_utf8();
            }
            tokens.push((
                Token::Ident(source[start..end].to_owned()),
                Span::new(start, end),
            ));
            continue;
        }
        let two = |s: &str| source[start..].starts_with(s);
        let (token, len) = if two("=>") {
            (Token::FatArrow, 2)
        } else if two("->") {
            (Token::Arrow, 2)
        } else {
            let token = match c {
                '\\' => Token::Backslash,
                '*' => Token::Star,
                '(' => Token::LParen,
                ')' => Token::RParen,
                ',' => Token::Comma,
                '.' => Token::Dot,
                ':' => Token::Colon,
                '@' => Token::At,
                '=' => Token::Equals,
                _ => {
                    return Err(Diagnostic::error(
                        Code::Syntax,
                        format!("unexpected character `{c}`"),
                    )
                    .with_span(Span::new(start, start + c.len_utf8())))
                }
            };
            (token, 1)
        };
        for _ in 0..len {
            chars.next();
        }
        tokens.push((token, Span::new(start, start + len)));
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, Span)>,
    pos: usize,
    end: usize,
}

type Parse<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.pos + offset).map(|(t, _)| t)
    }

    fn span(&self) -> Span {
        self.tokens
            .get(self.pos)
            .map_or(Span::new(self.end, self.end), |(_, s)| *s)
    }

    fn prev_end(&self) -> usize {
        self.pos
            .checked_sub(1)
            .and_then(|i| self.tokens.get(i))
            .map_or(0, |(_, s)| s.end)
    }

    fn error(&self, expected: &str) -> Diagnostic {
        let found = self
            .peek()
            .map_or("end of input".to_owned(), Token::describe);
        Diagnostic::error(Code::Syntax, format!("expected {expected}, found {found}"))
            .with_span(self.span())
    }

    fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == Some(token) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: Token) -> Parse<()> {
        if self.eat(&token) {
            Ok(())
        } else {
            Err(self.error(&token.describe()))
        }
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Token::Ident(w)) if w == word)
    }

    fn name(&mut self) -> Parse<(String, Span)> {
        match self.peek() {
            Some(Token::Ident(name)) if !is_keyword(name) => {
                let name = name.clone();
                let span = self.span();
                self.pos += 1;
                Ok((name, span))
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn node(&self, start: usize, kind: Kind) -> Surface {
        Surface::new(kind, Span::new(start, self.prev_end()))
    }

    fn decl(&mut self) -> Parse<Declaration> {
        let start = self.span().start;
        if !self.at_keyword("def") {
            return Err(self.error("`def`"));
        }
        self.pos += 1;
        let (name, name_span) = self.name()?;
        self.expect(Token::Colon)?;
        let ty = self.expr()?;
        self.expect(Token::FatArrow)?;
        let body = self.expr()?;
        Ok(Declaration {
            name,
            ty,
            body,
            span: Span::new(start, self.prev_end()),
            name_span,
        })
    }

    /// `(` IDENT `:` starts a dependent binder.
    fn at_telescope(&self) -> bool {
        self.peek() == Some(&Token::LParen)
            && matches!(self.peek_at(1), Some(Token::Ident(n)) if !is_keyword(n))
            && self.peek_at(2) == Some(&Token::Colon)
    }

    fn expr(&mut self) -> Parse<Surface> {
        let start = self.span().start;
        if self.eat(&Token::Backslash) {
            let (name, _) = self.name()?;
            self.expect(Token::FatArrow)?;
            let body = self.expr()?;
            return Ok(self.node(start, Kind::Lam(Scoped::new(name, body))));
        }
        if self.at_telescope() {
            self.pos += 1;
            let (name, _) = self.name()?;
            self.expect(Token::Colon)?;
            let dom = Box::new(self.expr()?);
            self.expect(Token::RParen)?;
            let is_pi = if self.eat(&Token::Arrow) {
                true
            } else if self.eat(&Token::Star) {
                false
            } else {
                return Err(self.error("`->` or `*` after a binder"));
            };
            let cod = Box::new(self.expr()?);
            let kind = if is_pi {
                Kind::Pi(Some(name), dom, cod)
            } else {
                Kind::Sigma(Some(name), dom, cod)
            };
            return Ok(self.node(start, kind));
        }
        let lhs = self.prod()?;
        if self.eat(&Token::Arrow) {
            let rhs = self.expr()?;
            return Ok(self.node(start, Kind::Pi(None, Box::new(lhs), Box::new(rhs))));
        }
        Ok(lhs)
    }

    fn prod(&mut self) -> Parse<Surface> {
        let start = self.span().start;
        let lhs = self.eq()?;
        if self.eat(&Token::Star) {
            let rhs = self.prod()?;
            return Ok(self.node(start, Kind::Sigma(None, Box::new(lhs), Box::new(rhs))));
        }
        Ok(lhs)
    }

    fn eq(&mut self) -> Parse<Surface> {
        let start = self.span().start;
        let lhs = self.at()?;
        if self.eat(&Token::Equals) {
            let rhs = self.at()?;
            return Ok(self.node(start, Kind::Eq(Box::new(lhs), Box::new(rhs))));
        }
        Ok(lhs)
    }

    fn at(&mut self) -> Parse<Surface> {
        let start = self.span().start;
        let mut lhs = self.app()?;
        while self.eat(&Token::At) {
            let arg = self.atom()?;
            lhs = self.node(start, Kind::At(Box::new(lhs), Box::new(arg)));
        }
        Ok(lhs)
    }

    fn app(&mut self) -> Parse<Surface> {
        let start = self.span().start;
        let mut fun = self.head()?;
        while self.at_atom_start() {
            let arg = self.atom()?;
            fun = self.node(start, Kind::App(Box::new(fun), Box::new(arg)));
        }
        Ok(fun)
    }

    fn at_atom_start(&self) -> bool {
        match self.peek() {
            Some(Token::LParen) => true,
            Some(Token::Ident(name)) => !is_keyword(name) || atom_keyword(name).is_some(),
            _ => false,
        }
    }

    fn scope(&mut self) -> Parse<Scoped> {
        self.expect(Token::LParen)?;
        let (name, _) = self.name()?;
        self.expect(Token::Dot)?;
        let body = self.expr()?;
        self.expect(Token::RParen)?;
        Ok(Scoped::new(name, body))
    }

    fn boxed_atom(&mut self) -> Parse<Box<Surface>> {
        self.atom().map(Box::new)
    }

    fn head(&mut self) -> Parse<Surface> {
        let start = self.span().start;
        let word = match self.peek() {
            Some(Token::Ident(w)) => w.clone(),
            _ => return self.atom(),
        };
        let kind = match word.as_str() {
            "proj1" | "proj2" => {
                self.pos += 1;
                let p = self.boxed_atom()?;
                if word == "proj1" {
                    Kind::Proj1(p)
                } else {
                    Kind::Proj2(p)
                }
            }
            "Path" => {
                self.pos += 1;
                let family = self.scope()?;
                Kind::Path(family, self.boxed_atom()?, self.boxed_atom()?)
            }
            "path" => {
                self.pos += 1;
                Kind::PathLam(self.scope()?)
            }
            "coe" => {
                self.pos += 1;
                let family = self.scope()?;
                Kind::Coe(family, self.boxed_atom()?, self.boxed_atom()?)
            }
            "elimBool" => {
                self.pos += 1;
                let motive = self.scope()?;
                Kind::BoolElim(
                    motive,
                    self.boxed_atom()?,
                    self.boxed_atom()?,
                    self.boxed_atom()?,
                )
            }
            "iso" => {
                self.pos += 1;
                Kind::Iso(Box::new(SurfaceIso {
                    ty_a: self.atom()?,
                    ty_b: self.atom()?,
                    fwd: self.scope()?,
                    bwd: self.scope()?,
                    sect_left: self.scope()?,
                    sect_right: self.scope()?,
                    arg: self.atom()?,
                }))
            }
            _ => return self.atom(),
        };
        Ok(self.node(start, kind))
    }

    fn atom(&mut self) -> Parse<Surface> {
        let start = self.span().start;
        match self.peek() {
            Some(Token::Ident(word)) => {
                let kind = if let Some(kind) = atom_keyword(word) {
                    kind
                } else if is_keyword(word) {
                    return Err(self.error("a term"));
                } else {
                    Kind::Var(word.clone())
                };
                self.pos += 1;
                Ok(self.node(start, kind))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.eat(&Token::Comma) {
                    let snd = self.expr()?;
                    self.expect(Token::RParen)?;
                    return Ok(self.node(start, Kind::Pair(Box::new(inner), Box::new(snd))));
                }
                self.expect(Token::RParen)?;
                // Parentheses only group; keep the inner node's span tight.
                Ok(inner)
            }
            _ => Err(self.error("a term")),
        }
    }
}

fn atom_keyword(word: &str) -> Option<Kind> {
    Some(match word {
        "I" => Kind::Interval,
        "left" => Kind::Left,
        "right" => Kind::Right,
        "Type0" => Kind::Universe(0),
        "Type1" => Kind::Universe(1),
        "Type2" => Kind::Universe(2),
        "Unit" => Kind::UnitType,
        "unit" => Kind::UnitVal,
        "Bool" => Kind::BoolType,
        "true" => Kind::True,
        "false" => Kind::False,
        "refl" => Kind::Refl,
        _ => return None,
    })
}

/// Parse a whole file. Declaration names must be unique within the file.
pub fn parse(source: &str) -> Result<Vec<Declaration>, Diagnostic> {
    let mut parser = Parser {
        tokens: lex(source)?,
        pos: 0,
        end: source.len(),
    };
    let mut decls = Vec::new();
    let mut seen: HashMap<String, Span> = HashMap::new();
    while parser.peek().is_some() {
        let decl = parser.decl()?;
        if seen.insert(decl.name.clone(), decl.name_span).is_some() {
            return Err(Diagnostic::error(
                Code::Duplicate,
                format!("duplicate declaration `{}`", decl.name),
            )
            .with_span(decl.name_span));
        }
        decls.push(decl);
    }
    Ok(decls)
}

/// Parse a single term.
pub fn parse_term(source: &str) -> Result<Surface, Diagnostic> {
    let mut parser = Parser {
        tokens: lex(source)?,
        pos: 0,
        end: source.len(),
    };
    let term = parser.expr()?;
    if parser.peek().is_some() {
        return Err(parser.error("end of input"));
    }
    Ok(term)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind(src: &str) -> Kind {
        parse_term(src).unwrap().kind
    }

    #[test]
    fn parses_declarations() {
        let decls = parse("def id : (A : Type0) -> A -> A => \\A => \\x => x").unwrap();
        assert_eq!(decls.len(), 1);
        assert_eq!(decls[0].name, "id");
        let decls = parse("-- comment\ndef l : I => left").unwrap();
        assert_eq!(decls[0].body.kind, Kind::Left);
    }

    #[test]
    fn syntax_error_points_at_token() {
        let src = "def bad : I => @";
        let err = parse(src).unwrap_err();
        assert_eq!(err.code, Code::Syntax);
        assert_eq!(err.span.unwrap().line_col(src), (1, 16));
    }

    #[test]
    fn duplicate_names() {
        let err = parse("def a : I => left\ndef a : I => right").unwrap_err();
        assert_eq!(err.code, Code::Duplicate);
    }

    #[test]
    fn precedence() {
        // `@` binds tighter than `=`, application tighter than `@`.
        let Kind::Eq(lhs, _) = kind("f x @ i = a") else {
            panic!()
        };
        let Kind::At(p, _) = lhs.kind else { panic!() };
        assert!(matches!(p.kind, Kind::App(..)));
        // Arrows associate to the right and bind looser than products.
        let Kind::Pi(None, dom, cod) = kind("A * B -> C -> D") else {
            panic!()
        };
        assert!(matches!(dom.kind, Kind::Sigma(None, ..)));
        assert!(matches!(cod.kind, Kind::Pi(None, ..)));
        // Head forms can be applied further.
        let Kind::App(f, _) = kind("proj1 e x") else {
            panic!()
        };
        assert!(matches!(f.kind, Kind::Proj1(_)));
    }

    #[test]
    fn binder_forms() {
        assert!(matches!(
            kind("(x : Bool) * x = x"),
            Kind::Sigma(Some(_), ..)
        ));
        assert!(matches!(kind("(x, y)"), Kind::Pair(..)));
        assert!(matches!(kind("coe (x. Bool) true right"), Kind::Coe(..)));
        assert!(matches!(
            kind("iso Bool Bool (x. x) (y. y) (x. refl) (y. refl) left"),
            Kind::Iso(_)
        ));
    }

    #[test]
    fn keywords_are_not_names() {
        assert_eq!(parse_term("\\left => left").unwrap_err().code, Code::Syntax);
        assert_eq!(parse_term("def").unwrap_err().code, Code::Syntax);
    }
}
