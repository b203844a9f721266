//! Recursive-descent parser for terms, types, and roles.
//!
//! Grammar sketch (tightest binding last):
//!
//! ```text
//! term   ::= '\' var ':' type '.' term
//!          | 'let' var '=' term 'in' term
//!          | 'if' term 'then' term 'else' term
//!          | seq
//! seq    ::= eq (';' term)?                       -- M ; N  is  let _ = M in N
//! eq     ::= prefix ('==' prefix)?
//! prefix ::= 'check' prefix | 'fix' prefix
//!          | ('up'|'dn') '[' role ']' ('^' '[' role ']')? prefix
//!          | 'as' '[' role ']' prefix             -- dn[0] (up[role] _)
//!          | '{' role '}' prefix
//!          | app
//! app    ::= atom atom*
//! atom   ::= var | literal | '(' ')' | '(' term ')' | '[' term ']'
//! ```
//!
//! Role atoms are capitalized, term variables lowercase; `_` may only bind.
//! After parsing, duplicate binder names are alpha-freshened so that bound
//! names are distinct.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use super::lexer::{err, lex, ParseError, Pos, Tok};
use super::{Literal, Term, Type};
use crate::roles::{RoleExpr, RoleModifier};
use crate::syntax::Base;

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        if self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(err(format!("expected {want}, found {}", self.peek()), self.pos()))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::Lambda => {
                self.bump();
                let x = self.binder_name()?;
                self.expect(&Tok::Colon)?;
                let annot = self.type_()?;
                self.expect(&Tok::Dot)?;
                let body = self.term()?;
                Ok(Term::Abs(x, annot, Box::new(body)))
            }
            Tok::KwLet => {
                self.bump();
                let x = self.binder_name()?;
                self.expect(&Tok::Eq)?;
                let bound = self.term()?;
                self.expect(&Tok::KwIn)?;
                let body = self.term()?;
                Ok(Term::Let(x, Box::new(bound), Box::new(body)))
            }
            Tok::KwIf => {
                self.bump();
                let c = self.term()?;
                self.expect(&Tok::KwThen)?;
                let t = self.term()?;
                self.expect(&Tok::KwElse)?;
                let e = self.term()?;
                Ok(Term::ite(c, t, e))
            }
            _ => self.seq(),
        }
    }

    fn seq(&mut self) -> Result<Term, ParseError> {
        let l = self.eq()?;
        if self.peek() == &Tok::Semi {
            self.bump();
            let r = self.term()?;
            Ok(Term::let_("_", l, r))
        } else {
            Ok(l)
        }
    }

    fn eq(&mut self) -> Result<Term, ParseError> {
        let l = self.prefix()?;
        if self.peek() == &Tok::EqEq {
            self.bump();
            let r = self.prefix()?;
            Ok(Term::str_eq(l, r))
        } else {
            Ok(l)
        }
    }

    fn modifier_roles(&mut self) -> Result<(RoleExpr, Option<RoleExpr>), ParseError> {
        self.expect(&Tok::LBracket)?;
        let role = self.role()?;
        self.expect(&Tok::RBracket)?;
        let annotation = if self.peek() == &Tok::Caret {
            self.bump();
            self.expect(&Tok::LBracket)?;
            let a = self.role()?;
            self.expect(&Tok::RBracket)?;
            Some(a)
        } else {
            None
        };
        Ok((role, annotation))
    }

    fn prefix(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::KwCheck => {
                self.bump();
                Ok(Term::check(self.prefix()?))
            }
            Tok::KwFix => {
                self.bump();
                Ok(Term::fix(self.prefix()?))
            }
            Tok::KwUp => {
                self.bump();
                let (role, annotation) = self.modifier_roles()?;
                let mut m = RoleModifier::up(role);
                m.check_annotation = annotation;
                Ok(Term::modif(m, self.prefix()?))
            }
            Tok::KwDn => {
                self.bump();
                let (role, annotation) = self.modifier_roles()?;
                let mut m = RoleModifier::dn(role);
                m.check_annotation = annotation;
                Ok(Term::modif(m, self.prefix()?))
            }
            Tok::KwAs => {
                let pos = self.pos();
                self.bump();
                let (role, annotation) = self.modifier_roles()?;
                if annotation.is_some() {
                    return Err(err("`as[..]` does not take a check annotation", pos));
                }
                Ok(Term::at_exactly(role, self.prefix()?))
            }
            Tok::LBrace => {
                self.bump();
                let role = self.role()?;
                self.expect(&Tok::RBrace)?;
                Ok(Term::guard(role, self.prefix()?))
            }
            _ => self.app(),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_)
                | Tok::Int(_)
                | Tok::Str(_)
                | Tok::KwTrue
                | Tok::KwFalse
                | Tok::LParen
                | Tok::LBracket
        )
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut f = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            f = Term::app(f, a);
        }
        Ok(f)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(name) => {
                if name == "_" {
                    Err(err("`_` only binds; it cannot be referenced", pos))
                } else {
                    Ok(Term::Var(name))
                }
            }
            Tok::UpperIdent(name) => Err(err(
                format!("`{name}` is a role atom; term variables are lowercase"),
                pos,
            )),
            Tok::Int(n) => Ok(Term::Lit(Literal::Int(n))),
            Tok::Str(s) => Ok(Term::Lit(Literal::Str(s))),
            Tok::KwTrue => Ok(Term::Lit(Literal::Bool(true))),
            Tok::KwFalse => Ok(Term::Lit(Literal::Bool(false))),
            Tok::LParen => {
                if self.peek() == &Tok::RParen {
                    self.bump();
                    Ok(Term::Lit(Literal::Unit))
                } else {
                    let t = self.term()?;
                    self.expect(&Tok::RParen)?;
                    Ok(t)
                }
            }
            Tok::LBracket => {
                let t = self.term()?;
                self.expect(&Tok::RBracket)?;
                Ok(Term::unit(t))
            }
            other => Err(err(format!("expected a term, found {other}"), pos)),
        }
    }

    fn binder_name(&mut self) -> Result<String, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(name) => Ok(name),
            other => Err(err(format!("expected a variable name, found {other}"), pos)),
        }
    }

    // Roles: `|` loosest, then `&`, then `!`.

    fn role(&mut self) -> Result<RoleExpr, ParseError> {
        let mut l = self.role_meet()?;
        while self.peek() == &Tok::Pipe {
            self.bump();
            let r = self.role_meet()?;
            l = l.join(r);
        }
        Ok(l)
    }

    fn role_meet(&mut self) -> Result<RoleExpr, ParseError> {
        let mut l = self.role_unary()?;
        while self.peek() == &Tok::Amp {
            self.bump();
            let r = self.role_unary()?;
            l = l.meet(r);
        }
        Ok(l)
    }

    fn role_unary(&mut self) -> Result<RoleExpr, ParseError> {
        if self.peek() == &Tok::Bang {
            self.bump();
            Ok(self.role_unary()?.neg())
        } else {
            self.role_atom()
        }
    }

    fn role_atom(&mut self) -> Result<RoleExpr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(0) => Ok(RoleExpr::Bottom),
            Tok::Int(1) => Ok(RoleExpr::Top),
            Tok::Int(n) => Err(err(format!("`{n}` is not a role (use 0 or 1)"), pos)),
            Tok::UpperIdent(name) => Ok(RoleExpr::Atom(name)),
            Tok::Ident(name) => {
                Err(err(format!("role atoms are capitalized; found `{name}`"), pos))
            }
            Tok::KwAmp => {
                self.expect(&Tok::LParen)?;
                let r = self.role()?;
                self.expect(&Tok::RParen)?;
                Ok(r.amp())
            }
            Tok::LParen => {
                let r = self.role()?;
                self.expect(&Tok::RParen)?;
                Ok(r)
            }
            other => Err(err(format!("expected a role, found {other}"), pos)),
        }
    }

    // Types: `->` right-associative; `{A}`/`[A]` bind tighter.

    fn type_(&mut self) -> Result<Type, ParseError> {
        let l = self.type_prefix()?;
        if self.peek() == &Tok::Arrow {
            self.bump();
            let r = self.type_()?;
            Ok(Type::arrow(l, r))
        } else {
            Ok(l)
        }
    }

    fn type_prefix(&mut self) -> Result<Type, ParseError> {
        match self.peek() {
            Tok::LBrace => {
                self.bump();
                let role = self.role()?;
                self.expect(&Tok::RBrace)?;
                Ok(Type::guarded(role, self.type_prefix()?))
            }
            Tok::LBracket => {
                self.bump();
                let role = self.role()?;
                self.expect(&Tok::RBracket)?;
                Ok(Type::comp(role, self.type_prefix()?))
            }
            _ => self.type_atom(),
        }
    }

    fn type_atom(&mut self) -> Result<Type, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::UpperIdent(name) => match name.as_str() {
                "Unit" => Ok(Type::Base(Base::Unit)),
                "Int" => Ok(Type::Base(Base::Int)),
                "Str" => Ok(Type::Base(Base::Str)),
                "Bool" => Ok(Type::Base(Base::Bool)),
                _ => Err(err(format!("unknown base type `{name}`"), pos)),
            },
            Tok::LParen => {
                let t = self.type_()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            other => Err(err(format!("expected a type, found {other}"), pos)),
        }
    }
}

fn parser_for(src: &str) -> Result<Parser, ParseError> {
    Ok(Parser { toks: lex(src)?, at: 0 })
}

/// Parse a complete term.  `M ; N` desugars to `let _ = M in N` and
/// `as[A] M` to `dn[0] (up[A] M)`; duplicate binder names are freshened.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = parser_for(src)?;
    let t = p.term()?;
    if p.peek() != &Tok::Eof {
        return Err(err(format!("unexpected {} after term", p.peek()), p.pos()));
    }
    Ok(freshen_binders(&t))
}

/// Parse a complete type.
pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = parser_for(src)?;
    let t = p.type_()?;
    if p.peek() != &Tok::Eof {
        return Err(err(format!("unexpected {} after type", p.peek()), p.pos()));
    }
    Ok(t)
}

/// Parse a complete role expression.
pub fn parse_role(src: &str) -> Result<RoleExpr, ParseError> {
    let mut p = parser_for(src)?;
    let r = p.role()?;
    if p.peek() != &Tok::Eof {
        return Err(err(format!("unexpected {} after role", p.peek()), p.pos()));
    }
    Ok(r)
}

/// Rename bound variables so that all binder names are pairwise distinct
/// and distinct from every free variable.  The wildcard `_` is left alone;
/// it can never be referenced.
fn freshen_binders(t: &Term) -> Term {
    let mut used: BTreeSet<String> = t.free_vars();
    go(t, &BTreeMap::new(), &mut used)
}

fn claim(name: &str, used: &mut BTreeSet<String>) -> String {
    if name == "_" {
        return "_".to_string();
    }
    let mut candidate = name.to_string();
    while used.contains(&candidate) {
        candidate.push('\'');
    }
    used.insert(candidate.clone());
    candidate
}

fn go(t: &Term, ren: &BTreeMap<String, String>, used: &mut BTreeSet<String>) -> Term {
    match t {
        Term::Lit(_) => t.clone(),
        Term::Var(x) => Term::Var(ren.get(x).cloned().unwrap_or_else(|| x.clone())),
        Term::Abs(x, annot, b) => {
            let fresh = claim(x, used);
            let mut ren2 = ren.clone();
            ren2.insert(x.clone(), fresh.clone());
            Term::Abs(fresh, annot.clone(), Box::new(go(b, &ren2, used)))
        }
        Term::Let(x, m, n) => {
            let m = go(m, ren, used);
            let fresh = claim(x, used);
            let mut ren2 = ren.clone();
            ren2.insert(x.clone(), fresh.clone());
            Term::Let(fresh, Box::new(m), Box::new(go(n, &ren2, used)))
        }
        Term::App(l, r) => Term::app(go(l, ren, used), go(r, ren, used)),
        Term::StrEq(l, r) => Term::str_eq(go(l, ren, used), go(r, ren, used)),
        Term::Fix(m) => Term::fix(go(m, ren, used)),
        Term::Check(m) => Term::check(go(m, ren, used)),
        Term::Unit(m) => Term::unit(go(m, ren, used)),
        Term::Guard(role, m) => Term::guard(role.clone(), go(m, ren, used)),
        Term::Mod(md, m) => Term::modif(md.clone(), go(m, ren, used)),
        Term::If(c, a, b) => Term::ite(go(c, ren, used), go(a, ren, used), go(b, ren, used)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roles::ModDirection;

    #[test]
    fn parses_abbreviation_for_exact_role() {
        let t = parse_term("as[B] x").unwrap();
        let expected = Term::at_exactly(RoleExpr::atom("B"), Term::var("x"));
        assert_eq!(t, expected);
        match &t {
            Term::Mod(outer, inner) => {
                assert_eq!(outer.direction, ModDirection::Dn);
                assert_eq!(outer.role, RoleExpr::Bottom);
                match inner.as_ref() {
                    Term::Mod(up, _) => {
                        assert_eq!(up.direction, ModDirection::Up);
                        assert_eq!(up.role, RoleExpr::atom("B"));
                    }
                    other => panic!("expected up modifier, got {other:?}"),
                }
            }
            other => panic!("expected dn modifier, got {other:?}"),
        }
    }

    #[test]
    fn parses_lambda_with_guard_annotation() {
        let t = parse_term("\\x:{A}Str. check x").unwrap();
        let expected = Term::abs(
            "x",
            Type::guarded(RoleExpr::atom("A"), Type::Base(Base::Str)),
            Term::check(Term::var("x")),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn sequencing_desugars_to_let_wildcard() {
        let t = parse_term("check {A} () ; [()]").unwrap();
        match &t {
            Term::Let(x, bound, body) => {
                assert_eq!(x, "_");
                assert!(matches!(bound.as_ref(), Term::Check(_)));
                assert!(matches!(body.as_ref(), Term::Unit(_)));
            }
            other => panic!("expected let, got {other:?}"),
        }
    }

    #[test]
    fn application_is_left_associative_and_tightest() {
        let t = parse_term("f x y").unwrap();
        assert_eq!(
            t,
            Term::app(Term::app(Term::var("f"), Term::var("x")), Term::var("y"))
        );
        // check scopes over the whole application
        let t = parse_term("check f x").unwrap();
        assert_eq!(
            t,
            Term::check(Term::app(Term::var("f"), Term::var("x")))
        );
    }

    #[test]
    fn checked_modifier_syntax() {
        let t = parse_term("up[B]^[amp(B)] [()]").unwrap();
        match &t {
            Term::Mod(m, _) => {
                assert_eq!(m.direction, ModDirection::Up);
                assert_eq!(m.check_annotation, Some(RoleExpr::atom("B").amp()));
            }
            other => panic!("expected modifier, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_binders_are_freshened() {
        let t = parse_term("\\x:Str. (\\x:Str. x) x").unwrap();
        match &t {
            Term::Abs(outer, _, body) => {
                assert_eq!(outer, "x");
                match body.as_ref() {
                    Term::App(f, arg) => {
                        match f.as_ref() {
                            Term::Abs(inner, _, ib) => {
                                assert_eq!(inner, "x'");
                                assert_eq!(ib.as_ref(), &Term::var("x'"));
                            }
                            other => panic!("expected inner abs, got {other:?}"),
                        }
                        assert_eq!(arg.as_ref(), &Term::var("x"));
                    }
                    other => panic!("expected app, got {other:?}"),
                }
            }
            other => panic!("expected abs, got {other:?}"),
        }
    }

    #[test]
    fn keywords_terminate_bound_terms() {
        let t = parse_term("let f = \\x:Str. x in f \"a\"").unwrap();
        match &t {
            Term::Let(f, bound, body) => {
                assert_eq!(f, "f");
                assert!(matches!(bound.as_ref(), Term::Abs(..)));
                assert!(matches!(body.as_ref(), Term::App(..)));
            }
            other => panic!("expected let, got {other:?}"),
        }
    }

    #[test]
    fn role_precedence() {
        let r = parse_role("A | B & !C").unwrap();
        assert_eq!(
            r,
            RoleExpr::atom("A").join(RoleExpr::atom("B").meet(RoleExpr::atom("C").neg()))
        );
        let r = parse_role("(A | B) & C").unwrap();
        assert_eq!(
            r,
            RoleExpr::atom("A").join(RoleExpr::atom("B")).meet(RoleExpr::atom("C"))
        );
        assert_eq!(parse_role("0").unwrap(), RoleExpr::Bottom);
        assert_eq!(parse_role("1").unwrap(), RoleExpr::Top);
    }

    #[test]
    fn type_arrow_is_right_associative() {
        let t = parse_type("Str -> Str -> [A] Str").unwrap();
        assert_eq!(
            t,
            Type::arrow(
                Type::Base(Base::Str),
                Type::arrow(
                    Type::Base(Base::Str),
                    Type::comp(RoleExpr::atom("A"), Type::Base(Base::Str))
                )
            )
        );
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = parse_term("\\x:Str x").unwrap_err();
        assert_eq!(e.pos.line, 1);
        assert!(e.message.contains("expected"));
        let e = parse_term("check {a} x").unwrap_err();
        assert!(e.message.contains("capitalized"));
    }
}
