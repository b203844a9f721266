//! Canonical single-line formatter.  `parse_term(print_term(t))` returns
//! `t` up to alpha-equivalence (exactly `t` when binder names are already
//! distinct).

use super::{Literal, Term, Type};
use crate::roles::ModDirection;

// Term contexts, loosest to tightest.
const TOP: u8 = 0;
const EQ: u8 = 2;
const PREFIX: u8 = 3;
const APP: u8 = 4;
const ATOM: u8 = 5;

fn term_level(t: &Term) -> u8 {
    match t {
        Term::Abs(..) | Term::Let(..) | Term::If(..) => TOP,
        Term::StrEq(..) => EQ,
        Term::Check(_) | Term::Fix(_) | Term::Mod(..) | Term::Guard(..) => PREFIX,
        Term::App(..) => APP,
        Term::Lit(_) | Term::Var(_) | Term::Unit(_) => ATOM,
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out
}

fn write_term(t: &Term, out: &mut String, min: u8) {
    let parens = term_level(t) < min;
    if parens {
        out.push('(');
    }
    match t {
        Term::Lit(Literal::Unit) => out.push_str("()"),
        Term::Lit(Literal::Int(n)) => out.push_str(&n.to_string()),
        Term::Lit(Literal::Str(s)) => {
            out.push('"');
            out.push_str(&escape(s));
            out.push('"');
        }
        Term::Lit(Literal::Bool(b)) => out.push_str(if *b { "true" } else { "false" }),
        Term::Var(x) => out.push_str(x),
        Term::Abs(x, annot, body) => {
            out.push('\\');
            out.push_str(x);
            out.push(':');
            write_type(annot, out, 0);
            out.push_str(". ");
            write_term(body, out, TOP);
        }
        Term::Let(x, bound, body) => {
            out.push_str("let ");
            out.push_str(x);
            out.push_str(" = ");
            write_term(bound, out, TOP);
            out.push_str(" in ");
            write_term(body, out, TOP);
        }
        Term::If(c, t, e) => {
            out.push_str("if ");
            write_term(c, out, TOP);
            out.push_str(" then ");
            write_term(t, out, TOP);
            out.push_str(" else ");
            write_term(e, out, TOP);
        }
        Term::StrEq(l, r) => {
            write_term(l, out, PREFIX);
            out.push_str(" == ");
            write_term(r, out, PREFIX);
        }
        Term::Check(m) => {
            out.push_str("check ");
            write_term(m, out, PREFIX);
        }
        Term::Fix(m) => {
            out.push_str("fix ");
            write_term(m, out, PREFIX);
        }
        Term::Guard(role, m) => {
            out.push('{');
            out.push_str(&role.to_string());
            out.push_str("} ");
            write_term(m, out, PREFIX);
        }
        Term::Mod(m, body) => {
            out.push_str(match m.direction {
                ModDirection::Up => "up[",
                ModDirection::Dn => "dn[",
            });
            out.push_str(&m.role.to_string());
            out.push(']');
            if let Some(ann) = &m.check_annotation {
                out.push_str("^[");
                out.push_str(&ann.to_string());
                out.push(']');
            }
            out.push(' ');
            write_term(body, out, PREFIX);
        }
        Term::App(f, a) => {
            write_term(f, out, APP);
            out.push(' ');
            write_term(a, out, ATOM);
        }
        Term::Unit(m) => {
            out.push('[');
            write_term(m, out, TOP);
            out.push(']');
        }
    }
    if parens {
        out.push(')');
    }
}

fn type_level(t: &Type) -> u8 {
    match t {
        Type::Arrow(..) => 0,
        Type::Guard(..) | Type::Comp(..) => 1,
        Type::Base(_) => 2,
    }
}

fn write_type(t: &Type, out: &mut String, min: u8) {
    let parens = type_level(t) < min;
    if parens {
        out.push('(');
    }
    match t {
        Type::Base(b) => out.push_str(b.name()),
        Type::Arrow(d, c) => {
            write_type(d, out, 1);
            out.push_str(" -> ");
            write_type(c, out, 0);
        }
        Type::Guard(r, body) => {
            out.push('{');
            out.push_str(&r.to_string());
            out.push_str("} ");
            write_type(body, out, 1);
        }
        Type::Comp(r, body) => {
            out.push('[');
            out.push_str(&r.to_string());
            out.push_str("] ");
            write_type(body, out, 1);
        }
    }
    if parens {
        out.push(')');
    }
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out, TOP);
    out
}

pub fn print_type(t: &Type) -> String {
    let mut out = String::new();
    write_type(t, &mut out, 0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roles::RoleExpr;
    use crate::syntax::{parse_term, parse_type, Base};

    fn roundtrip(src: &str) {
        let t = parse_term(src).unwrap();
        let printed = print_term(&t);
        let reparsed = parse_term(&printed).unwrap();
        assert_eq!(t, reparsed, "printed as `{printed}`");
    }

    #[test]
    fn prints_paper_forms() {
        let t = Term::unit(Term::str_lit("data1"));
        assert_eq!(print_term(&t), "[\"data1\"]");
        let t = Term::guard(RoleExpr::atom("Admin"), Term::str_lit("data1"));
        assert_eq!(print_term(&t), "{Admin} \"data1\"");
    }

    #[test]
    fn parenthesizes_applications() {
        let t = Term::app(Term::check(Term::var("x")), Term::var("y"));
        assert_eq!(print_term(&t), "(check x) y");
        let t = Term::app(Term::var("f"), Term::app(Term::var("g"), Term::var("x")));
        assert_eq!(print_term(&t), "f (g x)");
        roundtrip("(check x) y");
        roundtrip("f (g x)");
    }

    #[test]
    fn roundtrips_nested_modifiers() {
        roundtrip("up[A] dn[B] check x");
        roundtrip("as[B] (f x)");
        roundtrip("up[B]^[amp(B)] [()]");
        roundtrip("dn[0]^[A | B] {A & B} x");
    }

    #[test]
    fn roundtrips_binding_forms() {
        roundtrip("let x = check {A} y in [x]");
        roundtrip("\\x:{A}Str. check x");
        roundtrip("if x == \"file1\" then check {Admin} \"data1\" else [\"nope\"]");
        roundtrip("check {A} () ; [()]");
        roundtrip("(\\x:[A][B]Str. let y = x in y) [[()]]");
    }

    #[test]
    fn prints_types_with_minimal_parens() {
        let t = parse_type("({A} Str -> [B] Str) -> Str").unwrap();
        assert_eq!(print_type(&t), "({A} Str -> [B] Str) -> Str");
        let t = Type::comp(
            RoleExpr::atom("A"),
            Type::arrow(Type::Base(Base::Str), Type::Base(Base::Str)),
        );
        assert_eq!(print_type(&t), "[A] (Str -> Str)");
        let t = parse_type("[A] Str -> Str").unwrap();
        assert_eq!(print_type(&t), "[A] Str -> Str");
    }

    #[test]
    fn string_escapes_roundtrip() {
        let t = Term::str_lit("a\"b\\c\nd");
        let printed = print_term(&t);
        assert_eq!(parse_term(&printed).unwrap(), t);
    }
}
