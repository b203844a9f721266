//! Abstract syntax for terms and types, the concrete grammar, substitution,
//! and the value/term sublanguage check.
//!
//! Values (base values, variables, abstractions, guards, computation units)
//! are a predicate view over [`Term`]; every other form is a destructor that
//! drives evaluation.

mod lexer;
mod parser;
mod printer;

pub use lexer::{ParseError, Pos};
pub use parser::{parse_role, parse_term, parse_type};
pub use printer::{print_term, print_type};

use std::collections::BTreeSet;
use std::fmt;

use crate::roles::{ModDirection, RoleExpr, RoleModifier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Base {
    Unit,
    Int,
    Str,
    Bool,
}

impl Base {
    pub fn name(self) -> &'static str {
        match self {
            Base::Unit => "Unit",
            Base::Int => "Int",
            Base::Str => "Str",
            Base::Bool => "Bool",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    Unit,
    Int(i64),
    Str(String),
    Bool(bool),
}

impl Literal {
    pub fn base(&self) -> Base {
        match self {
            Literal::Unit => Base::Unit,
            Literal::Int(_) => Base::Int,
            Literal::Str(_) => Base::Str,
            Literal::Bool(_) => Base::Bool,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Base(Base),
    Arrow(Box<Type>, Box<Type>),
    /// `{A} T`: a guarded value whose protection must be discharged by a
    /// context dominating `A`.
    Guard(RoleExpr, Box<Type>),
    /// `[A] T`: a suspended computation whose evaluation involves role
    /// effect `A`.
    Comp(RoleExpr, Box<Type>),
}

impl Type {
    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn guarded(role: RoleExpr, body: Type) -> Type {
        Type::Guard(role, Box::new(body))
    }

    pub fn comp(effect: RoleExpr, body: Type) -> Type {
        Type::Comp(effect, Box::new(body))
    }

    /// Every role expression mentioned in the type.
    pub fn roles(&self) -> Vec<&RoleExpr> {
        let mut out = Vec::new();
        self.collect_roles(&mut out);
        out
    }

    fn collect_roles<'a>(&'a self, out: &mut Vec<&'a RoleExpr>) {
        match self {
            Type::Base(_) => {}
            Type::Arrow(d, c) => {
                d.collect_roles(out);
                c.collect_roles(out);
            }
            Type::Guard(r, t) | Type::Comp(r, t) => {
                out.push(r);
                t.collect_roles(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Lit(Literal),
    Var(String),
    Abs(String, Type, Box<Term>),
    App(Box<Term>, Box<Term>),
    Fix(Box<Term>),
    /// `{A} M`: a guarded value.
    Guard(RoleExpr, Box<Term>),
    /// `check M`: discharge a guard, yielding a computation.
    Check(Box<Term>),
    /// `[M]`: the unit of computation.
    Unit(Box<Term>),
    Let(String, Box<Term>, Box<Term>),
    Mod(RoleModifier, Box<Term>),
    If(Box<Term>, Box<Term>, Box<Term>),
    StrEq(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn abs(name: impl Into<String>, annot: Type, body: Term) -> Term {
        Term::Abs(name.into(), annot, Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn fix(t: Term) -> Term {
        Term::Fix(Box::new(t))
    }

    pub fn guard(role: RoleExpr, body: Term) -> Term {
        Term::Guard(role, Box::new(body))
    }

    pub fn check(t: Term) -> Term {
        Term::Check(Box::new(t))
    }

    pub fn unit(t: Term) -> Term {
        Term::Unit(Box::new(t))
    }

    pub fn let_(name: impl Into<String>, bound: Term, body: Term) -> Term {
        Term::Let(name.into(), Box::new(bound), Box::new(body))
    }

    pub fn modif(m: RoleModifier, body: Term) -> Term {
        Term::Mod(m, Box::new(body))
    }

    pub fn ite(c: Term, t: Term, e: Term) -> Term {
        Term::If(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn str_eq(l: Term, r: Term) -> Term {
        Term::StrEq(Box::new(l), Box::new(r))
    }

    /// `as[A] M`, which runs `M` at exactly role `A`: sugar for
    /// `dn[0] (up[A] M)`.
    pub fn at_exactly(role: RoleExpr, body: Term) -> Term {
        Term::modif(
            RoleModifier::dn(RoleExpr::Bottom),
            Term::modif(RoleModifier::up(role), body),
        )
    }

    pub fn unit_lit() -> Term {
        Term::Lit(Literal::Unit)
    }

    pub fn str_lit(s: impl Into<String>) -> Term {
        Term::Lit(Literal::Str(s.into()))
    }

    /// Node count, used by harnesses to bound unfolding growth.
    pub fn size(&self) -> usize {
        1 + match self {
            Term::Lit(_) | Term::Var(_) => 0,
            Term::Abs(_, _, b) => b.size(),
            Term::App(l, r) | Term::StrEq(l, r) | Term::Let(_, l, r) => l.size() + r.size(),
            Term::Fix(m) | Term::Check(m) | Term::Unit(m) | Term::Guard(_, m) | Term::Mod(_, m) => {
                m.size()
            }
            Term::If(c, t, e) => c.size() + t.size() + e.size(),
        }
    }

    /// The five value forms: base values, variables, abstractions, guards,
    /// and computation units.
    pub fn is_value(&self) -> bool {
        matches!(
            self,
            Term::Lit(_) | Term::Var(_) | Term::Abs(..) | Term::Guard(..) | Term::Unit(_)
        )
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        free_vars_into(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every role expression mentioned in the term, including those inside
    /// type annotations and modifier annotations.
    pub fn roles(&self) -> Vec<&RoleExpr> {
        let mut out = Vec::new();
        self.collect_roles(&mut out);
        out
    }

    fn collect_roles<'a>(&'a self, out: &mut Vec<&'a RoleExpr>) {
        match self {
            Term::Lit(_) | Term::Var(_) => {}
            Term::Abs(_, annot, b) => {
                annot.collect_roles(out);
                b.collect_roles(out);
            }
            Term::App(l, r) | Term::StrEq(l, r) => {
                l.collect_roles(out);
                r.collect_roles(out);
            }
            Term::Fix(t) | Term::Check(t) | Term::Unit(t) => t.collect_roles(out),
            Term::Guard(r, t) => {
                out.push(r);
                t.collect_roles(out);
            }
            Term::Let(_, m, n) => {
                m.collect_roles(out);
                n.collect_roles(out);
            }
            Term::Mod(m, t) => {
                out.push(&m.role);
                if let Some(ann) = &m.check_annotation {
                    out.push(ann);
                }
                t.collect_roles(out);
            }
            Term::If(c, t, e) => {
                c.collect_roles(out);
                t.collect_roles(out);
                e.collect_roles(out);
            }
        }
    }

    /// Every upward-modifier role in the term; the amp analyses compare
    /// against `amp` of each of these.
    pub fn up_modifier_roles(&self) -> Vec<&RoleExpr> {
        let mut out = Vec::new();
        self.collect_up_roles(&mut out);
        out
    }

    fn collect_up_roles<'a>(&'a self, out: &mut Vec<&'a RoleExpr>) {
        match self {
            Term::Lit(_) | Term::Var(_) => {}
            Term::Abs(_, _, b) => b.collect_up_roles(out),
            Term::App(l, r) | Term::StrEq(l, r) | Term::Let(_, l, r) => {
                l.collect_up_roles(out);
                r.collect_up_roles(out);
            }
            Term::Fix(t) | Term::Check(t) | Term::Unit(t) | Term::Guard(_, t) => {
                t.collect_up_roles(out)
            }
            Term::Mod(m, t) => {
                if m.direction == ModDirection::Up {
                    out.push(&m.role);
                }
                t.collect_up_roles(out);
            }
            Term::If(c, t, e) => {
                c.collect_up_roles(out);
                t.collect_up_roles(out);
                e.collect_up_roles(out);
            }
        }
    }
}

fn free_vars_into(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match t {
        Term::Lit(_) => {}
        Term::Var(x) => {
            if !bound.iter().any(|b| b == x) {
                out.insert(x.clone());
            }
        }
        Term::Abs(x, _, b) => {
            bound.push(x.clone());
            free_vars_into(b, bound, out);
            bound.pop();
        }
        Term::App(l, r) | Term::StrEq(l, r) => {
            free_vars_into(l, bound, out);
            free_vars_into(r, bound, out);
        }
        Term::Fix(m) | Term::Check(m) | Term::Unit(m) | Term::Guard(_, m) => {
            free_vars_into(m, bound, out)
        }
        Term::Let(x, m, n) => {
            free_vars_into(m, bound, out);
            bound.push(x.clone());
            free_vars_into(n, bound, out);
            bound.pop();
        }
        Term::Mod(_, m) => free_vars_into(m, bound, out),
        Term::If(c, t, e) => {
            free_vars_into(c, bound, out);
            free_vars_into(t, bound, out);
            free_vars_into(e, bound, out);
        }
    }
}

fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut candidate = base.to_string();
    while avoid.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

/// Capture-avoiding substitution of `replacement` for `x` in `body`.
/// Binders in `body` are renamed only when they would capture a free
/// variable of `replacement`; when `x` is not free in `body` the result is
/// `body` itself.
pub fn subst(body: &Term, x: &str, replacement: &Term) -> Term {
    match body {
        Term::Var(y) if y == x => replacement.clone(),
        Term::Var(_) | Term::Lit(_) => body.clone(),
        Term::Abs(y, annot, b) => {
            let (y, b) = subst_under_binder(y, b, x, replacement);
            Term::Abs(y, annot.clone(), Box::new(b))
        }
        Term::App(l, r) => Term::app(subst(l, x, replacement), subst(r, x, replacement)),
        Term::StrEq(l, r) => Term::str_eq(subst(l, x, replacement), subst(r, x, replacement)),
        Term::Fix(m) => Term::fix(subst(m, x, replacement)),
        Term::Check(m) => Term::check(subst(m, x, replacement)),
        Term::Unit(m) => Term::unit(subst(m, x, replacement)),
        Term::Guard(r, m) => Term::guard(r.clone(), subst(m, x, replacement)),
        Term::Let(y, m, n) => {
            let m = subst(m, x, replacement);
            let (y, n) = subst_under_binder(y, n, x, replacement);
            Term::Let(y, Box::new(m), Box::new(n))
        }
        Term::Mod(m, b) => Term::modif(m.clone(), subst(b, x, replacement)),
        Term::If(c, t, e) => Term::ite(
            subst(c, x, replacement),
            subst(t, x, replacement),
            subst(e, x, replacement),
        ),
    }
}

fn subst_under_binder(y: &str, scope: &Term, x: &str, replacement: &Term) -> (String, Term) {
    if y == x {
        return (y.to_string(), scope.clone());
    }
    let scope_fv = scope.free_vars();
    if !scope_fv.contains(x) {
        return (y.to_string(), scope.clone());
    }
    let repl_fv = replacement.free_vars();
    if repl_fv.contains(y) {
        let mut avoid: BTreeSet<String> = repl_fv;
        avoid.extend(scope_fv);
        avoid.insert(x.to_string());
        let fresh = fresh_name(y, &avoid);
        let renamed = subst(scope, y, &Term::var(fresh.clone()));
        (fresh.clone(), subst(&renamed, x, replacement))
    } else {
        (y.to_string(), subst(scope, x, replacement))
    }
}

/// Alpha-equivalence: equality modulo bound-variable names.  Type
/// annotations and roles are compared structurally.
pub fn alpha_equiv(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, stack: &mut Vec<(String, String)>) -> bool {
        match (a, b) {
            (Term::Lit(x), Term::Lit(y)) => x == y,
            (Term::Var(x), Term::Var(y)) => {
                for (bx, by) in stack.iter().rev() {
                    match (bx == x, by == y) {
                        (true, true) => return true,
                        (false, false) => continue,
                        _ => return false,
                    }
                }
                x == y
            }
            (Term::Abs(x, tx, bx), Term::Abs(y, ty, by)) => {
                tx == ty && {
                    stack.push((x.clone(), y.clone()));
                    let r = go(bx, by, stack);
                    stack.pop();
                    r
                }
            }
            (Term::App(l1, r1), Term::App(l2, r2))
            | (Term::StrEq(l1, r1), Term::StrEq(l2, r2)) => {
                go(l1, l2, stack) && go(r1, r2, stack)
            }
            (Term::Fix(x), Term::Fix(y))
            | (Term::Check(x), Term::Check(y))
            | (Term::Unit(x), Term::Unit(y)) => go(x, y, stack),
            (Term::Guard(r1, x), Term::Guard(r2, y)) => r1 == r2 && go(x, y, stack),
            (Term::Let(x, m1, n1), Term::Let(y, m2, n2)) => {
                go(m1, m2, stack) && {
                    stack.push((x.clone(), y.clone()));
                    let r = go(n1, n2, stack);
                    stack.pop();
                    r
                }
            }
            (Term::Mod(m1, x), Term::Mod(m2, y)) => m1 == m2 && go(x, y, stack),
            (Term::If(c1, t1, e1), Term::If(c2, t2, e2)) => {
                go(c1, c2, stack) && go(t1, t2, stack) && go(e1, e2, stack)
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

/// Conformance to the restricted grammar where values and terms are
/// disjoint: unit bodies, application operands, and the arguments of `fix`
/// and `check` must be values, guard bodies must be values, and terms are
/// exactly `[v]`, `v v`, `fix v`, `check v`, `let`, and modifier forms.
pub fn is_sublanguage(t: &Term) -> bool {
    sub_term(t)
}

fn sub_value(t: &Term) -> bool {
    match t {
        Term::Lit(_) | Term::Var(_) => true,
        Term::Abs(_, _, body) => sub_term(body),
        Term::Guard(_, body) => sub_value(body),
        _ => false,
    }
}

fn sub_term(t: &Term) -> bool {
    match t {
        Term::Unit(v) => sub_value(v),
        Term::App(f, a) => sub_value(f) && sub_value(a),
        Term::Fix(v) | Term::Check(v) => sub_value(v),
        Term::Let(_, m, n) => sub_term(m) && sub_term(n),
        Term::Mod(_, m) => sub_term(m),
        _ => false,
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_type(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty() -> Type {
        Type::Base(Base::Str)
    }

    #[test]
    fn value_predicate() {
        assert!(Term::unit_lit().is_value());
        assert!(Term::var("x").is_value());
        assert!(Term::abs("x", ty(), Term::var("x")).is_value());
        assert!(Term::guard(RoleExpr::atom("A"), Term::str_lit("d")).is_value());
        assert!(Term::unit(Term::check(Term::var("x"))).is_value());
        assert!(!Term::check(Term::var("x")).is_value());
        assert!(!Term::app(Term::var("f"), Term::var("x")).is_value());
    }

    #[test]
    fn subst_replaces_free_variable() {
        let n = Term::str_lit("n");
        assert_eq!(subst(&Term::var("x"), "x", &n), n);
        assert_eq!(subst(&Term::var("y"), "x", &n), Term::var("y"));
    }

    #[test]
    fn subst_is_identity_without_free_occurrence() {
        let body = Term::abs("y", ty(), Term::app(Term::var("y"), Term::var("z")));
        assert_eq!(subst(&body, "x", &Term::var("w")), body);
        // Shadowed occurrences are untouched.
        let shadowed = Term::abs("x", ty(), Term::var("x"));
        assert_eq!(subst(&shadowed, "x", &Term::var("w")), shadowed);
    }

    #[test]
    fn subst_avoids_capture() {
        // (\y. x)[x := y]  must rename the binder.
        let body = Term::abs("y", ty(), Term::var("x"));
        let result = subst(&body, "x", &Term::var("y"));
        match &result {
            Term::Abs(fresh, _, inner) => {
                assert_ne!(fresh, "y");
                assert_eq!(**inner, Term::var("y"));
            }
            other => panic!("expected an abstraction, got {other:?}"),
        }
        assert!(alpha_equiv(&result, &Term::abs("q", ty(), Term::var("y"))));
    }

    #[test]
    fn alpha_equivalence_ignores_binder_names() {
        let a = Term::abs("x", ty(), Term::var("x"));
        let b = Term::abs("y", ty(), Term::var("y"));
        assert!(alpha_equiv(&a, &b));
        let free_a = Term::abs("x", ty(), Term::var("z"));
        let free_b = Term::abs("y", ty(), Term::var("w"));
        assert!(!alpha_equiv(&free_a, &free_b));
    }

    #[test]
    fn sublanguage_verdicts() {
        // [x]
        assert!(is_sublanguage(&Term::unit(Term::var("x"))));
        // let x = check v in [x]
        let t = Term::let_("x", Term::check(Term::var("v")), Term::unit(Term::var("x")));
        assert!(is_sublanguage(&t));
        // (\x. x) ((\y. y) z): application argument is not a value.
        let id = Term::abs("x", ty(), Term::var("x"));
        let idy = Term::abs("y", ty(), Term::var("y"));
        let t = Term::app(id, Term::app(idy, Term::var("z")));
        assert!(!is_sublanguage(&t));
    }
}
