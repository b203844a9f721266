//! Algorithmic subtyping and type synthesis for the two effect systems, and
//! for the amplification-controlled variant with guard accumulation.
//!
//! The *sufficient* system synthesizes an effect role that, when dominated
//! by the context role, rules out role errors on every path.  The
//! *necessary* system synthesizes an effect that is checked on every path:
//! context roles that do not dominate it can only diverge or hit a role
//! error.  The two differ in the direction of the role comparison in
//! subtyping, in the side condition on downward modifiers, and in whether
//! `if` joins or meets its branch effects.
//!
//! Synthesis is syntax-directed: subsumption is folded into application
//! arguments, fixed points, and branch joining, which yields a principal
//! type for this fragment.

use std::fmt;

use crate::roles::{rminus, RoleAlgebraError, RoleExpr, RoleModifier, RoleUniverse};
use crate::roles::{ModDirection, UniverseBuilder};
use crate::syntax::{Base, Term, Type};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemId {
    /// The effect is sufficient: dominating it avoids role errors.
    Sufficient,
    /// The effect is necessary: it is checked on every path.
    Necessary,
}

impl SystemId {
    pub fn name(self) -> &'static str {
        match self {
            SystemId::Sufficient => "sufficient",
            SystemId::Necessary => "necessary",
        }
    }
}

/// An ordered variable environment; names are unique after parsing
/// alpha-freshens binders, and lookup takes the innermost entry regardless.
#[derive(Debug, Clone, Default)]
pub struct TypingContext {
    entries: Vec<(String, Type)>,
}

impl TypingContext {
    pub fn empty() -> TypingContext {
        TypingContext::default()
    }

    pub fn bind(&self, name: impl Into<String>, ty: Type) -> TypingContext {
        let mut entries = self.entries.clone();
        entries.push((name.into(), ty));
        TypingContext { entries }
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.entries.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t)
    }
}

#[derive(Debug, Clone)]
pub struct TypeError {
    /// Name of the typing rule whose premise or side condition failed.
    pub rule: &'static str,
    pub message: String,
    /// The offending subterm.
    pub at: Term,
    /// For role-comparison failures, the two roles compared.
    pub roles: Option<(RoleExpr, RoleExpr)>,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} at `{}`", self.rule, self.message, self.at)
    }
}

impl std::error::Error for TypeError {}

/// Outcome of a synthesis run, carrying the configuration it ran under.
#[derive(Debug, Clone)]
pub struct TypeReport {
    pub ty: Type,
    pub system: SystemId,
    pub amp_mode: bool,
    pub guard_context: RoleExpr,
}

/// Structural subtyping.  Arrows are contravariant/covariant; guard and
/// computation types are covariant in the body with the role compared
/// downward in the sufficient system (`[A]T <= [1]T`) and upward in the
/// necessary one (`[A]T <= [0]T`).
pub fn subtype(
    sys: SystemId,
    t1: &Type,
    t2: &Type,
    u: &RoleUniverse,
) -> Result<bool, RoleAlgebraError> {
    let role_le = |a: &RoleExpr, b: &RoleExpr| match sys {
        SystemId::Sufficient => u.dominates(b, a),
        SystemId::Necessary => u.dominates(a, b),
    };
    Ok(match (t1, t2) {
        (Type::Base(a), Type::Base(b)) => a == b,
        (Type::Arrow(d1, c1), Type::Arrow(d2, c2)) => {
            subtype(sys, d2, d1, u)? && subtype(sys, c1, c2, u)?
        }
        (Type::Guard(a1, b1), Type::Guard(a2, b2))
        | (Type::Comp(a1, b1), Type::Comp(a2, b2)) => {
            role_le(a1, a2)? && subtype(sys, b1, b2, u)?
        }
        _ => false,
    })
}

/// Structural equality with roles compared up to equivalence.
pub fn types_equiv(t1: &Type, t2: &Type, u: &RoleUniverse) -> Result<bool, RoleAlgebraError> {
    Ok(match (t1, t2) {
        (Type::Base(a), Type::Base(b)) => a == b,
        (Type::Arrow(d1, c1), Type::Arrow(d2, c2)) => {
            types_equiv(d1, d2, u)? && types_equiv(c1, c2, u)?
        }
        (Type::Guard(a1, b1), Type::Guard(a2, b2))
        | (Type::Comp(a1, b1), Type::Comp(a2, b2)) => {
            u.equiv(a1, a2)? && types_equiv(b1, b2, u)?
        }
        _ => false,
    })
}

/// Compatibility: equal types, or computation types over equivalent bodies
/// with any effects.
pub fn compatible(t1: &Type, t2: &Type, u: &RoleUniverse) -> Result<bool, RoleAlgebraError> {
    if let (Type::Comp(_, b1), Type::Comp(_, b2)) = (t1, t2) {
        if types_equiv(b1, b2, u)? {
            return Ok(true);
        }
    }
    types_equiv(t1, t2, u)
}

/// A role dominates every non-computation type, and a computation type
/// exactly when it dominates the effect.
pub fn dominates_type(
    r: &RoleExpr,
    t: &Type,
    u: &RoleUniverse,
) -> Result<bool, RoleAlgebraError> {
    match t {
        Type::Comp(effect, _) => u.dominates(r, effect),
        _ => Ok(true),
    }
}

/// The effect role a diagnostic reports for a type: the effect of a
/// computation type, reached through arrow codomains.
pub fn effect_of(t: &Type) -> Option<&RoleExpr> {
    match t {
        Type::Comp(e, _) => Some(e),
        Type::Arrow(_, cod) => effect_of(cod),
        _ => None,
    }
}

/// Universe covering every role the synthesis of `t` can compare: the
/// term's roles and, in amp mode, `amp` of every upward-modifier role.
pub fn typing_universe(t: &Term, amp: bool) -> Result<RoleUniverse, RoleAlgebraError> {
    let mut b = UniverseBuilder::new();
    for r in t.roles() {
        b.add_role(r);
    }
    if amp {
        for r in t.up_modifier_roles() {
            b.add_amp_of(r);
        }
    }
    b.build()
}

#[derive(Debug, Clone, Copy)]
pub struct SynthOptions {
    pub system: SystemId,
    /// Amplification control: thread an accumulated-guard role, require
    /// authority for upward modifiers.
    pub amp: bool,
    /// Use the single generalized modifier rule of the sufficient system in
    /// place of the separate up/down rules.
    pub mod_star: bool,
}

impl SynthOptions {
    pub fn plain(system: SystemId) -> SynthOptions {
        SynthOptions { system, amp: false, mod_star: false }
    }

    pub fn amp(system: SystemId) -> SynthOptions {
        SynthOptions { system, amp: true, mod_star: false }
    }
}

/// Synthesize the principal type of `t` in the given system.
pub fn synthesize(
    sys: SystemId,
    ctx: &TypingContext,
    t: &Term,
    u: &RoleUniverse,
) -> Result<Type, TypeError> {
    synthesize_with(SynthOptions::plain(sys), ctx, &RoleExpr::Bottom, t, u)
}

/// Synthesize under the amplification-controlled rules, with
/// `guard_context` the accumulated guards on the term (`0` at top level).
pub fn synthesize_amp(
    ctx: &TypingContext,
    guard_context: &RoleExpr,
    t: &Term,
    sys: SystemId,
    u: &RoleUniverse,
) -> Result<Type, TypeError> {
    synthesize_with(SynthOptions::amp(sys), ctx, guard_context, t, u)
}

pub fn synthesize_with(
    opts: SynthOptions,
    ctx: &TypingContext,
    guard_context: &RoleExpr,
    t: &Term,
    u: &RoleUniverse,
) -> Result<Type, TypeError> {
    Synth { u, opts }.synth(ctx, guard_context, t)
}

/// Synthesize and package the result with its configuration.
pub fn check_term(
    opts: SynthOptions,
    t: &Term,
    u: &RoleUniverse,
) -> Result<TypeReport, TypeError> {
    let guard = RoleExpr::Bottom;
    let ty = synthesize_with(opts, &TypingContext::empty(), &guard, t, u)?;
    Ok(TypeReport { ty, system: opts.system, amp_mode: opts.amp, guard_context: guard })
}

struct Synth<'a> {
    u: &'a RoleUniverse,
    opts: SynthOptions,
}

fn fail(rule: &'static str, message: impl Into<String>, at: &Term) -> TypeError {
    TypeError { rule, message: message.into(), at: at.clone(), roles: None }
}

fn fail_roles(
    rule: &'static str,
    message: impl Into<String>,
    at: &Term,
    lhs: &RoleExpr,
    rhs: &RoleExpr,
) -> TypeError {
    TypeError {
        rule,
        message: message.into(),
        at: at.clone(),
        roles: Some((lhs.clone(), rhs.clone())),
    }
}

fn alg(rule: &'static str, e: RoleAlgebraError, at: &Term) -> TypeError {
    TypeError { rule, message: e.to_string(), at: at.clone(), roles: None }
}

impl<'a> Synth<'a> {
    fn sys(&self) -> SystemId {
        self.opts.system
    }

    fn dominates(
        &self,
        a: &RoleExpr,
        b: &RoleExpr,
        rule: &'static str,
        at: &Term,
    ) -> Result<bool, TypeError> {
        self.u.dominates(a, b).map_err(|e| alg(rule, e, at))
    }

    fn synth(&self, ctx: &TypingContext, guard: &RoleExpr, t: &Term) -> Result<Type, TypeError> {
        match t {
            Term::Lit(l) => Ok(Type::Base(l.base())),
            Term::Var(x) => ctx
                .lookup(x)
                .cloned()
                .ok_or_else(|| fail("t-var", format!("unbound variable `{x}`"), t)),
            Term::Abs(x, annot, body) => {
                let cod = self.synth(&ctx.bind(x.clone(), annot.clone()), guard, body)?;
                Ok(Type::arrow(annot.clone(), cod))
            }
            Term::App(f, a) => {
                let fty = self.synth(ctx, guard, f)?;
                let Type::Arrow(dom, cod) = fty else {
                    return Err(fail(
                        "t-app",
                        format!("applied a term of non-function type `{fty}`"),
                        f,
                    ));
                };
                let aty = self.synth(ctx, guard, a)?;
                if !self
                    .subtype_or(&aty, &dom, "t-app", a)?
                {
                    return Err(fail(
                        "t-app",
                        format!("argument type `{aty}` is not a subtype of parameter type `{dom}`"),
                        a,
                    ));
                }
                Ok(*cod)
            }
            Term::Fix(m) => {
                let mty = self.synth(ctx, guard, m)?;
                let Type::Arrow(dom, cod) = &mty else {
                    return Err(fail(
                        "t-fix",
                        format!("fixed point of a term of non-function type `{mty}`"),
                        m,
                    ));
                };
                if !self.subtype_or(cod, dom, "t-fix", m)? {
                    return Err(fail(
                        "t-fix",
                        format!("fixed point needs `{cod}` to be a subtype of `{dom}`"),
                        m,
                    ));
                }
                Ok((**cod).clone())
            }
            Term::Guard(r, body) => {
                let inner_guard = if self.opts.amp {
                    guard.clone().join(r.clone())
                } else {
                    guard.clone()
                };
                let bty = self.synth(ctx, &inner_guard, body)?;
                Ok(Type::guarded(r.clone(), bty))
            }
            Term::Check(m) => {
                let mty = self.synth(ctx, guard, m)?;
                let Type::Guard(r, body) = mty else {
                    return Err(fail(
                        "t-chk",
                        format!("check of a term of non-guard type `{mty}`"),
                        m,
                    ));
                };
                Ok(Type::Comp(r, body))
            }
            Term::Unit(m) => {
                let mty = self.synth(ctx, guard, m)?;
                Ok(Type::comp(RoleExpr::Bottom, mty))
            }
            Term::Let(x, bound, body) => {
                let bty = self.synth(ctx, guard, bound)?;
                let Type::Comp(e1, t1) = bty else {
                    return Err(fail(
                        "t-bind",
                        format!("bound a term of non-computation type `{bty}`"),
                        bound,
                    ));
                };
                let sty = self.synth(&ctx.bind(x.clone(), *t1), guard, body)?;
                let Type::Comp(e2, t2) = sty else {
                    return Err(fail(
                        "t-bind",
                        format!("let body has non-computation type `{sty}`"),
                        body,
                    ));
                };
                Ok(Type::Comp(e1.join(e2), t2))
            }
            Term::Mod(m, body) => self.synth_mod(ctx, guard, t, m, body),
            Term::If(c, t1, t2) => {
                let cty = self.synth(ctx, guard, c)?;
                if cty != Type::Base(Base::Bool) {
                    return Err(fail(
                        "t-if",
                        format!("`if` scrutinee has type `{cty}`, expected `Bool`"),
                        c,
                    ));
                }
                let lty = self.synth(ctx, guard, t1)?;
                let rty = self.synth(ctx, guard, t2)?;
                let (Type::Comp(e1, b1), Type::Comp(e2, b2)) = (&lty, &rty) else {
                    return Err(fail(
                        "t-if",
                        format!("`if` branches must be computations, got `{lty}` and `{rty}`"),
                        t,
                    ));
                };
                if !types_equiv(b1, b2, self.u).map_err(|e| alg("t-if", e, t))? {
                    return Err(fail(
                        "t-if",
                        format!("`if` branches produce different types `{b1}` and `{b2}`"),
                        t,
                    ));
                }
                let effect = match self.sys() {
                    SystemId::Sufficient => e1.clone().join(e2.clone()),
                    SystemId::Necessary => e1.clone().meet(e2.clone()),
                };
                Ok(Type::comp(effect, (**b1).clone()))
            }
            Term::StrEq(l, r) => {
                for side in [l, r] {
                    let ty = self.synth(ctx, guard, side)?;
                    if ty != Type::Base(Base::Str) {
                        return Err(fail(
                            "t-eq",
                            format!("`==` compares strings, got `{ty}`"),
                            side,
                        ));
                    }
                }
                Ok(Type::Base(Base::Bool))
            }
        }
    }

    fn subtype_or(
        &self,
        t1: &Type,
        t2: &Type,
        rule: &'static str,
        at: &Term,
    ) -> Result<bool, TypeError> {
        subtype(self.sys(), t1, t2, self.u).map_err(|e| alg(rule, e, at))
    }

    fn synth_mod(
        &self,
        ctx: &TypingContext,
        guard: &RoleExpr,
        whole: &Term,
        m: &RoleModifier,
        body: &Term,
    ) -> Result<Type, TypeError> {
        let checked = m.check_annotation.is_some();
        let rule_name = match (m.direction, checked) {
            (ModDirection::Up, false) => {
                if self.opts.amp {
                    "t-mod-up'"
                } else {
                    "t-mod-up"
                }
            }
            (ModDirection::Up, true) => "t-mod-up-checked",
            (ModDirection::Dn, false) => "t-mod-dn",
            (ModDirection::Dn, true) => "t-mod-dn-checked",
        };
        let bty = self.synth(ctx, guard, body)?;
        let Type::Comp(effect, inner) = bty else {
            return Err(fail(
                rule_name,
                format!("modifier body has non-computation type `{bty}`"),
                body,
            ));
        };

        if self.opts.amp && m.direction == ModDirection::Up {
            let amp_role = m.role.clone().amp();
            let authority = match &m.check_annotation {
                None => guard.clone(),
                Some(d) => guard.clone().join(d.clone()),
            };
            if !self.dominates(&authority, &amp_role, rule_name, whole)? {
                return Err(fail_roles(
                    rule_name,
                    format!(
                        "rights amplification is not justified: authority `{authority}` does not dominate `{amp_role}`"
                    ),
                    whole,
                    &authority,
                    &amp_role,
                ));
            }
        }

        if self.opts.mod_star && self.sys() == SystemId::Sufficient {
            // Generalized rule: the body must type at [m[B]]T, and the
            // modified term then types at [B]T for the least such B.
            return match m.direction {
                ModDirection::Up => {
                    let least = rminus(&effect, &m.role);
                    let premise = m.role.clone().join(least.clone());
                    debug_assert!(self.u.dominates(&premise, &effect).unwrap_or(false));
                    Ok(Type::Comp(least, inner))
                }
                ModDirection::Dn => {
                    if !self.dominates(&m.role, &effect, "t-mod-*", whole)? {
                        return Err(fail_roles(
                            "t-mod-*",
                            format!(
                                "no role B satisfies `{} & B >= {effect}`",
                                m.role
                            ),
                            whole,
                            &m.role,
                            &effect,
                        ));
                    }
                    Ok(Type::Comp(effect, inner))
                }
            };
        }

        match m.direction {
            ModDirection::Up => Ok(Type::Comp(rminus(&effect, &m.role), inner)),
            ModDirection::Dn => {
                if self.sys() == SystemId::Sufficient
                    && !self.dominates(&m.role, &effect, rule_name, whole)?
                {
                    return Err(fail_roles(
                        rule_name,
                        format!(
                            "restriction to `{}` does not dominate the body effect `{effect}`",
                            m.role
                        ),
                        whole,
                        &m.role,
                        &effect,
                    ));
                }
                Ok(Type::Comp(effect, inner))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, parse_type};

    fn u2() -> RoleUniverse {
        RoleUniverse::from_atoms(["A", "B"])
    }

    fn synth_str(sys: SystemId, src: &str) -> Result<Type, TypeError> {
        let t = parse_term(src).unwrap();
        let u = typing_universe(&t, false).unwrap();
        synthesize(sys, &TypingContext::empty(), &t, &u)
    }

    fn assert_type(sys: SystemId, src: &str, expected: &str) {
        let ty = synth_str(sys, src).unwrap();
        let want = parse_type(expected).unwrap();
        let t = parse_term(src).unwrap();
        let mut b = UniverseBuilder::new();
        for r in t.roles() {
            b.add_role(r);
        }
        for r in want.roles() {
            b.add_role(r);
        }
        let u = b.build().unwrap();
        assert!(
            types_equiv(&ty, &want, &u).unwrap(),
            "{src} : {ty}, expected {want}"
        );
    }

    #[test]
    fn subtyping_direction_differs_between_systems() {
        let u = u2();
        let a_str = parse_type("[A] Str").unwrap();
        let top_str = parse_type("[1] Str").unwrap();
        let bot_str = parse_type("[0] Str").unwrap();
        assert!(subtype(SystemId::Sufficient, &a_str, &top_str, &u).unwrap());
        assert!(!subtype(SystemId::Sufficient, &a_str, &bot_str, &u).unwrap());
        assert!(subtype(SystemId::Necessary, &a_str, &bot_str, &u).unwrap());
        assert!(!subtype(SystemId::Necessary, &a_str, &top_str, &u).unwrap());
        // Reflexivity.
        for sys in [SystemId::Sufficient, SystemId::Necessary] {
            assert!(subtype(sys, &a_str, &a_str, &u).unwrap());
        }
    }

    #[test]
    fn arrow_is_contravariant() {
        let u = u2();
        let f1 = parse_type("[1] Str -> [A] Str").unwrap();
        let f2 = parse_type("[A] Str -> [1] Str").unwrap();
        assert!(subtype(SystemId::Sufficient, &f1, &f2, &u).unwrap());
        assert!(!subtype(SystemId::Sufficient, &f2, &f1, &u).unwrap());
    }

    #[test]
    fn dominates_type_examples() {
        let u = u2();
        let arrow = parse_type("Str -> Str").unwrap();
        assert!(dominates_type(&RoleExpr::Bottom, &arrow, &u).unwrap());
        let comp = parse_type("[A | B] Str").unwrap();
        assert!(!dominates_type(&RoleExpr::atom("A"), &comp, &u).unwrap());
        let comp_b = parse_type("[B] Str").unwrap();
        assert!(dominates_type(&RoleExpr::Top, &comp_b, &u).unwrap());
    }

    #[test]
    fn compatibility_examples() {
        let u = u2();
        let a = parse_type("[A] Str").unwrap();
        let b = parse_type("[B] Str").unwrap();
        assert!(compatible(&a, &b, &u).unwrap());
        assert!(compatible(&a, &a, &u).unwrap());
        let arrow = parse_type("Str -> Str").unwrap();
        assert!(!compatible(&arrow, &a, &u).unwrap());
    }

    #[test]
    fn simple_function_typings() {
        use SystemId::*;
        for sys in [Sufficient, Necessary] {
            assert_type(sys, "\\x:Str. x", "Str -> Str");
            assert_type(sys, "\\x:Str. [x]", "Str -> [0] Str");
            assert_type(sys, "\\x:[A][B]Str. let y = x in y", "[A][B]Str -> [A | B] Str");
            assert_type(sys, "\\x:Str. {A} x", "Str -> {A} Str");
            assert_type(sys, "\\a:{A}Str. check a", "{A}Str -> [A] Str");
            assert_type(sys, "\\x:[A]Str. up[B] x", "[A]Str -> [A & !B] Str");
        }
        // dn keeps the effect; the sufficient system wants B >= A.
        assert_type(Sufficient, "\\x:[A & B]Str. dn[B] x", "[A & B]Str -> [A & B] Str");
        assert_type(Necessary, "\\x:[A]Str. dn[B] x", "[A]Str -> [A] Str");
    }

    #[test]
    fn dn_side_condition_only_in_sufficient() {
        let src = "\\x:[A]Str. dn[B] x";
        let err = synth_str(SystemId::Sufficient, src).unwrap_err();
        assert_eq!(err.rule, "t-mod-dn");
        assert!(err.roles.is_some());
        assert!(synth_str(SystemId::Necessary, src).is_ok());
    }

    #[test]
    fn nonterminating_term_types_at_any_type() {
        assert_type(SystemId::Sufficient, "fix (\\x:[A]Str. x)", "[A] Str");
    }

    #[test]
    fn fix_accepts_subtype_codomain() {
        // fix of \x:[1]Str. body where body synthesizes [A]Str <= [1]Str.
        let src = "fix (\\x:[1]Str. check {A} \"s\")";
        let ty = synth_str(SystemId::Sufficient, src).unwrap();
        assert_eq!(ty, parse_type("[A] Str").unwrap());
        let err = synth_str(SystemId::Necessary, src).unwrap_err();
        assert_eq!(err.rule, "t-fix");
    }

    #[test]
    fn if_joins_or_meets_branch_effects() {
        let src = "\\c:Bool. if c then check {A} \"x\" else check {B} \"y\"";
        assert_type(SystemId::Sufficient, src, "Bool -> [A | B] Str");
        assert_type(SystemId::Necessary, src, "Bool -> [A & B] Str");
    }

    #[test]
    fn rule_named_errors() {
        let err = synth_str(SystemId::Sufficient, "x").unwrap_err();
        assert_eq!(err.rule, "t-var");
        let err = synth_str(SystemId::Sufficient, "check [()]").unwrap_err();
        assert_eq!(err.rule, "t-chk");
        let err = synth_str(SystemId::Sufficient, "let x = \\y:Str. y in [x]").unwrap_err();
        assert_eq!(err.rule, "t-bind");
        let err = synth_str(SystemId::Sufficient, "() ()").unwrap_err();
        assert_eq!(err.rule, "t-app");
        let err =
            synth_str(SystemId::Sufficient, "(\\x:[A]Str. x) (check {B} \"s\")").unwrap_err();
        assert_eq!(err.rule, "t-app");
    }

    #[test]
    fn amp_requires_authority_for_up() {
        let t = parse_term("up[A] [()]").unwrap();
        let u = typing_universe(&t, true).unwrap();
        let err = synthesize_amp(
            &TypingContext::empty(),
            &RoleExpr::Bottom,
            &t,
            SystemId::Sufficient,
            &u,
        )
        .unwrap_err();
        assert_eq!(err.rule, "t-mod-up'");
        let (lhs, rhs) = err.roles.unwrap();
        assert_eq!(lhs, RoleExpr::Bottom);
        assert_eq!(rhs, RoleExpr::atom("A").amp());
    }

    #[test]
    fn checked_up_supplies_authority() {
        let t = parse_term("up[A]^[amp(A)] [()]").unwrap();
        let u = typing_universe(&t, true).unwrap();
        let ty = synthesize_amp(
            &TypingContext::empty(),
            &RoleExpr::Bottom,
            &t,
            SystemId::Sufficient,
            &u,
        )
        .unwrap();
        assert!(types_equiv(&ty, &parse_type("[0] Unit").unwrap(), &u).unwrap());
    }

    #[test]
    fn guards_accumulate_authority() {
        // The guard role amp(A) justifies the unchecked up[A] inside.
        let t = parse_term("{amp(A)} up[A] [()]").unwrap();
        let u = typing_universe(&t, true).unwrap();
        let ty = synthesize_amp(
            &TypingContext::empty(),
            &RoleExpr::Bottom,
            &t,
            SystemId::Sufficient,
            &u,
        )
        .unwrap();
        assert!(matches!(ty, Type::Guard(..)));
        // Without the guard it is rejected.
        let t = parse_term("up[A] [()]").unwrap();
        assert!(synthesize_amp(
            &TypingContext::empty(),
            &RoleExpr::Bottom,
            &t,
            SystemId::Sufficient,
            &u
        )
        .is_err());
    }

    #[test]
    fn mod_star_agrees_on_examples() {
        let u = u2();
        for (src, sysok) in [
            ("\\x:[A]Str. up[B] x", true),
            ("\\x:[A & B]Str. dn[B] x", true),
            ("\\x:[A]Str. dn[B] x", false),
        ] {
            let t = parse_term(src).unwrap();
            let normal = synthesize(SystemId::Sufficient, &TypingContext::empty(), &t, &u);
            let star = synthesize_with(
                SynthOptions { system: SystemId::Sufficient, amp: false, mod_star: true },
                &TypingContext::empty(),
                &RoleExpr::Bottom,
                &t,
                &u,
            );
            assert_eq!(normal.is_ok(), sysok, "{src}");
            assert_eq!(normal.is_ok(), star.is_ok(), "{src}");
            if let (Ok(a), Ok(b)) = (normal, star) {
                assert!(types_equiv(&a, &b, &u).unwrap(), "{src}");
            }
        }
    }

    #[test]
    fn effect_reaches_through_arrows() {
        let ty = parse_type("Str -> [A] Str").unwrap();
        assert_eq!(effect_of(&ty), Some(&RoleExpr::atom("A")));
        assert_eq!(effect_of(&parse_type("Str").unwrap()), None);
    }
}
