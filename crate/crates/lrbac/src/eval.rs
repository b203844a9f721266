//! Deterministic small-step evaluation under a context role.
//!
//! The context role is consulted only when a `check` discharges a guard; a
//! downward modifier meets its role into the context for the extent of its
//! body, an upward modifier joins it, and both are discarded once the body
//! is a value.  Evaluation is call-by-name at applications and bindings: the
//! argument of an application and the body of a discharged computation are
//! substituted unevaluated.
//!
//! With `amp_mode` on, discharging `check ({B} M)` yields `[mark(B, M)]`,
//! stamping every role modifier in `M` with the authority `B` that justified
//! it, and every step first scans the term for a role-modification error: an
//! upward modifier in evaluation position whose annotation does not dominate
//! `amp` of its role.

use crate::roles::{
    apply_modifier, ModDirection, RoleAlgebraError, RoleExpr, RoleModifier, RoleUniverse,
    UniverseBuilder,
};
use crate::syntax::{subst, Literal, Term};

pub const DEFAULT_FUEL: u64 = 10_000;

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub context_role: RoleExpr,
    pub fuel: u64,
    pub amp_mode: bool,
    pub record_trace: bool,
}

impl EvalConfig {
    pub fn new(context_role: RoleExpr) -> EvalConfig {
        EvalConfig { context_role, fuel: DEFAULT_FUEL, amp_mode: false, record_trace: false }
    }

    pub fn with_fuel(mut self, fuel: u64) -> EvalConfig {
        self.fuel = fuel;
        self
    }

    pub fn with_amp(mut self, amp: bool) -> EvalConfig {
        self.amp_mode = amp;
        self
    }

    pub fn with_trace(mut self, trace: bool) -> EvalConfig {
        self.record_trace = trace;
        self
    }
}

/// Result of a single step attempt.  Exactly one variant applies to any
/// `(role, term)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    Reduced(Term),
    AtValue,
    RoleError { needed: RoleExpr, had: RoleExpr },
    AmpError { site: Term },
    Stuck { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutcomeKind {
    Value(Term),
    RoleError { needed: RoleExpr, had: RoleExpr },
    AmpError { site: Term },
    Stuck { reason: String },
    FuelExhausted { last: Term },
}

impl OutcomeKind {
    pub fn is_value(&self) -> bool {
        matches!(self, OutcomeKind::Value(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            OutcomeKind::Value(_) => "value",
            OutcomeKind::RoleError { .. } => "role_error",
            OutcomeKind::AmpError { .. } => "amp_error",
            OutcomeKind::Stuck { .. } => "stuck",
            OutcomeKind::FuelExhausted { .. } => "fuel_exhausted",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub kind: OutcomeKind,
    pub steps: u64,
    /// Initial term plus every successor, when requested.
    pub trace: Option<Vec<Term>>,
}

/// Universe covering every role the evaluation of `t` under `cfg` can
/// compare: the term's roles, the context role, and (in amp mode) `amp` of
/// every upward-modifier role.
pub fn eval_universe(cfg: &EvalConfig, t: &Term) -> Result<RoleUniverse, RoleAlgebraError> {
    let mut b = UniverseBuilder::new();
    for r in t.roles() {
        b.add_role(r);
    }
    b.add_role(&cfg.context_role);
    if cfg.amp_mode {
        for r in t.up_modifier_roles() {
            b.add_amp_of(r);
        }
    }
    b.build()
}

/// Stamp the authority `a` onto every role modifier of `t`: unchecked
/// modifiers gain the annotation `a`, checked ones have `a` joined in.
/// Homomorphic on every other form.
pub fn mark(a: &RoleExpr, t: &Term) -> Term {
    match t {
        Term::Lit(_) | Term::Var(_) => t.clone(),
        Term::Abs(x, annot, b) => Term::Abs(x.clone(), annot.clone(), Box::new(mark(a, b))),
        Term::App(f, arg) => Term::app(mark(a, f), mark(a, arg)),
        Term::Fix(m) => Term::fix(mark(a, m)),
        Term::Guard(r, m) => Term::guard(r.clone(), mark(a, m)),
        Term::Check(m) => Term::check(mark(a, m)),
        Term::Unit(m) => Term::unit(mark(a, m)),
        Term::Let(x, m, n) => Term::Let(x.clone(), Box::new(mark(a, m)), Box::new(mark(a, n))),
        Term::Mod(m, body) => {
            let annotation = match &m.check_annotation {
                None => a.clone(),
                Some(b) => a.clone().join(b.clone()),
            };
            let marked = RoleModifier {
                direction: m.direction,
                role: m.role.clone(),
                check_annotation: Some(annotation),
            };
            Term::Mod(marked, Box::new(mark(a, body)))
        }
        Term::If(c, t1, t2) => Term::ite(mark(a, c), mark(a, t1), mark(a, t2)),
        Term::StrEq(l, r) => Term::str_eq(mark(a, l), mark(a, r)),
    }
}

/// First role-modification error site in evaluation position: an unchecked
/// `up[B]`, or a checked `up[B]^[C]` whose annotation does not dominate
/// `amp(B)`.  Evaluation positions are the function of an application, the
/// bound term of a `let`, and the bodies of `check` and modifiers; the
/// scrutinee positions of `if`/`==` are treated the same way.
pub fn find_amp_error<'t>(
    u: &RoleUniverse,
    t: &'t Term,
) -> Result<Option<&'t Term>, RoleAlgebraError> {
    match t {
        Term::Mod(m, body) => {
            if m.direction == ModDirection::Up {
                let justified = match &m.check_annotation {
                    None => false,
                    Some(c) => u.dominates(c, &m.role.clone().amp())?,
                };
                if !justified {
                    return Ok(Some(t));
                }
            }
            find_amp_error(u, body)
        }
        Term::App(f, _) => find_amp_error(u, f),
        Term::Let(_, bound, _) => find_amp_error(u, bound),
        Term::Check(m) => find_amp_error(u, m),
        Term::If(c, _, _) => find_amp_error(u, c),
        Term::StrEq(l, r) => {
            if !l.is_value() {
                find_amp_error(u, l)
            } else {
                find_amp_error(u, r)
            }
        }
        _ => Ok(None),
    }
}

/// Whether `t` has a role-modification error.
pub fn amp_error(u: &RoleUniverse, t: &Term) -> Result<bool, RoleAlgebraError> {
    Ok(find_amp_error(u, t)?.is_some())
}

/// One small step of `t` under `cfg.context_role`.  In amp mode the term is
/// scanned for a role-modification error first.
pub fn step(
    cfg: &EvalConfig,
    u: &RoleUniverse,
    t: &Term,
) -> Result<StepResult, RoleAlgebraError> {
    if cfg.amp_mode {
        if let Some(site) = find_amp_error(u, t)? {
            return Ok(StepResult::AmpError { site: site.clone() });
        }
    }
    step_inner(&cfg.context_role, cfg.amp_mode, u, t)
}

fn step_inner(
    role: &RoleExpr,
    amp_mode: bool,
    u: &RoleUniverse,
    t: &Term,
) -> Result<StepResult, RoleAlgebraError> {
    use StepResult::*;
    if t.is_value() {
        return Ok(AtValue);
    }
    Ok(match t {
        Term::App(f, a) => {
            if f.is_value() {
                match f.as_ref() {
                    Term::Abs(x, _, body) => Reduced(subst(body, x, a)),
                    other => Stuck { reason: format!("cannot apply non-function value `{other}`") },
                }
            } else {
                match step_inner(role, amp_mode, u, f)? {
                    Reduced(f2) => Reduced(Term::app(f2, (**a).clone())),
                    other => other,
                }
            }
        }
        Term::Fix(m) => {
            if m.is_value() {
                match m.as_ref() {
                    Term::Abs(x, _, body) => Reduced(subst(body, x, t)),
                    other => Stuck {
                        reason: format!("cannot take a fixed point of non-function value `{other}`"),
                    },
                }
            } else {
                match step_inner(role, amp_mode, u, m)? {
                    Reduced(m2) => Reduced(Term::fix(m2)),
                    other => other,
                }
            }
        }
        Term::Check(m) => {
            if m.is_value() {
                match m.as_ref() {
                    Term::Guard(needed, inner) => {
                        if u.dominates(role, needed)? {
                            let body =
                                if amp_mode { mark(needed, inner) } else { (**inner).clone() };
                            Reduced(Term::unit(body))
                        } else {
                            RoleError { needed: needed.clone(), had: role.clone() }
                        }
                    }
                    other => Stuck { reason: format!("cannot check non-guard value `{other}`") },
                }
            } else {
                match step_inner(role, amp_mode, u, m)? {
                    Reduced(m2) => Reduced(Term::check(m2)),
                    other => other,
                }
            }
        }
        Term::Let(x, bound, body) => {
            if bound.is_value() {
                match bound.as_ref() {
                    Term::Unit(inner) => Reduced(subst(body, x, inner)),
                    other => Stuck {
                        reason: format!("cannot bind non-computation value `{other}`"),
                    },
                }
            } else {
                match step_inner(role, amp_mode, u, bound)? {
                    Reduced(b2) => Reduced(Term::Let(x.clone(), Box::new(b2), body.clone())),
                    other => other,
                }
            }
        }
        Term::Mod(m, body) => {
            if body.is_value() {
                Reduced((**body).clone())
            } else {
                let inner_role = apply_modifier(m, role);
                match step_inner(&inner_role, amp_mode, u, body)? {
                    Reduced(b2) => Reduced(Term::Mod(m.clone(), Box::new(b2))),
                    other => other,
                }
            }
        }
        Term::If(c, t1, t2) => {
            if c.is_value() {
                match c.as_ref() {
                    Term::Lit(Literal::Bool(true)) => Reduced((**t1).clone()),
                    Term::Lit(Literal::Bool(false)) => Reduced((**t2).clone()),
                    other => Stuck {
                        reason: format!("`if` scrutinee is not a boolean: `{other}`"),
                    },
                }
            } else {
                match step_inner(role, amp_mode, u, c)? {
                    Reduced(c2) => Reduced(Term::ite(c2, (**t1).clone(), (**t2).clone())),
                    other => other,
                }
            }
        }
        Term::StrEq(l, r) => {
            if !l.is_value() {
                match step_inner(role, amp_mode, u, l)? {
                    Reduced(l2) => Reduced(Term::str_eq(l2, (**r).clone())),
                    other => other,
                }
            } else if !r.is_value() {
                match step_inner(role, amp_mode, u, r)? {
                    Reduced(r2) => Reduced(Term::str_eq((**l).clone(), r2)),
                    other => other,
                }
            } else {
                match (l.as_ref(), r.as_ref()) {
                    (Term::Lit(Literal::Str(a)), Term::Lit(Literal::Str(b))) => {
                        Reduced(Term::Lit(Literal::Bool(a == b)))
                    }
                    _ => Stuck { reason: format!("`==` compares strings, got `{l}` == `{r}`") },
                }
            }
        }
        Term::Lit(_) | Term::Var(_) | Term::Abs(..) | Term::Guard(..) | Term::Unit(_) => {
            unreachable!("values are handled before the dispatch")
        }
    })
}

/// Iterate [`step`] until a value, an error, or fuel exhaustion.  The
/// universe is built from the term and context role.
pub fn evaluate(cfg: &EvalConfig, t: &Term) -> Result<Outcome, RoleAlgebraError> {
    let u = eval_universe(cfg, t)?;
    evaluate_in(cfg, &u, t)
}

/// As [`evaluate`], over a caller-supplied universe (which must cover the
/// term's roles and the context role).
pub fn evaluate_in(
    cfg: &EvalConfig,
    u: &RoleUniverse,
    t: &Term,
) -> Result<Outcome, RoleAlgebraError> {
    let mut current = t.clone();
    let mut trace = cfg.record_trace.then(|| vec![current.clone()]);
    let mut steps = 0u64;
    loop {
        if cfg.amp_mode {
            if let Some(site) = find_amp_error(u, &current)? {
                return Ok(Outcome {
                    kind: OutcomeKind::AmpError { site: site.clone() },
                    steps,
                    trace,
                });
            }
        }
        match step_inner(&cfg.context_role, cfg.amp_mode, u, &current)? {
            StepResult::AtValue => {
                return Ok(Outcome { kind: OutcomeKind::Value(current), steps, trace })
            }
            StepResult::Reduced(next) => {
                if steps >= cfg.fuel {
                    return Ok(Outcome {
                        kind: OutcomeKind::FuelExhausted { last: current },
                        steps,
                        trace,
                    });
                }
                steps += 1;
                if let Some(tr) = trace.as_mut() {
                    tr.push(next.clone());
                }
                current = next;
            }
            StepResult::RoleError { needed, had } => {
                return Ok(Outcome { kind: OutcomeKind::RoleError { needed, had }, steps, trace })
            }
            StepResult::AmpError { site } => {
                return Ok(Outcome { kind: OutcomeKind::AmpError { site }, steps, trace })
            }
            StepResult::Stuck { reason } => {
                return Ok(Outcome { kind: OutcomeKind::Stuck { reason }, steps, trace })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, print_term, Type};

    fn atom(n: &str) -> RoleExpr {
        RoleExpr::atom(n)
    }

    fn eval_under(role: RoleExpr, src: &str) -> Outcome {
        let t = parse_term(src).unwrap();
        evaluate(&EvalConfig::new(role), &t).unwrap()
    }

    #[test]
    fn modifier_around_value_is_discarded() {
        let t = parse_term("up[A] [()]").unwrap();
        let cfg = EvalConfig::new(RoleExpr::Bottom);
        let u = eval_universe(&cfg, &t).unwrap();
        assert_eq!(
            step(&cfg, &u, &t).unwrap(),
            StepResult::Reduced(parse_term("[()]").unwrap())
        );
    }

    #[test]
    fn check_requires_dominating_context() {
        let t = parse_term("check {B} ()").unwrap();
        let cfg = EvalConfig::new(atom("A"));
        let u = eval_universe(&cfg, &t).unwrap();
        assert_eq!(
            step(&cfg, &u, &t).unwrap(),
            StepResult::RoleError { needed: atom("B"), had: atom("A") }
        );
        let out = eval_under(atom("B"), "check {B} ()");
        assert_eq!(out.kind, OutcomeKind::Value(parse_term("[()]").unwrap()));
    }

    #[test]
    fn binding_substitutes_unevaluated() {
        let t = parse_term("let x = [check {A} ()] in [()]").unwrap();
        let cfg = EvalConfig::new(RoleExpr::Bottom);
        let u = eval_universe(&cfg, &t).unwrap();
        // r-bind fires immediately; the guarded check inside the unit is
        // dropped without ever being evaluated.
        match step(&cfg, &u, &t).unwrap() {
            StepResult::Reduced(next) => assert_eq!(next, parse_term("[()]").unwrap()),
            other => panic!("expected reduction, got {other:?}"),
        }
    }

    #[test]
    fn application_is_call_by_name() {
        // The failing check in argument position is discarded unevaluated.
        let out = eval_under(RoleExpr::Bottom, "(\\x:[A]Unit. [()]) (check {A} ())");
        assert_eq!(out.kind, OutcomeKind::Value(parse_term("[()]").unwrap()));
        assert_eq!(out.steps, 1);
    }

    #[test]
    fn from_example_succeeds_under_a() {
        // A guarded function that runs any computation at exactly B.
        let out = eval_under(
            atom("A"),
            "let c = check {A} (\\x:[B]Unit. as[B] x) in c (check {B} ())",
        );
        assert_eq!(out.kind, OutcomeKind::Value(parse_term("[()]").unwrap()));
    }

    #[test]
    fn restricted_test_errors_in_any_context() {
        let t = parse_term("dn[!B] check {B} ()").unwrap();
        let u = RoleUniverse::from_atoms(["B"]);
        for role in u.enumerate_roles(usize::MAX).unwrap() {
            let cfg = EvalConfig::new(role.clone());
            let out = evaluate_in(&cfg, &u, &t).unwrap();
            assert!(
                matches!(out.kind, OutcomeKind::RoleError { .. }),
                "expected role error under {role}, got {:?}",
                out.kind
            );
        }
    }

    #[test]
    fn stuck_on_shape_errors() {
        let out = eval_under(RoleExpr::Top, "check (\\x:Str. x)");
        assert!(matches!(out.kind, OutcomeKind::Stuck { .. }));
        let out = eval_under(RoleExpr::Top, "let x = \\y:Str. y in x");
        assert!(matches!(out.kind, OutcomeKind::Stuck { .. }));
        let out = eval_under(RoleExpr::Top, "() ()");
        assert!(matches!(out.kind, OutcomeKind::Stuck { .. }));
        let out = eval_under(RoleExpr::Top, "if [()] then [()] else [()]");
        assert!(matches!(out.kind, OutcomeKind::Stuck { .. }));
    }

    #[test]
    fn fuel_exhaustion_reports_last_term() {
        let t = parse_term("fix (\\x:[A]Unit. x)").unwrap();
        let cfg = EvalConfig::new(RoleExpr::Top).with_fuel(25);
        let out = evaluate(&cfg, &t).unwrap();
        match out.kind {
            OutcomeKind::FuelExhausted { last } => assert_eq!(last, t),
            other => panic!("expected fuel exhaustion, got {other:?}"),
        }
        assert_eq!(out.steps, 25);
    }

    #[test]
    fn trace_records_every_step() {
        let t = parse_term("(\\x:Str. x) \"s\"").unwrap();
        let cfg = EvalConfig::new(RoleExpr::Bottom).with_trace(true);
        let out = evaluate(&cfg, &t).unwrap();
        let trace = out.trace.unwrap();
        assert_eq!(trace.len(), 2);
        assert_eq!(print_term(&trace[1]), "\"s\"");
    }

    #[test]
    fn if_dispatches_on_string_equality() {
        let out = eval_under(RoleExpr::Bottom, "if \"a\" == \"a\" then [\"y\"] else [\"n\"]");
        assert_eq!(out.kind, OutcomeKind::Value(parse_term("[\"y\"]").unwrap()));
        let out = eval_under(RoleExpr::Bottom, "if \"a\" == \"b\" then [\"y\"] else [\"n\"]");
        assert_eq!(out.kind, OutcomeKind::Value(parse_term("[\"n\"]").unwrap()));
    }

    #[test]
    fn marking_stamps_modifiers() {
        let a = atom("A");
        let t = parse_term("up[B] x").unwrap();
        assert_eq!(mark(&a, &t), parse_term("up[B]^[A] x").unwrap());
        let t = parse_term("up[B]^[C] x").unwrap();
        assert_eq!(mark(&a, &t), parse_term("up[B]^[A | C] x").unwrap());
        let id = Term::abs("x", Type::Base(crate::syntax::Base::Str), Term::var("x"));
        assert_eq!(mark(&a, &id), id);
    }

    #[test]
    fn marking_accumulates_joins() {
        let t = parse_term("up[C] x").unwrap();
        let marked = mark(&atom("B"), &mark(&atom("A"), &t));
        assert_eq!(marked, parse_term("up[C]^[B | A] x").unwrap());
    }

    #[test]
    fn amp_error_sites() {
        let u = RoleUniverse::for_roles(&[atom("B").amp()]).unwrap();
        let t = parse_term("up[B] x").unwrap();
        assert!(amp_error(&u, &t).unwrap());
        let t = parse_term("up[B]^[amp(B)] x").unwrap();
        assert!(!amp_error(&u, &t).unwrap());
        let t = parse_term("dn[B] x").unwrap();
        assert!(!amp_error(&u, &t).unwrap());
        // Only evaluation positions are scanned: an unchecked up inside a
        // guard or lambda is not yet an error.
        let t = parse_term("{B} up[B] x").unwrap();
        assert!(!amp_error(&u, &t).unwrap());
        let t = parse_term("(\\x:Str. up[B] x) y").unwrap();
        assert!(!amp_error(&u, &t).unwrap());
        // ... but in function position it is.
        let t = parse_term("(up[B] x) y").unwrap();
        assert!(amp_error(&u, &t).unwrap());
    }

    #[test]
    fn check_marks_in_amp_mode() {
        // Discharging a guard marks the modifiers it justifies.
        let t = parse_term("check {amp(A)} (\\x:Str. up[A] (f x))").unwrap();
        let cfg = EvalConfig::new(atom("A").amp()).with_amp(true);
        let u = eval_universe(&cfg, &t).unwrap();
        match step(&cfg, &u, &t).unwrap() {
            StepResult::Reduced(next) => {
                assert_eq!(
                    next,
                    parse_term("[\\x:Str. up[A]^[amp(A)] (f x)]").unwrap()
                );
            }
            other => panic!("expected reduction, got {other:?}"),
        }
    }

    #[test]
    fn amp_mode_halts_on_unjustified_up() {
        // Reaching an unchecked upward modifier in evaluation position is a
        // role-modification error.
        let t = parse_term("up[B] check {B} ()").unwrap();
        let cfg = EvalConfig::new(RoleExpr::Bottom).with_amp(true);
        let out = evaluate(&cfg, &t).unwrap();
        assert!(matches!(out.kind, OutcomeKind::AmpError { .. }));
        // Without amp mode the same term runs fine.
        let cfg = EvalConfig::new(RoleExpr::Bottom);
        let out = evaluate(&cfg, &t).unwrap();
        assert!(out.kind.is_value());
    }
}
