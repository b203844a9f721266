//! Brute-force and generative harnesses.
//!
//! Each `check_*` function turns one of the calculus's guarantees into an
//! executable verdict over an enumerated role universe: the sufficient
//! system's freedom from role errors, the necessary system's guarantee of a
//! role error on under-privileged paths, preservation and progress along
//! fuel-bounded traces, context-role monotonicity, and the absence of
//! role-modification errors for amp-typed terms.  [`run_suite`] drives them
//! over seeded generated terms and reports per-check counts.
//!
//! Fuel exhaustion counts toward the "diverges" disjunct everywhere, and is
//! reported separately so a run can be retried with more fuel.

use std::fmt;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::eval::{mark, step, EvalConfig, Outcome, OutcomeKind, StepResult};
use crate::roles::{RoleAlgebraError, RoleExpr, RoleModifier, RoleUniverse, UniverseBuilder};
use crate::syntax::{alpha_equiv, parse_term, print_term, subst, Base, Literal, Term, Type};
use crate::typing::{
    compatible, dominates_type, subtype, synthesize, synthesize_amp, synthesize_with, SynthOptions,
    SystemId, TypeError, TypingContext,
};

/// Harness driving stops once a term's unfoldings exceed this size; the
/// evaluation is then classified as possibly diverging, the same disjunct as
/// fuel exhaustion.  One call-by-name step can square a term's size, so the
/// cap is kept low enough that the final overshoot step stays cheap.
const SIZE_CAP: usize = 2_000;

/// Cumulative node budget for one driven evaluation; growth-divergence is
/// cut off here rather than at the full fuel bound.
const WORK_CAP: u64 = 1_000_000;

#[derive(Debug)]
pub enum HarnessError {
    Algebra(RoleAlgebraError),
    Typing(TypeError),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Algebra(e) => write!(f, "role algebra: {e}"),
            HarnessError::Typing(e) => write!(f, "precondition: {e}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<RoleAlgebraError> for HarnessError {
    fn from(e: RoleAlgebraError) -> Self {
        HarnessError::Algebra(e)
    }
}

impl From<TypeError> for HarnessError {
    fn from(e: TypeError) -> Self {
        HarnessError::Typing(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(String),
    /// The principal synthesized witness did not validate the property; a
    /// non-principal witness might.
    Flagged(String),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// Outcome classification of a term under every role class of a universe.
#[derive(Debug, Clone)]
pub struct SafeSetReport {
    pub term: Term,
    pub classification: Vec<(RoleExpr, OutcomeKind)>,
}

impl SafeSetReport {
    pub fn outcome_for(&self, u: &RoleUniverse, role: &RoleExpr) -> Option<&OutcomeKind> {
        self.classification
            .iter()
            .find(|(r, _)| u.equiv(r, role).unwrap_or(false))
            .map(|(_, k)| k)
    }
}

/// Evaluate `t` under every role class of `u` and record the outcome kinds.
pub fn safe_set(t: &Term, u: &RoleUniverse, fuel: u64) -> Result<SafeSetReport, HarnessError> {
    let mut classification = Vec::new();
    for role in u.enumerate_roles(usize::MAX)? {
        let cfg = EvalConfig::new(role.clone()).with_fuel(fuel);
        let out = drive(&cfg, u, t)?;
        classification.push((role, out.kind));
    }
    Ok(SafeSetReport { term: t.clone(), classification })
}

/// Fuel- and size-bounded evaluation: exactly [`evaluate_in`] except that a
/// term growing past [`SIZE_CAP`] is reported as fuel exhaustion.
fn drive(cfg: &EvalConfig, u: &RoleUniverse, t: &Term) -> Result<Outcome, RoleAlgebraError> {
    let mut current = t.clone();
    let mut steps = 0u64;
    let mut work = 0u64;
    loop {
        let size = current.size();
        work += size as u64;
        if size > SIZE_CAP || work > WORK_CAP {
            return Ok(Outcome {
                kind: OutcomeKind::FuelExhausted { last: current },
                steps,
                trace: None,
            });
        }
        match step(cfg, u, &current)? {
            StepResult::AtValue => {
                return Ok(Outcome { kind: OutcomeKind::Value(current), steps, trace: None })
            }
            StepResult::Reduced(next) => {
                if steps >= cfg.fuel {
                    return Ok(Outcome {
                        kind: OutcomeKind::FuelExhausted { last: current },
                        steps,
                        trace: None,
                    });
                }
                steps += 1;
                current = next;
            }
            StepResult::RoleError { needed, had } => {
                return Ok(Outcome {
                    kind: OutcomeKind::RoleError { needed, had },
                    steps,
                    trace: None,
                })
            }
            StepResult::AmpError { site } => {
                return Ok(Outcome { kind: OutcomeKind::AmpError { site }, steps, trace: None })
            }
            StepResult::Stuck { reason } => {
                return Ok(Outcome { kind: OutcomeKind::Stuck { reason }, steps, trace: None })
            }
        }
    }
}

/// Guarantee of the sufficient system: under every enumerated role
/// dominating the synthesized type, evaluation reaches a value or runs out
/// of fuel; never a role error or a stuck state.
pub fn check_sufficiency(t: &Term, u: &RoleUniverse, fuel: u64) -> Result<Verdict, HarnessError> {
    let ty = synthesize(SystemId::Sufficient, &TypingContext::empty(), t, u)?;
    for role in u.enumerate_roles(usize::MAX)? {
        if !dominates_type(&role, &ty, u)? {
            continue;
        }
        let cfg = EvalConfig::new(role.clone()).with_fuel(fuel);
        let out = drive(&cfg, u, t)?;
        match out.kind {
            OutcomeKind::Value(_) | OutcomeKind::FuelExhausted { .. } => {}
            other => {
                return Ok(Verdict::Fail(format!(
                    "role `{role}` dominates `{ty}` but `{t}` ended as {}",
                    other.label()
                )))
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Guarantee of the necessary system: under every enumerated role that does
/// not dominate the synthesized type, evaluation hits a role error or runs
/// out of fuel; never a value.
pub fn check_necessity(t: &Term, u: &RoleUniverse, fuel: u64) -> Result<Verdict, HarnessError> {
    let ty = synthesize(SystemId::Necessary, &TypingContext::empty(), t, u)?;
    for role in u.enumerate_roles(usize::MAX)? {
        if dominates_type(&role, &ty, u)? {
            continue;
        }
        let cfg = EvalConfig::new(role.clone()).with_fuel(fuel);
        let out = drive(&cfg, u, t)?;
        match out.kind {
            OutcomeKind::RoleError { .. } | OutcomeKind::FuelExhausted { .. } => {}
            other => {
                return Ok(Verdict::Fail(format!(
                    "role `{role}` does not dominate `{ty}` but `{t}` ended as {}",
                    other.label()
                )))
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Preservation along the fuel-bounded trace of `t` under `r`: each step's
/// re-synthesized type is a subtype of its predecessor's (sufficient
/// system), or compatible with it and dominance-implying (necessary
/// system).
pub fn check_preservation(
    sys: SystemId,
    t: &Term,
    r: &RoleExpr,
    u: &RoleUniverse,
    fuel: u64,
) -> Result<Verdict, HarnessError> {
    let empty = TypingContext::empty();
    let mut prev_ty = synthesize(sys, &empty, t, u)?;
    let mut current = t.clone();
    let cfg = EvalConfig::new(r.clone()).with_fuel(fuel);
    let mut steps = 0u64;
    let mut work = 0u64;
    loop {
        let size = current.size();
        work += size as u64;
        if steps >= fuel || size > SIZE_CAP || work > WORK_CAP {
            break;
        }
        let next = match step(&cfg, u, &current)? {
            StepResult::Reduced(next) => next,
            _ => return Ok(Verdict::Pass),
        };
        let next_ty = match synthesize(sys, &empty, &next, u) {
            Ok(ty) => ty,
            Err(e) => {
                return Ok(Verdict::Fail(format!(
                    "step `{current}` -> `{next}` lost typability: {e}"
                )))
            }
        };
        match sys {
            SystemId::Sufficient => {
                if !subtype(sys, &next_ty, &prev_ty, u)? {
                    return Ok(Verdict::Fail(format!(
                        "step `{current}` -> `{next}`: `{next_ty}` is not a subtype of `{prev_ty}`"
                    )));
                }
            }
            SystemId::Necessary => {
                if !compatible(&next_ty, &prev_ty, u)? {
                    return Ok(Verdict::Flagged(format!(
                        "step `{current}` -> `{next}`: principal `{next_ty}` is not compatible \
                         with `{prev_ty}`; a non-principal witness may be needed"
                    )));
                }
                if dominates_type(r, &next_ty, u)? && !dominates_type(r, &prev_ty, u)? {
                    return Ok(Verdict::Flagged(format!(
                        "step `{current}` -> `{next}`: `{r}` dominates `{next_ty}` but not \
                         `{prev_ty}`; a non-principal witness may be needed"
                    )));
                }
            }
        }
        prev_ty = next_ty;
        current = next;
        steps += 1;
    }
    Ok(Verdict::Pass)
}

/// Progress along the fuel-bounded trace: every reachable term is a value, a
/// role error, or reducible, never stuck.  In the sufficient system, if `r`
/// dominates the synthesized type, the trace additionally never hits a role
/// error.
pub fn check_progress(
    sys: SystemId,
    t: &Term,
    r: &RoleExpr,
    u: &RoleUniverse,
    fuel: u64,
) -> Result<Verdict, HarnessError> {
    let ty = synthesize(sys, &TypingContext::empty(), t, u)?;
    let protected = sys == SystemId::Sufficient && dominates_type(r, &ty, u)?;
    let cfg = EvalConfig::new(r.clone()).with_fuel(fuel);
    let mut current = t.clone();
    let mut steps = 0u64;
    let mut work = 0u64;
    loop {
        let size = current.size();
        work += size as u64;
        if steps >= fuel || size > SIZE_CAP || work > WORK_CAP {
            break;
        }
        match step(&cfg, u, &current)? {
            StepResult::AtValue => return Ok(Verdict::Pass),
            StepResult::Reduced(next) => {
                current = next;
                steps += 1;
            }
            StepResult::RoleError { needed, had } => {
                if protected {
                    return Ok(Verdict::Fail(format!(
                        "`{r}` dominates `{ty}` yet `{current}` raised a role error \
                         (needed `{needed}`, had `{had}`)"
                    )));
                }
                return Ok(Verdict::Pass);
            }
            StepResult::Stuck { reason } => {
                return Ok(Verdict::Fail(format!("well-typed `{current}` is stuck: {reason}")))
            }
            StepResult::AmpError { site } => {
                return Ok(Verdict::Fail(format!(
                    "unexpected role-modification error at `{site}`"
                )))
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Context-role monotonicity: wherever a step fires under `B`, the same
/// step (same successor) fires under every enumerated `A >= B`.
pub fn check_monotonicity(t: &Term, u: &RoleUniverse, fuel: u64) -> Result<Verdict, HarnessError> {
    let roles = u.enumerate_roles(usize::MAX)?;
    for low in &roles {
        let highs: Vec<&RoleExpr> =
            roles.iter().filter(|h| u.dominates(h, low).unwrap_or(false)).collect();
        let cfg_low = EvalConfig::new(low.clone()).with_fuel(fuel);
        let mut current = t.clone();
        let mut steps = 0u64;
        let mut work = 0u64;
        loop {
            let size = current.size();
            work += size as u64 * (1 + highs.len() as u64);
            if steps >= fuel || size > SIZE_CAP || work > WORK_CAP {
                break;
            }
            let next = match step(&cfg_low, u, &current)? {
                StepResult::Reduced(next) => next,
                _ => break,
            };
            for high in &highs {
                let cfg_high = EvalConfig::new((*high).clone());
                match step(&cfg_high, u, &current)? {
                    StepResult::Reduced(n2) if n2 == next => {}
                    other => {
                        return Ok(Verdict::Fail(format!(
                            "`{low}` steps `{current}` -> `{next}` but `{high}` gives {other:?}"
                        )))
                    }
                }
            }
            current = next;
            steps += 1;
        }
    }
    Ok(Verdict::Pass)
}

/// Safe-set upward closure: if evaluation under `B` yields a value then so
/// does evaluation under every enumerated `A >= B`.
pub fn check_safe_set_closure(
    t: &Term,
    u: &RoleUniverse,
    fuel: u64,
) -> Result<Verdict, HarnessError> {
    let report = safe_set(t, u, fuel)?;
    for (low, low_kind) in &report.classification {
        if !low_kind.is_value() {
            continue;
        }
        for (high, high_kind) in &report.classification {
            if u.dominates(high, low)? && !high_kind.is_value() {
                return Ok(Verdict::Fail(format!(
                    "`{low}` runs `{}` to a value but `{high}` >= `{low}` ends as {}",
                    report.term,
                    high_kind.label()
                )));
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Amp safety over an explicit set of context roles: no role-modification
/// error at any reachable term, under any of the roles.
pub fn check_amp_safety_under(
    t: &Term,
    roles: &[RoleExpr],
    sys: SystemId,
    u: &RoleUniverse,
    fuel: u64,
) -> Result<Verdict, HarnessError> {
    synthesize_amp(&TypingContext::empty(), &RoleExpr::Bottom, t, sys, u)?;
    for role in roles {
        let cfg = EvalConfig::new(role.clone()).with_fuel(fuel).with_amp(true);
        let out = drive(&cfg, u, t)?;
        if let OutcomeKind::AmpError { site } = out.kind {
            return Ok(Verdict::Fail(format!(
                "role-modification error under `{role}` at `{site}`"
            )));
        }
    }
    Ok(Verdict::Pass)
}

/// Amp safety swept over every enumerated role class of the universe.
pub fn check_amp_safety(t: &Term, u: &RoleUniverse, fuel: u64) -> Result<Verdict, HarnessError> {
    let roles = u.enumerate_roles(usize::MAX)?;
    check_amp_safety_under(t, &roles, SystemId::Sufficient, u, fuel)
}

// ---------------------------------------------------------------------------
// Typed-term generation
// ---------------------------------------------------------------------------

/// Configuration for [`gen_typed_term`]; generation is deterministic per
/// seed.
#[derive(Debug, Clone)]
pub struct TermGenConfig {
    pub seed: u64,
    pub max_depth: usize,
    pub universe: RoleUniverse,
    pub target_system: SystemId,
    pub branch_free: bool,
    /// Generate under the amplification-controlled rules: upward modifiers
    /// are checked, or justified by an enclosing guard.
    pub amp: bool,
}

impl TermGenConfig {
    pub fn new(seed: u64) -> TermGenConfig {
        TermGenConfig {
            seed,
            max_depth: 6,
            universe: RoleUniverse::from_atoms(["A", "B"]),
            target_system: SystemId::Sufficient,
            branch_free: false,
            amp: false,
        }
    }
}

/// Generate a closed term accepted by synthesis under the target system,
/// built bottom-up from typed templates.
pub fn gen_typed_term(cfg: &TermGenConfig) -> Term {
    let mut gen = Gen {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        u: &cfg.universe,
        branch_free: cfg.branch_free,
        amp: cfg.amp,
        counter: 0,
    };
    let ty = gen.gen_type(cfg.max_depth.min(3));
    gen.gen_of(&ty, cfg.max_depth, &[], &RoleExpr::Bottom)
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    u: &'a RoleUniverse,
    branch_free: bool,
    amp: bool,
    counter: usize,
}

impl<'a> Gen<'a> {
    fn fresh(&mut self) -> String {
        let name = format!("x{}", self.counter);
        self.counter += 1;
        name
    }

    fn is_bottom(&self, r: &RoleExpr) -> bool {
        self.u.is_bottom(r).expect("generated roles stay inside the universe")
    }

    fn dominates(&self, a: &RoleExpr, b: &RoleExpr) -> bool {
        self.u.dominates(a, b).expect("generated roles stay inside the universe")
    }

    /// Atoms whose `amp` generator is in the universe; the only roles amp
    /// generation puts under upward modifiers.
    fn amp_atoms(&self) -> Vec<RoleExpr> {
        self.u
            .atoms()
            .iter()
            .map(|a| RoleExpr::atom(a.clone()))
            .filter(|a| self.u.covers(&a.clone().amp()))
            .collect()
    }

    fn gen_role(&mut self, depth: usize) -> RoleExpr {
        let atoms = self.u.atoms();
        let leaf = |g: &mut Self| {
            let atoms = g.u.atoms();
            if atoms.is_empty() || g.rng.gen_bool(0.2) {
                if g.rng.gen_bool(0.5) {
                    RoleExpr::Bottom
                } else {
                    RoleExpr::Top
                }
            } else {
                RoleExpr::atom(atoms[g.rng.gen_range(0..atoms.len())].clone())
            }
        };
        if depth == 0 || atoms.is_empty() {
            return leaf(self);
        }
        if self.amp && self.rng.gen_bool(0.15) {
            let amps = self.amp_atoms();
            if !amps.is_empty() {
                return amps[self.rng.gen_range(0..amps.len())].clone().amp();
            }
        }
        match self.rng.gen_range(0..10) {
            0..=4 => leaf(self),
            5 | 6 => self.gen_role(depth - 1).meet(self.gen_role(depth - 1)),
            7 | 8 => self.gen_role(depth - 1).join(self.gen_role(depth - 1)),
            _ => self.gen_role(depth - 1).neg(),
        }
    }

    fn gen_base(&mut self) -> Base {
        match self.rng.gen_range(0..10) {
            0..=3 => Base::Str,
            4..=6 => Base::Unit,
            7 | 8 => Base::Bool,
            _ => Base::Int,
        }
    }

    fn gen_type(&mut self, depth: usize) -> Type {
        if depth == 0 {
            return Type::Base(self.gen_base());
        }
        match self.rng.gen_range(0..20) {
            0..=8 => Type::comp(self.gen_role(2), self.gen_type(depth - 1)),
            9..=13 => Type::Base(self.gen_base()),
            14..=17 => Type::arrow(self.gen_type(depth - 1), self.gen_type(depth - 1)),
            _ => Type::guarded(self.gen_role(2), self.gen_type(depth - 1)),
        }
    }

    fn literal(&mut self, b: Base) -> Term {
        Term::Lit(match b {
            Base::Unit => Literal::Unit,
            Base::Int => Literal::Int(self.rng.gen_range(0..10)),
            Base::Str => {
                let words = ["a", "b", "file1", "file2", "secret"];
                Literal::Str(words[self.rng.gen_range(0..words.len())].to_string())
            }
            Base::Bool => Literal::Bool(self.rng.gen_bool(0.5)),
        })
    }

    /// Smallest term of the given type.
    fn canonical_of(&mut self, ty: &Type) -> Term {
        match ty {
            Type::Base(b) => self.literal(*b),
            Type::Arrow(d, c) => {
                let x = self.fresh();
                Term::abs(x, (**d).clone(), self.canonical_of(c))
            }
            Type::Guard(r, t) => Term::guard(r.clone(), self.canonical_of(t)),
            Type::Comp(e, t) => {
                if self.is_bottom(e) {
                    Term::unit(self.canonical_of(t))
                } else {
                    Term::check(Term::guard(e.clone(), self.canonical_of(t)))
                }
            }
        }
    }

    fn pick_var(&mut self, ty: &Type, env: &[(String, Type)]) -> Option<Term> {
        let matching: Vec<&String> = env
            .iter()
            .filter(|(_, t)| {
                crate::typing::types_equiv(t, ty, self.u)
                    .expect("generated roles stay inside the universe")
            })
            .map(|(n, _)| n)
            .collect();
        if matching.is_empty() {
            None
        } else {
            Some(Term::var(matching[self.rng.gen_range(0..matching.len())].clone()))
        }
    }

    /// A term whose synthesized type is equivalent to `ty`.
    fn gen_of(
        &mut self,
        ty: &Type,
        depth: usize,
        env: &[(String, Type)],
        guard: &RoleExpr,
    ) -> Term {
        if depth == 0 {
            if self.rng.gen_bool(0.3) {
                if let Some(v) = self.pick_var(ty, env) {
                    return v;
                }
            }
            return self.canonical_of(ty);
        }
        if self.rng.gen_bool(0.15) {
            if let Some(v) = self.pick_var(ty, env) {
                return v;
            }
        }
        match ty {
            Type::Base(b) => self.gen_base_term(*b, depth, env, guard),
            Type::Arrow(d, c) => {
                let x = self.fresh();
                let mut env2 = env.to_vec();
                env2.push((x.clone(), (**d).clone()));
                Term::abs(x, (**d).clone(), self.gen_of(c, depth - 1, &env2, guard))
            }
            Type::Guard(r, t) => {
                let inner_guard =
                    if self.amp { guard.clone().join(r.clone()) } else { guard.clone() };
                Term::guard(r.clone(), self.gen_of(t, depth - 1, env, &inner_guard))
            }
            Type::Comp(e, t) => self.gen_comp_term(e, t, depth, env, guard),
        }
    }

    fn gen_base_term(
        &mut self,
        b: Base,
        depth: usize,
        env: &[(String, Type)],
        guard: &RoleExpr,
    ) -> Term {
        if depth == 0 {
            return self.literal(b);
        }
        match self.rng.gen_range(0..10) {
            0..=4 => self.literal(b),
            5 | 6 if b == Base::Bool => Term::str_eq(
                self.gen_base_term(Base::Str, depth - 1, env, guard),
                self.gen_base_term(Base::Str, depth - 1, env, guard),
            ),
            _ => {
                let dom = self.gen_type(1);
                let x = self.fresh();
                let mut env2 = env.to_vec();
                env2.push((x.clone(), dom.clone()));
                let body = self.gen_of(&Type::Base(b), depth - 1, &env2, guard);
                Term::app(Term::abs(x, dom.clone(), body), self.gen_of(&dom, depth - 1, env, guard))
            }
        }
    }

    fn gen_comp_term(
        &mut self,
        effect: &RoleExpr,
        body_ty: &Type,
        depth: usize,
        env: &[(String, Type)],
        guard: &RoleExpr,
    ) -> Term {
        let ty = Type::comp(effect.clone(), body_ty.clone());
        // Checks, guards, and role modifiers dominate the distribution; they
        // are the interesting nodes.
        for _ in 0..4 {
            match self.rng.gen_range(0..100) {
                // check ({E} M)
                0..=24 => {
                    let g = Type::guarded(effect.clone(), body_ty.clone());
                    return Term::check(self.gen_of(&g, depth - 1, env, guard));
                }
                // up[R] M with R chosen so the effect is preserved
                25..=42 => {
                    if let Some(t) = self.gen_up(effect, body_ty, depth, env, guard) {
                        return t;
                    }
                }
                // dn[R] M with R dominating the body effect
                43..=60 => {
                    let r = effect.clone().join(self.gen_role(1));
                    let body = self.gen_of(&ty, depth - 1, env, guard);
                    return Term::modif(RoleModifier::dn(r), body);
                }
                // let x = M in N splitting the effect
                61..=72 => {
                    let (e1, e2) = match self.rng.gen_range(0..3) {
                        0 => (effect.clone(), effect.clone()),
                        1 => (effect.clone(), RoleExpr::Bottom),
                        _ => (RoleExpr::Bottom, effect.clone()),
                    };
                    let t1 = self.gen_type(1);
                    let bound = self.gen_of(&Type::comp(e1, t1.clone()), depth - 1, env, guard);
                    let x = self.fresh();
                    let mut env2 = env.to_vec();
                    env2.push((x.clone(), t1));
                    let body =
                        self.gen_of(&Type::comp(e2, body_ty.clone()), depth - 1, &env2, guard);
                    return Term::let_(x, bound, body);
                }
                // [M], only when the effect is trivial
                73..=79 => {
                    if self.is_bottom(effect) {
                        return Term::unit(self.gen_of(body_ty, depth - 1, env, guard));
                    }
                }
                // if c then M else N with equal branch effects
                80..=85 => {
                    if !self.branch_free {
                        let c = self.gen_base_term(Base::Bool, depth - 1, env, guard);
                        let t1 = self.gen_of(&ty, depth - 1, env, guard);
                        let t2 = self.gen_of(&ty, depth - 1, env, guard);
                        return Term::ite(c, t1, t2);
                    }
                }
                // (\x:T. M) N
                86..=91 => {
                    let dom = self.gen_type(1);
                    let x = self.fresh();
                    let mut env2 = env.to_vec();
                    env2.push((x.clone(), dom.clone()));
                    let body = self.gen_of(&ty, depth - 1, &env2, guard);
                    let arg = self.gen_of(&dom, depth - 1, env, guard);
                    return Term::app(Term::abs(x, dom, body), arg);
                }
                // fix (\x:[E]T. M); M may call x, so this can diverge
                92..=94 => {
                    let x = self.fresh();
                    let mut env2 = env.to_vec();
                    if self.rng.gen_bool(0.25) {
                        env2.push((x.clone(), ty.clone()));
                    }
                    let body = self.gen_of(&ty, depth - 1, &env2, guard);
                    return Term::fix(Term::abs(x, ty.clone(), body));
                }
                _ => {
                    if let Some(v) = self.pick_var(&ty, env) {
                        return v;
                    }
                }
            }
        }
        self.canonical_of(&ty)
    }

    /// `up[R] M` (or its checked form) preserving the effect: `R` is chosen
    /// disjoint from the effect and the body is generated at `[E | R] T`.
    fn gen_up(
        &mut self,
        effect: &RoleExpr,
        body_ty: &Type,
        depth: usize,
        env: &[(String, Type)],
        guard: &RoleExpr,
    ) -> Option<Term> {
        let role = if self.amp {
            let candidates: Vec<RoleExpr> = self
                .amp_atoms()
                .into_iter()
                .filter(|a| self.is_bottom(&effect.clone().meet(a.clone())))
                .collect();
            if candidates.is_empty() {
                return None;
            }
            candidates[self.rng.gen_range(0..candidates.len())].clone()
        } else {
            self.gen_role(1).meet(effect.clone().neg())
        };
        let inner = Type::comp(effect.clone().join(role.clone()), body_ty.clone());
        let body = self.gen_of(&inner, depth - 1, env, guard);
        let modifier = if !self.amp {
            RoleModifier::up(role)
        } else if self.dominates(guard, &role.clone().amp()) && self.rng.gen_bool(0.5) {
            // The accumulated guard already justifies an unchecked modifier.
            RoleModifier::up(role)
        } else {
            let annotation = role.clone().amp();
            RoleModifier::up(role).checked(annotation)
        };
        Some(Term::modif(modifier, body))
    }
}

// ---------------------------------------------------------------------------
// Seeded suite
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Base count: the theorem harnesses run this many terms; the law
    /// suites scale from it.
    pub terms: usize,
    pub depth: usize,
    pub fuel: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0xC0FFEE, terms: 500, depth: 6, fuel: 10_000 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub flagged: usize,
    pub counterexamples: Vec<String>,
    pub seed: u64,
}

impl CheckSummary {
    fn new(name: &str, seed: u64) -> CheckSummary {
        CheckSummary {
            name: name.to_string(),
            cases: 0,
            passed: 0,
            failed: 0,
            flagged: 0,
            counterexamples: Vec::new(),
            seed,
        }
    }

    fn record(&mut self, verdict: Verdict) {
        self.cases += 1;
        match verdict {
            Verdict::Pass => self.passed += 1,
            Verdict::Fail(msg) => {
                self.failed += 1;
                if self.counterexamples.len() < 5 {
                    self.counterexamples.push(msg);
                }
            }
            Verdict::Flagged(msg) => {
                self.flagged += 1;
                if self.counterexamples.len() < 5 {
                    self.counterexamples.push(format!("flagged: {msg}"));
                }
            }
        }
    }

    fn assert_with(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.record(if ok { Verdict::Pass } else { Verdict::Fail(msg()) });
    }

    pub fn clean(&self) -> bool {
        self.failed == 0 && self.flagged == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckSummary>,
}

impl SuiteReport {
    pub fn all_clean(&self) -> bool {
        self.checks.iter().all(|c| c.clean())
    }
}

fn gen_law_role(rng: &mut ChaCha8Rng, u: &RoleUniverse, depth: usize, with_amp: bool) -> RoleExpr {
    let atoms = u.atoms();
    if depth == 0 || atoms.is_empty() {
        return match rng.gen_range(0..4) {
            0 => RoleExpr::Bottom,
            1 => RoleExpr::Top,
            _ if !atoms.is_empty() => {
                RoleExpr::atom(atoms[rng.gen_range(0..atoms.len())].clone())
            }
            _ => RoleExpr::Top,
        };
    }
    match rng.gen_range(0..12) {
        0..=4 => gen_law_role(rng, u, 0, with_amp),
        5 | 6 => gen_law_role(rng, u, depth - 1, with_amp)
            .meet(gen_law_role(rng, u, depth - 1, with_amp)),
        7 | 8 => gen_law_role(rng, u, depth - 1, with_amp)
            .join(gen_law_role(rng, u, depth - 1, with_amp)),
        9 | 10 => gen_law_role(rng, u, depth - 1, with_amp).neg(),
        _ if with_amp => gen_law_role(rng, u, depth - 1, with_amp).amp(),
        _ => gen_law_role(rng, u, depth - 1, with_amp).neg(),
    }
}

/// Boolean-algebra axioms, the amp laws, and the dominance order on random
/// role expressions.
pub fn run_role_law_suite(seed: u64, cases: usize) -> Result<CheckSummary, HarnessError> {
    let mut summary = CheckSummary::new("role-laws", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = UniverseBuilder::new();
    builder.add_atom("A").add_atom("B");
    // The laws below apply amp to arbitrary amp-free expressions, and chain
    // it twice; cover every literal's generators to both depths.
    for atom in ["A", "B"] {
        for lit in [RoleExpr::atom(atom), RoleExpr::atom(atom).neg()] {
            builder.add_amp_of(&lit);
            builder.add_amp_of(&lit.amp());
        }
    }
    let u = builder.build()?;

    for _ in 0..cases {
        let r1 = gen_law_role(&mut rng, &u, 3, false);
        let r2 = gen_law_role(&mut rng, &u, 3, false);
        let r3 = gen_law_role(&mut rng, &u, 3, false);
        let mut ok = true;
        let mut why = String::new();
        let mut law = |name: &str, a: &RoleExpr, b: &RoleExpr| -> Result<(), HarnessError> {
            if ok && !u.equiv(a, b)? {
                ok = false;
                why = format!("{name}: `{a}` != `{b}`");
            }
            Ok(())
        };
        let (a, b, c) = (r1.clone(), r2.clone(), r3.clone());
        law("join-assoc", &a.clone().join(b.clone().join(c.clone())), &a.clone().join(b.clone()).join(c.clone()))?;
        law("meet-assoc", &a.clone().meet(b.clone().meet(c.clone())), &a.clone().meet(b.clone()).meet(c.clone()))?;
        law("join-comm", &a.clone().join(b.clone()), &b.clone().join(a.clone()))?;
        law("meet-comm", &a.clone().meet(b.clone()), &b.clone().meet(a.clone()))?;
        law("absorb-1", &a.clone().join(a.clone().meet(b.clone())), &a)?;
        law("absorb-2", &a.clone().meet(a.clone().join(b.clone())), &a)?;
        law(
            "distrib-1",
            &a.clone().join(b.clone().meet(c.clone())),
            &a.clone().join(b.clone()).meet(a.clone().join(c.clone())),
        )?;
        law(
            "distrib-2",
            &a.clone().meet(b.clone().join(c.clone())),
            &a.clone().meet(b.clone()).join(a.clone().meet(c.clone())),
        )?;
        law("complement-1", &a.clone().join(a.clone().neg()), &RoleExpr::Top)?;
        law("complement-2", &a.clone().meet(a.clone().neg()), &RoleExpr::Bottom)?;
        law("amp-join", &a.clone().join(b.clone()).amp(), &a.clone().amp().join(b.clone().amp()))?;
        law("amp-meet", &a.clone().meet(b.clone()).amp(), &a.clone().amp().meet(b.clone().amp()))?;
        law("amp-absorb-join", &a.clone().join(a.clone().amp()), &a.clone().amp())?;
        law("amp-absorb-meet", &a.clone().meet(a.clone().amp()), &a)?;
        law("idempotent-join", &a.clone().join(a.clone()), &a)?;
        law("idempotent-meet", &a.clone().meet(a.clone()), &a)?;

        if ok {
            // equiv is an equivalence; dominance is a partial order modulo
            // equiv and agrees with its two algebraic characterizations.
            let refl = u.equiv(&r1, &r1)?;
            let sym = u.equiv(&r1, &r2)? == u.equiv(&r2, &r1)?;
            let dom12 = u.dominates(&r1, &r2)?;
            let three_way = dom12 == u.equiv(&r1, &r1.clone().join(r2.clone()))?
                && dom12 == u.equiv(&r2, &r1.clone().meet(r2.clone()))?;
            let dom_refl = u.dominates(&r1, &r1)?;
            let antisym =
                !(dom12 && u.dominates(&r2, &r1)?) || u.equiv(&r1, &r2)?;
            let trans = !(dom12 && u.dominates(&r2, &r3)?) || u.dominates(&r1, &r3)?;
            let chain = u.dominates(&RoleExpr::Top, &r1.clone().join(r2.clone()))?
                && u.dominates(&r1.clone().join(r2.clone()), &r1)?
                && u.dominates(&r1, &r1.clone().meet(r2.clone()))?
                && u.dominates(&r1.clone().meet(r2.clone()), &RoleExpr::Bottom)?;
            let up = crate::roles::apply_modifier(&RoleModifier::up(r2.clone()), &r1);
            let dn = crate::roles::apply_modifier(&RoleModifier::dn(r2.clone()), &r1);
            let modifiers = u.dominates(&up, &r1)? && u.dominates(&r1, &dn)?;
            let amp_chain = u.dominates(&r1.clone().amp(), &r1)?
                && u.dominates(&r1.clone().amp().amp(), &r1.clone().amp())?;
            ok = refl && sym && three_way && dom_refl && antisym && trans && chain && modifiers
                && amp_chain;
            if !ok {
                why = format!("order properties failed for `{r1}`, `{r2}`, `{r3}`");
            }
        }
        summary.assert_with(ok, || why.clone());
    }
    Ok(summary)
}

/// Subtype reflexivity and transitivity on generated types, both systems.
pub fn run_subtype_law_suite(seed: u64, cases: usize) -> Result<CheckSummary, HarnessError> {
    let mut summary = CheckSummary::new("subtype-laws", seed);
    let u = RoleUniverse::from_atoms(["A", "B"]);
    let mut gen = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed ^ 0x5157),
        u: &u,
        branch_free: false,
        amp: false,
        counter: 0,
    };
    for _ in 0..cases {
        let t1 = gen.gen_type(3);
        let t2 = gen.gen_type(3);
        let t3 = gen.gen_type(3);
        let mut ok = true;
        for sys in [SystemId::Sufficient, SystemId::Necessary] {
            ok &= subtype(sys, &t1, &t1, &u)?;
            // Transitivity, tested on the pairs that happen to relate.
            if subtype(sys, &t1, &t2, &u)? && subtype(sys, &t2, &t3, &u)? {
                ok &= subtype(sys, &t1, &t3, &u)?;
            }
            // And on constructed chains which always relate.
            if let Type::Comp(e, b) = &t1 {
                let widened = match sys {
                    SystemId::Sufficient => Type::comp(e.clone().join(RoleExpr::atom("A")), (**b).clone()),
                    SystemId::Necessary => Type::comp(e.clone().meet(RoleExpr::atom("A")), (**b).clone()),
                };
                let top = match sys {
                    SystemId::Sufficient => Type::comp(RoleExpr::Top, (**b).clone()),
                    SystemId::Necessary => Type::comp(RoleExpr::Bottom, (**b).clone()),
                };
                ok &= subtype(sys, &t1, &widened, &u)?
                    && subtype(sys, &widened, &top, &u)?
                    && subtype(sys, &t1, &top, &u)?;
            }
        }
        summary.assert_with(ok, || format!("subtype laws failed for `{t1}`, `{t2}`, `{t3}`"));
    }
    Ok(summary)
}

/// Drive every harness over seeded generated terms.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport, HarnessError> {
    macro_rules! dbg_mark { ($name:expr) => { eprintln!("[suite] {} ...", $name); } }
    let mut checks = Vec::new();
    let u2 = RoleUniverse::from_atoms(["A", "B"]);

dbg_mark!("role-laws");
    checks.push(run_role_law_suite(cfg.seed, cfg.terms * 2)?);
dbg_mark!("subtype-laws");
    checks.push(run_subtype_law_suite(cfg.seed, cfg.terms)?);

    // Generator soundness: every generated term is accepted by synthesis,
    // and printing round-trips through the parser.
    {
dbg_mark!("generator-acceptance");
        let mut summary = CheckSummary::new("generator-acceptance", cfg.seed);
        for i in 0..cfg.terms {
            let mut gcfg = TermGenConfig::new(cfg.seed.wrapping_add(i as u64));
            gcfg.max_depth = cfg.depth;
            gcfg.target_system =
                if i % 2 == 0 { SystemId::Sufficient } else { SystemId::Necessary };
            let t = gen_typed_term(&gcfg);
            let accepted =
                synthesize(gcfg.target_system, &TypingContext::empty(), &t, &u2).is_ok();
            let closed = t.is_closed();
            let round = parse_term(&print_term(&t)).map(|p| alpha_equiv(&p, &t)).unwrap_or(false);
            summary.assert_with(accepted && closed && round, || {
                format!(
                    "seed {i}: accepted={accepted} closed={closed} roundtrip={round} `{t}`"
                )
            });
        }
        checks.push(summary);
    }

    // Substitution's free-variable bound on generated triples.
    {
dbg_mark!("subst-free-vars");
        let mut summary = CheckSummary::new("subst-free-vars", cfg.seed);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5b5b);
        for i in 0..cfg.terms * 2 {
            let mut gcfg = TermGenConfig::new(cfg.seed.wrapping_add(0x9000 + i as u64));
            gcfg.max_depth = 3;
            let m = gen_typed_term(&gcfg);
            let mut gcfg2 = TermGenConfig::new(cfg.seed.wrapping_add(0xA000 + i as u64));
            gcfg2.max_depth = 3;
            let n = gen_typed_term(&gcfg2);
            // Open m at a random bound variable by renaming one binder use.
            let x = format!("x{}", rng.gen_range(0..4));
            let result = subst(&m, &x, &n);
            let mut bound = m.free_vars();
            bound.remove(&x);
            bound.extend(n.free_vars());
            let ok = result.free_vars().is_subset(&bound);
            let identity_ok = if m.free_vars().contains(&x) { true } else { result == m };
            summary.assert_with(ok && identity_ok, || {
                format!("subst `{m}`[{x} := `{n}`] escaped its free-variable bound")
            });
        }
        checks.push(summary);
    }

    // Theorem harnesses over the 16 role classes of the 2-atom universe.
    {
dbg_mark!("sufficiency+necessity");
        let mut sufficiency = CheckSummary::new("sufficiency", cfg.seed);
        let mut necessity = CheckSummary::new("necessity", cfg.seed);
        for i in 0..cfg.terms {
            let mut gcfg = TermGenConfig::new(cfg.seed.wrapping_add(0x1000 + i as u64));
            gcfg.max_depth = cfg.depth;
            gcfg.target_system = SystemId::Sufficient;
            let t = gen_typed_term(&gcfg);
            sufficiency.record(check_sufficiency(&t, &u2, cfg.fuel)?);

            let mut gcfg = TermGenConfig::new(cfg.seed.wrapping_add(0x2000 + i as u64));
            gcfg.max_depth = cfg.depth;
            gcfg.target_system = SystemId::Necessary;
            let t = gen_typed_term(&gcfg);
            necessity.record(check_necessity(&t, &u2, cfg.fuel)?);
        }
        checks.push(sufficiency);
        checks.push(necessity);
    }

    // Preservation and progress on (system, term, role) triples.
    {
dbg_mark!("preservation+progress");
        let mut preservation = CheckSummary::new("preservation", cfg.seed);
        let mut progress = CheckSummary::new("progress", cfg.seed);
        let roles = u2.enumerate_roles(usize::MAX)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7a7a);
        for i in 0..cfg.terms {
            let sys = if rng.gen_bool(0.5) { SystemId::Sufficient } else { SystemId::Necessary };
            let mut gcfg = TermGenConfig::new(cfg.seed.wrapping_add(0x3000 + i as u64));
            gcfg.max_depth = cfg.depth;
            gcfg.target_system = sys;
            let t = gen_typed_term(&gcfg);
            let r = roles[rng.gen_range(0..roles.len())].clone();
            preservation.record(check_preservation(sys, &t, &r, &u2, cfg.fuel)?);

            let sys = if rng.gen_bool(0.5) { SystemId::Sufficient } else { SystemId::Necessary };
            let mut gcfg = TermGenConfig::new(cfg.seed.wrapping_add(0x4000 + i as u64));
            gcfg.max_depth = cfg.depth;
            gcfg.target_system = sys;
            let t = gen_typed_term(&gcfg);
            let r = roles[rng.gen_range(0..roles.len())].clone();
            progress.record(check_progress(sys, &t, &r, &u2, cfg.fuel)?);
        }
        checks.push(preservation);
        checks.push(progress);
    }

    // Monotonicity and safe-set upward closure on closed terms.
    {
dbg_mark!("monotonicity+closure");
        let mut monotonicity = CheckSummary::new("monotonicity", cfg.seed);
        let mut closure = CheckSummary::new("safe-set-closure", cfg.seed);
        let count = (cfg.terms * 2) / 5;
        for i in 0..count {
            let mut gcfg = TermGenConfig::new(cfg.seed.wrapping_add(0x5000 + i as u64));
            gcfg.max_depth = cfg.depth.min(5);
            let t = gen_typed_term(&gcfg);
            monotonicity.record(check_monotonicity(&t, &u2, cfg.fuel.min(300))?);
            closure.record(check_safe_set_closure(&t, &u2, cfg.fuel)?);
        }
        checks.push(monotonicity);
        checks.push(closure);
    }

    // Outcome kinds agree across equivalent context-role spellings.
    {
dbg_mark!("equiv-role-outcomes");
        let mut summary = CheckSummary::new("equiv-role-outcomes", cfg.seed);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x11ee);
        let count = cfg.terms / 5;
        for i in 0..count {
            let mut gcfg = TermGenConfig::new(cfg.seed.wrapping_add(0x6000 + i as u64));
            gcfg.max_depth = cfg.depth.min(5);
            let t = gen_typed_term(&gcfg);
            let r = gen_law_role(&mut rng, &u2, 3, false);
            let spelled = u2.canonical_dnf(&r)?;
            let k1 = drive(&EvalConfig::new(r.clone()).with_fuel(cfg.fuel), &u2, &t)?.kind;
            let k2 = drive(&EvalConfig::new(spelled.clone()).with_fuel(cfg.fuel), &u2, &t)?.kind;
            summary.assert_with(k1.label() == k2.label(), || {
                format!(
                    "`{t}` under `{r}` gives {} but under `{spelled}` gives {}",
                    k1.label(),
                    k2.label()
                )
            });
        }
        checks.push(summary);
    }

    // The generalized modifier rule agrees with the separate up/down rules
    // in the sufficient system.
    {
dbg_mark!("mod-star");
        let mut summary = CheckSummary::new("mod-star-agreement", cfg.seed);
        let count = (cfg.terms * 3) / 5;
        for i in 0..count {
            let mut gcfg = TermGenConfig::new(cfg.seed.wrapping_add(0x7000 + i as u64));
            gcfg.max_depth = cfg.depth;
            let t = gen_typed_term(&gcfg);
            let normal = synthesize(SystemId::Sufficient, &TypingContext::empty(), &t, &u2);
            let star = synthesize_with(
                SynthOptions { system: SystemId::Sufficient, amp: false, mod_star: true },
                &TypingContext::empty(),
                &RoleExpr::Bottom,
                &t,
                &u2,
            );
            let ok = match (&normal, &star) {
                (Ok(a), Ok(b)) => crate::typing::types_equiv(a, b, &u2)?,
                (Err(_), Err(_)) => true,
                _ => false,
            };
            summary.assert_with(ok, || {
                format!("`{t}`: separate rules gave {normal:?}, generalized rule gave {star:?}")
            });
        }
        checks.push(summary);
    }

    // Without branching (and with exact applications), the two systems
    // synthesize equivalent effects.
    {
dbg_mark!("branch-free");
        let mut summary = CheckSummary::new("branch-free-exactness", cfg.seed);
        let count = cfg.terms / 2;
        for i in 0..count {
            let mut gcfg = TermGenConfig::new(cfg.seed.wrapping_add(0x8000 + i as u64));
            gcfg.max_depth = cfg.depth;
            gcfg.branch_free = true;
            let t = gen_typed_term(&gcfg);
            let a = synthesize(SystemId::Sufficient, &TypingContext::empty(), &t, &u2);
            let b = synthesize(SystemId::Necessary, &TypingContext::empty(), &t, &u2);
            let ok = match (&a, &b) {
                (Ok(ta), Ok(tb)) => {
                    let no_if = !format!("{t}").contains("if ");
                    no_if && crate::typing::types_equiv(ta, tb, &u2)?
                }
                _ => false,
            };
            summary.assert_with(ok, || {
                format!("branch-free `{t}` synthesized {a:?} sufficient vs {b:?} necessary")
            });
        }
        checks.push(summary);
    }

    // Amp safety on generated amp-typed terms, swept over every role class
    // of the universe with amp generators.
    {
dbg_mark!("amp-safety");
        let mut summary = CheckSummary::new("amp-safety", cfg.seed);
        let mut builder = UniverseBuilder::new();
        builder.add_atom("A").add_atom("B");
        builder.add_amp_of(&RoleExpr::atom("A"));
        let amp_u = builder.build()?;
        let count = (cfg.terms * 2) / 5;
        for i in 0..count {
            let mut gcfg = TermGenConfig::new(cfg.seed.wrapping_add(0xB000 + i as u64));
            gcfg.max_depth = cfg.depth.min(5);
            gcfg.universe = amp_u.clone();
            gcfg.amp = true;
            let t = gen_typed_term(&gcfg);
            summary.record(check_amp_safety(&t, &amp_u, cfg.fuel)?);
        }
        checks.push(summary);
    }

    Ok(SuiteReport { checks })
}

// A small helper used by tests and by the marking invariant check.
/// Structural check that every modifier in `t` carries an annotation
/// dominating `expected` (used to validate that marking accumulates).
pub fn all_modifiers_annotated_with(
    t: &Term,
    expected: &RoleExpr,
    u: &RoleUniverse,
) -> Result<bool, RoleAlgebraError> {
    fn walk(
        t: &Term,
        expected: &RoleExpr,
        u: &RoleUniverse,
    ) -> Result<bool, RoleAlgebraError> {
        Ok(match t {
            Term::Lit(_) | Term::Var(_) => true,
            Term::Abs(_, _, b) => walk(b, expected, u)?,
            Term::App(l, r) | Term::StrEq(l, r) | Term::Let(_, l, r) => {
                walk(l, expected, u)? && walk(r, expected, u)?
            }
            Term::Fix(m) | Term::Check(m) | Term::Unit(m) | Term::Guard(_, m) => {
                walk(m, expected, u)?
            }
            Term::Mod(m, body) => {
                let ok = match &m.check_annotation {
                    Some(ann) => u.dominates(ann, expected)?,
                    None => false,
                };
                ok && walk(body, expected, u)?
            }
            Term::If(c, a, b) => {
                walk(c, expected, u)? && walk(a, expected, u)? && walk(b, expected, u)?
            }
        })
    }
    walk(t, expected, u)
}

/// Marking accumulates: after `mark(a, mark(b, t))`, every modifier carries
/// an annotation dominating `a | b`.
pub fn check_marking_accumulates(
    t: &Term,
    a: &RoleExpr,
    b: &RoleExpr,
    u: &RoleUniverse,
) -> Result<Verdict, HarnessError> {
    let marked = mark(a, &mark(b, t));
    let expected = a.clone().join(b.clone());
    let has_modifier = fn_has_modifier(t);
    if !has_modifier {
        return Ok(Verdict::Pass);
    }
    if all_modifiers_annotated_with(&marked, &expected, u)? {
        Ok(Verdict::Pass)
    } else {
        Ok(Verdict::Fail(format!("marking `{t}` with `{a}` then `{b}` lost an annotation")))
    }
}

fn fn_has_modifier(t: &Term) -> bool {
    match t {
        Term::Lit(_) | Term::Var(_) => false,
        Term::Abs(_, _, b) => fn_has_modifier(b),
        Term::App(l, r) | Term::StrEq(l, r) | Term::Let(_, l, r) => {
            fn_has_modifier(l) || fn_has_modifier(r)
        }
        Term::Fix(m) | Term::Check(m) | Term::Unit(m) | Term::Guard(_, m) => fn_has_modifier(m),
        Term::Mod(..) => true,
        Term::If(c, a, b) => fn_has_modifier(c) || fn_has_modifier(a) || fn_has_modifier(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u1b() -> RoleUniverse {
        RoleUniverse::from_atoms(["B"])
    }

    #[test]
    fn safe_set_of_guarded_unit() {
        let t = parse_term("check {B} ()").unwrap();
        let u = u1b();
        let report = safe_set(&t, &u, 100).unwrap();
        assert_eq!(report.classification.len(), 4);
        let b = RoleExpr::atom("B");
        assert!(report.outcome_for(&u, &b).unwrap().is_value());
        assert!(report.outcome_for(&u, &RoleExpr::Top).unwrap().is_value());
        assert!(matches!(
            report.outcome_for(&u, &RoleExpr::Bottom).unwrap(),
            OutcomeKind::RoleError { .. }
        ));
        assert!(matches!(
            report.outcome_for(&u, &b.clone().neg()).unwrap(),
            OutcomeKind::RoleError { .. }
        ));
    }

    #[test]
    fn safe_set_of_value_is_all_value() {
        let t = parse_term("[()]").unwrap();
        let u = u1b();
        let report = safe_set(&t, &u, 100).unwrap();
        assert!(report.classification.iter().all(|(_, k)| k.is_value()));
    }

    #[test]
    fn restricted_test_errors_everywhere() {
        let t = parse_term("dn[!B] check {B} ()").unwrap();
        let u = u1b();
        let report = safe_set(&t, &u, 100).unwrap();
        assert!(report
            .classification
            .iter()
            .all(|(_, k)| matches!(k, OutcomeKind::RoleError { .. })));
    }

    #[test]
    fn generated_terms_are_accepted_at_every_depth() {
        let u = RoleUniverse::from_atoms(["A", "B"]);
        for depth in [0, 2, 4, 6] {
            for seed in 0..50 {
                let mut cfg = TermGenConfig::new(seed);
                cfg.max_depth = depth;
                let t = gen_typed_term(&cfg);
                assert!(t.is_closed(), "seed {seed} depth {depth}: open term `{t}`");
                let res = synthesize(SystemId::Sufficient, &TypingContext::empty(), &t, &u);
                assert!(res.is_ok(), "seed {seed} depth {depth}: rejected `{t}`: {res:?}");
            }
        }
    }

    #[test]
    fn branch_free_terms_have_no_if() {
        for seed in 0..50 {
            let mut cfg = TermGenConfig::new(seed);
            cfg.branch_free = true;
            let t = gen_typed_term(&cfg);
            assert!(!print_term(&t).contains("if "), "seed {seed}: `{t}`");
        }
    }

    #[test]
    fn depth_zero_yields_values() {
        let mut cfg = TermGenConfig::new(7);
        cfg.max_depth = 0;
        let t = gen_typed_term(&cfg);
        assert!(t.is_value() || matches!(t, Term::Check(_)));
    }

    #[test]
    fn single_check_monotonicity() {
        let t = parse_term("check {B} ()").unwrap();
        assert!(check_monotonicity(&t, &u1b(), 100).unwrap().is_pass());
        let t = parse_term("dn[B] check {B} ()").unwrap();
        assert!(check_monotonicity(&t, &u1b(), 100).unwrap().is_pass());
    }

    #[test]
    fn necessity_on_simple_check() {
        let t = parse_term("check {B} ()").unwrap();
        assert!(check_necessity(&t, &u1b(), 100).unwrap().is_pass());
    }

    #[test]
    fn sufficiency_on_values_is_vacuous() {
        let t = parse_term("[()]").unwrap();
        assert!(check_sufficiency(&t, &u1b(), 100).unwrap().is_pass());
    }

    #[test]
    fn preservation_handles_the_strict_counterexample() {
        // check {1} () steps to [()]: the type weakens from [1]Unit to
        // [0]Unit, which compatibility plus the dominance implication
        // tolerates.
        let t = parse_term("check {1} ()").unwrap();
        let u = RoleUniverse::from_atoms(Vec::<String>::new());
        let v = check_preservation(SystemId::Necessary, &t, &RoleExpr::Top, &u, 100).unwrap();
        assert!(v.is_pass(), "{v:?}");
    }

    #[test]
    fn progress_detects_stuck_ill_typed_terms() {
        // check of a lambda is a shape error; the precondition (typability)
        // fails, which is the harness's error path.
        let t = parse_term("check (\\x:Str. x)").unwrap();
        let u = RoleUniverse::from_atoms(["A"]);
        assert!(matches!(
            check_progress(SystemId::Sufficient, &t, &RoleExpr::Top, &u, 100),
            Err(HarnessError::Typing(_))
        ));
    }

    #[test]
    fn amp_safety_on_checked_pattern() {
        let t = parse_term("up[A]^[amp(A)] [()]").unwrap();
        let mut b = UniverseBuilder::new();
        b.add_atom("A").add_amp_of(&RoleExpr::atom("A"));
        let u = b.build().unwrap();
        assert!(check_amp_safety(&t, &u, 100).unwrap().is_pass());
    }

    #[test]
    fn amp_safety_precondition_rejects_unchecked_up() {
        let t = parse_term("up[A] [()]").unwrap();
        let mut b = UniverseBuilder::new();
        b.add_atom("A").add_amp_of(&RoleExpr::atom("A"));
        let u = b.build().unwrap();
        assert!(matches!(check_amp_safety(&t, &u, 100), Err(HarnessError::Typing(_))));
    }

    #[test]
    fn marking_accumulation_invariant() {
        let u = RoleUniverse::from_atoms(["A", "B", "C"]);
        let t = parse_term("up[C] dn[B] [()]").unwrap();
        let v = check_marking_accumulates(&t, &RoleExpr::atom("A"), &RoleExpr::atom("B"), &u)
            .unwrap();
        assert!(v.is_pass());
    }

    #[test]
    fn small_suite_is_clean() {
        let cfg = SuiteConfig { seed: 0xFEED, terms: 30, depth: 4, fuel: 2_000 };
        let report = run_suite(&cfg).unwrap();
        for check in &report.checks {
            assert!(
                check.clean(),
                "{}: {} failed, {} flagged: {:?}",
                check.name,
                check.failed,
                check.flagged,
                check.counterexamples
            );
        }
    }
}
