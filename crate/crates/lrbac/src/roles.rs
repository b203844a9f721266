//! Role algebra: a free boolean lattice over named atoms, extended with the
//! unary `amp` constructor.
//!
//! Roles are interpreted as boolean functions over valuations of a finite
//! generator set (the atoms plus every residual `amp` generator).  `amp`
//! distributes over meet and join; a residual `amp(x)` over a literal becomes
//! a generator of its own, constrained so that `x` implies `amp(x)` on every
//! valuation.  That constraint is the pointwise form of the absorption laws
//! `a | amp(a) == amp(a)` and `a & amp(a) == a`, and makes `amp(a) >= a` hold
//! for every role.  Equivalence and dominance are decided by exhaustive
//! valuation; at the scale this crate targets (a handful of generators) that
//! is exact and cheap.

use std::collections::BTreeSet;
use std::fmt;

/// Syntax tree of role expressions.
///
/// Construction is unrestricted; all algebraic laws live in
/// [`RoleUniverse::equiv`], not in the constructors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RoleExpr {
    /// The least role (`0`): no permissions.
    Bottom,
    /// The greatest role (`1`): all permissions.
    Top,
    Atom(String),
    Meet(Box<RoleExpr>, Box<RoleExpr>),
    Join(Box<RoleExpr>, Box<RoleExpr>),
    Neg(Box<RoleExpr>),
    /// `amp(r)`: the right to provide `r` via an upward modifier.
    Amp(Box<RoleExpr>),
}

impl RoleExpr {
    pub fn atom(name: impl Into<String>) -> RoleExpr {
        RoleExpr::Atom(name.into())
    }

    pub fn meet(self, other: RoleExpr) -> RoleExpr {
        RoleExpr::Meet(Box::new(self), Box::new(other))
    }

    pub fn join(self, other: RoleExpr) -> RoleExpr {
        RoleExpr::Join(Box::new(self), Box::new(other))
    }

    pub fn neg(self) -> RoleExpr {
        RoleExpr::Neg(Box::new(self))
    }

    pub fn amp(self) -> RoleExpr {
        RoleExpr::Amp(Box::new(self))
    }
}

/// `b \ a`, the role difference `b & !a` used by the upward-modifier typing
/// rule.
pub fn rminus(b: &RoleExpr, a: &RoleExpr) -> RoleExpr {
    b.clone().meet(a.clone().neg())
}

/// Fold a sequence of roles with join; empty yields `0`.
pub fn join_all<I: IntoIterator<Item = RoleExpr>>(roles: I) -> RoleExpr {
    let mut it = roles.into_iter();
    match it.next() {
        None => RoleExpr::Bottom,
        Some(first) => it.fold(first, RoleExpr::join),
    }
}

/// Fold a sequence of roles with meet; empty yields `1`.
pub fn meet_all<I: IntoIterator<Item = RoleExpr>>(roles: I) -> RoleExpr {
    let mut it = roles.into_iter();
    match it.next() {
        None => RoleExpr::Top,
        Some(first) => it.fold(first, RoleExpr::meet),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModDirection {
    Up,
    Dn,
}

/// A role modifier `up[r]` / `dn[r]`, optionally carrying the check
/// annotation of a checked modifier `up[r]^[b]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RoleModifier {
    pub direction: ModDirection,
    pub role: RoleExpr,
    pub check_annotation: Option<RoleExpr>,
}

impl RoleModifier {
    pub fn up(role: RoleExpr) -> RoleModifier {
        RoleModifier { direction: ModDirection::Up, role, check_annotation: None }
    }

    pub fn dn(role: RoleExpr) -> RoleModifier {
        RoleModifier { direction: ModDirection::Dn, role, check_annotation: None }
    }

    pub fn checked(mut self, annotation: RoleExpr) -> RoleModifier {
        self.check_annotation = Some(annotation);
        self
    }
}

/// Apply a modifier to a context role: `up[a]` joins, `dn[a]` meets.  Check
/// annotations never affect the result.
pub fn apply_modifier(m: &RoleModifier, r: &RoleExpr) -> RoleExpr {
    match m.direction {
        ModDirection::Up => m.role.clone().join(r.clone()),
        ModDirection::Dn => m.role.clone().meet(r.clone()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoleAlgebraError {
    /// An expression mentions an atom outside the universe under analysis.
    UnknownAtom(String),
    /// An expression needs an `amp` generator outside the universe.
    UnknownAmp(RoleExpr),
    UniverseTooLarge { generators: usize, max: usize },
}

impl fmt::Display for RoleAlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoleAlgebraError::UnknownAtom(a) => {
                write!(f, "role atom `{a}` is outside the analysis universe")
            }
            RoleAlgebraError::UnknownAmp(g) => {
                write!(f, "amp generator `{g}` is outside the analysis universe")
            }
            RoleAlgebraError::UniverseTooLarge { generators, max } => {
                write!(f, "role universe has {generators} generators, limit is {max}")
            }
        }
    }
}

impl std::error::Error for RoleAlgebraError {}

/// Push negation and `amp` inward.  The result is built from meets and joins
/// over constants and literals, where a literal is an atom, a negated atom,
/// an `amp` generator, or a negated `amp` generator.  `amp` generators are
/// themselves `amp` of a literal, so `amp(amp(a))` stays a distinct
/// generator above `amp(a)`.
pub fn normalize(e: &RoleExpr) -> RoleExpr {
    match e {
        RoleExpr::Bottom | RoleExpr::Top | RoleExpr::Atom(_) => e.clone(),
        RoleExpr::Meet(l, r) => normalize(l).meet(normalize(r)),
        RoleExpr::Join(l, r) => normalize(l).join(normalize(r)),
        RoleExpr::Neg(x) => negate_normal(normalize(x)),
        RoleExpr::Amp(x) => amp_normal(normalize(x)),
    }
}

fn negate_normal(n: RoleExpr) -> RoleExpr {
    match n {
        RoleExpr::Bottom => RoleExpr::Top,
        RoleExpr::Top => RoleExpr::Bottom,
        RoleExpr::Neg(inner) => *inner,
        RoleExpr::Meet(l, r) => negate_normal(*l).join(negate_normal(*r)),
        RoleExpr::Join(l, r) => negate_normal(*l).meet(negate_normal(*r)),
        lit @ (RoleExpr::Atom(_) | RoleExpr::Amp(_)) => lit.neg(),
    }
}

fn amp_normal(n: RoleExpr) -> RoleExpr {
    match n {
        // amp of the constants is taken to be the constant itself (the
        // monotone-closure reading; nothing grants the empty role, and
        // nothing exceeds the full one).
        RoleExpr::Bottom => RoleExpr::Bottom,
        RoleExpr::Top => RoleExpr::Top,
        RoleExpr::Meet(l, r) => amp_normal(*l).meet(amp_normal(*r)),
        RoleExpr::Join(l, r) => amp_normal(*l).join(amp_normal(*r)),
        lit => lit.amp(),
    }
}

fn collect_normalized(e: &RoleExpr, atoms: &mut BTreeSet<String>, gens: &mut BTreeSet<RoleExpr>) {
    match e {
        RoleExpr::Bottom | RoleExpr::Top => {}
        RoleExpr::Atom(a) => {
            atoms.insert(a.clone());
        }
        RoleExpr::Meet(l, r) | RoleExpr::Join(l, r) => {
            collect_normalized(l, atoms, gens);
            collect_normalized(r, atoms, gens);
        }
        RoleExpr::Neg(x) => collect_normalized(x, atoms, gens),
        RoleExpr::Amp(inner) => {
            gens.insert(e.clone());
            collect_normalized(inner, atoms, gens);
        }
    }
}

/// Collects the atoms and residual `amp` generators a set of role
/// expressions ranges over.
#[derive(Debug, Default, Clone)]
pub struct UniverseBuilder {
    atoms: BTreeSet<String>,
    gens: BTreeSet<RoleExpr>,
}

impl UniverseBuilder {
    pub fn new() -> UniverseBuilder {
        UniverseBuilder::default()
    }

    pub fn add_atom(&mut self, name: impl Into<String>) -> &mut Self {
        self.atoms.insert(name.into());
        self
    }

    pub fn add_role(&mut self, r: &RoleExpr) -> &mut Self {
        collect_normalized(&normalize(r), &mut self.atoms, &mut self.gens);
        self
    }

    /// Add the generators of `amp(r)`; used where an analysis compares
    /// against the amplification right for `r` even though `amp(r)` is not
    /// written in the program.
    pub fn add_amp_of(&mut self, r: &RoleExpr) -> &mut Self {
        self.add_role(&r.clone().amp())
    }

    pub fn build(&self) -> Result<RoleUniverse, RoleAlgebraError> {
        RoleUniverse::new(self.atoms.iter().cloned(), self.gens.iter().cloned())
    }
}

/// The finite carrier a role analysis runs over: an ordered atom list, an
/// ordered list of `amp` generators, and the constrained valuation set.
#[derive(Debug, Clone)]
pub struct RoleUniverse {
    atoms: Vec<String>,
    amp_generators: Vec<RoleExpr>,
    valuations: Vec<Vec<bool>>,
}

/// Hard cap on atoms + amp generators; the valuation table is exponential in
/// this count.
pub const MAX_GENERATORS: usize = 16;

/// Cap for [`RoleUniverse::enumerate_roles`], which is doubly exponential.
pub const MAX_ENUMERABLE_GENERATORS: usize = 3;

impl RoleUniverse {
    fn new<A, G>(atoms: A, gens: G) -> Result<RoleUniverse, RoleAlgebraError>
    where
        A: IntoIterator<Item = String>,
        G: IntoIterator<Item = RoleExpr>,
    {
        let atoms: Vec<String> = atoms.into_iter().collect();
        let amp_generators: Vec<RoleExpr> = gens.into_iter().collect();
        let n = atoms.len() + amp_generators.len();
        if n > MAX_GENERATORS {
            return Err(RoleAlgebraError::UniverseTooLarge { generators: n, max: MAX_GENERATORS });
        }
        let mut u = RoleUniverse { atoms, amp_generators, valuations: Vec::new() };
        u.valuations = u.enumerate_valuations()?;
        Ok(u)
    }

    /// Universe over plain atoms, no amp generators.
    pub fn from_atoms<I, S>(names: I) -> RoleUniverse
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut b = UniverseBuilder::new();
        for n in names {
            b.add_atom(n);
        }
        b.build().expect("atom-only universe within generator cap")
    }

    /// Universe covering every atom and amp generator of the given roles.
    pub fn for_roles<'a, I: IntoIterator<Item = &'a RoleExpr>>(
        roles: I,
    ) -> Result<RoleUniverse, RoleAlgebraError> {
        let mut b = UniverseBuilder::new();
        for r in roles {
            b.add_role(r);
        }
        b.build()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn amp_generators(&self) -> &[RoleExpr] {
        &self.amp_generators
    }

    pub fn generator_count(&self) -> usize {
        self.atoms.len() + self.amp_generators.len()
    }

    pub fn valuation_count(&self) -> usize {
        self.valuations.len()
    }

    /// All assignments to atoms and amp generators that satisfy the
    /// monotonicity constraint `v(x) <= v(amp(x))` for every generator.
    fn enumerate_valuations(&self) -> Result<Vec<Vec<bool>>, RoleAlgebraError> {
        let n = self.generator_count();
        let mut out = Vec::new();
        for raw in 0u32..(1u32 << n) {
            let bits: Vec<bool> = (0..n).map(|i| raw >> i & 1 == 1).collect();
            let mut ok = true;
            for (gi, gen) in self.amp_generators.iter().enumerate() {
                let RoleExpr::Amp(inner) = gen else { unreachable!("generators are amp nodes") };
                let arg = self.eval_normalized(inner, &bits)?;
                let amp_val = bits[self.atoms.len() + gi];
                if arg && !amp_val {
                    ok = false;
                    break;
                }
            }
            if ok {
                out.push(bits);
            }
        }
        Ok(out)
    }

    fn atom_index(&self, name: &str) -> Result<usize, RoleAlgebraError> {
        self.atoms
            .binary_search_by(|a| a.as_str().cmp(name))
            .map_err(|_| RoleAlgebraError::UnknownAtom(name.to_string()))
    }

    fn gen_index(&self, gen: &RoleExpr) -> Result<usize, RoleAlgebraError> {
        self.amp_generators
            .binary_search(gen)
            .map(|i| self.atoms.len() + i)
            .map_err(|_| RoleAlgebraError::UnknownAmp(gen.clone()))
    }

    fn eval_normalized(&self, e: &RoleExpr, bits: &[bool]) -> Result<bool, RoleAlgebraError> {
        Ok(match e {
            RoleExpr::Bottom => false,
            RoleExpr::Top => true,
            RoleExpr::Atom(a) => bits[self.atom_index(a)?],
            RoleExpr::Meet(l, r) => {
                self.eval_normalized(l, bits)? && self.eval_normalized(r, bits)?
            }
            RoleExpr::Join(l, r) => {
                self.eval_normalized(l, bits)? || self.eval_normalized(r, bits)?
            }
            RoleExpr::Neg(x) => !self.eval_normalized(x, bits)?,
            RoleExpr::Amp(_) => bits[self.gen_index(e)?],
        })
    }

    /// Truth table of `r` over the constrained valuation set.
    pub fn truth_table(&self, r: &RoleExpr) -> Result<Vec<bool>, RoleAlgebraError> {
        let n = normalize(r);
        self.valuations.iter().map(|v| self.eval_normalized(&n, v)).collect()
    }

    /// Whether `r` covers every atom and amp generator of this universe's
    /// tables.
    pub fn covers(&self, r: &RoleExpr) -> bool {
        self.truth_table(r).is_ok()
    }

    /// Provable equivalence under the boolean-algebra axioms plus the amp
    /// laws (distribution over meet/join and the absorption pair).
    pub fn equiv(&self, r1: &RoleExpr, r2: &RoleExpr) -> Result<bool, RoleAlgebraError> {
        Ok(self.truth_table(r1)? == self.truth_table(r2)?)
    }

    /// Dominance `r1 >= r2`, i.e. `r1 == r1 | r2`.
    pub fn dominates(&self, r1: &RoleExpr, r2: &RoleExpr) -> Result<bool, RoleAlgebraError> {
        let t1 = self.truth_table(r1)?;
        let t2 = self.truth_table(r2)?;
        Ok(t1.iter().zip(&t2).all(|(a, b)| *a || !*b))
    }

    /// Whether `r` is equivalent to `0`.
    pub fn is_bottom(&self, r: &RoleExpr) -> Result<bool, RoleAlgebraError> {
        Ok(self.truth_table(r)?.iter().all(|b| !b))
    }

    fn minterm(&self, bits: &[bool]) -> RoleExpr {
        let mut lits = Vec::with_capacity(self.generator_count());
        for (i, name) in self.atoms.iter().enumerate() {
            let lit = RoleExpr::atom(name.clone());
            lits.push(if bits[i] { lit } else { lit.neg() });
        }
        for (i, gen) in self.amp_generators.iter().enumerate() {
            let lit = gen.clone();
            lits.push(if bits[self.atoms.len() + i] { lit } else { lit.neg() });
        }
        meet_all(lits)
    }

    /// One canonical representative per equivalence class of roles over this
    /// universe, in a deterministic order starting at `0` and ending at `1`.
    /// Returns at most `limit` representatives.
    pub fn enumerate_roles(&self, limit: usize) -> Result<Vec<RoleExpr>, RoleAlgebraError> {
        let n = self.generator_count();
        if n > MAX_ENUMERABLE_GENERATORS {
            return Err(RoleAlgebraError::UniverseTooLarge {
                generators: n,
                max: MAX_ENUMERABLE_GENERATORS,
            });
        }
        let classes = 1u64 << self.valuations.len();
        let mut out = Vec::new();
        for mask in 0..classes {
            if out.len() >= limit {
                break;
            }
            if mask == 0 {
                out.push(RoleExpr::Bottom);
            } else if mask == classes - 1 {
                out.push(RoleExpr::Top);
            } else {
                let terms = self
                    .valuations
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, v)| self.minterm(v));
                out.push(join_all(terms));
            }
        }
        Ok(out)
    }

    /// Deterministic minimized disjunctive normal form: a join of meets of
    /// literals, atoms sorted lexicographically, equivalent to `r` over this
    /// universe.  Valuations excluded by the amp constraints are don't-cares
    /// for the minimization.
    pub fn canonical_dnf(&self, r: &RoleExpr) -> Result<RoleExpr, RoleAlgebraError> {
        let tt = self.truth_table(r)?;
        if tt.iter().all(|b| !b) {
            return Ok(RoleExpr::Bottom);
        }
        if tt.iter().all(|b| *b) {
            return Ok(RoleExpr::Top);
        }
        let n = self.generator_count();
        let to_raw = |bits: &[bool]| -> u32 {
            bits.iter().enumerate().fold(0u32, |acc, (i, b)| acc | (u32::from(*b) << i))
        };
        let on: BTreeSet<u32> = self
            .valuations
            .iter()
            .zip(&tt)
            .filter(|(_, t)| **t)
            .map(|(v, _)| to_raw(v))
            .collect();
        let in_universe: BTreeSet<u32> = self.valuations.iter().map(|v| to_raw(v)).collect();
        let dont_care: BTreeSet<u32> =
            (0..(1u32 << n)).filter(|raw| !in_universe.contains(raw)).collect();

        let primes = prime_cubes(&on, &dont_care);
        let chosen = greedy_cover(&primes, &on);

        let cubes = chosen.iter().map(|&(value, mask)| {
            let lits = (0..n).filter(|i| mask >> i & 1 == 0).map(|i| {
                let lit = if i < self.atoms.len() {
                    RoleExpr::atom(self.atoms[i].clone())
                } else {
                    self.amp_generators[i - self.atoms.len()].clone()
                };
                if value >> i & 1 == 1 {
                    lit
                } else {
                    lit.neg()
                }
            });
            meet_all(lits)
        });
        Ok(join_all(cubes))
    }
}

/// Quine-McCluskey prime-implicant generation over `(value, dontcare_mask)`
/// cubes.
fn prime_cubes(on: &BTreeSet<u32>, dc: &BTreeSet<u32>) -> Vec<(u32, u32)> {
    let mut current: BTreeSet<(u32, u32)> =
        on.iter().chain(dc.iter()).map(|&v| (v, 0u32)).collect();
    let mut primes: BTreeSet<(u32, u32)> = BTreeSet::new();
    while !current.is_empty() {
        let cubes: Vec<(u32, u32)> = current.iter().copied().collect();
        let mut merged_away = vec![false; cubes.len()];
        let mut next: BTreeSet<(u32, u32)> = BTreeSet::new();
        for i in 0..cubes.len() {
            for j in (i + 1)..cubes.len() {
                let (va, ma) = cubes[i];
                let (vb, mb) = cubes[j];
                if ma != mb {
                    continue;
                }
                let diff = va ^ vb;
                if diff.count_ones() == 1 {
                    merged_away[i] = true;
                    merged_away[j] = true;
                    next.insert((va & !diff, ma | diff));
                }
            }
        }
        for (i, cube) in cubes.iter().enumerate() {
            if !merged_away[i] {
                primes.insert(*cube);
            }
        }
        current = next;
    }
    let covers_on = |&(v, m): &(u32, u32)| on.iter().any(|&o| o & !m == v & !m);
    primes.into_iter().filter(covers_on).collect()
}

/// Deterministic greedy cover of the ON-set by prime cubes: largest coverage
/// first, ties broken toward wider cubes, then lexicographically.
fn greedy_cover(primes: &[(u32, u32)], on: &BTreeSet<u32>) -> Vec<(u32, u32)> {
    let mut uncovered: BTreeSet<u32> = on.clone();
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        let (v, m) = *primes
            .iter()
            .max_by_key(|&&(v, m)| {
                let cov = uncovered.iter().filter(|&&o| o & !m == v & !m).count();
                (cov, m.count_ones(), std::cmp::Reverse((v, m)))
            })
            .expect("prime cubes cover the ON-set");
        let before = uncovered.len();
        uncovered.retain(|&o| o & !m != v & !m);
        assert!(uncovered.len() < before, "greedy cover made no progress");
        chosen.push((v, m));
    }
    chosen.sort();
    chosen
}

impl fmt::Display for RoleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_role(self, f, 0)
    }
}

// Precedence levels: 0 join, 1 meet, 2 unary, 3 atom.
fn write_role(e: &RoleExpr, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
    let prec = match e {
        RoleExpr::Join(..) => 0,
        RoleExpr::Meet(..) => 1,
        RoleExpr::Neg(..) => 2,
        _ => 3,
    };
    let parens = prec < min;
    if parens {
        f.write_str("(")?;
    }
    match e {
        RoleExpr::Bottom => f.write_str("0")?,
        RoleExpr::Top => f.write_str("1")?,
        RoleExpr::Atom(a) => f.write_str(a)?,
        RoleExpr::Join(l, r) => {
            write_role(l, f, 0)?;
            f.write_str(" | ")?;
            write_role(r, f, 1)?;
        }
        RoleExpr::Meet(l, r) => {
            write_role(l, f, 1)?;
            f.write_str(" & ")?;
            write_role(r, f, 2)?;
        }
        RoleExpr::Neg(x) => {
            f.write_str("!")?;
            write_role(x, f, 3)?;
        }
        RoleExpr::Amp(x) => {
            f.write_str("amp(")?;
            write_role(x, f, 0)?;
            f.write_str(")")?;
        }
    }
    if parens {
        f.write_str(")")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> RoleExpr {
        RoleExpr::atom("A")
    }

    fn b() -> RoleExpr {
        RoleExpr::atom("B")
    }

    fn uni_ab() -> RoleUniverse {
        RoleUniverse::from_atoms(["A", "B"])
    }

    #[test]
    fn modifiers_apply_as_join_and_meet() {
        let up = RoleModifier::up(a());
        assert_eq!(apply_modifier(&up, &b()), a().join(b()));

        let u = uni_ab();
        let dn = RoleModifier::dn(a());
        assert!(u.equiv(&apply_modifier(&dn, &RoleExpr::Top), &a()).unwrap());
        let dn_bot = RoleModifier::dn(RoleExpr::Bottom);
        assert!(u.equiv(&apply_modifier(&dn_bot, &b()), &RoleExpr::Bottom).unwrap());
        // Annotations do not change the applied role.
        let checked = RoleModifier::up(a()).checked(b());
        assert_eq!(apply_modifier(&checked, &b()), a().join(b()));
    }

    #[test]
    fn complement_law() {
        let u = uni_ab();
        assert!(u.equiv(&a().join(a().neg()), &RoleExpr::Top).unwrap());
        assert!(u.equiv(&a().meet(a().neg()), &RoleExpr::Bottom).unwrap());
    }

    #[test]
    fn amp_absorption_and_distribution() {
        let u = RoleUniverse::for_roles(&[a().amp(), b().amp()]).unwrap();
        assert!(u.equiv(&a().join(a().amp()), &a().amp()).unwrap());
        assert!(u.equiv(&a().meet(a().amp()), &a()).unwrap());
        assert!(u.equiv(&a().join(b()).amp(), &a().amp().join(b().amp())).unwrap());
        assert!(u.equiv(&a().meet(b()).amp(), &a().amp().meet(b().amp())).unwrap());
        assert!(u.dominates(&a().amp(), &a()).unwrap());
        assert!(!u.dominates(&a(), &a().amp()).unwrap());
    }

    #[test]
    fn amp_of_constants_and_nesting() {
        let u = RoleUniverse::for_roles(&[a().amp().amp()]).unwrap();
        assert!(u.equiv(&RoleExpr::Bottom.amp(), &RoleExpr::Bottom).unwrap());
        assert!(u.equiv(&RoleExpr::Top.amp(), &RoleExpr::Top).unwrap());
        // amp is not assumed idempotent: amp(amp(a)) sits strictly above
        // amp(a) here.
        assert!(u.dominates(&a().amp().amp(), &a().amp()).unwrap());
        assert!(!u.equiv(&a().amp().amp(), &a().amp()).unwrap());
    }

    #[test]
    fn dominance_chain() {
        let u = uni_ab();
        let top = RoleExpr::Top;
        let bot = RoleExpr::Bottom;
        assert!(u.dominates(&top, &a().join(b())).unwrap());
        assert!(u.dominates(&a().join(b()), &a()).unwrap());
        assert!(u.dominates(&a(), &a().meet(b())).unwrap());
        assert!(u.dominates(&a().meet(b()), &bot).unwrap());
        // A & B does not dominate A for independent atoms.
        assert!(!u.dominates(&a().meet(b()), &a()).unwrap());
    }

    #[test]
    fn rminus_examples() {
        let u = uni_ab();
        assert!(u.equiv(&rminus(&b(), &RoleExpr::Bottom), &b()).unwrap());
        assert!(u.equiv(&rminus(&a(), &a()), &RoleExpr::Bottom).unwrap());
        assert!(u.equiv(&rminus(&RoleExpr::Top, &a()), &a().neg()).unwrap());
    }

    #[test]
    fn enumerate_role_classes() {
        let empty = RoleUniverse::from_atoms(Vec::<String>::new());
        let classes = empty.enumerate_roles(usize::MAX).unwrap();
        assert_eq!(classes, vec![RoleExpr::Bottom, RoleExpr::Top]);

        let one = RoleUniverse::from_atoms(["A"]);
        let classes = one.enumerate_roles(usize::MAX).unwrap();
        assert_eq!(classes.len(), 4);

        let two = uni_ab();
        let classes = two.enumerate_roles(usize::MAX).unwrap();
        assert_eq!(classes.len(), 16);
        for (i, c1) in classes.iter().enumerate() {
            for c2 in &classes[i + 1..] {
                assert!(!two.equiv(c1, c2).unwrap(), "classes {c1} and {c2} overlap");
            }
        }
        assert_eq!(two.enumerate_roles(3).unwrap().len(), 3);
    }

    #[test]
    fn enumerate_rejects_large_universe() {
        let u = RoleUniverse::from_atoms(["A", "B", "C", "D"]);
        assert!(matches!(
            u.enumerate_roles(usize::MAX),
            Err(RoleAlgebraError::UniverseTooLarge { .. })
        ));
    }

    #[test]
    fn unknown_atom_is_reported() {
        let u = RoleUniverse::from_atoms(["A"]);
        assert_eq!(
            u.equiv(&RoleExpr::atom("Z"), &RoleExpr::Top),
            Err(RoleAlgebraError::UnknownAtom("Z".into()))
        );
    }

    #[test]
    fn canonical_dnf_simplifies() {
        let u = uni_ab();
        let r = a().join(a().meet(b()));
        assert_eq!(u.canonical_dnf(&r).unwrap(), a());
        assert_eq!(u.canonical_dnf(&a().meet(a().neg())).unwrap(), RoleExpr::Bottom);
        assert_eq!(u.canonical_dnf(&a().join(a().neg())).unwrap(), RoleExpr::Top);
        let r = a().join(b()).meet(a().join(b().neg()));
        assert_eq!(u.canonical_dnf(&r).unwrap(), a());
    }

    #[test]
    fn canonical_dnf_preserves_meaning() {
        let u = uni_ab();
        for r in u.enumerate_roles(16).unwrap() {
            let dnf = u.canonical_dnf(&r).unwrap();
            assert!(u.equiv(&r, &dnf).unwrap());
        }
    }

    #[test]
    fn display_uses_concrete_syntax() {
        let r = a().join(b().meet(a().neg()));
        assert_eq!(r.to_string(), "A | B & !A");
        let r = a().join(b()).meet(a());
        assert_eq!(r.to_string(), "(A | B) & A");
        let r = a().meet(b()).neg();
        assert_eq!(r.to_string(), "!(A & B)");
        assert_eq!(a().amp().to_string(), "amp(A)");
    }
}
