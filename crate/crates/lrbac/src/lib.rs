//! λ-RBAC: a lambda calculus with role-based access control.
//!
//! The toolkit has five parts:
//!
//! * [`roles`] — the role algebra: a boolean lattice over named atoms plus
//!   the `amp` constructor, with a truth-table decision procedure for
//!   equivalence and dominance.
//! * [`syntax`] — terms, types, the concrete grammar (parser and printer),
//!   capture-avoiding substitution, and the value/term sublanguage check.
//! * [`eval`] — deterministic small-step evaluation under a context role,
//!   with role errors, role-modification errors, and check-time marking.
//! * [`typing`] — algorithmic subtyping and type synthesis for the two
//!   effect systems (a role *sufficient* to run a term, and a role
//!   *necessary* on every path), plus the amplification-controlled variant.
//! * [`oracle`] — brute-force and generative harnesses that exercise the
//!   guarantees of the two systems on enumerated role universes.

pub mod eval;
pub mod oracle;
pub mod roles;
pub mod typing;
pub mod syntax;

pub use roles::{RoleExpr, RoleModifier, RoleUniverse};
pub use syntax::{Term, Type};
