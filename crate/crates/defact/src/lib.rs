//! Reasoning about actions under defeasible constraints, defeasible
//! observations, and defeasible or abnormal action effects.
//!
//! Domain descriptions written in three action languages of increasing
//! expressiveness (`AT0`, `AT1`, `AT2`) compile to prioritized logic
//! programs; queries are answered against the answer sets of those
//! programs via a transition-system semantics. The crate is organized as
//! a pipeline:
//!
//! * [`at`] — parse and validate `.atd` domain descriptions,
//! * [`translate`] — compile a domain to a prioritized logic program,
//! * [`logic`] — program syntax, orders, grounding,
//! * [`plp`] — reducts and answer sets of prioritized programs,
//! * [`asp`] — answer-set solving for plain extended programs,
//! * [`reason`] — transition function, models, entailment,
//! * [`analyze`] — static domain analyses (consistency, monotonicity,
//!   temporal definiteness).

pub mod analyze;
pub mod asp;
pub mod at;
pub mod logic;
pub mod plp;
pub mod reason;
pub mod translate;
