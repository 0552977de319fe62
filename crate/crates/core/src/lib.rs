//! Model checking of CTL$ formulas over weighted automata with
//! semiring-valued transitions.

pub mod automaton;
pub mod bisim;
pub mod checker;
pub mod error;
pub mod linalg;
pub mod logic;
pub mod semiring;

pub use automaton::{parse_automaton, serialize_automaton, AutomatonBuilder, Path, WeightedAutomaton};
pub use error::{Error, Result};
pub use linalg::{StateSet, WMatrix, WVector};
pub use semiring::{ClosureStrategy, Cmp, Semiring, SemiringFlags, Weight, WeightOrder};
pub use logic::{ctl_compat, normalize_cmp, parse_formula, Bound, Formula};
pub use checker::{check, CheckStats, ClosureMatrix, Mark, SatResult};
pub use bisim::{automata_equivalent, largest_bisimulation, quotient, union, Partition};
