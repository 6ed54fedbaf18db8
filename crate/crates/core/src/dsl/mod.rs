//! Two-mode ladder-operator expressions: parsing, canonical printing and
//! the two reordering passes.

mod expr;
mod order;
mod parse;

pub use expr::{mode_part, mode_sorted, Letter, Mode, OperatorExpr, Word, MAX_DEGREE};
pub use order::{adjoint_product, formal_normal_order, reorder, ModeSet};
pub use parse::{parse, parse_with_theta, ParseError};
