//! Reordering passes.
//!
//! [`reorder`] is an operator identity: it applies `[a, a†] = 1` and
//! `[b, b†] = 1` until every word reads `a†ᵐ aⁿ b†ᵖ b^q`. [`formal_normal_order`]
//! is the `:·:` prescription: on the selected modes it moves creators left
//! and throws the commutator terms away. The two agree only on words that
//! are already ordered.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::expr::{mode_part, Letter, Mode, OperatorExpr, Word};

/// Subset of the two modes selected for formal normal ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeSet {
    pub a: bool,
    pub b: bool,
}

impl ModeSet {
    pub const A: ModeSet = ModeSet { a: true, b: false };
    pub const B: ModeSet = ModeSet { a: false, b: true };
    pub const AB: ModeSet = ModeSet { a: true, b: true };

    pub fn contains(&self, mode: Mode) -> bool {
        match mode {
            Mode::A => self.a,
            Mode::B => self.b,
        }
    }
}

/// `c · (a†)ᵐ aⁿ` indexed by `(m, n)`.
type SingleModeNormal = BTreeMap<(usize, usize), f64>;

/// Operator-preserving normal ordering of one mode's letters.
///
/// Multiplying `a†ᵐ aⁿ` on the right by `a†` gives
/// `a†ᵐ⁺¹ aⁿ + n a†ᵐ aⁿ⁻¹`; by `a` gives `a†ᵐ aⁿ⁺¹`.
fn normal_single(letters: &[Letter]) -> SingleModeNormal {
    let mut poly: SingleModeNormal = BTreeMap::new();
    poly.insert((0, 0), 1.0);
    for l in letters {
        let mut next: SingleModeNormal = BTreeMap::new();
        for (&(m, n), &c) in &poly {
            if l.is_creation() {
                *next.entry((m + 1, n)).or_insert(0.0) += c;
                if n > 0 {
                    *next.entry((m, n - 1)).or_insert(0.0) += c * n as f64;
                }
            } else {
                *next.entry((m, n + 1)).or_insert(0.0) += c;
            }
        }
        poly = next;
    }
    poly
}

/// Formal ordering of one mode: count creators and annihilators.
fn formal_single(letters: &[Letter]) -> SingleModeNormal {
    let m = letters.iter().filter(|l| l.is_creation()).count();
    let mut poly = BTreeMap::new();
    poly.insert((m, letters.len() - m), 1.0);
    poly
}

fn normal_word(mode: Mode, m: usize, n: usize) -> Word {
    let mut w = vec![Letter::creation(mode); m];
    w.extend(std::iter::repeat_n(Letter::annihilation(mode), n));
    w
}

fn order_with(expr: &OperatorExpr, formal: ModeSet) -> OperatorExpr {
    let mut out = OperatorExpr::zero();
    for (word, &coeff) in expr.terms() {
        let order_mode = |mode: Mode| {
            let part = mode_part(word, mode);
            if formal.contains(mode) {
                formal_single(&part)
            } else {
                normal_single(&part)
            }
        };
        let pa = order_mode(Mode::A);
        let pb = order_mode(Mode::B);
        for (&(ma, na), &ca) in &pa {
            for (&(mb, nb), &cb) in &pb {
                let mut w = normal_word(Mode::A, ma, na);
                w.extend(normal_word(Mode::B, mb, nb));
                out.add_term(coeff * Complex64::new(ca * cb, 0.0), &w);
            }
        }
    }
    out
}

/// Rewrite into `a†ᵐ aⁿ b†ᵖ b^q` words without changing the operator.
pub fn reorder(expr: &OperatorExpr) -> OperatorExpr {
    order_with(expr, ModeSet { a: false, b: false })
}

/// Formal normal ordering on `modes`; unselected modes are reordered
/// operator-preservingly. Idempotent and linear.
pub fn formal_normal_order(expr: &OperatorExpr, modes: ModeSet) -> OperatorExpr {
    order_with(expr, modes)
}

/// `f† f` as an expression.
pub fn adjoint_product(expr: &OperatorExpr) -> OperatorExpr {
    &expr.adjoint() * expr
}
