use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Maximum number of ladder letters in a single word.
pub const MAX_DEGREE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    A,
    B,
}

/// One ladder operator. The derived order (`a < ad < b < bd`) is the
/// lexicographic order used for canonical forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    Ad,
    B,
    Bd,
}

impl Letter {
    pub fn mode(self) -> Mode {
        match self {
            Letter::A | Letter::Ad => Mode::A,
            Letter::B | Letter::Bd => Mode::B,
        }
    }

    pub fn is_creation(self) -> bool {
        matches!(self, Letter::Ad | Letter::Bd)
    }

    pub fn dagger(self) -> Letter {
        match self {
            Letter::A => Letter::Ad,
            Letter::Ad => Letter::A,
            Letter::B => Letter::Bd,
            Letter::Bd => Letter::B,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Letter::A => "a",
            Letter::Ad => "ad",
            Letter::B => "b",
            Letter::Bd => "bd",
        }
    }

    pub fn creation(mode: Mode) -> Letter {
        match mode {
            Mode::A => Letter::Ad,
            Mode::B => Letter::Bd,
        }
    }

    pub fn annihilation(mode: Mode) -> Letter {
        match mode {
            Mode::A => Letter::A,
            Mode::B => Letter::B,
        }
    }
}

/// A product of ladder letters, applied right to left.
pub type Word = Vec<Letter>;

/// Mode A letters commute with mode B letters, so every word is stored with
/// its A letters first. The order within each mode is preserved.
pub fn mode_sorted(word: &[Letter]) -> Word {
    let mut out: Word = word.iter().copied().filter(|l| l.mode() == Mode::A).collect();
    out.extend(word.iter().copied().filter(|l| l.mode() == Mode::B));
    out
}

/// The letters of `word` belonging to `mode`, in order.
pub fn mode_part(word: &[Letter], mode: Mode) -> Word {
    word.iter().copied().filter(|l| l.mode() == mode).collect()
}

/// Polynomial in the ladder operators of two modes with complex weights.
///
/// Terms are kept in canonical form: words sorted, like terms merged, and
/// exactly-zero coefficients dropped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OperatorExpr {
    terms: BTreeMap<Word, Complex64>,
}

impl OperatorExpr {
    pub fn zero() -> Self {
        OperatorExpr::default()
    }

    pub fn scalar(c: Complex64) -> Self {
        Self::term(c, Vec::new())
    }

    pub fn one() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn letter(l: Letter) -> Self {
        Self::term(Complex64::new(1.0, 0.0), vec![l])
    }

    pub fn term(coeff: Complex64, word: Word) -> Self {
        let mut e = OperatorExpr::zero();
        e.add_term(coeff, &word);
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (Complex64, Word)>>(terms: I) -> Self {
        let mut e = OperatorExpr::zero();
        for (c, w) in terms {
            e.add_term(c, &w);
        }
        e
    }

    /// The homodyne difference observable `e^{iθ} a†b + e^{−iθ} a b†`.
    pub fn homodyne(theta: f64) -> Self {
        Self::from_terms([
            (Complex64::from_polar(1.0, theta), vec![Letter::Ad, Letter::B]),
            (Complex64::from_polar(1.0, -theta), vec![Letter::A, Letter::Bd]),
        ])
    }

    pub fn add_term(&mut self, coeff: Complex64, word: &[Letter]) {
        if coeff == Complex64::new(0.0, 0.0) {
            return;
        }
        let key = mode_sorted(word);
        let entry = self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
        *entry += coeff;
        if *entry == Complex64::new(0.0, 0.0) {
            let key = mode_sorted(word);
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, word: &[Letter]) -> Complex64 {
        self.terms
            .get(&mode_sorted(word))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Coefficient of the identity word.
    pub fn constant(&self) -> Complex64 {
        self.coeff(&[])
    }

    /// Length of the longest word.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, &k)| (k * c, w.clone())))
    }

    /// Hermitian adjoint: reverse words, dagger letters, conjugate weights.
    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, k)| {
            let word: Word = w.iter().rev().map(|l| l.dagger()).collect();
            (k.conj(), word)
        }))
    }

    /// Drop terms whose weight has magnitude at most `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(_, k)| k.norm() > tol)
                .map(|(w, &k)| (k, w.clone())),
        )
    }

    /// Largest coefficient-wise difference to `other`.
    pub fn max_coeff_diff(&self, other: &OperatorExpr) -> f64 {
        let diff = self - other;
        diff.terms.values().map(|k| k.norm()).fold(0.0, f64::max)
    }

    /// Evaluate with every letter replaced by a c-number.
    pub fn substitute(&self, alpha: Complex64, beta: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(w, &k)| {
                w.iter().fold(k, |acc, l| {
                    acc * match l {
                        Letter::A => alpha,
                        Letter::Ad => alpha.conj(),
                        Letter::B => beta,
                        Letter::Bd => beta.conj(),
                    }
                })
            })
            .sum()
    }
}

impl Add for &OperatorExpr {
    type Output = OperatorExpr;

    fn add(self, rhs: &OperatorExpr) -> OperatorExpr {
        let mut out = self.clone();
        for (w, &k) in &rhs.terms {
            out.add_term(k, w);
        }
        out
    }
}

impl Sub for &OperatorExpr {
    type Output = OperatorExpr;

    fn sub(self, rhs: &OperatorExpr) -> OperatorExpr {
        let mut out = self.clone();
        for (w, &k) in &rhs.terms {
            out.add_term(-k, w);
        }
        out
    }
}

impl Neg for &OperatorExpr {
    type Output = OperatorExpr;

    fn neg(self) -> OperatorExpr {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// Noncommutative product: words are concatenated, nothing is reordered
/// within a mode.
impl Mul for &OperatorExpr {
    type Output = OperatorExpr;

    fn mul(self, rhs: &OperatorExpr) -> OperatorExpr {
        let mut out = OperatorExpr::zero();
        for (wl, &kl) in &self.terms {
            for (wr, &kr) in &rhs.terms {
                let mut w = wl.clone();
                w.extend_from_slice(wr);
                out.add_term(kl * kr, &w);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for OperatorExpr {
            type Output = OperatorExpr;

            fn $m(self, rhs: OperatorExpr) -> OperatorExpr {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Canonical text form: `(re,im)*w1*w2 + ...`, or `0` for the empty sum.
impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, k)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({},{})", k.re, k.im)?;
            for l in w {
                write!(f, "*{}", l.symbol())?;
            }
        }
        Ok(())
    }
}
