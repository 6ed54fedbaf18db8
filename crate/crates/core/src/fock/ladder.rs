use ndarray::Array2;
use num_complex::Complex64;

use super::FockError;
use crate::dsl::{Letter, Mode};

/// Truncated single-mode ladder matrices, `⟨n−1|a|n⟩ = √n`.
#[derive(Clone, Debug)]
pub struct LadderMatrices {
    cutoff: usize,
    lower: Array2<f64>,
}

impl LadderMatrices {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Annihilator on one mode.
    pub fn a(&self) -> &Array2<f64> {
        &self.lower
    }

    /// Creator on one mode.
    pub fn a_dag(&self) -> Array2<f64> {
        self.lower.t().to_owned()
    }

    /// `a ⊗ 1` on the two-mode space, basis index `n_a·cutoff + n_b`.
    /// Dense; meant for small cutoffs.
    pub fn a_two_mode(&self) -> Array2<f64> {
        kron(&self.lower, &Array2::eye(self.cutoff))
    }

    /// `1 ⊗ b` on the two-mode space.
    pub fn b_two_mode(&self) -> Array2<f64> {
        kron(&Array2::eye(self.cutoff), &self.lower)
    }

    /// Dense two-mode matrix of a single letter.
    pub fn letter_matrix(&self, l: Letter) -> Array2<f64> {
        match l {
            Letter::A => self.a_two_mode(),
            Letter::Ad => self.a_two_mode().t().to_owned(),
            Letter::B => self.b_two_mode(),
            Letter::Bd => self.b_two_mode().t().to_owned(),
        }
    }

    /// Dense two-mode matrix of a word as the product of truncated letter
    /// matrices.
    pub fn word_matrix(&self, word: &[Letter]) -> Array2<Complex64> {
        let d = self.cutoff * self.cutoff;
        let mut m: Array2<f64> = Array2::eye(d);
        for &l in word {
            m = m.dot(&self.letter_matrix(l));
        }
        m.mapv(|v| Complex64::new(v, 0.0))
    }
}

pub fn build_ladder(cutoff: usize) -> Result<LadderMatrices, FockError> {
    if cutoff < 2 {
        return Err(FockError::CutoffTooSmall(cutoff));
    }
    let mut lower = Array2::zeros((cutoff, cutoff));
    for n in 1..cutoff {
        lower[[n - 1, n]] = (n as f64).sqrt();
    }
    Ok(LadderMatrices { cutoff, lower })
}

fn kron(x: &Array2<f64>, y: &Array2<f64>) -> Array2<f64> {
    let (xr, xc) = x.dim();
    let (yr, yc) = y.dim();
    let mut out = Array2::zeros((xr * yr, xc * yc));
    for i in 0..xr {
        for j in 0..xc {
            let v = x[[i, j]];
            if v == 0.0 {
                continue;
            }
            for k in 0..yr {
                for l in 0..yc {
                    out[[i * yr + k, j * yc + l]] = v * y[[k, l]];
                }
            }
        }
    }
    out
}

/// Apply one mode's letters (rightmost first) to `|n⟩` in a truncated space.
/// Returns the amplitude and the output level, or `None` when the result
/// vanishes or leaves the space.
pub fn apply_mode_letters(letters: &[Letter], n: usize, cutoff: usize) -> Option<(f64, usize)> {
    let mut level = n;
    let mut amp = 1.0;
    for l in letters.iter().rev() {
        if l.is_creation() {
            level += 1;
            if level >= cutoff {
                return None;
            }
            amp *= (level as f64).sqrt();
        } else {
            if level == 0 {
                return None;
            }
            amp *= (level as f64).sqrt();
            level -= 1;
        }
    }
    Some((amp, level))
}

/// Split a word into its per-mode letter sequences.
pub fn split_word(word: &[Letter]) -> (Vec<Letter>, Vec<Letter>) {
    let a = word.iter().copied().filter(|l| l.mode() == Mode::A).collect();
    let b = word.iter().copied().filter(|l| l.mode() == Mode::B).collect();
    (a, b)
}
