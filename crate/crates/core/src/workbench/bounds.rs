use serde::{Deserialize, Serialize};

/// A lower bound on the number of disjoint rainbow bases and whether its side condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub n: usize,
    pub beta: usize,
    pub kappa: usize,
    pub disjoint: bool,
    /// `(2κ+2β+1)² + β`, reported for the overlapping bound only.
    pub alpha: Option<usize>,
    pub applicable: bool,
    /// May be negative when the side condition fails.
    pub value: i64,
}

/// Disjoint sequences: `n - 4β² - 7β - 4` when `n >= 4β² + 7β + 5`.
/// Overlapping sequences: `n - α - 2` with `α = (2κ+2β+1)² + β`, when `κ >= 1` and `n > 2α`.
pub fn theorem_bounds(n: usize, beta: usize, kappa: usize, disjoint: bool) -> BoundRecord {
    let (n_, b, k) = (n as i64, beta as i64, kappa as i64);
    if disjoint {
        let q = 4 * b * b + 7 * b;
        BoundRecord {
            n,
            beta,
            kappa,
            disjoint,
            alpha: None,
            applicable: n_ >= q + 5,
            value: n_ - q - 4,
        }
    } else {
        let root = 2 * k + 2 * b + 1;
        let alpha = root * root + b;
        BoundRecord {
            n,
            beta,
            kappa,
            disjoint,
            alpha: Some(alpha as usize),
            applicable: kappa >= 1 && n_ > 2 * alpha,
            value: n_ - alpha - 2,
        }
    }
}
