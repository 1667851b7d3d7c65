use super::ModelError;

/// `β` (girth deficit, `g >= n-β+1`), `κ` (overlap) and `α` (truncation deficit, `η = n-α`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundParams {
    pub beta: usize,
    pub kappa: usize,
    pub alpha: usize,
}

impl BoundParams {
    pub fn new(beta: usize, kappa: usize, alpha: usize) -> Self {
        Self { beta, kappa, alpha }
    }

    /// `η = n - α`, which must be at least 1.
    pub fn eta(&self, n: usize) -> Result<usize, ModelError> {
        n.checked_sub(self.alpha)
            .filter(|&e| e >= 1)
            .ok_or(ModelError::EtaOutOfRange { n, alpha: self.alpha })
    }

    /// The admissible `β` for girth `g` at rank `n`: the least `β` with `g >= n-β+1`.
    pub fn beta_for_girth(n: usize, girth: Option<usize>) -> usize {
        match girth {
            Some(g) => (n + 1).saturating_sub(g),
            None => 0,
        }
    }
}

impl Default for BoundParams {
    fn default() -> Self {
        Self::new(0, 1, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_examples() {
        assert_eq!(BoundParams::new(0, 1, 0).eta(5), Ok(5));
        assert_eq!(BoundParams::new(1, 2, 3).eta(5), Ok(2));
        assert!(BoundParams::new(1, 2, 5).eta(5).is_err());
    }

    #[test]
    fn beta_from_girth() {
        assert_eq!(BoundParams::beta_for_girth(4, Some(5)), 0);
        assert_eq!(BoundParams::beta_for_girth(4, Some(4)), 1);
        assert_eq!(BoundParams::beta_for_girth(4, Some(2)), 3);
        assert_eq!(BoundParams::beta_for_girth(4, None), 0);
    }
}
