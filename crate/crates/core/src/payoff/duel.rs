use crate::error::{NuelError, Result};

/// Winning probabilities of a two-player game between `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuelPayoffs {
    /// `a` wins when `a` shoots first.
    pub a_first: f64,
    /// `a` wins when `b` shoots first.
    pub a_second: f64,
    /// `b` wins when `a` shoots first.
    pub b_first: f64,
    /// `b` wins when `b` shoots first.
    pub b_second: f64,
}

/// Closed-form duel: with `d = p_a + p_b - p_a p_b`, the first shooter `a`
/// wins with probability `p_a / d` and the second with `p_a (1 - p_b) / d`.
pub fn duel_payoffs(p_a: f64, p_b: f64) -> Result<DuelPayoffs> {
    let d = p_a + p_b - p_a * p_b;
    if d <= 0.0 {
        return Err(NuelError::DegenerateGame(format!(
            "duel with marksmanships {p_a} and {p_b} never ends"
        )));
    }
    let a_first = p_a / d;
    let b_first = p_b * (1.0 - p_a) / d;
    let b_second = p_b / d;
    let a_second = p_a * (1.0 - p_b) / d;
    Ok(DuelPayoffs {
        a_first,
        a_second,
        b_first,
        b_second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn even_duel() {
        let d = duel_payoffs(0.5, 0.5).unwrap();
        assert_relative_eq!(d.a_first, 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(d.a_second, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(d.a_first + d.b_first, 1.0, epsilon = 1e-15);
        assert_relative_eq!(d.a_second + d.b_second, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn perfect_first_shot() {
        let d = duel_payoffs(1.0, 0.3).unwrap();
        assert_eq!(d.a_first, 1.0);
        assert_eq!(d.b_first, 0.0);
    }

    #[test]
    fn embedded_duel_from_a_truel() {
        // P1 (0.9) against P3 (0.2), P1 to move.
        let d = duel_payoffs(0.9, 0.2).unwrap();
        assert_relative_eq!(d.a_first, 0.9 / 0.92, epsilon = 1e-15);
        assert!((d.a_first - 0.978).abs() < 5e-4);
    }

    #[test]
    fn both_blind_is_degenerate() {
        assert!(matches!(duel_payoffs(0.0, 0.0), Err(NuelError::DegenerateGame(_))));
    }
}
