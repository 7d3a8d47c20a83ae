use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::state::{check_player_count, Player};

/// Hit probabilities `p_1, ..., p_N`, one per player.
///
/// Values strictly inside (0, 1) give the convergence and uniqueness
/// guarantees of the solvers. Values on the boundary are accepted
/// ("relaxed" mode) and reported by [`Marksmanships::is_strict`]; the
/// solvers then succeed only when every payoff system stays nonsingular.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Marksmanships {
    p: Vec<f64>,
}

impl Marksmanships {
    /// Accepts any probabilities in [0, 1].
    pub fn new(p: Vec<f64>) -> Result<Self> {
        check_player_count(p.len())?;
        if let Some((i, v)) = p
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && (0.0..=1.0).contains(*v)))
        {
            return Err(invalid(format!("p_{} = {v} is not a probability", i + 1)));
        }
        Ok(Self { p })
    }

    /// Accepts only probabilities strictly between 0 and 1.
    pub fn strict(p: Vec<f64>) -> Result<Self> {
        let m = Self::new(p)?;
        if !m.is_strict() {
            return Err(invalid("marksmanships must lie strictly between 0 and 1"));
        }
        Ok(m)
    }

    pub fn n_players(&self) -> usize {
        self.p.len()
    }

    /// `p` of a 1-based player.
    #[inline]
    pub fn of(&self, player: Player) -> f64 {
        self.p[player - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn is_strict(&self) -> bool {
        self.p.iter().all(|&v| v > 0.0 && v < 1.0)
    }

    pub fn all_distinct(&self) -> bool {
        self.p
            .iter()
            .enumerate()
            .all(|(i, a)| self.p[i + 1..].iter().all(|b| a != b))
    }

    pub fn min(&self) -> f64 {
        self.p.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl Index<Player> for Marksmanships {
    type Output = f64;

    fn index(&self, player: Player) -> &f64 {
        &self.p[player - 1]
    }
}

impl TryFrom<Vec<f64>> for Marksmanships {
    type Error = crate::NuelError;

    fn try_from(p: Vec<f64>) -> Result<Self> {
        Self::new(p)
    }
}

impl From<Marksmanships> for Vec<f64> {
    fn from(m: Marksmanships) -> Self {
        m.p
    }
}

impl fmt::Debug for Marksmanships {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.p).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_and_relaxed() {
        assert!(Marksmanships::strict(vec![0.5, 0.7]).is_ok());
        assert!(Marksmanships::strict(vec![1.0, 0.7]).is_err());
        let relaxed = Marksmanships::new(vec![1.0, 0.0, 0.5]).unwrap();
        assert!(!relaxed.is_strict());
        assert!(Marksmanships::new(vec![1.2, 0.5]).is_err());
        assert!(Marksmanships::new(vec![f64::NAN, 0.5]).is_err());
        assert!(Marksmanships::new(vec![0.5]).is_err());
    }

    #[test]
    fn one_based_access() {
        let m = Marksmanships::new(vec![0.9, 0.1, 0.2]).unwrap();
        assert_eq!(m[1], 0.9);
        assert_eq!(m.of(3), 0.2);
        assert_eq!(m.min(), 0.1);
        assert!(m.all_distinct());
        assert!(!Marksmanships::new(vec![0.3, 0.3]).unwrap().all_distinct());
    }
}
