//! Game states, the admissible state space and successor functions.
//!
//! A state is the word `s0 s1 ... sN`: `s0` is the player holding the move
//! (0 once the game is over) and `sn` is 1 while player `n` is alive. Players
//! are numbered from 1. Internally the alive flags live in a bitmask where
//! bit `n - 1` belongs to player `n`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, NuelError, Result};

/// Largest number of players accepted anywhere in the crate.
///
/// The admissible state space holds `sum_k k * C(N, k) + N = N * 2^(N-1) + N`
/// states, roughly ten million at this cap.
pub const MAX_PLAYERS: usize = 20;

/// A player index in `1..=N`.
pub type Player = usize;

pub(crate) fn check_player_count(n_players: usize) -> Result<()> {
    if n_players < 2 {
        return Err(invalid(format!("need at least 2 players, got {n_players}")));
    }
    if n_players > MAX_PLAYERS {
        return Err(invalid(format!(
            "{n_players} players exceeds the supported maximum of {MAX_PLAYERS}"
        )));
    }
    Ok(())
}

#[inline]
pub(crate) fn bit(player: Player) -> u32 {
    1u32 << (player - 1)
}

/// Iterates the players whose bits are set in `mask`, in increasing order.
pub(crate) fn players_in(mask: u32) -> impl Iterator<Item = Player> + Clone {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let p = rest.trailing_zeros() as usize + 1;
            rest &= rest - 1;
            Some(p)
        }
    })
}

/// An admissible game state.
///
/// Construction validates admissibility, so every value of this type is a
/// state that can occur in play.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameState {
    n_players: u8,
    mover: u8,
    alive: u32,
}

impl GameState {
    /// Builds a state from the mover (0 for terminal) and the alive bitmask.
    pub fn new(n_players: usize, mover: usize, alive: u32) -> Result<Self> {
        check_player_count(n_players)?;
        let full = full_mask(n_players);
        if alive & !full != 0 {
            return Err(invalid(format!(
                "alive mask {alive:#b} has bits beyond player {n_players}"
            )));
        }
        let count = alive.count_ones();
        if count == 0 {
            return Err(invalid("no player alive"));
        }
        if mover == 0 {
            if count != 1 {
                return Err(invalid("terminal state must have exactly one survivor"));
            }
        } else {
            if mover > n_players {
                return Err(invalid(format!("mover {mover} out of range 1..={n_players}")));
            }
            if alive & bit(mover) == 0 {
                return Err(invalid(format!("mover {mover} is dead")));
            }
            if count < 2 {
                return Err(invalid("a single survivor cannot hold the move"));
            }
        }
        Ok(Self {
            n_players: n_players as u8,
            mover: mover as u8,
            alive,
        })
    }

    /// Everybody alive, `mover` to shoot: the state written `m11...1`.
    pub fn all_alive(n_players: usize, mover: Player) -> Result<Self> {
        check_player_count(n_players)?;
        Self::new(n_players, mover, full_mask(n_players))
    }

    /// Terminal state won by `winner`.
    pub fn terminal(n_players: usize, winner: Player) -> Result<Self> {
        if winner == 0 || winner > n_players {
            return Err(invalid(format!("winner {winner} out of range")));
        }
        Self::new(n_players, 0, bit(winner))
    }

    pub fn n_players(&self) -> usize {
        self.n_players as usize
    }

    /// The player holding the move, 0 when terminal.
    pub fn mover(&self) -> usize {
        self.mover as usize
    }

    /// Alive bitmask, bit `n - 1` for player `n`.
    pub fn alive_mask(&self) -> u32 {
        self.alive
    }

    pub fn alive_count(&self) -> usize {
        self.alive.count_ones() as usize
    }

    pub fn is_alive(&self, player: Player) -> bool {
        player >= 1 && player <= self.n_players() && self.alive & bit(player) != 0
    }

    pub fn is_terminal(&self) -> bool {
        self.mover == 0
    }

    /// The sole survivor of a terminal state.
    pub fn winner(&self) -> Option<Player> {
        self.is_terminal()
            .then(|| self.alive.trailing_zeros() as usize + 1)
    }

    /// The alive players, ascending.
    pub fn alive(&self) -> impl Iterator<Item = Player> + Clone {
        players_in(self.alive)
    }

    /// Alive players other than the mover. Empty for terminal states.
    pub fn alive_opponents(&self) -> impl Iterator<Item = Player> + Clone {
        let mask = if self.is_terminal() {
            0
        } else {
            self.alive & !bit(self.mover())
        };
        players_in(mask)
    }

    /// The first alive player strictly after `from` in cyclic turn order.
    fn next_alive_after(&self, from: Player, alive: u32) -> Player {
        let n = self.n_players();
        (1..=n)
            .map(|step| (from - 1 + step) % n + 1)
            .find(|&p| alive & bit(p) != 0)
            .expect("at least one player alive")
    }

    /// The successor when the shot misses: same survivors, the move passes
    /// to the next alive player in cyclic order.
    pub fn next_on_miss(&self) -> Result<GameState> {
        if self.is_terminal() {
            return Err(invalid(format!("{self} is terminal")));
        }
        let mover = self.next_alive_after(self.mover(), self.alive);
        Ok(GameState { mover: mover as u8, ..*self })
    }

    /// The successor when `victim` is killed.
    pub fn next_on_kill(&self, victim: Player) -> Result<GameState> {
        if self.is_terminal() {
            return Err(invalid(format!("{self} is terminal")));
        }
        if victim == self.mover() || !self.is_alive(victim) {
            return Err(invalid(format!(
                "player {victim} is not a live opponent in {self}"
            )));
        }
        let alive = self.alive & !bit(victim);
        let mover = if alive.count_ones() == 1 {
            0
        } else {
            self.next_alive_after(self.mover(), alive)
        };
        Ok(GameState {
            mover: mover as u8,
            alive,
            n_players: self.n_players,
        })
    }

    /// Canonical ordering key: survivor count, alive mask, mover.
    fn sort_key(&self) -> (u32, u32, u8, u8) {
        (self.alive.count_ones(), self.alive, self.mover, self.n_players)
    }
}

impl Ord for GameState {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for GameState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n_players();
        let bits: String = (1..=n)
            .map(|p| if self.alive & bit(p) != 0 { '1' } else { '0' })
            .collect();
        if n <= 9 {
            write!(f, "{}{}", self.mover, bits)
        } else {
            write!(f, "[{}|{}]", self.mover, bits)
        }
    }
}

impl fmt::Debug for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GameState({self})")
    }
}

impl FromStr for GameState {
    type Err = NuelError;

    /// Parses `21110` (N <= 9) or the bracketed `[12|1011...]` form.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (mover, bits) = if let Some(inner) = s.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| NuelError::Parse(format!("unterminated state '{s}'")))?;
            let (m, b) = inner
                .split_once('|')
                .ok_or_else(|| NuelError::Parse(format!("missing '|' in state '{s}'")))?;
            let m = m
                .parse::<usize>()
                .map_err(|e| NuelError::Parse(format!("bad mover in '{s}': {e}")))?;
            (m, b)
        } else {
            let mut chars = s.chars();
            let m = chars
                .next()
                .and_then(|c| c.to_digit(10))
                .ok_or_else(|| NuelError::Parse(format!("bad state '{s}'")))?;
            (m as usize, chars.as_str())
        };
        let n = bits.len();
        if n < 2 {
            return Err(NuelError::Parse(format!("state '{s}' has fewer than 2 players")));
        }
        if n > MAX_PLAYERS {
            return Err(NuelError::Parse(format!("state '{s}' has too many players")));
        }
        let mut alive = 0u32;
        for (i, c) in bits.chars().enumerate() {
            match c {
                '1' => alive |= 1 << i,
                '0' => {}
                _ => return Err(NuelError::Parse(format!("bad alive flag '{c}' in '{s}'"))),
            }
        }
        GameState::new(n, mover, alive).map_err(|e| NuelError::Parse(format!("'{s}': {e}")))
    }
}

impl serde::Serialize for GameState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for GameState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn full_mask(n_players: usize) -> u32 {
    if n_players >= 32 {
        u32::MAX
    } else {
        (1u32 << n_players) - 1
    }
}

/// All admissible states of the `n_players`-uel in canonical order
/// (survivor count, then alive mask, then mover).
pub fn enumerate_states(n_players: usize) -> Result<Vec<GameState>> {
    check_player_count(n_players)?;
    let n = n_players as u8;
    let mut masks: Vec<u32> = (1..=full_mask(n_players)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut out = Vec::with_capacity(n_players << (n_players - 1));
    for alive in masks {
        if alive.count_ones() == 1 {
            out.push(GameState { n_players: n, mover: 0, alive });
        } else {
            out.extend(players_in(alive).map(|m| GameState {
                n_players: n,
                mover: m as u8,
                alive,
            }));
        }
    }
    Ok(out)
}

/// Dense index over the admissible states of one game size.
///
/// Lookups are direct-addressed by `(alive mask, mover)`, so the table costs
/// `4 * (N + 1) * 2^N` bytes on top of the state list.
#[derive(Debug, Clone)]
pub struct StateSpace {
    n_players: usize,
    states: Vec<GameState>,
    slots: Vec<u32>,
}

impl StateSpace {
    pub fn new(n_players: usize) -> Result<Self> {
        let states = enumerate_states(n_players)?;
        let mut slots = vec![u32::MAX; (n_players + 1) << n_players];
        for (i, s) in states.iter().enumerate() {
            slots[Self::slot(n_players, s)] = i as u32;
        }
        Ok(Self {
            n_players,
            states,
            slots,
        })
    }

    #[inline]
    fn slot(n_players: usize, s: &GameState) -> usize {
        s.alive as usize * (n_players + 1) + s.mover as usize
    }

    pub fn n_players(&self) -> usize {
        self.n_players
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[GameState] {
        &self.states
    }

    /// Position of `s` in the canonical order.
    ///
    /// Panics if `s` belongs to a game of a different size.
    #[inline]
    pub fn index(&self, s: &GameState) -> usize {
        assert_eq!(s.n_players(), self.n_players, "state from a different game size");
        self.slots[Self::slot(self.n_players, s)] as usize
    }

    /// The states whose survivors are exactly `alive`, ordered by mover.
    pub fn states_with_alive(&self, alive: u32) -> Result<Vec<GameState>> {
        if alive.count_ones() < 2 {
            return GameState::new(self.n_players, 0, alive).map(|s| vec![s]);
        }
        players_in(alive)
            .map(|m| GameState::new(self.n_players, m, alive))
            .collect()
    }

    /// Non-terminal states, canonical order.
    pub fn decision_states(&self) -> impl Iterator<Item = &GameState> {
        self.states.iter().filter(|s| !s.is_terminal())
    }
}

/// Alive masks with exactly `k` of `n_players` bits set, ascending.
pub(crate) fn masks_with_count(n_players: usize, k: usize) -> Vec<u32> {
    (1..=full_mask(n_players))
        .filter(|m| m.count_ones() as usize == k)
        .collect()
}
