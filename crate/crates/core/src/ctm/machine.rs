use std::fmt;

use rand::Rng;

use crate::rng::below;

/// Absolute head move on the 2D tape. Rows grow downward, so `Up` is row - 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Up,
    Down,
    Left,
    Right,
}

impl Move {
    pub const ALL: [Move; 4] = [Move::Up, Move::Down, Move::Left, Move::Right];

    pub fn delta(self) -> (i64, i64) {
        match self {
            Move::Up => (-1, 0),
            Move::Down => (1, 0),
            Move::Left => (0, -1),
            Move::Right => (0, 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Next {
    /// 1-based state number.
    State(u8),
    Halt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub write: u8,
    pub mv: Move,
    pub next: Next,
}

/// Transition table of a binary-alphabet 2D machine.
///
/// Entry `2 * (state - 1) + read` holds the action taken in `state` (1-based)
/// when the head reads `read`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MachineRule {
    states: u8,
    table: Vec<Transition>,
}

pub const SYMBOLS: u8 = 2;

/// Choices per table entry: `2 symbols * 4 moves * (states + halt)`.
pub fn entry_radix(states: u8) -> u64 {
    2 * 4 * (states as u64 + 1)
}

/// `(2 * 4 * (s + 1))^(2s)`, or `None` when it exceeds `u128`.
pub fn machine_count(states: u8) -> Option<u128> {
    (entry_radix(states) as u128).checked_pow(2 * states as u32)
}

impl MachineRule {
    pub fn new(states: u8, table: Vec<Transition>) -> Option<Self> {
        let valid = states >= 1
            && table.len() == 2 * states as usize
            && table.iter().all(|t| {
                t.write < SYMBOLS
                    && match t.next {
                        Next::State(k) => (1..=states).contains(&k),
                        Next::Halt => true,
                    }
            });
        valid.then_some(Self { states, table })
    }

    pub fn states(&self) -> u8 {
        self.states
    }

    pub fn table(&self) -> &[Transition] {
        &self.table
    }

    pub fn transition(&self, state: u8, read: u8) -> Transition {
        self.table[2 * (state as usize - 1) + read as usize]
    }

    fn decode_entry(states: u8, e: u64) -> Transition {
        let per_write = 4 * (states as u64 + 1);
        let write = (e / per_write) as u8;
        let rem = e % per_write;
        let mv = Move::ALL[(rem / (states as u64 + 1)) as usize];
        let next = match (rem % (states as u64 + 1)) as u8 {
            k if k < states => Next::State(k + 1),
            _ => Next::Halt,
        };
        Transition { write, mv, next }
    }

    fn encode_entry(states: u8, t: Transition) -> u64 {
        let next = match t.next {
            Next::State(k) => k as u64 - 1,
            Next::Halt => states as u64,
        };
        let mv = Move::ALL.iter().position(|&m| m == t.mv).unwrap() as u64;
        (t.write as u64) * 4 * (states as u64 + 1) + mv * (states as u64 + 1) + next
    }

    /// Rule at position `index` of the lexicographic enumeration.
    ///
    /// Entries are compared in table order with the first entry most
    /// significant; within an entry the order is write symbol, then move
    /// (up, down, left, right), then next state (1..=s, then halt).
    pub fn from_index(states: u8, mut index: u128) -> Option<Self> {
        if index >= machine_count(states)? {
            return None;
        }
        let radix = entry_radix(states) as u128;
        let mut table = vec![Self::decode_entry(states, 0); 2 * states as usize];
        for slot in table.iter_mut().rev() {
            *slot = Self::decode_entry(states, (index % radix) as u64);
            index /= radix;
        }
        Some(Self { states, table })
    }

    pub fn index(&self) -> u128 {
        let radix = entry_radix(self.states) as u128;
        self.table.iter().fold(0u128, |acc, &t| {
            acc * radix + Self::encode_entry(self.states, t) as u128
        })
    }

    /// Uniformly random rule, drawn entry by entry.
    pub fn random<R: Rng + ?Sized>(states: u8, rng: &mut R) -> Self {
        let radix = entry_radix(states) as usize;
        let table = (0..2 * states as usize)
            .map(|_| Self::decode_entry(states, below(rng, radix) as u64))
            .collect();
        Self { states, table }
    }
}

impl fmt::Display for MachineRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.table.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let mv = match t.mv {
                Move::Up => 'U',
                Move::Down => 'D',
                Move::Left => 'L',
                Move::Right => 'R',
            };
            match t.next {
                Next::State(k) => write!(f, "{}{mv}{k}", t.write)?,
                Next::Halt => write!(f, "{}{mv}H", t.write)?,
            }
        }
        Ok(())
    }
}

/// Lexicographic enumeration of every rule with `states` states.
pub fn enumerate_machines(states: u8) -> impl Iterator<Item = MachineRule> {
    let count = machine_count(states).unwrap_or(0);
    (0..count).map_while(move |i| MachineRule::from_index(states, i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use std::collections::HashSet;

    #[test]
    fn counts() {
        assert_eq!(machine_count(1), Some(256));
        assert_eq!(machine_count(2), Some(331_776));
        assert_eq!(enumerate_machines(1).count(), 256);
    }

    #[test]
    fn first_rule_is_all_minimal() {
        let r = MachineRule::from_index(2, 0).unwrap();
        let min = Transition {
            write: 0,
            mv: Move::Up,
            next: Next::State(1),
        };
        assert!(r.table().iter().all(|&t| t == min));
        assert_eq!(r.to_string(), "0U1 0U1 0U1 0U1");
    }

    #[test]
    fn last_rule_is_all_maximal() {
        let r = MachineRule::from_index(1, 255).unwrap();
        assert_eq!(r.to_string(), "1RH 1RH");
        assert!(MachineRule::from_index(1, 256).is_none());
    }

    #[test]
    fn index_is_a_bijection() {
        let rules: HashSet<_> = enumerate_machines(1).map(|r| r.to_string()).collect();
        assert_eq!(rules.len(), 256);
        for i in (0..331_776u128).step_by(997) {
            assert_eq!(MachineRule::from_index(2, i).unwrap().index(), i);
        }
    }

    #[test]
    fn enumeration_is_lexicographic_in_last_entry_first() {
        // consecutive indexes differ in the last table entry first
        let a = MachineRule::from_index(1, 0).unwrap();
        let b = MachineRule::from_index(1, 1).unwrap();
        assert_eq!(a.table()[0], b.table()[0]);
        assert_eq!(b.table()[1].next, Next::Halt);
    }

    #[test]
    fn random_rules_are_valid() {
        let mut rng = stream_rng(1, 0);
        for _ in 0..100 {
            let r = MachineRule::random(3, &mut rng);
            assert!(MachineRule::new(3, r.table().to_vec()).is_some());
            assert_eq!(MachineRule::from_index(3, r.index()).unwrap(), r);
        }
    }

    #[test]
    fn new_validates_fields() {
        let t = Transition {
            write: 0,
            mv: Move::Left,
            next: Next::State(3),
        };
        assert!(MachineRule::new(2, vec![t; 4]).is_none());
        assert!(MachineRule::new(3, vec![t; 6]).is_some());
        assert!(MachineRule::new(3, vec![t; 5]).is_none());
    }
}
