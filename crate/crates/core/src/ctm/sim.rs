//! Execution of 2D machines on an unbounded blank tape.

use crate::graph::BitMatrix;

use super::machine::{MachineRule, Next};

/// What a halted machine leaves on the tape.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MachineOutput {
    /// No cell holds a 1.
    Blank,
    /// Smallest rectangle containing every 1 cell.
    Block(BitMatrix),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaltResult {
    pub halted: bool,
    pub steps_used: u64,
    /// Present iff `halted`.
    pub output: Option<MachineOutput>,
    /// The run was cut short because a full configuration repeated.
    pub cycle_detected: bool,
}

/// Growable dense tape, recentred by doubling whenever the head leaves it.
#[derive(Debug)]
struct Tape {
    size: i64,
    // tape coordinate of grid cell (0, 0)
    origin: (i64, i64),
    cells: Vec<u8>,
    ones: Vec<usize>,
}

impl Tape {
    fn new() -> Self {
        let size = 64;
        Self {
            size,
            origin: (-size / 2, -size / 2),
            cells: vec![0; (size * size) as usize],
            ones: Vec::new(),
        }
    }

    fn clear(&mut self) {
        for &i in &self.ones {
            self.cells[i] = 0;
        }
        self.ones.clear();
    }

    fn slot(&self, (r, c): (i64, i64)) -> Option<usize> {
        let (gr, gc) = (r - self.origin.0, c - self.origin.1);
        let inside = (0..self.size).contains(&gr) && (0..self.size).contains(&gc);
        inside.then(|| (gr * self.size + gc) as usize)
    }

    fn grow_to(&mut self, pos: (i64, i64)) {
        while self.slot(pos).is_none() {
            let old_size = self.size;
            let old_origin = self.origin;
            let live: Vec<(i64, i64)> = self
                .ones
                .iter()
                .filter(|&&i| self.cells[i] == 1)
                .map(|&i| {
                    let i = i as i64;
                    (old_origin.0 + i / old_size, old_origin.1 + i % old_size)
                })
                .collect();
            self.size = old_size * 2;
            self.origin = (old_origin.0 - old_size / 2, old_origin.1 - old_size / 2);
            self.cells = vec![0; (self.size * self.size) as usize];
            self.ones.clear();
            for p in live {
                let i = self.slot(p).unwrap();
                self.cells[i] = 1;
                self.ones.push(i);
            }
        }
    }

    fn read(&self, pos: (i64, i64)) -> u8 {
        self.slot(pos).map_or(0, |i| self.cells[i])
    }

    fn write(&mut self, pos: (i64, i64), symbol: u8) {
        self.grow_to(pos);
        let i = self.slot(pos).unwrap();
        if symbol == 1 && self.cells[i] == 0 {
            self.ones.push(i);
        }
        self.cells[i] = symbol;
    }

    fn ones_sorted(&self) -> Vec<(i64, i64)> {
        let mut v: Vec<(i64, i64)> = self
            .ones
            .iter()
            .filter(|&&i| self.cells[i] == 1)
            .map(|&i| {
                let i = i as i64;
                (self.origin.0 + i / self.size, self.origin.1 + i % self.size)
            })
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn output(&self) -> MachineOutput {
        let ones = self.ones_sorted();
        let Some(&first) = ones.first() else {
            return MachineOutput::Blank;
        };
        let (mut r0, mut r1, mut c0, mut c1) = (first.0, first.0, first.1, first.1);
        for &(r, c) in &ones {
            r0 = r0.min(r);
            r1 = r1.max(r);
            c0 = c0.min(c);
            c1 = c1.max(c);
        }
        let mut m = BitMatrix::zeros((r1 - r0 + 1) as usize, (c1 - c0 + 1) as usize);
        for (r, c) in ones {
            m.set((r - r0) as usize, (c - c0) as usize, true);
        }
        MachineOutput::Block(m)
    }
}

fn cell_hash(pos: (i64, i64)) -> u64 {
    // splitmix64 finalizer over the packed coordinates
    let mut z = (pos.0 as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (pos.1 as u64);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
struct Snapshot {
    state: u8,
    pos: (i64, i64),
    hash: u64,
    ones: Vec<(i64, i64)>,
}

/// Reusable simulator; keeps its tape allocation between runs.
#[derive(Debug)]
pub struct Simulator {
    tape: Tape,
    detect_cycles: bool,
}

impl Default for Simulator {
    fn default() -> Self {
        Self::new(false)
    }
}

impl Simulator {
    /// With `detect_cycles`, a run stops as non-halting as soon as its exact
    /// configuration (state, head position, tape contents) repeats, which is
    /// found with Brent's power-of-two snapshot scheme.
    pub fn new(detect_cycles: bool) -> Self {
        Self {
            tape: Tape::new(),
            detect_cycles,
        }
    }

    /// Runs from state 1 at the origin on an all-0 tape for at most
    /// `max_steps` transitions. The transition into halt counts as a step
    /// and still writes and moves.
    pub fn run(&mut self, rule: &MachineRule, max_steps: u64) -> HaltResult {
        self.tape.clear();
        let mut state = 1u8;
        let mut pos = (0i64, 0i64);
        let mut hash = 0u64;
        let mut snapshot: Option<Snapshot> = None;
        let (mut power, mut lam) = (1u64, 0u64);

        for step in 1..=max_steps {
            let read = self.tape.read(pos);
            let t = rule.transition(state, read);
            if t.write != read {
                self.tape.write(pos, t.write);
                if self.detect_cycles {
                    hash ^= cell_hash(pos);
                }
            }
            let (dr, dc) = t.mv.delta();
            pos = (pos.0 + dr, pos.1 + dc);
            match t.next {
                Next::Halt => {
                    return HaltResult {
                        halted: true,
                        steps_used: step,
                        output: Some(self.tape.output()),
                        cycle_detected: false,
                    }
                }
                Next::State(s) => state = s,
            }
            if self.detect_cycles {
                if let Some(snap) = &snapshot {
                    if snap.state == state
                        && snap.pos == pos
                        && snap.hash == hash
                        && snap.ones == self.tape.ones_sorted()
                    {
                        return HaltResult {
                            halted: false,
                            steps_used: step,
                            output: None,
                            cycle_detected: true,
                        };
                    }
                }
                lam += 1;
                if lam == power {
                    snapshot = Some(Snapshot {
                        state,
                        pos,
                        hash,
                        ones: self.tape.ones_sorted(),
                    });
                    power *= 2;
                    lam = 0;
                }
            }
        }
        HaltResult {
            halted: false,
            steps_used: max_steps,
            output: None,
            cycle_detected: false,
        }
    }
}

/// One-off run without cycle detection.
pub fn run_machine(rule: &MachineRule, max_steps: u64) -> HaltResult {
    Simulator::new(false).run(rule, max_steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctm::machine::{Move, Transition};

    fn rule(entries: &[(u8, Move, Next)]) -> MachineRule {
        let table = entries
            .iter()
            .map(|&(write, mv, next)| Transition { write, mv, next })
            .collect::<Vec<_>>();
        MachineRule::new((table.len() / 2) as u8, table).unwrap()
    }

    #[test]
    fn writes_one_and_halts() {
        let r = rule(&[(1, Move::Left, Next::Halt), (0, Move::Up, Next::State(1))]);
        let res = run_machine(&r, 10);
        assert!(res.halted);
        assert_eq!(res.steps_used, 1);
        assert_eq!(
            res.output,
            Some(MachineOutput::Block(BitMatrix::from_rows(&["1"]).unwrap()))
        );
    }

    #[test]
    fn halting_on_blank_gives_blank_token() {
        let r = rule(&[(0, Move::Down, Next::Halt), (1, Move::Up, Next::Halt)]);
        let res = run_machine(&r, 10);
        assert!(res.halted);
        assert_eq!(res.output, Some(MachineOutput::Blank));
    }

    #[test]
    fn walker_never_halts() {
        let r = rule(&[(0, Move::Up, Next::State(1)), (1, Move::Up, Next::Halt)]);
        for budget in [1, 10, 1000] {
            let res = run_machine(&r, budget);
            assert!(!res.halted);
            assert_eq!(res.steps_used, budget);
            assert!(res.output.is_none());
        }
        // a translating walker never repeats a configuration
        assert!(!Simulator::new(true).run(&r, 5000).cycle_detected);
    }

    #[test]
    fn bounding_box_of_a_diagonal() {
        // state 1 on 0: write 1, move right, state 2
        // state 2 on 0: write 0, move down, state 3
        // state 3 on 0: write 1, halt
        let r = rule(&[
            (1, Move::Right, Next::State(2)),
            (1, Move::Up, Next::Halt),
            (0, Move::Down, Next::State(3)),
            (1, Move::Up, Next::Halt),
            (1, Move::Up, Next::Halt),
            (1, Move::Up, Next::Halt),
        ]);
        let res = run_machine(&r, 10);
        assert_eq!(res.steps_used, 3);
        assert_eq!(
            res.output,
            Some(MachineOutput::Block(
                BitMatrix::from_rows(&["10", "01"]).unwrap()
            ))
        );
    }

    #[test]
    fn oscillator_is_caught_by_cycle_detector() {
        // flips the origin cell back and forth while bouncing up and down
        let r = rule(&[
            (1, Move::Up, Next::State(2)),
            (0, Move::Up, Next::State(2)),
            (0, Move::Down, Next::State(1)),
            (0, Move::Down, Next::State(1)),
        ]);
        let plain = run_machine(&r, 10_000);
        assert!(!plain.halted && !plain.cycle_detected);
        let detected = Simulator::new(true).run(&r, 10_000);
        assert!(!detected.halted && detected.cycle_detected);
        assert!(detected.steps_used < 100);
    }

    #[test]
    fn tape_growth_keeps_contents() {
        let mut tape = Tape::new();
        tape.write((0, 0), 1);
        tape.write((2, 1), 1);
        tape.write((100, -70), 1);
        tape.write((2, 1), 0);
        assert!(tape.size > 64);
        assert_eq!(tape.read((0, 0)), 1);
        assert_eq!(tape.read((2, 1)), 0);
        assert_eq!(tape.read((100, -70)), 1);
        match tape.output() {
            MachineOutput::Block(m) => {
                assert_eq!(m.shape(), (101, 71));
                assert_eq!(m.count_ones(), 2);
                assert!(m.get(0, 70) && m.get(100, 0));
            }
            MachineOutput::Blank => panic!("expected a block"),
        }
        tape.clear();
        assert_eq!(tape.output(), MachineOutput::Blank);
        assert_eq!(tape.read((100, -70)), 0);
    }
}
