//! A native interpreter of the dovetailing search machine. Its input track
//! holds a sequence `y`; round `k` scans the first `k` input cells, asks the
//! rejector about every prefix of length at most `k` at budget `k`, and
//! enters the final state if one of them is rejected.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::effective::{EffectiveSet, Query};
use super::{Machine, Move};

/// A tape cell: an input symbol and a work mark (0 is blank, 1 is visited).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Track {
    pub input: u16,
    pub work: u8,
}

impl Track {
    pub fn blank_work(input: u16) -> Track {
        Track { input, work: 0 }
    }
}

impl fmt::Display for Track {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.work == 0 {
            write!(f, "{}", self.input)
        } else {
            write!(f, "{}'", self.input)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchState {
    /// Round `k`, having read `buf` from cells `0..buf.len()`.
    Scan {
        k: u32,
        buf: Vec<u16>,
    },
    /// Walking back to cell 0 after round `k`; the head is on cell `left`.
    Return {
        k: u32,
        left: u32,
    },
    Final,
}

impl fmt::Display for SearchState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchState::Scan { k, buf } => {
                write!(f, "s{k}:")?;
                for a in buf {
                    write!(f, "{a}")?;
                }
                Ok(())
            }
            SearchState::Return { k, left } => write!(f, "r{k}:{left}"),
            SearchState::Final => write!(f, "F"),
        }
    }
}

#[derive(Clone)]
pub struct SearchMachine {
    set: Arc<dyn EffectiveSet>,
}

impl SearchMachine {
    pub fn new(set: Arc<dyn EffectiveSet>) -> SearchMachine {
        SearchMachine { set }
    }

    pub fn set(&self) -> &Arc<dyn EffectiveSet> {
        &self.set
    }

    /// The input row `(y_n, blank)`.
    pub fn input_row(y: &[u16]) -> Vec<Track> {
        y.iter().map(|&a| Track::blank_work(a)).collect()
    }

    fn rejects(&self, buf: &[u16], k: u32) -> bool {
        (0..=buf.len()).any(|n| self.set.query(&buf[..n], k) == Query::Empty)
    }

    fn scan(&self, k: u32, buf: &[u16], t: Track) -> (SearchState, Track, Move) {
        let mut buf = buf.to_vec();
        buf.push(t.input);
        let seen = Track {
            input: t.input,
            work: 1,
        };
        if (buf.len() as u32) < k {
            return (SearchState::Scan { k, buf }, seen, Move::Right);
        }
        if self.rejects(&buf, k) {
            (SearchState::Final, seen, Move::Stay)
        } else if k == 1 {
            (SearchState::Scan { k: 2, buf: vec![] }, seen, Move::Stay)
        } else {
            (SearchState::Return { k, left: k - 2 }, seen, Move::Left)
        }
    }
}

impl fmt::Debug for SearchMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SearchMachine")
            .field("set", &self.set.name())
            .finish()
    }
}

impl Machine for SearchMachine {
    type Sym = Track;
    type State = SearchState;

    fn blank(&self) -> Track {
        Track { input: 0, work: 0 }
    }

    fn initial(&self) -> SearchState {
        SearchState::Scan { k: 1, buf: vec![] }
    }

    fn is_final(&self, q: &SearchState) -> bool {
        *q == SearchState::Final
    }

    fn delta(&self, q: &SearchState, a: &Track) -> (SearchState, Track, Move) {
        match q {
            SearchState::Scan { k, buf } => self.scan(*k, buf, *a),
            SearchState::Return { k, left: 0 } => self.scan(k + 1, &[], *a),
            SearchState::Return { k, left } => (
                SearchState::Return {
                    k: *k,
                    left: left - 1,
                },
                *a,
                Move::Left,
            ),
            SearchState::Final => (SearchState::Final, *a, Move::Stay),
        }
    }

    fn bottom_ok(&self, a: &Track) -> bool {
        a.work == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::effective::{dovetail, Dovetail, FullSet, GoldenMean};
    use crate::machine::run;

    fn reaches_final(set: Arc<dyn EffectiveSet>, y: &[u16], steps: usize) -> Option<usize> {
        let m = SearchMachine::new(set);
        let d = run(&m, &SearchMachine::input_row(y), steps);
        d.rows.iter().position(|c| c.state == SearchState::Final)
    }

    #[test]
    fn golden_rejection_time() {
        // 11 at the start is found in round 2 on the step reading cell 1
        assert_eq!(
            reaches_final(Arc::new(GoldenMean), &[1, 1, 0, 0], 20),
            Some(3)
        );
        assert_eq!(
            reaches_final(Arc::new(GoldenMean), &[0, 1, 0, 1, 0, 0], 200),
            None
        );
        assert_eq!(reaches_final(Arc::new(FullSet(2)), &[1, 1, 1], 100), None);
    }

    #[test]
    fn head_never_leaves_on_the_left() {
        let m = SearchMachine::new(Arc::new(FullSet(2)));
        let mut c = crate::machine::initial_config(
            &m,
            &SearchMachine::input_row(&[1, 0, 1, 1, 0, 1, 0, 0]),
        );
        for _ in 0..60 {
            let a = c.read(c.head, &m.blank());
            let (_, _, d) = m.delta(&c.state, &a);
            assert!(!(d == Move::Left && c.head == 0));
            c = crate::machine::step(&m, &c);
        }
    }

    #[test]
    fn agrees_with_dovetail() {
        for y in [
            [0u16, 1, 1, 0, 0, 0],
            [0, 0, 0, 1, 1, 0],
            [1, 0, 1, 0, 1, 0],
        ] {
            let verdict = dovetail(&GoldenMean, &y, 6);
            let hit = reaches_final(Arc::new(GoldenMean), &y, 60);
            assert_eq!(
                matches!(verdict, Dovetail::Rejected { .. }),
                hit.is_some(),
                "{y:?}"
            );
        }
    }
}
