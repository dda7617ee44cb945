//! Budgeted rejectors for effectively closed subsets of `A^N` and the
//! dovetailing loop that queries them.

use std::collections::HashMap;

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Query {
    /// No point of the set starts with the queried word.
    Empty,
    Unknown,
}

/// A set `Y` of sequences over `0..alphabet_size()`, presented by a budgeted
/// procedure that may prove a cylinder disjoint from `Y`.
pub trait EffectiveSet: Send + Sync {
    fn alphabet_size(&self) -> u16;
    fn query(&self, w: &[u16], budget: u32) -> Query;

    fn name(&self) -> String {
        "custom".into()
    }
}

impl<E: EffectiveSet + ?Sized> EffectiveSet for &E {
    fn alphabet_size(&self) -> u16 {
        (**self).alphabet_size()
    }
    fn query(&self, w: &[u16], budget: u32) -> Query {
        (**self).query(w, budget)
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

impl<E: EffectiveSet + ?Sized> EffectiveSet for std::sync::Arc<E> {
    fn alphabet_size(&self) -> u16 {
        (**self).alphabet_size()
    }
    fn query(&self, w: &[u16], budget: u32) -> Query {
        (**self).query(w, budget)
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

/// Binary sequences with no two consecutive 1s.
#[derive(Clone, Copy, Debug, Default)]
pub struct GoldenMean;

impl EffectiveSet for GoldenMean {
    fn alphabet_size(&self) -> u16 {
        2
    }

    fn query(&self, w: &[u16], _budget: u32) -> Query {
        if w.windows(2).any(|p| p == [1, 1]) {
            Query::Empty
        } else {
            Query::Unknown
        }
    }

    fn name(&self) -> String {
        "golden".into()
    }
}

/// All sequences over an alphabet.
#[derive(Clone, Copy, Debug)]
pub struct FullSet(pub u16);

impl EffectiveSet for FullSet {
    fn alphabet_size(&self) -> u16 {
        self.0
    }

    fn query(&self, _w: &[u16], _budget: u32) -> Query {
        Query::Unknown
    }

    fn name(&self) -> String {
        "full".into()
    }
}

/// Remembers the smallest budget at which each word was rejected, so a
/// rejection is never withdrawn at a larger budget.
pub struct Memo<E> {
    inner: E,
    rejected: RwLock<HashMap<Vec<u16>, u32>>,
}

impl<E: EffectiveSet> Memo<E> {
    pub fn new(inner: E) -> Memo<E> {
        Memo {
            inner,
            rejected: RwLock::new(HashMap::new()),
        }
    }

    pub fn inner(&self) -> &E {
        &self.inner
    }
}

impl<E: EffectiveSet> EffectiveSet for Memo<E> {
    fn alphabet_size(&self) -> u16 {
        self.inner.alphabet_size()
    }

    fn query(&self, w: &[u16], budget: u32) -> Query {
        if let Some(&k) = self.rejected.read().get(w) {
            if k <= budget {
                return Query::Empty;
            }
        }
        let q = self.inner.query(w, budget);
        if q == Query::Empty {
            let mut m = self.rejected.write();
            let e = m.entry(w.to_vec()).or_insert(budget);
            *e = (*e).min(budget);
        }
        q
    }

    fn name(&self) -> String {
        self.inner.name()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "UPPERCASE")]
pub enum Dovetail {
    /// Rejected in loop round `round` by the prefix of length `len`.
    Rejected {
        round: u32,
        len: usize,
    },
    Undecided,
}

/// Round `k = 1..=budget` queries, at budget `k`, every word of length at
/// most `k`. Only words that are prefixes of `prefix` can decide the verdict,
/// so those are the ones asked, shortest first.
pub fn dovetail<E: EffectiveSet + ?Sized>(set: &E, prefix: &[u16], budget: u32) -> Dovetail {
    for k in 1..=budget {
        let top = (k as usize).min(prefix.len());
        for len in 0..=top {
            if set.query(&prefix[..len], k) == Query::Empty {
                return Dovetail::Rejected { round: k, len };
            }
        }
    }
    Dovetail::Undecided
}

#[cfg(test)]
mod tests {
    use super::*;

    fn has_11(w: &[u16]) -> bool {
        w.windows(2).any(|p| p[0] == 1 && p[1] == 1)
    }

    #[test]
    fn golden_examples() {
        let g = GoldenMean;
        assert!(has_11(&[0, 1, 1, 0]));
        assert_eq!(
            dovetail(&g, &[0, 1, 1, 0], 3),
            Dovetail::Rejected { round: 3, len: 3 }
        );
        assert_eq!(dovetail(&g, &[0, 1, 1, 0], 2), Dovetail::Undecided);
        assert!(!has_11(&[0, 1, 0, 1]));
        assert_eq!(dovetail(&g, &[0, 1, 0, 1], 50), Dovetail::Undecided);
        assert_eq!(dovetail(&FullSet(2), &[1, 1, 1], 100), Dovetail::Undecided);
    }

    #[test]
    fn monotone_round() {
        let g = GoldenMean;
        let w = [0, 0, 1, 0, 1, 1];
        let first = dovetail(&g, &w, 6);
        for b in 6..20 {
            assert_eq!(dovetail(&g, &w, b), first);
        }
    }

    struct Flaky;
    impl EffectiveSet for Flaky {
        fn alphabet_size(&self) -> u16 {
            2
        }
        // rejects only at exactly budget 4, which no honest rejector does
        fn query(&self, w: &[u16], budget: u32) -> Query {
            if budget == 4 && w == [1] {
                Query::Empty
            } else {
                Query::Unknown
            }
        }
    }

    #[test]
    fn memo_keeps_rejections() {
        let m = Memo::new(Flaky);
        assert_eq!(m.query(&[1], 4), Query::Empty);
        assert_eq!(m.query(&[1], 9), Query::Empty);
        assert_eq!(m.query(&[1], 3), Query::Unknown);
    }
}
