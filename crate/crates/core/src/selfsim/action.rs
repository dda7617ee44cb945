//! Effectively closed actions of `F2 x F2` on binary sequences and their set
//! representations.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{letter_char, Word};
use crate::machine::{dovetail, Dovetail, EffectiveSet, FullSet, GoldenMean, Memo, Query};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    H,
    V,
}

/// A standard generator of `F2 x F2`: a letter of one factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub axis: Axis,
    pub letter: u8,
}

impl Generator {
    pub fn all() -> [Generator; 8] {
        let mut out = [Generator {
            axis: Axis::H,
            letter: 0,
        }; 8];
        for (i, g) in out.iter_mut().enumerate() {
            *g = Generator {
                axis: if i < 4 { Axis::H } else { Axis::V },
                letter: (i % 4) as u8,
            };
        }
        out
    }

    /// Position among [`Generator::all`].
    pub fn index(self) -> usize {
        (self.axis as usize) * 4 + self.letter as usize
    }

    /// Bit of this generator in a set-representation symbol; bit 0 is the
    /// identity.
    pub fn bit(self) -> u16 {
        1 << (1 + self.index())
    }

    pub fn inverse(self) -> Generator {
        Generator {
            axis: self.axis,
            letter: self.letter ^ 1,
        }
    }

    pub fn word(self) -> Word {
        Word::letter(self.letter)
    }

    /// Exponent sum contribution: `+1` for `a`, `b`, `-1` for their inverses.
    pub fn sign(self) -> i64 {
        if self.letter & 1 == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.axis {
            Axis::H => 'h',
            Axis::V => 'v',
        };
        write!(f, "{p}{}", letter_char(self.letter))
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Generator> {
        Generator::all()
            .into_iter()
            .find(|g| g.to_string() == s)
            .ok_or_else(|| {
                Error::Input(format!(
                    "unknown generator {s:?}; expected one of ha hA hb hB va vA vb vB"
                ))
            })
    }
}

/// Names of the set-representation components, bit order.
pub fn component_names() -> Vec<String> {
    std::iter::once("1".to_string())
        .chain(Generator::all().iter().map(|g| g.to_string()))
        .collect()
}

/// `F2 x F2` acting on an effectively closed `X` in `{0,1}^N`.
pub trait EffectiveAction: Send + Sync {
    fn name(&self) -> String;

    fn space(&self) -> Arc<dyn EffectiveSet>;

    /// `(s x)_n`, or `None` if `prefix` does not determine it.
    fn eval(&self, s: Generator, n: usize, prefix: &[u8]) -> Option<u8>;

    /// The longest prefix of `(h, v) x` that `x` determines.
    fn act(&self, h: &Word, v: &Word, x: &[u8]) -> Vec<u8> {
        let mut cur = x.to_vec();
        for (axis, w) in [(Axis::V, v), (Axis::H, h)] {
            for &letter in w.letters().iter().rev() {
                let s = Generator { axis, letter };
                cur = (0..cur.len())
                    .map_while(|n| self.eval(s, n, &cur))
                    .collect();
            }
        }
        cur
    }
}

/// Every group element acts as the identity on the golden-mean set.
#[derive(Clone, Copy, Debug, Default)]
pub struct TrivialGolden;

impl EffectiveAction for TrivialGolden {
    fn name(&self) -> String {
        "trivial-golden".into()
    }

    fn space(&self) -> Arc<dyn EffectiveSet> {
        Arc::new(GoldenMean)
    }

    fn eval(&self, _s: Generator, n: usize, prefix: &[u8]) -> Option<u8> {
        prefix.get(n).copied()
    }

    fn act(&self, _h: &Word, _v: &Word, x: &[u8]) -> Vec<u8> {
        x.to_vec()
    }
}

/// Binary odometer on all sequences, least significant digit first. `a` and
/// `b` of both factors add one, their inverses subtract one.
#[derive(Clone, Copy, Debug, Default)]
pub struct Odometer;

/// `x + k` on a finite prefix, dropping the carry out of the last digit.
pub fn odometer_add(x: &[u8], k: i64) -> Vec<u8> {
    let mut out = x.to_vec();
    for _ in 0..k.unsigned_abs() {
        // +1 flips the leading run of 1s and the 0 after it; -1 does the same with 0s
        let run = if k > 0 { 1 } else { 0 };
        for d in out.iter_mut() {
            let was = *d;
            *d ^= 1;
            if was != run {
                break;
            }
        }
    }
    out
}

impl EffectiveAction for Odometer {
    fn name(&self) -> String {
        "odometer".into()
    }

    fn space(&self) -> Arc<dyn EffectiveSet> {
        Arc::new(FullSet(2))
    }

    fn eval(&self, s: Generator, n: usize, prefix: &[u8]) -> Option<u8> {
        if n >= prefix.len() {
            return None;
        }
        let run = if s.sign() > 0 { 1 } else { 0 };
        let flip = prefix[..n].iter().all(|&d| d == run);
        Some(prefix[n] ^ flip as u8)
    }

    fn act(&self, h: &Word, v: &Word, x: &[u8]) -> Vec<u8> {
        let k: i64 = h
            .letters()
            .iter()
            .chain(v.letters())
            .map(|&l| {
                Generator {
                    axis: Axis::H,
                    letter: l,
                }
                .sign()
            })
            .sum();
        odometer_add(x, k)
    }
}

pub fn action_by_name(name: &str) -> Result<Arc<dyn EffectiveAction>> {
    match name {
        "trivial-golden" => Ok(Arc::new(TrivialGolden)),
        "odometer" => Ok(Arc::new(Odometer)),
        _ => Err(Error::Input(format!(
            "unknown action {name:?}; expected trivial-golden or odometer"
        ))),
    }
}

/// The set representation of an action: sequences over `{0,1}^(1+8)` whose
/// identity component lies in `X` and whose `s` component is `s` applied to
/// the identity component.
pub struct SetRep {
    action: Arc<dyn EffectiveAction>,
    space: Arc<dyn EffectiveSet>,
}

impl SetRep {
    pub fn new(action: Arc<dyn EffectiveAction>) -> SetRep {
        let space = action.space();
        SetRep { action, space }
    }

    /// Wrapped in a memo, ready for the search machine.
    pub fn shared(action: Arc<dyn EffectiveAction>) -> Arc<dyn EffectiveSet> {
        Arc::new(Memo::new(SetRep::new(action)))
    }
}

fn first_mismatch(action: &dyn EffectiveAction, w: &[u16]) -> Option<(Generator, usize)> {
    let base: Vec<u8> = w.iter().map(|&a| (a & 1) as u8).collect();
    for s in Generator::all() {
        for (n, &a) in w.iter().enumerate() {
            match action.eval(s, n, &base) {
                Some(v) if (a & s.bit() != 0) != (v == 1) => return Some((s, n)),
                Some(_) => {}
                None => break,
            }
        }
    }
    None
}

pub const SETREP_ALPHABET: u16 = 1 << 9;

impl EffectiveSet for SetRep {
    fn alphabet_size(&self) -> u16 {
        SETREP_ALPHABET
    }

    fn query(&self, w: &[u16], budget: u32) -> Query {
        let base: Vec<u16> = w.iter().map(|&a| a & 1).collect();
        if self.space.query(&base, budget) == Query::Empty
            || first_mismatch(&*self.action, w).is_some()
        {
            Query::Empty
        } else {
            Query::Unknown
        }
    }

    fn name(&self) -> String {
        format!("setrep({})", self.action.name())
    }
}

/// The set-representation word of `x`: symbol `n` holds `(s x)_n` at the bit
/// of each component `s`. Stops where some component is undetermined.
pub fn represent(action: &dyn EffectiveAction, x: &[u8]) -> Vec<u16> {
    let e = Word::identity();
    let mut comps = vec![x.to_vec()];
    for s in Generator::all() {
        let w = s.word();
        comps.push(match s.axis {
            Axis::H => action.act(&w, &e, x),
            Axis::V => action.act(&e, &w, x),
        });
    }
    let len = comps.iter().map(|c| c.len()).min().unwrap_or(0);
    (0..len)
        .map(|n| {
            comps
                .iter()
                .enumerate()
                .fold(0u16, |acc, (i, c)| acc | ((c[n] as u16) << i))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "UPPERCASE")]
pub enum SetRepVerdict {
    Consistent,
    /// Component `gen` at position `n` disagrees with the action.
    Violation {
        gen: String,
        n: usize,
    },
    /// The identity component is rejected by `X`.
    Rejected {
        round: u32,
        len: usize,
    },
}

pub fn set_representation_check(
    action: &dyn EffectiveAction,
    y: &[u16],
    budget: u32,
) -> SetRepVerdict {
    let base: Vec<u16> = y.iter().map(|&a| a & 1).collect();
    if let Dovetail::Rejected { round, len } = dovetail(&*action.space(), &base, budget) {
        return SetRepVerdict::Rejected { round, len };
    }
    match first_mismatch(action, y) {
        Some((s, n)) => SetRepVerdict::Violation {
            gen: s.to_string(),
            n,
        },
        None => SetRepVerdict::Consistent,
    }
}
