//! Effective subshift extensions on `F2`: a paradoxical layer plus a symbol
//! layer whose reading along every path must stay in an effectively closed
//! set, checked here for the trivial action.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::canonical_reach;
use crate::error::{Error, Result};
use crate::groups::Word;
use crate::machine::{dovetail, Dovetail, EffectiveSet};
use crate::paradox::{self, ParadoxPatch, PatchJson};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopiedLayer {
    pub rho: ParadoxPatch,
    pub y: BTreeMap<Word, u16>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CopiedJson {
    pub rho: PatchJson,
    pub y: Vec<YJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct YJson {
    pub at: Word,
    pub sym: u16,
}

impl CopiedLayer {
    pub fn to_json(&self) -> CopiedJson {
        CopiedJson {
            rho: self.rho.to_json(),
            y: self
                .y
                .iter()
                .map(|(at, &sym)| YJson {
                    at: at.clone(),
                    sym,
                })
                .collect(),
        }
    }

    pub fn from_json(j: CopiedJson) -> Result<CopiedLayer> {
        let rho = ParadoxPatch::from_json(j.rho)?;
        let y: BTreeMap<Word, u16> = j.y.into_iter().map(|e| (e.at, e.sym)).collect();
        if y.len() != rho.len() || y.keys().any(|k| !rho.contains(k)) {
            return Err(Error::Input(
                "the symbol layer must cover exactly the window of rho".into(),
            ));
        }
        Ok(CopiedLayer { rho, y })
    }

    /// `y` along `gamma_g(0), gamma_g(1), ...` while the path stays in the window.
    pub fn path_word(&self, g: &Word) -> Vec<u16> {
        (0..)
            .map_while(|n| paradox::gamma(g, n, &self.rho))
            .map_while(|h| self.y.get(&h).copied())
            .collect()
    }
}

/// The canonical layer on the ball of radius `r` with `x` copied along every
/// path: `y(gamma_g(n)) = x_n`. Cells on no path get 0.
pub fn path_copied_layer(r: usize, x: &[u16]) -> Result<CopiedLayer> {
    let rho = ParadoxPatch::canonical(r);
    let mut y = BTreeMap::new();
    for h in rho.window() {
        let sym = match canonical_reach(&h) {
            Some((_, n)) => *x
                .get(n)
                .ok_or_else(|| Error::Input(format!("x is too short: need index {n}")))?,
            None => 0,
        };
        y.insert(h, sym);
    }
    Ok(CopiedLayer { rho, y })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum CopyViolation {
    /// The word read along the path of `g` is rejected by its prefix of
    /// length `n`.
    Path { g: Word, n: usize, round: u32 },
    /// The paths of `g` and `g s` disagree at position `n`.
    Compat { g: Word, gen: Word, n: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyReport {
    pub violations: Vec<CopyViolation>,
    /// Pairs not compared because `g s` lies outside the window.
    pub skipped: usize,
}

/// With the trivial action the words read from `g` and from a neighbour
/// `g s` must be two prefixes of one point of the set, so they agree where
/// both are defined, and neither may be rejected.
pub fn validate_copied(z: &CopiedLayer, set: &dyn EffectiveSet, budget: u32) -> CopyReport {
    let mut rep = CopyReport::default();
    let window = z.rho.window();
    let words: BTreeMap<&Word, Vec<u16>> = window.iter().map(|g| (g, z.path_word(g))).collect();
    for g in &window {
        let u = &words[g];
        if let Dovetail::Rejected { round, len } = dovetail(set, u, budget) {
            rep.violations.push(CopyViolation::Path {
                g: g.clone(),
                n: len,
                round,
            });
        }
        for l in 0..4 {
            let s = Word::letter(l);
            let gs = g.mul(&s);
            let Some(v) = words.get(&gs) else {
                rep.skipped += 1;
                continue;
            };
            if let Some(n) = u.iter().zip(v).position(|(a, b)| a != b) {
                rep.violations.push(CopyViolation::Compat {
                    g: g.clone(),
                    gen: s,
                    n,
                });
            }
        }
    }
    rep
}
