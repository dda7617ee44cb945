//! Finite rectangles of seeded search tilings coupled to an
//! antidiagonal-constant synchronisation layer.
//! Origin is the bottom-left cell; row index is machine time.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::tiles::{tile_kind, tile_run, Mismatch, Side, Tile, TileKind, TilePatch};
use crate::machine::{
    dovetail, Dovetail, Edge, EffectiveSet, Machine, SearchMachine, SearchState, Track,
};

pub type SearchTile = Tile<Track, SearchState>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Cell `(0, 0)` is not the seed.
    Seed,
    Adjacency {
        x: usize,
        y: usize,
        side: Side,
    },
    /// Not a tile of the machine.
    Foreign {
        x: usize,
        y: usize,
    },
    /// Bottom-row tile with a non-blank work component.
    BottomWork {
        x: usize,
    },
    FinalState {
        x: usize,
        y: usize,
    },
    /// `sigma(x, y + 1) != sigma(x + 1, y)`.
    Sync {
        x: usize,
        y: usize,
    },
    /// `tau(x + 1, y)` carries input `a` on the bottom row but `sigma(x, y) != a`.
    Coupling {
        x: usize,
        y: usize,
    },
    /// The bottom row of `sigma` is rejected.
    Effectiveness {
        round: u32,
        len: usize,
    },
    Shape {
        detail: String,
    },
}

pub fn validate_search<M: Machine>(p: &TilePatch<M::Sym, M::State>, m: &M) -> Vec<Violation> {
    let mut out = Vec::new();
    if p.width == 0 || p.height == 0 {
        return out;
    }
    if *p.get(0, 0) != Tile::seed() {
        out.push(Violation::Seed);
    }
    out.extend(
        p.mismatches()
            .into_iter()
            .map(|Mismatch { x, y, side }| Violation::Adjacency { x, y, side }),
    );
    for y in 0..p.height {
        for x in 0..p.width {
            let t = p.get(x, y);
            let kind = tile_kind(m, t);
            if kind.is_none() {
                out.push(Violation::Foreign { x, y });
            }
            if y == 0 {
                let a = match (kind, &t.n) {
                    (Some(TileKind::Tile1), Edge::Head(_, a))
                    | (Some(TileKind::Tile2), Edge::Sym(a)) => Some(a),
                    _ => None,
                };
                if a.is_some_and(|a| !m.bottom_ok(a)) {
                    out.push(Violation::BottomWork { x });
                }
            }
            if t.edges()
                .iter()
                .any(|e| e.state().is_some_and(|q| m.is_final(q)))
            {
                out.push(Violation::FinalState { x, y });
            }
        }
    }
    out
}

/// A rectangle of symbols, row 0 at the bottom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncPatch {
    pub width: usize,
    pub height: usize,
    pub rows: Vec<Vec<u16>>,
}

impl SyncPatch {
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.rows[y][x]
    }

    /// `sigma(x, y) = y_{x+y}`.
    pub fn from_sequence(seq: &[u16], width: usize, height: usize) -> Result<SyncPatch> {
        if width + height > 0 && seq.len() + 1 < width + height {
            return Err(Error::Input(format!(
                "need {} symbols to fill a {width}x{height} rectangle, got {}",
                width + height - 1,
                seq.len()
            )));
        }
        let rows = (0..height)
            .map(|y| (0..width).map(|x| seq[x + y]).collect())
            .collect();
        Ok(SyncPatch {
            width,
            height,
            rows,
        })
    }
}

pub fn validate_sync(p: &SyncPatch) -> Vec<Violation> {
    let mut out = Vec::new();
    for y in 0..p.height.saturating_sub(1) {
        for x in 0..p.width.saturating_sub(1) {
            if p.get(x, y + 1) != p.get(x + 1, y) {
                out.push(Violation::Sync { x, y });
            }
        }
    }
    out
}

/// A search tiling and a synchronisation layer on the same rectangle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompPatch {
    pub width: usize,
    pub height: usize,
    pub tau: Vec<Vec<SearchTile>>,
    pub sigma: Vec<Vec<u16>>,
}

impl CompPatch {
    pub fn tau_patch(&self) -> TilePatch<Track, SearchState> {
        TilePatch {
            width: self.width,
            height: self.height,
            rows: self.tau.clone(),
        }
    }

    pub fn sigma_patch(&self) -> SyncPatch {
        SyncPatch {
            width: self.width,
            height: self.height,
            rows: self.sigma.clone(),
        }
    }

    fn shape_ok(&self) -> bool {
        self.tau.len() == self.height
            && self.sigma.len() == self.height
            && self.tau.iter().all(|r| r.len() == self.width)
            && self.sigma.iter().all(|r| r.len() == self.width)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("patch serialises")
    }

    pub fn from_json(s: &str) -> Result<CompPatch> {
        let p: CompPatch = serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))?;
        if !p.shape_ok() {
            return Err(Error::Input(
                "tau and sigma must both be height x width".into(),
            ));
        }
        Ok(p)
    }
}

/// The input symbol a bottom-row tile feeds to the machine.
fn bottom_input(t: &SearchTile) -> Option<Track> {
    match (&t.s, &t.n) {
        (Edge::Dark, Edge::Head(_, a)) | (Edge::Dark, Edge::Sym(a)) => Some(*a),
        _ => None,
    }
}

pub fn validate_comp(p: &CompPatch, set: Arc<dyn EffectiveSet>, budget: u32) -> Vec<Violation> {
    if !p.shape_ok() {
        return vec![Violation::Shape {
            detail: "tau and sigma must both be height x width".into(),
        }];
    }
    let m = SearchMachine::new(set.clone());
    let mut out = validate_search(&p.tau_patch(), &m);
    out.extend(validate_sync(&p.sigma_patch()));
    for y in 0..p.height {
        for x in 0..p.width.saturating_sub(1) {
            let t = &p.tau[y][x + 1];
            if let Some(a) = bottom_input(t) {
                if a.work == 0 && a.input != p.sigma[y][x] {
                    out.push(Violation::Coupling { x, y });
                }
            }
        }
    }
    if p.height > 0 {
        if let Dovetail::Rejected { round, len } = dovetail(&*set, &p.sigma[0], budget) {
            out.push(Violation::Effectiveness { round, len });
        }
    }
    out
}

/// `sigma(x, y) = y_{x+y}` and `tau` the search tiling on input `y`, without
/// checking that `y` survives the search.
pub fn comp_patch(
    y: &[u16],
    set: Arc<dyn EffectiveSet>,
    width: usize,
    height: usize,
) -> Result<CompPatch> {
    let sigma = SyncPatch::from_sequence(y, width, height)?;
    let m = SearchMachine::new(set);
    let tau = tile_run(&m, &SearchMachine::input_row(y), width, height)?;
    Ok(CompPatch {
        width,
        height,
        tau: tau.rows,
        sigma: sigma.rows,
    })
}

pub fn build_comp(
    y: &[u16],
    set: Arc<dyn EffectiveSet>,
    width: usize,
    height: usize,
    budget: u32,
) -> Result<CompPatch> {
    if let Some(&a) = y.iter().find(|&&a| a >= set.alphabet_size()) {
        return Err(Error::Input(format!(
            "symbol {a} outside alphabet of size {}",
            set.alphabet_size()
        )));
    }
    if let Dovetail::Rejected { round, len } = dovetail(&*set, y, budget) {
        return Err(Error::Membership(format!(
            "prefix of length {len} rejected in round {round}"
        )));
    }
    let p = comp_patch(y, set.clone(), width, height)?;
    let m = SearchMachine::new(set);
    if p.tau.iter().flatten().any(|t| {
        t.edges()
            .iter()
            .any(|e| e.state().is_some_and(|q| m.is_final(q)))
    }) {
        return Err(Error::Membership(
            "the search reaches its final state inside the rectangle".into(),
        ));
    }
    Ok(p)
}

/// The bottom row and the left column of `sigma`.
pub fn extract_boundary(p: &CompPatch) -> (Vec<u16>, Vec<u16>) {
    let row = p.sigma.first().cloned().unwrap_or_default();
    let col = p.sigma.iter().filter_map(|r| r.first().copied()).collect();
    (row, col)
}
