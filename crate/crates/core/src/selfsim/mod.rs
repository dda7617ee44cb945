//! A finite-window model of the SFT on `F2 x F2` that factors onto an
//! effectively closed action. Each grid cut out by the two lifted
//! paradoxical layers carries a computation tiling over set-representation
//! symbols.
//!
//! Windows are products `W_H x W_V` of per-factor windows. A lifted layer is
//! constant along the fibres of the other factor, so it is stored once per
//! factor.

pub mod action;
pub mod pathcopy;

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::Word;
use crate::machine::tiles::{tile_kind, tile_run, Tile, TileKind};
use crate::machine::{dovetail, Dovetail, Edge, Machine, SearchMachine, Track};
use crate::paradox::{
    self, canonical_rho, classify, color_of, phi, Color, MoveSet, ParadoxPatch, PatchJson, Piece,
};
use crate::tilespace::SearchTile;

pub use action::{
    action_by_name, component_names, odometer_add, represent, set_representation_check, Axis,
    EffectiveAction, Generator, Odometer, SetRep, SetRepVerdict, TrivialGolden,
};
pub use pathcopy::{path_copied_layer, validate_copied, CopiedLayer, CopyReport, CopyViolation};

/// The ball of radius `r` in one factor, for the word metric whose steps are
/// the standard letters and the canonical move set.
pub fn factor_window(r: usize) -> Vec<Word> {
    let mut steps: Vec<Word> = (0..4).map(Word::letter).collect();
    steps.extend(MoveSet::canonical().0);
    let mut seen = HashMap::from([(Word::identity(), 0usize)]);
    let mut queue = VecDeque::from([Word::identity()]);
    while let Some(g) = queue.pop_front() {
        let d = seen[&g];
        if d == r {
            continue;
        }
        for s in &steps {
            let h = g.mul(s);
            if !seen.contains_key(&h) {
                seen.insert(h.clone(), d + 1);
                queue.push_back(h);
            }
        }
    }
    let mut out: Vec<Word> = seen.into_keys().collect();
    out.sort();
    out
}

/// `(g, n)` with `x = gamma_g(n)` in the canonical configuration, or `None`
/// when no path passes through `x`.
///
/// `gamma_g(n-1) = phi(gamma_g(n))` and every node of a path has the color
/// opposite to its start, so walking forward along `phi` until the color
/// changes recovers `g`. Blue walks that enter the words ending in `b` stay
/// there forever.
pub fn canonical_reach(x: &Word) -> Option<(Word, usize)> {
    let t = color_of(x);
    let mut z = x.clone();
    let mut k = 0;
    loop {
        z = phi(&z);
        k += 1;
        if color_of(&z) != t {
            return Some((z, k - 1));
        }
        if t == Color::Blue && classify(&z) == Piece::Wb {
            return None;
        }
    }
}

/// The canonical configuration of one factor translated by `shift`:
/// `h -> rho(shift^-1 h)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalLayer {
    pub shift: Word,
}

impl CanonicalLayer {
    pub fn new(shift: Word) -> CanonicalLayer {
        CanonicalLayer { shift }
    }

    pub fn patch(&self, window: &[Word]) -> ParadoxPatch {
        let si = self.shift.inv();
        ParadoxPatch::canonical_on(window.iter().map(|h| si.mul(h))).translate(&self.shift)
    }

    pub fn reach(&self, h: &Word) -> Option<(Word, usize)> {
        canonical_reach(&self.shift.inv().mul(h)).map(|(g, n)| (self.shift.mul(&g), n))
    }

    pub fn symbol(&self, h: &Word) -> paradox::ParadoxSymbol {
        canonical_rho(&self.shift.inv().mul(h))
    }
}

/// Window neighbourhoods of one factor, by position in the sorted window.
#[derive(Clone, Debug)]
struct FactorIndex {
    words: Vec<Word>,
    idx: HashMap<Word, usize>,
    /// `h L_t(rho(h))` with `t` the color of `h`: the next node along a path.
    next: Vec<Option<usize>>,
    /// `h L_tbar(rho(h))`: the first node of the path of `h`.
    start: Vec<Option<usize>>,
    /// `h s^-1` for each letter `s`.
    back: Vec<[Option<usize>; 4]>,
}

impl FactorIndex {
    fn new(p: &ParadoxPatch) -> FactorIndex {
        let words = p.window();
        let idx: HashMap<Word, usize> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let find = |w: Word| idx.get(&w).copied();
        let mut next = Vec::with_capacity(words.len());
        let mut start = Vec::with_capacity(words.len());
        let mut back = Vec::with_capacity(words.len());
        for w in &words {
            let s = &p.cells[w];
            next.push(find(w.mul(s.l(s.color))));
            start.push(find(w.mul(s.l(s.color.opposite()))));
            let mut b = [None; 4];
            for (l, slot) in b.iter_mut().enumerate() {
                *slot = find(w.mul(&Word::letter(l as u8 ^ 1)));
            }
            back.push(b);
        }
        FactorIndex {
            words,
            idx,
            next,
            start,
            back,
        }
    }

    /// `gamma_g(n)` for `g` at position `i`.
    fn gamma(&self, i: usize, n: usize) -> Option<usize> {
        let mut cur = self.start[i]?;
        for _ in 0..n {
            cur = self.next[cur]?;
        }
        Some(cur)
    }

    fn len(&self) -> usize {
        self.words.len()
    }
}

/// `(h, v)` rendered as `h|v`.
pub fn pair_name(h: &Word, v: &Word) -> String {
    format!("{h}|{v}")
}

pub fn parse_pair(s: &str) -> Result<(Word, Word)> {
    let (h, v) = s
        .split_once('|')
        .ok_or_else(|| Error::Input(format!("{s:?} is not of the form h|v")))?;
    Ok((h.parse()?, v.parse()?))
}

/// The fill tile off the reachable set.
pub fn fill_tile() -> SearchTile {
    Tile::transmit(Track::blank_work(0))
}

/// A configuration `(rho, tau, sigma)` on a product window.
#[derive(Clone, Debug)]
pub struct FinalPatch {
    pub radius: usize,
    pub rho_h: ParadoxPatch,
    pub rho_v: ParadoxPatch,
    h: FactorIndex,
    v: FactorIndex,
    tiles: Vec<SearchTile>,
    tile_ids: HashMap<SearchTile, u32>,
    tau: Vec<u32>,
    sigma: Vec<u16>,
}

impl FinalPatch {
    /// Every cell holds the fill pair.
    pub fn filled(radius: usize, rho_h: ParadoxPatch, rho_v: ParadoxPatch) -> FinalPatch {
        let h = FactorIndex::new(&rho_h);
        let v = FactorIndex::new(&rho_v);
        let n = h.len() * v.len();
        let w0 = fill_tile();
        FinalPatch {
            radius,
            rho_h,
            rho_v,
            h,
            v,
            tiles: vec![w0.clone()],
            tile_ids: HashMap::from([(w0, 0)]),
            tau: vec![0; n],
            sigma: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn window_h(&self) -> &[Word] {
        &self.h.words
    }

    pub fn window_v(&self) -> &[Word] {
        &self.v.words
    }

    fn cell(&self, i: usize, j: usize) -> usize {
        i * self.v.len() + j
    }

    pub fn index(&self, h: &Word, v: &Word) -> Option<(usize, usize)> {
        Some((*self.h.idx.get(h)?, *self.v.idx.get(v)?))
    }

    pub fn tau(&self, h: &Word, v: &Word) -> Option<&SearchTile> {
        let (i, j) = self.index(h, v)?;
        Some(&self.tiles[self.tau[self.cell(i, j)] as usize])
    }

    pub fn sigma(&self, h: &Word, v: &Word) -> Option<u16> {
        let (i, j) = self.index(h, v)?;
        Some(self.sigma[self.cell(i, j)])
    }

    fn tau_at(&self, i: usize, j: usize) -> &SearchTile {
        &self.tiles[self.tau[self.cell(i, j)] as usize]
    }

    fn sigma_at(&self, i: usize, j: usize) -> u16 {
        self.sigma[self.cell(i, j)]
    }

    pub fn set_tau(&mut self, h: &Word, v: &Word, t: SearchTile) -> Result<()> {
        let (i, j) = self
            .index(h, v)
            .ok_or_else(|| Error::Input(format!("{} is outside the window", pair_name(h, v))))?;
        let id = self.intern(t);
        let c = self.cell(i, j);
        self.tau[c] = id;
        Ok(())
    }

    pub fn set_sigma(&mut self, h: &Word, v: &Word, a: u16) -> Result<()> {
        let (i, j) = self
            .index(h, v)
            .ok_or_else(|| Error::Input(format!("{} is outside the window", pair_name(h, v))))?;
        let c = self.cell(i, j);
        self.sigma[c] = a;
        Ok(())
    }

    fn intern(&mut self, t: SearchTile) -> u32 {
        if let Some(&id) = self.tile_ids.get(&t) {
            return id;
        }
        let id = self.tiles.len() as u32;
        self.tiles.push(t.clone());
        self.tile_ids.insert(t, id);
        id
    }

    /// `gamma_g(u)` for the grid of `(gh, gv)`.
    pub fn grid(&self, gh: &Word, gv: &Word, u: (usize, usize)) -> Option<(Word, Word)> {
        let (i, j) = self.index(gh, gv)?;
        let a = self.h.gamma(i, u.0)?;
        let b = self.v.gamma(j, u.1)?;
        Some((self.h.words[a].clone(), self.v.words[b].clone()))
    }

    pub fn to_json(&self) -> FinalJson {
        let mut tau = Vec::with_capacity(self.len());
        let mut sigma = Vec::with_capacity(self.len());
        let names = component_names();
        for (i, h) in self.h.words.iter().enumerate() {
            for (j, v) in self.v.words.iter().enumerate() {
                let at = pair_name(h, v);
                let c = self.cell(i, j);
                tau.push(TauJson {
                    at: at.clone(),
                    cell: self.tau[c],
                });
                let vals = names
                    .iter()
                    .enumerate()
                    .map(|(b, n)| (n.clone(), ((self.sigma[c] >> b) & 1) as u8))
                    .collect();
                sigma.push(SigmaJson { at, vals });
            }
        }
        FinalJson {
            window_radius: self.radius,
            rho_h: self.rho_h.to_json(),
            rho_v: self.rho_v.to_json(),
            tiles: self.tiles.clone(),
            tau,
            sigma,
        }
    }

    pub fn from_json(j: FinalJson) -> Result<FinalPatch> {
        let rho_h = ParadoxPatch::from_json(j.rho_h)?;
        let rho_v = ParadoxPatch::from_json(j.rho_v)?;
        let mut z = FinalPatch::filled(j.window_radius, rho_h, rho_v);
        if j.tiles.is_empty() {
            return Err(Error::Input("empty tile table".into()));
        }
        let ids: Vec<u32> = j.tiles.into_iter().map(|t| z.intern(t)).collect();
        let mut seen_tau = vec![false; z.len()];
        let mut seen_sigma = vec![false; z.len()];
        for e in j.tau {
            let (h, v) = parse_pair(&e.at)?;
            let (i, jj) = z
                .index(&h, &v)
                .ok_or_else(|| Error::Input(format!("tau entry {} outside window", e.at)))?;
            let id = *ids
                .get(e.cell as usize)
                .ok_or_else(|| Error::Input(format!("tile index {} out of range", e.cell)))?;
            let c = z.cell(i, jj);
            z.tau[c] = id;
            seen_tau[c] = true;
        }
        let names = component_names();
        for e in j.sigma {
            let (h, v) = parse_pair(&e.at)?;
            let (i, jj) = z
                .index(&h, &v)
                .ok_or_else(|| Error::Input(format!("sigma entry {} outside window", e.at)))?;
            let mut a = 0u16;
            for (k, v) in e.vals {
                let b = names
                    .iter()
                    .position(|n| *n == k)
                    .ok_or_else(|| Error::Input(format!("unknown component {k:?}")))?;
                match v {
                    0 => {}
                    1 => a |= 1 << b,
                    _ => {
                        return Err(Error::Input(format!(
                            "component {k} of {} must be 0 or 1",
                            e.at
                        )))
                    }
                }
            }
            let c = z.cell(i, jj);
            z.sigma[c] = a;
            seen_sigma[c] = true;
        }
        if seen_tau.iter().chain(&seen_sigma).any(|s| !s) {
            return Err(Error::Input(
                "tau and sigma must cover the whole window".into(),
            ));
        }
        Ok(z)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FinalJson {
    pub window_radius: usize,
    pub rho_h: PatchJson,
    pub rho_v: PatchJson,
    /// Tile table; `tau` cells index into it.
    pub tiles: Vec<SearchTile>,
    pub tau: Vec<TauJson>,
    pub sigma: Vec<SigmaJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TauJson {
    pub at: String,
    pub cell: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SigmaJson {
    pub at: String,
    pub vals: BTreeMap<String, u8>,
}

/// Translates of the canonical configuration used for the two layers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerShifts {
    pub h: Word,
    pub v: Word,
}

impl Default for LayerShifts {
    fn default() -> Self {
        LayerShifts {
            h: Word::identity(),
            v: Word::identity(),
        }
    }
}

/// Per-grid data: the symbols of `g^-1 y` and the search tiling on them.
struct GridData {
    seq: Vec<u16>,
    tiles: Vec<Vec<SearchTile>>,
}

/// The configuration over `x` on the product of factor windows of radius
/// `radius`: every reachable cell carries the computation tiling of its grid
/// on the set-representation word of `g^-1 x`, the rest carries the fill pair.
/// `x` is padded with zeros to the length the window needs.
pub fn build_final(
    x: &[u8],
    action: Arc<dyn EffectiveAction>,
    shifts: &LayerShifts,
    radius: usize,
    budget: u32,
) -> Result<FinalPatch> {
    if let Some(&d) = x.iter().find(|&&d| d > 1) {
        return Err(Error::Input(format!("x must be binary, found {d}")));
    }
    let window = factor_window(radius);
    let lh = CanonicalLayer::new(shifts.h.clone());
    let lv = CanonicalLayer::new(shifts.v.clone());
    let mut z = FinalPatch::filled(radius, lh.patch(&window), lv.patch(&window));
    let reach_h: Vec<Option<(Word, usize)>> = z.h.words.iter().map(|w| lh.reach(w)).collect();
    let reach_v: Vec<Option<(Word, usize)>> = z.v.words.iter().map(|w| lv.reach(w)).collect();

    // deepest node of each grid label inside the window
    let depth = |r: &[Option<(Word, usize)>]| {
        let mut m: BTreeMap<Word, usize> = BTreeMap::new();
        for (g, n) in r.iter().flatten() {
            let e = m.entry(g.clone()).or_insert(0);
            *e = (*e).max(*n);
        }
        m
    };
    let dh = depth(&reach_h);
    let dv = depth(&reach_v);
    let need =
        dh.values().max().copied().unwrap_or(0) + dv.values().max().copied().unwrap_or(0) + 2;
    let mut xs = x.to_vec();
    if xs.len() < need {
        xs.resize(need, 0);
    }
    if let Dovetail::Rejected { round, len } = dovetail(&*action.space(), &to_u16(&xs), budget) {
        return Err(Error::Membership(format!(
            "prefix of x of length {len} rejected in round {round}"
        )));
    }

    let rep = SetRep::shared(action.clone());
    let machine = SearchMachine::new(rep);
    let e = Word::identity();
    let mut tilings: HashMap<(Vec<u16>, usize, usize), Vec<Vec<SearchTile>>> = HashMap::new();
    let mut grids: HashMap<(Word, Word), GridData> = HashMap::new();
    for (gv, &n2) in &dv {
        let gvi = gv.inv();
        let base_v = action.act(&e, &gvi, &xs);
        let by_v: Vec<Vec<u8>> = (0..4)
            .map(|l| action.act(&e, &Word::letter(l).mul(&gvi), &xs))
            .collect();
        for (gh, &n1) in &dh {
            let ghi = gh.inv();
            let len = n1 + n2 + 2;
            let mut comps = vec![action.act(&ghi, &e, &base_v)];
            for l in 0..4 {
                comps.push(action.act(&Word::letter(l).mul(&ghi), &e, &base_v));
            }
            for c in &by_v {
                comps.push(action.act(&ghi, &e, c));
            }
            if comps.iter().any(|c| c.len() < len) {
                return Err(Error::Internal(
                    "the action did not determine enough symbols".into(),
                ));
            }
            let seq: Vec<u16> = (0..len)
                .map(|n| {
                    comps
                        .iter()
                        .enumerate()
                        .fold(0u16, |a, (b, c)| a | ((c[n] as u16) << b))
                })
                .collect();
            let key = (seq.clone(), n1 + 1, n2 + 1);
            let tiles = match tilings.get(&key) {
                Some(t) => t.clone(),
                None => {
                    let p = tile_run(&machine, &SearchMachine::input_row(&seq), n1 + 1, n2 + 1)?;
                    if p.rows.iter().flatten().any(|t| carries_final(&machine, t)) {
                        return Err(Error::Membership(format!(
                            "the search rejects the grid of {} inside the window",
                            pair_name(gh, gv)
                        )));
                    }
                    tilings.insert(key, p.rows.clone());
                    p.rows
                }
            };
            grids.insert((gh.clone(), gv.clone()), GridData { seq, tiles });
        }
    }

    for (i, rh) in reach_h.iter().enumerate() {
        let Some((gh, n1)) = rh else {
            continue;
        };
        for (j, rv) in reach_v.iter().enumerate() {
            let Some((gv, n2)) = rv else {
                continue;
            };
            let g = &grids[&(gh.clone(), gv.clone())];
            let t = g.tiles[*n2][*n1].clone();
            let id = z.intern(t);
            let c = z.cell(i, j);
            z.tau[c] = id;
            z.sigma[c] = g.seq[n1 + n2];
        }
    }
    Ok(z)
}

fn to_u16(x: &[u8]) -> Vec<u16> {
    x.iter().map(|&d| d as u16).collect()
}

fn carries_final<M: Machine>(m: &M, t: &Tile<M::Sym, M::State>) -> bool {
    t.edges()
        .iter()
        .any(|e| e.state().is_some_and(|q| m.is_final(q)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum FinalViolation {
    /// A paradoxical layer breaks its local rules.
    Layer {
        axis: Axis,
        at: String,
        detail: String,
    },
    /// The first node of the grid of `at` is not the seed.
    Seed {
        at: String,
    },
    /// East edge of `at` against the west edge of its right neighbour.
    Horizontal {
        at: String,
    },
    /// North edge of `at` against the south edge of its upper neighbour.
    Vertical {
        at: String,
    },
    /// The right and upper neighbours of `at` carry different symbols.
    Sync {
        at: String,
    },
    /// The right neighbour of `at` is a bottom tile whose input differs from
    /// the symbol at `at`.
    Coupling {
        at: String,
    },
    /// A tile that occurs in no search tiling.
    Tile {
        at: String,
    },
    Coherence {
        at: String,
        gen: String,
    },
    /// The bottom row of the grid of `grid` is rejected by the set
    /// representation.
    Effectiveness {
        grid: String,
        round: u32,
        len: usize,
    },
}

impl FinalViolation {
    /// The window point the violation is reported at.
    pub fn at(&self) -> &str {
        match self {
            FinalViolation::Layer { at, .. }
            | FinalViolation::Seed { at }
            | FinalViolation::Horizontal { at }
            | FinalViolation::Vertical { at }
            | FinalViolation::Sync { at }
            | FinalViolation::Coupling { at }
            | FinalViolation::Tile { at }
            | FinalViolation::Coherence { at, .. } => at,
            FinalViolation::Effectiveness { grid, .. } => grid,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalReport {
    pub violations: Vec<FinalViolation>,
    /// Checks not made because they reference points outside the window.
    pub skipped: usize,
}

impl FinalReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the embedding and coherence rules at every window point whose
/// references stay in the window, both paradoxical layers, and that the
/// in-window bottom row of every grid starting in the window survives the
/// search at `budget`. The lifts are stored once per factor, so they are
/// constant along fibres by construction.
pub fn validate_final(
    z: &FinalPatch,
    action: Arc<dyn EffectiveAction>,
    budget: u32,
) -> FinalReport {
    let mut rep = FinalReport::default();
    for (axis, p) in [(Axis::H, &z.rho_h), (Axis::V, &z.rho_v)] {
        let r = paradox::validate_local_rules(p, &p.moveset);
        rep.skipped += r.skipped;
        for v in r.violations {
            rep.violations.push(FinalViolation::Layer {
                axis,
                at: v.at.to_string(),
                detail: format!("{:?} towards {}", v.rule, v.neighbor),
            });
        }
    }

    let setrep = SetRep::shared(action);
    let machine = SearchMachine::new(setrep.clone());
    let tile_ok: Vec<bool> = z
        .tiles
        .iter()
        .map(|t| in_search_alphabet(&machine, t))
        .collect();
    let name = |i: usize, j: usize| pair_name(&z.h.words[i], &z.v.words[j]);
    let mut verdicts: HashMap<Vec<u16>, Dovetail> = HashMap::new();

    for i in 0..z.h.len() {
        for j in 0..z.v.len() {
            let t = z.tau_at(i, j);
            if !tile_ok[z.tau[z.cell(i, j)] as usize] {
                rep.violations.push(FinalViolation::Tile { at: name(i, j) });
            }
            match (z.h.start[i], z.v.start[j]) {
                (Some(a), Some(b)) => {
                    if *z.tau_at(a, b) != Tile::seed() {
                        rep.violations.push(FinalViolation::Seed { at: name(i, j) });
                    }
                }
                _ => rep.skipped += 1,
            }
            let right = z.h.next[i].map(|a| (a, j));
            let up = z.v.next[j].map(|b| (i, b));
            match right {
                Some((a, b)) => {
                    let r = z.tau_at(a, b);
                    if t.e != r.w {
                        rep.violations
                            .push(FinalViolation::Horizontal { at: name(i, j) });
                    }
                    if let Some(inp) = bottom_input(r) {
                        if inp.work == 0 && inp.input != z.sigma_at(i, j) {
                            rep.violations
                                .push(FinalViolation::Coupling { at: name(i, j) });
                        }
                    }
                }
                None => rep.skipped += 2,
            }
            match up {
                Some((a, b)) => {
                    if t.n != z.tau_at(a, b).s {
                        rep.violations
                            .push(FinalViolation::Vertical { at: name(i, j) });
                    }
                }
                None => rep.skipped += 1,
            }
            match (right, up) {
                (Some(r), Some(u)) => {
                    if z.sigma_at(r.0, r.1) != z.sigma_at(u.0, u.1) {
                        rep.violations.push(FinalViolation::Sync { at: name(i, j) });
                    }
                }
                _ => rep.skipped += 1,
            }
            for s in Generator::all() {
                let (fi, k) = match s.axis {
                    Axis::H => (&z.h, i),
                    Axis::V => (&z.v, j),
                };
                let (Some(p), Some(back)) = (fi.start[k], fi.back[k][s.letter as usize]) else {
                    rep.skipped += 1;
                    continue;
                };
                let Some(q) = fi.start[back] else {
                    rep.skipped += 1;
                    continue;
                };
                let (lhs, rhs) = match s.axis {
                    Axis::H => (z.sigma_at(p, j), z.sigma_at(q, j)),
                    Axis::V => (z.sigma_at(i, p), z.sigma_at(i, q)),
                };
                if (lhs & s.bit() != 0) != (rhs & 1 != 0) {
                    rep.violations.push(FinalViolation::Coherence {
                        at: name(i, j),
                        gen: s.to_string(),
                    });
                }
            }

            let Some(b) = z.v.start[j] else { continue };
            let mut word = Vec::new();
            let mut a = z.h.start[i];
            while let Some(ai) = a {
                word.push(z.sigma_at(ai, b));
                a = z.h.next[ai];
            }
            let verdict = *verdicts
                .entry(word)
                .or_insert_with_key(|w| dovetail(&*setrep, w, budget));
            if let Dovetail::Rejected { round, len } = verdict {
                rep.violations.push(FinalViolation::Effectiveness {
                    grid: name(i, j),
                    round,
                    len,
                });
            }
        }
    }
    rep
}

fn bottom_input(t: &SearchTile) -> Option<Track> {
    match (&t.s, &t.n) {
        (Edge::Dark, Edge::Head(_, a)) | (Edge::Dark, Edge::Sym(a)) => Some(*a),
        _ => None,
    }
}

/// Tiles that can occur in a search tiling: tiles of the machine that do not
/// carry the final state and, on the bottom row, have a blank work track.
fn in_search_alphabet(m: &SearchMachine, t: &SearchTile) -> bool {
    match tile_kind(m, t) {
        None => false,
        Some(TileKind::Tile1 | TileKind::Tile2) => bottom_input(t).is_some_and(|a| m.bottom_ok(&a)),
        Some(_) => !carries_final(m, t),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Readout {
    pub word: Vec<u8>,
    /// The grid left the window before `m` symbols were read.
    pub truncated: bool,
}

/// Identity component of `sigma` along the bottom row of the identity's grid.
pub fn factor_phi(z: &FinalPatch, m: usize) -> Readout {
    let e = Word::identity();
    let mut word = Vec::new();
    let (Some(&i), Some(&j)) = (z.h.idx.get(&e), z.v.idx.get(&e)) else {
        return Readout {
            word,
            truncated: m > 0,
        };
    };
    let Some(b) = z.v.start[j] else {
        return Readout {
            word,
            truncated: m > 0,
        };
    };
    let mut a = z.h.start[i];
    while word.len() < m {
        let Some(ai) = a else { break };
        word.push((z.sigma_at(ai, b) & 1) as u8);
        a = z.h.next[ai];
    }
    let truncated = word.len() < m;
    Readout { word, truncated }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub gen: String,
    /// `factor_phi` of the configuration shifted by the generator.
    pub shifted: Vec<u8>,
    /// The generator applied to `factor_phi` of the configuration.
    pub acted: Vec<u8>,
    /// Number of positions where both sides are defined.
    pub compared: usize,
    pub holds: bool,
    /// First position where the two sides differ.
    pub counterexample: Option<usize>,
}

/// Compares the readout of `s z` with `s` applied to the readout of `z` on
/// the first `m` positions where both are defined.
///
/// `(s z)(h) = z(s^-1 h)`; the grid of the identity in `s z` is computed in
/// the translated layer and each of its nodes is looked up in `z` after
/// translating back.
pub fn check_equivariance(
    z: &FinalPatch,
    s: Generator,
    m: usize,
    action: &dyn EffectiveAction,
) -> EquivarianceReport {
    let sw = s.word();
    let swi = sw.inv();
    let e = Word::identity();
    let (moved, other) = match s.axis {
        Axis::H => (&z.rho_h, &z.rho_v),
        Axis::V => (&z.rho_v, &z.rho_h),
    };
    let shifted_layer = moved.translate(&sw);
    let mut shifted = Vec::new();
    if let (Some(path), Some(o)) = (
        longest_path(&e, m, &shifted_layer),
        paradox::gamma(&e, 0, other),
    ) {
        for node in path {
            let back = swi.mul(&node);
            let val = match s.axis {
                Axis::H => z.sigma(&back, &o),
                Axis::V => z.sigma(&o, &back),
            };
            match val {
                Some(a) => shifted.push((a & 1) as u8),
                None => break,
            }
        }
    }
    let base = factor_phi(z, usize::MAX >> 1).word;
    let acted: Vec<u8> = (0..m.min(base.len()))
        .map_while(|n| action.eval(s, n, &base))
        .collect();
    let compared = shifted.len().min(acted.len()).min(m);
    let counterexample = (0..compared).find(|&n| shifted[n] != acted[n]);
    EquivarianceReport {
        gen: s.to_string(),
        shifted,
        acted,
        compared,
        holds: counterexample.is_none(),
        counterexample,
    }
}

/// The in-window part of the path of `g`, at most `m` nodes.
fn longest_path(g: &Word, m: usize, p: &ParadoxPatch) -> Option<Vec<Word>> {
    Some((0..m).map_while(|n| paradox::gamma(g, n, p)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn reach_matches_paths() {
        let p = ParadoxPatch::canonical(7);
        for g in Word::ball(2, 2) {
            for n in 0..3 {
                if let Some(x) = paradox::gamma(&g, n, &p) {
                    assert_eq!(canonical_reach(&x), Some((g.clone(), n)), "{g} {n}");
                }
            }
        }
        assert_eq!(canonical_reach(&w("b")), None);
        assert_eq!(canonical_reach(&w("abb")), None);
    }

    #[test]
    fn window_sizes() {
        let sizes: Vec<usize> = (0..4).map(|r| factor_window(r).len()).collect();
        assert_eq!(sizes, [1, 9, 47, 231]);
    }

    #[test]
    fn shifted_layer_reach() {
        let c = w("aB");
        let l = CanonicalLayer::new(c.clone());
        let win = factor_window(2);
        let p = l.patch(&win);
        assert!(paradox::validate_local_rules(&p, &p.moveset).is_valid());
        for h in &win {
            if let Some((g, n)) = l.reach(h) {
                if let Some(x) = paradox::gamma(&g, n, &p) {
                    assert_eq!(&x, h);
                }
            }
        }
    }

    #[test]
    fn odometer_digits() {
        assert_eq!(odometer_add(&[1, 1, 1, 0, 0, 0], 1), [0, 0, 0, 1, 0, 0]);
        assert_eq!(odometer_add(&[1, 1, 1, 0, 0, 0], -1), [0, 1, 1, 0, 0, 0]);
        let a = Generator {
            axis: Axis::H,
            letter: 0,
        };
        let x = [1u8, 1, 1, 0, 0, 0];
        let by_eval: Vec<u8> = (0..6).map(|n| Odometer.eval(a, n, &x).unwrap()).collect();
        assert_eq!(by_eval, odometer_add(&x, 1));
    }
}
