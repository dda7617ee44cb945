//! Wang tiles whose seeded tilings are exactly the space-time diagrams of a
//! machine.
//!
//! Layout: the bottom row is `seed, tile1(x0), tile2(x1), ...`; every later
//! row starts with a filler tile and tape cell `j` sits in column `j + 1`.
//! Tile row `r >= 1` has diagram row `r - 1` on its south edges and diagram
//! row `r` on its north edges.

use std::collections::BTreeMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::{Config, Machine, Move, SpaceTimeDiagram, TuringMachine};
use crate::error::{Error, Result};

/// Edge labels. `Dark`, `Mid` and `Marker` are the shade tokens of the seeded
/// bottom row and the filler column; `Blank` is an unlabelled light edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Edge<S, Q> {
    Dark,
    Mid,
    Marker,
    Blank,
    Sym(S),
    Head(Q, S),
    /// Head signal travelling to the west neighbour.
    Left(Q),
    /// Head signal travelling to the east neighbour.
    Right(Q),
}

impl<S, Q> Edge<S, Q> {
    pub fn state(&self) -> Option<&Q> {
        match self {
            Edge::Head(q, _) | Edge::Left(q) | Edge::Right(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_arrow(&self) -> bool {
        matches!(self, Edge::Left(_) | Edge::Right(_))
    }

    pub fn map<S2, Q2>(&self, fs: &impl Fn(&S) -> S2, fq: &impl Fn(&Q) -> Q2) -> Edge<S2, Q2> {
        match self {
            Edge::Dark => Edge::Dark,
            Edge::Mid => Edge::Mid,
            Edge::Marker => Edge::Marker,
            Edge::Blank => Edge::Blank,
            Edge::Sym(a) => Edge::Sym(fs(a)),
            Edge::Head(q, a) => Edge::Head(fq(q), fs(a)),
            Edge::Left(q) => Edge::Left(fq(q)),
            Edge::Right(q) => Edge::Right(fq(q)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tile<S, Q> {
    pub n: Edge<S, Q>,
    pub e: Edge<S, Q>,
    pub s: Edge<S, Q>,
    pub w: Edge<S, Q>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TileKind {
    Seed,
    Filler,
    Tile1,
    Tile2,
    Transmit,
    Stay,
    LeftMove,
    RightMove,
    /// The head enters from the west neighbour.
    ArriveWest,
    /// The head enters from the east neighbour.
    ArriveEast,
}

impl<S: Clone, Q: Clone> Tile<S, Q> {
    pub fn seed() -> Self {
        Tile {
            n: Edge::Mid,
            e: Edge::Marker,
            s: Edge::Dark,
            w: Edge::Dark,
        }
    }

    pub fn filler() -> Self {
        Tile {
            n: Edge::Mid,
            e: Edge::Blank,
            s: Edge::Mid,
            w: Edge::Dark,
        }
    }

    pub fn tile1(q0: Q, a: S) -> Self {
        Tile {
            n: Edge::Head(q0, a),
            e: Edge::Mid,
            s: Edge::Dark,
            w: Edge::Marker,
        }
    }

    pub fn tile2(a: S) -> Self {
        Tile {
            n: Edge::Sym(a),
            e: Edge::Mid,
            s: Edge::Dark,
            w: Edge::Mid,
        }
    }

    pub fn transmit(a: S) -> Self {
        Tile {
            n: Edge::Sym(a.clone()),
            e: Edge::Blank,
            s: Edge::Sym(a),
            w: Edge::Blank,
        }
    }

    /// The tile under the head in state `q` reading `a`, for the transition
    /// `(q, a) -> (q2, b, d)`.
    pub fn action(q: Q, a: S, q2: Q, b: S, d: Move) -> Self {
        let s = Edge::Head(q, a);
        match d {
            Move::Stay => Tile {
                n: Edge::Head(q2, b),
                e: Edge::Blank,
                s,
                w: Edge::Blank,
            },
            Move::Left => Tile {
                n: Edge::Sym(b),
                e: Edge::Blank,
                s,
                w: Edge::Left(q2),
            },
            Move::Right => Tile {
                n: Edge::Sym(b),
                e: Edge::Right(q2),
                s,
                w: Edge::Blank,
            },
        }
    }

    pub fn arrive_west(q: Q, a: S) -> Self {
        Tile {
            n: Edge::Head(q.clone(), a.clone()),
            e: Edge::Blank,
            s: Edge::Sym(a),
            w: Edge::Right(q),
        }
    }

    pub fn arrive_east(q: Q, a: S) -> Self {
        Tile {
            n: Edge::Head(q.clone(), a.clone()),
            e: Edge::Left(q),
            s: Edge::Sym(a),
            w: Edge::Blank,
        }
    }

    pub fn edges(&self) -> [&Edge<S, Q>; 4] {
        [&self.n, &self.e, &self.s, &self.w]
    }

    pub fn map<S2, Q2>(&self, fs: impl Fn(&S) -> S2, fq: impl Fn(&Q) -> Q2) -> Tile<S2, Q2> {
        Tile {
            n: self.n.map(&fs, &fq),
            e: self.e.map(&fs, &fq),
            s: self.s.map(&fs, &fq),
            w: self.w.map(&fs, &fq),
        }
    }
}

/// The family a tile belongs to in the tile set of `m`, or `None` if the tile
/// is not in that set. Final states are frozen, so their only tiles are stay
/// tiles that leave the head cell unchanged.
pub fn tile_kind<M: Machine>(m: &M, t: &Tile<M::Sym, M::State>) -> Option<TileKind> {
    if *t == Tile::seed() {
        return Some(TileKind::Seed);
    }
    if *t == Tile::filler() {
        return Some(TileKind::Filler);
    }
    match (&t.s, &t.n) {
        (Edge::Dark, Edge::Head(q, a)) if *t == Tile::tile1(q.clone(), a.clone()) => {
            (*q == m.initial()).then_some(TileKind::Tile1)
        }
        (Edge::Dark, Edge::Sym(a)) if *t == Tile::tile2(a.clone()) => Some(TileKind::Tile2),
        (Edge::Sym(a), Edge::Sym(_)) if *t == Tile::transmit(a.clone()) => Some(TileKind::Transmit),
        (Edge::Sym(a), Edge::Head(q, _)) => {
            if *t == Tile::arrive_west(q.clone(), a.clone()) {
                Some(TileKind::ArriveWest)
            } else if *t == Tile::arrive_east(q.clone(), a.clone()) {
                Some(TileKind::ArriveEast)
            } else {
                None
            }
        }
        (Edge::Head(q, a), _) => {
            let (q2, b, d) = if m.is_final(q) {
                (q.clone(), a.clone(), Move::Stay)
            } else {
                m.delta(q, a)
            };
            if *t != Tile::action(q.clone(), a.clone(), q2, b, d) {
                return None;
            }
            Some(match d {
                Move::Stay => TileKind::Stay,
                Move::Left => TileKind::LeftMove,
                Move::Right => TileKind::RightMove,
            })
        }
        _ => None,
    }
}

/// A finite tile set with the family of each tile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileSet<S: Ord, Q: Ord> {
    tiles: BTreeMap<Tile<S, Q>, TileKind>,
}

impl<S: Ord + Clone, Q: Ord + Clone> TileSet<S, Q> {
    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn contains(&self, t: &Tile<S, Q>) -> bool {
        self.tiles.contains_key(t)
    }

    pub fn kind(&self, t: &Tile<S, Q>) -> Option<TileKind> {
        self.tiles.get(t).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Tile<S, Q>, TileKind)> {
        self.tiles.iter().map(|(t, k)| (t, *k))
    }

    pub fn count(&self, kind: TileKind) -> usize {
        self.tiles.values().filter(|k| **k == kind).count()
    }
}

/// All tiles of a table-driven machine. Arrival tiles are generated for every
/// state, stay tiles of the final state freeze the head cell.
pub fn compile_tiles(tm: &TuringMachine) -> TileSet<u16, u16> {
    let mut tiles = BTreeMap::new();
    let nq = tm.states.len() as u16;
    let ns = tm.alphabet.len() as u16;
    tiles.insert(Tile::seed(), TileKind::Seed);
    tiles.insert(Tile::filler(), TileKind::Filler);
    for a in 0..ns {
        tiles.insert(Tile::tile1(tm.initial, a), TileKind::Tile1);
        tiles.insert(Tile::tile2(a), TileKind::Tile2);
        tiles.insert(Tile::transmit(a), TileKind::Transmit);
        for q in 0..nq {
            tiles.insert(Tile::arrive_west(q, a), TileKind::ArriveWest);
            tiles.insert(Tile::arrive_east(q, a), TileKind::ArriveEast);
        }
        tiles.insert(
            Tile::action(tm.final_state, a, tm.final_state, a, Move::Stay),
            TileKind::Stay,
        );
    }
    for ((q, a), (q2, b, d)) in tm.transitions() {
        let kind = match d {
            Move::Stay => TileKind::Stay,
            Move::Left => TileKind::LeftMove,
            Move::Right => TileKind::RightMove,
        };
        tiles.insert(Tile::action(q, a, q2, b, d), kind);
    }
    TileSet { tiles }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    East,
    North,
}

/// Two neighbouring tiles disagree on their shared edge. `(x, y)` is the
/// west or south tile of the pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mismatch {
    pub x: usize,
    pub y: usize,
    pub side: Side,
}

/// A rectangle of tiles, row 0 at the bottom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilePatch<S, Q> {
    pub width: usize,
    pub height: usize,
    pub rows: Vec<Vec<Tile<S, Q>>>,
}

impl<S: Clone + PartialEq, Q: Clone + PartialEq> TilePatch<S, Q> {
    pub fn from_rows(rows: Vec<Vec<Tile<S, Q>>>) -> Result<TilePatch<S, Q>> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Input("ragged tile patch".into()));
        }
        Ok(TilePatch {
            width,
            height,
            rows,
        })
    }

    pub fn get(&self, x: usize, y: usize) -> &Tile<S, Q> {
        &self.rows[y][x]
    }

    pub fn mismatches(&self) -> Vec<Mismatch> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                let t = self.get(x, y);
                if x + 1 < self.width && t.e != self.get(x + 1, y).w {
                    out.push(Mismatch {
                        x,
                        y,
                        side: Side::East,
                    });
                }
                if y + 1 < self.height && t.n != self.get(x, y + 1).s {
                    out.push(Mismatch {
                        x,
                        y,
                        side: Side::North,
                    });
                }
            }
        }
        out
    }

    pub fn map<S2, Q2>(&self, fs: impl Fn(&S) -> S2, fq: impl Fn(&Q) -> Q2) -> TilePatch<S2, Q2> {
        TilePatch {
            width: self.width,
            height: self.height,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|t| t.map(&fs, &fq)).collect())
                .collect(),
        }
    }
}

/// The seeded bottom row for `input`, `width` tiles wide.
pub fn bottom_row<M: Machine>(
    m: &M,
    input: &[M::Sym],
    width: usize,
) -> Vec<Tile<M::Sym, M::State>> {
    let blank = m.blank();
    let mut row = Vec::with_capacity(width);
    for x in 0..width {
        let a = || input.get(x - 1).cloned().unwrap_or_else(|| blank.clone());
        row.push(match x {
            0 => Tile::seed(),
            1 => Tile::tile1(m.initial(), a()),
            _ => Tile::tile2(a()),
        });
    }
    row
}

/// The tile row above configuration `c`, clipped to `width` columns. Its
/// north edges spell `step(c)`. `None` when the head would leave the tape on
/// the left, which no tile allows.
pub fn transition_row<M: Machine>(
    m: &M,
    c: &Config<M::Sym, M::State>,
    width: usize,
) -> Option<Vec<Tile<M::Sym, M::State>>> {
    let blank = m.blank();
    let h = c.head;
    let a = c.read(h, &blank);
    let (q2, b, d) = if m.is_final(&c.state) {
        (c.state.clone(), a.clone(), Move::Stay)
    } else {
        m.delta(&c.state, &a)
    };
    if d == Move::Left && h == 0 {
        return None;
    }
    let mut row = Vec::with_capacity(width);
    for x in 0..width {
        if x == 0 {
            row.push(Tile::filler());
            continue;
        }
        let j = x - 1;
        let cell = c.read(j, &blank);
        let t = if j == h {
            Tile::action(c.state.clone(), a.clone(), q2.clone(), b.clone(), d)
        } else if d == Move::Right && j == h + 1 {
            Tile::arrive_west(q2.clone(), cell)
        } else if d == Move::Left && j + 1 == h {
            Tile::arrive_east(q2.clone(), cell)
        } else {
            Tile::transmit(cell)
        };
        row.push(t);
    }
    Some(row)
}

/// Tiles for the first `height` rows of the run of `m` on `input`, clipped to
/// `width` columns. Clipping is harmless: a window of a tiling is a tiling.
pub fn tile_run<M: Machine>(
    m: &M,
    input: &[M::Sym],
    width: usize,
    height: usize,
) -> Result<TilePatch<M::Sym, M::State>> {
    let mut rows = Vec::with_capacity(height);
    if height == 0 {
        return Ok(TilePatch {
            width,
            height,
            rows,
        });
    }
    rows.push(bottom_row(m, input, width));
    let mut c = super::initial_config(m, input);
    for _ in 1..height {
        let r = transition_row(m, &c, width).ok_or_else(|| {
            Error::Internal("head moved left off the tape; no tile encodes that step".into())
        })?;
        rows.push(r);
        c = super::step(m, &c);
    }
    Ok(TilePatch {
        width,
        height,
        rows,
    })
}

/// The tiling of a diagram: row 0 is the seeded input row, row `t` encodes
/// the step from diagram row `t - 1` to row `t`.
pub fn diagram_to_patch<M: Machine>(
    m: &M,
    d: &SpaceTimeDiagram<M::Sym, M::State>,
    width: usize,
) -> Result<TilePatch<M::Sym, M::State>> {
    let Some(first) = d.rows.first() else {
        return Ok(TilePatch {
            width,
            height: 0,
            rows: vec![],
        });
    };
    for (t, c) in d.rows.iter().enumerate() {
        if c.head + 1 >= width.max(1) || c.tape.len() + 1 > width {
            return Err(Error::Precondition(format!(
                "width {width} does not cover diagram row {t}"
            )));
        }
    }
    let mut rows = vec![bottom_row(m, &first.tape, width)];
    for (t, pair) in d.rows.windows(2).enumerate() {
        let row = transition_row(m, &pair[0], width)
            .ok_or_else(|| Error::Internal(format!("row {t}: head moved left off the tape")))?;
        if north_config(&row, &m.blank()).as_ref() != Some(&pair[1]) {
            return Err(Error::Internal(format!(
                "diagram row {} is not one step after row {t}",
                t + 1
            )));
        }
        rows.push(row);
    }
    for (y, r) in rows.iter().enumerate() {
        for (x, t) in r.iter().enumerate() {
            if tile_kind(m, t).is_none() {
                return Err(Error::Internal(format!(
                    "tile at ({x},{y}) is not in the tile set"
                )));
            }
        }
    }
    Ok(TilePatch {
        width,
        height: rows.len(),
        rows,
    })
}

/// Reads the configuration spelled by the north edges of columns `1..`.
fn north_config<S: Clone + PartialEq, Q: Clone>(
    row: &[Tile<S, Q>],
    blank: &S,
) -> Option<Config<S, Q>> {
    let mut tape = Vec::new();
    let mut head = None;
    for (j, t) in row.iter().skip(1).enumerate() {
        match &t.n {
            Edge::Sym(a) => tape.push(a.clone()),
            Edge::Head(q, a) => {
                if head.is_some() {
                    return None;
                }
                head = Some((j, q.clone()));
                tape.push(a.clone());
            }
            _ => return None,
        }
    }
    let (head, state) = head?;
    let mut c = Config { state, tape, head };
    c.trim(blank);
    Some(c)
}

pub fn patch_to_diagram<S, Q>(p: &TilePatch<S, Q>, blank: &S) -> Result<SpaceTimeDiagram<S, Q>>
where
    S: Clone + PartialEq + Eq + Hash,
    Q: Clone + PartialEq,
{
    let rows = p
        .rows
        .iter()
        .enumerate()
        .map(|(y, r)| {
            north_config(r, blank)
                .ok_or_else(|| Error::Input(format!("row {y} does not spell a configuration")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpaceTimeDiagram { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::run;

    #[test]
    fn tile_counts_by_move() {
        let tm = TuringMachine::two_state_demo();
        let ts = compile_tiles(&tm);
        let f = tm.final_state;
        let frozen = ts.iter().filter(|(t, _)| t.s.state() == Some(&f)).count();
        assert_eq!(frozen, 3);
        assert_eq!(ts.count(TileKind::Stay) - frozen, 1);
        assert_eq!(ts.count(TileKind::LeftMove), 1);
        assert_eq!(ts.count(TileKind::RightMove), 4);
        assert_eq!(ts, compile_tiles(&tm));
        for (t, k) in ts.iter() {
            assert_eq!(tile_kind(&tm, t), Some(k));
        }
    }

    #[test]
    fn empty_run_patch() {
        let tm = TuringMachine::two_state_demo();
        let d = run(&tm, &[], 5);
        let p = diagram_to_patch(&tm, &d, 7).unwrap();
        assert_eq!((p.width, p.height), (7, 6));
        assert!(p.mismatches().is_empty());
        assert_eq!(patch_to_diagram(&p, &tm.blank).unwrap(), d);
        assert_eq!(p, tile_run(&tm, &[], 7, 6).unwrap());
        let ts = compile_tiles(&tm);
        assert!(p.rows.iter().flatten().all(|t| ts.contains(t)));

        let p0 = diagram_to_patch(&tm, &run(&tm, &[], 0), 4).unwrap();
        assert_eq!(
            p0.rows,
            vec![vec![
                Tile::seed(),
                Tile::tile1(0, 0),
                Tile::tile2(0),
                Tile::tile2(0)
            ]]
        );
    }

    #[test]
    fn narrow_width_refused() {
        let tm = TuringMachine::two_state_demo();
        let d = run(&tm, &[], 5);
        assert!(matches!(
            diagram_to_patch(&tm, &d, 3),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn foreign_tiles_rejected() {
        let tm = TuringMachine::two_state_demo();
        // state a reading blank moves right, never stays
        assert_eq!(tile_kind(&tm, &Tile::action(0, 0, 1, 1, Move::Stay)), None);
        assert_eq!(tile_kind(&tm, &Tile::tile1(1, 0)), None);
    }
}
