//! One-sided-tape Turing machines and the Wang tiles that encode their
//! space-time diagrams. Effectively closed sets are searched with a budget.

pub mod effective;
pub mod search;
pub mod tiles;

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Debug, Display};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

pub use effective::{dovetail, Dovetail, EffectiveSet, FullSet, GoldenMean, Memo, Query};
pub use search::{SearchMachine, SearchState, Track};
pub use tiles::{
    compile_tiles, diagram_to_patch, patch_to_diagram, tile_kind, tile_run, Edge, Tile, TileKind,
    TilePatch, TileSet,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    pub fn as_i8(self) -> i8 {
        match self {
            Move::Left => -1,
            Move::Stay => 0,
            Move::Right => 1,
        }
    }

    pub fn from_i8(d: i8) -> Option<Move> {
        match d {
            -1 => Some(Move::Left),
            0 => Some(Move::Stay),
            1 => Some(Move::Right),
            _ => None,
        }
    }
}

impl Serialize for Move {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Move {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i8::deserialize(d)?;
        Move::from_i8(v)
            .ok_or_else(|| serde::de::Error::custom(format!("move must be -1, 0 or 1, got {v}")))
    }
}

/// Transition semantics shared by the table-driven machines and the native
/// search interpreter.
pub trait Machine {
    type Sym: Clone + Eq + Hash + Debug;
    type State: Clone + Eq + Hash + Debug;

    fn blank(&self) -> Self::Sym;
    fn initial(&self) -> Self::State;
    fn is_final(&self, q: &Self::State) -> bool;
    /// Never called on a final state.
    fn delta(&self, q: &Self::State, a: &Self::Sym) -> (Self::State, Self::Sym, Move);

    /// Symbols allowed on the bottom row of a seeded tiling.
    fn bottom_ok(&self, _a: &Self::Sym) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Config<S, Q> {
    pub state: Q,
    /// Written prefix; cells past the end are blank. Trailing blanks are trimmed.
    pub tape: Vec<S>,
    pub head: usize,
}

impl<S: Clone + PartialEq, Q> Config<S, Q> {
    pub fn read(&self, i: usize, blank: &S) -> S {
        self.tape.get(i).cloned().unwrap_or_else(|| blank.clone())
    }

    fn trim(&mut self, blank: &S) {
        while self.tape.last() == Some(blank) {
            self.tape.pop();
        }
    }
}

pub fn initial_config<M: Machine>(m: &M, input: &[M::Sym]) -> Config<M::Sym, M::State> {
    let mut c = Config {
        state: m.initial(),
        tape: input.to_vec(),
        head: 0,
    };
    c.trim(&m.blank());
    c
}

/// One step. A left move at cell 0 and any step from a final state leave the
/// configuration unchanged.
pub fn step<M: Machine>(m: &M, c: &Config<M::Sym, M::State>) -> Config<M::Sym, M::State> {
    if m.is_final(&c.state) {
        return c.clone();
    }
    let blank = m.blank();
    let a = c.read(c.head, &blank);
    let (q, b, d) = m.delta(&c.state, &a);
    if d == Move::Left && c.head == 0 {
        return c.clone();
    }
    let mut out = c.clone();
    if out.tape.len() <= c.head {
        out.tape.resize(c.head + 1, blank.clone());
    }
    out.tape[c.head] = b;
    out.state = q;
    out.head = match d {
        Move::Left => c.head - 1,
        Move::Stay => c.head,
        Move::Right => c.head + 1,
    };
    out.trim(&blank);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceTimeDiagram<S, Q> {
    /// Bottom row first.
    pub rows: Vec<Config<S, Q>>,
}

pub fn run<M: Machine>(m: &M, input: &[M::Sym], t: usize) -> SpaceTimeDiagram<M::Sym, M::State> {
    let mut rows = vec![initial_config(m, input)];
    for _ in 0..t {
        let next = step(m, rows.last().unwrap());
        rows.push(next);
    }
    SpaceTimeDiagram { rows }
}

/// Human-readable cell of a diagram row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellView<S, Q> {
    Sym(S),
    Head(Q, S),
}

impl<S: Display, Q: Display> Display for CellView<S, Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellView::Sym(a) => write!(f, "{a}"),
            CellView::Head(q, a) => write!(f, "({q},{a})"),
        }
    }
}

impl<S: Clone + PartialEq, Q: Clone> Config<S, Q> {
    /// The first `width` cells, or just enough to show the head and the
    /// written prefix when `width` is `None`.
    pub fn cells(&self, blank: &S, width: Option<usize>) -> Vec<CellView<S, Q>> {
        let w = width.unwrap_or(self.tape.len().max(self.head + 1));
        (0..w)
            .map(|i| {
                let a = self.read(i, blank);
                if i == self.head {
                    CellView::Head(self.state.clone(), a)
                } else {
                    CellView::Sym(a)
                }
            })
            .collect()
    }
}

/// A machine given by an explicit transition table. Symbols and states are
/// indices into the name tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuringMachine {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub blank: u16,
    pub initial: u16,
    pub final_state: u16,
    delta: HashMap<(u16, u16), (u16, u16, Move)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MachineJson {
    pub states: Vec<String>,
    pub tape_alphabet: Vec<String>,
    pub blank: String,
    pub initial: String,
    #[serde(rename = "final")]
    pub final_state: String,
    pub delta: Vec<DeltaJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaJson {
    pub state: String,
    pub read: String,
    pub next: String,
    pub write: String,
    #[serde(rename = "move")]
    pub mv: Move,
}

impl TuringMachine {
    pub fn from_json(j: &MachineJson) -> Result<TuringMachine> {
        let find = |names: &[String], x: &str, what: &str| -> Result<u16> {
            match names.iter().position(|n| n == x) {
                Some(i) => Ok(i as u16),
                None => input(format!("unknown {what} {x:?}")),
            }
        };
        for (names, what) in [(&j.states, "state"), (&j.tape_alphabet, "symbol")] {
            let uniq: BTreeSet<&String> = names.iter().collect();
            if uniq.len() != names.len() {
                return input(format!("duplicate {what} name"));
            }
        }
        let blank = find(&j.tape_alphabet, &j.blank, "symbol")?;
        let initial = find(&j.states, &j.initial, "state")?;
        let final_state = find(&j.states, &j.final_state, "state")?;
        let mut delta = HashMap::new();
        for d in &j.delta {
            let key = (
                find(&j.states, &d.state, "state")?,
                find(&j.tape_alphabet, &d.read, "symbol")?,
            );
            let val = (
                find(&j.states, &d.next, "state")?,
                find(&j.tape_alphabet, &d.write, "symbol")?,
                d.mv,
            );
            if key.0 == final_state {
                return input("transitions out of the final state are not allowed; it is frozen");
            }
            if delta.insert(key, val).is_some() {
                return input(format!("two transitions for ({}, {})", d.state, d.read));
            }
        }
        let tm = TuringMachine {
            states: j.states.clone(),
            alphabet: j.tape_alphabet.clone(),
            blank,
            initial,
            final_state,
            delta,
        };
        for q in 0..tm.states.len() as u16 {
            if q == final_state {
                continue;
            }
            for a in 0..tm.alphabet.len() as u16 {
                if !tm.delta.contains_key(&(q, a)) {
                    return input(format!(
                        "no transition for ({}, {})",
                        tm.states[q as usize], tm.alphabet[a as usize]
                    ));
                }
            }
        }
        Ok(tm)
    }

    pub fn to_json(&self) -> MachineJson {
        let mut delta: Vec<_> = self.delta.iter().collect();
        delta.sort();
        MachineJson {
            states: self.states.clone(),
            tape_alphabet: self.alphabet.clone(),
            blank: self.alphabet[self.blank as usize].clone(),
            initial: self.states[self.initial as usize].clone(),
            final_state: self.states[self.final_state as usize].clone(),
            delta: delta
                .into_iter()
                .map(|(&(q, a), &(r, b, mv))| DeltaJson {
                    state: self.states[q as usize].clone(),
                    read: self.alphabet[a as usize].clone(),
                    next: self.states[r as usize].clone(),
                    write: self.alphabet[b as usize].clone(),
                    mv,
                })
                .collect(),
        }
    }

    /// Two working states `a`, `b` over `{_, 0, 1}` with a frozen final `F`.
    pub fn two_state_demo() -> TuringMachine {
        let j = serde_json::json!({
            "states": ["a", "b", "F"],
            "tape_alphabet": ["_", "0", "1"],
            "blank": "_",
            "initial": "a",
            "final": "F",
            "delta": [
                {"state": "a", "read": "_", "next": "b", "write": "0", "move": 1},
                {"state": "a", "read": "0", "next": "b", "write": "1", "move": 1},
                {"state": "a", "read": "1", "next": "a", "write": "0", "move": 1},
                {"state": "b", "read": "_", "next": "a", "write": "0", "move": -1},
                {"state": "b", "read": "0", "next": "b", "write": "1", "move": 0},
                {"state": "b", "read": "1", "next": "a", "write": "0", "move": 1}
            ]
        });
        TuringMachine::from_json(&serde_json::from_value(j).unwrap()).unwrap()
    }

    pub fn transitions(&self) -> impl Iterator<Item = ((u16, u16), (u16, u16, Move))> + '_ {
        let mut v: Vec<_> = self.delta.iter().map(|(k, v)| (*k, *v)).collect();
        v.sort();
        v.into_iter()
    }

    pub fn symbol(&self, name: &str) -> Result<u16> {
        match self.alphabet.iter().position(|n| n == name) {
            Some(i) => Ok(i as u16),
            None => input(format!("unknown symbol {name:?}")),
        }
    }

    pub fn parse_input(&self, w: &str) -> Result<Vec<u16>> {
        w.chars().map(|c| self.symbol(&c.to_string())).collect()
    }

    pub fn sym_name(&self, a: u16) -> &str {
        &self.alphabet[a as usize]
    }

    pub fn state_name(&self, q: u16) -> &str {
        &self.states[q as usize]
    }

    /// Diagram rows as text, bottom row first.
    pub fn render_rows(
        &self,
        d: &SpaceTimeDiagram<u16, u16>,
        width: Option<usize>,
    ) -> Vec<Vec<String>> {
        d.rows
            .iter()
            .map(|c| {
                c.cells(&self.blank, width)
                    .into_iter()
                    .map(|cv| match cv {
                        CellView::Sym(a) => self.sym_name(a).to_string(),
                        CellView::Head(q, a) => {
                            format!("({},{})", self.state_name(q), self.sym_name(a))
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

impl Machine for TuringMachine {
    type Sym = u16;
    type State = u16;

    fn blank(&self) -> u16 {
        self.blank
    }

    fn initial(&self) -> u16 {
        self.initial
    }

    fn is_final(&self, q: &u16) -> bool {
        *q == self.final_state
    }

    fn delta(&self, q: &u16, a: &u16) -> (u16, u16, Move) {
        self.delta[&(*q, *a)]
    }
}
