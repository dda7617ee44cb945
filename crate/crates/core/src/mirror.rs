//! The mirror shift on `F_k x Z`: a column of stars that every level reflects
//! through. Also the counting argument that rules out a sofic cover.
//!
//! Cells are addressed `(g, n)` with `g` a reduced word of rank `k <= 4`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::groups::{Factor, GroupSpec, Part, PatternCoding, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MirrorSym {
    S0,
    S1,
    Star,
}

impl MirrorSym {
    pub const ALL: [MirrorSym; 3] = [MirrorSym::S0, MirrorSym::S1, MirrorSym::Star];

    pub fn is_star(self) -> bool {
        self == MirrorSym::Star
    }
}

impl fmt::Display for MirrorSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MirrorSym::S0 => "0",
            MirrorSym::S1 => "1",
            MirrorSym::Star => "*",
        })
    }
}

impl FromStr for MirrorSym {
    type Err = Error;

    fn from_str(s: &str) -> Result<MirrorSym> {
        match s {
            "0" | "s0" => Ok(MirrorSym::S0),
            "1" | "s1" => Ok(MirrorSym::S1),
            "*" | "star" => Ok(MirrorSym::Star),
            _ => Err(Error::Input(format!(
                "unknown mirror symbol {s:?}; expected 0, 1 or *"
            ))),
        }
    }
}

impl Serialize for MirrorSym {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MirrorSym {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

pub type Site = (Word, i64);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirrorPattern {
    pub rank: u8,
    pub cells: BTreeMap<Site, MirrorSym>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MirrorJson {
    pub rank: u8,
    pub cells: Vec<MirrorCell>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MirrorCell {
    pub g: Word,
    pub n: i64,
    pub sym: MirrorSym,
}

fn check_rank(rank: u8) -> Result<()> {
    if !(1..=4).contains(&rank) {
        return Err(Error::Input(format!("rank {rank} outside 1..=4")));
    }
    Ok(())
}

impl MirrorPattern {
    pub fn new(rank: u8) -> MirrorPattern {
        MirrorPattern {
            rank,
            cells: BTreeMap::new(),
        }
    }

    pub fn get(&self, g: &Word, n: i64) -> Option<MirrorSym> {
        self.cells.get(&(g.clone(), n)).copied()
    }

    pub fn set(&mut self, g: Word, n: i64, sym: MirrorSym) {
        self.cells.insert((g, n), sym);
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `(h g, n + t)` carries the symbol of `(g, n)`.
    pub fn translate(&self, h: &Word, t: i64) -> MirrorPattern {
        let cells = self
            .cells
            .iter()
            .map(|((g, n), &s)| ((h.mul(g), n + t), s))
            .collect();
        MirrorPattern {
            rank: self.rank,
            cells,
        }
    }

    pub fn to_json(&self) -> MirrorJson {
        MirrorJson {
            rank: self.rank,
            cells: self
                .cells
                .iter()
                .map(|((g, n), &sym)| MirrorCell {
                    g: g.clone(),
                    n: *n,
                    sym,
                })
                .collect(),
        }
    }

    pub fn from_json(j: MirrorJson) -> Result<MirrorPattern> {
        check_rank(j.rank)?;
        let mut p = MirrorPattern::new(j.rank);
        for c in j.cells {
            if c.g.rank_used() > j.rank {
                return Err(Error::Input(format!(
                    "{} uses letters beyond rank {}",
                    c.g, j.rank
                )));
            }
            if p.cells.insert((c.g.clone(), c.n), c.sym).is_some() {
                return Err(Error::Input(format!(
                    "cell ({}, {}) listed twice",
                    c.g, c.n
                )));
            }
        }
        Ok(p)
    }

    /// Reads a coding over `F_k x Z` with entries `word|n` and symbols `0`,
    /// `1`, `*`.
    pub fn from_coding(rank: u8, c: &PatternCoding) -> Result<MirrorPattern> {
        check_rank(rank)?;
        let spec = mirror_group(rank);
        let mut p = MirrorPattern::new(rank);
        for e in &c.entries {
            let el = spec.parse(&e.word)?;
            let (Part::Free(g), Part::Lattice(v)) = (&el.parts()[0], &el.parts()[1]) else {
                unreachable!("spec has a free and a lattice factor")
            };
            let sym: MirrorSym = e.symbol.parse()?;
            match p.cells.insert((g.clone(), v[0]), sym) {
                Some(old) if old != sym => {
                    return Err(Error::Input(format!(
                        "coding names ({g}, {}) twice with different symbols",
                        v[0]
                    )))
                }
                _ => {}
            }
        }
        Ok(p)
    }

    pub fn to_coding(&self) -> PatternCoding {
        let mut c = PatternCoding::new();
        for ((g, n), s) in &self.cells {
            c.push(format!("{g}|{n}"), s.to_string());
        }
        c
    }
}

/// `F_k x Z`.
pub fn mirror_group(rank: u8) -> GroupSpec {
    GroupSpec {
        factors: vec![Factor::Free(rank), Factor::Lattice(1)],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule")]
pub enum MirrorViolation {
    /// Stars at `(g, n)` and `(h, n)` with `g != h`.
    X1 { n: i64, g: Word, h: Word },
    /// A star at `(g, n)` above or below a non-star `(g, m)`.
    X2 { g: Word, n: i64, m: i64 },
    /// A star at `(g, n)` and `x(g h, n) != x(g h^-1, n)`.
    X3 { g: Word, n: i64, h: Word },
}

impl MirrorViolation {
    /// The cells the violation is about.
    pub fn sites(&self) -> Vec<Site> {
        match self {
            MirrorViolation::X1 { n, g, h } => vec![(g.clone(), *n), (h.clone(), *n)],
            MirrorViolation::X2 { g, n, m } => vec![(g.clone(), *n), (g.clone(), *m)],
            MirrorViolation::X3 { g, n, h } => {
                vec![(g.clone(), *n), (g.mul(h), *n), (g.mul(&h.inv()), *n)]
            }
        }
    }
}

/// Every rule instance whose cells all lie in the window. Each `X3` pair is
/// reported once, under the shortlex-smaller of `h` and `h^-1`.
pub fn validate_mirror(p: &MirrorPattern) -> Vec<MirrorViolation> {
    let mut out = Vec::new();
    let mut levels: BTreeMap<i64, Vec<(&Word, MirrorSym)>> = BTreeMap::new();
    let mut columns: BTreeMap<&Word, Vec<(i64, MirrorSym)>> = BTreeMap::new();
    for ((g, n), &s) in &p.cells {
        levels.entry(*n).or_default().push((g, s));
        columns.entry(g).or_default().push((*n, s));
    }
    for (&n, row) in &levels {
        let stars: Vec<&Word> = row
            .iter()
            .filter(|(_, s)| s.is_star())
            .map(|(g, _)| *g)
            .collect();
        for (i, g) in stars.iter().enumerate() {
            for h in &stars[i + 1..] {
                out.push(MirrorViolation::X1 {
                    n,
                    g: (*g).clone(),
                    h: (*h).clone(),
                });
            }
        }
    }
    for (g, col) in &columns {
        for &(n, _) in col.iter().filter(|(_, s)| s.is_star()) {
            for &(m, t) in col {
                if !t.is_star() {
                    out.push(MirrorViolation::X2 {
                        g: (*g).clone(),
                        n,
                        m,
                    });
                }
            }
        }
    }
    for (&n, row) in &levels {
        for (g, _) in row.iter().filter(|(_, s)| s.is_star()) {
            let gi = g.inv();
            for &(u, su) in row {
                let h = gi.mul(u);
                let hi = h.inv();
                if h.is_identity() || hi < h {
                    continue;
                }
                let v = g.mul(&hi);
                if let Some(sv) = p.get(&v, n) {
                    if sv != su {
                        out.push(MirrorViolation::X3 {
                            g: (*g).clone(),
                            n,
                            h,
                        });
                    }
                }
            }
        }
    }
    out
}

/// A configuration of the mirror shift on `ball(radius) x levels`: stars on
/// the column of `pillar` if given, and random bits elsewhere that agree on
/// `pillar h` and `pillar h^-1`.
pub fn mirror_configuration<R: Rng>(
    rank: u8,
    pillar: Option<&Word>,
    radius: usize,
    levels: RangeInclusive<i64>,
    rng: &mut R,
) -> Result<MirrorPattern> {
    check_rank(rank)?;
    if let Some(g0) = pillar {
        if g0.rank_used() > rank {
            return Err(Error::Input(format!(
                "pillar {g0} uses letters beyond rank {rank}"
            )));
        }
    }
    let g0 = pillar.cloned().unwrap_or_default();
    let g0i = g0.inv();
    let window = Word::ball(rank, radius);
    let mut bits: HashMap<(Word, i64), MirrorSym> = HashMap::new();
    let mut p = MirrorPattern::new(rank);
    for n in levels {
        for g in &window {
            let sym = if pillar.is_none() {
                if rng.gen::<bool>() {
                    MirrorSym::S1
                } else {
                    MirrorSym::S0
                }
            } else {
                let h = g0i.mul(g);
                if h.is_identity() {
                    MirrorSym::Star
                } else {
                    let key = std::cmp::min(h.clone(), h.inv());
                    *bits.entry((key, n)).or_insert_with(|| {
                        if rng.gen::<bool>() {
                            MirrorSym::S1
                        } else {
                            MirrorSym::S0
                        }
                    })
                }
            };
            p.set(g.clone(), n, sym);
        }
    }
    Ok(p)
}

/// Forbidden codings anchored at a star on `(e, 0)`, in order of size: the
/// largest of `|g|` and `|n|` over the support. The list for `budget` is the
/// list for `budget + 1` cut at size `budget`. Up to translation, every
/// violation of the three rules whose anchored support has size at most
/// `budget` contains one of them.
pub fn enumerate_forbidden_codings(rank: u8, budget: usize) -> Result<Vec<PatternCoding>> {
    check_rank(rank)?;
    let e = Word::identity();
    let star = MirrorSym::Star;
    let mut out = Vec::new();
    let mut emit = |cells: &[(&Word, i64, MirrorSym)]| {
        let mut p = MirrorPattern::new(rank);
        for (g, n, s) in cells {
            p.set((*g).clone(), *n, *s);
        }
        out.push(p.to_coding());
    };
    let all = Word::ball(rank, budget);
    for r in 1..=budget {
        let sphere: Vec<&Word> = all.iter().filter(|g| g.len() == r).collect();
        for g in &sphere {
            emit(&[(&e, 0, star), (g, 0, star)]);
        }
        for m in [-(r as i64), r as i64] {
            for s in [MirrorSym::S0, MirrorSym::S1] {
                emit(&[(&e, 0, star), (&e, m, s)]);
            }
        }
        for h in &sphere {
            let hi = h.inv();
            if hi < **h {
                continue;
            }
            for s in MirrorSym::ALL {
                for t in MirrorSym::ALL {
                    if s != t {
                        emit(&[(&e, 0, star), (h, 0, s), (&hi, 0, t)]);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn big_number<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    match u64::try_from(x) {
        Ok(v) => s.serialize_u64(v),
        Err(_) => s.collect_str(x),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: u32,
    pub alpha: u32,
    pub m: u32,
    /// `2^(N m)`.
    #[serde(serialize_with = "big_number")]
    pub lhs: BigUint,
    /// `alpha^(3 m)`.
    #[serde(serialize_with = "big_number")]
    pub rhs: BigUint,
    /// `N > 3 log2(alpha)`, decided as `2^N > alpha^3`.
    pub premise: bool,
    /// `3 log2(alpha)`, for display.
    pub premise_threshold: f64,
    pub holds: bool,
}

pub fn counting_bound(n: u32, alpha: u32, m: u32) -> Result<BoundReport> {
    if n == 0 || alpha == 0 || m == 0 {
        return Err(Error::Input("N, alpha and m must be positive".into()));
    }
    let two = BigUint::from(2u32);
    let a = BigUint::from(alpha);
    let lhs = two.pow(n * m);
    let rhs = a.pow(3 * m);
    let premise = two.pow(n) > a.pow(3);
    Ok(BoundReport {
        n,
        alpha,
        m,
        holds: lhs > rhs,
        lhs,
        rhs,
        premise,
        premise_threshold: 3.0 * (alpha as f64).log2(),
    })
}

/// Largest number of labelings `collision_search` will enumerate.
pub const COLLISION_LIMIT: u64 = 1 << 24;

/// Two labelings of the `N x m` grid with the same boundary image. Grids are
/// listed level by level; `grid[k][i]` is the label at `(a^(i+1), k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub p: Vec<Vec<u8>>,
    pub q: Vec<Vec<u8>>,
    /// The shared image: `3 m` letters below `alpha`, levels `-m .. 2m`.
    pub boundary: Vec<u32>,
}

fn labeling(n: u32, m: u32, bits: u64) -> Vec<Vec<u8>> {
    (0..m)
        .map(|k| (0..n).map(|i| ((bits >> (k * n + i)) & 1) as u8).collect())
        .collect()
}

fn labeling_bits(n: u32, m: u32, grid: &[Vec<u8>]) -> Result<u64> {
    if grid.len() != m as usize || grid.iter().any(|r| r.len() != n as usize) {
        return Err(Error::Input(format!("labeling must be {m} rows of {n}")));
    }
    let mut bits = 0u64;
    for (k, row) in grid.iter().enumerate() {
        for (i, &b) in row.iter().enumerate() {
            if b > 1 {
                return Err(Error::Input("labels are 0 or 1".into()));
            }
            bits |= (b as u64) << (k * n as usize + i);
        }
    }
    Ok(bits)
}

fn check_instance(alpha: u32, n: u32, m: u32) -> Result<()> {
    if alpha == 0 || n == 0 || m == 0 {
        return Err(Error::Input("alpha, N and m must be positive".into()));
    }
    if n as u64 * m as u64 > 24 {
        return Err(Error::Budget(format!(
            "2^{} labelings exceed the limit of 2^24",
            n as u64 * m as u64
        )));
    }
    Ok(())
}

/// The stand-in for a cover's boundary column: an odd multiplier permutes the
/// labelings, and the result is written in base `alpha` modulo `alpha^(3m)`.
/// Injective exactly when `2^(N m) <= alpha^(3m)`.
pub fn boundary_image(alpha: u32, n: u32, m: u32, grid: &[Vec<u8>]) -> Result<Vec<u32>> {
    check_instance(alpha, n, m)?;
    let bits = labeling_bits(n, m, grid)?;
    Ok(image_of(alpha, n * m, m, bits))
}

fn image_of(alpha: u32, nm: u32, m: u32, bits: u64) -> Vec<u32> {
    let mask = (1u64 << nm) - 1;
    let mut x = bits.wrapping_mul(0x9E37_79B9_7F4A_7C15) & mask;
    let mut out = Vec::with_capacity(3 * m as usize);
    for _ in 0..3 * m {
        if alpha == 1 {
            out.push(0);
        } else {
            out.push((x % alpha as u64) as u32);
            x /= alpha as u64;
        }
    }
    out
}

/// Enumerates labelings in increasing order and returns the first one whose
/// image was already taken, with the earlier labeling that took it. `None`
/// when `2^(N m) <= alpha^(3m)`, where the image map is injective.
pub fn collision_search(alpha: u32, n: u32, m: u32) -> Result<Option<Collision>> {
    check_instance(alpha, n, m)?;
    let rep = counting_bound(n, alpha, m)?;
    if !rep.holds {
        return Ok(None);
    }
    let nm = n * m;
    let mut seen: HashMap<Vec<u32>, u64> = HashMap::new();
    for bits in 0..(1u64 << nm) {
        let img = image_of(alpha, nm, m, bits);
        if let Some(&first) = seen.get(&img) {
            return Ok(Some(Collision {
                p: labeling(n, m, first),
                q: labeling(n, m, bits),
                boundary: img,
            }));
        }
        seen.insert(img, bits);
    }
    Err(Error::Internal(
        "more labelings than images but no collision".into(),
    ))
}

/// Recomputes both images.
pub fn verify_collision(alpha: u32, n: u32, m: u32, c: &Collision) -> Result<bool> {
    Ok(c.p != c.q
        && boundary_image(alpha, n, m, &c.p)? == c.boundary
        && boundary_image(alpha, n, m, &c.q)? == c.boundary)
}
