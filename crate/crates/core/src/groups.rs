//! Free groups, integer lattices and finite direct products of them.
//!
//! Free generators are written `a`, `b`, `c`, ... with upper case for the
//! inverse letter. Lattice coordinates are comma-separated signed integers and
//! the factors of a product element are joined by `|`, e.g. `abA|3`.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{input, Error, Result};

/// A free-group letter: generator `i` is `2i`, its inverse is `2i + 1`.
pub type Letter = u8;

#[inline]
pub fn letter_inverse(l: Letter) -> Letter {
    l ^ 1
}

pub fn letter_char(l: Letter) -> char {
    let c = (b'a' + l / 2) as char;
    if l & 1 == 1 {
        c.to_ascii_uppercase()
    } else {
        c
    }
}

fn char_letter(c: char) -> Option<Letter> {
    if c.is_ascii_lowercase() {
        Some((c as u8 - b'a') * 2)
    } else if c.is_ascii_uppercase() {
        Some((c as u8 - b'A') * 2 + 1)
    } else {
        None
    }
}

/// A freely reduced word. Ordered shortlex.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(SmallVec<[Letter; 16]>);

impl Word {
    pub fn identity() -> Word {
        Word(SmallVec::new())
    }

    pub fn letter(l: Letter) -> Word {
        let mut w = Word::identity();
        w.push(l);
        w
    }

    /// Reduces an arbitrary letter sequence.
    pub fn from_letters(ls: &[Letter]) -> Word {
        let mut w = Word::identity();
        for &l in ls {
            w.push(l);
        }
        w
    }

    /// Right-multiplies by one letter, cancelling if needed.
    #[inline]
    pub fn push(&mut self, l: Letter) {
        if self.0.last() == Some(&letter_inverse(l)) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Largest generator index used plus one.
    pub fn rank_used(&self) -> u8 {
        self.0.iter().map(|l| l / 2 + 1).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for &l in other.0.iter() {
            out.push(l);
        }
        out
    }

    pub fn inv(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| letter_inverse(l)).collect())
    }

    /// All reduced words of length at most `r` in `rank` generators, shortlex.
    pub fn ball(rank: u8, r: usize) -> Vec<Word> {
        let mut out = vec![Word::identity()];
        let mut frontier = vec![Word::identity()];
        for _ in 0..r {
            let mut next = Vec::new();
            for w in &frontier {
                for l in 0..2 * rank {
                    if w.last() == Some(letter_inverse(l)) {
                        continue;
                    }
                    let mut v = w.clone();
                    v.0.push(l);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for &l in self.0.iter() {
            write!(f, "{}", letter_char(l))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts letters, whitespace, and `e`/`1`/empty for the identity. The
    /// letter `e` is reserved for the identity, so only ranks up to 4 can be
    /// parsed this way.
    fn from_str(s: &str) -> Result<Word> {
        let t = s.trim();
        if t.is_empty() || t == "e" || t == "1" || t == "ε" {
            return Ok(Word::identity());
        }
        let mut w = Word::identity();
        for c in t.chars() {
            if c.is_whitespace() {
                continue;
            }
            match char_letter(c) {
                Some(l) => w.push(l),
                None => return input(format!("unknown letter {c:?} in {s:?}")),
            }
        }
        Ok(w)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    Free(u8),
    Lattice(u8),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupSpec {
    pub factors: Vec<Factor>,
}

/// One generator or formal inverse of a product group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gen {
    pub factor: usize,
    pub index: u8,
    pub inverse: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    Free(Word),
    Lattice(SmallVec<[i64; 2]>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    parts: SmallVec<[Part; 2]>,
}

impl GroupSpec {
    pub fn new(factors: Vec<Factor>) -> Result<GroupSpec> {
        let spec = GroupSpec { factors };
        spec.check()?;
        Ok(spec)
    }

    pub fn free(rank: u8) -> GroupSpec {
        GroupSpec {
            factors: vec![Factor::Free(rank)],
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.factors.is_empty() {
            return input("group needs at least one factor");
        }
        for f in &self.factors {
            match *f {
                Factor::Free(0) | Factor::Lattice(0) => {
                    return input("factor rank/dimension must be at least 1")
                }
                Factor::Free(k) if k > 4 => {
                    return input("free rank above 4 (the letter e names the identity)")
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            parts: self
                .factors
                .iter()
                .map(|f| match *f {
                    Factor::Free(_) => Part::Free(Word::identity()),
                    Factor::Lattice(d) => Part::Lattice(SmallVec::from_elem(0, d as usize)),
                })
                .collect(),
        }
    }

    pub fn gen(&self, g: Gen) -> Result<GroupElement> {
        self.reduce(&[g])
    }

    /// Normal form of a product of generators.
    pub fn reduce(&self, word: &[Gen]) -> Result<GroupElement> {
        let mut e = self.identity();
        for g in word {
            let Some(f) = self.factors.get(g.factor) else {
                return input(format!("no factor {}", g.factor));
            };
            match (f, &mut e.parts[g.factor]) {
                (Factor::Free(k), Part::Free(w)) => {
                    if g.index >= *k {
                        return input(format!("generator {} out of range", g.index));
                    }
                    w.push(g.index * 2 + g.inverse as u8);
                }
                (Factor::Lattice(d), Part::Lattice(v)) => {
                    if g.index >= *d {
                        return input(format!("lattice axis {} out of range", g.index));
                    }
                    v[g.index as usize] += if g.inverse { -1 } else { 1 };
                }
                _ => unreachable!(),
            }
        }
        Ok(e)
    }

    /// The symmetric standard generating set, factor by factor.
    pub fn standard_generators(&self) -> Vec<GroupElement> {
        let mut out = Vec::new();
        for (fi, f) in self.factors.iter().enumerate() {
            let n = match *f {
                Factor::Free(k) | Factor::Lattice(k) => k,
            };
            for index in 0..n {
                for inverse in [false, true] {
                    out.push(
                        self.gen(Gen {
                            factor: fi,
                            index,
                            inverse,
                        })
                        .expect("in range"),
                    );
                }
            }
        }
        out
    }

    /// Embeds per-factor parts; checks them against the spec.
    pub fn element(&self, parts: Vec<Part>) -> Result<GroupElement> {
        let e = GroupElement {
            parts: parts.into_iter().collect(),
        };
        self.admits(&e)?;
        Ok(e)
    }

    pub fn admits(&self, e: &GroupElement) -> Result<()> {
        if e.parts.len() != self.factors.len() {
            return input("element has the wrong number of factors");
        }
        for (f, p) in self.factors.iter().zip(e.parts.iter()) {
            match (f, p) {
                (Factor::Free(k), Part::Free(w)) if w.rank_used() <= *k => {}
                (Factor::Lattice(d), Part::Lattice(v)) if v.len() == *d as usize => {}
                _ => return input(format!("element {e} does not belong to this group")),
            }
        }
        Ok(())
    }

    /// Parses the text form `abA|3` (free parts may contain spaces).
    pub fn parse(&self, s: &str) -> Result<GroupElement> {
        let pieces: Vec<&str> = s.split('|').collect();
        if pieces.len() != self.factors.len() {
            return input(format!(
                "{s:?} has {} factors, expected {}",
                pieces.len(),
                self.factors.len()
            ));
        }
        let mut parts = Vec::new();
        for (f, p) in self.factors.iter().zip(pieces) {
            match f {
                Factor::Free(_) => parts.push(Part::Free(p.parse()?)),
                Factor::Lattice(d) => {
                    let t = p.trim();
                    let v: SmallVec<[i64; 2]> = if t.is_empty() {
                        SmallVec::from_elem(0, *d as usize)
                    } else {
                        t.split(',')
                            .map(|x| {
                                x.trim()
                                    .parse::<i64>()
                                    .map_err(|e| Error::Input(format!("{x:?}: {e}")))
                            })
                            .collect::<Result<_>>()?
                    };
                    parts.push(Part::Lattice(v));
                }
            }
        }
        self.element(parts)
    }
}

impl GroupElement {
    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn free_part(&self, i: usize) -> Option<&Word> {
        match self.parts.get(i) {
            Some(Part::Free(w)) => Some(w),
            _ => None,
        }
    }

    /// The word of an element of a single free factor.
    pub fn as_free_word(&self) -> Result<&Word> {
        match self.parts.as_slice() {
            [Part::Free(w)] => Ok(w),
            _ => input(format!("{self} is not an element of a free group")),
        }
    }

    pub fn from_word(w: Word) -> GroupElement {
        GroupElement {
            parts: smallvec::smallvec![Part::Free(w)],
        }
    }

    pub fn try_mul(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.parts.len() != other.parts.len() {
            return input("factor count mismatch");
        }
        let mut parts = SmallVec::new();
        for (x, y) in self.parts.iter().zip(other.parts.iter()) {
            parts.push(match (x, y) {
                (Part::Free(a), Part::Free(b)) => Part::Free(a.mul(b)),
                (Part::Lattice(a), Part::Lattice(b)) if a.len() == b.len() => {
                    Part::Lattice(a.iter().zip(b.iter()).map(|(p, q)| p + q).collect())
                }
                _ => return input("factor kind mismatch"),
            });
        }
        Ok(GroupElement { parts })
    }

    /// Product; panics when the two elements come from different groups.
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        self.try_mul(other).expect("elements of the same group")
    }

    pub fn inv(&self) -> GroupElement {
        GroupElement {
            parts: self
                .parts
                .iter()
                .map(|p| match p {
                    Part::Free(w) => Part::Free(w.inv()),
                    Part::Lattice(v) => Part::Lattice(v.iter().map(|x| -x).collect()),
                })
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.parts.iter().all(|p| match p {
            Part::Free(w) => w.is_identity(),
            Part::Lattice(v) => v.iter().all(|&x| x == 0),
        })
    }

    /// Sum of word lengths and l1 norms.
    pub fn length(&self) -> usize {
        self.parts
            .iter()
            .map(|p| match p {
                Part::Free(w) => w.len(),
                Part::Lattice(v) => v.iter().map(|x| x.unsigned_abs() as usize).sum(),
            })
            .sum()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            match p {
                Part::Free(w) => write!(f, "{w}")?,
                Part::Lattice(v) => {
                    let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                    f.write_str(&s.join(","))?;
                }
            }
        }
        Ok(())
    }
}

/// Elements expressible as products of at most `r` of `gens`, in BFS order.
pub fn ball(spec: &GroupSpec, gens: &[GroupElement], r: usize) -> Vec<GroupElement> {
    let id = spec.identity();
    let mut seen: HashSet<GroupElement> = HashSet::from([id.clone()]);
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([(id, 0usize)]);
    while let Some((x, d)) = queue.pop_front() {
        if d == r {
            continue;
        }
        for s in gens {
            let y = x.mul(s);
            if seen.insert(y.clone()) {
                out.push(y.clone());
                queue.push_back((y, d + 1));
            }
        }
    }
    out
}

/// Finite map from words over the generators to symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PatternCoding {
    pub entries: Vec<CodingEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodingEntry {
    pub word: String,
    pub symbol: String,
}

impl PatternCoding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, word: impl Into<String>, symbol: impl Into<String>) {
        self.entries.push(CodingEntry {
            word: word.into(),
            symbol: symbol.into(),
        });
    }

    /// Checks the domain: every word parses and no word appears twice.
    pub fn check(&self, spec: &GroupSpec) -> Result<()> {
        let mut seen = HashSet::new();
        for e in &self.entries {
            spec.parse(&e.word)?;
            if !seen.insert(e.word.as_str()) {
                return input(format!("duplicate word {:?}", e.word));
            }
        }
        Ok(())
    }
}

/// True iff no two words naming the same element carry different symbols.
pub fn coding_consistent(c: &PatternCoding, spec: &GroupSpec) -> Result<bool> {
    let mut at: HashMap<GroupElement, &str> = HashMap::new();
    for e in &c.entries {
        let g = spec.parse(&e.word)?;
        match at.get(&g) {
            Some(s) if *s != e.symbol => return Ok(false),
            Some(_) => {}
            None => {
                at.insert(g, &e.symbol);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GroupSpec {
        GroupSpec::free(2)
    }

    #[test]
    fn reduction_examples() {
        let s = f2();
        assert!(s.parse("aA").unwrap().is_identity());
        assert_eq!(s.parse("abBa").unwrap().to_string(), "aa");
        let w = s.parse("aabAAba").unwrap();
        assert_eq!(w.to_string(), "aabAAba");
        // adjacent pairs never cancel
        let ls = w.as_free_word().unwrap().letters().to_vec();
        assert!(ls.windows(2).all(|p| p[0] != letter_inverse(p[1])));
    }

    #[test]
    fn unknown_letter_rejected() {
        assert!(matches!(f2().parse("a?b"), Err(Error::Input(_))));
        assert!(f2().parse("c").is_err());
    }

    #[test]
    fn multiplication_examples() {
        let s = f2();
        let p = |x: &str| s.parse(x).unwrap();
        assert!(p("ab").mul(&p("BA")).is_identity());
        // concatenate, then strip cancelling pairs until none are left
        let mut cat: Vec<char> = "abAaB".chars().collect();
        while let Some(i) = (0..cat.len().saturating_sub(1))
            .find(|&i| cat[i] != cat[i + 1] && cat[i].eq_ignore_ascii_case(&cat[i + 1]))
        {
            cat.drain(i..i + 2);
        }
        let oracle: String = cat.into_iter().collect();
        assert_eq!(oracle, "a");
        assert_eq!(p("abA").mul(&p("aB")).to_string(), oracle);

        let fz = GroupSpec::new(vec![Factor::Free(2), Factor::Lattice(1)]).unwrap();
        let x = fz.parse("a|2").unwrap();
        let y = fz.parse("b|-1").unwrap();
        assert_eq!(x.mul(&y).to_string(), "ab|1");
        assert!(x.try_mul(&p("a")).is_err());
    }

    #[test]
    fn inverse_examples() {
        let s = f2();
        assert!(s.identity().inv().is_identity());
        assert_eq!(s.parse("ab").unwrap().inv().to_string(), "BA");
        let fz = GroupSpec::new(vec![Factor::Free(2), Factor::Lattice(1)]).unwrap();
        assert_eq!(fz.parse("aB|3").unwrap().inv().to_string(), "bA|-3");
        assert!(fz.parse("aA|0").unwrap().is_identity());
        assert!(s.parse("abBA").unwrap().is_identity());
        assert!(!s.parse("ab").unwrap().is_identity());
    }

    #[test]
    fn ball_sizes() {
        let s = f2();
        let g = s.standard_generators();
        assert_eq!(ball(&s, &g, 0), vec![s.identity()]);
        let b1 = ball(&s, &g, 1);
        assert_eq!(b1.len(), 5);
        assert_eq!(ball(&s, &g, 3).len(), 1 + 4 + 12 + 36);
        assert_eq!(Word::ball(2, 3).len(), 53);
    }

    #[test]
    fn lattice_ball() {
        let z2 = GroupSpec::new(vec![Factor::Lattice(2)]).unwrap();
        let g = z2.standard_generators();
        // l1 ball of radius 2 in Z^2 has 2r^2 + 2r + 1 points
        assert_eq!(ball(&z2, &g, 2).len(), 13);
    }

    #[test]
    fn codings() {
        let s = f2();
        let mut c = PatternCoding::new();
        c.push("a", "0");
        c.push("aA a", "1");
        assert!(!coding_consistent(&c, &s).unwrap());
        let mut c = PatternCoding::new();
        c.push("a", "0");
        c.push("b", "0");
        assert!(coding_consistent(&c, &s).unwrap());
        let mut c = PatternCoding::new();
        c.push("ab", "1");
        c.push("a bB b", "1");
        assert_eq!(s.parse("ab").unwrap(), s.parse("a bB b").unwrap());
        assert!(coding_consistent(&c, &s).unwrap());
        c.push("ab", "1");
        assert!(c.check(&s).is_err());
    }

    #[test]
    fn shortlex_order() {
        let mut v: Vec<Word> = ["ba", "b", "e", "aa", "A", "a"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        v.sort();
        let s: Vec<String> = v.iter().map(|w| w.to_string()).collect();
        assert_eq!(s, ["e", "a", "A", "b", "aa", "ba"]);
    }
}
