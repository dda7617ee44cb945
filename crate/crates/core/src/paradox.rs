//! A fixed-point-free 2-to-1 map on F2 and the configuration it induces on
//! the paradoxical alphabet. Paths follow same-color preimage arrows.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{GroupElement, Letter, Word};

pub const A: Letter = 0;
pub const A_INV: Letter = 1;
pub const B: Letter = 2;
pub const B_INV: Letter = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    #[serde(rename = "G")]
    Green,
    #[serde(rename = "B")]
    Blue,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Green => Color::Blue,
            Color::Blue => Color::Green,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Green => "G",
            Color::Blue => "B",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Piece {
    P1,
    P2,
    Wb,
    WB,
}

impl Piece {
    pub fn color(self) -> Color {
        match self {
            Piece::P1 | Piece::P2 => Color::Green,
            Piece::Wb | Piece::WB => Color::Blue,
        }
    }
}

fn check_f2(g: &Word) -> Result<()> {
    if g.rank_used() > 2 {
        return Err(Error::Input(format!("{g} is not in F2")));
    }
    Ok(())
}

/// Suffix piece of a word of F2.
pub fn classify(g: &Word) -> Piece {
    match g.last() {
        None | Some(A) => Piece::P1,
        Some(A_INV) => {
            if g.letters().iter().all(|&l| l == A_INV) {
                Piece::P1
            } else {
                Piece::P2
            }
        }
        Some(B) => Piece::Wb,
        Some(B_INV) => Piece::WB,
        Some(_) => panic!("classify: {g} is not in F2"),
    }
}

/// `classify` for a group element, rejecting anything outside F2.
pub fn classify_element(g: &GroupElement) -> Result<Piece> {
    let w = g.as_free_word()?;
    check_f2(w)?;
    Ok(classify(w))
}

pub fn color_of(g: &Word) -> Color {
    classify(g).color()
}

/// The 2-to-1 map: `g -> g a b` on P2, `g b b` on WB, `g b` elsewhere.
pub fn phi(g: &Word) -> Word {
    let mut h = g.clone();
    match classify(g) {
        Piece::P1 | Piece::Wb => {}
        Piece::P2 => h.push(A),
        Piece::WB => h.push(B),
    }
    h.push(B);
    h
}

/// The unique preimage of `g` under `phi` in the given color class.
pub fn phi_preimage(g: &Word, color: Color) -> Word {
    let mut h = g.clone();
    h.push(B_INV);
    match color {
        Color::Green => {
            if classify(&h) != Piece::P1 {
                h.push(A_INV);
            }
        }
        Color::Blue => {
            if classify(&h) != Piece::Wb {
                h.push(B_INV);
            }
        }
    }
    h
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveSet(pub Vec<Word>);

impl MoveSet {
    /// `{b, B, ab, BA, bb, BB}`.
    pub fn canonical() -> MoveSet {
        MoveSet(
            ["b", "B", "ab", "BA", "bb", "BB"]
                .iter()
                .map(|s| s.parse().unwrap())
                .collect(),
        )
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.0.contains(w)
    }

    pub fn check(&self) -> Result<()> {
        for k in &self.0 {
            if k.is_identity() {
                return Err(Error::Input("move set contains the identity".into()));
            }
            if !self.contains(&k.inv()) {
                return Err(Error::Input(format!(
                    "move set is not symmetric: {k} without its inverse"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParadoxSymbol {
    pub lg: Word,
    pub lb: Word,
    pub r: Word,
    pub color: Color,
}

impl ParadoxSymbol {
    pub fn l(&self, t: Color) -> &Word {
        match t {
            Color::Green => &self.lg,
            Color::Blue => &self.lb,
        }
    }

    fn l_mut(&mut self, t: Color) -> &mut Word {
        match t {
            Color::Green => &mut self.lg,
            Color::Blue => &mut self.lb,
        }
    }
}

impl fmt::Display for ParadoxSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(({}, {}, {}), {})",
            self.lg, self.lb, self.r, self.color
        )
    }
}

/// The symbol of the canonical configuration at `g`.
pub fn canonical_rho(g: &Word) -> ParadoxSymbol {
    let gi = g.inv();
    ParadoxSymbol {
        lg: gi.mul(&phi_preimage(g, Color::Green)),
        lb: gi.mul(&phi_preimage(g, Color::Blue)),
        r: gi.mul(&phi(g)),
        color: color_of(g),
    }
}

/// A finite window of a configuration over the paradoxical alphabet of F2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParadoxPatch {
    pub moveset: MoveSet,
    pub cells: HashMap<Word, ParadoxSymbol>,
}

impl ParadoxPatch {
    pub fn new(moveset: MoveSet) -> ParadoxPatch {
        ParadoxPatch {
            moveset,
            cells: HashMap::new(),
        }
    }

    /// The canonical configuration on the ball of radius `r`.
    pub fn canonical(r: usize) -> ParadoxPatch {
        Self::canonical_on(Word::ball(2, r))
    }

    pub fn canonical_on(window: impl IntoIterator<Item = Word>) -> ParadoxPatch {
        let cells = window.into_iter().map(|g| {
            let s = canonical_rho(&g);
            (g, s)
        });
        ParadoxPatch {
            moveset: MoveSet::canonical(),
            cells: cells.collect(),
        }
    }

    pub fn get(&self, g: &Word) -> Option<&ParadoxSymbol> {
        self.cells.get(g)
    }

    pub fn contains(&self, g: &Word) -> bool {
        self.cells.contains_key(g)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Window in shortlex order.
    pub fn window(&self) -> Vec<Word> {
        let mut w: Vec<Word> = self.cells.keys().cloned().collect();
        w.sort();
        w
    }

    /// The patch of the translated configuration `x -> rho(g^-1 x)`, whose
    /// window is `g` times the old one.
    pub fn translate(&self, g: &Word) -> ParadoxPatch {
        ParadoxPatch {
            moveset: self.moveset.clone(),
            cells: self
                .cells
                .iter()
                .map(|(x, s)| (g.mul(x), s.clone()))
                .collect(),
        }
    }

    /// `g -> g R(rho(g))`, when `g` is in the window.
    pub fn successor(&self, g: &Word) -> Option<Word> {
        self.get(g).map(|s| g.mul(&s.r))
    }

    pub fn to_json(&self) -> PatchJson {
        PatchJson {
            moveset: self.moveset.0.clone(),
            cells: self
                .window()
                .into_iter()
                .map(|g| {
                    let s = &self.cells[&g];
                    CellJson {
                        at: g,
                        lg: s.lg.clone(),
                        lb: s.lb.clone(),
                        r: s.r.clone(),
                        color: s.color,
                    }
                })
                .collect(),
        }
    }

    pub fn from_json(j: PatchJson) -> Result<ParadoxPatch> {
        let moveset = MoveSet(j.moveset);
        moveset.check()?;
        let mut cells = HashMap::new();
        for c in j.cells {
            for w in [&c.at, &c.lg, &c.lb, &c.r] {
                check_f2(w)?;
            }
            let sym = ParadoxSymbol {
                lg: c.lg,
                lb: c.lb,
                r: c.r,
                color: c.color,
            };
            if cells.insert(c.at.clone(), sym).is_some() {
                return Err(Error::Input(format!("cell {} listed twice", c.at)));
            }
        }
        Ok(ParadoxPatch { moveset, cells })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatchJson {
    pub moveset: Vec<Word>,
    pub cells: Vec<CellJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellJson {
    pub at: Word,
    pub lg: Word,
    pub lb: Word,
    pub r: Word,
    pub color: Color,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// A displacement field is not a member of the move set.
    MoveSet,
    /// The green arrow must reach a green cell pointing back.
    GreenArrow,
    /// The blue arrow must reach a blue cell pointing back.
    BlueArrow,
    /// The right arrow must reach a cell whose same-colored arrow points back.
    RightArrow,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub at: Word,
    pub rule: Rule,
    pub neighbor: Word,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalReport {
    pub violations: Vec<Violation>,
    pub skipped: usize,
}

impl LocalReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the three arrow rules and move-set membership at every cell whose
/// referenced neighbor is inside the window.
pub fn validate_local_rules(p: &ParadoxPatch, k: &MoveSet) -> LocalReport {
    let mut rep = LocalReport::default();
    for g in p.window() {
        let s = &p.cells[&g];
        for d in [&s.lg, &s.lb, &s.r] {
            if !k.contains(d) {
                rep.violations.push(Violation {
                    at: g.clone(),
                    rule: Rule::MoveSet,
                    neighbor: g.mul(d),
                });
            }
        }
        for (t, rule) in [
            (Color::Green, Rule::GreenArrow),
            (Color::Blue, Rule::BlueArrow),
        ] {
            let l = s.l(t);
            let h = g.mul(l);
            match p.get(&h) {
                None => rep.skipped += 1,
                Some(b) => {
                    if b.color != t || b.r != l.inv() {
                        rep.violations.push(Violation {
                            at: g.clone(),
                            rule,
                            neighbor: h,
                        });
                    }
                }
            }
        }
        let h = g.mul(&s.r);
        match p.get(&h) {
            None => rep.skipped += 1,
            Some(b) => {
                if *b.l(s.color) != s.r.inv() {
                    rep.violations.push(Violation {
                        at: g.clone(),
                        rule: Rule::RightArrow,
                        neighbor: h,
                    });
                }
            }
        }
    }
    rep
}

/// The `n`-th node of the path from `g` that follows arrows of the color
/// opposite to `g`'s. `None` when the path or its start leaves the window.
pub fn gamma(g: &Word, n: usize, p: &ParadoxPatch) -> Option<Word> {
    path_prefix(g, n + 1, p).and_then(|mut v| v.pop())
}

/// `gamma(g, 0..len)`, or `None` if any of these nodes is outside the window.
pub fn path_prefix(g: &Word, len: usize, p: &ParadoxPatch) -> Option<Vec<Word>> {
    let s = p.get(g)?;
    let t = s.color.opposite();
    let mut out = Vec::with_capacity(len);
    let mut cur = g.mul(s.l(t));
    for i in 0..len {
        let sym = p.get(&cur)?;
        if i + 1 < len {
            let next = cur.mul(sym.l(t));
            out.push(std::mem::replace(&mut cur, next));
        } else {
            out.push(cur.clone());
        }
    }
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCollision {
    pub first: (Word, usize),
    pub second: (Word, usize),
    pub node: Word,
}

/// `Ok` iff the defined values `gamma(g, n)` for `g` in `gset`, `n <= nmax`
/// are pairwise distinct.
pub fn check_path_injectivity(
    p: &ParadoxPatch,
    gset: &[Word],
    nmax: usize,
) -> std::result::Result<(), PathCollision> {
    let mut seen: HashMap<Word, (Word, usize)> = HashMap::new();
    for g in gset {
        let Some(s) = p.get(g) else { continue };
        let t = s.color.opposite();
        let mut cur = g.mul(s.l(t));
        for n in 0..=nmax {
            let Some(sym) = p.get(&cur) else { break };
            if let Some(prev) = seen.get(&cur) {
                return Err(PathCollision {
                    first: prev.clone(),
                    second: (g.clone(), n),
                    node: cur,
                });
            }
            seen.insert(cur.clone(), (g.clone(), n));
            cur = cur.mul(sym.l(t));
        }
    }
    Ok(())
}

/// In-window cycles of `g -> g R(rho(g))` whose nodes share a color. Each
/// cycle starts at its shortlex-least node; the list is sorted.
pub fn scan_monochromatic_cycles(p: &ParadoxPatch) -> Vec<Vec<Word>> {
    // 0 = unseen, 1 = on the current trail, 2 = finished
    let mut state: HashMap<&Word, u8> = HashMap::new();
    let mut cycles = Vec::new();
    for g in p.cells.keys() {
        if state.contains_key(g) {
            continue;
        }
        let mut trail: Vec<&Word> = Vec::new();
        let mut cur = g;
        loop {
            match state.get(cur) {
                Some(2) => break,
                Some(_) => {
                    let start = trail.iter().position(|x| *x == cur).expect("on trail");
                    let cyc: Vec<Word> = trail[start..].iter().map(|w| (*w).clone()).collect();
                    let c0 = p.cells[&cyc[0]].color;
                    if cyc.iter().all(|w| p.cells[w].color == c0) {
                        let m = (0..cyc.len()).min_by(|&i, &j| cyc[i].cmp(&cyc[j])).unwrap();
                        let mut rot = cyc[m..].to_vec();
                        rot.extend_from_slice(&cyc[..m]);
                        cycles.push(rot);
                    }
                    break;
                }
                None => {}
            }
            state.insert(cur, 1);
            trail.push(cur);
            let next = cur.mul(&p.cells[cur].r);
            match p.cells.get_key_value(&next) {
                Some((k, _)) => cur = k,
                None => break,
            }
        }
        for w in trail {
            state.insert(w, 2);
        }
    }
    cycles.sort();
    cycles
}

/// Swaps the colors of `h` and the other preimage `h'` of `phi(h)`, and the
/// two left arrows of `phi(h)`, which breaks the cycle through `h`.
pub fn repair_swap(p: &ParadoxPatch, h: &Word) -> Result<ParadoxPatch> {
    let cycles = scan_monochromatic_cycles(p);
    if !cycles.iter().any(|c| c.contains(h)) {
        return Err(Error::Precondition(format!(
            "{h} is not on a monochromatic cycle"
        )));
    }
    let sh = &p.cells[h];
    let v = h.mul(&sh.r);
    let sv = p
        .get(&v)
        .ok_or_else(|| Error::Internal("cycle left the window".into()))?;
    let t = sh.color;
    let sib = v.mul(sv.l(t.opposite()));
    if !p.contains(&sib) {
        return Err(Error::Boundary(format!(
            "sibling {sib} of {h} is outside the window"
        )));
    }
    let mut out = p.clone();
    let tsib = out.cells[&sib].color;
    out.cells.get_mut(h).unwrap().color = tsib;
    out.cells.get_mut(&sib).unwrap().color = t;
    let cv = out.cells.get_mut(&v).unwrap();
    let (lg, lb) = (cv.lg.clone(), cv.lb.clone());
    *cv.l_mut(Color::Green) = lb;
    *cv.l_mut(Color::Blue) = lg;
    Ok(out)
}

/// For each window element `g`, the in-window prefix of
/// `g, gamma(g, 0), gamma(g, 1), ...`.
pub fn pathcover_from_patch(p: &ParadoxPatch) -> Vec<Vec<Word>> {
    let mut out = Vec::new();
    for g in p.window() {
        let s = &p.cells[&g];
        let t = s.color.opposite();
        let mut path = vec![g.clone()];
        let mut cur = g.mul(s.l(t));
        let mut seen: HashSet<Word> = HashSet::from([g.clone()]);
        while let Some(sym) = p.get(&cur) {
            if !seen.insert(cur.clone()) {
                break;
            }
            let next = cur.mul(sym.l(t));
            path.push(std::mem::replace(&mut cur, next));
        }
        out.push(path);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    // piece membership straight from the suffix description
    fn piece_oracle(s: &str) -> Piece {
        let pure_a_inv = !s.is_empty() && s.chars().all(|c| c == 'A');
        match s.chars().last() {
            None => Piece::P1,
            Some('a') => Piece::P1,
            Some('A') if pure_a_inv => Piece::P1,
            Some('A') => Piece::P2,
            Some('b') => Piece::Wb,
            _ => Piece::WB,
        }
    }

    #[test]
    fn pieces() {
        assert_eq!(classify(&w("")), Piece::P1);
        assert_eq!(classify(&w("bA")), Piece::P2);
        assert_eq!(classify(&w("B")), Piece::WB);
        assert_eq!(classify(&w("AAA")), Piece::P1);
        for g in Word::ball(2, 5) {
            let s = if g.is_identity() {
                String::new()
            } else {
                g.to_string()
            };
            assert_eq!(classify(&g), piece_oracle(&s), "{g}");
        }
        let f3 = crate::groups::GroupSpec::free(3).parse("c").unwrap();
        assert!(classify_element(&f3).is_err());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&w("")), w("b"));
        assert_eq!(phi(&w("bA")), w("bb"));
        assert_eq!(phi(&w("B")), w("b"));
    }

    #[test]
    fn preimage_examples_match_brute_force() {
        let ball = Word::ball(2, 3);
        let brute = |g: &Word, t: Color| -> Vec<Word> {
            ball.iter()
                .filter(|h| phi(h) == *g && color_of(h) == t)
                .cloned()
                .collect()
        };
        assert_eq!(brute(&w("b"), Color::Green), vec![w("")]);
        assert_eq!(brute(&w("b"), Color::Blue), vec![w("B")]);
        assert_eq!(brute(&w(""), Color::Green), vec![w("BA")]);
        assert_eq!(phi_preimage(&w("b"), Color::Green), w(""));
        assert_eq!(phi_preimage(&w("b"), Color::Blue), w("B"));
        assert_eq!(phi_preimage(&w(""), Color::Green), w("BA"));
    }

    #[test]
    fn canonical_symbols() {
        let s = canonical_rho(&w("b"));
        assert_eq!(
            (s.lg, s.lb, s.r, s.color),
            (w("B"), w("BB"), w("b"), Color::Blue)
        );
        let s = canonical_rho(&w(""));
        assert_eq!(
            (s.lg, s.lb, s.r, s.color),
            (w("BA"), w("BB"), w("b"), Color::Green)
        );
    }

    #[test]
    fn local_rules_small_windows() {
        let p = ParadoxPatch::canonical(6);
        assert!(validate_local_rules(&p, &MoveSet::canonical()).is_valid());
        let single = ParadoxPatch::canonical(0);
        let r = validate_local_rules(&single, &MoveSet::canonical());
        assert!(r.is_valid());
        assert_eq!(r.skipped, 3);
    }

    #[test]
    fn flipped_color_is_named() {
        let mut p = ParadoxPatch::canonical(6);
        let g = w("ab");
        let c = p.cells.get_mut(&g).unwrap();
        c.color = c.color.opposite();
        let r = validate_local_rules(&p, &MoveSet::canonical());
        assert!(!r.is_valid());
        assert!(r.violations.iter().any(|v| v.at == g || v.neighbor == g));
    }

    #[test]
    fn path_examples() {
        let p = ParadoxPatch::canonical(8);
        assert_eq!(gamma(&w("b"), 0, &p), Some(w("")));
        assert_eq!(gamma(&w("b"), 1, &p), Some(w("BA")));
        for n in 0..3 {
            assert_eq!(
                gamma(&w(""), n, &p),
                Some(Word::from_letters(&vec![B_INV; 2 * n + 2]))
            );
        }
        assert_eq!(gamma(&w(""), 0, &ParadoxPatch::canonical(0)), None);
    }

    #[test]
    fn injectivity_small() {
        let p = ParadoxPatch::canonical(8);
        assert!(check_path_injectivity(&p, &Word::ball(2, 3), 5).is_ok());
        assert!(check_path_injectivity(&p, &[w("")], 0).is_ok());
    }

    #[test]
    fn merging_paths_are_caught() {
        // b and B both Blue; make both send their green arrow to e
        let mut p = ParadoxPatch::canonical(4);
        let sb = p.cells[&w("b")].clone();
        let c = p.cells.get_mut(&w("B")).unwrap();
        c.color = Color::Blue;
        c.lg = w("b");
        assert_eq!(sb.lg, w("B"));
        let err = check_path_injectivity(&p, &[w("b"), w("B")], 2).unwrap_err();
        assert_eq!(err.node, w(""));
    }

    fn two_cycle_patch() -> ParadoxPatch {
        let mut p = ParadoxPatch::new(MoveSet::canonical());
        let sym = |lg: &str, lb: &str, r: &str, color| ParadoxSymbol {
            lg: w(lg),
            lb: w(lb),
            r: w(r),
            color,
        };
        p.cells.insert(w(""), sym("ab", "b", "b", Color::Blue));
        p.cells.insert(w("b"), sym("BB", "B", "B", Color::Blue));
        p.cells.insert(w("B"), sym("BA", "BB", "bb", Color::Green));
        p
    }

    #[test]
    fn cycle_scan_and_repair() {
        let p = two_cycle_patch();
        assert!(validate_local_rules(&p, &MoveSet::canonical()).is_valid());
        assert_eq!(scan_monochromatic_cycles(&p), vec![vec![w(""), w("b")]]);
        let q = repair_swap(&p, &w("")).unwrap();
        assert!(scan_monochromatic_cycles(&q).is_empty());
        assert!(validate_local_rules(&q, &MoveSet::canonical()).is_valid());
        assert!(scan_monochromatic_cycles(&ParadoxPatch::new(MoveSet::canonical())).is_empty());
        assert!(scan_monochromatic_cycles(&ParadoxPatch::canonical(8)).is_empty());
    }

    #[test]
    fn repair_errors() {
        let p = ParadoxPatch::canonical(3);
        assert!(matches!(
            repair_swap(&p, &w("")),
            Err(Error::Precondition(_))
        ));
        let mut q = two_cycle_patch();
        q.cells.remove(&w("B"));
        assert!(matches!(repair_swap(&q, &w("")), Err(Error::Boundary(_))));
    }

    #[test]
    fn path_cover() {
        let p = ParadoxPatch::canonical(6);
        let cover = pathcover_from_patch(&p);
        let pb = cover.iter().find(|c| c[0] == w("b")).unwrap();
        assert_eq!(&pb[..3], &[w("b"), w(""), w("BA")]);
        let mut count: HashMap<&Word, usize> = HashMap::new();
        for c in &cover {
            for x in c {
                *count.entry(x).or_default() += 1;
            }
        }
        assert!(count.values().all(|&n| n <= 2));
        assert_eq!(
            pathcover_from_patch(&ParadoxPatch::canonical(0)),
            vec![vec![w("")]]
        );
    }

    #[test]
    fn json_round_trip() {
        let p = ParadoxPatch::canonical(2);
        let s = serde_json::to_string(&p.to_json()).unwrap();
        let q = ParadoxPatch::from_json(serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(p, q);
    }
}
