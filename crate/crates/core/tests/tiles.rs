//! Exhaustive checks that a seeded bottom row has exactly one completion.

use std::collections::BTreeSet;
use std::sync::Arc;

use paratile_core::machine::tiles::bottom_row;
use paratile_core::machine::{
    compile_tiles, tile_run, GoldenMean, SearchMachine, Tile, TilePatch, TuringMachine,
};
use paratile_core::tilespace::build_comp;

/// Counts the fillings of rows `1..height` above `row0` using tiles from
/// `set`, with matching edges everywhere and no arrow leaving through the
/// east border. Stops at `cap`; the first filling found is stored in `first`.
fn completions<S: Clone + PartialEq, Q: Clone + PartialEq>(
    set: &[Tile<S, Q>],
    row0: Vec<Tile<S, Q>>,
    height: usize,
    cap: usize,
    first: &mut Option<Vec<Vec<Tile<S, Q>>>>,
) -> usize {
    fn go<S: Clone + PartialEq, Q: Clone + PartialEq>(
        set: &[Tile<S, Q>],
        rows: &mut Vec<Vec<Tile<S, Q>>>,
        width: usize,
        height: usize,
        cap: usize,
        first: &mut Option<Vec<Vec<Tile<S, Q>>>>,
    ) -> usize {
        let y = rows.len() - 1;
        let x = rows[y].len();
        if x == width {
            if y + 1 == height {
                if first.is_none() {
                    *first = Some(rows.clone());
                }
                return 1;
            }
            rows.push(Vec::new());
            let n = go(set, rows, width, height, cap, first);
            rows.pop();
            return n;
        }
        let mut total = 0;
        for t in set {
            if t.s != rows[y - 1][x].n {
                continue;
            }
            if x > 0 && t.w != rows[y][x - 1].e {
                continue;
            }
            if x + 1 == width && t.e.is_arrow() {
                continue;
            }
            rows[y].push(t.clone());
            total += go(set, rows, width, height, cap, first);
            rows[y].pop();
            if total >= cap {
                break;
            }
        }
        total
    }
    let width = row0.len();
    let mut rows = vec![row0, Vec::new()];
    go(set, &mut rows, width, height, cap, first)
}

#[test]
fn demo_machine_tilings_are_unique() {
    let m = TuringMachine::two_state_demo();
    let set: Vec<_> = compile_tiles(&m).iter().map(|(t, _)| t.clone()).collect();
    let (zero, one) = (m.symbol("0").unwrap(), m.symbol("1").unwrap());
    let mut inputs = vec![vec![]];
    for len in 1..=3 {
        for bits in 0..1u32 << len {
            inputs.push(
                (0..len)
                    .map(|i| if bits >> i & 1 == 1 { one } else { zero })
                    .collect::<Vec<u16>>(),
            );
        }
    }
    let mut checked = 0;
    for input in inputs {
        for (width, height) in [(7, 6), (5, 4)] {
            let mut first = None;
            let n = completions(&set, bottom_row(&m, &input, width), height, 2, &mut first);
            match tile_run(&m, &input, width, height) {
                Ok(p) => {
                    assert_eq!(n, 1, "input {input:?} at {width}x{height}");
                    assert_eq!(first.unwrap(), p.rows);
                    checked += 1;
                }
                // the head would leave the rectangle, so the arrow-free east border cannot hold
                Err(_) => assert_eq!(n, 0, "input {input:?} at {width}x{height}"),
            }
        }
    }
    assert!(checked > 10);
}

#[test]
fn search_tilings_are_unique() {
    // tile alphabet: everything used by the golden words of length 12 at 6x5
    let mut words: Vec<Vec<u16>> = vec![vec![]];
    for _ in 0..12 {
        words = words
            .into_iter()
            .flat_map(|w| {
                let mut out = vec![[w.clone(), vec![0]].concat()];
                if w.last() != Some(&1) {
                    out.push([w, vec![1]].concat());
                }
                out
            })
            .collect();
    }
    let golden = Arc::new(GoldenMean);
    let patches: Vec<_> = words
        .iter()
        .map(|y| build_comp(y, golden.clone(), 6, 5, 20).unwrap())
        .collect();
    let set: Vec<_> = patches
        .iter()
        .flat_map(|p| p.tau.iter().flatten().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let m = SearchMachine::new(golden);
    for (y, p) in words.iter().zip(&patches).step_by(7) {
        let row0 = bottom_row(&m, &SearchMachine::input_row(&y[..6]), 6);
        assert_eq!(row0, p.tau[0]);
        let mut first = None;
        let n = completions(&set, row0, 5, 2, &mut first);
        assert_eq!(n, 1, "y = {y:?}");
        assert_eq!(first.unwrap(), p.tau);
    }
}

#[test]
fn patch_rows_round_trip() {
    let m = TuringMachine::two_state_demo();
    let p = tile_run(&m, &[], 7, 6).unwrap();
    assert_eq!(TilePatch::from_rows(p.rows.clone()).unwrap(), p);
}
