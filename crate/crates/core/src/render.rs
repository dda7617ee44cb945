//! Text, binary PGM and SVG pictures of tile patches. Each tile is drawn as
//! four triangles meeting at its centre, one per edge, coloured by the edge
//! label. Output depends only on the patch.

use std::fmt::{Display, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::machine::{Edge, Tile, TilePatch};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Pgm,
    Svg,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "text" => Ok(Format::Text),
            "pgm" => Ok(Format::Pgm),
            "svg" => Ok(Format::Svg),
            _ => Err(Error::Input(format!(
                "unknown render format {s:?}; expected text, pgm or svg"
            ))),
        }
    }
}

pub fn render<S: Display, Q: Display>(p: &TilePatch<S, Q>, f: Format) -> Vec<u8> {
    match f {
        Format::Text => render_text(p).into_bytes(),
        Format::Pgm => render_pgm(p),
        Format::Svg => render_svg(p).into_bytes(),
    }
}

/// Printed name of an edge; `None` for the unlabelled shades.
fn edge_label<S: Display, Q: Display>(e: &Edge<S, Q>) -> Option<String> {
    match e {
        Edge::Dark | Edge::Mid | Edge::Marker | Edge::Blank => None,
        Edge::Sym(a) => Some(a.to_string()),
        Edge::Head(q, a) => Some(format!("({q},{a})")),
        Edge::Left(q) => Some(format!("<{q}")),
        Edge::Right(q) => Some(format!("{q}>")),
    }
}

fn shade_char<S, Q>(e: &Edge<S, Q>) -> &'static str {
    match e {
        Edge::Dark => "#",
        Edge::Mid => "=",
        Edge::Marker => "+",
        _ => ".",
    }
}

/// One token per tile: the north label, with the head arrows leaving through
/// the side edges attached.
fn cell_text<S: Display, Q: Display>(t: &Tile<S, Q>) -> String {
    let mut s = String::new();
    if let Edge::Left(q) = &t.w {
        write!(s, "{q}<").unwrap();
    }
    s.push_str(&edge_label(&t.n).unwrap_or_else(|| shade_char(&t.n).to_string()));
    if let Edge::Right(q) = &t.e {
        write!(s, ">{q}").unwrap();
    }
    s
}

/// Top row first, cells padded to a common width and separated by one space.
pub fn render_text<S: Display, Q: Display>(p: &TilePatch<S, Q>) -> String {
    let cells: Vec<Vec<String>> = p
        .rows
        .iter()
        .map(|r| r.iter().map(cell_text).collect())
        .collect();
    let w = cells
        .iter()
        .flatten()
        .map(|c| c.chars().count())
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    for row in cells.iter().rev() {
        let line: Vec<String> = row.iter().map(|c| format!("{c:<w$}")).collect();
        out.push_str(line.join(" ").trim_end());
        out.push('\n');
    }
    out
}

fn fnv(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn edge_gray<S: Display, Q: Display>(e: &Edge<S, Q>) -> u8 {
    match e {
        Edge::Dark => 0,
        Edge::Mid => 96,
        Edge::Marker => 160,
        Edge::Blank => 255,
        _ => 40 + (fnv(&edge_label(e).unwrap()) % 180) as u8,
    }
}

fn edge_color<S: Display, Q: Display>(e: &Edge<S, Q>) -> String {
    match e {
        Edge::Dark => "#333333".into(),
        Edge::Mid => "#888888".into(),
        Edge::Marker => "#bbbbbb".into(),
        Edge::Blank => "#ffffff".into(),
        _ => {
            let h = fnv(&edge_label(e).unwrap());
            format!("hsl({},70%,{}%)", h % 360, 55 + (h >> 16) % 25)
        }
    }
}

fn sides<S, Q>(t: &Tile<S, Q>) -> [&Edge<S, Q>; 4] {
    [&t.n, &t.e, &t.s, &t.w]
}

const PX: usize = 16;

/// Which edge's triangle pixel `(x, y)` of a tile falls in, `y` downwards:
/// 0 north, 1 east, 2 south, 3 west.
fn quadrant(x: usize, y: usize) -> usize {
    let (x, y) = (2 * x as i64 + 1 - PX as i64, 2 * y as i64 + 1 - PX as i64);
    if y.abs() >= x.abs() {
        if y < 0 {
            0
        } else {
            2
        }
    } else if x > 0 {
        1
    } else {
        3
    }
}

pub fn render_pgm<S: Display, Q: Display>(p: &TilePatch<S, Q>) -> Vec<u8> {
    let (w, h) = (p.width * PX, p.height * PX);
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    for py in 0..h {
        let row = p.height - 1 - py / PX;
        for px in 0..w {
            let t = &p.rows[row][px / PX];
            out.push(edge_gray(sides(t)[quadrant(px % PX, py % PX)]));
        }
    }
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn render_svg<S: Display, Q: Display>(p: &TilePatch<S, Q>) -> String {
    const T: usize = 60;
    let (w, h) = (p.width * T, p.height * T);
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    for y in 0..p.height {
        for x in 0..p.width {
            let t = &p.rows[y][x];
            let (x0, y0) = (x * T, (p.height - 1 - y) * T);
            let (x1, y1, cx, cy) = (x0 + T, y0 + T, x0 + T / 2, y0 + T / 2);
            let corners = [
                (x0, y0, x1, y0),
                (x1, y0, x1, y1),
                (x1, y1, x0, y1),
                (x0, y1, x0, y0),
            ];
            for (e, (ax, ay, bx, by)) in sides(t).into_iter().zip(corners) {
                writeln!(
                    s,
                    r#"<polygon points="{ax},{ay} {bx},{by} {cx},{cy}" fill="{}" stroke="black" stroke-width="0.5"/>"#,
                    edge_color(e)
                )
                .unwrap();
            }
            let spots = [
                (cx, y0 + 12),
                (x1 - 12, cy + 4),
                (cx, y1 - 5),
                (x0 + 12, cy + 4),
            ];
            for (e, (lx, ly)) in sides(t).into_iter().zip(spots) {
                if let Some(l) = edge_label(e) {
                    writeln!(
                        s,
                        r#"<text x="{lx}" y="{ly}" font-family="monospace" font-size="9" text-anchor="middle">{}</text>"#,
                        xml_escape(&l)
                    )
                    .unwrap();
                }
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
