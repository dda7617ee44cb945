//! `paratile`: command-line access to the constructions in `paratile-core`.
//!
//! Every command prints one JSON object. Check-style commands report a
//! `status` of `OK`, `VIOLATIONS`, `REJECTED`, `UNDECIDED` or `ERROR`; build
//! commands print the artifact itself so it can be piped into the matching
//! check. Exit codes: 0 for OK/UNDECIDED, 1 for VIOLATIONS/REJECTED, 2 for
//! ERROR.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use paratile_core::machine::{
    compile_tiles, diagram_to_patch, dovetail, run, Dovetail, EffectiveSet, FullSet, GoldenMean,
    TilePatch, TuringMachine,
};
use paratile_core::mirror::{
    collision_search, counting_bound, enumerate_forbidden_codings, mirror_configuration,
    validate_mirror, MirrorPattern,
};
use paratile_core::paradox::{
    gamma, scan_monochromatic_cycles, validate_local_rules, ParadoxPatch,
};
use paratile_core::render::{render, Format};
use paratile_core::selfsim::{
    action_by_name, build_final, check_equivariance, factor_phi, path_copied_layer,
    validate_copied, validate_final, CopiedLayer, FinalPatch, Generator, LayerShifts,
};
use paratile_core::tilespace::{build_comp, validate_comp, CompPatch};
use paratile_core::{Error, Word};

const DEFAULT_BUDGET: &str = "20";

#[derive(Parser)]
#[command(
    name = "paratile",
    version,
    about = "Paradoxical subshifts, Wang tilings of Turing machines and self-simulation on F2 x F2"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Turing machines and their Wang tiles.
    #[command(subcommand)]
    Tm(TmCmd),
    /// The paradoxical subshift on F2.
    #[command(subcommand)]
    Paradox(ParadoxCmd),
    /// Computation tilings coupled to a synchronisation layer.
    #[command(subcommand)]
    Tilespace(TilespaceCmd),
    /// The SFT on F2 x F2 over an effectively closed action.
    #[command(subcommand)]
    Selfsim(SelfsimCmd),
    /// The mirror shift on F_k x Z.
    #[command(subcommand)]
    Mirror(MirrorCmd),
}

#[derive(Subcommand)]
enum TmCmd {
    /// Space-time diagram, rows bottom-up.
    Run {
        file: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long)]
        steps: usize,
        /// Pad every row to this many cells.
        #[arg(long)]
        width: Option<usize>,
    },
    /// The tile set of the machine.
    Compile { file: PathBuf },
    /// The seeded tiling of a run.
    Tile {
        file: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        render: Option<String>,
    },
}

#[derive(Subcommand)]
enum ParadoxCmd {
    /// The canonical configuration on a ball.
    Gen {
        #[arg(long)]
        radius: usize,
    },
    /// Local rules and in-window monochromatic cycles.
    Check { file: PathBuf },
    /// The path of an element, while it stays in the window.
    Paths {
        file: PathBuf,
        #[arg(long)]
        from: Word,
        #[arg(long)]
        steps: usize,
    },
}

#[derive(Args)]
struct BudgetArg {
    /// Effectiveness budget.
    #[arg(long, env = "SELFSIM_BUDGET", default_value = DEFAULT_BUDGET)]
    budget: u32,
}

#[derive(Subcommand)]
enum TilespaceCmd {
    /// A computation tiling with the given boundary word.
    Build {
        #[arg(long, default_value = "golden")]
        set: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// Edge matching, synchronisation, coupling and effectiveness.
    Check {
        file: PathBuf,
        #[arg(long, default_value = "golden")]
        set: String,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// Draws the computation layer.
    Render {
        file: PathBuf,
        #[arg(long, default_value = "text")]
        fmt: String,
    },
}

#[derive(Subcommand)]
enum SelfsimCmd {
    /// A configuration on a product of factor balls.
    Build {
        #[arg(long, default_value = "trivial-golden")]
        action: String,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// Embedding, coherence and layer rules, and the bottom rows of all grids.
    Check {
        file: PathBuf,
        #[arg(long, default_value = "trivial-golden")]
        action: String,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// The word the configuration encodes at the identity.
    Extract {
        file: PathBuf,
        #[arg(long)]
        len: usize,
        #[arg(long, default_value = "trivial-golden")]
        action: String,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// Compares the readout of a shifted configuration with the action.
    Equivariance {
        file: PathBuf,
        #[arg(long)]
        gen: String,
        #[arg(long, default_value_t = 3)]
        len: usize,
        #[arg(long, default_value = "trivial-golden")]
        action: String,
    },
    /// Builds a paradoxical layer with a word copied along every path.
    CopyBuild {
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        x: String,
    },
    /// Path words are accepted and agree between neighbours.
    CopyCheck {
        file: PathBuf,
        #[arg(long, default_value = "golden")]
        set: String,
        #[command(flatten)]
        budget: BudgetArg,
    },
}

#[derive(Subcommand)]
enum MirrorCmd {
    /// A random configuration on ball(radius) x [-levels, levels].
    Gen {
        #[arg(long, default_value_t = 2)]
        rank: u8,
        #[arg(long, default_value_t = 4)]
        radius: usize,
        #[arg(long, default_value_t = 3)]
        levels: i64,
        /// Column of stars; `none` for a configuration without stars.
        #[arg(long, default_value = "e")]
        pillar: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The three mirror rules.
    Check { file: PathBuf },
    /// Forbidden codings up to a size.
    Forbid {
        #[arg(long, default_value_t = 2)]
        rank: u8,
        #[arg(long)]
        budget: usize,
    },
    /// `2^(N m)` against `alpha^(3 m)`.
    Bound {
        #[arg(long = "N")]
        n: u32,
        #[arg(long)]
        alpha: u32,
        #[arg(long, default_value_t = 1)]
        m: u32,
    },
    /// First pair of grid labelings with the same boundary image.
    Collide {
        #[arg(long)]
        alpha: u32,
        #[arg(long = "N")]
        n: u32,
        #[arg(long, default_value_t = 1)]
        m: u32,
    },
}

/// What a command produced.
enum Out {
    Json(Value),
    Bytes(Vec<u8>),
}

/// A failure with its status: `REJECTED` for membership errors, else `ERROR`.
struct Fail(String, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        match e {
            Error::Membership(m) => Fail("REJECTED".into(), m),
            e => Fail("ERROR".into(), e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<Out, Fail>;

fn err(msg: impl Into<String>) -> Fail {
    Fail("ERROR".into(), msg.into())
}

fn read(path: &Path) -> std::result::Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| err(format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> std::result::Result<T, Fail> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| err(format!("{}: malformed JSON: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serialisable")
}

fn status(s: &str, mut payload: Value) -> Out {
    payload
        .as_object_mut()
        .expect("object payload")
        .insert("status".into(), json!(s));
    Out::Json(payload)
}

fn verdict(ok: bool, payload: Value) -> Out {
    status(if ok { "OK" } else { "VIOLATIONS" }, payload)
}

fn digits(w: &str, base: u16) -> std::result::Result<Vec<u16>, Fail> {
    w.chars()
        .map(|c| match c.to_digit(10) {
            Some(d) if (d as u16) < base => Ok(d as u16),
            _ => Err(err(format!("{c:?} is not a digit below {base}"))),
        })
        .collect()
}

fn set_by_name(name: &str) -> std::result::Result<Arc<dyn EffectiveSet>, Fail> {
    match name {
        "golden" => Ok(Arc::new(GoldenMean)),
        "full" => Ok(Arc::new(FullSet(2))),
        _ => Err(err(format!(
            "unknown set {name:?}; expected golden or full"
        ))),
    }
}

fn machine(path: &Path) -> std::result::Result<TuringMachine, Fail> {
    Ok(TuringMachine::from_json(&read_json(path)?)?)
}

fn named_patch(tm: &TuringMachine, p: &TilePatch<u16, u16>) -> TilePatch<String, String> {
    p.map(
        |a| tm.sym_name(*a).to_string(),
        |q| tm.state_name(*q).to_string(),
    )
}

fn tm(cmd: TmCmd) -> CmdResult {
    match cmd {
        TmCmd::Run {
            file,
            input,
            steps,
            width,
        } => {
            let m = machine(&file)?;
            let d = run(&m, &m.parse_input(&input)?, steps);
            let rows = m.render_rows(&d, width);
            let text: Vec<String> = rows.iter().map(|r| r.join(" ")).collect();
            Ok(status(
                "OK",
                json!({ "steps": steps, "rows": rows, "text": text }),
            ))
        }
        TmCmd::Compile { file } => {
            let m = machine(&file)?;
            let set = compile_tiles(&m);
            let tiles: Vec<Value> = set
                .iter()
                .map(|(t, k)| {
                    let t = t.map(
                        |a| m.sym_name(*a).to_string(),
                        |q| m.state_name(*q).to_string(),
                    );
                    json!({ "kind": k, "tile": t })
                })
                .collect();
            Ok(status("OK", json!({ "count": set.len(), "tiles": tiles })))
        }
        TmCmd::Tile {
            file,
            input,
            steps,
            width,
            render: fmt,
        } => {
            let m = machine(&file)?;
            let d = run(&m, &m.parse_input(&input)?, steps);
            let p = diagram_to_patch(&m, &d, width)?;
            let named = named_patch(&m, &p);
            if let Some(f) = fmt {
                return Ok(Out::Bytes(render(&named, f.parse()?)));
            }
            let mismatches = p.mismatches();
            Ok(verdict(
                mismatches.is_empty(),
                json!({ "width": p.width, "height": p.height, "rows": named.rows, "mismatches": mismatches }),
            ))
        }
    }
}

fn paradox(cmd: ParadoxCmd) -> CmdResult {
    match cmd {
        ParadoxCmd::Gen { radius } => Ok(Out::Json(to_value(
            &ParadoxPatch::canonical(radius).to_json(),
        ))),
        ParadoxCmd::Check { file } => {
            let p = ParadoxPatch::from_json(read_json(&file)?)?;
            let rep = validate_local_rules(&p, &p.moveset);
            let cycles = scan_monochromatic_cycles(&p);
            Ok(verdict(
                rep.violations.is_empty() && cycles.is_empty(),
                json!({ "skipped": rep.skipped, "violations": rep.violations, "cycles": cycles }),
            ))
        }
        ParadoxCmd::Paths { file, from, steps } => {
            let p = ParadoxPatch::from_json(read_json(&file)?)?;
            if !p.contains(&from) {
                return Err(err(format!("{from} is outside the window")));
            }
            let path: Vec<Word> = (0..steps).map_while(|n| gamma(&from, n, &p)).collect();
            let truncated = path.len() < steps;
            Ok(status(
                "OK",
                json!({ "from": from, "path": path, "truncated": truncated }),
            ))
        }
    }
}

fn comp_file(file: &Path) -> std::result::Result<CompPatch, Fail> {
    Ok(CompPatch::from_json(&read(file)?)?)
}

fn tilespace(cmd: TilespaceCmd) -> CmdResult {
    match cmd {
        TilespaceCmd::Build {
            set,
            y,
            width,
            height,
            budget,
        } => {
            let set = set_by_name(&set)?;
            let y = digits(&y, set.alphabet_size())?;
            let p = build_comp(&y, set, width, height, budget.budget)?;
            Ok(Out::Json(to_value(&p)))
        }
        TilespaceCmd::Check { file, set, budget } => {
            let p = comp_file(&file)?;
            let v = validate_comp(&p, set_by_name(&set)?, budget.budget);
            Ok(verdict(v.is_empty(), json!({ "violations": v })))
        }
        TilespaceCmd::Render { file, fmt } => {
            let p = comp_file(&file)?;
            Ok(Out::Bytes(render(&p.tau_patch(), fmt.parse::<Format>()?)))
        }
    }
}

fn final_file(file: &Path) -> std::result::Result<FinalPatch, Fail> {
    Ok(FinalPatch::from_json(read_json(file)?)?)
}

fn bits(w: &str) -> std::result::Result<Vec<u8>, Fail> {
    Ok(digits(w, 2)?.into_iter().map(|d| d as u8).collect())
}

fn selfsim(cmd: SelfsimCmd) -> CmdResult {
    match cmd {
        SelfsimCmd::Build {
            action,
            x,
            radius,
            budget,
        } => {
            let act = action_by_name(&action)?;
            let z = build_final(
                &bits(&x)?,
                act,
                &LayerShifts::default(),
                radius,
                budget.budget,
            )?;
            Ok(Out::Json(to_value(&z.to_json())))
        }
        SelfsimCmd::Check {
            file,
            action,
            budget,
        } => {
            let z = final_file(&file)?;
            let rep = validate_final(&z, action_by_name(&action)?, budget.budget);
            Ok(verdict(rep.violations.is_empty(), to_value(&rep)))
        }
        SelfsimCmd::Extract {
            file,
            len,
            action,
            budget,
        } => {
            let z = final_file(&file)?;
            let act = action_by_name(&action)?;
            let r = factor_phi(&z, len);
            let w: Vec<u16> = r.word.iter().map(|&d| d as u16).collect();
            let word: String = r.word.iter().map(|d| char::from(b'0' + d)).collect();
            let payload = json!({ "word": word, "truncated": r.truncated });
            Ok(match dovetail(&*act.space(), &w, budget.budget) {
                Dovetail::Rejected { round, len } => status("REJECTED", {
                    let mut p = payload;
                    p["rejected"] = json!({ "round": round, "len": len });
                    p
                }),
                Dovetail::Undecided => status("OK", payload),
            })
        }
        SelfsimCmd::Equivariance {
            file,
            gen,
            len,
            action,
        } => {
            let z = final_file(&file)?;
            let s: Generator = gen.parse()?;
            let act = action_by_name(&action)?;
            let rep = check_equivariance(&z, s, len, &*act);
            Ok(verdict(rep.holds, to_value(&rep)))
        }
        SelfsimCmd::CopyBuild { radius, x } => {
            let z = path_copied_layer(radius, &digits(&x, 2)?)?;
            Ok(Out::Json(to_value(&z.to_json())))
        }
        SelfsimCmd::CopyCheck { file, set, budget } => {
            let z = CopiedLayer::from_json(read_json(&file)?)?;
            let rep = validate_copied(&z, &*set_by_name(&set)?, budget.budget);
            Ok(verdict(rep.violations.is_empty(), to_value(&rep)))
        }
    }
}

fn mirror(cmd: MirrorCmd) -> CmdResult {
    match cmd {
        MirrorCmd::Gen {
            rank,
            radius,
            levels,
            pillar,
            seed,
        } => {
            let pillar: Option<Word> = if pillar == "none" {
                None
            } else {
                Some(pillar.parse()?)
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p =
                mirror_configuration(rank, pillar.as_ref(), radius, -levels..=levels, &mut rng)?;
            Ok(Out::Json(to_value(&p.to_json())))
        }
        MirrorCmd::Check { file } => {
            let p = MirrorPattern::from_json(read_json(&file)?)?;
            let v = validate_mirror(&p);
            Ok(verdict(
                v.is_empty(),
                json!({ "cells": p.len(), "violations": v }),
            ))
        }
        MirrorCmd::Forbid { rank, budget } => {
            let cs = enumerate_forbidden_codings(rank, budget)?;
            Ok(status("OK", json!({ "count": cs.len(), "codings": cs })))
        }
        MirrorCmd::Bound { n, alpha, m } => {
            Ok(status("OK", to_value(&counting_bound(n, alpha, m)?)))
        }
        MirrorCmd::Collide { alpha, n, m } => {
            let c = collision_search(alpha, n, m)?;
            Ok(status("OK", json!({ "collision": c })))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Tm(c) => tm(c),
        Cmd::Paradox(c) => paradox(c),
        Cmd::Tilespace(c) => tilespace(c),
        Cmd::Selfsim(c) => selfsim(c),
        Cmd::Mirror(c) => mirror(c),
    };
    let (out, code) = match res {
        Ok(Out::Bytes(b)) => {
            let mut so = std::io::stdout().lock();
            if so.write_all(&b).and_then(|_| so.flush()).is_err() {
                return ExitCode::from(2);
            }
            return ExitCode::SUCCESS;
        }
        Ok(Out::Json(v)) => {
            let code = match v.get("status").and_then(Value::as_str) {
                Some("VIOLATIONS" | "REJECTED") => 1,
                Some("ERROR") => 2,
                _ => 0,
            };
            (v, code)
        }
        Err(Fail(s, msg)) => {
            let code = if s == "REJECTED" { 1 } else { 2 };
            (json!({ "status": s, "message": msg }), code)
        }
    };
    // a closed pipe downstream is not our failure
    let _ = writeln!(
        std::io::stdout().lock(),
        "{}",
        serde_json::to_string(&out).expect("serialisable")
    );
    ExitCode::from(code)
}
