//! `cinfty` — command-line front end for the smooth-ring kernel.
//!
//! Definition commands (`ring`, `morphism`, `pushout`, `weil`) read a session
//! file with `--in`, add a named object, and emit the updated session; query
//! commands (`points`, `jet`, `hadamard`, `cotangent`, `seqcheck`) emit a
//! report.  Output goes to `--out` when given, standard output otherwise.
//!
//! Exit codes: 0 on success, 1 when a check produces a falsified or violated
//! verdict (a morphism that fails on its source relations, a non-exact
//! sequence, a Hadamard residual above tolerance), 2 on usage or definition
//! errors.  All floats are printed with 17 significant digits, so identical
//! invocations produce byte-identical output.

mod literal;
mod report;
mod session;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use cinfty::cotangent::{cotangent_module, pushout_cotangent_sequence, sequence_check_pointwise};
use cinfty::ring::{pushout, Falsification, RingError};
use cinfty::spectrum::point_search;
use cinfty::weil::apply;
use cinfty::{RingMorphism, RingPresentation, SmoothExpr, WeilElement};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use session::{Session, SCHEMA};

/// A fatal usage or definition error; printed to standard error, exit code 2.
#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Parser)]
#[command(
    name = "cinfty",
    version,
    about = "Computer algebra for finitely presented smooth rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Define a finitely presented ring and print the updated session
    Ring(RingArgs),
    /// Define a ring morphism, verifying that relations map into the target ideal
    Morphism(MorphismArgs),
    /// Glue two morphisms with a common source into a pushout ring
    Pushout(PushoutArgs),
    /// Search a box for real points of a ring
    Points(PointsArgs),
    /// Evaluate a smooth function on Weil algebra elements
    Jet(JetArgs),
    /// Decompose f into Hadamard difference quotients and verify numerically
    Hadamard(HadamardArgs),
    /// Print the cotangent module of a ring
    Cotangent(CotangentArgs),
    /// Check pointwise exactness of a pushout's cotangent sequence
    Seqcheck(SeqcheckArgs),
    /// Define a Weil algebra
    Weil(WeilArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Session file to read before executing
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Write output here instead of standard output
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RingArgs {
    /// Name for the new ring
    name: String,
    /// Number of generators
    #[arg(long, value_name = "N")]
    gens: usize,
    /// Relation expression in x1..xN (repeatable)
    #[arg(long = "relation", value_name = "EXPR", allow_hyphen_values = true)]
    relations: Vec<String>,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct MorphismArgs {
    /// Name for the new morphism
    name: String,
    /// Source ring
    #[arg(long, value_name = "RING")]
    source: String,
    /// Target ring
    #[arg(long, value_name = "RING")]
    target: String,
    /// Image of the next source generator, in target variables (repeatable)
    #[arg(long = "image", value_name = "EXPR", allow_hyphen_values = true)]
    images: Vec<String>,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct PushoutArgs {
    /// Name for the pushout ring; injections are filed as NAME.left, NAME.right
    name: String,
    /// Morphism out of the shared source, target becomes the first block
    #[arg(long, value_name = "MORPHISM")]
    left: String,
    /// Morphism out of the shared source, target becomes the second block
    #[arg(long, value_name = "MORPHISM")]
    right: String,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct PointsArgs {
    /// Ring to search
    ring: String,
    /// Search box, one LO:HI per generator (a single pair is replicated)
    #[arg(
        long = "box",
        value_name = "LO:HI[,LO:HI...]",
        allow_hyphen_values = true,
        default_value = "-4:4"
    )]
    box_spec: String,
    /// Seeds per axis
    #[arg(long, value_name = "N", default_value_t = 9)]
    grid: usize,
    /// Residual tolerance for accepting a point
    #[arg(long, value_name = "REAL", default_value_t = 1e-9)]
    tol: f64,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct JetArgs {
    /// Weil algebra (session-defined, or builtin dual/jet2/jet3)
    #[arg(long, value_name = "ALGEBRA")]
    algebra: String,
    /// Smooth function in x1..xK where K is the number of --arg flags
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    f: String,
    /// Algebra element literal such as "1+1e" (repeatable, one per argument)
    #[arg(long = "arg", value_name = "ELEMENT", allow_hyphen_values = true)]
    args: Vec<String>,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct HadamardArgs {
    /// Smooth function to decompose
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    f: String,
    /// Number of variables (default: highest x-index appearing in f)
    #[arg(long, value_name = "N")]
    arity: Option<usize>,
    /// Sampling box for the verification, one LO:HI per variable
    #[arg(
        long = "box",
        value_name = "LO:HI[,LO:HI...]",
        allow_hyphen_values = true,
        default_value = "-2:2"
    )]
    box_spec: String,
    /// Number of sample pairs
    #[arg(long, value_name = "N", default_value_t = 20)]
    samples: usize,
    /// Random seed for sampling
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
    /// Relative tolerance for the identity check
    #[arg(long, value_name = "REAL", default_value_t = 1e-9)]
    tol: f64,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct CotangentArgs {
    /// Ring whose cotangent module to print
    ring: String,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct SeqcheckArgs {
    /// Morphism out of the shared source (first pushout leg)
    #[arg(long, value_name = "MORPHISM")]
    left: String,
    /// Morphism out of the shared source (second pushout leg)
    #[arg(long, value_name = "MORPHISM")]
    right: String,
    /// Point search box over the pushout ring
    #[arg(
        long = "box",
        value_name = "LO:HI[,LO:HI...]",
        allow_hyphen_values = true,
        default_value = "-2:2"
    )]
    box_spec: String,
    /// Seeds per axis for the point search
    #[arg(long, value_name = "N", default_value_t = 9)]
    grid: usize,
    /// Tolerance for the exactness checks
    #[arg(long, value_name = "REAL", default_value_t = 1e-9)]
    tol: f64,
    /// Negate one block of the first map (deliberate corruption, for testing)
    #[arg(long = "mutate-sign")]
    mutate_sign: bool,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct WeilArgs {
    /// Name for the new algebra
    name: String,
    /// Number of generators
    #[arg(long, value_name = "M")]
    gens: usize,
    /// Truncation order: monomials of this total degree and above vanish
    #[arg(long, value_name = "K")]
    order: u32,
    /// Extra polynomial relation in the maximal ideal (repeatable)
    #[arg(long = "relation", value_name = "EXPR", allow_hyphen_values = true)]
    relations: Vec<String>,
    #[command(flatten)]
    io: IoArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    let (value, out, code) = match command {
        Command::Ring(a) => cmd_ring(a)?,
        Command::Morphism(a) => cmd_morphism(a)?,
        Command::Pushout(a) => cmd_pushout(a)?,
        Command::Points(a) => cmd_points(a)?,
        Command::Jet(a) => cmd_jet(a)?,
        Command::Hadamard(a) => cmd_hadamard(a)?,
        Command::Cotangent(a) => cmd_cotangent(a)?,
        Command::Seqcheck(a) => cmd_seqcheck(a)?,
        Command::Weil(a) => cmd_weil(a)?,
    };
    let rendered = report::render(&value);
    match out {
        Some(path) => std::fs::write(&path, rendered)
            .map_err(|e| CliError(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{rendered}"),
    }
    Ok(ExitCode::from(code))
}

type Outcome = (Value, Option<PathBuf>, u8);

fn cmd_ring(a: RingArgs) -> Result<Outcome, CliError> {
    let mut session = Session::load_or_empty(a.io.input.as_deref())?;
    let relations = parse_exprs(&a.relations, a.gens, "relation")?;
    let ring = RingPresentation::new(a.name.clone(), a.gens, relations)
        .map_err(|e| CliError(format!("ring `{}`: {e}", a.name)))?;
    session.insert_ring(&a.name, ring)?;
    Ok((session.to_value(), a.io.out, 0))
}

fn cmd_morphism(a: MorphismArgs) -> Result<Outcome, CliError> {
    let mut session = Session::load_or_empty(a.io.input.as_deref())?;
    let source = session.ring(&a.source)?.clone();
    let target = session.ring(&a.target)?.clone();
    let images = parse_exprs(&a.images, target.num_gens(), "image")?;
    match RingMorphism::new(&source, &target, images) {
        Ok(morphism) => {
            session.insert_morphism(&a.name, morphism)?;
            Ok((session.to_value(), a.io.out, 0))
        }
        Err(RingError::NotAMorphism {
            relation,
            falsification,
        }) => {
            let value = json!({
                "schema": SCHEMA,
                "error": "not_a_morphism",
                "morphism": a.name,
                "relation": relation,
                "falsification": falsification_json(&falsification),
            });
            Ok((value, a.io.out, 1))
        }
        Err(e) => Err(CliError(format!("morphism `{}`: {e}", a.name))),
    }
}

fn cmd_pushout(a: PushoutArgs) -> Result<Outcome, CliError> {
    let mut session = Session::load_or_empty(a.io.input.as_deref())?;
    let alpha = session.morphism(&a.left)?.clone();
    let beta = session.morphism(&a.right)?.clone();
    let data = pushout(&alpha, &beta)
        .map_err(|e| CliError(format!("pushout of `{}`, `{}`: {e}", a.left, a.right)))?;

    // Rebuild the glued ring under the session name and re-anchor the
    // injections on it, so the stored morphisms reference the stored ring.
    let renamed = data.ring.with_label(&a.name);
    let rebuild = |inj: &RingMorphism, what: &str| -> Result<RingMorphism, CliError> {
        let reps: Vec<SmoothExpr> = inj.images().iter().map(|i| i.rep().clone()).collect();
        RingMorphism::new(inj.source(), &renamed, reps)
            .map_err(|e| CliError(format!("pushout injection {what}: {e}")))
    };
    let left = rebuild(&data.left, "left")?;
    let right = rebuild(&data.right, "right")?;

    session.insert_ring(&a.name, renamed)?;
    session.insert_morphism(&format!("{}.left", a.name), left)?;
    session.insert_morphism(&format!("{}.right", a.name), right)?;
    Ok((session.to_value(), a.io.out, 0))
}

fn cmd_points(a: PointsArgs) -> Result<Outcome, CliError> {
    let session = Session::load_or_empty(a.io.input.as_deref())?;
    let ring = session.ring(&a.ring)?;
    let bounds = parse_box(&a.box_spec, ring.num_gens())?;
    let points = point_search(ring, &bounds, a.grid, a.tol)
        .map_err(|e| CliError(format!("point search: {e}")))?;
    let value = json!({
        "schema": SCHEMA,
        "command": "points",
        "ring": ring.json_value(),
        "box": box_json(&bounds),
        "grid": a.grid,
        "tol": a.tol,
        "points": points.iter().map(|p| p.json_value()).collect::<Vec<_>>(),
    });
    Ok((value, a.io.out, 0))
}

fn cmd_jet(a: JetArgs) -> Result<Outcome, CliError> {
    let session = Session::load_or_empty(a.io.input.as_deref())?;
    let algebra = session.weil(&a.algebra)?;
    let f = SmoothExpr::parse(&a.f, a.args.len())
        .map_err(|e| CliError(format!("function `{}`: {e}", a.f)))?;
    let args: Vec<WeilElement<f64>> = a
        .args
        .iter()
        .map(|t| {
            literal::parse_weil_literal(t, &algebra)
                .map_err(|e| CliError(format!("argument `{t}`: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let result = apply(&algebra, &f, &args).map_err(|e| CliError(format!("evaluation: {e}")))?;
    let mut algebra_json = algebra.json_value();
    algebra_json["name"] = json!(a.algebra);
    let value = json!({
        "schema": SCHEMA,
        "command": "jet",
        "algebra": algebra_json,
        "f": f.to_string(),
        "args": args.iter().map(|w| w.json_value()).collect::<Vec<_>>(),
        "result": result.json_value(),
    });
    Ok((value, a.io.out, 0))
}

fn cmd_hadamard(a: HadamardArgs) -> Result<Outcome, CliError> {
    let arity = a.arity.unwrap_or_else(|| infer_arity(&a.f));
    let f = SmoothExpr::parse(&a.f, arity)
        .map_err(|e| CliError(format!("function `{}`: {e}", a.f)))?;
    let parts = f.hadamard_decompose();
    let bounds = parse_box(&a.box_spec, arity)?;

    // Spot-check f(y) - f(x) = sum_i (y_i - x_i) g_i(x, y) on random pairs.
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut max_residual = 0.0f64;
    for sample in 0..a.samples {
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..=hi)).collect()
        };
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let eval = |expr: &SmoothExpr, point: &[f64]| -> Result<f64, CliError> {
            expr.evaluate(point)
                .map_err(|e| CliError(format!("sample {sample}: evaluation failed: {e}")))
        };
        let fx = eval(&f, &x)?;
        let fy = eval(&f, &y)?;
        let joint: Vec<f64> = x.iter().chain(y.iter()).copied().collect();
        let mut total = fy - fx;
        for (i, g) in parts.iter().enumerate() {
            total -= (y[i] - x[i]) * eval(g, &joint)?;
        }
        let relative = total.abs() / (1.0 + fx.abs() + fy.abs());
        max_residual = max_residual.max(relative);
    }
    let ok = max_residual <= a.tol;

    let value = json!({
        "schema": SCHEMA,
        "command": "hadamard",
        "f": f.to_string(),
        "arity": arity,
        "parts": parts.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "box": box_json(&bounds),
        "samples": a.samples,
        "seed": a.seed,
        "tol": a.tol,
        "max_residual": max_residual,
        "ok": ok,
    });
    Ok((value, a.io.out, if ok { 0 } else { 1 }))
}

fn cmd_cotangent(a: CotangentArgs) -> Result<Outcome, CliError> {
    let session = Session::load_or_empty(a.io.input.as_deref())?;
    let ring = session.ring(&a.ring)?;
    let module = cotangent_module(ring);
    let value = json!({
        "schema": SCHEMA,
        "command": "cotangent",
        "ring": ring.label(),
        "gens": (1..=module.num_gens()).map(|i| format!("dx{i}")).collect::<Vec<_>>(),
        "rows": module
            .rows()
            .iter()
            .map(|row| row.iter().map(|e| e.rep().to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    });
    Ok((value, a.io.out, 0))
}

fn cmd_seqcheck(a: SeqcheckArgs) -> Result<Outcome, CliError> {
    let session = Session::load_or_empty(a.io.input.as_deref())?;
    let alpha = session.morphism(&a.left)?.clone();
    let beta = session.morphism(&a.right)?.clone();
    let data = pushout(&alpha, &beta)
        .map_err(|e| CliError(format!("pushout of `{}`, `{}`: {e}", a.left, a.right)))?;
    let mut seq = pushout_cotangent_sequence(&alpha, &beta, &data)
        .map_err(|e| CliError(format!("cotangent sequence: {e}")))?;
    if a.mutate_sign {
        seq = seq.corrupt_map1_sign();
    }
    let bounds = parse_box(&a.box_spec, data.ring.num_gens())?;
    let points = point_search(
        &data.ring,
        &bounds,
        a.grid,
        cinfty::spectrum::DEFAULT_POINT_TOL,
    )
    .map_err(|e| CliError(format!("point search: {e}")))?;
    let report = sequence_check_pointwise(&seq, &points, a.tol)
        .map_err(|e| CliError(format!("sequence check: {e}")))?;
    let code = u8::from(!report.all_exact());
    let value = json!({
        "schema": SCHEMA,
        "command": "seqcheck",
        "left": a.left,
        "right": a.right,
        "ring": data.ring.json_value(),
        "mutated": a.mutate_sign,
        "box": box_json(&bounds),
        "grid": a.grid,
        "report": report.json_value(),
    });
    Ok((value, a.io.out, code))
}

fn cmd_weil(a: WeilArgs) -> Result<Outcome, CliError> {
    let mut session = Session::load_or_empty(a.io.input.as_deref())?;
    let exprs = parse_exprs(&a.relations, a.gens, "relation")?;
    let relations = exprs
        .iter()
        .zip(&a.relations)
        .map(|(e, t)| {
            e.poly_normal_form().ok_or_else(|| {
                CliError(format!("relation `{t}`: Weil relations must be polynomial"))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let algebra = cinfty::WeilAlgebra::new(a.gens, a.order, &relations)
        .map_err(|e| CliError(format!("weil `{}`: {e}", a.name)))?;
    session.insert_weil(&a.name, algebra)?;
    Ok((session.to_value(), a.io.out, 0))
}

// ---------------------------------------------------------------------------
// shared parsing helpers
// ---------------------------------------------------------------------------

pub(crate) fn parse_exprs(
    texts: &[String],
    arity: usize,
    what: &str,
) -> Result<Vec<SmoothExpr>, CliError> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| {
            SmoothExpr::parse(t, arity).map_err(|e| CliError(format!("{what} {i} `{t}`: {e}")))
        })
        .collect()
}

/// Parses `LO:HI[,LO:HI...]`; a single segment is replicated across all `n`
/// coordinates.
fn parse_box(text: &str, n: usize) -> Result<Vec<(f64, f64)>, CliError> {
    if n == 0 {
        return Ok(vec![]);
    }
    let pairs = text
        .split(',')
        .map(|seg| {
            let (lo, hi) = seg
                .split_once(':')
                .ok_or_else(|| CliError(format!("box segment `{seg}` must be LO:HI")))?;
            let lo: f64 = lo
                .trim()
                .parse()
                .map_err(|_| CliError(format!("bad box bound `{lo}`")))?;
            let hi: f64 = hi
                .trim()
                .parse()
                .map_err(|_| CliError(format!("bad box bound `{hi}`")))?;
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(CliError(format!("box segment `{seg}` is empty or infinite")));
            }
            Ok((lo, hi))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if pairs.len() == n {
        Ok(pairs)
    } else if pairs.len() == 1 {
        Ok(vec![pairs[0]; n])
    } else {
        Err(CliError(format!(
            "box has {} segments but the ring has {n} generators",
            pairs.len()
        )))
    }
}

fn box_json(bounds: &[(f64, f64)]) -> Value {
    json!(bounds.iter().map(|&(lo, hi)| json!([lo, hi])).collect::<Vec<_>>())
}

/// Highest `xK` index appearing in `text`, used to infer arity for `hadamard`.
fn infer_arity(text: &str) -> usize {
    let bytes = text.as_bytes();
    let mut max = 0usize;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'x' && (i == 0 || !bytes[i - 1].is_ascii_alphanumeric()) {
            let mut j = i + 1;
            let mut value = 0usize;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                value = value.saturating_mul(10).saturating_add((bytes[j] - b'0') as usize);
                j += 1;
            }
            if j > i + 1 {
                max = max.max(value);
            }
            i = j;
        } else {
            i += 1;
        }
    }
    max
}

fn falsification_json(f: &Falsification) -> Value {
    match f {
        Falsification::AtPoint { point, difference } => {
            json!({ "kind": "at_point", "point": point, "difference": difference })
        }
        Falsification::InWeilModel { center } => {
            json!({ "kind": "in_weil_model", "center": center })
        }
    }
}
