//! Batch front end: parse problem files, dispatch to the engines, render
//! exact results and traces.
//!
//! Exit codes: 0 success, 1 validation error, 2 mathematical precondition
//! failure (non-regular τ, improper system), 3 internal invariant violation.

use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wallcross::error::ErrorCategory;
use wallcross::rat::{int_vec_to_string, rat_to_string, rat_vec_to_string};
use wallcross::{
    check_proper, classify_level, enumerate_walls, moduli_data, parse_poly, parse_rat,
    vortex::vortex_invariant_with_evaluator, vortex::vortex_json, wall_crossing_difference,
    Error, Evaluator, Int, IntVec, LevelClass, MultiPoly, RatVec, ToricProblem, VortexProblem,
    WeightEntry, WeightSystem,
};

mod selftest;

#[derive(Parser)]
#[command(
    name = "wallcross",
    about = "Exact toric Euler classes and genus-zero vortex invariants by wall crossing",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct Common {
    /// Problem file (JSON)
    input: String,
    /// PRNG seed for path planning
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Retry budget for generic path planning
    #[arg(long, default_value_t = 64)]
    retries: usize,
    /// Write output to a file instead of stdout
    #[arg(long)]
    out: Option<String>,
    /// Evaluate sibling wall crossings in parallel (identical results)
    #[arg(long, default_value_t = false)]
    parallel: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Properness / regularity / super-regularity report
    Check(Common),
    /// List the walls of the weight system
    Walls(Common),
    /// Classify the level tau
    Classify(Common),
    /// Euler class of the class at tau
    Euler(Common),
    /// Wall-crossing difference at tau0 in direction eta
    Crossing(Common),
    /// Vortex invariant and moduli report
    Vortex(Common),
    /// Euler class with the crossing tree as JSON
    Trace(Common),
    /// Run the built-in invariant suites
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (
        Option<&Common>,
        Box<dyn FnOnce(&Common) -> Result<String, Error>>,
    ) = match &cli.command {
        Command::Check(c) => (Some(c), Box::new(cmd_check)),
        Command::Walls(c) => (Some(c), Box::new(cmd_walls)),
        Command::Classify(c) => (Some(c), Box::new(cmd_classify)),
        Command::Euler(c) => (Some(c), Box::new(cmd_euler)),
        Command::Crossing(c) => (Some(c), Box::new(cmd_crossing)),
        Command::Vortex(c) => (Some(c), Box::new(cmd_vortex)),
        Command::Trace(c) => (Some(c), Box::new(cmd_trace)),
        Command::Selftest { seed, out } => {
            let (report, ok) = selftest::run(*seed);
            return finish(out.as_deref(), report, if ok { None } else { Some(3) });
        }
    };
    let common = common.unwrap();
    match run(common) {
        Ok(text) => finish(common.out.as_deref(), text, None),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e.category() {
                ErrorCategory::Validation => 1,
                ErrorCategory::Precondition => 2,
                ErrorCategory::Internal => 3,
            };
            ExitCode::from(code)
        }
    }
}

fn finish(out: Option<&str>, text: String, fail: Option<u8>) -> ExitCode {
    let payload = if text.ends_with('\n') {
        text
    } else {
        text + "\n"
    };
    match out {
        Some(path) => {
            if let Err(e) = fs::write(path, &payload) {
                eprintln!("error: cannot write {path}: {e}");
                return ExitCode::from(1);
            }
        }
        None => print!("{payload}"),
    }
    match fail {
        Some(code) => ExitCode::from(code),
        None => ExitCode::SUCCESS,
    }
}

/// Parsed problem file.
struct Input {
    ws: WeightSystem,
    tau: Option<RatVec>,
    class: Option<MultiPoly>,
    kappa: Option<IntVec>,
    genus: usize,
    tau0: Option<RatVec>,
    eta: Option<RatVec>,
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

fn parse_usize(v: &Value, field: &str) -> Result<usize, Error> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| invalid(field, "expected a nonnegative integer"))
}

fn parse_int(v: &Value, field: &str) -> Result<Int, Error> {
    match v {
        Value::Number(n) if n.is_i64() => Ok(Int::from(n.as_i64().unwrap())),
        Value::String(s) => s
            .parse()
            .map_err(|_| invalid(field, format!("cannot parse {s:?} as an integer"))),
        _ => Err(invalid(field, "expected an integer")),
    }
}

fn parse_rat_value(v: &Value, field: &str) -> Result<wallcross::Rat, Error> {
    match v {
        Value::Number(n) if n.is_i64() => {
            Ok(wallcross::Rat::from_integer(Int::from(n.as_i64().unwrap())))
        }
        Value::String(s) => parse_rat(s).map_err(|_| {
            invalid(field, format!("cannot parse {s:?} as a rational \"p/q\""))
        }),
        _ => Err(invalid(field, "expected an integer or a \"p/q\" string")),
    }
}

fn parse_rat_vec(v: &Value, field: &str, k: usize) -> Result<RatVec, Error> {
    let arr = v
        .as_array()
        .ok_or_else(|| invalid(field, "expected an array"))?;
    if arr.len() != k {
        return Err(invalid(field, format!("expected {k} entries, got {}", arr.len())));
    }
    arr.iter()
        .enumerate()
        .map(|(i, x)| parse_rat_value(x, &format!("{field}[{i}]")))
        .collect()
}

fn parse_int_vec(v: &Value, field: &str, k: usize) -> Result<IntVec, Error> {
    let arr = v
        .as_array()
        .ok_or_else(|| invalid(field, "expected an array"))?;
    if arr.len() != k {
        return Err(invalid(field, format!("expected {k} entries, got {}", arr.len())));
    }
    arr.iter()
        .enumerate()
        .map(|(i, x)| parse_int(x, &format!("{field}[{i}]")))
        .collect()
}

fn parse_class(v: &Value, k: usize) -> Result<MultiPoly, Error> {
    match v {
        Value::String(s) => parse_poly(k, s),
        Value::Object(obj) => {
            let monos = obj
                .get("monomials")
                .and_then(Value::as_array)
                .ok_or_else(|| invalid("class.monomials", "expected an array"))?;
            let mut p = MultiPoly::zero(k);
            for (i, m) in monos.iter().enumerate() {
                let coeff = parse_rat_value(
                    m.get("coeff")
                        .ok_or_else(|| invalid(&format!("class.monomials[{i}].coeff"), "missing"))?,
                    &format!("class.monomials[{i}].coeff"),
                )?;
                let exp_val = m
                    .get("exp")
                    .and_then(Value::as_array)
                    .ok_or_else(|| invalid(&format!("class.monomials[{i}].exp"), "expected an array"))?;
                if exp_val.len() != k {
                    return Err(invalid(
                        &format!("class.monomials[{i}].exp"),
                        format!("expected {k} entries"),
                    ));
                }
                let exp: Vec<u32> = exp_val
                    .iter()
                    .map(|e| {
                        e.as_u64()
                            .and_then(|x| u32::try_from(x).ok())
                            .ok_or_else(|| {
                                invalid(
                                    &format!("class.monomials[{i}].exp"),
                                    "expected nonnegative integers",
                                )
                            })
                    })
                    .collect::<Result<_, _>>()?;
                p = p.add(&MultiPoly::monomial(k, exp, coeff));
            }
            Ok(p)
        }
        _ => Err(invalid("class", "expected a polynomial string or {\"monomials\": [...]}")),
    }
}

fn load_input(path: &str) -> Result<Input, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid("input", format!("cannot read {path}: {e}")))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| invalid("input", format!("invalid JSON: {e}")))?;
    let obj = v
        .as_object()
        .ok_or_else(|| invalid("input", "top level must be an object"))?;
    let k = parse_usize(
        obj.get("k").ok_or_else(|| invalid("k", "missing"))?,
        "k",
    )?;
    let weights_val = obj
        .get("weights")
        .and_then(Value::as_array)
        .ok_or_else(|| invalid("weights", "expected an array"))?;
    let mut entries = Vec::with_capacity(weights_val.len());
    for (i, w) in weights_val.iter().enumerate() {
        let wo = w
            .as_object()
            .ok_or_else(|| invalid(&format!("weights[{i}]"), "expected {\"w\": [...], \"mult\": n}"))?;
        let weight = parse_int_vec(
            wo.get("w")
                .ok_or_else(|| invalid(&format!("weights[{i}].w"), "missing"))?,
            &format!("weights[{i}].w"),
            k,
        )?;
        let mult = parse_usize(
            wo.get("mult")
                .ok_or_else(|| invalid(&format!("weights[{i}].mult"), "missing"))?,
            &format!("weights[{i}].mult"),
        )?;
        entries.push(WeightEntry { weight, mult });
    }
    let ws = WeightSystem::new(k, entries)?;
    let tau = obj
        .get("tau")
        .map(|t| parse_rat_vec(t, "tau", k))
        .transpose()?;
    let class = obj.get("class").map(|c| parse_class(c, k)).transpose()?;
    let kappa = obj
        .get("kappa")
        .map(|t| parse_int_vec(t, "kappa", k))
        .transpose()?;
    let genus = obj
        .get("genus")
        .map(|g| parse_usize(g, "genus"))
        .transpose()?
        .unwrap_or(0);
    let tau0 = obj
        .get("tau0")
        .map(|t| parse_rat_vec(t, "tau0", k))
        .transpose()?;
    let eta = obj
        .get("eta")
        .map(|t| parse_rat_vec(t, "eta", k))
        .transpose()?;
    Ok(Input {
        ws,
        tau,
        class,
        kappa,
        genus,
        tau0,
        eta,
    })
}

fn require<T>(x: Option<T>, field: &str) -> Result<T, Error> {
    x.ok_or_else(|| invalid(field, "missing"))
}

fn evaluator(c: &Common) -> Evaluator {
    Evaluator::new(c.seed)
        .with_retries(c.retries)
        .with_parallel(c.parallel)
}

fn cmd_check(c: &Common) -> Result<String, Error> {
    let input = load_input(&c.input)?;
    let ws = &input.ws;
    let cert = check_proper(ws);
    let classification = input
        .tau
        .as_ref()
        .map(|tau| classify_level(ws, tau))
        .transpose()?;
    if c.format == Format::Json {
        let v = json!({
            "k": ws.k(),
            "n": ws.total_multiplicity(),
            "proper": cert.is_some(),
            "certificate": cert.as_ref().map(|x| x.iter().map(rat_to_string).collect::<Vec<_>>()),
            "spans": ws.spans(),
            "classification": classification.as_ref().map(LevelClass::label),
            "walls": enumerate_walls(ws)?.len(),
        });
        return Ok(serde_json::to_string_pretty(&v).unwrap());
    }
    let mut lines = Vec::new();
    lines.push(format!("k = {}, n = {}", ws.k(), ws.total_multiplicity()));
    match &cert {
        Some(xi) => lines.push(format!("proper: yes, certificate {}", rat_vec_to_string(xi))),
        None => lines.push("proper: no".into()),
    }
    lines.push(format!("spans t*: {}", if ws.spans() { "yes" } else { "no (quotients empty)" }));
    lines.push(format!("walls: {}", enumerate_walls(ws)?.len()));
    if let Some(cl) = classification {
        lines.push(format!("tau: {}", cl.label()));
    }
    Ok(lines.join("\n"))
}

fn cmd_walls(c: &Common) -> Result<String, Error> {
    let input = load_input(&c.input)?;
    let walls = enumerate_walls(&input.ws)?;
    if c.format == Format::Json {
        let v: Vec<Value> = walls
            .iter()
            .map(|w| {
                json!({
                    "index_set": w.index_set.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "normal": w.normal.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        return Ok(serde_json::to_string_pretty(&json!({ "walls": v })).unwrap());
    }
    let mut lines = vec![format!("{} wall(s)", walls.len())];
    for w in &walls {
        let idx: Vec<String> = w.index_set.iter().map(|i| (i + 1).to_string()).collect();
        lines.push(format!(
            "I={{{}}} normal {}",
            idx.join(","),
            int_vec_to_string(&w.normal)
        ));
    }
    Ok(lines.join("\n"))
}

fn cmd_classify(c: &Common) -> Result<String, Error> {
    let input = load_input(&c.input)?;
    let tau = require(input.tau, "tau")?;
    let cl = classify_level(&input.ws, &tau)?;
    if c.format == Format::Json {
        return Ok(
            serde_json::to_string_pretty(&json!({ "classification": cl.label() })).unwrap(),
        );
    }
    Ok(cl.label())
}

fn cmd_euler(c: &Common) -> Result<String, Error> {
    let input = load_input(&c.input)?;
    let tau = require(input.tau, "tau")?;
    let class = require(input.class, "class")?;
    let problem = ToricProblem::new(input.ws, tau)?;
    let value = evaluator(c).euler_class(&problem, &class)?;
    if c.format == Format::Json {
        return Ok(
            serde_json::to_string_pretty(&json!({ "value": rat_to_string(&value) })).unwrap(),
        );
    }
    Ok(rat_to_string(&value))
}

fn cmd_crossing(c: &Common) -> Result<String, Error> {
    let input = load_input(&c.input)?;
    let tau0 = require(input.tau0, "tau0")?;
    let eta = require(input.eta, "eta")?;
    let class = require(input.class, "class")?;
    let walls = enumerate_walls(&input.ws)?;
    let mut containing = Vec::new();
    for w in &walls {
        if w.cone_contains(&input.ws, &tau0)? {
            containing.push(w.clone());
        }
    }
    if containing.len() != 1 {
        return Err(Error::WallCountAtPoint(containing.len()));
    }
    let wall = containing.remove(0);
    let value = wall_crossing_difference(&input.ws, &wall, &tau0, &eta, &class, c.seed)?;
    if c.format == Format::Json {
        return Ok(serde_json::to_string_pretty(&json!({
            "value": rat_to_string(&value),
            "wall_index_set": wall.index_set.iter().map(|i| i + 1).collect::<Vec<_>>(),
        }))
        .unwrap());
    }
    Ok(rat_to_string(&value))
}

fn cmd_vortex(c: &Common) -> Result<String, Error> {
    let input = load_input(&c.input)?;
    let tau = require(input.tau, "tau")?;
    let kappa = require(input.kappa, "kappa")?;
    let class = match input.class {
        Some(p) => p,
        None => MultiPoly::one(input.ws.k()),
    };
    let vp = VortexProblem::new(input.ws, tau, kappa, class, input.genus)?;
    if vp.genus >= 1 {
        let (report, _) = moduli_data(&vp)?;
        let v = vortex_json(None, &report);
        if c.format == Format::Json {
            return Ok(serde_json::to_string_pretty(&v).unwrap());
        }
        return Ok(format!(
            "genus {} moduli: fiber dim {}, Jacobian dim {}, degrees {:?}; no invariant emitted",
            report.genus,
            report.moduli_dim,
            report.jacobian_dim.unwrap(),
            report.degrees.iter().map(Int::to_string).collect::<Vec<_>>()
        ));
    }
    let (value, report) = vortex_invariant_with_evaluator(&vp, &evaluator(c))?;
    if c.format == Format::Json {
        return Ok(serde_json::to_string_pretty(&vortex_json(Some(&value), &report)).unwrap());
    }
    let mut lines = vec![rat_to_string(&value)];
    lines.push(format!(
        "degrees {:?}, n {:?}, m {:?}, moduli dim {}, index {}{}{}",
        report.degrees.iter().map(Int::to_string).collect::<Vec<_>>(),
        report.n_mult,
        report.m_mult,
        report.moduli_dim,
        report.index,
        if report.orbifold { ", orbifold" } else { "" },
        if report.empty_moduli { ", empty moduli" } else { "" },
    ));
    Ok(lines.join("\n"))
}

fn cmd_trace(c: &Common) -> Result<String, Error> {
    let input = load_input(&c.input)?;
    let tau = require(input.tau, "tau")?;
    let class = require(input.class, "class")?;
    let problem = ToricProblem::new(input.ws, tau)?;
    // Trace evaluation is sequential and unmemoized so the tree is
    // deterministic for a fixed (input, seed, version).
    let ev = Evaluator::new(c.seed).with_retries(c.retries);
    let (_, tree) = ev.euler_class_traced(&problem, &class)?;
    Ok(serde_json::to_string_pretty(&tree).unwrap())
}
