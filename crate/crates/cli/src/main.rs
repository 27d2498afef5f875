//! `mdse`: command-line front end for the multigraded Dyson–Schwinger engine.
//!
//! Exit codes: 0 success, 1 negative mathematical verdict, 2 input error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mdse_core::coloured::{emit_coloured_sdse, from_endofunctions, is_hopf_graph, ColouredGraph};
use mdse_core::deg1::{classify, emit_sdse, reduce, Deg1Coeffs, FundamentalParams};
use mdse_core::diffeo::{group_lambda, group_lambda_closed_form, DiffeoElement};
use mdse_core::feynman::{
    emit_graph_sdse, emit_lifted_sdse, graduation_q, graph_stats, matrix_from_json, matrix_json, rank_shadow_spec,
    rank_witness, GraphData, PrimitiveInventory, Theory,
};
use mdse_core::hopf_check::{check_hopf, HopfStatus};
use mdse_core::linalg::Matrix;
use mdse_core::rational::{fmt_q, parse_q, Q};
use mdse_core::sdse::{normalize, solve, solve_by_degree, SdseSpec};
use mdse_core::series::MultiSeries;
use mdse_core::Error;

mod selftest;

#[derive(Parser)]
#[command(name = "mdse", version, about = "Exact multigraded Dyson–Schwinger systems and their Hopf algebras")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Solve, normalize and check systems given as spec files.
    #[command(subcommand)]
    Sdse(SdseCmd),
    /// deg1 pre-Lie algebras: conditions, classification, emission, reduction.
    #[command(subcommand)]
    Deg1(Deg1Cmd),
    /// Groups of formal diffeomorphisms.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Feynman-graph theories: matrices, graduations, lifted systems.
    #[command(subcommand)]
    Theory(TheoryCmd),
    /// Coloured oriented graphs.
    #[command(subcommand)]
    Coloured(ColouredCmd),
    /// Run the invariant suite at reduced bounds.
    Selftest,
}

#[derive(Subcommand)]
enum SdseCmd {
    /// Truncated solution up to the bound.
    Solve {
        /// Spec file, or `-` for stdin.
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
        /// Solve degree by degree instead of by fixed-point iteration.
        #[arg(long)]
        by_degree: bool,
    },
    /// Decide the Hopf property up to the bound.
    CheckHopf {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
    },
    /// Drop vanishing equations and rescale to f_d(0) = 1.
    Normalize {
        #[arg(long)]
        spec: String,
    },
}

#[derive(Subcommand)]
enum Deg1Cmd {
    /// Check the pre-Lie conditions of coefficients or fundamental parameters.
    Verify {
        #[arg(long)]
        params: String,
    },
    /// Decompose coefficients into fundamental algebras.
    Classify {
        #[arg(long)]
        params: String,
    },
    /// The Hopf system of fundamental parameters.
    Emit {
        #[arg(long)]
        params: String,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
    },
    /// The reduced algebra Lie-isomorphic to fundamental parameters.
    Reduce {
        #[arg(long)]
        params: String,
    },
}

#[derive(Subcommand)]
enum GroupCmd {
    /// F∙G for the elements F and G of an input file.
    Compose {
        #[arg(long)]
        input: String,
    },
    /// The inverse of the element F of an input file.
    Invert {
        #[arg(long)]
        input: String,
    },
    /// λ^{(i,j)}(α,β) by coefficient extraction, with the closed form.
    Lambda {
        #[arg(long)]
        p: usize,
        /// ℬ as JSON rows or `r1c1,r1c2;r2c1,...`; empty for q = 0.
        #[arg(long, default_value = "")]
        b: String,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        /// Comma-separated exponents over x_1..x_p, y_1..y_q.
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
}

#[derive(Args)]
struct TheorySource {
    /// `qed`, `qcd` or `phi:n`.
    #[arg(long, conflicts_with = "theory")]
    builtin: Option<String>,
    /// Theory file, or `-` for stdin.
    #[arg(long)]
    theory: Option<String>,
}

#[derive(Subcommand)]
enum TheoryCmd {
    /// Incidence matrices A and A′ and the loop graduation.
    Matrices {
        #[command(flatten)]
        src: TheorySource,
    },
    /// Edge, external-leg and loop counts of graph data, and its degree.
    Stats {
        #[command(flatten)]
        src: TheorySource,
        /// V_G, comma-separated.
        #[arg(long)]
        v: String,
        /// S_G over vertex types then edges, comma-separated.
        #[arg(long)]
        s: String,
        /// Graduation matrix; defaults to the loop graduation.
        #[arg(long)]
        graduation: Option<String>,
    },
    /// Tree-level system of a primitive inventory.
    Emit {
        #[command(flatten)]
        src: TheorySource,
        #[arg(long)]
        inventory: String,
        #[arg(long)]
        graduation: Option<String>,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
        /// Require rank |vertex types| and also print the deg1 coefficients.
        #[arg(long)]
        lifted: bool,
    },
    /// Search w ≠ w′ with Cw = Cw′ among combinations of generator vectors.
    RankWitness {
        #[arg(long)]
        graduation: String,
        /// Generator vectors as JSON rows; defaults to the QCD generators.
        #[arg(long)]
        generators: Option<String>,
        #[arg(long, default_value_t = 10)]
        cap: i64,
        /// Also solve and check the small two-decoration system it induces (QCD).
        #[arg(long)]
        shadow: bool,
    },
}

#[derive(Subcommand)]
enum ColouredCmd {
    /// The Hopf condition on weighted reachability.
    Check {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
    },
    /// The system of a Hopf graph.
    Emit {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
        /// Emit even when the Hopf condition fails.
        #[arg(long)]
        force: bool,
    },
    /// Functional graph of endofunctions and their commutation.
    Endo {
        /// JSON list of maps, each a list of images of 0..n-1.
        #[arg(long)]
        maps: String,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
    },
}

/// A finished report: human text, JSON, and whether the verdict is negative.
pub struct Report {
    pub text: String,
    pub json: Value,
    pub negative: bool,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, negative: false }
    }
}

type CliResult = Result<Report, String>;

fn located(what: &str, e: Error) -> String {
    format!("{what}: {e}")
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| format!("stdin: {e}"))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

fn read_json(path: &str) -> Result<Value, String> {
    let s = read_input(path)?;
    serde_json::from_str(&s).map_err(|e| format!("{path}: malformed JSON at line {}, column {}: {e}", e.line(), e.column()))
}

/// JSON rows, or rows separated by `;` with entries separated by `,`.
fn parse_matrix(s: &str) -> Result<Matrix, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(vec![]);
    }
    if s.starts_with('[') {
        let v: Value = serde_json::from_str(s).map_err(|e| format!("matrix: {e}"))?;
        return matrix_from_json(&v).map_err(|e| located("matrix", e));
    }
    let m: Matrix = s
        .split(';')
        .map(|row| row.split(',').map(|x| parse_q(x.trim())).collect::<mdse_core::Result<Vec<Q>>>())
        .collect::<mdse_core::Result<_>>()
        .map_err(|e| located("matrix", e))?;
    if m.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err("matrix: ragged rows".into());
    }
    Ok(m)
}

fn parse_counts(s: &str, what: &str) -> Result<Vec<u32>, String> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',').map(|x| x.trim().parse::<u32>().map_err(|e| format!("{what}: `{x}`: {e}"))).collect()
}

fn matrix_text(m: &Matrix) -> String {
    let rows: Vec<String> = m.iter().map(|r| r.iter().map(fmt_q).collect::<Vec<_>>().join(", ")).collect();
    format!("({})", rows.join("; "))
}

fn load_spec(path: &str, bound: Option<u32>) -> Result<SdseSpec, String> {
    SdseSpec::from_json(&read_json(path)?, bound).map_err(|e| located(path, e))
}

fn sdse(cmd: SdseCmd) -> CliResult {
    match cmd {
        SdseCmd::Solve { spec, bound, by_degree } => {
            let s = load_spec(&spec, Some(bound))?;
            let sol = if by_degree { solve_by_degree(&s, bound) } else { solve(&s, bound) }.map_err(|e| located(&spec, e))?;
            let mut text = String::new();
            for (i, a, x) in sol.generators() {
                text.push_str(&format!("X{i}({a}) = {x}\n"));
            }
            for w in sol.warnings() {
                text.push_str(&format!("warning: {w}\n"));
            }
            Ok(Report::ok(text, sol.to_json()))
        }
        SdseCmd::CheckHopf { spec, bound } => {
            let s = load_spec(&spec, Some(bound))?;
            let sol = solve(&s, bound).map_err(|e| located(&spec, e))?;
            let v = check_hopf(&sol, bound).map_err(|e| located(&spec, e))?;
            let mut text = format!("verdict: {}\n", v.status_label());
            if let Some(w) = &v.witness {
                text.push_str(&format!(
                    "witness: block {} degree {} splits as {} ⊗ {}\nresidual: {}\n",
                    w.block,
                    w.degree,
                    w.left_degree,
                    w.right_degree,
                    w.residual
                ));
            }
            if let Some((d, mons)) = &v.dependent {
                text.push_str(&format!("dependent monomials in degree {d}: {}\n", mons.join(", ")));
            }
            if let Some(l) = &v.lambda {
                text.push_str(&format!("λ table: {} entries\n", l.len()));
                for ((i, j, a, b), c) in l.iter() {
                    text.push_str(&format!("  λ[{i},{j}]({a}, {b}) = {}\n", fmt_q(c)));
                }
            }
            Ok(Report { text, json: v.to_json(), negative: v.status != HopfStatus::HopfUpTo })
        }
        SdseCmd::Normalize { spec } => {
            let s = load_spec(&spec, None)?;
            let (out, report) = normalize(&s).map_err(|e| located(&spec, e))?;
            let scaling: serde_json::Map<String, Value> =
                report.scaling.iter().map(|(k, v)| (k.clone(), Value::String(fmt_q(v)))).collect();
            let text = format!(
                "removed: {:?}\nflagged: {:?}\nscaling: {}\n{}\n",
                report.removed,
                report.flagged,
                report.scaling.iter().map(|(k, v)| format!("{k}={}", fmt_q(v))).collect::<Vec<_>>().join(" "),
                serde_json::to_string_pretty(&out.to_json()).unwrap()
            );
            let json = json!({"schema": 1, "spec": out.to_json(), "removed": report.removed, "flagged": report.flagged, "scaling": scaling});
            Ok(Report::ok(text, json))
        }
    }
}

/// Coefficients, accepting fundamental parameters (detected by `I0`).
fn load_coeffs(path: &str) -> Result<(Deg1Coeffs, Option<FundamentalParams>), String> {
    let v = read_json(path)?;
    if v.get("I0").is_some() || v.get("classes").is_some() {
        let p = FundamentalParams::from_json(&v).map_err(|e| located(path, e))?;
        Ok((p.to_coeffs(), Some(p)))
    } else {
        Ok((Deg1Coeffs::from_json(&v).map_err(|e| located(path, e))?, None))
    }
}

fn condition_text(c: u8) -> &'static str {
    match c {
        1 => "A^ij = 0 and b^ij = 0, or A^jk = A^ik",
        2 => "A^ij b^jk = A^ik b^kj",
        _ => "b^ij b^jk = b^ik b^kj",
    }
}

fn load_params(path: &str) -> Result<FundamentalParams, String> {
    FundamentalParams::from_json(&read_json(path)?).map_err(|e| located(path, e))
}

fn deg1(cmd: Deg1Cmd) -> CliResult {
    match cmd {
        Deg1Cmd::Verify { params } => {
            let (c, _) = load_coeffs(&params)?;
            let bad = c.check_conditions();
            let list: Vec<Value> = bad.iter().map(|v| json!({"condition": v.condition, "triple": [v.triple.0, v.triple.1, v.triple.2]})).collect();
            let text = match bad.first() {
                None => "pre-Lie: all conditions hold\n".to_string(),
                Some(v) => format!(
                    "not pre-Lie: condition C{} ({}) fails at (i, j, k) = ({}, {}, {}); {} violations\n",
                    v.condition,
                    condition_text(v.condition),
                    v.triple.0,
                    v.triple.1,
                    v.triple.2,
                    bad.len()
                ),
            };
            Ok(Report { text, json: json!({"schema": 1, "prelie": bad.is_empty(), "violations": list}), negative: !bad.is_empty() })
        }
        Deg1Cmd::Classify { params } => {
            let (c, _) = load_coeffs(&params)?;
            match classify(&c) {
                Ok(cl) => {
                    let mut text = format!("scalars: {}\n", cl.scalars.iter().map(fmt_q).collect::<Vec<_>>().join(", "));
                    for comp in &cl.components {
                        text.push_str(&format!("class {:?}: {}\n", comp.members, comp.params.to_json()));
                    }
                    Ok(Report::ok(text, cl.to_json()))
                }
                Err(Error::Conditions(t)) => Ok(Report {
                    text: format!("not pre-Lie: conditions fail at (i, j, k) = {t:?}\n"),
                    json: json!({"schema": 1, "prelie": false, "triple": [t.0, t.1, t.2]}),
                    negative: true,
                }),
                Err(e) => Err(located(&params, e)),
            }
        }
        Deg1Cmd::Emit { params, bound } => {
            let p = load_params(&params)?;
            let spec = emit_sdse(&p, bound).map_err(|e| located(&params, e))?;
            let j = spec.to_json();
            Ok(Report::ok(serde_json::to_string_pretty(&j).unwrap() + "\n", j))
        }
        Deg1Cmd::Reduce { params } => {
            let p = load_params(&params)?;
            let r = reduce(&p).map_err(|e| located(&params, e))?;
            let json = json!({
                "schema": 1,
                "rank": r.rank,
                "params": r.params.to_json(),
                "basis": matrix_json(&r.basis),
                "coords": r.coords,
                "P": matrix_json(&r.p),
            });
            let text = format!(
                "rank: {}\nreduced: {}\nbasis: {}\ncoords: {:?}\nP: {}\n",
                r.rank,
                r.params.to_json(),
                matrix_text(&r.basis),
                r.coords,
                matrix_text(&r.p)
            );
            Ok(Report::ok(text, json))
        }
    }
}

/// Group input: {schema, p, B, order, F: [series], G?: [series]} with
/// variables x1..xp for x and x(p+1).. for y.
fn load_group(path: &str) -> Result<(DiffeoElement, Option<DiffeoElement>), String> {
    let v = read_json(path)?;
    let p = v.get("p").and_then(Value::as_u64).ok_or_else(|| format!("{path}: missing `p`"))? as usize;
    let b = match v.get("B") {
        Some(m) => matrix_from_json(m).map_err(|e| located(path, e))?,
        None => vec![],
    };
    let order = v.get("order").and_then(Value::as_u64).ok_or_else(|| format!("{path}: missing `order`"))? as u32;
    let element = |key: &str| -> Result<Option<DiffeoElement>, String> {
        let Some(list) = v.get(key) else { return Ok(None) };
        let comps = list
            .as_array()
            .ok_or_else(|| format!("{path}: `{key}` must be a list of series"))?
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let src = s.as_str().ok_or_else(|| format!("{path}: `{key}[{i}]` must be a string"))?;
                MultiSeries::parse(src, p + b.len(), order).map_err(|e| located(&format!("{path}: {key}[{i}]"), e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        DiffeoElement::new(p, b.clone(), comps).map(Some).map_err(|e| located(&format!("{path}: {key}"), e))
    };
    let f = element("F")?.ok_or_else(|| format!("{path}: missing `F`"))?;
    Ok((f, element("G")?))
}

fn element_report(e: &DiffeoElement) -> Report {
    let comps: Vec<String> = e.components().iter().map(|c| c.to_string()).collect();
    let text = comps.iter().enumerate().map(|(i, c)| format!("F{} = {c}\n", i + 1)).collect();
    Report::ok(text, json!({"schema": 1, "p": e.p(), "order": e.order(), "B": matrix_json(e.b()), "F": comps}))
}

fn group(cmd: GroupCmd) -> CliResult {
    match cmd {
        GroupCmd::Compose { input } => {
            let (f, g) = load_group(&input)?;
            let g = g.ok_or_else(|| format!("{input}: missing `G`"))?;
            Ok(element_report(&f.compose(&g).map_err(|e| located(&input, e))?))
        }
        GroupCmd::Invert { input } => {
            let (f, _) = load_group(&input)?;
            Ok(element_report(&f.invert()))
        }
        GroupCmd::Lambda { p, b, i, j, alpha, beta } => {
            let b = parse_matrix(&b)?;
            let alpha = parse_counts(&alpha, "alpha")?;
            let beta = parse_counts(&beta, "beta")?;
            let got = group_lambda(&b, p, i, j, &alpha, &beta).map_err(|e| located("lambda", e))?;
            let closed = group_lambda_closed_form(&b, p, i, j, &alpha);
            let text = format!("λ = {}\nclosed form = {}\n", fmt_q(&got), fmt_q(&closed));
            Ok(Report {
                text,
                json: json!({"schema": 1, "lambda": fmt_q(&got), "closed_form": fmt_q(&closed)}),
                negative: got != closed,
            })
        }
    }
}

fn load_theory(src: &TheorySource) -> Result<Theory, String> {
    match (&src.builtin, &src.theory) {
        (Some(b), _) => Theory::builtin(b).map_err(|e| located("--builtin", e)),
        (None, Some(path)) => Theory::from_json(&read_json(path)?).map_err(|e| located(path, e)),
        (None, None) => Err("give --builtin or --theory".into()),
    }
}

fn theory(cmd: TheoryCmd) -> CliResult {
    match cmd {
        TheoryCmd::Matrices { src } => {
            let t = load_theory(&src)?;
            let (a, a2) = t.incidence_matrices();
            let cl = t.loop_graduation();
            let text = format!(
                "half-edges: {}\nedges: {}\nvertices: {}\nA = {}\nA' = {}\nC_loop = {}\n",
                t.half_edges.join(", "),
                t.edge_names().join(", "),
                t.vertex_names.join(", "),
                matrix_text(&a),
                matrix_text(&a2),
                matrix_text(&cl)
            );
            let json = json!({
                "schema": 1,
                "theory": t.to_json(),
                "edges": t.edge_names(),
                "A": matrix_json(&a),
                "A_prime": matrix_json(&a2),
                "C_loop": matrix_json(&cl),
            });
            Ok(Report::ok(text, json))
        }
        TheoryCmd::Stats { src, v, s, graduation } => {
            let t = load_theory(&src)?;
            let g = GraphData { v: parse_counts(&v, "--v")?, s: parse_counts(&s, "--s")? };
            let st = graph_stats(&t, &g).map_err(|e| located("graph data", e))?;
            let c = match graduation {
                Some(c) => parse_matrix(&c)?,
                None => t.loop_graduation(),
            };
            let deg = graduation_q(&t, &c, &g).map_err(|e| located("graduation", e))?;
            let qs = |v: &[Q]| v.iter().map(fmt_q).collect::<Vec<_>>();
            let text = format!(
                "half-edges E: {}\ninternal edges E': {}\nexternal half-edges: {}\nloops: {}\ndegree: {}\n",
                qs(&st.half_edges).join(", "),
                qs(&st.internal_edges).join(", "),
                fmt_q(&st.external),
                fmt_q(&st.loops),
                qs(&deg).join(", ")
            );
            let integral = deg.iter().all(|x| x.is_integer() && *x >= Q::from_integer(0.into()));
            let json = json!({
                "schema": 1,
                "E": qs(&st.half_edges),
                "E_prime": qs(&st.internal_edges),
                "external": fmt_q(&st.external),
                "loops": fmt_q(&st.loops),
                "degree": qs(&deg),
                "integral": integral,
            });
            Ok(Report { text, json, negative: !integral })
        }
        TheoryCmd::Emit { src, inventory, graduation, bound, lifted } => {
            let t = load_theory(&src)?;
            let inv = PrimitiveInventory::from_json(&t, &read_json(&inventory)?).map_err(|e| located(&inventory, e))?;
            let c = match graduation {
                Some(c) => parse_matrix(&c)?,
                None => t.loop_graduation(),
            };
            if lifted {
                let (spec, coeffs) = emit_lifted_sdse(&t, &c, &inv, bound).map_err(|e| located(&inventory, e))?;
                let json = json!({"schema": 1, "spec": spec.to_json(), "coeffs": coeffs.to_json()});
                Ok(Report::ok(serde_json::to_string_pretty(&json).unwrap() + "\n", json))
            } else {
                let spec = emit_graph_sdse(&t, &c, &inv, bound).map_err(|e| located(&inventory, e))?;
                let j = spec.to_json();
                Ok(Report::ok(serde_json::to_string_pretty(&j).unwrap() + "\n", j))
            }
        }
        TheoryCmd::RankWitness { graduation, generators, cap, shadow } => {
            let c = parse_matrix(&graduation)?;
            let gens: Vec<Vec<i64>> = match generators {
                Some(g) => serde_json::from_str(&g).map_err(|e| format!("--generators: {e}"))?,
                None => mdse_core::feynman::qcd_generators(),
            };
            let Some(w) = rank_witness(&c, &gens, cap).map_err(|e| located("rank witness", e))? else {
                return Ok(Report::ok(
                    format!("no witness with coefficients ≤ {cap}\n"),
                    json!({"schema": 1, "witness": Value::Null}),
                ));
            };
            let mut text = format!("w = {:?} (coefficients {:?})\nw' = {:?} (coefficients {:?})\n", w.w, w.coeffs, w.w_prime, w.coeffs_prime);
            let mut json = json!({
                "schema": 1,
                "witness": {"w": w.w, "w_prime": w.w_prime, "coeffs": w.coeffs, "coeffs_prime": w.coeffs_prime},
            });
            if shadow {
                let spec = rank_shadow_spec(&Theory::qcd(), &w, 0, 2).map_err(|e| located("shadow", e))?;
                let sol = solve(&spec, 2).map_err(|e| located("shadow", e))?;
                let v = check_hopf(&sol, 2).map_err(|e| located("shadow", e))?;
                text.push_str(&format!("shadow system: {}\n", v.status_label()));
                json["shadow"] = v.to_json();
            }
            Ok(Report::ok(text, json))
        }
    }
}

fn load_graph(path: &str) -> Result<ColouredGraph, String> {
    ColouredGraph::from_json(&read_json(path)?).map_err(|e| located(path, e))
}

fn hopf_graph_report(g: &ColouredGraph, bound: u32, extra: Value) -> Report {
    let (ok, c) = is_hopf_graph(g, bound);
    let mut json = json!({"schema": 1, "bound": bound, "hopf": ok});
    if let Value::Object(m) = extra {
        for (k, v) in m {
            json[k] = v;
        }
    }
    let mut text = format!("hopf graph up to {bound}: {ok}\n");
    if let Some(c) = c {
        let name = |i: usize| g.vertices[i].clone();
        text.push_str(&format!(
            "counterexample: i={} j={} k={} alpha={} beta={}\n",
            name(c.i),
            name(c.j),
            name(c.k),
            c.alpha,
            c.beta
        ));
        json["counterexample"] = json!({"i": name(c.i), "j": name(c.j), "k": name(c.k), "alpha": c.alpha, "beta": c.beta});
    }
    Report { text, json, negative: !ok }
}

fn coloured(cmd: ColouredCmd) -> CliResult {
    match cmd {
        ColouredCmd::Check { graph, bound } => Ok(hopf_graph_report(&load_graph(&graph)?, bound, json!({}))),
        ColouredCmd::Emit { graph, bound, force } => {
            let g = load_graph(&graph)?;
            match emit_coloured_sdse(&g, bound, force) {
                Ok(spec) => {
                    let j = spec.to_json();
                    Ok(Report::ok(serde_json::to_string_pretty(&j).unwrap() + "\n", j))
                }
                Err(Error::Precondition(msg)) => Ok(Report {
                    text: format!("refused: {msg}\n"),
                    json: json!({"schema": 1, "refused": msg}),
                    negative: true,
                }),
                Err(e) => Err(located(&graph, e)),
            }
        }
        ColouredCmd::Endo { maps, bound } => {
            let maps: Vec<Vec<usize>> = serde_json::from_str(&maps).map_err(|e| format!("--maps: {e}"))?;
            let n = maps.first().map_or(0, Vec::len);
            let (g, nc) = from_endofunctions(n, &maps).map_err(|e| located("--maps", e))?;
            let commute = nc.is_none();
            let mut r = hopf_graph_report(&g, bound, json!({"commute": commute, "graph": g.to_json()}));
            r.text = format!("maps commute: {commute}\n{}", r.text);
            if let Some((p, q, v)) = nc {
                r.text.push_str(&format!("f{p}∘f{q} ≠ f{q}∘f{p} at {v}\n"));
            }
            Ok(r)
        }
    }
}

fn emit(global: &Global, r: &Report) -> Result<(), String> {
    let body = match global.format {
        Format::Text => r.text.clone(),
        Format::Json => serde_json::to_string_pretty(&r.json).unwrap() + "\n",
    };
    match &global.out {
        Some(p) => fs::write(p, body).map_err(|e| format!("{}: {e}", p.display())),
        None => io::stdout().write_all(body.as_bytes()).map_err(|e| format!("stdout: {e}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Command::Sdse(c) => sdse(c),
        Command::Deg1(c) => deg1(c),
        Command::Group(c) => group(c),
        Command::Theory(c) => theory(c),
        Command::Coloured(c) => coloured(c),
        Command::Selftest => Ok(selftest::run(cli.global.seed)),
    };
    match res.and_then(|r| emit(&cli.global, &r).map(|_| r.negative)) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
