//! Command-line front end. Every subcommand emits one JSON report
//! `{"command", "inputs", "intermediates", "verdict", "citations"}`.
//!
//! Exit status is 0 for any computed result, 2 for unreadable or invalid
//! input and 1 for an internal inconsistency or a failed self-check.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::charclass::{
    det_graded, porteous_pontrjagin, porteous_sw, w_table_polynomial, BundlePresentation, ClassKind,
    ObstructionClass, VirtualBundle,
};
use crate::criteria::{
    inclusion_lhs, nonexistence_verdict, nonstable_inclusion, stabilized_w_inclusion, w_inclusion,
    CriterionError, CriterionReport, ObstructionRoute, VerdictInput,
};
use crate::filtration::{next_index, stage_dimension, DoublePresentation, FiltrationError, RunPresentation};
use crate::gring::{
    invert_total_class, kunneth_product, make_ring, truncated_free, CoefficientMode, GradedElement, ManifoldRing,
    Ring, RingError, RingPresentation, Term,
};
use crate::symbols::{
    codim_lower_bound, first_order_codim, jet_fiber_dim, tail_vanishing, truncate_symbol, validate_symbol,
    JetContext, JetOrder,
};

#[derive(Parser, Debug)]
#[command(name = "singobs", version, about = "Obstruction arithmetic for Thom-Boardman singularities")]
pub struct Cli {
    /// Write the JSON report to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Codimension facts for a Boardman symbol.
    Codim {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        symbol: Vec<i64>,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        p: i64,
        /// Jet order; defaults to the symbol length.
        #[arg(long)]
        k: Option<JetOrder>,
    },
    /// Determinant obstruction of Σ^i for a virtual bundle.
    Porteous {
        #[command(flatten)]
        bundle: BundleArgs,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        p: i64,
        #[arg(long)]
        i: i64,
    },
    /// Tabulated integer class of W_p(p, p) for 5 <= p <= 8.
    Wtable {
        #[command(flatten)]
        bundle: BundleArgs,
        #[arg(long)]
        p: i64,
    },
    /// Stratum inclusion criteria.
    Criteria {
        #[command(subcommand)]
        which: CriteriaCommand,
    },
    /// Nonexistence verdict for a map with the given bundle.
    Verdict {
        #[command(flatten)]
        bundle: BundleArgs,
        /// Source dimension; defaults to the ring's top dimension.
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        p: i64,
        #[arg(long)]
        i: i64,
        #[arg(long)]
        l: i64,
        #[arg(long, default_value = "inf")]
        k: JetOrder,
        #[arg(long, value_enum, default_value_t = Route::Porteous)]
        route: Route,
    },
    /// Filtration stages, product runs and the doubled map.
    Filtration {
        #[command(subcommand)]
        which: FiltrationCommand,
    },
    /// Run the built-in invariant checks and any ring fixtures given.
    Selfcheck {
        #[arg(long = "ring")]
        rings: Vec<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct BundleArgs {
    /// Ring presentation (JSON).
    #[arg(long)]
    ring: PathBuf,
    /// Bundle presentation (JSON); the trivial bundle if omitted.
    #[arg(long)]
    bundle: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CriteriaCommand {
    Nonstable {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        p: i64,
        #[arg(long)]
        i: i64,
        #[arg(long, default_value = "inf")]
        k: JetOrder,
    },
    W(InclusionArgs),
    Stabilized(InclusionArgs),
}

#[derive(Args, Debug)]
struct InclusionArgs {
    #[arg(long)]
    n: i64,
    #[arg(long)]
    p: i64,
    #[arg(long)]
    i: i64,
    #[arg(long)]
    l: i64,
    #[arg(long, default_value = "inf")]
    k: JetOrder,
}

#[derive(Subcommand, Debug)]
enum FiltrationCommand {
    NextIndex {
        #[arg(long)]
        l: u64,
    },
    Run {
        #[arg(long)]
        input: PathBuf,
    },
    Double {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Route {
    Porteous,
    Wtable,
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<RingError> for CliError {
    fn from(e: RingError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<crate::charclass::CharClassError> for CliError {
    fn from(e: crate::charclass::CharClassError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<crate::symbols::SymbolError> for CliError {
    fn from(e: crate::symbols::SymbolError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<CriterionError> for CliError {
    fn from(e: CriterionError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<FiltrationError> for CliError {
    fn from(e: FiltrationError) -> Self {
        match e {
            FiltrationError::Inconsistent(msg) => CliError::Internal(msg),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

struct Report {
    command: &'static str,
    inputs: Value,
    intermediates: Value,
    verdict: Value,
    citations: Vec<&'static str>,
    /// Exit status for a computed report; nonzero only for failed checks.
    status: i32,
}

impl Report {
    fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "intermediates": self.intermediates,
            "verdict": self.verdict,
            "citations": self.citations,
        })
    }

    fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.command);
        if let Value::Object(map) = &self.verdict {
            for (k, v) in map {
                out.push_str(&format!("  {k}: {}\n", compact(v)));
            }
        } else {
            out.push_str(&format!("  {}\n", compact(&self.verdict)));
        }
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (including the program name), executes and writes the
/// report. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(report) => match emit(&cli, &report, out) {
            Ok(()) => report.status,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                2
            }
        },
        Err(e) => {
            let msg = match &e {
                CliError::Invalid(m) => format!("error: {m}"),
                CliError::Internal(m) => format!("internal inconsistency: {m}"),
            };
            let _ = writeln!(err, "{msg}");
            e.code()
        }
    }
}

fn emit(cli: &Cli, report: &Report, out: &mut dyn Write) -> std::io::Result<()> {
    let json = serde_json::to_string_pretty(&report.to_json()).expect("report serializes") + "\n";
    match &cli.out {
        Some(path) => {
            fs::write(path, json)?;
            if cli.format == Format::Text {
                write!(out, "{}", report.to_text())?;
            }
        }
        None => match cli.format {
            Format::Json => write!(out, "{json}")?,
            Format::Text => write!(out, "{}", report.to_text())?,
        },
    }
    Ok(())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn load_bundle(args: &BundleArgs) -> Result<(Ring, VirtualBundle), CliError> {
    let pres: RingPresentation = read_json(&args.ring)?;
    let ring = make_ring(&pres)?;
    let bundle = match &args.bundle {
        Some(path) => {
            let b: BundlePresentation = read_json(path)?;
            VirtualBundle::from_presentation(&ring, &b)?
        }
        None => VirtualBundle::trivial(&ring),
    };
    Ok((ring, bundle))
}

fn terms(e: &GradedElement) -> Value {
    let list: Vec<Term> = e.terms().into_iter().map(|(label, coeff)| Term { label, coeff }).collect();
    serde_json::to_value(list).expect("terms serialize")
}

fn bundle_inputs(ring: &Ring, bundle: &VirtualBundle) -> Value {
    json!({ "ring": ring.to_presentation(), "bundle": bundle.to_presentation() })
}

fn class_components(bundle: &VirtualBundle) -> Value {
    let step = bundle.kind().step();
    let top = bundle.ring().top_dim() / step;
    let name = match bundle.kind() {
        ClassKind::StiefelWhitney => "W",
        ClassKind::Pontrjagin => "P",
    };
    let classes: Vec<Value> = (1..=top as i64)
        .map(|j| json!({ "class": format!("{name}_{j}"), "degree": j as usize * step, "value": terms(&bundle.class(j)) }))
        .collect();
    Value::Array(classes)
}

fn obstruction_json(c: &ObstructionClass) -> Value {
    json!({
        "variant": c.variant,
        "stratumIndex": c.stratum_index,
        "degree": c.expected_degree,
        "matrixIndices": c.matrix,
        "determinant": terms(&c.value),
        "isZero": c.is_zero(),
    })
}

fn criterion_json(r: &CriterionReport) -> Value {
    serde_json::to_value(r).expect("criterion report serializes")
}

const CITE_CODIM: &str = "first-order stratum codimension (p - n + i) i";
const CITE_BOUND: &str = "Boardman codimension lower bound (p - n + i_1) i_1 + sum_{j>=2} i_j (i_j + 1) / 2";
const CITE_TAIL: &str = "tail vanishing for symbols of length k >= n - |n - p| + 2";
const CITE_SW: &str = "mod 2 Thom polynomial of Σ^i as det[W_{i+s-t}]";
const CITE_PONT: &str = "integer Thom polynomial of Σ^{2v} as det[P_{v+s-t}] when n - p = 2u";
const CITE_TABLE: &str = "integer Thom polynomial of W_p(p, p) for 5 <= p <= 8";
const CITE_NONSTABLE: &str = "Σ^i ⊂ Σ(n, p; k) when (p - n + i)(i(i+1)/2 - p + n) - i² >= n, k >= p + 1";
const CITE_W: &str = "Σ^i ⊂ W_{ℓ+1}^k when (p - n + i)(i(i+1)/2 - p + n) - i² >= n + ℓ, k >= p + ℓ + 1";
const CITE_SHIFT: &str = "inclusion into W_{ℓ+1}^k is stable under (n, p) -> (n + m, p + m)";
const CITE_VERDICT: &str = "nonvanishing obstruction of an included stratum forbids O_ℓ^k-regular homotopies";
const CITE_INDEX: &str = "stage index: smallest i with 4i³ - 2i² >= 4i² + ℓ, stage dimension 8i²";
const CITE_PRODUCT: &str = "stage obstruction pulls back injectively to P_0 × ... × P_d";
const CITE_DOUBLE: &str = "doubled map g(x, y) = (f⁻¹(y), f(x)) on N × P";

fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Codim { symbol, n, p, k } => codim(symbol, *n, *p, *k),
        Command::Porteous { bundle, n, p, i } => porteous(bundle, *n, *p, *i),
        Command::Wtable { bundle, p } => wtable(bundle, *p),
        Command::Criteria { which } => criteria(which),
        Command::Verdict { bundle, n, p, i, l, k, route } => verdict(bundle, *n, *p, *i, *l, *k, *route),
        Command::Filtration { which } => filtration(which),
        Command::Selfcheck { rings } => selfcheck(rings),
    }
}

fn codim(symbol: &[i64], n: i64, p: i64, k: Option<JetOrder>) -> Result<Report, CliError> {
    let k = k.unwrap_or(JetOrder::Finite(symbol.len() as i64));
    let ctx = JetContext::new(n, p, k)?;
    let sym = validate_symbol(symbol, &ctx)?;
    let bound = codim_lower_bound(&sym, &ctx)?;
    let first = first_order_codim(sym.first(), &ctx)?;
    let tail = tail_vanishing(&sym, &ctx).ok();
    let truncated = truncate_symbol(&sym).ok().map(|s| s.entries().to_vec());
    let fiber = jet_fiber_dim(&ctx).ok().map(|d| d.to_string());
    let mut citations = vec![CITE_CODIM, CITE_BOUND];
    if tail.is_some() {
        citations.push(CITE_TAIL);
    }
    Ok(Report {
        command: "codim",
        inputs: json!({ "symbol": symbol, "n": n, "p": p, "k": k.to_string() }),
        intermediates: json!({
            "firstOrderCodim": first,
            "tailVanishing": tail,
            "truncated": truncated,
            "jetFiberDim": fiber,
        }),
        verdict: json!({ "bound": bound, "exact": sym.len() == 1 }),
        citations,
        status: 0,
    })
}

fn porteous(args: &BundleArgs, n: i64, p: i64, i: i64) -> Result<Report, CliError> {
    let (ring, bundle) = load_bundle(args)?;
    let ctx = JetContext::new(n, p, JetOrder::Infinite)?;
    let (c, cite) = match ring.mode() {
        CoefficientMode::Mod2 => (porteous_sw(i, &ctx, &bundle)?, CITE_SW),
        CoefficientMode::IntegerModTorsion => (porteous_pontrjagin(i, &ctx, &bundle)?, CITE_PONT),
    };
    Ok(Report {
        command: "porteous",
        inputs: json!({ "n": n, "p": p, "i": i, "data": bundle_inputs(&ring, &bundle) }),
        intermediates: json!({ "classes": class_components(&bundle), "obstruction": obstruction_json(&c) }),
        verdict: json!({ "obstructionVanishes": c.is_zero(), "degree": c.expected_degree }),
        citations: vec![cite],
        status: 0,
    })
}

fn wtable(args: &BundleArgs, p: i64) -> Result<Report, CliError> {
    let (ring, bundle) = load_bundle(args)?;
    let c = w_table_polynomial(p, &bundle)?;
    Ok(Report {
        command: "wtable",
        inputs: json!({ "p": p, "data": bundle_inputs(&ring, &bundle) }),
        intermediates: json!({ "classes": class_components(&bundle), "obstruction": obstruction_json(&c) }),
        verdict: json!({ "obstructionVanishes": c.is_zero(), "degree": c.expected_degree }),
        citations: vec![CITE_TABLE],
        status: 0,
    })
}

fn criteria(which: &CriteriaCommand) -> Result<Report, CliError> {
    let (name, inputs, report, citations) = match which {
        CriteriaCommand::Nonstable { n, p, i, k } => (
            "criteria nonstable",
            json!({ "n": n, "p": p, "i": i, "k": k.to_string() }),
            nonstable_inclusion(*n, *p, *i, *k)?,
            vec![CITE_NONSTABLE],
        ),
        CriteriaCommand::W(a) => (
            "criteria w",
            json!({ "n": a.n, "p": a.p, "i": a.i, "l": a.l, "k": a.k.to_string() }),
            w_inclusion(a.n, a.p, a.i, a.l, a.k)?,
            vec![CITE_W],
        ),
        CriteriaCommand::Stabilized(a) => (
            "criteria stabilized",
            json!({ "n": a.n, "p": a.p, "i": a.i, "l": a.l, "k": a.k.to_string() }),
            stabilized_w_inclusion(a.n, a.p, a.i, a.l, a.k)?,
            vec![CITE_W, CITE_SHIFT],
        ),
    };
    Ok(Report {
        command: name,
        inputs,
        intermediates: criterion_json(&report),
        verdict: json!({ "verdict": report.verdict, "shiftUsed": report.shift_used }),
        citations,
        status: 0,
    })
}

fn verdict(
    args: &BundleArgs,
    n: Option<i64>,
    p: i64,
    i: i64,
    l: i64,
    k: JetOrder,
    route: Route,
) -> Result<Report, CliError> {
    let (ring, bundle) = load_bundle(args)?;
    let source_dim = n.unwrap_or(ring.top_dim() as i64);
    let route = match route {
        Route::Porteous => ObstructionRoute::Porteous,
        Route::Wtable => ObstructionRoute::WTable,
    };
    let rec = nonexistence_verdict(&VerdictInput { bundle: &bundle, source_dim, target_dim: p, i, l, k, route })?;
    let mut citations = Vec::new();
    match route {
        ObstructionRoute::Porteous => {
            citations.extend([CITE_W, CITE_SHIFT]);
            citations.push(if ring.mode() == CoefficientMode::Mod2 { CITE_SW } else { CITE_PONT });
        }
        ObstructionRoute::WTable => citations.push(CITE_TABLE),
    }
    citations.push(CITE_VERDICT);
    Ok(Report {
        command: "verdict",
        inputs: json!({
            "n": source_dim, "p": p, "i": i, "l": l, "k": k.to_string(),
            "route": format!("{route:?}"),
            "data": bundle_inputs(&ring, &bundle),
        }),
        intermediates: json!({
            "criterion": rec.criterion.as_ref().map(criterion_json),
            "classes": class_components(&bundle),
            "obstruction": obstruction_json(&rec.obstruction),
            "notes": rec.notes,
        }),
        verdict: json!({ "verdict": rec.verdict, "reason": rec.reason }),
        citations,
        status: 0,
    })
}

fn filtration(which: &FiltrationCommand) -> Result<Report, CliError> {
    match which {
        FiltrationCommand::NextIndex { l } => {
            let i = next_index(*l);
            Ok(Report {
                command: "filtration next-index",
                inputs: json!({ "l": l }),
                intermediates: json!({ "stageDimension": stage_dimension(i) }),
                verdict: json!({ "index": i }),
                citations: vec![CITE_INDEX],
                status: 0,
            })
        }
        FiltrationCommand::Run { input } => {
            let pres: RunPresentation = read_json(input)?;
            let run = pres.build()?;
            let mut stages = Vec::new();
            for s in run.stages() {
                let product = run.product_obstruction(s.t)?;
                let injective = run.injection(s.t)?.is_injective();
                if !injective {
                    return Err(CliError::Internal(format!("q_{}* is not injective", s.t)));
                }
                stages.push(json!({
                    "t": s.t, "l": s.l, "i": s.i, "dim": s.dim,
                    "stageObstruction": obstruction_json(&s.obstruction),
                    "productObstruction": obstruction_json(&product),
                    "pullbackInjective": injective,
                }));
            }
            Ok(Report {
                command: "filtration run",
                inputs: serde_json::to_value(&pres).expect("run serializes"),
                intermediates: json!({
                    "stages": stages,
                    "productDim": run.product_ring().dim(),
                    "productTopDim": run.product_ring().top_dim(),
                }),
                verdict: json!({
                    "stages": run.stages().len(),
                    "indices": run.stages().iter().map(|s| s.i).collect::<Vec<_>>(),
                    "allProductObstructionsNonzero": true,
                }),
                citations: vec![CITE_INDEX, CITE_PONT, CITE_PRODUCT],
                status: 0,
            })
        }
        FiltrationCommand::Double { input } => {
            let pres: DoublePresentation = read_json(input)?;
            let dc = pres.build()?;
            let top = dc.product().left().top_dim();
            let mut edges = Vec::new();
            for j in 0..=top / 4 {
                let holds = dc.edge_identity_holds(j)?;
                edges.push(json!({ "j": j, "edge": terms(&dc.edge_component(j)?), "holds": holds }));
                if !holds {
                    return Err(CliError::Internal(format!("edge identity fails for j = {j}")));
                }
            }
            let mut remainders = Vec::new();
            let mut i = 1;
            while 4 * i * i <= top {
                let rem = dc.obstruction_remainder(i as i64)?;
                let edge = dc.product().bidegree_component(&rem, 4 * i * i, 0)?;
                if !edge.is_zero() {
                    return Err(CliError::Internal(format!("remainder for Σ^{} has an edge part", 2 * i)));
                }
                remainders.push(json!({ "i": i, "remainder": terms(&rem) }));
                i += 1;
            }
            Ok(Report {
                command: "filtration double",
                inputs: serde_json::to_value(&pres).expect("double serializes"),
                intermediates: json!({
                    "productClasses": class_components(dc.bundle()),
                    "factorClasses": class_components(dc.factor_bundle()),
                    "edges": edges,
                    "remainders": remainders,
                }),
                verdict: json!({ "edgeIdentityHolds": true, "remaindersHaveNoEdgePart": true }),
                citations: vec![CITE_DOUBLE, CITE_PONT],
                status: 0,
            })
        }
    }
}

struct Check {
    name: String,
    passed: bool,
    detail: String,
}

fn check(name: impl Into<String>, result: Result<(), String>) -> Check {
    match result {
        Ok(()) => Check { name: name.into(), passed: true, detail: String::new() },
        Err(detail) => Check { name: name.into(), passed: false, detail },
    }
}

fn leibniz(ring: &Ring, m: &[Vec<GradedElement>]) -> Result<GradedElement, RingError> {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut acc = GradedElement::zero(ring);
    loop {
        let inversions = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| perm[a] > perm[b]).count();
        let mut term = GradedElement::one(ring);
        for (row, &col) in perm.iter().enumerate() {
            term = term.mul(&m[row][col])?;
        }
        acc = if inversions % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
        // next permutation in lexicographic order
        let Some(a) = (0..n.saturating_sub(1)).rev().find(|&a| perm[a] < perm[a + 1]) else { break };
        let b = (a + 1..n).rev().find(|&b| perm[b] > perm[a]).expect("successor exists");
        perm.swap(a, b);
        perm[a + 1..].reverse();
    }
    Ok(acc)
}

fn random_element(ring: &Ring, rng: &mut ChaCha8Rng, max_degree: usize) -> GradedElement {
    let coeffs = (0..ring.dim())
        .map(|i| if ring.degree_of(i) <= max_degree { rng.gen_range(-3i64..=3).into() } else { 0.into() })
        .collect();
    GradedElement::from_coeffs(ring, coeffs)
}

fn random_total(ring: &Ring, rng: &mut ChaCha8Rng) -> GradedElement {
    let mut coeffs = random_element(ring, rng, ring.top_dim()).coeffs().to_vec();
    coeffs[0] = One::one();
    GradedElement::from_coeffs(ring, coeffs)
}

fn builtin_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let free = truncated_free(CoefficientMode::IntegerModTorsion, 16, &[("a", 4), ("b", 8), ("c", 12)])
        .expect("fixture ring");
    let ring = free.ring().clone();

    let det = (|| -> Result<(), String> {
        for size in 0..=4 {
            for _ in 0..6 {
                let m: Vec<Vec<GradedElement>> =
                    (0..size).map(|_| (0..size).map(|_| random_element(&ring, &mut rng, 8)).collect()).collect();
                let fast = det_graded(&ring, &m).map_err(|e| e.to_string())?;
                let slow = leibniz(&ring, &m).map_err(|e| e.to_string())?;
                if fast != slow {
                    return Err(format!("{size}x{size} determinant {fast} differs from Leibniz {slow}"));
                }
            }
        }
        Ok(())
    })();
    checks.push(check("determinant matches Leibniz expansion", det));

    let inversion = (|| -> Result<(), String> {
        for _ in 0..20 {
            let c = random_total(&ring, &mut rng);
            let inv = invert_total_class(&c).map_err(|e| e.to_string())?;
            if inv.mul(&c).map_err(|e| e.to_string())? != GradedElement::one(&ring) {
                return Err(format!("{c} times its inverse is not 1"));
            }
            if invert_total_class(&inv).map_err(|e| e.to_string())? != c {
                return Err(format!("inverting {c} twice does not return it"));
            }
        }
        Ok(())
    })();
    checks.push(check("total class inversion is an involution", inversion));

    let kunneth = (|| -> Result<(), String> {
        let f = truncated_free(CoefficientMode::IntegerModTorsion, 8, &[("x", 4)]).map_err(|e| e.to_string())?;
        let g = truncated_free(CoefficientMode::Mod2, 3, &[("w", 1)]).map_err(|e| e.to_string())?;
        let g2 = truncated_free(CoefficientMode::Mod2, 2, &[("u", 1)]).map_err(|e| e.to_string())?;
        for (a, b) in [(f.ring(), f.ring()), (g.ring(), g2.ring())] {
            let k = kunneth_product(a, b).map_err(|e| e.to_string())?;
            ManifoldRing::verify_structure(k.ring()).map_err(|e| e.to_string())?;
            if k.ring().top_dim() != a.top_dim() + b.top_dim() {
                return Err("product top dimension is not additive".into());
            }
            for x in 0..a.dim() {
                for y in 0..b.dim() {
                    let (ex, ey) = (GradedElement::basis(a, x), GradedElement::basis(b, y));
                    let lhs = k.tensor(&ex, &ey).map_err(|e| e.to_string())?;
                    let qx = k.left_pullback().apply(&ex).map_err(|e| e.to_string())?;
                    let qy = k.right_pullback().apply(&ey).map_err(|e| e.to_string())?;
                    if lhs != qx.mul(&qy).map_err(|e| e.to_string())? {
                        return Err(format!("{}⊗{} is not q*{} · q*{}", a.label(x), b.label(y), a.label(x), b.label(y)));
                    }
                }
            }
            if !k.left_pullback().is_injective() || !k.right_pullback().is_injective() {
                return Err("factor pullbacks are not injective".into());
            }
        }
        Ok(())
    })();
    checks.push(check("Künneth product identities", kunneth));

    let inequality = (|| -> Result<(), String> {
        for i in 1..=20 {
            let lhs = inclusion_lhs(20, 20, i).map_err(|e| e.to_string())?;
            if 2 * lhs != i * i * (i - 1) {
                return Err(format!("equidimensional form fails at i = {i}"));
            }
        }
        for i in 1..=50i64 {
            let lhs = inclusion_lhs(400, 400, 2 * i).map_err(|e| e.to_string())?;
            if lhs != 4 * i * i * i - 2 * i * i {
                return Err(format!("even-index form fails at i = {i}"));
            }
        }
        Ok(())
    })();
    checks.push(check("inclusion inequality simplification", inequality));

    let trivial = (|| -> Result<(), String> {
        let zero = VirtualBundle::trivial(&ring);
        let ctx = JetContext::new(16, 16, JetOrder::Infinite).map_err(|e| e.to_string())?;
        for i in [2, 4, 6, 8] {
            let c = porteous_pontrjagin(i, &ctx, &zero).map_err(|e| e.to_string())?;
            if !c.is_zero() {
                return Err(format!("trivial bundle gives a nonzero class for Σ^{i}"));
            }
        }
        Ok(())
    })();
    checks.push(check("trivial bundle has vanishing obstructions", trivial));
    checks
}

fn selfcheck(rings: &[PathBuf]) -> Result<Report, CliError> {
    let mut checks = builtin_checks();
    for path in rings {
        let pres: RingPresentation = read_json(path)?;
        let name = format!("fixture {}", path.display());
        checks.push(check(name, make_ring(&pres).map(|_| ()).map_err(|e| e.to_string())));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let list: Vec<Value> = checks
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
        .collect();
    Ok(Report {
        command: "selfcheck",
        inputs: json!({ "fixtures": rings.iter().map(|p| p.display().to_string()).collect::<Vec<_>>() }),
        intermediates: json!({ "checks": list }),
        verdict: json!({
            "passed": checks.len() - failed,
            "failed": failed,
            "failures": checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect::<Vec<_>>(),
        }),
        citations: Vec::new(),
        status: if failed == 0 { 0 } else { 1 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("singobs").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn codim_example() {
        let (code, out, _) = run_args(&["codim", "--symbol", "2,1,0", "--n", "3", "--p", "3"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["verdict"]["bound"], 5);
    }

    #[test]
    fn bad_input_exits_2() {
        let (code, _, err) = run_args(&["codim", "--symbol", "1,2", "--n", "3", "--p", "3"]);
        assert_eq!(code, 2);
        assert!(err.contains("nonincreasing"));
        let (code, _, _) = run_args(&["nonsense"]);
        assert_eq!(code, 2);
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("codim"));
    }

    #[test]
    fn leibniz_helper() {
        let f = truncated_free(CoefficientMode::IntegerModTorsion, 8, &[("a", 4)]).unwrap();
        let r = f.ring();
        let a = f.generator(0);
        let one = GradedElement::one(r);
        let m = vec![vec![a.clone(), one.clone()], vec![one.clone(), a.clone()]];
        assert_eq!(leibniz(r, &m).unwrap(), a.mul(&a).unwrap().sub(&one).unwrap());
    }

    #[test]
    fn builtin_checks_pass() {
        for c in builtin_checks() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
