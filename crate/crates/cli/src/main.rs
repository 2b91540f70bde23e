//! `kmcalc`: command-line access to root data, `B(∞)` graphs, parabolic
//! counts, IC-stalk characters, dimension formulas and ADHM data.
//!
//! Exit codes: 0 success, 1 invariant violation, 2 input or environment error.

mod store;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kmcalc::adhm::{self, AdhmDatum};
use kmcalc::binf::{self, CrystalGraph, SuiteReport, Word};
use kmcalc::ic_stalks::{self, Partition};
use kmcalc::parabolic::{self, LeviSpec, RowStatus};
use kmcalc::root_datum::{CartanMatrix, DatumSpec, RootDatum};
use kmcalc::Execution;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Violation(String),
}

impl From<kmcalc::Error> for CliError {
    fn from(e: kmcalc::Error) -> Self {
        match e {
            kmcalc::Error::Invariant(_) => CliError::Violation(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "kmcalc", version, about = "Crystals, root data and ADHM data over exact arithmetic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate B(infinity) up to a height bound and write it as JSON lines.
    Enumerate(EnumerateArgs),
    /// Run the invariant suites on a (possibly cached) graph.
    Verify(VerifyArgs),
    /// Three-way multiplicity table for a Levi subset.
    Parabolic(ParabolicArgs),
    /// Stalk polynomials from the symmetric-power series.
    Stalk(StalkArgs),
    /// Dimension formulas.
    Dims(DimsArgs),
    /// Residual, stability, monad and invariants of an ADHM datum.
    Adhm(AdhmArgs),
}

#[derive(Args, Debug, Clone)]
struct DatumArgs {
    /// JSON file holding a Cartan matrix or a datum description.
    #[arg(long, conflicts_with_all = ["family", "rank"])]
    cartan: Option<PathBuf>,
    #[arg(long, requires = "rank")]
    family: Option<String>,
    #[arg(long, requires = "family")]
    rank: Option<usize>,
    #[arg(long)]
    affine: bool,
}

#[derive(Args, Debug, Clone)]
struct GraphArgs {
    #[command(flatten)]
    datum: DatumArgs,
    /// Word period as comma-separated node labels.
    #[arg(long)]
    word: Option<String>,
    #[arg(long, default_value_t = 4)]
    max_height: u32,
    #[arg(long)]
    sequential: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ParabolicArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Levi subset as comma-separated node labels.
    #[arg(long, default_value = "")]
    levi: String,
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct StalkArgs {
    #[command(flatten)]
    datum: DatumArgs,
    /// Parts as "d:n,d:n".
    #[arg(long)]
    partition: Option<String>,
    #[arg(long)]
    level_max: Option<u32>,
    /// Levi subset for the Sym(V_p) table.
    #[arg(long)]
    levi: Option<String>,
    /// Central character for the Sym(V_p) table: coefficients at node 0 and
    /// the nodes outside the Levi.
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct DimsArgs {
    #[command(flatten)]
    datum: DatumArgs,
    /// Instanton number for the bundle dimension.
    #[arg(long, default_value_t = 1)]
    a: u32,
    #[arg(long)]
    levi: Option<String>,
    /// Coefficients of θ at the nodes outside the Levi.
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    lambda1: Option<String>,
    #[arg(long)]
    lambda2: Option<String>,
    /// Vanishing order n(n+1)(n+2)/6.
    #[arg(long)]
    vanishing: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AdhmArgs {
    /// ADHM datum JSON file.
    #[arg(long)]
    datum: PathBuf,
    #[arg(long, default_value_t = 3)]
    max_word_length: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Parabolic(a) => cmd_parabolic(a),
        Command::Stalk(a) => cmd_stalk(a),
        Command::Dims(a) => cmd_dims(a),
        Command::Adhm(a) => cmd_adhm(a),
    }
}

fn load_datum(a: &DatumArgs) -> Result<RootDatum, CliError> {
    let d = match (&a.cartan, &a.family, a.rank) {
        (Some(path), _, _) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            if value.is_array() {
                let rows: Vec<Vec<i64>> = serde_json::from_value(value).map_err(|e| CliError::Input(e.to_string()))?;
                RootDatum::from_cartan(CartanMatrix::new(rows)?)?
            } else {
                let spec: DatumSpec = serde_json::from_value(value).map_err(|e| CliError::Input(e.to_string()))?;
                RootDatum::from_spec(&spec)?
            }
        }
        (None, Some(f), Some(r)) => RootDatum::from_spec(&DatumSpec { family: Some(f.clone()), rank: Some(r), cartan: None, affine: false })?,
        _ => return Err(CliError::Input("give --cartan FILE or --family X --rank N".into())),
    };
    match (a.affine, d.is_affine()) {
        (true, false) => Ok(d.affinize()?),
        _ => Ok(d),
    }
}

fn parse_labels(d: &RootDatum, s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            let l: usize = x.parse().map_err(|_| CliError::Input(format!("bad node label {x:?}")))?;
            d.index_of_label(l).ok_or_else(|| CliError::Input(format!("node label {l} out of range for {}", d.name())))
        })
        .collect()
}

fn parse_ints(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| CliError::Input(format!("bad integer {x:?}"))))
        .collect()
}

fn exec_mode(g: &GraphArgs) -> Execution {
    if g.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn resolve_word(d: &RootDatum, g: &GraphArgs) -> Result<Word, CliError> {
    match &g.word {
        None => Ok(Word::standard(d.rank())),
        Some(s) => Ok(Word::periodic(parse_labels(d, s)?, d.rank())?),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => store::write_atomic(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// The graph for the given settings: read from the cache when the header
/// matches, otherwise enumerated (and stored when a cache directory is set).
/// Returns the graph and whether it came from the cache.
fn obtain_graph(g: &GraphArgs, cache: Option<&Path>) -> Result<(CrystalGraph, bool), CliError> {
    let d = load_datum(&g.datum)?;
    let word = resolve_word(&d, g)?;
    if let Some(dir) = cache {
        let path = store::cache_path(dir, &d, &word, g.max_height);
        if path.exists() {
            let header = store::read_header(&path)?;
            let wanted: Vec<usize> = word.period().iter().map(|&i| d.label(i)).collect();
            if header.fingerprint == store::fingerprint(&d) && header.word == wanted && header.max_height == g.max_height {
                let (_, graph) = store::load(&path)?;
                return Ok((graph, true));
            }
        }
        let graph = binf::enumerate_with(&d, &word, g.max_height, exec_mode(g))?;
        fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
        store::write_atomic(&path, &store::render(&graph))?;
        return Ok((graph, false));
    }
    Ok((binf::enumerate_with(&d, &word, g.max_height, exec_mode(g))?, false))
}

fn cmd_enumerate(a: EnumerateArgs) -> Result<(), CliError> {
    let (graph, _) = obtain_graph(&a.graph, a.cache.as_deref())?;
    emit(a.out.as_deref(), &store::render(&graph))
}

#[derive(Serialize)]
struct SuiteSummary {
    name: String,
    checked: usize,
    passed: bool,
    failures: usize,
    findings: Vec<binf::Finding>,
}

fn summarize(r: SuiteReport) -> SuiteSummary {
    SuiteSummary {
        passed: r.passed(),
        failures: r.findings.len(),
        name: r.name,
        checked: r.checked,
        findings: r.findings.into_iter().take(20).collect(),
    }
}

fn problems_suite(name: &str, checked: usize, problems: Vec<String>) -> SuiteReport {
    SuiteReport {
        name: name.into(),
        checked,
        findings: problems
            .into_iter()
            .map(|detail| binf::Finding { check: "parabolic", element: None, detail })
            .collect(),
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<(), CliError> {
    let exec = exec_mode(&a.graph);
    let (graph, cached) = obtain_graph(&a.graph, a.cache.as_deref())?;
    let mut suites = Vec::new();
    if cached {
        let fresh = binf::enumerate_with(&graph.datum, &graph.word, graph.max_height, exec)?;
        let bad = store::diff_rows(&graph, &fresh);
        suites.push(SuiteReport {
            name: "cache".into(),
            checked: graph.len(),
            findings: bad
                .into_iter()
                .map(|id| binf::Finding { check: "cache", element: Some(id), detail: "stored row differs from recomputation".into() })
                .collect(),
        });
    }
    suites.push(binf::weight_count_report(&graph)?);
    suites.push(binf::axiom_report(&graph, exec));
    suites.push(binf::commutation_report(&graph, exec));
    suites.push(binf::psi_report(&graph, exec));
    suites.push(binf::highest_weight_report(&graph));
    let mut other: Vec<usize> = graph.word.period().to_vec();
    other.reverse();
    if other != graph.word.period() {
        suites.push(binf::restring_report(&graph, &Word::periodic(other, graph.datum.rank())?, exec));
    }
    for i in 0..graph.datum.rank() {
        let m = LeviSpec::new(&graph.datum, &[i])?;
        let mut problems: Vec<String> = parabolic::verify_complete_decomposition(&graph, &m, exec)?
            .into_iter()
            .map(|f| format!("weight {:?}: {} elements, product sum {}", f.weight, f.ambient, f.product_sum))
            .collect();
        let rows = parabolic::three_way_table(&graph, &m, exec)?;
        problems.extend(
            rows.iter()
                .filter(|r| r.status == RowStatus::Mismatch)
                .map(|r| format!("nu {:?}: graph {:?}, character {:?}, c_nu {}", r.nu, r.mult_graph, r.mult_char, r.mult_cnu)),
        );
        problems.extend(parabolic::star_fiber_report(&graph, &m, exec)?);
        suites.push(problems_suite(&format!("parabolic-{}", graph.datum.label(i)), rows.len(), problems));
    }
    let failed: Vec<String> = suites.iter().filter(|s| !s.passed()).map(|s| s.name.clone()).collect();
    let located: Vec<usize> = suites.iter().flat_map(|s| s.findings.iter().filter_map(|f| f.element)).collect();
    let report = json!({
        "datum": graph.datum.name(),
        "word": graph.word.period().iter().map(|&i| graph.datum.label(i)).collect::<Vec<_>>(),
        "maxHeight": graph.max_height,
        "elements": graph.len(),
        "fromCache": cached,
        "passed": failed.is_empty(),
        "suites": suites.into_iter().map(summarize).collect::<Vec<_>>(),
    });
    emit(a.out.as_deref(), &to_json(&report))?;
    if failed.is_empty() {
        Ok(())
    } else {
        let first = located.first().map(|id| format!(" (first located element id {id})")).unwrap_or_default();
        Err(CliError::Violation(format!("failed suites: {}{first}", failed.join(", "))))
    }
}

fn cmd_parabolic(a: ParabolicArgs) -> Result<(), CliError> {
    let exec = exec_mode(&a.graph);
    let (graph, _) = obtain_graph(&a.graph, a.cache.as_deref())?;
    let d = &graph.datum;
    let m = LeviSpec::new(d, &parse_labels(d, &a.levi)?)?;
    let rows = parabolic::three_way_table(&graph, &m, exec)?;
    let failures = parabolic::verify_complete_decomposition(&graph, &m, exec)?;
    let labels: Vec<usize> = m.indices().iter().map(|&i| d.label(i)).collect();
    let text = match a.format {
        Format::Json => to_json(&json!({
            "datum": d.name(),
            "m": labels,
            "maxHeight": graph.max_height,
            "rows": rows.iter().map(|r| json!({
                "m": labels,
                "nu": r.nu,
                "mult_graph": r.mult_graph,
                "mult_char": r.mult_char.map(|x| x as u64),
                "mult_cnu": r.mult_cnu,
                "status": r.status,
            })).collect::<Vec<_>>(),
            "decompositionFailures": failures,
        })),
        Format::Tsv => {
            let mut s = String::from("m\tnu\tmult_graph\tmult_char\tmult_cnu\tstatus\n");
            let opt = |x: Option<String>| x.unwrap_or_else(|| "-".into());
            for r in &rows {
                s.push_str(&format!(
                    "{:?}\t{:?}\t{}\t{}\t{}\t{}\n",
                    labels,
                    r.nu,
                    opt(r.mult_graph.map(|x| x.to_string())),
                    opt(r.mult_char.map(|x| x.to_string())),
                    r.mult_cnu,
                    serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
                ));
            }
            s
        }
    };
    emit(a.out.as_deref(), &text)?;
    if rows.iter().any(|r| r.status == RowStatus::Mismatch) || !failures.is_empty() {
        return Err(CliError::Violation("parabolic multiplicities disagree".into()));
    }
    Ok(())
}

const NORMALIZATION_NOTE: &str =
    "each generator (exponent m, loop degree l) contributes q^(2m) t^l; the normalized single-point polynomial is [t^1]Z divided by q^2";

fn cmd_stalk(a: StalkArgs) -> Result<(), CliError> {
    let d = load_datum(&a.datum)?;
    if d.is_affine() {
        return Err(CliError::Input("stalk takes the finite datum; the loop direction is added internally".into()));
    }
    let partition: Option<Partition> = a.partition.as_deref().map(str::parse).transpose()?;
    let level_max = a.level_max.unwrap_or_else(|| partition.as_ref().map_or(1, Partition::max_part)).max(1);
    let z = ic_stalks::sym_vf_series(&d, level_max)?;
    let normalized = ic_stalks::normalized_single_point(&d)?;
    let raw = partition.as_ref().map(|p| ic_stalks::stalk_polynomial(&d, p)).transpose()?;
    let sym_vp = match (&a.levi, &a.theta) {
        (Some(levi), Some(theta)) => {
            let m = LeviSpec::new(&d, &parse_labels(&d, levi)?)?;
            let theta = parse_ints(theta)?;
            let bound = theta.iter().sum::<i64>().max(0) as u32;
            Some(ic_stalks::sym_vp_series(&d, &m, &theta, bound)?)
        }
        (None, None) => None,
        _ => return Err(CliError::Input("--levi and --theta go together".into())),
    };
    let text = match a.format {
        Format::Json => to_json(&json!({
            "datum": d.name(),
            "exponents": ic_stalks::principal_exponents(&d)?,
            "levelMax": level_max,
            "z": z,
            "partition": partition.as_ref().map(|p| p.parts().iter().map(|&(dk, nk)| json!({"d": dk, "n": nk})).collect::<Vec<_>>()),
            "raw": raw.as_ref().map(ToString::to_string),
            "rawCoefficients": raw,
            "normalizedSinglePoint": normalized.to_string(),
            "symVp": sym_vp,
            "note": NORMALIZATION_NOTE,
        })),
        Format::Tsv => {
            let mut s = String::from("d\tl\tc\n");
            for [dd, l, c] in z.triples() {
                s.push_str(&format!("{dd}\t{l}\t{c}\n"));
            }
            if let Some(r) = &raw {
                s.push_str(&format!("raw\t{r}\n"));
            }
            s.push_str(&format!("normalized\t{normalized}\n# {NORMALIZATION_NOTE}\n"));
            s
        }
    };
    emit(a.out.as_deref(), &text)
}

fn cmd_dims(a: DimsArgs) -> Result<(), CliError> {
    let d = load_datum(&a.datum)?;
    let finite = d.finite_datum().clone();
    let mut report = serde_json::Map::new();
    report.insert("datum".into(), json!(d.name()));
    report.insert("dualCoxeter".into(), json!(d.dual_coxeter()));
    report.insert("bundle".into(), json!({"a": a.a, "dim": ic_stalks::bundle_dimension(&d, a.a)}));
    let borel: Vec<Value> = (0..finite.rank())
        .map(|i| {
            let mut mu = vec![0; finite.rank()];
            mu[i] = 1;
            Ok(json!({"node": finite.label(i), "dim": ic_stalks::borel_zastava_dim(&finite, &mu)?}))
        })
        .collect::<Result<_, CliError>>()?;
    report.insert("borelSimple".into(), Value::Array(borel));
    if d.is_affine() {
        report.insert("nullRootLength".into(), json!(ic_stalks::null_root_length(&d)?));
    }
    if let Some(theta) = &a.theta {
        let m = LeviSpec::new(&finite, &parse_labels(&finite, a.levi.as_deref().unwrap_or(""))?)?;
        report.insert("zastava".into(), serde_json::to_value(ic_stalks::zastava_dims(&finite, &m, &parse_ints(theta)?)?).expect("serializes"));
    }
    match (&a.lambda1, &a.lambda2) {
        (Some(l1), l2) => {
            let l1 = parse_ints(l1)?;
            let l2 = l2.as_deref().map(parse_ints).transpose()?.unwrap_or_else(|| vec![0; finite.rank()]);
            report.insert("grassmannian".into(), json!(ic_stalks::grassmannian_dimension(&finite, &l1, &l2)?));
        }
        (None, Some(_)) => return Err(CliError::Input("--lambda2 needs --lambda1".into())),
        (None, None) => {}
    }
    if let Some(n) = a.vanishing {
        report.insert(
            "vanishingOrder".into(),
            json!({"n": n, "order": ic_stalks::cartier_vanishing_order(n) as u64, "filtrationSum": ic_stalks::filtration_sum(n) as u64}),
        );
    }
    emit(a.out.as_deref(), &to_json(&Value::Object(report)))
}

fn cmd_adhm(a: AdhmArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.datum).map_err(|e| CliError::Input(format!("cannot read {}: {e}", a.datum.display())))?;
    let x = AdhmDatum::from_json(&text)?;
    let residual = adhm::moment_residual(&x);
    let (p1, p2) = adhm::charpoly_projections(&x);
    let monad = adhm::monad_identity_check(&x);
    let rows = |m: &adhm::QMatrix| -> Vec<Vec<String>> { m.to_rows().iter().map(|r| r.iter().map(adhm::rat_to_string).collect()).collect() };
    let report = json!({
        "a": x.a,
        "n": x.n,
        "residual": rows(&residual),
        "residualZero": residual.is_zero(),
        "stable": adhm::is_stable(&x),
        "costable": adhm::is_costable(&x),
        "charpolyB1": p1,
        "charpolyB2": p2,
        "monad": monad,
        "invariants": adhm::invariants(&x, a.max_word_length),
    });
    emit(a.out.as_deref(), &to_json(&report))?;
    if !monad.holds {
        return Err(CliError::Violation("b∘d differs from z0^2([B1,B2] + ij)".into()));
    }
    Ok(())
}
