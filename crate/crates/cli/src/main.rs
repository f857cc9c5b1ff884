use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use coxrep::analysis::{
    characters_distinguish, commutant_dimension, is_reflection, product_analysis, verify_good_morphism, Verdict,
};
use coxrep::cartan::{OrderClass, DEFAULT_MAX_ORDER};
use coxrep::construction::{cartan_matrix, is_intertwiner, tree_change_intertwiner};
use coxrep::forms::{
    build_form, dual_representation, form_exists, form_space_dimension, gram_cartan_relation, verify_invariance,
    Automorphism, FormVerdict, Obstruction,
};
use coxrep::graph::Diagram;
use coxrep::io::{load, matrix_to_json, pair_key, rep_to_json, scalar_to_json};
use coxrep::{CoxError, FieldMatrix, ReflectionRep};

#[derive(Parser)]
#[command(name = "coxrep", version, about = "Exact reflection representations of Coxeter groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the representation and its Cartan matrix.
    Build(Job),
    /// Check reflections, pair orders, characteristic polynomials and the commutant.
    Verify(Job),
    /// Decide and construct an invariant form.
    Form {
        #[command(flatten)]
        job: Job,
        /// Galois index of the twisting automorphism.
        #[arg(long, default_value_t = 1)]
        theta: i64,
    },
    /// Compare two representations of the same diagram.
    Equiv {
        #[command(flatten)]
        job: Job,
        #[arg(long)]
        diagram2: Option<PathBuf>,
        #[arg(long)]
        root2: String,
        #[arg(long)]
        tree2: Option<PathBuf>,
        #[arg(long)]
        params2: Option<PathBuf>,
    },
    /// The dual representation in its adapted basis.
    Dual(Job),
}

#[derive(Args)]
struct Job {
    #[arg(long)]
    diagram: PathBuf,
    #[arg(long)]
    root: String,
    #[arg(long)]
    tree: Option<PathBuf>,
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

enum Failure {
    Validation(String, String),
    Internal(String, String),
}

impl From<CoxError> for Failure {
    fn from(e: CoxError) -> Self {
        let kind = format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("Error").to_string();
        match e {
            CoxError::OrderMismatch(_) | CoxError::EquivalenceViolation(_) | CoxError::Internal(_) => {
                Failure::Internal(kind, e.to_string())
            }
            _ => Failure::Validation(kind, e.to_string()),
        }
    }
}

type Outcome = Result<(Value, Vec<String>, bool), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Validation("Io".into(), format!("{}: {e}", path.display())))
}

fn read_opt(path: Option<&PathBuf>) -> Result<Option<String>, Failure> {
    path.map(|p| read(p)).transpose()
}

fn load_job(diagram: &Path, root: &str, tree: Option<&PathBuf>, params: Option<&PathBuf>) -> Result<ReflectionRep, Failure> {
    let d = read(diagram)?;
    let t = read_opt(tree)?;
    let p = read_opt(params)?;
    Ok(load(&d, root, t.as_deref(), p.as_deref())?)
}

fn max_order() -> Result<u64, Failure> {
    match std::env::var("COXREP_MAX_ORDER") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&n| n >= 2)
            .ok_or_else(|| Failure::Validation("InvalidInput".into(), format!("COXREP_MAX_ORDER={v:?} is not an integer >= 2"))),
        Err(_) => Ok(DEFAULT_MAX_ORDER),
    }
}

fn class_name(c: &OrderClass) -> String {
    match c {
        OrderClass::Commuting => "commuting".into(),
        OrderClass::Finite(n) => format!("finite({n})"),
        OrderClass::Unipotent => "unipotent".into(),
        OrderClass::Indeterminate => "indeterminate".into(),
    }
}

fn text_matrix(name: &str, m: &FieldMatrix) -> Vec<String> {
    let mut out = vec![format!("{name}:")];
    out.extend(m.to_rows().iter().map(|r| {
        format!("  [{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
    }));
    out
}

fn header(rep: &ReflectionRep) -> Value {
    json!({
        "conductor": rep.context().conductor(),
        "degree": rep.context().degree(),
        "root": rep.diagram().label(rep.root()),
    })
}

fn cmd_build(job: &Job) -> Outcome {
    let rep = load_job(&job.diagram, &job.root, job.tree.as_ref(), job.params.as_ref())?;
    let data = cartan_matrix(&rep);
    let d = rep.diagram();
    let warnings: Vec<String> = rep
        .params()
        .choice_issues(d)
        .iter()
        .map(|i| format!("alpha index {} on {} is not a primitive choice for m = {}", i.index, pair_key(d, i.edge), i.order))
        .collect();
    let mut doc = rep_to_json(&rep);
    doc["root"] = json!(d.label(rep.root()));
    doc["warnings"] = json!(warnings);
    let mut text = vec![
        format!("conductor {} (degree {}), root {}", rep.context().conductor(), rep.context().degree(), d.label(rep.root())),
        format!("c = 2cos(2pi/{})", rep.context().conductor()),
    ];
    text.extend(text_matrix("cartan", &data.entries));
    text.push(format!("discriminant: {} (~ {:.6})", data.discriminant, data.discriminant.to_f64()));
    for (s, g) in rep.generators().iter().enumerate() {
        text.extend(text_matrix(&format!("generator {}", d.label(s)), g));
    }
    text.extend(warnings.iter().map(|w| format!("warning: {w}")));
    Ok((doc, text, true))
}

fn cmd_verify(job: &Job) -> Outcome {
    let rep = load_job(&job.diagram, &job.root, job.tree.as_ref(), job.params.as_ref())?;
    let bound = max_order()?;
    let d = rep.diagram();
    let report = verify_good_morphism(rep.generators(), d.matrix(), bound)?;
    let mut rows = Vec::new();
    let mut text = Vec::new();
    for p in &report.pairs {
        let key = pair_key(d, p.pair);
        let charpoly = match (is_reflection(rep.generator(p.pair.0)), is_reflection(rep.generator(p.pair.1))) {
            (Some(r), Some(s)) => product_analysis(&r, &s, bound.max(p.expected)).map(|_| true)?,
            _ => false,
        };
        rows.push(json!({
            "pair": key,
            "expected": p.expected,
            "class": class_name(&p.class),
            "order": p.computed,
            "charpoly": charpoly,
            "pass": p.pass,
        }));
        text.push(format!(
            "{key}: m = {}, {} {}",
            p.expected,
            class_name(&p.class),
            if p.pass { "ok" } else { "FAIL" }
        ));
    }
    let commutant = commutant_dimension(rep.generators());
    let non_reflections: Vec<&str> = report.non_reflections.iter().map(|&s| d.label(s)).collect();
    let pass = report.pass && commutant == 1;
    text.push(format!("commutant dimension {commutant}"));
    for s in &non_reflections {
        text.push(format!("{s}: not a reflection"));
    }
    text.push(if pass { "all checks pass".into() } else { "verification FAILED".into() });
    let doc = json!({
        "header": header(&rep),
        "max_order": bound,
        "pairs": rows,
        "non_reflections": non_reflections,
        "commutant_dimension": commutant,
        "pass": pass,
    });
    Ok((doc, text, pass))
}

fn obstruction_json(d: &Diagram, o: &Obstruction) -> Value {
    let e = match o {
        Obstruction::NotInvolutive(e) | Obstruction::MovesAlpha(e) | Obstruction::Unbalanced(e) => *e,
    };
    let reason = match o {
        Obstruction::NotInvolutive(_) => "theta is not an involution on the parameters",
        Obstruction::MovesAlpha(_) => "theta moves an alpha",
        Obstruction::Unbalanced(_) => "chord balance equation fails",
    };
    json!({ "condition": o.condition(), "edge": pair_key(d, e), "reason": reason })
}

fn cmd_form(job: &Job, theta: i64) -> Outcome {
    let rep = load_job(&job.diagram, &job.root, job.tree.as_ref(), job.params.as_ref())?;
    let d = rep.diagram();
    let auto = Automorphism::new(rep.context(), theta)?;
    let verdict = form_exists(&rep, &auto)?;
    let dim = form_space_dimension(&rep, &auto)?;
    if (dim == 1) != verdict.exists() || dim > 1 {
        return Err(Failure::Internal(
            "Internal".into(),
            format!("criterion says {:?} but the solution space has dimension {dim}", verdict),
        ));
    }
    let mut doc = json!({ "header": header(&rep), "theta": auto.index(), "dimension": dim });
    let mut text = vec![format!("theta = {}, dimension {dim}", auto.index())];
    match &verdict {
        FormVerdict::Obstructed(o) => {
            doc["exists"] = json!(false);
            doc["obstruction"] = obstruction_json(d, o);
            text.push(format!("no invariant form: condition {} fails on {}", o.condition(), doc["obstruction"]["edge"].as_str().unwrap_or("")));
        }
        FormVerdict::Exists => {
            let gram = build_form(&rep, &auto)?;
            let check = verify_invariance(&rep, &gram.entries, &auto)?;
            if !check.holds() {
                return Err(Failure::Internal("Internal".into(), "constructed form is not invariant".into()));
            }
            doc["exists"] = json!(true);
            doc["gram"] = matrix_to_json(&gram.entries);
            doc["scale"] = scalar_to_json(&gram.scale);
            doc["invariant"] = json!(check.invariant);
            doc["hermitian"] = json!(check.hermitian);
            text.push("invariant form exists".into());
            text.extend(text_matrix("gram", &gram.entries));
            if auto.is_identity() {
                let rel = gram_cartan_relation(&rep, &gram.entries);
                if !rel {
                    return Err(Failure::Internal("Internal".into(), "gram matrix is not diag * cartan".into()));
                }
                doc["cartan_factorization"] = json!(rel);
                text.push("gram = diag(gram_ss / 2) * cartan".into());
            }
        }
    }
    Ok((doc, text, true))
}

fn integral(m: &FieldMatrix) -> bool {
    m.entries().iter().all(|x| x.is_integral())
}

fn cmd_equiv(job: &Job, diagram2: Option<&PathBuf>, root2: &str, tree2: Option<&PathBuf>, params2: Option<&PathBuf>) -> Outcome {
    let first = load_job(&job.diagram, &job.root, job.tree.as_ref(), job.params.as_ref())?;
    let second = load_job(diagram2.unwrap_or(&job.diagram), root2, tree2, params2)?;
    if first.diagram().matrix() != second.diagram().matrix() {
        return Err(CoxError::DifferentDiagram.into());
    }
    let d = first.diagram().clone();
    let moved = tree_change_intertwiner(&first, second.tree())?;
    if !is_intertwiner(&moved.matrix, first.generators(), moved.target.generators()) {
        return Err(Failure::Internal("Internal".into(), "tree change intertwiner fails conjugation".into()));
    }
    let mut doc = json!({ "header": header(&first) });
    let mut text = Vec::new();
    match characters_distinguish(&moved.target, &second)? {
        Verdict::Distinct { word, first: a, second: b } => {
            let w: Vec<&str> = word.iter().map(|&s| d.label(s)).collect();
            doc["verdict"] = json!("distinct");
            doc["word"] = json!(w);
            doc["trace_first"] = scalar_to_json(&a);
            doc["trace_second"] = scalar_to_json(&b);
            text.push(format!("distinct: tr({}) = {a} vs {b}", w.join("")));
        }
        Verdict::Equivalent { intertwiner } => {
            let g = moved.matrix.mul(&intertwiner);
            if !is_intertwiner(&g, first.generators(), second.generators()) {
                return Err(Failure::Internal("Internal".into(), "composed intertwiner fails conjugation".into()));
            }
            let inv = g.inverse().ok_or_else(|| Failure::Internal("Internal".into(), "singular intertwiner".into()))?;
            doc["verdict"] = json!("equivalent");
            doc["intertwiner"] = matrix_to_json(&g);
            doc["integral"] = json!(integral(&g));
            doc["inverse_integral"] = json!(integral(&inv));
            text.push("equivalent".into());
            text.extend(text_matrix("intertwiner", &g));
            text.push(format!("integral: {}, inverse integral: {}", integral(&g), integral(&inv)));
        }
        Verdict::Inconclusive => {
            doc["verdict"] = json!("inconclusive");
            text.push("inconclusive".into());
        }
    }
    Ok((doc, text, true))
}

fn cmd_dual(job: &Job) -> Outcome {
    let rep = load_job(&job.diagram, &job.root, job.tree.as_ref(), job.params.as_ref())?;
    let d = rep.diagram();
    let dual = dual_representation(&rep)?;
    let mut doc = json!({
        "header": header(&rep),
        "generators": dual.generators.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "primed": matrix_to_json(&dual.primed),
        "adapted": matrix_to_json(&dual.adapted),
        "degenerate": dual.degenerate,
        "primed_rank": dual.primed.rank(),
    });
    let mut text = vec![format!("degenerate: {}", dual.degenerate)];
    for (s, g) in dual.generators.iter().enumerate() {
        text.extend(text_matrix(&format!("dual generator {}", d.label(s)), g));
    }
    if let Some(c) = &dual.cartan {
        let report = verify_good_morphism(&dual.generators, d.matrix(), max_order()?)?;
        if !report.pass {
            return Err(Failure::Internal("Internal".into(), "dual representation fails the pair-order check".into()));
        }
        doc["cartan"] = matrix_to_json(c);
        doc["good_morphism"] = json!(true);
        text.extend(text_matrix("dual cartan (adapted basis)", c));
    } else {
        text.push(format!("primed vectors have rank {}", dual.primed.rank()));
    }
    Ok((doc, text, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, format) = match &cli.command {
        Command::Build(job) => (cmd_build(job), job.format),
        Command::Verify(job) => (cmd_verify(job), job.format),
        Command::Form { job, theta } => (cmd_form(job, *theta), job.format),
        Command::Equiv { job, diagram2, root2, tree2, params2 } => {
            (cmd_equiv(job, diagram2.as_ref(), root2, tree2.as_ref(), params2.as_ref()), job.format)
        }
        Command::Dual(job) => (cmd_dual(job), job.format),
    };
    match result {
        Ok((doc, text, pass)) => {
            let body = match format {
                Format::Json => serde_json::to_string_pretty(&doc).expect("json"),
                Format::Text => text.join("\n"),
            };
            // ignore a closed pipe
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(Failure::Validation(kind, msg)) => {
            eprintln!("{}", json!({ "error": kind, "message": msg }));
            ExitCode::from(2)
        }
        Err(Failure::Internal(kind, msg)) => {
            eprintln!("{}", json!({ "error": kind, "message": msg }));
            ExitCode::from(4)
        }
    }
}
