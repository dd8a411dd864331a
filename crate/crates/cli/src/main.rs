//! `qgtorsion` command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 no torsion function or
//! disconnected graph, 4 inconclusive accuracy, 1 any other failure.

mod output;
mod sweep;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use qgtorsion::bounds::{bounds_report, kohler_jobin_explorer};
use qgtorsion::calculus::{fd_check, gradient, Parameter};
use qgtorsion::fixtures::{all_fixtures, check_fixture, load_fixture, CheckOutcome};
use qgtorsion::spectral::lambda1;
use qgtorsion::surgery::{apply, compare, SurgerySpec};
use qgtorsion::torsion::{classify_positivity, rigidity, solve_torsion};
use qgtorsion::{Error, MetricGraph};

use output::{json as emit_json, kv_table, num, opt, Format, Table};
use sweep::{classification_name, Record, SweepSpec, Target};

#[derive(Debug, Parser)]
#[command(
    name = "qgtorsion",
    version,
    about = "Torsion, rigidity and ground states on metric graphs"
)]
struct Cli {
    /// Output format; the default depends on the command.
    #[arg(long, global = true, value_enum)]
    output: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Torsion function and torsional rigidity.
    Torsion { graph: PathBuf },
    /// Existence and positivity of the torsion function.
    Positivity { graph: PathBuf },
    /// First eigenvalue by refined finite elements.
    Lambda1 {
        graph: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        target_error: f64,
    },
    /// Lower and upper bounds on the rigidity.
    Bounds { graph: PathBuf },
    /// Derivatives of the rigidity by edge lengths and strengths.
    Gradient {
        graph: PathBuf,
        /// Also compare against central differences.
        #[arg(long)]
        fd_check: bool,
        /// Relative step for the differences.
        #[arg(long, default_value_t = 1e-5)]
        fd_step: f64,
    },
    /// Apply a surgery step given as JSON.
    Surgery {
        graph: PathBuf,
        spec: PathBuf,
        /// Print the rigidity before and after with the predicted change.
        #[arg(long)]
        compare: bool,
    },
    /// Sweep one edge length or vertex strength.
    Sweep {
        graph: PathBuf,
        /// Sweep specification as JSON; overrides the flags below.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, value_enum, required_unless_present = "spec")]
        target: Option<Target>,
        #[arg(long, required_unless_present = "spec")]
        id: Option<String>,
        #[arg(long, required_unless_present = "spec", allow_negative_numbers = true)]
        from: Option<f64>,
        #[arg(long, required_unless_present = "spec", allow_negative_numbers = true)]
        to: Option<f64>,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        /// Geometric spacing.
        #[arg(long)]
        log: bool,
        /// Quantities to record.
        #[arg(long, value_enum, value_delimiter = ',', default_value = "t")]
        record: Vec<Record>,
        #[arg(long, default_value_t = 1e-6)]
        target_error: f64,
    },
    /// Exploratory Kohler-Jobin table for intervals with one Kirchhoff end.
    Kj {
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
    },
    /// List the bundled fixtures, or check one (or `all`) against the solvers.
    Fixtures {
        name: Option<String>,
        /// Print the fixture graph instead of checking it.
        #[arg(long)]
        graph: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidGraph(_)
        | Error::Parse(_)
        | Error::Io(_)
        | Error::UnknownVertex(_)
        | Error::UnknownEdge(_)
        | Error::UnknownFixture(_)
        | Error::NotLonger { .. }
        | Error::NonPositiveScale(_)
        | Error::SameVertex
        | Error::DirichletUnsupported(_)
        | Error::Disconnects
        | Error::StrengthMismatch { .. }
        | Error::BadAttachment(_)
        | Error::IdCollision(_)
        | Error::NotPendant(_)
        | Error::HypothesisViolated(_)
        | Error::NotDoublyConnected
        | Error::Discontinuous(_)
        | Error::NonzeroAtDirichlet(_)
        | Error::MissingPiece(_) => 2,
        Error::NoTorsion { .. } | Error::NotConnected => 3,
        Error::InconclusiveAccuracy { .. } => 4,
        _ => 1,
    }
}

fn load(path: &Path) -> Result<MetricGraph, Error> {
    MetricGraph::load(path).map_err(|e| match e {
        Error::Io(io) => Error::Parse(format!("{}: {io}", path.display())),
        other => other,
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

enum Rendered {
    /// Canonical text written verbatim.
    Text(String),
    Json(serde_json::Value),
    Csv(Table),
}

fn to_value(v: &impl Serialize) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable output")
}

fn run(cli: Cli) -> Result<Rendered, Error> {
    let fmt = |default: Format| cli.output.unwrap_or(default);
    match cli.command {
        Command::Torsion { graph } => {
            let g = load(&graph)?;
            let t = solve_torsion(&g)?;
            let r = rigidity(&t, &g);
            if fmt(Format::Json) == Format::Json {
                return Ok(Rendered::Json(json!({ "torsion": t, "rigidity": r })));
            }
            let mut tab = kv_table();
            for (v, x) in &t.vertex_values {
                tab.kv("vertex_value", v.as_str(), num(*x));
            }
            for (e, p) in g.edges.iter().zip(&t.edges) {
                tab.kv("edge_integral", e.id.as_str(), num(p.integral(e.length)));
            }
            tab.kv("rigidity", "", num(r));
            Ok(Rendered::Csv(tab))
        }
        Command::Positivity { graph } => {
            let v = classify_positivity(&load(&graph)?)?;
            if fmt(Format::Json) == Format::Json {
                return Ok(Rendered::Json(to_value(&v)));
            }
            let mut tab = kv_table();
            tab.kv(
                "classification",
                "",
                classification_name(v.classification).into(),
            );
            tab.kv(
                "sign_classification",
                "",
                classification_name(v.sign_classification).into(),
            );
            tab.kv("routes_agree", "", v.routes_agree.to_string());
            tab.kv("indeterminate", "", v.indeterminate.to_string());
            tab.kv("discrete_spectrum_min", "", num(v.discrete_spectrum_min));
            tab.kv("vertex_min", "", opt(v.vertex_min));
            tab.kv("n_negative", "", v.inertia.n_negative.to_string());
            tab.kv("n_zero", "", v.inertia.n_zero.to_string());
            tab.kv("n_positive", "", v.inertia.n_positive.to_string());
            tab.kv("zero_tolerance", "", num(v.inertia.zero_tolerance));
            Ok(Rendered::Csv(tab))
        }
        Command::Lambda1 {
            graph,
            target_error,
        } => {
            let r = lambda1(&load(&graph)?, target_error)?;
            if fmt(Format::Json) == Format::Json {
                return Ok(Rendered::Json(to_value(&r)));
            }
            let mut tab = Table::new(&[
                "level",
                "h_max",
                "dofs",
                "lambda1",
                "lambda1_refined",
                "error_estimate",
                "observed_order",
            ]);
            let last = r.levels.len() - 1;
            for (i, l) in r.levels.iter().enumerate() {
                let fin = i == last;
                tab.push(vec![
                    i.to_string(),
                    num(l.h_max),
                    l.dofs.to_string(),
                    num(l.lambda1),
                    if fin {
                        num(r.lambda1_refined)
                    } else {
                        String::new()
                    },
                    if fin {
                        num(r.error_estimate)
                    } else {
                        String::new()
                    },
                    if fin {
                        opt(r.observed_order)
                    } else {
                        String::new()
                    },
                ]);
            }
            Ok(Rendered::Csv(tab))
        }
        Command::Bounds { graph } => {
            let rep = bounds_report(&load(&graph)?)?;
            if fmt(Format::Json) == Format::Json {
                return Ok(Rendered::Json(to_value(&rep)));
            }
            let mut tab = Table::new(&[
                "name",
                "lhs",
                "rhs",
                "margin",
                "tolerance",
                "pass",
                "hypothesis_ok",
                "equality_case",
                "note",
            ]);
            for r in &rep.records {
                tab.push(vec![
                    r.name.clone(),
                    opt(r.lhs),
                    opt(r.rhs),
                    opt(r.margin),
                    num(r.tolerance),
                    r.pass.map(|b| b.to_string()).unwrap_or_default(),
                    r.hypothesis_ok.to_string(),
                    r.equality_case.to_string(),
                    r.note.clone().unwrap_or_default(),
                ]);
            }
            Ok(Rendered::Csv(tab))
        }
        Command::Gradient {
            graph,
            fd_check: with_fd,
            fd_step,
        } => {
            let g = load(&graph)?;
            let grad = gradient(&g)?;
            let fd = if with_fd {
                Some(fd_check(&g, fd_step)?)
            } else {
                None
            };
            if fmt(Format::Json) == Format::Json {
                let mut v = json!({ "gradient": grad });
                if let Some(rows) = &fd {
                    v["fd_check"] = to_value(rows);
                }
                return Ok(Rendered::Json(v));
            }
            let mut tab = Table::new(&[
                "parameter",
                "id",
                "analytic",
                "numeric",
                "step",
                "relative_error",
            ]);
            let name = |p: Parameter| match p {
                Parameter::Length => "length",
                Parameter::Strength => "strength",
            };
            match fd {
                Some(rows) => {
                    for r in rows {
                        tab.push(vec![
                            name(r.parameter).into(),
                            r.id,
                            num(r.analytic),
                            num(r.numeric),
                            num(r.step),
                            num(r.relative_error),
                        ]);
                    }
                }
                None => {
                    let blank = || vec![String::new(); 3];
                    for (id, d) in &grad.d_by_length {
                        tab.push(
                            [vec!["length".into(), id.to_string(), num(*d)], blank()].concat(),
                        );
                    }
                    for (id, d) in &grad.d_by_strength {
                        tab.push(
                            [vec!["strength".into(), id.to_string(), num(*d)], blank()].concat(),
                        );
                    }
                }
            }
            Ok(Rendered::Csv(tab))
        }
        Command::Surgery {
            graph,
            spec,
            compare: with_compare,
        } => {
            let g = load(&graph)?;
            let spec: SurgerySpec = read_json(&spec)?;
            let applied = apply(&g, &spec)?;
            let cmp = if with_compare {
                Some(compare(&g, &spec)?)
            } else {
                None
            };
            if fmt(Format::Json) == Format::Json {
                let mut v = json!({ "graph": applied.graph });
                if let Some(h) = applied.hypothesis_holds {
                    v["hypothesis_holds"] = json!(h);
                }
                if let Some(c) = &cmp {
                    v["comparison"] = to_value(c);
                }
                return Ok(Rendered::Json(v));
            }
            let mut tab = kv_table();
            for v in &applied.graph.vertices {
                let cell = v
                    .condition
                    .strength()
                    .map(num)
                    .unwrap_or_else(|| "dirichlet".into());
                tab.kv("vertex", v.id.as_str(), cell);
            }
            for e in &applied.graph.edges {
                tab.kv(
                    "edge",
                    e.id.as_str(),
                    format!("{} {} {}", e.tail, e.head, num(e.length)),
                );
            }
            if let Some(c) = cmp {
                tab.kv("rigidity_before", "", num(c.before));
                tab.kv("rigidity_after", "", num(c.after));
                tab.kv(
                    "prediction",
                    "",
                    to_value(&c.prediction)["kind"]
                        .as_str()
                        .unwrap_or_default()
                        .into(),
                );
                tab.kv(
                    "holds",
                    "",
                    c.holds.map(|b| b.to_string()).unwrap_or_default(),
                );
            }
            Ok(Rendered::Csv(tab))
        }
        Command::Sweep {
            graph,
            spec,
            target,
            id,
            from,
            to,
            steps,
            log,
            record,
            target_error,
        } => {
            let g = load(&graph)?;
            let spec = match spec {
                Some(p) => read_json::<SweepSpec>(&p)?,
                None => SweepSpec {
                    target: target.expect("required by clap"),
                    id: id.expect("required by clap"),
                    from: from.expect("required by clap"),
                    to: to.expect("required by clap"),
                    steps,
                    log,
                    record,
                },
            };
            let rows = sweep::run(&g, &spec, target_error)?;
            if fmt(Format::Csv) == Format::Json {
                return Ok(Rendered::Json(json!({ "spec": spec, "rows": rows })));
            }
            Ok(Rendered::Csv(sweep::table(&g, &spec, &rows)))
        }
        Command::Kj { lengths, alphas } => {
            let rows = kohler_jobin_explorer(&lengths, &alphas)?;
            if fmt(Format::Csv) == Format::Json {
                return Ok(Rendered::Json(json!({ "exploratory": true, "rows": rows })));
            }
            let mut tab = Table::new(&[
                "length",
                "alpha",
                "lambda1",
                "rigidity",
                "product",
                "proxy",
                "proxy_below_product",
                "constrained_bound",
                "constrained_holds",
            ]);
            for r in rows {
                tab.push(vec![
                    num(r.length),
                    num(r.alpha),
                    num(r.lambda1),
                    num(r.rigidity),
                    num(r.product),
                    num(r.proxy),
                    r.proxy_below_product.to_string(),
                    opt(r.constrained_bound),
                    r.constrained_holds
                        .map(|b| b.to_string())
                        .unwrap_or_default(),
                ]);
            }
            Ok(Rendered::Csv(tab))
        }
        Command::Fixtures { name, graph } => {
            let Some(name) = name else {
                let list: Vec<_> = all_fixtures()?
                    .into_iter()
                    .map(|f| json!({ "name": f.name, "description": f.description }))
                    .collect();
                if fmt(Format::Json) == Format::Json {
                    return Ok(Rendered::Json(json!(list)));
                }
                let mut tab = Table::new(&["name", "description"]);
                for f in list {
                    tab.push(vec![
                        f["name"].as_str().unwrap().into(),
                        f["description"].as_str().unwrap().into(),
                    ]);
                }
                return Ok(Rendered::Csv(tab));
            };
            if graph {
                return Ok(Rendered::Text(load_fixture(&name)?.graph.to_json()));
            }
            let fixtures = if name == "all" {
                all_fixtures()?
            } else {
                vec![load_fixture(&name)?]
            };
            let mut outcomes: Vec<CheckOutcome> = Vec::new();
            for f in &fixtures {
                outcomes.extend(check_fixture(f)?);
            }
            if fmt(Format::Json) == Format::Json {
                return Ok(Rendered::Json(to_value(&outcomes)));
            }
            let mut tab = Table::new(&[
                "fixture",
                "quantity",
                "expected",
                "observed",
                "pass",
                "discrepancy",
            ]);
            let cell = |v: &serde_json::Value| match v {
                serde_json::Value::Number(n) => {
                    n.as_f64().map(num).unwrap_or_else(|| n.to_string())
                }
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            for c in outcomes {
                tab.push(vec![
                    c.fixture,
                    c.quantity,
                    cell(&c.expected),
                    cell(&c.observed),
                    c.pass.to_string(),
                    c.discrepancy.unwrap_or_default(),
                ]);
            }
            Ok(Rendered::Csv(tab))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fixtures_check = matches!(
        &cli.command,
        Command::Fixtures {
            name: Some(_),
            graph: false
        }
    );
    match run(cli) {
        Ok(rendered) => {
            let mut stdout = io::stdout().lock();
            let written = match &rendered {
                Rendered::Text(t) => write!(stdout, "{t}"),
                Rendered::Json(v) => emit_json(v, stdout),
                Rendered::Csv(t) => t.write(stdout),
            };
            if let Err(e) = written.and_then(|_| io::stdout().flush()) {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            let failed_fixture = fixtures_check
                && match &rendered {
                    Rendered::Json(v) => v
                        .as_array()
                        .is_some_and(|a| a.iter().any(|c| c["pass"] == json!(false))),
                    Rendered::Csv(t) => t.rows.iter().any(|r| r[4] == "false"),
                    Rendered::Text(_) => false,
                };
            if failed_fixture {
                eprintln!("error: fixture check failed");
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
