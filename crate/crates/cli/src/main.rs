//! `kaehler`: curvature models, realizations and constant-scalar-curvature
//! potentials from the command line.
//!
//! Exit codes: 0 all checks passed, 1 a mathematical check failed, 2 bad input.

#![allow(clippy::result_large_err)]

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_traits::Zero;
use serde_json::{json, Value};

use kaehler_core::curvature::{curvature_at, kaehler_form_d, kaehler_form_d_at, random_points, scalar_curvature_at, Point};
use kaehler_core::decomposition::{split_norms, tv_project_closed_form, tv_project_gram};
use kaehler_core::fixtures::{fixture, FixtureFile, FIXTURE_NAMES};
use kaehler_core::identities::{check_bianchi, check_gray, check_kaehler, contractions, random_model, IdentityReport};
use kaehler_core::io::{from_json, to_json, MetricFile, ModelFile, PotentialFile, ThetaFile};
use kaehler_core::potential::solve_csc;
use kaehler_core::rational::{self, Rational};
use kaehler_core::realization::{apply_K, metric_from_theta, realize, PolynomialMetric, L};
use kaehler_core::structure::{one_based, quadruples, CurvatureModel, Kind, Structure, Tensor4, ThetaTensor};
use kaehler_core::Error;

use report::Report;

#[derive(Parser)]
#[command(name = "kaehler", version, about = "Exact (para-)Kaehler curvature toolkit")]
struct Cli {
    /// Emit machine-readable JSON reports.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Bianchi, Gray and Kaehler identities of a model.
    Check { model: PathBuf },
    /// Ricci, ⋆-Ricci, scalar and ⋆-scalar curvature of a model.
    Contract { model: PathBuf },
    /// Split a Kaehler model into its W1, W2, W3 parts.
    Decompose {
        model: PathBuf,
        /// Use the Gram projector (always used for the para kind).
        #[arg(long)]
        gram: bool,
        /// Directory for the three part models and a summary.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Realize a Kaehler model as the curvature of g0 + Θ_ijkl u^k u^l at the origin.
    Realize {
        model: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also write the polynomial metric.
        #[arg(long)]
        metric: Option<PathBuf>,
        /// Realize a seed-derived random Kaehler model instead of a file.
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value = "complex")]
        kind: Kind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Curvature of a polynomial metric at a point.
    Curvature {
        metric: PathBuf,
        /// Comma-separated rational coordinates, e.g. 1/4,0,0,0.
        #[arg(long)]
        at: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Verify that a Θ or metric file realizes a model.
    Verify {
        model: PathBuf,
        /// Theta file or metric file.
        realization: PathBuf,
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Constant-scalar-curvature potential for Θ ∈ ker K.
    Csc {
        theta: PathBuf,
        /// Target scalar curvature; defaults to the value at the origin.
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        /// Truncation degree N; defaults to 8 for m = 4 and 6 otherwise.
        #[arg(long)]
        degree: Option<u32>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Emit a built-in example; with -o DIR/ the parts go to separate files.
    Fixture {
        name: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Seed-derived random model.
    Random {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        kind: Kind,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        kaehler: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

type CliResult<T> = Result<T, Failure>;

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotKaehler { .. }
            | Error::NotInKernel
            | Error::NoSolution(_)
            | Error::LeadingCoefficientDegenerate => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| input_error(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> CliResult<CurvatureModel> {
    let f: ModelFile = from_json(&read(path)?)?;
    Ok(f.to_model()?)
}

fn load_theta(path: &Path) -> CliResult<ThetaTensor> {
    let f: ThetaFile = from_json(&read(path)?)?;
    Ok(f.to_theta()?)
}

fn load_metric(path: &Path) -> CliResult<PolynomialMetric> {
    let f: MetricFile = from_json(&read(path)?)?;
    Ok(f.to_metric()?)
}

fn show(p: &Path) -> String {
    p.display().to_string()
}

fn rat(r: &Rational) -> Value {
    Value::String(rational::to_string(r))
}

fn identity_check(report: &mut Report, r: &IdentityReport) {
    let witness = r.at.map(|at| json!({"at": at, "value": rational::to_string(&r.value)}));
    report.check(&r.identity.to_string(), r.holds, witness);
}

fn first_mismatch(a: &Tensor4, b: &Tensor4) -> Option<Value> {
    quadruples(a.m()).find(|q| a.get(*q) != b.get(*q)).map(|q| {
        json!({
            "at": one_based(q),
            "expected": rational::to_string(b.get(q)),
            "found": rational::to_string(a.get(q)),
        })
    })
}

fn model_json(s: &Structure, a: &Tensor4) -> Value {
    serde_json::to_value(ModelFile::from_tensor(s, a)).expect("serializable")
}

fn cmd_check(path: &Path) -> CliResult<Report> {
    let model = load_model(path)?;
    let mut r = Report::new("check", &[&show(path)]);
    identity_check(&mut r, &check_bianchi(&model));
    identity_check(&mut r, &check_gray(&model));
    identity_check(&mut r, &check_kaehler(&model));
    r.value("tau", rat(&contractions(&model).tau));
    Ok(r)
}

fn cmd_contract(path: &Path) -> CliResult<Report> {
    let model = load_model(path)?;
    let c = contractions(&model);
    let m = model.structure().m();
    let rows = |f: &dyn Fn(usize, usize) -> Rational| -> Value {
        (0..m)
            .map(|i| (0..m).map(|j| rat(&f(i, j))).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .into()
    };
    let mut r = Report::new("contract", &[&show(path)]);
    r.value("rho", rows(&|i, j| c.rho.get(i, j).clone()));
    r.value("rho_star", rows(&|i, j| c.rho_star[(i, j)].clone()));
    r.value("tau", rat(&c.tau));
    r.value("tau_star", rat(&c.tau_star));
    Ok(r)
}

fn cmd_decompose(path: &Path, gram: bool, out: Option<&Path>) -> CliResult<Report> {
    let model = load_model(path)?;
    let s = model.structure().clone();
    let mut r = Report::new("decompose", &[&show(path)]);
    let kaehler = check_kaehler(&model);
    identity_check(&mut r, &kaehler);
    if !kaehler.holds {
        return Ok(r);
    }
    let use_gram = gram || s.kind() == Kind::Para;
    let split = if use_gram {
        tv_project_gram(&model)?
    } else {
        tv_project_closed_form(&model)?
    };
    r.value("method", if use_gram { "gram" } else { "closed-form" });
    let norms = split_norms(&split, &s);
    r.value("norms", norms.iter().map(rat).collect::<Vec<_>>());
    let sum = split.p1.add(&split.p2).add(&split.p3);
    r.check("parts_sum_to_model", sum == *model.tensor(), first_mismatch(&sum, model.tensor()));
    if let Some(dir) = out {
        for (k, part) in split.parts().iter().enumerate() {
            let p = dir.join(format!("p{}.model.json", k + 1));
            write(&p, &to_json(&ModelFile::from_tensor(&s, part)))?;
            r.output(&show(&p));
        }
        let summary = json!({
            "m": s.m(),
            "kind": s.kind(),
            "method": if use_gram { "gram" } else { "closed-form" },
            "norms": norms.iter().map(rational::to_string).collect::<Vec<_>>(),
        });
        let p = dir.join("summary.json");
        write(&p, &(serde_json::to_string_pretty(&summary).expect("json") + "\n"))?;
        r.output(&show(&p));
    } else {
        for (k, part) in split.parts().iter().enumerate() {
            r.value(&format!("p{}", k + 1), model_json(&s, part));
        }
    }
    Ok(r)
}

fn theta_checks(r: &mut Report, theta: &ThetaTensor, model: &CurvatureModel) {
    let k = apply_K(theta);
    let nz = quadruples(k.m()).find(|q| !k.get(*q).is_zero());
    r.check(
        "theta_in_kernel",
        nz.is_none(),
        nz.map(|q| json!({"at": one_based(q), "value": rational::to_string(k.get(q))})),
    );
    let l = L(theta);
    r.check("L_theta_equals_model", l == *model.tensor(), first_mismatch(&l, model.tensor()));
}

struct RealizeArgs<'a> {
    model: Option<&'a Path>,
    out: Option<&'a Path>,
    metric: Option<&'a Path>,
    random: bool,
    m: usize,
    kind: Kind,
    seed: u64,
}

fn cmd_realize(a: RealizeArgs<'_>) -> CliResult<Report> {
    let (model, label) = match (a.random, a.model) {
        (true, None) => {
            let s = Structure::standard(a.m, a.kind)?;
            (random_model(&s, a.seed, true), format!("--random --m {} --kind {} --seed {}", a.m, a.kind, a.seed))
        }
        (false, Some(p)) => (load_model(p)?, show(p)),
        (true, Some(_)) => return Err(input_error("give either a model file or --random, not both")),
        (false, None) => return Err(input_error("missing model file (or --random)")),
    };
    let mut r = Report::new("realize", &[&label]);
    let kaehler = check_kaehler(&model);
    identity_check(&mut r, &kaehler);
    if !kaehler.holds {
        return Ok(r);
    }
    let theta = realize(&model)?;
    let text = to_json(&ThetaFile::from_theta(&theta));
    match a.out {
        Some(p) => {
            write(p, &text)?;
            r.output(&show(p));
            // re-check what was actually written
            let loaded = load_theta(p)?;
            theta_checks(&mut r, &loaded, &model);
        }
        None => {
            theta_checks(&mut r, &theta, &model);
            r.value("theta", serde_json::from_str::<Value>(&text).expect("json"));
        }
    }
    if a.random {
        r.value("model", model_json(model.structure(), model.tensor()));
    }
    if let Some(p) = a.metric {
        write(p, &to_json(&MetricFile::from_metric(&metric_from_theta(&theta))))?;
        r.output(&show(p));
    }
    Ok(r)
}

fn cmd_curvature(path: &Path, at: &str, out: Option<&Path>) -> CliResult<Report> {
    let g = load_metric(path)?;
    let p: Point = at.parse()?;
    let s = g.structure().clone();
    let curv = curvature_at(&g, &p)?;
    let tau = scalar_curvature_at(&g, &p)?;
    let mut r = Report::new("curvature", &[&show(path), &format!("--at {p}")]);
    let model = CurvatureModel::new(s.clone(), curv.clone())?;
    identity_check(&mut r, &check_bianchi(&model));
    r.value("tau", rat(&tau));
    match out {
        Some(o) => {
            write(o, &to_json(&ModelFile::from_tensor(&s, &curv)))?;
            r.output(&show(o));
        }
        None => r.value("curvature", model_json(&s, &curv)),
    }
    Ok(r)
}

fn cmd_verify(model_path: &Path, real_path: &Path, points: usize, seed: u64) -> CliResult<Report> {
    let model = load_model(model_path)?;
    let s = model.structure().clone();
    let text = read(real_path)?;
    let raw: Value = from_json(&text)?;
    let mut r = Report::new("verify", &[&show(model_path), &show(real_path)]);
    let g = if raw.get("Theta").is_some() {
        let theta = from_json::<ThetaFile>(&text)?.to_theta()?;
        theta_checks(&mut r, &theta, &model);
        metric_from_theta(&theta)
    } else if raw.get("entries").is_some() {
        load_metric(real_path)?
    } else {
        return Err(input_error(format!("{}: neither a Theta nor a metric file", show(real_path))));
    };
    if g.structure() != &s {
        return Err(input_error("model and realization have different dimension or kind"));
    }
    let origin = curvature_at(&g, &Point::origin(s.m()))?;
    r.check("origin_curvature", origin == *model.tensor(), first_mismatch(&origin, model.tensor()));

    let pts = random_points(&g, points, seed);
    let open = pts
        .iter()
        .find(|p| !kaehler_form_d_at(&g, p).map(|d| d.is_zero()).unwrap_or(false));
    r.check("kaehler_form_closed", open.is_none(), open.map(|p| json!({"point": p.to_string()})));
    let mut bad = None;
    for p in &pts {
        let c = CurvatureModel::new(s.clone(), curvature_at(&g, p)?)?;
        let k = check_kaehler(&c);
        if !k.holds {
            bad = Some(json!({"point": p.to_string(), "at": k.at, "value": rational::to_string(&k.value)}));
            break;
        }
    }
    r.check("pointwise_kaehler_identity", bad.is_none(), bad);
    r.value("points", points);
    r.value("seed", seed);
    Ok(r)
}

fn cmd_csc(path: &Path, c: Option<&str>, degree: Option<u32>, out: Option<&Path>) -> CliResult<Report> {
    let theta = load_theta(path)?;
    let s = theta.structure().clone();
    let g = metric_from_theta(&theta);
    let origin_tau = scalar_curvature_at(&g, &Point::origin(s.m()))?;
    let c = match c {
        Some(text) => rational::parse(text)?,
        None => origin_tau.clone(),
    };
    let n = degree.unwrap_or(if s.m() == 4 { 8 } else { 6 });
    let mut r = Report::new("csc", &[&show(path)]);
    let pot = solve_csc(&theta, &c, n)?;
    let h = pot.corrected_metric(&theta)?;
    r.check("cauchy_data_vanish", pot.cauchy_data_vanish(), (!pot.cauchy_data_vanish()).then(|| json!("phi has a monomial with u_m exponent < 4")));
    let origin = curvature_at(&h, &Point::origin(s.m()))?;
    let lt = L(&theta);
    r.check("origin_curvature_unchanged", origin == lt, first_mismatch(&origin, &lt));
    let d = kaehler_form_d(&h);
    let open = d.iter().position(|p| !p.is_zero()).map(|k| {
        let m = s.m();
        json!({"component": [k / (m * m) + 1, (k / m) % m + 1, k % m + 1]})
    });
    r.check("kaehler_form_closed", open.is_none(), open);
    r.value("c", rat(&c));
    r.value("origin_tau", rat(&origin_tau));
    r.value("N", n);
    r.value("residual_zero_through", pot.residual_zero_through);
    r.value("four_jet_vanishes", pot.four_jet_vanishes());
    r.value("phi_terms", pot.phi.poly().terms().count());
    let text = to_json(&PotentialFile::from_potential(&pot));
    match out {
        Some(p) => {
            write(p, &text)?;
            r.output(&show(p));
        }
        None => r.value("potential", serde_json::from_str::<Value>(&text).expect("json")),
    }
    Ok(r)
}

fn cmd_fixture(name: &str, out: Option<&Path>) -> CliResult<(Report, Option<String>)> {
    let f = fixture(name).map_err(|e| match e {
        Error::UnknownFixture(_) => input_error(format!("{e}; known: {}", FIXTURE_NAMES.join(", "))),
        other => other.into(),
    })?;
    let mut r = Report::new("fixture", &[name]);
    let Some(path) = out else {
        return Ok((r, Some(to_json(&f))));
    };
    let is_dir = path.is_dir() || path.to_string_lossy().ends_with('/');
    if !is_dir {
        write(path, &to_json(&f))?;
        r.output(&show(path));
        return Ok((r, None));
    }
    let mut parts: Vec<(String, String)> = Vec::new();
    match &f {
        FixtureFile::Jet { jet, .. } => {
            parts.push(("jet".into(), to_json(jet)));
            parts.push(("metric".into(), to_json(&jet.metric)));
        }
        FixtureFile::Surface { theta, metric, model, .. } => {
            parts.push(("model".into(), to_json(model)));
            parts.push(("theta".into(), to_json(theta)));
            parts.push(("metric".into(), to_json(metric)));
        }
    }
    for (suffix, text) in parts {
        let p = path.join(format!("{name}.{suffix}.json"));
        write(&p, &text)?;
        r.output(&show(&p));
    }
    Ok((r, None))
}

fn cmd_random(m: usize, kind: Kind, seed: u64, kaehler: bool, out: Option<&Path>) -> CliResult<(Report, Option<String>)> {
    let s = Structure::standard(m, kind)?;
    let model = random_model(&s, seed, kaehler);
    let text = to_json(&ModelFile::from_model(&model));
    let label = format!("--m {m} --kind {kind} --seed {seed}{}", if kaehler { " --kaehler" } else { "" });
    let mut r = Report::new("random", &[&label]);
    match out {
        Some(p) => {
            write(p, &text)?;
            r.output(&show(p));
            Ok((r, None))
        }
        None => Ok((r, Some(text))),
    }
}

fn run(cli: &Cli) -> CliResult<(Report, Option<String>)> {
    let plain = |r: CliResult<Report>| r.map(|r| (r, None));
    match &cli.command {
        Command::Check { model } => plain(cmd_check(model)),
        Command::Contract { model } => plain(cmd_contract(model)),
        Command::Decompose { model, gram, out } => plain(cmd_decompose(model, *gram, out.as_deref())),
        Command::Realize { model, out, metric, random, m, kind, seed } => plain(cmd_realize(RealizeArgs {
            model: model.as_deref(),
            out: out.as_deref(),
            metric: metric.as_deref(),
            random: *random,
            m: *m,
            kind: *kind,
            seed: *seed,
        })),
        Command::Curvature { metric, at, out } => plain(cmd_curvature(metric, at, out.as_deref())),
        Command::Verify { model, realization, points, seed } => plain(cmd_verify(model, realization, *points, *seed)),
        Command::Csc { theta, c, degree, out } => plain(cmd_csc(theta, c.as_deref(), *degree, out.as_deref())),
        Command::Fixture { name, out } => cmd_fixture(name, out.as_deref()),
        Command::Random { m, kind, seed, kaehler, out } => cmd_random(*m, *kind, *seed, *kaehler, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, payload)) => {
            // commands whose product is a document print it bare when not writing a file
            match payload {
                Some(text) => print!("{text}"),
                None if cli.json => print!("{}", report.to_json()),
                None => print!("{}", report.to_text()),
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            if cli.json {
                println!("{}", json!({"error": f.message, "exit_code": f.code}));
            } else {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
