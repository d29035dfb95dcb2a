use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use jacobi_rh::asymptotics::{error_scaling, predict};
use jacobi_rh::fields::FieldContext;
use jacobi_rh::geometry::{build_geometry, Contour, ContourKind, GeometryBundle, Side};
use jacobi_rh::io::{self, envelope, OutputKind, Scenario};
use jacobi_rh::jacobi::{build_poly, counting_measure, eval_monic, find_zeros, precision_for, to_c64, ZeroSet};
use jacobi_rh::params::{classify, CaseTag, FiniteParams, ParamPair};
use jacobi_rh::validation::{compare_weak, estimate_r, mass_identities, real_zero_count, RParameter};
use jacobi_rh::{Error, ErrorKind};

#[derive(Parser)]
#[command(name = "jacobi-rh", version, about = "Jacobi polynomials with varying parameters")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the case tag of (A, B)
    Classify(PairArgs),
    /// Branch points and contours as CSV, JSON and SVG
    Geometry {
        #[command(flatten)]
        pair: PairArgs,
        /// Also trace the level curve Γ_r (case C3)
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Zeros of P_n^(alpha,beta) as CSV and JSON
    Zeros {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact value and asymptotic prediction at one point
    Predict {
        #[command(flatten)]
        poly: PolyArgs,
        /// Evaluation point as RE,IM
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, value_enum)]
        side: Option<SideArg>,
    },
    /// Run a scenario file
    Validate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reproduce the zero plots of the built-in scenarios
    Figures {
        #[arg(long)]
        paper_set: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct PairArgs {
    #[arg(long = "A", allow_hyphen_values = true)]
    a: f64,
    #[arg(long = "B", allow_hyphen_values = true)]
    b: f64,
}

#[derive(Args)]
struct PolyArgs {
    #[arg(long)]
    n: u32,
    /// Decimal, kept exactly in multiprecision
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
}

impl PolyArgs {
    fn params(&self) -> Result<FiniteParams, Error> {
        FiniteParams::parse(self.n, &self.alpha, &self.beta)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Plus,
    Minus,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::BadInput => 2,
                ErrorKind::Unsupported => 3,
                ErrorKind::Numerical => 4,
            };
            let diag = json!({ "format": io::FORMAT, "kind": "error", "exit_code": code, "message": e.to_string() });
            eprintln!("{diag}");
            ExitCode::from(code)
        }
    }
}

fn run(cmd: Cmd) -> Result<(), Error> {
    match cmd {
        Cmd::Classify(p) => {
            let c = classify(ParamPair::new(p.a, p.b)?);
            println!("{}", c.tag);
            Ok(())
        }
        Cmd::Geometry { pair, r, out } => {
            let g = build_geometry(ParamPair::new(pair.a, pair.b)?)?;
            let summary = write_geometry(&g, r, &out)?;
            print_json(&summary);
            Ok(())
        }
        Cmd::Zeros { poly, out } => {
            let fp = poly.params()?;
            let zs = zeros_of(&fp)?;
            fs::create_dir_all(&out)?;
            io::write_zeros_csv(fs::File::create(out.join("zeros.csv"))?, &zs)?;
            let v = envelope("zeros", &io::ZeroSetSummary::from(&zs))?;
            write_json(&out.join("zeros.json"), &v)?;
            print_json(&json!({ "format": io::FORMAT, "kind": "zeros", "n": zs.n, "residual": zs.residual, "out": out }));
            Ok(())
        }
        Cmd::Predict { poly, z, side } => {
            let fp = poly.params()?;
            let z = parse_point(&z)?;
            let side = match side {
                Some(SideArg::Plus) => Side::Plus,
                Some(SideArg::Minus) => Side::Minus,
                None => Side::None,
            };
            print_json(&predict_json(&fp, z, side)?);
            Ok(())
        }
        Cmd::Validate { scenario, out } => {
            let s = Scenario::from_json(&fs::read_to_string(&scenario)?)?;
            let v = run_scenario(&s, &out)?;
            print_json(&v);
            Ok(())
        }
        Cmd::Figures { paper_set, out } => {
            if !paper_set {
                return Err(Error::InvalidParameter("only --paper-set is available".into()));
            }
            let mut runs = Vec::new();
            for s in io::figure_scenarios() {
                runs.push(run_scenario(&s, &out.join(&s.name))?);
            }
            print_json(&json!({ "format": io::FORMAT, "kind": "figures", "runs": runs }));
            Ok(())
        }
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values always serialize"));
}

fn write_json(path: &Path, v: &Value) -> Result<(), Error> {
    fs::write(path, serde_json::to_string_pretty(v)? + "\n")?;
    Ok(())
}

fn parse_point(s: &str) -> Result<Complex64, Error> {
    let bad = || Error::InvalidParameter(format!("--z expects RE,IM, got {s:?}"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn zeros_of(fp: &FiniteParams) -> Result<ZeroSet, Error> {
    find_zeros(&build_poly(fp, precision_for(fp))?)
}

fn contour_name(c: &Contour) -> String {
    match c.kind {
        ContourKind::Gamma => "gamma".into(),
        ContourKind::GammaR(r) => format!("gamma_r{r}"),
        ContourKind::Segment => "segment".into(),
        ContourKind::GammaPlusOrth => "gamma_plus_orth".into(),
        ContourKind::GammaMinusOrth => "gamma_minus_orth".into(),
    }
}

fn write_geometry(g: &GeometryBundle, r: Option<f64>, out: &Path) -> Result<Value, Error> {
    fs::create_dir_all(out)?;
    let mut contours: Vec<Contour> = g.sigma.clone();
    if let Some(orth) = &g.orth {
        contours.extend(orth.iter().cloned());
    }
    if let Some(r) = r {
        if g.tag() != CaseTag::C3 {
            return Err(Error::Unsupported(format!("level curves Gamma_r are defined in case C3, not {}", g.tag())));
        }
        contours.push(g.trace_gamma_r(r)?);
    }
    let mut files = Vec::new();
    for c in &contours {
        let name = format!("{}.csv", contour_name(c));
        io::write_contour_csv(fs::File::create(out.join(&name))?, c)?;
        files.push(json!({ "file": name, "kind": c.kind, "closed": c.closed, "orientation": c.orientation, "level": c.level, "vertices": c.points.len() }));
    }
    let refs: Vec<&Contour> = contours.iter().collect();
    fs::write(out.join("geometry.svg"), io::svg(&refs, &[]))?;
    let v = json!({
        "format": io::FORMAT,
        "kind": "geometry",
        "A": g.params.a,
        "B": g.params.b,
        "case": g.case,
        "branch_points": g.bp,
        "epsilon": g.epsilon(),
        "contours": files,
    });
    write_json(&out.join("geometry.json"), &v)?;
    Ok(v)
}

fn predict_json(fp: &FiniteParams, z: Complex64, side: Side) -> Result<Value, Error> {
    let exact = to_c64(&eval_monic(fp, z)?);
    let ratio = fp.ratio();
    let case = classify(ratio);
    let (prediction, rel, note) = if matches!(case.tag, CaseTag::C2 | CaseTag::C3) {
        let ctx = FieldContext::new(ratio)?;
        match predict(&ctx, fp, z, side) {
            Ok(p) => {
                let rel = ((exact - p.value) / p.value).norm();
                (serde_json::to_value(&p)?, json!(rel), Value::Null)
            }
            Err(e) if e.kind() == ErrorKind::Unsupported => (Value::Null, Value::Null, Value::String(e.to_string())),
            Err(e) => return Err(e),
        }
    } else {
        (Value::Null, Value::Null, Value::String(format!("no asymptotic formula for case {}", case.tag)))
    };
    Ok(json!({
        "format": io::FORMAT,
        "kind": "prediction",
        "n": fp.n,
        "alpha": jacobi_rh::params::float_string(&fp.alpha),
        "beta": jacobi_rh::params::float_string(&fp.beta),
        "case": case,
        "z": [z.re, z.im],
        "exact_monic": [exact.re, exact.im],
        "prediction": prediction,
        "relative_error": rel,
        "note": note,
    }))
}

fn run_scenario(s: &Scenario, out: &Path) -> Result<Value, Error> {
    fs::create_dir_all(out)?;
    let pair = ParamPair::new(s.a, s.b)?;
    let wants = |k: OutputKind| s.outputs.is_empty() || s.outputs.contains(&k);
    let needs_ctx = wants(OutputKind::Discrepancy) || wants(OutputKind::Masses) || wants(OutputKind::Geometry);
    let ctx = if needs_ctx && matches!(classify(pair).tag, CaseTag::C2 | CaseTag::C3) {
        Some(FieldContext::new(pair)?)
    } else {
        None
    };
    let mut report = serde_json::Map::new();
    report.insert("format".into(), json!(io::FORMAT));
    report.insert("kind".into(), json!("scenario"));
    report.insert("scenario".into(), serde_json::to_value(s)?);
    if wants(OutputKind::Geometry) {
        if let Some(ctx) = &ctx {
            let r = s.r.filter(|_| ctx.tag() == CaseTag::C3);
            report.insert("geometry".into(), write_geometry(&ctx.geometry, r, &out.join("geometry"))?);
        }
    }
    let mut runs = Vec::new();
    for n in s.n.to_vec() {
        let fp = s.params(n)?;
        let mut run = serde_json::Map::new();
        run.insert("n".into(), json!(n));
        run.insert("alpha".into(), json!(jacobi_rh::params::float_string(&fp.alpha)));
        run.insert("beta".into(), json!(jacobi_rh::params::float_string(&fp.beta)));
        let need_zeros = wants(OutputKind::Zeros) || wants(OutputKind::Discrepancy) || wants(OutputKind::Svg);
        if need_zeros {
            let zs = zeros_of(&fp)?;
            if wants(OutputKind::Zeros) {
                io::write_zeros_csv(fs::File::create(out.join(format!("zeros_n{n}.csv")))?, &zs)?;
                write_json(&out.join(format!("zeros_n{n}.json")), &envelope("zeros", &io::ZeroSetSummary::from(&zs))?)?;
            }
            run.insert("real_zero_count".into(), serde_json::to_value(real_zero_count(&zs))?);
            let r = match s.r {
                Some(r) => RParameter::given(r),
                None => estimate_r(&fp.alpha, n),
            };
            if let (true, Some(ctx)) = (wants(OutputKind::Discrepancy), &ctx) {
                let rep = compare_weak(&counting_measure(&zs), ctx, r)?;
                run.insert("discrepancy".into(), serde_json::to_value(rep)?);
            }
            if wants(OutputKind::Svg) {
                let mut cs: Vec<Contour> = Vec::new();
                if let Some(ctx) = &ctx {
                    cs = ctx.geometry.sigma.clone();
                    if ctx.tag() == CaseTag::C3 {
                        if let Some(rv) = r.r.filter(|&v| v > 0.0) {
                            cs.push(ctx.geometry.trace_gamma_r(rv)?);
                        }
                    }
                }
                let refs: Vec<&Contour> = cs.iter().collect();
                fs::write(out.join(format!("zeros_n{n}.svg")), io::svg(&refs, &zs.zeros()))?;
            }
        }
        runs.push(Value::Object(run));
    }
    report.insert("runs".into(), Value::Array(runs));
    if let (true, Some(ctx)) = (wants(OutputKind::Masses), &ctx) {
        let mut grid = vec![RParameter::given(0.0), RParameter::given(0.5), RParameter::given(2.0), RParameter::given(f64::INFINITY)];
        if let Some(r) = s.r {
            grid.push(RParameter::given(r));
        }
        report.insert("masses".into(), serde_json::to_value(mass_identities(ctx, &grid)?)?);
    }
    let degrees = s.n.to_vec();
    if wants(OutputKind::Scaling) && degrees.len() >= 3 {
        // One point well outside every contour.
        let z = Complex64::new(1.5, 1.5);
        let sc = error_scaling(&degrees, |n| s.params(n), z, Side::None)?;
        report.insert("error_scaling".into(), json!({ "z": [z.re, z.im], "fit": sc }));
    }
    let v = Value::Object(report);
    write_json(&out.join("report.json"), &v)?;
    Ok(v)
}
