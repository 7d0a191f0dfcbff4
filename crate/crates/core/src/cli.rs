//! Command-line front end. Every subcommand computes all results first and
//! only then writes its outputs, each atomically.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{check_integral_lemma, check_scaling_lemmas, epsilon_sweep, fit_scaling, lemma_grid, FitModel, LemmaId, SweepConfig, SweepReport};
use crate::error::{Result, SbtError};
use crate::geometry::{validate_admissible_radius, validate_stretch, GeometrySpec, Vec3};
use crate::io::{config_hash, load_json, read_table, write_json, write_table, OutputTable, Provenance, RunConfig};
use crate::quadrature::chebyshev_roots;
use crate::residuals::{residual_sample, ForceConvention, ResidualOptions};
use crate::sbt::{sbt_eval_checked, ForceDensity, LForm, QuadratureSpec};

pub const THREADS_ENV: &str = "SBT_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "sbt-lab", version, about = "Slender body approximation for free-endpoint fibers in Stokes flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a geometry document: radius admissibility, stretch map, frame quality, ε guard.
    ValidateGeometry {
        #[arg(long)]
        geometry: PathBuf,
        /// Override the radius epsilon of the document.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Velocity and pressure at exterior points.
    Eval {
        #[command(flatten)]
        common: Common,
        /// CSV with columns x,y,z.
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// θ-residual, force residual and centerline gap on a Chebyshev s-grid.
    Residuals {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 101)]
        s_points: usize,
        #[arg(long, value_enum, default_value = "asymptotic")]
        l_form: LFormArg,
        #[arg(long, value_enum, default_value = "stretched")]
        force_convention: ConventionArg,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Residual maxima over an ε ladder plus scaling fits.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// JSON report; per-ε CSVs are written next to it.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Brute-force check of one integral bound.
    LemmaCheck {
        /// integral_est, est_free1, est_free1_new, aux_est, est_free2, est_free3, center_lem_free
        #[arg(long)]
        lemma: String,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        /// Geometry for the constant-bearing checks (default: straight prolate).
        #[arg(long)]
        geometry: Option<PathBuf>,
        /// constant or parabolic-decay
        #[arg(long, default_value = "parabolic-decay")]
        g: String,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.05, 0.025, 0.0125])]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 21)]
        s_points: usize,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit err ≈ C ε^p (pow) or C ε^p |log ε|^q (log, log:1.5) to a two-column CSV.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "pow")]
        model: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    geometry: PathBuf,
    /// constant:fx,fy,fz or parabolic:fx,fy,fz
    #[arg(long)]
    force: String,
    #[arg(long)]
    epsilon: Option<f64>,
    /// JSON quadrature settings.
    #[arg(long)]
    quadrature: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum LFormArg {
    Asymptotic,
    Lemma,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum ConventionArg {
    Stretched,
    PerArclength,
}

/// Parses argv and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            // explicit help and version succeed; every usage problem is an input error
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Thread count: SBT_LAB_THREADS, then the flag, then the config, then all cores.
pub fn resolve_threads(flag: Option<usize>, config: Option<usize>) -> Result<usize> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| SbtError::input(format!("{THREADS_ENV} = '{v}' is not a thread count")))?;
        if n == 0 {
            return Err(SbtError::input(format!("{THREADS_ENV} must be positive")));
        }
        return Ok(n);
    }
    match flag.or(config) {
        Some(0) => Err(SbtError::input("thread count must be positive")),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

fn load_geometry(path: &Path, epsilon: Option<f64>) -> Result<GeometrySpec> {
    let mut g: GeometrySpec = load_json(path)?;
    if let Some(e) = epsilon {
        if !(e > 0.0 && e <= 0.25) {
            return Err(SbtError::input(format!("epsilon = {e} outside (0, 0.25]")));
        }
        g = g.with_epsilon(e);
    }
    Ok(g)
}

fn load_common(c: &Common, command: &str) -> Result<(RunConfig, GeometrySpec, ForceDensity, QuadratureSpec)> {
    let geo = load_geometry(&c.geometry, c.epsilon)?;
    let force = ForceDensity::parse(&c.force)?;
    let quad = match &c.quadrature {
        Some(p) => load_json(p)?,
        None => QuadratureSpec::default(),
    };
    quad.validate()?;
    let mut rc = RunConfig::new(command);
    rc.geometry = Some(geo.clone());
    rc.force = Some(c.force.clone());
    rc.quadrature = quad;
    rc.epsilon = Some(geo.radius.epsilon);
    rc.validate()?;
    Ok((rc, geo, force, quad))
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::ValidateGeometry { geometry, epsilon, out } => validate_geometry(&geometry, epsilon, out.as_deref()),
        Command::Eval { common, points, out } => eval(&common, &points, &out),
        Command::Residuals { common, s_points, l_form, force_convention, threads, out } => {
            let opts = ResidualOptions {
                l_form: match l_form {
                    LFormArg::Asymptotic => LForm::Asymptotic,
                    LFormArg::Lemma => LForm::Lemma,
                },
                force_convention: match force_convention {
                    ConventionArg::Stretched => ForceConvention::Stretched,
                    ConventionArg::PerArclength => ForceConvention::PerArclength,
                },
            };
            residuals(&common, s_points, opts, threads, &out)
        }
        Command::Sweep { config, out, threads } => sweep(&config, &out, threads),
        Command::LemmaCheck { lemma, m, n, geometry, g, epsilons, s_points, theta, out } => {
            lemma_check(&lemma, m, n, geometry.as_deref(), &g, &epsilons, s_points, theta, &out)
        }
        Command::Fit { input, model, out } => fit(&input, &model, out.as_deref()),
    }
}

/// stdout write that tolerates a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn print_json<T: Serialize>(v: &T) {
    emit(&serde_json::to_string_pretty(v).expect("report serializes"));
}

fn validate_geometry(path: &Path, epsilon: Option<f64>, out: Option<&Path>) -> Result<i32> {
    let geo = load_geometry(path, epsilon)?;
    let centerline = geo.centerline()?;
    let profile = geo.radius_profile()?;
    let admissible = validate_admissible_radius(&profile, 4001);
    let stretch = geo.build_stretch(&profile)?;
    let stretch_report = validate_stretch(&stretch, profile.eta, profile.epsilon, 4001);
    let built = geo.build();
    let (frame, guard) = match &built {
        Ok(b) => (
            Some(json!({
                "orthonormality_drift": b.frame.orthonormality_drift(),
                "curvature_mismatch": b.frame.curvature_mismatch(),
                "max_twist": b.frame.max_twist(),
            })),
            None,
        ),
        Err(e) => (None, Some(e.to_string())),
    };
    let valid = admissible.all_pass() && stretch_report.pass && built.is_ok();
    let report = json!({
        "tool": Provenance::new(config_hash(&geo)),
        "epsilon": profile.epsilon,
        "c_gamma": centerline.c_gamma(),
        "kappa_max": centerline.kappa_max(),
        "r_max": built.as_ref().map(|b| b.r_max).ok(),
        "radius": admissible,
        "stretch": stretch_report,
        "frame": frame,
        "geometry_error": guard,
        "valid": valid,
    });
    if let Some(p) = out {
        write_json(&report, p)?;
    }
    print_json(&report);
    if valid {
        Ok(0)
    } else {
        eprintln!("error: geometry is not admissible");
        Ok(2)
    }
}

fn eval(common: &Common, points: &Path, out: &Path) -> Result<i32> {
    let (mut rc, geo, force, quad) = load_common(common, "eval")?;
    rc.inputs.push(points.to_path_buf());
    let body = geo.build()?;
    let (cols, rows) = read_table(points)?;
    let idx = |name: &str| cols.iter().position(|c| c == name).ok_or_else(|| SbtError::input(format!("{} lacks a '{name}' column", points.display())));
    let (ix, iy, iz) = (idx("x")?, idx("y")?, idx("z")?);
    let mut table = OutputTable::new(&["x", "y", "z", "ux", "uy", "uz", "p", "quad_warn"], Provenance::new(rc.hash()));
    let mut warned = 0;
    for r in &rows {
        let x = Vec3::new(r[ix], r[iy], r[iz]);
        let v = sbt_eval_checked(&body, &force, &x, &quad)?;
        warned += v.quad_warn as usize;
        table.push(vec![x.x, x.y, x.z, v.u.x, v.u.y, v.u.z, v.p, if v.quad_warn { 1.0 } else { 0.0 }])?;
    }
    if warned > 0 {
        eprintln!("warning: {warned} point(s) failed the quadrature refinement check");
    }
    write_table(&table, out)?;
    Ok(0)
}

fn residuals(common: &Common, s_points: usize, opts: ResidualOptions, threads: Option<usize>, out: &Path) -> Result<i32> {
    use rayon::prelude::*;
    let (mut rc, geo, force, quad) = load_common(common, "residuals")?;
    if s_points < 2 {
        return Err(SbtError::input("s-points must be at least 2"));
    }
    rc.l_form = opts.l_form;
    rc.force_convention = opts.force_convention;
    rc.extra.insert("s_points".into(), json!(s_points));
    let body = geo.build()?;
    let n = resolve_threads(threads, None)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| SbtError::numerical(e.to_string()))?;
    let grid = chebyshev_roots(s_points);
    let samples = pool.install(|| grid.par_iter().map(|&s| residual_sample(&body, &force, s, &quad, &opts)).collect::<Result<Vec<_>>>())?;
    let mut table = OutputTable::new(&["s", "theta_residual_sup", "fres_x", "fres_y", "fres_z", "centerline_gap"], Provenance::new(rc.hash()));
    for x in &samples {
        let f = x.force_residual;
        table.push(vec![x.s, x.theta_residual_sup, f.x, f.y, f.z, x.centerline_gap])?;
    }
    let warned: Vec<f64> = samples.iter().filter(|x| x.quad_warn).map(|x| x.s).collect();
    if !warned.is_empty() {
        eprintln!("warning: quadrature refinement check failed at s = {warned:?}");
    }
    write_table(&table, out)?;
    Ok(0)
}

/// Per-ε CSV name: residuals_eps<ε>.csv.
pub fn sweep_csv_name(epsilon: f64) -> String {
    format!("residuals_eps{epsilon}.csv")
}

pub const SWEEP_COLUMNS: [&str; 10] =
    ["s", "theta_residual_sup", "fres_x", "fres_y", "fres_z", "centerline_gap", "force_split_gap", "f_rho_residual", "f_t_norm", "quad_warn"];

/// Tables for every ε of a sweep, in ladder order.
pub fn sweep_tables(report: &SweepReport, hash: &str) -> Result<Vec<(f64, OutputTable)>> {
    let mut out = Vec::new();
    for run in &report.runs {
        let mut t = OutputTable::new(&SWEEP_COLUMNS, Provenance::new(hash));
        for x in &run.samples {
            let f = x.force_residual;
            t.push(vec![
                x.s,
                x.theta_residual_sup,
                f.x,
                f.y,
                f.z,
                x.centerline_gap,
                x.force_split_gap,
                x.f_rho_residual,
                x.f_t_norm,
                if x.quad_warn { 1.0 } else { 0.0 },
            ])?;
        }
        out.push((run.summary.epsilon, t));
    }
    Ok(out)
}

type SummaryColumn = (&'static str, fn(&crate::analysis::EpsilonSummary) -> f64);

fn sweep(config: &Path, out: &Path, threads: Option<usize>) -> Result<i32> {
    let cfg: SweepConfig = load_json(config)?;
    cfg.validate()?;
    let n = resolve_threads(threads, cfg.threads)?;
    let report = epsilon_sweep(&cfg, n)?;
    let hash = config_hash(&cfg);
    let tables = sweep_tables(&report, &hash)?;

    let mut fits = serde_json::Map::new();
    if report.runs.len() >= 3 {
        let columns: [SummaryColumn; 6] = [
            ("theta_residual", |s| s.theta_residual_max),
            ("force_residual", |s| s.force_residual_max),
            ("centerline_gap", |s| s.centerline_gap_max),
            ("force_split", |s| s.force_split_max),
            ("f_rho_residual", |s| s.f_rho_residual_max),
            ("f_t", |s| s.f_t_max),
        ];
        for (name, pick) in columns {
            let pairs = report.column(pick);
            let mut entry = serde_json::Map::new();
            for model in [FitModel::Pow, FitModel::LogCorrected { q: 1.0 }] {
                let v = match fit_scaling(&pairs, model) {
                    Ok(f) => json!(f),
                    Err(e) => json!({ "error": e.to_string() }),
                };
                entry.insert(model.tag(), v);
            }
            fits.insert(name.into(), serde_json::Value::Object(entry));
        }
    }
    let dir = out.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let doc = json!({
        "tool": Provenance::new(hash.clone()),
        "config": cfg,
        "threads": n,
        "window": report.window,
        "quad_warning_count": report.quad_warning_count(),
        "summaries": report.runs.iter().map(|r| &r.summary).collect::<Vec<_>>(),
        "csv": tables.iter().map(|(e, _)| sweep_csv_name(*e)).collect::<Vec<_>>(),
        "fits": fits,
    });
    for (e, t) in &tables {
        write_table(t, &dir.join(sweep_csv_name(*e)))?;
    }
    write_json(&doc, out)?;
    if report.quad_warning_count() > 0 {
        eprintln!("warning: {} quadrature refinement warnings, see the report", report.quad_warning_count());
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn lemma_check(
    lemma: &str,
    m: Option<u32>,
    n: Option<u32>,
    geometry: Option<&Path>,
    g: &str,
    epsilons: &[f64],
    s_points: usize,
    theta: f64,
    out: &Path,
) -> Result<i32> {
    if s_points < 1 {
        return Err(SbtError::input("s-points must be positive"));
    }
    let grid = lemma_grid(s_points);
    let mut rc = RunConfig::new("lemma-check");
    rc.epsilons = Some(epsilons.to_vec());
    rc.extra.insert("lemma".into(), json!(lemma));
    rc.extra.insert("m".into(), json!(m));
    rc.extra.insert("n".into(), json!(n));
    rc.extra.insert("g".into(), json!(g));
    rc.extra.insert("s_points".into(), json!(s_points));
    rc.extra.insert("theta".into(), json!(theta));

    if lemma == "integral_est" {
        let pairs: Vec<(u32, u32)> = match (m, n) {
            (Some(m), Some(n)) => vec![(m, n)],
            (Some(m), None) => (m + 1..=m + 4).map(|n| (m, n)).collect(),
            (None, _) => (0..=3).flat_map(|m| (m + 1..=m + 4).map(move |n| (m, n))).collect(),
        };
        let spec = match geometry {
            Some(p) => load_geometry(p, None)?,
            None => GeometrySpec::straight_prolate(0.1),
        };
        rc.geometry = Some(spec.clone());
        let mut table = OutputTable::new(&["m", "n", "epsilon", "s", "lhs", "rhs_bound", "pass"], Provenance::new(rc.hash()));
        let mut failures = 0usize;
        for &e in epsilons {
            let profile = spec.with_epsilon(e).radius_profile()?;
            for &(m, n) in &pairs {
                let r = check_integral_lemma(m, n, &profile, &grid)?;
                for x in &r.samples {
                    failures += !x.pass as usize;
                    table.push(vec![m as f64, n as f64, e, x.s, x.lhs, x.rhs_bound, if x.pass { 1.0 } else { 0.0 }])?;
                }
            }
        }
        write_table(&table, out)?;
        print_json(&json!({ "lemma": lemma, "checks": table.rows.len(), "failures": failures, "pass": failures == 0 }));
        return Ok(0);
    }

    let id = LemmaId::parse(lemma)?;
    let (dm, dn) = match id {
        LemmaId::EstFree1 | LemmaId::EstFree1New | LemmaId::CenterLemFree => (0, 1),
        LemmaId::AuxEst => (0, 1),
        LemmaId::EstFree2 => (1, 3),
        LemmaId::EstFree3 => (0, 3),
    };
    let (m, n) = (m.unwrap_or(dm), n.unwrap_or(dn));
    let spec = match geometry {
        Some(p) => load_geometry(p, None)?,
        None => GeometrySpec::straight_prolate(0.1),
    };
    rc.geometry = Some(spec.clone());
    let force = ForceDensity::parse(&format!("{g}:1,0,0"))?;
    let report = check_scaling_lemmas(&spec, id, m, n, &force, epsilons, &grid, theta)?;
    let mut table = OutputTable::new(&["epsilon", "s", "lhs", "form", "ratio", "alt_ratio", "limit_rel_error"], Provenance::new(rc.hash()));
    for r in &report.rows {
        table.push(vec![r.epsilon, r.s, r.lhs, r.form, r.ratio, r.alt_ratio.unwrap_or(f64::NAN), r.limit_rel_error.unwrap_or(f64::NAN)])?;
    }
    write_table(&table, out)?;
    print_json(&json!({
        "lemma": report.lemma,
        "m": report.m,
        "n": report.n,
        "g": report.g,
        "ratio_by_epsilon": report.ratio_by_epsilon,
        "alt_ratio_by_epsilon": report.alt_ratio_by_epsilon,
        "growth": report.growth,
        "spread": report.spread,
        "ca_term_dropped": report.ca_term_dropped,
        "d_mn": report.d_mn,
        "pass": report.pass,
    }));
    Ok(0)
}

fn fit(input: &Path, model: &str, out: Option<&Path>) -> Result<i32> {
    let model = FitModel::parse(model)?;
    let (cols, rows) = read_table(input)?;
    if cols.len() != 2 {
        return Err(SbtError::input(format!("{} must have exactly two columns (epsilon, error), found {}", input.display(), cols.len())));
    }
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[1])).collect();
    let f = fit_scaling(&pairs, model)?;
    emit(&format!("p={:.3} C={:.6e} r2={:.6} model={} points={}", f.p, f.c, f.r_squared, model.tag(), f.points));
    if let Some(p) = out {
        write_json(&f, p)?;
    }
    Ok(0)
}
