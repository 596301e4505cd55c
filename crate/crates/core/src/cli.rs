//! Front-ends of the `polyan` binary: argument definitions and one `cmd_*` function per
//! subcommand. Each command writes its artifacts under `--out` and returns an [`Outcome`]
//! whose [`Outcome::exit_code`] the binary passes to the operating system.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::approx::{
    constructive_approximant, fit_theta, minimax_sweep, ApproxGrid, ApproxRecord, LawsonOptions, ThetaFit,
};
use crate::bounds::{
    check_appendix_81, check_appendix_82, check_appendix_83, check_bw, check_estm1, check_max_modulus, BoundReport,
    KernelGrid, MaxModulusVariant, SupGrid,
};
use crate::corpus::CorpusFunction;
use crate::decompose::{clustered_radii, components_from_circles, decompose_function, recommended_samples, CoefficientTable};
use crate::dynkin::{build_extension, dbar_decay_fit, DecayFit, Grid2D};
use crate::error::{Error, Result};
use crate::expansion::{build_blocks, certify_norms, default_radius, BlockExpansion, NormGrid};
use crate::io::{self, ExpansionDoc, ExtensionHeader, RunConfig};
use crate::poly::{random_poly, ComplexScalar};

#[derive(Debug, Parser)]
#[command(name = "polyan", version, about = "Gevrey-type polyanalytic functions: decomposition, expansions, bounds, extensions, approximation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover the coefficient table of a corpus function or of circle samples.
    Decompose(DecomposeArgs),
    /// Split a table into blocks and certify their norms on dilated disks.
    Expand(ExpandArgs),
    /// Run the inequality sweeps and write a bound report.
    Verify(VerifyArgs),
    /// Build the pseudoanalytic extension and fit the decay of its ∂̄^N.
    Dynkin(DynkinArgs),
    /// Estimate best-approximation errors and fit their decay law.
    Approx(ApproxArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output directory.
    #[arg(long, default_value = "polyan-out")]
    pub out: PathBuf,
    /// Sampling density (meaning depends on the subcommand).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Tolerance of the command's check.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print the JSON report on stdout.
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Print the primary CSV artifact on stdout.
    #[arg(long)]
    pub csv: bool,
}

/// Where the input function comes from.
#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Corpus id, e.g. `gevrey:c=1,k=1,N=2,Q=512`.
    #[arg(long)]
    pub corpus: Option<String>,
    /// Coefficient CSV (`component,power,re,im`).
    #[arg(long, conflicts_with = "corpus")]
    pub coeffs: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub corpus: Option<String>,
    /// Directory of sample files `*.csv`, each with a `*.json` sidecar.
    #[arg(long, conflicts_with = "corpus")]
    pub samples: Option<PathBuf>,
    /// Largest power to recover (default: the corpus truncation, or half the samples).
    #[arg(long)]
    pub q_max: Option<usize>,
    /// Circle radii for corpus input, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub source: Source,
    /// Gevrey exponent (default: the corpus generator's, else 1).
    #[arg(long)]
    pub k: Option<f64>,
    /// Certification radius (default: from the fitted decay rate).
    #[arg(long = "radius")]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Bounds,
    Appendix,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = Suite::Bounds)]
    pub suite: Suite,
    /// Random polynomials per sampled inequality.
    #[arg(long, default_value_t = 40)]
    pub instances: usize,
    /// Test hook: multiply every right-hand side by this factor before deciding `holds`.
    #[arg(long, hide = true)]
    pub inject_rhs_scale: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct DynkinArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub source: Source,
    /// Expansion JSON written by `expand` (instead of a corpus id or coefficients).
    #[arg(long, conflicts_with_all = ["corpus", "coeffs"])]
    pub expansion: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<f64>,
    /// Cutoff parameter `A` (default: the certification radius).
    #[arg(long)]
    pub a: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Constructive,
    Minimax,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, default_value_t = 128)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = MethodChoice::Both)]
    pub method: MethodChoice,
}

/// Result of a subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Whether the command's mathematical check passed.
    pub passed: bool,
    /// One-line summary for the terminal.
    pub summary: String,
    pub written: Vec<PathBuf>,
    /// Set when the failure is an internal defect rather than an expected negative verdict.
    pub internal: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match (self.passed, self.internal) {
            (true, _) => 0,
            (false, true) => 1,
            (false, false) => 2,
        }
    }
}

/// Parses the arguments, runs the command and returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            eprintln!("{}", outcome.summary);
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            if e.is_math_failure() {
                2
            } else {
                1
            }
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Decompose(a) => cmd_decompose(a),
        Command::Expand(a) => cmd_expand(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Dynkin(a) => cmd_dynkin(a),
        Command::Approx(a) => cmd_approx(a),
    }
}

fn base_config(command: &str, c: &Common) -> RunConfig {
    RunConfig {
        command: command.to_string(),
        grid: c.grid,
        tol: c.tol,
        seed: c.seed,
        out: Some(c.out.display().to_string()),
        ..RunConfig::default()
    }
}

fn write_json_file<T: Serialize>(path: &Path, kind: &str, config: &RunConfig, data: &T) -> Result<()> {
    let mut w = io::create(path)?;
    io::write_json(&mut w, kind, config, data)?;
    std::io::Write::flush(&mut w)?;
    Ok(())
}

fn echo(common: &Common, json: &Path, csv: Option<&Path>) -> Result<()> {
    let path = if common.json {
        Some(json)
    } else if common.csv {
        csv
    } else {
        None
    };
    if let Some(p) = path {
        print!("{}", std::fs::read_to_string(p)?);
    }
    Ok(())
}

fn load_corpus(id: &str) -> Result<CorpusFunction> {
    CorpusFunction::parse(id)
}

/// A coefficient table from `--corpus` or `--coeffs`, with the corpus entry when there is one.
fn load_table(source: &Source) -> Result<(CoefficientTable, Option<CorpusFunction>)> {
    match (&source.corpus, &source.coeffs) {
        (Some(id), _) => {
            let f = load_corpus(id)?;
            Ok((f.table(), Some(f)))
        }
        (None, Some(path)) => Ok((io::read_coefficients_csv(io::open(path)?)?, None)),
        (None, None) => Err(Error::InvalidInput("give --corpus or --coeffs".into())),
    }
}

#[derive(Debug, Serialize)]
struct DecomposeReport {
    source: String,
    order: usize,
    q_max: usize,
    radii: Vec<f64>,
    radii_defaulted: bool,
    samples_per_circle: usize,
    residual: f64,
    condition: f64,
    ill_conditioned: bool,
    /// Largest coefficient error against the generator (corpus input only).
    generator_error: Option<f64>,
    tolerance: f64,
    passed: bool,
}

/// `decompose`: `--grid` sets the samples per circle, `--tol` the accepted coefficient error
/// against the generator (default `1e-8`) or the accepted relative residual for sample input.
pub fn cmd_decompose(args: &DecomposeArgs) -> Result<Outcome> {
    let c = &args.common;
    let tol = c.tol.unwrap_or(1e-8);
    let mut config = base_config("decompose", c);
    let (decomp, report_source, generator, radii_defaulted, m) = match (&args.corpus, &args.samples) {
        (Some(id), _) => {
            let f = load_corpus(id)?;
            config = config.with("corpus", id);
            let q_max = args.q_max.unwrap_or(f.q_max);
            let (radii, defaulted) = match &args.radii {
                Some(r) => (r.clone(), false),
                None => (clustered_radii(f.order, q_max.max(f.q_max)), true),
            };
            if radii.len() != f.order {
                return Err(Error::InvalidInput(format!("order {} needs {} radii, got {}", f.order, f.order, radii.len())));
            }
            config = config.with("radii", format!("{radii:?}"));
            let m = c.grid.unwrap_or_else(|| recommended_samples(q_max.max(f.q_max), f.order));
            let poly = f.poly();
            let d = decompose_function(|z| poly.eval(z), &radii, m, q_max)?;
            (d, id.clone(), Some(f), defaulted, m)
        }
        (None, Some(dir)) => {
            config = config.with("samples", dir.display());
            let samples = io::read_samples_dir(dir)?;
            let m = samples.first().map_or(0, |s| s.len());
            let q_max = args.q_max.unwrap_or(m.saturating_sub(2 * samples.len() + 4) / 2);
            let d = components_from_circles(&samples, q_max)?;
            (d, dir.display().to_string(), None, false, m)
        }
        (None, None) => return Err(Error::InvalidInput("give --corpus or --samples".into())),
    };
    if let Some(q) = args.q_max {
        config = config.with("q_max", q);
    }
    let generator_error = generator.as_ref().map(|f| {
        let truth = f.table();
        let mut err = 0.0f64;
        for p in 0..decomp.table.order() {
            for q in 0..=decomp.table.q_max() {
                let t = if q <= truth.q_max() && p < truth.order() { truth.get(p, q) } else { ComplexScalar::new(0.0, 0.0) };
                err = err.max((decomp.table.get(p, q) - t).norm());
            }
        }
        err
    });
    let passed = match generator_error {
        Some(e) => e <= tol,
        None => decomp.residual <= tol.max(1e-8),
    };
    let report = DecomposeReport {
        source: report_source,
        order: decomp.table.order(),
        q_max: decomp.table.q_max(),
        radii: decomp.radii.clone(),
        radii_defaulted,
        samples_per_circle: m,
        residual: decomp.residual,
        condition: decomp.condition,
        ill_conditioned: decomp.ill_conditioned,
        generator_error,
        tolerance: tol,
        passed,
    };
    let csv_path = c.out.join("coefficients.csv");
    let json_path = c.out.join("decompose_report.json");
    let mut w = io::create(&csv_path)?;
    io::write_coefficients_csv(&mut w, &decomp.table, &config)?;
    std::io::Write::flush(&mut w)?;
    write_json_file(&json_path, "decompose_report", &config, &report)?;
    echo(c, &json_path, Some(&csv_path))?;
    Ok(Outcome {
        passed,
        summary: format!(
            "decompose: N={} Q={} residual={:.3e}{}{}",
            report.order,
            report.q_max,
            report.residual,
            generator_error.map(|e| format!(" generator_error={e:.3e}")).unwrap_or_default(),
            if radii_defaulted { " (default radii)" } else { "" }
        ),
        written: vec![csv_path, json_path],
        internal: false,
    })
}

#[derive(Debug, Serialize)]
struct ExpandFailure {
    error: String,
    message: String,
}

fn certify(table: &CoefficientTable, k: f64, r: Option<f64>, grid: NormGrid) -> Result<BlockExpansion> {
    let r = r.unwrap_or_else(|| default_radius(table, k));
    certify_norms(&build_blocks(table, k)?, r, grid)
}

fn norm_grid(c: &Common) -> NormGrid {
    NormGrid { angular: c.grid.unwrap_or(NormGrid::default().angular), ..NormGrid::default() }
}

/// `expand`: `--grid` sets the angular samples of the block norms, `--tol` the accepted
/// one-sided log residual of the certificate (default `0.3`).
pub fn cmd_expand(args: &ExpandArgs) -> Result<Outcome> {
    let c = &args.common;
    let (table, corpus) = load_table(&args.source)?;
    let k = args.k.or_else(|| corpus.as_ref().and_then(CorpusFunction::k)).unwrap_or(1.0);
    let tol = c.tol.unwrap_or(0.3);
    let mut config = base_config("expand", c).with("k", k);
    if let Some(id) = &args.source.corpus {
        config = config.with("corpus", id);
    }
    if let Some(p) = &args.source.coeffs {
        config = config.with("coeffs", p.display());
    }
    if let Some(r) = args.r {
        config = config.with("radius", r);
    }
    let json_path = c.out.join("expansion.json");
    match certify(&table, k, args.r, norm_grid(c)) {
        Ok(exp) => {
            let cert = exp.certificate()?;
            let passed = cert.trivial || cert.residual <= tol;
            let summary = format!(
                "expand: k={k} blocks={} R={:.4} C={:.4e} delta={:.4} residual={:.3}{}",
                exp.blocks.len(),
                cert.r,
                cert.c,
                cert.delta,
                cert.residual,
                if cert.trivial { " (trivial certificate)" } else { "" }
            );
            write_json_file(&json_path, "expansion", &config, &ExpansionDoc::from(&exp))?;
            echo(c, &json_path, None)?;
            Ok(Outcome { passed, summary, written: vec![json_path], internal: false })
        }
        Err(e) if e.is_math_failure() => {
            let failure = ExpandFailure { error: e.code().to_string(), message: e.to_string() };
            write_json_file(&json_path, "expansion_failure", &config, &failure)?;
            echo(c, &json_path, None)?;
            Ok(Outcome { passed: false, summary: format!("expand: {} ({e})", e.code()), written: vec![json_path], internal: false })
        }
        Err(e) => Err(e),
    }
}

/// The inequality sweeps behind `verify`.
pub fn verify_suite(suite: Suite, instances: usize, seed: u64, angular: usize) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Bounds | Suite::All) {
        for m in 2..=8 {
            for eps in [0.1, 0.2, 0.5, 1.0, 2.0] {
                out.push(check_estm1(m, eps)?);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = SupGrid { angular, radial: 16 };
        let zero = ComplexScalar::new(0.0, 0.0);
        for i in 0..instances {
            let order = rng.gen_range(1..=4);
            let degree = rng.gen_range(0..=12);
            let f = random_poly(order, degree, seed.wrapping_add(i as u64))?;
            let r0 = rng.gen_range(0.3..0.6);
            let r = r0 + rng.gen_range(0.2..0.6);
            let interior: Vec<f64> = (1..order).map(|j| r0 + (r - r0) * j as f64 / order as f64).collect();
            out.push(check_max_modulus(&f, zero, r0, r, &MaxModulusVariant::Circles(interior), grid)?);
            out.push(check_max_modulus(&f, zero, r0, r, &MaxModulusVariant::Annulus, grid)?);
            let p = rng.gen_range(0..order);
            out.push(check_max_modulus(&f, zero, r0, r, &MaxModulusVariant::Component(p), grid)?);
            let modulus = rng.gen_range(1.0..3.0f64).max(1.0 + 1e-6);
            let z = ComplexScalar::from_polar(modulus, rng.gen_range(0.0..std::f64::consts::TAU));
            out.push(check_bw(&f, degree, z, grid)?);
        }
    }
    if matches!(suite, Suite::Appendix | Suite::All) {
        for k in [0.5, 1.0, 2.0] {
            for b in [0.5, 1.0, 2.0] {
                out.push(check_appendix_81(b, k, 10_000)?);
                out.push(check_appendix_83(b, k, 2, 10_000)?);
            }
            out.push(check_appendix_82(1.0, 0.5, k, 10, KernelGrid::default())?);
        }
    }
    Ok(out)
}

/// `verify`: `--grid` sets the angular samples, `--seed` the random instances. Every
/// report must hold; a failure is a defect of the implementation (exit 1).
pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    let c = &args.common;
    let angular = c.grid.unwrap_or(1024);
    let mut config = base_config("verify", c)
        .with("suite", format!("{:?}", args.suite).to_lowercase())
        .with("instances", args.instances);
    let mut reports = verify_suite(args.suite, args.instances, c.seed, angular)?;
    if let Some(scale) = args.inject_rhs_scale {
        config = config.with("inject_rhs_scale", scale);
        reports = reports.into_iter().map(|r| BoundReport::new(r.name, r.parameters, r.lhs, r.rhs * scale)).collect();
    }
    let failed = reports.iter().filter(|r| !r.holds).count();
    let json_path = c.out.join("bounds.json");
    write_json_file(&json_path, "bound_reports", &config, &reports)?;
    echo(c, &json_path, None)?;
    Ok(Outcome {
        passed: failed == 0,
        summary: format!("verify: {} reports, {failed} failed", reports.len()),
        written: vec![json_path],
        internal: failed > 0,
    })
}

#[derive(Debug, Serialize)]
struct DynkinReport {
    extension: ExtensionHeader,
    fit: Option<DecayFit>,
    error: Option<String>,
    tolerance: f64,
    passed: bool,
}

/// `dynkin`: `--grid` sets the grid resolution (default 512), `--tol` the accepted
/// one-sided residual of the decay fit (default `0.5`).
pub fn cmd_dynkin(args: &DynkinArgs) -> Result<Outcome> {
    let c = &args.common;
    let tol = c.tol.unwrap_or(0.5);
    let mut config = base_config("dynkin", c);
    let exp = match &args.expansion {
        Some(path) => {
            config = config.with("expansion", path.display());
            let env = io::read_json::<ExpansionDoc>(io::open(path)?, "expansion")?;
            BlockExpansion::try_from(env.data)?
        }
        None => {
            let (table, corpus) = load_table(&args.source)?;
            let k = args.k.or_else(|| corpus.as_ref().and_then(CorpusFunction::k)).unwrap_or(1.0);
            if let Some(id) = &args.source.corpus {
                config = config.with("corpus", id);
            }
            config = config.with("k", k);
            certify(&table, k, None, NormGrid::default())?
        }
    };
    let k = exp.k;
    let a = args.a.unwrap_or(exp.certificate()?.r);
    config = config.with("A", a);
    let grid = Grid2D::new(1.0 + a + 0.01, c.grid.unwrap_or(512))?;
    let (_, field) = build_extension(&exp, a, grid)?;
    let (fit, error) = match dbar_decay_fit(&field, k) {
        Ok(f) => (Some(f), None),
        Err(e) if e.is_math_failure() || matches!(e, Error::InsufficientData(_)) => (None, Some(e.code().to_string())),
        Err(e) => return Err(e),
    };
    let passed = fit.as_ref().is_some_and(|f| f.c2 > 0.0 && f.residual <= tol);
    let report = DynkinReport { extension: ExtensionHeader::from(&field), fit: fit.clone(), error, tolerance: tol, passed };
    let json_path = c.out.join("extension.json");
    let csv_path = c.out.join("extension.csv");
    write_json_file(&json_path, "extension", &config, &report)?;
    let mut w = io::create(&csv_path)?;
    io::write_extension_csv(&mut w, &field, &config)?;
    std::io::Write::flush(&mut w)?;
    echo(c, &json_path, Some(&csv_path))?;
    let summary = match &fit {
        Some(f) => format!("dynkin: C1={:.4e} C2={:.4} residual={:.3} bins={}", f.c1, f.c2, f.residual, f.bins_used),
        None => format!("dynkin: no decay fit ({})", report.error.as_deref().unwrap_or("unknown")),
    };
    Ok(Outcome { passed, summary, written: vec![json_path, csv_path], internal: false })
}

#[derive(Debug, Serialize)]
struct ThetaSummary {
    method: String,
    fit: Option<ThetaFit>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct ApproxReport {
    fits: Vec<ThetaSummary>,
    /// Constructive records whose error exceeds the certified bound.
    bound_violations: usize,
    nonconverged: usize,
    constructive_skipped: Option<String>,
    passed: bool,
}

/// `approx`: `--grid` sets the angles per ring (default 256), `--tol` the relative
/// duality gap of the minimax solver (default `1e-2`).
pub fn cmd_approx(args: &ApproxArgs) -> Result<Outcome> {
    let c = &args.common;
    let (table, corpus) = load_table(&args.source)?;
    let k = args.k.or_else(|| corpus.as_ref().and_then(CorpusFunction::k)).unwrap_or(1.0);
    let mut config = base_config("approx", c).with("k", k).with("n_max", args.n_max).with("method", format!("{:?}", args.method).to_lowercase());
    if let Some(id) = &args.source.corpus {
        config = config.with("corpus", id);
    }
    let grid = ApproxGrid { angles: c.grid.unwrap_or(256), ..ApproxGrid::default() };
    let lawson = LawsonOptions { rel_gap: c.tol.unwrap_or(LawsonOptions::default().rel_gap), ..LawsonOptions::default() };
    let ns: Vec<usize> = (0..=args.n_max).collect();
    let mut records: Vec<ApproxRecord> = Vec::new();
    let mut constructive_skipped = None;

    if matches!(args.method, MethodChoice::Constructive | MethodChoice::Both) {
        match certify(&table, k, None, NormGrid::default()) {
            Ok(exp) => {
                for &n in &ns {
                    records.push(constructive_approximant(&exp, n, grid)?);
                }
            }
            Err(e) if e.is_math_failure() => constructive_skipped = Some(e.code().to_string()),
            Err(e) => return Err(e),
        }
    }
    if matches!(args.method, MethodChoice::Minimax | MethodChoice::Both) {
        let poly = table.to_poly();
        records.extend(minimax_sweep(|z| poly.eval(z), table.order(), &ns, grid, &lawson)?);
    }

    let mut fits = Vec::new();
    for method in [crate::approx::Method::Constructive, crate::approx::Method::Minimax] {
        let subset: Vec<ApproxRecord> = records.iter().filter(|r| r.method == method).cloned().collect();
        if subset.is_empty() {
            continue;
        }
        let (fit, error) = match fit_theta(&subset, k) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.code().to_string())),
        };
        fits.push(ThetaSummary { method: method.as_str().to_string(), fit, error });
    }
    let bound_violations = records.iter().filter(|r| r.bound.is_some_and(|b| r.e_value > b)).count();
    let nonconverged = records.iter().filter(|r| r.flag != crate::approx::ApproxFlag::Ok).count();
    let passed = constructive_skipped.is_none()
        && bound_violations == 0
        && !fits.is_empty()
        && fits.iter().all(|s| s.fit.as_ref().is_some_and(|f| f.accepted && f.beta > 0.0));
    let report = ApproxReport { fits, bound_violations, nonconverged, constructive_skipped, passed };

    let csv_path = c.out.join("approx.csv");
    let json_path = c.out.join("theta_fit.json");
    let mut w = io::create(&csv_path)?;
    io::write_approx_csv(&mut w, &records, &config)?;
    std::io::Write::flush(&mut w)?;
    write_json_file(&json_path, "theta_fit", &config, &report)?;
    echo(c, &json_path, Some(&csv_path))?;
    let fits_text: Vec<String> = report
        .fits
        .iter()
        .map(|s| match (&s.fit, &s.error) {
            (Some(f), _) => format!(
                "{}: alpha={:.4} beta={:.4} residual={:.3}{}",
                s.method,
                f.alpha,
                f.beta,
                f.residual,
                if f.accepted { "" } else { " REJECTED" }
            ),
            (None, e) => format!("{}: {}", s.method, e.as_deref().unwrap_or("no fit")),
        })
        .collect();
    Ok(Outcome {
        passed,
        summary: format!(
            "approx: {} records; {}{}",
            records.len(),
            fits_text.join("; "),
            report.constructive_skipped.as_ref().map(|e| format!("; constructive skipped ({e})")).unwrap_or_default()
        ),
        written: vec![csv_path, json_path],
        internal: false,
    })
}
