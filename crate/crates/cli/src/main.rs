//! `estlab` — reproducible Monte Carlo experiments for Diophantine
//! solution-count distributions.
//!
//! Every subcommand resolves its configuration, optionally echoes it
//! (`--dry-run`), runs the experiment with per-sample-seeded RNG streams,
//! and writes a machine-readable PMF table or report. Identical
//! configuration and seed give byte-identical output for any worker count.
//!
//! Exit codes: 0 success, 2 configuration error, 3 enumeration budget
//! exceeded.

mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rand::Rng;

use estlab::{
    compare, concentration_check, count_circle, count_curve, count_est_1d, count_kesten_1d,
    count_md, est_closed_form, estimate_distribution, estimate_lattice_pmf, make_sampler,
    moment_report, siegel_expectation, CountSpec, CurveSpec, DensityKind, EmpiricalDistribution,
    EquivariantProcess, ExponentMode, NormKind, Region, RegionFamily, SamplerSpec, VolumeMethod,
    YSign, DEFAULT_BUDGET,
};
use output::{distribution_csv, distribution_json, report_csv, report_json, Json, Summary};

#[derive(Parser)]
#[command(name = "estlab", version, about = "Solution-count distributions for Diophantine approximation: exact counters, Haar-random lattices, and Monte Carlo estimators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// 1-D solution counts with denominator window [c1 N, c2 N]
    Est(EstArgs),
    /// 1-D solution counts with |alpha q - p| <= A/N, 1 <= q <= N
    Kesten(KestenArgs),
    /// m x n systems of linear forms
    LinearForms(LinearFormsArgs),
    /// Targets on the Veronese curve (s, s^2, ..., s^n)
    Curve(CurveArgs),
    /// Circle averages of the integer-lattice point set
    Circle(CircleArgs),
    /// Haar-random unimodular planar lattices against a fixed region
    Lattice2(Lattice2Args),
    /// Total-variation and Kolmogorov-Smirnov distance between two runs
    Compare(CompareArgs),
    /// Moment report (and optional concentration check) for a saved run
    Moments(MomentsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum NormChoice {
    Sup,
    Euclid,
}

impl From<NormChoice> for NormKind {
    fn from(c: NormChoice) -> Self {
        match c {
            NormChoice::Sup => NormKind::Supremum,
            NormChoice::Euclid => NormKind::Euclidean,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExponentChoice {
    Consistent,
    Paper,
}

impl From<ExponentChoice> for ExponentMode {
    fn from(c: ExponentChoice) -> Self {
        match c {
            ExponentChoice::Consistent => ExponentMode::Consistent,
            ExponentChoice::Paper => ExponentMode::PaperLiteral,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerChoice {
    Uniform,
    Density,
    Window,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum RegionChoice {
    Wedge,
    Box,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum FormatChoice {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum VariantChoice {
    Est,
    Kesten,
}

#[derive(Args)]
struct CommonArgs {
    /// Monte Carlo sample count
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// Master seed; sample i draws from stream (seed, i)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all available cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatChoice::Csv)]
    format: FormatChoice,
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Validate and echo the resolved config without computing
    #[arg(long)]
    dry_run: bool,
}

#[derive(Args)]
struct WindowArgs {
    /// Window lower multiplier
    #[arg(long)]
    c1: Option<f64>,
    /// Window upper multiplier (shorthand for --c2)
    #[arg(long, conflicts_with = "c2")]
    c: Option<f64>,
    /// Window upper multiplier
    #[arg(long)]
    c2: Option<f64>,
}

impl WindowArgs {
    fn resolve(&self, defaults: (f64, f64)) -> (f64, f64) {
        (self.c1.unwrap_or(defaults.0), self.c.or(self.c2).unwrap_or(defaults.1))
    }
}

#[derive(Args)]
struct TargetSamplerArgs {
    /// How the target alpha is drawn
    #[arg(long, value_enum, default_value_t = SamplerChoice::Uniform)]
    sampler: SamplerChoice,
    /// Window center (sampler = window)
    #[arg(long)]
    x0: Option<f64>,
    /// Shrinking-window exponent: width N^-beta (sampler = window)
    #[arg(long)]
    beta: Option<f64>,
}

impl TargetSamplerArgs {
    fn spec(&self) -> Result<SamplerSpec, Failure> {
        Ok(match self.sampler {
            SamplerChoice::Uniform => SamplerSpec::uniform((0.0, 1.0))?,
            SamplerChoice::Density => SamplerSpec::density((0.0, 1.0), DensityKind::Linear2s)?,
            SamplerChoice::Window => {
                let (Some(x0), Some(beta)) = (self.x0, self.beta) else {
                    return Err(Failure::config("sampler window requires --x0 and --beta"));
                };
                SamplerSpec::window(x0, beta)?
            }
        })
    }

    fn name(&self) -> &'static str {
        match self.sampler {
            SamplerChoice::Uniform => "uniform",
            SamplerChoice::Density => "density",
            SamplerChoice::Window => "window",
        }
    }
}

#[derive(Args)]
struct EstArgs {
    /// Approximation quality A
    #[arg(long = "A")]
    a: f64,
    #[command(flatten)]
    window: WindowArgs,
    /// Scale parameter N
    #[arg(long = "N", default_value_t = 1000)]
    n_scale: u64,
    #[command(flatten)]
    target: TargetSamplerArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct KestenArgs {
    /// Approximation quality A
    #[arg(long = "A")]
    a: f64,
    /// Scale parameter N
    #[arg(long = "N", default_value_t = 1000)]
    n_scale: u64,
    #[command(flatten)]
    target: TargetSamplerArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct LinearFormsArgs {
    /// Number of forms (x-block dimension)
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Number of variables (y-block dimension)
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Approximation quality A
    #[arg(long = "A")]
    a: f64,
    /// Scale parameter N
    #[arg(long = "N", default_value_t = 300)]
    n_scale: u64,
    /// Which finite-scale variable to count
    #[arg(long, value_enum, default_value_t = VariantChoice::Kesten)]
    variant: VariantChoice,
    #[command(flatten)]
    window: WindowArgs,
    /// Norm on both blocks
    #[arg(long, value_enum, default_value_t = NormChoice::Sup)]
    norm: NormChoice,
    /// Exponent convention
    #[arg(long, value_enum, default_value_t = ExponentChoice::Consistent)]
    exponent: ExponentChoice,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CurveArgs {
    /// Curve dimension: targets (s, s^2, ..., s^n) with s uniform on [0, 1]
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Approximation quality A
    #[arg(long = "A")]
    a: f64,
    /// Scale parameter N
    #[arg(long = "N", default_value_t = 300)]
    n_scale: u64,
    /// Which finite-scale variable to count
    #[arg(long, value_enum, default_value_t = VariantChoice::Kesten)]
    variant: VariantChoice,
    #[command(flatten)]
    window: WindowArgs,
    /// Norm on the numerator block
    #[arg(long, value_enum, default_value_t = NormChoice::Sup)]
    norm: NormChoice,
    /// Exponent convention
    #[arg(long, value_enum, default_value_t = ExponentChoice::Consistent)]
    exponent: ExponentChoice,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CircleArgs {
    /// Target region family in the rotated frame
    #[arg(long, value_enum, default_value_t = RegionChoice::Wedge)]
    region: RegionChoice,
    /// Approximation quality A
    #[arg(long = "A")]
    a: f64,
    #[command(flatten)]
    window: WindowArgs,
    /// Scale parameter N
    #[arg(long = "N", default_value_t = 1000)]
    n_scale: u64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct Lattice2Args {
    /// Region family
    #[arg(long, value_enum, default_value_t = RegionChoice::Box)]
    region: RegionChoice,
    /// Approximation quality A
    #[arg(long = "A")]
    a: f64,
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// First saved run (CSV or JSON)
    file1: PathBuf,
    /// Second saved run (CSV or JSON)
    file2: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatChoice::Csv)]
    format: FormatChoice,
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Validate and echo the resolved config without computing
    #[arg(long)]
    dry_run: bool,
}

#[derive(Args)]
struct MomentsArgs {
    /// Saved run (CSV or JSON)
    file: PathBuf,
    /// x-block dimension (d = m + n)
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// y-block dimension (d = m + n)
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Concentration threshold: check P(|K - mean| > T sqrt(mean))
    #[arg(long = "T")]
    t: Option<f64>,
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatChoice::Csv)]
    format: FormatChoice,
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Validate and echo the resolved config without computing
    #[arg(long)]
    dry_run: bool,
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn config(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }
}

impl From<estlab::Error> for Failure {
    fn from(e: estlab::Error) -> Self {
        let code = if matches!(e, estlab::Error::Budget { .. }) { 3 } else { 2 };
        Failure { code, msg: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Est(args) => run_est(args),
        Command::Kesten(args) => run_kesten(args),
        Command::LinearForms(args) => run_linear_forms(args),
        Command::Curve(args) => run_curve(args),
        Command::Circle(args) => run_circle(args),
        Command::Lattice2(args) => run_lattice2(args),
        Command::Compare(args) => run_compare(args),
        Command::Moments(args) => run_moments(args),
    }
}

fn budget_from_env() -> Result<u64, Failure> {
    match std::env::var("ESTLAB_BUDGET") {
        Ok(v) => v
            .parse()
            .map_err(|_| Failure::config(format!("ESTLAB_BUDGET is not a valid integer: {v:?}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn resolved_workers(common: &CommonArgs) -> usize {
    common.workers.unwrap_or_else(|| {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    })
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn echo_config(common: &CommonArgs, mut fields: Vec<(String, Json)>) -> Result<(), Failure> {
    fields.push(("samples".into(), Json::Int(common.samples)));
    fields.push(("seed".into(), Json::Int(common.seed)));
    fields.push(("workers".into(), Json::Int(resolved_workers(common) as u64)));
    fields.push((
        "format".into(),
        Json::Str(if common.format == FormatChoice::Csv { "csv" } else { "json" }.into()),
    ));
    fields.push((
        "out".into(),
        Json::Str(common.out.as_ref().map_or("-".into(), |p| p.display().to_string())),
    ));
    fields.push(("budget".into(), Json::Int(budget_from_env()?)));
    let mut content = Json::Obj(fields).render();
    content.push('\n');
    write_output(&common.out, &content)
}

/// Runs the estimator in a pool of the requested size and renders the
/// distribution with per-subcommand summary rows.
fn run_experiment<C: Send>(
    common: &CommonArgs,
    process: EquivariantProcess<C>,
    region: &Region,
    summarize: impl FnOnce(&EmpiricalDistribution) -> Result<Summary, Failure>,
) -> Result<(), Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.workers.unwrap_or(0))
        .build()
        .map_err(|e| Failure::config(format!("cannot build worker pool: {e}")))?;
    let dist =
        pool.install(|| estimate_distribution(&process, region, common.samples, common.seed))?;
    let summary = summarize(&dist)?;
    let content = match common.format {
        FormatChoice::Csv => distribution_csv(&dist, &summary),
        FormatChoice::Json => distribution_json(&dist, summary),
    };
    write_output(&common.out, &content)
}

fn run_est(args: EstArgs) -> Result<(), Failure> {
    let (c1, c2) = args.window.resolve((1.0, 2.0));
    let region = Region::est_wedge_1d(args.a, c1, c2)?;
    let spec = args.target.spec()?;
    if args.common.dry_run {
        return echo_config(
            &args.common,
            vec![
                ("subcommand".into(), Json::Str("est".into())),
                ("A".into(), Json::Num(args.a)),
                ("c1".into(), Json::Num(c1)),
                ("c2".into(), Json::Num(c2)),
                ("N".into(), Json::Int(args.n_scale)),
                ("sampler".into(), Json::Str(args.target.name().into())),
            ],
        );
    }
    let n_scale = args.n_scale;
    let sampler = make_sampler(&spec, n_scale)?;
    let process = EquivariantProcess::new(
        move |rng| sampler(rng),
        move |alpha: &f64, region: &Region| {
            let (c1, c2) = region.window();
            Ok(count_est_1d(*alpha, region.a(), c1, c2, n_scale))
        },
    );
    let ratio = c2 / c1;
    let region_arg = region.clone();
    run_experiment(&args.common, process, &region_arg, move |_| {
        let mut summary: Summary = Vec::new();
        if let Ok(f) = est_closed_form(args.a, ratio) {
            summary.push(("closed_form_f", Json::Num(f)));
        }
        summary.push(("siegel_mean", Json::Num(siegel_expectation(&region))));
        Ok(summary)
    })
}

fn run_kesten(args: KestenArgs) -> Result<(), Failure> {
    let region = Region::kesten_box_1d(args.a)?;
    let spec = args.target.spec()?;
    if args.common.dry_run {
        return echo_config(
            &args.common,
            vec![
                ("subcommand".into(), Json::Str("kesten".into())),
                ("A".into(), Json::Num(args.a)),
                ("N".into(), Json::Int(args.n_scale)),
                ("sampler".into(), Json::Str(args.target.name().into())),
            ],
        );
    }
    let n_scale = args.n_scale;
    let sampler = make_sampler(&spec, n_scale)?;
    let process = EquivariantProcess::new(
        move |rng| sampler(rng),
        move |alpha: &f64, region: &Region| Ok(count_kesten_1d(*alpha, region.a(), n_scale)),
    );
    let a = args.a;
    let region_arg = region.clone();
    run_experiment(&args.common, process, &region_arg, move |_| {
        Ok(vec![
            // volume of the box is 2A, so the Siegel mean is 12A/pi^2
            ("siegel_mean", Json::Num(siegel_expectation(&region))),
            // the often-quoted value with |R_A| read as A instead of 2A
            (
                "siegel_mean_half_volume",
                Json::Num(6.0 / std::f64::consts::PI.powi(2) * a),
            ),
        ])
    })
}

fn md_region(
    family: RegionFamily,
    m: usize,
    n: usize,
    a: f64,
    window: (f64, f64),
    norm: NormKind,
    exponent: ExponentMode,
) -> Result<Region, Failure> {
    Ok(Region::new(family, m, n, a, window, norm, norm, exponent, YSign::PositiveCone)?)
}

fn md_summary(region: &Region, dist: &EmpiricalDistribution) -> Result<Summary, Failure> {
    let mut summary: Summary = vec![("siegel_mean", Json::Num(siegel_expectation(region)))];
    let (volume, method) = region.volume_detailed();
    if method == VolumeMethod::Numeric {
        summary.push(("volume", Json::Num(volume)));
        summary.push(("volume_method", Json::Str("numeric".into())));
    }
    let d = region.dim();
    let report = moment_report(dist, d)?;
    summary.push(("variance", Json::Num(report.variance)));
    if let (Some(bound), Some(ok)) = (report.variance_bound, report.bound_satisfied) {
        summary.push(("variance_bound", Json::Num(bound)));
        summary.push(("bound_satisfied", Json::Bool(ok)));
    }
    Ok(summary)
}

fn run_linear_forms(args: LinearFormsArgs) -> Result<(), Failure> {
    let norm: NormKind = args.norm.into();
    let exponent: ExponentMode = args.exponent.into();
    let budget = budget_from_env()?;
    let (spec, region, c1, c2) = match args.variant {
        VariantChoice::Est => {
            let (c1, c2) = args.window.resolve((1.0, 2.0));
            let spec =
                CountSpec::est(args.m, args.n, args.a, c1, c2, args.n_scale, norm, norm, exponent)?
                    .with_budget(budget);
            let region = md_region(
                RegionFamily::HyperbolicWedge,
                args.m,
                args.n,
                args.a,
                (c1, c2),
                norm,
                exponent,
            )?;
            (spec, region, c1, c2)
        }
        VariantChoice::Kesten => {
            let spec = CountSpec::kesten(args.m, args.n, args.a, args.n_scale, norm, norm, exponent)?
                .with_budget(budget);
            let region = md_region(
                RegionFamily::Box,
                args.m,
                args.n,
                args.a,
                (0.0, 1.0),
                norm,
                exponent,
            )?;
            (spec, region, 0.0, 1.0)
        }
    };
    if args.common.dry_run {
        return echo_config(
            &args.common,
            vec![
                ("subcommand".into(), Json::Str("linear-forms".into())),
                ("m".into(), Json::Int(args.m as u64)),
                ("n".into(), Json::Int(args.n as u64)),
                ("A".into(), Json::Num(args.a)),
                ("c1".into(), Json::Num(c1)),
                ("c2".into(), Json::Num(c2)),
                ("N".into(), Json::Int(args.n_scale)),
                (
                    "variant".into(),
                    Json::Str(
                        if args.variant == VariantChoice::Est { "est" } else { "kesten" }.into(),
                    ),
                ),
                (
                    "norm".into(),
                    Json::Str(if norm == NormKind::Supremum { "sup" } else { "euclid" }.into()),
                ),
                (
                    "exponent".into(),
                    Json::Str(
                        if exponent == ExponentMode::Consistent { "consistent" } else { "paper" }
                            .into(),
                    ),
                ),
            ],
        );
    }
    let (m, n) = (args.m, args.n);
    let process = EquivariantProcess::new(
        move |rng| {
            // column-major draw order, fixed for reproducibility
            let mut x = DMatrix::zeros(m, n);
            for j in 0..n {
                for i in 0..m {
                    x[(i, j)] = rng.gen_range(0.0..1.0);
                }
            }
            x
        },
        move |x: &DMatrix<f64>, _region: &Region| count_md(x, &spec),
    );
    let region_for_summary = region.clone();
    run_experiment(&args.common, process, &region, move |dist| {
        md_summary(&region_for_summary, dist)
    })
}

fn run_curve(args: CurveArgs) -> Result<(), Failure> {
    let norm: NormKind = args.norm.into();
    let exponent: ExponentMode = args.exponent.into();
    let budget = budget_from_env()?;
    let cspec = CurveSpec::veronese(args.n, (0.0, 1.0))?;
    let (spec, region, c1, c2) = match args.variant {
        VariantChoice::Est => {
            let (c1, c2) = args.window.resolve((1.0, 2.0));
            let spec =
                CountSpec::est(args.n, 1, args.a, c1, c2, args.n_scale, norm, norm, exponent)?
                    .with_budget(budget);
            let region = md_region(
                RegionFamily::HyperbolicWedge,
                args.n,
                1,
                args.a,
                (c1, c2),
                norm,
                exponent,
            )?;
            (spec, region, c1, c2)
        }
        VariantChoice::Kesten => {
            let spec = CountSpec::kesten(args.n, 1, args.a, args.n_scale, norm, norm, exponent)?
                .with_budget(budget);
            let region =
                md_region(RegionFamily::Box, args.n, 1, args.a, (0.0, 1.0), norm, exponent)?;
            (spec, region, 0.0, 1.0)
        }
    };
    if args.common.dry_run {
        return echo_config(
            &args.common,
            vec![
                ("subcommand".into(), Json::Str("curve".into())),
                ("n".into(), Json::Int(args.n as u64)),
                ("A".into(), Json::Num(args.a)),
                ("c1".into(), Json::Num(c1)),
                ("c2".into(), Json::Num(c2)),
                ("N".into(), Json::Int(args.n_scale)),
                (
                    "variant".into(),
                    Json::Str(
                        if args.variant == VariantChoice::Est { "est" } else { "kesten" }.into(),
                    ),
                ),
            ],
        );
    }
    let process = EquivariantProcess::new(
        move |rng| rng.gen_range(0.0..1.0f64),
        move |s: &f64, _region: &Region| count_curve(*s, &cspec, &spec),
    );
    let region_for_summary = region.clone();
    run_experiment(&args.common, process, &region, move |dist| {
        md_summary(&region_for_summary, dist)
    })
}

fn run_circle(args: CircleArgs) -> Result<(), Failure> {
    let budget = budget_from_env()?;
    let (family, (c1, c2)) = match args.region {
        RegionChoice::Wedge => (RegionFamily::HyperbolicWedge, args.window.resolve((1.0, 2.0))),
        RegionChoice::Box => (RegionFamily::Box, args.window.resolve((0.0, 1.0))),
    };
    let region = match family {
        RegionFamily::HyperbolicWedge => Region::est_wedge_1d(args.a, c1, c2)?,
        RegionFamily::Box => Region::kesten_box_1d(args.a)?,
    };
    if args.common.dry_run {
        return echo_config(
            &args.common,
            vec![
                ("subcommand".into(), Json::Str("circle".into())),
                (
                    "region".into(),
                    Json::Str(
                        if family == RegionFamily::HyperbolicWedge { "wedge" } else { "box" }
                            .into(),
                    ),
                ),
                ("A".into(), Json::Num(args.a)),
                ("c1".into(), Json::Num(c1)),
                ("c2".into(), Json::Num(c2)),
                ("N".into(), Json::Int(args.n_scale)),
            ],
        );
    }
    let (a, n_scale) = (args.a, args.n_scale);
    let process = EquivariantProcess::new(
        move |rng| rng.gen_range(0.0..std::f64::consts::TAU),
        move |theta: &f64, _region: &Region| {
            count_circle(*theta, a, c1, c2, n_scale, family, budget)
        },
    );
    let region_for_summary = region.clone();
    run_experiment(&args.common, process, &region, move |_| {
        Ok(vec![("siegel_mean", Json::Num(siegel_expectation(&region_for_summary)))])
    })
}

fn run_lattice2(args: Lattice2Args) -> Result<(), Failure> {
    let budget = budget_from_env()?;
    let region = match args.region {
        RegionChoice::Wedge => {
            let (c1, c2) = args.window.resolve((1.0, 2.0));
            Region::est_wedge_1d(args.a, c1, c2)?
        }
        RegionChoice::Box => {
            let (c1, c2) = args.window.resolve((0.0, 1.0));
            Region::new(
                RegionFamily::Box,
                1,
                1,
                args.a,
                (c1, c2),
                NormKind::Supremum,
                NormKind::Supremum,
                ExponentMode::Consistent,
                YSign::PositiveCone,
            )?
        }
    };
    if args.common.dry_run {
        let (c1, c2) = region.window();
        return echo_config(
            &args.common,
            vec![
                ("subcommand".into(), Json::Str("lattice2".into())),
                (
                    "region".into(),
                    Json::Str(
                        if args.region == RegionChoice::Wedge { "wedge" } else { "box" }.into(),
                    ),
                ),
                ("A".into(), Json::Num(args.a)),
                ("c1".into(), Json::Num(c1)),
                ("c2".into(), Json::Num(c2)),
            ],
        );
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.common.workers.unwrap_or(0))
        .build()
        .map_err(|e| Failure::config(format!("cannot build worker pool: {e}")))?;
    let dist = pool
        .install(|| estimate_lattice_pmf(&region, args.common.samples, args.common.seed, budget))?;
    let summary: Summary = vec![("siegel_mean", Json::Num(siegel_expectation(&region)))];
    let content = match args.common.format {
        FormatChoice::Csv => distribution_csv(&dist, &summary),
        FormatChoice::Json => distribution_json(&dist, summary),
    };
    write_output(&args.common.out, &content)
}

fn run_compare(args: CompareArgs) -> Result<(), Failure> {
    if args.dry_run {
        let fields = vec![
            ("subcommand".into(), Json::Str("compare".into())),
            ("file1".into(), Json::Str(args.file1.display().to_string())),
            ("file2".into(), Json::Str(args.file2.display().to_string())),
        ];
        let mut content = Json::Obj(fields).render();
        content.push('\n');
        return write_output(&args.out, &content);
    }
    let d1 = input::read_distribution(&args.file1).map_err(Failure::config)?;
    let d2 = input::read_distribution(&args.file2).map_err(Failure::config)?;
    let cmp = compare(&d1, &d2)?;
    let rows: Summary = vec![("tv", Json::Num(cmp.tv)), ("ks", Json::Num(cmp.ks))];
    let content = match args.format {
        FormatChoice::Csv => report_csv(&rows),
        FormatChoice::Json => report_json(rows),
    };
    write_output(&args.out, &content)
}

fn run_moments(args: MomentsArgs) -> Result<(), Failure> {
    let d = args.m + args.n;
    if args.dry_run {
        let mut fields = vec![
            ("subcommand".into(), Json::Str("moments".into())),
            ("file".into(), Json::Str(args.file.display().to_string())),
            ("m".into(), Json::Int(args.m as u64)),
            ("n".into(), Json::Int(args.n as u64)),
        ];
        if let Some(t) = args.t {
            fields.push(("T".into(), Json::Num(t)));
        }
        let mut content = Json::Obj(fields).render();
        content.push('\n');
        return write_output(&args.out, &content);
    }
    let dist = input::read_distribution(&args.file).map_err(Failure::config)?;
    let report = moment_report(&dist, d)?;
    let mut rows: Summary = vec![
        ("mean", Json::Num(report.mean)),
        ("variance", Json::Num(report.variance)),
        ("se_mean", Json::Num(report.se_mean)),
        ("samples", Json::Int(report.samples)),
    ];
    if let (Some(bound), Some(ok)) = (report.variance_bound, report.bound_satisfied) {
        rows.push(("variance_bound", Json::Num(bound)));
        rows.push(("bound_satisfied", Json::Bool(ok)));
    }
    if let Some(t) = args.t {
        let conc = concentration_check(&dist, d, t)?;
        rows.push(("tail_frequency", Json::Num(conc.tail_frequency)));
        rows.push(("concentration_bound", Json::Num(conc.bound)));
        rows.push(("concentration_satisfied", Json::Bool(conc.satisfied)));
    }
    let content = match args.format {
        FormatChoice::Csv => report_csv(&rows),
        FormatChoice::Json => report_json(rows),
    };
    write_output(&args.out, &content)
}
