//! `hhl`: batch front end for synthesis, decomposition, verification,
//! extension and silent-potential runs.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use hardy_hodge::extension::{
    hardy_norm_profile, laplace_residual, monogenicity_residual, poisson_extend, write_slab, MonogenicSystem,
    NewtonSign, Side,
};
use hardy_hodge::grid::{FieldKind, GridSpec, SampledField};
use hardy_hodge::hodge::{decompose, decompose_quaternionic, DcMode, DecomposeOptions, DecompositionReport};
use hardy_hodge::io::{read_field, write_field, write_json, write_sidecar};
use hardy_hodge::silent::{probe_grid, silent_experiment, PlaneFrame};
use hardy_hodge::spectral::{DcPolicy, MultiplierPlan};
use hardy_hodge::suite::{self, Corpus, Suite};
use hardy_hodge::synth::{synth_field, Recipe};
use hardy_hodge::Error;

#[derive(Parser, Serialize)]
#[command(name = "hhl", version, about = "Hardy-Hodge decomposition toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "snake_case", tag = "command")]
enum Command {
    /// Synthesize a field file from a recipe.
    Synth(SynthArgs),
    /// Split a paravector, vector or quaternion field into its parts.
    Decompose(DecomposeArgs),
    /// Run a verification suite with pinned tolerances.
    Verify(VerifyArgs),
    /// Extend boundary data into a half-space slab.
    Extend(ExtendArgs),
    /// Potentials of the parts of a density on both sides of a plane.
    Potential(PotentialArgs),
    /// Two-term split of a quaternion field.
    Quat(QuatArgs),
}

#[derive(Args, Serialize, Clone)]
struct GridArgs {
    /// Number of boundary dimensions.
    #[arg(long)]
    n: Option<usize>,
    /// Points per axis, comma separated (one value is repeated over all axes).
    #[arg(long, value_delimiter = ',')]
    shape: Option<Vec<usize>>,
    /// Period per axis, comma separated (default 2π).
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<f64>>,
}

impl GridArgs {
    fn resolve(&self) -> Result<GridSpec, Error> {
        let n = self
            .n
            .or_else(|| self.shape.as_ref().map(|s| s.len()))
            .or_else(|| self.lengths.as_ref().map(|l| l.len()))
            .unwrap_or(2);
        let shape = match &self.shape {
            None => vec![32; n],
            Some(s) if s.len() == 1 => vec![s[0]; n],
            Some(s) => s.clone(),
        };
        let lengths = match &self.lengths {
            None => vec![2.0 * PI; n],
            Some(l) if l.len() == 1 => vec![l[0]; n],
            Some(l) => l.clone(),
        };
        if shape.len() != n || lengths.len() != n {
            return Err(Error::InvalidGrid(format!(
                "--n {n} does not match --shape ({}) or --lengths ({})",
                shape.len(),
                lengths.len()
            )));
        }
        GridSpec::new(shape, lengths)
    }
}

#[derive(ValueEnum, Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum RecipeName {
    SingleMode,
    BandlimitedRandom,
    GaussianBump,
    RickerBump,
    LocalizedRandom,
    HardyPlus,
    HardyMinus,
    DivfreeRandom,
}

#[derive(ValueEnum, Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum KindArg {
    Scalar,
    Paravector,
    Vector,
    Quaternion,
}

impl From<KindArg> for FieldKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Scalar => FieldKind::Scalar,
            KindArg::Paravector => FieldKind::Paravector,
            KindArg::Vector => FieldKind::Vector,
            KindArg::Quaternion => FieldKind::Quaternion,
        }
    }
}

#[derive(Args, Serialize, Clone)]
struct RecipeArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[arg(long, value_enum)]
    recipe: Option<RecipeName>,
    /// Scalar recipe under hardy-plus / hardy-minus.
    #[arg(long, value_enum, default_value = "bandlimited-random")]
    inner: RecipeName,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Band limit of the random recipes (default: everything below Nyquist).
    #[arg(long)]
    max_freq: Option<usize>,
    /// Bump center (default: middle of the cell).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    center: Option<Vec<f64>>,
    /// Bump width (default: shortest period / 16).
    #[arg(long)]
    width: Option<f64>,
    /// Integer mode numbers for single-mode.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mode: Option<Vec<i64>>,
    /// Component carrying the single mode.
    #[arg(long, default_value_t = 0)]
    component: usize,
}

impl RecipeArgs {
    fn width(&self, spec: &GridSpec) -> f64 {
        self.width
            .unwrap_or_else(|| spec.lengths.iter().copied().fold(f64::INFINITY, f64::min) / 16.0)
    }

    fn center(&self, spec: &GridSpec) -> Vec<f64> {
        self.center
            .clone()
            .unwrap_or_else(|| spec.lengths.iter().map(|l| l / 2.0).collect())
    }

    fn build(&self, name: RecipeName, spec: &GridSpec) -> Result<Recipe, Error> {
        let center = self.center(spec);
        let width = self.width(spec);
        let max_freq = self.max_freq.unwrap_or_else(|| Recipe::default_band(spec));
        Ok(match name {
            RecipeName::SingleMode => Recipe::SingleMode {
                mode: self
                    .mode
                    .clone()
                    .ok_or_else(|| Error::InvalidRecipe("single-mode needs --mode".into()))?,
                component: self.component,
            },
            RecipeName::BandlimitedRandom => Recipe::BandlimitedRandom { max_freq },
            RecipeName::GaussianBump => Recipe::GaussianBump { center, width },
            RecipeName::RickerBump => Recipe::RickerBump { center, width },
            RecipeName::LocalizedRandom => Recipe::LocalizedRandom { center, width },
            RecipeName::DivfreeRandom => Recipe::DivfreeRandom { max_freq },
            RecipeName::HardyPlus | RecipeName::HardyMinus => {
                if matches!(self.inner, RecipeName::HardyPlus | RecipeName::HardyMinus) {
                    return Err(Error::InvalidRecipe("--inner must be a scalar recipe".into()));
                }
                let h = Box::new(self.build(self.inner, spec)?);
                if name == RecipeName::HardyPlus {
                    Recipe::HardyPlus { h }
                } else {
                    Recipe::HardyMinus { h }
                }
            }
        })
    }

    fn synthesize(&self, default_kind: KindArg, default_recipe: RecipeName) -> Result<(SampledField, Recipe), Error> {
        let spec = self.grid.resolve()?;
        let recipe = self.build(self.recipe.unwrap_or(default_recipe), &spec)?;
        let kind = self.kind.unwrap_or(default_kind).into();
        Ok((synth_field(&spec, kind, &recipe, self.seed)?, recipe))
    }
}

/// A field from `--input`, or synthesized from the recipe flags.
#[derive(Args, Serialize, Clone)]
struct SourceArgs {
    /// HHF1 field file; when absent the recipe flags build the field.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    recipe: RecipeArgs,
}

impl SourceArgs {
    fn load(&self, default_kind: KindArg, default_recipe: RecipeName) -> Result<SampledField, Error> {
        match &self.input {
            Some(path) => read_field(path),
            None => self.recipe.synthesize(default_kind, default_recipe).map(|(f, _)| f),
        }
    }
}

#[derive(ValueEnum, Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum DcArg {
    Error,
    Strip,
    Tolerate,
}

#[derive(Args, Serialize, Clone)]
struct DcArgs {
    /// Treatment of means and Nyquist content.
    #[arg(long, value_enum, default_value = "error")]
    dc_policy: DcArg,
    /// Absolute threshold for `--dc-policy tolerate`.
    #[arg(long, default_value_t = 1e-9)]
    dc_tolerance: f64,
}

impl DcArgs {
    fn mode(&self) -> DcMode {
        match self.dc_policy {
            DcArg::Error => DcMode::Error,
            DcArg::Strip => DcMode::Strip,
            DcArg::Tolerate => DcMode::Tolerate(self.dc_tolerance),
        }
    }
}

#[derive(Args, Serialize)]
struct SynthArgs {
    #[command(flatten)]
    recipe: RecipeArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct DecomposeArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    dc: DcArgs,
    /// Largest accepted relative residual.
    #[arg(long, default_value_t = suite::TOL_IDENTITY)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long, default_value = "core")]
    suite: String,
    #[command(flatten)]
    grid: GridArgs,
    /// Seeds per grid for the decomposition checks.
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum SideArg {
    Upper,
    Lower,
}

#[derive(Args, Serialize)]
struct ExtendArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Heights (positive, increasing).
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5")]
    heights: Vec<f64>,
    #[arg(long, value_enum, default_value = "upper")]
    side: SideArg,
    /// Exponents for the norm profiles.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    p: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct PotentialArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    dc: DcArgs,
    /// Probe heights as multiples of the bump width.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    heights: Vec<f64>,
    /// Probes per tangential axis.
    #[arg(long, default_value_t = 5)]
    probes: usize,
    /// JSON array of probe points in world coordinates (replaces the grid).
    #[arg(long)]
    points: Option<PathBuf>,
    /// Unit normal `u` of the plane `{x · u = a}` (default `e_0`).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    normal: Option<Vec<f64>>,
    /// Offset `a` of the plane.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    offset: f64,
    /// Largest accepted silent/control ratio.
    #[arg(long, default_value_t = suite::TOL_SILENCE)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct QuatArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    dc: DcArgs,
    #[arg(long, default_value_t = suite::TOL_IDENTITY)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    /// Configuration, input or I/O problem.
    Config(Error),
    /// A checked residual exceeded its tolerance.
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e)
    }
}

type Outcome = Result<(), Failure>;

fn create_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn write_manifest(dir: &Path, cli: &Cli, extra: serde_json::Value) -> Result<(), Error> {
    write_json(
        dir.join("manifest.json"),
        &json!({
            "tool": "hhl",
            "version": env!("CARGO_PKG_VERSION"),
            "config": cli.command,
            "newtonSign": NewtonSign::Stated,
            "outputs": extra,
        }),
    )
}

fn check_residuals(report: &DecompositionReport, tol: f64) -> Outcome {
    let r = &report.residuals;
    let named = [
        ("reconstruction", Some(r.reconstruction)),
        ("pythagoras", Some(r.pythagoras)),
        ("crossTerms", Some(r.cross_terms)),
        ("divergence", r.divergence),
        ("term3Routes", r.term3_routes),
        ("gradePurity", r.grade_purity),
        ("annihilation", r.annihilation),
    ];
    for (name, value) in named {
        if let Some(v) = value {
            if !(v <= tol) {
                return Err(Failure::Invariant(format!("residual {name} = {v:e} exceeds {tol:e}")));
            }
        }
    }
    Ok(())
}

fn print_report(report: &DecompositionReport) {
    let n = &report.norms;
    let r = &report.residuals;
    println!(
        "norms: input {:.6e} plus {:.6e} minus {:.6e} zero {:.6e}",
        n.input, n.plus, n.minus, n.zero
    );
    println!(
        "residuals: reconstruction {:.3e} pythagoras {:.3e} cross terms {:.3e}",
        r.reconstruction, r.pythagoras, r.cross_terms
    );
}

fn synth(cli: &Cli, args: &SynthArgs) -> Outcome {
    let (field, recipe) = args.recipe.synthesize(KindArg::Paravector, RecipeName::BandlimitedRandom)?;
    create_dir(&args.out)?;
    let path = args.out.join("field.hhf");
    write_field(&field, &path)?;
    write_sidecar(
        &path,
        &json!({
            "kind": field.kind(),
            "gridSpec": field.spec(),
            "recipe": recipe,
            "seed": args.recipe.seed,
        }),
    )?;
    write_manifest(&args.out, cli, json!(["field.hhf", "field.json"]))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn decompose_cmd(cli: &Cli, args: &DecomposeArgs) -> Outcome {
    let field = args.source.load(KindArg::Paravector, RecipeName::BandlimitedRandom)?;
    let plan = MultiplierPlan::new(field.spec(), DcPolicy::Zero);
    let result = decompose(&field, DecomposeOptions::with_dc(args.dc.mode()), &plan)?;
    create_dir(&args.out)?;
    for (name, part) in ["plus", "minus", "zero"].iter().zip(result.parts()) {
        write_field(part, args.out.join(format!("{name}.hhf")))?;
    }
    write_json(args.out.join("report.json"), &result.report)?;
    write_manifest(&args.out, cli, json!(["plus.hhf", "minus.hhf", "zero.hhf", "report.json"]))?;
    print_report(&result.report);
    check_residuals(&result.report, args.tol)
}

fn verify(cli: &Cli, args: &VerifyArgs) -> Outcome {
    let which: Suite = args.suite.parse()?;
    let mut corpus = Corpus {
        seeds: args.seeds,
        ..Corpus::default()
    };
    if args.grid.n.is_some() || args.grid.shape.is_some() || args.grid.lengths.is_some() {
        corpus.grids = vec![args.grid.resolve()?];
    }
    let report = suite::run(which, &corpus)?;
    for section in &report.sections {
        println!("[{}] {:.2}s", section.title, section.seconds);
        for c in &section.checks {
            let mark = if c.passed { "ok" } else { "FAIL" };
            println!("  {mark:<4} {:<44} {:>12.4e} {} ({})", c.name, c.value, c.bound, c.detail);
        }
    }
    if let Some(out) = &args.out {
        create_dir(out)?;
        write_json(out.join("report.json"), &report)?;
        write_manifest(out, cli, json!(["report.json"]))?;
    }
    match report.first_failure() {
        None => {
            println!("all checks passed");
            Ok(())
        }
        Some((section, c)) => Err(Failure::Invariant(format!(
            "{section}: {} = {:e} not {}",
            c.name, c.value, c.bound
        ))),
    }
}

fn extend(cli: &Cli, args: &ExtendArgs) -> Outcome {
    let field = args.source.load(KindArg::Paravector, RecipeName::HardyPlus)?;
    let plan = MultiplierPlan::new(field.spec(), DcPolicy::Zero);
    let side = match args.side {
        SideArg::Upper => Side::Upper,
        SideArg::Lower => Side::Lower,
    };
    let slab = poisson_extend(&field, &args.heights, &plan, side)?;
    let profiles: Vec<_> = args.p.iter().map(|&p| hardy_norm_profile(&slab, p)).collect();
    let l2 = hardy_norm_profile(&slab, 2.0);
    let uniform = slab.heights.len() >= 3 && slab.uniform_step().is_ok();
    let system = match field.kind() {
        FieldKind::Paravector => Some(MonogenicSystem::Paravector),
        FieldKind::Vector => Some(MonogenicSystem::HarmonicGradient),
        FieldKind::Quaternion => Some(MonogenicSystem::Quaternionic),
        _ => None,
    };
    let monogenicity = match system {
        Some(s) if uniform => Some(monogenicity_residual(&slab, s, &plan)?),
        _ => None,
    };
    let laplace = if uniform { Some(laplace_residual(&slab, &plan)?) } else { None };
    let summary = json!({
        "config": cli.command,
        "newtonSign": NewtonSign::Stated,
        "profiles": profiles,
        "monogenicityResidual": monogenicity,
        "monogenicSystem": system,
        "laplaceResidual": laplace,
    });
    write_slab(&slab, &args.out, &summary)?;
    for profile in &profiles {
        write_text(&args.out.join(format!("profile_p{}.csv", profile.p)), &profile.to_csv())?;
    }
    for (h, v) in l2.heights.iter().zip(&l2.norms) {
        println!("height {h:.4e}  L2 norm {v:.6e}");
    }
    if let Some(m) = monogenicity {
        println!("monogenicity residual {m:.3e}");
    }
    if l2.non_increasing {
        Ok(())
    } else {
        Err(Failure::Invariant("L2 norm profile increases with height".into()))
    }
}

fn potential(cli: &Cli, args: &PotentialArgs) -> Outcome {
    let psi = args.source.load(KindArg::Paravector, RecipeName::LocalizedRandom)?;
    let spec = psi.spec().clone();
    let plan = MultiplierPlan::new(&spec, DcPolicy::Zero);
    let width = args.source.recipe.width(&spec);
    let center = args.source.recipe.center(&spec);
    let normal = args.normal.clone().unwrap_or_else(|| {
        let mut u = vec![0.0; spec.n + 1];
        u[0] = 1.0;
        u
    });
    let frame = PlaneFrame::new(&normal, args.offset)?;
    let points = match &args.points {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            let world: Vec<Vec<f64>> = serde_json::from_str(&text).map_err(Error::from)?;
            world.iter().map(|x| frame.to_local(x)).collect()
        }
        None => probe_grid(&spec, &center, width, args.probes, &args.heights)?,
    };
    let params = json!({ "center": center, "width": width, "heightFactors": args.heights });
    let report = silent_experiment(&psi, &points, DecomposeOptions::with_dc(args.dc.mode()), &plan, params)?;
    create_dir(&args.out)?;
    write_json(args.out.join("report.json"), &report)?;
    write_text(&args.out.join("silence.csv"), &report.to_csv())?;
    let world: Vec<Vec<f64>> = points.iter().map(|x| frame.to_world(x)).collect();
    write_json(
        args.out.join("plane.json"),
        &json!({
            "normal": frame.normal(),
            "offset": args.offset,
            "tangents": frame.tangents(),
            "probesWorld": world,
        }),
    )?;
    write_manifest(&args.out, cli, json!(["report.json", "silence.csv", "plane.json"]))?;
    let (u, l) = (report.ratios.upper, report.ratios.lower);
    println!(
        "upper: minus+zero {:.3e} zero {:.3e}; lower: plus+zero {:.3e} zero {:.3e}",
        u.silent_pair, u.zero, l.silent_pair, l.zero
    );
    if report.passes(args.tol) {
        Ok(())
    } else {
        Err(Failure::Invariant(format!(
            "silence ratio {:e} exceeds {:e}",
            report.ratios.max(),
            args.tol
        )))
    }
}

fn quat(cli: &Cli, args: &QuatArgs) -> Outcome {
    let field = args.source.load(KindArg::Quaternion, RecipeName::BandlimitedRandom)?;
    let plan = MultiplierPlan::new(field.spec(), DcPolicy::Zero);
    let result = decompose_quaternionic(&field, DecomposeOptions::with_dc(args.dc.mode()), &plan)?;
    create_dir(&args.out)?;
    write_field(&result.f_plus, args.out.join("plus.hhf"))?;
    write_field(&result.f_minus, args.out.join("minus.hhf"))?;
    write_json(args.out.join("report.json"), &result.report)?;
    write_manifest(&args.out, cli, json!(["plus.hhf", "minus.hhf", "report.json"]))?;
    print_report(&result.report);
    check_residuals(&result.report, args.tol)
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(value) = std::env::var("HHL_THREADS") {
        let threads: usize = value
            .parse()
            .map_err(|_| Error::Unsupported(format!("HHL_THREADS must be a positive integer, got {value:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().map_err(Failure::from).and_then(|()| match &cli.command {
        Command::Synth(a) => synth(&cli, a),
        Command::Decompose(a) => decompose_cmd(&cli, a),
        Command::Verify(a) => verify(&cli, a),
        Command::Extend(a) => extend(&cli, a),
        Command::Potential(a) => potential(&cli, a),
        Command::Quat(a) => quat(&cli, a),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant failure: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
