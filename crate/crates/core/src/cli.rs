//! Command-line front end: verification suites, single norms, profiles and
//! operators, and certificate reports.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::functions::{
    bump_family, coordinate, extremal_power_family, power_family, ramp_family,
};
use crate::grid::Grid;
use crate::measures::{
    exact_profile, make_cauchy, make_estimator, make_gaussian, make_subexp, ConvexEstimator, EstimatorFamily,
    ProductMeasure,
};
use crate::operators::{beta1, peso_constant, q_bar, q_tilde, recover_estimator};
use crate::rearrange::{ProfileKind, QuantileProfile};
use crate::rispace::{quasinorm, RISpace};
use crate::verify::{
    bobkov_s_grid, check_bobkov, check_concave_gaussian, check_halfspace, check_ledoux, check_nash,
    check_poincare, check_reafun, indicator_sweep, scan_growth, sharpness_scan, worst_status, write_csv,
    NashVariant, RatioCertificate, Settings, SharpnessSetup, Status, Tolerances,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FLAGGED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "isosym", version)]
#[command(about = "Isoperimetric symmetrization toolkit: verification suites, norms, profiles and certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite and write certificates
    Verify(VerifyArgs),
    /// Quasi-norm of an indicator or power profile
    Norm(NormArgs),
    /// Exact isoperimetric profile and estimator, at a point or as a table
    Profile(ProfileArgs),
    /// Evaluate one isoperimetric Hardy operator or modulus
    Operator(OperatorArgs),
    /// Summarize certificate files
    Report(ReportArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Theorem32,
    Poincare,
    Nash,
    Sharpness,
    GaussianConcave,
    All,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Theorem32 => "theorem32",
            Suite::Poincare => "poincare",
            Suite::Nash => "nash",
            Suite::Sharpness => "sharpness",
            Suite::GaussianConcave => "gaussian-concave",
            Suite::All => "all",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureKind {
    Cauchy,
    Subexp,
    Gaussian,
}

macro_rules! from_str_via_value_enum {
    ($($t:ty),*) => {$(
        impl FromStr for $t {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                <$t as ValueEnum>::from_str(s, true).map_err(|_| Error::Usage(format!("unknown value {s:?}")))
            }
        }
    )*};
}

from_str_via_value_enum!(Suite, MeasureKind, Format);

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every subcommand that builds a measure or grid.
#[derive(Args, Debug, Default, Clone)]
struct CommonArgs {
    /// Model measure
    #[arg(long, value_enum)]
    measure: Option<MeasureKind>,
    /// Cauchy tail exponent
    #[arg(long)]
    alpha: Option<f64>,
    /// Sub-exponential exponent (or Lorentz exponent for sharpness scans)
    #[arg(long)]
    p: Option<f64>,
    /// Negative dimension N of a CD(0,N) estimator
    #[arg(long = "bigN", allow_hyphen_values = true)]
    big_n: Option<f64>,
    /// Dimension of the product measure
    #[arg(long)]
    dim: Option<usize>,
    /// Estimator constant
    #[arg(long)]
    c: Option<f64>,
    /// Space descriptor: lp:p | lorentz:p,q | lz:p,q,a
    #[arg(long)]
    space: Option<String>,
    /// Grid size (power of two, at least 64)
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long = "tol-quad")]
    tol_quad: Option<f64>,
    #[arg(long = "tol-assert")]
    tol_assert: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// key=value file; flags win over it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    #[command(flatten)]
    common: CommonArgs,
    /// Output directory for certificates
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write only this format (both by default)
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Proposition whose embedding is scanned
    #[arg(long)]
    prop: Option<String>,
    /// Second Lorentz index, or the weak-type exponent of Nash inequalities
    #[arg(long)]
    q: Option<f64>,
    /// Exponent perturbation of sharpness scans
    #[arg(long)]
    delta: Option<f64>,
    /// Exponent of sub-exponential Nash inequalities
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Args, Debug)]
struct NormArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// f* = indicator of [0,u)
    #[arg(long, conflicts_with = "power")]
    indicator: Option<f64>,
    /// f* = t^(-a)
    #[arg(long, allow_hyphen_values = true)]
    power: Option<f64>,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Single point; a table over the grid when omitted
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum OperatorKind {
    Beta1,
    Recover,
    Peso,
    Qbar,
    Qtilde,
}

#[derive(Args, Debug)]
struct OperatorArgs {
    #[arg(value_enum)]
    kind: OperatorKind,
    #[command(flatten)]
    common: CommonArgs,
    /// Evaluation point
    #[arg(long)]
    t: Option<f64>,
    /// Operand f = indicator of (0,u); f = 1 when omitted
    #[arg(long)]
    indicator: Option<f64>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Certificate JSON files (one certificate or an array per file)
    files: Vec<PathBuf>,
}

/// Fully resolved suite configuration.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub measure: MeasureKind,
    pub alpha: f64,
    pub p: Option<f64>,
    pub big_n: Option<f64>,
    pub dim: usize,
    pub c: f64,
    pub space: Option<String>,
    pub grid: usize,
    pub tol: Tolerances,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub prop: String,
    pub q: Option<f64>,
    pub delta: f64,
    pub beta: f64,
}

impl SuiteConfig {
    /// Defaults for `suite`.
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            measure: MeasureKind::Cauchy,
            alpha: 1.0,
            p: None,
            big_n: None,
            dim: 1,
            c: 1.0,
            space: None,
            grid: 4096,
            tol: Tolerances::default(),
            seed: 0,
            out: None,
            format: None,
            prop: "5.1".into(),
            q: None,
            delta: 0.05,
            beta: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid < 64 || !self.grid.is_power_of_two() {
            return Err(Error::Usage(format!("--grid must be a power of two >= 64, got {}", self.grid)));
        }
        if !(self.tol.quad > 0.0 && self.tol.assert > 0.0) {
            return Err(Error::Usage("tolerances must be positive".into()));
        }
        if self.dim == 0 {
            return Err(Error::Usage("--dim must be >= 1".into()));
        }
        Ok(())
    }

    fn settings(&self) -> Settings {
        Settings::new(self.grid).with_tol(self.tol)
    }

    fn measure(&self) -> Result<ProductMeasure> {
        let base = match self.measure {
            MeasureKind::Cauchy => make_cauchy(self.alpha)?,
            MeasureKind::Subexp => make_subexp(self.p.unwrap_or(0.5))?,
            MeasureKind::Gaussian => make_gaussian(),
        };
        ProductMeasure::new(base, self.dim)
    }

    /// Parametric estimator of the measure (or the CD(0,N) one when `--bigN`
    /// is given), times `--c`.
    fn estimator(&self) -> Result<ConvexEstimator> {
        let family = match (self.big_n, self.measure) {
            (Some(n), _) => EstimatorFamily::NegDimN { n },
            (None, MeasureKind::Cauchy) => EstimatorFamily::CauchyAlpha { alpha: self.alpha },
            (None, MeasureKind::Subexp) => EstimatorFamily::SubExpP { p: self.p.unwrap_or(0.5) },
            (None, MeasureKind::Gaussian) => EstimatorFamily::GaussianConcave,
        };
        make_estimator(family, self.dim, self.c)
    }

    fn space_or(&self, default: &str) -> Result<RISpace> {
        self.space.as_deref().unwrap_or(default).parse()
    }
}

/// Certificates of a suite plus an optional human-readable table.
#[derive(Debug, Clone, Default)]
pub struct SuiteOutput {
    pub certificates: Vec<RatioCertificate>,
    pub table: Option<String>,
}

const FAMILY_HALF: usize = 10;
const HALFSPACE_POINTS: usize = 64;
const BOBKOV_POINTS: usize = 64;
const BUMPS: usize = 10;

fn halfspace_r_grid() -> Vec<f64> {
    let n = HALFSPACE_POINTS;
    (0..n).map(|k| -8.0 + 16.0 * k as f64 / (n - 1) as f64).collect()
}

fn suite_theorem32(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let s = cfg.settings();
    let m = cfg.measure()?;
    let exact = ConvexEstimator::exact(*m.base()).scaled(cfg.c);
    let mut fam = ramp_family(&m, &s.grid, FAMILY_HALF)?;
    fam.extend(extremal_power_family(&m, &s.grid, FAMILY_HALF)?);
    Ok(SuiteOutput {
        certificates: vec![
            check_halfspace(&m, &cfg.estimator()?, &halfspace_r_grid(), &s),
            check_ledoux(&fam, &exact, &s)?,
            check_reafun(&fam, &exact, &s)?,
            check_bobkov(&fam, &exact, &bobkov_s_grid(BOBKOV_POINTS), &s)?,
        ],
        table: None,
    })
}

fn relative_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (b / a - 1.0).abs()
    }
}

fn suite_poincare(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let s = cfg.settings();
    let m = cfg.measure()?;
    let est = cfg.estimator()?;
    let x = cfg.space_or("lorentz:1,1")?;
    let mut certs = Vec::new();
    let transfer_cert = |settings: &Settings| -> Result<RatioCertificate> {
        let mut fam = ramp_family(&m, &settings.grid, FAMILY_HALF)?;
        fam.extend(extremal_power_family(&m, &settings.grid, FAMILY_HALF)?);
        check_poincare(&fam, &x, &est, settings)
    };
    let mut c = transfer_cert(&s)?;
    let doubled = Settings::new(2 * cfg.grid).with_tol(cfg.tol);
    let change = relative_change(c.sup_ratio, transfer_cert(&doubled)?.sup_ratio);
    c.params.insert("grid_doubling_change".into(), format!("{change:.6e}"));
    certs.push(c);
    let bumps = bump_family(&m, BUMPS, cfg.seed)?;
    certs.push(check_poincare(&bumps, &x, &est, &s)?);
    Ok(SuiteOutput {
        certificates: certs,
        table: None,
    })
}

fn suite_nash(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let m = cfg.measure()?;
    let x = cfg.space_or("lp:2")?;
    let variant = match cfg.measure {
        MeasureKind::Cauchy => NashVariant::CauchyType {
            alpha: cfg.alpha,
            q: cfg.q.unwrap_or(4.0),
        },
        MeasureKind::Subexp => NashVariant::SubExpType {
            p: cfg.p.unwrap_or(0.5),
            beta: cfg.beta,
        },
        MeasureKind::Gaussian => {
            return Err(Error::Usage("the nash suite needs --measure cauchy or subexp".into()))
        }
    };
    let run = |settings: &Settings| -> Result<RatioCertificate> {
        let mut fam = ramp_family(&m, &settings.grid, FAMILY_HALF)?;
        fam.extend(power_family(&m, &settings.grid, FAMILY_HALF)?);
        check_nash(&fam, &x, variant, settings)
    };
    let s = cfg.settings();
    let mut c = run(&s)?;
    let mut fine = Settings::new(2 * cfg.grid).with_tol(cfg.tol);
    fine.nash_r_per_octave = 4 * s.nash_r_per_octave;
    let change = relative_change(c.sup_ratio, run(&fine)?.sup_ratio);
    c.params.insert("refinement_change".into(), format!("{change:.6e}"));
    Ok(SuiteOutput {
        certificates: vec![c],
        table: None,
    })
}

const SHARPNESS_KS: std::ops::RangeInclusive<i32> = 1..=10;

fn suite_sharpness(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    if cfg.prop != "5.1" {
        return Err(Error::Usage(format!("unknown --prop {}; supported: 5.1", cfg.prop)));
    }
    let s = cfg.settings();
    let p = cfg.p.unwrap_or(1.0);
    let q = cfg.q.unwrap_or(1.0);
    let family = indicator_sweep(SHARPNESS_KS)?;
    let perturbed = sharpness_scan(&SharpnessSetup::cauchy_lorentz(p, q, cfg.alpha, cfg.delta)?, &family, &s)?;
    let sharp = sharpness_scan(&SharpnessSetup::cauchy_lorentz(p, q, cfg.alpha, 0.0)?, &family, &s)?;
    let mut table = String::new();
    writeln!(table, "k\tratio(delta={})\tratio(delta=0)", cfg.delta).unwrap();
    for ((k, a), b) in SHARPNESS_KS.zip(&perturbed).zip(&sharp) {
        writeln!(table, "{k}\t{:.6e}\t{:.6e}", a.sup_ratio, b.sup_ratio).unwrap();
    }
    writeln!(table, "growth(delta={})\t{:.6e}", cfg.delta, scan_growth(&perturbed)).unwrap();
    writeln!(table, "growth(delta=0)\t{:.6e}", scan_growth(&sharp)).unwrap();
    let mut certs = perturbed;
    certs.extend(sharp);
    Ok(SuiteOutput {
        certificates: certs,
        table: Some(table),
    })
}

fn suite_gaussian(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let s = cfg.settings();
    let m = ProductMeasure::new(make_gaussian(), cfg.dim)?;
    let mut fam = vec![coordinate(&m, &s.grid)?];
    fam.extend(bump_family(&m, BUMPS / 2, cfg.seed)?);
    Ok(SuiteOutput {
        certificates: vec![check_concave_gaussian(&fam, &s)?],
        table: None,
    })
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    cfg.validate()?;
    match cfg.suite {
        Suite::Theorem32 => suite_theorem32(cfg),
        Suite::Poincare => suite_poincare(cfg),
        Suite::Nash => suite_nash(cfg),
        Suite::Sharpness => suite_sharpness(cfg),
        Suite::GaussianConcave => suite_gaussian(cfg),
        Suite::All => {
            let mut all = SuiteOutput::default();
            for suite in [Suite::Theorem32, Suite::Poincare, Suite::Nash, Suite::Sharpness, Suite::GaussianConcave] {
                if suite == Suite::Nash && cfg.measure == MeasureKind::Gaussian {
                    continue;
                }
                let out = run_suite(&SuiteConfig {
                    suite,
                    ..cfg.clone()
                })?;
                all.certificates.extend(out.certificates);
                if let Some(t) = out.table {
                    all.table.get_or_insert_with(String::new).push_str(&t);
                }
            }
            Ok(all)
        }
    }
}

/// Exit code for a set of statuses.
pub fn exit_code(worst: Option<Status>) -> i32 {
    match worst {
        None | Some(Status::Holds) | Some(Status::HoldsWithConstant) => EXIT_OK,
        Some(Status::Error) => EXIT_ERROR,
        Some(_) => EXIT_FLAGGED,
    }
}

/// Writes `<suite>.json` and/or `<suite>.csv` into `dir`.
pub fn write_outputs(dir: &Path, name: &str, format: Option<Format>, certs: &[RatioCertificate]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if format != Some(Format::Csv) {
        let path = dir.join(format!("{name}.json"));
        fs::write(&path, serde_json::to_string_pretty(certs)? + "\n")?;
        written.push(path);
    }
    if format != Some(Format::Json) {
        let path = dir.join(format!("{name}.csv"));
        write_csv(certs, fs::File::create(&path)?)?;
        written.push(path);
    }
    Ok(written)
}

/// Summary rows `(id, family, params, sup_ratio, status)` sorted by id.
pub fn render_report<W: Write>(certs: &[RatioCertificate], out: W) -> Result<()> {
    let mut rows: Vec<&RatioCertificate> = certs.iter().collect();
    rows.sort_by(|a, b| a.inequality_id.cmp(&b.inequality_id));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["inequality_id", "family", "params", "sup_ratio", "status"])?;
    for c in rows {
        let params = c
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            c.inequality_id.as_str(),
            c.family.as_str(),
            params.as_str(),
            &format!("{:.16e}", c.sup_ratio),
            c.status.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads one certificate or an array of them.
pub fn read_certificates(path: &Path) -> Result<Vec<RatioCertificate>> {
    let text = fs::read_to_string(path)?;
    let parse_err = |e: serde_json::Error| Error::Parse {
        file: path.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(parse_err)?;
    if value.is_array() {
        serde_json::from_str(&text).map_err(parse_err)
    } else {
        Ok(vec![serde_json::from_str(&text).map_err(parse_err)?])
    }
}

/// `key=value` lines, `#` comments.
fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            file: path.display().to_string(),
            line: i + 1,
            message: format!("expected key=value, got {line:?}"),
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn from_file<T: FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    match file.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| Error::Usage(format!("config key {key}: cannot parse {v:?}"))),
    }
}

fn enum_from_file<T: ValueEnum>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    match file.get(key) {
        None => Ok(None),
        Some(v) => T::from_str(v, true)
            .map(Some)
            .map_err(|_| Error::Usage(format!("config key {key}: unknown value {v:?}"))),
    }
}

/// Flags first, then the config file, then `base`.
fn resolve_common(common: &CommonArgs, mut base: SuiteConfig) -> Result<SuiteConfig> {
    let file = match &common.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    macro_rules! pick {
        ($field:ident, $key:literal) => {
            common.$field.clone().or(from_file(&file, $key)?)
        };
    }
    if let Some(v) = common.measure.or(enum_from_file(&file, "measure")?) {
        base.measure = v;
    }
    if let Some(v) = pick!(alpha, "alpha") {
        base.alpha = v;
    }
    base.p = pick!(p, "p").or(base.p);
    base.big_n = pick!(big_n, "bigN").or(base.big_n);
    if let Some(v) = pick!(dim, "dim") {
        base.dim = v;
    }
    if let Some(v) = pick!(c, "c") {
        base.c = v;
    }
    base.space = pick!(space, "space").or(base.space);
    if let Some(v) = pick!(grid, "grid") {
        base.grid = v;
    }
    if let Some(v) = pick!(tol_quad, "tol-quad") {
        base.tol.quad = v;
    }
    if let Some(v) = pick!(tol_assert, "tol-assert") {
        base.tol.assert = v;
    }
    if let Some(v) = pick!(seed, "seed") {
        base.seed = v;
    }
    Ok(base)
}

fn verify_config(args: &VerifyArgs) -> Result<SuiteConfig> {
    let mut cfg = resolve_common(&args.common, SuiteConfig::new(args.suite))?;
    let file = match &args.common.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    cfg.out = args.out.clone().or(from_file(&file, "out")?);
    cfg.format = args.format.or(enum_from_file(&file, "format")?);
    if let Some(v) = args.prop.clone().or(from_file(&file, "prop")?) {
        cfg.prop = v;
    }
    cfg.q = args.q.or(from_file(&file, "q")?);
    if let Some(v) = args.delta.or(from_file(&file, "delta")?) {
        cfg.delta = v;
    }
    if let Some(v) = args.beta.or(from_file(&file, "beta")?) {
        cfg.beta = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Compact decimal: 12 significant digits, trailing zeros trimmed, at least
/// one fractional digit.
pub fn format_value(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v != 0.0 && (v.abs() >= 1e12 || v.abs() < 1e-6) {
        return format!("{v:.11e}");
    }
    let digits = (11 - v.abs().log10().floor() as i32).clamp(1, 17) as usize;
    let s = format!("{v:.digits$}");
    let s = s.trim_end_matches('0');
    if s.ends_with('.') {
        format!("{s}0")
    } else {
        s.to_string()
    }
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = verify_config(args)?;
    let result = run_suite(&cfg)?;
    render_report(&result.certificates, &mut *out)?;
    if let Some(t) = &result.table {
        writeln!(out)?;
        out.write_all(t.as_bytes())?;
    }
    if let Some(dir) = &cfg.out {
        write_outputs(dir, cfg.suite.name(), cfg.format, &result.certificates)?;
    }
    Ok(exit_code(worst_status(&result.certificates)))
}

fn cmd_norm(args: &NormArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = resolve_common(&args.common, SuiteConfig::new(Suite::All))?;
    cfg.validate()?;
    let grid = Grid::graded(cfg.grid);
    let space: RISpace = cfg
        .space
        .as_deref()
        .ok_or_else(|| Error::Usage("norm needs --space".into()))?
        .parse()?;
    let profile = match (args.indicator, args.power) {
        (Some(u), None) => QuantileProfile::indicator(u)?,
        (None, Some(a)) => QuantileProfile::from_fn(grid.nodes(), ProfileKind::Nonincreasing, move |t| t.powf(-a))?,
        _ => return Err(Error::Usage("norm needs exactly one of --indicator, --power".into())),
    };
    writeln!(out, "{}", format_value(quasinorm(&space, &profile, &grid)?))?;
    Ok(EXIT_OK)
}

fn cmd_profile(args: &ProfileArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = resolve_common(&args.common, SuiteConfig::new(Suite::All))?;
    cfg.validate()?;
    let m = cfg.measure()?;
    let est = cfg.estimator()?;
    if let Some(t) = args.t {
        writeln!(out, "exact\t{}", format_value(exact_profile(m.base(), t)?))?;
        writeln!(out, "estimator\t{}", format_value(est.eval(t)))?;
        return Ok(EXIT_OK);
    }
    let grid = Grid::graded(cfg.grid);
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(["t", "exact_profile", "estimator"])?;
        for &t in grid.nodes() {
            w.write_record([
                format!("{t:.16e}"),
                format!("{:.16e}", exact_profile(m.base(), t)?),
                format!("{:.16e}", est.eval(t)),
            ])?;
        }
        w.flush()?;
    }
    match &args.out {
        Some(p) => fs::write(p, buf)?,
        None => out.write_all(&buf)?,
    }
    Ok(EXIT_OK)
}

fn cmd_operator(args: &OperatorArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = resolve_common(&args.common, SuiteConfig::new(Suite::All))?;
    cfg.validate()?;
    let grid = Grid::graded(cfg.grid);
    let est = cfg.estimator()?;
    let need_t = || args.t.ok_or_else(|| Error::Usage("this operator needs --t".into()));
    let operand = || -> Result<Curve> {
        match args.indicator {
            Some(u) if u > 0.0 && u < 1.0 => Curve::steps(&[0.0, u, 1.0], &[1.0, 0.0]),
            Some(u) => Err(Error::Usage(format!("--indicator must lie in (0,1), got {u}"))),
            None => Ok(Curve::constant(1.0)),
        }
    };
    let v = match args.kind {
        OperatorKind::Beta1 => beta1(&est, need_t()?, &grid)?,
        OperatorKind::Recover => recover_estimator(&est, need_t()?, &grid)?,
        OperatorKind::Peso => peso_constant(&est, &grid),
        OperatorKind::Qbar => q_bar(&est, &operand()?, &grid)?.eval(need_t()?),
        OperatorKind::Qtilde => q_tilde(&est, &operand()?, &grid)?.eval(need_t()?),
    };
    writeln!(out, "{}", format_value(v))?;
    Ok(EXIT_OK)
}

fn cmd_report(args: &ReportArgs, out: &mut dyn Write) -> Result<i32> {
    let mut certs = Vec::new();
    for f in &args.files {
        certs.extend(read_certificates(f)?);
    }
    render_report(&certs, &mut *out)?;
    Ok(exit_code(worst_status(&certs)))
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::ParameterDomain(_) => EXIT_USAGE,
        _ => EXIT_ERROR,
    }
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a, out),
        Command::Norm(a) => cmd_norm(a, out),
        Command::Profile(a) => cmd_profile(a, out),
        Command::Operator(a) => cmd_operator(a, out),
        Command::Report(a) => cmd_report(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            error_code(&e)
        }
    }
}
