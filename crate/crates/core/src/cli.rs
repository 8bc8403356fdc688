//! Command-line front end. Every command prints one JSON object (or CSV
//! table) to stdout or `--output`.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::complex::CellComplex;
use crate::error::{Error, ErrorKind, Result};
use crate::function::{ConstructibleFunction, Cut, PLFunction};
use crate::integrals::{
    hadwiger_constructible, hadwiger_pl, hadwiger_pl_euler, prop31_residual, step_integral_constructible,
    step_integral_pl, verdier_dual, Bound, MonteCarlo,
};
use crate::io::{json_error, load_image, render, Document, Format, Skeleton};
use crate::valuation::{
    additivity_residual, decreasing_composition, invariance_residual, translation_residual, CoefficientProfile,
    HadwigerValuation,
};
use crate::volumes::{
    calibrate, mu_crofton, mu_grid_exact, mu_slice_mc, CroftonConstants, CALIBRATION_SEED, DEFAULT_CALIBRATION_SAMPLES,
    MAX_MC_K,
};

/// Environment variable naming a persisted calibration table.
pub const CALIBRATION_ENV: &str = "HADWIGER_CALIBRATION";

#[derive(Debug, Parser)]
#[command(name = "hadwiger", version, about = "Euler characteristics, intrinsic volumes and Hadwiger integrals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Input document (repeat for commands taking two functions)
    #[arg(long, global = true)]
    pub input: Vec<PathBuf>,

    /// Grayscale PGM image used as a grid function
    #[arg(long, global = true)]
    pub image: Option<PathBuf>,

    /// Value rule for image edges and vertices
    #[arg(long, global = true, value_enum, default_value_t = SkeletonArg::Max)]
    pub skeleton: SkeletonArg,

    /// Intrinsic volume index
    #[arg(long, global = true)]
    pub k: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = BoundArg::Lower)]
    pub bound: BoundArg,

    /// Monte Carlo sample count
    #[arg(long, global = true, default_value_t = 10_000)]
    pub samples: usize,

    /// Monte Carlo seed [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads (results do not depend on this)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Tolerance for exact checks
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,

    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Add wall-clock time to the output (makes it non-reproducible)
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Euler characteristic of a grid region or simplicial set
    Chi,
    /// Exact intrinsic volumes of a grid region
    Mu,
    /// Monte Carlo intrinsic volume
    MuMc {
        #[arg(long, value_enum, default_value_t = McMethod::Crofton)]
        method: McMethod,
    },
    /// Euler integral (k = 0)
    EulerInt,
    /// Hadwiger integral for --k
    HadwigerInt,
    /// Step approximants (1/m)∫⌊mh⌋dμ_k or (1/m)∫⌈mh⌉dμ_k over m
    StepSeq {
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
        m_list: Vec<usize>,
    },
    /// Verdier dual of a grid function
    Dual,
    /// (∫h dμ_k, (−1)^(n−k)∫Dh dμ_k) for each k
    Prop31,
    /// Evaluate a valuation
    Valuation {
        /// JSON file: {"bound": "lower"|"upper", "profiles": [[[x, y], ...], ...]}
        #[arg(long)]
        valuation: PathBuf,
    },
    /// |v(f) + v(g) − v(f∨g) − v(f∧g)| for two grid functions
    AdditivityCheck {
        #[arg(long)]
        valuation: PathBuf,
    },
    /// |v(h) − v(h moved)| under a rotation and translation
    InvarianceCheck {
        #[arg(long)]
        valuation: PathBuf,
        /// Rotation angle in the (x0, x1) plane
        #[arg(long, default_value_t = 0.0)]
        angle_deg: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        translate: Vec<f64>,
    },
    /// Ceiling-then-compose vs compose-then-floor for decreasing c
    DecreasingExp {
        /// Knots [[x, y], ...] of a strictly decreasing profile [default: c(x) = −x]
        #[arg(long)]
        profile: Option<String>,
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
        m_list: Vec<usize>,
    },
    /// s ↦ μ_k{h ≥ s} at midpoints between critical values and at --s-grid
    MuCurve {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s_grid: Vec<f64>,
    },
    /// Calibrate the Crofton constants c[n][k]
    Calibrate {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SkeletonArg {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BoundArg {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum McMethod {
    Crofton,
    Slice,
}

impl From<BoundArg> for Bound {
    fn from(b: BoundArg) -> Bound {
        match b {
            BoundArg::Lower => Bound::Lower,
            BoundArg::Upper => Bound::Upper,
        }
    }
}

enum Function {
    Grid(ConstructibleFunction),
    Pl(PLFunction),
}

impl Function {
    fn dim(&self) -> usize {
        match self {
            Function::Grid(h) => h.dim(),
            Function::Pl(h) => h.ambient_dim(),
        }
    }
}

/// Calibration table from HADWIGER_CALIBRATION, or computed with the
/// default seed and sample count.
struct Calibrations {
    table: CroftonConstants,
    source: &'static str,
}

impl Calibrations {
    fn load() -> Result<Calibrations> {
        match std::env::var_os(CALIBRATION_ENV) {
            Some(path) => {
                let path = PathBuf::from(path);
                let text =
                    std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                Ok(Calibrations { table: CroftonConstants::from_json(&text)?, source: "file" })
            }
            None => Ok(Calibrations { table: CroftonConstants::new(), source: "built-in" }),
        }
    }

    fn ensure(&mut self, n: usize, k: usize) -> Result<()> {
        if k == 0 || k == n || self.table.calibration(n, k).is_some() {
            return Ok(());
        }
        if self.source == "file" {
            return Err(Error::Calibration(format!("calibration table has no entry for n = {n}, k = {k}")));
        }
        self.table.ensure(n, k, DEFAULT_CALIBRATION_SAMPLES, CALIBRATION_SEED).map(|_| ())
    }

    fn describe(&self, n: usize, k: usize) -> Value {
        match self.table.calibration(n, k) {
            Some(c) => json!({
                "source": self.source,
                "n": n,
                "k": k,
                "constant": c.constant,
                "stderr": c.stderr,
                "samples": c.samples,
                "seed": c.seed,
            }),
            None => json!({"source": "exact", "n": n, "k": k, "constant": 1.0}),
        }
    }
}

struct Context<'a> {
    cli: &'a Cli,
    seed: u64,
}

impl Context<'_> {
    fn single_input(&self) -> Result<Document> {
        match self.cli.input.as_slice() {
            [p] => Document::load(p),
            [] => Err(Error::EmptyInput("--input")),
            _ => Err(Error::Unsupported("this command takes a single --input".into())),
        }
    }

    fn function(&self) -> Result<Function> {
        if let Some(path) = &self.cli.image {
            if !self.cli.input.is_empty() {
                return Err(Error::Unsupported("give either --image or --input".into()));
            }
            let skeleton = match self.cli.skeleton {
                SkeletonArg::Max => Skeleton::Max,
                SkeletonArg::Min => Skeleton::Min,
            };
            return Ok(Function::Grid(load_image(path, skeleton)?));
        }
        match self.single_input()? {
            Document::GridFunction(h) => Ok(Function::Grid(h)),
            Document::SimplicialFunction(h) => Ok(Function::Pl(h)),
            Document::GridRegion(r) => Ok(Function::Grid(ConstructibleFunction::indicator(&r))),
            Document::SimplicialSet(s) => {
                let values = vec![1.0; s.vertices().len()];
                // every vertex at 1 makes the PL function the set's indicator
                Ok(Function::Pl(PLFunction::new(s, values)?))
            }
        }
    }

    fn k(&self) -> Result<usize> {
        self.cli.k.ok_or(Error::EmptyInput("--k"))
    }

    fn bound(&self) -> Bound {
        self.cli.bound.into()
    }

    fn valuation(&self, path: &Path) -> Result<HadwigerValuation> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let v: HadwigerValuation = serde_json::from_str(&text)
            .map_err(|e| match json_error(e) {
                Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
                other => other,
            })?;
        HadwigerValuation::new(v.profiles, v.bound)
    }

    /// Calibration covering every k < n used by a sampled path.
    fn calibrations(&self, n: usize, ks: impl IntoIterator<Item = usize>) -> Result<Calibrations> {
        let mut c = Calibrations::load()?;
        for k in ks {
            if k > 0 && k < n && k <= MAX_MC_K {
                c.ensure(n, k)?;
            }
        }
        Ok(c)
    }
}

fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

fn integral_json(command: &str, r: &crate::integrals::IntegralResult) -> Vec<(&'static str, Value)> {
    vec![
        ("command", json!(command)),
        ("k", json!(r.k)),
        ("bound", json!(r.bound)),
        ("method", json!(r.method)),
        ("value", json!(r.value)),
        ("stderr", json!(r.stderr)),
        ("samples", json!(r.samples)),
        ("seed", json!(r.seed)),
        ("constant", json!(r.constant)),
    ]
}

fn execute(ctx: &Context) -> Result<Value> {
    let cli = ctx.cli;
    match &cli.command {
        Command::Chi => {
            let doc = ctx.single_input()?;
            let chi = match &doc {
                Document::GridRegion(r) => r.euler_characteristic(),
                Document::SimplicialSet(s) => s.euler_characteristic(),
                other => {
                    return Err(Error::Unsupported(format!(
                        "chi expects a grid-region or simplicial-set, got {}",
                        other.kind()
                    )))
                }
            };
            Ok(object(vec![("command", json!("chi")), ("input", json!(doc.kind())), ("value", json!(chi))]))
        }
        Command::Mu => {
            let Document::GridRegion(region) = ctx.single_input()? else {
                return Err(Error::Unsupported("mu expects a grid-region; use mu-mc for simplicial sets".into()));
            };
            let n = region.complex().dim();
            let ks: Vec<usize> = match cli.k {
                Some(k) => vec![k],
                None => (0..=n).collect(),
            };
            let mut rows = Vec::new();
            for &k in &ks {
                rows.push(object(vec![("k", json!(k)), ("mu", json!(mu_grid_exact(&region, k)?))]));
            }
            let mut out = vec![("command", json!("mu"))];
            if let Some(k) = cli.k {
                out.push(("k", json!(k)));
                out.push(("value", rows[0]["mu"].clone()));
            }
            out.push(("rows", Value::Array(rows)));
            Ok(object(out))
        }
        Command::MuMc { method } => {
            let k = ctx.k()?;
            let doc = ctx.single_input()?;
            let (n, set): (usize, Box<dyn CellComplex + Sync>) = match doc {
                Document::GridRegion(r) => (r.complex().dim(), Box::new(r)),
                Document::SimplicialSet(s) => (s.ambient_dim(), Box::new(s)),
                other => return Err(Error::Unsupported(format!("mu-mc expects a set, got {}", other.kind()))),
            };
            if k > n {
                return Err(Error::KOutOfRange { k, n });
            }
            let cal = ctx.calibrations(n, [k])?;
            let est = match method {
                McMethod::Crofton => mu_crofton(set.as_ref(), k, cli.samples, ctx.seed, &cal.table)?,
                McMethod::Slice => mu_slice_mc(set.as_ref(), k, cli.samples, ctx.seed, &cal.table)?,
            };
            let name = match method {
                McMethod::Crofton => "crofton",
                McMethod::Slice => "slice",
            };
            Ok(object(vec![
                ("command", json!("mu-mc")),
                ("method", json!(name)),
                ("k", json!(k)),
                ("value", json!(est.value)),
                ("stderr", json!(est.stderr)),
                ("samples", json!(est.samples)),
                ("seed", json!(est.seed)),
                ("constant", json!(est.constant)),
                ("calibration", cal.describe(n, k)),
            ]))
        }
        Command::EulerInt => {
            let r = match ctx.function()? {
                Function::Grid(h) => hadwiger_constructible(&h, 0, ctx.bound())?,
                Function::Pl(h) => hadwiger_pl_euler(&h, ctx.bound()),
            };
            Ok(object(integral_json("euler-int", &r)))
        }
        Command::HadwigerInt => {
            let k = ctx.k()?;
            let f = ctx.function()?;
            let n = f.dim();
            let cal = ctx.calibrations(n, [k])?;
            let mc = MonteCarlo { samples: cli.samples, seed: ctx.seed, constants: &cal.table };
            let r = match &f {
                Function::Grid(h) => hadwiger_constructible(h, k, ctx.bound())?,
                Function::Pl(h) => hadwiger_pl(h, k, ctx.bound(), &mc)?,
            };
            let mut out = integral_json("hadwiger-int", &r);
            if r.samples > 1 {
                out.push(("calibration", cal.describe(n, k)));
            }
            Ok(object(out))
        }
        Command::StepSeq { m_list } => {
            let k = ctx.k()?;
            let f = ctx.function()?;
            let n = f.dim();
            let cal = ctx.calibrations(n, [k])?;
            let mc = MonteCarlo { samples: cli.samples, seed: ctx.seed, constants: &cal.table };
            let bound = ctx.bound();
            let exact = match &f {
                Function::Grid(h) => hadwiger_constructible(h, k, bound)?,
                Function::Pl(h) => hadwiger_pl(h, k, bound, &mc)?,
            };
            let mut rows = Vec::new();
            for &m in m_list {
                let r = match &f {
                    Function::Grid(h) => step_integral_constructible(h, m, k, bound)?,
                    Function::Pl(h) => step_integral_pl(h, m, k, bound, &mc)?,
                };
                rows.push(object(vec![
                    ("m", json!(m)),
                    ("value", json!(r.value)),
                    ("stderr", json!(r.stderr)),
                    ("limit", json!(exact.value)),
                    ("error", json!((r.value - exact.value).abs())),
                ]));
            }
            Ok(object(vec![
                ("command", json!("step-seq")),
                ("k", json!(k)),
                ("bound", json!(bound)),
                ("method", json!(exact.method)),
                ("samples", json!(exact.samples)),
                ("seed", json!(exact.seed)),
                ("constant", json!(exact.constant)),
                ("rows", Value::Array(rows)),
            ]))
        }
        Command::Dual => {
            let Function::Grid(h) = ctx.function()? else {
                return Err(Error::Unsupported("dual expects a grid function".into()));
            };
            let d = verdier_dual(&h);
            match cli.format {
                FormatArg::Json => {
                    Ok(serde_json::from_str(&Document::GridFunction(d).to_json()).expect("valid document"))
                }
                FormatArg::Csv => {
                    let rows = d
                        .complex()
                        .cells()
                        .map(|c| {
                            let id: Vec<String> = c.0.iter().map(|p| p.to_string()).collect();
                            object(vec![("cell", json!(id.join(" "))), ("value", json!(d.value(&c)))])
                        })
                        .collect();
                    Ok(object(vec![("command", json!("dual")), ("rows", Value::Array(rows))]))
                }
            }
        }
        Command::Prop31 => {
            let Function::Grid(h) = ctx.function()? else {
                return Err(Error::Unsupported("prop31 expects a grid function".into()));
            };
            let ks: Vec<usize> = match cli.k {
                Some(k) => vec![k],
                None => (0..=h.dim()).collect(),
            };
            let mut rows = Vec::new();
            for k in ks {
                let (lhs, rhs) = prop31_residual(&h, k)?;
                rows.push(object(vec![
                    ("k", json!(k)),
                    ("integral", json!(lhs)),
                    ("signed_dual_integral", json!(rhs)),
                    ("difference", json!(lhs - rhs)),
                ]));
            }
            Ok(object(vec![("command", json!("prop31")), ("rows", Value::Array(rows))]))
        }
        Command::Valuation { valuation } => {
            let v = ctx.valuation(valuation)?;
            let f = ctx.function()?;
            let n = f.dim();
            let cal = ctx.calibrations(n, 1..n)?;
            let mc = MonteCarlo { samples: cli.samples, seed: ctx.seed, constants: &cal.table };
            let r = match &f {
                Function::Grid(h) => v.evaluate_constructible(h)?,
                Function::Pl(h) => v.evaluate_pl(h, &mc)?,
            };
            let rows = r
                .terms
                .iter()
                .enumerate()
                .map(|(k, t)| object(vec![("k", json!(k)), ("value", json!(t.0)), ("stderr", json!(t.1))]))
                .collect();
            let mut out = vec![
                ("command", json!("valuation")),
                ("bound", json!(v.bound)),
                ("value", json!(r.value)),
                ("stderr", json!(r.stderr)),
                ("samples", json!(cli.samples)),
                ("seed", json!(ctx.seed)),
            ];
            if matches!(f, Function::Pl(_)) && n > 1 {
                out.push(("calibration", Value::Array((1..n.min(MAX_MC_K + 1)).map(|k| cal.describe(n, k)).collect())));
            }
            out.push(("rows", Value::Array(rows)));
            Ok(object(out))
        }
        Command::AdditivityCheck { valuation } => {
            let v = ctx.valuation(valuation)?;
            let [a, b] = cli.input.as_slice() else {
                return Err(Error::Unsupported("additivity-check takes exactly two --input grid functions".into()));
            };
            let (Document::GridFunction(f), Document::GridFunction(g)) = (Document::load(a)?, Document::load(b)?) else {
                return Err(Error::Unsupported("additivity-check expects grid functions".into()));
            };
            let residual = additivity_residual(&v, &f, &g)?;
            Ok(object(vec![
                ("command", json!("additivity-check")),
                ("residual", json!(residual)),
                ("tolerance", json!(cli.tolerance)),
                ("pass", json!(residual <= cli.tolerance)),
            ]))
        }
        Command::InvarianceCheck { valuation, angle_deg, translate } => {
            let v = ctx.valuation(valuation)?;
            let f = ctx.function()?;
            let n = f.dim();
            let shift = if translate.is_empty() { vec![0.0; n] } else { translate.clone() };
            if shift.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: shift.len() });
            }
            match &f {
                Function::Grid(h) => {
                    if *angle_deg != 0.0 {
                        return Err(Error::Unsupported("grid functions only support translations".into()));
                    }
                    let residual = translation_residual(&v, h, &shift)?;
                    Ok(object(vec![
                        ("command", json!("invariance-check")),
                        ("residual", json!(residual)),
                        ("combined_stderr", json!(0.0)),
                        ("tolerance", json!(cli.tolerance)),
                        ("pass", json!(residual <= cli.tolerance)),
                    ]))
                }
                Function::Pl(h) => {
                    let rotation = plane_rotation(n, angle_deg.to_radians())?;
                    let cal = ctx.calibrations(n, 1..n)?;
                    let mc = MonteCarlo { samples: cli.samples, seed: ctx.seed, constants: &cal.table };
                    let check = invariance_residual(&v, h, &rotation, &shift, &mc)?;
                    let allowed = cli.tolerance.max(3.0 * check.combined_stderr);
                    Ok(object(vec![
                        ("command", json!("invariance-check")),
                        ("residual", json!(check.residual)),
                        ("combined_stderr", json!(check.combined_stderr)),
                        ("original", json!(check.original.value)),
                        ("moved", json!(check.moved.value)),
                        ("samples", json!(cli.samples)),
                        ("seed", json!(ctx.seed)),
                        ("tolerance", json!(allowed)),
                        ("pass", json!(check.residual <= allowed)),
                    ]))
                }
            }
        }
        Command::DecreasingExp { profile, m_list } => {
            let k = cli.k.unwrap_or(0);
            let Function::Pl(h) = ctx.function()? else {
                return Err(Error::Unsupported("decreasing-exp expects a simplicial function".into()));
            };
            let c = match profile {
                Some(text) => {
                    let pts: Vec<[f64; 2]> =
                        serde_json::from_str(text).map_err(|e| Error::Parse(format!("--profile: {e}")))?;
                    CoefficientProfile::try_from(pts)?
                }
                None => CoefficientProfile::linear(-1.0),
            };
            let n = h.ambient_dim();
            let cal = ctx.calibrations(n, [k])?;
            let mc = MonteCarlo { samples: cli.samples, seed: ctx.seed, constants: &cal.table };
            let rows = decreasing_composition(&h, &c, k, m_list, &mc)?
                .into_iter()
                .map(|r| {
                    object(vec![
                        ("m", json!(r.m)),
                        ("lhs", json!(r.lhs)),
                        ("rhs", json!(r.rhs)),
                        ("gap", json!(r.gap())),
                        ("lhs_stderr", json!(r.lhs_stderr)),
                        ("rhs_stderr", json!(r.rhs_stderr)),
                    ])
                })
                .collect();
            Ok(object(vec![
                ("command", json!("decreasing-exp")),
                ("k", json!(k)),
                ("samples", json!(cli.samples)),
                ("seed", json!(ctx.seed)),
                ("rows", Value::Array(rows)),
            ]))
        }
        Command::MuCurve { s_grid } => {
            let k = ctx.k()?;
            let f = ctx.function()?;
            let critical = match &f {
                Function::Grid(h) => h.critical_values(),
                Function::Pl(h) => h.critical_values(),
            };
            let mut levels: Vec<f64> = critical.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
            levels.push(critical[critical.len() - 1] + 1.0);
            levels.extend(s_grid.iter().copied());
            levels.sort_by(f64::total_cmp);
            levels.dedup();
            if levels.iter().any(|&s| s <= 0.0) {
                eprintln!("warning: for s ≤ 0 the excursion {{h ≥ s}} is unbounded; reported values cover the input's support only");
            }
            let mut rows = Vec::new();
            for s in levels {
                let mu = match &f {
                    Function::Grid(h) => mu_grid_exact(&h.level_region(Cut::Geq, s), k)?,
                    Function::Pl(h) if k == 0 => h.excursion_chi(Cut::Geq, s) as f64,
                    Function::Pl(h) if k == h.ambient_dim() => h.excursion_volume(Cut::Geq, s)?,
                    Function::Pl(_) => {
                        return Err(Error::Unsupported("mu-curve on simplicial functions needs k = 0 or k = n".into()))
                    }
                };
                rows.push(object(vec![("s", json!(s)), ("mu", json!(mu))]));
            }
            Ok(object(vec![("command", json!("mu-curve")), ("k", json!(k)), ("rows", Value::Array(rows))]))
        }
        Command::Calibrate { n } => {
            let n = *n;
            let ks: Vec<usize> = match cli.k {
                Some(k) => vec![k],
                None => (1..n.min(MAX_MC_K + 1)).collect(),
            };
            let seed = cli.seed.unwrap_or(CALIBRATION_SEED);
            let mut table = CroftonConstants::new();
            for k in ks {
                table.insert(calibrate(n, k, cli.samples, seed)?);
            }
            match cli.format {
                FormatArg::Json => Ok(serde_json::from_str(&table.to_json()).expect("valid table")),
                FormatArg::Csv => {
                    let rows = table.entries().map(|c| serde_json::to_value(c).expect("serializable")).collect();
                    Ok(object(vec![("command", json!("calibrate")), ("rows", Value::Array(rows))]))
                }
            }
        }
    }
}

/// Rotation by `angle` in the plane of the first two axes.
fn plane_rotation(n: usize, angle: f64) -> Result<Vec<Vec<f64>>> {
    let mut r: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    if angle != 0.0 {
        if n < 2 {
            return Err(Error::Unsupported("rotations need n ≥ 2".into()));
        }
        let (s, c) = angle.sin_cos();
        r[0][0] = c;
        r[0][1] = -s;
        r[1][0] = s;
        r[1][1] = c;
    }
    Ok(r)
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Parse => 2,
        ErrorKind::Validation => 3,
        ErrorKind::Numerical => 4,
    }
}

/// Runs a parsed command and returns the rendered output.
pub fn run_cli(cli: &Cli) -> Result<String> {
    let start = Instant::now();
    let ctx = Context { cli, seed: cli.seed.unwrap_or(0) };
    let work = || execute(&ctx);
    let mut value = match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    if cli.timing {
        if let Value::Object(m) = &mut value {
            m.insert("wall_time_s".into(), json!(start.elapsed().as_secs_f64()));
        }
    }
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    render(&value, format)
}

/// Entry point shared by the binary: parse, run, write, map errors to
/// exit codes (2 parse, 3 validation, 4 numerical).
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = run_cli(&cli).and_then(|text| match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string())),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
