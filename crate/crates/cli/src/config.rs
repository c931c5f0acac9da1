use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use gamov::resonance_finder::{RimScan, ScanRegion};
use gamov::smatrix_models::{model_from_json, model_from_spec, model_from_spec_in, ModelSpec};
use gamov::{Grid, SMatrixModel, Sheet};

use crate::verify::check_names;
use crate::CliError;

/// Flags shared by every subcommand, as parsed.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct CommonArgs {
    /// Model: example1, rankone, squarewell, traceclass, a JSON file, or inline JSON
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Coupling of rankone / traceclass
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Square-well depth
    #[arg(long, global = true)]
    pub v0: Option<f64>,
    /// Square-well radius
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    /// Grid points (power of two)
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    /// Grid half extent L; the grid covers [-L, L)
    #[arg(long, global = true)]
    pub grid_l: Option<f64>,
    /// Working basis dimension n (headroom is n as well)
    #[arg(long, global = true)]
    pub basis_n: Option<usize>,
    /// Scan rectangle re0,re1,im0,im1 in the energy plane; repeatable
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub region: Vec<String>,
    /// Sheet (1 or 2) of the --region rectangles
    #[arg(long, global = true)]
    pub sheet: Option<u8>,
    /// Time grid t0:t1:dt, end point included
    #[arg(long, global = true)]
    pub times: Option<String>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Tolerance override NAME=VALUE for a verify check; repeatable
    #[arg(long, global = true)]
    pub tol: Vec<String>,
}

pub const DEFAULT_GRID_N: usize = 1 << 17;
pub const DEFAULT_GRID_L: f64 = 1600.0;
pub const DEFAULT_BASIS_N: usize = 32;
pub const DEFAULT_TIMES: &str = "0:3:0.1";

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: SMatrixModel,
    /// grid size and extent as given; commands fill in their own defaults
    pub grid_n: Option<usize>,
    pub grid_l: Option<f64>,
    pub basis_n: usize,
    pub regions: Vec<ScanRegion>,
    pub rims: Vec<RimScan>,
    pub times: Vec<f64>,
    pub out: Option<PathBuf>,
    pub tol: BTreeMap<String, f64>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::config(msg)
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs) -> Result<Self, CliError> {
        let model = parse_model(args)?;
        Grid::new(
            args.grid_n.unwrap_or(DEFAULT_GRID_N),
            args.grid_l.unwrap_or(DEFAULT_GRID_L),
        )
        .map_err(|e| bad(format!("bad grid: {e}")))?;
        let basis_n = args.basis_n.unwrap_or(DEFAULT_BASIS_N);
        if basis_n == 0 {
            return Err(bad("--basis-n must be positive"));
        }
        let sheet = match args.sheet {
            None => None,
            Some(1) => Some(Sheet::First),
            Some(2) => Some(Sheet::Second),
            Some(s) => return Err(bad(format!("--sheet must be 1 or 2, got {s}"))),
        };
        let (mut regions, rims) = default_scan(&model);
        if !args.region.is_empty() {
            let sheet = sheet.unwrap_or(if model.is_two_sheeted() {
                Sheet::Second
            } else {
                Sheet::First
            });
            regions = args
                .region
                .iter()
                .map(|r| parse_region(r, sheet))
                .collect::<Result<_, _>>()?;
        } else if sheet.is_some() {
            return Err(bad("--sheet applies to --region rectangles; none given"));
        }
        let times = parse_times(args.times.as_deref().unwrap_or(DEFAULT_TIMES))?;
        let tol = args
            .tol
            .iter()
            .map(|t| parse_tol(t))
            .collect::<Result<BTreeMap<_, _>, _>>()?;
        if let Some(name) = tol.keys().find(|k| !check_names().any(|c| c == k.as_str())) {
            return Err(bad(format!(
                "--tol: unknown check {name:?}; known checks: {}",
                check_names().collect::<Vec<_>>().join(", ")
            )));
        }
        if let Some(dir) = &args.out {
            check_out_dir(dir)?;
        }
        Ok(Self {
            model,
            grid_n: args.grid_n,
            grid_l: args.grid_l,
            basis_n,
            regions,
            rims,
            times,
            out: args.out.clone(),
            tol,
        })
    }

    pub fn grid_or(&self, n: usize, l: f64) -> Result<Grid, CliError> {
        Grid::new(self.grid_n.unwrap_or(n), self.grid_l.unwrap_or(l))
            .map_err(|e| bad(format!("bad grid: {e}")))
    }

    pub fn out_dir(&self) -> &Path {
        self.out.as_deref().unwrap_or(Path::new("."))
    }
}

fn parse_model(args: &CommonArgs) -> Result<SMatrixModel, CliError> {
    let name = args.model.as_deref().unwrap_or("example1").trim();
    let need =
        |v: Option<f64>, flag: &str| v.ok_or_else(|| bad(format!("model {name} needs --{flag}")));
    let spec = match name {
        "example1" => ModelSpec::Example1,
        "rankone" => ModelSpec::Rankone {
            a: need(args.a, "a")?,
        },
        "squarewell" => ModelSpec::Squarewell {
            v0: need(args.v0, "v0")?,
            radius: need(args.radius, "radius")?,
        },
        "traceclass" => ModelSpec::Traceclass {
            form_factor: Some("rankone".into()),
            a: Some(need(args.a, "a")?),
            file: None,
        },
        s if s.starts_with('{') => return model_from_json(s).map_err(|e| bad(e.to_string())),
        path => {
            let p = Path::new(path);
            let text = std::fs::read_to_string(p).map_err(|e| {
                bad(format!(
                    "--model {path}: not a model name and not readable ({e})"
                ))
            })?;
            let spec: ModelSpec =
                serde_json::from_str(&text).map_err(|e| bad(format!("{path}: {e}")))?;
            let base = p.parent().unwrap_or(Path::new("."));
            return model_from_spec_in(&spec, base).map_err(|e| bad(e.to_string()));
        }
    };
    model_from_spec(&spec).map_err(|e| bad(e.to_string()))
}

/// Regions and rim scans used when none are given.
fn default_scan(model: &SMatrixModel) -> (Vec<ScanRegion>, Vec<RimScan>) {
    let region = |re: (f64, f64), im: (f64, f64), s| {
        ScanRegion::new(re, im, s).expect("valid default region")
    };
    let rim = |lo, hi, s| RimScan::new(lo, hi, s).expect("valid default rim");
    match model {
        SMatrixModel::Rational(_) => (
            vec![
                region((-6.0, 6.0), (-6.0, -0.05), Sheet::First),
                region((-6.0, 6.0), (0.05, 6.0), Sheet::First),
            ],
            vec![rim(-6.0, -0.01, Sheet::First)],
        ),
        SMatrixModel::RankOne(_) => (
            vec![
                region((-6.0, 6.0), (-6.0, -0.05), Sheet::Second),
                region((-6.0, 6.0), (0.05, 6.0), Sheet::First),
            ],
            vec![
                rim(-6.0, -0.01, Sheet::First),
                rim(-6.0, -0.01, Sheet::Second),
            ],
        ),
        SMatrixModel::TraceClass(_) => (
            vec![region((-4.0, 4.0), (-4.0, -0.05), Sheet::Second)
                .with_resolution(21, 21)
                .expect("valid resolution")],
            vec![rim(-6.0, -0.01, Sheet::First)],
        ),
        SMatrixModel::SquareWell(w) => (
            vec![region((0.0, 200.0), (-70.0, -0.5), Sheet::Second)],
            vec![rim(-w.depth() - 1.0, -1e-4, Sheet::First)],
        ),
    }
}

pub fn parse_region(s: &str, sheet: Sheet) -> Result<ScanRegion, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad(format!("--region {s:?}: expected re0,re1,im0,im1")))?;
    if v.len() != 4 {
        return Err(bad(format!("--region {s:?}: expected four numbers")));
    }
    ScanRegion::new((v[0], v[1]), (v[2], v[3]), sheet)
        .map_err(|e| bad(format!("--region {s:?}: {e}")))
}

pub fn parse_times(s: &str) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad(format!("--times {s:?}: expected t0:t1:dt")))?;
    if v.len() != 3 {
        return Err(bad(format!("--times {s:?}: expected t0:t1:dt")));
    }
    let (t0, t1, dt) = (v[0], v[1], v[2]);
    if !(t0 >= 0.0 && t1.is_finite() && dt > 0.0) {
        return Err(bad(format!("--times {s:?}: need t0 ≥ 0 and dt > 0")));
    }
    if t1 < t0 {
        return Err(bad(format!("--times {s:?}: the time grid is empty")));
    }
    let steps = ((t1 - t0) / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|i| t0 + i as f64 * dt).collect())
}

fn parse_tol(s: &str) -> Result<(String, f64), CliError> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| bad(format!("--tol {s:?}: expected NAME=VALUE")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| bad(format!("--tol {s:?}: {value:?} is not a number")))?;
    if !(value > 0.0) {
        return Err(bad(format!("--tol {s:?}: tolerances must be positive")));
    }
    Ok((name.trim().to_string(), value))
}

fn check_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| bad(format!("--out {}: {e}", dir.display())))?;
    let meta = std::fs::metadata(dir).map_err(|e| bad(format!("--out {}: {e}", dir.display())))?;
    if meta.permissions().readonly() {
        return Err(bad(format!("--out {} is not writable", dir.display())));
    }
    Ok(())
}
