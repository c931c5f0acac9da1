//! Verification suites. Every check reports a measured error against a
//! tolerance and passes when measured ≤ tolerance; a check that cannot be
//! computed reports NaN and fails.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gamov::decay_subspace::{
    gamov, gamov_overlap, resolve_b_with_tol, restricted_apply, transition_curve, Evolution,
};
use gamov::grid_hardy::{
    cauchy_eval, fourier, mt_basis, project_half_line, project_hardy, Direction, Grid, GridFunction,
};
use gamov::linalg::tail_inner;
use gamov::resonance_finder::PoleKind;
use gamov::semigroup_engine::{apply_c, build_polar_isometry, generator_offset};
use gamov::smatrix_models::{momentum, rankone_resolvent_elem, Side};
use gamov::{Complex64, Error, SMatrixModel, Sheet, Sign};
use gauss_quad::GaussLegendre;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::commands::prepare;
use crate::config::RunConfig;
use crate::output::{to_json, write_atomic};
use crate::{CliError, Suite};

/// (name, default tolerance)
const CHECKS: &[(&str, f64)] = &[
    ("parseval", 1e-12),
    ("fourier_round_trip", 1e-12),
    ("q_complementarity", 1e-12),
    ("q_idempotence", 1e-12),
    ("p_complementarity", 1e-12),
    ("p_idempotence", 1e-12),
    ("cauchy_residue", 1e-4),
    ("cauchy_refinement", 0.5),
    ("eigenrelation", 5e-3),
    ("semigroup_law", 1e-3),
    ("contraction", 1e-12),
    ("polar_isometry", 1e-6),
    ("unitarity", 1e-12),
    ("resolvent_quadrature", 1e-6),
    ("resolvent_at_minus_one", 1e-12),
    ("resonance_missing", 0.5),
    ("gamov_angle", 1e-2),
    ("restricted_eigenrelation", 1e-2),
    ("generator_offset", 1e-3),
    ("gamov_orthogonality", 1e-3),
    ("resolvent", 1e-2),
    ("decay_law", 1e-2),
    ("decay_law_squared", 2e-2),
];

pub fn check_names() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|c| c.0)
}

const POLAR_RANK: usize = 48;
const ZETA: Complex64 = Complex64::new(1.0, -1.0);

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

struct Recorder<'a> {
    cfg: &'a RunConfig,
    checks: Vec<Check>,
}

impl Recorder<'_> {
    fn value(&mut self, name: &str, v: f64) {
        self.record(name, Ok::<_, ()>(v));
    }

    fn record<E>(&mut self, name: &str, measured: Result<f64, E>) {
        let default = CHECKS
            .iter()
            .find(|c| c.0 == name)
            .map(|c| c.1)
            .expect("registered check");
        let tolerance = self.cfg.tol.get(name).copied().unwrap_or(default);
        let measured = measured.unwrap_or(f64::NAN);
        self.checks.push(Check {
            name: name.into(),
            measured,
            tolerance,
            pass: measured <= tolerance,
        });
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: &GridFunction, b: &GridFunction) -> f64 {
    (a - b).norm() / b.norm()
}

/// As `rel`, comparing samples only; a transform round trip lands on a grid
/// that equals the original up to rounding of its extent.
fn rel_samples(a: &GridFunction, b: &GridFunction) -> f64 {
    let d: f64 = a
        .raw()
        .iter()
        .zip(b.raw())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    let n: f64 = b.raw().iter().map(|y| y.norm_sqr()).sum();
    (d / n).sqrt()
}

fn pole(grid: Grid, zeta: Complex64) -> GridFunction {
    GridFunction::from_fn(grid, move |l| 1.0 / (l - zeta))
}

fn random_function(grid: Grid, seed: u64) -> GridFunction {
    let mut rng = StdRng::seed_from_u64(seed);
    let values = (0..grid.n_points())
        .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    GridFunction::from_components(grid, vec![values]).expect("one component of grid length")
}

fn hardy(r: &mut Recorder<'_>) -> Result<(), CliError> {
    let grid = r.cfg.grid_or(1 << 14, 400.0)?;
    let f = random_function(grid, 7);
    let nf = f.norm();
    let fh = fourier(&f, Direction::Forward);
    r.value("parseval", (fh.norm() - nf).abs() / nf);
    r.value(
        "fourier_round_trip",
        rel_samples(&fourier(&fh, Direction::Inverse), &f),
    );

    let qp = project_hardy(&f, Sign::Plus);
    let qm = project_hardy(&f, Sign::Minus);
    r.value("q_complementarity", rel(&(&qp + &qm), &f));
    let q_idem = [
        (&project_hardy(&qp, Sign::Plus) - &qp).norm(),
        (&project_hardy(&qm, Sign::Minus) - &qm).norm(),
        project_hardy(&qm, Sign::Plus).norm(),
    ];
    r.value(
        "q_idempotence",
        q_idem.iter().fold(0.0f64, |a, &b| a.max(b)) / nf,
    );

    let pp = project_half_line(&f, Sign::Plus);
    let pm = project_half_line(&f, Sign::Minus);
    r.value("p_complementarity", rel(&(&pp + &pm), &f));
    let p_idem = [
        (&project_half_line(&pp, Sign::Plus) - &pp).norm(),
        (&project_half_line(&pm, Sign::Minus) - &pm).norm(),
        project_half_line(&pm, Sign::Plus).norm(),
    ];
    r.value(
        "p_idempotence",
        p_idem.iter().fold(0.0f64, |a, &b| a.max(b)) / nf,
    );

    let coarse = cauchy_panel_error(grid).ok();
    r.record("cauchy_residue", coarse.ok_or(()));
    let fine = Grid::new(2 * grid.n_points(), 2.0 * grid.half_extent())
        .map_err(|e| CliError::config(e.to_string()))?;
    let ratio = coarse
        .ok_or(())
        .and_then(|a| cauchy_panel_error(fine).map(|b| b / a).map_err(|_| ()));
    r.record("cauchy_refinement", ratio);
    Ok(())
}

/// max |cauchy_eval(1/(λ-ζ), z) - residue value| over a fixed panel.
fn cauchy_panel_error(grid: Grid) -> Result<f64, Error> {
    let zero = c(0.0, 0.0);
    let panel = [
        (c(1.0, -1.0), c(0.0, 1.0), None),
        (c(-2.0, -0.5), c(2.0, 0.5), None),
        (c(0.5, -3.0), c(-1.0, 2.0), None),
        (c(1.0, -1.0), c(3.0, 4.0), None),
        (c(0.0, 2.0), c(0.0, 3.0), Some(zero)),
        (c(1.0, 1.0), c(-1.0, 0.5), Some(zero)),
        (c(0.0, 2.0), c(1.0, -1.0), None),
        (c(-1.0, 0.5), c(0.0, -2.0), None),
        (c(1.0, -1.0), c(0.5, -0.5), Some(zero)),
        (c(0.0, -1.0), c(2.0, -3.0), Some(zero)),
    ];
    let mut worst: f64 = 0.0;
    for (zeta, z, want) in panel {
        let want = want.unwrap_or(1.0 / (z - zeta));
        let got = cauchy_eval(&pole(grid, zeta), z)?[0];
        worst = worst.max((got - want).norm());
    }
    Ok(worst)
}

fn semigroup(r: &mut Recorder<'_>) -> Result<(), CliError> {
    let grid = r.cfg.grid_or(1 << 16, 800.0)?;
    let e = pole(grid, ZETA);
    let eig = [0.5, 1.0, 2.0].iter().try_fold(0.0f64, |w, &t| {
        let want = e.scaled((c(0.0, -t) * ZETA).exp());
        Ok::<_, Error>(w.max(rel(&apply_c(&e, t)?, &want)))
    });
    r.record("eigenrelation", eig);

    let mut f = mt_basis(3, grid, 1, 0);
    f.axpy(c(0.5, 0.0), &pole(grid, c(2.0, -0.5)));
    let law = (|| Ok::<_, Error>(rel(&apply_c(&apply_c(&f, 0.5)?, 0.7)?, &apply_c(&f, 1.2)?)))();
    r.record("semigroup_law", law);

    let probes = [
        f.clone(),
        e.clone(),
        mt_basis(7, grid, 1, 0),
        random_function(grid, 99),
    ];
    let contraction = probes.iter().try_fold(0.0f64, |w, p| {
        [0.1, 0.5, 1.0, 3.0].iter().try_fold(w, |w, &t| {
            Ok::<_, Error>(w.max(apply_c(p, t)?.norm() / p.norm() - 1.0))
        })
    });
    r.record("contraction", contraction);

    let polar = (|| {
        let iso = build_polar_isometry(grid, 1, POLAR_RANK)?;
        let mut worst: f64 = 0.0;
        for i in 0..iso.rank() {
            let d = iso.initial_direction(i);
            let rf = iso.forward(&d)?;
            worst = worst.max((rf.norm() / d.norm() - 1.0).abs());
            worst = worst.max(rel(&iso.adjoint(&rf)?, &d));
        }
        if iso.rank() == 0 {
            return Err(Error::InvalidArgument("polar isometry has rank 0".into()));
        }
        Ok(worst)
    })();
    r.record("polar_isometry", polar);
    Ok(())
}

/// ∫₀^∞ (2/π)√λ / ((λ+1)²(z-λ)) dλ on the first sheet, with λ = tan²θ and
/// composite Gauss-Legendre in θ.
fn rankone_quadrature(z: Complex64) -> Complex64 {
    let gl = GaussLegendre::new(NonZeroUsize::new(16).expect("nonzero"));
    let panels = 400;
    let h = 0.5 * PI / panels as f64;
    let mut sum = c(0.0, 0.0);
    for p in 0..panels {
        let a = p as f64 * h;
        for (x, w) in gl.iter() {
            let t = a + 0.5 * h * (x + 1.0);
            let (s, co) = (t.sin(), t.cos());
            sum += (s * s * co * co) / (z * co * co - s * s) * (0.5 * h * w);
        }
    }
    sum * (4.0 / PI)
}

fn smatrix(r: &mut Recorder<'_>) -> Result<(), CliError> {
    let model = &r.cfg.model;
    let unitarity = (0..200).try_fold(0.0f64, |w, i| {
        let l = 10f64.powf(-3.0 + 6.0 * i as f64 / 199.0);
        let s = model.boundary(l, Side::Plus)?;
        let d = s.adjoint() * &s - nalgebra::DMatrix::identity(s.ncols(), s.ncols());
        Ok::<_, Error>(w.max(d.norm()))
    });
    r.record("unitarity", unitarity);

    if let SMatrixModel::RankOne(_) = model {
        // |z| ∈ {0.1, 1, 10, 100}; the second sheet adds the continued
        // density term 4ik/(1+z)², k the first-sheet momentum
        let angles = [
            (0.5, Sheet::First),
            (1.0, Sheet::First),
            (2.0 / 3.0, Sheet::Second),
            (-2.0 / 3.0, Sheet::Second),
            (-0.5, Sheet::Second),
        ];
        let mut worst: f64 = 0.0;
        let mut failed = None;
        for m in [0.1, 1.0, 10.0, 100.0] {
            for (a, sheet) in angles {
                let z = Complex64::from_polar(m, a * PI);
                let mut quad = rankone_quadrature(z);
                let closed = momentum(z, Sheet::First).and_then(|k| {
                    if sheet == Sheet::Second {
                        quad += c(0.0, 4.0) * k / ((1.0 + z) * (1.0 + z));
                    }
                    rankone_resolvent_elem(z, sheet)
                });
                match closed {
                    Ok(closed) => worst = worst.max((closed - quad).norm() / quad.norm()),
                    Err(e) => failed = Some(e),
                }
            }
        }
        r.record("resolvent_quadrature", failed.map_or(Ok(worst), Err));
        let at = rankone_resolvent_elem(c(-1.0, 0.0), Sheet::First).map(|v| (v + 0.25).norm());
        r.record("resolvent_at_minus_one", at);
    }
    Ok(())
}

fn subspace(r: &mut Recorder<'_>) -> Result<(), CliError> {
    let names = [
        "resonance_missing",
        "gamov_angle",
        "restricted_eigenrelation",
        "generator_offset",
        "gamov_orthogonality",
        "resolvent",
        "decay_law",
        "decay_law_squared",
    ];
    let p = match prepare(r.cfg) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("gamov: subspace suite: {}", e.message);
            for n in names {
                r.record(n, Err(()));
            }
            return Ok(());
        }
    };
    let found = p
        .poles
        .iter()
        .filter(|x| x.kind == PoleKind::Resonance)
        .min_by(|a, b| a.zeta.im.abs().total_cmp(&b.zeta.im.abs()));
    r.value("resonance_missing", if found.is_some() { 0.0 } else { 1.0 });
    let Some(res) = found else {
        for n in &names[1..] {
            r.record(n, Err(()));
        }
        return Ok(());
    };
    let zeta = res.zeta;
    let k = res.kernel_vector();
    let e = match gamov(zeta, &k, p.grid) {
        Ok(e) => e,
        Err(err) => {
            eprintln!("gamov: subspace suite: {err}");
            for n in &names[1..] {
                r.record(n, Err(()));
            }
            return Ok(());
        }
    };
    let tail_norm = |f: &GridFunction| tail_inner(f, f).map(|v| v.re.sqrt());

    r.record("gamov_angle", p.d.t.angle_to(&e));
    let eig = [0.5, 1.0, 2.0].iter().try_fold(0.0f64, |w, &t| {
        let got = restricted_apply(&p.d.t, &e, t)?;
        let want = e.scaled((c(0.0, -t) * zeta).exp());
        Ok::<_, Error>(w.max(tail_norm(&(&got - &want))? / tail_norm(&e)?))
    });
    r.record("restricted_eigenrelation", eig);
    r.record(
        "generator_offset",
        generator_offset(&e).map(|g| (&g.offset + &k).norm() / k.norm()),
    );
    r.record(
        "gamov_orthogonality",
        gamov_overlap(&r.cfg.model, &p.d.s, &p.d.n, zeta, &k),
    );

    let poles: Vec<Complex64> = p.poles.iter().map(|x| x.zeta).collect();
    let g = p.d.t.members[0].clone();
    let resolvent = [c(0.5, 0.0), c(2.0, 0.0), c(0.0, -3.0)]
        .iter()
        .try_fold(0.0f64, |w, &z| {
            Ok::<_, Error>(
                w.max(resolve_b_with_tol(&p.d.t, &p.d.m, &g, z, &poles, f64::INFINITY)?.residual),
            )
        });
    r.record("resolvent", resolvent);

    match transition_curve(&e, &r.cfg.times, Evolution::Decay(&p.d.t), Some(zeta)) {
        Ok(curve) => {
            let n0 = curve.norms[0].powi(2);
            let (mut lin, mut sq): (f64, f64) = (0.0, 0.0);
            for (i, &t) in curve.times.iter().enumerate() {
                let a = curve.overlaps[i].norm() / n0;
                let want = (-t * zeta.im.abs()).exp();
                lin = lin.max((a - want).abs() / want);
                sq = sq.max((a * a - want * want).abs() / (want * want));
            }
            r.value("decay_law", lin);
            r.value("decay_law_squared", sq);
        }
        Err(err) => {
            eprintln!("gamov: subspace suite: {err}");
            r.record("decay_law", Err(()));
            r.record("decay_law_squared", Err(()));
        }
    }
    Ok(())
}

/// Runs the suite, prints the report and returns whether every check passed.
pub fn run(cfg: &RunConfig, suite: Suite) -> Result<bool, CliError> {
    let mut r = Recorder {
        cfg,
        checks: Vec::new(),
    };
    let all = suite == Suite::All;
    if all || suite == Suite::Hardy {
        hardy(&mut r)?;
    }
    if all || suite == Suite::Semigroup {
        semigroup(&mut r)?;
    }
    if all || suite == Suite::Smatrix {
        smatrix(&mut r)?;
    }
    if all || suite == Suite::Subspace {
        subspace(&mut r)?;
    }
    let pass = r.checks.iter().all(|c| c.pass);
    let name = format!("{suite:?}").to_lowercase();
    let report = Report {
        suite: name,
        pass,
        checks: r.checks,
    };
    let json = to_json(&report)?;
    if let Some(dir) = &cfg.out {
        write_atomic(dir, "verify.json", json.as_bytes())?;
    }
    print!("{json}");
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!(
            "gamov: check {} failed: measured {:.3e}, tolerance {:.1e}",
            c.name, c.measured, c.tolerance
        );
    }
    Ok(pass)
}
