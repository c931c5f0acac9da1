use gamov::decay_subspace::{
    decompose, gamov, transition_curve, Decomposition, Evolution, PoleData,
};
use gamov::grid_hardy::max_resolved_index;
use gamov::resonance_finder::{find_poles, write_csv, PoleKind, Resonance};
use gamov::semigroup_engine::build_polar_isometry;
use gamov::{Complex64, Grid};

use crate::config::{RunConfig, DEFAULT_GRID_L, DEFAULT_GRID_N};
use crate::output::{to_json, write_atomic};
use crate::CliError;

/// rank budget of the polar isometry behind the unitary curve, capped by
/// what the grid resolves
const ISOMETRY_RANK: usize = 48;

pub fn locate(cfg: &RunConfig) -> Result<Vec<Resonance>, CliError> {
    find_poles(&cfg.model, &cfg.regions, &cfg.rims)
        .map_err(|e| CliError::scan(format!("resonance scan failed: {e}")))
}

fn format_zeta(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.6}{sign}{:.6}i", z.re, z.im.abs())
}

pub fn resonances(cfg: &RunConfig) -> Result<(), CliError> {
    let poles = locate(cfg)?;
    let dir = cfg.out_dir();
    write_atomic(dir, "poles.json", to_json(&poles)?.as_bytes())?;
    let mut csv = Vec::new();
    write_csv(&mut csv, &poles).map_err(|e| CliError::io(e.to_string()))?;
    write_atomic(dir, "poles.csv", &csv)?;

    println!("{}: {} pole(s)", cfg.model.name(), poles.len());
    println!(
        "{:<28} {:>5}  {:<13} {:>10}",
        "zeta", "sheet", "kind", "residual"
    );
    for r in &poles {
        println!(
            "{:<28} {:>5}  {:<13} {:>10.3e}",
            format_zeta(r.zeta),
            r.sheet.index(),
            r.kind.as_str(),
            r.residual
        );
    }
    Ok(())
}

/// The resonance closest to the real axis.
fn leading(poles: &[Resonance]) -> Option<&Resonance> {
    poles
        .iter()
        .filter(|r| r.kind == PoleKind::Resonance)
        .min_by(|a, b| a.zeta.im.abs().total_cmp(&b.zeta.im.abs()))
}

pub struct Prepared {
    pub grid: Grid,
    pub poles: Vec<Resonance>,
    pub d: Decomposition,
}

/// Poles, then 𝒩/ℳ/𝒯 on the default fine grid. A trivial 𝒯 is reported
/// before a missing resonance, so pole-free models exit with 3.
pub fn prepare(cfg: &RunConfig) -> Result<Prepared, CliError> {
    let grid = cfg.grid_or(DEFAULT_GRID_N, DEFAULT_GRID_L)?;
    let poles = locate(cfg)?;
    let pd = PoleData::from_resonances(&cfg.model, &poles);
    let d = decompose(&cfg.model, grid, cfg.basis_n, cfg.basis_n, &pd)
        .map_err(|e| CliError::config(format!("subspace construction failed: {e}")))?;
    if d.t.is_trivial() {
        return Err(CliError::trivial(format!(
            "the admissible subspace of {} is {{0}} (no poles for N to cancel), nothing decays",
            cfg.model.name()
        )));
    }
    Ok(Prepared { grid, poles, d })
}

pub fn decay(cfg: &RunConfig) -> Result<(), CliError> {
    let p = prepare(cfg)?;
    let r = leading(&p.poles)
        .ok_or_else(|| CliError::scan("no resonance found in the scan regions"))?;
    let f = gamov(r.zeta, &r.kernel_vector(), p.grid).map_err(|e| CliError::scan(e.to_string()))?;
    let numerical = |e: gamov::Error| CliError::config(format!("decay curve failed: {e}"));

    let dc = transition_curve(&f, &cfg.times, Evolution::Decay(&p.d.t), Some(r.zeta))
        .map_err(numerical)?;
    let iso = build_polar_isometry(
        p.grid,
        cfg.model.dim_k(),
        ISOMETRY_RANK.min(max_resolved_index(p.grid) + 1),
    )
    .map_err(numerical)?;
    let uc = transition_curve(&f, &cfg.times, Evolution::Unitary(&iso), None).map_err(numerical)?;

    // normalized overlaps ⟨ê, U(t)ê⟩ of the respective states
    let dn = dc.norms[0].powi(2);
    let un = uc.norms[0].powi(2);
    let mut wr = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::io(e.to_string());
    wr.write_record([
        "t",
        "unitary_re",
        "unitary_im",
        "unitary_abs",
        "decay_re",
        "decay_im",
        "decay_abs",
        "reference",
    ])
    .map_err(io)?;
    let mut worst: f64 = 0.0;
    for (i, &t) in cfg.times.iter().enumerate() {
        let u = uc.overlaps[i] / un;
        let d = dc.overlaps[i] / dn;
        let reference = (-t * r.zeta.im.abs()).exp();
        worst = worst.max((d.norm() - reference).abs() / reference);
        let cells =
            [t, u.re, u.im, u.norm(), d.re, d.im, d.norm(), reference].map(|x| format!("{x:.11e}"));
        wr.write_record(&cells).map_err(io)?;
    }
    let bytes = wr.into_inner().map_err(|e| CliError::io(e.to_string()))?;
    write_atomic(cfg.out_dir(), "decay.csv", &bytes)?;

    println!(
        "{}: resonance {} (sheet {})",
        cfg.model.name(),
        format_zeta(r.zeta),
        r.sheet.index()
    );
    println!("dim T = {}, unitary rank = {}", p.d.t.dim(), iso.rank());
    println!("max relative deviation of |<e, D(t)e>| from exp(-t|Im zeta|): {worst:.3e}");
    Ok(())
}
