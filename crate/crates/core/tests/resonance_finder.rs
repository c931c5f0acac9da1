mod common;

use std::time::Instant;

use common::{c, ode_jost_zero, shooting_bound_states};
use gamov::resonance_finder::{
    conjugate_pair_audit, find_in_region, find_poles, from_json, kernel_vector, refine,
    scan_region, scan_rim, to_json, winding_number, write_csv, Cell, PoleKind, RimScan, ScanRegion,
};
use gamov::smatrix_models::{
    RankOneModel, RationalModel, SquareWellModel, TraceClassData, TraceClassModel,
};
use gamov::{Complex64, Error, SMatrixModel, Sheet};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn rankone(a: f64) -> SMatrixModel {
    SMatrixModel::RankOne(RankOneModel::new(a).unwrap())
}

fn example1() -> SMatrixModel {
    SMatrixModel::Rational(RationalModel::example1())
}

/// Roots of (1 − ik)² + a = 0, i.e. k² + 2ik − (1 + a) = 0, by the
/// quadratic formula, mapped to (z, sheet).
fn rankone_oracle(a: f64) -> Vec<(Complex64, Sheet)> {
    let (b, cc) = (c(0.0, 2.0), c(-(1.0 + a), 0.0));
    let disc = (b * b - 4.0 * cc).sqrt();
    [(-b + disc) / 2.0, (-b - disc) / 2.0]
        .iter()
        .map(|&k| {
            let sheet = if k.im > 0.0 {
                Sheet::First
            } else {
                Sheet::Second
            };
            let mut z = k * k;
            if k.re.abs() < 1e-15 {
                z.im = 0.0;
            }
            (z, sheet)
        })
        .collect()
}

fn lower_region(half: f64, top: f64) -> ScanRegion {
    ScanRegion::new((-half, half), (-half, -top), Sheet::Second).unwrap()
}

#[test]
fn rankone_resonance_matches_quadratic_formula() {
    for a in [0.25, 1.0, 4.0] {
        let t0 = Instant::now();
        let model = rankone(a);
        let rep = find_in_region(&model, &lower_region(10.0, 0.05)).unwrap();
        let elapsed = t0.elapsed().as_secs_f64();
        let expect = c(a - 1.0, -2.0 * a.sqrt());
        assert_eq!(rep.poles.len(), 1, "a={a}: {:?}", rep.poles);
        let p = &rep.poles[0];
        assert!(
            (p.zeta - expect).norm() < 1e-8,
            "a={a}: {} vs {expect}",
            p.zeta
        );
        assert_eq!(p.sheet, Sheet::Second);
        assert_eq!(p.kind, PoleKind::Resonance);
        assert_eq!(rep.total_winding, 1);
        assert!(elapsed < 1.0, "a={a}: {elapsed}s");
        // oracle root in ℂ₋ agrees
        let (z, s) = rankone_oracle(a)
            .into_iter()
            .find(|(z, _)| z.im < 0.0)
            .unwrap();
        assert_eq!(s, Sheet::Second);
        assert!((p.zeta - z).norm() < 1e-8);
    }
}

#[test]
fn scan_examples() {
    let a1 = rankone(1.0);
    let cands = scan_region(
        &a1,
        &ScanRegion::new((-4.0, 4.0), (-4.0, -0.05), Sheet::Second).unwrap(),
    )
    .unwrap();
    assert_eq!(cands.len(), 1);
    assert!((cands[0].z - c(0.0, -2.0)).norm() < 0.3);

    let ex = example1();
    let cands = scan_region(
        &ex,
        &ScanRegion::new((0.0, 2.0), (-2.0, -0.05), Sheet::First).unwrap(),
    )
    .unwrap();
    assert_eq!(cands.len(), 1);
    assert!((cands[0].z - c(1.0, -1.0)).norm() < 0.1);

    let upper = ScanRegion::new((-4.0, 4.0), (0.05, 4.0), Sheet::First).unwrap();
    assert!(scan_region(&a1, &upper).unwrap().is_empty());
}

#[test]
fn refine_examples() {
    let r = refine(&rankone(1.0), c(-0.5, -1.5), Sheet::Second).unwrap();
    assert!((r.zeta - c(0.0, -2.0)).norm() < 1e-10);
    assert_eq!(r.kind, PoleKind::Resonance);
    assert!(r.refinement_iterations <= 50);

    let r = refine(&example1(), c(1.2, -0.8), Sheet::First).unwrap();
    assert!((r.zeta - c(1.0, -1.0)).norm() < 1e-12);
    assert!(r.residual < 1e-10);
    assert_eq!(r.kernel.len(), 1);
    assert!((r.kernel[0] - c(1.0, 0.0)).norm() < 1e-12);

    let r = refine(&rankone(-2.0), c(-0.2, 0.0), Sheet::First).unwrap();
    assert_eq!(r.kind, PoleKind::BoundState);
    assert_eq!(r.zeta.im, 0.0);
    assert!((r.zeta.re + (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-8);
}

#[test]
fn kernel_vectors() {
    let (k, m) = kernel_vector(&example1(), c(1.0, -1.0)).unwrap();
    assert!(m < 1e-12 && (k[0].norm() - 1.0).abs() < 1e-14);
    let (k, m) = kernel_vector(&rankone(1.0), c(0.0, -2.0)).unwrap();
    assert!(m < 1e-12 && (k[0].norm() - 1.0).abs() < 1e-14);
    match kernel_vector(&example1(), c(-1.0, -1.0)) {
        Err(Error::NotAPole { minimum, .. }) => assert!(minimum > 0.1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn negative_coupling_rims() {
    let rims = |a: f64| {
        let m = rankone(a);
        let mut all = Vec::new();
        for sheet in [Sheet::First, Sheet::Second] {
            all.extend(scan_rim(&m, &RimScan::new(-100.0, -1e-4, sheet).unwrap()).unwrap());
        }
        all
    };
    let r = rims(-2.0);
    let bound: Vec<_> = r
        .iter()
        .filter(|p| p.kind == PoleKind::BoundState)
        .collect();
    let rim: Vec<_> = r.iter().filter(|p| p.kind == PoleKind::RimPole).collect();
    assert_eq!(bound.len(), 1, "{r:?}");
    assert_eq!(rim.len(), 1, "{r:?}");
    assert_eq!(bound[0].sheet, Sheet::First);
    assert!((bound[0].zeta.re + 3.0 - 2.0 * 2f64.sqrt()).abs() < 1e-8);
    assert!((rim[0].zeta.re + 3.0 + 2.0 * 2f64.sqrt()).abs() < 1e-8);
    assert_eq!(rim[0].sheet, Sheet::Second);

    let r = rims(-0.5);
    assert!(
        r.iter()
            .all(|p| p.kind == PoleKind::RimPole && p.sheet == Sheet::Second),
        "{r:?}"
    );
    let mut got: Vec<f64> = r.iter().map(|p| p.zeta.re).collect();
    got.sort_by(f64::total_cmp);
    let mut want: Vec<f64> = rankone_oracle(-0.5).iter().map(|(z, _)| z.re).collect();
    want.sort_by(f64::total_cmp);
    assert_eq!(got.len(), 2);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-8, "{g} vs {w}");
    }
}

#[test]
fn rankone_completeness_over_random_couplings() {
    let mut rng = StdRng::seed_from_u64(11);
    let region = ScanRegion::new((-10.0, 10.0), (-10.0, -0.01), Sheet::Second).unwrap();
    for _ in 0..20 {
        let a: f64 = rng.random_range(1e-3..=10.0);
        let rep = find_in_region(&rankone(a), &region).unwrap();
        let oracle: Vec<_> = rankone_oracle(a)
            .into_iter()
            .filter(|(z, s)| {
                *s == Sheet::Second && z.im < -0.01 && z.re.abs() <= 10.0 && z.im >= -10.0
            })
            .collect();
        assert_eq!(rep.poles.len(), oracle.len(), "a={a}");
        for (z, _) in oracle {
            assert!(
                rep.poles.iter().any(|p| (p.zeta - z).norm() < 1e-8),
                "a={a}"
            );
        }
    }
}

fn cell_counts_agree(model: &SMatrixModel, region: &ScanRegion) {
    let rep = find_in_region(model, region).unwrap();
    for cand in &rep.candidates {
        let w = winding_number(model, cand.cell, cand.sheet).unwrap();
        assert!((w - w.round()).abs() < 1e-3);
        let inside = rep
            .poles
            .iter()
            .filter(|p| cand.cell.contains(p.zeta))
            .count();
        assert_eq!(inside as i64, w.round() as i64, "{cand:?}");
    }
    let total: usize = rep.poles.iter().map(|p| p.multiplicity).sum();
    assert_eq!(total as i64, rep.total_winding);
}

#[test]
fn argument_principle_matches_refined_counts() {
    cell_counts_agree(&rankone(2.0), &lower_region(10.0, 0.01));
    cell_counts_agree(
        &example1(),
        &ScanRegion::new((-3.0, 3.0), (-3.0, 3.0), Sheet::First).unwrap(),
    );
    let well = SMatrixModel::SquareWell(SquareWellModel::new(10.0, 1.0).unwrap());
    cell_counts_agree(
        &well,
        &ScanRegion::new((0.0, 200.0), (-70.0, -0.5), Sheet::Second).unwrap(),
    );
}

#[test]
fn double_zero_is_counted_twice() {
    let m = SMatrixModel::Rational(
        RationalModel::new(
            vec![c(1.0, 1.0), c(1.0, 1.0)],
            vec![c(1.0, -1.0), c(1.0, -1.0)],
        )
        .unwrap(),
    );
    let cell = Cell {
        re: (0.5, 1.5),
        im: (-1.5, -0.5),
    };
    assert!((winding_number(&m, cell, Sheet::First).unwrap() - 2.0).abs() < 1e-3);
    let rep = find_in_region(
        &m,
        &ScanRegion::new((0.0, 2.0), (-2.0, -0.1), Sheet::First).unwrap(),
    )
    .unwrap();
    let total: usize = rep.poles.iter().map(|p| p.multiplicity).sum();
    assert_eq!(total, 2);
    assert!((rep.poles[0].zeta - c(1.0, -1.0)).norm() < 1e-6);
}

#[test]
fn square_well_zeros_match_shooting_oracle() {
    let (v0, a) = (10.0, 1.0);
    let model = SMatrixModel::SquareWell(SquareWellModel::new(v0, a).unwrap());

    let bound = scan_rim(
        &model,
        &RimScan::new(-v0 - 1.0, -1e-4, Sheet::First).unwrap(),
    )
    .unwrap();
    let oracle = shooting_bound_states(v0, a);
    assert_eq!(bound.len(), oracle.len());
    for (p, kappa) in bound.iter().zip(&oracle) {
        assert_eq!(p.kind, PoleKind::BoundState);
        assert!(
            (p.zeta.re + kappa * kappa).abs() < 1e-6,
            "{} vs {}",
            p.zeta.re,
            -kappa * kappa
        );
    }

    let region = ScanRegion::new((0.0, 200.0), (-70.0, -0.5), Sheet::Second).unwrap();
    let rep = find_in_region(&model, &region).unwrap();
    let mut ks: Vec<Complex64> = rep
        .poles
        .iter()
        .map(|p| gamov::smatrix_models::momentum(p.zeta, p.sheet).unwrap())
        .filter(|k| k.re > 0.0 && k.im < 0.0)
        .collect();
    ks.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
    assert!(ks.len() >= 4, "{ks:?}");
    for k in &ks[..4] {
        let o = ode_jost_zero(*k, v0, a);
        assert!((k - o).norm() < 1e-6, "{k} vs {o}");
    }
}

#[test]
fn traceclass_rankone_poles() {
    let m = SMatrixModel::TraceClass(TraceClassModel::new(TraceClassData::rank_one(1.0).unwrap()));
    let rep = find_in_region(
        &m,
        &ScanRegion::new((-4.0, 4.0), (-4.0, -0.05), Sheet::Second)
            .unwrap()
            .with_resolution(21, 21)
            .unwrap(),
    )
    .unwrap();
    assert_eq!(rep.poles.len(), 1);
    assert!(
        (rep.poles[0].zeta - c(0.0, -2.0)).norm() < 1e-8,
        "{}",
        rep.poles[0].zeta
    );
    assert_eq!(rep.poles[0].kind, PoleKind::Resonance);

    let m = SMatrixModel::TraceClass(TraceClassModel::new(
        TraceClassData::rank_one(-2.0).unwrap(),
    ));
    let r = scan_rim(&m, &RimScan::new(-10.0, -1e-3, Sheet::First).unwrap()).unwrap();
    assert_eq!(r.len(), 1, "{r:?}");
    assert_eq!(r[0].kind, PoleKind::BoundState);
    assert!((r[0].zeta.re + 3.0 - 2.0 * 2f64.sqrt()).abs() < 1e-8);
}

#[test]
fn conjugate_pair_audit_cases() {
    let ex = example1();
    let poles = find_in_region(
        &ex,
        &ScanRegion::new((-3.0, 3.0), (-3.0, 3.0), Sheet::First).unwrap(),
    )
    .unwrap()
    .poles;
    assert_eq!(poles.len(), 2);
    assert!(poles
        .iter()
        .any(|p| (p.zeta - c(0.0, 1.0)).norm() < 1e-10 && p.kind == PoleKind::Antiresonance));
    assert!(conjugate_pair_audit(&poles, &ex).admissible);

    let a1 = rankone(1.0);
    let poles = find_poles(&a1, &[lower_region(4.0, 0.05)], &[]).unwrap();
    assert!(conjugate_pair_audit(&poles, &a1).admissible);
    // the sheet-2 anti-resonance at 2i is outside the physical domain
    let mut with_anti = poles.clone();
    with_anti.push(refine(&a1, c(0.1, 1.9), Sheet::Second).unwrap());
    assert_eq!(with_anti[1].kind, PoleKind::Antiresonance);
    assert!(conjugate_pair_audit(&with_anti, &a1).admissible);

    let bad = SMatrixModel::Rational(
        RationalModel::new(
            vec![c(0.0, 2.0), c(0.0, -2.0)],
            vec![c(0.0, 1.0), c(0.0, -1.0)],
        )
        .unwrap(),
    );
    let poles = find_in_region(
        &bad,
        &ScanRegion::new((-2.0, 2.0), (-2.0, 2.0), Sheet::First).unwrap(),
    )
    .unwrap()
    .poles;
    let rep = conjugate_pair_audit(&poles, &bad);
    assert!(!rep.admissible);
    assert_eq!(rep.flagged.len(), 1);
}

#[test]
fn accepted_resonances_have_unit_kernels() {
    let well = SMatrixModel::SquareWell(SquareWellModel::new(10.0, 1.0).unwrap());
    for (m, region) in [
        (rankone(3.0), lower_region(10.0, 0.05)),
        (
            example1(),
            ScanRegion::new((-3.0, 3.0), (-3.0, -0.05), Sheet::First).unwrap(),
        ),
        (
            well,
            ScanRegion::new((0.0, 60.0), (-30.0, -0.5), Sheet::Second).unwrap(),
        ),
    ] {
        for p in find_in_region(&m, &region).unwrap().poles {
            assert_eq!(p.kind, PoleKind::Resonance);
            let k = p.kernel_vector();
            assert!((k.norm() - 1.0).abs() < 1e-12);
            let s = m.eval(p.zeta.conj(), Sheet::First).unwrap();
            assert!((s.adjoint() * k).norm() < 1e-8);
        }
    }
}

#[test]
fn region_validation() {
    assert!(ScanRegion::new((1.0, 1.0), (-1.0, 0.0), Sheet::First).is_err());
    assert!(ScanRegion::new((0.0, 1.0), (-1.0, -2.0), Sheet::First).is_err());
    assert!(ScanRegion::new((0.0, 1.0), (-1.0, 1.0), Sheet::First)
        .unwrap()
        .with_resolution(2, 9)
        .is_err());
    assert!(RimScan::new(-1.0, 0.0, Sheet::First).is_err());
    let crossing = ScanRegion::new((-1.0, 1.0), (-1.0, 1.0), Sheet::Second).unwrap();
    assert!(scan_region(&rankone(1.0), &crossing).is_err());
    let crossing = ScanRegion::new((-1.05, 1.05), (-1.05, 1.05), Sheet::Second).unwrap();
    let r = scan_region(&example1(), &crossing).unwrap();
    assert_eq!(r.len(), 2);
}

#[test]
fn export_formats() {
    let poles = find_poles(&rankone(1.0), &[lower_region(4.0, 0.05)], &[]).unwrap();
    let text = to_json(&poles).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v[0]["sheet"], 2);
    assert_eq!(v[0]["kind"], "resonance");
    assert_eq!(from_json(&text).unwrap(), poles);

    let mut buf = Vec::new();
    write_csv(&mut buf, &poles).unwrap();
    let s = String::from_utf8(buf).unwrap();
    let mut lines = s.lines();
    assert_eq!(lines.next().unwrap(), "re_zeta,im_zeta,sheet,kind,residual");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!((row[1].parse::<f64>().unwrap() + 2.0).abs() < 1e-10);
    assert_eq!(row[2], "2");
}
