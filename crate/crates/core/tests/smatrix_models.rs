mod common;

use std::f64::consts::PI;
use std::io::Write;

use common::{c, ode_jost_zero, rankone_quad, rankone_quad_boundary, shooting_bound_states};
use gamov::smatrix_models::{
    build_l, jost_f, jost_f_ode, model_from_json, rankone_resolvent_elem, trace_t,
    trace_t_boundary, RankOneModel, RationalModel, SMatrixModel, Sheet, Side, TraceClassData,
    TraceClassModel,
};
use gamov::{Complex64, Error};
use proptest::prelude::*;

fn s11(model: &SMatrixModel, z: Complex64, sheet: Sheet) -> Complex64 {
    model.eval(z, sheet).unwrap()[(0, 0)]
}

fn log_panel(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n)
        .map(|j| lo * (hi / lo).powf(j as f64 / (n - 1) as f64))
        .collect()
}

fn rankone(a: f64) -> SMatrixModel {
    SMatrixModel::RankOne(RankOneModel::new(a).unwrap())
}

fn traceclass(a: f64) -> SMatrixModel {
    SMatrixModel::TraceClass(TraceClassModel::new(TraceClassData::rank_one(a).unwrap()))
}

#[test]
fn example1_values() {
    let m = SMatrixModel::Rational(RationalModel::example1());
    assert!((s11(&m, c(0.0, 0.0), Sheet::First) - c(0.0, -1.0)).norm() < 1e-15);
    assert!(s11(&m, c(1.0, 1.0), Sheet::First).norm() < 1e-15);
    assert_eq!(m.sheet_count(), 1);
}

#[test]
fn rankone_closed_form_values() {
    let m = rankone(1.0);
    let s = s11(&m, c(1.0, 0.0), Sheet::First);
    assert!((s - c(0.6, -0.8)).norm() < 1e-14);
    let near = s11(&m, c(0.0, -2.0) + c(5e-8, 5e-8), Sheet::Second);
    assert!(near.norm() > 1e6);
    assert!(matches!(
        m.eval(c(0.0, 0.0), Sheet::First),
        Err(Error::BranchPoint)
    ));
    assert!(RankOneModel::new(0.0).is_err());
}

#[test]
fn resolvent_element_against_quadrature() {
    let v = rankone_resolvent_elem(c(-1.0, 0.0), Sheet::First).unwrap();
    assert!((v - c(-0.25, 0.0)).norm() < 1e-15);
    let q = rankone_quad(c(-1.0, 0.0));
    assert!((q - v).norm() / v.norm() < 1e-6);
    for z in [c(-3.0, 0.5), c(2.0, 1.0), c(0.3, -2.0), c(10.0, -0.5)] {
        let closed = rankone_resolvent_elem(z, Sheet::First).unwrap();
        let quad = rankone_quad(z);
        assert!((closed - quad).norm() / quad.norm() < 1e-6, "z={z}");
    }
    // boundary value at 4 + i0 from Sokhotski splitting
    let closed = rankone_resolvent_elem(c(4.0, 0.0), Sheet::First).unwrap();
    let quad = rankone_quad_boundary(4.0, true);
    assert!((closed - quad).norm() / quad.norm() < 1e-5);
    let d = c(1.0, -2.0);
    assert!((closed + 1.0 / (d * d)).norm() < 1e-15);
}

#[test]
fn trace_t_matches_closed_forms() {
    let data = TraceClassData::rank_one(1.0).unwrap();
    let t = trace_t(&data, c(-1.0, 0.0)).unwrap()[(0, 0)];
    assert!((t - c(-0.25, 0.0)).norm() < 1e-10);
    let z = c(0.0, 10.0);
    let t = trace_t(&data, z).unwrap()[(0, 0)];
    let want = rankone_resolvent_elem(z, Sheet::First).unwrap();
    assert!((t - want).norm() / want.norm() < 1e-6);
    // jump across ℝ₊ at μ = 1
    let tp = trace_t_boundary(&data, 1.0, Side::Plus).unwrap()[(0, 0)];
    let tm = trace_t_boundary(&data, 1.0, Side::Minus).unwrap()[(0, 0)];
    assert!((tp - tm - c(0.0, -1.0)).norm() < 1e-12);
    for mu in [0.1, 1.0, 4.0, 50.0] {
        let tp = trace_t_boundary(&data, mu, Side::Plus).unwrap()[(0, 0)];
        let oracle = rankone_quad_boundary(mu, true);
        assert!((tp - oracle).norm() / oracle.norm() < 1e-6, "mu={mu}");
    }
    assert!(trace_t(&data, c(2.0, 0.0)).is_err());
    assert!(trace_t_boundary(&data, -1.0, Side::Plus).is_err());
}

#[test]
fn build_l_examples() {
    let one = TraceClassData::rank_one(1.0).unwrap();
    let (l, s) = build_l(&one, c(-1.0, 0.0), Sheet::First).unwrap();
    assert!((l[(0, 0)] - c(1.25, 0.0)).norm() < 1e-10);
    assert!((s - 1.25).abs() < 1e-10);
    let (_, s) = build_l(&one, c(0.0, -2.0), Sheet::Second).unwrap();
    assert!(s < 1e-8, "sigma_min {s}");
    let (_, s) = build_l(&one, c(0.0, 2.0), Sheet::Second).unwrap();
    assert!(s < 1e-8, "antiresonance sigma_min {s}");
    let (_, s) = build_l(&one, c(0.0, -2.0), Sheet::First).unwrap();
    assert!(s > 0.1);
    let minus_two = TraceClassData::rank_one(-2.0).unwrap();
    let e = -(3.0 - 2.0 * 2f64.sqrt());
    let (_, s) = build_l(&minus_two, c(e, 0.0), Sheet::First).unwrap();
    assert!(s < 1e-8, "bound state sigma_min {s}");
}

/// The continued L on both sheets agrees with 1 + a/(1 − ik)² at points
/// spread over |z| ∈ [0.1, 100].
#[test]
fn continued_l_matches_closed_form_on_both_sheets() {
    let a = 1.0;
    let data = TraceClassData::rank_one(a).unwrap();
    let mut worst: f64 = 0.0;
    for (j, r) in log_panel(10, 0.1, 100.0).into_iter().enumerate() {
        let arg = -3.0 + 6.0 * j as f64 / 9.0 + 0.05;
        let z = Complex64::from_polar(r, arg);
        for sheet in [Sheet::First, Sheet::Second] {
            let (l, _) = build_l(&data, z, sheet).unwrap();
            let quad = (c(1.0, 0.0) - l[(0, 0)]) / a;
            let closed = rankone_resolvent_elem(z, sheet).unwrap();
            worst = worst.max((quad - closed).norm() / closed.norm());
        }
    }
    assert!(worst < 1e-6, "worst {worst:.2e}");
}

#[test]
fn traceclass_s_matches_rankone_closed_form() {
    for a in [1.0, -0.5, 3.0] {
        let tc = traceclass(a);
        let ro = rankone(a);
        for z in [
            c(1.0, 0.5),
            c(-2.0, 1.0),
            c(0.5, -1.0),
            c(-3.0, -0.2),
            c(2.0, 0.0),
        ] {
            for sheet in [Sheet::First, Sheet::Second] {
                let x = s11(&tc, z, sheet);
                let y = s11(&ro, z, sheet);
                assert!(
                    (x - y).norm() / y.norm().max(1.0) < 1e-8,
                    "a={a} z={z} {sheet:?}"
                );
            }
        }
        for l in [-3.0, -0.5, 0.7, 5.0] {
            for side in [Side::Plus, Side::Minus] {
                let x = tc.boundary(l, side).unwrap()[(0, 0)];
                let y = ro.boundary(l, side).unwrap()[(0, 0)];
                assert!(
                    (x - y).norm() / y.norm().max(1.0) < 1e-8,
                    "a={a} λ={l} {side:?}"
                );
            }
        }
    }
}

#[test]
fn unitarity_on_positive_axis() {
    let models = [
        SMatrixModel::Rational(RationalModel::example1()),
        rankone(1.0),
        rankone(-2.0),
        SMatrixModel::SquareWell(gamov::smatrix_models::SquareWellModel::new(10.0, 1.0).unwrap()),
        traceclass(1.0),
    ];
    for m in &models {
        let mut worst: f64 = 0.0;
        for l in log_panel(200, 1e-3, 1e3) {
            let s = m.boundary(l, Side::Plus).unwrap();
            let d = s.adjoint() * &s - nalgebra::DMatrix::identity(1, 1);
            worst = worst.max(d.norm());
        }
        assert!(worst < 1e-10, "{}: {worst:.2e}", m.name());
    }
}

#[test]
fn two_sheet_relation_on_negative_axis() {
    let models = [
        rankone(1.0),
        rankone(-0.5),
        SMatrixModel::SquareWell(gamov::smatrix_models::SquareWellModel::new(10.0, 1.0).unwrap()),
        traceclass(1.0),
    ];
    for m in &models {
        for l in [-0.03, -0.7, -2.5, -40.0] {
            let up = m.boundary(l, Side::Plus).unwrap()[(0, 0)];
            let down = m.boundary(l, Side::Minus).unwrap()[(0, 0)];
            assert!(
                (1.0 / down - up.conj()).norm() < 1e-9 * up.norm().max(1.0),
                "{}",
                m.name()
            );
            // sheet 2 on the negative axis is the lower rim
            let s2 = s11(m, c(l, 0.0), Sheet::Second);
            assert!((s2 - down).norm() < 1e-9 * down.norm().max(1.0));
        }
    }
}

#[test]
fn sheets_are_mutually_inverse() {
    let m =
        SMatrixModel::SquareWell(gamov::smatrix_models::SquareWellModel::new(10.0, 1.0).unwrap());
    for z in [c(3.0, 1.0), c(-2.0, -4.0), c(20.0, -3.0)] {
        let p = s11(&m, z, Sheet::First) * s11(&m, z, Sheet::Second);
        assert!((p - c(1.0, 0.0)).norm() < 1e-10);
    }
}

#[test]
fn bounded_on_large_arcs() {
    for m in [rankone(1.0), traceclass(1.0)] {
        let sup = |r: f64| {
            (0..=64)
                .map(|j| Complex64::from_polar(r, PI * (j as f64 + 0.5) / 65.0))
                .map(|z| s11(&m, z, Sheet::First).norm())
                .fold(0.0, f64::max)
        };
        let (s1, s2) = (sup(50.0), sup(100.0));
        assert!(s1.is_finite() && s2.is_finite());
        assert!((s1 - s2).abs() < 0.1 * s1, "{s1} vs {s2}");
    }
}

#[test]
fn jost_function_checks() {
    for k in [c(0.3, 0.0), c(2.0, -1.0), c(-1.5, 0.7), c(5.0, 2.0)] {
        assert!((jost_f(k, 0.0, 1.0) - c(1.0, 0.0)).norm() < 1e-14);
        let f = jost_f(k, 10.0, 1.0);
        let mirror = jost_f(-k.conj(), 10.0, 1.0).conj();
        assert!((f - mirror).norm() < 1e-12 * f.norm().max(1.0));
        let ode = jost_f_ode(k, 10.0, 1.0, 4000);
        assert!((f - ode).norm() < 1e-8 * f.norm().max(1.0), "k={k}");
    }
    // closed-form zeros on the imaginary axis are the shooting bound states
    let kappas = shooting_bound_states(10.0, 1.0);
    assert_eq!(kappas.len(), 1);
    for kappa in kappas {
        assert!(jost_f(c(0.0, kappa), 10.0, 1.0).norm() < 1e-7);
    }
    // and the lowest resonance zero agrees with the ODE zero
    let k = ode_jost_zero(c(3.2, -1.3), 10.0, 1.0);
    assert!(jost_f(k, 10.0, 1.0).norm() < 1e-8);
}

#[test]
fn model_specs() {
    let m = model_from_json(r#"{"model":"rankone","a":1.0}"#).unwrap();
    assert_eq!(m.sheet_count(), 2);
    let m = model_from_json(r#"{"model":"example1"}"#).unwrap();
    assert_eq!(m.sheet_count(), 1);
    assert!(model_from_json(r#"{"model":"rankone","a":0.0}"#).is_err());
    assert!(model_from_json(r#"{"model":"nope"}"#).is_err());
    assert!(model_from_json(r#"{"model":"squarewell","v0":10,"radius":1}"#).is_ok());
    assert!(model_from_json(r#"{"model":"squarewell","v0":10,"a":1}"#).is_ok());
    assert!(model_from_json(r#"{"model":"squarewell","v0":-1,"a":1}"#).is_err());
    let m = model_from_json(r#"{"model":"rational","zeros":[[0,-1]],"poles":[[0,1]]}"#).unwrap();
    assert!((s11(&m, c(0.0, 0.0), Sheet::First) - c(-1.0, 0.0)).norm() < 1e-15);
    assert!(model_from_json(r#"{"model":"traceclass","form_factor":"rankone","a":2}"#).is_ok());
    assert!(model_from_json(r#"{"model":"traceclass"}"#).is_err());
}

#[test]
fn sampled_form_factor_from_csv() {
    let dir = std::env::temp_dir().join(format!("gamov-ff-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ff.csv");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "lambda,re_a_0_0,im_a_0_0,re_b_0_0,im_b_0_0").unwrap();
    for l in log_panel(6000, 1e-8, 1e8) {
        let e = (2.0 / PI).sqrt() * l.powf(0.25) / (l + 1.0);
        writeln!(f, "{l:e},{e:e},0,{e:e},0").unwrap();
    }
    drop(f);
    let m = model_from_json(&format!(
        r#"{{"model":"traceclass","file":{:?}}}"#,
        path.to_str().unwrap()
    ))
    .unwrap();
    assert_eq!(m.sheet_count(), 1);
    let exact = rankone(1.0);
    for l in [0.2, 1.0, 7.0] {
        let s = m.boundary(l, Side::Plus).unwrap()[(0, 0)];
        assert!((s.norm() - 1.0).abs() < 1e-10);
        assert!((s - exact.boundary(l, Side::Plus).unwrap()[(0, 0)]).norm() < 1e-3);
    }
    assert!(m.eval(c(0.0, -2.0), Sheet::Second).is_err());
    std::fs::remove_dir_all(&dir).ok();
}

proptest! {
    #[test]
    fn rankone_unitary_for_any_coupling(a in -5.0f64..5.0, l in 1e-3f64..1e3) {
        prop_assume!(a.abs() > 1e-3);
        let m = rankone(a);
        let s = m.boundary(l, Side::Plus).unwrap()[(0, 0)];
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jost_reflection_symmetry(re in -8.0f64..8.0, im in -3.0f64..3.0, v0 in 0.0f64..30.0) {
        let k = c(re, im);
        let f = jost_f(k, v0, 1.0);
        let g = jost_f(-k.conj(), v0, 1.0).conj();
        prop_assert!((f - g).norm() <= 1e-11 * f.norm().max(1.0));
    }
}
