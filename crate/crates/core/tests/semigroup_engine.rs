mod common;

use common::{c, pole, random_function, rel};
use gamov::grid_hardy::*;
use gamov::semigroup_engine::*;
use gamov::Complex64;

fn grid(n_log2: u32, l: f64) -> Grid {
    make_grid(1 << n_log2, l).unwrap()
}

fn smooth(g: Grid) -> GridFunction {
    // a fixed H²₊ element that is not an eigenvector
    let mut f = mt_basis(3, g, 1, 0);
    f.axpy(c(0.5, 0.0), &pole(g, c(2.0, -0.5)));
    f
}

#[test]
fn t_semigroup_basics() {
    let g = grid(14, 400.0);
    let f = random_function(g, 2, 3);
    assert_eq!(apply_t(&f, 0.0).unwrap(), f);
    for t in [0.3, 1.0, 7.5] {
        assert!((apply_t(&f, t).unwrap().norm() - f.norm()).abs() / f.norm() < 1e-12);
    }
    assert!(apply_t(&f, -1.0).is_err());
    assert!(apply_c(&f, -1.0).is_err());
}

#[test]
fn t_semigroup_preserves_hardy_space() {
    let g = grid(16, 1600.0);
    let shifted = apply_t(&mt_basis(0, g, 1, 0), 1.0).unwrap();
    let leak = project_hardy(&shifted, Sign::Minus).norm() / shifted.norm();
    assert!(leak < 1e-3, "{leak}");
}

#[test]
fn c_semigroup_eigenrelation() {
    let g = grid(14, 400.0);
    let zeta = c(1.0, -1.0);
    let e = pole(g, zeta);
    for t in [0.5, 1.0, 2.0] {
        let got = apply_c(&e, t).unwrap();
        let want = e.scaled((Complex64::new(0.0, -t) * zeta).exp());
        assert!(rel(&got, &want) < 5e-3, "t={t}: {}", rel(&got, &want));
    }
}

#[test]
fn eigenrelation_improves_under_refinement() {
    let zeta = c(1.0, -1.0);
    let err = |g: Grid| {
        let e = pole(g, zeta);
        let want = e.scaled((Complex64::new(0.0, -1.0) * zeta).exp());
        rel(&apply_c(&e, 1.0).unwrap(), &want)
    };
    let e1 = err(grid(14, 400.0));
    let e2 = err(grid(15, 800.0));
    let e3 = err(grid(16, 1600.0));
    assert!(e2 < e1 && e3 < e2, "{e1} {e2} {e3}");
}

#[test]
fn c_semigroup_law_and_contraction() {
    let g = grid(14, 400.0);
    let f = smooth(g);
    let lhs = apply_c(&apply_c(&f, 0.5).unwrap(), 0.7).unwrap();
    let rhs = apply_c(&f, 1.2).unwrap();
    assert!(rel(&lhs, &rhs) < 1e-3, "{}", rel(&lhs, &rhs));

    let probes = [
        f.clone(),
        pole(g, c(1.0, -1.0)),
        mt_basis(7, g, 1, 0),
        random_function(g, 1, 99),
    ];
    for p in &probes {
        for t in [0.0, 0.1, 0.5, 1.0, 3.0] {
            let out = apply_c(p, t).unwrap();
            assert!(
                out.norm() <= p.norm() * (1.0 + 1e-12),
                "t={t} {} {}",
                out.norm(),
                p.norm()
            );
        }
    }
}

#[test]
fn c_semigroup_decays_strongly() {
    let g = grid(14, 400.0);
    let f = smooth(g);
    let norms: Vec<f64> = [1.0, 5.0, 20.0]
        .iter()
        .map(|&t| apply_c(&f, t).unwrap().norm())
        .collect();
    assert!(norms[0] > norms[1] && norms[1] > norms[2], "{norms:?}");
    assert!(norms[2] < 0.1 * f.norm());
}

#[test]
fn t_and_c_are_adjoint() {
    // The truncated inner product of an H²₊ and an H²₋ function is O(1/L)
    // rather than zero, hence the wide grid.
    let g = grid(18, 6400.0);
    let f = smooth(g);
    let h = &pole(g, c(-1.0, -2.0)) + &mt_basis(1, g, 1, 0);
    for t in [0.5, 1.0, 2.0] {
        let lhs = inner(&apply_t(&f, t).unwrap(), &h).unwrap();
        let rhs = inner(&f, &apply_c(&h, t).unwrap()).unwrap();
        assert!((lhs - rhs).norm() / lhs.norm() < 1e-3, "t={t} {lhs} {rhs}");
    }
}

#[test]
fn c_semigroup_matches_cauchy_integral() {
    // C₊(t)f(z) = (2πi)^{-1} ∫ e^{-itλ} f(λ)/(λ-z) dλ at points of ℂ₊.
    // The shifted tail of C₊(t)f is distorted near ±L, an O(1/L) effect.
    let g = grid(17, 3200.0);
    let f = smooth(g);
    let t = 1.0;
    let ct = apply_c(&f, t).unwrap();
    let moved = f.mul_fn(|l| Complex64::from_polar(1.0, -t * l));
    for z in [c(0.0, 1.0), c(1.5, 0.5), c(-2.0, 2.0)] {
        let a = cauchy_eval(&ct, z).unwrap()[0];
        let b = cauchy_eval(&moved, z).unwrap()[0];
        assert!((a - b).norm() < 1e-3 * b.norm().max(1e-2), "{a} {b}");
    }
}

#[test]
fn generator_offset_examples() {
    let g = grid(14, 400.0);
    let zeta = c(1.0, -1.0);
    let k = c(0.5, 2.0);
    let e = pole(g, zeta).scaled(k);
    let s = generator_offset(&e).unwrap();
    assert!((s.offset[0] + k).norm() < 1e-3, "{}", s.offset[0]);
    // λf + k₀ = ζ f for the eigenvector
    assert!(rel(&s.image, &e.scaled(zeta)) < 1e-3);

    let one = generator_offset(&pole(g, zeta)).unwrap();
    assert!((one.offset[0] + 1.0).norm() < 1e-3);

    let phi = generator_offset(&mt_basis(0, g, 1, 0)).unwrap();
    assert!(phi.residual < 1e-3);
    assert!(project_hardy(&phi.image, Sign::Minus).norm() / phi.image.norm() < 1e-3);
}

#[test]
fn generator_offset_rejects_non_domain_input() {
    // 1/(λ - 2i) lies in H²₋: λf + k cannot be put into H²₊
    let g = grid(14, 400.0);
    assert!(generator_offset(&pole(g, c(0.0, 2.0))).is_err());
}

#[test]
fn generator_taylor_order() {
    // C(t)f = f - it·g + O(t²). Small t is limited by the discrete
    // projector (see the crate README), so the ratio is taken at t = 0.2, 0.1
    // on a fine grid.
    let g = grid(16, 1600.0);
    let f = pole(g, c(1.0, -1.0));
    let s = generator_offset(&f).unwrap();
    let remainder = |t: f64| {
        let mut taylor = f.clone();
        taylor.axpy(c(0.0, -t), &s.image);
        (&apply_c(&f, t).unwrap() - &taylor).norm()
    };
    let r1 = remainder(0.2);
    let r2 = remainder(0.1);
    let order = (r1 / r2).log2();
    assert!(order > 1.8, "order {order} ({r1}, {r2})");
}

#[test]
fn polar_isometry_properties() {
    let g = grid(16, 800.0);
    let iso = build_polar_isometry(g, 1, 48).unwrap();
    // the finite section of P₊Q₊ has exponentially small singular values
    // (functions of the span concentrated on λ < 0); those are discarded
    assert!(iso.rank() > 24 && iso.rank() <= 48);
    assert_eq!(iso.rank() + iso.diagnostics.discarded, 48);
    for i in 0..iso.rank() {
        let d = iso.initial_direction(i);
        let rf = iso.forward(&d).unwrap();
        assert!((rf.norm() / d.norm() - 1.0).abs() < 1e-6);
        let back = iso.adjoint(&rf).unwrap();
        assert!(rel(&back, &d) < 1e-6);
        for k in 0..g.origin() {
            assert_eq!(rf.component(0)[k], c(0.0, 0.0));
        }
    }
    // φ₀ lies in the retained initial space up to a small discarded component
    let phi = mt_basis(0, g, 1, 0);
    let rf = iso.forward(&phi).unwrap();
    let nd = (rf.norm() / phi.norm() - 1.0).abs();
    assert!(nd < 1e-6, "norm={nd:.2e}");
    let e = rel(&iso.adjoint(&rf).unwrap(), &phi);
    assert!(e < 1e-4, "err={e:.2e}");
    // R R* is the identity on the range of R
    let rf = iso.forward(&mt_basis(2, g, 1, 0)).unwrap();
    assert!(rel(&iso.forward(&iso.adjoint(&rf).unwrap()).unwrap(), &rf) < 1e-10);
}

#[test]
fn transfer_preserves_norms_and_transports_eigenvectors() {
    let g = grid(16, 800.0);
    let iso = build_polar_isometry(g, 1, 48).unwrap();
    let zeta = c(1.0, -1.0);
    let e = pole(g, zeta);
    let re = iso.forward(&e).unwrap();
    let back = transfer_apply(&iso, &re, 0.0, Which::C).unwrap();
    assert!(rel(&back, &re) < 1e-10);
    for t in [0.5, 1.0, 2.0] {
        let moved = transfer_apply(&iso, &re, t, Which::C).unwrap();
        let direct = apply_c(&iso.adjoint(&re).unwrap(), t).unwrap();
        // C(t) leaves the 48-dimensional frame only through its
        // discretization error, which enters the norm quadratically
        let tol = if t <= 1.0 { 1e-6 } else { 1e-5 };
        assert!((moved.norm() - direct.norm()).abs() / direct.norm() < tol);
        let overlap = inner(&re, &moved).unwrap().norm();
        let want = (-t * zeta.im.abs()).exp() * e.norm_sqr();
        assert!(
            (overlap - want).abs() / want < 1e-2,
            "t={t}: {overlap} vs {want}"
        );
    }
}

#[test]
fn polar_isometry_rejects_unresolved_budget() {
    let g = grid(10, 400.0);
    assert!(build_polar_isometry(g, 1, 48).is_err());
}
