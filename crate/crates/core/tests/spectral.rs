mod common;

use berryres::spectral::{pair, principal_sqrt};
use berryres::*;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pt(r: [f64; 3], g: [f64; 3], e: Complex64) -> ParameterPoint {
    ParameterPoint::new(r, g, e).unwrap()
}

#[test]
fn hamiltonian_examples() {
    let h = build_hamiltonian(&pt([0.0, 0.0, 0.0], [0.0, 0.0, 1.0], c(0.0, 0.0))).unwrap();
    assert_eq!(h.entries, [[c(0.0, -0.5), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.5)]]);

    let p = pt([0.0, 0.0, 1.0], [0.0, 0.0, 1.0], c(2.0, 0.0));
    let h = build_hamiltonian(&p).unwrap();
    assert_eq!(h.entries, [[c(3.0, -0.5), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.5)]]);
    assert_eq!(h.entries, common::pauli_expand(p.r, p.gamma, p.e_offset));
}

#[test]
fn off_diagonal_entries_follow_the_effective_vector() {
    let p = pt([0.3, -1.1, 0.4], [0.2, 0.7, -0.5], c(0.1, -0.2));
    let h = build_hamiltonian(&p).unwrap();
    let i = c(0.0, 1.0);
    let x1 = c(0.3, -0.1);
    let x2 = c(-1.1, -0.35);
    assert!((h.entries[0][1] - (x1 - i * x2)).norm() < 1e-15);
    assert!((h.entries[1][0] - (x1 + i * x2)).norm() < 1e-15);
    assert!((h.trace() - 2.0 * p.e_offset).norm() < 1e-15);
}

#[test]
fn epsilon_examples() {
    let z = c(0.0, 0.0);
    assert_eq!(epsilon_at(&pt([0.0, 0.0, 1.0], [0.0; 3], z), None), c(1.0, 0.0));
    assert_eq!(epsilon_at(&pt([0.0; 3], [0.0, 0.0, 1.0], z), None), c(0.0, 0.5));
    assert_eq!(epsilon_at(&pt([0.5, 0.0, 0.0], [0.0, 0.0, 1.0], z), None), c(0.0, 0.0));
    // continuation picks the root nearest the previous value
    let p = pt([0.0, 0.0, 1.0], [0.0; 3], z);
    assert_eq!(epsilon_at(&p, Some(c(-0.9, 0.1))), c(-1.0, 0.0));
}

#[test]
fn eigendecompose_examples() {
    let z = c(0.0, 0.0);
    let p = pt([0.5, 0.0, 0.0], [0.0, 0.0, 1.0], z);
    let f = eigendecompose(&build_hamiltonian(&p).unwrap(), &p, None, 1e-10).unwrap();
    assert_eq!(f.defect, Defect::JordanRank2);
    let p = pt([0.0; 3], [0.0; 3], z);
    let f = eigendecompose(&build_hamiltonian(&p).unwrap(), &p, None, 1e-10).unwrap();
    assert_eq!(f.defect, Defect::DiagonalDegenerate);
    assert!(matches!(f.left(State::Two), Err(Error::DegeneratePoint { defect: Defect::DiagonalDegenerate, .. })));
}

#[test]
fn identity_residual_examples() {
    let z = c(0.0, 0.0);
    let r = connection_identity_residual(&pt([0.0, 0.0, 1.0], [0.0; 3], z), State::One, State::Two, 1e-5).unwrap();
    assert!(r < 1e-6, "{r}");
    let r = connection_identity_residual(&pt([1.0, 0.0, 0.3], [0.0, 0.0, 1.0], z), State::One, State::Two, 1e-5).unwrap();
    assert!(r < 1e-5, "{r}");
    let e = connection_identity_residual(&pt([0.5 + 1e-9, 0.0, 0.0], [0.0, 0.0, 1.0], z), State::One, State::Two, 1e-5);
    assert!(matches!(e, Err(Error::DegeneratePoint { .. })), "{e:?}");
}

#[test]
fn identity_residual_is_second_order() {
    let p = pt([0.4, -0.9, 0.6], [0.3, 0.1, 0.8], c(0.2, -0.3));
    let r1 = connection_identity_residual(&p, State::Two, State::One, 2e-5).unwrap();
    let r2 = connection_identity_residual(&p, State::Two, State::One, 1e-5).unwrap();
    let r3 = connection_identity_residual(&p, State::Two, State::One, 5e-6).unwrap();
    for ratio in [r1 / r2, r2 / r3] {
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }
}

#[test]
fn identity_residual_stays_second_order_at_small_steps() {
    // roundoff in the stencil must stay far below the truncation term
    let p = pt([1.5349012665832058, 1.6243064588198166, 0.8667076059381138], [0.20111687363436737, 0.9313074032062483, 0.7137840533863518], c(0.0, 0.0));
    let a = connection_identity_residual(&p, State::One, State::Two, 4e-7).unwrap();
    let b = connection_identity_residual(&p, State::One, State::Two, 2e-7).unwrap();
    assert!((a / b - 4.0).abs() < 0.1, "{a} {b}");
}

#[test]
fn eigenvalues_match_characteristic_polynomial() {
    let p = pt([0.7, 0.2, -0.4], [0.1, -0.6, 0.9], c(-0.3, 0.25));
    let h = build_hamiltonian(&p).unwrap();
    let f = eigendecompose(&h, &p, None, 1e-10).unwrap();
    let (lo, hi, d) = common::quadratic_eigenvalues(common::pauli_expand(p.r, p.gamma, p.e_offset));
    // the oracle's root may carry the other sign
    let (lo, hi) = if (d - f.epsilon).norm() < (d + f.epsilon).norm() { (lo, hi) } else { (hi, lo) };
    assert!((f.eigenvalues[0] - lo).norm() < 1e-13);
    assert!((f.eigenvalues[1] - hi).norm() < 1e-13);
}

#[test]
fn hermitian_left_is_conjugate_of_right() {
    let p = pt([0.3, -0.4, 1.2], [0.0; 3], c(0.5, 0.0));
    let f = eigendecompose(&build_hamiltonian(&p).unwrap(), &p, None, 1e-10).unwrap();
    for s in State::BOTH {
        assert!(f.eigenvalue(s).im.abs() < 1e-15);
        let r = f.right(s).unwrap();
        let l = f.left(s).unwrap();
        // l = k * r^dagger for some k
        let k = l[0] / r[0].conj();
        assert!((l[1] - k * r[1].conj()).norm() < 1e-14);
    }
}

#[test]
fn principal_sqrt_agrees_with_reference() {
    for &(a, b) in &[(1.0, 2.0), (-3.0, 0.5), (-3.0, -0.5), (0.0, -4.0), (2.5, 0.0)] {
        let z = c(a, b);
        let mine = principal_sqrt(z);
        let reference = z.sqrt();
        assert!((mine - reference).norm() < 1e-15, "{z}: {mine} vs {reference}");
    }
}

fn arb_vec(scale: f64) -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-scale..scale)
}

proptest! {
    #[test]
    fn frames_are_biorthonormal_eigenpairs(r in arb_vec(3.0), g in arb_vec(2.0), er in -2.0..2.0f64, ei in -2.0..2.0f64) {
        let p = pt(r, g, c(er, ei));
        prop_assume!(p.splitting_squared().norm() > 1e-3);
        let h = build_hamiltonian(&p).unwrap();
        let f = eigendecompose(&h, &p, None, 1e-10).unwrap();
        prop_assert_eq!(f.defect, Defect::Diagonalizable);
        let scale = h.norm();
        for s in State::BOTH {
            let r = f.right(s).unwrap();
            let l = f.left(s).unwrap();
            let e = f.eigenvalue(s);
            let hr = h.apply(r);
            let lh = h.left_apply(l);
            let res_r = ((hr[0] - e * r[0]).norm() + (hr[1] - e * r[1]).norm()) / (r[0].norm() + r[1].norm());
            let res_l = ((lh[0] - e * l[0]).norm() + (lh[1] - e * l[1]).norm()) / (l[0].norm() + l[1].norm());
            prop_assert!(res_r < 1e-12 * scale.max(1.0), "right residual {}", res_r);
            prop_assert!(res_l < 1e-12 * scale.max(1.0), "left residual {}", res_l);
            for t in State::BOTH {
                let want = if s == t { 1.0 } else { 0.0 };
                let got = pair(f.left(t).unwrap(), r);
                prop_assert!((got - want).norm() < 1e-12 * (1.0 + 1.0 / p.splitting_squared().norm().sqrt()));
            }
        }
        prop_assert!((f.eigenvalues[1] - f.eigenvalues[0] - 2.0 * f.epsilon).norm() < 1e-12 * scale.max(1.0));
    }

    #[test]
    fn vieta_relations(r in arb_vec(3.0), g in arb_vec(2.0), er in -2.0..2.0f64, ei in -2.0..2.0f64) {
        let p = pt(r, g, c(er, ei));
        let h = build_hamiltonian(&p).unwrap();
        let f = eigendecompose(&h, &p, None, 1e-10).unwrap();
        let scale = h.norm().max(1.0);
        prop_assert!((f.eigenvalues[0] + f.eigenvalues[1] - 2.0 * p.e_offset).norm() < 1e-12 * scale);
        prop_assert!((f.eigenvalues[0] * f.eigenvalues[1] - h.det()).norm() < 1e-12 * scale * scale);
    }

    #[test]
    fn continuation_never_flips_on_fine_paths(r0 in arb_vec(2.0), r1 in arb_vec(2.0), g in arb_vec(1.5)) {
        let n = 400;
        let mut prev = None;
        let mut prev_r = r0;
        for k in 0..=n {
            let s = k as f64 / n as f64;
            let r = std::array::from_fn(|i| r0[i] + s * (r1[i] - r0[i]));
            let p = pt(r, g, c(0.0, 0.0));
            let eps = epsilon_at(&p, prev);
            if let Some(q) = prev {
                let dr = ((0..3).map(|i| (r[i] - prev_r[i]).powi(2)).sum::<f64>()).sqrt();
                let reff = (common::dot(r, r) + 0.25 * common::dot(g, g)).sqrt();
                let dist = berryres::geometry::distance_to_locus(r, g);
                prop_assume!(dist > 10.0 * dr);
                prop_assert!((eps - q).norm() <= dr * (1.0 + reff / eps.norm()) + 1e-12);
            }
            prev = Some(eps);
            prev_r = r;
        }
    }

    #[test]
    fn rescaling_keeps_normalization(r in arb_vec(2.0), g in arb_vec(1.0), mag in 0.5..2.0f64, ph in 0.0..std::f64::consts::TAU) {
        let p = pt(r, g, c(0.0, 0.0));
        prop_assume!(p.splitting_squared().norm() > 1e-3);
        let f = eigendecompose(&build_hamiltonian(&p).unwrap(), &p, None, 1e-10).unwrap();
        let g2 = f.rescaled(State::One, Complex64::from_polar(mag, ph)).unwrap();
        let got = pair(g2.left(State::One).unwrap(), g2.right(State::One).unwrap());
        prop_assert!((got - 1.0).norm() < 1e-13);
    }
}
