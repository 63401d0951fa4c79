use num_complex::Complex64;
use proptest::prelude::*;
use wwgm::oracle::oracle_coherent_overlap;
use wwgm::phase_space::{coherent_value, norm};
use wwgm::*;

fn grid(size: usize) -> PhaseGrid {
    PhaseGrid::new(1, size, 8.0).unwrap()
}

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// Sum of off-centre Gaussians with complex weights, well inside the box.
fn smooth_state(g: &PhaseGrid, seed: &[(f64, f64, f64, f64)]) -> PhaseFunction {
    PhaseFunction::from_fn(g, Role::Wavefunction, |p, x| {
        seed.iter()
            .map(|&(pc, xc, re, im)| {
                Complex64::new(re, im) * (-0.5 * ((p[0] - pc).powi(2) + (x[0] - xc).powi(2))).exp()
            })
            .sum()
    })
}

#[test]
fn coherent_state_values() {
    let g = grid(64);
    let phi0 = coherent_state(&CoherentLabel::pair(0.0, 0.0), &g).unwrap();
    assert_eq!(coherent_value(&CoherentLabel::pair(0.0, 0.0), &[0.0], &[0.0]), Complex64::new(1.0, 0.0));
    assert!(phi0.max_imag() == 0.0);
    let v = coherent_value(&CoherentLabel::pair(0.0, 0.0), &[1.0], &[0.0]);
    assert!((v.re - 0.606531).abs() < 1e-6);
    let v = coherent_value(&CoherentLabel::pair(1.0, 0.0), &[1.0], &[0.0]);
    assert!((v - 1.0).norm() < 1e-15);
    assert!((inner(&phi0, &phi0).unwrap() - 1.0).norm() < 1e-8);
}

#[test]
fn labels_outside_margin_are_rejected() {
    let g = grid(64);
    let err = coherent_state(&CoherentLabel::pair(1.5, 0.0), &g).unwrap_err();
    assert!(matches!(err, Error::LabelOutsideMargin(_)), "{err}");
}

#[test]
fn overlap_closed_form() {
    let g = grid(64);
    let a = CoherentLabel::pair(1.0, 0.0);
    let b = CoherentLabel::pair(0.0, 0.0);
    let v = inner(&coherent_state(&b, &g).unwrap(), &coherent_state(&a, &g).unwrap()).unwrap();
    assert!((v - (-0.5f64).exp()).norm() < 1e-12);
}

#[test]
fn inner_rejects_grid_mismatch() {
    let a = coherent_state(&CoherentLabel::pair(0.0, 0.0), &grid(64)).unwrap();
    let b = coherent_state(&CoherentLabel::pair(0.0, 0.0), &grid(32)).unwrap();
    assert!(matches!(inner(&a, &b), Err(Error::GridMismatch)));
}

#[test]
fn left_position_on_vacuum() {
    let g = grid(64);
    let phi0 = coherent_state(&CoherentLabel::pair(0.0, 0.0), &g).unwrap();
    let want = PhaseFunction::from_fn(&g, Role::Wavefunction, |p, x| {
        Complex64::new(x[0], -p[0]) * (-0.5 * (p[0] * p[0] + x[0] * x[0])).exp()
    });
    assert!(apply_xl(&phi0, 0).unwrap().max_abs_diff(&want).unwrap() < 1e-12);
}

#[test]
fn left_operator_expectations_are_twice_the_label() {
    let g = grid(128);
    let a = CoherentLabel::pair(-0.4, 0.7);
    let phi = coherent_state(&a, &g).unwrap();
    let ex = inner(&phi, &apply_xl(&phi, 0).unwrap()).unwrap();
    let ep = inner(&phi, &apply_pl(&phi, 0).unwrap()).unwrap();
    assert!((ex - 1.4).norm() < 1e-10);
    assert!((ep + 0.8).norm() < 1e-10);
}

#[test]
fn translate_examples() {
    let g = grid(64);
    let phi0 = coherent_state(&CoherentLabel::pair(0.0, 0.0), &g).unwrap();
    assert!(translate(&phi0, &[0.0], &[0.0]).unwrap().max_abs_diff(&phi0).unwrap() < 1e-14);
    let shifted = translate(&phi0, &[0.37], &[-0.81]).unwrap();
    let direct = coherent_state(&CoherentLabel::pair(0.37, -0.81), &g).unwrap();
    assert!(shifted.max_abs_diff(&direct).unwrap() < 1e-12);
}

#[test]
fn translate_rejects_spill() {
    let g = grid(64);
    let phi0 = coherent_state(&CoherentLabel::pair(0.0, 0.0), &g).unwrap();
    assert!(matches!(translate(&phi0, &[5.0], &[0.0]), Err(Error::SupportSpill(_))));
}

#[test]
fn translations_compose_with_the_group_twist() {
    let g = grid(128);
    let phi = smooth_state(&g, &[(0.2, -0.1, 1.0, 0.5), (-0.3, 0.4, 0.2, -0.7)]);
    let (g1, g2) = (([0.5], [0.25]), ([-0.25], [0.375]));
    let twice = translate(&translate(&phi, &g2.0, &g2.1).unwrap(), &g1.0, &g1.1).unwrap();
    let once = translate(&phi, &[g1.0[0] + g2.0[0]], &[g1.1[0] + g2.1[0]]).unwrap();
    let e1 = GroupElement::new(g1.0.to_vec(), g1.1.to_vec(), 0.0).unwrap();
    let e2 = GroupElement::new(g2.0.to_vec(), g2.1.to_vec(), 0.0).unwrap();
    let tau = e1.twist(&e2).unwrap();
    let want = once.scale(Complex64::from_polar(1.0, tau));
    let err = twice.max_abs_diff(&want).unwrap();
    assert!(err < 1e-9, "twist τ = {tau}, error {err:e}");
}

#[test]
fn refinement_changes_overlaps_negligibly() {
    let a = CoherentLabel::pair(0.3, -0.6);
    let b = CoherentLabel::pair(-0.5, 0.2);
    let ov = |size| {
        let g = grid(size);
        inner(&coherent_state(&a, &g).unwrap(), &coherent_state(&b, &g).unwrap()).unwrap()
    };
    assert!((ov(64) - ov(128)).norm() < 1e-10);
    let exact = oracle_coherent_overlap((&b.p, &b.x), (&a.p, &a.x)).value;
    assert!((ov(128) - exact).norm() < 1e-12);
}

#[test]
fn two_dimensional_coherent_state() {
    let g = PhaseGrid::new(2, 32, 8.0).unwrap();
    let a = CoherentLabel::new(vec![0.5, -0.25], vec![0.0, 0.75]).unwrap();
    let b = CoherentLabel::new(vec![0.0, 0.25], vec![-0.5, 0.5]).unwrap();
    let phi = coherent_state(&a, &g).unwrap();
    assert!((norm(&phi) - 1.0).abs() < 1e-10);
    let v = inner(&coherent_state(&b, &g).unwrap(), &phi).unwrap();
    let exact = oracle_coherent_overlap((&a.p, &a.x), (&b.p, &b.x)).value;
    assert!((v - exact).norm() < 1e-10);
}

fn bump() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (-0.5..0.5f64, -0.5..0.5f64, 0.5..1.0f64, -1.0..1.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugate_symmetry(s1 in prop::collection::vec(bump(), 1..3), s2 in prop::collection::vec(bump(), 1..3)) {
        let g = grid(64);
        let (a, b) = (smooth_state(&g, &s1), smooth_state(&g, &s2));
        prop_assert!((inner(&a, &b).unwrap() - inner(&b, &a).unwrap().conj()).norm() < 1e-12);
    }

    #[test]
    fn translation_preserves_norm(s in prop::collection::vec(bump(), 1..3), dp in -0.5..0.5f64, dx in -0.5..0.5f64) {
        let g = grid(64);
        let phi = smooth_state(&g, &s);
        let t = translate(&phi, &[dp], &[dx]).unwrap();
        let before = inner(&phi, &phi).unwrap().re;
        prop_assert!((inner(&t, &t).unwrap().re - before).abs() < 1e-9 * before.max(1.0));
    }

    #[test]
    fn left_operators_are_self_adjoint(s1 in prop::collection::vec(bump(), 1..3), s2 in prop::collection::vec(bump(), 1..3)) {
        let g = grid(64);
        let (phi, psi) = (smooth_state(&g, &s1), smooth_state(&g, &s2));
        for op in [apply_xl, apply_pl] {
            let lhs = inner(&psi, &op(&phi, 0).unwrap()).unwrap();
            let rhs = inner(&phi, &op(&psi, 0).unwrap()).unwrap().conj();
            prop_assert!((lhs - rhs).norm() < 1e-8);
        }
    }

    #[test]
    fn left_operators_commute_to_two_i(s in prop::collection::vec(bump(), 1..3)) {
        let g = grid(64);
        let phi = smooth_state(&g, &s);
        let xp = apply_xl(&apply_pl(&phi, 0).unwrap(), 0).unwrap();
        let px = apply_pl(&apply_xl(&phi, 0).unwrap(), 0).unwrap();
        let comm = xp.sub(&px).unwrap();
        let want = phi.scale(2.0 * i());
        prop_assert!(comm.max_abs_diff(&want).unwrap() <= 1e-8 * phi.sup_norm());
    }
}
