use num_rational::Rational64;
use proptest::prelude::*;
use wwgm::*;

fn g1(p: f64, x: f64, theta: f64) -> GroupElement {
    GroupElement::new(vec![p], vec![x], theta).unwrap()
}

#[test]
fn compose_examples() {
    let id = GroupElement::<f64>::identity(1).unwrap();
    let g = g1(0.5, -2.0, 3.0);
    assert_eq!(compose(&id, &g).unwrap(), g);
    assert_eq!(compose(&g1(1.0, 0.0, 0.0), &g1(0.0, 1.0, 0.0)).unwrap(), g1(1.0, 1.0, 1.0));
    assert!(compose(&g, &g1(-0.5, 2.0, -3.0)).unwrap().is_identity());
}

#[test]
fn compose_rejects_mixed_dimensions() {
    let a = GroupElement::<f64>::identity(1).unwrap();
    let b = GroupElement::<f64>::identity(2).unwrap();
    assert!(matches!(compose(&a, &b), Err(Error::DimensionMismatch { .. })));
    assert!(GroupElement::<f64>::identity(4).is_err());
}

#[test]
fn inverse_examples() {
    assert!(inverse(&GroupElement::<f64>::identity(2).unwrap()).is_identity());
    assert_eq!(inverse(&g1(1.0, 1.0, 1.0)), g1(-1.0, -1.0, -1.0));
}

#[test]
fn rational_elements_compose_exactly() {
    let r = Rational64::new;
    let a = GroupElement::new(vec![r(1, 3)], vec![r(2, 5)], r(0, 1)).unwrap();
    let b = GroupElement::new(vec![r(-1, 7)], vec![r(3, 4)], r(1, 2)).unwrap();
    let ab = compose(&a, &b).unwrap();
    // θ = 1/2 − (2/5·(−1/7) − 1/3·3/4) = 1/2 + 2/35 + 1/4.
    assert_eq!(ab.theta(), r(1, 2) + r(2, 35) + r(1, 4));
    assert_eq!(compose(&ab, &inverse(&b)).unwrap().p(), a.p());
}

#[test]
fn coset_flow_examples() {
    let pt = CosetPoint { p: vec![0.0], x: vec![2.0], theta: 0.0 };
    let only_theta = CosetAlgebraParams::translation(vec![0.0], vec![0.0], 1.0).unwrap();
    let t = phase_space_coset_flow(&only_theta, &pt, &ContractionParam::unit()).unwrap();
    assert_eq!((t.dp, t.dx, t.dtheta), (vec![0.0], vec![0.0], 1.0));

    let pbar = CosetAlgebraParams::translation(vec![1.0], vec![0.0], 0.0).unwrap();
    let t = phase_space_coset_flow(&pbar, &pt, &ContractionParam::unit()).unwrap();
    assert_eq!((t.dp, t.dx, t.dtheta), (vec![1.0], vec![0.0], 2.0));
    let t = phase_space_coset_flow(&pbar, &pt, &ContractionParam::new(10.0).unwrap()).unwrap();
    assert!((t.dtheta - 0.02).abs() < 1e-17);
}

#[test]
fn coset_flow_with_rotation() {
    let omega = vec![vec![0.0, 1.0], vec![-1.0, 0.0]];
    let params = CosetAlgebraParams::new(omega, vec![0.0, 0.0], vec![0.0, 0.0], 0.0).unwrap();
    let pt = CosetPoint { p: vec![1.0, 0.0], x: vec![0.0, 2.0], theta: 0.0 };
    let t = phase_space_coset_flow(&params, &pt, &ContractionParam::unit()).unwrap();
    assert_eq!(t.dp, vec![0.0, -1.0]);
    assert_eq!(t.dx, vec![2.0, 0.0]);
    assert!(CosetAlgebraParams::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.0; 2], vec![0.0; 2], 0.0)
        .is_err());
}

#[test]
fn config_flow_examples() {
    let zero = CosetAlgebraParams::translation(vec![0.0], vec![0.0], 0.0).unwrap();
    assert_eq!(config_coset_flow(&zero, &[1.5], 0.3).unwrap(), (vec![0.0], 0.0));
    let pbar = CosetAlgebraParams::translation(vec![1.0], vec![0.0], 0.0).unwrap();
    assert_eq!(config_coset_flow(&pbar, &[3.0], 0.0).unwrap(), (vec![0.0], 3.0));
    let xbar = CosetAlgebraParams::translation(vec![0.0], vec![1.0], 0.0).unwrap();
    assert_eq!(config_coset_flow(&xbar, &[-7.0], 2.0).unwrap(), (vec![1.0], 0.0));
}

#[test]
fn contraction_examples() {
    let g = g1(1.0, 1.0, 0.0);
    assert_eq!(contract_coordinates(&g, &ContractionParam::unit()), g);
    assert_eq!(contract_coordinates(&g, &ContractionParam::new(2.0).unwrap()), g1(2.0, 2.0, 0.0));
    assert!(ContractionParam::new(0.0).is_err());
    assert!(ContractionParam::new(-1.0).is_err());
    assert!(ContractionParam::new(f64::INFINITY).is_err());
}

fn dyadic() -> impl Strategy<Value = f64> {
    (-1024i32..=1024).prop_map(|v| v as f64 / 64.0)
}

fn element(n: usize) -> impl Strategy<Value = GroupElement> {
    (prop::collection::vec(dyadic(), n), prop::collection::vec(dyadic(), n), dyadic())
        .prop_map(|(p, x, t)| GroupElement::new(p, x, t).unwrap())
}

fn triple() -> impl Strategy<Value = (GroupElement, GroupElement, GroupElement)> {
    (1usize..=3).prop_flat_map(|n| (element(n), element(n), element(n)))
}

proptest! {
    #[test]
    fn axioms_hold_exactly((a, b, c) in triple()) {
        let id = GroupElement::identity(a.dim()).unwrap();
        prop_assert_eq!(compose(&a, &id).unwrap(), a.clone());
        prop_assert!(compose(&inverse(&a), &a).unwrap().is_identity());
        prop_assert_eq!(
            compose(&compose(&a, &b).unwrap(), &c).unwrap(),
            compose(&a, &compose(&b, &c).unwrap()).unwrap()
        );
    }

    #[test]
    fn twist_is_antisymmetric((a, b, _c) in triple()) {
        prop_assert_eq!(a.twist(&b).unwrap(), -b.twist(&a).unwrap());
    }

    #[test]
    fn contraction_round_trips(g in element(2), k in prop::sample::select(vec![0.25, 0.5, 2.0, 4.0, 8.0])) {
        let there = contract_coordinates(&g, &ContractionParam::new(k).unwrap());
        let back = contract_coordinates(&there, &ContractionParam::new(1.0 / k).unwrap());
        prop_assert_eq!(back, g);
    }

    #[test]
    fn theta_rate_scales_as_inverse_k_squared(
        pb in dyadic(), xb in dyadic(), tb in dyadic(), p in dyadic(), x in dyadic(),
        k in prop::sample::select(vec![2.0, 4.0, 8.0, 16.0]),
    ) {
        let params = CosetAlgebraParams::translation(vec![pb], vec![xb], tb).unwrap();
        let pt = CosetPoint { p: vec![p], x: vec![x], theta: 0.0 };
        let d1 = phase_space_coset_flow(&params, &pt, &ContractionParam::unit()).unwrap().dtheta - tb;
        let dk = phase_space_coset_flow(&params, &pt, &ContractionParam::new(k).unwrap()).unwrap().dtheta - tb;
        prop_assert!((dk - d1 / (k * k)).abs() <= 1e-12 * (1.0 + d1.abs()));
    }

    #[test]
    fn config_flow_ignores_theta(x in dyadic(), t1 in dyadic(), t2 in dyadic(), pb in dyadic()) {
        let params = CosetAlgebraParams::translation(vec![pb], vec![0.5], 0.25).unwrap();
        prop_assert_eq!(config_coset_flow(&params, &[x], t1).unwrap(), config_coset_flow(&params, &[x], t2).unwrap());
    }
}
