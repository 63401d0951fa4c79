use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use wwgm::oracle::{oracle_harmonic_energy, oracle_quadratic_flow, QuadraticGenerator};
use wwgm::*;

fn grid() -> PhaseGrid {
    PhaseGrid::new(1, 64, 8.0).unwrap()
}

fn x() -> Polynomial {
    Polynomial::x(1, 0)
}

fn p() -> Polynomial {
    Polynomial::p(1, 0)
}

fn poly(g: &PhaseGrid, q: Polynomial) -> PhaseFunction {
    PhaseFunction::polynomial(g, q).unwrap()
}

fn blob(g: &PhaseGrid, role: Role, pc: f64, xc: f64, w: f64) -> PhaseFunction {
    PhaseFunction::from_fn(g, role, |p, x| {
        Complex64::new((-((p[0] - pc).powi(2) + (x[0] - xc).powi(2)) / (2.0 * w * w)).exp(), 0.0)
    })
}

#[test]
fn zero_generator_is_stationary() {
    let g = grid();
    let phi = coherent_state(&CoherentLabel::pair(0.2, -0.3), &g).unwrap();
    let cfg = EvolutionConfig::new(0.01, 20).unwrap();
    let zero = HamiltonianGenerator::zero(1);
    assert!(schrodinger_evolve(&phi, &zero, &cfg).unwrap().final_field().max_abs_diff(&phi).unwrap() < 1e-15);
    let rho = wigner(&phi).unwrap();
    assert!(liouville_evolve(&rho, &zero, &cfg).unwrap().final_field().max_abs_diff(&rho).unwrap() < 1e-15);
    let dens = blob(&g, Role::Density, 0.0, 0.0, 1.0);
    let out = classical_liouville_evolve(&dens, &zero, &cfg).unwrap();
    assert!(out.final_field().max_abs_diff(&dens).unwrap() < 1e-15);
}

#[test]
fn constant_generator_rotates_the_phase() {
    let g = grid();
    let phi = coherent_state(&CoherentLabel::pair(0.0, 0.5), &g).unwrap();
    let cfg = EvolutionConfig::to_time(PI, 400).unwrap();
    let out = schrodinger_evolve(&phi, &HamiltonianGenerator::constant(1, 2.0), &cfg).unwrap();
    assert!(out.final_field().max_abs_diff(&phi.scale(-1.0)).unwrap() < 1e-9);
}

#[test]
fn harmonic_schrodinger_conserves_norm_and_energy() {
    let g = grid();
    let a = CoherentLabel::pair(0.3, 0.5);
    let phi = coherent_state(&a, &g).unwrap();
    let cfg = EvolutionConfig::to_time(0.5, 160).unwrap().with_save_every(40);
    let tr = schrodinger_evolve(&phi, &HamiltonianGenerator::harmonic(1), &cfg).unwrap();
    assert_eq!(tr.records.len(), 5);
    let e0 = oracle_harmonic_energy((&a.p, &a.x));
    for r in &tr.records {
        assert!((r.norm - 1.0).abs() < 1e-9);
        assert!((r.energy - e0).abs() < 1e-6, "energy {} vs {e0}", r.energy);
    }
    assert!(tr.max_step_drift <= 1e-9);
    // The |φ| peak follows the label flow.
    let want = oracle_quadratic_flow(QuadraticGenerator::Harmonic, &a.x, &a.p, 0.5).unwrap().value;
    let last = tr.final_record();
    assert!((last.peak_x - want.0[0]).abs() < 1e-4 && (last.peak_p - want.1[0]).abs() < 1e-4);
}

#[test]
fn stability_guard_rejects_large_steps() {
    let g = grid();
    let phi = coherent_state(&CoherentLabel::pair(0.0, 0.0), &g).unwrap();
    let cfg = EvolutionConfig::new(0.1, 10).unwrap();
    let err = schrodinger_evolve(&phi, &HamiltonianGenerator::harmonic(1), &cfg).unwrap_err();
    assert!(matches!(err, Error::StabilityGuard(_)), "{err}");
    assert!(EvolutionConfig::new(0.0, 10).is_err());
    assert!(EvolutionConfig::new(0.1, 0).is_err());
}

#[test]
fn roles_are_enforced() {
    let g = grid();
    let phi = coherent_state(&CoherentLabel::pair(0.0, 0.0), &g).unwrap();
    let cfg = EvolutionConfig::new(0.001, 1).unwrap();
    let h = HamiltonianGenerator::harmonic(1);
    assert!(matches!(liouville_evolve(&phi, &h, &cfg), Err(Error::WrongRole { .. })));
    assert!(matches!(heisenberg_evolve(&phi, &h, &cfg), Err(Error::WrongRole { .. })));
}

#[test]
fn heisenberg_quadratic_flow_is_exact() {
    let g = grid();
    let h = HamiltonianGenerator::harmonic(1);
    let cfg = EvolutionConfig::to_time(0.7, 700).unwrap();
    let out = heisenberg_evolve(&poly(&g, x()), &h, &cfg).unwrap();
    let (c, s) = ((1.4f64).cos(), (1.4f64).sin());
    let want = poly(&g, &x().scale(c) + &p().scale(s));
    assert!(out.final_field().max_abs_diff(&want).unwrap() < 1e-10);
    let gen = heisenberg_evolve(&poly(&g, h.polynomial().clone()), &h, &cfg).unwrap();
    assert!(gen.final_field().max_abs_diff(&poly(&g, h.polynomial().clone())).unwrap() < 1e-12);
}

#[test]
fn liouville_harmonic_period_is_pi() {
    let g = grid();
    let rho = wigner(&coherent_state(&CoherentLabel::pair(0.25, -0.4), &g).unwrap()).unwrap();
    let cfg = EvolutionConfig::to_time(PI, 820).unwrap();
    let out = liouville_evolve(&rho, &HamiltonianGenerator::harmonic(1), &cfg).unwrap();
    assert!(out.final_field().max_abs_diff(&rho).unwrap() < 1e-5);
    assert!(out.total_drift.abs() < 1e-8);
}

#[test]
fn liouville_matches_the_wigner_of_the_evolved_state() {
    let g = grid();
    let phi = coherent_state(&CoherentLabel::pair(0.3, 0.2), &g).unwrap();
    let h = HamiltonianGenerator::harmonic(1);
    let cfg = EvolutionConfig::to_time(0.5, 160).unwrap();
    let via_state = wigner(schrodinger_evolve(&phi, &h, &cfg).unwrap().final_field()).unwrap();
    let via_density = liouville_evolve(&wigner(&phi).unwrap(), &h, &cfg).unwrap();
    assert!(via_density.final_field().max_abs_diff(&via_state).unwrap() < 1e-5);
}

#[test]
fn classical_flows() {
    let g = grid();
    // Rigid rotation with period 2π under (p² + x²)/2.
    let rho = blob(&g, Role::Density, 0.5, -0.5, 0.8);
    let cfg = EvolutionConfig::to_time(2.0 * PI, 820).unwrap();
    let out = classical_liouville_evolve(&rho, &HamiltonianGenerator::classical_harmonic(1), &cfg).unwrap();
    assert!(out.final_field().max_abs_diff(&rho).unwrap() < 1e-5);
    assert!(out.total_drift.abs() < 1e-8);

    let free = HamiltonianGenerator::free(1, 2.0).unwrap();
    let cfg = EvolutionConfig::to_time(1.5, 60).unwrap();
    let xt = classical_heisenberg_evolve(&poly(&g, x()), &free, &cfg).unwrap();
    assert!(xt.final_field().max_abs_diff(&poly(&g, &x() + &p().scale(0.75))).unwrap() < 1e-12);
    let gt = classical_heisenberg_evolve(&poly(&g, free.polynomial().clone()), &free, &cfg).unwrap();
    assert!(gt.final_field().max_abs_diff(&poly(&g, free.polynomial().clone())).unwrap() < 1e-14);
}

#[test]
fn contracted_heisenberg_approaches_the_classical_flow() {
    // Cubic generator: the first quantum correction is third order, so the
    // gap to the classical flow closes as k^-4.
    let g = grid();
    let cubic = HamiltonianGenerator::new("cubic", &(&(&x() * &x()) * &x()) + &(&p() * &p()).scale(0.5)).unwrap();
    let alpha = blob(&g, Role::Observable, 0.2, -0.1, 1.0);
    let cfg = EvolutionConfig::to_time(0.02, 40).unwrap();
    let classical = classical_heisenberg_evolve(&alpha, &cubic, &cfg).unwrap();
    let ks = [1.0, 2.0, 4.0, 8.0];
    let errs: Vec<f64> = ks
        .iter()
        .map(|&k| {
            let kp = ContractionParam::new(k).unwrap();
            let q = contracted_heisenberg_evolve(&alpha, &cubic, &cfg, &kp).unwrap();
            q.final_field().max_abs_diff(classical.final_field()).unwrap()
        })
        .collect();
    let fit = wwgm::fit::fit_log_log(&ks, &errs).unwrap();
    assert!((fit.slope + 4.0).abs() < 0.1, "slope {} from {errs:?}", fit.slope);
}

#[test]
fn tilde_examples() {
    let g = grid();
    assert_eq!(tilde_apply(Tilde::P(0), &poly(&g, p())).unwrap().sup_norm(), 0.0);
    let two_i = PhaseFunction::constant(&g, Complex64::new(0.0, 2.0));
    assert!(tilde_apply(Tilde::P(0), &poly(&g, x())).unwrap().max_abs_diff(&two_i).unwrap() < 1e-15);
    assert!(tilde_apply(Tilde::X(0), &poly(&g, p())).unwrap().max_abs_diff(&two_i).unwrap() < 1e-15);
    assert!(tilde_apply(Tilde::X(1), &poly(&g, p())).is_err());
}

#[test]
fn free_particle_tilde_generator_examples() {
    let g = grid();
    let m = 1.5;
    let kp = ContractionParam::new(3.0).unwrap();
    let gen = free_particle_tilde_generator(m, &kp).unwrap();
    // ρ = p·g(x) with g = e^{−x²}: (1/2i)G̃ρ = −(p/m)·p·g′(x).
    let rho = PhaseFunction::from_fn(&g, Role::Density, |p, x| Complex64::new(p[0] * (-x[0] * x[0]).exp(), 0.0));
    let want = PhaseFunction::from_fn(&g, Role::Density, |p, x| {
        Complex64::new(-(p[0] / m) * p[0] * (-2.0 * x[0]) * (-x[0] * x[0]).exp(), 0.0)
    });
    assert!(gen.rhs(&rho).unwrap().max_abs_diff(&want).unwrap() < 1e-8);
    let heavy = free_particle_tilde_generator(1e12, &kp).unwrap();
    assert!(heavy.rhs(&blob(&g, Role::Density, 0.0, 0.0, 1.0)).unwrap().sup_norm() < 1e-11);
    assert!(free_particle_tilde_generator(0.0, &kp).is_err());
    assert!(free_particle_tilde_generator(-1.0, &kp).is_err());
}

fn bump() -> impl Strategy<Value = (f64, f64, f64)> {
    (-0.5..0.5f64, -0.5..0.5f64, 0.2..1.0f64)
}

fn density(g: &PhaseGrid, spec: &[(f64, f64, f64)]) -> PhaseFunction {
    spec.iter().fold(PhaseFunction::constant(g, 0.0).with_role(Role::Density), |acc, &(pc, xc, w)| {
        acc.add(&blob(g, Role::Density, pc, xc, 1.0).scale(w)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tilde_is_a_derivation_of_the_star_product(
        a in prop::collection::vec(bump(), 1..3), b in prop::collection::vec(bump(), 1..3),
    ) {
        let g = PhaseGrid::new(1, 128, 8.0).unwrap();
        let (a, b) = (density(&g, &a).with_role(Role::Observable), density(&g, &b).with_role(Role::Observable));
        let m = StarMethod::Spectral;
        let k1 = ContractionParam::unit();
        for which in [Tilde::P(0), Tilde::X(0)] {
            let lhs = tilde_apply(which, &star(&a, &b, m, &k1).unwrap()).unwrap();
            let rhs = star(&tilde_apply(which, &a).unwrap(), &b, m, &k1).unwrap()
                .add(&star(&a, &tilde_apply(which, &b).unwrap(), m, &k1).unwrap()).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-8);
        }
    }

    #[test]
    fn free_tilde_matches_poisson(spec in prop::collection::vec(bump(), 1..4), m in 0.5..4.0f64) {
        let g = grid();
        let rho = density(&g, &spec);
        let gc = HamiltonianGenerator::free(1, m).unwrap().field(&g).unwrap();
        let tilde = free_particle_tilde_generator(m, &ContractionParam::new(2.0).unwrap()).unwrap();
        let diff = tilde.rhs(&rho).unwrap().max_abs_diff(&poisson_bracket(&gc, &rho).unwrap()).unwrap();
        prop_assert!(diff < 1e-8);
    }
}
