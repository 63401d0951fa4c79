//! Phase-space quantum mechanics on the Heisenberg–Weyl group: exact group
//! algebra, a grid-based Moyal star product with ħ = 2, evolution in the
//! Schrödinger, Heisenberg and Liouville pictures, and the `k → ∞`
//! contraction to classical mechanics.

pub mod contraction;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod grid;
pub mod group;
pub mod io;
pub mod oracle;
pub mod phase_space;
pub mod polynomial;
mod spectral;
pub mod star;

pub use contraction::{
    bracket_convergence, contracted_overlap, contracted_overlap_numeric, left_operator_limit, left_operator_sweep,
    overlap_decay_sweep, product_commutativization, theta_decoupling_scan, SweepSpec, SweepTable,
};
pub use dynamics::{
    classical_heisenberg_evolve, classical_liouville_evolve, contracted_heisenberg_evolve,
    free_particle_tilde_generator, heisenberg_evolve, liouville_evolve, schrodinger_evolve, tilde_apply,
    EvolutionConfig, FreeParticleTilde, HamiltonianGenerator, Tilde, Trajectory, TrajectoryRecord,
};
pub use error::{Error, Result};
pub use fit::LinearFit;
pub use grid::{PhaseFunction, PhaseGrid, Role};
pub use group::{
    compose, config_coset_flow, contract_coordinates, inverse, phase_space_coset_flow, ContractionParam,
    CosetAlgebraParams, CosetPoint, CosetTangent, GroupElement, HBAR,
};
pub use phase_space::{
    apply_pl, apply_xl, coherent_state, contracted_coherent_state, contracted_inner, inner, translate, CoherentLabel,
};
pub use polynomial::Polynomial;
pub use star::{
    moyal_bracket, poisson_bracket, scaled_bracket, star, star_with_report, trace_pair, trace_via_state, wigner,
    StarMethod,
};
