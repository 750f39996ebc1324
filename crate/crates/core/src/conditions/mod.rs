//! Structural conditions on growth functions and the constants linking them.

mod checks;
mod constants;
mod sampling;

pub use checks::{
    check_a0, check_a1, check_a1_omega, check_a2, check_a2_sweep, check_ainc_adec, check_rtol,
    inverse_growth_constant, Monotonicity, Perturbation, A2_SWEEP, A2_T_FLOOR,
};
pub use constants::{
    a1_to_a1omega_constant, a1omega_to_a1_constant, chain_minimum, chain_points, compute_beta_prime,
    ConstantBundle,
};
pub use sampling::{
    sample_balls, sample_points, t_grid, BallSample, DEFAULT_BALLS, DEFAULT_T_POINTS, MAX_BALL_POINTS,
};
