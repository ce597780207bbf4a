//! Protocol schedules and their ideal target states.

mod appendix;
mod schedule;
mod states;

pub use appendix::{
    appendix_cavity_subsystems, appendix_cavity_target, appendix_coupler_subsystems, appendix_initial_state, appendix_layout,
    appendix_schedule, two_photon_rabi_check, AppendixParams, TwoPhotonMap,
};
pub use schedule::{
    dispersive_duration, execute, main_schedule, noisy_variant, pulse_duration, resonant_duration, staggered_schedule, t_op,
    DispersiveModel, Generator, Schedule, Segment,
};
pub use states::{
    branch_factor, ghz_phase, initial_state, product_state, target_branch_indices, target_relative_phase, target_state,
    InitialCondition, AMPLITUDE_TOL,
};
