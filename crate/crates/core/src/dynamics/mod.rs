//! Exact closed-system evolution, initial states, singlet measurement and
//! the averaging that turns sector traces into an observable `S(t)`.

mod averaging;
mod density;
mod electron;
mod propagate;
mod series;
mod states;

pub use averaging::{
    high_field_weights, reassemble_electron_traces, reassemble_two_group, weighted_average_one_group,
    zero_field_weights, FieldRegime,
};
pub use density::{bell_population, bell_vector, pair_density_of_state, electron_pair_density, singlet_probability, BellState, DensityMatrix};
pub use electron::ElectronTrace;
pub use propagate::{evolve, Propagator, StateEvolution};
pub use series::{clamp_probability, SeriesKind, TimeGrid, TimeSeries, PROBABILITY_SLACK};
pub use states::{
    initial_sector_state, maximally_mixed_nuclear_state, nuclear_basis_ensemble, sector_state_vector, with_singlet,
};
