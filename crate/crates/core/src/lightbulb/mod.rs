//! The lightbulb process: `n` bulbs, all off; at stage `r = 1..=n` a
//! uniformly chosen set of `r` bulbs is toggled. `Y` counts the bulbs left
//! on.

mod coupling;
mod enumerate;
mod matrix;
mod moments;

pub use coupling::{
    sample_configuration, sample_dagger_coupling, sample_dagger_coupling_with, sample_size_bias_coupling,
    zero_bias_sample, CouplingSample, DaggerMove, LightbulbDraw, LightbulbSampler, StageLaw,
};
pub use enumerate::{enumerate_exact, DaggerLaw, Enumeration, EnumerationOptions, InvariantViolations};
pub use matrix::ToggleMatrix;
pub use moments::{compute_bn, lightbulb_moments, LightbulbMoments};
