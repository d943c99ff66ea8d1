//! Classification and capacity computations for two-user discrete
//! memoryless interference channels.
//!
//! A channel is a [`Dmic`]: a transition tensor `p(y1,y2|x1,x2)` on finite
//! alphabets. All information quantities are in bits.

pub mod builtin;
pub mod capacity;
pub mod channel;
pub mod error;
pub mod optimize;
pub mod prob;
pub mod random;
pub mod transform;

pub use capacity::{
    achievable_region_mixed, achievable_region_zic, attach_y2prime, bc_outer_bound,
    gaussian_mixed_branches, gaussian_reference, mixed_objective, region_extreme_points,
    simple_outer_bound, sumrate_mixed, sumrate_weak_zic, weak_zic_objective, AuxiliaryInput,
    GaussianKind, RatePoint, RateRegion, Y2Map,
};
pub use channel::{
    check_degraded, classify, classify_one_sided, factorize_weak, induced_joint, marginal_channels,
    mi_condition_report, ClassificationReport, Condition, ConditionRecord, Dmic, InfoProfile,
    ProductInput,
};
pub use error::{Error, Result};
pub use optimize::{
    blahut_arimoto, grid_oracle, maximize_product_input, maximize_with_starts, OptResult,
    OptimizerConfig,
};
pub use prob::{
    binary_entropy, conditional_mutual_information, entropy, is_markov_chain, mutual_information,
    CondDist, Dist, JointDist, MarkovCheck,
};
pub use transform::{solve_degradation_table, weak_alt_gap_surface, GapSurface, SignedCondTable};
