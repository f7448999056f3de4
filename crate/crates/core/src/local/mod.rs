//! The local problem in `Z_q`: sumsets, Cauchy–Davenport type bounds,
//! downset compression, Waring pairs, Hensel lifting and the summand selector.

pub mod cd;
pub mod downset;
pub mod hensel;
pub mod selector;
pub mod sumset;
pub mod waring_pair;

pub use cd::{
    cochrane_check, quantitative_cd_masks, verify_gen_cd, verify_quantitative_cd, BoundCheck,
    GenCdReport,
};
pub use downset::{
    downset_d, downset_transform, is_downset, is_upper_bound_for, u_of, CrtVector, UpperBound,
};
pub use hensel::hensel_solvable;
pub use selector::{mean_condition_selector, solve_representation};
pub use sumset::{
    cyclic_convolution, iterated_sumset, sum_of_blocks, sumset, thresholded_sumset,
    thresholded_sumset_interval,
};
pub use waring_pair::{
    combine_waring_pairs_check, minimal_s, waring_pair_auto, waring_pair_exhaustive,
    waring_pair_random, CombineReport, Counterexample, MinimalS, WaringPairReport,
};
