//! 5R selection, Whitney covers, fixed-scale covers and partitions of unity.

mod five_r;
mod fixed;
mod partition;
mod whitney;

pub use five_r::five_r_cover;
pub use fixed::{fixed_scale_cover, scale_cover, FixedScaleCover};
pub use partition::{ball_partition, partition_of_unity, PartitionOfUnity};
pub use whitney::{
    analytic_dist_constants, measure_dist_constants, overlap_counts, verify_whitney, whitney_cover, whitney_margin,
    DistConstants, PropertyCheck, WhitneyCover, WhitneyReport,
};
