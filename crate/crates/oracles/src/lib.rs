//! Slow, direct reference computations for cross-checking `textca`.
//!
//! Nothing here shares code with the library under test: the CA oracle goes
//! through a Jacobi eigen-decomposition of the cross-product matrix instead
//! of an SVD, and the clustering oracle recomputes centroids at every step.

pub mod ca;
pub mod compare;
pub mod eigen;
pub mod generate;
pub mod ward;

pub use compare::{max_diff, max_diff_up_to_sign};
pub use ca::{chi2_column_distance_sq, BruteCa};
pub use eigen::jacobi_eigen;
pub use generate::{random_table, seeded, SplitMix64};
pub use ward::{adjacent_ward_greedy, best_contiguous_partition_cost, OracleMerge};
