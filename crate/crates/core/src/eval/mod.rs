//! Classification accuracy of precomputed kernels.

pub mod cv;
pub mod multiclass;
pub mod svm;

pub use cv::{cross_validate, CvConfig, CvResult, DEFAULT_C_GRID};
pub use multiclass::{train_ovo, OvoClassifier};
pub use svm::{predict, train_svm, SvmModel};
