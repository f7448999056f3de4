//! Dense models of weighted sequences and the passage from dense to sparse
//! sumset positivity.

pub mod bohr;
pub mod demo;
pub mod sumset;

pub use bohr::{
    bohr_set, check_uniformity, dense_model, dense_model_with_frequencies, large_spectrum, BohrSet,
    DenseModel, UniformityCheck,
};
pub use demo::{transference_demo, TransferenceParams, TransferenceReport};
pub use sumset::{
    convolution, dense_sumset_check, dense_sumset_scan, dense_window, indicator_convolution,
    WindowScan,
};
