//! Weights, transforms and exponential sums on the Fourier side.

pub mod arcs;
pub mod expsum;
pub mod spectrum;
pub mod vinogradov;
pub mod weights;

pub use arcs::{decompose_arcs, ArcClass, ArcDecomposition, MajorArc};
pub use expsum::{g_b, g_b_rational, rational_residual, v_q, v_q_crt};
pub use spectrum::{
    dft_grid, dft_signed, pseudorandomness_eta, pseudorandomness_of, restriction_constant,
    PseudoReport, SpectrumGrid,
};
pub use vinogradov::{vinogradov_count, vinogradov_count_brute, vinogradov_count_multiset};
pub use weights::{
    build_f_b, build_nu_b, iroot, mean_g, PowerSet, SequenceKind, SequenceMeta, WeightedSequence,
};
