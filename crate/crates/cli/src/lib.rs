//! Std companion of `hadamard-core`: spec files, reports, verification
//! suites, FFT and finite-difference cross-checks, and the `hadamard` CLI.

pub mod app;
pub mod fourier;
pub mod kernels;
pub mod report;
pub mod specfile;
pub mod suites;
