pub mod analytics;
pub mod circuit;
pub mod error;
pub mod experiments;
pub mod fmps;
pub mod grid;
pub mod kernels;
pub mod linalg;
pub mod logical;
pub mod qrl;
pub mod scalar;
pub mod states;
pub mod svd;

pub type State64 = fmps::FmpsState<f64>;
pub type State32 = fmps::FmpsState<f32>;
pub type BellPair64 = states::BellPairMps<f64>;
pub type BellPair32 = states::BellPairMps<f32>;
pub type Matrix64 = linalg::CMat<f64>;
pub type Matrix32 = linalg::CMat<f32>;
