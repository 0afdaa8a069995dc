//! Quad-rail lattice execution: gadgets, decoding, Pauli frame, calibration and scheduling.

pub mod calibrate;
pub mod decode;
pub mod frame;
pub mod gadgets;
pub mod network;
pub mod program;
pub mod schedule;

pub use calibrate::*;
pub use decode::*;
pub use frame::*;
pub use gadgets::*;
pub use network::*;
pub use program::*;
pub use schedule::*;
