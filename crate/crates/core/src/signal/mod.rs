//! Alice's transmit chain and the physical channel: shaped constellations,
//! pilot-interleaved frames, and the heterodyne detection model.

pub mod channel;
pub mod constellation;
pub mod frame;
pub mod oversample;

pub use channel::{apply_channel, wiener_phase, ChannelRealization};
pub use constellation::{build_constellation, shaping_nu_for_entropy, Constellation};
pub use frame::{build_frame, QuantumFrame};
