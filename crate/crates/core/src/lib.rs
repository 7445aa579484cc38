//! Achievable-rate regions of the two-user weak Gaussian interference channel.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod epi;
pub mod error;
pub mod gaussian_mac;
pub mod hk_region;
pub mod layers;
pub mod model;
pub mod optimizer;
pub mod polymatroid;

pub use error::{GicError, Result};
pub use model::{
    ChannelParams, ExtendedRateVector, Message, PowerSplit, RateVector, Receiver, User,
};
pub use polymatroid::{DecodingOrder, Polymatroid, Subset};
