//! Shared fixtures for the benchmarks.

use gic_core::{ChannelParams, PowerSplit};

pub fn symmetric() -> ChannelParams {
    ChannelParams::new(0.25, 0.25, 2.0, 2.0, 1.0).expect("valid instance")
}

pub fn asymmetric_split() -> (ChannelParams, PowerSplit) {
    let cp = ChannelParams::new(0.3, 0.6, 1.0, 2.0, 1.0).expect("valid instance");
    let ps = PowerSplit::from_private(&cp, 0.5, 1.0).expect("within budget");
    (cp, ps)
}
