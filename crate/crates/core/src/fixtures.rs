//! Small hand-written networks used by tests, docs and the bindings.

use crate::network::{parse_network, RawNetwork, StationKind};

/// Three stations in a ring: A–B 10 km, B–C 20 km, C–A 40 km, all at 60 km/h,
/// every station passed through without reversing.
pub const TRIANGLE_JSON: &str = include_str!("../fixtures/triangle.json");

/// X–Y–Z where both sections meet Y on its left side, so X→Z must reverse at Y.
pub const SPUR_JSON: &str = include_str!("../fixtures/spur.json");

pub fn triangle() -> RawNetwork {
    parse_network(TRIANGLE_JSON).expect("triangle fixture parses")
}

pub fn spur() -> RawNetwork {
    parse_network(SPUR_JSON).expect("spur fixture parses")
}

/// The spur with Y turned into a wye, which forbids the reversal.
pub fn spur_with_wye() -> RawNetwork {
    let mut net = spur();
    net.stations[1].kind = StationKind::Wye;
    net
}
