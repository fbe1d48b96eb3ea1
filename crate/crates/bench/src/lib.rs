//! Fixtures shared by the benchmarks.

use pretangent::{build_space, Exact, Point, PointSequence, SpaceOracle, SpaceSpec};

pub fn space(spec: SpaceSpec) -> SpaceOracle {
    build_space(&spec).expect("benchmark space")
}

/// `c * 3^-n` on a line-like space.
pub fn line_sequence(label: &str, c: Exact) -> PointSequence {
    PointSequence::new(label, move |n| Point::line(c.scale3(-(n as i64))))
}
