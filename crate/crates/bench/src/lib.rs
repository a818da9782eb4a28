//! Criterion benches for `reweb-core`; see `benches/core.rs`.
