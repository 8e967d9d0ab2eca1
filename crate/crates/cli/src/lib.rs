//! Report-producing plumbing behind the `congruence` binary.

pub mod bench;
pub mod timing;
