//! Germs of holomorphic maps of ℂ² tangent to the identity: exact classification
//! along characteristic directions, normal forms, conjugation checks and
//! high-precision orbit verification of parabolic attracting domains.

pub mod cli;
pub mod conjugation;
pub mod gen;
pub mod germ;
pub mod normalform;
pub mod orbit;
pub mod report;
pub mod tps;
pub mod verify;
