//! Safety verification of single-loop array programs by inductive rank
//! reduction.
//!
//! A *squeezer* maps every program state of rank above a base bound `B` to
//! a state of strictly smaller rank, such that initial states stay initial,
//! bad states stay bad, and traces of the original state are simulated by
//! traces of the squeezed one. With such a squeezer, safety of the whole
//! system reduces to safety of its initial states of rank at most `B`.
//!
//! The crate contains the program IR ([`ir`]), the squeezer language
//! ([`sqz`]), concrete testing against a state bank ([`bank`]), proof
//! obligations and their backends ([`vcgen`]), the base case check
//! ([`basecase`]), enumerative synthesis ([`synth`]) and the embedded
//! benchmarks ([`bench`]).

pub mod bank;
pub mod basecase;
pub mod bench;
pub mod encode;
pub mod ir;
pub mod lex;
pub mod logic;
pub mod sqz;
pub mod synth;
pub mod vcgen;
