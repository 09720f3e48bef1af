//! Classical simulator for revocable quantum digital signatures.
//!
//! Quantum tokens are simulated exactly by [`qkernel`]; the schemes built on
//! top of it are
//!
//! * [`tts`]: two-tier tokenized signatures from a one-way function,
//! * [`ttoss`]: two-tier one-shot signatures over exact claw-free pairs,
//! * [`dsrkey`]: signatures with revocable signing keys (one-time, hashed
//!   multi-bit, and chained many-time),
//! * [`dsrsign`]: signatures with revocable signatures,
//! * [`grouplight`]: group-action lightning and quantum key revocation,
//!
//! and [`games`] runs their security games against baseline adversaries.
//!
//! Nothing here is secure: toy parameters are brute-forceable and the kernel
//! stores every amplitude classically.

pub mod bits;
pub mod dsrkey;
pub mod dsrsign;
pub mod games;
pub mod grouplight;
pub mod primitives;
pub mod qkernel;
pub mod rng;
mod serde_hex;
pub mod ttoss;
pub mod tts;

pub use bits::BitString;
pub use qkernel::{KernelError, Registry, TokenHandle, TokenId};
