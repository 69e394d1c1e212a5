//! Privacy amplification by Toeplitz hashing with an exact NTT-based
//! convolution, finite-size key-length accounting and key file I/O.

mod keyfile;
pub mod ntt;
mod toeplitz;

pub use keyfile::{pack_bits, read_bit_file, unpack_bits, write_bit_file};
pub use toeplitz::{final_key_length, toeplitz_extract, ToeplitzSeed};
