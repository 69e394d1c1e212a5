//! Quasi-cyclic LDPC codes: alist/sidecar loading, circulant syndrome
//! encoding, and syndrome-constrained sum-product decoding.

mod code;
mod decoder;
mod library;

pub use code::{expand_base, ldpc_syndrome_encode, parse_alist, syndrome_expanded, write_alist, LdpcCode};
pub use decoder::{bp_decode, DecodeOutcome, DEFAULT_MAX_ITER, LLR_CLIP};
pub use library::{code_by_id, code_by_name, library};
