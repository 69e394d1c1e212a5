use std::sync::OnceLock;

use super::code::LdpcCode;
use crate::error::{Error, Result};

macro_rules! shipped {
    ($($name:literal),* $(,)?) => {
        &[$((
            $name,
            include_str!(concat!("../../../codes/", $name, ".alist")),
            include_str!(concat!("../../../codes/", $name, ".toml")),
        )),*]
    };
}

const SHIPPED: &[(&str, &str, &str)] = shipped![
    "qc-r1_2-z128",
    "qc-r1_4-z128",
    "qc-r1_10-z128",
    "qc-r1_2-z512",
    "qc-r1_4-z512",
    "qc-r1_10-z512",
];

/// The shipped code library, loaded and verified once.
pub fn library() -> &'static [LdpcCode] {
    static CODES: OnceLock<Vec<LdpcCode>> = OnceLock::new();
    CODES.get_or_init(|| {
        SHIPPED
            .iter()
            .map(|(name, alist, meta)| {
                LdpcCode::from_files(alist, meta).unwrap_or_else(|e| panic!("shipped code {name} is corrupt: {e}"))
            })
            .collect()
    })
}

pub fn code_by_name(name: &str) -> Result<&'static LdpcCode> {
    library().iter().find(|c| c.name == name).ok_or_else(|| Error::UnknownCode(name.into()))
}

pub fn code_by_id(id: u32) -> Result<&'static LdpcCode> {
    library().iter().find(|c| c.id == id).ok_or_else(|| Error::UnknownCode(format!("id {id}")))
}
