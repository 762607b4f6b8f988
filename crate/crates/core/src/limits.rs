use num_bigint::BigUint;

use crate::error::{Error, Result};

pub const DEFAULT_ELEMENT_CAP: u64 = 2_000_000;

/// Upper bound on the number of segments or pieces an operation may produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ElementCap(Option<u64>);

impl ElementCap {
    pub fn new(cap: u64) -> Self {
        ElementCap(Some(cap))
    }

    pub fn unlimited() -> Self {
        ElementCap(None)
    }

    pub fn get(&self) -> Option<u64> {
        self.0
    }

    pub fn check(&self, count: &BigUint) -> Result<()> {
        match self.0 {
            Some(cap) if *count > BigUint::from(cap) => Err(Error::CapExceeded {
                requested: count.to_string(),
                cap,
            }),
            _ => Ok(()),
        }
    }

    pub fn check_usize(&self, count: usize) -> Result<()> {
        self.check(&BigUint::from(count))
    }
}

impl Default for ElementCap {
    fn default() -> Self {
        ElementCap::new(DEFAULT_ELEMENT_CAP)
    }
}
