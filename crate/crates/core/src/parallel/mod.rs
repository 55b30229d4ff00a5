//! Data-parallel sorting machinery run on a bulk-synchronous host executor.
//!
//! Every operation here is a sequence of *phases*. Inside a phase each
//! element (or chunk) is computed independently from arrays written by
//! earlier phases; the end of a phase is a barrier. Because no element reads
//! a value written in its own phase, the result is the same whether the
//! phase runs on one worker or many, in any order. That is the determinism
//! contract: outputs are bit-identical for every [`ExecutorConfig`].
//!
//! The building blocks, bottom-up:
//!
//! * [`exclusive_scan`]: work-efficient up-sweep/down-sweep scan,
//!   `2·log2(n)` phases.
//! * [`split_by_bit`]: stable partition on one key bit, computed from a scan
//!   of the flipped bit and a scatter.
//! * [`radix_sort`]: one split per bit, least significant first.
//! * [`chunked_radix_sort`]: chunk-local split sorts, a bucket-offset table
//!   scattered through a scan, then pairwise merging of the sorted runs.

mod chunked;
mod executor;
mod radix;
mod scan;

pub use chunked::chunked_radix_sort;
pub use executor::{ConfigError, Executor, ExecutorConfig};
pub use radix::{radix_sort, split_by_bit};
pub use scan::{exclusive_scan, ScanError};

pub(crate) use radix::digit_sort;

/// 32-bit sort keys with an optional payload carried alongside.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KeyArray {
    pub keys: Vec<u32>,
    pub payload: Option<Vec<u32>>,
}

impl KeyArray {
    pub fn new(keys: Vec<u32>) -> Self {
        KeyArray { keys, payload: None }
    }

    /// Panics if the lengths differ.
    pub fn with_payload(keys: Vec<u32>, payload: Vec<u32>) -> Self {
        assert_eq!(keys.len(), payload.len(), "payload length must match keys");
        KeyArray {
            keys,
            payload: Some(payload),
        }
    }

    /// Keys paired with their input index as payload; handy for checking
    /// stability.
    pub fn indexed(keys: Vec<u32>) -> Self {
        let payload = (0..keys.len() as u32).collect();
        KeyArray::with_payload(keys, payload)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub(crate) fn to_records(&self) -> Vec<Rec> {
        match &self.payload {
            Some(p) => self.keys.iter().zip(p).map(|(&key, &val)| Rec { key, val }).collect(),
            None => self.keys.iter().map(|&key| Rec { key, val: 0 }).collect(),
        }
    }

    pub(crate) fn from_records(recs: &[Rec], with_payload: bool) -> Self {
        KeyArray {
            keys: recs.iter().map(|r| r.key).collect(),
            payload: with_payload.then(|| recs.iter().map(|r| r.val).collect()),
        }
    }
}

/// Internal key/payload pair moved as one unit by every scatter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct Rec {
    pub key: u32,
    pub val: u32,
}
