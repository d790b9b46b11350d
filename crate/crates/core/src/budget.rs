//! Process-wide memory budget for the large tables (distance matrices,
//! BFS frontiers). Allocations that would exceed it fail with
//! [`Error::Budget`] instead of aborting the process.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

pub const DEFAULT_BYTES: u64 = 4 << 30;

static BUDGET: AtomicU64 = AtomicU64::new(DEFAULT_BYTES);

pub fn set_memory_budget(bytes: u64) {
    BUDGET.store(bytes, Ordering::Relaxed);
}

pub fn memory_budget() -> u64 {
    BUDGET.load(Ordering::Relaxed)
}

pub fn check(bytes: u64, what: &str) -> Result<()> {
    let limit = memory_budget();
    if bytes > limit {
        return Err(Error::Budget(format!(
            "{what} needs {bytes} bytes, budget is {limit}"
        )));
    }
    Ok(())
}
