//! Enumeration of photon-count configurations (weak compositions of n into
//! m parts), in descending lexicographic order: (n,0,...,0) first,
//! (0,...,0,n) last. There are C(m+n-1, n) of them.

use super::{OutputConfiguration, SimError};
use crate::numeric::binomial_u128;

pub const CONFIGURATION_BUDGET: u64 = 10_000_000;

/// C(m+n-1, n), or `None` on overflow.
pub fn count_configurations(m: usize, n: usize) -> Option<u128> {
    if m == 0 {
        return Some(0);
    }
    binomial_u128((m + n - 1) as u64, n as u64)
}

/// All configurations of n photons over m modes, canonical order.
pub fn enumerate_configurations(m: usize, n: usize) -> Result<Vec<OutputConfiguration>, SimError> {
    let count = checked_count(m, n, CONFIGURATION_BUDGET)?;
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0u32; m];
    current[0] = n as u32;
    loop {
        out.push(OutputConfiguration::new(current.clone()).expect("m >= 1"));
        if !advance_composition(&mut current) {
            break;
        }
    }
    debug_assert_eq!(out.len() as u64, count);
    Ok(out)
}

pub(crate) fn checked_count(m: usize, n: usize, budget: u64) -> Result<u64, SimError> {
    if m == 0 {
        return Err(SimError::NoModes);
    }
    let count = count_configurations(m, n).unwrap_or(u128::MAX);
    if count > budget as u128 {
        return Err(SimError::ConfigurationBudget { count, budget });
    }
    Ok(count as u64)
}

/// Steps to the next configuration in descending lexicographic order;
/// false once (0,...,0,n) is reached. Moves one photon out of the last
/// occupied non-final mode and piles everything to its right just below it.
pub(crate) fn advance_composition(counts: &mut [u32]) -> bool {
    let m = counts.len();
    if m == 1 {
        return false;
    }
    let Some(pivot) = counts[..m - 1].iter().rposition(|&c| c > 0) else {
        return false;
    };
    let moved: u32 = counts[pivot + 1..].iter().sum();
    counts[pivot] -= 1;
    counts[pivot + 1] = moved + 1;
    for slot in &mut counts[pivot + 2..] {
        *slot = 0;
    }
    true
}
