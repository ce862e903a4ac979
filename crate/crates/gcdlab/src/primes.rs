//! Prime table backing the integer <-> multi-index bijection.
//!
//! The table is a plain sieve over the first `len` primes. Positions beyond
//! the table are a hard error everywhere; nothing in this crate silently
//! extends it.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Number of primes in the shared default table. Large enough that every
/// prime below 10^6 has a tabled position, so any integer up to 10^6
/// factorizes against the default table.
pub const DEFAULT_TABLE_LEN: usize = 80_000;

/// An ascending table of the first `len` primes, 1-based access.
#[derive(Debug)]
pub struct PrimeTable {
    primes: Vec<u64>,
}

impl PrimeTable {
    /// Sieves the first `len` primes.
    pub fn new(len: usize) -> Self {
        assert!(len >= 1, "prime table must hold at least one prime");
        // Rosser-Schoenfeld style upper bound for the len-th prime.
        let n = len as f64;
        let bound = if len < 6 {
            16
        } else {
            (n * (n.ln() + n.ln().ln())).ceil() as usize + 16
        };
        let mut composite = vec![false; bound + 1];
        let mut primes = Vec::with_capacity(len);
        for p in 2..=bound {
            if !composite[p] {
                primes.push(p as u64);
                if primes.len() == len {
                    break;
                }
                let mut m = p * p;
                while m <= bound {
                    composite[m] = true;
                    m += p;
                }
            }
        }
        assert_eq!(primes.len(), len, "sieve bound too small for {len} primes");
        PrimeTable { primes }
    }

    /// The shared table of the first [`DEFAULT_TABLE_LEN`] primes.
    pub fn default_table() -> &'static PrimeTable {
        static TABLE: OnceLock<PrimeTable> = OnceLock::new();
        TABLE.get_or_init(|| PrimeTable::new(DEFAULT_TABLE_LEN))
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn largest(&self) -> u64 {
        *self.primes.last().expect("table is nonempty")
    }

    /// The prime at 1-based `position`.
    pub fn get(&self, position: usize) -> Result<u64> {
        if position == 0 || position > self.primes.len() {
            return Err(Error::PrimePositionOutOfRange {
                position,
                table_len: self.primes.len(),
            });
        }
        Ok(self.primes[position - 1])
    }

    /// 1-based position of `p` if it is a tabled prime.
    pub fn position_of(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok().map(|i| i + 1)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }
}
