//! Shared configuration and field-table cache.
//!
//! Field tables are immutable once built, so the engine hands out `Arc`s and
//! may be used from any number of worker threads. Budgets are fixed at
//! construction: `field_budget` caps p^k for table construction (the O(Q)
//! dlog table is the dominating cost), `double_sum_budget` caps the naive
//! O(Q^2) double-sum path, which is kept only as a differential oracle.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::gfq::{FieldTable, GeneratorChoice, DEFAULT_FIELD_BUDGET};

/// Default cap on |F| for the naive double-sum path.
pub const DEFAULT_DOUBLE_SUM_BUDGET: u64 = 1 << 10;

/// Decompose a prime power q = p^k; rejects q that are not prime powers.
pub fn prime_power_decompose(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!(
            "{} is not a prime power",
            q
        )));
    }
    let mut p = 0u64;
    let mut m = q;
    let mut d = 2u64;
    while d as u128 * d as u128 <= q as u128 {
        if m % d == 0 {
            p = d;
            break;
        }
        d += 1;
    }
    if p == 0 {
        return Ok((q, 1)); // q itself prime
    }
    let mut k = 0u32;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    if m != 1 {
        return Err(Error::InvalidArgument(format!(
            "{} is not a prime power",
            q
        )));
    }
    Ok((p, k))
}

pub struct Engine {
    field_budget: u64,
    double_sum_budget: u64,
    generator: GeneratorChoice,
    cache: Mutex<HashMap<(u64, u32), Arc<FieldTable>>>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new()
    }
}

impl Engine {
    pub fn new() -> Engine {
        Engine {
            field_budget: DEFAULT_FIELD_BUDGET,
            double_sum_budget: DEFAULT_DOUBLE_SUM_BUDGET,
            generator: GeneratorChoice::Primary,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_field_budget(mut self, budget: u64) -> Engine {
        self.field_budget = budget;
        self
    }

    pub fn with_double_sum_budget(mut self, budget: u64) -> Engine {
        self.double_sum_budget = budget;
        self
    }

    pub fn with_generator(mut self, choice: GeneratorChoice) -> Engine {
        self.generator = choice;
        self
    }

    pub fn field_budget(&self) -> u64 {
        self.field_budget
    }

    pub fn double_sum_budget(&self) -> u64 {
        self.double_sum_budget
    }

    pub fn generator_choice(&self) -> GeneratorChoice {
        self.generator
    }

    /// F_{p^k}, cached.
    pub fn field(&self, p: u64, k: u32) -> Result<Arc<FieldTable>> {
        {
            let cache = self.cache.lock().unwrap();
            if let Some(f) = cache.get(&(p, k)) {
                return Ok(Arc::clone(f));
            }
        }
        let table = Arc::new(FieldTable::with_generator(
            p,
            k,
            self.field_budget,
            self.generator,
        )?);
        self.cache
            .lock()
            .unwrap()
            .entry((p, k))
            .or_insert_with(|| Arc::clone(&table));
        Ok(table)
    }

    /// F_{q^m} for a prime power q.
    pub fn extension_field(&self, q: u64, m: u32) -> Result<Arc<FieldTable>> {
        let (p, k) = prime_power_decompose(q)?;
        let km = k
            .checked_mul(m)
            .ok_or_else(|| Error::InvalidArgument("extension degree overflow".into()))?;
        self.field(p, km)
    }
}
