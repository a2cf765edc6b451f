//! Exact Stirling numbers of the second kind, Bell numbers and falling factorials.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest `k` served by the shared table unless a caller asks for more.
pub const DEFAULT_STIRLING_CAP: usize = 64;

/// Triangular table of `S(k, j)` for `0 <= j <= k <= max_k`.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    rows: Vec<Vec<BigUint>>,
}

impl StirlingTable {
    /// Fills the table with `S(k, j) = j·S(k-1, j) + S(k-1, j-1)`.
    pub fn new(max_k: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_k + 1);
        rows.push(vec![BigUint::one()]);
        for k in 1..=max_k {
            let prev = &rows[k - 1];
            let mut row = vec![BigUint::zero(); k + 1];
            for j in 1..=k {
                let stay = if j < k { &prev[j] * j } else { BigUint::zero() };
                row[j] = stay + &prev[j - 1];
            }
            rows.push(row);
        }
        StirlingTable { rows }
    }

    /// The shared table with `max_k = DEFAULT_STIRLING_CAP`, built on first use.
    pub fn shared() -> &'static StirlingTable {
        static TABLE: OnceLock<StirlingTable> = OnceLock::new();
        TABLE.get_or_init(|| StirlingTable::new(DEFAULT_STIRLING_CAP))
    }

    pub fn max_k(&self) -> usize {
        self.rows.len() - 1
    }

    /// `S(k, j)`, zero when `j > k`.
    pub fn get(&self, k: usize, j: usize) -> Result<BigUint> {
        let row = self.rows.get(k).ok_or_else(|| cap_error(k, self.max_k()))?;
        Ok(row.get(j).cloned().unwrap_or_default())
    }

    pub fn row(&self, k: usize) -> Result<&[BigUint]> {
        self.rows
            .get(k)
            .map(Vec::as_slice)
            .ok_or_else(|| cap_error(k, self.max_k()))
    }

    pub fn bell(&self, k: usize) -> Result<BigUint> {
        Ok(self.row(k)?.iter().sum())
    }
}

fn cap_error(k: usize, cap: usize) -> Error {
    Error::CapExceeded {
        what: format!("k={k}"),
        cap: cap as u64,
    }
}

/// Table covering `k` under the default cap, or a freshly built one when `cap` allows more.
fn table_for(k: usize, cap: usize) -> Result<std::borrow::Cow<'static, StirlingTable>> {
    if k > cap {
        return Err(cap_error(k, cap));
    }
    if k <= DEFAULT_STIRLING_CAP {
        Ok(std::borrow::Cow::Borrowed(StirlingTable::shared()))
    } else {
        Ok(std::borrow::Cow::Owned(StirlingTable::new(k)))
    }
}

/// `S(k, j)` under the default cap.
pub fn stirling2(k: usize, j: usize) -> Result<BigUint> {
    stirling2_capped(k, j, DEFAULT_STIRLING_CAP)
}

pub fn stirling2_capped(k: usize, j: usize, cap: usize) -> Result<BigUint> {
    table_for(k, cap)?.get(k, j)
}

/// Bell number `B_k = Σ_j S(k, j)` under the default cap.
pub fn bell(k: usize) -> Result<BigUint> {
    bell_capped(k, DEFAULT_STIRLING_CAP)
}

pub fn bell_capped(k: usize, cap: usize) -> Result<BigUint> {
    table_for(k, cap)?.bell(k)
}

/// `(n)_j = n(n-1)···(n-j+1)`; `(n)_0 = 1` and `(n)_j = 0` for `j > n`.
pub fn falling_factorial(n: usize, j: usize) -> BigUint {
    if j > n {
        return BigUint::zero();
    }
    ((n - j + 1)..=n).fold(BigUint::one(), |acc, x| acc * x)
}

/// Checks `n^k = Σ_{j=1..k} S(k, j)·(n)_j` exactly.
pub fn check_generating_identity(n: usize, k: usize) -> Result<bool> {
    let table = table_for(k, DEFAULT_STIRLING_CAP)?;
    let lhs = BigUint::from(n).pow(k as u32);
    let rhs: BigUint = (1..=k)
        .map(|j| Ok(table.get(k, j)? * falling_factorial(n, j)))
        .sum::<Result<BigUint>>()?;
    Ok(lhs == rhs)
}
