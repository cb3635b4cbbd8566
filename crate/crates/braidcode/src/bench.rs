//! Color counts of unitary braid codes on grids built from windows of
//! consecutive primes, against the order L^{n/m^n}.

use crate::braidnd::{construct_unitary_nd, UnitaryBraidParamsND};
use crate::error::{Error, Result};
use crate::oracle::count_colors;

/// Grids up to this many points are constructed and counted; larger ones use
/// the count formula.
pub const CONSTRUCT_LIMIT: usize = 200_000;

/// The first `count` primes.
pub fn primes(count: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(count);
    let mut k = 2;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= k).all(|&p| k % p != 0) {
            out.push(k);
        }
        k += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub s: usize,
    pub primes: Vec<usize>,
    /// Common side length of the cubic grid.
    pub side: usize,
    pub colors: usize,
    pub ratio: f64,
    /// True when the count comes from an actual construction.
    pub constructed: bool,
}

/// Unitary code for window s: block (m,...,m), g = 2, and sub-grid J gets the
/// J-th prime of the window on every axis.
pub fn family_params(m: usize, n: usize, s: usize) -> Result<UnitaryBraidParamsND> {
    if m == 0 || n == 0 || s == 0 {
        return Err(Error::InvalidParams(vec!["m, n and s must be positive".into()]));
    }
    let width = u32::try_from(n)
        .ok()
        .and_then(|n| m.checked_pow(n))
        .ok_or(Error::Overflow("prime window width"))?;
    let window = primes(s - 1 + width)[s - 1..].to_vec();
    Ok(UnitaryBraidParamsND::isotropic(vec![m; n], 2, window))
}

pub fn order_bench(m: usize, n: usize, s_range: std::ops::RangeInclusive<usize>) -> Result<Vec<BenchRow>> {
    s_range
        .map(|s| {
            let params = family_params(m, n, s)?;
            let side = params.dims()?[0];
            let volume = side.checked_pow(n as u32).unwrap_or(usize::MAX);
            let (colors, constructed) = if volume <= CONSTRUCT_LIMIT {
                (count_colors(&construct_unitary_nd(&params)?), true)
            } else {
                (params.color_count(), false)
            };
            let exponent = n as f64 / (m as f64).powi(n as i32);
            Ok(BenchRow {
                s,
                primes: params.q[0].clone(),
                side,
                colors,
                ratio: colors as f64 / (side as f64).powf(exponent),
                constructed,
            })
        })
        .collect()
}

/// Header `L\tK\tratio`, one row per window.
pub fn to_tsv(rows: &[BenchRow]) -> String {
    let mut out = String::from("L\tK\tratio\n");
    for r in rows {
        out.push_str(&format!("{}\t{}\t{:.6}\n", r.side, r.colors, r.ratio));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_primes() {
        assert_eq!(primes(6), vec![2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn injective_family_has_unit_ratio() {
        for row in order_bench(1, 1, 1..=3).unwrap() {
            assert_eq!(row.colors, row.side);
            assert!((row.ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_block_family() {
        let rows = order_bench(2, 1, 1..=3).unwrap();
        assert_eq!((rows[0].side, rows[0].colors), (24, 10));
        assert_eq!((rows[1].side, rows[1].colors), (60, 16));
        assert!(rows.iter().all(|r| r.constructed && r.ratio > 1.0 && r.ratio <= 8.0));
        assert!(to_tsv(&rows).starts_with("L\tK\tratio\n24\t10\t2.041241\n"));
    }
}
