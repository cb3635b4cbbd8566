//! Small integer helpers shared by the constructions and the decoder.

use crate::error::{Error, Result};

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: usize, b: usize) -> Result<usize> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / gcd(a, b)).checked_mul(b).ok_or(Error::Overflow("lcm"))
}

pub fn lcm_all(values: &[usize]) -> Result<usize> {
    values.iter().try_fold(1usize, |acc, &v| lcm(acc, v))
}

pub fn product(values: &[usize]) -> Result<usize> {
    values
        .iter()
        .try_fold(1usize, |acc, &v| acc.checked_mul(v))
        .ok_or(Error::Overflow("product"))
}

/// Divisors of `n` in ascending order.
pub fn divisors(n: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Extended Euclid on signed values: returns (g, x, y) with a*x + b*y = g.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Inverse of `a` modulo `n`, if it exists. `n = 1` yields 0.
pub fn mod_inverse(a: usize, n: usize) -> Option<usize> {
    if n == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a as i128, n as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(n as i128) as usize)
}

pub fn binomial(n: usize, k: usize) -> Result<usize> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return Err(Error::Overflow("binomial"));
        }
    }
    Ok(acc as usize)
}

/// Row-major index of `coords` inside a box of shape `dims` (axis 0 outermost).
pub fn row_major(coords: &[usize], dims: &[usize]) -> usize {
    coords.iter().zip(dims).fold(0usize, |acc, (&c, &d)| acc * d + c)
}

/// Inverse of [`row_major`].
pub fn unravel(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for axis in (0..dims.len()).rev() {
        out[axis] = index % dims[axis];
        index /= dims[axis];
    }
    out
}

/// All points of a box in row-major order.
pub fn box_points(dims: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = dims.iter().product();
    (0..total).map(move |i| unravel(i, dims))
}

/// Cyclic distance between two residues modulo `n`.
pub fn cyclic_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b) % n.max(1);
    d.min(n - d)
}
