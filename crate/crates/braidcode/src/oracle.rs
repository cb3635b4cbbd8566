//! Brute-force checks that rely only on encoding and multiset equality.

use std::collections::HashMap;

use crate::arith::lcm_all;
use crate::error::{Error, Result};
use crate::grid::{Codeword, ColorId, ColorMap, GridPoint};
use crate::params::Params;

pub const DEFAULT_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Distinguishable,
    /// Lexicographically-first pair of tags sharing a codeword.
    Counterexample(GridPoint, GridPoint),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Distinguishable)
    }
}

fn check_limit(map: &ColorMap, limit: usize) -> Result<usize> {
    let blocks = map.coding_area().len();
    if blocks > limit {
        return Err(Error::BoundExceeded { blocks, limit });
    }
    Ok(blocks)
}

/// Every (tag, codeword) pair of the coding area, in row-major tag order.
pub fn all_codewords(map: &ColorMap, limit: usize) -> Result<Vec<(GridPoint, Codeword)>> {
    check_limit(map, limit)?;
    Ok(map
        .coding_area()
        .map(|t| {
            let w = map.encode_unchecked(t.coords());
            (t, w)
        })
        .collect())
}

pub fn is_distinguishable(map: &ColorMap) -> Result<Verdict> {
    is_distinguishable_within(map, DEFAULT_LIMIT)
}

pub fn is_distinguishable_within(map: &ColorMap, limit: usize) -> Result<Verdict> {
    check_limit(map, limit)?;
    // Tags arrive in ascending order, so per codeword the first two are the smallest.
    let mut first_two: HashMap<Codeword, (usize, Option<usize>)> = HashMap::new();
    let tags: Vec<GridPoint> = map.coding_area().collect();
    for (k, t) in tags.iter().enumerate() {
        first_two
            .entry(map.encode_unchecked(t.coords()))
            .and_modify(|e| {
                if e.1.is_none() {
                    e.1 = Some(k);
                }
            })
            .or_insert((k, None));
    }
    let best = first_two.values().filter_map(|&(a, b)| b.map(|b| (a, b))).min();
    Ok(match best {
        None => Verdict::Distinguishable,
        Some((a, b)) => Verdict::Counterexample(tags[a].clone(), tags[b].clone()),
    })
}

pub fn count_colors(map: &ColorMap) -> usize {
    let mut used = vec![false; map.palette().len()];
    for &c in map.colors() {
        used[c] = true;
    }
    used.into_iter().filter(|&u| u).count()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StructureReport {
    /// Tags whose codeword repeats a color.
    pub repeated: Vec<GridPoint>,
    /// Pairs of points where color equality and the periodic class disagree.
    pub period: Vec<(GridPoint, GridPoint)>,
}

impl StructureReport {
    pub fn is_clean(&self) -> bool {
        self.repeated.is_empty() && self.period.is_empty()
    }
}

/// Class of a point: two points share a color exactly when their classes agree.
type ClassFn = Box<dyn Fn(&[usize]) -> Vec<usize>>;

fn unitary_classes(map: &ColorMap) -> Result<ClassFn> {
    match map.params() {
        Some(Params::Braid1d(r)) if r.is_unitary() && r.shift.is_none() && r.cstar.is_none() => {
            let m = r.block();
            let base = m * r.g * lcm_all(&r.q)?;
            if map.grid().dims() != [base] {
                return Err(Error::Unsupported("restricted map".into()));
            }
            let periods = r.lengths();
            Ok(Box::new(move |x: &[usize]| {
                let i = x[0] % m;
                vec![i, (x[0] / m) % periods[i]]
            }))
        }
        Some(Params::UnitaryBraidNd(r)) if r.target.is_none() => {
            let m = r.m.clone();
            let g = r.g;
            let q = r.q.clone();
            Ok(Box::new(move |x: &[usize]| {
                let j: Vec<usize> = x.iter().zip(&m).map(|(a, b)| a % b).collect();
                let k = crate::arith::row_major(&j, &m);
                let mut key = j.clone();
                for (axis, (&xi, &mi)) in x.iter().zip(&m).enumerate() {
                    key.push((xi / mi) % (g * q[axis][k]));
                }
                key
            }))
        }
        _ => Err(Error::Unsupported(
            "structure checks need a full-size unitary braid map".into(),
        )),
    }
}

/// Multiplicity-one codewords and the periodic color classes of unitary braid codes.
pub fn check_structure(map: &ColorMap, limit: usize) -> Result<StructureReport> {
    check_limit(map, limit)?;
    let class_of = unitary_classes(map)?;
    let mut report = StructureReport::default();
    for tag in map.coding_area() {
        let w = map.encode_unchecked(tag.coords());
        if w.colors().windows(2).any(|p| p[0] == p[1]) {
            report.repeated.push(tag);
        }
    }
    let mut by_class: HashMap<Vec<usize>, (ColorId, usize)> = HashMap::new();
    let mut by_color: HashMap<ColorId, (Vec<usize>, usize)> = HashMap::new();
    for idx in 0..map.grid().volume() {
        let p = map.grid().point_at(idx);
        let class = class_of(p.coords());
        let color = map.color_at(idx);
        match by_class.get(&class) {
            Some(&(c, first)) if c != color => {
                report.period.push((map.grid().point_at(first), p.clone()));
            }
            Some(_) => {}
            None => {
                by_class.insert(class.clone(), (color, idx));
            }
        }
        match by_color.get(&color) {
            Some((k, first)) if *k != class => {
                let pair = (map.grid().point_at(*first), p.clone());
                if !report.period.contains(&pair) {
                    report.period.push(pair);
                }
            }
            Some(_) => {}
            None => {
                by_color.insert(color, (class, idx));
            }
        }
    }
    Ok(report)
}
