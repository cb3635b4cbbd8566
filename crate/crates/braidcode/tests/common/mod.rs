//! Fixtures shared by the integration tests.
#![allow(dead_code)]

pub mod checks;

use std::collections::BTreeSet;

use braidcode::braid1d::{
    construct, construct_auto, modify_general_size, optimize_generators, restrict, restrict_flat, BraidParams1D,
    CStarMode, ClassFilter,
};
use braidcode::braidnd::{construct_unitary_nd, extend_arbitrary_size, UnitaryBraidParamsND};
use braidcode::codec::{erasure_decode, spread};
use braidcode::generator::builtin;
use braidcode::oracle::all_codewords;
use braidcode::{Codeword, ColorMap, GridPoint};

pub fn m24_params() -> BraidParams1D {
    BraidParams1D {
        size: 24,
        parts: vec![1, 1],
        g: 2,
        c: vec![1, 1],
        q: vec![2, 3],
    }
}

pub fn m24() -> ColorMap {
    construct_auto(&m24_params()).unwrap()
}

/// The three codes on 75 points with parts (2,3), built from the catalog generators.
pub fn code75(which: usize) -> ColorMap {
    let (g, c, q, gens) = match which {
        1 => (3, [2, 3], [1, 5], ["ex1-gamma1-6", "ex1-phi2-45"]),
        2 => (3, [1, 3], [1, 5], ["ex1-gamma1-3", "ex1-phi2-45"]),
        3 => (5, [1, 1], [3, 1], ["ex1-gamma1-15", "ex1-gamma2-5"]),
        _ => panic!("the 75-point codes are numbered 1 to 3"),
    };
    let params = BraidParams1D {
        size: 75,
        parts: vec![2, 3],
        g,
        c: c.to_vec(),
        q: q.to_vec(),
    };
    let gens: Vec<_> = gens.iter().map(|n| builtin(n).unwrap()).collect();
    construct(&params, &gens).unwrap()
}

pub fn square24_params() -> UnitaryBraidParamsND {
    UnitaryBraidParamsND {
        m: vec![2, 2],
        g: 2,
        q: vec![vec![1, 1, 2, 3], vec![3, 2, 1, 1]],
    }
}

pub fn square24() -> ColorMap {
    construct_unitary_nd(&square24_params()).unwrap()
}

/// Unitary 1D parameters with the given q and g, sized M = m*g*lcm(q).
pub fn unitary_1d(g: usize, q: &[usize]) -> BraidParams1D {
    let m = q.len();
    let big_q = q.iter().fold(1, |a, &b| a / braidcode::arith::gcd(a, b) * b);
    BraidParams1D {
        size: m * g * big_q,
        parts: vec![1; m],
        g,
        c: vec![1; m],
        q: q.to_vec(),
    }
}

/// Compact token string ("a1a1b1") of a 1D map.
pub fn tokens(map: &ColorMap) -> String {
    map.colors().iter().map(|&c| map.label(c).replace('_', "")).collect()
}

/// Maps from every construction family: 1D classes, restrictions,
/// modifications, n-D unitary and n-D extended.
pub fn decoder_sweep() -> Vec<(String, ColorMap)> {
    let mut maps = Vec::new();
    for which in 1..=3 {
        maps.push((format!("75-point code {which}"), code75(which)));
    }
    for q in [vec![2, 3], vec![1, 2, 3], vec![3, 4], vec![2, 2, 3]] {
        maps.push((format!("unitary q={q:?}"), construct_auto(&unitary_1d(2, &q)).unwrap()));
    }
    maps.push(("unitary g=3".into(), construct_auto(&unitary_1d(3, &[1, 2])).unwrap()));
    for (size, parts) in [(48, vec![2, 2]), (60, vec![3, 2]), (72, vec![1, 2])] {
        let best = optimize_generators(size, &parts, ClassFilter::Any).unwrap();
        maps.push((
            format!("optimized {size} {parts:?}"),
            construct_auto(&best.params).unwrap(),
        ));
    }
    let m24 = m24();
    for size in [7, 13, 19] {
        maps.push((format!("restricted {size}"), restrict(&m24, size).unwrap().map));
    }
    maps.push(("flat 17".into(), restrict_flat(&m24, 17).unwrap()));
    for size in [6, 10, 16] {
        maps.push((
            format!("modified {size}"),
            modify_general_size(&m24, size, CStarMode::Existing).unwrap(),
        ));
    }
    for (which, size) in [(1, 30), (3, 30), (2, 45)] {
        let base = code75(which);
        maps.push((
            format!("75-point code {which} modified to {size}"),
            modify_general_size(&base, size, CStarMode::Fresh).unwrap(),
        ));
    }
    maps.push(("square24".into(), square24()));
    maps.push((
        "3d".into(),
        construct_unitary_nd(&UnitaryBraidParamsND::isotropic(vec![2, 1, 1], 2, vec![1, 2])).unwrap(),
    ));
    for target in [[12, 24], [19, 24], [10, 16]] {
        let ext = extend_arbitrary_size(&square24(), &target).unwrap();
        maps.push((format!("square24 extended {target:?}"), ext.map));
    }
    maps
}

/// Every size-`keep` sub-multiset of every codeword, decoded and compared
/// with a full scan. Returns the worst spread.
pub fn worst_spread(map: &ColorMap, keep: usize) -> usize {
    let words = all_codewords(map, 10_000).unwrap();
    let modulus = map.grid().is_cyclic().then(|| map.grid().dims()[0]);
    let mut worst = 0;
    for (_, w) in &words {
        let mut seen = BTreeSet::new();
        for mask in 0u32..(1 << w.len()) {
            if mask.count_ones() as usize != keep {
                continue;
            }
            let part: Vec<usize> = (0..w.len())
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| w.colors()[b])
                .collect();
            let partial = Codeword::new(part);
            if !seen.insert(partial.clone()) {
                continue;
            }
            let expected: Vec<GridPoint> = words
                .iter()
                .filter(|(_, v)| v.contains(&partial))
                .map(|(t, _)| t.clone())
                .collect();
            let got = erasure_decode(map, &partial).unwrap();
            assert_eq!(got.candidates, expected, "partial {partial}");
            let tags: Vec<usize> = expected.iter().map(|t| t.0[0]).collect();
            assert_eq!(got.resolution, spread(&tags, modulus));
            worst = worst.max(got.resolution);
        }
    }
    worst
}
