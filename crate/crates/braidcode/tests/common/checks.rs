//! Structural identities shared by the structure tests and the acceptance run.

use std::collections::{BTreeSet, HashMap, HashSet};

use braidcode::braid1d::construct_auto;
use braidcode::braidnd::{
    self, construct_unitary_nd, extend_arbitrary_size, is_exceptional, product, project, UnitaryBraidParamsND,
};
use braidcode::codec::{associated_matrix, codeword_from_labels};
use braidcode::oracle::{all_codewords, check_structure, is_distinguishable};
use braidcode::params::Params;
use braidcode::sunmao::SunmaoDecomposition1D;
use braidcode::{BlockSpec, ColorMap, GridPoint, GridSpec};

fn line(colors: &[usize], block: usize) -> ColorMap {
    let k = colors.iter().max().unwrap() + 1;
    let labels: Vec<String> = (0..k).map(|c| c.to_string()).collect();
    ColorMap::from_labels(
        GridSpec::cyclic([colors.len()]).unwrap(),
        BlockSpec::new([block]).unwrap(),
        colors.to_vec(),
        &labels,
    )
    .unwrap()
}

pub fn decomposed_blocks_cover_the_block_once() {
    for parts in [vec![2, 3], vec![1, 1, 1], vec![3, 1, 2]] {
        let m: usize = parts.iter().sum();
        let d = SunmaoDecomposition1D::new(4 * m, &parts).unwrap();
        let mut seen = HashSet::new();
        for x in 0..d.size() {
            let subs = d.classify_block(x);
            assert_eq!(subs.len(), parts.len());
            let mut covered = BTreeSet::new();
            for s in &subs {
                let ml = parts[s.subgrid];
                let local = d.subgrid_sizes()[s.subgrid];
                for t in 0..ml {
                    covered.insert(d.theta_inverse(s.subgrid, (s.tag + t) % local));
                }
                assert_eq!(s.aligned, s.tag % ml == 0);
            }
            let block: BTreeSet<usize> = (x..x + m).map(|p| p % d.size()).collect();
            assert_eq!(covered, block, "parts {parts:?} x {x}");
            let key: Vec<usize> = subs.iter().map(|s| s.tag).collect();
            assert!(seen.insert(key), "two tags share a decomposition");
            assert!(subs.iter().filter(|s| !s.aligned).count() <= 1);
        }
    }
}

pub fn decomposition_cases_by_hand() {
    let d = SunmaoDecomposition1D::new(75, &[2, 3]).unwrap();
    let tags = |x| {
        d.classify_block(x)
            .iter()
            .map(|s| (s.tag, s.aligned))
            .collect::<Vec<_>>()
    };
    assert_eq!(tags(0), vec![(0, true), (0, true)]);
    assert_eq!(tags(2), vec![(2, true), (0, true)]);
    assert_eq!(tags(3), vec![(2, true), (1, false)]);
}

/// Local sequence of sub-grid i of a 1D braid map.
fn subgrid_sequence(map: &ColorMap, parts: &[usize], i: usize) -> Vec<usize> {
    let d = SunmaoDecomposition1D::new(map.grid().dims()[0], parts).unwrap();
    (0..d.subgrid_sizes()[i])
        .map(|y| map.color_at(d.theta_inverse(i, y)))
        .collect()
}

fn window(seq: &[usize], start: usize, len: usize) -> Vec<usize> {
    let mut w: Vec<usize> = (0..len).map(|t| seq[(start + t) % seq.len()]).collect();
    w.sort_unstable();
    w
}

pub fn equal_sub_block_images_sit_a_period_apart() {
    for which in 1..=3 {
        let map = super::code75(which);
        let Some(Params::Braid1d(r)) = map.params() else {
            unreachable!()
        };
        for (i, &mi) in r.parts.iter().enumerate() {
            let seq = subgrid_sequence(&map, &r.parts, i);
            let li = r.lengths()[i];
            let n = seq.len();
            for x in 0..n {
                for y in 0..n {
                    if window(&seq, x, mi) == window(&seq, y, mi) {
                        let dist = x.abs_diff(y).min(n - x.abs_diff(y));
                        assert_eq!(dist % li, 0, "75-point code {which} sub-grid {i}: {x} vs {y}");
                        if x % mi == 0 && y % mi == 0 {
                            assert_eq!(dist % (r.g * mi * r.q[i]), 0);
                        }
                    }
                }
            }
        }
    }
}

pub fn unitary_outputs_have_clean_structure() {
    for q in [vec![2, 3], vec![1, 2, 3], vec![3, 1], vec![2, 2]] {
        let map = construct_auto(&super::unitary_1d(2, &q)).unwrap();
        assert!(check_structure(&map, 10_000).unwrap().is_clean(), "q {q:?}");
    }
    let square = super::square24();
    assert!(check_structure(&square, 10_000).unwrap().is_clean());
    let single = construct_unitary_nd(&UnitaryBraidParamsND {
        m: vec![1, 1],
        g: 2,
        q: vec![vec![3], vec![2]],
    })
    .unwrap();
    assert!(check_structure(&single, 10_000).unwrap().is_clean());
}

pub fn corrupted_map_breaks_the_period() {
    let square = super::square24();
    let mut colors = square.colors().to_vec();
    // (0,0) lies in sub-grid (0,0), (0,1) in sub-grid (0,1).
    colors.swap(0, 1);
    let bad = ColorMap::new(
        square.grid().clone(),
        square.block().clone(),
        colors,
        square.palette().to_vec(),
        square.params().cloned(),
    )
    .unwrap();
    let report = check_structure(&bad, 10_000).unwrap();
    assert!(!report.period.is_empty());
    let first = &report.period[0];
    let touched = [GridPoint::from([0, 0]), GridPoint::from([0, 1])];
    assert!(touched.contains(&first.0) || touched.contains(&first.1), "{first:?}");
}

pub fn aligned_codewords_are_column_unions() {
    for map in [super::m24(), super::code75(1), super::code75(2), super::code75(3)] {
        let Some(Params::Braid1d(r)) = map.params() else {
            unreachable!()
        };
        let m = r.block();
        let offsets = r.offsets();
        let rows = map.grid().dims()[0] / m;
        for j in 0..rows {
            for (i, &d) in offsets.iter().enumerate() {
                let labels: Vec<usize> = (0..r.parts.len())
                    .map(|l| (if l < i { j + 1 } else { j }) % (r.g * r.q[l]))
                    .collect();
                let expected = codeword_from_labels(&map, &labels).unwrap();
                assert_eq!(map.encode(&GridPoint::from(j * m + d)).unwrap(), expected);
            }
        }
        let a = associated_matrix(&map).unwrap();
        for (i, row) in a.rows.iter().enumerate() {
            let period = r.g * r.q[i];
            assert!(row.iter().enumerate().all(|(j, &v)| v == row[j % period]));
            for p in 1..period {
                if period % p == 0 {
                    assert!(
                        row.iter().enumerate().any(|(j, &v)| v != row[j % p]),
                        "row {i} period {p}"
                    );
                }
            }
        }
    }
}

fn small_lines() -> Vec<(ColorMap, bool)> {
    vec![
        (line(&[0, 1, 2], 1), true),
        (line(&[0, 0, 1, 1, 2, 2], 2), true),
        (line(&[0, 1, 2, 3], 2), true),
        (line(&[0, 1, 0, 1], 2), false),
        (line(&[0, 0, 1], 1), false),
    ]
}

pub fn products_are_distinguishable_exactly_when_factors_are() {
    let lines = small_lines();
    for (a, a_ok) in &lines {
        assert_eq!(is_distinguishable(a).unwrap().is_ok(), *a_ok);
        for (b, b_ok) in &lines {
            let p = product(&[a.clone(), b.clone()]).unwrap();
            assert_eq!(is_distinguishable(&p).unwrap().is_ok(), *a_ok && *b_ok);
        }
    }
}

pub fn repetitive_tiling_equal_iff_periodic() {
    let gen = product(&[line(&[0, 1], 1), line(&[0, 1, 2, 3, 4, 5], 1)]).unwrap();
    let tiled = braidnd::nd_repetitive(&gen, &[6, 12]).unwrap();
    for a in 0..72 {
        for b in 0..72 {
            let (x, y) = (tiled.grid().point_at(a), tiled.grid().point_at(b));
            let periodic = (x.0[0] % 2 == y.0[0] % 2) && (x.0[1] % 6 == y.0[1] % 6);
            assert_eq!(tiled.color_at(a) == tiled.color_at(b), periodic);
        }
    }
}

pub fn projection_pins_the_coordinate() {
    for params in [
        super::square24_params(),
        UnitaryBraidParamsND {
            m: vec![2, 1],
            g: 2,
            q: vec![vec![1, 2], vec![3, 1]],
        },
    ] {
        let map = construct_unitary_nd(&params).unwrap();
        for axis in 0..2 {
            let mut owner: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
            for (tag, w) in all_codewords(&map, 10_000).unwrap() {
                let proj = project(&map, &w, axis).unwrap();
                let x = tag.0[axis];
                assert_eq!(*owner.entry(proj).or_insert(x), x, "axis {axis} tag {tag}");
            }
        }
    }
}

pub fn square24_corner_projection() {
    let map = super::square24();
    let w = map.encode(&GridPoint::from([0, 0])).unwrap();
    let firsts: Vec<(usize, usize)> = [[0, 0], [0, 1], [1, 0], [1, 1]]
        .iter()
        .enumerate()
        .map(|(k, p)| (k, map.palette()[map.color(p)].factors[0]))
        .collect();
    let mut expected = firsts;
    expected.sort_unstable();
    assert_eq!(project(&map, &w, 0).unwrap(), expected);
}

pub fn fresh_factors_appear_exactly_on_exceptional_tags() {
    let map = super::square24();
    for target in [[12, 24], [24, 12], [12, 14], [8, 18]] {
        let ext = extend_arbitrary_size(&map, &target).unwrap();
        assert!(ext.guaranteed);
        let Some(Params::UnitaryBraidNd(r)) = ext.map.params() else {
            unreachable!()
        };
        for (tag, w) in all_codewords(&ext.map, 10_000).unwrap() {
            for axis in 0..2 {
                let modified = target[axis] < 24;
                let fresh = w.colors().iter().any(|&c| {
                    let e = &ext.map.palette()[c];
                    let k = braidcode::arith::row_major(&e.subgrid, &r.m);
                    e.factors[axis] == r.g * r.q[axis][k]
                });
                let expected = modified && is_exceptional(r.m[axis], target[axis], tag.0[axis]);
                assert_eq!(fresh, expected, "target {target:?} tag {tag} axis {axis}");
            }
        }
        assert!(is_distinguishable(&ext.map).unwrap().is_ok());
    }
}

pub fn fresh_colors_are_distinct_per_axis_and_subgrid() {
    let map = super::square24();
    let ext = extend_arbitrary_size(&map, &[12, 12]).unwrap();
    let fresh = &ext.map.palette()[40..];
    let keys: HashSet<(Vec<usize>, Vec<usize>)> =
        fresh.iter().map(|e| (e.subgrid.clone(), e.factors.clone())).collect();
    assert_eq!(keys.len(), fresh.len());
    assert!(fresh.iter().all(|e| e.subgrid.iter().filter(|&&v| v != 0).count() <= 1));
}

pub fn restriction_theorem_sizes() {
    let mut passed = 0;
    for q in [vec![2, 3], vec![1, 3], vec![3, 4], vec![1, 2, 3]] {
        let base = construct_auto(&super::unitary_1d(2, &q)).unwrap();
        let full = base.grid().dims()[0];
        let m = q.len();
        for size in (m + 1..full).filter(|s| s % m != 0) {
            let r = braidcode::braid1d::restrict(&base, size).unwrap();
            assert!(r.guaranteed);
            assert!(is_distinguishable(&r.map).unwrap().is_ok(), "q {q:?} size {size}");
            passed += 1;
        }
    }
    assert!(passed >= 10);
}
