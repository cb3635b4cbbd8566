//! Acceptance run: one PASS/FAIL line per criterion. Tolerances are exact
//! unless a line says otherwise.

mod common;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use braidcode::arith::{lcm_all, row_major};
use braidcode::bench::order_bench;
use braidcode::braid1d::{construct_auto, restrict};
use braidcode::codec::{associated_matrix, b_matrix, codeword_from_labels, decode, erasure_bound, generalized_crt};
use braidcode::generator::{max_cyclic_length, max_length_by_search, min_colors};
use braidcode::oracle::{all_codewords, count_colors, is_distinguishable};
use braidcode::GridPoint;
use common::checks;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

const CODE75: [&str; 3] = [
    "a1a1b1b1b1 a2a2b2b2b2 a3a3b3b3b3 a1a1b1b1b6 a2a2b6b3b1 a3a3b5b5b2 a1a1b2b4b5 a2a2b3b5b3 a3a3b2b4b4 a1a1b3b3b6 a2a2b2b1b4 a3a3b1b4b6 a1a1b2b6b2 a2a2b5b1b4 a3a3b3b6b5",
    "a1a2b1b1b1 a3a1b2b2b2 a2a3b3b3b3 a1a2b1b1b6 a3a1b6b3b1 a2a3b5b5b2 a1a2b2b4b5 a3a1b3b5b3 a2a3b2b4b4 a1a2b3b3b6 a3a1b2b1b4 a2a3b1b4b6 a1a2b2b6b2 a3a1b5b1b4 a2a3b3b6b5",
    "a1a1b1b1b2 a2a2b2b3b1 a3a3b1b2b2 a4a4b3b1b1 a5a5b2b2b3 a1a3b1b1b2 a5a2b2b3b1 a4a1b1b2b2 a1a2b3b1b1 a2a3b2b2b3 a3a4b1b1b2 a4a5b2b3b1 a5a1b1b2b2 a3a5b3b1b1 a2a4b2b2b3",
];

fn golden_code75() -> Outcome {
    for (k, (expected, colors)) in CODE75.iter().zip([9, 9, 8]).enumerate() {
        let map = common::code75(k + 1);
        let want: String = expected.split_whitespace().collect();
        ensure(common::tokens(&map) == want, || {
            format!("code {} sequence differs", k + 1)
        })?;
        ensure(count_colors(&map) == colors, || {
            format!("code {} uses {} colors", k + 1, count_colors(&map))
        })?;
        let words: HashSet<_> = all_codewords(&map, 10_000)
            .unwrap()
            .into_iter()
            .map(|(_, w)| w)
            .collect();
        ensure(words.len() == 75, || {
            format!("code {} has {} distinct codewords", k + 1, words.len())
        })?;
        ensure(is_distinguishable(&map).unwrap().is_ok(), || {
            format!("code {} collides", k + 1)
        })?;
    }
    Ok(())
}

fn golden_square24() -> Outcome {
    let map = common::square24();
    ensure(count_colors(&map) == 40, || "color count".into())?;
    let mut sizes = [0usize; 4];
    for e in map.palette() {
        sizes[row_major(&e.subgrid, &[2, 2])] += 1;
    }
    ensure(sizes == [12, 8, 8, 12], || format!("palette sizes {sizes:?}"))?;
    let drawn = [
        ["a0", "b0", "a1", "b1"],
        ["c0", "d0", "c1", "d1"],
        ["a2", "b2", "a3", "b3"],
        ["c4", "d6", "c5", "d7"],
    ];
    let mut forward: HashMap<&str, usize> = HashMap::new();
    let mut backward: HashMap<usize, &str> = HashMap::new();
    for (r, row) in drawn.iter().enumerate() {
        for (c, &name) in row.iter().enumerate() {
            let id = map.color(&[r, c]);
            let letter = (name.as_bytes()[0] - b'a') as usize;
            ensure(row_major(&map.palette()[id].subgrid, &[2, 2]) == letter, || {
                format!("({r},{c}) palette")
            })?;
            ensure(*forward.entry(name).or_insert(id) == id, || {
                format!("{name} drawn twice apart")
            })?;
            ensure(*backward.entry(id).or_insert(name) == name, || {
                format!("({r},{c}) merges two drawn colors")
            })?;
        }
    }
    ensure(map.coding_area().len() == 576, || "coding area".into())?;
    ensure(is_distinguishable(&map).unwrap().is_ok(), || "collision".into())
}

fn matrices() -> Outcome {
    let map = common::m24();
    let a = associated_matrix(&map).unwrap();
    let want_a: Vec<Vec<usize>> = vec![(0..12).map(|j| j % 4).collect(), (0..12).map(|j| j % 6).collect()];
    ensure(a.rows == want_a, || format!("A = {:?}", a.rows))?;
    let b = b_matrix(&a, 2).unwrap();
    ensure(b.rows == vec![vec![0, 1, 0, 1, 0, 1], vec![0, 1, 2, 0, 1, 2]], || {
        format!("B = {:?}", b.rows)
    })?;
    let words: HashMap<_, _> = all_codewords(&map, 10_000)
        .unwrap()
        .into_iter()
        .map(|(t, w)| (w, t))
        .collect();
    for (labels, tag) in [([2, 2], 4), ([3, 2], 5), ([3, 3], 6), ([0, 3], 7)] {
        let w = codeword_from_labels(&map, &labels).unwrap();
        let got = decode(&map, &w).map_err(|e| format!("{labels:?}: {e}"))?;
        ensure(got.tag == GridPoint::from(tag), || {
            format!("{labels:?} decodes to {}", got.tag)
        })?;
        ensure(words[&w] == GridPoint::from(tag), || {
            format!("{labels:?} brute force disagrees")
        })?;
        let column = got.diagnostics[0].j / 2;
        ensure(b.rows.iter().all(|row| row[column] == 1), || {
            format!("{labels:?} uses B column {column}")
        })?;
    }
    Ok(())
}

fn round_trip_sweep() -> Outcome {
    let maps = common::decoder_sweep();
    ensure(maps.len() >= 20, || format!("only {} maps", maps.len()))?;
    let mut failures = 0;
    for (name, map) in &maps {
        ensure(map.coding_area().len() <= 10_000, || format!("{name} too large"))?;
        let dec = braidcode::codec::Decoder::new(map).map_err(|e| format!("{name}: {e}"))?;
        for (tag, w) in all_codewords(map, 10_000).unwrap() {
            if dec.decode(&w).map(|r| r.tag).as_ref() != Ok(&tag) {
                failures += 1;
            }
        }
    }
    ensure(failures == 0, || format!("{failures} tags fail to round-trip"))
}

fn negative_controls() -> Outcome {
    for (which, size) in [(1, 19), (3, 30)] {
        let cut = restrict(&common::code75(which), size).unwrap();
        ensure(!is_distinguishable(&cut.map).unwrap().is_ok(), || {
            format!("75-point code {which} at {size} passes")
        })?;
    }
    let mut passed = 0;
    for q in [vec![2, 3], vec![1, 3], vec![3, 4], vec![1, 2, 3]] {
        let base = construct_auto(&common::unitary_1d(2, &q)).unwrap();
        let m = q.len();
        for size in (m + 1..base.grid().dims()[0]).filter(|s| s % m != 0) {
            let r = restrict(&base, size).unwrap();
            ensure(is_distinguishable(&r.map).unwrap().is_ok(), || {
                format!("q {q:?} size {size} collides")
            })?;
            passed += 1;
        }
    }
    ensure(passed >= 10, || format!("only {passed} positive controls"))
}

fn closed_forms() -> Outcome {
    for m in 1..=3 {
        for k in 1.. {
            let value = max_cyclic_length(m, k).unwrap();
            if value > 12 {
                break;
            }
            let searched = max_length_by_search(m, k, 5_000_000).unwrap();
            ensure(searched == Some(value), || {
                format!("M_{m}({k}) = {value}, search {searched:?}")
            })?;
        }
    }
    for (m, k, want) in [(2, 3, 6), (2, 4, 8), (3, 3, 9)] {
        ensure(max_cyclic_length(m, k).unwrap() == want, || format!("M_{m}({k})"))?;
    }
    for (l, m, want) in [(6, 2, 3), (45, 3, 6), (3, 2, 3)] {
        let got = min_colors(m, l).unwrap().colors;
        ensure(got == want, || format!("K_{l}({m}) = {got}"))?;
    }
    Ok(())
}

fn crt() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (mut solved, mut inconsistent, mut shared) = (0, 0, 0);
    let mut cases = 0;
    while cases < 1000 {
        let n = rng.gen_range(1..=4);
        let moduli: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=60)).collect();
        let l = lcm_all(&moduli).unwrap();
        if l > 10_000 {
            continue;
        }
        cases += 1;
        let residues: Vec<usize> = moduli.iter().map(|&q| rng.gen_range(0..q)).collect();
        let scan = (0..l).find(|x| residues.iter().zip(&moduli).all(|(r, q)| x % q == *r));
        let got = generalized_crt(&residues, &moduli);
        ensure(got == scan, || {
            format!("{residues:?} mod {moduli:?}: {got:?} vs {scan:?}")
        })?;
        if moduli.iter().product::<usize>() != l {
            shared += 1;
        }
        if scan.is_some() {
            solved += 1;
        } else {
            inconsistent += 1;
        }
    }
    ensure(solved > 0 && inconsistent > 0 && shared > 0, || {
        format!("coverage: {solved} solved, {inconsistent} inconsistent, {shared} non-coprime")
    })
}

fn erasure() -> Outcome {
    let mut instances = 0;
    for (g, q) in [(2, vec![2, 3]), (3, vec![1, 2]), (2, vec![2, 3, 5]), (2, vec![1, 2, 3])] {
        let m = q.len();
        let base = construct_auto(&common::unitary_1d(g, &q)).unwrap();
        let full = base.grid().dims()[0];
        for e in BTreeSet::from([1, m - 1]) {
            let bound = erasure_bound(g, &q, e).unwrap();
            for size in m..=bound.min(full - 1) {
                let window = braidcode::braid1d::restrict_flat(&base, size).unwrap();
                let worst = common::worst_spread(&window, m - e);
                ensure(worst <= e, || format!("q {q:?} e {e} window {size}: spread {worst}"))?;
                instances += 1;
            }
        }
    }
    let full = construct_auto(&common::unitary_1d(2, &[2, 2])).unwrap();
    ensure(common::worst_spread(&full, 1) <= 1, || "full cyclic q=(2,2)".into())?;
    let oversized = common::worst_spread(&common::m24(), 1);
    ensure(oversized > 1, || format!("oversized instance spread {oversized}"))?;
    ensure(instances >= 20, || format!("only {instances} instances"))
}

fn scaling() -> Outcome {
    for m in [1, 2] {
        for row in order_bench(m, 1, 1..=3).unwrap() {
            let band = 1.0..=(4 * m) as f64;
            ensure(band.contains(&row.ratio), || {
                format!("m={m} s={} ratio {}", row.s, row.ratio)
            })?;
        }
    }
    let first = &order_bench(2, 1, 1..=1).unwrap()[0];
    ensure((first.side, first.colors) == (840, 34), || {
        format!(
            "n=1 m=2 s=1 gives L={} K={}, expected L=840 K=34",
            first.side, first.colors
        )
    })
}

fn structure() -> Outcome {
    let all: [(&str, fn()); 13] = [
        ("decomposition coverage", checks::decomposed_blocks_cover_the_block_once),
        ("decomposition cases", checks::decomposition_cases_by_hand),
        ("period divisibility", checks::equal_sub_block_images_sit_a_period_apart),
        ("clean unitary structure", checks::unitary_outputs_have_clean_structure),
        ("corruption detected", checks::corrupted_map_breaks_the_period),
        ("aligned column unions", checks::aligned_codewords_are_column_unions),
        (
            "product distinguishability",
            checks::products_are_distinguishable_exactly_when_factors_are,
        ),
        ("repetitive tiling", checks::repetitive_tiling_equal_iff_periodic),
        ("projection uniqueness", checks::projection_pins_the_coordinate),
        ("corner projection", checks::square24_corner_projection),
        (
            "exceptional tags",
            checks::fresh_factors_appear_exactly_on_exceptional_tags,
        ),
        ("fresh colors", checks::fresh_colors_are_distinct_per_axis_and_subgrid),
        ("restriction sizes", checks::restriction_theorem_sizes),
    ];
    for (name, check) in all {
        panic::catch_unwind(check).map_err(|_| format!("{name} failed"))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "golden 75-point sequences, counts 9/9/8, 75 distinct codewords each",
            golden_code75,
        ),
        (
            "golden 24x24 code: palette 12/8/8/12, drawn corner, 576 blocks",
            golden_square24,
        ),
        (
            "A and B matrices of the M=24 code, tags 4..7 via B column (1,1)",
            matrices,
        ),
        (
            "round-trip over the construction sweep, zero failures",
            round_trip_sweep,
        ),
        (
            "restriction negative controls and >= 10 positive controls",
            negative_controls,
        ),
        ("closed forms against exhaustive search", closed_forms),
        ("generalized CRT against scanning, 1000 seeded instances", crt),
        ("erasure spread <= e under the size bound, > e when oversized", erasure),
        ("prime-window ratio in [1, 4m] and the L=840 K=34 point", scaling),
        ("structural identities by exhaustive enumeration", structure),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(()) => println!("criterion {:>2} PASS  {name}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
