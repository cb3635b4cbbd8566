//! Small distinguishable component codes: closed-form color counts for m <= 3,
//! exhaustive search, a catalog of fixed sequences and repetitive extension.

use std::collections::HashSet;

use crate::arith::binomial;
use crate::error::{Error, Result};
use crate::grid::{BlockSpec, ColorId, ColorMap, GridSpec, PaletteEntry};
use crate::oracle;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// A cyclic code on G^c_l that is m-distinguishable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorCode {
    map: ColorMap,
}

impl GeneratorCode {
    /// Wraps a 1D cyclic map after confirming it with the oracle.
    pub fn new(map: ColorMap) -> Result<Self> {
        if map.grid().ndim() != 1 || !map.grid().is_cyclic() {
            return Err(Error::InvalidMap("generators live on 1D cyclic grids".into()));
        }
        match oracle::is_distinguishable(&map)? {
            oracle::Verdict::Distinguishable => Ok(GeneratorCode { map }),
            oracle::Verdict::Counterexample(a, b) => Err(Error::InvalidMap(format!(
                "generator is not distinguishable: tags {a} and {b} collide"
            ))),
        }
    }

    /// Builds from color indices 0..k; color `c` is labelled `{prefix}_{c+1}`.
    pub fn from_sequence(seq: &[usize], block: usize, prefix: &str) -> Result<Self> {
        let k = seq.iter().max().map_or(0, |&c| c + 1);
        let labels: Vec<String> = (1..=k).map(|c| format!("{prefix}_{c}")).collect();
        let map = ColorMap::from_labels(
            GridSpec::cyclic([seq.len()])?,
            BlockSpec::new([block])?,
            seq.to_vec(),
            &labels,
        )?;
        GeneratorCode::new(map)
    }

    /// The 1-distinguishable code using one color per point.
    pub fn injective(len: usize, prefix: &str) -> Result<Self> {
        let seq: Vec<usize> = (0..len).collect();
        let labels: Vec<String> = (0..len).map(|c| format!("{prefix}{c}")).collect();
        let map = ColorMap::from_labels(GridSpec::cyclic([len])?, BlockSpec::new([1])?, seq, &labels)?;
        Ok(GeneratorCode { map })
    }

    pub fn length(&self) -> usize {
        self.map.grid().dims()[0]
    }

    pub fn block(&self) -> usize {
        self.map.block().dims()[0]
    }

    pub fn colors(&self) -> usize {
        oracle::count_colors(&self.map)
    }

    pub fn map(&self) -> &ColorMap {
        &self.map
    }

    pub fn sequence(&self) -> &[ColorId] {
        self.map.colors()
    }

    /// Same code with labels `{prefix}_{c+1}`.
    pub fn relabel(&self, prefix: &str) -> GeneratorCode {
        let palette = self
            .map
            .palette()
            .iter()
            .map(|e| PaletteEntry::new(e.id, vec![], vec![], format!("{prefix}_{}", e.id + 1)))
            .collect();
        let map = ColorMap::new(
            self.map.grid().clone(),
            self.map.block().clone(),
            self.map.colors().to_vec(),
            palette,
            None,
        )
        .expect("relabelling keeps a valid map");
        GeneratorCode { map }
    }
}

const PHI2_45: [usize; 45] = [
    1, 1, 1, 2, 2, 2, 3, 3, 3, 1, 1, 6, 6, 3, 1, 5, 5, 2, 2, 4, 5, 3, 5, 3, 2, 4, 4, 3, 3, 6, 2, 1, 4, 1, 4, 6, 2, 6,
    2, 5, 1, 4, 3, 6, 5,
];

/// Names accepted by [`builtin`].
pub const CATALOG: [&str; 5] = [
    "ex1-gamma1-6",
    "ex1-gamma1-3",
    "ex1-phi2-45",
    "ex1-gamma1-15",
    "ex1-gamma2-5",
];

pub fn builtin(name: &str) -> Result<GeneratorCode> {
    let (seq, block, prefix): (&[usize], usize, &str) = match name {
        "ex1-gamma1-6" => (&[1, 1, 2, 2, 3, 3], 2, "a"),
        "ex1-gamma1-3" => (&[1, 2, 3], 2, "a"),
        "ex1-phi2-45" => (&PHI2_45, 3, "b"),
        "ex1-gamma1-15" => (&[1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 1, 3, 5, 2, 4], 2, "a"),
        "ex1-gamma2-5" => (&[1, 1, 2, 2, 3], 3, "b"),
        _ => return Err(Error::UnknownGenerator(name.to_string())),
    };
    let zero_based: Vec<usize> = seq.iter().map(|c| c - 1).collect();
    GeneratorCode::from_sequence(&zero_based, block, prefix)
}

/// Catalog entry of the given shape with the fewest colors.
pub fn builtin_for(len: usize, block: usize) -> Option<GeneratorCode> {
    CATALOG
        .iter()
        .filter_map(|n| builtin(n).ok())
        .filter(|g| g.length() == len && g.block() == block)
        .min_by_key(|g| g.colors())
}

/// Largest l admitting an m-distinguishable code on G^c_l with k colors.
pub fn max_cyclic_length(m: usize, k: usize) -> Result<usize> {
    if m == 0 || k == 0 {
        return Err(Error::InvalidParams(vec!["m>=1".into(), "k>=1".into()]));
    }
    match (m, k) {
        (1, _) => Ok(k),
        // Exhaustive search beats the closed form at these two points.
        (2, 2) => Ok(1),
        (3, 2) => Ok(2),
        (2, _) => {
            let b = binomial(k + 1, 2)?;
            Ok(if k.is_multiple_of(2) { b - k / 2 } else { b })
        }
        (3, _) => {
            let b = binomial(k + 2, 3)?;
            Ok(if k.is_multiple_of(3) { b - k / 3 } else { b })
        }
        _ => Err(Error::Unsupported(format!(
            "no closed form for m={m}; use search_distinguishable"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinColors {
    pub colors: usize,
    /// False when the count is only an upper bound found by search.
    pub exact: bool,
}

/// Smallest k with C(k+m-1, m) >= l: distinct codewords need distinct multisets.
pub fn multiset_lower_bound(m: usize, len: usize) -> Result<usize> {
    let mut k = 1;
    while binomial(k + m - 1, m)? < len {
        k += 1;
    }
    Ok(k)
}

/// Minimal number of colors for an m-distinguishable code on G^c_l.
pub fn min_colors(m: usize, len: usize) -> Result<MinColors> {
    if m == 0 || len == 0 {
        return Err(Error::InvalidParams(vec!["m>=1".into(), "l>=1".into()]));
    }
    if m == 1 {
        return Ok(MinColors {
            colors: len,
            exact: true,
        });
    }
    if m <= 3 && len >= m + 2 {
        let mut k = 1;
        while max_cyclic_length(m, k)? < len {
            k += 1;
        }
        return Ok(MinColors { colors: k, exact: true });
    }
    let mut exact = true;
    for k in multiset_lower_bound(m, len)?..=len.max(1) {
        match search_distinguishable(len, m, k, DEFAULT_BUDGET)? {
            SearchOutcome::Found(_) => return Ok(MinColors { colors: k, exact }),
            SearchOutcome::NotFound => {}
            SearchOutcome::Inconclusive => exact = false,
        }
    }
    Err(Error::Infeasible(format!(
        "no {m}-distinguishable code exists on a cyclic grid of size {len}"
    )))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Box<GeneratorCode>),
    /// The whole tree was explored; no code exists.
    NotFound,
    /// The node budget ran out first.
    Inconclusive,
}

enum Step {
    Found,
    Exhausted,
    OutOfBudget,
}

struct Dfs {
    len: usize,
    block: usize,
    colors: usize,
    budget: u64,
    nodes: u64,
    seq: Vec<usize>,
    seen: HashSet<Vec<usize>>,
}

impl Dfs {
    fn key(&self, x: usize) -> Vec<usize> {
        let mut w: Vec<usize> = (0..self.block).map(|t| self.seq[(x + t) % self.len]).collect();
        w.sort_unstable();
        w
    }

    fn go(&mut self, p: usize, used: usize) -> Step {
        if p == self.len {
            let start = if self.block <= self.len {
                self.len - self.block + 1
            } else {
                0
            };
            let mut extra = HashSet::new();
            for x in start..self.len {
                let k = self.key(x);
                if self.seen.contains(&k) || !extra.insert(k) {
                    return Step::Exhausted;
                }
            }
            return Step::Found;
        }
        let top = if p == 0 { 0 } else { used.min(self.colors - 1) };
        for c in 0..=top {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Step::OutOfBudget;
            }
            self.seq[p] = c;
            let closes = self.block <= self.len && p + 1 >= self.block;
            let key = closes.then(|| self.key(p + 1 - self.block));
            if let Some(k) = &key {
                if self.seen.contains(k) {
                    continue;
                }
                self.seen.insert(k.clone());
            }
            let step = self.go(p + 1, used.max(c + 1));
            if let Some(k) = &key {
                self.seen.remove(k);
            }
            match step {
                Step::Exhausted => {}
                other => return other,
            }
        }
        Step::Exhausted
    }
}

/// Lexicographically-first code (restricted-growth colors, Φ(0)=0) on G^c_l
/// using at most k colors.
pub fn search_distinguishable(len: usize, block: usize, colors: usize, budget: u64) -> Result<SearchOutcome> {
    if len == 0 || block == 0 || colors == 0 {
        return Err(Error::InvalidParams(vec!["l, m, k >= 1".into()]));
    }
    let mut dfs = Dfs {
        len,
        block,
        colors,
        budget,
        nodes: 0,
        seq: vec![0; len],
        seen: HashSet::new(),
    };
    Ok(match dfs.go(0, 0) {
        Step::Found => SearchOutcome::Found(Box::new(GeneratorCode::from_sequence(&dfs.seq, block, "a")?)),
        Step::Exhausted => SearchOutcome::NotFound,
        Step::OutOfBudget => SearchOutcome::Inconclusive,
    })
}

/// Largest l <= C(k+m-1, m) for which search finds a code; None if the budget ran out.
pub fn max_length_by_search(m: usize, k: usize, budget: u64) -> Result<Option<usize>> {
    let cap = binomial(k + m - 1, m)?;
    let mut best = 0;
    for len in 1..=cap {
        match search_distinguishable(len, m, k, budget)? {
            SearchOutcome::Found(_) => best = len,
            SearchOutcome::NotFound => {}
            SearchOutcome::Inconclusive => return Ok(None),
        }
    }
    Ok(Some(best))
}

/// Φ(x) = Γ(x mod l) on G^c_M.
pub fn repetitive_extend(gen: &GeneratorCode, size: usize) -> Result<ColorMap> {
    let len = gen.length();
    if size == 0 || !size.is_multiple_of(len) {
        return Err(Error::Divisibility {
            what: "generator length must divide grid size",
            divisor: len,
            value: size,
        });
    }
    let colors = (0..size).map(|x| gen.sequence()[x % len]).collect();
    ColorMap::new(
        GridSpec::cyclic([size])?,
        gen.map().block().clone(),
        colors,
        gen.map().palette().to_vec(),
        None,
    )
}
