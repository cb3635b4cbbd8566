//! One-dimensional braid codes: parameter checks, construction from generators,
//! generator-list optimization and the arbitrary-size variants.

use std::collections::HashMap;

use crate::arith::{divisors, gcd, lcm, lcm_all};
use crate::error::{Error, Result};
use crate::generator::{self, GeneratorCode, SearchOutcome};
use crate::grid::{ColorId, ColorMap, GridSpec, PaletteEntry};
use crate::params::{Braid1dRecord, Params};
use crate::sunmao::SunmaoDecomposition1D;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BraidClass {
    /// Every c_i = m_i.
    One,
    /// Every c_i = 1.
    Two,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidParams1D {
    pub size: usize,
    pub parts: Vec<usize>,
    pub g: usize,
    pub c: Vec<usize>,
    pub q: Vec<usize>,
}

impl BraidParams1D {
    pub fn block(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.c.iter().zip(&self.q).map(|(c, q)| self.g * c * q).collect()
    }

    pub fn lcm_q(&self) -> Result<usize> {
        lcm_all(&self.q)
    }

    pub fn class(&self) -> BraidClass {
        if self.c.iter().zip(&self.parts).all(|(c, m)| c == m) {
            BraidClass::One
        } else if self.c.iter().all(|&c| c == 1) {
            BraidClass::Two
        } else {
            BraidClass::Mixed
        }
    }

    /// Every violated condition, named with 1-based part indices.
    pub fn validate(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let count = self.parts.len();
        if count < 2 {
            bad.push("I>=2".to_string());
        }
        if self.c.len() != count || self.q.len() != count {
            bad.push("len(c)=len(q)=I".to_string());
            return bad;
        }
        if self.g <= 1 {
            bad.push("g>1".to_string());
        }
        for i in 0..count {
            let (m, c, q) = (self.parts[i], self.c[i], self.q[i]);
            let k = i + 1;
            if m == 0 {
                bad.push(format!("m_{k}>=1"));
                continue;
            }
            if q == 0 {
                bad.push(format!("q_{k}>=1"));
                continue;
            }
            if c == 0 || m % c != 0 {
                bad.push(format!("c_{k}|m_{k}"));
                continue;
            }
            let len = self.g * c * q;
            if gcd(m, len) != c {
                bad.push(format!("gcd(m_{k},l_{k})=c_{k}"));
            }
            if self.g * c <= m {
                bad.push(format!("g*c_{k}>m_{k}"));
            }
        }
        if !bad.is_empty() {
            return bad;
        }
        let m = self.block();
        let expected = lcm_all(&self.q).ok().and_then(|big_q| big_q.checked_mul(m * self.g));
        if expected != Some(self.size) {
            bad.push("M=m*g*Q".to_string());
            return bad;
        }
        for (i, len) in self.lengths().into_iter().enumerate() {
            let sub = self.parts[i] * self.size / m;
            if !sub.is_multiple_of(len) {
                bad.push(format!("l_{}|M_{}", i + 1, i + 1));
            }
        }
        bad
    }

    fn record(&self, generators: Vec<Vec<ColorId>>) -> Braid1dRecord {
        Braid1dRecord {
            g: self.g,
            parts: self.parts.clone(),
            c: self.c.clone(),
            q: self.q.clone(),
            shift: None,
            cstar: None,
            generators,
        }
    }

    pub fn from_record(size: usize, r: &Braid1dRecord) -> Self {
        BraidParams1D {
            size,
            parts: r.parts.clone(),
            g: r.g,
            c: r.c.clone(),
            q: r.q.clone(),
        }
    }
}

pub(crate) fn part_prefix(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("s{i}")
    }
}

/// Repetitive extension of each generator followed by sunmao synthesis.
pub fn construct(params: &BraidParams1D, gens: &[GeneratorCode]) -> Result<ColorMap> {
    let bad = params.validate();
    if !bad.is_empty() {
        return Err(Error::InvalidParams(bad));
    }
    if gens.len() != params.parts.len() {
        return Err(Error::SizeMismatch(format!(
            "{} generators for {} parts",
            gens.len(),
            params.parts.len()
        )));
    }
    let lengths = params.lengths();
    for (i, gen) in gens.iter().enumerate() {
        if gen.length() != lengths[i] || gen.block() != params.parts[i] {
            return Err(Error::SizeMismatch(format!(
                "generator {} has (l, m) = ({}, {}), expected ({}, {})",
                i + 1,
                gen.length(),
                gen.block(),
                lengths[i],
                params.parts[i]
            )));
        }
    }
    let dec = SunmaoDecomposition1D::new(params.size, &params.parts)?;
    let submaps = gens
        .iter()
        .zip(dec.subgrid_sizes())
        .map(|(g, &size)| generator::repetitive_extend(g, size))
        .collect::<Result<Vec<_>>>()?;
    let map = dec.synthesize(&submaps)?;
    let mut base = 0;
    let mut globals = Vec::with_capacity(gens.len());
    for g in gens {
        globals.push(g.sequence().iter().map(|c| base + c).collect());
        base += g.map().palette().len();
    }
    Ok(map.with_params(Some(Params::Braid1d(params.record(globals)))))
}

/// A generator for each part: catalog entry, injective code for m_i = 1,
/// or the first search hit starting from the minimal color count.
pub fn generators_for(params: &BraidParams1D) -> Result<Vec<GeneratorCode>> {
    params
        .lengths()
        .into_iter()
        .zip(&params.parts)
        .enumerate()
        .map(|(i, (len, &m))| generator_for(len, m).map(|g| g.relabel(&part_prefix(i))))
        .collect()
}

pub fn generator_for(len: usize, m: usize) -> Result<GeneratorCode> {
    if let Some(g) = generator::builtin_for(len, m) {
        return Ok(g);
    }
    if m == 1 {
        let seq: Vec<usize> = (0..len).collect();
        return GeneratorCode::from_sequence(&seq, 1, "a");
    }
    let start = generator::min_colors(m, len)?.colors;
    for k in start..=start + 2 {
        if let SearchOutcome::Found(g) = generator::search_distinguishable(len, m, k, generator::DEFAULT_BUDGET)? {
            return Ok(*g);
        }
    }
    Err(Error::Unsupported(format!(
        "no generator of length {len} for block {m} is in the catalog or within the search budget"
    )))
}

pub fn construct_auto(params: &BraidParams1D) -> Result<ColorMap> {
    let bad = params.validate();
    if !bad.is_empty() {
        return Err(Error::InvalidParams(bad));
    }
    construct(params, &generators_for(params)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassFilter {
    Any,
    One,
    Two,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimized {
    pub params: BraidParams1D,
    /// Sum of per-generator color counts.
    pub cost: usize,
    /// False when some part has m_i > 3 and its count is a lower-bound heuristic.
    pub exact: bool,
}

#[derive(Clone, Copy)]
struct PartOption {
    c: usize,
    q: usize,
    len: usize,
    cost: usize,
}

type Key = (usize, Vec<usize>, usize, Vec<usize>, Vec<usize>);

struct Optimizer<'a> {
    parts: &'a [usize],
    g: usize,
    big_q: usize,
    options: Vec<Vec<PartOption>>,
    min_rest: Vec<usize>,
    chosen: Vec<PartOption>,
    best: Option<(Key, Vec<PartOption>)>,
}

impl Optimizer<'_> {
    fn canonical(&self, picks: &[PartOption]) -> Vec<PartOption> {
        let mut out = picks.to_vec();
        let mut start = 0;
        while start < out.len() {
            let mut end = start + 1;
            while end < out.len() && self.parts[end] == self.parts[start] {
                end += 1;
            }
            out[start..end].sort_by_key(|o| (o.len, o.c, o.q));
            start = end;
        }
        out
    }

    fn key(&self, picks: &[PartOption]) -> Key {
        let cost = picks.iter().map(|o| o.cost).sum();
        let mut lens: Vec<usize> = picks.iter().map(|o| o.len).collect();
        lens.sort_unstable();
        (
            cost,
            lens,
            self.g,
            picks.iter().map(|o| o.c).collect(),
            picks.iter().map(|o| o.q).collect(),
        )
    }

    fn go(&mut self, i: usize, cost: usize, acc_lcm: usize) {
        if let Some((best, _)) = &self.best {
            if cost + self.min_rest[i] > best.0 {
                return;
            }
        }
        if i == self.parts.len() {
            if acc_lcm != self.big_q {
                return;
            }
            let picks = self.canonical(&self.chosen);
            let key = self.key(&picks);
            if self.best.as_ref().is_none_or(|(b, _)| key < *b) {
                self.best = Some((key, picks));
            }
            return;
        }
        for k in 0..self.options[i].len() {
            let opt = self.options[i][k];
            let next = lcm(acc_lcm, opt.q).unwrap_or(usize::MAX);
            self.chosen.push(opt);
            self.go(i + 1, cost + opt.cost, next);
            self.chosen.pop();
        }
    }
}

fn part_cost(cache: &mut HashMap<(usize, usize), (usize, bool)>, m: usize, len: usize) -> Result<(usize, bool)> {
    if let Some(&v) = cache.get(&(m, len)) {
        return Ok(v);
    }
    let v = if m <= 3 {
        let r = generator::min_colors(m, len)?;
        (r.colors, r.exact)
    } else {
        (generator::multiset_lower_bound(m, len)?, false)
    };
    cache.insert((m, len), v);
    Ok(v)
}

/// Cheapest valid (g, c, q) by total generator color count. Ties go to the
/// smallest sorted length list, then the smallest g.
pub fn optimize_generators(size: usize, parts: &[usize], class: ClassFilter) -> Result<Optimized> {
    if parts.len() < 2 || parts.contains(&0) {
        return Err(Error::InvalidParams(vec!["I>=2".into()]));
    }
    let m: usize = parts.iter().sum();
    if size == 0 || !size.is_multiple_of(m) {
        return Err(Error::Divisibility {
            what: "block size must divide grid size",
            divisor: m,
            value: size,
        });
    }
    let rows = size / m;
    let mut cache = HashMap::new();
    let mut best: Option<(Key, BraidParams1D, bool)> = None;
    for g in divisors(rows).into_iter().filter(|&g| g >= 2) {
        let big_q = rows / g;
        let mut options = Vec::with_capacity(parts.len());
        let mut exact = true;
        for &mi in parts {
            let mut opts = Vec::new();
            for c in divisors(mi) {
                let allowed = match class {
                    ClassFilter::Any => true,
                    ClassFilter::One => c == mi,
                    ClassFilter::Two => c == 1,
                };
                if !allowed || g * c <= mi {
                    continue;
                }
                for q in divisors(big_q) {
                    if gcd(mi / c, g * q) != 1 {
                        continue;
                    }
                    let len = g * c * q;
                    let (cost, ex) = part_cost(&mut cache, mi, len)?;
                    exact &= ex;
                    opts.push(PartOption { c, q, len, cost });
                }
            }
            opts.sort_by_key(|o| (o.cost, o.len));
            options.push(opts);
        }
        if options.iter().any(|o| o.is_empty()) {
            continue;
        }
        let mut min_rest = vec![0; parts.len() + 1];
        for i in (0..parts.len()).rev() {
            min_rest[i] = min_rest[i + 1] + options[i][0].cost;
        }
        let mut opt = Optimizer {
            parts,
            g,
            big_q,
            options,
            min_rest,
            chosen: Vec::new(),
            best: None,
        };
        opt.go(0, 0, 1);
        if let Some((key, picks)) = opt.best {
            if best.as_ref().is_none_or(|(b, _, _)| key < *b) {
                let params = BraidParams1D {
                    size,
                    parts: parts.to_vec(),
                    g,
                    c: picks.iter().map(|o| o.c).collect(),
                    q: picks.iter().map(|o| o.q).collect(),
                };
                best = Some((key, params, exact));
            }
        }
    }
    let (key, params, exact) =
        best.ok_or_else(|| Error::Infeasible(format!("no braid parameters for M={size} with parts {parts:?}")))?;
    Ok(Optimized {
        params,
        cost: key.0,
        exact,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub map: ColorMap,
    /// True when distinguishability follows from the restriction theorem alone.
    pub guaranteed: bool,
}

fn braid_record(map: &ColorMap) -> Result<&Braid1dRecord> {
    match map.params() {
        Some(Params::Braid1d(r)) if map.grid().ndim() == 1 && map.grid().is_cyclic() => Ok(r),
        _ => Err(Error::Unsupported("expected a cyclic 1D braid map".into())),
    }
}

fn base_size(r: &Braid1dRecord) -> Result<usize> {
    Ok(r.block() * r.g * lcm_all(&r.q)?)
}

fn is_full_unitary(map: &ColorMap, r: &Braid1dRecord) -> Result<bool> {
    Ok(r.is_unitary() && r.shift.is_none() && r.cstar.is_none() && map.grid().dims()[0] == base_size(r)?)
}

fn truncated(map: &ColorMap, size: usize, cyclic: bool) -> Result<ColorMap> {
    ColorMap::new(
        GridSpec::new(vec![size], cyclic)?,
        map.block().clone(),
        map.colors()[..size].to_vec(),
        map.palette().to_vec(),
        map.params().cloned(),
    )
}

/// Pointwise restriction to 0..M_r-1, read cyclically.
pub fn restrict(map: &ColorMap, size: usize) -> Result<Restriction> {
    if map.grid().ndim() != 1 || !map.grid().is_cyclic() {
        return Err(Error::Unsupported("restriction needs a cyclic 1D map".into()));
    }
    let full = map.grid().dims()[0];
    if size == 0 || size > full {
        return Err(Error::InvalidGrid(format!("cannot restrict size {full} to {size}")));
    }
    let m = map.block().dims()[0];
    let guaranteed = match map.params() {
        Some(Params::Braid1d(r)) => is_full_unitary(map, r)? && !size.is_multiple_of(m) && size > m,
        _ => false,
    };
    Ok(Restriction {
        map: truncated(map, size, true)?,
        guaranteed,
    })
}

/// Pointwise restriction to a flat window of length M_r.
pub fn restrict_flat(map: &ColorMap, size: usize) -> Result<ColorMap> {
    if map.grid().ndim() != 1 {
        return Err(Error::Unsupported("restriction needs a 1D map".into()));
    }
    let full = map.grid().dims()[0];
    let m = map.block().dims()[0];
    if size < m || size > full {
        return Err(Error::InvalidGrid(format!(
            "flat window {size} must lie between {m} and {full}"
        )));
    }
    truncated(map, size, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CStarMode {
    /// Reuse c* = Φ((J-1)m); unitary codes only.
    Existing,
    /// Introduce one new color for the overwritten points.
    Fresh,
}

/// Shift, restrict to M_r = J*m and overwrite the tail of the last aligned block.
pub fn modify_general_size(map: &ColorMap, size: usize, mode: CStarMode) -> Result<ColorMap> {
    let r = braid_record(map)?;
    if r.shift.is_some() || map.grid().dims()[0] != base_size(r)? {
        return Err(Error::Unsupported("map is already restricted or modified".into()));
    }
    if mode == CStarMode::Existing && !r.is_unitary() {
        return Err(Error::Unsupported(
            "reusing an existing color needs a unitary code; use a fresh color".into(),
        ));
    }
    let full = map.grid().dims()[0];
    let m = r.block();
    if !size.is_multiple_of(m) {
        return Err(Error::Divisibility {
            what: "modification needs m | M_r",
            divisor: m,
            value: size,
        });
    }
    if size > full {
        return Err(Error::InvalidGrid(format!("cannot shrink size {full} to {size}")));
    }
    let rows = size / m;
    if rows < 2 {
        return Err(Error::Infeasible("no distinguishable code exists when M_r = m".into()));
    }
    if size == full {
        return Ok(map.clone());
    }
    let last = (rows - 1) * m;
    let shift = (0..full)
        .find(|&j| map.color_at(j) != map.color_at((last + j) % full))
        .ok_or_else(|| Error::Infeasible("no shift separates the aligned blocks".into()))?;
    let mut colors: Vec<ColorId> = (0..size).map(|x| map.color_at((x + shift) % full)).collect();
    let mut palette = map.palette().to_vec();
    let cstar = match mode {
        CStarMode::Existing => colors[last],
        CStarMode::Fresh => {
            let id = palette.len();
            palette.push(PaletteEntry::new(id, vec![], vec![], "c*"));
            id
        }
    };
    for color in colors.iter_mut().take(last + m).skip(last + 1) {
        *color = cstar;
    }
    let mut record = r.clone();
    record.shift = Some(shift);
    record.cstar = Some(cstar);
    ColorMap::new(
        GridSpec::cyclic([size])?,
        map.block().clone(),
        colors,
        palette,
        Some(Params::Braid1d(record)),
    )
}
