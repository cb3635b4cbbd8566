//! Product codes, n-D repetitive codes, n-D unitary braid codes and their
//! extension to arbitrary grid sizes with fresh factor colors.

use std::collections::{BTreeMap, HashMap};

use crate::arith::{self, box_points, lcm_all, row_major, unravel};
use crate::braid1d::part_prefix;
use crate::error::{Error, Result};
use crate::grid::{BlockSpec, Codeword, ColorId, ColorMap, GridSpec, PaletteEntry};
use crate::params::{Params, UnitaryNdRecord};

/// Composite map whose color at x is the tuple of per-axis colors.
/// Tuples are interned row-major over the factor palettes.
pub fn product(maps: &[ColorMap]) -> Result<ColorMap> {
    if maps.is_empty() {
        return Err(Error::InvalidGrid("a product needs at least one factor".into()));
    }
    for map in maps {
        if map.grid().ndim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: map.grid().ndim(),
            });
        }
    }
    let dims: Vec<usize> = maps.iter().map(|m| m.grid().dims()[0]).collect();
    let block: Vec<usize> = maps.iter().map(|m| m.block().dims()[0]).collect();
    let cyclic = maps.iter().all(|m| m.grid().is_cyclic());
    let sizes: Vec<usize> = maps.iter().map(|m| m.palette().len()).collect();
    let total = arith::product(&sizes)?;
    let palette = (0..total)
        .map(|id| {
            let f = unravel(id, &sizes);
            let label = f
                .iter()
                .zip(maps)
                .map(|(&c, m)| m.label(c).to_string())
                .collect::<Vec<_>>()
                .join(",");
            PaletteEntry::new(id, vec![], f, format!("({label})"))
        })
        .collect();
    let grid = GridSpec::new(dims.clone(), cyclic)?;
    let colors = (0..grid.volume())
        .map(|idx| {
            let x = unravel(idx, &dims);
            let f: Vec<usize> = x.iter().zip(maps).map(|(&xi, m)| m.color_at(xi)).collect();
            row_major(&f, &sizes)
        })
        .collect();
    ColorMap::new(grid, BlockSpec::new(block)?, colors, palette, None)
}

/// Multiset of the axis-th factor colors of a codeword. A factor color is the
/// pair (row-major sub-grid index, factor value), since each sub-grid has its
/// own factor alphabet; plain product maps use sub-grid 0.
pub fn project(map: &ColorMap, word: &Codeword, axis: usize) -> Result<Vec<(usize, usize)>> {
    let n = map.grid().ndim();
    if axis >= n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: axis + 1,
        });
    }
    let block = map.block().dims();
    let mut out = Vec::with_capacity(word.len());
    for &c in word.colors() {
        let entry = map
            .palette()
            .get(c)
            .ok_or_else(|| Error::InvalidMap(format!("color {c} missing from palette")))?;
        if entry.factors.len() != n {
            return Err(Error::Unsupported("palette carries no factor structure".into()));
        }
        let k = if entry.subgrid.len() == n {
            row_major(&entry.subgrid, block)
        } else {
            0
        };
        out.push((k, entry.factors[axis]));
    }
    out.sort_unstable();
    Ok(out)
}

/// Φ(x) = Γ(x mod l) componentwise.
pub fn nd_repetitive(gen: &ColorMap, dims: &[usize]) -> Result<ColorMap> {
    let lens = gen.grid().dims();
    if lens.len() != dims.len() {
        return Err(Error::DimensionMismatch {
            expected: lens.len(),
            got: dims.len(),
        });
    }
    for (&l, &d) in lens.iter().zip(dims) {
        if d == 0 || d % l != 0 {
            return Err(Error::Divisibility {
                what: "generator side must divide grid side",
                divisor: l,
                value: d,
            });
        }
    }
    let grid = GridSpec::cyclic(dims.to_vec())?;
    let colors = (0..grid.volume())
        .map(|idx| {
            let x: Vec<usize> = unravel(idx, dims).iter().zip(lens).map(|(a, l)| a % l).collect();
            gen.color(&x)
        })
        .collect();
    ColorMap::new(grid, gen.block().clone(), colors, gen.palette().to_vec(), None)
}

/// `q[i][k]` is q^(i)_J for the k-th sub-grid J in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitaryBraidParamsND {
    pub m: Vec<usize>,
    pub g: usize,
    pub q: Vec<Vec<usize>>,
}

impl UnitaryBraidParamsND {
    pub fn ndim(&self) -> usize {
        self.m.len()
    }

    pub fn subgrid_count(&self) -> usize {
        self.m.iter().product()
    }

    pub fn validate(&self) -> Vec<String> {
        let mut bad = Vec::new();
        if self.m.is_empty() {
            bad.push("n>=1".to_string());
            return bad;
        }
        if self.m.contains(&0) {
            bad.push("m_i>=1".to_string());
            return bad;
        }
        if self.g <= 1 {
            bad.push("g>1".to_string());
        }
        let count = match arith::product(&self.m) {
            Ok(c) => c,
            Err(_) => {
                bad.push("volume of m overflows".to_string());
                return bad;
            }
        };
        if self.q.len() != self.m.len() || self.q.iter().any(|row| row.len() != count) {
            bad.push("q table has one entry per axis and sub-grid".to_string());
            return bad;
        }
        if self.q.iter().flatten().any(|&q| q == 0) {
            bad.push("q>=1".to_string());
        }
        if bad.is_empty() && self.dims().is_err() {
            bad.push("grid size overflows".to_string());
        }
        bad
    }

    /// M_i = g * m_i * Q_i.
    pub fn dims(&self) -> Result<Vec<usize>> {
        self.q
            .iter()
            .zip(&self.m)
            .map(|(row, &mi)| {
                lcm_all(row)?
                    .checked_mul(self.g * mi)
                    .ok_or(Error::Overflow("grid side"))
            })
            .collect()
    }

    /// Generator side lengths g*q^(i)_J of sub-grid k.
    pub fn lengths(&self, k: usize) -> Vec<usize> {
        self.q.iter().map(|row| self.g * row[k]).collect()
    }

    /// g^n * sum over J of prod_i q^(i)_J.
    pub fn color_count(&self) -> usize {
        (0..self.subgrid_count())
            .map(|k| self.lengths(k).iter().product::<usize>())
            .sum()
    }

    pub fn record(&self, target: Option<Vec<usize>>) -> UnitaryNdRecord {
        UnitaryNdRecord {
            m: self.m.clone(),
            g: self.g,
            q: self.q.clone(),
            target,
        }
    }

    pub fn from_record(r: &UnitaryNdRecord) -> Self {
        UnitaryBraidParamsND {
            m: r.m.clone(),
            g: r.g,
            q: r.q.clone(),
        }
    }

    /// Same q on every axis for sub-grid k.
    pub fn isotropic(m: Vec<usize>, g: usize, q: Vec<usize>) -> Self {
        let n = m.len();
        UnitaryBraidParamsND { m, g, q: vec![q; n] }
    }
}

fn unitary_palette(p: &UnitaryBraidParamsND) -> (Vec<PaletteEntry>, Vec<usize>) {
    let mut palette = Vec::new();
    let mut base = Vec::with_capacity(p.subgrid_count());
    for k in 0..p.subgrid_count() {
        base.push(palette.len());
        let j = unravel(k, &p.m);
        let lens = p.lengths(k);
        let prefix = part_prefix(k);
        for (local, f) in box_points(&lens).enumerate() {
            palette.push(PaletteEntry::new(
                palette.len(),
                j.clone(),
                f,
                format!("{prefix}_{local}"),
            ));
        }
    }
    (palette, base)
}

/// Sub-grid J = x mod m carries the injective product code on Z_{g q^(1)_J} x ...,
/// tiled over the sub-grid coordinates x div m.
pub fn construct_unitary_nd(p: &UnitaryBraidParamsND) -> Result<ColorMap> {
    let bad = p.validate();
    if !bad.is_empty() {
        return Err(Error::InvalidParams(bad));
    }
    let dims = p.dims()?;
    let grid = GridSpec::cyclic(dims.clone())?;
    let (palette, base) = unitary_palette(p);
    let lens: Vec<Vec<usize>> = (0..p.subgrid_count()).map(|k| p.lengths(k)).collect();
    let mut colors = Vec::with_capacity(grid.volume());
    for idx in 0..grid.volume() {
        let x = unravel(idx, &dims);
        let j: Vec<usize> = x.iter().zip(&p.m).map(|(a, b)| a % b).collect();
        let k = row_major(&j, &p.m);
        let f: Vec<usize> = x
            .iter()
            .zip(&p.m)
            .zip(&lens[k])
            .map(|((a, b), l)| (a / b) % l)
            .collect();
        colors.push(base[k] + row_major(&f, &lens[k]));
    }
    ColorMap::new(
        grid,
        BlockSpec::new(p.m.clone())?,
        colors,
        palette,
        Some(Params::UnitaryBraidNd(p.record(None))),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub map: ColorMap,
    /// False when some axis is shrunk by plain restriction, which can collide.
    pub guaranteed: bool,
}

/// Axis i is modified (fresh factors) when m_i | L_i < M_i.
pub fn modified_axes(m: &[usize], dims: &[usize], target: &[usize]) -> Vec<bool> {
    m.iter()
        .zip(dims)
        .zip(target)
        .map(|((&mi, &big), &l)| l < big && l % mi == 0)
        .collect()
}

/// Whether x_i lies in the band where blocks meet fresh factors along axis i.
pub fn is_exceptional(m: usize, target: usize, x: usize) -> bool {
    let rows = target / m;
    x + m > (rows - 1) * m && x < target
}

/// Shrink a unitary braid map on M to L, axis by axis. Axes with m_i | L_i get
/// fresh i-th factors on the last aligned band of the sub-grids (l; 0,...,0).
pub fn extend_arbitrary_size(map: &ColorMap, target: &[usize]) -> Result<Extension> {
    let p = match map.params() {
        Some(Params::UnitaryBraidNd(r)) if r.target.is_none() => UnitaryBraidParamsND::from_record(r),
        _ => return Err(Error::Unsupported("expected a full-size unitary braid map".into())),
    };
    let dims = map.grid().dims().to_vec();
    let n = dims.len();
    if target.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: target.len(),
        });
    }
    for i in 0..n {
        if target[i] > dims[i] {
            return Err(Error::InvalidGrid(format!(
                "target side {} exceeds grid side {} on axis {}",
                target[i],
                dims[i],
                i + 1
            )));
        }
        if target[i] < 2 * p.m[i] {
            return Err(Error::Infeasible(format!(
                "target side {} is below 2*m_{} = {}",
                target[i],
                i + 1,
                2 * p.m[i]
            )));
        }
    }
    let modified = modified_axes(&p.m, &dims, target);
    let guaranteed = (0..n).all(|i| target[i] == dims[i] || modified[i]);
    let grid = GridSpec::cyclic(target.to_vec())?;

    // Final factor tuple of every point; new tuples are interned afterwards.
    let mut tuples: Vec<(usize, Vec<usize>)> = Vec::with_capacity(grid.volume());
    let mut fresh: BTreeMap<(usize, usize, Vec<usize>), ()> = BTreeMap::new();
    for idx in 0..grid.volume() {
        let x = unravel(idx, target);
        let base = map.color(&x);
        let entry = &map.palette()[base];
        let k = row_major(&entry.subgrid, &p.m);
        let mut f = entry.factors.clone();
        let mut last_axis = None;
        for i in 0..n {
            if !modified[i] {
                continue;
            }
            let rows = target[i] / p.m[i];
            let others_zero = entry.subgrid.iter().enumerate().all(|(a, &v)| a == i || v == 0);
            if x[i] / p.m[i] == rows - 1 && others_zero {
                f[i] = p.g * p.q[i][k];
                last_axis = Some(i);
            }
        }
        if let Some(axis) = last_axis {
            fresh.insert((axis, k, f.clone()), ());
        }
        tuples.push((k, f));
    }
    let mut palette = map.palette().to_vec();
    let mut lookup: HashMap<(usize, Vec<usize>), ColorId> = palette
        .iter()
        .map(|e| ((row_major(&e.subgrid, &p.m), e.factors.clone()), e.id))
        .collect();
    for (axis, k, f) in fresh.into_keys() {
        let id = palette.len();
        let shown: Vec<String> = f
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v == p.g * p.q[i][k] {
                    format!("d{}", i + 1)
                } else {
                    v.to_string()
                }
            })
            .collect();
        let _ = axis;
        palette.push(PaletteEntry::new(
            id,
            unravel(k, &p.m),
            f.clone(),
            format!("{}[{}]", part_prefix(k), shown.join(",")),
        ));
        lookup.insert((k, f), id);
    }
    let colors = tuples.into_iter().map(|key| lookup[&key]).collect();
    let out = ColorMap::new(
        grid,
        map.block().clone(),
        colors,
        palette,
        Some(Params::UnitaryBraidNd(p.record(Some(target.to_vec())))),
    )?;
    Ok(Extension { map: out, guaranteed })
}
