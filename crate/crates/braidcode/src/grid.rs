//! Grid geometry: points, blocks, coding areas, multiset codewords and color maps.
//!
//! Points are linearized row-major with axis 0 outermost. All indices are 0-based.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{product, row_major, unravel};
use crate::error::{Error, Result};
use crate::params::Params;

pub type ColorId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GridWire", into = "GridWire")]
pub struct GridSpec {
    dims: Vec<usize>,
    cyclic: bool,
    volume: usize,
}

#[derive(Serialize, Deserialize)]
struct GridWire {
    #[serde(rename = "M")]
    dims: Vec<usize>,
    cyclic: bool,
}

impl TryFrom<GridWire> for GridSpec {
    type Error = Error;
    fn try_from(w: GridWire) -> Result<Self> {
        GridSpec::new(w.dims, w.cyclic)
    }
}

impl From<GridSpec> for GridWire {
    fn from(g: GridSpec) -> Self {
        GridWire {
            dims: g.dims,
            cyclic: g.cyclic,
        }
    }
}

impl GridSpec {
    pub fn new(dims: Vec<usize>, cyclic: bool) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidGrid("a grid needs at least one axis".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidGrid(format!("zero-length axis in {dims:?}")));
        }
        let volume = product(&dims).map_err(|_| Error::Overflow("grid volume"))?;
        Ok(GridSpec { dims, cyclic, volume })
    }

    pub fn cyclic(dims: impl Into<Vec<usize>>) -> Result<Self> {
        Self::new(dims.into(), true)
    }

    pub fn flat(dims: impl Into<Vec<usize>>) -> Result<Self> {
        Self::new(dims.into(), false)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn volume(&self) -> usize {
        self.volume
    }

    pub fn index_of(&self, coords: &[usize]) -> usize {
        row_major(coords, &self.dims)
    }

    pub fn point_at(&self, index: usize) -> GridPoint {
        GridPoint(unravel(index, &self.dims))
    }

    pub fn contains(&self, coords: &[usize]) -> bool {
        coords.len() == self.dims.len() && coords.iter().zip(&self.dims).all(|(c, d)| c < d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BlockWire", into = "BlockWire")]
pub struct BlockSpec {
    dims: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct BlockWire {
    m: Vec<usize>,
}

impl TryFrom<BlockWire> for BlockSpec {
    type Error = Error;
    fn try_from(w: BlockWire) -> Result<Self> {
        BlockSpec::new(w.m)
    }
}

impl From<BlockSpec> for BlockWire {
    fn from(b: BlockSpec) -> Self {
        BlockWire { m: b.dims }
    }
}

impl BlockSpec {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidGrid(format!("bad block {dims:?}")));
        }
        product(&dims).map_err(|_| Error::Overflow("block volume"))?;
        Ok(BlockSpec { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn volume(&self) -> usize {
        self.dims.iter().product()
    }

    fn check_against(&self, grid: &GridSpec) -> Result<()> {
        if self.dims.len() != grid.ndim() {
            return Err(Error::DimensionMismatch {
                expected: grid.ndim(),
                got: self.dims.len(),
            });
        }
        if !grid.is_cyclic() && self.dims.iter().zip(grid.dims()).any(|(m, g)| m > g) {
            return Err(Error::InvalidGrid(format!(
                "flat block {:?} exceeds grid {:?}",
                self.dims,
                grid.dims()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridPoint(pub Vec<usize>);

impl GridPoint {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }
}

impl From<usize> for GridPoint {
    fn from(x: usize) -> Self {
        GridPoint(vec![x])
    }
}

impl From<Vec<usize>> for GridPoint {
    fn from(v: Vec<usize>) -> Self {
        GridPoint(v)
    }
}

impl<const N: usize> From<[usize; N]> for GridPoint {
    fn from(v: [usize; N]) -> Self {
        GridPoint(v.to_vec())
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

impl FromStr for GridPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let coords = parse_list(trimmed)?;
        if coords.is_empty() {
            return Err(Error::InvalidGrid(format!("empty point {s:?}")));
        }
        Ok(GridPoint(coords))
    }
}

pub(crate) fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::InvalidGrid(format!("not a non-negative integer: {t:?}")))
        })
        .collect()
}

/// Multiset of color ids kept sorted ascending; equal multisets compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Codeword(Vec<ColorId>);

impl Codeword {
    pub fn new(mut colors: Vec<ColorId>) -> Self {
        colors.sort_unstable();
        Codeword(colors)
    }

    pub fn colors(&self) -> &[ColorId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, color: ColorId) -> usize {
        self.0.iter().filter(|&&c| c == color).count()
    }

    /// Multiset inclusion `other ⊆ self`.
    pub fn contains(&self, other: &Codeword) -> bool {
        let mut i = 0;
        for &c in &other.0 {
            while i < self.0.len() && self.0[i] < c {
                i += 1;
            }
            if i == self.0.len() || self.0[i] != c {
                return false;
            }
            i += 1;
        }
        true
    }

    /// Size of the multiset symmetric difference.
    pub fn symmetric_difference(&self, other: &Codeword) -> usize {
        let (mut i, mut j, mut diff) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => {
                    diff += 1;
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    diff += 1;
                    j += 1;
                }
            }
        }
        diff + (self.0.len() - i) + (other.0.len() - j)
    }
}

impl From<Vec<ColorId>> for Codeword {
    fn from(v: Vec<ColorId>) -> Self {
        Codeword::new(v)
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Codeword {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(Codeword::new(parse_list(s)?))
    }
}

/// Tags `x` with `0 <= x <= M - m` on flat grids, the whole grid when cyclic.
pub fn coding_area(grid: &GridSpec, block: &BlockSpec) -> CodingArea {
    let shape: Vec<usize> = if grid.is_cyclic() {
        grid.dims().to_vec()
    } else {
        grid.dims()
            .iter()
            .zip(block.dims())
            .map(|(&g, &m)| (g + 1).saturating_sub(m))
            .collect()
    };
    let total = shape.iter().product();
    CodingArea { shape, next: 0, total }
}

#[derive(Debug, Clone)]
pub struct CodingArea {
    shape: Vec<usize>,
    next: usize,
    total: usize,
}

impl CodingArea {
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }
}

impl Iterator for CodingArea {
    type Item = GridPoint;
    fn next(&mut self) -> Option<GridPoint> {
        if self.next >= self.total {
            return None;
        }
        let p = unravel(self.next, &self.shape);
        self.next += 1;
        Some(GridPoint(p))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.total - self.next;
        (n, Some(n))
    }
}

impl ExactSizeIterator for CodingArea {}

pub fn in_coding_area(grid: &GridSpec, block: &BlockSpec, tag: &[usize]) -> bool {
    if !grid.contains(tag) {
        return false;
    }
    grid.is_cyclic()
        || tag
            .iter()
            .zip(block.dims())
            .zip(grid.dims())
            .all(|((&x, &m), &g)| x + m <= g)
}

/// Points of the block tagged at `tag`, in row-major offset order.
pub fn block_points(grid: &GridSpec, block: &BlockSpec, tag: &GridPoint) -> Result<Vec<GridPoint>> {
    block.check_against(grid)?;
    if tag.0.len() != grid.ndim() {
        return Err(Error::DimensionMismatch {
            expected: grid.ndim(),
            got: tag.0.len(),
        });
    }
    let tag: Vec<usize> = if grid.is_cyclic() {
        tag.0.iter().zip(grid.dims()).map(|(x, g)| x % g).collect()
    } else {
        tag.0.clone()
    };
    if !in_coding_area(grid, block, &tag) {
        return Err(Error::OutOfCodingArea(tag));
    }
    Ok(block_indices(grid, block, &tag)
        .into_iter()
        .map(|i| grid.point_at(i))
        .collect())
}

/// Linear indices of a block's points; `tag` must already lie in the coding area.
pub(crate) fn block_indices(grid: &GridSpec, block: &BlockSpec, tag: &[usize]) -> Vec<usize> {
    let dims = grid.dims();
    let m = block.dims();
    let mut out = Vec::with_capacity(block.volume());
    let mut offset = vec![0usize; m.len()];
    loop {
        let idx = tag
            .iter()
            .zip(&offset)
            .zip(dims)
            .fold(0usize, |acc, ((&x, &o), &d)| acc * d + (x + o) % d);
        out.push(idx);
        let mut axis = m.len();
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            offset[axis] += 1;
            if offset[axis] < m[axis] {
                break;
            }
            offset[axis] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaletteEntry {
    pub id: ColorId,
    pub subgrid: Vec<usize>,
    pub factors: Vec<usize>,
    pub label: String,
}

impl PaletteEntry {
    pub fn new(id: ColorId, subgrid: Vec<usize>, factors: Vec<usize>, label: impl Into<String>) -> Self {
        PaletteEntry {
            id,
            subgrid,
            factors,
            label: label.into(),
        }
    }
}

/// A total color function on a grid plus its palette and construction record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorMap {
    grid: GridSpec,
    block: BlockSpec,
    colors: Vec<ColorId>,
    palette: Vec<PaletteEntry>,
    params: Option<Params>,
}

#[derive(Serialize, Deserialize)]
struct MapWire {
    version: u32,
    grid: GridSpec,
    block: BlockSpec,
    colors: Vec<ColorId>,
    palette: Vec<PaletteEntry>,
    params: Option<Params>,
}

type SubgridOf = Box<dyn Fn(&[usize]) -> Vec<usize>>;

impl ColorMap {
    /// Palette ids must be dense: `palette[k].id == k`.
    pub fn new(
        grid: GridSpec,
        block: BlockSpec,
        colors: Vec<ColorId>,
        palette: Vec<PaletteEntry>,
        params: Option<Params>,
    ) -> Result<Self> {
        block.check_against(&grid)?;
        if colors.len() != grid.volume() {
            return Err(Error::InvalidMap(format!(
                "{} colors for a grid of volume {}",
                colors.len(),
                grid.volume()
            )));
        }
        if let Some((k, e)) = palette.iter().enumerate().find(|(k, e)| e.id != *k) {
            return Err(Error::InvalidMap(format!(
                "palette entry {k} carries id {}; ids must be dense and ordered",
                e.id
            )));
        }
        if let Some(&c) = colors.iter().find(|&&c| c >= palette.len()) {
            return Err(Error::InvalidMap(format!("color {c} missing from palette")));
        }
        Ok(ColorMap {
            grid,
            block,
            colors,
            palette,
            params,
        })
    }

    /// A map whose palette is just `0..k` with the given labels.
    pub fn from_labels(grid: GridSpec, block: BlockSpec, colors: Vec<ColorId>, labels: &[String]) -> Result<Self> {
        let palette = labels
            .iter()
            .enumerate()
            .map(|(k, l)| PaletteEntry::new(k, vec![], vec![], l.clone()))
            .collect();
        ColorMap::new(grid, block, colors, palette, None)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn block(&self) -> &BlockSpec {
        &self.block
    }

    pub fn colors(&self) -> &[ColorId] {
        &self.colors
    }

    pub fn palette(&self) -> &[PaletteEntry] {
        &self.palette
    }

    pub fn params(&self) -> Option<&Params> {
        self.params.as_ref()
    }

    pub fn with_params(mut self, params: Option<Params>) -> Self {
        self.params = params;
        self
    }

    pub fn color_at(&self, index: usize) -> ColorId {
        self.colors[index]
    }

    pub fn color(&self, point: &[usize]) -> ColorId {
        self.colors[self.grid.index_of(point)]
    }

    pub fn label(&self, id: ColorId) -> &str {
        &self.palette[id].label
    }

    /// Labels of the colors in row-major point order.
    pub fn labels(&self) -> Vec<&str> {
        self.colors.iter().map(|&c| self.label(c)).collect()
    }

    pub fn coding_area(&self) -> CodingArea {
        coding_area(&self.grid, &self.block)
    }

    pub fn encode(&self, tag: &GridPoint) -> Result<Codeword> {
        if tag.0.len() != self.grid.ndim() || !in_coding_area(&self.grid, &self.block, &tag.0) {
            return Err(Error::OutOfCodingArea(tag.0.clone()));
        }
        Ok(self.encode_unchecked(&tag.0))
    }

    pub(crate) fn encode_unchecked(&self, tag: &[usize]) -> Codeword {
        Codeword::new(
            block_indices(&self.grid, &self.block, tag)
                .into_iter()
                .map(|i| self.colors[i])
                .collect(),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        let wire = MapWire {
            version: 1,
            grid: self.grid.clone(),
            block: self.block.clone(),
            colors: self.colors.clone(),
            palette: self.palette.clone(),
            params: self.params.clone(),
        };
        Ok(serde_json::to_string(&wire)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: MapWire = serde_json::from_str(text)?;
        if wire.version != 1 {
            return Err(Error::InvalidMap(format!("unsupported version {}", wire.version)));
        }
        let map = ColorMap::new(wire.grid, wire.block, wire.colors, wire.palette, wire.params)?;
        if let Some(v) = map.partition_violations().first() {
            return Err(Error::InvalidMap(format!(
                "point {} carries a color from another sub-grid",
                v
            )));
        }
        Ok(map)
    }

    /// Points whose color belongs to a different sub-grid than the point itself.
    /// Only meaningful when params describe a sunmao-style construction; fresh
    /// colors (empty sub-grid) and shifted maps are exempt.
    pub fn partition_violations(&self) -> Vec<GridPoint> {
        let expected: SubgridOf = match &self.params {
            Some(Params::Braid1d(r)) if r.shift.is_none() => {
                let m = r.block();
                let offsets = r.offsets();
                Box::new(move |x: &[usize]| {
                    let rem = x[0] % m;
                    vec![offsets.iter().rposition(|&d| d <= rem).unwrap_or(0)]
                })
            }
            Some(Params::Sunmao(r)) => {
                let m: usize = r.parts.iter().sum();
                let offsets = r.offsets.clone();
                Box::new(move |x: &[usize]| {
                    let rem = x[0] % m;
                    vec![offsets.iter().rposition(|&d| d <= rem).unwrap_or(0)]
                })
            }
            Some(Params::UnitaryBraidNd(r)) => {
                let m = r.m.clone();
                Box::new(move |x: &[usize]| x.iter().zip(&m).map(|(a, b)| a % b).collect())
            }
            _ => return Vec::new(),
        };
        (0..self.grid.volume())
            .filter_map(|i| {
                let entry = &self.palette[self.colors[i]];
                if entry.subgrid.is_empty() {
                    return None;
                }
                let p = self.grid.point_at(i);
                (expected(&p.0) != entry.subgrid).then_some(p)
            })
            .collect()
    }
}
