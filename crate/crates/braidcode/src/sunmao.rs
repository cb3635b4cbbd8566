//! Sunmao decompositions: residue bands mod m split a cyclic grid into smaller
//! cyclic sub-grids, and per-sub-grid maps are stitched back together.

use std::collections::HashSet;

use crate::arith::{product, row_major, unravel};
use crate::error::{Error, Result};
use crate::grid::{BlockSpec, ColorMap, GridSpec, PaletteEntry};
use crate::params::{Params, SunmaoRecord};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SunmaoDecomposition1D {
    size: usize,
    block: usize,
    parts: Vec<usize>,
    offsets: Vec<usize>,
    subgrid_sizes: Vec<usize>,
}

/// One piece of a decomposed block: an `m_i`-block of sub-grid `subgrid`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubBlockTag {
    pub subgrid: usize,
    pub tag: usize,
    pub aligned: bool,
}

impl SunmaoDecomposition1D {
    pub fn new(size: usize, parts: &[usize]) -> Result<Self> {
        if parts.len() < 2 {
            return Err(Error::InvalidParams(vec!["I>=2".into()]));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidParams(vec!["m_i>=1".into()]));
        }
        let block: usize = parts.iter().sum();
        if size == 0 || !size.is_multiple_of(block) {
            return Err(Error::Divisibility {
                what: "block size must divide grid size",
                divisor: block,
                value: size,
            });
        }
        let rows = size / block;
        let mut offsets = Vec::with_capacity(parts.len());
        let mut acc = 0;
        for &p in parts {
            offsets.push(acc);
            acc += p;
        }
        Ok(SunmaoDecomposition1D {
            size,
            block,
            parts: parts.to_vec(),
            offsets,
            subgrid_sizes: parts.iter().map(|&p| p * rows).collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn subgrid_sizes(&self) -> &[usize] {
        &self.subgrid_sizes
    }

    pub fn count(&self) -> usize {
        self.parts.len()
    }

    /// Sub-grid index of a point, from its residue mod m.
    pub fn subgrid_of(&self, x: usize) -> usize {
        let rem = x % self.block;
        self.offsets.iter().rposition(|&d| d <= rem).unwrap_or(0)
    }

    /// x = j*m + d_i + r  maps to  j*m_i + r.
    pub fn theta(&self, i: usize, x: usize) -> Result<usize> {
        if x >= self.size || self.subgrid_of(x) != i {
            return Err(Error::NotInSubgrid { point: x, subgrid: i });
        }
        let (j, rem) = (x / self.block, x % self.block);
        Ok(j * self.parts[i] + rem - self.offsets[i])
    }

    pub fn theta_inverse(&self, i: usize, y: usize) -> usize {
        let (j, r) = (y / self.parts[i], y % self.parts[i]);
        j * self.block + self.offsets[i] + r
    }

    /// The I sub-blocks a block at `x` decomposes into, ordered by sub-grid.
    pub fn classify_block(&self, x: usize) -> Vec<SubBlockTag> {
        let x = x % self.size;
        let (j, rem) = (x / self.block, x % self.block);
        let start = self.subgrid_of(x);
        let r = rem - self.offsets[start];
        (0..self.count())
            .map(|l| {
                let ml = self.parts[l];
                let modulus = self.subgrid_sizes[l];
                if l == start && r > 0 {
                    SubBlockTag {
                        subgrid: l,
                        tag: j * ml + r,
                        aligned: false,
                    }
                } else {
                    let row = if l < start { j + 1 } else { j };
                    SubBlockTag {
                        subgrid: l,
                        tag: (row * ml) % modulus,
                        aligned: true,
                    }
                }
            })
            .collect()
    }

    /// Stitch per-sub-grid maps into one map on the whole grid.
    pub fn synthesize(&self, submaps: &[ColorMap]) -> Result<ColorMap> {
        if submaps.len() != self.count() {
            return Err(Error::SizeMismatch(format!(
                "{} sub-maps for {} sub-grids",
                submaps.len(),
                self.count()
            )));
        }
        let mut palette = Vec::new();
        let mut base = Vec::with_capacity(submaps.len());
        let mut seen = HashSet::new();
        for (i, sub) in submaps.iter().enumerate() {
            if sub.grid().dims() != [self.subgrid_sizes[i]] {
                return Err(Error::SizeMismatch(format!(
                    "sub-map {i} has grid {:?}, expected [{}]",
                    sub.grid().dims(),
                    self.subgrid_sizes[i]
                )));
            }
            base.push(palette.len());
            for entry in sub.palette() {
                if !seen.insert(entry.label.clone()) {
                    return Err(Error::PaletteOverlap(entry.label.clone()));
                }
                palette.push(PaletteEntry::new(
                    palette.len(),
                    vec![i],
                    vec![entry.id],
                    entry.label.clone(),
                ));
            }
        }
        let colors = (0..self.size)
            .map(|x| {
                let i = self.subgrid_of(x);
                let y = self.theta(i, x).expect("x lies in its own sub-grid");
                base[i] + submaps[i].color_at(y)
            })
            .collect();
        ColorMap::new(
            GridSpec::cyclic([self.size])?,
            BlockSpec::new([self.block])?,
            colors,
            palette,
            Some(Params::Sunmao(SunmaoRecord {
                parts: self.parts.clone(),
                offsets: self.offsets.clone(),
            })),
        )
    }
}

/// Unitary decomposition of an n-D cyclic grid: sub-grid J collects the points
/// with x mod m = J, and each is a copy of the grid of dims M/m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitaryDecompositionND {
    dims: Vec<usize>,
    block: Vec<usize>,
    reduced: Vec<usize>,
}

impl UnitaryDecompositionND {
    pub fn new(dims: &[usize], block: &[usize]) -> Result<Self> {
        if dims.len() != block.len() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                got: block.len(),
            });
        }
        for (&big, &small) in dims.iter().zip(block) {
            if small == 0 || big % small != 0 {
                return Err(Error::Divisibility {
                    what: "block side must divide grid side",
                    divisor: small,
                    value: big,
                });
            }
        }
        product(dims)?;
        Ok(UnitaryDecompositionND {
            dims: dims.to_vec(),
            block: block.to_vec(),
            reduced: dims.iter().zip(block).map(|(a, b)| a / b).collect(),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn block(&self) -> &[usize] {
        &self.block
    }

    /// Dims M' of every sub-grid.
    pub fn reduced(&self) -> &[usize] {
        &self.reduced
    }

    pub fn count(&self) -> usize {
        self.block.iter().product()
    }

    pub fn subgrid_of(&self, x: &[usize]) -> Vec<usize> {
        x.iter().zip(&self.block).map(|(a, b)| a % b).collect()
    }

    /// Row-major position of sub-grid J among all sub-grids.
    pub fn subgrid_index(&self, j: &[usize]) -> usize {
        row_major(j, &self.block)
    }

    pub fn subgrid_at(&self, k: usize) -> Vec<usize> {
        unravel(k, &self.block)
    }

    /// Splits x into its sub-grid J and the point l of that sub-grid.
    pub fn theta(&self, x: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let j = self.subgrid_of(x);
        let l = x.iter().zip(&self.block).map(|(a, b)| a / b).collect();
        (j, l)
    }

    pub fn theta_inverse(&self, j: &[usize], l: &[usize]) -> Vec<usize> {
        j.iter().zip(l).zip(&self.block).map(|((a, b), m)| b * m + a).collect()
    }
}
