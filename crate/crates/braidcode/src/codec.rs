//! Codebook-free decoding: associated and B matrices, generalized CRT, the 1D
//! braid decoder with screening for shrunk maps, n-D unitary decoding and
//! erasure decoding.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::arith::{box_points, cyclic_distance, ext_gcd, lcm_all, mod_inverse, row_major};
use crate::braidnd::UnitaryBraidParamsND;
use crate::error::{DecodeStep, Error, Result};
use crate::grid::{Codeword, ColorId, ColorMap, GridPoint};
use crate::params::{Braid1dRecord, Params};

/// Smallest x >= 0 with x = r_i (mod q_i) for all i, or `None` when two
/// congruences clash modulo the gcd of their moduli.
pub fn generalized_crt(residues: &[usize], moduli: &[usize]) -> Option<usize> {
    assert_eq!(residues.len(), moduli.len(), "one modulus per residue");
    let mut x: i128 = 0;
    let mut n: i128 = 1;
    for (&r, &q) in residues.iter().zip(moduli) {
        if q == 0 {
            return None;
        }
        let q = q as i128;
        let r = r as i128 % q;
        let (d, u, _) = ext_gcd(n, q);
        if (r - x) % d != 0 {
            return None;
        }
        let step = q / d;
        let t = ((r - x) / d % step * (u % step)).rem_euclid(step);
        x += n * t;
        n *= step;
        x = x.rem_euclid(n);
    }
    usize::try_from(x).ok()
}

/// Row i lists the labels of the aligned sub-block codewords of sub-grid i,
/// numbered per row by first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociatedMatrix {
    pub rows: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BMatrix {
    pub rows: Vec<Vec<usize>>,
    /// Bits needed for the largest residue modulus.
    pub n0: u32,
}

fn braid_record(map: &ColorMap) -> Result<&Braid1dRecord> {
    match map.params() {
        Some(Params::Braid1d(r)) if map.grid().ndim() == 1 => Ok(r),
        _ => Err(Error::Unsupported("expected a 1D braid map".into())),
    }
}

fn window(seq: &[ColorId], start: usize, len: usize) -> Vec<ColorId> {
    let mut w: Vec<ColorId> = (0..len).map(|t| seq[(start + t) % seq.len()]).collect();
    w.sort_unstable();
    w
}

fn check_generators(r: &Braid1dRecord) -> Result<()> {
    let lens = r.lengths();
    if r.generators.len() != r.parts.len() || r.generators.iter().zip(&lens).any(|(g, &l)| g.len() != l) {
        return Err(Error::InvalidMap(
            "generator sequences do not match the parameters".into(),
        ));
    }
    Ok(())
}

/// Built from the stored generator sequences only.
pub fn associated_matrix(map: &ColorMap) -> Result<AssociatedMatrix> {
    let r = braid_record(map)?;
    check_generators(r)?;
    let columns = r.g * lcm_all(&r.q)?;
    let rows = r
        .generators
        .iter()
        .zip(&r.parts)
        .map(|(seq, &mi)| {
            let mut seen: HashMap<Vec<ColorId>, usize> = HashMap::new();
            (0..columns)
                .map(|j| {
                    let w = window(seq, j * mi % seq.len(), mi);
                    let next = seen.len();
                    *seen.entry(w).or_insert(next)
                })
                .collect()
        })
        .collect();
    Ok(AssociatedMatrix { rows })
}

/// B[i][a] = A[i][a*g] / g.
pub fn b_matrix(a: &AssociatedMatrix, g: usize) -> Result<BMatrix> {
    let columns = a.rows.first().map_or(0, |r| r.len());
    if g == 0 || !columns.is_multiple_of(g) {
        return Err(Error::Divisibility {
            what: "g must divide the column count",
            divisor: g,
            value: columns,
        });
    }
    let mut rows = Vec::with_capacity(a.rows.len());
    for row in &a.rows {
        let mut out = Vec::with_capacity(columns / g);
        for col in (0..columns).step_by(g) {
            let label = row[col];
            if label % g != 0 {
                return Err(Error::Divisibility {
                    what: "aligned label must be a multiple of g",
                    divisor: g,
                    value: label,
                });
            }
            out.push(label / g);
        }
        rows.push(out);
    }
    let widest = rows.iter().flatten().copied().max().unwrap_or(0) + 1;
    let n0 = usize::BITS - (widest - 1).leading_zeros();
    Ok(BMatrix { rows, n0 })
}

/// Rows of space-separated integers, A, a blank line, then B.
pub fn dump_matrices(a: &AssociatedMatrix, b: &BMatrix) -> String {
    let show = |rows: &[Vec<usize>]| {
        rows.iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    };
    format!("{}\n\n{}\n", show(&a.rows), show(&b.rows))
}

/// Codeword whose i-th sub-grid part is the aligned sub-block with A-label `labels[i]`.
pub fn codeword_from_labels(map: &ColorMap, labels: &[usize]) -> Result<Codeword> {
    let r = braid_record(map)?;
    check_generators(r)?;
    if labels.len() != r.parts.len() {
        return Err(Error::SizeMismatch(format!(
            "{} labels for {} sub-grids",
            labels.len(),
            r.parts.len()
        )));
    }
    let mut colors = Vec::with_capacity(r.block());
    for (i, (&label, seq)) in labels.iter().zip(&r.generators).enumerate() {
        let period = r.g * r.q[i];
        if label >= period {
            return Err(Error::InvalidParams(vec![format!(
                "label {label} of sub-grid {} exceeds its period {period}",
                i + 1
            )]));
        }
        colors.extend(window(seq, label * r.parts[i] % seq.len(), r.parts[i]));
    }
    Ok(Codeword::new(colors))
}

/// 0-based decoding diagnostics for one axis: row index j*, sub-grid (or
/// band row) i* and offset r* inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Diagnostics {
    pub j: usize,
    pub i: usize,
    pub r: usize,
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "j*={} i*={} r*={}", self.j, self.i + 1, self.r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub tag: GridPoint,
    /// One entry per axis.
    pub diagnostics: Vec<Diagnostics>,
}

impl fmt::Display for DecodeResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tag={}", self.tag)?;
        if let [d] = self.diagnostics.as_slice() {
            return write!(f, " {d}");
        }
        for (axis, d) in self.diagnostics.iter().enumerate() {
            write!(f, " axis{}:{d}", axis + 1)?;
        }
        Ok(())
    }
}

/// Recover j* from per-row values j_l mod g*q_l. Rows before i* carry j*+1.
/// When `istar` is unknown it is the first row agreeing with the last in j mod g.
pub fn resolve_rows(values: &[usize], q: &[usize], g: usize, istar: Option<usize>) -> Result<(usize, usize)> {
    let n = values.len();
    let b: Vec<usize> = values.iter().map(|v| v % g).collect();
    let mut a: Vec<usize> = values.iter().map(|v| v / g).collect();
    let bstar = b[n - 1];
    let i = match istar {
        Some(i) => i,
        None => b.iter().position(|&x| x == bstar).unwrap_or(n - 1),
    };
    for (l, &bl) in b.iter().enumerate() {
        let expected = if l < i { (bstar + 1) % g } else { bstar };
        if bl != expected {
            return Err(Error::not_codeword(
                DecodeStep::BCompare,
                format!("row {} has offset {bl}, expected {expected}", l + 1),
            ));
        }
    }
    if bstar == g - 1 {
        for l in 0..i {
            a[l] = (a[l] + q[l] - 1) % q[l];
        }
    }
    let astar =
        generalized_crt(&a, q).ok_or_else(|| Error::not_codeword(DecodeStep::Crt, "row indices are inconsistent"))?;
    Ok((astar * g + bstar, i))
}

/// Generator decoders and row arithmetic of an unshifted, full-size 1D braid code.
#[derive(Debug, Clone)]
pub struct BraidDecoder1D {
    size: usize,
    block: usize,
    parts: Vec<usize>,
    offsets: Vec<usize>,
    g: usize,
    c: Vec<usize>,
    q: Vec<usize>,
    lens: Vec<usize>,
    subgrid_of: HashMap<ColorId, usize>,
    windows: Vec<HashMap<Vec<ColorId>, usize>>,
}

impl BraidDecoder1D {
    pub fn new(r: &Braid1dRecord) -> Result<Self> {
        check_generators(r)?;
        let lens = r.lengths();
        let mut subgrid_of = HashMap::new();
        let mut windows = Vec::with_capacity(r.parts.len());
        for (i, seq) in r.generators.iter().enumerate() {
            for &c in seq {
                if *subgrid_of.entry(c).or_insert(i) != i {
                    return Err(Error::InvalidMap(format!("color {c} is shared by two sub-grids")));
                }
            }
            let mut table = HashMap::with_capacity(lens[i]);
            for p in 0..lens[i] {
                if table.insert(window(seq, p, r.parts[i]), p).is_some() {
                    return Err(Error::InvalidMap(format!("generator {} is not distinguishable", i + 1)));
                }
            }
            windows.push(table);
        }
        Ok(BraidDecoder1D {
            size: r.block() * r.g * lcm_all(&r.q)?,
            block: r.block(),
            parts: r.parts.clone(),
            offsets: r.offsets(),
            g: r.g,
            c: r.c.clone(),
            q: r.q.clone(),
            lens,
            subgrid_of,
            windows,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn subgrid_of(&self, color: ColorId) -> Option<usize> {
        self.subgrid_of.get(&color).copied()
    }

    /// Diagnostics read off a tag.
    pub fn diagnostics(&self, tag: usize) -> Diagnostics {
        let rem = tag % self.block;
        let i = self.offsets.iter().rposition(|&d| d <= rem).unwrap_or(0);
        Diagnostics {
            j: tag / self.block,
            i,
            r: rem - self.offsets[i],
        }
    }

    /// Window positions p_i of each sub-grid part.
    fn positions(&self, w: &Codeword) -> Result<Vec<usize>> {
        if w.len() != self.block {
            return Err(Error::not_codeword(
                DecodeStep::PaletteSplit,
                format!("{} colors for a block of {}", w.len(), self.block),
            ));
        }
        let mut split: Vec<Vec<ColorId>> = vec![Vec::new(); self.parts.len()];
        for &c in w.colors() {
            let i = self
                .subgrid_of(c)
                .ok_or_else(|| Error::not_codeword(DecodeStep::PaletteSplit, format!("color {c} is in no sub-grid")))?;
            split[i].push(c);
        }
        split
            .iter()
            .enumerate()
            .map(|(i, part)| {
                if part.len() != self.parts[i] {
                    return Err(Error::not_codeword(
                        DecodeStep::PaletteSplit,
                        format!(
                            "sub-grid {} has {} colors, expected {}",
                            i + 1,
                            part.len(),
                            self.parts[i]
                        ),
                    ));
                }
                self.windows[i].get(part).copied().ok_or_else(|| {
                    Error::not_codeword(
                        DecodeStep::GeneratorDecode,
                        format!("sub-grid {} part is not a generator codeword", i + 1),
                    )
                })
            })
            .collect()
    }

    /// Tag under the hypothesis (i*, r*); `None` lets the offsets pick i* with r* = 0.
    fn try_hypothesis(&self, pos: &[usize], istar: Option<usize>, r: usize) -> Result<usize> {
        let mut values = Vec::with_capacity(pos.len());
        for (l, &p) in pos.iter().enumerate() {
            let shift = if istar == Some(l) { r } else { 0 };
            let base = (p + self.lens[l] - shift % self.lens[l]) % self.lens[l];
            if !base.is_multiple_of(self.c[l]) {
                return Err(Error::not_codeword(
                    DecodeStep::Remainder,
                    format!("sub-grid {} window is not aligned", l + 1),
                ));
            }
            let period = self.g * self.q[l];
            let unit = self.parts[l] / self.c[l];
            let inv = mod_inverse(unit % period, period)
                .ok_or_else(|| Error::InvalidMap("row step is not invertible".into()))?;
            values.push(base / self.c[l] * inv % period);
        }
        let (j, i) = resolve_rows(&values, &self.q, self.g, istar)?;
        if r >= self.parts[i] {
            return Err(Error::not_codeword(
                DecodeStep::Range,
                "offset exceeds the sub-grid part",
            ));
        }
        Ok(j * self.block + self.offsets[i] + r)
    }

    pub fn decode(&self, w: &Codeword) -> Result<DecodeResult> {
        let pos = self.positions(w)?;
        let nonzero: Vec<usize> = (0..pos.len()).filter(|&i| pos[i] % self.c[i] != 0).collect();
        let mut hypotheses: Vec<(Option<usize>, usize)> = Vec::new();
        match nonzero.as_slice() {
            [] => {
                hypotheses.push((None, 0));
                for i in 0..pos.len() {
                    hypotheses.extend((self.c[i]..self.parts[i]).step_by(self.c[i]).map(|r| (Some(i), r)));
                }
            }
            [i] => {
                let rho = pos[*i] % self.c[*i];
                hypotheses.extend((rho..self.parts[*i]).step_by(self.c[*i]).map(|r| (Some(*i), r)));
            }
            _ => {
                return Err(Error::not_codeword(
                    DecodeStep::Remainder,
                    format!("{} sub-grids have a nonzero remainder", nonzero.len()),
                ))
            }
        }
        let mut last = None;
        for (istar, r) in hypotheses {
            match self.try_hypothesis(&pos, istar, r) {
                Ok(tag) => {
                    return Ok(DecodeResult {
                        tag: GridPoint::from(tag),
                        diagnostics: vec![self.diagnostics(tag)],
                    })
                }
                Err(e) => last = Some(e),
            }
        }
        Err(last.unwrap_or_else(|| Error::not_codeword(DecodeStep::Remainder, "no offset hypothesis")))
    }
}

/// Full-size, unshifted 1D braid codes only.
pub fn decode_1d(map: &ColorMap, w: &Codeword) -> Result<DecodeResult> {
    let r = braid_record(map)?;
    let dec = BraidDecoder1D::new(r)?;
    if r.shift.is_some() || map.grid().dims()[0] != dec.size() || !map.grid().is_cyclic() {
        return Err(Error::Unsupported(
            "map is restricted or modified; use the general decoder".into(),
        ));
    }
    dec.decode(w)
}

/// Restricted and modified 1D braid codes, plus full ones by delegation.
pub fn decode_1d_general(map: &ColorMap, w: &Codeword) -> Result<DecodeResult> {
    Decoder::new(map)?.decode(w)
}

/// Unitary n-D braid decoder, with screening for extended maps.
#[derive(Debug, Clone)]
pub struct NdDecoder {
    params: UnitaryBraidParamsND,
    dims: Vec<usize>,
    target: Option<Vec<usize>>,
    /// (sub-grid index, factors) of every palette color.
    colors: Vec<(usize, Vec<usize>)>,
    /// Sub-grid indices ordered (J_i, rest row-major) for each axis.
    bands: Vec<Vec<usize>>,
}

impl NdDecoder {
    pub fn new(map: &ColorMap) -> Result<Self> {
        let r = match map.params() {
            Some(Params::UnitaryBraidNd(r)) => r,
            _ => return Err(Error::Unsupported("expected a unitary n-D braid map".into())),
        };
        let params = UnitaryBraidParamsND::from_record(r);
        let bad = params.validate();
        if !bad.is_empty() {
            return Err(Error::InvalidParams(bad));
        }
        let n = params.ndim();
        let colors = map
            .palette()
            .iter()
            .map(|e| {
                if e.subgrid.len() != n || e.factors.len() != n {
                    return Err(Error::InvalidMap(format!("color {} lacks sub-grid factors", e.id)));
                }
                Ok((row_major(&e.subgrid, &params.m), e.factors.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let bands = (0..n)
            .map(|i| {
                let mut ks: Vec<usize> = (0..params.subgrid_count()).collect();
                ks.sort_by_key(|&k| {
                    let j = crate::arith::unravel(k, &params.m);
                    (j[i], k)
                });
                ks
            })
            .collect();
        Ok(NdDecoder {
            dims: params.dims()?,
            params,
            target: r.target.clone(),
            colors,
            bands,
        })
    }

    pub fn diagnostics(&self, tag: &[usize]) -> Vec<Diagnostics> {
        let nu = self.params.subgrid_count();
        tag.iter()
            .zip(&self.params.m)
            .map(|(&x, &m)| Diagnostics {
                j: x / m,
                i: (x % m) * (nu / m),
                r: x % m,
            })
            .collect()
    }

    fn lookup(&self, c: ColorId) -> Result<&(usize, Vec<usize>)> {
        self.colors
            .get(c)
            .ok_or_else(|| Error::not_codeword(DecodeStep::PaletteSplit, format!("color {c} is not in the palette")))
    }

    /// Decoding of full-size maps via the band rows of each axis.
    pub fn decode_standard(&self, w: &Codeword) -> Result<DecodeResult> {
        let nu = self.params.subgrid_count();
        if w.len() != nu {
            return Err(Error::not_codeword(
                DecodeStep::PaletteSplit,
                format!("{} colors for a block of {nu}", w.len()),
            ));
        }
        let mut by_subgrid: Vec<Option<&Vec<usize>>> = vec![None; nu];
        for &c in w.colors() {
            let (k, f) = self.lookup(c)?;
            if by_subgrid[*k].replace(f).is_some() {
                return Err(Error::not_codeword(
                    DecodeStep::PaletteSplit,
                    format!("sub-grid {} appears twice", k + 1),
                ));
            }
        }
        let g = self.params.g;
        let mut tag = Vec::with_capacity(self.params.ndim());
        let mut diagnostics = Vec::with_capacity(self.params.ndim());
        for (i, band) in self.bands.iter().enumerate() {
            let mi = self.params.m[i];
            let mut values = Vec::with_capacity(nu);
            let mut moduli = Vec::with_capacity(nu);
            for &k in band {
                let f = by_subgrid[k].ok_or_else(|| {
                    Error::not_codeword(DecodeStep::PaletteSplit, format!("sub-grid {} is missing", k + 1))
                })?;
                let q = self.params.q[i][k];
                if f[i] >= g * q {
                    return Err(
                        Error::not_codeword(DecodeStep::PaletteSplit, "fresh factor in a full-size map").on_axis(i),
                    );
                }
                values.push(f[i]);
                moduli.push(q);
            }
            let (j, s) = resolve_rows(&values, &moduli, g, None).map_err(|e| e.on_axis(i))?;
            let per = nu / mi;
            if s % per != 0 {
                return Err(Error::not_codeword(DecodeStep::Remainder, "offset splits a band").on_axis(i));
            }
            let r = s / per;
            tag.push(j * mi + r);
            diagnostics.push(Diagnostics { j, i: s, r });
        }
        Ok(DecodeResult {
            tag: GridPoint(tag),
            diagnostics,
        })
    }

    /// Candidate coordinates along one axis of an extended map.
    fn axis_candidates(&self, w: &Codeword, i: usize, size: usize) -> Result<BTreeSet<usize>> {
        let p = &self.params;
        let (g, mi, full) = (p.g, p.m[i], self.dims[i]);
        let mut plain: Vec<(usize, usize, usize)> = Vec::new();
        let mut fresh = false;
        for &c in w.colors() {
            let (k, f) = self.lookup(c)?;
            let q = p.q[i][*k];
            if f[i] >= g * q {
                fresh = true;
            } else {
                let ji = crate::arith::unravel(*k, &p.m)[i];
                plain.push((ji, f[i], q));
            }
        }
        let mut out = BTreeSet::new();
        if !plain.is_empty() {
            for r in 0..mi {
                let (residues, moduli): (Vec<usize>, Vec<usize>) = plain
                    .iter()
                    .map(|&(ji, f, q)| {
                        let modulus = mi * g * q;
                        let row = f + g * q - usize::from(ji < r);
                        ((row * mi + r) % modulus, modulus)
                    })
                    .unzip();
                if let Some(x) = generalized_crt(&residues, &moduli) {
                    let x = x % full;
                    if x < size && x % mi == r {
                        out.insert(x);
                    }
                }
            }
        }
        if fresh && size.is_multiple_of(mi) {
            out.extend((size + 1).saturating_sub(2 * mi)..size);
        }
        if size < full && !size.is_multiple_of(mi) {
            out.extend((size + 1).saturating_sub(mi)..size);
        }
        if out.is_empty() {
            return Err(Error::not_codeword(DecodeStep::Crt, "no coordinate fits every color").on_axis(i));
        }
        Ok(out)
    }

    /// Decoding of extended maps: per-axis candidates screened by encoding.
    pub fn decode_extended(&self, map: &ColorMap, w: &Codeword) -> Result<DecodeResult> {
        let size = map.grid().dims();
        let cands: Vec<Vec<usize>> = (0..size.len())
            .map(|i| self.axis_candidates(w, i, size[i]).map(|s| s.into_iter().collect()))
            .collect::<Result<_>>()?;
        let shape: Vec<usize> = cands.iter().map(|c| c.len()).collect();
        for pick in box_points(&shape) {
            let tag: Vec<usize> = pick.iter().zip(&cands).map(|(&k, c)| c[k]).collect();
            if map.encode_unchecked(&tag) == *w {
                return Ok(DecodeResult {
                    diagnostics: self.diagnostics(&tag),
                    tag: GridPoint(tag),
                });
            }
        }
        Err(Error::not_codeword(
            DecodeStep::Screen,
            "no candidate tag encodes to the codeword",
        ))
    }
}

/// Full-size unitary n-D maps decode by band rows; extended ones by screening.
pub fn decode_nd(map: &ColorMap, w: &Codeword) -> Result<DecodeResult> {
    Decoder::new(map)?.decode(w)
}

enum Kind {
    Braid(BraidDecoder1D),
    Nd(NdDecoder),
}

/// Decoder prepared once per map.
pub struct Decoder<'a> {
    map: &'a ColorMap,
    kind: Kind,
}

impl<'a> Decoder<'a> {
    pub fn new(map: &'a ColorMap) -> Result<Self> {
        let kind = match map.params() {
            Some(Params::Braid1d(r)) if map.grid().ndim() == 1 => Kind::Braid(BraidDecoder1D::new(r)?),
            Some(Params::UnitaryBraidNd(_)) => Kind::Nd(NdDecoder::new(map)?),
            _ => return Err(Error::Unsupported("map carries no braid parameters".into())),
        };
        Ok(Decoder { map, kind })
    }

    pub fn decode(&self, w: &Codeword) -> Result<DecodeResult> {
        match &self.kind {
            Kind::Nd(dec) if dec.target.is_none() => dec.decode_standard(w),
            Kind::Nd(dec) => dec.decode_extended(self.map, w),
            Kind::Braid(dec) => self.decode_braid(dec, w),
        }
    }

    fn screen(&self, dec: &BraidDecoder1D, tags: impl Iterator<Item = usize>, w: &Codeword) -> Option<DecodeResult> {
        tags.into_iter()
            .find(|&x| self.map.encode_unchecked(&[x]) == *w)
            .map(|x| DecodeResult {
                tag: GridPoint::from(x),
                diagnostics: vec![dec.diagnostics(x)],
            })
    }

    fn decode_braid(&self, dec: &BraidDecoder1D, w: &Codeword) -> Result<DecodeResult> {
        let r = braid_record(self.map)?;
        let size = self.map.grid().dims()[0];
        let m = dec.block();
        let full = dec.size();
        let with_tag = |x: usize| DecodeResult {
            tag: GridPoint::from(x),
            diagnostics: vec![dec.diagnostics(x)],
        };
        if let (Some(shift), Some(cstar)) = (r.shift, r.cstar) {
            let rows = size / m;
            let normal_end = (rows - 2) * m + 1;
            let base = dec.decode(w);
            if let Ok(res) = &base {
                let x = (res.tag.0[0] + full - shift % full) % full;
                if x <= normal_end {
                    return Ok(with_tag(x));
                }
            }
            let n = w.count(cstar);
            if n == 0 {
                return base.and(Err(Error::not_codeword(
                    DecodeStep::Range,
                    "codeword belongs to a tag outside the shrunk grid",
                )));
            }
            let special = normal_end + 1..size;
            let counted = [
                (rows - 2) * m + n,
                (rows - 2) * m + n + 1,
                size.saturating_sub(n),
                size + 1 - n,
            ];
            let hit = self
                .screen(dec, counted.into_iter().filter(|x| special.contains(x)), w)
                .or_else(|| self.screen(dec, special.clone(), w));
            return hit.ok_or_else(|| {
                Error::not_codeword(DecodeStep::Special, format!("{n} copies of c* match no special block"))
            });
        }
        if size == full && self.map.grid().is_cyclic() {
            return dec.decode(w);
        }
        let last_plain = size.saturating_sub(m);
        let base = dec.decode(w);
        if let Ok(res) = &base {
            let y = res.tag.0[0];
            if size >= m && y <= last_plain {
                return Ok(with_tag(y));
            }
        }
        if !self.map.grid().is_cyclic() {
            return Err(base
                .err()
                .unwrap_or_else(|| Error::not_codeword(DecodeStep::Range, "tag lies beyond the flat window")));
        }
        let wrap = if size >= m { last_plain + 1 } else { 0 }..size;
        self.screen(dec, wrap, w)
            .ok_or_else(|| Error::not_codeword(DecodeStep::Screen, "no wrapped block matches"))
    }
}

/// Decode any braid map.
pub fn decode(map: &ColorMap, w: &Codeword) -> Result<DecodeResult> {
    Decoder::new(map)?.decode(w)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasureResult {
    pub candidates: Vec<GridPoint>,
    /// Largest pairwise distance among candidates, cyclic on cyclic grids.
    pub resolution: usize,
}

/// Tags whose codeword contains `partial`, found from the occurrences of its
/// rarest color. Unitary, unshifted 1D braid codes and their restrictions.
pub fn erasure_decode(map: &ColorMap, partial: &Codeword) -> Result<ErasureResult> {
    let r = braid_record(map)?;
    if !r.is_unitary() || r.shift.is_some() {
        return Err(Error::Unsupported(
            "erasure decoding needs an unmodified unitary code".into(),
        ));
    }
    let dec = BraidDecoder1D::new(r)?;
    let m = dec.block();
    if partial.is_empty() || partial.len() > m {
        return Err(Error::SizeMismatch(format!(
            "partial codeword has {} colors, expected 1..={m}",
            partial.len()
        )));
    }
    let size = map.grid().dims()[0];
    let cyclic = map.grid().is_cyclic();
    let mut anchor: Option<(usize, ColorId)> = None;
    for &c in partial.colors() {
        let i = dec.subgrid_of(c).ok_or(Error::NotASubCodeword)?;
        if anchor.is_none_or(|(k, _)| dec.lens[i] > dec.lens[k]) {
            anchor = Some((i, c));
        }
    }
    let (i, color) = anchor.ok_or(Error::NotASubCodeword)?;
    let seq = &r.generators[i];
    let mut tags = BTreeSet::new();
    for (u, _) in seq.iter().enumerate().filter(|&(_, &c)| c == color) {
        let mut row = u;
        while row * m + i < size {
            let x = row * m + i;
            for t in 0..m {
                let tag = if cyclic {
                    (x + size - t % size) % size
                } else if x >= t && x - t + m <= size {
                    x - t
                } else {
                    continue;
                };
                tags.insert(tag);
            }
            row += seq.len();
        }
    }
    let candidates: Vec<usize> = tags
        .into_iter()
        .filter(|&x| map.encode_unchecked(&[x]).contains(partial))
        .collect();
    if candidates.is_empty() {
        return Err(Error::NotASubCodeword);
    }
    let resolution = spread(&candidates, cyclic.then_some(size));
    Ok(ErasureResult {
        candidates: candidates.into_iter().map(GridPoint::from).collect(),
        resolution,
    })
}

/// Largest pairwise distance, cyclic modulo `modulus` when given.
pub fn spread(tags: &[usize], modulus: Option<usize>) -> usize {
    let mut best = 0;
    for (k, &a) in tags.iter().enumerate() {
        for &b in &tags[k + 1..] {
            let d = match modulus {
                Some(n) => cyclic_distance(a, b, n),
                None => a.abs_diff(b),
            };
            best = best.max(d);
        }
    }
    best
}

/// g * m * q-hat, where q-hat is the least lcm over (m-e)-subsets of q.
pub fn erasure_bound(g: usize, q: &[usize], erased: usize) -> Result<usize> {
    let m = q.len();
    if erased >= m {
        return Err(Error::InvalidParams(vec!["erasures must be fewer than m".into()]));
    }
    if m >= usize::BITS as usize {
        return Err(Error::Overflow("subset enumeration"));
    }
    let keep = m - erased;
    let mut best: Option<usize> = None;
    for mask in 0usize..(1 << m) {
        if mask.count_ones() as usize != keep {
            continue;
        }
        let chosen: Vec<usize> = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| q[b]).collect();
        let l = lcm_all(&chosen)?;
        best = Some(best.map_or(l, |b| b.min(l)));
    }
    best.unwrap_or(1)
        .checked_mul(g * m)
        .ok_or(Error::Overflow("erasure bound"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid1d::{construct_auto, modify_general_size, restrict, restrict_flat, BraidParams1D, CStarMode};
    use crate::oracle::all_codewords;

    fn m24() -> ColorMap {
        construct_auto(&BraidParams1D {
            size: 24,
            parts: vec![1, 1],
            g: 2,
            c: vec![1, 1],
            q: vec![2, 3],
        })
        .unwrap()
    }

    fn round_trip(map: &ColorMap) {
        let dec = Decoder::new(map).unwrap();
        for (tag, w) in all_codewords(map, 100_000).unwrap() {
            let got = dec.decode(&w).unwrap_or_else(|e| panic!("tag {tag}: {e}"));
            assert_eq!(got.tag, tag);
        }
    }

    #[test]
    fn crt_examples() {
        assert_eq!(generalized_crt(&[0, 1], &[2, 3]), Some(4));
        assert_eq!(generalized_crt(&[1, 1], &[2, 3]), Some(1));
        assert_eq!(generalized_crt(&[0, 1], &[2, 4]), None);
        assert_eq!(generalized_crt(&[3, 1], &[4, 6]), Some(7));
        assert_eq!(generalized_crt(&[], &[]), Some(0));
    }

    #[test]
    fn m24_matrices() {
        let map = m24();
        let a = associated_matrix(&map).unwrap();
        let row1: Vec<usize> = (0..12).map(|j| j % 4).collect();
        let row2: Vec<usize> = (0..12).map(|j| j % 6).collect();
        assert_eq!(a.rows, vec![row1, row2]);
        let b = b_matrix(&a, 2).unwrap();
        assert_eq!(b.rows, vec![vec![0, 1, 0, 1, 0, 1], vec![0, 1, 2, 0, 1, 2]]);
        assert_eq!(b.n0, 2);
        let dump = dump_matrices(&a, &b);
        assert!(dump.starts_with("0 1 2 3 0 1"));
        assert!(dump.contains("\n\n0 1 0 1 0 1\n0 1 2 0 1 2\n"));
    }

    #[test]
    fn m24_worked_codewords() {
        let map = m24();
        for (labels, tag, istar) in [([2, 2], 4, 0), ([3, 2], 5, 1), ([3, 3], 6, 0), ([0, 3], 7, 1)] {
            let w = codeword_from_labels(&map, &labels).unwrap();
            let res = decode_1d(&map, &w).unwrap();
            assert_eq!(res.tag, GridPoint::from(tag));
            assert_eq!(res.diagnostics[0].i, istar);
        }
        let w = codeword_from_labels(&map, &[2, 2]).unwrap();
        assert_eq!(decode_1d(&map, &w).unwrap().to_string(), "tag=4 j*=2 i*=1 r*=0");
    }

    #[test]
    fn rejects_non_codewords() {
        let map = m24();
        let w = Codeword::new(vec![0, 1]);
        assert!(matches!(
            decode_1d(&map, &w),
            Err(Error::NotACodeword {
                step: DecodeStep::PaletteSplit,
                ..
            })
        ));
        let w = Codeword::new(vec![0, 99]);
        assert!(matches!(decode_1d(&map, &w), Err(Error::NotACodeword { .. })));
    }

    #[test]
    fn m24_labels_biject_onto_tags() {
        let map = m24();
        let mut seen = std::collections::HashSet::new();
        for a in 0..4 {
            for b in 0..6 {
                let w = codeword_from_labels(&map, &[a, b]).unwrap();
                assert!(seen.insert(decode_1d(&map, &w).unwrap().tag));
            }
        }
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn shrunk_maps_round_trip() {
        let map = m24();
        round_trip(&map);
        for size in [5, 13, 17, 23] {
            round_trip(&restrict(&map, size).unwrap().map);
        }
        round_trip(&restrict_flat(&map, 15).unwrap());
        for size in (4..24).step_by(2) {
            for mode in [CStarMode::Existing, CStarMode::Fresh] {
                round_trip(&modify_general_size(&map, size, mode).unwrap());
            }
        }
    }

    #[test]
    fn erasure_examples() {
        let map = m24();
        let full = map.encode(&GridPoint::from(9)).unwrap();
        let res = erasure_decode(&map, &full).unwrap();
        assert_eq!(res.candidates, vec![GridPoint::from(9)]);
        assert_eq!(res.resolution, 0);
        assert_eq!(erasure_bound(2, &[2, 3], 1).unwrap(), 8);
        assert_eq!(erasure_bound(2, &[2, 2, 4], 1).unwrap(), 12);
        let flat = restrict_flat(&map, 8).unwrap();
        for (_, w) in all_codewords(&flat, 100).unwrap() {
            for &c in w.colors() {
                let res = erasure_decode(&flat, &Codeword::new(vec![c])).unwrap();
                assert!(res.resolution <= 1, "{res:?}");
            }
        }
    }

    #[test]
    fn code75_codes_round_trip() {
        for (g, c, q) in [(3, [2, 3], [1, 5]), (5, [1, 1], [3, 1]), (3, [1, 3], [1, 5])] {
            let p = BraidParams1D {
                size: 75,
                parts: vec![2, 3],
                g,
                c: c.to_vec(),
                q: q.to_vec(),
            };
            round_trip(&construct_auto(&p).unwrap());
        }
    }

    #[test]
    fn code75_matrices() {
        let p = BraidParams1D {
            size: 75,
            parts: vec![2, 3],
            g: 3,
            c: vec![2, 3],
            q: vec![1, 5],
        };
        let a = associated_matrix(&construct_auto(&p).unwrap()).unwrap();
        assert_eq!(a.rows[0][..9], [0, 1, 2, 0, 1, 2, 0, 1, 2]);
        assert_eq!(a.rows[1][..9], [0, 1, 2, 3, 4, 5, 6, 7, 8]);
        let b = b_matrix(&a, 3).unwrap();
        assert_eq!(b.rows, vec![vec![0; 5], vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn square24_round_trips() {
        use crate::braidnd::{construct_unitary_nd, extend_arbitrary_size};
        let p = UnitaryBraidParamsND {
            m: vec![2, 2],
            g: 2,
            q: vec![vec![1, 1, 2, 3], vec![3, 2, 1, 1]],
        };
        let map = construct_unitary_nd(&p).unwrap();
        round_trip(&map);
        let w = map.encode(&GridPoint::from([23, 11])).unwrap();
        assert_eq!(decode_nd(&map, &w).unwrap().tag, GridPoint::from([23, 11]));
        for target in [[12, 24], [24, 12], [12, 10], [19, 24], [13, 11]] {
            let ext = extend_arbitrary_size(&map, &target).unwrap();
            if crate::oracle::is_distinguishable(&ext.map).unwrap().is_ok() {
                round_trip(&ext.map);
            }
        }
    }
}
