//! Construction descriptors carried inside a serialized [`ColorMap`](crate::grid::ColorMap).

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{box_points, product, unravel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Params {
    #[serde(rename = "sunmao")]
    Sunmao(SunmaoRecord),
    #[serde(rename = "braid1d")]
    Braid1d(Braid1dRecord),
    #[serde(rename = "unitary-braid-nd")]
    UnitaryBraidNd(UnitaryNdRecord),
}

/// Plain sunmao synthesis of arbitrary sub-maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SunmaoRecord {
    pub parts: Vec<usize>,
    pub offsets: Vec<usize>,
}

/// 1D braid code. `generators[i]` is the color-id sequence of the i-th generator
/// (global ids), which is what the per-sub-grid generator decoders are built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Braid1dRecord {
    pub g: usize,
    pub parts: Vec<usize>,
    pub c: Vec<usize>,
    pub q: Vec<usize>,
    pub shift: Option<usize>,
    pub cstar: Option<usize>,
    pub generators: Vec<Vec<usize>>,
}

impl Braid1dRecord {
    pub fn block(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn lengths(&self) -> Vec<usize> {
        (0..self.parts.len()).map(|i| self.g * self.c[i] * self.q[i]).collect()
    }

    pub fn is_unitary(&self) -> bool {
        self.parts.iter().all(|&p| p == 1)
    }

    pub fn offsets(&self) -> Vec<usize> {
        self.parts
            .iter()
            .scan(0, |acc, &p| {
                let d = *acc;
                *acc += p;
                Some(d)
            })
            .collect()
    }
}

/// n-dimensional unitary braid code, optionally extended to target dims `L`.
/// `q[i][k]` is q^(i)_J for the k-th sub-grid index J in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitaryNdRecord {
    pub m: Vec<usize>,
    pub g: usize,
    pub q: Vec<Vec<usize>>,
    pub target: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct UnitaryNdWire {
    m: Vec<usize>,
    g: usize,
    q: BTreeMap<String, BTreeMap<String, usize>>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    target: Option<Vec<usize>>,
}

pub(crate) fn subgrid_key(j: &[usize]) -> String {
    j.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

impl Serialize for UnitaryNdRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut q = BTreeMap::new();
        for (axis, row) in self.q.iter().enumerate() {
            let mut inner = BTreeMap::new();
            for (k, j) in box_points(&self.m).enumerate() {
                inner.insert(subgrid_key(&j), row[k]);
            }
            q.insert(format!("axis_{}", axis + 1), inner);
        }
        UnitaryNdWire {
            m: self.m.clone(),
            g: self.g,
            q,
            target: self.target.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UnitaryNdRecord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = UnitaryNdWire::deserialize(deserializer)?;
        let q = parse_qtable(&wire.m, &wire.q).map_err(D::Error::custom)?;
        Ok(UnitaryNdRecord {
            m: wire.m,
            g: wire.g,
            q,
            target: wire.target,
        })
    }
}

/// Parse the `{"axis_i": {"J": q}}` table into `[axis][row-major J]`.
pub fn parse_qtable(m: &[usize], table: &BTreeMap<String, BTreeMap<String, usize>>) -> Result<Vec<Vec<usize>>, String> {
    let count = product(m).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(m.len());
    for axis in 0..m.len() {
        let key = format!("axis_{}", axis + 1);
        let inner = table.get(&key).ok_or_else(|| format!("q table lacks {key}"))?;
        if inner.len() != count {
            return Err(format!("{key} has {} entries, expected {count}", inner.len()));
        }
        let row = (0..count)
            .map(|k| {
                let j = subgrid_key(&unravel(k, m));
                inner
                    .get(&j)
                    .copied()
                    .ok_or_else(|| format!("{key} lacks sub-grid {j}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(row);
    }
    if table.len() != m.len() {
        return Err(format!("q table has {} axes, expected {}", table.len(), m.len()));
    }
    Ok(out)
}
