//! Combinatorial lattice models of the plane and of 3-space.
//!
//! The lattice is a tensor product of combinatorial real lines: on each axis
//! a cell is either a point or a unit interval. A [`CellSignature`] records
//! which axes contribute an interval, so in 3D the signatures are
//! `x` (point), `e1`/`e2`/`e3` (edges), `e12`/`e13`/`e23` (faces) and `V`
//! (volume); the degree of a cell is the number of interval axes.
//!
//! Everything here is finite: each axis has an extent and is either periodic
//! (indices wrap, the default; the 2×2 fully periodic plane is the
//! combinatorial torus) or truncated. Truncation is a non-periodic window
//! onto the infinite lattice: cochain components outside the window read as
//! zero and chain terms that leave the window are dropped.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice dimension must be 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("extent on axis {axis} must be at least 1")]
    EmptyAxis { axis: usize },
    #[error("axis {axis} out of range for a {dim}-dimensional lattice")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("coordinate {coord} outside the truncated range 0..{extent} on axis {axis}")]
    OutOfRange {
        axis: usize,
        coord: i64,
        extent: usize,
    },
    #[error("expected a chain of degree {expected}, got degree {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("index range {start}..{end} exceeds extent {extent} on axis {axis}")]
    BadRange {
        axis: usize,
        start: usize,
        end: usize,
        extent: usize,
    },
}

/// Finite lattice topology: per-axis extents and periodicity flags.
///
/// Internally all indices are 0-based; human-facing labels (CSV headers,
/// torus component names) are 1-based and converted at the boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeTopology {
    extents: Vec<usize>,
    periodic: Vec<bool>,
}

impl LatticeTopology {
    pub fn new(extents: &[usize], periodic: &[bool]) -> Result<Self, LatticeError> {
        let dim = extents.len();
        if dim != 2 && dim != 3 {
            return Err(LatticeError::BadDimension(dim));
        }
        if periodic.len() != dim {
            return Err(LatticeError::BadDimension(periodic.len()));
        }
        for (axis, &n) in extents.iter().enumerate() {
            if n == 0 {
                return Err(LatticeError::EmptyAxis { axis });
            }
        }
        Ok(Self {
            extents: extents.to_vec(),
            periodic: periodic.to_vec(),
        })
    }

    /// Fully periodic lattice (every axis wraps).
    pub fn periodic(extents: &[usize]) -> Result<Self, LatticeError> {
        let flags = vec![true; extents.len()];
        Self::new(extents, &flags)
    }

    /// The combinatorial torus: the 2×2 fully periodic plane.
    pub fn torus_2x2() -> Self {
        Self::periodic(&[2, 2]).expect("2x2 torus is valid")
    }

    pub fn dimension(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn periodic_flags(&self) -> &[bool] {
        &self.periodic
    }

    pub fn is_fully_periodic(&self) -> bool {
        self.periodic.iter().all(|&p| p)
    }

    /// Number of base cells per signature (product of extents).
    pub fn cell_count(&self) -> usize {
        self.extents.iter().product()
    }

    /// Row-major linear index of a canonical coordinate tuple.
    pub fn linear_index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.dimension());
        let mut ix = 0;
        for (axis, &c) in coords.iter().enumerate() {
            debug_assert!(c < self.extents[axis]);
            ix = ix * self.extents[axis] + c;
        }
        ix
    }

    /// Coordinates of a linear index (inverse of [`Self::linear_index`]).
    pub fn coords_of(&self, mut ix: usize) -> Vec<usize> {
        let dim = self.dimension();
        let mut coords = vec![0; dim];
        for axis in (0..dim).rev() {
            coords[axis] = ix % self.extents[axis];
            ix /= self.extents[axis];
        }
        coords
    }

    /// Canonicalize signed coordinates: wrap periodic axes, reject
    /// out-of-window coordinates on truncated axes.
    pub fn canonicalize(&self, coords: &[i64]) -> Option<Vec<usize>> {
        debug_assert_eq!(coords.len(), self.dimension());
        let mut out = Vec::with_capacity(coords.len());
        for (axis, &c) in coords.iter().enumerate() {
            let n = self.extents[axis] as i64;
            if self.periodic[axis] {
                out.push(c.rem_euclid(n) as usize);
            } else if (0..n).contains(&c) {
                out.push(c as usize);
            } else {
                return None;
            }
        }
        Some(out)
    }

    /// Linear index of the cell one step along `axis` from `ix`
    /// (`dir = ±1`). `None` when a truncated axis is left.
    pub fn neighbor(&self, ix: usize, axis: usize, dir: i64) -> Option<usize> {
        debug_assert!(axis < self.dimension());
        // stride of `axis` and the coordinate along it
        let mut stride = 1;
        for a in (axis + 1)..self.dimension() {
            stride *= self.extents[a];
        }
        let n = self.extents[axis];
        let coord = (ix / stride) % n;
        let shifted = coord as i64 + dir;
        let wrapped = if self.periodic[axis] {
            shifted.rem_euclid(n as i64)
        } else if (0..n as i64).contains(&shifted) {
            shifted
        } else {
            return None;
        };
        Some((ix as i64 + (wrapped - coord as i64) * stride as i64) as usize)
    }

    /// Like [`Self::neighbor`] but shifting one step along every axis in
    /// `axes` at once.
    pub fn neighbor_many(&self, ix: usize, axes: &[usize], dir: i64) -> Option<usize> {
        let mut cur = ix;
        for &axis in axes {
            cur = self.neighbor(cur, axis, dir)?;
        }
        Some(cur)
    }

    /// Iterate linear indices of all base cells.
    pub fn cells(&self) -> Range<usize> {
        0..self.cell_count()
    }
}

/// Which axes of the tensor product carry an interval factor.
///
/// Stored as a bitmask (bit `a` set means axis `a` is 1-dimensional), so the
/// 3D signatures in mask order are `x, e1, e2, e12, e3, e13, e23, V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellSignature(u8);

impl CellSignature {
    /// The point signature (degree 0).
    pub const SCALAR: CellSignature = CellSignature(0);

    pub fn from_mask(mask: u8) -> Self {
        CellSignature(mask)
    }

    /// Build from 0-based axis indices.
    pub fn from_axes(axes: &[usize]) -> Self {
        let mut mask = 0u8;
        for &a in axes {
            debug_assert!(a < 3);
            mask |= 1 << a;
        }
        CellSignature(mask)
    }

    pub fn mask(&self) -> u8 {
        self.0
    }

    pub fn degree(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(&self, axis: usize) -> bool {
        self.0 & (1 << axis) != 0
    }

    /// 0-based axes in increasing order.
    pub fn axes(&self) -> Vec<usize> {
        (0..3).filter(|&a| self.contains(a)).collect()
    }

    pub fn with_axis(&self, axis: usize) -> Self {
        CellSignature(self.0 | (1 << axis))
    }

    pub fn without_axis(&self, axis: usize) -> Self {
        CellSignature(self.0 & !(1 << axis))
    }

    pub fn complement(&self, dim: usize) -> Self {
        let full = (1u8 << dim) - 1;
        CellSignature(full & !self.0)
    }

    pub fn disjoint(&self, other: CellSignature) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(&self, other: CellSignature) -> Self {
        CellSignature(self.0 | other.0)
    }

    /// Position of `axis` within the ordered axis list of this signature.
    pub fn position(&self, axis: usize) -> usize {
        debug_assert!(self.contains(axis));
        (self.0 & ((1 << axis) - 1)).count_ones() as usize
    }

    /// All signatures of the given degree in a `dim`-dimensional lattice,
    /// ordered by ascending mask (`e12 < e13 < e23`).
    pub fn all_of_degree(dim: usize, degree: usize) -> Vec<Self> {
        (0u8..(1 << dim))
            .map(CellSignature)
            .filter(|s| s.degree() == degree)
            .collect()
    }

    /// Human-facing label: `x`, `e1`, `e13`, ..., `V` for the top signature.
    pub fn label(&self, dim: usize) -> String {
        if self.degree() == 0 {
            "x".to_string()
        } else if self.degree() == dim {
            "V".to_string()
        } else {
            let digits: String = self.axes().iter().map(|a| (a + 1).to_string()).collect();
            format!("e{digits}")
        }
    }

    /// Parse a label produced by [`Self::label`]; accepts `e12`-style names
    /// for the top signature as well.
    pub fn parse_label(label: &str, dim: usize) -> Option<Self> {
        match label {
            "x" => Some(Self::SCALAR),
            "V" => Some(Self::SCALAR.complement(dim)),
            _ => {
                let rest = label.strip_prefix('e')?;
                let mut axes = Vec::new();
                for ch in rest.chars() {
                    let a = ch.to_digit(10)? as usize;
                    if a == 0 || a > dim {
                        return None;
                    }
                    axes.push(a - 1);
                }
                if axes.is_empty() {
                    return None;
                }
                Some(Self::from_axes(&axes))
            }
        }
    }
}

impl fmt::Display for CellSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            write!(f, "x")
        } else {
            let digits: String = self.axes().iter().map(|a| (a + 1).to_string()).collect();
            write!(f, "e{digits}")
        }
    }
}

/// Canonical cell index: one coordinate per axis, wrapped on periodic axes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellIndex(Vec<usize>);

impl CellIndex {
    pub fn new(coords: &[i64], topo: &LatticeTopology) -> Result<Self, LatticeError> {
        match topo.canonicalize(coords) {
            Some(c) => Ok(CellIndex(c)),
            None => {
                // report the first offending axis
                for (axis, &c) in coords.iter().enumerate() {
                    let n = topo.extents()[axis] as i64;
                    if !topo.periodic_flags()[axis] && !(0..n).contains(&c) {
                        return Err(LatticeError::OutOfRange {
                            axis,
                            coord: c,
                            extent: n as usize,
                        });
                    }
                }
                unreachable!("canonicalize only fails on an out-of-range axis")
            }
        }
    }

    pub fn from_canonical(coords: Vec<usize>) -> Self {
        CellIndex(coords)
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }
}

/// Shift a cell index one step along `axis`; `dir` is `+1` (the forward
/// shift `τ`) or `-1` (its inverse `σ`). On periodic axes the coordinate
/// wraps; on truncated axes leaving the window is an error.
pub fn shift(
    index: &CellIndex,
    axis: usize,
    dir: i64,
    topo: &LatticeTopology,
) -> Result<CellIndex, LatticeError> {
    if axis >= topo.dimension() {
        return Err(LatticeError::AxisOutOfRange {
            axis,
            dim: topo.dimension(),
        });
    }
    let mut coords: Vec<i64> = index.coords().iter().map(|&c| c as i64).collect();
    coords[axis] += dir;
    CellIndex::new(&coords, topo)
}

/// Formal real-coefficient sum of basis cells of one degree.
///
/// Zero-coefficient terms are dropped eagerly, so boundary computations with
/// integer coefficients cancel exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    degree: usize,
    terms: BTreeMap<(CellSignature, Vec<usize>), f64>,
}

impl Chain {
    pub fn zero(degree: usize) -> Self {
        Chain {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn singleton(sig: CellSignature, index: CellIndex, coeff: f64) -> Self {
        let mut c = Chain::zero(sig.degree());
        c.add_term(sig, index, coeff);
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, sig: CellSignature, index: CellIndex, coeff: f64) {
        assert_eq!(
            sig.degree(),
            self.degree,
            "chain terms must share one degree"
        );
        let key = (sig, index.coords().to_vec());
        let entry = self.terms.entry(key).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            let key = (sig, index.coords().to_vec());
            self.terms.remove(&key);
        }
    }

    pub fn coefficient(&self, sig: CellSignature, coords: &[usize]) -> f64 {
        self.terms
            .get(&(sig, coords.to_vec()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (CellSignature, &[usize], f64)> {
        self.terms
            .iter()
            .map(|((sig, coords), &c)| (*sig, coords.as_slice(), c))
    }

    /// The boundary `∂`. Degree drops by one; a degree-0 chain has zero
    /// boundary. On truncated axes, terms leaving the window are dropped
    /// (the window convention: everything outside is zero).
    pub fn boundary(&self, topo: &LatticeTopology) -> Chain {
        if self.degree == 0 {
            return Chain::zero(0);
        }
        let mut out = Chain::zero(self.degree - 1);
        for ((sig, coords), &coeff) in &self.terms {
            for (pos, axis) in sig.axes().into_iter().enumerate() {
                let face = sig.without_axis(axis);
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                // far face: index shifted forward along `axis`
                let mut shifted: Vec<i64> = coords.iter().map(|&c| c as i64).collect();
                shifted[axis] += 1;
                if let Some(canon) = topo.canonicalize(&shifted) {
                    out.add_term(face, CellIndex::from_canonical(canon), sign * coeff);
                }
                // near face: the base index
                out.add_term(
                    face,
                    CellIndex::from_canonical(coords.clone()),
                    -sign * coeff,
                );
            }
        }
        out
    }
}

/// Top-degree chain with unit coefficients over a box of cells.
///
/// Empty ranges give the zero chain; ranges must lie inside the extents.
pub fn volume_chain(
    topo: &LatticeTopology,
    ranges: &[Range<usize>],
) -> Result<Chain, LatticeError> {
    let dim = topo.dimension();
    assert_eq!(ranges.len(), dim, "one range per axis");
    for (axis, r) in ranges.iter().enumerate() {
        if r.end > topo.extents()[axis] {
            return Err(LatticeError::BadRange {
                axis,
                start: r.start,
                end: r.end,
                extent: topo.extents()[axis],
            });
        }
    }
    let top = CellSignature::SCALAR.complement(dim);
    let mut chain = Chain::zero(dim);
    let mut coords = vec![0usize; dim];
    fn rec(
        axis: usize,
        ranges: &[Range<usize>],
        coords: &mut Vec<usize>,
        chain: &mut Chain,
        top: CellSignature,
    ) {
        if axis == ranges.len() {
            chain.add_term(top, CellIndex::from_canonical(coords.clone()), 1.0);
            return;
        }
        for c in ranges[axis].clone() {
            coords[axis] = c;
            rec(axis + 1, ranges, coords, chain, top);
        }
    }
    rec(0, ranges, &mut coords, &mut chain, top);
    Ok(chain)
}

/// The full-lattice volume chain.
pub fn full_volume(topo: &LatticeTopology) -> Chain {
    let ranges: Vec<Range<usize>> = topo.extents().iter().map(|&n| 0..n).collect();
    volume_chain(topo, &ranges).expect("full ranges are always valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_wraps_on_the_torus() {
        // extent 2 per axis: stepping forward twice returns to the start,
        // realizing the torus identification of opposite edges
        let topo = LatticeTopology::torus_2x2();
        let origin = CellIndex::new(&[0, 0], &topo).unwrap();
        let stepped = shift(&origin, 0, 1, &topo).unwrap();
        assert_eq!(stepped.coords(), &[1, 0]);
        let wrapped = shift(&stepped, 0, 1, &topo).unwrap();
        assert_eq!(wrapped.coords(), &[0, 0]);
        // σ after τ is the identity
        let back = shift(&shift(&origin, 1, 1, &topo).unwrap(), 1, -1, &topo).unwrap();
        assert_eq!(back, origin);
    }

    #[test]
    fn shift_out_of_truncated_window_errors() {
        let topo = LatticeTopology::new(&[3, 2], &[false, false]).unwrap();
        let edge = CellIndex::new(&[2, 1], &topo).unwrap();
        assert!(matches!(
            shift(&edge, 0, 1, &topo),
            Err(LatticeError::OutOfRange { axis: 0, coord: 3, extent: 3 })
        ));
        // interior shifts still work
        let inner = CellIndex::new(&[1, 0], &topo).unwrap();
        assert_eq!(shift(&inner, 0, 1, &topo).unwrap().coords(), &[2, 0]);
    }

    #[test]
    fn bad_axis_is_an_error() {
        let topo = LatticeTopology::torus_2x2();
        let idx = CellIndex::new(&[0, 0], &topo).unwrap();
        assert!(matches!(
            shift(&idx, 2, 1, &topo),
            Err(LatticeError::AxisOutOfRange { axis: 2, dim: 2 })
        ));
    }

    #[test]
    fn canonicalization_wraps_negative_coordinates() {
        let topo = LatticeTopology::periodic(&[3, 4]).unwrap();
        let idx = CellIndex::new(&[-1, 7], &topo).unwrap();
        assert_eq!(idx.coords(), &[2, 3]);
        let truncated = LatticeTopology::new(&[3, 4], &[false, false]).unwrap();
        assert!(CellIndex::new(&[-1, 0], &truncated).is_err());
    }

    #[test]
    fn signature_labels_roundtrip() {
        for dim in [2usize, 3] {
            for degree in 0..=dim {
                for sig in CellSignature::all_of_degree(dim, degree) {
                    let label = sig.label(dim);
                    assert_eq!(CellSignature::parse_label(&label, dim), Some(sig));
                }
            }
        }
        assert_eq!(CellSignature::parse_label("V", 3).map(|s| s.degree()), Some(3));
        assert_eq!(CellSignature::parse_label("e12", 2).map(|s| s.degree()), Some(2));
        assert_eq!(CellSignature::parse_label("e9", 3), None);
        assert_eq!(CellSignature::parse_label("", 3), None);
    }

    #[test]
    fn lattice_validation() {
        assert!(LatticeTopology::new(&[2], &[true]).is_err());
        assert!(LatticeTopology::new(&[2, 0], &[true, true]).is_err());
        assert!(LatticeTopology::new(&[2, 2, 2, 2], &[true; 4]).is_err());
    }

    /// The signed incidence rows of the boundary operator on one 3D cell:
    /// edges end minus start, faces alternate edge orientations, the
    /// volume collects its six faces with alternating signs.
    #[test]
    fn boundary_table_3d() {
        let topo = LatticeTopology::periodic(&[3, 3, 3]).unwrap();
        let at = |coords: &[i64]| CellIndex::new(coords, &topo).unwrap();
        let sig = CellSignature::from_axes;
        let coeff = |c: &Chain, s: CellSignature, coords: &[i64]| {
            c.coefficient(s, at(coords).coords())
        };

        // edge: far point minus near point
        let e1 = Chain::singleton(sig(&[0]), at(&[1, 1, 1]), 1.0);
        let de1 = e1.boundary(&topo);
        assert_eq!(de1.len(), 2);
        assert_eq!(coeff(&de1, sig(&[]), &[2, 1, 1]), 1.0);
        assert_eq!(coeff(&de1, sig(&[]), &[1, 1, 1]), -1.0);

        // face e12: +e2(τk) − e2 − e1(τs) + e1
        let f = Chain::singleton(sig(&[0, 1]), at(&[1, 1, 1]), 1.0);
        let df = f.boundary(&topo);
        assert_eq!(df.len(), 4);
        assert_eq!(coeff(&df, sig(&[1]), &[2, 1, 1]), 1.0);
        assert_eq!(coeff(&df, sig(&[1]), &[1, 1, 1]), -1.0);
        assert_eq!(coeff(&df, sig(&[0]), &[1, 2, 1]), -1.0);
        assert_eq!(coeff(&df, sig(&[0]), &[1, 1, 1]), 1.0);

        // volume: +e23(τk) − e23 − e13(τs) + e13 + e12(τm) − e12
        let v = Chain::singleton(sig(&[0, 1, 2]), at(&[1, 1, 1]), 1.0);
        let dv = v.boundary(&topo);
        assert_eq!(dv.len(), 6);
        assert_eq!(coeff(&dv, sig(&[1, 2]), &[2, 1, 1]), 1.0);
        assert_eq!(coeff(&dv, sig(&[1, 2]), &[1, 1, 1]), -1.0);
        assert_eq!(coeff(&dv, sig(&[0, 2]), &[1, 2, 1]), -1.0);
        assert_eq!(coeff(&dv, sig(&[0, 2]), &[1, 1, 1]), 1.0);
        assert_eq!(coeff(&dv, sig(&[0, 1]), &[1, 1, 2]), 1.0);
        assert_eq!(coeff(&dv, sig(&[0, 1]), &[1, 1, 1]), -1.0);

        // the eight corner terms of ∂∂V cancel pairwise
        assert!(dv.boundary(&topo).is_zero());

        // degree-0 chains and the zero chain have zero boundary
        let point = Chain::singleton(sig(&[]), at(&[0, 0, 0]), 3.0);
        assert!(point.boundary(&topo).is_zero());
        assert!(Chain::zero(2).boundary(&topo).is_zero());
    }

    #[test]
    fn chain_cancellation_is_eager() {
        let topo = LatticeTopology::torus_2x2();
        let sig = CellSignature::from_axes(&[0]);
        let idx = CellIndex::new(&[0, 0], &topo).unwrap();
        let mut chain = Chain::singleton(sig, idx.clone(), 2.0);
        chain.add_term(sig, idx, -2.0);
        assert!(chain.is_zero());
    }
}
