//! Discrete forms (cochains): one dense real array per cell signature.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use thiserror::Error;

use crate::lattice::{CellSignature, LatticeTopology};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("degree {degree} exceeds lattice dimension {dim}")]
    DegreeTooHigh { degree: usize, dim: usize },
    #[error("bad lattice description: {0}")]
    BadLattice(String),
    #[error("component `{label}` has length {got}, lattice holds {expected} cells")]
    BadComponentLength {
        label: String,
        got: usize,
        expected: usize,
    },
    #[error("missing component `{label}`")]
    MissingComponent { label: String },
    #[error("unknown component label `{label}` for degree {degree}")]
    UnknownComponent { label: String, degree: usize },
}

/// Degree-`r` cochain on a lattice: a dense `f64` array over all cells for
/// each signature of degree `r`.
///
/// Component reads through [`DiscreteForm::value`] take signed coordinates:
/// periodic axes wrap, truncated axes read zero outside the window. Writes
/// outside the window are dropped. Operator coefficients throughout the
/// calculus are integers, so identities on integer-valued forms hold exactly
/// in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteForm {
    topo: LatticeTopology,
    degree: usize,
    /// Aligned with `CellSignature::all_of_degree(dim, degree)`.
    components: Vec<Vec<f64>>,
}

impl DiscreteForm {
    pub fn zero(topo: &LatticeTopology, degree: usize) -> Self {
        assert!(
            degree <= topo.dimension(),
            "degree {degree} exceeds dimension {}",
            topo.dimension()
        );
        let n = topo.cell_count();
        let sigs = CellSignature::all_of_degree(topo.dimension(), degree);
        DiscreteForm {
            topo: topo.clone(),
            degree,
            components: vec![vec![0.0; n]; sigs.len()],
        }
    }

    /// Build componentwise from a function of (signature, coordinates).
    pub fn from_fn(
        topo: &LatticeTopology,
        degree: usize,
        mut f: impl FnMut(CellSignature, &[usize]) -> f64,
    ) -> Self {
        let mut out = Self::zero(topo, degree);
        for sig in out.signatures() {
            for ix in topo.cells() {
                let coords = topo.coords_of(ix);
                let v = f(sig, &coords);
                out.component_mut(sig)[ix] = v;
            }
        }
        out
    }

    /// Uniform random components in [-1, 1).
    pub fn random(topo: &LatticeTopology, degree: usize, rng: &mut impl Rng) -> Self {
        Self::from_fn(topo, degree, |_, _| rng.gen_range(-1.0..1.0))
    }

    /// Random integer-valued components in [-max_abs, max_abs].
    ///
    /// Integer-valued forms make the operator identities exact in `f64`;
    /// the randomized verification suite leans on this.
    pub fn random_integer(
        topo: &LatticeTopology,
        degree: usize,
        rng: &mut impl Rng,
        max_abs: i64,
    ) -> Self {
        Self::from_fn(topo, degree, |_, _| {
            rng.gen_range(-max_abs..=max_abs) as f64
        })
    }

    pub fn topology(&self) -> &LatticeTopology {
        &self.topo
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.topo.dimension()
    }

    /// Signatures of this form's degree, in storage order.
    pub fn signatures(&self) -> Vec<CellSignature> {
        CellSignature::all_of_degree(self.topo.dimension(), self.degree)
    }

    fn signature_slot(&self, sig: CellSignature) -> usize {
        let sigs = self.signatures();
        sigs.iter()
            .position(|&s| s == sig)
            .unwrap_or_else(|| panic!("signature {sig} is not of degree {}", self.degree))
    }

    pub fn component(&self, sig: CellSignature) -> &[f64] {
        &self.components[self.signature_slot(sig)]
    }

    pub fn component_mut(&mut self, sig: CellSignature) -> &mut [f64] {
        let slot = self.signature_slot(sig);
        &mut self.components[slot]
    }

    /// Component value at signed coordinates (wrapping / zero-extension).
    pub fn value(&self, sig: CellSignature, coords: &[i64]) -> f64 {
        match self.topo.canonicalize(coords) {
            Some(c) => self.component(sig)[self.topo.linear_index(&c)],
            None => 0.0,
        }
    }

    /// Component value at a linear cell index.
    pub fn value_at(&self, slot: usize, ix: usize) -> f64 {
        self.components[slot][ix]
    }

    pub fn set(&mut self, sig: CellSignature, coords: &[usize], v: f64) {
        let ix = self.topo.linear_index(coords);
        self.component_mut(sig)[ix] = v;
    }

    /// Accumulate into signed coordinates; writes outside a truncated
    /// window are dropped.
    pub fn accumulate(&mut self, sig: CellSignature, coords: &[i64], v: f64) {
        if let Some(c) = self.topo.canonicalize(coords) {
            let ix = self.topo.linear_index(&c);
            self.component_mut(sig)[ix] += v;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for comp in &mut self.components {
            for v in comp {
                *v *= a;
            }
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &DiscreteForm) {
        assert_eq!(self.degree, other.degree);
        assert_eq!(self.topo, other.topo);
        for (dst, src) in self.components.iter_mut().zip(&other.components) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += a * s;
            }
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &DiscreteForm) -> f64 {
        assert_eq!(self.degree, other.degree);
        assert_eq!(self.topo, other.topo);
        self.components
            .iter()
            .zip(&other.components)
            .flat_map(|(a, b)| a.iter().zip(b.iter()))
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.iter().all(|&v| v == 0.0))
    }

    /// Flatten to one vector: signatures in storage order, cells row-major.
    pub fn flatten(&self) -> Vec<f64> {
        self.components.concat()
    }

    pub fn from_flat(
        topo: &LatticeTopology,
        degree: usize,
        flat: &[f64],
    ) -> Result<Self, FormError> {
        let mut out = Self::zero(topo, degree);
        let n = topo.cell_count();
        let expected = out.components.len() * n;
        if flat.len() != expected {
            return Err(FormError::BadComponentLength {
                label: "flat".into(),
                got: flat.len(),
                expected,
            });
        }
        for (slot, comp) in out.components.iter_mut().enumerate() {
            comp.copy_from_slice(&flat[slot * n..(slot + 1) * n]);
        }
        Ok(out)
    }

    pub fn to_payload(&self) -> FormPayload {
        let dim = self.topo.dimension();
        let mut components = BTreeMap::new();
        for sig in self.signatures() {
            components.insert(sig.label(dim), self.component(sig).to_vec());
        }
        FormPayload {
            degree: self.degree,
            extents: self.topo.extents().to_vec(),
            periodic: self.topo.periodic_flags().to_vec(),
            components,
        }
    }

    pub fn from_payload(payload: &FormPayload) -> Result<Self, FormError> {
        let topo = LatticeTopology::new(&payload.extents, &payload.periodic)
            .map_err(|e| FormError::BadLattice(e.to_string()))?;
        let dim = topo.dimension();
        if payload.degree > dim {
            return Err(FormError::DegreeTooHigh {
                degree: payload.degree,
                dim,
            });
        }
        let mut out = Self::zero(&topo, payload.degree);
        let valid: Vec<String> = out.signatures().iter().map(|s| s.label(dim)).collect();
        for label in payload.components.keys() {
            let sig = CellSignature::parse_label(label, dim);
            let ok = sig.is_some_and(|s| s.degree() == payload.degree);
            if !ok {
                return Err(FormError::UnknownComponent {
                    label: label.clone(),
                    degree: payload.degree,
                });
            }
        }
        for sig in out.signatures() {
            let label = sig.label(dim);
            let values = payload
                .components
                .get(&label)
                .ok_or_else(|| FormError::MissingComponent {
                    label: label.clone(),
                })?;
            if values.len() != topo.cell_count() {
                return Err(FormError::BadComponentLength {
                    label,
                    got: values.len(),
                    expected: topo.cell_count(),
                });
            }
            out.component_mut(sig).copy_from_slice(values);
        }
        debug_assert_eq!(valid.len(), payload.components.len());
        Ok(out)
    }
}

/// JSON-facing shape of a discrete form: degree, lattice description and one
/// flat row-major array per signature label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormPayload {
    pub degree: usize,
    pub extents: Vec<usize>,
    pub periodic: Vec<bool>,
    pub components: BTreeMap<String, Vec<f64>>,
}

impl Add for &DiscreteForm {
    type Output = DiscreteForm;
    fn add(self, rhs: &DiscreteForm) -> DiscreteForm {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &DiscreteForm {
    type Output = DiscreteForm;
    fn sub(self, rhs: &DiscreteForm) -> DiscreteForm {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl AddAssign<&DiscreteForm> for DiscreteForm {
    fn add_assign(&mut self, rhs: &DiscreteForm) {
        self.axpy(1.0, rhs);
    }
}

impl Mul<&DiscreteForm> for f64 {
    type Output = DiscreteForm;
    fn mul(self, rhs: &DiscreteForm) -> DiscreteForm {
        rhs.scaled(self)
    }
}

impl Neg for &DiscreteForm {
    type Output = DiscreteForm;
    fn neg(self) -> DiscreteForm {
        self.scaled(-1.0)
    }
}
