//! Partitioned surfaces and their first homology module.
//!
//! A partitioned surface is a genus-`g` surface with `n` labeled boundary
//! circles and a partition `P` of the labels. Its homology module `H1P` is
//! generated by closed classes (handle classes `a_i`, `b_i` and boundary
//! classes `beta_j`) together with arc classes between boundaries in a
//! common block, modulo one boundary-sum relation per block.
//!
//! Ambient coordinates are ordered `a1, b1, ..., ag, bg, beta_1, ...,
//! beta_n, h_2, ..., h_n`, where `h_j` is the class of an arc from the
//! anchor boundary (the smallest label) to boundary `j`; the anchor's own
//! arc is read as zero, so an arc between arbitrary same-block boundaries
//! `b, b'` is the difference `h_{b'} - h_b`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intlinalg::{
    self, inverse_unimodular, is_unimodular_summand, row_space_basis, smith_normal_form,
    solve, IntMatrix, SymplecticSpace, Vector,
};

pub type Label = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("unknown boundary label {0}")]
    UnknownLabel(Label),
    #[error("inadmissible-class")]
    InadmissibleClass,
    #[error("class is not closed: nonzero arc coordinates")]
    NotClosed,
    #[error("capping-model-broken: {0}")]
    CappingModelBroken(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coefficient out of range for JSON export")]
    CoefficientRange,
}

/// A genus-`g` surface with labeled boundary circles and a partition of
/// the labels. Labels and blocks are kept sorted so equal surfaces have
/// equal representations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionedSurface {
    #[serde(rename = "genus")]
    pub g: usize,
    #[serde(rename = "boundaries")]
    pub boundary_labels: Vec<Label>,
    pub partition: Vec<Vec<Label>>,
}

impl PartitionedSurface {
    pub fn new(
        g: usize,
        boundary_labels: Vec<Label>,
        partition: Vec<Vec<Label>>,
    ) -> Result<Self, SurfaceError> {
        let mut s = PartitionedSurface { g, boundary_labels, partition };
        s.normalize();
        s.validate()?;
        Ok(s)
    }

    /// Closed surface of genus `g`.
    pub fn closed(g: usize) -> Self {
        PartitionedSurface { g, boundary_labels: vec![], partition: vec![] }
    }

    /// Convenience constructor with boundaries labeled `1..=n`.
    pub fn with_partition(g: usize, partition: &[&[Label]]) -> Result<Self, SurfaceError> {
        let labels: Vec<Label> = {
            let mut all: Vec<Label> = partition.iter().flat_map(|b| b.iter().copied()).collect();
            all.sort_unstable();
            all
        };
        PartitionedSurface::new(g, labels, partition.iter().map(|b| b.to_vec()).collect())
    }

    pub fn normalize(&mut self) {
        self.boundary_labels.sort_unstable();
        for block in &mut self.partition {
            block.sort_unstable();
        }
        self.partition.sort_by_key(|b| b.first().copied());
    }

    pub fn validate(&self) -> Result<(), SurfaceError> {
        let mut seen = self.boundary_labels.clone();
        seen.dedup();
        if seen.len() != self.boundary_labels.len() {
            return Err(SurfaceError::InvalidSurface("duplicate boundary label".into()));
        }
        let mut covered: Vec<Label> = Vec::new();
        for block in &self.partition {
            if block.is_empty() {
                return Err(SurfaceError::InvalidSurface("empty partition block".into()));
            }
            covered.extend(block.iter().copied());
        }
        covered.sort_unstable();
        if covered != self.boundary_labels {
            return Err(SurfaceError::InvalidSurface(
                "partition does not cover the boundary labels exactly".into(),
            ));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.boundary_labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.len()
    }

    /// Dimension of the ambient coordinate space:
    /// `2g + n + max(n-1, 0)`.
    pub fn ambient_dim(&self) -> usize {
        2 * self.g + self.n() + self.n().saturating_sub(1)
    }

    /// Anchor boundary for arc coordinates: the smallest label.
    pub fn anchor(&self) -> Option<Label> {
        self.boundary_labels.first().copied()
    }

    /// Position of a label in the ordered boundary list.
    pub fn position(&self, label: Label) -> Result<usize, SurfaceError> {
        self.boundary_labels
            .iter()
            .position(|&l| l == label)
            .ok_or(SurfaceError::UnknownLabel(label))
    }

    pub fn block_of(&self, label: Label) -> Result<&[Label], SurfaceError> {
        self.partition
            .iter()
            .find(|b| b.contains(&label))
            .map(|b| b.as_slice())
            .ok_or(SurfaceError::UnknownLabel(label))
    }

    pub fn idx_a(&self, i: usize) -> usize {
        assert!(1 <= i && i <= self.g);
        2 * (i - 1)
    }

    pub fn idx_b(&self, i: usize) -> usize {
        assert!(1 <= i && i <= self.g);
        2 * (i - 1) + 1
    }

    pub fn idx_beta(&self, label: Label) -> Result<usize, SurfaceError> {
        Ok(2 * self.g + self.position(label)?)
    }

    /// Arc coordinate index; the anchor has no coordinate (its arc is 0).
    pub fn idx_h(&self, label: Label) -> Result<Option<usize>, SurfaceError> {
        let t = self.position(label)?;
        Ok(if t == 0 { None } else { Some(2 * self.g + self.n() + (t - 1)) })
    }

    fn unit(&self, idx: usize) -> Vector {
        let mut v = vec![BigInt::zero(); self.ambient_dim()];
        v[idx] = BigInt::one();
        v
    }

    pub fn class_a(&self, i: usize) -> Vector {
        self.unit(self.idx_a(i))
    }

    pub fn class_b(&self, i: usize) -> Vector {
        self.unit(self.idx_b(i))
    }

    pub fn class_beta(&self, label: Label) -> Result<Vector, SurfaceError> {
        Ok(self.unit(self.idx_beta(label)?))
    }

    /// Class of the arc from the anchor to `label` (zero for the anchor).
    pub fn class_h(&self, label: Label) -> Result<Vector, SurfaceError> {
        Ok(match self.idx_h(label)? {
            Some(idx) => self.unit(idx),
            None => vec![BigInt::zero(); self.ambient_dim()],
        })
    }

    /// Class of an arc from `from` to `to`: `h_to - h_from`.
    pub fn arc_class(&self, from: Label, to: Label) -> Result<Vector, SurfaceError> {
        let hf = self.class_h(from)?;
        let ht = self.class_h(to)?;
        Ok(ht.iter().zip(hf.iter()).map(|(t, f)| t - f).collect())
    }

    /// True iff all arc coordinates of `x` vanish.
    pub fn is_closed_class(&self, x: &[BigInt]) -> bool {
        x.len() == self.ambient_dim() && x[2 * self.g + self.n()..].iter().all(|c| c.is_zero())
    }

    /// The ambient intersection form: symplectic on handle pairs, and
    /// `omega(h_j, beta_j) = +1`, `omega(h_j, beta_anchor) = -1` for every
    /// non-anchor `j`. Boundary classes pair to zero with closed classes
    /// and arcs pair to zero with each other.
    pub fn omega_matrix(&self) -> IntMatrix {
        let dim = self.ambient_dim();
        let mut m = IntMatrix::zero(dim, dim);
        for i in 1..=self.g {
            m[(self.idx_a(i), self.idx_b(i))] = BigInt::one();
            m[(self.idx_b(i), self.idx_a(i))] = -BigInt::one();
        }
        let n = self.n();
        for t in 1..n {
            let h = 2 * self.g + n + (t - 1);
            let beta_t = 2 * self.g + t;
            let beta_anchor = 2 * self.g;
            m[(h, beta_t)] = BigInt::one();
            m[(beta_t, h)] = -BigInt::one();
            m[(h, beta_anchor)] = -BigInt::one();
            m[(beta_anchor, h)] = BigInt::one();
        }
        m
    }

    /// Euler characteristic `2 - 2g - n`.
    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.g as i64 - self.n() as i64
    }
}

/// A closed homology class: an ambient class with zero arc coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedClass {
    pub coords: Vector,
}

impl ClosedClass {
    pub fn new(surface: &PartitionedSurface, coords: Vector) -> Result<Self, SurfaceError> {
        if coords.len() != surface.ambient_dim() {
            return Err(SurfaceError::DimensionMismatch {
                expected: surface.ambient_dim(),
                got: coords.len(),
            });
        }
        if !surface.is_closed_class(&coords) {
            return Err(SurfaceError::NotClosed);
        }
        Ok(ClosedClass { coords })
    }

    pub fn zero(surface: &PartitionedSurface) -> Self {
        ClosedClass { coords: vec![BigInt::zero(); surface.ambient_dim()] }
    }
}

/// The homology module `H1P` of a partitioned surface, with canonical-form
/// machinery for its presentation (admissible generators modulo one
/// boundary-sum relation per block).
#[derive(Debug, Clone)]
pub struct H1PModule {
    pub surface: PartitionedSurface,
    omega: IntMatrix,
    /// Admissible generators as ambient vectors.
    pub admissible_generators: Vec<Vector>,
    /// One relation `R_p = sum of beta_j over j in p` per block.
    pub relation_classes: Vec<Vector>,
    /// Transpose of the span-basis matrix, for membership solves.
    span_t: IntMatrix,
    /// Change of basis diagonalizing the relation lattice.
    vprime_t: IntMatrix,
    rel_rank: usize,
    /// Ambient representatives of a free basis of the module.
    pub basis: Vec<Vector>,
    pub rank: usize,
}

/// Construct `H1P` for a surface. The module is always torsion-free with
/// rank `2g + 2(n - |P|)`; both facts are asserted during construction.
pub fn build_h1p(surface: &PartitionedSurface) -> H1PModule {
    let dim = surface.ambient_dim();
    let mut gens: Vec<Vector> = Vec::new();
    for i in 1..=surface.g {
        gens.push(surface.class_a(i));
        gens.push(surface.class_b(i));
    }
    for &label in &surface.boundary_labels {
        gens.push(surface.class_beta(label).unwrap());
    }
    for block in &surface.partition {
        for pair in block.windows(2) {
            gens.push(surface.arc_class(pair[0], pair[1]).unwrap());
        }
    }

    let mut gmat = IntMatrix::zero(gens.len(), dim);
    for (r, gen) in gens.iter().enumerate() {
        for (c, x) in gen.iter().enumerate() {
            gmat[(r, c)] = x.clone();
        }
    }
    let span = row_space_basis(&gmat);
    let r = span.len();
    let span_t = if r == 0 {
        IntMatrix::zero(dim, 0)
    } else {
        IntMatrix::from_rows(&span).transpose()
    };

    let mut relations: Vec<Vector> = Vec::new();
    for block in &surface.partition {
        let mut rel = vec![BigInt::zero(); dim];
        for &label in block {
            rel[surface.idx_beta(label).unwrap()] = BigInt::one();
        }
        relations.push(rel);
    }
    let mut k = IntMatrix::zero(relations.len(), r);
    for (row, rel) in relations.iter().enumerate() {
        let coords = solve(&span_t, rel).expect("relation lies in the admissible span");
        for (col, x) in coords.into_iter().enumerate() {
            k[(row, col)] = x;
        }
    }
    let snf = smith_normal_form(&k);
    let rel_rank = snf.rank();
    assert!(
        snf.invariants().iter().all(|d| d.is_one()),
        "H1P presentation has torsion"
    );
    let vprime = snf.v;
    let vprime_inv = inverse_unimodular(&vprime);
    let rank = r - rel_rank;
    assert_eq!(
        rank,
        2 * surface.g + 2 * (surface.n() - surface.num_blocks()),
        "H1P rank formula"
    );

    let mut basis = Vec::with_capacity(rank);
    for idx in rel_rank..r {
        // Row `idx` of V'^{-1} gives the span coordinates of the basis
        // element whose canonical form is a unit vector.
        let u = vprime_inv.row(idx);
        basis.push(span_t.mul_vec(&u));
    }

    H1PModule {
        surface: surface.clone(),
        omega: surface.omega_matrix(),
        admissible_generators: gens,
        relation_classes: relations,
        span_t,
        vprime_t: vprime.transpose(),
        rel_rank,
        basis,
        rank,
    }
}

impl H1PModule {
    pub fn ambient_dim(&self) -> usize {
        self.surface.ambient_dim()
    }

    /// Raw value of the ambient form on two coordinate vectors.
    pub fn omega(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let oy = self.omega.mul_vec(y);
        x.iter().zip(oy.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn is_admissible(&self, x: &[BigInt]) -> bool {
        x.len() == self.ambient_dim() && solve(&self.span_t, x).is_some()
    }

    /// Coordinates of `x` in the computed free basis. Two admissible
    /// classes have equal canonical forms iff they differ by an element
    /// of the relation lattice.
    pub fn canonical_form(&self, x: &[BigInt]) -> Result<Vector, SurfaceError> {
        if x.len() != self.ambient_dim() {
            return Err(SurfaceError::DimensionMismatch {
                expected: self.ambient_dim(),
                got: x.len(),
            });
        }
        let c = solve(&self.span_t, x).ok_or(SurfaceError::InadmissibleClass)?;
        let w = self.vprime_t.mul_vec(&c);
        Ok(w[self.rel_rank..].to_vec())
    }

    /// Pairing of an admissible class against a closed class. This is the
    /// ambient form evaluated on representatives; well-definedness on the
    /// quotient is a tested theorem, not an assumption.
    pub fn pairing(&self, x: &[BigInt], c: &ClosedClass) -> Result<BigInt, SurfaceError> {
        if !self.is_admissible(x) {
            return Err(SurfaceError::InadmissibleClass);
        }
        Ok(self.omega(x, &c.coords))
    }

    pub fn is_p_separating(&self, c: &ClosedClass) -> bool {
        self.canonical_form(&c.coords)
            .map(|cf| cf.iter().all(|x| x.is_zero()))
            .unwrap_or(false)
    }

    /// Homology-level bounding-pair test: equal (or opposite) nonzero
    /// canonical forms. Disjointness of representatives is a caller
    /// assertion.
    pub fn is_p_bounding_pair(&self, c1: &ClosedClass, c2: &ClosedClass) -> bool {
        let (Ok(f1), Ok(f2)) = (self.canonical_form(&c1.coords), self.canonical_form(&c2.coords))
        else {
            return false;
        };
        if f1.iter().all(|x| x.is_zero()) {
            return false;
        }
        let neg: Vector = f2.iter().map(|x| -x).collect();
        f1 == f2 || f1 == neg
    }
}

/// Delete boundary `b` from the partition: the surface obtained by capping
/// that boundary with a disc.
pub fn induced_partition_cap_boundary(
    surface: &PartitionedSurface,
    b: Label,
) -> Result<PartitionedSurface, SurfaceError> {
    surface.position(b)?;
    let labels: Vec<Label> =
        surface.boundary_labels.iter().copied().filter(|&l| l != b).collect();
    let partition: Vec<Vec<Label>> = surface
        .partition
        .iter()
        .map(|block| block.iter().copied().filter(|&l| l != b).collect::<Vec<_>>())
        .filter(|block: &Vec<Label>| !block.is_empty())
        .collect();
    PartitionedSurface::new(surface.g, labels, partition)
}

/// The standard capping: each block of size `k` is capped with a `k`-holed
/// sphere, contributing `k - 1` new handle pairs. The resulting closed
/// genus is `g' = g + sum (|p| - 1)`, and the homology map is an
/// isomorphism onto the standard symplectic lattice of rank `2g'`.
#[derive(Debug, Clone)]
pub struct CappingMap {
    pub source: PartitionedSurface,
    pub g_prime: usize,
    /// Matrix of the induced map from ambient coordinates to `Z^{2g'}`.
    pub matrix: IntMatrix,
    /// 1-based index of the first new handle pair of each block.
    pair_base: Vec<usize>,
}

impl CappingMap {
    pub fn target_space(&self) -> SymplecticSpace {
        SymplecticSpace::new(self.g_prime)
    }

    pub fn apply(&self, x: &[BigInt]) -> Vector {
        self.matrix.mul_vec(x)
    }

    /// The new handle pair `(a^p_t, b^p_t)` for block index `bi` and
    /// `t` in `1..=|p|-1`, as standard basis vectors of the target.
    pub fn new_pair(&self, bi: usize, t: usize) -> (Vector, Vector) {
        let block_len = self.source.partition[bi].len();
        assert!(1 <= t && t < block_len);
        let space = self.target_space();
        let pair = self.pair_base[bi] + (t - 1);
        (space.a(pair), space.b(pair))
    }
}

/// Build the standard capping and verify its defining invariants:
/// relations map to zero, the map is bijective on the module, and it
/// carries the ambient pairing to the symplectic form.
pub fn standard_capping(surface: &PartitionedSurface) -> Result<CappingMap, SurfaceError> {
    let g = surface.g;
    let extra: usize = surface.partition.iter().map(|p| p.len() - 1).sum();
    let g_prime = g + extra;
    let space = SymplecticSpace::new(g_prime);
    let dim = surface.ambient_dim();
    let mut m = IntMatrix::zero(2 * g_prime, dim);

    // Original handles map to themselves.
    for i in 1..=g {
        m[(2 * (i - 1), surface.idx_a(i))] = BigInt::one();
        m[(2 * (i - 1) + 1, surface.idx_b(i))] = BigInt::one();
    }

    let mut pair_base = Vec::with_capacity(surface.num_blocks());
    let mut next_pair = g + 1;
    for block in &surface.partition {
        pair_base.push(next_pair);
        next_pair += block.len() - 1;
    }

    let anchor = surface.anchor();
    for (bi, block) in surface.partition.iter().enumerate() {
        let k = block.len();
        let a_row = |t: usize| 2 * (pair_base[bi] + t - 1 - 1); // row of a^p_t
        let b_row = |t: usize| a_row(t) + 1;
        // beta_{j_t} -> a^p_t - a^p_{t-1}, with a^p_0 = a^p_k = 0.
        for (t0, &label) in block.iter().enumerate() {
            let t = t0 + 1;
            let col = surface.idx_beta(label)?;
            if t <= k - 1 {
                m[(a_row(t), col)] += BigInt::one();
            }
            if t >= 2 {
                m[(a_row(t - 1), col)] -= BigInt::one();
            }
        }
        // h_{j_t} -> b^p_1 + ... + b^p_{t-1}, offset so the anchor's
        // (virtual) arc maps to zero when the anchor lies in this block.
        let anchor_pos = anchor.and_then(|a| block.iter().position(|&l| l == a));
        for (t0, &label) in block.iter().enumerate() {
            let t = t0 + 1;
            let Some(col) = surface.idx_h(label)? else { continue };
            for s in 1..t {
                m[(b_row(s), col)] += BigInt::one();
            }
            if let Some(p0) = anchor_pos {
                let t_anchor = p0 + 1;
                for s in 1..t_anchor {
                    m[(b_row(s), col)] -= BigInt::one();
                }
            }
        }
    }

    let cap = CappingMap { source: surface.clone(), g_prime, matrix: m, pair_base };

    // Invariant 1: relations die.
    let module = build_h1p(surface);
    for rel in &module.relation_classes {
        if cap.apply(rel).iter().any(|x| !x.is_zero()) {
            return Err(SurfaceError::CappingModelBroken("relation does not map to zero".into()));
        }
    }
    // Invariant 2: bijective on the module (full-rank unimodular image).
    let images: Vec<Vector> = module.basis.iter().map(|b| cap.apply(b)).collect();
    if images.len() != 2 * g_prime || !is_unimodular_summand(&images) {
        return Err(SurfaceError::CappingModelBroken("module image is not a full basis".into()));
    }
    // Invariant 3: pairing compatibility against closed generators.
    let mut closed_gens: Vec<Vector> = Vec::new();
    for i in 1..=g {
        closed_gens.push(surface.class_a(i));
        closed_gens.push(surface.class_b(i));
    }
    for &label in &surface.boundary_labels {
        closed_gens.push(surface.class_beta(label)?);
    }
    for x in &module.admissible_generators {
        for c in &closed_gens {
            let lhs = module.omega(x, c);
            let rhs = intlinalg::symplectic_pairing(&cap.apply(x), &cap.apply(c), &space)
                .expect("capped dimensions agree");
            if lhs != rhs {
                return Err(SurfaceError::CappingModelBroken(
                    "pairing incompatibility on generators".into(),
                ));
            }
        }
    }
    Ok(cap)
}

/// JSON form of a homology class:
/// `{"a": [...], "b": [...], "beta": {label: coeff}, "h": {label: coeff}}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassJson {
    #[serde(default)]
    pub a: Vec<i64>,
    #[serde(default)]
    pub b: Vec<i64>,
    #[serde(default)]
    pub beta: BTreeMap<String, i64>,
    #[serde(default)]
    pub h: BTreeMap<String, i64>,
}

impl ClassJson {
    pub fn to_vector(&self, surface: &PartitionedSurface) -> Result<Vector, SurfaceError> {
        let mut v = vec![BigInt::zero(); surface.ambient_dim()];
        if self.a.len() > surface.g || self.b.len() > surface.g {
            return Err(SurfaceError::DimensionMismatch {
                expected: surface.g,
                got: self.a.len().max(self.b.len()),
            });
        }
        for (i, &c) in self.a.iter().enumerate() {
            v[surface.idx_a(i + 1)] = BigInt::from(c);
        }
        for (i, &c) in self.b.iter().enumerate() {
            v[surface.idx_b(i + 1)] = BigInt::from(c);
        }
        for (label, &c) in &self.beta {
            let label: Label = label
                .parse()
                .map_err(|_| SurfaceError::InvalidSurface(format!("bad label {label}")))?;
            v[surface.idx_beta(label)?] = BigInt::from(c);
        }
        for (label, &c) in &self.h {
            let label: Label = label
                .parse()
                .map_err(|_| SurfaceError::InvalidSurface(format!("bad label {label}")))?;
            match surface.idx_h(label)? {
                Some(idx) => v[idx] = BigInt::from(c),
                None => {
                    if c != 0 {
                        return Err(SurfaceError::InvalidSurface(
                            "anchor arc coordinate must be zero".into(),
                        ));
                    }
                }
            }
        }
        Ok(v)
    }

    pub fn from_vector(
        surface: &PartitionedSurface,
        v: &[BigInt],
    ) -> Result<ClassJson, SurfaceError> {
        if v.len() != surface.ambient_dim() {
            return Err(SurfaceError::DimensionMismatch {
                expected: surface.ambient_dim(),
                got: v.len(),
            });
        }
        let small = |x: &BigInt| x.to_i64().ok_or(SurfaceError::CoefficientRange);
        let mut out = ClassJson::default();
        for i in 1..=surface.g {
            out.a.push(small(&v[surface.idx_a(i)])?);
            out.b.push(small(&v[surface.idx_b(i)])?);
        }
        for &label in &surface.boundary_labels {
            let c = small(&v[surface.idx_beta(label)?])?;
            if c != 0 {
                out.beta.insert(label.to_string(), c);
            }
            if let Some(idx) = surface.idx_h(label)? {
                let c = small(&v[idx])?;
                if c != 0 {
                    out.h.insert(label.to_string(), c);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::vec_i64;

    fn surf(g: usize, blocks: &[&[Label]]) -> PartitionedSurface {
        PartitionedSurface::with_partition(g, blocks).unwrap()
    }

    #[test]
    fn rank_examples() {
        let s = surf(1, &[&[1, 2, 3], &[4, 5], &[6], &[7], &[8]]);
        assert_eq!(build_h1p(&s).rank, 8);
        assert_eq!(build_h1p(&PartitionedSurface::closed(2)).rank, 4);
        let s = surf(0, &[&[1, 2], &[3, 4]]);
        assert_eq!(build_h1p(&s).rank, 4);
    }

    #[test]
    fn rank_formula_small_sweep() {
        for g in 0..=2 {
            for (n, parts) in [
                (0usize, vec![vec![]]),
                (1, vec![vec![vec![1]]]),
                (3, vec![
                    vec![vec![1], vec![2], vec![3]],
                    vec![vec![1, 2], vec![3]],
                    vec![vec![1, 2, 3]],
                ]),
            ] {
                for p in &parts {
                    let s = PartitionedSurface::new(g, (1..=n as Label).collect(), p.clone())
                        .unwrap();
                    let m = build_h1p(&s);
                    assert_eq!(m.rank, 2 * g + 2 * (n - p.len()));
                }
            }
        }
    }

    #[test]
    fn canonical_form_basics() {
        let s = surf(0, &[&[1, 2], &[3, 4]]);
        let m = build_h1p(&s);
        for rel in &m.relation_classes {
            assert!(m.canonical_form(rel).unwrap().iter().all(|x| x.is_zero()));
        }
        // beta1 + beta2 is the first relation.
        let x: Vector = (0..s.ambient_dim())
            .map(|i| {
                if i == s.idx_beta(1).unwrap() || i == s.idx_beta(2).unwrap() {
                    BigInt::from(1)
                } else {
                    BigInt::from(0)
                }
            })
            .collect();
        assert!(m.canonical_form(&x).unwrap().iter().all(|c| c.is_zero()));

        // a1 stays nonzero for every partition of the same boundary.
        for blocks in [vec![vec![1, 2], vec![3, 4]], vec![vec![1, 3], vec![2, 4]],
                       vec![vec![1, 2, 3, 4]]] {
            let s = PartitionedSurface::new(1, vec![1, 2, 3, 4], blocks).unwrap();
            let m = build_h1p(&s);
            let cf = m.canonical_form(&s.class_a(1)).unwrap();
            assert!(cf.iter().any(|c| !c.is_zero()));
        }
    }

    #[test]
    fn canonical_form_detects_inadmissible() {
        // Arc from 1 to 3 crosses blocks of {{1,2},{3,4}}: inadmissible.
        let s = surf(0, &[&[1, 2], &[3, 4]]);
        let m = build_h1p(&s);
        let h3 = s.class_h(3).unwrap();
        assert_eq!(m.canonical_form(&h3), Err(SurfaceError::InadmissibleClass));
        // Same coordinates are admissible under the one-block partition.
        let s2 = surf(0, &[&[1, 2, 3, 4]]);
        let m2 = build_h1p(&s2);
        assert!(m2.canonical_form(&s2.class_h(3).unwrap()).is_ok());
    }

    #[test]
    fn pairing_examples() {
        let s = surf(1, &[&[1, 2]]);
        let m = build_h1p(&s);
        let b1 = ClosedClass::new(&s, s.class_b(1)).unwrap();
        assert_eq!(m.pairing(&s.class_a(1), &b1).unwrap(), BigInt::one());
        let beta2 = ClosedClass::new(&s, s.class_beta(2).unwrap()).unwrap();
        assert_eq!(m.pairing(&s.class_h(2).unwrap(), &beta2).unwrap(), BigInt::one());
    }

    #[test]
    fn pairing_arc_difference() {
        // omega(h4 - h3, beta1 + beta2) = 0: each term pairs only against
        // beta3/beta4/beta-anchor, and the anchor contributions cancel.
        let s = surf(0, &[&[1, 2], &[3, 4]]);
        let m = build_h1p(&s);
        let x = s.arc_class(3, 4).unwrap();
        let mut c = s.class_beta(1).unwrap();
        let beta2 = s.class_beta(2).unwrap();
        for (a, b) in c.iter_mut().zip(beta2.iter()) {
            *a += b;
        }
        let c = ClosedClass::new(&s, c).unwrap();
        assert_eq!(m.pairing(&x, &c).unwrap(), BigInt::zero());
    }

    #[test]
    fn pairing_well_defined_on_relations() {
        for s in [surf(0, &[&[1, 2], &[3, 4]]), surf(1, &[&[1, 2, 3]]), surf(2, &[&[1], &[2]])] {
            let m = build_h1p(&s);
            for rel in &m.relation_classes {
                let rel_c = ClosedClass::new(&s, rel.clone()).unwrap();
                for x in &m.admissible_generators {
                    assert_eq!(m.pairing(x, &rel_c).unwrap(), BigInt::zero());
                }
            }
        }
    }

    #[test]
    fn separating_examples() {
        let s = surf(0, &[&[1, 2], &[3, 4]]);
        let m = build_h1p(&s);
        let mut v = s.class_beta(1).unwrap();
        let b2 = s.class_beta(2).unwrap();
        for (a, b) in v.iter_mut().zip(b2.iter()) {
            *a += b;
        }
        assert!(m.is_p_separating(&ClosedClass::new(&s, v.clone()).unwrap()));

        let s2 = surf(0, &[&[1, 3], &[2, 4]]);
        let m2 = build_h1p(&s2);
        assert!(!m2.is_p_separating(&ClosedClass::new(&s2, v).unwrap()));

        assert!(m.is_p_separating(&ClosedClass::zero(&s)));
    }

    #[test]
    fn bounding_pair_examples() {
        let s = surf(1, &[&[1, 2], &[3, 4]]);
        let m = build_h1p(&s);
        let a1 = ClosedClass::new(&s, s.class_a(1)).unwrap();
        assert!(m.is_p_bounding_pair(&a1, &a1));

        let s2 = PartitionedSurface::closed(2);
        let m2 = build_h1p(&s2);
        let c1 = ClosedClass::new(&s2, s2.class_a(1)).unwrap();
        let c2 = ClosedClass::new(&s2, s2.class_a(2)).unwrap();
        assert!(!m2.is_p_bounding_pair(&c1, &c2));

        // beta2 and beta2 + beta3 + beta4 differ by the relation of {3,4}.
        let s = surf(0, &[&[1, 2], &[3, 4]]);
        let m = build_h1p(&s);
        let c1 = ClosedClass::new(&s, s.class_beta(2).unwrap()).unwrap();
        let mut v = s.class_beta(2).unwrap();
        for l in [3, 4] {
            let bl = s.class_beta(l).unwrap();
            for (a, b) in v.iter_mut().zip(bl.iter()) {
                *a += b;
            }
        }
        let c2 = ClosedClass::new(&s, v).unwrap();
        assert!(m.is_p_bounding_pair(&c1, &c2));
    }

    #[test]
    fn induced_partition_examples() {
        let s = surf(0, &[&[1, 2], &[3]]);
        let s2 = induced_partition_cap_boundary(&s, 2).unwrap();
        assert_eq!(s2.partition, vec![vec![1], vec![3]]);

        let s = surf(1, &[&[1]]);
        let s2 = induced_partition_cap_boundary(&s, 1).unwrap();
        assert_eq!(s2.n(), 0);
        assert!(s2.partition.is_empty());

        let s = surf(0, &[&[1, 2, 3]]);
        let s2 = induced_partition_cap_boundary(&s, 3).unwrap();
        assert_eq!(s2.partition, vec![vec![1, 2]]);

        assert!(induced_partition_cap_boundary(&s, 9).is_err());
    }

    #[test]
    fn standard_capping_examples() {
        let cap = standard_capping(&PartitionedSurface::closed(1)).unwrap();
        assert_eq!(cap.g_prime, 1);
        assert_eq!(cap.matrix, IntMatrix::identity(2));

        let s = surf(0, &[&[1, 2], &[3, 4]]);
        let cap = standard_capping(&s).unwrap();
        assert_eq!(cap.g_prime, 2);
        let (a11, _) = cap.new_pair(0, 1);
        let i_b1 = cap.apply(&s.class_beta(1).unwrap());
        let i_b2 = cap.apply(&s.class_beta(2).unwrap());
        assert_eq!(i_b1, a11);
        let neg: Vector = a11.iter().map(|x| -x).collect();
        assert_eq!(i_b2, neg);

        let s = surf(1, &[&[1, 2, 3], &[4, 5], &[6], &[7], &[8]]);
        let cap = standard_capping(&s).unwrap();
        assert_eq!(cap.g_prime, 4);
    }

    #[test]
    fn capping_injective_on_basis() {
        for s in [
            surf(0, &[&[1, 2], &[3, 4]]),
            surf(1, &[&[1, 2, 3]]),
            surf(2, &[&[1], &[2, 3]]),
        ] {
            let m = build_h1p(&s);
            let cap = standard_capping(&s).unwrap();
            let images: Vec<Vector> = m.basis.iter().map(|b| cap.apply(b)).collect();
            assert!(is_unimodular_summand(&images));
            assert_eq!(images.len(), 2 * cap.g_prime);
        }
    }

    #[test]
    fn surface_json_roundtrip() {
        let s = surf(1, &[&[1, 2], &[3]]);
        let txt = serde_json::to_string(&s).unwrap();
        let back: PartitionedSurface = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, s);
        let parsed: PartitionedSurface = serde_json::from_str(
            r#"{"genus":1,"boundaries":[1,2,3],"partition":[[1,2],[3]]}"#,
        )
        .unwrap();
        assert_eq!(parsed, s);
    }

    #[test]
    fn class_json_roundtrip() {
        let s = surf(1, &[&[1, 2], &[3]]);
        let mut v = s.class_a(1);
        let beta3 = s.class_beta(3).unwrap();
        let h2 = s.class_h(2).unwrap();
        for i in 0..v.len() {
            v[i] = &v[i] + &beta3[i] * BigInt::from(2) - &h2[i] * BigInt::from(5);
        }
        let j = ClassJson::from_vector(&s, &v).unwrap();
        assert_eq!(j.to_vector(&s).unwrap(), v);
        let txt = serde_json::to_string(&j).unwrap();
        let back: ClassJson = serde_json::from_str(&txt).unwrap();
        assert_eq!(back.to_vector(&s).unwrap(), v);
    }

    #[test]
    fn closed_class_rejects_arcs() {
        let s = surf(0, &[&[1, 2]]);
        let h2 = s.class_h(2).unwrap();
        assert_eq!(ClosedClass::new(&s, h2), Err(SurfaceError::NotClosed));
        assert!(ClosedClass::new(&s, s.class_beta(1).unwrap()).is_ok());
        assert_eq!(
            ClosedClass::new(&s, vec_i64(&[1])),
            Err(SurfaceError::DimensionMismatch { expected: 3, got: 1 })
        );
    }
}
