//! The simplicial complex of unimodular isotropic lines.
//!
//! Vertices are rank-1 direct summands of the standard symplectic lattice
//! `Z^{2g}`; a set of lines spans a simplex when the lines are pairwise
//! orthogonal under the form and jointly span a direct summand. On top of
//! the plain complex sit the augmented triangles
//! `<v1> - <±v1 ± v2> - <v2>`, which carry the 2-cells used by the
//! contraction moves.
//!
//! The infinite complex is only ever observed through finite slices: all
//! canonical representatives with sup-norm at most a bound, optionally
//! restricted to a fixed submodule. For a rank-2 isotropic submodule the
//! slice is a window onto the Farey tessellation, and this module carries
//! the explicit comparison.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intlinalg::{
    canonical_line, complete_symplectic_basis, is_unimodular_summand, smith_normal_form,
    symplectic_pairing, IntMatrix, LinalgError, SymplecticSpace, Vector,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("line is not a vertex of the slice")]
    MissingVertex,
    #[error("not a simplex")]
    NotASimplex,
    #[error("submodule is not a rank-2 isotropic summand")]
    BadFareyModule,
    #[error("invalid submodule basis: {0}")]
    BadSubmodule(String),
}

/// A line: the canonical primitive representative of a rank-1 summand.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Line {
    rep: Vector,
}

impl Line {
    pub fn new(v: &[BigInt]) -> Result<Self, ComplexError> {
        Ok(Line { rep: canonical_line(v)? })
    }

    pub fn from_i64(v: &[i64]) -> Result<Self, ComplexError> {
        Line::new(&v.iter().map(|&x| BigInt::from(x)).collect::<Vector>())
    }

    pub fn rep(&self) -> &Vector {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.len()
    }

    /// `Rk_x(L)`: absolute value of one coordinate of the representative.
    pub fn rank_at(&self, index: usize) -> BigInt {
        self.rep[index].abs()
    }

    pub fn sup_norm(&self) -> BigInt {
        self.rep.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
    }
}

/// A simplex: a sorted set of pairwise-compatible lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoSimplex {
    pub lines: Vec<Line>,
}

impl IsoSimplex {
    pub fn new(mut lines: Vec<Line>, g: usize) -> Result<Self, ComplexError> {
        lines.sort();
        lines.dedup();
        if !is_simplex(&lines, g) {
            return Err(ComplexError::NotASimplex);
        }
        Ok(IsoSimplex { lines })
    }
}

/// Fast unimodular-summand test for a pair of vectors: the product of the
/// two Smith invariants is the gcd of the 2x2 minors, so the pair spans a
/// summand iff that gcd is 1.
fn pair_is_summand(u: &[BigInt], v: &[BigInt]) -> bool {
    let mut acc = BigInt::zero();
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            let minor = &u[i] * &v[j] - &u[j] * &v[i];
            acc = acc.gcd(&minor);
            if acc.is_one() {
                return true;
            }
        }
    }
    false
}

/// True iff the lines span an isotropic direct summand of rank equal to
/// their number: pairwise form-values zero and all Smith invariants 1.
pub fn is_simplex(lines: &[Line], g: usize) -> bool {
    let space = SymplecticSpace::new(g);
    for (i, x) in lines.iter().enumerate() {
        if x.dim() != 2 * g {
            return false;
        }
        for y in &lines[i + 1..] {
            if x == y {
                return false;
            }
            match symplectic_pairing(x.rep(), y.rep(), &space) {
                Ok(p) if p.is_zero() => {}
                _ => return false,
            }
        }
    }
    match lines.len() {
        0 | 1 => true, // canonical representatives are primitive
        2 => pair_is_summand(lines[0].rep(), lines[1].rep()),
        _ => {
            let stacked: Vec<Vector> = lines.iter().map(|l| l.rep().clone()).collect();
            is_unimodular_summand(&stacked)
        }
    }
}

/// An augmented triangle `x - m - y`: `{x, y}` is an edge and `m` is the
/// line of `x ± y`.
pub fn is_aug_triangle(x: &Line, m: &Line, y: &Line) -> bool {
    let g = x.dim() / 2;
    if !is_simplex(&[x.clone(), y.clone()], g) {
        return false;
    }
    for sign in [BigInt::one(), -BigInt::one()] {
        let cand: Vector =
            x.rep().iter().zip(y.rep().iter()).map(|(a, b)| a + &sign * b).collect();
        if let Ok(c) = canonical_line(&cand) {
            if &c == m.rep() {
                return true;
            }
        }
    }
    false
}

/// A basis of a direct-summand submodule, with a left inverse for
/// coordinate extraction and membership tests.
#[derive(Debug, Clone)]
pub struct Submodule {
    /// Basis vectors as columns of `m`.
    m: IntMatrix,
    /// `l * m = identity`.
    l: IntMatrix,
}

impl Submodule {
    pub fn new(basis: &[Vector]) -> Result<Self, ComplexError> {
        if basis.is_empty() {
            return Err(ComplexError::BadSubmodule("empty basis".into()));
        }
        if !is_unimodular_summand(basis) {
            return Err(ComplexError::BadSubmodule("basis does not span a summand".into()));
        }
        let m = IntMatrix::from_rows(basis).transpose();
        let snf = smith_normal_form(&m);
        let k = basis.len();
        let mut dplus = IntMatrix::zero(k, m.rows);
        for i in 0..k {
            dplus[(i, i)] = BigInt::one();
        }
        let l = snf.v.mul(&dplus).mul(&snf.u);
        Ok(Submodule { m, l })
    }

    pub fn rank(&self) -> usize {
        self.m.cols
    }

    pub fn ambient_dim(&self) -> usize {
        self.m.rows
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        self.m.col(i)
    }

    /// Coordinates of `x` in the basis, if `x` lies in the submodule.
    pub fn coordinates(&self, x: &[BigInt]) -> Option<Vector> {
        let c = self.l.mul_vec(x);
        if self.m.mul_vec(&c) == x { Some(c) } else { None }
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.coordinates(x).is_some()
    }

    pub fn from_coordinates(&self, c: &[BigInt]) -> Vector {
        self.m.mul_vec(c)
    }

    /// Sup-norm bound on coordinates of submodule vectors of sup-norm
    /// at most `b`: per-row l1-norms of the left inverse times `b`.
    fn coordinate_bounds(&self, b: u64) -> Vec<i64> {
        (0..self.l.rows)
            .map(|i| {
                let norm: BigInt =
                    (0..self.l.cols).map(|j| self.l[(i, j)].abs()).sum();
                (norm * b).to_i64().expect("coordinate bound fits in i64")
            })
            .collect()
    }
}

/// A finite window onto the complex: all vertices of sup-norm at most
/// `bound` (inside `w` when given), with every edge, triangle, and
/// augmented triangle among them.
#[derive(Debug, Clone)]
pub struct ComplexSlice {
    pub g: usize,
    pub bound: u64,
    pub w: Option<Vec<Vector>>,
    pub vertices: Vec<Line>,
    pub edges: Vec<(usize, usize)>,
    pub triangles: Vec<(usize, usize, usize)>,
    /// `(x, mid, y)` with `x < y` as vertex indices.
    pub aug_triangles: Vec<(usize, usize, usize)>,
    index: BTreeMap<Line, usize>,
}

impl ComplexSlice {
    pub fn vertex_index(&self, line: &Line) -> Option<usize> {
        self.index.get(line).copied()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for &(a, b) in &self.edges {
            if a == v {
                out.push(b);
            } else if b == v {
                out.push(a);
            }
        }
        out
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (a, b) = (a.min(b), a.max(b));
        self.edges.binary_search(&(a, b)).is_ok()
    }
}

fn odometer(bounds: &[i64], mut visit: impl FnMut(&[i64])) {
    let k = bounds.len();
    let mut cur: Vec<i64> = bounds.iter().map(|&b| -b).collect();
    if k == 0 {
        return;
    }
    loop {
        visit(&cur);
        let mut i = 0;
        loop {
            cur[i] += 1;
            if cur[i] <= bounds[i] {
                break;
            }
            cur[i] = -bounds[i];
            i += 1;
            if i == k {
                return;
            }
        }
    }
}

/// Assemble a slice from explicit cell lists, checking that every listed
/// cell passes its validity predicate.
pub fn assemble_slice(
    g: usize,
    bound: u64,
    vertices: Vec<Line>,
    edges: Vec<(usize, usize)>,
    triangles: Vec<(usize, usize, usize)>,
    aug_triangles: Vec<(usize, usize, usize)>,
) -> Result<ComplexSlice, ComplexError> {
    let index: BTreeMap<Line, usize> =
        vertices.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
    if index.len() != vertices.len() {
        return Err(ComplexError::BadSubmodule("duplicate vertices".into()));
    }
    for &(a, b) in &edges {
        if !is_simplex(&[vertices[a].clone(), vertices[b].clone()], g) {
            return Err(ComplexError::NotASimplex);
        }
    }
    for &(a, b, c) in &triangles {
        if !is_simplex(&[vertices[a].clone(), vertices[b].clone(), vertices[c].clone()], g) {
            return Err(ComplexError::NotASimplex);
        }
    }
    for &(x, m, y) in &aug_triangles {
        if !is_aug_triangle(&vertices[x], &vertices[m], &vertices[y]) {
            return Err(ComplexError::NotASimplex);
        }
    }
    let mut edges = edges;
    edges.sort_unstable();
    Ok(ComplexSlice { g, bound, w: None, vertices, edges, triangles, aug_triangles, index })
}

/// Enumerate the slice of the complex at the given bound, optionally
/// restricted to the submodule spanned by `w`.
pub fn enumerate_slice(
    g: usize,
    bound: u64,
    w: Option<&[Vector]>,
) -> Result<ComplexSlice, ComplexError> {
    assert!(bound >= 1, "slice bound must be at least 1");
    let dim = 2 * g;
    let bound_big = BigInt::from(bound);
    let mut set: BTreeSet<Line> = BTreeSet::new();

    match w {
        None => {
            odometer(&vec![bound as i64; dim], |c| {
                if c.iter().all(|&x| x == 0) {
                    return;
                }
                let v: Vector = c.iter().map(|&x| BigInt::from(x)).collect();
                let line = Line::new(&v).expect("nonzero");
                if line.sup_norm() <= bound_big {
                    set.insert(line);
                }
            });
        }
        Some(basis) => {
            let sub = Submodule::new(basis)?;
            if sub.ambient_dim() != dim {
                return Err(ComplexError::BadSubmodule("wrong ambient dimension".into()));
            }
            let bounds = sub.coordinate_bounds(bound);
            odometer(&bounds, |c| {
                if c.iter().all(|&x| x == 0) {
                    return;
                }
                let coords: Vector = c.iter().map(|&x| BigInt::from(x)).collect();
                let v = sub.from_coordinates(&coords);
                if v.iter().all(|x| x.is_zero()) {
                    return;
                }
                let line = Line::new(&v).expect("nonzero");
                if line.sup_norm() <= bound_big {
                    set.insert(line);
                }
            });
        }
    }

    let vertices: Vec<Line> = set.into_iter().collect();
    let index: BTreeMap<Line, usize> =
        vertices.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();

    let mut edges = Vec::new();
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            if is_simplex(&[vertices[i].clone(), vertices[j].clone()], g) {
                edges.push((i, j));
            }
        }
    }

    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); vertices.len()];
    for &(a, b) in &edges {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut triangles = Vec::new();
    for &(a, b) in &edges {
        for &c in adj[a].intersection(&adj[b]) {
            if c > b
                && is_simplex(&[vertices[a].clone(), vertices[b].clone(), vertices[c].clone()], g)
            {
                triangles.push((a, b, c));
            }
        }
    }

    let mut aug_triangles = Vec::new();
    for &(a, b) in &edges {
        for sign in [1i64, -1] {
            let mid: Vector = vertices[a]
                .rep()
                .iter()
                .zip(vertices[b].rep().iter())
                .map(|(x, y)| x + BigInt::from(sign) * y)
                .collect();
            if let Ok(line) = Line::new(&mid) {
                if let Some(&m) = index.get(&line) {
                    aug_triangles.push((a, m, b));
                }
            }
        }
    }
    aug_triangles.sort_unstable();
    aug_triangles.dedup();

    Ok(ComplexSlice { g, bound, w: w.map(|b| b.to_vec()), vertices, edges, triangles, aug_triangles, index })
}

/// The link of a vertex inside a slice: all vertices and edges whose
/// union with the vertex is still a simplex.
pub fn link_of(line: &Line, slice: &ComplexSlice) -> Result<ComplexSlice, ComplexError> {
    let center = slice.vertex_index(line).ok_or(ComplexError::MissingVertex)?;
    let g = slice.g;
    let keep: Vec<usize> = (0..slice.vertices.len())
        .filter(|&i| {
            i != center && is_simplex(&[slice.vertices[i].clone(), line.clone()], g)
        })
        .collect();
    let remap: BTreeMap<usize, usize> =
        keep.iter().copied().enumerate().map(|(new, old)| (old, new)).collect();
    let vertices: Vec<Line> = keep.iter().map(|&i| slice.vertices[i].clone()).collect();
    let index: BTreeMap<Line, usize> =
        vertices.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
    let mut edges = Vec::new();
    for &(a, b) in &slice.edges {
        if let (Some(&na), Some(&nb)) = (remap.get(&a), remap.get(&b)) {
            if is_simplex(
                &[slice.vertices[a].clone(), slice.vertices[b].clone(), line.clone()],
                g,
            ) {
                edges.push((na.min(nb), na.max(nb)));
            }
        }
    }
    edges.sort_unstable();
    let mut triangles = Vec::new();
    for &(a, b, c) in &slice.triangles {
        if let (Some(&na), Some(&nb), Some(&nc)) =
            (remap.get(&a), remap.get(&b), remap.get(&c))
        {
            let mut ls: Vec<Line> = vec![
                slice.vertices[a].clone(),
                slice.vertices[b].clone(),
                slice.vertices[c].clone(),
                line.clone(),
            ];
            ls.sort();
            if is_simplex(&ls, g) {
                let mut t = [na, nb, nc];
                t.sort_unstable();
                triangles.push((t[0], t[1], t[2]));
            }
        }
    }
    Ok(ComplexSlice {
        g,
        bound: slice.bound,
        w: slice.w.clone(),
        vertices,
        edges,
        triangles,
        aug_triangles: vec![],
        index,
    })
}

/// Realize a simplex as the first `a`-vectors of a full symplectic basis.
pub fn realize_simplex_as_basis(s: &IsoSimplex, g: usize) -> Result<Vec<Vector>, ComplexError> {
    if !is_simplex(&s.lines, g) {
        return Err(ComplexError::NotASimplex);
    }
    let partial: Vec<Vector> = s.lines.iter().map(|l| l.rep().clone()).collect();
    complete_symplectic_basis(&partial, &[], g).map_err(ComplexError::from)
}

/// A vertex of the Farey tessellation: a canonical coprime pair `(a, b)`
/// representing the slope `b/a` in `Q ∪ {∞}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FareyVertex {
    pub a: BigInt,
    pub b: BigInt,
}

impl FareyVertex {
    pub fn new(a: BigInt, b: BigInt) -> Result<Self, ComplexError> {
        let c = canonical_line(&[a, b])?;
        Ok(FareyVertex { a: c[0].clone(), b: c[1].clone() })
    }

    pub fn from_i64(a: i64, b: i64) -> Result<Self, ComplexError> {
        FareyVertex::new(BigInt::from(a), BigInt::from(b))
    }

    pub fn mediant(&self, other: &FareyVertex) -> Result<FareyVertex, ComplexError> {
        FareyVertex::new(&self.a + &other.a, &self.b + &other.b)
    }
}

impl std::fmt::Display for FareyVertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.b, self.a)
    }
}

/// Farey edge: `|a d - b c| = 1`.
pub fn farey_adjacent(u: &FareyVertex, v: &FareyVertex) -> bool {
    (&u.a * &v.b - &u.b * &v.a).abs().is_one()
}

/// Farey triangle: pairwise edges.
pub fn farey_triangle(u: &FareyVertex, v: &FareyVertex, w: &FareyVertex) -> bool {
    farey_adjacent(u, v) && farey_adjacent(v, w) && farey_adjacent(u, w)
}

/// Outcome of comparing a rank-2 isotropic slice against the Farey
/// tessellation window of the same bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FareyIsoReport {
    pub bound: u64,
    pub vertex_count: usize,
    pub farey_vertex_count: usize,
    pub edge_count: usize,
    pub aug_triangle_count: usize,
    pub vertex_mismatches: usize,
    pub edge_mismatches: usize,
    pub triangle_mismatches: usize,
}

impl FareyIsoReport {
    pub fn ok(&self) -> bool {
        self.vertex_mismatches == 0 && self.edge_mismatches == 0 && self.triangle_mismatches == 0
    }
}

/// Compare the slice of the complex inside a rank-2 isotropic summand
/// with the Farey tessellation: the coordinate map must carry vertices to
/// vertices, edges to edges, and augmented triangles to Farey triangles,
/// bijectively at every bound.
pub fn farey_iso_check(
    g: usize,
    w_basis: &[Vector],
    bound: u64,
) -> Result<FareyIsoReport, ComplexError> {
    if w_basis.len() != 2 {
        return Err(ComplexError::BadFareyModule);
    }
    let space = SymplecticSpace::new(g);
    let p = symplectic_pairing(&w_basis[0], &w_basis[1], &space)?;
    if !p.is_zero() || !is_unimodular_summand(w_basis) {
        return Err(ComplexError::BadFareyModule);
    }
    let sub = Submodule::new(w_basis)?;
    let slice = enumerate_slice(g, bound, Some(w_basis))?;

    // Coordinate map onto Farey vertices.
    let mut images: Vec<FareyVertex> = Vec::with_capacity(slice.vertices.len());
    for v in &slice.vertices {
        let c = sub.coordinates(v.rep()).ok_or(ComplexError::BadFareyModule)?;
        images.push(FareyVertex::new(c[0].clone(), c[1].clone())?);
    }

    // Farey vertices within the bound, from coprime-pair enumeration.
    let mut farey: BTreeSet<FareyVertex> = BTreeSet::new();
    let bb = bound as i64;
    for a in -bb..=bb {
        for b in -bb..=bb {
            if a == 0 && b == 0 {
                continue;
            }
            let v = FareyVertex::from_i64(a, b).unwrap();
            if v.a.abs() <= BigInt::from(bound) && v.b.abs() <= BigInt::from(bound) {
                farey.insert(v);
            }
        }
    }

    let image_set: BTreeSet<FareyVertex> = images.iter().cloned().collect();
    let mut vertex_mismatches = image_set.symmetric_difference(&farey).count();
    if image_set.len() != images.len() {
        vertex_mismatches += images.len() - image_set.len();
    }

    // Edges both ways.
    let mut edge_mismatches = 0;
    for i in 0..slice.vertices.len() {
        for j in i + 1..slice.vertices.len() {
            let complex_edge = slice.has_edge(i, j);
            let farey_edge = farey_adjacent(&images[i], &images[j]);
            if complex_edge != farey_edge {
                edge_mismatches += 1;
            }
        }
    }

    // Augmented triangles against Farey triangles. A Farey triangle on an
    // edge {u, v} has third vertex ±u ± v (2x2 determinant algebra), so
    // enumeration over edges is complete.
    let mut aug_set: BTreeSet<Vec<FareyVertex>> = BTreeSet::new();
    for &(x, m, y) in &slice.aug_triangles {
        let mut t = vec![images[x].clone(), images[m].clone(), images[y].clone()];
        t.sort();
        aug_set.insert(t);
    }
    let mut farey_tris: BTreeSet<Vec<FareyVertex>> = BTreeSet::new();
    let farey_vec: Vec<FareyVertex> = farey.iter().cloned().collect();
    for i in 0..farey_vec.len() {
        for j in i + 1..farey_vec.len() {
            let (u, v) = (&farey_vec[i], &farey_vec[j]);
            if !farey_adjacent(u, v) {
                continue;
            }
            for sign in [1i64, -1] {
                let wa = &u.a + BigInt::from(sign) * &v.a;
                let wb = &u.b + BigInt::from(sign) * &v.b;
                if wa.is_zero() && wb.is_zero() {
                    continue;
                }
                let w = FareyVertex::new(wa, wb).unwrap();
                if farey.contains(&w) && farey_triangle(u, v, &w) {
                    let mut t = vec![u.clone(), v.clone(), w];
                    t.sort();
                    farey_tris.insert(t);
                }
            }
        }
    }
    let triangle_mismatches = aug_set.symmetric_difference(&farey_tris).count();

    Ok(FareyIsoReport {
        bound,
        vertex_count: slice.vertices.len(),
        farey_vertex_count: farey.len(),
        edge_count: slice.edges.len(),
        aug_triangle_count: slice.aug_triangles.len(),
        vertex_mismatches,
        edge_mismatches,
        triangle_mismatches,
    })
}

/// JSON export of a slice, with vertices in lexicographic order of their
/// canonical representatives (the construction order).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SliceJson {
    pub g: usize,
    pub bound: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<Vec<i64>>>,
    pub vertices: Vec<Vec<i64>>,
    pub edges: Vec<(usize, usize)>,
    pub triangles: Vec<(usize, usize, usize)>,
    pub aug_triangles: Vec<(usize, usize, usize)>,
}

impl SliceJson {
    pub fn from_slice(slice: &ComplexSlice) -> Result<SliceJson, ComplexError> {
        let small = |v: &Vector| -> Result<Vec<i64>, ComplexError> {
            v.iter()
                .map(|x| {
                    x.to_i64().ok_or(ComplexError::BadSubmodule(
                        "coordinate out of export range".into(),
                    ))
                })
                .collect()
        };
        Ok(SliceJson {
            g: slice.g,
            bound: slice.bound,
            w: match &slice.w {
                Some(basis) => {
                    Some(basis.iter().map(|v| small(v)).collect::<Result<_, _>>()?)
                }
                None => None,
            },
            vertices: slice
                .vertices
                .iter()
                .map(|l| small(l.rep()))
                .collect::<Result<_, _>>()?,
            edges: slice.edges.clone(),
            triangles: slice.triangles.clone(),
            aug_triangles: slice.aug_triangles.clone(),
        })
    }
}
