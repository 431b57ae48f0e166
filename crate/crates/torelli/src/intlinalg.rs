//! Exact integer linear algebra over arbitrary-precision integers.
//!
//! Everything downstream (homology modules, isotropic-line complexes,
//! contraction searches) reduces to a small toolbox of lattice
//! computations: Smith normal form with transformation matrices,
//! primitivity and direct-summand tests, the standard symplectic form,
//! transvections, and completion of partial symplectic bases.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Coordinate vector in a fixed ambient basis.
pub type Vector = Vec<BigInt>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("zero-vector")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("not-extendable-input: {0}")]
    NotExtendable(String),
}

/// Build a vector of `BigInt` from machine integers. Test and setup helper.
pub fn vec_i64(coords: &[i64]) -> Vector {
    coords.iter().map(|&c| BigInt::from(c)).collect()
}

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vector]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix {
            rows: rows.len(),
            cols,
            entries: rows.iter().flat_map(|r| r.iter().cloned()).collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let data: Vec<Vector> = rows.iter().map(|r| vec_i64(r)).collect();
        IntMatrix::from_rows(&data)
    }

    pub fn row(&self, i: usize) -> Vector {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = IntMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = a * &rhs[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[a] += q * row[b]
    fn add_row(&mut self, a: usize, b: usize, q: &BigInt) {
        for j in 0..self.cols {
            let t = q * &self[(b, j)];
            self[(a, j)] += t;
        }
    }

    /// col[a] += q * col[b]
    fn add_col(&mut self, a: usize, b: usize, q: &BigInt) {
        for i in 0..self.rows {
            let t = q * &self[(i, b)];
            self[(i, a)] += t;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let t = -self[(a, j)].clone();
            self[(a, j)] = t;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

/// Smith normal form `U * M * V = D` with `U`, `V` unimodular and the
/// diagonal of `D` nonnegative, satisfying `d1 | d2 | ...`.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries of `D`, in order.
    pub fn invariants(&self) -> Vec<BigInt> {
        let k = self.d.rows.min(self.d.cols);
        (0..k).map(|i| self.d[(i, i)].clone()).filter(|x| !x.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariants().len()
    }
}

/// Compute the Smith normal form of `m`.
///
/// Pivot selection is deterministic: smallest nonzero absolute value in the
/// working submatrix, ties broken by lexicographic position, so repeated
/// runs produce identical decompositions.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            // Deterministic pivot: min |entry|, then lexicographic.
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    let better = match pivot {
                        None => true,
                        Some(p) => d[(i, j)].abs() < d[p].abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return finish(u, d, v, t);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Enforce the divisibility chain: fold a non-divisible entry
            // into row t and re-run the elimination.
            let mut fixed = true;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !d[(i, j)].mod_floor(&d[(t, t)].abs()).is_zero() {
                        d.add_row(t, i, &BigInt::one());
                        u.add_row(t, i, &BigInt::one());
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    let k = rows.min(cols);
    finish(u, d, v, k)
}

fn finish(u: IntMatrix, d: IntMatrix, v: IntMatrix, _t: usize) -> SmithDecomposition {
    SmithDecomposition { u, d, v }
}

/// Rank of an integer matrix (number of nonzero Smith invariants).
pub fn rank(m: &IntMatrix) -> usize {
    smith_normal_form(m).rank()
}

/// Solve `M x = t` over the integers. Returns `None` when no integral
/// solution exists. The solution with all free coordinates zero (in Smith
/// coordinates) is returned, so the result is deterministic.
pub fn solve(m: &IntMatrix, target: &[BigInt]) -> Option<Vector> {
    assert_eq!(m.rows, target.len(), "solve target shape");
    let snf = smith_normal_form(m);
    let ut = snf.u.mul_vec(target);
    let k = m.rows.min(m.cols);
    let mut y = vec![BigInt::zero(); m.cols];
    for i in 0..m.rows {
        if i < k && !snf.d[(i, i)].is_zero() {
            let (q, r) = ut[i].div_rem(&snf.d[(i, i)]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ut[i].is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// Basis for the integer kernel `{x : M x = 0}`. The basis vectors are
/// columns of a unimodular matrix, hence each is primitive.
pub fn kernel(m: &IntMatrix) -> Vec<Vector> {
    let snf = smith_normal_form(m);
    let k = m.rows.min(m.cols);
    let mut basis = Vec::new();
    for j in 0..m.cols {
        let free = j >= k || snf.d[(j, j)].is_zero();
        if free {
            basis.push(snf.v.col(j));
        }
    }
    basis
}

/// True iff `x` lies in the integer row space of `g`.
pub fn in_row_space(g: &IntMatrix, x: &[BigInt]) -> bool {
    solve(&g.transpose(), x).is_some()
}

/// Inverse of a unimodular square matrix. Panics if `m` is not unimodular;
/// callers only pass transformation matrices that are unimodular by
/// construction.
pub fn inverse_unimodular(m: &IntMatrix) -> IntMatrix {
    assert_eq!(m.rows, m.cols, "inverse of non-square matrix");
    let snf = smith_normal_form(m);
    assert!(
        snf.d == IntMatrix::identity(m.rows),
        "inverse_unimodular called on a non-unimodular matrix"
    );
    // U M V = I  =>  M^{-1} = V U.
    snf.v.mul(&snf.u)
}

/// Basis (as rows) of the lattice spanned by the rows of `m`.
/// The basis has `rank(m)` rows and spans exactly the integer row space.
pub fn row_space_basis(m: &IntMatrix) -> Vec<Vector> {
    // Work with columns of m^T: U m^T V = D gives m^T = U^{-1} D V^{-1},
    // so the column space of m^T is spanned by d_i * (U^{-1} column i).
    let mt = m.transpose();
    let snf = smith_normal_form(&mt);
    let uinv = inverse_unimodular(&snf.u);
    let k = mt.rows.min(mt.cols);
    let mut basis = Vec::new();
    for i in 0..k {
        let d = &snf.d[(i, i)];
        if d.is_zero() {
            continue;
        }
        let col = uinv.col(i);
        basis.push(col.into_iter().map(|x| x * d).collect());
    }
    basis
}

fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// True iff the gcd of the coordinates is 1. Errors on the zero vector.
pub fn is_primitive(v: &[BigInt]) -> Result<bool, LinalgError> {
    if v.iter().all(|c| c.is_zero()) {
        return Err(LinalgError::ZeroVector);
    }
    Ok(gcd_all(v).is_one())
}

/// Canonical representative of the line spanned by `v`: divide by the gcd
/// and normalize the sign so the first nonzero coordinate is positive.
pub fn canonical_line(v: &[BigInt]) -> Result<Vector, LinalgError> {
    let g = gcd_all(v);
    if g.is_zero() {
        return Err(LinalgError::ZeroVector);
    }
    let mut out: Vector = v.iter().map(|c| c / &g).collect();
    if let Some(first) = out.iter().find(|c| !c.is_zero()) {
        if first.is_negative() {
            for c in &mut out {
                *c = -c.clone();
            }
        }
    }
    Ok(out)
}

/// True iff the span of `vs` is a direct summand of rank `|vs|`, i.e. the
/// Smith invariants of the stacked matrix are all 1.
pub fn is_unimodular_summand(vs: &[Vector]) -> bool {
    if vs.is_empty() {
        return true;
    }
    let m = IntMatrix::from_rows(vs);
    let inv = smith_normal_form(&m).invariants();
    inv.len() == vs.len() && inv.iter().all(|d| d.is_one())
}

/// The standard genus-`g` symplectic space with ordered basis
/// `a1, b1, ..., ag, bg` and form `J(a_i, b_i) = +1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticSpace {
    pub g: usize,
}

impl SymplecticSpace {
    pub fn new(g: usize) -> Self {
        SymplecticSpace { g }
    }

    pub fn dim(&self) -> usize {
        2 * self.g
    }

    /// Standard basis vector `a_i` (1-based index).
    pub fn a(&self, i: usize) -> Vector {
        assert!(1 <= i && i <= self.g);
        let mut v = vec![BigInt::zero(); self.dim()];
        v[2 * (i - 1)] = BigInt::one();
        v
    }

    /// Standard basis vector `b_i` (1-based index).
    pub fn b(&self, i: usize) -> Vector {
        assert!(1 <= i && i <= self.g);
        let mut v = vec![BigInt::zero(); self.dim()];
        v[2 * (i - 1) + 1] = BigInt::one();
        v
    }

    /// The form matrix `J`.
    pub fn form_matrix(&self) -> IntMatrix {
        let mut j = IntMatrix::zero(self.dim(), self.dim());
        for i in 0..self.g {
            j[(2 * i, 2 * i + 1)] = BigInt::one();
            j[(2 * i + 1, 2 * i)] = -BigInt::one();
        }
        j
    }
}

/// `u^T J v` in the given space.
pub fn symplectic_pairing(
    u: &[BigInt],
    v: &[BigInt],
    space: &SymplecticSpace,
) -> Result<BigInt, LinalgError> {
    let dim = space.dim();
    for w in [u, v] {
        if w.len() != dim {
            return Err(LinalgError::DimensionMismatch { expected: dim, got: w.len() });
        }
    }
    let mut acc = BigInt::zero();
    for i in 0..space.g {
        acc += &u[2 * i] * &v[2 * i + 1] - &u[2 * i + 1] * &v[2 * i];
    }
    Ok(acc)
}

/// Transvection along `c`: `h -> h + <h, c> c`.
pub fn transvection(
    c: &[BigInt],
    h: &[BigInt],
    space: &SymplecticSpace,
) -> Result<Vector, LinalgError> {
    transvection_pow(c, &BigInt::one(), h, space)
}

/// Power of a transvection: `h -> h + e <h, c> c`. Exponents are additive
/// because `<c, c> = 0`.
pub fn transvection_pow(
    c: &[BigInt],
    e: &BigInt,
    h: &[BigInt],
    space: &SymplecticSpace,
) -> Result<Vector, LinalgError> {
    let p = symplectic_pairing(h, c, space)?;
    let coeff = e * p;
    Ok(h.iter().zip(c.iter()).map(|(hi, ci)| hi + &coeff * ci).collect())
}

fn pairing_row(w: &[BigInt], space: &SymplecticSpace) -> Vector {
    // Row r with r . x = <x, w>.
    let mut r = vec![BigInt::zero(); space.dim()];
    for i in 0..space.g {
        r[2 * i] = w[2 * i + 1].clone();
        r[2 * i + 1] = -w[2 * i].clone();
    }
    r
}

/// Extend partial symplectic data to a full ordered basis
/// `(a1, b1, ..., ag, bg)` whose Gram matrix under the form is exactly `J`.
///
/// `partial_a` supplies `a1..ah` and `partial_b` supplies `b1..bk`. Inputs
/// must be primitive, satisfy the standard pairing constraints wherever
/// both sides are defined, and jointly span a direct summand; otherwise
/// `NotExtendable` is returned.
pub fn complete_symplectic_basis(
    partial_a: &[Vector],
    partial_b: &[Vector],
    g: usize,
) -> Result<Vec<Vector>, LinalgError> {
    let space = SymplecticSpace::new(g);
    let dim = space.dim();
    if partial_a.len() > g || partial_b.len() > g {
        return Err(LinalgError::NotExtendable("too many input vectors".into()));
    }
    for v in partial_a.iter().chain(partial_b.iter()) {
        if v.len() != dim {
            return Err(LinalgError::DimensionMismatch { expected: dim, got: v.len() });
        }
        if !is_primitive(v).map_err(|_| LinalgError::NotExtendable("zero input vector".into()))? {
            return Err(LinalgError::NotExtendable("non-primitive input vector".into()));
        }
    }
    // Pairing constraints on whatever is defined.
    for (i, ai) in partial_a.iter().enumerate() {
        for (j, aj) in partial_a.iter().enumerate() {
            if i < j && !symplectic_pairing(ai, aj, &space)?.is_zero() {
                return Err(LinalgError::NotExtendable("a-vectors not isotropic".into()));
            }
        }
        for (j, bj) in partial_b.iter().enumerate() {
            let want = if i == j { BigInt::one() } else { BigInt::zero() };
            if symplectic_pairing(ai, bj, &space)? != want {
                return Err(LinalgError::NotExtendable("wrong a/b pairing".into()));
            }
        }
    }
    for (i, bi) in partial_b.iter().enumerate() {
        for (j, bj) in partial_b.iter().enumerate() {
            if i < j && !symplectic_pairing(bi, bj, &space)?.is_zero() {
                return Err(LinalgError::NotExtendable("b-vectors not isotropic".into()));
            }
        }
    }
    let stacked: Vec<Vector> = partial_a.iter().chain(partial_b.iter()).cloned().collect();
    if !is_unimodular_summand(&stacked) {
        return Err(LinalgError::NotExtendable("input does not span a summand".into()));
    }

    let mut a_slots: Vec<Option<Vector>> = (0..g).map(|i| partial_a.get(i).cloned()).collect();
    let mut b_slots: Vec<Option<Vector>> = (0..g).map(|i| partial_b.get(i).cloned()).collect();

    let known = |a: &[Option<Vector>], b: &[Option<Vector>]| -> Vec<(usize, bool, Vector)> {
        let mut out = Vec::new();
        for (i, v) in a.iter().enumerate() {
            if let Some(v) = v {
                out.push((i, true, v.clone()));
            }
        }
        for (i, v) in b.iter().enumerate() {
            if let Some(v) = v {
                out.push((i, false, v.clone()));
            }
        }
        out
    };

    // Phase 1: find duals for every half-given pair.
    for slot in 0..g {
        for find_b in [true, false] {
            let missing = if find_b {
                a_slots[slot].is_some() && b_slots[slot].is_none()
            } else {
                b_slots[slot].is_some() && a_slots[slot].is_none()
            };
            if !missing {
                continue;
            }
            let mut rows = Vec::new();
            let mut target = Vec::new();
            for (i, is_a, w) in known(&a_slots, &b_slots) {
                rows.push(pairing_row(&w, &space));
                // Want <x, a_i> = -delta (if solving for b) resp. <x, b_i> = +delta.
                let t = if find_b {
                    if is_a && i == slot {
                        -BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                } else if !is_a && i == slot {
                    BigInt::one()
                } else {
                    BigInt::zero()
                };
                target.push(t);
            }
            let m = IntMatrix::from_rows(&rows);
            let x = solve(&m, &target)
                .ok_or_else(|| LinalgError::NotExtendable("no integral dual partner".into()))?;
            if find_b {
                b_slots[slot] = Some(x);
            } else {
                a_slots[slot] = Some(x);
            }
        }
    }

    // Phase 2: fill wholly-empty pairs from the symplectic complement.
    for slot in 0..g {
        if a_slots[slot].is_some() {
            continue;
        }
        let rows: Vec<Vector> =
            known(&a_slots, &b_slots).into_iter().map(|(_, _, w)| pairing_row(&w, &space)).collect();
        let new_a = if rows.is_empty() {
            space.a(slot + 1)
        } else {
            let m = IntMatrix::from_rows(&rows);
            kernel(&m)
                .into_iter()
                .next()
                .ok_or_else(|| LinalgError::NotExtendable("no symplectic complement".into()))?
        };
        a_slots[slot] = Some(new_a);
        let mut rows = Vec::new();
        let mut target = Vec::new();
        for (i, is_a, w) in known(&a_slots, &b_slots) {
            rows.push(pairing_row(&w, &space));
            target.push(if is_a && i == slot { -BigInt::one() } else { BigInt::zero() });
        }
        let m = IntMatrix::from_rows(&rows);
        let x = solve(&m, &target)
            .ok_or_else(|| LinalgError::NotExtendable("no integral dual partner".into()))?;
        b_slots[slot] = Some(x);
    }

    let mut basis = Vec::with_capacity(dim);
    for i in 0..g {
        basis.push(a_slots[i].clone().unwrap());
        basis.push(b_slots[i].clone().unwrap());
    }
    // The Gram matrix must be exactly J.
    let jm = space.form_matrix();
    for (r, x) in basis.iter().enumerate() {
        for (c, y) in basis.iter().enumerate() {
            if symplectic_pairing(x, y, &space)? != jm[(r, c)] {
                return Err(LinalgError::NotExtendable("completion failed Gram check".into()));
            }
        }
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent determinant oracle: cofactor expansion.
    fn det_cofactor(m: &IntMatrix) -> BigInt {
        assert_eq!(m.rows, m.cols);
        let n = m.rows;
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return m[(0, 0)].clone();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            if m[(0, j)].is_zero() {
                continue;
            }
            let mut sub = IntMatrix::zero(n - 1, n - 1);
            for i in 1..n {
                let mut cc = 0;
                for k in 0..n {
                    if k == j {
                        continue;
                    }
                    sub[(i - 1, cc)] = m[(i, k)].clone();
                    cc += 1;
                }
            }
            let term = &m[(0, j)] * det_cofactor(&sub);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    fn check_snf(m: &IntMatrix) -> SmithDecomposition {
        let snf = smith_normal_form(m);
        assert_eq!(snf.u.mul(m).mul(&snf.v), snf.d, "U M V = D");
        assert_eq!(det_cofactor(&snf.u).abs(), BigInt::one(), "det U = ±1");
        assert_eq!(det_cofactor(&snf.v).abs(), BigInt::one(), "det V = ±1");
        let inv = snf.invariants();
        for w in inv.windows(2) {
            assert!(w[1].mod_floor(&w[0]).is_zero(), "divisibility chain");
        }
        for d in &inv {
            assert!(d.is_positive());
        }
        snf
    }

    #[test]
    fn snf_example_2x2() {
        let m = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        let snf = check_snf(&m);
        // Oracle: |det| = 8 and gcd of entries = 2, so D = diag(2, 4).
        assert_eq!(det_cofactor(&m).abs(), BigInt::from(8));
        let g = m.entries.iter().fold(BigInt::zero(), |a, x| a.gcd(x));
        assert_eq!(g, BigInt::from(2));
        assert_eq!(snf.invariants(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn snf_identity_and_zero() {
        let id = IntMatrix::identity(3);
        let snf = check_snf(&id);
        assert_eq!(snf.d, id);
        let z = IntMatrix::zero(2, 2);
        let snf = check_snf(&z);
        assert!(snf.d.is_zero());
    }

    #[test]
    fn snf_random_sweep() {
        // Deterministic pseudo-random entries in [-9, 9], sizes up to 6x6.
        let mut state: u64 = 0x9e3779b97f4a7c15;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for rows in 1..=6usize {
            for cols in 1..=6usize {
                for _ in 0..4 {
                    let mut m = IntMatrix::zero(rows, cols);
                    for i in 0..rows {
                        for j in 0..cols {
                            m[(i, j)] = BigInt::from((next() % 19) as i64 - 9);
                        }
                    }
                    check_snf(&m);
                }
            }
        }
    }

    #[test]
    fn primitivity() {
        assert!(!is_primitive(&vec_i64(&[2, 4])).unwrap());
        assert!(is_primitive(&vec_i64(&[0, 0, 1, 0])).unwrap());
        assert!(is_primitive(&vec_i64(&[3, 5])).unwrap());
        assert_eq!(is_primitive(&vec_i64(&[0, 0])), Err(LinalgError::ZeroVector));
    }

    #[test]
    fn canonical_lines() {
        assert_eq!(canonical_line(&vec_i64(&[-2, -4])).unwrap(), vec_i64(&[1, 2]));
        assert_eq!(canonical_line(&vec_i64(&[0, 3])).unwrap(), vec_i64(&[0, 1]));
        assert_eq!(canonical_line(&vec_i64(&[5, -7])).unwrap(), vec_i64(&[5, -7]));
        assert_eq!(canonical_line(&vec_i64(&[0, 0])), Err(LinalgError::ZeroVector));
        // canonical_line(v) = canonical_line(-v)
        let v = vec_i64(&[-3, 6, 9]);
        let neg: Vector = v.iter().map(|x| -x).collect();
        assert_eq!(canonical_line(&v).unwrap(), canonical_line(&neg).unwrap());
    }

    #[test]
    fn unimodular_summands() {
        assert!(is_unimodular_summand(&[vec_i64(&[1, 0, 0, 0])]));
        // Oracle by hand row-reduction: [[1,1,0,0],[0,2,1,0]] has invariants (1,1).
        assert!(is_unimodular_summand(&[vec_i64(&[1, 1, 0, 0]), vec_i64(&[0, 2, 1, 0])]));
        assert!(!is_unimodular_summand(&[vec_i64(&[2, 0])]));
        // Singleton case agrees with primitivity.
        for v in [vec_i64(&[3, 5]), vec_i64(&[2, 4]), vec_i64(&[7, 0, 0, 2])] {
            assert_eq!(is_unimodular_summand(&[v.clone()]), is_primitive(&v).unwrap());
        }
    }

    #[test]
    fn pairing_examples() {
        let s = SymplecticSpace::new(2);
        assert_eq!(symplectic_pairing(&s.a(1), &s.b(1), &s).unwrap(), BigInt::one());
        assert_eq!(symplectic_pairing(&s.b(1), &s.a(1), &s).unwrap(), -BigInt::one());
        // (a1+b1, 2 b1 + a2): expand bilinearly by hand:
        // <a1, 2 b1> = 2, <b1, a2> = 0, <b1, 2 b1> = 0, <a1, a2> = 0 -> 2.
        let u = vec_i64(&[1, 1, 0, 0]);
        let v = vec_i64(&[0, 2, 1, 0]);
        assert_eq!(symplectic_pairing(&u, &v, &s).unwrap(), BigInt::from(2));
        assert!(symplectic_pairing(&vec_i64(&[1, 0]), &v, &s).is_err());
    }

    #[test]
    fn transvection_examples() {
        let s = SymplecticSpace::new(1);
        let a1 = s.a(1);
        let b1 = s.b(1);
        assert_eq!(transvection(&a1, &a1, &s).unwrap(), a1);
        // <b1, a1> = -1 under the sign convention, so b1 -> b1 - a1.
        assert_eq!(transvection(&a1, &b1, &s).unwrap(), vec_i64(&[-1, 1]));
        let zero = vec_i64(&[0, 0]);
        assert_eq!(transvection(&zero, &b1, &s).unwrap(), b1);
    }

    #[test]
    fn transvection_preserves_form() {
        let s = SymplecticSpace::new(3);
        let mut state: u64 = 42;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 11) as i64 - 5
        };
        for _ in 0..50 {
            let c: Vector = (0..6).map(|_| BigInt::from(next())).collect();
            if c.iter().all(|x| x.is_zero()) {
                continue;
            }
            let x: Vector = (0..6).map(|_| BigInt::from(next())).collect();
            let y: Vector = (0..6).map(|_| BigInt::from(next())).collect();
            let tx = transvection(&c, &x, &s).unwrap();
            let ty = transvection(&c, &y, &s).unwrap();
            assert_eq!(
                symplectic_pairing(&tx, &ty, &s).unwrap(),
                symplectic_pairing(&x, &y, &s).unwrap()
            );
            // Exponent additivity.
            let e1 = BigInt::from(next());
            let e2 = BigInt::from(next());
            let once = transvection_pow(&c, &e1, &x, &s).unwrap();
            let twice = transvection_pow(&c, &e2, &once, &s).unwrap();
            let combined = transvection_pow(&c, &(e1 + e2), &x, &s).unwrap();
            assert_eq!(twice, combined);
        }
    }

    #[test]
    fn solve_and_kernel() {
        let m = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        let t = vec_i64(&[2, 6]);
        let x = solve(&m, &t).unwrap();
        assert_eq!(m.mul_vec(&x), t);
        assert!(solve(&m, &vec_i64(&[1, 0])).is_none());
        let m = IntMatrix::from_i64(&[&[1, 2, 3]]);
        let k = kernel(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn inverse_and_row_space() {
        let m = IntMatrix::from_i64(&[&[1, 2], &[1, 3]]);
        let inv = inverse_unimodular(&m);
        assert_eq!(m.mul(&inv), IntMatrix::identity(2));
        assert_eq!(inv.mul(&m), IntMatrix::identity(2));

        let g = IntMatrix::from_i64(&[&[2, 4, 0], &[0, 0, 3], &[2, 4, 3]]);
        let basis = row_space_basis(&g);
        assert_eq!(basis.len(), rank(&g));
        // Mutual containment of the two lattices.
        let b = IntMatrix::from_rows(&basis);
        for i in 0..g.rows {
            assert!(in_row_space(&b, &g.row(i)));
        }
        for v in &basis {
            assert!(in_row_space(&g, v));
        }
    }

    #[test]
    fn basis_completion_g1() {
        let s = SymplecticSpace::new(1);
        let basis = complete_symplectic_basis(&[s.a(1)], &[], 1).unwrap();
        assert_eq!(basis, vec![s.a(1), s.b(1)]);
    }

    #[test]
    fn basis_completion_g2_nonstandard() {
        // a1 = (1, 0, 2, 0): output checked by recomputing all pairings.
        let basis = complete_symplectic_basis(&[vec_i64(&[1, 0, 2, 0])], &[], 2).unwrap();
        let s = SymplecticSpace::new(2);
        let jm = s.form_matrix();
        for (r, x) in basis.iter().enumerate() {
            for (c, y) in basis.iter().enumerate() {
                assert_eq!(symplectic_pairing(x, y, &s).unwrap(), jm[(r, c)]);
            }
        }
        assert_eq!(basis[0], vec_i64(&[1, 0, 2, 0]));
    }

    #[test]
    fn basis_completion_rejects_bad_input() {
        let s = SymplecticSpace::new(2);
        // <a1, b1> = 0 here, which violates the constraint.
        let err = complete_symplectic_basis(&[s.a(1)], &[s.a(2)], 2);
        assert!(matches!(err, Err(LinalgError::NotExtendable(_))));
        let err = complete_symplectic_basis(&[vec_i64(&[2, 0, 0, 0])], &[], 2);
        assert!(matches!(err, Err(LinalgError::NotExtendable(_))));
    }
}
