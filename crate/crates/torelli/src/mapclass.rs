//! Twist words acting on the homology of partitioned surfaces.
//!
//! A mapping class given as a product of Dehn twists acts on `H1P` by a
//! composite of transvections; triviality of that action is the exact
//! homology-level membership certificate for the Torelli group. This
//! module also models the boundary point-push maps: their action on the
//! quotient by the pushed boundary class, their expression as a two-twist
//! word, and the factorization of that word into separating and
//! bounding-pair twists.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intlinalg::{smith_normal_form, IntMatrix, SymplecticSpace, Vector};
use crate::psurface::{
    build_h1p, induced_partition_cap_boundary, CappingMap, ClassJson, ClosedClass, H1PModule,
    Label, PartitionedSurface, SurfaceError,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapClassError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("not-algebraically-disjoint: classes pair to {0}")]
    NotAlgebraicallyDisjoint(BigInt),
    #[error("bad-lift: lift class does not restrict to gamma")]
    BadLift,
    #[error("degenerate-case: (g, n) = (1, 1) is excluded")]
    DegenerateCase,
    #[error("{0} is not a block of the capped surface's partition")]
    NotABlock(String),
    #[error("the capped boundary's block is a singleton; no bounding-pair factor exists")]
    SingletonBlock,
}

/// Caller-supplied geometric assertions about a word's factors. These are
/// recorded, never checked: the library certifies homology actions only.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordAssertions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simple: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub disjoint_pairs: Vec<(usize, usize)>,
}

/// An ordered product of powers of Dehn twists, recorded by the homology
/// classes of their curves. The leftmost factor acts last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistWord {
    pub factors: Vec<(ClosedClass, BigInt)>,
    pub assertions: WordAssertions,
}

impl TwistWord {
    pub fn new(factors: Vec<(ClosedClass, BigInt)>) -> Self {
        TwistWord { factors, assertions: WordAssertions::default() }
    }

    pub fn from_classes(factors: &[(&ClosedClass, i64)]) -> Self {
        TwistWord::new(
            factors.iter().map(|(c, e)| ((*c).clone(), BigInt::from(*e))).collect(),
        )
    }

    pub fn identity() -> Self {
        TwistWord::new(vec![])
    }
}

/// Apply a twist word to an admissible ambient class. The rightmost
/// factor acts first; each factor acts by `x -> x + e * omega(x, c) * c`.
pub fn act(word: &TwistWord, m: &H1PModule, x: &[BigInt]) -> Result<Vector, MapClassError> {
    if !m.is_admissible(x) {
        return Err(SurfaceError::InadmissibleClass.into());
    }
    let mut cur = x.to_vec();
    for (class, e) in word.factors.iter().rev() {
        let coeff = e * m.omega(&cur, &class.coords);
        for (xi, ci) in cur.iter_mut().zip(class.coords.iter()) {
            *xi += &coeff * ci;
        }
    }
    Ok(cur)
}

/// Homology-level Torelli certificate: true iff the word fixes every
/// basis class of the module.
pub fn acts_trivially(word: &TwistWord, m: &H1PModule) -> bool {
    m.basis.iter().all(|b| {
        let image = act(word, m, b).expect("basis classes are admissible");
        m.canonical_form(&image).unwrap() == m.canonical_form(b).unwrap()
    })
}

/// First basis class moved by the word, if any, with its image.
pub fn first_moved_basis_class(
    word: &TwistWord,
    m: &H1PModule,
) -> Option<(Vector, Vector)> {
    m.basis.iter().find_map(|b| {
        let image = act(word, m, b).expect("basis classes are admissible");
        if m.canonical_form(&image).unwrap() != m.canonical_form(b).unwrap() {
            Some((b.clone(), image))
        } else {
            None
        }
    })
}

/// Commutator `[T_{c1}, T_{c2}]` of a simply intersecting pair. The
/// algebraic-disjointness hypothesis `omega(c1, c2) = 0` is checked;
/// geometric intersection 2 is a caller assertion.
pub fn sip_commutator(
    c1: &ClosedClass,
    c2: &ClosedClass,
    surface: &PartitionedSurface,
) -> Result<TwistWord, MapClassError> {
    let omega = surface.omega_matrix();
    let oc2 = omega.mul_vec(&c2.coords);
    let p: BigInt = c1.coords.iter().zip(oc2.iter()).map(|(a, b)| a * b).sum();
    if !p.is_zero() {
        return Err(MapClassError::NotAlgebraicallyDisjoint(p));
    }
    Ok(TwistWord::from_classes(&[(c1, 1), (c2, 1), (c1, -1), (c2, -1)]))
}

/// Apply a word of plain symplectic transvections to a vector of `Z^{2g}`.
pub fn act_symplectic(
    factors: &[(Vector, BigInt)],
    space: &SymplecticSpace,
    x: &[BigInt],
) -> Vector {
    let mut cur = x.to_vec();
    for (c, e) in factors.iter().rev() {
        let p = crate::intlinalg::symplectic_pairing(&cur, c, space).expect("dimensions agree");
        let coeff = e * p;
        for (xi, ci) in cur.iter_mut().zip(c.iter()) {
            *xi += &coeff * ci;
        }
    }
    cur
}

/// Push a twist word through a capping: each factor's class is mapped
/// into the closed surface's symplectic lattice.
pub fn push_through_capping(word: &TwistWord, cap: &CappingMap) -> Vec<(Vector, BigInt)> {
    word.factors.iter().map(|(c, e)| (cap.apply(&c.coords), e.clone())).collect()
}

/// True iff a pushed word fixes all of `Z^{2g}`.
pub fn acts_trivially_symplectic(factors: &[(Vector, BigInt)], space: &SymplecticSpace) -> bool {
    (1..=space.g).all(|i| {
        let a = space.a(i);
        let b = space.b(i);
        act_symplectic(factors, space, &a) == a && act_symplectic(factors, space, &b) == b
    })
}

/// Data of a boundary point-push: a surface, a capped boundary `b`, the
/// capped (small) surface, a loop class `gamma` on the small surface, and
/// optionally the class of a chosen lift of the loop to the large surface.
#[derive(Debug, Clone)]
pub struct PushSpec {
    pub large: PartitionedSurface,
    pub b: Label,
    pub small: PartitionedSurface,
    pub gamma: ClosedClass,
    pub lift_class: Option<ClosedClass>,
}

impl PushSpec {
    pub fn new(
        large: PartitionedSurface,
        b: Label,
        gamma: ClosedClass,
        lift_class: Option<ClosedClass>,
    ) -> Result<Self, MapClassError> {
        let small = induced_partition_cap_boundary(&large, b)?;
        if gamma.coords.len() != small.ambient_dim() {
            return Err(SurfaceError::DimensionMismatch {
                expected: small.ambient_dim(),
                got: gamma.coords.len(),
            }
            .into());
        }
        if let Some(l) = &lift_class {
            if l.coords.len() != large.ambient_dim() {
                return Err(SurfaceError::DimensionMismatch {
                    expected: large.ambient_dim(),
                    got: l.coords.len(),
                }
                .into());
            }
        }
        Ok(PushSpec { large, b, small, gamma, lift_class })
    }

    pub fn beta_b(&self) -> Vector {
        self.large.class_beta(self.b).expect("b is a boundary of the large surface")
    }
}

/// Re-read a closed class of the capped surface on the large surface:
/// identical handle coordinates, boundary coordinates carried label-wise.
pub fn reread_on_large(
    large: &PartitionedSurface,
    small: &PartitionedSurface,
    c: &ClosedClass,
) -> Result<ClosedClass, MapClassError> {
    let mut v = vec![BigInt::zero(); large.ambient_dim()];
    for i in 1..=large.g {
        v[large.idx_a(i)] = c.coords[small.idx_a(i)].clone();
        v[large.idx_b(i)] = c.coords[small.idx_b(i)].clone();
    }
    for &label in &small.boundary_labels {
        v[large.idx_beta(label)?] = c.coords[small.idx_beta(label)?].clone();
    }
    Ok(ClosedClass::new(large, v)?)
}

/// Canonical-form reduction in the quotient of `H1P` by the span of a
/// single closed class (the pushed boundary).
#[derive(Debug, Clone)]
pub struct ModClassQuotient {
    pub module: H1PModule,
    v2t: IntMatrix,
    diag: Vec<BigInt>,
}

impl ModClassQuotient {
    pub fn new(module: H1PModule, killed: &ClosedClass) -> Result<Self, MapClassError> {
        let cf = module.canonical_form(&killed.coords)?;
        let r = module.rank;
        let mut k = IntMatrix::zero(1, r);
        for (j, x) in cf.iter().enumerate() {
            k[(0, j)] = x.clone();
        }
        let snf = smith_normal_form(&k);
        let mut diag = vec![BigInt::zero(); r];
        for (i, d) in snf.invariants().into_iter().enumerate() {
            diag[i] = d;
        }
        Ok(ModClassQuotient { module, v2t: snf.v.transpose(), diag })
    }

    /// Deterministic representative of the image of an admissible class.
    pub fn reduce(&self, x: &[BigInt]) -> Result<Vector, MapClassError> {
        let cf = self.module.canonical_form(x)?;
        let mut w = self.v2t.mul_vec(&cf);
        for (wi, d) in w.iter_mut().zip(self.diag.iter()) {
            if !d.is_zero() {
                *wi = wi.mod_floor(d);
            }
        }
        Ok(w)
    }
}

/// Quotient of the large surface's homology by the pushed boundary class.
pub fn push_quotient(spec: &PushSpec) -> Result<ModClassQuotient, MapClassError> {
    let module = build_h1p(&spec.large);
    let beta_b = ClosedClass::new(&spec.large, spec.beta_b())?;
    ModClassQuotient::new(module, &beta_b)
}

/// Action of the point-push around `gamma` on the quotient by the pushed
/// boundary class: `x -> x - omega(x, beta_b) * j(gamma)`, where `j`
/// re-reads small-surface classes on the large surface. The result is the
/// quotient's canonical representative.
pub fn pointpush_action(
    spec: &PushSpec,
    quot: &ModClassQuotient,
    x: &[BigInt],
) -> Result<Vector, MapClassError> {
    let jg = reread_on_large(&spec.large, &spec.small, &spec.gamma)?;
    let beta_b = spec.beta_b();
    let coeff = quot.module.omega(x, &beta_b);
    let moved: Vector =
        x.iter().zip(jg.coords.iter()).map(|(xi, gi)| xi - &coeff * gi).collect();
    quot.reduce(&moved)
}

/// The point-push as a two-twist word `T_{lift} T_{lift + beta_b}^{-1}`.
/// Requires a lift class restricting to `gamma` away from `b`.
pub fn pointpush_word(spec: &PushSpec) -> Result<TwistWord, MapClassError> {
    let lift = spec.lift_class.as_ref().ok_or(MapClassError::BadLift)?;
    let jg = reread_on_large(&spec.large, &spec.small, &spec.gamma)?;
    // The lift must agree with gamma on every coordinate except beta_b.
    let beta_idx = spec.large.idx_beta(spec.b)?;
    for (i, (l, g)) in lift.coords.iter().zip(jg.coords.iter()).enumerate() {
        if i != beta_idx && l != g {
            return Err(MapClassError::BadLift);
        }
    }
    let beta_b = spec.beta_b();
    let second: Vector =
        lift.coords.iter().zip(beta_b.iter()).map(|(l, b)| l + b).collect();
    let second = ClosedClass::new(&spec.large, second)?;
    Ok(TwistWord::new(vec![
        (lift.clone(), BigInt::one()),
        (second, -BigInt::one()),
    ]))
}

/// Which case of the kernel factorization applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PushCase {
    /// `q` is a full block of the large partition.
    BlockAway,
    /// `q` is the remainder `p \ {b}` of the capped boundary's block.
    BlockOfB,
}

/// Certified factorization of a point-push (times a boundary twist) into
/// a separating twist and a bounding-pair twist.
#[derive(Debug, Clone)]
pub struct PushDecomposition {
    pub case: PushCase,
    pub eta1: ClosedClass,
    pub eta2: ClosedClass,
    /// Exponent of the extra boundary twist `T_b` carried by the word.
    pub tb_exponent: i64,
    pub separating_certified: bool,
    pub bounding_certified: bool,
}

/// Factor the point-push around the block `q` of the capped surface's
/// partition. Writing `eta1 = sum of beta over q` and
/// `eta2 = eta1 + beta_b`:
///
/// * if `q` is a block of the large partition, the word is
///   `T_{eta1} (T_b T_{eta2}^{-1})` with `eta1` separating and
///   `{eta2, b}` a bounding pair;
/// * if `q = p \ {b}`, the word is `(T_{eta1} T_b^{-1}) T_{eta2}^{-1}`
///   with `eta2` separating and `{eta1, b}` a bounding pair.
pub fn decompose_push(
    spec: &PushSpec,
    q: &[Label],
) -> Result<(TwistWord, PushDecomposition), MapClassError> {
    let mut q_sorted = q.to_vec();
    q_sorted.sort_unstable();
    if !spec.small.partition.iter().any(|blk| *blk == q_sorted) {
        return Err(MapClassError::NotABlock(format!("{q_sorted:?}")));
    }
    let p = spec.large.block_of(spec.b)?.to_vec();
    if p.len() == 1 {
        return Err(MapClassError::SingletonBlock);
    }
    let p_minus_b: Vec<Label> = p.iter().copied().filter(|&l| l != spec.b).collect();
    let case = if q_sorted == p_minus_b { PushCase::BlockOfB } else { PushCase::BlockAway };

    let dim = spec.large.ambient_dim();
    let mut eta1 = vec![BigInt::zero(); dim];
    for &label in &q_sorted {
        eta1[spec.large.idx_beta(label)?] = BigInt::one();
    }
    let beta_b = spec.beta_b();
    let eta2: Vector = eta1.iter().zip(beta_b.iter()).map(|(a, b)| a + b).collect();
    let eta1 = ClosedClass::new(&spec.large, eta1)?;
    let eta2 = ClosedClass::new(&spec.large, eta2)?;
    let beta_b = ClosedClass::new(&spec.large, beta_b)?;

    let module = build_h1p(&spec.large);
    let (word, tb_exponent, separating, bounding) = match case {
        PushCase::BlockAway => (
            TwistWord::from_classes(&[(&eta1, 1), (&beta_b, 1), (&eta2, -1)]),
            1,
            module.is_p_separating(&eta1),
            module.is_p_bounding_pair(&eta2, &beta_b),
        ),
        PushCase::BlockOfB => (
            TwistWord::from_classes(&[(&eta1, 1), (&beta_b, -1), (&eta2, -1)]),
            -1,
            module.is_p_separating(&eta2),
            module.is_p_bounding_pair(&eta1, &beta_b),
        ),
    };
    Ok((
        word,
        PushDecomposition {
            case,
            eta1,
            eta2,
            tb_exponent,
            separating_certified: separating,
            bounding_certified: bounding,
        },
    ))
}

/// Structure report for the kernel of the boundary-capping map on Torelli
/// groups (the Birman-type exact sequence).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    /// "full-unit-tangent" when the capped boundary's block is a
    /// singleton, "graph-over-kernel" otherwise.
    pub case_tag: String,
    /// Rank of the capped surface's homology module.
    pub h1p_prime_rank: usize,
    pub notes: String,
}

pub fn birman_kernel_report(
    surface: &PartitionedSurface,
    b: Label,
) -> Result<KernelReport, MapClassError> {
    if surface.g == 1 && surface.n() == 1 {
        return Err(MapClassError::DegenerateCase);
    }
    let block = surface.block_of(b)?.to_vec();
    let small = induced_partition_cap_boundary(surface, b)?;
    let rank = build_h1p(&small).rank;
    Ok(if block.len() == 1 {
        KernelReport {
            case_tag: "full-unit-tangent".into(),
            h1p_prime_rank: rank,
            notes: "kernel is the full unit-tangent-bundle fundamental group".into(),
        }
    } else {
        KernelReport {
            case_tag: "graph-over-kernel".into(),
            h1p_prime_rank: rank,
            notes: "kernel is the graph of a homomorphism to Z on the homology kernel \
                    subgroup; the splitting is reported as existing, not computed"
                .into(),
        }
    })
}

/// JSON form of a twist word.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct WordJson {
    pub factors: Vec<FactorJson>,
    #[serde(default)]
    pub assertions: WordAssertions,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorJson {
    pub class: ClassJson,
    pub exp: i64,
}

impl WordJson {
    pub fn to_word(&self, surface: &PartitionedSurface) -> Result<TwistWord, MapClassError> {
        let mut factors = Vec::new();
        for f in &self.factors {
            let v = f.class.to_vector(surface)?;
            factors.push((ClosedClass::new(surface, v)?, BigInt::from(f.exp)));
        }
        Ok(TwistWord { factors, assertions: self.assertions.clone() })
    }

    pub fn from_word(
        surface: &PartitionedSurface,
        word: &TwistWord,
    ) -> Result<WordJson, MapClassError> {
        use num_traits::ToPrimitive;
        let mut factors = Vec::new();
        for (c, e) in &word.factors {
            factors.push(FactorJson {
                class: ClassJson::from_vector(surface, &c.coords)?,
                exp: e.to_i64().ok_or(SurfaceError::CoefficientRange)?,
            });
        }
        Ok(WordJson { factors, assertions: word.assertions.clone() })
    }
}
