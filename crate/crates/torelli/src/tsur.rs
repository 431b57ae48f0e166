//! The category of partitioned surfaces.
//!
//! An embedding of one surface into another is stored purely
//! combinatorially: the complementary components, each with its genus,
//! the target boundaries it contains (`B_S`) and the source boundaries it
//! contains (`B'_S`). The two morphism conditions, the retraction map on
//! partitions, restriction partitions, and composition of embeddings are
//! all functions of this bookkeeping.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::psurface::{Label, PartitionedSurface, SurfaceError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TsurError {
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("partition labels do not match the surface: {0}")]
    LabelMismatch(String),
    #[error("embedding shells do not match for composition")]
    ShellMismatch,
    #[error("not-a-morphism")]
    NotAMorphism,
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// A surface without partition data: genus and boundary labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shell {
    #[serde(rename = "genus")]
    pub g: usize,
    #[serde(rename = "boundaries")]
    pub boundary_labels: Vec<Label>,
}

impl Shell {
    pub fn new(g: usize, mut boundary_labels: Vec<Label>) -> Self {
        boundary_labels.sort_unstable();
        Shell { g, boundary_labels }
    }

    pub fn closed(g: usize) -> Self {
        Shell { g, boundary_labels: vec![] }
    }

    pub fn n(&self) -> usize {
        self.boundary_labels.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.g as i64 - self.n() as i64
    }
}

impl From<&PartitionedSurface> for Shell {
    fn from(s: &PartitionedSurface) -> Shell {
        Shell { g: s.g, boundary_labels: s.boundary_labels.clone() }
    }
}

/// One complementary component of an embedding: its genus, the target
/// boundaries lying in it, and the source boundaries lying in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub genus: usize,
    #[serde(rename = "B")]
    pub b: Vec<Label>,
    #[serde(rename = "Bprime")]
    pub b_prime: Vec<Label>,
}

impl Component {
    pub fn new(genus: usize, mut b: Vec<Label>, mut b_prime: Vec<Label>) -> Self {
        b.sort_unstable();
        b_prime.sort_unstable();
        Component { genus, b, b_prime }
    }

    /// `chi = 2 - 2g - (|B| + |B'|)`.
    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - (self.b.len() + self.b_prime.len()) as i64
    }
}

/// Combinatorics of a subsurface embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingCombinatorics {
    pub source: Shell,
    pub target: Shell,
    pub components: Vec<Component>,
}

impl EmbeddingCombinatorics {
    pub fn new(
        source: Shell,
        target: Shell,
        components: Vec<Component>,
    ) -> Result<Self, TsurError> {
        let emb = EmbeddingCombinatorics { source, target, components };
        emb.validate()?;
        Ok(emb)
    }

    pub fn validate(&self) -> Result<(), TsurError> {
        let mut src_covered: Vec<Label> = Vec::new();
        let mut tgt_covered: Vec<Label> = Vec::new();
        for c in &self.components {
            src_covered.extend(c.b_prime.iter().copied());
            tgt_covered.extend(c.b.iter().copied());
        }
        src_covered.sort_unstable();
        tgt_covered.sort_unstable();
        if src_covered != self.source.boundary_labels {
            return Err(TsurError::InvalidEmbedding(
                "B' sets must partition the source boundary labels".into(),
            ));
        }
        if tgt_covered != self.target.boundary_labels {
            return Err(TsurError::InvalidEmbedding(
                "B sets must partition the target boundary labels".into(),
            ));
        }
        let chi: i64 = self.source.euler_characteristic()
            + self.components.iter().map(|c| c.euler_characteristic()).sum::<i64>();
        if chi != self.target.euler_characteristic() {
            return Err(TsurError::InvalidEmbedding(format!(
                "Euler characteristic mismatch: source + components = {chi}, target = {}",
                self.target.euler_characteristic()
            )));
        }
        Ok(())
    }

    /// Identity embedding: every boundary sits in its own annulus.
    pub fn identity(shell: &Shell) -> Self {
        let components = shell
            .boundary_labels
            .iter()
            .map(|&l| Component::new(0, vec![l], vec![l]))
            .collect();
        EmbeddingCombinatorics { source: shell.clone(), target: shell.clone(), components }
    }
}

/// The combinatorics of the standard capping of a partitioned surface:
/// each block is absorbed by a genus-0 cap, and the target is the closed
/// surface of genus `g + sum (|p| - 1)`.
pub fn capping_embedding(surface: &PartitionedSurface) -> EmbeddingCombinatorics {
    let extra: usize = surface.partition.iter().map(|p| p.len() - 1).sum();
    let components = surface
        .partition
        .iter()
        .map(|block| Component::new(0, vec![], block.clone()))
        .collect();
    EmbeddingCombinatorics {
        source: Shell::from(surface),
        target: Shell::closed(surface.g + extra),
        components,
    }
}

fn check_partition(labels: &[Label], partition: &[Vec<Label>]) -> Result<(), TsurError> {
    let mut covered: Vec<Label> = partition.iter().flatten().copied().collect();
    covered.sort_unstable();
    let mut expected = labels.to_vec();
    expected.sort_unstable();
    if covered != expected || partition.iter().any(|b| b.is_empty()) {
        return Err(TsurError::LabelMismatch(format!("{partition:?}")));
    }
    Ok(())
}

fn block_index_of(partition: &[Vec<Label>], label: Label) -> Option<usize> {
    partition.iter().position(|b| b.contains(&label))
}

/// Condition 1: each nonempty `B'_S` lies inside a single block of `P1`.
fn condition_one(emb: &EmbeddingCombinatorics, p1: &[Vec<Label>]) -> bool {
    emb.components.iter().all(|c| {
        let Some(&first) = c.b_prime.first() else { return true };
        match block_index_of(p1, first) {
            Some(i) => c.b_prime.iter().all(|&l| p1[i].contains(&l)),
            None => false,
        }
    })
}

/// Condition 2: target boundaries in a common `P2`-block but in distinct
/// components force the union of those components' `B'` sets into a
/// single `P1`-block.
fn condition_two(
    emb: &EmbeddingCombinatorics,
    p1: &[Vec<Label>],
    p2: &[Vec<Label>],
) -> bool {
    for q in p2 {
        let comps: Vec<usize> = emb
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| c.b.iter().any(|l| q.contains(l)))
            .map(|(i, _)| i)
            .collect();
        let mut union: Vec<Label> = Vec::new();
        for &i in &comps {
            union.extend(emb.components[i].b_prime.iter().copied());
        }
        if union.is_empty() {
            continue;
        }
        let Some(bi) = block_index_of(p1, union[0]) else { return false };
        if !union.iter().all(|&l| p1[bi].contains(&l)) {
            return false;
        }
    }
    true
}

/// The two morphism conditions of the partitioned-surface category.
pub fn is_tsur_morphism(
    emb: &EmbeddingCombinatorics,
    p1: &[Vec<Label>],
    p2: &[Vec<Label>],
) -> Result<bool, TsurError> {
    check_partition(&emb.source.boundary_labels, p1)?;
    check_partition(&emb.target.boundary_labels, p2)?;
    Ok(condition_one(emb, p1) && condition_two(emb, p1, p2))
}

/// The partition of the source induced by the embedding: the nonempty
/// `B'_S` sets.
pub fn induced_partition_from_embedding(emb: &EmbeddingCombinatorics) -> Vec<Vec<Label>> {
    let mut blocks: Vec<Vec<Label>> = emb
        .components
        .iter()
        .filter(|c| !c.b_prime.is_empty())
        .map(|c| c.b_prime.clone())
        .collect();
    blocks.sort_by_key(|b| b.first().copied());
    blocks
}

/// For each `P2`-block, the index of the unique `P1`-block containing the
/// source boundaries reachable through it (`None` when the block meets no
/// component holding source boundaries).
pub fn retraction_map(
    emb: &EmbeddingCombinatorics,
    p1: &[Vec<Label>],
    p2: &[Vec<Label>],
) -> Result<Vec<Option<usize>>, TsurError> {
    if !is_tsur_morphism(emb, p1, p2)? {
        return Err(TsurError::NotAMorphism);
    }
    let mut map = Vec::with_capacity(p2.len());
    for q in p2 {
        let mut union: Vec<Label> = Vec::new();
        for c in &emb.components {
            if c.b.iter().any(|l| q.contains(l)) {
                union.extend(c.b_prime.iter().copied());
            }
        }
        map.push(union.first().and_then(|&l| block_index_of(p1, l)));
    }
    Ok(map)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Compose two embeddings. Components of the two embeddings are glued
/// along shared middle-surface boundary labels; genus of each merged
/// component is recovered from additivity of the Euler characteristic.
pub fn compose(
    emb1: &EmbeddingCombinatorics,
    emb2: &EmbeddingCombinatorics,
) -> Result<EmbeddingCombinatorics, TsurError> {
    if emb1.target != emb2.source {
        return Err(TsurError::ShellMismatch);
    }
    let n1 = emb1.components.len();
    let n = n1 + emb2.components.len();
    let mut uf = UnionFind::new(n);
    for &mid in &emb1.target.boundary_labels {
        let i = emb1
            .components
            .iter()
            .position(|c| c.b.contains(&mid))
            .expect("validated embeddings cover the middle boundary");
        let j = emb2
            .components
            .iter()
            .position(|c| c.b_prime.contains(&mid))
            .expect("validated embeddings cover the middle boundary");
        uf.union(i, n1 + j);
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for x in 0..n {
        let root = uf.find(x);
        groups.entry(root).or_default().push(x);
    }
    let mut components = Vec::new();
    for members in groups.values() {
        let mut b: Vec<Label> = Vec::new();
        let mut b_prime: Vec<Label> = Vec::new();
        let mut chi: i64 = 0;
        for &x in members {
            if x < n1 {
                let c = &emb1.components[x];
                b_prime.extend(c.b_prime.iter().copied());
                chi += c.euler_characteristic();
            } else {
                let c = &emb2.components[x - n1];
                b.extend(c.b.iter().copied());
                chi += c.euler_characteristic();
            }
        }
        // chi = 2 - 2 genus - (|B| + |B'|)
        let two_genus = 2 - chi - (b.len() + b_prime.len()) as i64;
        if two_genus < 0 || two_genus % 2 != 0 {
            return Err(TsurError::InvalidEmbedding(
                "composition produced an impossible component".into(),
            ));
        }
        components.push(Component::new(two_genus as usize / 2, b, b_prime));
    }
    EmbeddingCombinatorics::new(emb1.source.clone(), emb2.target.clone(), components)
}

/// The partition of the source under which Torelli membership is
/// equivalent to membership after the embedding: compose with the
/// standard capping of the target and read off the induced partition.
pub fn restriction_partition(
    emb: &EmbeddingCombinatorics,
    p2: &[Vec<Label>],
) -> Result<Vec<Vec<Label>>, TsurError> {
    check_partition(&emb.target.boundary_labels, p2)?;
    let target = PartitionedSurface::new(
        emb.target.g,
        emb.target.boundary_labels.clone(),
        p2.to_vec(),
    )?;
    let cap = capping_embedding(&target);
    let composite = compose(emb, &cap)?;
    Ok(induced_partition_from_embedding(&composite))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::Vector;
    use crate::mapclass::{
        acts_trivially, acts_trivially_symplectic, push_through_capping, TwistWord,
    };
    use crate::psurface::{build_h1p, standard_capping, ClosedClass};
    use num_bigint::BigInt;

    fn surf(g: usize, blocks: &[&[Label]]) -> PartitionedSurface {
        PartitionedSurface::with_partition(g, blocks).unwrap()
    }

    fn blocks(b: &[&[Label]]) -> Vec<Vec<Label>> {
        b.iter().map(|x| x.to_vec()).collect()
    }

    #[test]
    fn capping_embeddings_are_morphisms() {
        for s in [
            surf(0, &[&[1, 2], &[3, 4]]),
            surf(1, &[&[1, 2, 3], &[4, 5], &[6], &[7], &[8]]),
            surf(2, &[&[1]]),
        ] {
            let emb = capping_embedding(&s);
            emb.validate().unwrap();
            assert!(is_tsur_morphism(&emb, &s.partition, &[]).unwrap());
            assert_eq!(induced_partition_from_embedding(&emb), s.partition);
            assert_eq!(retraction_map(&emb, &s.partition, &[]).unwrap(), vec![]);
        }
    }

    #[test]
    fn violating_embedding_rejected() {
        // Four-holed sphere capped so that {1,3} and {2,4} merge, tested
        // against the partition {{1,2},{3,4}}: condition 1 fails.
        let q = surf(0, &[&[1, 3], &[2, 4]]);
        let emb = capping_embedding(&q);
        let p1 = blocks(&[&[1, 2], &[3, 4]]);
        assert!(!is_tsur_morphism(&emb, &p1, &[]).unwrap());
        assert_eq!(retraction_map(&emb, &p1, &[]), Err(TsurError::NotAMorphism));
    }

    #[test]
    fn violating_embedding_has_witness_word() {
        // A word trivial for P1 = {{1,2},{3,4}} but nontrivial after
        // pushing through the embedding that merges {1,3} and {2,4}.
        let p1_surface = surf(0, &[&[1, 2], &[3, 4]]);
        let m1 = build_h1p(&p1_surface);
        let gamma = ClosedClass::new(&p1_surface, {
            let b1 = p1_surface.class_beta(1).unwrap();
            let b2 = p1_surface.class_beta(2).unwrap();
            b1.iter().zip(b2.iter()).map(|(x, y)| x + y).collect::<Vector>()
        })
        .unwrap();
        let word = TwistWord::new(vec![(gamma, BigInt::from(1))]);
        assert!(acts_trivially(&word, &m1));

        let q_surface = surf(0, &[&[1, 3], &[2, 4]]);
        let cap = standard_capping(&q_surface).unwrap();
        // Same coordinates, reread on the Q-partitioned surface.
        let pushed = push_through_capping(&word, &cap);
        assert!(!acts_trivially_symplectic(&pushed, &cap.target_space()));
    }

    #[test]
    fn identity_embedding() {
        let shell = Shell::new(1, vec![1, 2, 3]);
        let emb = EmbeddingCombinatorics::identity(&shell);
        emb.validate().unwrap();
        let p = blocks(&[&[1, 2], &[3]]);
        assert!(is_tsur_morphism(&emb, &p, &p).unwrap());
        assert_eq!(retraction_map(&emb, &p, &p).unwrap(), vec![Some(0), Some(1)]);
        assert_eq!(restriction_partition(&emb, &p).unwrap(), p);
    }

    #[test]
    fn euler_characteristic_validation() {
        let bad = EmbeddingCombinatorics::new(
            Shell::new(0, vec![1]),
            Shell::closed(5),
            vec![Component::new(0, vec![], vec![1])],
        );
        assert!(matches!(bad, Err(TsurError::InvalidEmbedding(_))));
    }

    #[test]
    fn condition_two_detection() {
        // Source: two annuli around boundaries 1 and 2 of a genus-2
        // target with boundaries {5, 6}; P2 joins 5 and 6, so condition 2
        // requires {1} and {2} to share a P1-block.
        let emb = EmbeddingCombinatorics::new(
            Shell::new(1, vec![1, 2]),
            Shell::new(1, vec![5, 6]),
            vec![
                Component::new(0, vec![5], vec![1]),
                Component::new(0, vec![6], vec![2]),
            ],
        )
        .unwrap();
        let p2 = blocks(&[&[5, 6]]);
        assert!(is_tsur_morphism(&emb, &blocks(&[&[1, 2]]), &p2).unwrap());
        assert!(!is_tsur_morphism(&emb, &blocks(&[&[1], &[2]]), &p2).unwrap());
        // With separated P2-blocks both partitions pass.
        let p2 = blocks(&[&[5], &[6]]);
        assert!(is_tsur_morphism(&emb, &blocks(&[&[1], &[2]]), &p2).unwrap());
    }

    #[test]
    fn compose_with_identity() {
        let s = surf(1, &[&[1, 2]]);
        let emb = capping_embedding(&s);
        let id_src = EmbeddingCombinatorics::identity(&emb.source);
        let id_tgt = EmbeddingCombinatorics::identity(&emb.target);
        assert_eq!(compose(&id_src, &emb).unwrap(), emb);
        assert_eq!(compose(&emb, &id_tgt).unwrap(), emb);
    }

    #[test]
    fn compose_cappings() {
        // Cap boundaries {1,2} of a 3-holed torus into a single new
        // handle, leaving boundary 3; then cap {3} with a disc.
        let first = EmbeddingCombinatorics::new(
            Shell::new(1, vec![1, 2, 3]),
            Shell::new(2, vec![3]),
            vec![
                Component::new(0, vec![], vec![1, 2]),
                Component::new(0, vec![3], vec![3]),
            ],
        )
        .unwrap();
        let second = EmbeddingCombinatorics::new(
            Shell::new(2, vec![3]),
            Shell::closed(2),
            vec![Component::new(0, vec![], vec![3])],
        )
        .unwrap();
        let composite = compose(&first, &second).unwrap();
        assert_eq!(composite.target, Shell::closed(2));
        assert_eq!(
            induced_partition_from_embedding(&composite),
            blocks(&[&[1, 2], &[3]])
        );
    }

    #[test]
    fn compose_associative() {
        let a = EmbeddingCombinatorics::new(
            Shell::new(0, vec![1, 2]),
            Shell::new(0, vec![5, 6]),
            vec![
                Component::new(0, vec![5], vec![1]),
                Component::new(0, vec![6], vec![2]),
            ],
        )
        .unwrap();
        let b = EmbeddingCombinatorics::new(
            Shell::new(0, vec![5, 6]),
            Shell::new(1, vec![9]),
            vec![Component::new(0, vec![9], vec![5, 6])],
        )
        .unwrap();
        let c = EmbeddingCombinatorics::new(
            Shell::new(1, vec![9]),
            Shell::closed(1),
            vec![Component::new(0, vec![], vec![9])],
        )
        .unwrap();
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn restriction_partition_examples() {
        // A capping into a closed target returns its own partition.
        let s = surf(1, &[&[1, 2], &[3]]);
        let emb = capping_embedding(&s);
        assert_eq!(restriction_partition(&emb, &[]).unwrap(), s.partition);

        // Four-holed sphere into a two-holed sphere: discs on 1 and 2,
        // annuli carrying 3 and 4 out to the target boundaries; a target
        // block {5,6} merges blocks {3} and {4}.
        let emb = EmbeddingCombinatorics::new(
            Shell::new(0, vec![1, 2, 3, 4]),
            Shell::new(0, vec![5, 6]),
            vec![
                Component::new(0, vec![], vec![1]),
                Component::new(0, vec![], vec![2]),
                Component::new(0, vec![5], vec![3]),
                Component::new(0, vec![6], vec![4]),
            ],
        )
        .unwrap();
        let p1 = restriction_partition(&emb, &blocks(&[&[5, 6]])).unwrap();
        assert_eq!(p1, blocks(&[&[1], &[2], &[3, 4]]));
        let p1 = restriction_partition(&emb, &blocks(&[&[5], &[6]])).unwrap();
        assert_eq!(p1, blocks(&[&[1], &[2], &[3], &[4]]));
    }

    #[test]
    fn embedding_json_roundtrip() {
        let s = surf(1, &[&[1, 2]]);
        let emb = capping_embedding(&s);
        let txt = serde_json::to_string(&emb).unwrap();
        let back: EmbeddingCombinatorics = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, emb);
        let parsed: EmbeddingCombinatorics = serde_json::from_str(
            r#"{"source":{"genus":1,"boundaries":[1,2]},
                "target":{"genus":2,"boundaries":[]},
                "components":[{"genus":0,"B":[],"Bprime":[1,2]}]}"#,
        )
        .unwrap();
        assert_eq!(parsed, emb);
    }
}
