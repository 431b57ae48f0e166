//! Combinatorial contraction of loops in the isotropic-line complex.
//!
//! A loop is a based edge-path of lines. A small calculus of local moves
//! (backtracks, triangle reroutes, augmented-triangle insertions and
//! removals, cone reroutes) transforms paths while every intermediate
//! step stays a valid edge-path. Each operation returns a [`MoveTrace`]
//! that can be replayed and verified independently of how it was found:
//! [`verify_trace`] re-checks every predicate from scratch.
//!
//! The main strategies are rank reduction along a coordinate axis
//! ([`reduce_rank`]), coning inside the submodule where the last handle
//! coordinates vanish ([`cone_contract_wprime`]), Farey contraction in a
//! rank-2 isotropic plane ([`farey_contract`]), and a genus-2 pipeline
//! combining both ([`genus2_contract`]).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intlinalg::{
    canonical_line, kernel, smith_normal_form, IntMatrix, SymplecticSpace, Vector,
};
use crate::isocomplex::{is_aug_triangle, is_simplex, ComplexError, ComplexSlice, FareyVertex,
    Line, Submodule};

#[derive(Debug, Error)]
pub enum ContractError {
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("search-exhausted: {0}")]
    SearchExhausted(String),
    #[error("contraction strategy stuck: {0}")]
    Stuck(String),
    #[error("value outside numeric range")]
    NumericRange,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A based edge-path in the isotropic-line complex of genus `g`.
///
/// Consecutive vertices must be distinct and span rank-2 isotropic
/// summands. A closed path of length greater than one repeats its
/// basepoint as the final vertex; the constant loop is a single vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathInComplex {
    pub g: usize,
    pub closed: bool,
    pub vertices: Vec<Line>,
}

impl PathInComplex {
    pub fn new(g: usize, closed: bool, vertices: Vec<Line>) -> Result<Self, ContractError> {
        let p = PathInComplex { g, closed, vertices };
        p.validate()?;
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn validate(&self) -> Result<(), ContractError> {
        if self.vertices.is_empty() {
            return Err(ContractError::InvalidPath("path has no vertices".into()));
        }
        for v in &self.vertices {
            if v.dim() != 2 * self.g {
                return Err(ContractError::InvalidPath(format!(
                    "vertex dimension {} does not match genus {}",
                    v.dim(),
                    self.g
                )));
            }
        }
        for (i, w) in self.vertices.windows(2).enumerate() {
            if w[0] == w[1] {
                return Err(ContractError::InvalidPath(format!(
                    "repeated vertex at position {i}"
                )));
            }
            if !is_simplex(&[w[0].clone(), w[1].clone()], self.g) {
                return Err(ContractError::InvalidPath(format!(
                    "consecutive vertices at position {i} do not span an edge"
                )));
            }
        }
        if self.closed && self.vertices.len() > 1 {
            if self.vertices.len() < 3 {
                return Err(ContractError::InvalidPath(
                    "a non-constant closed path needs at least three vertices".into(),
                ));
            }
            if self.vertices.first() != self.vertices.last() {
                return Err(ContractError::InvalidPath(
                    "closed path must end at its basepoint".into(),
                ));
            }
        }
        Ok(())
    }

    /// Maximum of `Rk_axis` over all vertices.
    pub fn max_rank_at(&self, axis: usize) -> BigInt {
        self.vertices
            .iter()
            .map(|v| v.rank_at(axis))
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

/// A local move on an edge-path. Positions refer to the path the move is
/// applied to; all predicates are re-checked on application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Move {
    /// Collapse `X - Y - X` starting at `pos` to `X`.
    Backtrack { pos: usize },
    /// Replace the edge `v[pos] - v[pos+1]` by `v[pos] - z - v[pos+1]`,
    /// requiring the three lines to span an isotropic triangle.
    EdgeTriangle { pos: usize, z: Line },
    /// Replace `X - A - Y` (starting at `pos`) by `X - z_1 - ... - z_k - Y`
    /// where every consecutive pair together with `A` spans a triangle.
    /// With `k = 0` this removes `A`, requiring the triangle `{X, A, Y}`.
    StarReplace { pos: usize, zs: Vec<Line> },
    /// Insert the middle vertex of an augmented triangle on the edge
    /// `v[pos] - v[pos+1]`.
    AugTriangleInsert { pos: usize, mid: Line },
    /// Remove `v[pos+1]` when `v[pos] - v[pos+1] - v[pos+2]` is an
    /// augmented triangle.
    AugTriangleRemove { pos: usize },
    /// Replace the edge `v[pos] - v[pos+1]` by routing through `apex`,
    /// requiring the triangle `{v[pos], v[pos+1], apex}`.
    Cone { pos: usize, apex: Line },
}

fn bad(move_name: &str, predicate: &str) -> ContractError {
    ContractError::InvalidMove(format!("{move_name} requires {predicate}"))
}

/// Apply a move to a path, checking its predicate, and return the new path.
pub fn apply_move(path: &PathInComplex, mv: &Move) -> Result<PathInComplex, ContractError> {
    let g = path.g;
    let v = &path.vertices;
    let out_of_range =
        |name: &str| ContractError::InvalidMove(format!("{name} position out of range"));
    let mut vertices = v.clone();
    match mv {
        Move::Backtrack { pos } => {
            if pos + 2 >= v.len() {
                return Err(out_of_range("backtrack"));
            }
            if v[*pos] != v[pos + 2] {
                return Err(bad("backtrack", "equal vertices two steps apart"));
            }
            vertices.drain(pos + 1..pos + 3);
        }
        Move::EdgeTriangle { pos, z } => {
            if pos + 1 >= v.len() {
                return Err(out_of_range("edge-triangle"));
            }
            if !is_simplex(&[v[*pos].clone(), z.clone(), v[pos + 1].clone()], g) {
                return Err(bad("edge-triangle", "an isotropic triangle with the new vertex"));
            }
            vertices.insert(pos + 1, z.clone());
        }
        Move::StarReplace { pos, zs } => {
            if pos + 2 >= v.len() {
                return Err(out_of_range("star-replace"));
            }
            let x = &v[*pos];
            let a = &v[pos + 1];
            let y = &v[pos + 2];
            let mut chain: Vec<&Line> = vec![x];
            chain.extend(zs.iter());
            chain.push(y);
            for (i, w) in chain.windows(2).enumerate() {
                if !is_simplex(&[w[0].clone(), a.clone(), w[1].clone()], g) {
                    return Err(bad(
                        "star-replace",
                        &format!("a triangle with the replaced vertex at step {i}"),
                    ));
                }
            }
            vertices.splice(pos + 1..pos + 2, zs.iter().cloned());
        }
        Move::AugTriangleInsert { pos, mid } => {
            if pos + 1 >= v.len() {
                return Err(out_of_range("aug-insert"));
            }
            if !is_aug_triangle(&v[*pos], mid, &v[pos + 1]) {
                return Err(bad("aug-insert", "an augmented triangle"));
            }
            vertices.insert(pos + 1, mid.clone());
        }
        Move::AugTriangleRemove { pos } => {
            if pos + 2 >= v.len() {
                return Err(out_of_range("aug-remove"));
            }
            if !is_aug_triangle(&v[*pos], &v[pos + 1], &v[pos + 2]) {
                return Err(bad("aug-remove", "an augmented triangle"));
            }
            vertices.remove(pos + 1);
        }
        Move::Cone { pos, apex } => {
            if pos + 1 >= v.len() {
                return Err(out_of_range("cone"));
            }
            if !is_simplex(&[v[*pos].clone(), v[pos + 1].clone(), apex.clone()], g) {
                return Err(bad("cone", "an isotropic triangle with the apex"));
            }
            vertices.insert(pos + 1, apex.clone());
        }
    }
    PathInComplex::new(g, path.closed, vertices)
}

/// A replayable record of a sequence of moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveTrace {
    pub initial: PathInComplex,
    pub moves: Vec<Move>,
    pub final_path: PathInComplex,
}

impl MoveTrace {
    /// The trivial trace that leaves a path unchanged.
    pub fn empty(path: &PathInComplex) -> MoveTrace {
        MoveTrace { initial: path.clone(), moves: vec![], final_path: path.clone() }
    }
}

/// Replay a trace from its initial path, re-checking every move predicate,
/// and confirm it reproduces the recorded final path.
pub fn verify_trace(trace: &MoveTrace) -> bool {
    if trace.initial.validate().is_err() {
        return false;
    }
    let mut cur = trace.initial.clone();
    for mv in &trace.moves {
        match apply_move(&cur, mv) {
            Ok(next) => cur = next,
            Err(_) => return false,
        }
    }
    cur == trace.final_path
}

fn push_move(
    cur: &mut PathInComplex,
    moves: &mut Vec<Move>,
    mv: Move,
) -> Result<(), ContractError> {
    *cur = apply_move(cur, &mv)?;
    moves.push(mv);
    Ok(())
}

/// Apply every available backtrack, scanning from the left until none remain.
fn drain_backtracks(cur: &mut PathInComplex, moves: &mut Vec<Move>) -> Result<(), ContractError> {
    loop {
        let mut fired = false;
        let mut p = 0;
        while p + 2 < cur.len() {
            if cur.vertices[p] == cur.vertices[p + 2] {
                push_move(cur, moves, Move::Backtrack { pos: p })?;
                fired = true;
                p = p.saturating_sub(2);
            } else {
                p += 1;
            }
        }
        if !fired {
            return Ok(());
        }
    }
}

// ---------------------------------------------------------------------------
// Rank reduction along an axis
// ---------------------------------------------------------------------------

/// Search parameters for the rank-reduction and contraction strategies.
#[derive(Debug, Clone, Copy)]
pub struct SearchOpts {
    /// First sup-norm bound for candidate vertices in link searches.
    pub base_bound: u64,
    /// Bounds escalate by doubling up to this cap.
    pub max_bound: u64,
    /// Cap on the number of moves a greedy strategy may spend.
    pub budget: usize,
}

impl Default for SearchOpts {
    fn default() -> Self {
        SearchOpts { base_bound: 2, max_bound: 8, budget: 10_000 }
    }
}

fn split_pass(
    cur: &mut PathInComplex,
    moves: &mut Vec<Move>,
    axis: usize,
    r: &BigInt,
) -> Result<(), ContractError> {
    let mut i = 0;
    while i + 1 < cur.len() {
        let u = &cur.vertices[i];
        let w = &cur.vertices[i + 1];
        if &u.rank_at(axis) == r && &w.rank_at(axis) == r {
            let same_sign = u.rep()[axis].sign() == w.rep()[axis].sign();
            let mid_vec: Vector = u
                .rep()
                .iter()
                .zip(w.rep().iter())
                .map(|(a, b)| if same_sign { a - b } else { a + b })
                .collect();
            let mid = Line::new(&mid_vec)?;
            push_move(cur, moves, Move::AugTriangleInsert { pos: i, mid })?;
            i += 2;
        } else {
            i += 1;
        }
    }
    Ok(())
}

/// Insert the difference line between every adjacent pair of vertices that
/// both attain the maximal axis-rank, isolating the peaks. Inserted
/// vertices have axis-rank zero.
pub fn split_equal_rank_neighbors(
    path: &PathInComplex,
    axis: usize,
) -> Result<MoveTrace, ContractError> {
    path.validate()?;
    let r = path.max_rank_at(axis);
    let mut cur = path.clone();
    let mut moves = Vec::new();
    if !r.is_zero() {
        split_pass(&mut cur, &mut moves, axis, &r)?;
    }
    Ok(MoveTrace { initial: path.clone(), moves, final_path: cur })
}

// --- fast integer helpers for the link search -----------------------------

fn line_to_i64(l: &Line) -> Result<Vec<i64>, ContractError> {
    l.rep().iter().map(|x| x.to_i64().ok_or(ContractError::NumericRange)).collect()
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn pairing_i64(u: &[i64], v: &[i64]) -> i64 {
    let mut acc = 0i64;
    for i in 0..u.len() / 2 {
        acc += u[2 * i] * v[2 * i + 1] - u[2 * i + 1] * v[2 * i];
    }
    acc
}

fn pair_summand_i64(u: &[i64], v: &[i64]) -> bool {
    let mut acc = 0i64;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            let minor = u[i] * v[j] - u[j] * v[i];
            acc = gcd_i64(acc, minor);
            if acc == 1 {
                return true;
            }
        }
    }
    false
}

fn triple_summand_i64(u: &[i64], v: &[i64], w: &[i64]) -> bool {
    let n = u.len();
    let mut acc: i128 = 0;
    for i in 0..n {
        for j in i + 1..n {
            let mij = (u[i] * v[j] - u[j] * v[i]) as i128;
            for k in j + 1..n {
                let mik = (u[i] * v[k] - u[k] * v[i]) as i128;
                let mjk = (u[j] * v[k] - u[k] * v[j]) as i128;
                let det = w[i] as i128 * mjk - w[j] as i128 * mik + w[k] as i128 * mij;
                acc = gcd_i128(acc, det);
                if acc == 1 {
                    return true;
                }
            }
        }
    }
    false
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Enumerate canonical primitive vectors of sup-norm at most `bound`
/// satisfying `row . v = 0` for every constraint row.
fn enumerate_constrained(
    dim: usize,
    bound: i64,
    constraints: &[Vec<i64>],
) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut state = vec![-bound; dim];
    'outer: loop {
        'body: {
            // Canonical: first nonzero coordinate positive.
            let mut first = None;
            for (i, &c) in state.iter().enumerate() {
                if c != 0 {
                    first = Some(i);
                    break;
                }
            }
            let Some(first) = first else { break 'body };
            if state[first] < 0 {
                break 'body;
            }
            for row in constraints {
                let dot: i64 = row.iter().zip(&state).map(|(a, b)| a * b).sum();
                if dot != 0 {
                    break 'body;
                }
            }
            let mut g = 0i64;
            for &c in &state {
                g = gcd_i64(g, c);
                if g == 1 {
                    break;
                }
            }
            if g != 1 {
                break 'body;
            }
            out.push(state.clone());
        }
        for i in (0..dim).rev() {
            if state[i] < bound {
                state[i] += 1;
                continue 'outer;
            }
            state[i] = -bound;
        }
        break;
    }
    out
}

fn pairing_row_i64(w: &[i64]) -> Vec<i64> {
    let mut r = vec![0i64; w.len()];
    for i in 0..w.len() / 2 {
        r[2 * i] = w[2 * i + 1];
        r[2 * i + 1] = -w[2 * i];
    }
    r
}

struct LinkSearch<'a> {
    a: Vec<i64>,
    l: Option<Vec<i64>>,
    candidates: Vec<Vec<i64>>,
    x: &'a [i64],
    y: &'a [i64],
}

impl<'a> LinkSearch<'a> {
    fn adjacent(&self, u: &[i64], v: &[i64]) -> bool {
        if u == v {
            return false;
        }
        if pairing_i64(u, v) != 0 {
            return false;
        }
        if !triple_summand_i64(u, v, &self.a) {
            return false;
        }
        if let Some(l) = &self.l {
            if !triple_summand_i64(u, v, l) {
                return false;
            }
        }
        true
    }

    /// Breadth-first search from `x` to `y` over the candidate set with a
    /// cap on explored nodes; returns interior vertices of the path.
    fn bfs(&self, cap: usize) -> Option<Vec<Vec<i64>>> {
        let mut nodes: Vec<&[i64]> = vec![self.x, self.y];
        for c in &self.candidates {
            if c.as_slice() != self.x && c.as_slice() != self.y {
                nodes.push(c);
            }
        }
        let mut parent: Vec<Option<usize>> = vec![None; nodes.len()];
        let mut seen = vec![false; nodes.len()];
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(0usize);
        let mut explored = 0usize;
        while let Some(ui) = queue.pop_front() {
            explored += 1;
            if explored > cap {
                return None;
            }
            for vi in 0..nodes.len() {
                if seen[vi] || !self.adjacent(nodes[ui], nodes[vi]) {
                    continue;
                }
                seen[vi] = true;
                parent[vi] = Some(ui);
                if vi == 1 {
                    let mut rev = Vec::new();
                    let mut cur = parent[1];
                    while let Some(i) = cur {
                        if i != 0 {
                            rev.push(nodes[i].to_vec());
                        }
                        cur = parent[i];
                    }
                    rev.reverse();
                    return Some(rev);
                }
                queue.push_back(vi);
            }
        }
        None
    }
}

fn escalating_bounds(opts: &SearchOpts) -> Vec<i64> {
    let mut out = Vec::new();
    let mut b = opts.base_bound.max(1);
    while b <= opts.max_bound {
        out.push(b as i64);
        b *= 2;
    }
    if out.is_empty() {
        out.push(opts.base_bound.max(1) as i64);
    }
    out
}

/// Find interior vertices `z_1 .. z_k` such that `x - z_1 - .. - z_k - y`
/// is a path in the link of `a` (and of `l`, when given), then shift each
/// interior vertex by the multiple of `a` that minimises its axis-rank.
fn find_link_path(
    x: &Line,
    y: &Line,
    a: &Line,
    l: Option<&Line>,
    partner: Option<usize>,
    axis: usize,
    g: usize,
    opts: &SearchOpts,
) -> Result<Vec<Line>, ContractError> {
    let xi = line_to_i64(x)?;
    let yi = line_to_i64(y)?;
    let ai = line_to_i64(a)?;
    let li = l.map(line_to_i64).transpose()?;

    let mut constraints = vec![pairing_row_i64(&ai)];
    if let Some(lv) = &li {
        constraints.push(pairing_row_i64(lv));
    }
    if let Some(p) = partner {
        let mut row = vec![0i64; 2 * g];
        row[p] = 1;
        constraints.push(row);
    }

    let mut diag = Vec::new();
    for bound in escalating_bounds(opts) {
        let grid = (2 * bound + 1).checked_pow(2 * g as u32);
        if grid.is_none() || grid.unwrap() > 80_000_000 {
            diag.push(format!("bound {bound}: grid too large"));
            continue;
        }
        let mut candidates = enumerate_constrained(2 * g, bound, &constraints);
        candidates.retain(|c| {
            c != &ai
                && pair_summand_i64(c, &ai)
                && li.as_ref().map_or(true, |lv| pair_summand_i64(c, lv))
        });
        let search = LinkSearch { a: ai.clone(), l: li.clone(), candidates, x: &xi, y: &yi };
        // Depth 0: direct triangle.
        let interior = if search.adjacent(&xi, &yi) {
            Some(Vec::new())
        } else {
            // Depth 1: a single connecting vertex, then a capped BFS.
            let single = search
                .candidates
                .iter()
                .find(|z| search.adjacent(&xi, z) && search.adjacent(z, &yi))
                .cloned();
            match single {
                Some(z) => Some(vec![z]),
                None => search.bfs(4000),
            }
        };
        let Some(interior) = interior else {
            diag.push(format!("bound {bound}: {} candidates, no path", search.candidates.len()));
            continue;
        };
        // Shift interior vertices towards axis-rank below the peak rank.
        let a_ax = &a.rep()[axis];
        let mut zs = Vec::new();
        for z in &interior {
            let zv: Vector = z.iter().map(|&c| BigInt::from(c)).collect();
            let shifted = if a_ax.is_zero() {
                zv
            } else {
                let a_abs = a_ax.abs();
                let mut rem = zv[axis].mod_floor(&a_abs);
                if &rem * 2 > a_abs {
                    rem -= &a_abs;
                }
                let q = (&rem - &zv[axis]) / a_ax;
                zv.iter().zip(a.rep().iter()).map(|(zc, ac)| zc + &q * ac).collect()
            };
            zs.push(Line::new(&shifted)?);
        }
        // Reject paths where shifting produced adjacent duplicates.
        let mut chain = vec![x.clone()];
        chain.extend(zs.iter().cloned());
        chain.push(y.clone());
        if chain.windows(2).any(|w| w[0] == w[1]) {
            diag.push(format!("bound {bound}: shift collision"));
            continue;
        }
        return Ok(zs);
    }
    Err(ContractError::SearchExhausted(format!(
        "no path in the link joins the peak neighbours; attempts: [{}]",
        diag.join("; ")
    )))
}

/// Reduce the maximal axis-rank of a based loop to zero by isolating the
/// peak vertices and rerouting each through its link.
///
/// When the axis is an `a`-coordinate, the partner `b`-coordinate must be
/// zero on every vertex and is kept zero throughout, so reducing `b_g`
/// and then `a_g` lands the loop in the submodule where both vanish.
/// When `within_link` is given, all inserted vertices stay in the link of
/// that line.
pub fn reduce_rank(
    path: &PathInComplex,
    axis: usize,
    within_link: Option<&Line>,
    opts: &SearchOpts,
) -> Result<MoveTrace, ContractError> {
    path.validate()?;
    let g = path.g;
    if axis >= 2 * g {
        return Err(ContractError::InvalidPath(format!("axis {axis} out of range")));
    }
    let partner = if axis % 2 == 0 { Some(axis + 1) } else { None };
    if let Some(p) = partner {
        for v in &path.vertices {
            if !v.rank_at(p).is_zero() {
                return Err(ContractError::InvalidPath(
                    "axis partner coordinate must vanish on every vertex".into(),
                ));
            }
        }
    }
    if let Some(l) = within_link {
        for v in &path.vertices {
            if !is_simplex(&[v.clone(), l.clone()], g) {
                return Err(ContractError::InvalidPath(
                    "path vertex is not in the prescribed link".into(),
                ));
            }
        }
    }
    let mut cur = path.clone();
    let mut moves = Vec::new();
    loop {
        let r = cur.max_rank_at(axis);
        if r.is_zero() {
            break;
        }
        if cur.closed {
            if cur.vertices[0].rank_at(axis) == r {
                return Err(ContractError::InvalidPath(
                    "basepoint attains the maximal axis-rank".into(),
                ));
            }
        } else if cur.vertices[0].rank_at(axis) == r
            || cur.vertices[cur.len() - 1].rank_at(axis) == r
        {
            return Err(ContractError::InvalidPath(
                "endpoint attains the maximal axis-rank".into(),
            ));
        }
        split_pass(&mut cur, &mut moves, axis, &r)?;
        loop {
            let peak = (1..cur.len().saturating_sub(1))
                .find(|&i| cur.vertices[i].rank_at(axis) == r);
            let Some(i) = peak else { break };
            let x = cur.vertices[i - 1].clone();
            let a = cur.vertices[i].clone();
            let y = cur.vertices[i + 1].clone();
            if x == y {
                push_move(&mut cur, &mut moves, Move::Backtrack { pos: i - 1 })?;
                continue;
            }
            let zs = find_link_path(&x, &y, &a, within_link, partner, axis, g, opts)?;
            push_move(&mut cur, &mut moves, Move::StarReplace { pos: i - 1, zs })?;
        }
    }
    Ok(MoveTrace { initial: path.clone(), moves, final_path: cur })
}

// ---------------------------------------------------------------------------
// Cone contraction inside the last-handle-trivial submodule
// ---------------------------------------------------------------------------

/// The line of the standard vector `a_g`.
pub fn last_a_line(g: usize) -> Line {
    let space = SymplecticSpace::new(g);
    Line::new(&space.a(g)).expect("standard basis vector is a line")
}

/// Contract a closed loop whose vertices have vanishing `a_g` and `b_g`
/// coordinates: every edge cones over `a_g`, so route each edge through
/// the apex and collapse the resulting backtracks, ending at the constant
/// loop on the basepoint.
pub fn cone_contract_wprime(path: &PathInComplex) -> Result<MoveTrace, ContractError> {
    path.validate()?;
    if !path.closed {
        return Err(ContractError::InvalidPath("cone contraction expects a closed loop".into()));
    }
    let g = path.g;
    if g < 1 {
        return Err(ContractError::InvalidPath("genus must be positive".into()));
    }
    for v in &path.vertices {
        if !v.rank_at(2 * g - 2).is_zero() || !v.rank_at(2 * g - 1).is_zero() {
            return Err(ContractError::InvalidPath(
                "vertex has a nonzero last-handle coordinate".into(),
            ));
        }
    }
    let mut cur = path.clone();
    let mut moves = Vec::new();
    if cur.len() > 1 {
        let apex = last_a_line(g);
        let mut i = 0;
        while i + 1 < cur.len() {
            push_move(&mut cur, &mut moves, Move::Cone { pos: i, apex: apex.clone() })?;
            i += 2;
        }
        drain_backtracks(&mut cur, &mut moves)?;
    }
    if cur.len() != 1 {
        return Err(ContractError::Stuck("cone collapse did not reach the constant loop".into()));
    }
    Ok(MoveTrace { initial: path.clone(), moves, final_path: cur })
}

// ---------------------------------------------------------------------------
// Farey contraction in a rank-2 isotropic plane
// ---------------------------------------------------------------------------

/// Sum of the continued-fraction coefficients of `|b|/|a|`: the depth of
/// the corresponding vertex in the Stern-Brocot tessellation, zero on the
/// two base vertices.
fn farey_depth(a: &BigInt, b: &BigInt) -> u64 {
    let mut x = a.abs();
    let mut y = b.abs();
    let mut acc = 0u64;
    while !x.is_zero() && !y.is_zero() {
        if x >= y {
            acc += (&x / &y).to_u64().unwrap_or(u64::MAX);
            x = x.mod_floor(&y);
        } else {
            acc += (&y / &x).to_u64().unwrap_or(u64::MAX);
            y = y.mod_floor(&x);
        }
    }
    acc
}

fn plane_depth(sub: &Submodule, v: &Line) -> Result<u64, ContractError> {
    let c = sub
        .coordinates(v.rep())
        .ok_or_else(|| ContractError::InvalidPath("vertex outside the plane".into()))?;
    Ok(farey_depth(&c[0], &c[1]))
}

fn line_sum(x: &Line, sign_plus: bool, y: &Line) -> Result<Line, ContractError> {
    let v: Vector = x
        .rep()
        .iter()
        .zip(y.rep().iter())
        .map(|(a, b)| if sign_plus { a + b } else { a - b })
        .collect();
    Ok(Line::new(&v)?)
}

/// Contract a closed loop lying in a rank-2 isotropic plane to the
/// constant loop on its basepoint, using only backtracks and
/// augmented-triangle moves. The deepest interior vertex is removed when
/// its neighbours close a triangle, and otherwise rerouted through a
/// strictly shallower parent, so the total depth strictly decreases.
fn contract_plane_loop(
    path: &PathInComplex,
    sub: &Submodule,
) -> Result<MoveTrace, ContractError> {
    path.validate()?;
    if !path.closed {
        return Err(ContractError::InvalidPath("plane contraction expects a closed loop".into()));
    }
    for v in &path.vertices {
        plane_depth(sub, v)?;
    }
    let mut cur = path.clone();
    let mut moves = Vec::new();
    let mut guard: u64 = 64;
    for v in &cur.vertices {
        guard += 8 * plane_depth(sub, v)? + 8;
    }
    loop {
        if guard == 0 {
            return Err(ContractError::Stuck("plane contraction exceeded its move guard".into()));
        }
        guard -= 1;
        drain_backtracks(&mut cur, &mut moves)?;
        if cur.len() == 1 {
            break;
        }
        let mut best: Option<(usize, u64)> = None;
        for i in 1..cur.len() - 1 {
            let d = plane_depth(sub, &cur.vertices[i])?;
            if best.map_or(true, |(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
        let (i, depth_v) = best.expect("non-constant loop has interior vertices");
        let x = cur.vertices[i - 1].clone();
        let v = cur.vertices[i].clone();
        let y = cur.vertices[i + 1].clone();
        if is_aug_triangle(&x, &v, &y) {
            push_move(&mut cur, &mut moves, Move::AugTriangleRemove { pos: i - 1 })?;
            continue;
        }
        // Reroute through a strictly shallower parent on one side.
        let mut done = false;
        'sides: for right in [true, false] {
            let nb = if right { &y } else { &x };
            for sign in [true, false] {
                let mid = line_sum(&v, sign, nb)?;
                if plane_depth(sub, &mid)? >= depth_v {
                    continue;
                }
                let removable = if right {
                    is_aug_triangle(&x, &v, &mid)
                } else {
                    is_aug_triangle(&mid, &v, &y)
                };
                if !removable {
                    continue;
                }
                if right {
                    push_move(&mut cur, &mut moves, Move::AugTriangleInsert {
                        pos: i,
                        mid: mid.clone(),
                    })?;
                    push_move(&mut cur, &mut moves, Move::AugTriangleRemove { pos: i - 1 })?;
                } else {
                    push_move(&mut cur, &mut moves, Move::AugTriangleInsert {
                        pos: i - 1,
                        mid: mid.clone(),
                    })?;
                    push_move(&mut cur, &mut moves, Move::AugTriangleRemove { pos: i })?;
                }
                done = true;
                break 'sides;
            }
        }
        if !done {
            return Err(ContractError::Stuck(format!(
                "no shallower reroute for the deepest interior vertex at position {i}"
            )));
        }
    }
    Ok(MoveTrace { initial: path.clone(), moves, final_path: cur })
}

fn plane_submodule(u: &Line, v: &Line) -> Result<Submodule, ContractError> {
    Ok(Submodule::new(&[u.rep().clone(), v.rep().clone()])?)
}

/// Contract a closed loop of Farey vertices to its basepoint, realising
/// the loop in the plane `<a_1, a_2>` of the genus-2 complex and using
/// only augmented-triangle moves and backtracks.
pub fn farey_contract(loop_vertices: &[FareyVertex]) -> Result<MoveTrace, ContractError> {
    if loop_vertices.len() < 2 || loop_vertices.first() != loop_vertices.last() {
        return Err(ContractError::InvalidPath(
            "a Farey loop must revisit its base vertex".into(),
        ));
    }
    let space = SymplecticSpace::new(2);
    let u = Line::new(&space.a(1))?;
    let w = Line::new(&space.a(2))?;
    let mut vertices = Vec::new();
    for fv in loop_vertices {
        let vec: Vector = u
            .rep()
            .iter()
            .zip(w.rep().iter())
            .map(|(uc, wc)| &fv.a * uc + &fv.b * wc)
            .collect();
        vertices.push(Line::new(&vec)?);
    }
    let mut vertices = vertices;
    if vertices.len() == 2 {
        // The closing repetition of a constant Farey loop.
        vertices.pop();
    }
    let path = PathInComplex::new(2, true, vertices)?;
    contract_plane_loop(&path, &plane_submodule(&u, &w)?)
}

// ---------------------------------------------------------------------------
// Genus-2 contraction
// ---------------------------------------------------------------------------

fn replay_with_offset(
    cur: &mut PathInComplex,
    moves: &mut Vec<Move>,
    sub_moves: &[Move],
    offset: usize,
) -> Result<(), ContractError> {
    for mv in sub_moves {
        let shifted = match mv {
            Move::Backtrack { pos } => Move::Backtrack { pos: pos + offset },
            Move::EdgeTriangle { pos, z } => {
                Move::EdgeTriangle { pos: pos + offset, z: z.clone() }
            }
            Move::StarReplace { pos, zs } => {
                Move::StarReplace { pos: pos + offset, zs: zs.clone() }
            }
            Move::AugTriangleInsert { pos, mid } => {
                Move::AugTriangleInsert { pos: pos + offset, mid: mid.clone() }
            }
            Move::AugTriangleRemove { pos } => Move::AugTriangleRemove { pos: pos + offset },
            Move::Cone { pos, apex } => Move::Cone { pos: pos + offset, apex: apex.clone() },
        };
        push_move(cur, moves, shifted)?;
    }
    Ok(())
}

/// Contract a closed genus-2 loop whose vertices lie in the span of
/// `a_1, b_1, a_2`. Loops inside the plane `<a_1, a_2>` contract by the
/// Farey strategy; otherwise each maximal run of positive `b_1`-rank is
/// flanked by `<a_2>` and its subloop contracts in the plane `<a_2, b_1>`.
/// A greedy shortening pass is the budgeted fallback.
pub fn genus2_contract(
    path: &PathInComplex,
    opts: &SearchOpts,
) -> Result<MoveTrace, ContractError> {
    path.validate()?;
    if path.g != 2 {
        return Err(ContractError::InvalidPath("genus-2 contraction expects genus 2".into()));
    }
    if !path.closed {
        return Err(ContractError::InvalidPath("genus-2 contraction expects a closed loop".into()));
    }
    for v in &path.vertices {
        if !v.rank_at(3).is_zero() {
            return Err(ContractError::InvalidPath(
                "vertex has a nonzero b_2 coordinate".into(),
            ));
        }
    }
    let space = SymplecticSpace::new(2);
    let a1 = Line::new(&space.a(1))?;
    let a2 = Line::new(&space.a(2))?;
    let plane_a = plane_submodule(&a1, &a2)?;
    let plane_b = plane_submodule(&a2, &Line::new(&space.b(1))?)?;
    let mut cur = path.clone();
    let mut moves = Vec::new();
    let mut budget = opts.budget;
    loop {
        if budget == 0 {
            return Err(ContractError::SearchExhausted(
                "genus-2 contraction exceeded its budget".into(),
            ));
        }
        budget -= 1;
        drain_backtracks(&mut cur, &mut moves)?;
        if cur.len() == 1 {
            break;
        }
        if cur.vertices.iter().all(|v| v.rank_at(1).is_zero()) {
            let sub_trace = contract_plane_loop(&cur, &plane_a)?;
            replay_with_offset(&mut cur, &mut moves, &sub_trace.moves, 0)?;
            continue;
        }
        // First maximal run of positive b_1-rank.
        let s = cur
            .vertices
            .iter()
            .position(|v| !v.rank_at(1).is_zero())
            .expect("some vertex has positive b_1-rank");
        if s == 0 {
            return Err(ContractError::InvalidPath(
                "basepoint has positive b_1-rank".into(),
            ));
        }
        let mut e = s;
        while e + 1 < cur.len() && !cur.vertices[e + 1].rank_at(1).is_zero() {
            e += 1;
        }
        if e + 1 >= cur.len() {
            return Err(ContractError::InvalidPath(
                "a positive-b_1-rank run reaches the end of the loop".into(),
            ));
        }
        let flanks_ok = cur.vertices[s - 1] == a2 && cur.vertices[e + 1] == a2;
        let run_in_plane = (s..=e).all(|i| {
            cur.vertices[i].rank_at(0).is_zero() && cur.vertices[i].rank_at(3).is_zero()
        });
        if flanks_ok && run_in_plane {
            let sub_path = PathInComplex::new(
                2,
                true,
                cur.vertices[s - 1..=e + 1].to_vec(),
            )?;
            let sub_trace = contract_plane_loop(&sub_path, &plane_b)?;
            replay_with_offset(&mut cur, &mut moves, &sub_trace.moves, s - 1)?;
            continue;
        }
        // Fallback: any single shortening move.
        let mut fired = false;
        for p in 0..cur.len().saturating_sub(2) {
            let x = cur.vertices[p].clone();
            let a = cur.vertices[p + 1].clone();
            let y = cur.vertices[p + 2].clone();
            if is_aug_triangle(&x, &a, &y) {
                push_move(&mut cur, &mut moves, Move::AugTriangleRemove { pos: p })?;
                fired = true;
                break;
            }
            if x != y && is_simplex(&[x, a, y], 2) {
                push_move(&mut cur, &mut moves, Move::StarReplace { pos: p, zs: vec![] })?;
                fired = true;
                break;
            }
        }
        if !fired {
            return Err(ContractError::SearchExhausted(
                "genus-2 fallback found no shortening move".into(),
            ));
        }
    }
    Ok(MoveTrace { initial: path.clone(), moves, final_path: cur })
}

// ---------------------------------------------------------------------------
// Random loops with contraction certificates
// ---------------------------------------------------------------------------

fn sample_in_kernel(
    rng: &mut ChaCha8Rng,
    rows: &[Vector],
    bound: u64,
    g: usize,
    accept: impl Fn(&Line) -> bool,
) -> Option<Line> {
    let dim = 2 * g;
    let m = IntMatrix::from_rows(rows);
    let basis = kernel(&m);
    if basis.is_empty() {
        return None;
    }
    for _ in 0..80 {
        let mut v = vec![BigInt::zero(); dim];
        for kv in &basis {
            let c = rng.gen_range(-1i64..=1);
            if c != 0 {
                for (vi, ki) in v.iter_mut().zip(kv.iter()) {
                    *vi += BigInt::from(c) * ki;
                }
            }
        }
        if v.iter().all(|c| c.is_zero()) {
            continue;
        }
        let Ok(canon) = canonical_line(&v) else { continue };
        let line = Line::new(&canon).ok()?;
        if line.sup_norm() > BigInt::from(bound) {
            continue;
        }
        if accept(&line) {
            return Some(line);
        }
    }
    None
}

fn pairing_row_big(w: &Line) -> Vector {
    let mut r = vec![BigInt::zero(); w.dim()];
    for i in 0..w.dim() / 2 {
        r[2 * i] = w.rep()[2 * i + 1].clone();
        r[2 * i + 1] = -w.rep()[2 * i].clone();
    }
    r
}

/// Grow a contractible based loop by random inverse moves, returning the
/// loop together with a certificate trace (the reversed inverses) that
/// contracts it back to the constant loop on `<a_1>`.
pub fn random_contractible_loop(
    g: usize,
    seed: u64,
    target_len: usize,
    bound: u64,
) -> Result<(PathInComplex, MoveTrace), ContractError> {
    if g < 1 {
        return Err(ContractError::InvalidPath("genus must be positive".into()));
    }
    let space = SymplecticSpace::new(g);
    let base = Line::new(&space.a(1))?;
    let mut cur = PathInComplex::new(g, true, vec![base.clone()])?;
    let mut undo: Vec<Move> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0usize;
    while cur.len() < target_len && attempts < 400 * target_len.max(1) {
        attempts += 1;
        let len = cur.len();
        match rng.gen_range(0..3u8) {
            0 => {
                // Inverse backtrack: X -> X - Z - X.
                let pos = rng.gen_range(0..len);
                let x = cur.vertices[pos].clone();
                let z = sample_in_kernel(&mut rng, &[pairing_row_big(&x)], bound, g, |z| {
                    is_simplex(&[x.clone(), z.clone()], g)
                });
                let Some(z) = z else { continue };
                let mut vertices = cur.vertices.clone();
                vertices.splice(pos + 1..pos + 1, [z, x]);
                cur = PathInComplex::new(g, true, vertices)?;
                undo.push(Move::Backtrack { pos });
            }
            1 if len >= 2 => {
                // Inverse triangle shortcut: X - Y -> X - Z - Y.
                let pos = rng.gen_range(0..len - 1);
                let x = cur.vertices[pos].clone();
                let y = cur.vertices[pos + 1].clone();
                let z = sample_in_kernel(
                    &mut rng,
                    &[pairing_row_big(&x), pairing_row_big(&y)],
                    bound,
                    g,
                    |z| is_simplex(&[x.clone(), z.clone(), y.clone()], g),
                );
                let Some(z) = z else { continue };
                let mut vertices = cur.vertices.clone();
                vertices.insert(pos + 1, z);
                cur = PathInComplex::new(g, true, vertices)?;
                undo.push(Move::StarReplace { pos, zs: vec![] });
            }
            2 if len >= 2 => {
                // Inverse augmented-triangle removal: insert the middle.
                let pos = rng.gen_range(0..len - 1);
                let x = cur.vertices[pos].clone();
                let y = cur.vertices[pos + 1].clone();
                let mid = line_sum(&x, rng.gen_bool(0.5), &y)?;
                if mid.sup_norm() > BigInt::from(bound) || mid == x || mid == y {
                    continue;
                }
                let mut vertices = cur.vertices.clone();
                vertices.insert(pos + 1, mid);
                cur = PathInComplex::new(g, true, vertices)?;
                undo.push(Move::AugTriangleRemove { pos });
            }
            _ => continue,
        }
    }
    undo.reverse();
    let certificate = MoveTrace {
        initial: cur.clone(),
        moves: undo,
        final_path: PathInComplex::new(g, true, vec![base])?,
    };
    if !verify_trace(&certificate) {
        return Err(ContractError::Stuck("growth certificate failed to verify".into()));
    }
    Ok((cur, certificate))
}

/// Grow a loop inside the isotropic plane spanned by two lines by
/// repeatedly inserting augmented-triangle middles (mediants), starting
/// from the triangle loop `u - v - u`.
pub fn random_mediant_loop(
    g: usize,
    u: &Line,
    v: &Line,
    seed: u64,
    steps: usize,
) -> Result<PathInComplex, ContractError> {
    let mut cur = PathInComplex::new(g, true, vec![u.clone(), v.clone(), u.clone()])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0usize;
    let mut inserted = 0usize;
    while inserted < steps && attempts < 50 * steps.max(1) {
        attempts += 1;
        let pos = rng.gen_range(0..cur.len() - 1);
        let x = cur.vertices[pos].clone();
        let y = cur.vertices[pos + 1].clone();
        let mid = line_sum(&x, rng.gen_bool(0.5), &y)?;
        if mid == x || mid == y {
            continue;
        }
        match apply_move(&cur, &Move::AugTriangleInsert { pos, mid }) {
            Ok(next) => {
                cur = next;
                inserted += 1;
            }
            Err(_) => continue,
        }
    }
    Ok(cur)
}

// ---------------------------------------------------------------------------
// Homology diagnostics for slices
// ---------------------------------------------------------------------------

/// Connectivity and first-homology data of a finite slice, computed from
/// Smith normal forms of the boundary matrices. Two-cells are the
/// isotropic triangles together with augmented triangles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct H1Diagnostic {
    pub vertices: usize,
    pub edges: usize,
    pub cells: usize,
    pub components: usize,
    pub h1_rank: usize,
    pub torsion: Vec<i64>,
}

pub fn slice_h1_diagnostic(slice: &ComplexSlice) -> Result<H1Diagnostic, ContractError> {
    let nv = slice.vertices.len();
    let edge_index: BTreeMap<(usize, usize), usize> =
        slice.edges.iter().copied().enumerate().map(|(i, e)| (e, i)).collect();
    let ne = slice.edges.len();
    let mut cells: BTreeSet<[usize; 3]> = BTreeSet::new();
    for &(a, b, c) in &slice.triangles {
        let mut t = [a, b, c];
        t.sort_unstable();
        cells.insert(t);
    }
    for &(x, m, y) in &slice.aug_triangles {
        let mut t = [x, m, y];
        t.sort_unstable();
        cells.insert(t);
    }
    let cells: Vec<[usize; 3]> = cells.into_iter().collect();

    let mut d1 = IntMatrix::zero(nv, ne);
    for (col, &(a, b)) in slice.edges.iter().enumerate() {
        d1[(a, col)] = -BigInt::from(1);
        d1[(b, col)] = BigInt::from(1);
    }
    let mut d2 = IntMatrix::zero(ne, cells.len());
    for (col, t) in cells.iter().enumerate() {
        let [a, b, c] = *t;
        for (pair, sign) in [((b, c), 1i64), ((a, c), -1), ((a, b), 1)] {
            let row = *edge_index.get(&pair).ok_or_else(|| {
                ContractError::InvalidPath("cell boundary edge missing from the slice".into())
            })?;
            d2[(row, col)] = BigInt::from(sign);
        }
    }
    let r1 = crate::intlinalg::rank(&d1);
    let snf2 = smith_normal_form(&d2);
    let inv2 = snf2.invariants();
    let r2 = inv2.len();
    let torsion = inv2
        .iter()
        .filter(|d| d.abs() > BigInt::from(1))
        .map(|d| d.to_i64().ok_or(ContractError::NumericRange))
        .collect::<Result<Vec<i64>, _>>()?;
    Ok(H1Diagnostic {
        vertices: nv,
        edges: ne,
        cells: cells.len(),
        components: nv - r1,
        h1_rank: ne - r1 - r2,
        torsion,
    })
}

// ---------------------------------------------------------------------------
// JSON serialisation of traces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoveJson {
    pub kind: String,
    pub pos: usize,
    #[serde(default)]
    pub payload: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceJson {
    pub g: usize,
    pub closed: bool,
    pub initial: Vec<Vec<i64>>,
    pub moves: Vec<MoveJson>,
    #[serde(rename = "final")]
    pub final_path: Vec<Vec<i64>>,
}

fn line_json(l: &Line) -> Result<Vec<i64>, ContractError> {
    line_to_i64(l)
}

fn line_from_json(v: &[i64]) -> Result<Line, ContractError> {
    Ok(Line::from_i64(v)?)
}

impl MoveJson {
    pub fn from_move(mv: &Move) -> Result<MoveJson, ContractError> {
        let (kind, pos, payload) = match mv {
            Move::Backtrack { pos } => ("backtrack", *pos, vec![]),
            Move::EdgeTriangle { pos, z } => ("edge-triangle", *pos, vec![line_json(z)?]),
            Move::StarReplace { pos, zs } => (
                "star-replace",
                *pos,
                zs.iter().map(line_json).collect::<Result<Vec<_>, _>>()?,
            ),
            Move::AugTriangleInsert { pos, mid } => ("aug-insert", *pos, vec![line_json(mid)?]),
            Move::AugTriangleRemove { pos } => ("aug-remove", *pos, vec![]),
            Move::Cone { pos, apex } => ("cone", *pos, vec![line_json(apex)?]),
        };
        Ok(MoveJson { kind: kind.to_string(), pos, payload })
    }

    pub fn to_move(&self) -> Result<Move, ContractError> {
        let single = |payload: &[Vec<i64>]| -> Result<Line, ContractError> {
            if payload.len() != 1 {
                return Err(ContractError::InvalidMove(
                    "move payload must hold exactly one vertex".into(),
                ));
            }
            line_from_json(&payload[0])
        };
        Ok(match self.kind.as_str() {
            "backtrack" => Move::Backtrack { pos: self.pos },
            "edge-triangle" => Move::EdgeTriangle { pos: self.pos, z: single(&self.payload)? },
            "star-replace" => Move::StarReplace {
                pos: self.pos,
                zs: self
                    .payload
                    .iter()
                    .map(|v| line_from_json(v))
                    .collect::<Result<Vec<_>, _>>()?,
            },
            "aug-insert" => Move::AugTriangleInsert { pos: self.pos, mid: single(&self.payload)? },
            "aug-remove" => Move::AugTriangleRemove { pos: self.pos },
            "cone" => Move::Cone { pos: self.pos, apex: single(&self.payload)? },
            other => {
                return Err(ContractError::InvalidMove(format!("unknown move kind `{other}`")))
            }
        })
    }
}

impl TraceJson {
    pub fn from_trace(trace: &MoveTrace) -> Result<TraceJson, ContractError> {
        Ok(TraceJson {
            g: trace.initial.g,
            closed: trace.initial.closed,
            initial: trace.initial.vertices.iter().map(line_json).collect::<Result<_, _>>()?,
            moves: trace.moves.iter().map(MoveJson::from_move).collect::<Result<_, _>>()?,
            final_path: trace
                .final_path
                .vertices
                .iter()
                .map(line_json)
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn to_trace(&self) -> Result<MoveTrace, ContractError> {
        let to_path = |vs: &[Vec<i64>]| -> Result<PathInComplex, ContractError> {
            PathInComplex::new(
                self.g,
                self.closed,
                vs.iter().map(|v| line_from_json(v)).collect::<Result<Vec<_>, _>>()?,
            )
        };
        Ok(MoveTrace {
            initial: to_path(&self.initial)?,
            moves: self.moves.iter().map(|m| m.to_move()).collect::<Result<_, _>>()?,
            final_path: to_path(&self.final_path)?,
        })
    }
}

/// Concatenate traces produced by successive strategies on the same loop.
pub fn chain_traces(traces: &[MoveTrace]) -> Result<MoveTrace, ContractError> {
    let first = traces
        .first()
        .ok_or_else(|| ContractError::InvalidPath("no traces to chain".into()))?;
    let mut moves = Vec::new();
    let mut cur = first.initial.clone();
    for t in traces {
        if t.initial != cur {
            return Err(ContractError::InvalidPath(
                "chained trace does not start at the previous final path".into(),
            ));
        }
        moves.extend(t.moves.iter().cloned());
        cur = t.final_path.clone();
    }
    Ok(MoveTrace { initial: first.initial.clone(), moves, final_path: cur })
}

/// Contract a genus-`g` loop by reducing the `b_g`-rank, then the
/// `a_g`-rank inside the link of `<a_g>`'s pairing constraint, then
/// coning inside the last-handle-trivial submodule.
pub fn contract_via_rank_reduction(
    path: &PathInComplex,
    opts: &SearchOpts,
) -> Result<MoveTrace, ContractError> {
    let g = path.g;
    if g < 1 {
        return Err(ContractError::InvalidPath("genus must be positive".into()));
    }
    let t1 = reduce_rank(path, 2 * g - 1, None, opts)?;
    let t2 = reduce_rank(&t1.final_path, 2 * g - 2, None, opts)?;
    let t3 = cone_contract_wprime(&t2.final_path)?;
    chain_traces(&[t1, t2, t3])
}
