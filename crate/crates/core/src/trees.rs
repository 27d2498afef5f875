//! Canonical decorated rooted trees and forests.
//!
//! Trees reference decorations by index into a [`DecorationSet`]. The set keeps
//! its decorations sorted by `(degree, label)`, so comparing indices compares
//! decorations, and the derived order on trees is a canonical total order.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of ℕᴺ.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegreeVector(pub Vec<u32>);

impl DegreeVector {
    pub fn zero(n: usize) -> Self {
        DegreeVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        DegreeVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Sum of the entries.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &DegreeVector) -> DegreeVector {
        DegreeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn add_assign(&mut self, other: &DegreeVector) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    /// `self - other` when it stays in ℕᴺ.
    pub fn checked_sub(&self, other: &DegreeVector) -> Option<DegreeVector> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(DegreeVector)
    }

    pub fn le(&self, other: &DegreeVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// All nonzero vectors of dimension `n` with total at most `bound`, ordered
    /// by total then lexicographically.
    pub fn all_nonzero(n: usize, bound: u32) -> Vec<DegreeVector> {
        let mut out = Vec::new();
        for t in 1..=bound {
            let mut cur = vec![0; n];
            compositions(n, t, 0, &mut cur, &mut out);
        }
        out
    }
}

fn compositions(n: usize, rest: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<DegreeVector>) {
    if n == 0 {
        return;
    }
    if pos == n - 1 {
        cur[pos] = rest;
        out.push(DegreeVector(cur.clone()));
        return;
    }
    for v in (0..=rest).rev() {
        cur[pos] = v;
        compositions(n, rest - v, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

impl Deref for DegreeVector {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for DegreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decoration {
    pub label: String,
    pub block: usize,
    pub degree: DegreeVector,
}

impl Decoration {
    pub fn new(label: impl Into<String>, block: usize, degree: Vec<u32>) -> Self {
        Decoration { label: label.into(), block, degree: DegreeVector(degree) }
    }
}

/// Index of a decoration inside its set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecId(pub u32);

/// A finite graded decoration set `D = D_1 ⊔ … ⊔ D_M`.
#[derive(Clone, Debug)]
pub struct DecorationSet {
    n: usize,
    m: usize,
    decorations: Vec<Decoration>,
    by_label: HashMap<String, DecId>,
}

impl PartialEq for DecorationSet {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.m == other.m && self.decorations == other.decorations
    }
}

impl Eq for DecorationSet {}

pub(crate) fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && label != "1"
        && !label.chars().any(|c| c.is_whitespace() || matches!(c, '[' | ']' | ','))
}

impl DecorationSet {
    pub fn new(n: usize, m: usize, mut decorations: Vec<Decoration>) -> Result<Self> {
        for d in &decorations {
            if !valid_label(&d.label) {
                return Err(Error::InvalidDecoration(format!("bad label `{}`", d.label)));
            }
            if d.degree.dim() != n {
                return Err(Error::InvalidDecoration(format!(
                    "`{}` has degree of dimension {}, expected {n}",
                    d.label,
                    d.degree.dim()
                )));
            }
            if d.degree.is_zero() {
                return Err(Error::InvalidDecoration(format!("`{}` has degree zero", d.label)));
            }
            if d.block >= m {
                return Err(Error::InvalidDecoration(format!(
                    "`{}` lies in block {} but there are {m} blocks",
                    d.label, d.block
                )));
            }
        }
        decorations.sort_by(|a, b| (&a.degree, &a.label).cmp(&(&b.degree, &b.label)));
        let mut by_label = HashMap::new();
        for (k, d) in decorations.iter().enumerate() {
            if by_label.insert(d.label.clone(), DecId(k as u32)).is_some() {
                return Err(Error::InvalidDecoration(format!("duplicate label `{}`", d.label)));
            }
        }
        Ok(DecorationSet { n, m, decorations, by_label })
    }

    /// One block, N = 1, every label of degree 1.
    pub fn simple(labels: &[&str]) -> Arc<Self> {
        let decs = labels.iter().map(|l| Decoration::new(*l, 0, vec![1])).collect();
        Arc::new(Self::new(1, 1, decs).expect("valid labels"))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.decorations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decorations.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = DecId> {
        (0..self.decorations.len() as u32).map(DecId)
    }

    pub fn decorations(&self) -> &[Decoration] {
        &self.decorations
    }

    pub fn get(&self, id: DecId) -> &Decoration {
        &self.decorations[id.0 as usize]
    }

    pub fn id(&self, label: &str) -> Result<DecId> {
        self.by_label.get(label).copied().ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn degree(&self, id: DecId) -> &DegreeVector {
        &self.get(id).degree
    }

    pub fn block(&self, id: DecId) -> usize {
        self.get(id).block
    }

    pub fn label(&self, id: DecId) -> &str {
        &self.get(id).label
    }

    pub fn weight(&self, id: DecId) -> u32 {
        self.degree(id).total()
    }

    pub fn tree_degree(&self, t: &Tree) -> DegreeVector {
        let mut d = DegreeVector::zero(self.n);
        t.for_each_vertex(&mut |id| d.add_assign(self.degree(id)));
        d
    }

    pub fn forest_degree(&self, f: &Forest) -> DegreeVector {
        let mut d = DegreeVector::zero(self.n);
        for t in f.trees() {
            t.for_each_vertex(&mut |id| d.add_assign(self.degree(id)));
        }
        d
    }

    /// Total degree |deg F|.
    pub fn forest_weight(&self, f: &Forest) -> u32 {
        let mut w = 0;
        for t in f.trees() {
            t.for_each_vertex(&mut |id| w += self.weight(id));
        }
        w
    }

    pub fn canonicalize(&self, raw: &RawTree) -> Result<Tree> {
        let root = self.id(&raw.label)?;
        let children = raw.children.iter().map(|c| self.canonicalize(c)).collect::<Result<_>>()?;
        Ok(Tree::new(root, children))
    }

    pub fn parse_tree(&self, s: &str) -> Result<Tree> {
        let raw = RawTree::parse(s)?;
        self.canonicalize(&raw)
    }

    /// Parses whitespace-separated trees; `1` or the empty string is the unit.
    pub fn parse_forest(&self, s: &str) -> Result<Forest> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Forest::unit());
        }
        let mut p = NotationParser { src: s.as_bytes(), pos: 0 };
        let mut trees = Vec::new();
        loop {
            p.skip_ws();
            if p.pos >= p.src.len() {
                break;
            }
            trees.push(self.canonicalize(&p.tree()?)?);
        }
        Ok(Forest::new(trees))
    }

    pub fn format_tree(&self, t: &Tree) -> String {
        let mut s = String::new();
        self.write_tree(t, &mut s);
        s
    }

    fn write_tree(&self, t: &Tree, out: &mut String) {
        out.push_str(self.label(t.root()));
        if !t.children().is_empty() {
            out.push('[');
            for (k, c) in t.children().iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                self.write_tree(c, out);
            }
            out.push(']');
        }
    }

    pub fn format_forest(&self, f: &Forest) -> String {
        if f.is_unit() {
            return "1".to_string();
        }
        let parts: Vec<String> = f.trees().iter().map(|t| self.format_tree(t)).collect();
        parts.join(" ")
    }
}

/// An unordered decorated tree as written by a user, before canonicalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTree {
    pub label: String,
    pub children: Vec<RawTree>,
}

impl RawTree {
    pub fn leaf(label: &str) -> Self {
        RawTree { label: label.to_string(), children: Vec::new() }
    }

    pub fn node(label: &str, children: Vec<RawTree>) -> Self {
        RawTree { label: label.to_string(), children }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut p = NotationParser { src: s.as_bytes(), pos: 0 };
        p.skip_ws();
        let t = p.tree()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input after tree"));
        }
        Ok(t)
    }
}

struct NotationParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl NotationParser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn tree(&mut self) -> Result<RawTree> {
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_whitespace() || matches!(c, b'[' | b']' | b',') {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a decoration label"));
        }
        let label = std::str::from_utf8(&self.src[start..self.pos])
            .map_err(|_| self.err("label is not utf-8"))?
            .to_string();
        let mut children = Vec::new();
        if self.pos < self.src.len() && self.src[self.pos] == b'[' {
            self.pos += 1;
            loop {
                self.skip_ws();
                children.push(self.tree()?);
                self.skip_ws();
                match self.src.get(self.pos) {
                    Some(b',') => self.pos += 1,
                    Some(b']') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected `,` or `]`")),
                }
            }
        }
        Ok(RawTree { label, children })
    }
}

#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Node {
    root: DecId,
    children: Vec<Tree>,
    size: usize,
}

/// A decorated rooted tree in canonical form. Cloning is cheap.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree(Arc<Node>);

impl Tree {
    pub fn new(root: DecId, mut children: Vec<Tree>) -> Self {
        children.sort();
        let size = 1 + children.iter().map(|c| c.size()).sum::<usize>();
        Tree(Arc::new(Node { root, children, size }))
    }

    pub fn leaf(root: DecId) -> Self {
        Tree::new(root, Vec::new())
    }

    pub fn root(&self) -> DecId {
        self.0.root
    }

    pub fn children(&self) -> &[Tree] {
        &self.0.children
    }

    /// Number of vertices.
    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn children_forest(&self) -> Forest {
        Forest(self.0.children.clone())
    }

    /// Visits decorations in preorder.
    pub fn for_each_vertex(&self, f: &mut impl FnMut(DecId)) {
        f(self.root());
        for c in self.children() {
            c.for_each_vertex(f);
        }
    }

    pub fn vertices(&self) -> Vec<DecId> {
        let mut v = Vec::with_capacity(self.size());
        self.for_each_vertex(&mut |d| v.push(d));
        v
    }

    /// Attaches each `(v, t)` as a new child of the vertex with preorder index `v`.
    pub fn graft_at(&self, placements: &[(usize, Tree)]) -> Tree {
        fn go(t: &Tree, base: usize, placements: &[(usize, Tree)]) -> Tree {
            let mut children = Vec::with_capacity(t.children().len());
            let mut next = base + 1;
            for c in t.children() {
                let end = next + c.size();
                if placements.iter().any(|(v, _)| *v >= next && *v < end) {
                    children.push(go(c, next, placements));
                } else {
                    children.push(c.clone());
                }
                next = end;
            }
            for (v, g) in placements {
                if *v == base {
                    children.push(g.clone());
                }
            }
            Tree::new(t.root(), children)
        }
        go(self, 0, placements)
    }
}

/// A commutative monomial of trees; the empty forest is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Forest(Vec<Tree>);

impl Forest {
    pub fn new(mut trees: Vec<Tree>) -> Self {
        trees.sort();
        Forest(trees)
    }

    pub fn unit() -> Self {
        Forest(Vec::new())
    }

    pub fn single(t: Tree) -> Self {
        Forest(vec![t])
    }

    pub fn trees(&self) -> &[Tree] {
        &self.0
    }

    pub fn into_trees(self) -> Vec<Tree> {
        self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.0.iter().map(|t| t.size()).sum()
    }

    pub fn mul(&self, other: &Forest) -> Forest {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            if self.0[i] <= other.0[j] {
                v.push(self.0[i].clone());
                i += 1;
            } else {
                v.push(other.0[j].clone());
                j += 1;
            }
        }
        v.extend_from_slice(&self.0[i..]);
        v.extend_from_slice(&other.0[j..]);
        Forest(v)
    }

    /// `B_d` applied to this forest.
    pub fn graft(&self, d: DecId) -> Tree {
        Tree::new(d, self.0.clone())
    }
}

/// |Aut(F)|: the product over nodes (and over the forest itself) of m! for each
/// class of identical siblings, times the factors of the siblings.
pub fn symmetry_factor(f: &Forest) -> BigUint {
    siblings_factor(f.trees())
}

pub fn tree_symmetry_factor(t: &Tree) -> BigUint {
    siblings_factor(t.children())
}

fn siblings_factor(sorted: &[Tree]) -> BigUint {
    let mut acc = BigUint::one();
    let mut k = 0;
    while k < sorted.len() {
        let mut m = 1u32;
        while k + (m as usize) < sorted.len() && sorted[k + m as usize] == sorted[k] {
            m += 1;
        }
        let s = tree_symmetry_factor(&sorted[k]);
        for r in 1..=m {
            acc *= BigUint::from(r);
            acc *= &s;
        }
        k += m as usize;
    }
    acc
}

/// All trees and forests with up to `max` vertices over the given decorations,
/// grouped by vertex count. Index 0 of the forest list holds the unit.
pub fn enumerate(decorations: &[DecId], max: usize) -> (Vec<Vec<Tree>>, Vec<Vec<Forest>>) {
    let mut trees: Vec<Vec<Tree>> = vec![Vec::new()];
    let mut forests: Vec<Vec<Forest>> = vec![vec![Forest::unit()]];
    let mut pool: Vec<Tree> = Vec::new();
    for k in 1..=max {
        let mut level = Vec::new();
        for &d in decorations {
            for f in &forests[k - 1] {
                level.push(Tree::new(d, f.0.clone()));
            }
        }
        level.sort();
        pool.extend(level.iter().cloned());
        trees.push(level);
        let mut out = Vec::new();
        let mut cur = Vec::new();
        multisets(&pool, k, 0, &mut cur, &mut out);
        out.sort();
        forests.push(out);
    }
    (trees, forests)
}

fn multisets(pool: &[Tree], rest: usize, start: usize, cur: &mut Vec<Tree>, out: &mut Vec<Forest>) {
    if rest == 0 {
        out.push(Forest::new(cur.clone()));
        return;
    }
    for i in start..pool.len() {
        if pool[i].size() <= rest {
            cur.push(pool[i].clone());
            multisets(pool, rest - pool[i].size(), i, cur, out);
            cur.pop();
        }
    }
}
