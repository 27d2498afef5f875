//! The Connes–Kreimer Hopf algebra of decorated forests.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, Q};
use crate::trees::{DecId, DecorationSet, DegreeVector, Forest, Tree};

/// A finite linear combination of forests with exact coefficients.
#[derive(Clone, Debug)]
pub struct TreeSum {
    set: Arc<DecorationSet>,
    terms: BTreeMap<Forest, Q>,
    bound: Option<u32>,
}

impl PartialEq for TreeSum {
    fn eq(&self, other: &Self) -> bool {
        same_set(&self.set, &other.set) && self.terms == other.terms
    }
}

pub(crate) fn same_set(a: &Arc<DecorationSet>, b: &Arc<DecorationSet>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn add_into<K: Ord>(map: &mut BTreeMap<K, Q>, key: K, c: Q) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    forest: String,
    coeff: String,
}

impl TreeSum {
    pub fn zero(set: &Arc<DecorationSet>) -> Self {
        TreeSum { set: set.clone(), terms: BTreeMap::new(), bound: None }
    }

    pub fn one(set: &Arc<DecorationSet>) -> Self {
        Self::forest(set, Forest::unit())
    }

    pub fn forest(set: &Arc<DecorationSet>, f: Forest) -> Self {
        let mut s = Self::zero(set);
        s.add_term(f, Q::one());
        s
    }

    pub fn tree(set: &Arc<DecorationSet>, t: Tree) -> Self {
        Self::forest(set, Forest::single(t))
    }

    /// Parses a single forest in tree notation.
    pub fn parse(set: &Arc<DecorationSet>, s: &str) -> Result<Self> {
        Ok(Self::forest(set, set.parse_forest(s)?))
    }

    pub fn with_bound(mut self, bound: Option<u32>) -> Self {
        self.bound = bound;
        if let Some(b) = bound {
            let set = self.set.clone();
            self.terms.retain(|f, _| set.forest_weight(f) <= b);
        }
        self
    }

    pub fn set(&self) -> &Arc<DecorationSet> {
        &self.set
    }

    pub fn bound(&self) -> Option<u32> {
        self.bound
    }

    pub fn terms(&self) -> &BTreeMap<Forest, Q> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, f: &Forest) -> Q {
        self.terms.get(f).cloned().unwrap_or_else(Q::zero)
    }

    /// Adds `c·f`, dropping it when above the truncation bound.
    pub fn add_term(&mut self, f: Forest, c: Q) {
        if let Some(b) = self.bound {
            if self.set.forest_weight(&f) > b {
                return;
            }
        }
        add_into(&mut self.terms, f, c);
    }

    fn check(&self, other: &TreeSum) -> Result<()> {
        if same_set(&self.set, &other.set) {
            Ok(())
        } else {
            Err(Error::SetMismatch)
        }
    }

    fn min_bound(&self, other: &TreeSum) -> Option<u32> {
        match (self.bound, other.bound) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn add(&self, other: &TreeSum) -> Result<TreeSum> {
        self.check(other)?;
        let mut out = self.clone().with_bound(self.min_bound(other));
        for (f, c) in &other.terms {
            out.add_term(f.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TreeSum) -> Result<TreeSum> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> TreeSum {
        let mut out = TreeSum { set: self.set.clone(), terms: BTreeMap::new(), bound: self.bound };
        if !c.is_zero() {
            for (f, v) in &self.terms {
                out.terms.insert(f.clone(), v * c);
            }
        }
        out
    }

    pub fn product(&self, other: &TreeSum) -> Result<TreeSum> {
        self.check(other)?;
        let mut out = TreeSum::zero(&self.set);
        out.bound = self.min_bound(other);
        for (f, a) in &self.terms {
            for (g, b) in &other.terms {
                out.add_term(f.mul(g), a * b);
            }
        }
        Ok(out)
    }

    /// `B_d` extended linearly.
    pub fn graft(&self, d: DecId) -> TreeSum {
        let mut out = TreeSum::zero(&self.set);
        out.bound = self.bound.map(|b| b + self.set.weight(d));
        for (f, c) in &self.terms {
            out.add_term(Forest::single(f.graft(d)), c.clone());
        }
        out
    }

    pub fn coproduct(&self) -> TensorSum {
        let mut cache = CoproductCache::default();
        cache.sum(self)
    }

    /// Coefficient of the empty forest.
    pub fn counit(&self) -> Q {
        self.coeff(&Forest::unit())
    }

    /// `φ_a`: multiplies every forest by the product of `a` over its vertices.
    pub fn scale_morphism(&self, a: impl Fn(DecId) -> Option<Q>) -> Result<TreeSum> {
        let mut out = TreeSum::zero(&self.set);
        out.bound = self.bound;
        for (f, c) in &self.terms {
            let mut w = c.clone();
            for t in f.trees() {
                for v in t.vertices() {
                    let av = a(v).ok_or_else(|| Error::MissingCoefficient(self.set.label(v).into()))?;
                    w *= av;
                }
            }
            out.add_term(f.clone(), w);
        }
        Ok(out)
    }

    /// Homogeneous component of degree `alpha`.
    pub fn homogeneous(&self, alpha: &DegreeVector) -> TreeSum {
        let mut out = TreeSum::zero(&self.set);
        out.bound = self.bound;
        for (f, c) in &self.terms {
            if self.set.forest_degree(f) == *alpha {
                out.terms.insert(f.clone(), c.clone());
            }
        }
        out
    }

    /// Degrees of the nonzero homogeneous components, sorted.
    pub fn degrees(&self) -> Vec<DegreeVector> {
        let mut v: Vec<DegreeVector> = self.terms.keys().map(|f| self.set.forest_degree(f)).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Re-expresses the sum over another set containing the same labels.
    pub fn transport(&self, target: &Arc<DecorationSet>) -> Result<TreeSum> {
        let mut out = TreeSum::zero(target);
        for (f, c) in &self.terms {
            out.add_term(target.parse_forest(&self.set.format_forest(f))?, c.clone());
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let v: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(f, c)| TermJson { forest: self.set.format_forest(f), coeff: fmt_q(c) })
            .collect();
        serde_json::to_value(v).expect("plain data")
    }

    pub fn from_json(set: &Arc<DecorationSet>, v: &serde_json::Value) -> Result<TreeSum> {
        let terms: Vec<TermJson> = serde_json::from_value(v.clone())?;
        let mut out = TreeSum::zero(set);
        for t in terms {
            out.add_term(set.parse_forest(&t.forest)?, parse_q(&t.coeff)?);
        }
        Ok(out)
    }
}

impl fmt::Display for TreeSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (forest, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{}", self.set.format_forest(forest))?;
            } else {
                write!(f, "{}*{}", fmt_q(c), self.set.format_forest(forest))?;
            }
        }
        Ok(())
    }
}

/// An element of H ⊗ H in the forest ⊗ forest basis.
#[derive(Clone, Debug)]
pub struct TensorSum {
    set: Arc<DecorationSet>,
    terms: BTreeMap<(Forest, Forest), Q>,
}

impl PartialEq for TensorSum {
    fn eq(&self, other: &Self) -> bool {
        same_set(&self.set, &other.set) && self.terms == other.terms
    }
}

impl TensorSum {
    pub fn zero(set: &Arc<DecorationSet>) -> Self {
        TensorSum { set: set.clone(), terms: BTreeMap::new() }
    }

    pub fn set(&self) -> &Arc<DecorationSet> {
        &self.set
    }

    pub fn terms(&self) -> &BTreeMap<(Forest, Forest), Q> {
        &self.terms
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

    pub fn add_term(&mut self, l: Forest, r: Forest, c: Q) {
        add_into(&mut self.terms, (l, r), c);
    }

    pub fn coeff(&self, l: &Forest, r: &Forest) -> Q {
        self.terms.get(&(l.clone(), r.clone())).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, other: &TensorSum) -> TensorSum {
        let mut out = self.clone();
        for ((l, r), c) in &other.terms {
            out.add_term(l.clone(), r.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> TensorSum {
        let mut out = TensorSum::zero(&self.set);
        if !c.is_zero() {
            for (k, v) in &self.terms {
                out.terms.insert(k.clone(), v * c);
            }
        }
        out
    }

    /// Product in H ⊗ H.
    pub fn product(&self, other: &TensorSum) -> TensorSum {
        let mut out = TensorSum::zero(&self.set);
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &other.terms {
                out.add_term(a.mul(c), b.mul(d), x * y);
            }
        }
        out
    }

    /// x ⊗ y.
    pub fn tensor(x: &TreeSum, y: &TreeSum) -> TensorSum {
        let mut out = TensorSum::zero(&x.set);
        for (f, a) in &x.terms {
            for (g, b) in &y.terms {
                out.add_term(f.clone(), g.clone(), a * b);
            }
        }
        out
    }

    /// Left factors grouped by right factor.
    pub fn by_right(&self) -> BTreeMap<Forest, BTreeMap<Forest, Q>> {
        let mut out: BTreeMap<Forest, BTreeMap<Forest, Q>> = BTreeMap::new();
        for ((l, r), c) in &self.terms {
            out.entry(r.clone()).or_default().insert(l.clone(), c.clone());
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let v: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|((l, r), c)| {
                serde_json::json!({
                    "left": self.set.format_forest(l),
                    "right": self.set.format_forest(r),
                    "coeff": fmt_q(c),
                })
            })
            .collect();
        serde_json::Value::Array(v)
    }
}

impl fmt::Display for TensorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, ((l, r), c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let (l, r) = (self.set.format_forest(l), self.set.format_forest(r));
            if c.is_one() {
                write!(f, "{l} ⊗ {r}")?;
            } else {
                write!(f, "{}*{l} ⊗ {r}", fmt_q(c))?;
            }
        }
        Ok(())
    }
}

type Terms = Vec<((Forest, Forest), Q)>;

/// Memoized coproduct through the cocycle identity
/// Δ(B_d(F)) = B_d(F) ⊗ 1 + (Id ⊗ B_d)Δ(F).
#[derive(Default)]
pub struct CoproductCache {
    trees: HashMap<Tree, Arc<Terms>>,
}

impl CoproductCache {
    pub fn tree(&mut self, t: &Tree) -> Arc<Terms> {
        if let Some(v) = self.trees.get(t) {
            return v.clone();
        }
        let below = self.forest(&t.children_forest());
        let mut terms: Terms = Vec::with_capacity(below.len() + 1);
        terms.push(((Forest::single(t.clone()), Forest::unit()), Q::one()));
        for ((l, r), c) in below {
            terms.push(((l, Forest::single(r.graft(t.root()))), c));
        }
        let v = Arc::new(terms);
        self.trees.insert(t.clone(), v.clone());
        v
    }

    pub fn forest(&mut self, f: &Forest) -> BTreeMap<(Forest, Forest), Q> {
        let mut acc: BTreeMap<(Forest, Forest), Q> = BTreeMap::new();
        acc.insert((Forest::unit(), Forest::unit()), Q::one());
        for t in f.trees() {
            let dt = self.tree(t);
            let mut next = BTreeMap::new();
            for ((a, b), x) in &acc {
                for ((c, d), y) in dt.iter() {
                    add_into(&mut next, (a.mul(c), b.mul(d)), x * y);
                }
            }
            acc = next;
        }
        acc
    }

    pub fn sum(&mut self, x: &TreeSum) -> TensorSum {
        let mut out = TensorSum::zero(&x.set);
        for (f, c) in &x.terms {
            for ((l, r), v) in self.forest(f) {
                out.add_term(l, r, v * c);
            }
        }
        out
    }
}

/// Reference coproduct by explicit enumeration of admissible cuts: each subset
/// of edges with no two on a common root path, the cut-off subtrees on the
/// left and the trunk on the right, plus the total cut `T ⊗ 1`.
pub fn coproduct_by_cuts(set: &Arc<DecorationSet>, f: &Forest) -> TensorSum {
    let mut acc = TensorSum::zero(set);
    acc.add_term(Forest::unit(), Forest::unit(), Q::one());
    for t in f.trees() {
        let mut dt = TensorSum::zero(set);
        dt.add_term(Forest::single(t.clone()), Forest::unit(), Q::one());
        let (labels, parent) = flatten(t);
        let n = labels.len();
        for mask in 0u64..(1u64 << (n - 1)) {
            let cut = |v: usize| v > 0 && mask & (1 << (v - 1)) != 0;
            let admissible = (1..n).filter(|&v| cut(v)).all(|v| {
                let mut u = parent[v];
                while u > 0 {
                    if cut(u) {
                        return false;
                    }
                    u = parent[u];
                }
                true
            });
            if !admissible {
                continue;
            }
            let pruned: Vec<Tree> =
                (1..n).filter(|&v| cut(v)).map(|v| rebuild(v, &labels, &parent, &cut)).collect();
            let trunk = rebuild(0, &labels, &parent, &cut);
            dt.add_term(Forest::new(pruned), Forest::single(trunk), Q::one());
        }
        acc = acc.product(&dt);
    }
    acc
}

fn flatten(t: &Tree) -> (Vec<DecId>, Vec<usize>) {
    fn go(t: &Tree, p: usize, labels: &mut Vec<DecId>, parent: &mut Vec<usize>) {
        let me = labels.len();
        labels.push(t.root());
        parent.push(p);
        for c in t.children() {
            go(c, me, labels, parent);
        }
    }
    let (mut l, mut p) = (Vec::new(), Vec::new());
    go(t, 0, &mut l, &mut p);
    (l, p)
}

fn rebuild(v: usize, labels: &[DecId], parent: &[usize], cut: &dyn Fn(usize) -> bool) -> Tree {
    let children =
        (v + 1..labels.len()).filter(|&u| parent[u] == v && !cut(u)).map(|u| rebuild(u, labels, parent, cut)).collect();
    Tree::new(labels[v], children)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn set() -> Arc<DecorationSet> {
        DecorationSet::simple(&["a", "b", "c", "d"])
    }

    fn ts(s: &Arc<DecorationSet>, items: &[(&str, i64)]) -> TreeSum {
        let mut out = TreeSum::zero(s);
        for (f, c) in items {
            out.add_term(s.parse_forest(f).unwrap(), q(*c));
        }
        out
    }

    fn tens(s: &Arc<DecorationSet>, items: &[(&str, &str, i64)]) -> TensorSum {
        let mut out = TensorSum::zero(s);
        for (l, r, c) in items {
            out.add_term(s.parse_forest(l).unwrap(), s.parse_forest(r).unwrap(), q(*c));
        }
        out
    }

    #[test]
    fn products() {
        let s = set();
        let f = ts(&s, &[("a[b]", 1)]);
        assert_eq!(TreeSum::one(&s).product(&f).unwrap(), f);
        let x = ts(&s, &[("a", 1), ("b", 1)]);
        assert_eq!(x.product(&x).unwrap(), ts(&s, &[("a a", 1), ("a b", 2), ("b b", 1)]));
        let other = DecorationSet::simple(&["a"]);
        assert!(matches!(f.product(&TreeSum::one(&other)), Err(Error::SetMismatch)));
    }

    #[test]
    fn truncation_drops_high_terms() {
        let s = set();
        let x = ts(&s, &[("a", 1), ("b[c]", 1)]).with_bound(Some(2));
        let y = x.product(&x).unwrap();
        assert_eq!(y, ts(&s, &[("a a", 1)]));
    }

    #[test]
    fn graft_examples() {
        let s = set();
        let a = s.id("a").unwrap();
        assert_eq!(TreeSum::one(&s).graft(a), ts(&s, &[("a", 1)]));
        assert_eq!(ts(&s, &[("b c[d]", 1)]).graft(a), ts(&s, &[("a[b,c[d]]", 1)]));
        assert_eq!(ts(&s, &[("b", 1), ("c", 1)]).graft(a), ts(&s, &[("a[b]", 1), ("a[c]", 1)]));
    }

    #[test]
    fn coproduct_examples() {
        let s = set();
        assert_eq!(ts(&s, &[("a", 1)]).coproduct(), tens(&s, &[("a", "1", 1), ("1", "a", 1)]));
        assert_eq!(
            ts(&s, &[("a[b]", 1)]).coproduct(),
            tens(&s, &[("a[b]", "1", 1), ("1", "a[b]", 1), ("b", "a", 1)])
        );
        assert_eq!(TreeSum::one(&s).coproduct(), tens(&s, &[("1", "1", 1)]));
    }

    #[test]
    fn cuts_agree_with_cocycle() {
        let s = set();
        for f in ["d[c,b[a]]", "a[b[c[d]]]", "a[a,a] b", "a[b[c],b[c]]"] {
            let f = s.parse_forest(f).unwrap();
            let x = TreeSum::forest(&s, f.clone());
            assert_eq!(x.coproduct(), coproduct_by_cuts(&s, &f));
        }
    }

    #[test]
    fn counit_and_scaling() {
        let s = set();
        assert_eq!(TreeSum::one(&s).counit(), q(1));
        assert_eq!(ts(&s, &[("a", 1)]).counit(), q(0));
        assert_eq!(ts(&s, &[("1", 3), ("a", 2)]).counit(), q(3));
        let x = ts(&s, &[("d[d]", 1)]);
        let two = |_| Some(q(2));
        assert_eq!(x.scale_morphism(two).unwrap(), x.scale(&q(4)));
        assert!(x.scale_morphism(|_| None).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = set();
        let x = ts(&s, &[("1", 3), ("a b[c]", -2)]);
        let back = TreeSum::from_json(&s, &x.to_json()).unwrap();
        assert_eq!(x, back);
    }
}
