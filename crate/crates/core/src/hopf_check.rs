//! Decides, up to a degree bound, whether the homogeneous components of a
//! solution generate a Hopf subalgebra, and extracts the dual structure
//! coefficients λ_{i,j}(α,β).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;
use serde_json::json;

use crate::error::{Error, Result};
use crate::hopf::{CoproductCache, TensorSum, TreeSum};
use crate::linalg::{rank_bareiss, SpanBasis, SparseVec};
use crate::rational::{fmt_q, Q};
use crate::sdse::Solution;
use crate::trees::{DegreeVector, Forest};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HopfStatus {
    HopfUpTo,
    NotHopf,
    IndeterminateDependent,
}

impl fmt::Display for HopfStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HopfStatus::HopfUpTo => "hopf-up-to-B",
            HopfStatus::NotHopf => "not-hopf",
            HopfStatus::IndeterminateDependent => "indeterminate-dependent",
        })
    }
}

/// A bidegree part of Δ(X_i(α)) − X_i(α)⊗1 − 1⊗X_i(α) outside the span of
/// the products P⊗Q of generator monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub block: usize,
    pub degree: DegreeVector,
    pub left_degree: DegreeVector,
    pub right_degree: DegreeVector,
    pub residual: TensorSum,
}

/// λ_{i,j}(α,β), keyed by (i, j, α, β).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoeffTable(pub BTreeMap<(usize, usize, DegreeVector, DegreeVector), Q>);

impl CoeffTable {
    pub fn get(&self, i: usize, j: usize, alpha: &DegreeVector, beta: &DegreeVector) -> Option<&Q> {
        self.0.get(&(i, j, alpha.clone(), beta.clone()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize, DegreeVector, DegreeVector), &Q)> {
        self.0.iter()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HopfVerdict {
    pub bound: u32,
    pub status: HopfStatus,
    pub witness: Option<Witness>,
    /// Degree and generator monomials found linearly dependent.
    pub dependent: Option<(DegreeVector, Vec<String>)>,
    pub lambda: Option<CoeffTable>,
}

impl HopfVerdict {
    pub fn is_hopf(&self) -> bool {
        self.status == HopfStatus::HopfUpTo
    }

    pub fn status_label(&self) -> String {
        match self.status {
            HopfStatus::HopfUpTo => format!("hopf-up-to-{}", self.bound),
            s => s.to_string(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({ "schema": 1, "bound": self.bound, "status": self.status_label() });
        if let Some(w) = &self.witness {
            v["witness"] = json!({
                "block": w.block,
                "degree": w.degree,
                "left_degree": w.left_degree,
                "right_degree": w.right_degree,
                "residual": w.residual.to_json(),
            });
        }
        if let Some((deg, mons)) = &self.dependent {
            v["dependent"] = json!({ "degree": deg, "monomials": mons });
        }
        if let Some(t) = &self.lambda {
            v["lambda"] = t
                .iter()
                .map(|((i, j, a, b), c)| json!({"i": i, "j": j, "alpha": a, "beta": b, "value": fmt_q(c)}))
                .collect();
        }
        v
    }
}

type Monomial = Vec<usize>;

struct Checker<'a> {
    sol: &'a Solution,
    gens: Vec<(usize, DegreeVector, TreeSum)>,
    index: HashMap<(usize, DegreeVector), usize>,
    products: HashMap<Monomial, TreeSum>,
    by_degree: HashMap<DegreeVector, Vec<Monomial>>,
    bases: HashMap<DegreeVector, SpanBasis<Forest>>,
}

impl<'a> Checker<'a> {
    fn new(sol: &'a Solution) -> Self {
        let gens = sol.generators();
        let index = gens.iter().enumerate().map(|(k, (i, a, _))| ((*i, a.clone()), k)).collect();
        Checker { sol, gens, index, products: HashMap::new(), by_degree: HashMap::new(), bases: HashMap::new() }
    }

    fn product(&mut self, m: &Monomial) -> TreeSum {
        if let Some(p) = self.products.get(m) {
            return p.clone();
        }
        let p = match m.split_last() {
            None => TreeSum::one(self.sol.set()),
            Some((&last, rest)) => {
                let head = self.product(&rest.to_vec());
                head.product(&self.gens[last].2).expect("same set")
            }
        };
        self.products.insert(m.clone(), p.clone());
        p
    }

    /// Multisets of generators (sorted indices) of total degree `gamma`.
    fn monomials(&mut self, gamma: &DegreeVector) -> Vec<Monomial> {
        if let Some(v) = self.by_degree.get(gamma) {
            return v.clone();
        }
        let mut out = Vec::new();
        for g in 0..self.gens.len() {
            let Some(rest) = gamma.checked_sub(&self.gens[g].1) else { continue };
            if rest.is_zero() {
                out.push(vec![g]);
                continue;
            }
            for mut m in self.monomials(&rest) {
                if *m.last().expect("nonempty") <= g {
                    m.push(g);
                    out.push(m);
                }
            }
        }
        out.sort();
        self.by_degree.insert(gamma.clone(), out.clone());
        out
    }

    fn describe(&self, m: &Monomial) -> String {
        m.iter().map(|&g| format!("X{}({})", self.gens[g].0, self.gens[g].1)).collect::<Vec<_>>().join("·")
    }

    /// Basis of monomials at `gamma`, or the dependent monomials.
    fn basis(&mut self, gamma: &DegreeVector) -> std::result::Result<(), Vec<String>> {
        if self.bases.contains_key(gamma) {
            return Ok(());
        }
        let mons = self.monomials(gamma);
        let vecs: Vec<SparseVec<Forest>> = mons.iter().map(|m| self.product(m).terms().clone()).collect();
        let b = SpanBasis::new(&vecs);
        if !b.is_independent() {
            return Err(b.dependent().iter().map(|&k| self.describe(&mons[k])).collect());
        }
        self.bases.insert(gamma.clone(), b);
        Ok(())
    }
}

enum Split {
    Ok(Vec<(Monomial, Monomial, Q)>),
    Fail,
    Dependent(DegreeVector, Vec<String>),
}

/// Writes one bidegree part as Σ a_{P,Q} P⊗Q, if possible.
fn split_bidegree(ck: &mut Checker, gamma: &DegreeVector, delta: &DegreeVector, part: &TensorSum) -> Split {
    for d in [gamma, delta] {
        if let Err(mons) = ck.basis(d) {
            return Split::Dependent(d.clone(), mons);
        }
    }
    let left_mons = ck.monomials(gamma);
    let right_mons = ck.monomials(delta);
    let mut by_right: BTreeMap<Forest, SparseVec<Forest>> = BTreeMap::new();
    for ((l, r), c) in part.terms() {
        by_right.entry(r.clone()).or_default().insert(l.clone(), c.clone());
    }
    // s_P = Σ_G a_{P,G} G
    let mut s: Vec<SparseVec<Forest>> = vec![BTreeMap::new(); left_mons.len()];
    let lb = &ck.bases[gamma];
    for (g, r) in &by_right {
        let Some(a) = lb.express(r) else { return Split::Fail };
        for (p, c) in a.into_iter().enumerate() {
            if !c.is_zero() {
                s[p].insert(g.clone(), c);
            }
        }
    }
    let rb = &ck.bases[delta];
    let mut out = Vec::new();
    for (p, sp) in s.iter().enumerate() {
        if sp.is_empty() {
            continue;
        }
        let Some(b) = rb.express(sp) else { return Split::Fail };
        for (qi, c) in b.into_iter().enumerate() {
            if !c.is_zero() {
                out.push((left_mons[p].clone(), right_mons[qi].clone(), c));
            }
        }
    }
    Split::Ok(out)
}

/// Checks every generator X_i(α) with |α| ≤ `bound`.
pub fn check_hopf(sol: &Solution, bound: u32) -> Result<HopfVerdict> {
    if bound > sol.bound() {
        return Err(Error::Precondition(format!("solution is only known to degree {}", sol.bound())));
    }
    let mut ck = Checker::new(sol);
    let mut cache = CoproductCache::default();
    let mut table = CoeffTable::default();
    let set = sol.set().clone();
    let order: Vec<usize> = {
        let mut v: Vec<usize> = (0..ck.gens.len()).filter(|&k| ck.gens[k].1.total() <= bound).collect();
        v.sort_by(|&a, &b| {
            let (ia, da, _) = &ck.gens[a];
            let (ib, db, _) = &ck.gens[b];
            (da.total(), da, ia).cmp(&(db.total(), db, ib))
        });
        v
    };
    for k in order {
        let (i, alpha, x) = ck.gens[k].clone();
        let mut r = cache.sum(&x);
        let one = TreeSum::one(&set);
        r = r.add(&TensorSum::tensor(&x, &one).scale(&-Q::from_integer(1.into())));
        r = r.add(&TensorSum::tensor(&one, &x).scale(&-Q::from_integer(1.into())));
        let mut parts: BTreeMap<(DegreeVector, DegreeVector), TensorSum> = BTreeMap::new();
        for ((l, rr), c) in r.terms() {
            let key = (set.forest_degree(l), set.forest_degree(rr));
            parts.entry(key).or_insert_with(|| TensorSum::zero(&set)).add_term(l.clone(), rr.clone(), c.clone());
        }
        for ((gamma, delta), part) in parts {
            if gamma.is_zero() || delta.is_zero() {
                return Err(Error::Invalid("unexpected primitive term in the coproduct".into()));
            }
            match split_bidegree(&mut ck, &gamma, &delta, &part) {
                Split::Fail => {
                    return Ok(HopfVerdict {
                        bound,
                        status: HopfStatus::NotHopf,
                        witness: Some(Witness {
                            block: i,
                            degree: alpha,
                            left_degree: gamma,
                            right_degree: delta,
                            residual: part,
                        }),
                        dependent: None,
                        lambda: None,
                    })
                }
                Split::Dependent(d, mons) => {
                    return Ok(HopfVerdict {
                        bound,
                        status: HopfStatus::IndeterminateDependent,
                        witness: None,
                        dependent: Some((d, mons)),
                        lambda: None,
                    })
                }
                Split::Ok(terms) => {
                    for (p, qm, c) in terms {
                        if p.len() == 1 && qm.len() == 1 {
                            let (j, beta, _) = &ck.gens[p[0]];
                            let (i2, a2, _) = &ck.gens[qm[0]];
                            if *i2 == i {
                                table.0.insert((i, *j, a2.clone(), beta.clone()), c);
                            }
                        }
                    }
                }
            }
        }
        // zero entries where both factors exist but the coefficient vanished
        for (j, beta, _) in ck.gens.clone() {
            if let Some(a2) = alpha.checked_sub(&beta) {
                if !a2.is_zero() && ck.index.contains_key(&(i, a2.clone())) {
                    table.0.entry((i, j, a2, beta)).or_insert_with(Q::zero);
                }
            }
        }
    }
    Ok(HopfVerdict { bound, status: HopfStatus::HopfUpTo, witness: None, dependent: None, lambda: Some(table) })
}

/// λ_{i,j}(α,β): the coefficient of X_j(β)⊗X_i(α) in Δ(X_i(α+β)).
pub fn extract_lambda(
    sol: &Solution,
    verdict: &HopfVerdict,
    i: usize,
    j: usize,
    alpha: &DegreeVector,
    beta: &DegreeVector,
) -> Result<Q> {
    if !verdict.is_hopf() {
        return Err(Error::Precondition(format!("verdict is {}", verdict.status_label())));
    }
    let sum = alpha.add(beta);
    if sum.total() > verdict.bound {
        return Err(Error::Precondition(format!("|α+β| = {} exceeds the bound {}", sum.total(), verdict.bound)));
    }
    for (b, d) in [(i, alpha), (j, beta), (i, &sum)] {
        if sol.component(b, d).is_zero() {
            return Err(Error::Precondition(format!("X_{b}({d}) is zero")));
        }
    }
    verdict
        .lambda
        .as_ref()
        .and_then(|t| t.get(i, j, alpha, beta))
        .cloned()
        .ok_or_else(|| Error::Precondition("coefficient not tabulated".into()))
}

/// Independent confirmation of a witness: appending the residual to the
/// P⊗Q rows raises the rank, computed by fraction-free elimination.
pub fn verify_witness(sol: &Solution, w: &Witness) -> bool {
    let mut ck = Checker::new(sol);
    let left = ck.monomials(&w.left_degree);
    let right = ck.monomials(&w.right_degree);
    let mut rows: Vec<TensorSum> = Vec::new();
    for p in &left {
        let pp = ck.product(p);
        for q in &right {
            let qq = ck.product(q);
            rows.push(TensorSum::tensor(&pp, &qq));
        }
    }
    let mut keys: BTreeMap<(Forest, Forest), usize> = BTreeMap::new();
    for t in rows.iter().chain(std::iter::once(&w.residual)) {
        for k in t.terms().keys() {
            let n = keys.len();
            keys.entry(k.clone()).or_insert(n);
        }
    }
    let dense = |t: &TensorSum| {
        let mut v = vec![Q::zero(); keys.len()];
        for (k, c) in t.terms() {
            v[keys[k]] = c.clone();
        }
        v
    };
    let mut mat: Vec<Vec<Q>> = rows.iter().map(dense).collect();
    let before = rank_bareiss(&mat);
    mat.push(dense(&w.residual));
    rank_bareiss(&mat) > before
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::sdse::{solve, SdseSpec};
    use crate::series::MultiSeries;
    use crate::trees::Decoration;

    fn s(src: &str, order: u32) -> MultiSeries {
        MultiSeries::parse(src, 1, order).unwrap()
    }

    #[test]
    fn ladder_is_hopf() {
        let spec = SdseSpec::new(1, 1, vec![(Decoration::new("d", 0, vec![1]), s("1 + x1", 6))]).unwrap();
        let sol = solve(&spec, 6).unwrap();
        let v = check_hopf(&sol, 6).unwrap();
        assert_eq!(v.status_label(), "hopf-up-to-6");
        for m in 1..=5u32 {
            for n in 1..=(6 - m) {
                let l = extract_lambda(&sol, &v, 0, 0, &DegreeVector(vec![m]), &DegreeVector(vec![n])).unwrap();
                assert_eq!(l, q(1));
            }
        }
    }

    #[test]
    fn one_variable_faa_di_bruno() {
        let b = 5;
        let eqs = (1..=b).map(|k| (Decoration::new(format!("d{k}"), 0, vec![k]), s(&format!("(1+x1)^{}", k + 1), b))).collect();
        let spec = SdseSpec::new(1, 1, eqs).unwrap();
        let sol = solve(&spec, b).unwrap();
        let v = check_hopf(&sol, b).unwrap();
        assert!(v.is_hopf());
        for a in 1..b {
            for c in 1..=(b - a) {
                let l = extract_lambda(&sol, &v, 0, 0, &DegreeVector(vec![a]), &DegreeVector(vec![c])).unwrap();
                assert_eq!(l, q(a as i64 + 1));
            }
        }
    }

    #[test]
    fn unequal_series_at_equal_degree_fail() {
        let spec = SdseSpec::new(
            1,
            1,
            vec![(Decoration::new("d1", 0, vec![1]), s("1 + x1", 4)), (Decoration::new("d2", 0, vec![1]), s("1 + 2*x1", 4))],
        )
        .unwrap();
        let sol = solve(&spec, 4).unwrap();
        let v = check_hopf(&sol, 4).unwrap();
        assert_eq!(v.status, HopfStatus::NotHopf);
        let w = v.witness.as_ref().unwrap();
        assert_eq!(w.degree, DegreeVector(vec![2]));
        assert!(verify_witness(&sol, w));
        assert!(extract_lambda(&sol, &v, 0, 0, &DegreeVector(vec![1]), &DegreeVector(vec![1])).is_err());
    }

    #[test]
    fn missing_component_is_an_error() {
        let spec = SdseSpec::new(1, 1, vec![(Decoration::new("d", 0, vec![2]), s("1 + x1", 4))]).unwrap();
        let sol = solve(&spec, 4).unwrap();
        let v = check_hopf(&sol, 4).unwrap();
        assert!(v.is_hopf());
        assert!(extract_lambda(&sol, &v, 0, 0, &DegreeVector(vec![1]), &DegreeVector(vec![1])).is_err());
        assert!(extract_lambda(&sol, &v, 0, 0, &DegreeVector(vec![2]), &DegreeVector(vec![2])).is_ok());
    }
}
