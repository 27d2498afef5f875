//! Systems X_i = Σ_{d∈D_i} B_d(f_d(X_1, …, X_M)), their truncated solutions and
//! the standard transformations between systems.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hopf::TreeSum;
use crate::linalg::Matrix;
use crate::rational::{fmt_q, Q};
use crate::series::{Exponent, MultiSeries};
use crate::trees::{DecId, Decoration, DecorationSet, DegreeVector};

#[derive(Clone, Debug, PartialEq)]
pub struct SdseSpec {
    set: Arc<DecorationSet>,
    series: Vec<MultiSeries>,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    schema: u32,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<u32>,
    decorations: Vec<Decoration>,
    equations: Vec<EquationJson>,
}

#[derive(Serialize, Deserialize)]
struct EquationJson {
    decoration: String,
    series: String,
}

impl SdseSpec {
    /// Builds a system from an explicit inventory.
    pub fn new(n: usize, m: usize, equations: Vec<(Decoration, MultiSeries)>) -> Result<Self> {
        for (d, f) in &equations {
            if f.nvars() != m {
                return Err(Error::Shape(format!("series for `{}` has {} variables, expected {m}", d.label, f.nvars())));
            }
        }
        let series_by_label: HashMap<String, MultiSeries> =
            equations.iter().map(|(d, f)| (d.label.clone(), f.clone())).collect();
        let set = DecorationSet::new(n, m, equations.into_iter().map(|(d, _)| d).collect())?;
        let series = set.decorations().iter().map(|d| series_by_label[&d.label].clone()).collect();
        Ok(SdseSpec { set: Arc::new(set), series })
    }

    /// Builds a system from a generator producing, for each block and degree,
    /// the decorations of that degree with their series. Degrees up to `bound`.
    pub fn from_generator(
        n: usize,
        m: usize,
        bound: u32,
        mut generator: impl FnMut(usize, &DegreeVector) -> Vec<(String, MultiSeries)>,
    ) -> Result<Self> {
        let mut eqs = Vec::new();
        for block in 0..m {
            for alpha in DegreeVector::all_nonzero(n, bound) {
                for (label, f) in generator(block, &alpha) {
                    eqs.push((Decoration { label, block, degree: alpha.clone() }, f));
                }
            }
        }
        Self::new(n, m, eqs)
    }

    pub fn n(&self) -> usize {
        self.set.n()
    }

    pub fn m(&self) -> usize {
        self.set.m()
    }

    pub fn set(&self) -> &Arc<DecorationSet> {
        &self.set
    }

    pub fn series(&self, d: DecId) -> &MultiSeries {
        &self.series[d.0 as usize]
    }

    pub fn series_by_label(&self, label: &str) -> Result<&MultiSeries> {
        Ok(self.series(self.set.id(label)?))
    }

    pub fn equations(&self) -> impl Iterator<Item = (&Decoration, &MultiSeries)> {
        self.set.decorations().iter().zip(&self.series)
    }

    fn rebuild(&self, n: usize, m: usize, mut f: impl FnMut(&Decoration, &MultiSeries) -> Result<Option<(Decoration, MultiSeries)>>) -> Result<Self> {
        let mut eqs = Vec::new();
        for (d, s) in self.equations() {
            if let Some(e) = f(d, s)? {
                eqs.push(e);
            }
        }
        Self::new(n, m, eqs)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let order = self.series.iter().map(|s| s.order()).max();
        let j = SpecJson {
            schema: 1,
            n: self.n(),
            m: self.m(),
            order,
            decorations: self.set.decorations().to_vec(),
            equations: self
                .equations()
                .map(|(d, s)| EquationJson { decoration: d.label.clone(), series: s.to_string() })
                .collect(),
        };
        serde_json::to_value(j).expect("plain data")
    }

    /// Parses the JSON form. Series are read at the stored order, or at
    /// `default_order` when the document has none.
    pub fn from_json(v: &serde_json::Value, default_order: Option<u32>) -> Result<Self> {
        let j: SpecJson = serde_json::from_value(v.clone())?;
        if j.schema != 1 {
            return Err(Error::Invalid(format!("unsupported schema version {}", j.schema)));
        }
        let order = j
            .order
            .or(default_order)
            .ok_or_else(|| Error::Invalid("no truncation order: add `order` or pass a bound".into()))?;
        let mut series: HashMap<String, MultiSeries> = HashMap::new();
        for e in &j.equations {
            let s = MultiSeries::parse(&e.series, j.m, order)
                .map_err(|err| Error::Invalid(format!("equation for `{}`: {err}", e.decoration)))?;
            if series.insert(e.decoration.clone(), s).is_some() {
                return Err(Error::Invalid(format!("two equations for `{}`", e.decoration)));
            }
        }
        let mut eqs = Vec::new();
        for d in j.decorations {
            let s = series
                .remove(&d.label)
                .ok_or_else(|| Error::Invalid(format!("no equation for decoration `{}`", d.label)))?;
            eqs.push((d, s));
        }
        if let Some(extra) = series.keys().next() {
            return Err(Error::UnknownLabel(extra.clone()));
        }
        Self::new(j.n, j.m, eqs)
    }

    fn check_orders(&self, bound: u32) -> Result<()> {
        for (d, s) in self.equations() {
            let need = bound.saturating_sub(d.degree.total());
            if d.degree.total() <= bound && s.order() < need {
                return Err(Error::Precondition(format!(
                    "series for `{}` is known to order {} but order {need} is needed",
                    d.label,
                    s.order()
                )));
            }
        }
        Ok(())
    }
}

/// Truncated solution: one tree sum per block.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    set: Arc<DecorationSet>,
    bound: u32,
    blocks: Vec<TreeSum>,
}

impl Solution {
    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn set(&self) -> &Arc<DecorationSet> {
        &self.set
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, i: usize) -> &TreeSum {
        &self.blocks[i]
    }

    pub fn blocks(&self) -> &[TreeSum] {
        &self.blocks
    }

    /// X_i(α).
    pub fn component(&self, i: usize, alpha: &DegreeVector) -> TreeSum {
        self.blocks[i].homogeneous(alpha)
    }

    /// Blocks whose solution vanishes up to the bound.
    pub fn zero_blocks(&self) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&i| self.blocks[i].is_zero()).collect()
    }

    pub fn warnings(&self) -> Vec<String> {
        self.zero_blocks().into_iter().map(|i| format!("X_{} vanishes up to degree {}", i, self.bound)).collect()
    }

    /// Nonzero components X_i(α), sorted by (block, degree).
    pub fn generators(&self) -> Vec<(usize, DegreeVector, TreeSum)> {
        let mut out = Vec::new();
        for (i, x) in self.blocks.iter().enumerate() {
            let mut by_deg: BTreeMap<DegreeVector, TreeSum> = BTreeMap::new();
            for (f, c) in x.terms() {
                by_deg
                    .entry(self.set.forest_degree(f))
                    .or_insert_with(|| TreeSum::zero(&self.set))
                    .add_term(f.clone(), c.clone());
            }
            for (a, s) in by_deg {
                out.push((i, a, s));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let blocks: Vec<serde_json::Value> = self
            .generators()
            .into_iter()
            .map(|(i, a, s)| serde_json::json!({"block": i, "degree": a, "terms": s.to_json()}))
            .collect();
        serde_json::json!({
            "schema": 1,
            "bound": self.bound,
            "M": self.m(),
            "components": blocks,
            "warnings": self.warnings(),
        })
    }

    pub fn from_json(spec: &SdseSpec, v: &serde_json::Value) -> Result<Solution> {
        let bound = v["bound"].as_u64().ok_or_else(|| Error::Invalid("missing bound".into()))? as u32;
        let mut blocks = vec![TreeSum::zero(spec.set()).with_bound(Some(bound)); spec.m()];
        let comps = v["components"].as_array().ok_or_else(|| Error::Invalid("missing components".into()))?;
        for c in comps {
            let i = c["block"].as_u64().ok_or_else(|| Error::Invalid("missing block".into()))? as usize;
            if i >= blocks.len() {
                return Err(Error::Invalid(format!("block {i} out of range")));
            }
            let part = TreeSum::from_json(spec.set(), &c["terms"])?;
            blocks[i] = blocks[i].add(&part)?;
        }
        Ok(Solution { set: spec.set().clone(), bound, blocks })
    }
}

/// Lazily built products X^e, truncated at a weight cap.
struct Monomials<'a> {
    x: &'a [TreeSum],
    cap: u32,
    cache: HashMap<Exponent, TreeSum>,
}

impl Monomials<'_> {
    fn get(&mut self, e: &Exponent) -> TreeSum {
        if let Some(v) = self.cache.get(e) {
            return v.clone();
        }
        let set = self.x[0].set().clone();
        let v = match e.iter().position(|&k| k > 0) {
            None => TreeSum::one(&set).with_bound(Some(self.cap)),
            Some(i) => {
                let mut prev = e.clone();
                prev[i] -= 1;
                let p = self.get(&prev);
                p.product(&self.x[i].clone().with_bound(Some(self.cap))).expect("same set")
            }
        };
        self.cache.insert(e.clone(), v.clone());
        v
    }
}

fn theta(spec: &SdseSpec, x: &[TreeSum], bound: u32) -> Vec<TreeSum> {
    let set = spec.set();
    let mut out: Vec<TreeSum> = (0..spec.m()).map(|_| TreeSum::zero(set).with_bound(Some(bound))).collect();
    let mut mono = Monomials { x, cap: bound.saturating_sub(1), cache: HashMap::new() };
    for d in set.ids() {
        let w = set.weight(d);
        if w > bound {
            continue;
        }
        let cap = bound - w;
        let mut acc = TreeSum::zero(set).with_bound(Some(cap));
        for (e, c) in spec.series(d).terms() {
            if e.iter().sum::<u32>() > cap {
                continue;
            }
            let m = mono.get(e);
            for (f, v) in m.terms() {
                acc.add_term(f.clone(), v * c);
            }
        }
        let g = acc.graft(d);
        let i = set.block(d);
        out[i] = out[i].add(&g).expect("same set").with_bound(Some(bound));
    }
    out
}

/// Fixed point of Θ from zero, truncated at total degree `bound`.
pub fn solve(spec: &SdseSpec, bound: u32) -> Result<Solution> {
    if bound == 0 {
        return Err(Error::Precondition("bound must be at least 1".into()));
    }
    spec.check_orders(bound)?;
    let set = spec.set();
    let mut x: Vec<TreeSum> = (0..spec.m()).map(|_| TreeSum::zero(set).with_bound(Some(bound))).collect();
    for _ in 0..bound {
        let next = theta(spec, &x, bound);
        if next == x {
            break;
        }
        x = next;
    }
    Ok(Solution { set: set.clone(), bound, blocks: x })
}

/// Degree-by-degree solve: the weight-n part of X_i only involves parts of
/// weight < n, so each level is computed once by graded convolution.
pub fn solve_by_degree(spec: &SdseSpec, bound: u32) -> Result<Solution> {
    if bound == 0 {
        return Err(Error::Precondition("bound must be at least 1".into()));
    }
    spec.check_orders(bound)?;
    let set = spec.set().clone();
    let m = spec.m();
    // levels[i][w]: weight-w part of X_i
    let mut levels: Vec<Vec<TreeSum>> = vec![vec![TreeSum::zero(&set)]; m];
    let mut hom: HashMap<(Exponent, u32), TreeSum> = HashMap::new();
    fn part(
        e: &Exponent,
        w: u32,
        levels: &[Vec<TreeSum>],
        hom: &mut HashMap<(Exponent, u32), TreeSum>,
        set: &Arc<DecorationSet>,
    ) -> TreeSum {
        let total: u32 = e.iter().sum();
        if total > w {
            return TreeSum::zero(set);
        }
        if let Some(v) = hom.get(&(e.clone(), w)) {
            return v.clone();
        }
        let v = match e.iter().position(|&k| k > 0) {
            None => {
                if w == 0 {
                    TreeSum::one(set)
                } else {
                    TreeSum::zero(set)
                }
            }
            Some(i) => {
                let mut prev = e.clone();
                prev[i] -= 1;
                let mut acc = TreeSum::zero(set);
                for w1 in 1..=w {
                    let rest = part(&prev, w - w1, levels, hom, set);
                    if rest.is_zero() {
                        continue;
                    }
                    let p = rest.product(&levels[i][w1 as usize]).expect("same set");
                    acc = acc.add(&p).expect("same set");
                }
                acc
            }
        };
        hom.insert((e.clone(), w), v.clone());
        v
    }
    for n in 1..=bound {
        let mut new_level: Vec<TreeSum> = vec![TreeSum::zero(&set); m];
        for d in set.ids() {
            let wd = set.weight(d);
            if wd > n {
                continue;
            }
            let mut acc = TreeSum::zero(&set);
            for (e, c) in spec.series(d).terms() {
                let p = part(e, n - wd, &levels, &mut hom, &set);
                acc = acc.add(&p.scale(c)).expect("same set");
            }
            let i = set.block(d);
            new_level[i] = new_level[i].add(&acc.graft(d)).expect("same set");
        }
        for (i, l) in new_level.into_iter().enumerate() {
            levels[i].push(l);
        }
    }
    let blocks = levels
        .into_iter()
        .map(|ls| {
            let mut acc = TreeSum::zero(&set).with_bound(Some(bound));
            for l in ls {
                acc = acc.add(&l).expect("same set");
            }
            acc
        })
        .collect();
    Ok(Solution { set, bound, blocks })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NormalizationReport {
    /// Decorations with f_d = 0, dropped from the system.
    pub removed: Vec<String>,
    /// Decorations with f_d(0) = 0 but f_d ≠ 0; kept unscaled.
    pub flagged: Vec<String>,
    /// a_d = f_d(0) for every rescaled decoration.
    pub scaling: BTreeMap<String, Q>,
}

/// Drops vanishing equations and divides each remaining f_d by f_d(0).
pub fn normalize(spec: &SdseSpec) -> Result<(SdseSpec, NormalizationReport)> {
    let mut report = NormalizationReport::default();
    let out = spec.rebuild(spec.n(), spec.m(), |d, s| {
        if s.is_zero() {
            report.removed.push(d.label.clone());
            return Ok(None);
        }
        let c = s.constant_term();
        if c.is_zero() {
            report.flagged.push(d.label.clone());
            return Ok(Some((d.clone(), s.clone())));
        }
        report.scaling.insert(d.label.clone(), c.clone());
        Ok(Some((d.clone(), s.scale(&(Q::one() / c)))))
    })?;
    Ok((out, report))
}

/// f_d(a_1 x_1, …, a_M x_M).
pub fn change_of_variables(spec: &SdseSpec, a: &[Q]) -> Result<SdseSpec> {
    if a.len() != spec.m() {
        return Err(Error::Shape(format!("{} scalars for {} blocks", a.len(), spec.m())));
    }
    if a.iter().any(|x| x.is_zero()) {
        return Err(Error::Precondition("scalars must be nonzero".into()));
    }
    spec.rebuild(spec.n(), spec.m(), |d, s| {
        let images: Vec<MultiSeries> =
            (0..spec.m()).map(|i| MultiSeries::var(spec.m(), s.order(), i).scale(&a[i])).collect();
        Ok(Some((d.clone(), s.substitute(&images)?)))
    })
}

/// Keeps the blocks in `keep` (renumbered in increasing order) and sets the
/// other variables to zero.
pub fn restriction(spec: &SdseSpec, keep: &[usize]) -> Result<SdseSpec> {
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::Precondition("restriction to an empty set of blocks".into()));
    }
    if let Some(&bad) = keep.iter().find(|&&i| i >= spec.m()) {
        return Err(Error::Precondition(format!("block {bad} does not exist")));
    }
    let mk = keep.len();
    spec.rebuild(spec.n(), mk, |d, s| {
        let Some(pos) = keep.iter().position(|&i| i == d.block) else { return Ok(None) };
        let images: Vec<MultiSeries> = (0..spec.m())
            .map(|j| match keep.iter().position(|&i| i == j) {
                Some(p) => MultiSeries::var(mk, s.order(), p),
                None => MultiSeries::zero(mk, s.order()),
            })
            .collect();
        let mut nd = d.clone();
        nd.block = pos;
        Ok(Some((nd, s.substitute(&images)?)))
    })
}

/// Disjoint union; labels of `b` that collide with `a` get primes appended.
pub fn concatenation(a: &SdseSpec, b: &SdseSpec) -> Result<SdseSpec> {
    if a.n() != b.n() {
        return Err(Error::Shape(format!("gradings differ: N = {} vs {}", a.n(), b.n())));
    }
    let m = a.m() + b.m();
    let mut eqs = Vec::new();
    let mut used: std::collections::HashSet<String> = a.set().decorations().iter().map(|d| d.label.clone()).collect();
    for (d, s) in a.equations() {
        let images: Vec<MultiSeries> = (0..a.m()).map(|i| MultiSeries::var(m, s.order(), i)).collect();
        eqs.push((d.clone(), s.substitute(&images)?));
    }
    for (d, s) in b.equations() {
        let images: Vec<MultiSeries> = (0..b.m()).map(|i| MultiSeries::var(m, s.order(), a.m() + i)).collect();
        let mut nd = d.clone();
        nd.block += a.m();
        while used.contains(&nd.label) {
            nd.label.push('\'');
        }
        used.insert(nd.label.clone());
        let s = if b.m() == 0 { MultiSeries::constant(m, s.order(), s.constant_term()) } else { s.substitute(&images)? };
        eqs.push((nd, s));
    }
    SdseSpec::new(a.n(), m, eqs)
}

/// Replaces every decoration degree α by Cα, which must lie in ℕ^{N′} \ {0}.
pub fn regrade(spec: &SdseSpec, c: &Matrix) -> Result<SdseSpec> {
    let n2 = c.len();
    if c.iter().any(|r| r.len() != spec.n()) {
        return Err(Error::Shape(format!("C must have {} columns", spec.n())));
    }
    spec.rebuild(n2, spec.m(), |d, s| {
        let mut deg = Vec::with_capacity(n2);
        for row in c {
            let v = row.iter().zip(d.degree.iter()).fold(Q::zero(), |acc, (x, &a)| acc + x * Q::from_integer(a.into()));
            if !v.is_integer() || v.is_negative() {
                return Err(Error::Grading(format!("C·deg(`{}`) has entry {}", d.label, fmt_q(&v))));
            }
            deg.push(u32::try_from(v.to_integer()).map_err(|_| Error::Grading("degree overflow".into()))?);
        }
        if deg.iter().all(|&x| x == 0) {
            return Err(Error::Grading(format!("C·deg(`{}`) is zero", d.label)));
        }
        let mut nd = d.clone();
        nd.degree = DegreeVector(deg);
        Ok(Some((nd, s.clone())))
    })
}

/// Removes blocks whose solution vanishes (opt-in rewriting of the system).
pub fn prune_zero_blocks(spec: &SdseSpec, sol: &Solution) -> Result<(SdseSpec, Vec<usize>)> {
    let zero = sol.zero_blocks();
    let keep: Vec<usize> = (0..spec.m()).filter(|i| !zero.contains(i)).collect();
    Ok((restriction(spec, &keep)?, keep))
}
