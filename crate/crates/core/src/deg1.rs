//! deg1 pre-Lie algebras: f_j(β)*f_i(α) = (A^{(i,j)}·α + b^{(i,j)}) f_i(α+β).
//!
//! Conditions, fundamental algebras, classification, the tree coefficients
//! λ_T and the associated Hopf system, and the reduced form.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{inverse, rref, transpose, Matrix};
use crate::rational::{fmt_q, value_to_q, Q};
use crate::sdse::SdseSpec;
use crate::series::{f_ab, MultiSeries};
use crate::trees::{tree_symmetry_factor, Decoration, DecorationSet, DegreeVector, Tree};

fn dot(a: &[Q], alpha: &[u32]) -> Q {
    a.iter().zip(alpha).fold(Q::zero(), |acc, (x, &k)| acc + x * Q::from_integer(k.into()))
}

fn qs_json(v: &[Q]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(fmt_q(x))).collect())
}

fn qs_from(v: &Value, what: &str) -> Result<Vec<Q>> {
    v.as_array()
        .ok_or_else(|| Error::Invalid(format!("`{what}` must be an array")))?
        .iter()
        .map(value_to_q)
        .collect()
}

fn usizes_from(v: &Value, what: &str) -> Result<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| Error::Invalid(format!("`{what}` must be an array")))?
        .iter()
        .map(|x| x.as_u64().map(|u| u as usize).ok_or_else(|| Error::Invalid(format!("`{what}` must hold indices"))))
        .collect()
}

fn field<'a>(v: &'a Value, k: &str) -> Result<&'a Value> {
    v.get(k).ok_or_else(|| Error::Invalid(format!("missing field `{k}`")))
}

fn check_schema(v: &Value) -> Result<()> {
    match v.get("schema").and_then(Value::as_u64) {
        Some(1) | None => Ok(()),
        Some(s) => Err(Error::Invalid(format!("unsupported schema version {s}"))),
    }
}

/// Structure coefficients: `a[i][j]` = A^{(i,j)} ∈ ℚᴺ, `b[i][j]` = b^{(i,j)}.
#[derive(Clone, Debug, PartialEq)]
pub struct Deg1Coeffs {
    pub m: usize,
    pub n: usize,
    pub a: Vec<Vec<Vec<Q>>>,
    pub b: Vec<Vec<Q>>,
}

/// A violated condition and the triple (i, j, k) violating it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: u8,
    pub triple: (usize, usize, usize),
}

impl Deg1Coeffs {
    pub fn zero(m: usize, n: usize) -> Self {
        Deg1Coeffs { m, n, a: vec![vec![vec![Q::zero(); n]; m]; m], b: vec![vec![Q::zero(); m]; m] }
    }

    /// A^{(i,j)} = ε_j, b^{(i,j)} = δ_{i,j} on N = M blocks.
    pub fn faa_di_bruno(m: usize) -> Self {
        let mut c = Self::zero(m, m);
        for i in 0..m {
            for j in 0..m {
                c.a[i][j][j] = Q::one();
            }
            c.b[i][i] = Q::one();
        }
        c
    }

    fn validate(&self) -> Result<()> {
        let ok = self.a.len() == self.m
            && self.b.len() == self.m
            && self.a.iter().all(|r| r.len() == self.m && r.iter().all(|v| v.len() == self.n))
            && self.b.iter().all(|r| r.len() == self.m);
        if ok {
            Ok(())
        } else {
            Err(Error::Shape(format!("coefficients must be {0}×{0} with vectors of length {1}", self.m, self.n)))
        }
    }

    /// A^{(i,j)}·α + b^{(i,j)}.
    pub fn lambda(&self, i: usize, j: usize, alpha: &[u32]) -> Q {
        dot(&self.a[i][j], alpha) + &self.b[i][j]
    }

    /// Conditions: (A^{ij}=0 ∧ b^{ij}=0) ∨ A^{jk}=A^{ik}; A^{ij}b^{jk}=A^{ik}b^{kj};
    /// b^{ij}b^{jk}=b^{ik}b^{kj}.
    pub fn check_conditions(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let m = self.m;
        let is_zero = |v: &[Q]| v.iter().all(Zero::is_zero);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let c1 = (is_zero(&self.a[i][j]) && self.b[i][j].is_zero()) || self.a[j][k] == self.a[i][k];
                    if !c1 {
                        out.push(Violation { condition: 1, triple: (i, j, k) });
                    }
                    let lhs: Vec<Q> = self.a[i][j].iter().map(|x| x * &self.b[j][k]).collect();
                    let rhs: Vec<Q> = self.a[i][k].iter().map(|x| x * &self.b[k][j]).collect();
                    if lhs != rhs {
                        out.push(Violation { condition: 2, triple: (i, j, k) });
                    }
                    if &self.b[i][j] * &self.b[j][k] != &self.b[i][k] * &self.b[k][j] {
                        out.push(Violation { condition: 3, triple: (i, j, k) });
                    }
                }
            }
        }
        out
    }

    pub fn is_prelie(&self) -> bool {
        self.check_conditions().is_empty()
    }

    /// The equivalent algebra with coefficients λ_j A^{(i,j)}, λ_j b^{(i,j)}.
    pub fn rescale(&self, lambda: &[Q]) -> Result<Self> {
        if lambda.len() != self.m || lambda.iter().any(Zero::is_zero) {
            return Err(Error::Precondition(format!("need {} nonzero scalars", self.m)));
        }
        let mut c = self.clone();
        for i in 0..self.m {
            for j in 0..self.m {
                for x in c.a[i][j].iter_mut() {
                    *x *= &lambda[j];
                }
                c.b[i][j] *= &lambda[j];
            }
        }
        Ok(c)
    }

    /// [f_j(β), f_i(α)] as coordinates on f_·(α+β).
    pub fn bracket(&self, j: usize, beta: &[u32], i: usize, alpha: &[u32]) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.m];
        v[i] += self.lambda(i, j, alpha);
        v[j] -= self.lambda(j, i, beta);
        v
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": 1,
            "M": self.m,
            "N": self.n,
            "A": self.a.iter().map(|r| r.iter().map(|v| qs_json(v)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "b": self.b.iter().map(|r| qs_json(r)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        check_schema(v)?;
        let m = field(v, "M")?.as_u64().ok_or_else(|| Error::Invalid("`M` must be an integer".into()))? as usize;
        let n = field(v, "N")?.as_u64().ok_or_else(|| Error::Invalid("`N` must be an integer".into()))? as usize;
        let a = field(v, "A")?
            .as_array()
            .ok_or_else(|| Error::Invalid("`A` must be an array".into()))?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Invalid("`A` rows must be arrays".into()))?
                    .iter()
                    .map(|x| qs_from(x, "A"))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let b = field(v, "b")?
            .as_array()
            .ok_or_else(|| Error::Invalid("`b` must be an array".into()))?
            .iter()
            .map(|r| qs_from(r, "b"))
            .collect::<Result<Vec<_>>>()?;
        let c = Deg1Coeffs { m, n, a, b };
        c.validate()?;
        Ok(c)
    }
}

/// Parameters of a fundamental algebra: `[M] = I_0 ⊔ I_1 ⊔ … ⊔ I_k`,
/// vectors A_q, scalars b_q and b^{(i)}_q for i ∈ I_0.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalParams {
    pub m: usize,
    pub n: usize,
    pub i0: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
    pub a: Vec<Vec<Q>>,
    pub b: Vec<Q>,
    /// `b_source[t][q]` = b^{(i0[t])}_q.
    pub b_source: Vec<Vec<Q>>,
}

/// Where a block sits in the partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Source(usize),
    Class(usize),
}

impl FundamentalParams {
    pub fn new(
        m: usize,
        n: usize,
        i0: Vec<usize>,
        classes: Vec<Vec<usize>>,
        a: Vec<Vec<Q>>,
        b: Vec<Q>,
        b_source: Vec<Vec<Q>>,
    ) -> Result<Self> {
        let p = FundamentalParams { m, n, i0, classes, a, b, b_source };
        p.validate()?;
        Ok(p)
    }

    /// I_j = {j}, A = Id, b = 1: the Faà di Bruno algebra.
    pub fn faa_di_bruno(m: usize) -> Self {
        let a = (0..m).map(|j| (0..m).map(|t| if t == j { Q::one() } else { Q::zero() }).collect()).collect();
        FundamentalParams {
            m,
            n: m,
            i0: vec![],
            classes: (0..m).map(|j| vec![j]).collect(),
            a,
            b: vec![Q::one(); m],
            b_source: vec![],
        }
    }

    pub fn k(&self) -> usize {
        self.classes.len()
    }

    fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.m];
        for &i in self.i0.iter().chain(self.classes.iter().flatten()) {
            if i >= self.m || seen[i] {
                return Err(Error::Invalid(format!("block {i} is out of range or repeated in the partition")));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Invalid("the partition does not cover every block".into()));
        }
        if self.classes.iter().any(Vec::is_empty) {
            return Err(Error::Invalid("classes I_1..I_k must be nonempty".into()));
        }
        let k = self.k();
        if self.a.len() != k || self.a.iter().any(|v| v.len() != self.n) || self.b.len() != k {
            return Err(Error::Shape(format!("need {k} vectors A_q of length {} and {k} scalars b_q", self.n)));
        }
        if self.b_source.len() != self.i0.len() || self.b_source.iter().any(|v| v.len() != k) {
            return Err(Error::Shape(format!("need {k} scalars b^(i)_q for each source block")));
        }
        Ok(())
    }

    pub fn part(&self, i: usize) -> Part {
        if let Some(t) = self.i0.iter().position(|&x| x == i) {
            return Part::Source(t);
        }
        Part::Class(self.classes.iter().position(|c| c.contains(&i)).expect("validated partition"))
    }

    pub fn to_coeffs(&self) -> Deg1Coeffs {
        let mut c = Deg1Coeffs::zero(self.m, self.n);
        for i in 0..self.m {
            for j in 0..self.m {
                let Part::Class(q) = self.part(j) else { continue };
                c.a[i][j] = self.a[q].clone();
                c.b[i][j] = match self.part(i) {
                    Part::Class(p) if p == q => self.b[q].clone(),
                    Part::Class(_) => Q::zero(),
                    Part::Source(t) => self.b_source[t][q].clone(),
                };
            }
        }
        c
    }

    /// The coefficient P_{(j_1,…,j_k)}(α) of f_{j_1}(β_1)…f_{j_k}(β_k)*f_i(α).
    pub fn poly_p(&self, i: usize, roots: &[usize], alpha: &[u32]) -> Q {
        let mut eps = vec![0u32; self.k()];
        for &j in roots {
            match self.part(j) {
                Part::Source(_) => return Q::zero(),
                Part::Class(q) => eps[q] += 1,
            }
        }
        let mut acc = Q::one();
        for (q, &e) in eps.iter().enumerate() {
            let base = dot(&self.a[q], alpha);
            let shift = match self.part(i) {
                Part::Class(p) => {
                    if p == q {
                        self.b[q].clone()
                    } else {
                        Q::zero()
                    }
                }
                Part::Source(t) => self.b_source[t][q].clone(),
            };
            for r in 0..e {
                acc *= &base + &shift - &self.b[q] * Q::from_integer(r.into());
            }
        }
        acc
    }

    /// λ_T for a tree over decorations (block, degree).
    pub fn lambda_t(&self, set: &DecorationSet, t: &Tree) -> Result<Q> {
        let d = t.root();
        let i = set.block(d);
        if i >= self.m || set.n() != self.n {
            return Err(Error::Invalid(format!("decoration `{}` is outside [M]×ℕᴺ", set.label(d))));
        }
        let mut acc = Q::one();
        let mut roots = Vec::new();
        for c in t.children() {
            acc *= self.lambda_t(set, c)?;
            roots.push(set.block(c.root()));
        }
        Ok(acc * self.poly_p(i, &roots, &set.degree(d).0))
    }

    /// μ_T = λ_T / s_T.
    pub fn mu_t(&self, set: &DecorationSet, t: &Tree) -> Result<Q> {
        Ok(self.lambda_t(set, t)? / Q::from_integer(tree_symmetry_factor(t).into()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": 1,
            "M": self.m,
            "N": self.n,
            "I0": self.i0,
            "classes": self.classes,
            "A": self.a.iter().map(|v| qs_json(v)).collect::<Vec<_>>(),
            "b": qs_json(&self.b),
            "b_source": self.b_source.iter().map(|v| qs_json(v)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        check_schema(v)?;
        let m = field(v, "M")?.as_u64().ok_or_else(|| Error::Invalid("`M` must be an integer".into()))? as usize;
        let n = field(v, "N")?.as_u64().ok_or_else(|| Error::Invalid("`N` must be an integer".into()))? as usize;
        let i0 = match v.get("I0") {
            Some(x) => usizes_from(x, "I0")?,
            None => vec![],
        };
        let classes = field(v, "classes")?
            .as_array()
            .ok_or_else(|| Error::Invalid("`classes` must be an array".into()))?
            .iter()
            .map(|c| usizes_from(c, "classes"))
            .collect::<Result<Vec<_>>>()?;
        let a = field(v, "A")?
            .as_array()
            .ok_or_else(|| Error::Invalid("`A` must be an array".into()))?
            .iter()
            .map(|x| qs_from(x, "A"))
            .collect::<Result<Vec<_>>>()?;
        let b = qs_from(field(v, "b")?, "b")?;
        let b_source = match v.get("b_source") {
            Some(x) => x
                .as_array()
                .ok_or_else(|| Error::Invalid("`b_source` must be an array".into()))?
                .iter()
                .map(|r| qs_from(r, "b_source"))
                .collect::<Result<Vec<_>>>()?,
            None => vec![],
        };
        Self::new(m, n, i0, classes, a, b, b_source)
    }
}

/// Label of the decoration (i, α) in emitted systems.
pub fn decoration_label(i: usize, alpha: &DegreeVector) -> String {
    let parts: Vec<String> = alpha.iter().map(|x| x.to_string()).collect();
    format!("{i}:{}", parts.join("."))
}

/// The Hopf system on D_{M,N} = [M]×ℕᴺ_* whose dual is the enveloping algebra
/// of the fundamental algebra, with decorations of total degree ≤ `bound`.
pub fn emit_sdse(p: &FundamentalParams, bound: u32) -> Result<SdseSpec> {
    if bound == 0 {
        return Err(Error::Precondition("bound must be at least 1".into()));
    }
    let m = p.m;
    let mut eqs = Vec::new();
    for i in 0..m {
        for alpha in DegreeVector::all_nonzero(p.n, bound) {
            let order = bound - alpha.total();
            let mut f = MultiSeries::one(m, order);
            for q in 0..p.k() {
                let sum = MultiSeries::var_sum(m, order, &p.classes[q]);
                let mut a = dot(&p.a[q], &alpha);
                if let Part::Source(t) = p.part(i) {
                    a += &p.b_source[t][q];
                }
                f = f.mul(&f_ab(&a, &p.b[q], order).substitute(&[sum])?);
            }
            if let Part::Class(q) = p.part(i) {
                let sum = MultiSeries::var_sum(m, order, &p.classes[q]);
                f = f.mul(&MultiSeries::one(m, order).add(&sum.scale(&p.b[q])));
            }
            eqs.push((Decoration { label: decoration_label(i, &alpha), block: i, degree: alpha }, f));
        }
    }
    SdseSpec::new(p.n, m, eqs)
}

/// The decoration set of `emit_sdse`, without series.
pub fn decorations(m: usize, n: usize, bound: u32) -> Result<Arc<DecorationSet>> {
    let mut decs = Vec::new();
    for i in 0..m {
        for alpha in DegreeVector::all_nonzero(n, bound) {
            decs.push(Decoration { label: decoration_label(i, &alpha), block: i, degree: alpha });
        }
    }
    Ok(Arc::new(DecorationSet::new(n, m, decs)?))
}

/// One ∼-class of the classification: its blocks (global indices, sorted)
/// and fundamental parameters indexed by position in `members`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassComponent {
    pub members: Vec<usize>,
    pub params: FundamentalParams,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub components: Vec<ClassComponent>,
    /// λ_i realizing the equivalence: rescaling the input by λ gives the
    /// direct sum of the components.
    pub scalars: Vec<Q>,
}

impl Classification {
    pub fn to_coeffs(&self, m: usize, n: usize) -> Deg1Coeffs {
        let mut c = Deg1Coeffs::zero(m, n);
        for comp in &self.components {
            let local = comp.params.to_coeffs();
            for (li, &gi) in comp.members.iter().enumerate() {
                for (lj, &gj) in comp.members.iter().enumerate() {
                    c.a[gi][gj] = local.a[li][lj].clone();
                    c.b[gi][gj] = local.b[li][lj].clone();
                }
            }
        }
        c
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": 1,
            "scalars": qs_json(&self.scalars),
            "components": self
                .components
                .iter()
                .map(|c| json!({"members": c.members, "params": c.params.to_json()}))
                .collect::<Vec<_>>(),
        })
    }
}

fn components_undirected(vertices: &[usize], edge: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut comp: Vec<Option<usize>> = vec![None; vertices.len()];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for s in 0..vertices.len() {
        if comp[s].is_some() {
            continue;
        }
        let id = out.len();
        let mut stack = vec![s];
        comp[s] = Some(id);
        let mut members = Vec::new();
        while let Some(u) = stack.pop() {
            members.push(vertices[u]);
            for w in 0..vertices.len() {
                if comp[w].is_none() && (edge(vertices[u], vertices[w]) || edge(vertices[w], vertices[u])) {
                    comp[w] = Some(id);
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Splits a deg1 pre-Lie algebra into ∼-classes (equal A rows) and writes
/// each as a fundamental algebra after rescaling.
pub fn classify(c: &Deg1Coeffs) -> Result<Classification> {
    c.validate()?;
    if let Some(v) = c.check_conditions().first() {
        return Err(Error::Conditions(v.triple));
    }
    let m = c.m;
    let mut scalars = vec![Q::one(); m];
    let mut class_of: Vec<Option<usize>> = vec![None; m];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..m {
        if class_of[i].is_some() {
            continue;
        }
        let id = classes.len();
        let members: Vec<usize> = (i..m).filter(|&j| class_of[j].is_none() && c.a[j] == c.a[i]).collect();
        for &j in &members {
            class_of[j] = Some(id);
        }
        classes.push(members);
    }
    let edge = |i: usize, j: usize| !c.b[i][j].is_zero();
    let mut components = Vec::new();
    for h in &classes {
        let incoming = |j: usize| h.iter().any(|&i| edge(i, j));
        let outgoing = |i: usize| h.iter().any(|&j| edge(i, j));
        let i0: Vec<usize> = h.iter().copied().filter(|&i| !incoming(i) && outgoing(i)).collect();
        let rest: Vec<usize> = h.iter().copied().filter(|i| !i0.contains(i)).collect();
        let parts = components_undirected(&rest, edge);
        for part in &parts {
            let lead = part[0];
            if edge(lead, lead) || part.len() > 1 {
                for &j in part {
                    scalars[j] = Q::one() / &c.b[lead][j];
                }
            } else if let Some(x) = c.a[lead][lead].iter().chain(i0.iter().map(|&s| &c.b[s][lead])).find(|x| !x.is_zero()) {
                // edgeless singleton: fix the scale by its first nonzero coefficient
                scalars[lead] = Q::one() / x;
            }
        }
        let local = |g: usize| h.iter().position(|&x| x == g).expect("member");
        let a: Vec<Vec<Q>> =
            parts.iter().map(|p| c.a[p[0]][p[0]].iter().map(|x| x * &scalars[p[0]]).collect()).collect();
        let b: Vec<Q> = parts.iter().map(|p| &c.b[p[0]][p[0]] * &scalars[p[0]]).collect();
        let b_source: Vec<Vec<Q>> =
            i0.iter().map(|&s| parts.iter().map(|p| &c.b[s][p[0]] * &scalars[p[0]]).collect()).collect();
        let params = FundamentalParams::new(
            h.len(),
            c.n,
            i0.iter().map(|&g| local(g)).collect(),
            parts.iter().map(|p| p.iter().map(|&g| local(g)).collect()).collect(),
            a,
            b,
            b_source,
        )?;
        components.push(ClassComponent { members: h.clone(), params });
    }
    let out = Classification { components, scalars };
    if out.to_coeffs(m, c.n) != c.rescale(&out.scalars)? {
        return Err(Error::Invalid("coefficients satisfy the conditions but are not a sum of fundamentals".into()));
    }
    Ok(out)
}

/// A reduced algebra Lie-isomorphic to a fundamental one.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    /// Reduced parameters: I_q = {q-1} for q = 1..k, I_0 = {k, …, M-1}.
    pub params: FundamentalParams,
    pub rank: usize,
    /// New basis: g_i(α) = Σ_j basis[i][j] f_j(α′) with α′ given by `coords`.
    pub basis: Matrix,
    /// Coordinate t of the reduced grading is coordinate `coords[t]` of the input.
    pub coords: Vec<usize>,
    /// P with A′ = A P (columns indexed by classes).
    pub p: Matrix,
}

impl Reduction {
    /// Input degree α corresponding to a reduced degree.
    pub fn input_degree(&self, reduced: &[u32]) -> Vec<u32> {
        let mut out = vec![0; reduced.len()];
        for (t, &c) in self.coords.iter().enumerate() {
            out[c] = reduced[t];
        }
        out
    }
}

/// b-elimination by g_i = f_i − f_{i₀} on each class, then a change of basis
/// P on the class representatives bringing A to the form (I_r 0; * 0).
pub fn reduce(p: &FundamentalParams) -> Result<Reduction> {
    p.validate()?;
    let (m, n, k) = (p.m, p.n, p.k());
    // A as an N×k matrix
    let a: Matrix = (0..n).map(|t| (0..k).map(|q| p.a[q][t].clone()).collect()).collect();
    let (_, pivot_cols) = rref(&a);
    let (_, pivot_rows) = rref(&transpose(&a));
    let r = pivot_cols.len();
    let mut col_order = pivot_cols.clone();
    col_order.extend((0..k).filter(|c| !pivot_cols.contains(c)));
    let mut coords = pivot_rows.clone();
    coords.extend((0..n).filter(|t| !pivot_rows.contains(t)));
    let a1: Matrix = pivot_rows.iter().map(|&t| pivot_cols.iter().map(|&c| a[t][c].clone()).collect()).collect();
    let a1_inv = inverse(&a1).ok_or_else(|| Error::Invalid("singular pivot block".into()))?;
    // columns outside the pivots: A_c = A_pivots · Q_c with Q_c = A1⁻¹ (A_c restricted to pivot rows)
    let mut p2 = vec![vec![Q::zero(); k]; k];
    for s in 0..r {
        for t in 0..r {
            p2[s][t] = a1_inv[s][t].clone();
        }
    }
    for (extra, &c) in col_order[r..].iter().enumerate() {
        let col = r + extra;
        for s in 0..r {
            let qv = (0..r).fold(Q::zero(), |acc, t| acc + &a1_inv[s][t] * &a[pivot_rows[t]][c]);
            p2[s][col] = -qv;
        }
        p2[col][col] = Q::one();
    }
    // P = Π_cols · P2, indexed by original class order
    let mut pm = vec![vec![Q::zero(); k]; k];
    for (s, &c) in col_order.iter().enumerate() {
        pm[c] = p2[s].clone();
    }
    let reps: Vec<usize> = p.classes.iter().map(|c| c[0]).collect();
    let mut basis: Matrix = Vec::with_capacity(m);
    for col in 0..k {
        let mut row = vec![Q::zero(); m];
        for q in 0..k {
            row[reps[q]] += &pm[q][col];
        }
        basis.push(row);
    }
    let mut new_a: Vec<Vec<Q>> = Vec::with_capacity(k);
    for col in 0..k {
        let v: Vec<Q> = coords
            .iter()
            .map(|&t| (0..k).fold(Q::zero(), |acc, q| acc + &a[t][q] * &pm[q][col]))
            .collect();
        new_a.push(v);
    }
    let mut b_source = Vec::new();
    for &s in &p.i0 {
        let Part::Source(t) = p.part(s) else { unreachable!() };
        let mut row = vec![Q::zero(); m];
        row[s] = Q::one();
        basis.push(row);
        b_source.push((0..k).map(|col| (0..k).fold(Q::zero(), |acc, q| acc + &pm[q][col] * &p.b_source[t][q])).collect());
    }
    for (q, class) in p.classes.iter().enumerate() {
        for &u in &class[1..] {
            let mut row = vec![Q::zero(); m];
            row[u] = Q::one();
            row[class[0]] = -Q::one();
            basis.push(row);
            b_source.push((0..k).map(|col| &pm[q][col] * &p.b[q]).collect());
        }
    }
    let params = FundamentalParams::new(
        m,
        n,
        (k..m).collect(),
        (0..k).map(|q| vec![q]).collect(),
        new_a,
        vec![Q::zero(); k],
        b_source,
    )?;
    Ok(Reduction { params, rank: r, basis, coords, p: pm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::trees::DecId;

    /// (f_k(γ)*f_j(β))*f_i(α) − f_k(γ)*(f_j(β)*f_i(α)) symmetric in (j,β)↔(k,γ).
    fn prelie_brute(c: &Deg1Coeffs) -> bool {
        let degs = DegreeVector::all_nonzero(c.n, 2);
        for i in 0..c.m {
            for j in 0..c.m {
                for k in 0..c.m {
                    for al in &degs {
                        for be in &degs {
                            for ga in &degs {
                                let assoc = |j: usize, be: &DegreeVector, k: usize, _ga: &DegreeVector| {
                                    // (f_k*f_j)*f_i − f_k*(f_j*f_i), coefficient on f_i(α+β+γ)
                                    let left = c.lambda(j, k, be) * c.lambda(i, j, al);
                                    let right = c.lambda(i, j, al) * c.lambda(i, k, &al.add(be));
                                    left - right
                                };
                                if assoc(j, be, k, ga) != assoc(k, ga, j, be) {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn conditions_match_brute_force() {
        let samples = [
            Deg1Coeffs::faa_di_bruno(2),
            Deg1Coeffs::zero(2, 1),
            {
                let mut c = Deg1Coeffs::zero(2, 1);
                c.b[0][1] = q(1);
                c.b[0][0] = q(1);
                c
            },
            {
                let mut c = Deg1Coeffs::zero(2, 1);
                c.a[0][1] = vec![q(1)];
                c
            },
        ];
        for c in samples {
            assert_eq!(c.is_prelie(), prelie_brute(&c), "{c:?}");
        }
        assert!(Deg1Coeffs::faa_di_bruno(3).is_prelie());
    }

    #[test]
    fn fundamental_tables() {
        assert_eq!(FundamentalParams::faa_di_bruno(3).to_coeffs(), Deg1Coeffs::faa_di_bruno(3));
        let p = FundamentalParams::new(2, 1, vec![0, 1], vec![], vec![], vec![], vec![vec![], vec![]]).unwrap();
        assert_eq!(p.to_coeffs(), Deg1Coeffs::zero(2, 1));
        let p = FundamentalParams::new(
            3,
            1,
            vec![2],
            vec![vec![0, 1]],
            vec![vec![q(2)]],
            vec![q(-1)],
            vec![vec![q(3)]],
        )
        .unwrap();
        let c = p.to_coeffs();
        assert!(c.is_prelie() && prelie_brute(&c));
        assert!(FundamentalParams::new(2, 1, vec![0], vec![], vec![], vec![], vec![vec![]]).is_err());
    }

    #[test]
    fn poly_p_examples() {
        let f = FundamentalParams::faa_di_bruno(1);
        assert_eq!(f.poly_p(0, &[0, 0], &[1]), q(2));
        assert_eq!(f.poly_p(0, &[0], &[3]), q(4));
        let p = FundamentalParams::new(2, 1, vec![1], vec![vec![0]], vec![vec![q(1)]], vec![q(1)], vec![vec![q(5)]]).unwrap();
        assert_eq!(p.poly_p(0, &[1], &[1]), q(0));
        assert_eq!(p.poly_p(1, &[0], &[2]), q(7));
    }

    #[test]
    fn lambda_t_examples() {
        let f = FundamentalParams::faa_di_bruno(1);
        let set = decorations(1, 1, 3).unwrap();
        let d = set.id("0:1").unwrap();
        assert_eq!(f.lambda_t(&set, &Tree::leaf(d)).unwrap(), q(1));
        let ladder = Tree::new(d, vec![Tree::leaf(d)]);
        assert_eq!(f.lambda_t(&set, &ladder).unwrap(), q(2));
        let corolla = Tree::new(d, vec![Tree::leaf(d), Tree::leaf(d)]);
        assert_eq!(f.lambda_t(&set, &corolla).unwrap(), q(2));
        assert_eq!(f.mu_t(&set, &corolla).unwrap(), q(1));
        let _ = DecId(0);
    }

    #[test]
    fn faa_di_bruno_series() {
        let spec = emit_sdse(&FundamentalParams::faa_di_bruno(2), 3).unwrap();
        let s = spec.series_by_label("0:2.1").unwrap();
        let expect = MultiSeries::parse("(1+x1)^3*(1+x2)", 2, 0).unwrap();
        assert_eq!(s, &expect);
        let s = spec.series_by_label("1:1.0").unwrap();
        let expect = MultiSeries::parse("(1+x1)*(1+x2)", 2, 2).unwrap();
        assert_eq!(s, &expect);
        let trivial = FundamentalParams::new(1, 1, vec![0], vec![], vec![], vec![], vec![vec![]]).unwrap();
        let spec = emit_sdse(&trivial, 3).unwrap();
        assert!(spec.equations().all(|(_, f)| f == &MultiSeries::one(1, f.order())));
    }

    #[test]
    fn classify_faa_di_bruno() {
        let c = classify(&Deg1Coeffs::faa_di_bruno(2)).unwrap();
        assert_eq!(c.components.len(), 1);
        assert_eq!(c.components[0].params, FundamentalParams::faa_di_bruno(2));
        assert!(c.scalars.iter().all(|s| s == &q(1)));
    }

    #[test]
    fn classify_direct_sum() {
        let mut c = Deg1Coeffs::zero(2, 1);
        c.a[0][0] = vec![q(1)];
        c.b[0][0] = q(1);
        c.a[1][1] = vec![q(2)];
        c.b[1][1] = q(3);
        let cl = classify(&c).unwrap();
        assert_eq!(cl.components.len(), 2);
        assert_eq!(cl.to_coeffs(2, 1), c.rescale(&cl.scalars).unwrap());
        assert_eq!(cl.scalars[1], Q::new(1.into(), 3.into()));
    }

    #[test]
    fn classify_rejects_violations() {
        let mut c = Deg1Coeffs::zero(2, 1);
        c.a[0][1] = vec![q(1)];
        c.a[1][1] = vec![q(2)];
        assert!(classify(&c).is_err());
    }

    fn lie_iso(p: &FundamentalParams, red: &Reduction) -> bool {
        let g = p.to_coeffs();
        let h = red.params.to_coeffs();
        let degs = DegreeVector::all_nonzero(p.n, 2);
        let m = p.m;
        let expand = |v: &[Q]| -> Vec<Q> {
            let mut out = vec![Q::zero(); m];
            for (i, c) in v.iter().enumerate() {
                for (j, t) in red.basis[i].iter().enumerate() {
                    out[j] += c * t;
                }
            }
            out
        };
        for i in 0..m {
            for j in 0..m {
                for al in &degs {
                    for be in &degs {
                        let reduced = expand(&h.bracket(j, be, i, al));
                        let (ao, bo) = (red.input_degree(al), red.input_degree(be));
                        let mut orig = vec![Q::zero(); m];
                        for (jj, x) in red.basis[j].iter().enumerate() {
                            for (ii, y) in red.basis[i].iter().enumerate() {
                                if x.is_zero() || y.is_zero() {
                                    continue;
                                }
                                for (t, z) in g.bracket(jj, &bo, ii, &ao).iter().enumerate() {
                                    orig[t] += x * y * z;
                                }
                            }
                        }
                        if reduced != orig {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn reduce_faa_di_bruno() {
        let p = FundamentalParams::faa_di_bruno(2);
        let r = reduce(&p).unwrap();
        assert_eq!(r.rank, 2);
        assert!(r.params.b.iter().all(Zero::is_zero));
        assert_eq!(r.params.a, p.a);
        assert!(lie_iso(&p, &r));
    }

    #[test]
    fn reduce_rank_one() {
        let p = FundamentalParams::new(
            3,
            2,
            vec![2],
            vec![vec![0], vec![1]],
            vec![vec![q(0), q(2)], vec![q(0), q(4)]],
            vec![q(1), q(-1)],
            vec![vec![q(1), q(2)]],
        )
        .unwrap();
        let r = reduce(&p).unwrap();
        assert_eq!(r.rank, 1);
        assert_eq!(r.params.a[0], vec![q(1), q(0)]);
        assert_eq!(r.params.a[1], vec![q(0), q(0)]);
        assert!(lie_iso(&p, &r));
    }

    #[test]
    fn json_round_trips() {
        let p = FundamentalParams::new(3, 1, vec![2], vec![vec![0, 1]], vec![vec![q(2)]], vec![q(-1)], vec![vec![q(3)]]).unwrap();
        assert_eq!(FundamentalParams::from_json(&p.to_json()).unwrap(), p);
        let c = p.to_coeffs();
        assert_eq!(Deg1Coeffs::from_json(&c.to_json()).unwrap(), c);
    }
}
