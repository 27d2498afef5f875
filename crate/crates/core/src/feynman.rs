//! Theories of Feynman graphs described by their combinatorial data only:
//! incidence matrices, degree and loop formulas, graduations, and the
//! tree-level systems lifted from them.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::deg1::Deg1Coeffs;
use crate::error::{Error, Result};
use crate::linalg::{kernel, left_inverse, mat_mul, mat_vec, rank, Matrix};
use crate::rational::{fmt_q, q, qf, value_to_q, Q};
use crate::sdse::SdseSpec;
use crate::series::MultiSeries;
use crate::trees::{Decoration, DegreeVector};

#[derive(Clone, Debug, PartialEq)]
pub struct Theory {
    pub name: String,
    pub half_edges: Vec<String>,
    /// ι as a permutation of half-edge indices.
    pub involution: Vec<usize>,
    pub vertex_names: Vec<String>,
    /// Vertex types as sorted multisets of half-edge indices.
    pub vertices: Vec<Vec<usize>>,
}

impl Theory {
    pub fn new(
        name: impl Into<String>,
        half_edges: Vec<String>,
        involution: Vec<usize>,
        vertex_names: Vec<String>,
        mut vertices: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let h = half_edges.len();
        if involution.len() != h || involution.iter().enumerate().any(|(i, &j)| j >= h || involution[j] != i) {
            return Err(Error::Invalid("ι must be an involution of the half-edge types".into()));
        }
        if vertices.len() != vertex_names.len() {
            return Err(Error::Shape("one name per vertex type".into()));
        }
        for (v, name) in vertices.iter_mut().zip(&vertex_names) {
            if v.len() < 3 {
                return Err(Error::Invalid(format!("vertex type `{name}` has fewer than 3 half-edges")));
            }
            if v.iter().any(|&e| e >= h) {
                return Err(Error::Invalid(format!("vertex type `{name}` uses an unknown half-edge")));
            }
            v.sort_unstable();
        }
        Ok(Theory { name: name.into(), half_edges, involution, vertex_names, vertices })
    }

    /// Half-edges: electron e1, e2 and photon; one vertex.
    pub fn qed() -> Self {
        let he = ["e1", "e2", "photon"].map(String::from).to_vec();
        Theory::new("qed", he, vec![1, 0, 2], vec!["vertex".into()], vec![vec![0, 1, 2]]).expect("valid")
    }

    /// Half-edges: fermion f1, f2, ghost c1, c2, gluon g; four vertices.
    pub fn qcd() -> Self {
        let he = ["f1", "f2", "c1", "c2", "g"].map(String::from).to_vec();
        let names = ["fermion-gluon", "ghost-gluon", "gluon3", "gluon4"].map(String::from).to_vec();
        Theory::new(
            "qcd",
            he,
            vec![1, 0, 3, 2, 4],
            names,
            vec![vec![0, 1, 4], vec![2, 3, 4], vec![4, 4, 4], vec![4, 4, 4, 4]],
        )
        .expect("valid")
    }

    pub fn phi(n: usize) -> Result<Self> {
        Theory::new(format!("phi:{n}"), vec!["phi".into()], vec![0], vec![format!("phi{n}")], vec![vec![0; n]])
    }

    /// `qed`, `qcd` or `phi:n`.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "qed" => Ok(Self::qed()),
            "qcd" => Ok(Self::qcd()),
            _ => match name.strip_prefix("phi:").map(str::parse::<usize>) {
                Some(Ok(n)) => Self::phi(n),
                _ => Err(Error::UnknownLabel(format!("theory `{name}` (expected qed, qcd or phi:n)"))),
            },
        }
    }

    pub fn k(&self) -> usize {
        self.vertices.len()
    }

    /// Edges {t, ι(t)} in order of first half-edge.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.half_edges.len()).filter(|&t| t <= self.involution[t]).map(|t| (t, self.involution[t])).collect()
    }

    pub fn l(&self) -> usize {
        self.edges().len()
    }

    pub fn edge_names(&self) -> Vec<String> {
        self.edges()
            .into_iter()
            .map(|(a, b)| if a == b { self.half_edges[a].clone() } else { format!("{}-{}", self.half_edges[a], self.half_edges[b]) })
            .collect()
    }

    /// Names of the external structures: vertex types then edges.
    pub fn structure_names(&self) -> Vec<String> {
        self.vertex_names.iter().cloned().chain(self.edge_names()).collect()
    }

    /// (A_𝒯, A′_𝒯).
    pub fn incidence_matrices(&self) -> (Matrix, Matrix) {
        let a: Matrix = (0..self.half_edges.len())
            .map(|e| self.vertices.iter().map(|v| q(v.iter().filter(|&&x| x == e).count() as i64)).collect())
            .collect();
        let a2: Matrix = self
            .edges()
            .into_iter()
            .map(|(e1, e2)| {
                (0..self.k())
                    .map(|v| if e1 == e2 { &a[e1][v] / q(2) } else { (&a[e1][v] + &a[e2][v]) / q(2) })
                    .collect()
            })
            .collect();
        (a, a2)
    }

    /// C_ℓ = (1…1)A_𝒯/2 − (1…1).
    pub fn loop_graduation(&self) -> Matrix {
        vec![self.vertices.iter().map(|v| qf(v.len() as i64, 2) - q(1)).collect()]
    }

    /// The row of A′_𝒯 for one edge: deg_t(G) = e_t(G) + s_t(G).
    pub fn edge_graduation(&self, edge: usize) -> Result<Matrix> {
        let (_, a2) = self.incidence_matrices();
        a2.get(edge).map(|r| vec![r.clone()]).ok_or_else(|| Error::Invalid(format!("no edge {edge}")))
    }

    pub fn to_json(&self) -> Value {
        let pairs: Vec<Value> = self.edges().into_iter().map(|(a, b)| json!([self.half_edges[a], self.half_edges[b]])).collect();
        json!({
            "schema": 1,
            "name": self.name,
            "half_edges": self.half_edges,
            "involution": pairs,
            "vertices": self.vertices.iter().zip(&self.vertex_names).map(|(v, n)| json!({
                "name": n,
                "half_edges": v.iter().map(|&e| self.half_edges[e].clone()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let strs = |x: &Value, what: &str| -> Result<Vec<String>> {
            x.as_array()
                .ok_or_else(|| Error::Invalid(format!("`{what}` must be an array")))?
                .iter()
                .map(|s| s.as_str().map(String::from).ok_or_else(|| Error::Invalid(format!("`{what}` must hold strings"))))
                .collect()
        };
        let he = strs(v.get("half_edges").unwrap_or(&Value::Null), "half_edges")?;
        let idx = |s: &str| he.iter().position(|h| h == s).ok_or_else(|| Error::UnknownLabel(s.to_string()));
        let mut inv: Vec<Option<usize>> = vec![None; he.len()];
        for p in v.get("involution").and_then(Value::as_array).ok_or_else(|| Error::Invalid("missing `involution`".into()))? {
            let pair = strs(p, "involution")?;
            if pair.len() != 2 {
                return Err(Error::Invalid("involution entries are pairs".into()));
            }
            let (a, b) = (idx(&pair[0])?, idx(&pair[1])?);
            inv[a] = Some(b);
            inv[b] = Some(a);
        }
        let involution = inv
            .into_iter()
            .enumerate()
            .map(|(i, x)| x.ok_or_else(|| Error::Invalid(format!("half-edge `{}` has no partner", he[i]))))
            .collect::<Result<Vec<_>>>()?;
        let mut names = Vec::new();
        let mut verts = Vec::new();
        for (n, x) in v.get("vertices").and_then(Value::as_array).ok_or_else(|| Error::Invalid("missing `vertices`".into()))?.iter().enumerate() {
            let (name, list) = match x {
                Value::Array(_) => (format!("v{}", n + 1), strs(x, "vertices")?),
                _ => (
                    x.get("name").and_then(Value::as_str).map(String::from).unwrap_or(format!("v{}", n + 1)),
                    strs(x.get("half_edges").unwrap_or(&Value::Null), "vertices.half_edges")?,
                ),
            };
            names.push(name);
            verts.push(list.iter().map(|s| idx(s)).collect::<Result<Vec<_>>>()?);
        }
        let name = v.get("name").and_then(Value::as_str).unwrap_or("custom").to_string();
        Theory::new(name, he, involution, names, verts)
    }
}

/// Combinatorial data of a Feynman graph: V_G over vertex types and S_G over
/// vertex types followed by edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphData {
    pub v: Vec<u32>,
    pub s: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphStats {
    /// E_G: half-edges per half-edge type.
    pub half_edges: Vec<Q>,
    /// E′_G: internal edges per edge type.
    pub internal_edges: Vec<Q>,
    pub external: Q,
    pub loops: Q,
}

fn qv(v: &[u32]) -> Vec<Q> {
    v.iter().map(|&x| q(x as i64)).collect()
}

fn check_graph(t: &Theory, g: &GraphData) -> Result<()> {
    if g.v.len() != t.k() || g.s.len() != t.k() + t.l() {
        return Err(Error::Shape(format!("V_G needs {} entries and S_G {}", t.k(), t.k() + t.l())));
    }
    Ok(())
}

pub fn graph_stats(t: &Theory, g: &GraphData) -> Result<GraphStats> {
    check_graph(t, g)?;
    let (a, a2) = t.incidence_matrices();
    let (k, l) = (t.k(), t.l());
    let v = qv(&g.v);
    let s = qv(&g.s);
    let half_edges = mat_vec(&a, &v);
    let mut internal_edges = mat_vec(&a2, &v);
    for (e, x) in internal_edges.iter_mut().enumerate() {
        *x -= mat_vec(&a2, &s[..k])[e].clone() + &s[k + e];
    }
    let external: Q = (0..k).map(|t2| q(t.vertices[t2].len() as i64) * &s[t2]).sum::<Q>()
        + (0..l).map(|e| q(2) * &s[k + e]).sum::<Q>();
    let loops: Q = (0..k).map(|t2| (qf(t.vertices[t2].len() as i64, 2) - q(1)) * (&v[t2] - &s[t2])).sum();
    if internal_edges.iter().any(Signed::is_negative) || loops.is_negative() {
        return Err(Error::Invalid("inconsistent graph data: negative edge or loop count".into()));
    }
    Ok(GraphStats { half_edges, internal_edges, external, loops })
}

/// deg(G) = C V_G − (C 0) S_G as rationals.
pub fn graduation_q(t: &Theory, c: &Matrix, g: &GraphData) -> Result<Vec<Q>> {
    check_graph(t, g)?;
    if c.iter().any(|r| r.len() != t.k()) {
        return Err(Error::Shape(format!("C must have {} columns", t.k())));
    }
    let diff: Vec<Q> = (0..t.k()).map(|i| q(g.v[i] as i64) - q(g.s[i] as i64)).collect();
    Ok(mat_vec(c, &diff))
}

/// The degree in ℕᴺ; non-integral or negative entries are rejected.
pub fn graduation(t: &Theory, c: &Matrix, g: &GraphData) -> Result<DegreeVector> {
    let d = graduation_q(t, c, g)?;
    let mut out = Vec::with_capacity(d.len());
    for x in &d {
        if !x.is_integer() || x.is_negative() {
            return Err(Error::Grading(format!("degree entry {} is not a nonnegative integer", fmt_q(x))));
        }
        out.push(u32::try_from(x.to_integer()).map_err(|_| Error::Grading("degree overflow".into()))?);
    }
    Ok(DegreeVector(out))
}

/// A primitive graph: its external structure (vertex types, then edges, then
/// any extra structures) and vertex counts.
#[derive(Clone, Debug, PartialEq)]
pub struct Primitive {
    pub label: String,
    pub structure: usize,
    pub v: Vec<u32>,
}

/// External structure beyond vertices and edges: a multiset of half-edge types.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtraStructure {
    pub name: String,
    pub half_edges: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PrimitiveInventory {
    pub primitives: Vec<Primitive>,
    pub extra: Vec<ExtraStructure>,
}

impl PrimitiveInventory {
    pub fn from_json(t: &Theory, v: &Value) -> Result<Self> {
        let names = t.structure_names();
        let mut extra = Vec::new();
        if let Some(xs) = v.get("extra").and_then(Value::as_array) {
            for x in xs {
                let name = x.get("name").and_then(Value::as_str).ok_or_else(|| Error::Invalid("extra structure needs a name".into()))?;
                let hes = x
                    .get("half_edges")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Invalid("extra structure needs half_edges".into()))?
                    .iter()
                    .map(|h| {
                        let s = h.as_str().unwrap_or_default();
                        t.half_edges.iter().position(|x| x == s).ok_or_else(|| Error::UnknownLabel(s.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                extra.push(ExtraStructure { name: name.to_string(), half_edges: hes });
            }
        }
        let mut primitives = Vec::new();
        for p in v.get("primitives").and_then(Value::as_array).ok_or_else(|| Error::Invalid("missing `primitives`".into()))? {
            let label = p.get("label").and_then(Value::as_str).ok_or_else(|| Error::Invalid("primitive needs a label".into()))?;
            let structure = match p.get("structure") {
                Some(Value::String(s)) => names
                    .iter()
                    .chain(extra.iter().map(|e| &e.name))
                    .position(|n| n == s)
                    .ok_or_else(|| Error::UnknownLabel(s.clone()))?,
                Some(Value::Number(n)) => n.as_u64().unwrap_or(u64::MAX) as usize,
                _ => return Err(Error::Invalid(format!("primitive `{label}` needs a structure"))),
            };
            let vv = p
                .get("V")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Invalid(format!("primitive `{label}` needs V")))?
                .iter()
                .map(|x| x.as_u64().map(|u| u as u32).ok_or_else(|| Error::Invalid("V holds counts".into())))
                .collect::<Result<Vec<_>>>()?;
            primitives.push(Primitive { label: label.to_string(), structure, v: vv });
        }
        Ok(PrimitiveInventory { primitives, extra })
    }
}

fn structure_slot(t: &Theory, structure: usize) -> Vec<u32> {
    let mut s = vec![0; t.k() + t.l()];
    if structure < s.len() {
        s[structure] = 1;
    }
    s
}

/// λ^{(i)}_j: half-edges of edge type j in an extra structure, halved.
fn extra_weights(t: &Theory, x: &ExtraStructure) -> Vec<Q> {
    t.edges()
        .into_iter()
        .map(|(a, b)| {
            let n = x.half_edges.iter().filter(|&&h| h == a || h == b).count();
            qf(n as i64, 2)
        })
        .collect()
}

/// Vertex and internal-edge exponents (v_j(G), e_j(G)) of a primitive.
fn primitive_counts(t: &Theory, inv: &PrimitiveInventory, p: &Primitive) -> Result<(Vec<Q>, Vec<Q>)> {
    let (k, l) = (t.k(), t.l());
    if p.v.len() != k {
        return Err(Error::Shape(format!("primitive `{}` needs {k} vertex counts", p.label)));
    }
    if p.structure < k + l {
        let st = graph_stats(t, &GraphData { v: p.v.clone(), s: structure_slot(t, p.structure) })?;
        return Ok((qv(&p.v), st.internal_edges));
    }
    let x = inv
        .extra
        .get(p.structure - k - l)
        .ok_or_else(|| Error::Invalid(format!("primitive `{}` has an unknown structure", p.label)))?;
    let (_, a2) = t.incidence_matrices();
    let lam = extra_weights(t, x);
    let e: Vec<Q> = mat_vec(&a2, &qv(&p.v)).into_iter().zip(lam).map(|(a, b)| a - b).collect();
    Ok((qv(&p.v), e))
}

fn primitive_degree(t: &Theory, c: &Matrix, p: &Primitive) -> Result<DegreeVector> {
    graduation(t, c, &GraphData { v: p.v.clone(), s: structure_slot(t, p.structure) })
        .map_err(|e| Error::Grading(format!("primitive `{}`: {e}", p.label)))
}

/// The tree-level system with f_G = Π_{j≤k}(1+Y_j)^{v_j(G)} Π_{j>k}(1−Y_j)^{−e_j(G)},
/// for primitives of total degree ≤ `bound`.
pub fn emit_graph_sdse(t: &Theory, c: &Matrix, inv: &PrimitiveInventory, bound: u32) -> Result<SdseSpec> {
    let (k, l) = (t.k(), t.l());
    let m = k + l + inv.extra.len();
    let mut eqs = Vec::new();
    for p in &inv.primitives {
        if p.structure >= m {
            return Err(Error::Invalid(format!("primitive `{}` has structure index {} ≥ {m}", p.label, p.structure)));
        }
        let deg = primitive_degree(t, c, p)?;
        if deg.is_zero() {
            return Err(Error::Grading(format!("primitive `{}` has degree zero", p.label)));
        }
        if deg.total() > bound {
            continue;
        }
        let order = bound - deg.total();
        let (v, e) = primitive_counts(t, inv, p)?;
        let mut f = MultiSeries::one(m, order);
        for (j, x) in v.iter().enumerate() {
            let base = MultiSeries::one(m, order).add(&MultiSeries::var(m, order, j));
            f = f.mul(&base.pow(x)?);
        }
        for (j, x) in e.iter().enumerate() {
            let base = MultiSeries::one(m, order).sub(&MultiSeries::var(m, order, k + j));
            f = f.mul(&base.pow(&-x.clone())?);
        }
        eqs.push((Decoration { label: p.label.clone(), block: p.structure, degree: deg }, f));
    }
    SdseSpec::new(c.len(), m, eqs)
}

/// The lifted system for rank(C) = |𝒱|, with the deg1 coefficients it realizes:
/// A rows C′ then A′_𝒯C′ (then A′_𝒯C′ for extra structures), b = δ on vertex
/// blocks, −δ on edge blocks, −λ^{(i)} on extra structures.
pub fn emit_lifted_sdse(t: &Theory, c: &Matrix, inv: &PrimitiveInventory, bound: u32) -> Result<(SdseSpec, Deg1Coeffs)> {
    let (k, l) = (t.k(), t.l());
    let r = rank(c);
    if r != k {
        return Err(Error::Rank { rank: r, expected: k });
    }
    let cp = left_inverse(c).ok_or(Error::Rank { rank: r, expected: k })?;
    let spec = emit_graph_sdse(t, c, inv, bound)?;
    let (_, a2) = t.incidence_matrices();
    let a2cp = mat_mul(&a2, &cp);
    let m = k + l + inv.extra.len();
    let n = c.len();
    let mut coeffs = Deg1Coeffs::zero(m, n);
    for i in 0..m {
        for j in 0..k + l {
            coeffs.a[i][j] = if j < k { cp[j].clone() } else { a2cp[j - k].clone() };
        }
        if i < k {
            coeffs.b[i][i] = Q::one();
        } else if i < k + l {
            coeffs.b[i][i] = -Q::one();
        } else {
            let lam = extra_weights(t, &inv.extra[i - k - l]);
            for (j, x) in lam.into_iter().enumerate() {
                coeffs.b[i][k + j] = -x;
            }
        }
    }
    Ok((spec, coeffs))
}

/// A′′ of the reduced form when C is invertible: A′_𝒯 (up to the sign
/// convention of the lifted edge blocks).
pub fn reduced_edge_matrix(t: &Theory) -> Matrix {
    t.incidence_matrices().1
}

/// w = Σ a_i g_i ≠ w′ = Σ a′_i g_i with C w = C w′.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankWitness {
    pub coeffs: Vec<i64>,
    pub coeffs_prime: Vec<i64>,
    pub w: Vec<i64>,
    pub w_prime: Vec<i64>,
}

/// The generator vectors of the vertex-count increments used for QCD.
pub fn qcd_generators() -> Vec<Vec<i64>> {
    vec![vec![2, 0, 0, 0], vec![2, 2, 0, 0], vec![3, 0, 1, 0], vec![4, 0, 0, 1]]
}

/// Searches integer c ∈ [−cap, cap]ⁿ by increasing max-norm with C G c = 0 and
/// G c ≠ 0, splitting c into positive and negative parts.
pub fn rank_witness(c: &Matrix, generators: &[Vec<i64>], cap: i64) -> Result<Option<RankWitness>> {
    let n = generators.len();
    let dim = c.first().map_or(0, |r| r.len());
    if generators.iter().any(|g| g.len() != dim) {
        return Err(Error::Shape(format!("generators need {dim} entries")));
    }
    let g: Matrix = (0..dim).map(|r| generators.iter().map(|v| q(v[r])).collect()).collect();
    let cg = mat_mul(c, &g);
    if kernel(&cg, n).is_empty() {
        return Ok(None);
    }
    let apply = |coef: &[i64]| -> Vec<i64> { (0..dim).map(|r| (0..n).map(|i| generators[i][r] * coef[i]).sum()).collect() };
    for norm in 1..=cap {
        let mut v = vec![-norm; n];
        loop {
            if v.iter().any(|x| x.abs() == norm) {
                let cv: Vec<Q> = v.iter().map(|&x| q(x)).collect();
                if mat_vec(&cg, &cv).iter().all(Zero::is_zero) && apply(&v).iter().any(|&x| x != 0) {
                    // orient so the first nonzero coefficient is positive
                    if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                        v.iter_mut().for_each(|x| *x = -*x);
                    }
                    let pos: Vec<i64> = v.iter().map(|&x| x.max(0)).collect();
                    let neg: Vec<i64> = v.iter().map(|&x| (-x).max(0)).collect();
                    return Ok(Some(RankWitness { w: apply(&pos), w_prime: apply(&neg), coeffs: pos, coeffs_prime: neg }));
                }
            }
            let mut i = n;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if v[i] < norm {
                    v[i] += 1;
                    for x in v.iter_mut().skip(i + 1) {
                        *x = -norm;
                    }
                    i = usize::MAX;
                    break;
                }
            }
            if i != usize::MAX {
                break;
            }
        }
    }
    Ok(None)
}

/// A small system showing the failure behind a rank witness: two primitives of
/// the same external structure `block` whose vertex counts are w and w′ plus
/// the structure's own vertex, both put at degree 1, with their graph-form
/// series; each vertex block used by w or w′ gets an auxiliary degree-1
/// decoration with series 1 so that the two series differ on nonzero inputs.
pub fn rank_shadow_spec(t: &Theory, witness: &RankWitness, block: usize, bound: u32) -> Result<SdseSpec> {
    let (k, l) = (t.k(), t.l());
    if block >= k {
        return Err(Error::Precondition("the shadow uses a vertex structure".into()));
    }
    let m = k + l;
    let mut eqs = Vec::new();
    for (label, w) in [("w", &witness.w), ("w'", &witness.w_prime)] {
        let mut v: Vec<u32> = w.iter().map(|&x| x as u32).collect();
        v[block] += 1;
        let p = Primitive { label: label.into(), structure: block, v };
        let (vv, e) = primitive_counts(t, &PrimitiveInventory::default(), &p)?;
        let order = bound - 1;
        let mut f = MultiSeries::one(m, order);
        for (j, x) in vv.iter().enumerate() {
            f = f.mul(&MultiSeries::one(m, order).add(&MultiSeries::var(m, order, j)).pow(x)?);
        }
        for (j, x) in e.iter().enumerate() {
            f = f.mul(&MultiSeries::one(m, order).sub(&MultiSeries::var(m, order, k + j)).pow(&-x.clone())?);
        }
        eqs.push((Decoration::new(label, block, vec![1]), f));
    }
    for j in 0..k {
        if j != block && (witness.w[j] != 0 || witness.w_prime[j] != 0) {
            eqs.push((Decoration::new(format!("aux{j}"), j, vec![1]), MultiSeries::one(m, bound - 1)));
        }
    }
    SdseSpec::new(1, m, eqs)
}

pub fn matrix_json(m: &Matrix) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(|x| Value::String(fmt_q(x))).collect())).collect())
}

pub fn matrix_from_json(v: &Value) -> Result<Matrix> {
    let rows = v.as_array().ok_or_else(|| Error::Invalid("matrix must be an array of rows".into()))?;
    let m = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Invalid("matrix rows must be arrays".into()))?
                .iter()
                .map(value_to_q)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Matrix>>()?;
    if m.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(Error::Shape("ragged matrix".into()));
    }
    Ok(m)
}
