//! Oriented graphs with coloured edges, their weighted reachability, the Hopf
//! condition on it, and the systems they define.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::sdse::SdseSpec;
use crate::series::MultiSeries;
use crate::trees::{Decoration, DegreeVector};

/// Colours are 0-based: an edge (s, t, c) has colour c < `colours`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColouredGraph {
    pub colours: usize,
    pub vertices: Vec<String>,
    pub edges: BTreeSet<(usize, usize, usize)>,
}

/// i →^α j: a nonempty oriented path from i to j with α_c edges of colour c.
#[derive(Clone, Debug)]
pub struct Reachability {
    bound: u32,
    /// For each source, the (target, weight) pairs with 0 < |weight| ≤ bound.
    table: Vec<BTreeSet<(usize, DegreeVector)>>,
}

impl Reachability {
    pub fn new(g: &ColouredGraph, bound: u32) -> Self {
        let mut out_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.vertices.len()];
        for &(s, t, c) in &g.edges {
            out_edges[s].push((t, c));
        }
        let table = (0..g.vertices.len())
            .map(|src| {
                let mut seen = BTreeSet::new();
                let mut frontier: BTreeSet<(usize, DegreeVector)> = BTreeSet::new();
                frontier.insert((src, DegreeVector::zero(g.colours)));
                for _ in 0..bound {
                    let mut next = BTreeSet::new();
                    for (v, w) in &frontier {
                        for &(t, c) in &out_edges[*v] {
                            next.insert((t, w.add(&DegreeVector::unit(g.colours, c))));
                        }
                    }
                    seen.extend(next.iter().cloned());
                    frontier = next;
                }
                seen
            })
            .collect();
        Reachability { bound, table }
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn reach(&self, i: usize, j: usize, alpha: &DegreeVector) -> bool {
        self.table.get(i).is_some_and(|s| s.contains(&(j, alpha.clone())))
    }

    /// I_{i,α} = {j : i →^α j}.
    pub fn targets(&self, i: usize, alpha: &DegreeVector) -> Vec<usize> {
        self.table[i].iter().filter(|(_, w)| w == alpha).map(|(j, _)| *j).collect()
    }
}

/// One-off query; builds the table up to |α|.
pub fn reach(g: &ColouredGraph, i: usize, j: usize, alpha: &DegreeVector) -> bool {
    !alpha.is_zero() && Reachability::new(g, alpha.total()).reach(i, j, alpha)
}

/// (i, j, k, α, β) with i →^α j where j →^β k and i →^{α+β} k disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub alpha: DegreeVector,
    pub beta: DegreeVector,
}

impl ColouredGraph {
    pub fn new(colours: usize, vertices: Vec<String>, edges: impl IntoIterator<Item = (usize, usize, usize)>) -> Result<Self> {
        let edges: BTreeSet<_> = edges.into_iter().collect();
        let n = vertices.len();
        if let Some(e) = edges.iter().find(|&&(s, t, c)| s >= n || t >= n || c >= colours) {
            return Err(Error::Invalid(format!("edge {e:?} out of range")));
        }
        if vertices.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(Error::Invalid("duplicate vertex names".into()));
        }
        Ok(ColouredGraph { colours, vertices, edges })
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.vertices.iter().position(|v| v == name).ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    /// The four-vertex two-colour example: TL→BL and TL→BR of colour 0,
    /// TR→BR of colour 1.
    pub fn four_vertex_example() -> Self {
        let v = ["TL", "TR", "BL", "BR"].map(String::from).to_vec();
        ColouredGraph::new(2, v, [(0, 2, 0), (0, 3, 0), (1, 3, 1)]).expect("valid")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": 1,
            "colours": self.colours,
            "vertices": self.vertices,
            "edges": self.edges.iter().map(|&(s, t, c)| json!([self.vertices[s], self.vertices[t], c])).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let vertices: Vec<String> = v
            .get("vertices")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Invalid("missing `vertices`".into()))?
            .iter()
            .map(|x| match x {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                _ => Err(Error::Invalid("vertices are strings".into())),
            })
            .collect::<Result<_>>()?;
        let idx = |x: &Value| -> Result<usize> {
            let s = match x {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                _ => return Err(Error::Invalid("edge endpoints are vertex names".into())),
            };
            vertices.iter().position(|v| *v == s).ok_or(Error::UnknownLabel(s))
        };
        let mut edges = Vec::new();
        for e in v.get("edges").and_then(Value::as_array).ok_or_else(|| Error::Invalid("missing `edges`".into()))? {
            let parts = e.as_array().filter(|a| a.len() == 3).ok_or_else(|| Error::Invalid("edges are [src, dst, colour]".into()))?;
            let c = parts[2].as_u64().ok_or_else(|| Error::Invalid("edge colour must be a nonnegative integer".into()))? as usize;
            edges.push((idx(&parts[0])?, idx(&parts[1])?, c));
        }
        let colours = match v.get("colours").and_then(Value::as_u64) {
            Some(c) => c as usize,
            None => edges.iter().map(|e| e.2 + 1).max().unwrap_or(1),
        };
        ColouredGraph::new(colours, vertices, edges)
    }
}

/// Checks (i →^α j and j →^β k) ⟺ (i →^α j and i →^{α+β} k) for
/// |α| + |β| ≤ `bound`; only the reverse implication can fail.
pub fn is_hopf_graph(g: &ColouredGraph, bound: u32) -> (bool, Option<Counterexample>) {
    let r = Reachability::new(g, bound);
    let n = g.vertices.len();
    for i in 0..n {
        for (j, alpha) in r.table[i].iter() {
            for beta in DegreeVector::all_nonzero(g.colours, bound - alpha.total()) {
                let ab = alpha.add(&beta);
                for k in 0..n {
                    if r.reach(*j, k, &beta) != r.reach(i, k, &ab) {
                        return (false, Some(Counterexample { i, j: *j, k, alpha: alpha.clone(), beta }));
                    }
                }
            }
        }
    }
    (true, None)
}

/// The functional graph of f_0, …, f_{N−1} on {0, …, n−1}, and the first
/// non-commuting pair (p, q, v) with f_p f_q(v) ≠ f_q f_p(v), if any.
pub fn from_endofunctions(n: usize, maps: &[Vec<usize>]) -> Result<(ColouredGraph, Option<(usize, usize, usize)>)> {
    if maps.iter().any(|f| f.len() != n || f.iter().any(|&x| x >= n)) {
        return Err(Error::Invalid(format!("each map must send {{0..{n}}} into itself")));
    }
    let edges = maps.iter().enumerate().flat_map(|(c, f)| f.iter().enumerate().map(move |(v, &t)| (v, t, c)));
    let g = ColouredGraph::new(maps.len(), (0..n).map(|v| v.to_string()).collect(), edges)?;
    for p in 0..maps.len() {
        for q2 in p + 1..maps.len() {
            if let Some(v) = (0..n).find(|&v| maps[p][maps[q2][v]] != maps[q2][maps[p][v]]) {
                return Ok((g, Some((p, q2, v))));
            }
        }
    }
    Ok((g, None))
}

/// Decoration label of (i, α).
pub fn coloured_label(g: &ColouredGraph, i: usize, alpha: &DegreeVector) -> String {
    let a: Vec<String> = alpha.0.iter().map(u32::to_string).collect();
    format!("{}:{}", g.vertices[i], a.join("."))
}

/// X_i = Σ_{0<|α|≤B} B_{i,α}(1 + Σ_{i →^α j} X_j), one block per vertex.
/// Refused for graphs failing the Hopf condition unless `force`.
pub fn emit_coloured_sdse(g: &ColouredGraph, bound: u32, force: bool) -> Result<SdseSpec> {
    if !force {
        if let (false, Some(c)) = is_hopf_graph(g, bound) {
            return Err(Error::Precondition(format!(
                "graph is not Hopf: {} →^{:?} {} but {} →^{:?} {} and {} →^{:?} {} disagree",
                g.vertices[c.i], c.alpha.0, g.vertices[c.j], g.vertices[c.j], c.beta.0, g.vertices[c.k],
                g.vertices[c.i], c.alpha.add(&c.beta).0, g.vertices[c.k]
            )));
        }
    }
    let r = Reachability::new(g, bound);
    let m = g.vertices.len();
    let mut eqs = Vec::new();
    for i in 0..m {
        for alpha in DegreeVector::all_nonzero(g.colours, bound) {
            let order = bound - alpha.total();
            let f = MultiSeries::one(m, order).add(&MultiSeries::var_sum(m, order, &r.targets(i, &alpha)));
            eqs.push((Decoration { label: coloured_label(g, i, &alpha), block: i, degree: alpha }, f));
        }
    }
    SdseSpec::new(g.colours, m, eqs)
}

/// The reachability relation as λ_{i,j}(α,β) ∈ {0,1} (independent of β).
pub fn expected_lambda(g: &ColouredGraph, bound: u32) -> BTreeMap<(usize, usize, DegreeVector), bool> {
    let r = Reachability::new(g, bound);
    let mut out = BTreeMap::new();
    for i in 0..g.vertices.len() {
        for j in 0..g.vertices.len() {
            for a in DegreeVector::all_nonzero(g.colours, bound) {
                out.insert((i, j, a.clone()), r.reach(i, j, &a));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf_check::{check_hopf, HopfStatus};
    use crate::sdse::solve;
    use num_traits::{One, Zero};

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    /// Independent oracle: enumerate all paths up to `len` edges.
    fn paths_reach(g: &ColouredGraph, i: usize, j: usize, alpha: &DegreeVector) -> bool {
        fn go(g: &ColouredGraph, v: usize, j: usize, left: &mut Vec<u32>, used: u32) -> bool {
            if left.iter().all(|&x| x == 0) {
                return used > 0 && v == j;
            }
            for &(s, t, c) in &g.edges {
                if s == v && left[c] > 0 {
                    left[c] -= 1;
                    let hit = go(g, t, j, left, used + 1);
                    left[c] += 1;
                    if hit {
                        return true;
                    }
                }
            }
            false
        }
        go(g, i, j, &mut alpha.0.clone(), 0)
    }

    #[test]
    fn reach_basics() {
        let cyc = ColouredGraph::new(1, names(2), [(0, 1, 0), (1, 0, 0)]).unwrap();
        assert!(reach(&cyc, 0, 0, &DegreeVector(vec![2])));
        assert!(!reach(&cyc, 0, 0, &DegreeVector(vec![1])));
        assert!(reach(&cyc, 0, 1, &DegreeVector(vec![1])));
        let disc = ColouredGraph::new(1, names(2), []).unwrap();
        assert!(!reach(&disc, 0, 1, &DegreeVector(vec![1])));
        let g = ColouredGraph::four_vertex_example();
        let r = Reachability::new(&g, 4);
        for i in 0..4 {
            for j in 0..4 {
                for a in DegreeVector::all_nonzero(2, 4) {
                    assert_eq!(r.reach(i, j, &a), paths_reach(&g, i, j, &a));
                }
            }
        }
    }

    #[test]
    fn hopf_condition_examples() {
        assert!(is_hopf_graph(&ColouredGraph::four_vertex_example(), 6).0);
        let loop1 = ColouredGraph::new(1, names(1), [(0, 0, 0)]).unwrap();
        assert!(is_hopf_graph(&loop1, 6).0);
        let chain = ColouredGraph::new(1, names(3), [(0, 1, 0), (1, 2, 0)]).unwrap();
        assert!(is_hopf_graph(&chain, 6).0);
        let branch = ColouredGraph::new(1, names(4), [(0, 1, 0), (0, 2, 0), (1, 3, 0)]).unwrap();
        let (ok, c) = is_hopf_graph(&branch, 4);
        assert!(!ok);
        let c = c.unwrap();
        assert!(reach(&branch, c.i, c.j, &c.alpha));
        assert_ne!(reach(&branch, c.j, c.k, &c.beta), reach(&branch, c.i, c.k, &c.alpha.add(&c.beta)));
    }

    #[test]
    fn endofunctions() {
        let rot = |s: usize| (0..6).map(|v| (v + s) % 6).collect::<Vec<_>>();
        let (g, nc) = from_endofunctions(6, &[rot(1), rot(2)]).unwrap();
        assert!(nc.is_none() && is_hopf_graph(&g, 4).0);
        let (g, nc) = from_endofunctions(3, &[vec![1, 0, 2], vec![0, 2, 1]]).unwrap();
        assert!(nc.is_some() && !is_hopf_graph(&g, 4).0);
    }

    #[test]
    fn ladder_and_cyclic_systems() {
        let loop1 = ColouredGraph::new(1, names(1), [(0, 0, 0)]).unwrap();
        let spec = emit_coloured_sdse(&loop1, 3, false).unwrap();
        for (_, f) in spec.equations() {
            assert_eq!(f.truncate(0), MultiSeries::parse("1+x1", 1, 0).unwrap().truncate(0));
            assert_eq!(f.coeff(&[1]), if f.order() >= 1 { One::one() } else { Zero::zero() });
        }
        let (z2, _) = from_endofunctions(2, &[vec![1, 0]]).unwrap();
        let spec = emit_coloured_sdse(&z2, 3, false).unwrap();
        // I_{i,(n)} = {i + n mod 2}
        let f = spec.series_by_label("0:1").unwrap();
        assert_eq!(f, &MultiSeries::parse("1+x2", 2, 2).unwrap());
        let f = spec.series_by_label("0:2").unwrap();
        assert_eq!(f, &MultiSeries::parse("1+x1", 2, 1).unwrap());
    }

    #[test]
    fn four_vertex_system_is_hopf_with_reachability_lambda() {
        let g = ColouredGraph::four_vertex_example();
        let spec = emit_coloured_sdse(&g, 4, false).unwrap();
        let sol = solve(&spec, 4).unwrap();
        let v = check_hopf(&sol, 4).unwrap();
        assert!(v.is_hopf(), "{:?}", v.status);
        let expect = expected_lambda(&g, 4);
        let lam = v.lambda.as_ref().unwrap();
        assert!(!lam.is_empty());
        for ((i, j, a, _b), x) in lam.iter() {
            let want = expect[&(*i, *j, a.clone())];
            assert_eq!(*x, if want { One::one() } else { Zero::zero() }, "λ({i},{j},{a:?})");
        }
    }

    #[test]
    fn forced_non_hopf_graph_fails_check() {
        let branch = ColouredGraph::new(1, names(4), [(0, 1, 0), (0, 2, 0), (1, 3, 0)]).unwrap();
        assert!(emit_coloured_sdse(&branch, 3, false).is_err());
        let spec = emit_coloured_sdse(&branch, 3, true).unwrap();
        let v = check_hopf(&solve(&spec, 3).unwrap(), 3).unwrap();
        assert_eq!(v.status, HopfStatus::NotHopf);
    }

    #[test]
    fn json_round_trip() {
        let g = ColouredGraph::four_vertex_example();
        assert_eq!(ColouredGraph::from_json(&g.to_json()).unwrap(), g);
    }
}
