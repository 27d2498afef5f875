//! The groups 𝐆_ℬ of tuples F = (F_1, …, F_p), F_i ∈ x_i(1 + 𝕂[[x, y]]_+), with
//! F∙G = G(F, y(F/x)^ℬ), their actions on series, and the structure
//! constants of the dual pre-Lie algebra.
//!
//! Note the order: F∙G evaluates G on data built from F.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::Q;
use crate::series::MultiSeries;

/// An element of 𝐆_ℬ truncated at total degree `order`. Variables are
/// x_1..x_p followed by y_1..y_q.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffeoElement {
    p: usize,
    q: usize,
    b: Matrix,
    comps: Vec<MultiSeries>,
    order: u32,
}

impl DiffeoElement {
    pub fn identity(p: usize, b: Matrix, order: u32) -> Result<Self> {
        let q = b.len();
        let comps = (0..p).map(|i| MultiSeries::var(p + q, order, i)).collect();
        Self::new(p, b, comps)
    }

    pub fn new(p: usize, b: Matrix, comps: Vec<MultiSeries>) -> Result<Self> {
        if p == 0 {
            return Err(Error::Shape("p must be at least 1".into()));
        }
        let q = b.len();
        if b.iter().any(|r| r.len() != p) {
            return Err(Error::Shape(format!("ℬ must be {q}×{p}")));
        }
        if comps.len() != p {
            return Err(Error::Shape(format!("{} components for p = {p}", comps.len())));
        }
        let order = comps[0].order();
        for (i, f) in comps.iter().enumerate() {
            if f.nvars() != p + q || f.order() != order {
                return Err(Error::Shape(format!("component {i} must be a series in {} variables at order {order}", p + q)));
            }
            if !f.div_var(i).map(|g| g.constant_term().is_one()).unwrap_or(false) {
                return Err(Error::Invalid(format!("component {i} is not of the form x{}(1 + …)", i + 1)));
            }
        }
        Ok(DiffeoElement { p, q, b, comps, order })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn components(&self) -> &[MultiSeries] {
        &self.comps
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.b != other.b || self.order != other.order {
            return Err(Error::Shape("elements of different groups or orders".into()));
        }
        Ok(())
    }

    /// F_i / x_i.
    fn ratios(&self) -> Vec<MultiSeries> {
        self.comps.iter().enumerate().map(|(i, f)| f.div_var(i).expect("validated form")).collect()
    }

    /// ψ_F = (F, y(F/x)^ℬ), the substitution every product and action uses.
    pub fn substitution(&self) -> Vec<MultiSeries> {
        let ratios = self.ratios();
        let mut out = self.comps.clone();
        for j in 0..self.q {
            let mut prod = MultiSeries::one(self.p + self.q, self.order.saturating_sub(1));
            for (i, r) in ratios.iter().enumerate() {
                if !self.b[j][i].is_zero() {
                    prod = prod.mul(&r.pow(&self.b[j][i]).expect("constant term 1"));
                }
            }
            out.push(prod.mul_var(self.p + j));
        }
        out
    }

    /// F∙G = G(F, y(F/x)^ℬ).
    pub fn compose(&self, g: &DiffeoElement) -> Result<DiffeoElement> {
        self.same_shape(g)?;
        let psi = self.substitution();
        let comps = g.comps.iter().map(|c| c.substitute(&psi)).collect::<Result<Vec<_>>>()?;
        Ok(DiffeoElement { comps, ..self.clone() })
    }

    /// The inverse, from the inverse W of ψ_F by the fixed point W = id − (ψ_F − id)(W).
    pub fn invert(&self) -> DiffeoElement {
        let nv = self.p + self.q;
        let psi = self.substitution();
        let id: Vec<MultiSeries> = (0..nv).map(|i| MultiSeries::var(nv, self.order, i)).collect();
        let h: Vec<MultiSeries> = psi.iter().zip(&id).map(|(a, b)| a.sub(b)).collect();
        let mut w = id.clone();
        for _ in 0..self.order {
            w = id
                .iter()
                .zip(&h)
                .map(|(x, hi)| x.sub(&hi.substitute(&w).expect("no constant terms")))
                .collect();
        }
        w.truncate(self.p);
        DiffeoElement { comps: w, ..self.clone() }
    }

    /// F↪P = P(F, y(F/x)^ℬ).
    pub fn act(&self, p: &MultiSeries) -> Result<MultiSeries> {
        if p.nvars() != self.p + self.q {
            return Err(Error::Shape(format!("series must have {} variables", self.p + self.q)));
        }
        if !p.constant_term().is_zero() {
            return Err(Error::ConstantTerm("acted-on series must have no constant term".into()));
        }
        p.substitute(&self.substitution())
    }
}

/// Twist data (a ∈ ℚʳ, b ∈ ℚᵖ) for the action on V_{a,b}.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Twist {
    pub a: Vec<Q>,
    pub b: Vec<Q>,
}

/// An element (P_1, …, P_r, F) of V_0^r ⋊ 𝐆_ℬ.
#[derive(Clone, Debug, PartialEq)]
pub struct SemidirectElement {
    pub ps: Vec<MultiSeries>,
    pub f: DiffeoElement,
}

impl SemidirectElement {
    pub fn new(ps: Vec<MultiSeries>, f: DiffeoElement) -> Result<Self> {
        for p in &ps {
            if p.nvars() != f.p + f.q || !p.constant_term().is_zero() {
                return Err(Error::Invalid("translation parts must be series without constant term".into()));
            }
        }
        Ok(SemidirectElement { ps, f })
    }

    /// (P, F)∙(Q, G) = (P + F↪Q, F∙G).
    pub fn compose(&self, other: &SemidirectElement) -> Result<SemidirectElement> {
        if self.ps.len() != other.ps.len() {
            return Err(Error::Shape("different numbers of translation parts".into()));
        }
        let ps = self
            .ps
            .iter()
            .zip(&other.ps)
            .map(|(p, q)| Ok(p.add(&self.f.act(q)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SemidirectElement { ps, f: self.f.compose(&other.f)? })
    }

    /// (P, F)↪Q = Q(F, y(F/x)^ℬ) e^{Σ a_k P_k} Π (F_i/x_i)^{b_i}.
    pub fn act(&self, q: &MultiSeries, twist: &Twist) -> Result<MultiSeries> {
        if twist.a.len() != self.ps.len() || twist.b.len() != self.f.p {
            return Err(Error::Shape(format!("twist needs {} values a and {} values b", self.ps.len(), self.f.p)));
        }
        let mut out = self.f.act(q)?;
        let nv = self.f.p + self.f.q;
        let mut expo = MultiSeries::zero(nv, self.f.order);
        for (a, p) in twist.a.iter().zip(&self.ps) {
            expo = expo.add(&p.scale(a));
        }
        out = out.mul(&expo.exp()?);
        for (b, r) in twist.b.iter().zip(self.f.ratios()) {
            if !b.is_zero() {
                out = out.mul(&r.pow(b)?.with_order(self.f.order));
            }
        }
        Ok(out)
    }
}

fn monomial(nv: usize, order: u32, e: Vec<u32>) -> MultiSeries {
    MultiSeries::from_terms(nv, order, [(e, Q::one())])
}

/// λ^{(i,j)}(α,β): the bilinear part of the coefficient of x_i x^{α+β} in
/// (F∙G)_i for F = I + s x_j x^β and G = I + t x_i x^α.
pub fn group_lambda(b: &Matrix, p: usize, i: usize, j: usize, alpha: &[u32], beta: &[u32]) -> Result<Q> {
    let q = b.len();
    let nv = p + q;
    if alpha.len() != nv || beta.len() != nv || i >= p || j >= p {
        return Err(Error::Shape(format!("indices must be below {p} and degrees of length {nv}")));
    }
    if alpha.iter().all(|&x| x == 0) || beta.iter().all(|&x| x == 0) {
        return Err(Error::Precondition("degrees must be nonzero".into()));
    }
    let sum: Vec<u32> = alpha.iter().zip(beta).map(|(a, c)| a + c).collect();
    let order = sum.iter().sum::<u32>() + 1;
    let mut target = sum.clone();
    target[i] += 1;
    let element = |k: usize, deg: &[u32], c: i64| -> Result<DiffeoElement> {
        let mut comps: Vec<MultiSeries> = (0..p).map(|t| MultiSeries::var(nv, order, t)).collect();
        let mut e = deg.to_vec();
        e[k] += 1;
        comps[k] = comps[k].add(&monomial(nv, order, e).scale(&Q::from_integer(c.into())));
        DiffeoElement::new(p, b.clone(), comps)
    };
    let coeff = |s: i64, t: i64| -> Result<Q> {
        let f = element(j, beta, s)?;
        let g = element(i, alpha, t)?;
        Ok(f.compose(&g)?.comps[i].coeff(&target))
    };
    Ok(coeff(1, 1)? - coeff(1, 0)? - coeff(0, 1)? + coeff(0, 0)?)
}

/// α_j + Σ_{j′} ℬ_{j′,j} α_{p+j′} + δ_{i,j}.
pub fn group_lambda_closed_form(b: &Matrix, p: usize, i: usize, j: usize, alpha: &[u32]) -> Q {
    let mut v = Q::from_integer(alpha[j].into());
    for (jp, row) in b.iter().enumerate() {
        v += &row[j] * Q::from_integer(alpha[p + jp].into());
    }
    if i == j {
        v += Q::one();
    }
    v
}
