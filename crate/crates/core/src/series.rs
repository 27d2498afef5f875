//! Truncated commutative multivariate power series over ℚ.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{binomial, fmt_q, q, Q};

pub type Exponent = Vec<u32>;

/// Series in `nvars` variables, exact up to total degree `order` inclusive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiSeries {
    nvars: usize,
    order: u32,
    coeffs: BTreeMap<Exponent, Q>,
}

fn total(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl MultiSeries {
    pub fn zero(nvars: usize, order: u32) -> Self {
        MultiSeries { nvars, order, coeffs: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, order: u32, c: Q) -> Self {
        let mut s = Self::zero(nvars, order);
        s.add_term(vec![0; nvars], c);
        s
    }

    pub fn one(nvars: usize, order: u32) -> Self {
        Self::constant(nvars, order, Q::one())
    }

    pub fn var(nvars: usize, order: u32, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut s = Self::zero(nvars, order);
        s.add_term(e, Q::one());
        s
    }

    /// Σ_{i ∈ vars} x_i.
    pub fn var_sum(nvars: usize, order: u32, vars: &[usize]) -> Self {
        let mut s = Self::zero(nvars, order);
        for &i in vars {
            s = s.add(&Self::var(nvars, order, i));
        }
        s
    }

    pub fn from_terms(nvars: usize, order: u32, terms: impl IntoIterator<Item = (Exponent, Q)>) -> Self {
        let mut s = Self::zero(nvars, order);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length");
            s.add_term(e, c);
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Q> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> Q {
        self.coeffs.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn add_term(&mut self, e: Exponent, c: Q) {
        if c.is_zero() || total(&e) > self.order {
            return;
        }
        match self.coeffs.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        let coeffs = self.coeffs.iter().filter(|(e, _)| total(e) <= order).map(|(e, c)| (e.clone(), c.clone())).collect();
        MultiSeries { nvars: self.nvars, order, coeffs }
    }

    /// Same coefficients, reinterpreted at a different order.
    pub fn with_order(&self, order: u32) -> Self {
        let mut s = Self::zero(self.nvars, order);
        for (e, c) in &self.coeffs {
            s.add_term(e.clone(), c.clone());
        }
        s
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Shape(format!("{} vs {} variables", self.nvars, other.nvars)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other).expect("variable count");
        let mut s = self.truncate(self.order.min(other.order));
        for (e, c) in &other.coeffs {
            s.add_term(e.clone(), c.clone());
        }
        s
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut s = Self::zero(self.nvars, self.order);
        if !c.is_zero() {
            for (e, v) in &self.coeffs {
                s.coeffs.insert(e.clone(), v * c);
            }
        }
        s
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other).expect("variable count");
        let order = self.order.min(other.order);
        let mut acc: HashMap<Exponent, Q> = HashMap::new();
        for (a, x) in &self.coeffs {
            let ta = total(a);
            for (b, y) in &other.coeffs {
                if ta + total(b) > order {
                    continue;
                }
                let e: Exponent = a.iter().zip(b).map(|(u, v)| u + v).collect();
                *acc.entry(e).or_insert_with(Q::zero) += x * y;
            }
        }
        let coeffs = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        MultiSeries { nvars: self.nvars, order, coeffs }
    }

    pub fn pow_int(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars, self.order);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Rational power. Nonnegative integer exponents work for any base; other
    /// exponents need constant term 1 and use the binomial series.
    pub fn pow(&self, r: &Q) -> Result<Self> {
        if r.is_integer() && !r.is_negative() {
            let k: u32 = r.to_integer().try_into().map_err(|_| Error::Invalid("exponent too large".into()))?;
            return Ok(self.pow_int(k));
        }
        if !self.constant_term().is_one() {
            return Err(Error::ConstantTerm(format!(
                "power {} needs constant term 1, found {}",
                fmt_q(r),
                fmt_q(&self.constant_term())
            )));
        }
        let u = self.sub(&Self::one(self.nvars, self.order));
        let mut acc = Self::zero(self.nvars, self.order);
        let mut upow = Self::one(self.nvars, self.order);
        for k in 0..=self.order {
            acc = acc.add(&upow.scale(&binomial(r, k)));
            upow = upow.mul(&u);
        }
        Ok(acc)
    }

    /// exp of a series without constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::ConstantTerm("exp needs constant term 0".into()));
        }
        let mut acc = Self::zero(self.nvars, self.order);
        let mut term = Self::one(self.nvars, self.order);
        for k in 0..=self.order {
            acc = acc.add(&term);
            term = term.mul(self).scale(&(Q::one() / q(k as i64 + 1)));
        }
        Ok(acc)
    }

    /// f(g_1, …, g_n) for images without constant term.
    pub fn substitute(&self, images: &[MultiSeries]) -> Result<Self> {
        if let Some((i, _)) = images.iter().enumerate().find(|(_, g)| !g.constant_term().is_zero()) {
            return Err(Error::ConstantTerm(format!("substitution image for x{} has a constant term", i + 1)));
        }
        self.substitute_unchecked(images, true)
    }

    /// Treats `self` as an exact polynomial; images may have constant terms.
    pub fn substitute_polynomial(&self, images: &[MultiSeries]) -> Result<Self> {
        self.substitute_unchecked(images, false)
    }

    fn substitute_unchecked(&self, images: &[MultiSeries], bounded_by_self: bool) -> Result<Self> {
        if images.len() != self.nvars {
            return Err(Error::Shape(format!("{} images for {} variables", images.len(), self.nvars)));
        }
        let nv = match images.first() {
            Some(g) => g.nvars,
            None => {
                return Ok(MultiSeries::constant(0, self.order, self.constant_term()));
            }
        };
        if images.iter().any(|g| g.nvars != nv) {
            return Err(Error::Shape("images with different variable counts".into()));
        }
        let mut order = images.iter().map(|g| g.order).min().unwrap_or(self.order);
        if bounded_by_self {
            order = order.min(self.order);
        }
        let mut powers: Vec<Vec<MultiSeries>> = images.iter().map(|g| vec![MultiSeries::one(nv, order), g.truncate(order)]).collect();
        let mut acc = MultiSeries::zero(nv, order);
        for (e, c) in &self.coeffs {
            let mut term = MultiSeries::constant(nv, order, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&powers[i][1]);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][k as usize]);
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Exact division by x_i; every term must contain x_i.
    pub fn div_var(&self, i: usize) -> Result<Self> {
        let mut s = Self::zero(self.nvars, self.order.saturating_sub(1));
        for (e, c) in &self.coeffs {
            if e[i] == 0 {
                return Err(Error::Precondition(format!("series is not divisible by x{}", i + 1)));
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            s.add_term(e2, c.clone());
        }
        Ok(s)
    }

    /// Multiplication by x_i, raising the order by one.
    pub fn mul_var(&self, i: usize) -> Self {
        let mut s = Self::zero(self.nvars, self.order + 1);
        for (e, c) in &self.coeffs {
            let mut e2 = e.clone();
            e2[i] += 1;
            s.add_term(e2, c.clone());
        }
        s
    }

    /// Parses the literal syntax: sums of `c*x1^e1*…`, parentheses, `(expr)^(p/q)`,
    /// `F(a,b; expr)` and `exp(expr)`.
    pub fn parse(src: &str, nvars: usize, order: u32) -> Result<Self> {
        let mut p = SeriesParser { src: src.as_bytes(), pos: 0, nvars, order };
        let s = p.expr()?;
        p.ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(s)
    }
}

/// F_{a,b}(X) = Σ_k a(a−b)…(a−b(k−1))/k! X^k in one variable.
pub fn f_ab(a: &Q, b: &Q, order: u32) -> MultiSeries {
    let mut s = MultiSeries::zero(1, order);
    let mut c = Q::one();
    for k in 0..=order {
        s.add_term(vec![k], c.clone());
        c = c * (a - b * q(k as i64)) / q(k as i64 + 1);
    }
    s
}

impl fmt::Display for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<&Exponent> = self.coeffs.keys().collect();
        keys.sort_by(|a, b| total(a).cmp(&total(b)).then_with(|| b.cmp(a)));
        if keys.is_empty() {
            return write!(f, "0");
        }
        for (k, e) in keys.into_iter().enumerate() {
            let c = &self.coeffs[e];
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, p) })
                .collect();
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if mono.is_empty() {
                write!(f, "{}", fmt_q(&a))?;
            } else if a.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_q(&a), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

struct SeriesParser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
    order: u32,
}

impl SeriesParser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<MultiSeries> {
        let mut acc = MultiSeries::zero(self.nvars, self.order);
        let mut sign = self.signs(Q::one());
        loop {
            let t = self.term()?;
            acc = acc.add(&t.scale(&sign));
            if self.eat(b'+') {
                sign = self.signs(Q::one());
            } else if self.eat(b'-') {
                sign = self.signs(-Q::one());
            } else {
                return Ok(acc);
            }
        }
    }

    /// Folds any run of unary `+`/`-` into `sign`.
    fn signs(&mut self, mut sign: Q) -> Q {
        loop {
            if self.eat(b'-') {
                sign = -sign;
            } else if !self.eat(b'+') {
                return sign;
            }
        }
    }

    fn term(&mut self) -> Result<MultiSeries> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiSeries> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let r = if self.eat(b'(') {
                let r = self.rational()?;
                self.expect(b')')?;
                r
            } else {
                self.rational_unsigned_int()?
            };
            return base.pow(&r);
        }
        Ok(base)
    }

    fn number_text(&mut self) -> Result<String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn rational_unsigned_int(&mut self) -> Result<Q> {
        let t = self.number_text()?;
        crate::rational::parse_q(&t)
    }

    /// Signed `p` or `p/q`.
    fn rational(&mut self) -> Result<Q> {
        let neg = self.eat(b'-');
        let n = self.number_text()?;
        let mut r = crate::rational::parse_q(&n)?;
        let save = self.pos;
        if self.eat(b'/') {
            match self.number_text() {
                Ok(d) => r /= crate::rational::parse_q(&d)?,
                Err(_) => self.pos = save,
            }
        }
        Ok(if neg { -r } else { r })
    }

    fn atom(&mut self) -> Result<MultiSeries> {
        let c = self.peek().ok_or_else(|| self.err("unexpected end of input"))?;
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() {
            let r = self.rational()?;
            return Ok(MultiSeries::constant(self.nvars, self.order, r));
        }
        if self.src[self.pos..].starts_with(b"exp(") {
            self.pos += 4;
            let e = self.expr()?;
            self.expect(b')')?;
            return e.exp();
        }
        if self.src[self.pos..].starts_with(b"F(") {
            self.pos += 2;
            let a = self.rational()?;
            self.expect(b',')?;
            let b = self.rational()?;
            self.expect(b';')?;
            let e = self.expr()?;
            self.expect(b')')?;
            return f_ab(&a, &b, self.order).substitute(&[e]);
        }
        if c == b'x' {
            self.pos += 1;
            let idx: usize = self.number_text()?.parse().map_err(|_| self.err("bad variable index"))?;
            if idx == 0 || idx > self.nvars {
                return Err(self.err(&format!("variable x{idx} outside x1..x{}", self.nvars)));
            }
            return Ok(MultiSeries::var(self.nvars, self.order, idx - 1));
        }
        Err(self.err(&format!("unexpected `{}`", c as char)))
    }
}
