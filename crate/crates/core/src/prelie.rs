//! The graded dual: pairing, Grossman–Larson product and grafting products.

use std::sync::Arc;

use num_traits::Zero;

use crate::hopf::{TensorSum, TreeSum};
use crate::rational::Q;
use crate::trees::{symmetry_factor, DecorationSet, Forest, Tree};

/// ⟨F, G⟩ = s_F δ_{F,G}, extended bilinearly.
pub fn pairing(x: &TreeSum, y: &TreeSum) -> Q {
    let mut acc = Q::zero();
    for (f, a) in x.terms() {
        if let Some(b) = y.terms().get(f) {
            acc += a * b * Q::from_integer(symmetry_factor(f).into());
        }
    }
    acc
}

/// The pairing extended to H ⊗ H.
pub fn pairing_tensor(x: &TensorSum, y: &TensorSum) -> Q {
    let mut acc = Q::zero();
    for (k, a) in x.terms() {
        if let Some(b) = y.terms().get(k) {
            let s = symmetry_factor(&k.0) * symmetry_factor(&k.1);
            acc += a * b * Q::from_integer(s.into());
        }
    }
    acc
}

/// Grossman–Larson product: every tree of the left forest is either grafted on
/// a vertex of the right forest or kept as a separate tree, in all ways.
pub fn gl_product(x: &TreeSum, y: &TreeSum) -> TreeSum {
    let mut out = TreeSum::zero(x.set());
    for (f, a) in x.terms() {
        for (g, b) in y.terms() {
            let c = a * b;
            for h in gl_forests(f, g) {
                out.add_term(h, c.clone());
            }
        }
    }
    out
}

fn gl_forests(f: &Forest, g: &Forest) -> Vec<Forest> {
    let sites: Vec<(usize, usize)> = g
        .trees()
        .iter()
        .enumerate()
        .flat_map(|(k, t)| (0..t.size()).map(move |v| (k, v)))
        .collect();
    let k = f.len();
    let options = sites.len() + 1;
    let mut out = Vec::new();
    let mut choice = vec![0usize; k];
    loop {
        let mut loose = Vec::new();
        let mut per_tree: Vec<Vec<(usize, Tree)>> = vec![Vec::new(); g.len()];
        for (i, &c) in choice.iter().enumerate() {
            let t = f.trees()[i].clone();
            if c == sites.len() {
                loose.push(t);
            } else {
                let (tk, v) = sites[c];
                per_tree[tk].push((v, t));
            }
        }
        let mut trees = loose;
        for (tk, t) in g.trees().iter().enumerate() {
            if per_tree[tk].is_empty() {
                trees.push(t.clone());
            } else {
                trees.push(t.graft_at(&per_tree[tk]));
            }
        }
        out.push(Forest::new(trees));
        if !advance(&mut choice, options) {
            break;
        }
    }
    out
}

fn advance(choice: &mut [usize], options: usize) -> bool {
    for c in choice.iter_mut() {
        *c += 1;
        if *c < options {
            return true;
        }
        *c = 0;
    }
    false
}

/// T * T′: the sum over vertices of `y` of grafting `x` on that vertex.
pub fn prelie_graft(set: &Arc<DecorationSet>, x: &Tree, y: &Tree) -> TreeSum {
    multi_graft(set, std::slice::from_ref(x), y)
}

/// Simultaneous grafting of every tree of `xs` on vertices of `y`, summed over
/// all placement functions.
pub fn multi_graft(set: &Arc<DecorationSet>, xs: &[Tree], y: &Tree) -> TreeSum {
    let mut out = TreeSum::zero(set);
    let n = y.size();
    let mut choice = vec![0usize; xs.len()];
    loop {
        let placements: Vec<(usize, Tree)> =
            choice.iter().zip(xs).map(|(&v, t)| (v, t.clone())).collect();
        out.add_term(Forest::single(y.graft_at(&placements)), Q::from_integer(1.into()));
        if !advance(&mut choice, n) {
            break;
        }
    }
    out
}

/// Linear extension of `*` to sums of trees.
pub fn prelie_product(x: &TreeSum, y: &TreeSum) -> TreeSum {
    let mut out = TreeSum::zero(x.set());
    for (f, a) in x.terms() {
        for (g, b) in y.terms() {
            assert!(f.len() == 1 && g.len() == 1, "pre-Lie product is defined on trees");
            let p = prelie_graft(x.set(), &f.trees()[0], &g.trees()[0]);
            out = out.add(&p.scale(&(a * b))).expect("same set");
        }
    }
    out
}

/// [x, y] = x*y − y*x.
pub fn bracket(x: &TreeSum, y: &TreeSum) -> TreeSum {
    prelie_product(x, y).sub(&prelie_product(y, x)).expect("same set")
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

    #[test]
    fn pairing_examples() {
        let s = set();
        assert_eq!(pairing(&ts(&s, &[("a", 1)]), &ts(&s, &[("a", 1)])), q(1));
        assert_eq!(pairing(&ts(&s, &[("a a", 1)]), &ts(&s, &[("a a", 1)])), q(2));
        assert_eq!(pairing(&ts(&s, &[("a", 1)]), &ts(&s, &[("b", 1)])), q(0));
    }

    #[test]
    fn gl_examples() {
        let s = set();
        let got = gl_product(&ts(&s, &[("a[b]", 1)]), &ts(&s, &[("c[d]", 1)]));
        assert_eq!(got, ts(&s, &[("a[b] c[d]", 1), ("c[d,a[b]]", 1), ("c[d[a[b]]]", 1)]));
        let f = ts(&s, &[("a b[c]", 1)]);
        assert_eq!(gl_product(&TreeSum::one(&s), &f), f);
        assert_eq!(gl_product(&ts(&s, &[("a", 1)]), &ts(&s, &[("b", 1)])), ts(&s, &[("a b", 1), ("b[a]", 1)]));
    }

    #[test]
    fn graft_examples() {
        let s = set();
        let t = |x: &str| s.parse_tree(x).unwrap();
        assert_eq!(prelie_graft(&s, &t("c"), &t("a[b]")), ts(&s, &[("a[b,c]", 1), ("a[b[c]]", 1)]));
        assert_eq!(prelie_graft(&s, &t("a[b]"), &t("c")), ts(&s, &[("c[a[b]]", 1)]));
        assert_eq!(prelie_graft(&s, &t("a"), &t("a")), ts(&s, &[("a[a]", 1)]));
    }

    #[test]
    fn multi_graft_examples() {
        let s = set();
        let t = |x: &str| s.parse_tree(x).unwrap();
        assert_eq!(multi_graft(&s, &[t("b"), t("c")], &t("a")), ts(&s, &[("a[b,c]", 1)]));
        assert_eq!(multi_graft(&s, &[t("b")], &t("a")), ts(&s, &[("a[b]", 1)]));
        let got = multi_graft(&s, &[t("b"), t("b")], &t("a[a]"));
        assert_eq!(got, ts(&s, &[("a[a,b,b]", 1), ("a[b,a[b]]", 2), ("a[a[b,b]]", 1)]));
    }

    #[test]
    fn bracket_is_antisymmetric() {
        let s = set();
        let x = ts(&s, &[("a[b]", 1)]);
        let y = ts(&s, &[("c", 1)]);
        assert_eq!(bracket(&x, &y), bracket(&y, &x).scale(&q(-1)));
    }
}
