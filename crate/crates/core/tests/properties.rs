use std::sync::Arc;

use mdse_core::hopf::coproduct_by_cuts;
use mdse_core::rational::q;
use mdse_core::series::MultiSeries;
use mdse_core::trees::{symmetry_factor, DecId, DecorationSet, Forest, Tree};
use mdse_core::{TensorSum, TreeSum};
use proptest::prelude::*;

fn set() -> Arc<DecorationSet> {
    DecorationSet::simple(&["a", "b", "c"])
}

fn arb_tree() -> impl Strategy<Value = Tree> {
    let leaf = (0u32..3).prop_map(|d| Tree::leaf(DecId(d)));
    leaf.prop_recursive(3, 8, 3, |inner| {
        ((0u32..3), prop::collection::vec(inner, 0..3)).prop_map(|(d, ch)| Tree::new(DecId(d), ch))
    })
}

fn arb_forest() -> impl Strategy<Value = Forest> {
    prop::collection::vec(arb_tree(), 0..3).prop_map(Forest::new)
}

/// Independent automorphism count: permutations of children that fix the tree.
fn automorphisms(t: &Tree) -> u64 {
    let ch = t.children();
    let mut out: u64 = ch.iter().map(automorphisms).product();
    let mut i = 0;
    while i < ch.len() {
        let mut j = i;
        while j < ch.len() && ch[j] == ch[i] {
            j += 1;
        }
        out *= (1..=(j - i) as u64).product::<u64>();
        i = j;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coproduct_is_coassociative(f in arb_forest()) {
        let s = set();
        let d = coproduct_by_cuts(&s, &f);
        let mut left = std::collections::BTreeMap::new();
        let mut right = std::collections::BTreeMap::new();
        for ((l, r), c) in d.terms() {
            for ((a, b), c2) in coproduct_by_cuts(&s, l).terms() {
                *left.entry((a.clone(), b.clone(), r.clone())).or_insert(q(0)) += c * c2;
            }
            for ((a, b), c2) in coproduct_by_cuts(&s, r).terms() {
                *right.entry((l.clone(), a.clone(), b.clone())).or_insert(q(0)) += c * c2;
            }
        }
        left.retain(|_, v| *v != q(0));
        right.retain(|_, v| *v != q(0));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn recursion_matches_cut_enumeration(f in arb_forest()) {
        let s = set();
        prop_assert_eq!(TreeSum::forest(&s, f.clone()).coproduct(), coproduct_by_cuts(&s, &f));
    }

    #[test]
    fn symmetry_factor_counts_automorphisms(t in arb_tree()) {
        let f = Forest::single(t.clone());
        prop_assert_eq!(symmetry_factor(&f), automorphisms(&t).into());
    }

    #[test]
    fn tree_sums_round_trip_through_json(fs in prop::collection::vec((arb_forest(), -5i64..5), 0..4)) {
        let s = set();
        let mut x = TreeSum::zero(&s);
        for (f, c) in fs {
            x.add_term(f, q(c));
        }
        prop_assert_eq!(TreeSum::from_json(&s, &x.to_json()).unwrap(), x);
    }

    #[test]
    fn tensor_of_units(f in arb_forest()) {
        let s = set();
        let one = TreeSum::one(&s);
        let x = TreeSum::forest(&s, f);
        let t = TensorSum::tensor(&x, &one);
        prop_assert_eq!(t.len(), 1);
    }

    #[test]
    fn series_power_laws(c1 in -3i64..4, c2 in -3i64..4, a in -3i64..4, b in 1i64..4) {
        let x = MultiSeries::parse(&format!("1 + ({c1})*x1 + ({c2})*x1*x2"), 2, 5).unwrap();
        let r1 = mdse_core::rational::qf(a, b);
        let r2 = mdse_core::rational::qf(b, 3);
        let lhs = x.pow(&r1).unwrap().mul(&x.pow(&r2).unwrap());
        prop_assert_eq!(lhs, x.pow(&(r1 + r2)).unwrap());
    }
}
