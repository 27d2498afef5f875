//! Invariant suite at reduced bounds, for CI.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use mdse_core::coloured::{from_endofunctions, is_hopf_graph};
use mdse_core::deg1::{classify, emit_sdse, FundamentalParams};
use mdse_core::diffeo::{group_lambda, group_lambda_closed_form, DiffeoElement};
use mdse_core::feynman::Theory;
use mdse_core::hopf::{coproduct_by_cuts, CoproductCache};
use mdse_core::hopf_check::check_hopf;
use mdse_core::rational::{q, qf, Q};
use mdse_core::sdse::solve;
use mdse_core::series::MultiSeries;
use mdse_core::trees::{enumerate, DecorationSet, DegreeVector};
use mdse_core::TensorSum;

use crate::Report;

type Check = Result<String, String>;

fn coproduct(_: &mut ChaCha8Rng) -> Check {
    let set = DecorationSet::simple(&["a", "b"]);
    let ids: Vec<_> = set.ids().collect();
    let (_, forests) = enumerate(&ids, 4);
    let mut cache = CoproductCache::default();
    for f in forests.iter().flatten() {
        let d = coproduct_by_cuts(&set, f);
        let mut via = TensorSum::zero(&set);
        for ((l, r), c) in cache.forest(f) {
            via.add_term(l, r, c);
        }
        if via != d {
            return Err(format!("coproduct mismatch on {}", set.format_forest(f)));
        }
    }
    Ok(format!("{} forests", forests.iter().map(Vec::len).sum::<usize>()))
}

fn random_params(rng: &mut ChaCha8Rng) -> FundamentalParams {
    let m = rng.gen_range(1..=2);
    let n = rng.gen_range(1..=2);
    let k = rng.gen_range(1..=m);
    let mut assign: Vec<usize> = (0..m).map(|i| if i < k { i } else { rng.gen_range(0..=k) }).collect();
    assign.shuffle(rng);
    let classes = (0..k).map(|c| (0..m).filter(|&i| assign[i] == c).collect()).collect();
    let i0: Vec<usize> = (0..m).filter(|&i| assign[i] == k).collect();
    let mut e = || q(rng.gen_range(-1..=2));
    let a = (0..k).map(|_| (0..n).map(|_| e()).collect()).collect();
    let b = (0..k).map(|_| e()).collect();
    let bs = i0.iter().map(|_| (0..k).map(|_| e()).collect()).collect();
    FundamentalParams::new(m, n, i0, classes, a, b, bs).expect("valid by construction")
}

fn closure(rng: &mut ChaCha8Rng) -> Check {
    for inst in 0..8 {
        let p = random_params(rng);
        let c = p.to_coeffs();
        let sol = solve(&emit_sdse(&p, 3).map_err(|e| e.to_string())?, 3).map_err(|e| e.to_string())?;
        let v = check_hopf(&sol, 3).map_err(|e| e.to_string())?;
        if !v.is_hopf() {
            return Err(format!("instance {inst}: {}", v.status_label()));
        }
        for ((i, j, a, _), x) in v.lambda.as_ref().unwrap().iter() {
            if *x != c.lambda(*i, *j, &a.0) {
                return Err(format!("instance {inst}: λ({i},{j},{a})"));
            }
        }
        let scales = [q(2), q(-1), qf(1, 3)];
        let lam: Vec<Q> = (0..p.m).map(|_| scales.choose(rng).unwrap().clone()).collect();
        let a = classify(&c).map_err(|e| e.to_string())?;
        let b = classify(&c.rescale(&lam).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if a.to_coeffs(p.m, p.n) != b.to_coeffs(p.m, p.n) {
            return Err(format!("instance {inst}: classification not invariant under rescaling"));
        }
    }
    Ok("8 instances at bound 3".into())
}

fn group(rng: &mut ChaCha8Rng) -> Check {
    let b = vec![vec![q(1), qf(-1, 2)]];
    let mut el = || {
        let comps = (0..2)
            .map(|i| {
                let c1 = rng.gen_range(-2..=2);
                let c2 = rng.gen_range(-2..=2);
                let c3 = rng.gen_range(-2..=2);
                let src = format!("x{0} + ({c1})*x{0}*x1 + ({c2})*x{0}*x3 + ({c3})*x{0}*x2^2", i + 1);
                MultiSeries::parse(&src, 3, 3).unwrap()
            })
            .collect();
        DiffeoElement::new(2, b.clone(), comps).unwrap()
    };
    let (f, g, h) = (el(), el(), el());
    let l = f.compose(&g).and_then(|x| x.compose(&h)).map_err(|e| e.to_string())?;
    let r = g.compose(&h).and_then(|x| f.compose(&x)).map_err(|e| e.to_string())?;
    if l != r {
        return Err("composition not associative".into());
    }
    let id = DiffeoElement::identity(2, b.clone(), 3).unwrap();
    if f.compose(&f.invert()).unwrap() != id {
        return Err("inverse".into());
    }
    for a in DegreeVector::all_nonzero(3, 1) {
        for bb in DegreeVector::all_nonzero(3, 1) {
            for i in 0..2 {
                for j in 0..2 {
                    let got = group_lambda(&b, 2, i, j, &a.0, &bb.0).map_err(|e| e.to_string())?;
                    if got != group_lambda_closed_form(&b, 2, i, j, &a.0) {
                        return Err(format!("λ({i},{j},{a},{bb})"));
                    }
                }
            }
        }
    }
    Ok("order 3, p = 2, q = 1".into())
}

fn theories(_: &mut ChaCha8Rng) -> Check {
    let (a, a2) = Theory::qed().incidence_matrices();
    if a != vec![vec![q(1)]; 3] || a2 != vec![vec![q(1)], vec![qf(1, 2)]] {
        return Err("QED matrices".into());
    }
    Ok("QED matrices".into())
}

fn coloured(_: &mut ChaCha8Rng) -> Check {
    let maps: Vec<Vec<usize>> = (0..4).map(|c| vec![c % 2, c / 2]).collect();
    for f in &maps {
        for g in &maps {
            let (graph, nc) = from_endofunctions(2, &[f.clone(), g.clone()]).map_err(|e| e.to_string())?;
            if is_hopf_graph(&graph, 3).0 != nc.is_none() {
                return Err(format!("maps {f:?} {g:?}"));
            }
        }
    }
    Ok("16 map pairs on 2 points".into())
}

pub fn run(seed: u64) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks: [(&str, fn(&mut ChaCha8Rng) -> Check); 5] = [
        ("coproduct", coproduct),
        ("deg1-closure", closure),
        ("group-laws", group),
        ("theory-matrices", theories),
        ("coloured", coloured),
    ];
    let mut text = String::new();
    let mut rows: Vec<Value> = Vec::new();
    let mut failed = false;
    for (name, f) in checks {
        let r = f(&mut rng);
        failed |= r.is_err();
        let (status, detail) = match &r {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        text.push_str(&format!("{status} {name}: {detail}\n"));
        rows.push(json!({"check": name, "status": status, "detail": detail}));
    }
    Report { text, json: json!({"schema": 1, "seed": seed, "checks": rows}), negative: failed }
}
