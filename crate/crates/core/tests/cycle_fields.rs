//! The trace field from pair products and fundamental cycles against the
//! field spanned by every simple cycle, found by brute force.

use std::collections::BTreeSet;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use proptest::prelude::*;

use coxarith::coxeter::{gram_matrix, parse_diagram, truncated_gram};
use coxarith::vinberg::{cycle_product, trace_field};
use coxarith::{Matrix, TowerElement};

fn squarefree(mut n: BigInt) -> BigInt {
    let mut out = BigInt::one();
    if n.is_negative() {
        out = -out;
        n = -n;
    }
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0;
        while (&n % &p) == BigInt::from(0) {
            n /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &p;
        }
        p += 1;
    }
    out * n
}

/// Squarefree radicands of the monomials of `x`.
fn monomial_radicands(x: &TowerElement) -> Vec<BigInt> {
    let t = x.tower();
    x.terms()
        .map(|(mask, _)| {
            let mut r = BigInt::one();
            for g in 0..t.num_generators() {
                if mask >> g & 1 == 1 {
                    r *= t.radicand(g).expect("rational radicand").clone();
                }
            }
            squarefree(r)
        })
        .collect()
}

/// All squarefree products of subsets of `gens`.
fn span(gens: impl IntoIterator<Item = BigInt>) -> BTreeSet<BigInt> {
    let mut set = BTreeSet::from([BigInt::one()]);
    for g in gens {
        if set.contains(&g) {
            continue;
        }
        let new: Vec<BigInt> = set.iter().map(|s| squarefree(s * &g)).collect();
        set.extend(new);
    }
    set
}

fn brute_force_cycles(n: usize, adjacent: &dyn Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    // cycles rooted at their smallest node, second node below the last
    fn extend(path: &mut Vec<usize>, used: &mut Vec<bool>, n: usize, adj: &dyn Fn(usize, usize) -> bool, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        let root = path[0];
        if path.len() >= 3 && adj(last, root) && path[1] < last {
            out.push(path.clone());
        }
        for v in root + 1..n {
            if !used[v] && adj(last, v) {
                used[v] = true;
                path.push(v);
                extend(path, used, n, adj, out);
                path.pop();
                used[v] = false;
            }
        }
    }
    for root in 0..n {
        let mut used = vec![false; n];
        used[root] = true;
        extend(&mut vec![root], &mut used, n, adjacent, &mut out);
    }
    out
}

fn oracle_field(g: &Matrix) -> BTreeSet<BigInt> {
    let n = g.rows();
    let adj = |i: usize, j: usize| !g.get(i, j).is_zero();
    let mut gens = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if adj(i, j) {
                gens.extend(monomial_radicands(&cycle_product(g, &[i, j])));
            }
        }
    }
    for c in brute_force_cycles(n, &adj) {
        gens.extend(monomial_radicands(&cycle_product(g, &c)));
    }
    span(gens)
}

fn library_field(g: &Matrix) -> BTreeSet<BigInt> {
    span(trace_field(g).unwrap().radicands())
}

fn data(name: &str) -> Matrix {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    gram_matrix(&parse_diagram(&std::fs::read_to_string(path).unwrap()).unwrap()).unwrap()
}

#[test]
fn bundled_diagrams() {
    for name in ["S1_4.cox", "S2_4.cox", "S1_5.cox", "S2_5.cox", "T1.cox", "T2.cox", "T3.cox", "L5.cox", "P1_5.cox", "P_5.cox"] {
        let g = data(name);
        assert_eq!(library_field(&g), oracle_field(&g), "{name}");
    }
    for name in ["S1_4.cox", "S2_4.cox", "S1_5.cox", "S2_5.cox"] {
        let (t, _) = truncated_gram(&data(name)).unwrap();
        assert_eq!(library_field(&t), oracle_field(&t), "truncated {name}");
    }
}

/// Nested-radical weights: every product is checked to land in Q(sqrt 5).
#[test]
fn nested_radical_figures() {
    let k = coxarith::Field::quadratic(5).unwrap();
    for name in ["P1_4.cox", "P2_4.cox"] {
        let g = data(name);
        let n = g.rows();
        let adj = |i: usize, j: usize| !g.get(i, j).is_zero();
        let mut products: Vec<TowerElement> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if adj(i, j) {
                    products.push(cycle_product(&g, &[i, j]));
                }
            }
        }
        products.extend(brute_force_cycles(n, &adj).iter().map(|c| cycle_product(&g, c)));
        let mut irrational = false;
        for x in &products {
            let (_, v) = k.coords(x).unwrap();
            irrational |= v != coxarith::Rational::from_integer(0.into());
        }
        let oracle = if irrational { span([BigInt::from(5)]) } else { span([]) };
        assert_eq!(library_field(&g), oracle, "{name}");
    }
}

#[test]
fn cycle_enumeration_counts() {
    // the complete graph on n nodes has sum_k C(n,k)(k-1)!/2 simple cycles
    let all = |_: usize, _: usize| true;
    assert_eq!(brute_force_cycles(4, &all).len(), 7);
    assert_eq!(brute_force_cycles(5, &all).len(), 37);
}

const EDGES: [&str; 9] = [
    "m=3", "m=4", "m=5", "m=6", "m=inf", "dotted w=2", "dotted w=sqrt(3)", "dotted w=3/2*sqrt(2)", "dotted w=sqrt(7)+1",
];

fn random_diagram() -> impl Strategy<Value = String> {
    (3usize..=8).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(0usize..1000, n - 1),
            prop::collection::vec((0usize..n, 0usize..n, 0usize..EDGES.len()), 0..=n + 2),
            prop::collection::vec(0usize..EDGES.len(), n - 1),
        )
    })
    .prop_map(|(n, parents, extra, kinds)| {
        let mut edges = std::collections::BTreeMap::new();
        for v in 1..n {
            edges.insert((parents[v - 1] % v, v), kinds[v - 1]);
        }
        for (a, b, k) in extra {
            if a != b {
                edges.entry((a.min(b), a.max(b))).or_insert(k);
            }
        }
        let mut text = format!("vertices {n}\n");
        for ((a, b), k) in edges {
            text.push_str(&format!("edge {} {} {}\n", a + 1, b + 1, EDGES[k]));
        }
        text
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_connected_diagrams(text in random_diagram()) {
        let d = parse_diagram(&text).unwrap();
        prop_assert!(d.is_connected());
        let g = gram_matrix(&d).unwrap();
        prop_assert_eq!(library_field(&g), oracle_field(&g), "{}", text);
    }
}
