use std::path::PathBuf;

use coxarith::coxeter::{
    gram_matrix, parse_diagram, serialize_diagram, signature, solve_truncation_weights_numeric,
    truncate_hyperideal, verify_truncation_weights, vertex_links, SolverOptions, SubdiagramKind,
    VertexKind,
};
use coxarith::{CoxeterDiagram, EdgeKind, Field, Inertia, Rational, TowerElement, Weight};

fn data(name: &str) -> CoxeterDiagram {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_diagram(&text).unwrap()
}

fn inertia(pos: usize, neg: usize, zero: usize) -> Inertia {
    Inertia { pos, neg, zero }
}

#[test]
fn simplex_signatures() {
    for (name, s) in [
        ("S1_4.cox", inertia(4, 1, 0)),
        ("S2_4.cox", inertia(4, 1, 0)),
        ("S1_5.cox", inertia(5, 1, 0)),
        ("S2_5.cox", inertia(5, 1, 0)),
    ] {
        let g = gram_matrix(&data(name)).unwrap();
        assert_eq!(signature(&g).unwrap(), s, "{name}");
    }
}

#[test]
fn gram_entries_of_simplices() {
    let g = gram_matrix(&data("S1_4.cox")).unwrap();
    assert_eq!(g.get(0, 1).to_string(), "-1/2*sqrt(2)");
    assert_eq!(g.get(1, 2).to_string(), "-1/2");
    assert_eq!(g.get(2, 3).to_string(), "-1/4-1/4*sqrt(5)");
    let g5 = gram_matrix(&data("S2_5.cox")).unwrap();
    assert_eq!(g5.get(4, 5).to_string(), "-1/2*sqrt(2)");
    for i in 0..6 {
        assert!(g5.get(i, i).is_one());
    }
    assert!(g5.is_symmetric());
}

#[test]
fn bundled_diagrams_round_trip() {
    for name in [
        "S1_4.cox", "S2_4.cox", "S1_5.cox", "S2_5.cox", "T1.cox", "T2.cox", "T3.cox", "L5.cox",
        "P1_4.cox", "P2_4.cox", "P1_5.cox", "P_5.cox",
    ] {
        let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
        let text = std::fs::read_to_string(path).unwrap();
        let d = parse_diagram(&text).unwrap();
        assert_eq!(serialize_diagram(&d), text, "{name}");
    }
}

#[test]
fn vertex_links_of_the_simplices() {
    let t1 = data("T1.cox");
    let t2 = data("T2.cox");
    let t3 = data("T3.cox");
    let l5 = data("L5.cox");
    let cases = [
        ("S1_4.cox", vec![(0, &t2), (4, &t1)]),
        ("S2_4.cox", vec![(0, &t2), (4, &t3)]),
        ("S1_5.cox", vec![(5, &l5)]),
        ("S2_5.cox", vec![(5, &l5)]),
    ];
    for (name, hyper) in cases {
        let links = vertex_links(&data(name)).unwrap();
        let found: Vec<usize> = links
            .iter()
            .filter(|l| l.kind == VertexKind::Hyperideal)
            .map(|l| l.opposite)
            .collect();
        assert_eq!(found, hyper.iter().map(|h| h.0).collect::<Vec<_>>(), "{name}");
        for (v, link) in hyper {
            let l = &links[v];
            assert_eq!(l.link_class, SubdiagramKind::HyperbolicCompact);
            assert!(l.link.is_isomorphic(link), "{name} vertex {v}");
        }
        let ordinary = links.iter().filter(|l| l.kind == VertexKind::Ordinary).count();
        assert_eq!(ordinary, links.len() - found.len());
    }
}

#[test]
fn figure_polyhedra_signatures_and_minors() {
    for (name, dim) in [("P1_4.cox", 4), ("P2_4.cox", 4), ("P1_5.cox", 5), ("P_5.cox", 5)] {
        let d = data(name);
        let r = verify_truncation_weights(&d, dim, None).unwrap();
        assert!(r.passed(), "{name}: {:?}", r.minors.iter().map(|m| m.value.to_string()).collect::<Vec<_>>());
        assert_eq!(r.signature, inertia(dim, 1, 7 - dim - 1));
    }
}

fn perturbed(d: &CoxeterDiagram, edge: (usize, usize)) -> CoxeterDiagram {
    let mut p = d.clone();
    let Some(EdgeKind::Dotted(Some(w))) = d.edge(edge.0, edge.1) else {
        panic!("not a known weight")
    };
    let v = &w.value + &TowerElement::from_ratio(w.value.tower(), 1, 1000);
    p.set_edge(edge.0, edge.1, EdgeKind::Dotted(Some(Weight::new(v)))).unwrap();
    p
}

#[test]
fn perturbed_weights_fail() {
    for (name, dim) in [("P1_4.cox", 4), ("P2_4.cox", 4), ("P1_5.cox", 5), ("P_5.cox", 5)] {
        let d = data(name);
        let dotted: Vec<(usize, usize)> = d
            .edges()
            .filter(|(_, e)| matches!(e, EdgeKind::Dotted(_)))
            .map(|(k, _)| k)
            .collect();
        for e in dotted {
            let r = verify_truncation_weights(&perturbed(&d, e), dim, None).unwrap();
            assert!(!r.passed(), "{name} {e:?}");
            assert!(!r.determinant().passed(), "{name} {e:?}");
        }
    }
}

/// The squares of the truncation weights lie in Q(sqrt 5); compare them there.
fn weight_squares(d: &CoxeterDiagram) -> Vec<((usize, usize), (Rational, Rational))> {
    let k = Field::quadratic(5).unwrap();
    d.edges()
        .filter_map(|(key, e)| match e {
            EdgeKind::Dotted(Some(w)) => Some((key, k.coords(&w.value.square()).unwrap())),
            _ => None,
        })
        .collect()
}

#[test]
fn truncation_reproduces_figure_weights() {
    for (simplex, figure) in [
        ("S1_4.cox", "P1_4.cox"),
        ("S2_4.cox", "P2_4.cox"),
        ("S1_5.cox", "P1_5.cox"),
        ("S2_5.cox", "P_5.cox"),
    ] {
        let t = truncate_hyperideal(&data(simplex)).unwrap();
        assert_eq!(weight_squares(&t), weight_squares(&data(figure)), "{simplex}");
    }
}

#[test]
fn numeric_solver_finds_figure_weights() {
    for (name, dim) in [("P1_4.cox", 4), ("P2_4.cox", 4), ("P1_5.cox", 5), ("P_5.cox", 5)] {
        let d = data(name);
        let mut template = d.clone();
        let mut expect = Vec::new();
        for (k, e) in d.edges() {
            if let EdgeKind::Dotted(Some(w)) = e {
                expect.push((k, w.value.to_f64()));
                template.set_edge(k.0, k.1, EdgeKind::Dotted(None)).unwrap();
            }
        }
        let sols = solve_truncation_weights_numeric(&template, dim, &SolverOptions::default()).unwrap();
        assert_eq!(sols.len(), 1, "{name}: {sols:?}");
        for ((k, got), (k2, want)) in sols[0].weights.iter().zip(&expect) {
            assert_eq!(k, k2);
            assert!((got - want).abs() <= 1e-9, "{name} {k:?}: {got} vs {want}");
        }
    }
}

#[test]
fn doubles_along_orthogonal_facets() {
    use coxarith::coxeter::double_polyhedron;
    for (name, dim) in [("P1_4.cox", 4), ("P2_4.cox", 4), ("P_5.cox", 5)] {
        let d = double_polyhedron(&data(name), 5).unwrap();
        assert_eq!(d.n(), 8);
        assert!(d.unknown_weights().is_empty());
        let g = gram_matrix(&d).unwrap();
        assert_eq!(signature(&g).unwrap(), inertia(dim, 1, 8 - dim - 1), "{name}");
    }
}
