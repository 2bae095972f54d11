use std::fmt;

use super::{key, CoxeterDiagram, EdgeKind, Weight};
use crate::error::{Error, Result};
use crate::exact::{Inertia, Matrix, Rational, TowerBuilder, TowerElement};

/// `cos(pi / m)` for `m = 2^k * b` with `b` in `{1, 3, 5}`, by half angles.
pub fn cos_pi_over(b: &mut TowerBuilder, m: u64) -> Result<TowerElement> {
    if m < 2 {
        return Err(Error::UnsupportedLabel(m));
    }
    if m == 2 {
        return Ok(TowerElement::zero(b.tower()));
    }
    let k = m.trailing_zeros();
    let base = m >> k;
    let mut c = match base {
        1 => TowerElement::zero(b.tower()),
        3 => b.rational(1, 2),
        5 => b.eval_str("(1+sqrt(5))/4")?,
        _ => return Err(Error::UnsupportedLabel(m)),
    };
    // For base 1 the loop starts from cos(pi/2) = 0.
    let steps = if base == 1 { k - 1 } else { k };
    let half = Rational::new(1.into(), 2.into());
    for _ in 0..steps {
        let s = (&c + &TowerElement::one(b.tower())).scale(&half);
        c = b.sqrt(&s)?;
    }
    Ok(c)
}

/// Gram matrix with unit diagonal and `-cos(pi/m)`, `-1` or `-w` off it.
pub fn gram_matrix(d: &CoxeterDiagram) -> Result<Matrix> {
    let mut b = TowerBuilder::new(d.tower().clone());
    let n = d.n();
    let mut entries = vec![vec![None; n]; n];
    for ((i, j), e) in d.edges() {
        let x = match e {
            EdgeKind::Label(m) => -cos_pi_over(&mut b, *m)?,
            EdgeKind::Heavy => TowerElement::from_int(b.tower(), -1),
            EdgeKind::Dotted(Some(w)) => -&w.value,
            EdgeKind::Dotted(None) => return Err(Error::UnknownWeight(i + 1, j + 1)),
        };
        entries[i][j] = Some(x.clone());
        entries[j][i] = Some(x);
    }
    let t = b.tower().clone();
    let rows = entries
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, x)| match x {
                    Some(x) => x,
                    None if i == j => TowerElement::one(&t),
                    None => TowerElement::zero(&t),
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(&t, rows)
}

pub fn signature(m: &Matrix) -> Result<Inertia> {
    m.inertia()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubdiagramKind {
    Elliptic,
    Parabolic,
    HyperbolicCompact,
    HyperbolicNoncompact,
    IndefiniteOther,
}

impl fmt::Display for SubdiagramKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubdiagramKind::Elliptic => "elliptic",
            SubdiagramKind::Parabolic => "parabolic",
            SubdiagramKind::HyperbolicCompact => "hyperbolic-compact",
            SubdiagramKind::HyperbolicNoncompact => "hyperbolic-noncompact",
            SubdiagramKind::IndefiniteOther => "indefinite-other",
        })
    }
}

fn matrix_components(m: &Matrix) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut comp = vec![usize::MAX; n];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut stack = vec![s];
        comp[s] = id;
        let mut members = Vec::new();
        while let Some(v) = stack.pop() {
            members.push(v);
            for (w, cw) in comp.iter_mut().enumerate() {
                if *cw == usize::MAX && !m.get(v, w).is_zero() {
                    *cw = id;
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Classifies a principal submatrix of a Gram matrix.
pub fn classify_subdiagram(m: &Matrix) -> Result<SubdiagramKind> {
    let k = m.rows();
    let s = m.inertia()?;
    if s.pos == k {
        return Ok(SubdiagramKind::Elliptic);
    }
    let comps = matrix_components(m);
    if s.neg == 0 {
        // Positive semidefinite: parabolic when every component is degenerate.
        for c in &comps {
            if m.principal(c).inertia()?.zero == 0 {
                return Ok(SubdiagramKind::IndefiniteOther);
            }
        }
        return Ok(SubdiagramKind::Parabolic);
    }
    if s.neg == 1 && s.zero == 0 {
        let lanner = comps.len() == 1
            && (0..k).all(|drop| {
                let idx: Vec<usize> = (0..k).filter(|&i| i != drop).collect();
                m.principal(&idx)
                    .inertia()
                    .map(|t| t.pos == k - 1)
                    .unwrap_or(false)
            });
        return Ok(if lanner {
            SubdiagramKind::HyperbolicCompact
        } else {
            SubdiagramKind::HyperbolicNoncompact
        });
    }
    Ok(SubdiagramKind::IndefiniteOther)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Ordinary,
    Ideal,
    Hyperideal,
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VertexKind::Ordinary => "ordinary",
            VertexKind::Ideal => "ideal",
            VertexKind::Hyperideal => "hyperideal",
        })
    }
}

/// The vertex of a simplex opposite one facet, with its link.
#[derive(Debug, Clone)]
pub struct VertexLink {
    pub opposite: usize,
    pub kind: VertexKind,
    pub link_class: SubdiagramKind,
    pub link: CoxeterDiagram,
}

fn require_simplex(g: &Matrix) -> Result<usize> {
    let s = g.inertia()?;
    if s.neg != 1 || s.zero != 0 {
        return Err(Error::Precondition(format!(
            "not a hyperbolic simplex: Gram signature {s}"
        )));
    }
    Ok(s.pos)
}

pub fn vertex_links(d: &CoxeterDiagram) -> Result<Vec<VertexLink>> {
    let g = gram_matrix(d)?;
    let dim = require_simplex(&g)?;
    if d.n() != dim + 1 {
        return Err(Error::Precondition(format!(
            "{} nodes cannot bound a simplex in dimension {dim}",
            d.n()
        )));
    }
    (0..d.n())
        .map(|v| {
            let idx: Vec<usize> = (0..d.n()).filter(|&i| i != v).collect();
            let class = classify_subdiagram(&g.principal(&idx))?;
            let kind = match class {
                SubdiagramKind::Elliptic => VertexKind::Ordinary,
                SubdiagramKind::Parabolic => VertexKind::Ideal,
                SubdiagramKind::HyperbolicCompact | SubdiagramKind::HyperbolicNoncompact => {
                    VertexKind::Hyperideal
                }
                SubdiagramKind::IndefiniteOther => {
                    return Err(Error::InvalidDiagram(format!(
                        "link of the vertex opposite {} is neither spherical, Euclidean nor hyperbolic",
                        d.node_name(v)
                    )))
                }
            };
            Ok(VertexLink {
                opposite: v,
                kind,
                link_class: class,
                link: d.subdiagram(&idx),
            })
        })
        .collect()
}

/// Truncates every hyperideal vertex of a simplex by its polar hyperplane.
///
/// New facets are appended in decreasing order of the opposite facet and
/// named `t<i>` after the facet `i` they diverge from.
pub fn truncate_hyperideal(d: &CoxeterDiagram) -> Result<CoxeterDiagram> {
    let links = vertex_links(d)?;
    let g = gram_matrix(d)?;
    let ginv = g.inverse()?;
    let mut hyper: Vec<usize> = links
        .iter()
        .filter(|l| l.kind == VertexKind::Hyperideal)
        .map(|l| l.opposite)
        .collect();
    hyper.reverse();
    let n = d.n();
    let mut out = CoxeterDiagram::new(n + hyper.len());
    out.name = d.name().map(|s| format!("{s}-truncated"));
    for i in 0..n {
        out.set_node_name(i, d.node_name(i));
    }
    for ((i, j), e) in d.edges() {
        out.edges.insert((i, j), e.clone());
    }
    out.tower = ginv.tower().clone();
    let mut b = TowerBuilder::new(ginv.tower().clone());
    for (k, &v) in hyper.iter().enumerate() {
        out.set_node_name(n + k, format!("t{}", d.node_name(v)));
        let gvv = ginv.get(v, v);
        if gvv.sign()? <= 0 {
            return Err(Error::Precondition(format!(
                "vertex opposite {} is not hyperideal",
                d.node_name(v)
            )));
        }
        let w = b.sqrt(&gvv.inv()?)?;
        out.adopt_tower(b.tower())?;
        out.set_edge(v, n + k, EdgeKind::Dotted(Some(Weight::new(w))))?;
    }
    for (k, &v) in hyper.iter().enumerate() {
        for (l, &u) in hyper.iter().enumerate().skip(k + 1) {
            // <h_v, h_u> = G^-1_vu / sqrt(G^-1_vv G^-1_uu); diverging means < -1.
            let gvu = ginv.get(v, u);
            let sq = gvu
                .square()
                .checked_div(&ginv.get(v, v).checked_mul(ginv.get(u, u))?)?;
            let w = b.sqrt(&sq)?;
            out.adopt_tower(b.tower())?;
            if gvu.sign()? >= 0 || w.cmp_value(&TowerElement::one(b.tower()))? != std::cmp::Ordering::Greater {
                return Err(Error::Precondition(format!(
                    "truncating hyperplanes at {} and {} intersect",
                    d.node_name(v),
                    d.node_name(u)
                )));
            }
            out.set_edge(n + k, n + l, EdgeKind::Dotted(Some(Weight::new(w))))?;
        }
    }
    Ok(out)
}

/// Appends the polar hyperplanes of the hyperideal vertices of a simplex to
/// its Gram matrix.
///
/// A vertex is hyperideal when the diagonal entry of the inverse Gram matrix
/// at its opposite facet is positive. Truncating facets come in decreasing
/// order of the opposite facet, matching [`truncate_hyperideal`]. Returns the
/// enlarged matrix and the opposite facets in the order used.
pub fn truncated_gram(g: &Matrix) -> Result<(Matrix, Vec<usize>)> {
    require_simplex(g)?;
    let n = g.rows();
    let ginv = g.inverse()?;
    let mut hyper = Vec::new();
    for v in (0..n).rev() {
        if ginv.get(v, v).sign()? > 0 {
            hyper.push(v);
        }
    }
    if hyper.is_empty() {
        return Ok((g.clone(), hyper));
    }
    let mut b = TowerBuilder::new(ginv.tower().clone());
    let mut inv_norms = Vec::with_capacity(hyper.len());
    for &v in &hyper {
        inv_norms.push(b.sqrt(&ginv.get(v, v).inv()?)?);
    }
    let t = b.tower().clone();
    let m = n + hyper.len();
    let mut out = Matrix::identity(&t, m).lift(&t)?;
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, g.get(i, j).lift(&t)?);
        }
    }
    for (k, &v) in hyper.iter().enumerate() {
        let w = inv_norms[k].lift(&t)?;
        out.set(v, n + k, -&w);
        out.set(n + k, v, -&w);
        for (l, &u) in hyper.iter().enumerate().skip(k + 1) {
            let x = ginv.get(v, u).lift(&t)? * w.clone() * inv_norms[l].lift(&t)?;
            if x.cmp_value(&TowerElement::from_int(&t, -1))? != std::cmp::Ordering::Less {
                return Err(Error::Precondition(format!(
                    "truncating hyperplanes at facets {} and {} intersect",
                    v + 1,
                    u + 1
                )));
            }
            out.set(n + k, n + l, x.clone());
            out.set(n + l, n + k, x);
        }
    }
    Ok((out, hyper))
}

/// Reads a Gram entry back as a diagram edge; `None` is a right angle.
fn edge_for_entry(b: &mut TowerBuilder, x: &TowerElement) -> Result<Option<EdgeKind>> {
    if x.is_zero() {
        return Ok(None);
    }
    let minus_one = TowerElement::from_int(x.tower(), -1);
    match x.cmp_value(&minus_one)? {
        std::cmp::Ordering::Less => return Ok(Some(EdgeKind::Dotted(Some(Weight::new(-x))))),
        std::cmp::Ordering::Equal => return Ok(Some(EdgeKind::Heavy)),
        std::cmp::Ordering::Greater => {}
    }
    if x.sign()? > 0 {
        return Err(Error::Precondition(format!("obtuse Gram entry {x}")));
    }
    let c = -x.to_f64();
    let m = (std::f64::consts::PI / c.acos()).round();
    if (3.0..=1024.0).contains(&m) {
        let m = m as u64;
        if let Ok(cm) = cos_pi_over(b, m) {
            if cm == -x {
                return Ok(Some(EdgeKind::Label(m)));
            }
        }
    }
    Err(Error::Precondition(format!("Gram entry {x} is not -cos(pi/m)")))
}

/// The double of a polyhedron along facet `f`, with every Gram entry of the
/// mirror copies computed from the reflection in `f`.
///
/// Node order and names follow [`CoxeterDiagram::double_template`]. Facets
/// meeting `f` at `pi/2k` with `k >= 2` are copied; the two copies then meet
/// at `pi/k`. An odd angle at `f` makes the double a non-Coxeter polyhedron.
pub fn double_polyhedron(d: &CoxeterDiagram, f: usize) -> Result<CoxeterDiagram> {
    let n = d.n();
    if f >= n {
        return Err(Error::OutOfRange(format!("facet {}", f + 1)));
    }
    for j in (0..n).filter(|&j| j != f) {
        if let Some(EdgeKind::Label(m)) = d.edge(f, j) {
            if m % 2 == 1 {
                return Err(Error::Precondition(format!(
                    "facet {} meets facet {} at the odd angle pi/{m}",
                    d.node_name(f),
                    d.node_name(j)
                )));
            }
        }
    }
    let g = gram_matrix(d)?;
    let mut b = TowerBuilder::new(g.tower().clone());
    let order: Vec<usize> = (0..n).filter(|&j| j != f).collect();
    let copied: Vec<usize> = order.iter().copied().filter(|&j| d.edge(f, j).is_some()).collect();
    let mut out = CoxeterDiagram::new(order.len() + copied.len());
    out.tower = g.tower().clone();
    out.name = d.name().map(|s| format!("{s}-double-{}", d.node_name(f)));
    for (p, &j) in order.iter().enumerate() {
        out.set_node_name(p, d.node_name(j));
    }
    for (c, &j) in copied.iter().enumerate() {
        out.set_node_name(order.len() + c, format!("{}'", d.node_name(j)));
    }
    let two = TowerElement::from_int(g.tower(), 2);
    // <s(e_i), e_j> = g_ij - 2 g_if g_jf, where s is the reflection in f.
    let mirrored = |i: usize, j: usize| -> Result<TowerElement> {
        (g.get(i, j) - &(&two * &(g.get(i, f) * g.get(j, f)))).lift(g.tower())
    };
    for (p, &i) in order.iter().enumerate() {
        for (q, &j) in order.iter().enumerate().skip(p + 1) {
            if let Some(e) = d.edge(i, j) {
                out.edges.insert((p, q), e.clone());
            }
        }
    }
    for (c, &i) in copied.iter().enumerate() {
        let ic = order.len() + c;
        for (q, &j) in order.iter().enumerate() {
            let x = if i == j { mirrored(i, i)? } else { mirrored(i, j)? };
            if let Some(e) = edge_for_entry(&mut b, &x)? {
                if let EdgeKind::Dotted(Some(w)) = &e {
                    out.adopt_tower(w.value.tower())?;
                }
                out.edges.insert(key(ic, q), e);
            }
        }
        for (c2, &j) in copied.iter().enumerate().take(c) {
            if let Some(e) = d.edge(i, j) {
                out.edges.insert(key(ic, order.len() + c2), e.clone());
            }
        }
    }
    Ok(out)
}
