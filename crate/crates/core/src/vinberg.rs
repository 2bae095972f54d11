//! Vinberg's invariants of a hyperbolic reflection group, read off its Gram
//! matrix: the field generated by cyclic products, the ambient quadratic
//! form, the reflections themselves and the arithmeticity class.
//!
//! Cyclic products are taken in the matrix `2G`, so a pair product is
//! `4 g_ij^2` and a cycle of length `k` contributes `2^k` times the product
//! of its entries.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::coxeter::{gram_matrix, truncated_gram, CoxeterDiagram};
use crate::error::{Error, Result};
use crate::exact::ntheory::{factor, squarefree_decompose};
use crate::exact::{Embedding, Inertia, Matrix, Rational, Tower, TowerElement};
use crate::quadfield::Field;

/// Cycles longer than this many are not enumerated one by one.
pub const SIMPLE_CYCLE_LIMIT: usize = 20_000;

/// Squarefree integers modulo squares, kept as a reduced F2 basis keyed by
/// the largest prime of each basis element.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RadicandGroup {
    basis: BTreeMap<BigInt, BigInt>,
}

fn largest_prime(r: &BigInt) -> Result<BigInt> {
    Ok(factor(r)?.into_iter().map(|(p, _)| p).max().expect("r > 1"))
}

/// `a * b` modulo squares, both squarefree and positive.
fn mul_mod_squares(a: &BigInt, b: &BigInt) -> BigInt {
    let g = num_integer::gcd(a.clone(), b.clone());
    (a / &g) * (b / &g)
}

impl RadicandGroup {
    pub fn new() -> Self {
        Self::default()
    }

    fn reduce(&self, r: &BigInt) -> Result<BigInt> {
        let mut r = r.clone();
        while !r.is_one() {
            let p = largest_prime(&r)?;
            match self.basis.get(&p) {
                Some(b) => r = mul_mod_squares(&r, b),
                None => break,
            }
        }
        Ok(r)
    }

    /// Adds a positive squarefree integer; returns whether the group grew.
    pub fn insert(&mut self, r: &BigInt) -> Result<bool> {
        if !r.is_positive() {
            return Err(Error::Precondition(format!("radicand {r} is not positive")));
        }
        let r = self.reduce(&squarefree_decompose(r)?.1)?;
        if r.is_one() {
            return Ok(false);
        }
        let p = largest_prime(&r)?;
        // Keep the basis fully reduced so that its listing is canonical.
        let mut basis = std::mem::take(&mut self.basis);
        for b in basis.values_mut() {
            if (&*b % &p).is_zero() {
                *b = mul_mod_squares(b, &r);
            }
        }
        basis.insert(p, r);
        self.basis = basis;
        Ok(true)
    }

    pub fn contains(&self, r: &BigInt) -> Result<bool> {
        if !r.is_positive() {
            return Ok(false);
        }
        Ok(self.reduce(&squarefree_decompose(r)?.1)?.is_one())
    }

    /// Reduced basis in increasing order.
    pub fn radicands(&self) -> Vec<BigInt> {
        let mut v: Vec<BigInt> = self.basis.values().cloned().collect();
        v.sort();
        v
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// A multiquadratic field `Q(sqrt d_1, ..., sqrt d_k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceField {
    pub group: RadicandGroup,
}

impl TraceField {
    pub fn radicands(&self) -> Vec<BigInt> {
        self.group.radicands()
    }

    pub fn degree(&self) -> usize {
        1 << self.group.rank()
    }

    /// The field as a [`Field`] when it is `Q` or quadratic.
    pub fn field(&self) -> Result<Option<Field>> {
        match self.radicands().as_slice() {
            [] => Ok(Some(Field::rationals())),
            [d] => {
                let d = i64::try_from(d.clone())
                    .map_err(|_| Error::OutOfRange(format!("radicand {d}")))?;
                Ok(Some(Field::quadratic(d)?))
            }
            _ => Ok(None),
        }
    }

    /// True when every monomial of `x` lies in the field.
    pub fn contains(&self, x: &TowerElement) -> Result<bool> {
        for (mask, _) in x.terms() {
            match monomial_radicand(x.tower(), mask)? {
                Some(r) if self.group.contains(&r)? => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }
}

impl fmt::Display for TraceField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.radicands();
        if r.is_empty() {
            return f.write_str("Q");
        }
        let parts: Vec<String> = r.iter().map(|d| format!("sqrt {d}")).collect();
        write!(f, "Q({})", parts.join(", "))
    }
}

/// Squarefree part of the product of the radicands in a monomial, or `None`
/// when the monomial involves a generator that is not a rational radical.
fn monomial_radicand(t: &Tower, mask: u32) -> Result<Option<BigInt>> {
    let mut r = BigInt::one();
    for i in 0..t.num_generators() {
        if mask & (1 << i) != 0 {
            match t.radicand(i) {
                Some(x) => r *= x,
                None => return Ok(None),
            }
        }
    }
    Ok(Some(squarefree_decompose(&r)?.1))
}

/// Pair products and products over a fundamental cycle basis.
#[derive(Debug, Clone)]
pub struct CyclicProductSet {
    pub pair_products: Vec<((usize, usize), TowerElement)>,
    pub cycle_products: Vec<(Vec<usize>, TowerElement)>,
}

impl CyclicProductSet {
    pub fn values(&self) -> impl Iterator<Item = &TowerElement> {
        self.pair_products
            .iter()
            .map(|p| &p.1)
            .chain(self.cycle_products.iter().map(|c| &c.1))
    }
}

fn support_graph(m: &Matrix) -> Result<Vec<Vec<usize>>> {
    if !m.is_square() || !m.is_symmetric() {
        return Err(Error::Precondition("Gram matrix must be square and symmetric".into()));
    }
    let n = m.rows();
    Ok((0..n)
        .map(|i| (0..n).filter(|&j| j != i && !m.get(i, j).is_zero()).collect())
        .collect())
}

/// Product over a closed path of nodes in `2M`.
pub fn cycle_product(m: &Matrix, cycle: &[usize]) -> TowerElement {
    let k = cycle.len();
    let mut x = TowerElement::from_int(m.tower(), 1i64 << k);
    for i in 0..k {
        x = &x * m.get(cycle[i], cycle[(i + 1) % k]);
    }
    x
}

/// Pair products and the products over the fundamental cycles of a BFS tree
/// rooted at the first node.
pub fn cyclic_products(m: &Matrix) -> Result<CyclicProductSet> {
    let adj = support_graph(m)?;
    let n = m.rows();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut queue = VecDeque::from([0usize]);
    if n > 0 {
        parent[0] = 0;
    }
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if parent[v] == usize::MAX {
                parent[v] = u;
                depth[v] = depth[u] + 1;
                queue.push_back(v);
            }
        }
    }
    if parent.contains(&usize::MAX) {
        return Err(Error::Precondition("support graph is disconnected".into()));
    }
    let mut pairs = Vec::new();
    let mut cycles = Vec::new();
    for i in 0..n {
        for &j in adj[i].iter().filter(|&&j| j > i) {
            pairs.push(((i, j), m.get(i, j).square().scale(&Rational::from_integer(4.into()))));
            if parent[i] == j || parent[j] == i {
                continue;
            }
            // Walk both ends up to their common ancestor.
            let (mut a, mut b) = (i, j);
            let (mut left, mut right) = (vec![a], vec![b]);
            while a != b {
                if depth[a] >= depth[b] {
                    a = parent[a];
                    left.push(a);
                } else {
                    b = parent[b];
                    right.push(b);
                }
            }
            right.pop();
            right.reverse();
            // i up to the common ancestor, then down to j
            let mut cycle = left;
            cycle.extend(right);
            let value = cycle_product(m, &cycle);
            cycles.push((cycle, value));
        }
    }
    Ok(CyclicProductSet {
        pair_products: pairs,
        cycle_products: cycles,
    })
}

/// Every simple cycle of length at least three, each listed once, or `None`
/// when there are more than `limit` of them.
pub fn simple_cycles(m: &Matrix, limit: usize) -> Result<Option<Vec<Vec<usize>>>> {
    let adj = support_graph(m)?;
    let n = m.rows();
    let mut out = Vec::new();
    let mut path = Vec::new();
    let mut on_path = vec![false; n];
    fn extend(
        adj: &[Vec<usize>],
        start: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) -> bool {
        let u = *path.last().expect("nonempty path");
        for &v in &adj[u] {
            if v == start && path.len() >= 3 && path[1] < u {
                out.push(path.clone());
                if out.len() > limit {
                    return false;
                }
            } else if v > start && !on_path[v] {
                path.push(v);
                on_path[v] = true;
                let ok = extend(adj, start, path, on_path, out, limit);
                on_path[v] = false;
                path.pop();
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    for s in 0..n {
        path.push(s);
        on_path[s] = true;
        let ok = extend(&adj, s, &mut path, &mut on_path, &mut out, limit);
        on_path[s] = false;
        path.pop();
        if !ok {
            return Ok(None);
        }
    }
    Ok(Some(out))
}

fn require_rational_radical(x: &TowerElement) -> Result<()> {
    if x.is_rational_radical() {
        Ok(())
    } else {
        Err(Error::FormalSupport(format!(
            "cyclic product {x}"
        )))
    }
}

fn field_of(values: &mut dyn Iterator<Item = &TowerElement>) -> Result<TraceField> {
    let mut group = RadicandGroup::new();
    for x in values {
        require_rational_radical(x)?;
        for (mask, _) in x.terms() {
            let r = monomial_radicand(x.tower(), mask)?.expect("rational radical");
            group.insert(&r)?;
        }
    }
    Ok(TraceField { group })
}

/// The field generated by all cyclic products of `m`.
pub fn trace_field(m: &Matrix) -> Result<TraceField> {
    let set = cyclic_products(m)?;
    let field = field_of(&mut set.values())?;
    Ok(field)
}

/// A Gram matrix rescaled by `diag(scalings)` so that its entries lie in the
/// trace field.
#[derive(Debug, Clone)]
pub struct AmbientForm {
    pub matrix: Matrix,
    pub field: TraceField,
    pub scalings: Vec<TowerElement>,
}

impl AmbientForm {
    /// The matrix with entries in the field's own tower, when the field is
    /// `Q` or quadratic.
    pub fn matrix_over_field(&self) -> Result<Option<(Field, Matrix)>> {
        let Some(k) = self.field.field()? else {
            return Ok(None);
        };
        let rows = self
            .matrix
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|x| k.canonical(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let m = Matrix::from_rows(k.tower(), rows)?;
        Ok(Some((k, m)))
    }
}

/// Spanning-tree scalings: the root gets 1 and each child gets its parent's
/// scaling times twice the connecting entry.
fn tree_scalings(m: &Matrix) -> Result<Vec<TowerElement>> {
    let adj = support_graph(m)?;
    let n = m.rows();
    let mut lambda: Vec<Option<TowerElement>> = vec![None; n];
    lambda[0] = Some(TowerElement::one(m.tower()));
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        let lu = lambda[u].clone().expect("visited");
        for &v in &adj[u] {
            if lambda[v].is_none() {
                lambda[v] = Some((&lu * m.get(u, v)).scale(&Rational::from_integer(2.into())));
                queue.push_back(v);
            }
        }
    }
    lambda
        .into_iter()
        .map(|l| l.ok_or_else(|| Error::Precondition("support graph is disconnected".into())))
        .collect()
}

/// Rescales the basis so that the form is defined over the trace field.
///
/// After the tree rescaling, the nodes whose scalings differ by elements of
/// the field are grouped, the largest group is normalized to 1, and for
/// quadratic or rational fields every remaining scaling is replaced by the
/// square root of the canonical square-class representative of its square.
pub fn ambient_form(m: &Matrix) -> Result<AmbientForm> {
    let field = trace_field(m)?;
    let n = m.rows();
    let mut lambda = tree_scalings(m)?;

    let mut group_of = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if group_of[i] != usize::MAX {
            continue;
        }
        let g = groups.len();
        let mut members = vec![i];
        group_of[i] = g;
        for j in i + 1..n {
            if group_of[j] == usize::MAX && field.contains(&lambda[j].checked_div(&lambda[i])?)? {
                group_of[j] = g;
                members.push(j);
            }
        }
        groups.push(members);
    }
    let largest = groups
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
        .map(|(_, g)| g[0])
        .expect("nonempty matrix");
    let c = lambda[largest].clone();
    for l in &mut lambda {
        *l = l.checked_div(&c)?;
    }

    if let Some(k) = field.field()? {
        for l in &mut lambda {
            let sq = l.square();
            let class = k.square_class(&sq)?;
            let ratio = sq.checked_div(&class)?;
            let s = k.sqrt(&ratio)?.ok_or_else(|| {
                Error::AssumptionFailed(format!("{ratio} is not a square in {}", k.name()))
            })?;
            let abs = if l.sign()? < 0 { -&*l } else { l.clone() };
            *l = abs.checked_div(&s)?;
        }
    }

    let mut out = Matrix::zeros(m.tower(), n, n);
    for i in 0..n {
        for j in 0..n {
            let x = &(&lambda[i] * &lambda[j]) * m.get(i, j);
            if !field.contains(&x)? {
                return Err(Error::NotInField {
                    element: x.to_string(),
                    field: field.to_string(),
                });
            }
            out.set(i, j, x);
        }
    }
    Ok(AmbientForm {
        matrix: out,
        field,
        scalings: lambda,
    })
}

/// Reflections `v -> v - 2 (v^T M e_i / M_ii) e_i` as matrices acting on
/// column vectors.
pub fn reflection_matrices(m: &Matrix) -> Result<Vec<Matrix>> {
    if m.det()?.is_zero() {
        return Err(Error::Degenerate("reflections need a nondegenerate form".into()));
    }
    let n = m.rows();
    let t = m.tower();
    (0..n)
        .map(|i| {
            let mii = m.get(i, i);
            if mii.is_zero() {
                return Err(Error::Degenerate(format!("isotropic basis vector {}", i + 1)));
            }
            let mut r = Matrix::identity(t, n);
            for j in 0..n {
                let x = m.get(i, j).checked_div(mii)?.scale(&Rational::from_integer(2.into()));
                let v = r.get(i, j) - &x;
                r.set(i, j, v);
            }
            Ok(r)
        })
        .collect()
}

/// One flip mask of the tower for every nonidentity embedding of the field.
fn nonidentity_embeddings(t: &Arc<Tower>, field: &TraceField) -> Result<Vec<Embedding>> {
    let radicands = field.radicands();
    let mut monomials = Vec::with_capacity(radicands.len());
    for r in &radicands {
        let x = TowerElement::from_rational(t, Rational::from_integer(r.clone()));
        let s = t.sqrt_exact(&x).ok_or_else(|| Error::NotInField {
            element: format!("sqrt({r})"),
            field: "the matrix tower".into(),
        })?;
        monomials.push(s.support());
    }
    let rational = t.rational_mask();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    // Iterate over subsets of the rational generators.
    let mut sub = rational;
    loop {
        let character: Vec<bool> = monomials
            .iter()
            .map(|&mono| (mono & sub).count_ones() % 2 == 1)
            .collect();
        if character.iter().any(|&b| b) && seen.insert(character) {
            out.push(Embedding::flipping(sub));
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rational;
    }
    out.sort_by_key(|e| e.flips());
    Ok(out)
}

/// Signature `(dim, 1)` at the identity and positive semidefinite of rank
/// `dim + 1` at every other embedding of the field.
pub fn admissible(form: &AmbientForm, dim: usize) -> Result<bool> {
    let m = &form.matrix;
    let n = m.rows();
    if n < dim + 1 {
        return Ok(false);
    }
    let expected = Inertia {
        pos: dim,
        neg: 1,
        zero: n - dim - 1,
    };
    if m.inertia()? != expected {
        return Ok(false);
    }
    for emb in nonidentity_embeddings(m.tower(), &form.field)? {
        let s = m.inertia_at(&emb)?;
        if s.neg != 0 || s.pos != dim + 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithmeticClass {
    Arithmetic,
    ProperlyQuasiArithmetic,
    QuasiArithmeticUndeterminedIntegrality,
    NotQuasiArithmetic,
}

impl ArithmeticClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ArithmeticClass::Arithmetic => "arithmetic",
            ArithmeticClass::ProperlyQuasiArithmetic => "properly-quasi-arithmetic",
            ArithmeticClass::QuasiArithmeticUndeterminedIntegrality => {
                "quasi-arithmetic-undetermined-integrality"
            }
            ArithmeticClass::NotQuasiArithmetic => "not-quasi-arithmetic",
        }
    }

    pub fn is_quasi_arithmetic(&self) -> bool {
        *self != ArithmeticClass::NotQuasiArithmetic
    }
}

impl fmt::Display for ArithmeticClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ArithmeticClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            ArithmeticClass::Arithmetic,
            ArithmeticClass::ProperlyQuasiArithmetic,
            ArithmeticClass::QuasiArithmeticUndeterminedIntegrality,
            ArithmeticClass::NotQuasiArithmetic,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
        .ok_or_else(|| Error::Precondition(format!("unknown class '{s}'")))
    }
}

/// The matrix whose cyclic products decide the class: a simplex Gram matrix
/// with hyperideal vertices is replaced by that of its truncation.
pub fn polyhedron_gram(m: &Matrix, dim: usize) -> Result<Matrix> {
    if m.rows() == dim + 1 && !m.det()?.is_zero() {
        let s = m.inertia()?;
        if s.neg == 1 && s.pos == dim {
            return Ok(truncated_gram(m)?.0);
        }
    }
    Ok(m.clone())
}

/// Vinberg's criterion. Integrality is tested on every simple cycle when
/// there are at most [`SIMPLE_CYCLE_LIMIT`] of them, otherwise on the
/// fundamental cycles.
pub fn classify(m: &Matrix, dim: usize) -> Result<ArithmeticClass> {
    let g = polyhedron_gram(m, dim)?;
    let set = cyclic_products(&g)?;
    let field = match field_of(&mut set.values()) {
        Ok(f) => f,
        Err(Error::FormalSupport(_)) => {
            return Ok(ArithmeticClass::QuasiArithmeticUndeterminedIntegrality)
        }
        Err(e) => return Err(e),
    };
    let form = ambient_form(&g)?;
    debug_assert_eq!(form.field, field);
    if !admissible(&form, dim)? {
        return Ok(ArithmeticClass::NotQuasiArithmetic);
    }
    let Some(k) = field.field()? else {
        return Ok(ArithmeticClass::QuasiArithmeticUndeterminedIntegrality);
    };
    let cycles: Vec<TowerElement> = match simple_cycles(&g, SIMPLE_CYCLE_LIMIT)? {
        Some(c) => c.iter().map(|c| cycle_product(&g, c)).collect(),
        None => set.cycle_products.iter().map(|c| c.1.clone()).collect(),
    };
    for x in set.pair_products.iter().map(|p| &p.1).chain(cycles.iter()) {
        if !k.is_integral(x)? {
            return Ok(ArithmeticClass::ProperlyQuasiArithmetic);
        }
    }
    Ok(ArithmeticClass::Arithmetic)
}

/// [`classify`] applied to the Gram matrix of a diagram.
pub fn classify_diagram(d: &CoxeterDiagram, dim: usize) -> Result<ArithmeticClass> {
    classify(&gram_matrix(d)?, dim)
}
