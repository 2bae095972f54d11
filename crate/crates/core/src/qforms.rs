//! Nondegenerate quadratic forms over `Q` and real quadratic fields.
//!
//! Forms are symmetric [`Matrix`] values whose entries lie in a [`Field`].
//! The local invariants used are the determinant modulo squares, the
//! signature at every real place and the Hasse invariant
//! `prod_{i<j} (a_i, a_j)` of a diagonalization at odd primes. Dyadic
//! places are never evaluated directly; when the field has a single place
//! above 2 the product formula determines the Hasse invariant there.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{parse_expr, Inertia, Matrix, TowerBuilder, TowerElement};
use crate::quadfield::{Field, Place};

/// A form read from a file: optional name, base field and Gram matrix.
#[derive(Debug, Clone)]
pub struct FormData {
    pub name: Option<String>,
    pub field: Field,
    pub matrix: Matrix,
}

/// Parses `field sqrt D` (or `field Q`) followed by whitespace-separated
/// rows of expressions. `# form NAME` comments name the form.
pub fn parse_form(text: &str) -> Result<FormData> {
    let mut name = None;
    let mut field: Option<Field> = None;
    let mut b: Option<TowerBuilder> = None;
    let mut rows: Vec<Vec<TowerElement>> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let number = k + 1;
        let col = |tok: &str| tok.as_ptr() as usize - line.as_ptr() as usize + 1;
        let trimmed = line.trim_start();
        if let Some(rest) = trimmed.strip_prefix('#') {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() == 2 && toks[0] == "form" {
                name = Some(toks[1].to_string());
            }
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        if head == "field" {
            if field.is_some() {
                return Err(Error::parse(number, col(head), "duplicate 'field' line"));
            }
            let f = match toks.as_slice() {
                [_, "Q"] => Field::rationals(),
                [_, "sqrt", d] => {
                    let d: i64 = d
                        .parse()
                        .map_err(|_| Error::parse(number, col(d), format!("bad radicand '{d}'")))?;
                    Field::quadratic(d).map_err(|e| Error::parse(number, col(toks[2]), e.to_string()))?
                }
                _ => return Err(Error::parse(number, col(head), "expected 'field sqrt D' or 'field Q'")),
            };
            b = Some(TowerBuilder::new(f.tower().clone()));
            field = Some(f);
            continue;
        }
        let (Some(f), Some(builder)) = (field.as_ref(), b.as_mut()) else {
            return Err(Error::parse(number, col(head), "matrix row before 'field' line"));
        };
        let mut row = Vec::with_capacity(toks.len());
        for tok in toks {
            let c = col(tok);
            let relocate = |e: Error| match e {
                Error::Parse { column, message, .. } => Error::Parse {
                    line: number,
                    column: c + column - 1,
                    message,
                },
                other => Error::parse(number, c, other.to_string()),
            };
            let x = parse_expr(tok).and_then(|x| x.eval(builder)).map_err(relocate)?;
            row.push(f.canonical(&x).map_err(relocate)?);
        }
        rows.push(row);
    }
    let field = field.ok_or_else(|| Error::parse(1, 1, "missing 'field' line"))?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::parse(text.lines().count().max(1), 1, "empty matrix"));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::Precondition(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                r.len()
            )));
        }
    }
    let matrix = Matrix::from_rows(field.tower(), rows)?;
    if !matrix.is_symmetric() {
        return Err(Error::Precondition("form matrix is not symmetric".into()));
    }
    Ok(FormData { name, field, matrix })
}

/// Re-expresses every entry in the field's own tower.
pub fn over_field(k: &Field, m: &Matrix) -> Result<Matrix> {
    let rows = m
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|x| k.canonical(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(k.tower(), rows)
}

/// A diagonalization `T^t M T = diag(coeffs)` over the field.
#[derive(Debug, Clone)]
pub struct DiagonalForm {
    pub coeffs: Vec<TowerElement>,
    pub transition: Matrix,
}

/// Symmetric elimination in the natural order.
pub fn diagonalize(k: &Field, m: &Matrix) -> Result<DiagonalForm> {
    let order: Vec<usize> = (0..m.rows()).collect();
    diagonalize_in_order(k, m, &order)
}

/// Symmetric elimination after reordering the basis by `order`, so that
/// different orders give independent diagonalization paths.
pub fn diagonalize_in_order(k: &Field, m: &Matrix, order: &[usize]) -> Result<DiagonalForm> {
    let m = over_field(k, m)?;
    let n = m.rows();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(Error::Precondition("order is not a permutation".into()));
    }
    let t = k.tower();
    let mut perm = Matrix::zeros(t, n, n);
    for (col, &row) in order.iter().enumerate() {
        perm.set(row, col, TowerElement::one(t));
    }
    let reordered = perm.transpose().mul(&m)?.mul(&perm)?;
    let (coeffs, p) = reordered.diagonalize()?;
    if let Some(i) = coeffs.iter().position(|x| x.is_zero()) {
        return Err(Error::Degenerate(format!("zero diagonal coefficient at position {}", i + 1)));
    }
    let transition = perm.mul(&p)?;
    let check = transition.transpose().mul(&m)?.mul(&transition)?;
    if check != Matrix::diagonal(t, &coeffs)? {
        return Err(Error::AssumptionFailed("congruence certificate does not verify".into()));
    }
    Ok(DiagonalForm { coeffs, transition })
}

/// Canonical representative of `det(M)` modulo squares.
pub fn det_square_class(k: &Field, m: &Matrix) -> Result<TowerElement> {
    let det = over_field(k, m)?.det()?;
    if det.is_zero() {
        return Err(Error::Degenerate("determinant is zero".into()));
    }
    k.square_class(&det)
}

/// `prod_{i<j} (a_i, a_j)` at a real place or an odd prime.
pub fn hasse_invariant(k: &Field, d: &DiagonalForm, place: &Place) -> Result<i8> {
    let mut h = 1i8;
    for i in 0..d.coeffs.len() {
        for j in i + 1..d.coeffs.len() {
            h *= k.hilbert_symbol(&d.coeffs[i], &d.coeffs[j], place)?;
        }
    }
    Ok(h)
}

/// Signature at every real place.
pub fn signatures(k: &Field, m: &Matrix) -> Result<Vec<Inertia>> {
    let m = over_field(k, m)?;
    (0..k.degree()).map(|i| m.inertia_at(&k.embedding(i))).collect()
}

/// Odd primes dividing some coefficient of some diagonalization, plus the
/// real places: the places where a Hasse invariant can be nontrivial,
/// apart from the dyadic ones.
pub fn relevant_places(k: &Field, forms: &[&DiagonalForm]) -> Result<Vec<Place>> {
    let mut primes = BTreeSet::new();
    for d in forms {
        for a in &d.coeffs {
            primes.extend(k.odd_primes_dividing(a)?);
        }
    }
    let mut out = k.real_places();
    out.extend(primes.into_iter().map(Place::Finite));
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct FormInvariants {
    pub dim: usize,
    pub det_class: TowerElement,
    pub signatures: Vec<Inertia>,
    pub hasse: BTreeMap<Place, i8>,
}

impl PartialEq for FormInvariants {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.det_class == other.det_class
            && self.signatures == other.signatures
            && self.hasse == other.hasse
    }
}

/// Invariants at the given places, or at the form's own relevant places.
pub fn invariants(k: &Field, m: &Matrix, places: Option<&[Place]>) -> Result<FormInvariants> {
    let d = diagonalize(k, m)?;
    let owned;
    let places = match places {
        Some(p) => p,
        None => {
            owned = relevant_places(k, &[&d])?;
            &owned
        }
    };
    let mut hasse = BTreeMap::new();
    for p in places {
        hasse.insert(p.clone(), hasse_invariant(k, &d, p)?);
    }
    Ok(FormInvariants {
        dim: m.rows(),
        det_class: det_square_class(k, m)?,
        signatures: signatures(k, m)?,
        hasse,
    })
}

/// A place-local reason why two forms are not isometric.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Dimension(usize, usize),
    /// The ratio of determinants, which is not a square.
    Determinant(TowerElement),
    Signature { place: usize, left: Inertia, right: Inertia },
    Hasse { place: Place, left: i8, right: i8 },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Dimension(a, b) => write!(f, "dimensions {a} and {b} differ"),
            Witness::Determinant(r) => write!(f, "determinant ratio {r} is not a square"),
            Witness::Signature { place, left, right } => {
                write!(f, "signatures {left} and {right} differ at {}", Place::Real(*place))
            }
            Witness::Hasse { place, left, right } => {
                write!(f, "Hasse invariants {left} and {right} differ at {place}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Isometry {
    Isometric,
    /// Every invariant that differs, in the order dimension, determinant,
    /// real signatures, Hasse invariants.
    NotIsometric(Vec<Witness>),
    Inconclusive(String),
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Isometry::Isometric => f.write_str("isometric"),
            Isometry::NotIsometric(w) => {
                let parts: Vec<String> = w.iter().map(|w| w.to_string()).collect();
                write!(f, "not-isometric ({})", parts.join("; "))
            }
            Isometry::Inconclusive(why) => write!(f, "inconclusive ({why})"),
        }
    }
}

/// Hasse-Minkowski comparison over the field.
pub fn isometric_over_k(k: &Field, m1: &Matrix, m2: &Matrix) -> Result<Isometry> {
    let (m1, m2) = (over_field(k, m1)?, over_field(k, m2)?);
    if m1.rows() != m2.rows() {
        return Ok(Isometry::NotIsometric(vec![Witness::Dimension(m1.rows(), m2.rows())]));
    }
    let (d1, d2) = (m1.det()?, m2.det()?);
    if d1.is_zero() || d2.is_zero() {
        return Err(Error::Degenerate("isometry test needs nondegenerate forms".into()));
    }
    let mut witnesses = Vec::new();
    let ratio = d1.checked_div(&d2)?;
    if !k.is_square(&ratio)? {
        witnesses.push(Witness::Determinant(k.square_class(&ratio)?));
    }
    let (s1, s2) = (signatures(k, &m1)?, signatures(k, &m2)?);
    for (place, (l, r)) in s1.iter().zip(&s2).enumerate() {
        if l != r {
            witnesses.push(Witness::Signature {
                place,
                left: *l,
                right: *r,
            });
        }
    }
    let (g1, g2) = (diagonalize(k, &m1)?, diagonalize(k, &m2)?);
    for place in relevant_places(k, &[&g1, &g2])? {
        if matches!(place, Place::Real(_)) {
            continue;
        }
        let (l, r) = (hasse_invariant(k, &g1, &place)?, hasse_invariant(k, &g2, &place)?);
        if l != r {
            witnesses.push(Witness::Hasse { place, left: l, right: r });
        }
    }
    if !witnesses.is_empty() {
        return Ok(Isometry::NotIsometric(witnesses));
    }
    if k.places_above_two() == 1 {
        Ok(Isometry::Isometric)
    } else {
        Ok(Isometry::Inconclusive(format!(
            "{} has two places above 2; the dyadic Hasse invariants are not determined",
            k.name()
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Even dimension: similar forms have determinants in the same class.
    Determinant(TowerElement),
    /// Even dimension: a real place where neither sign of the scalar works.
    Signature { place: usize, left: Inertia, right: Inertia },
    /// Odd dimension: the only possible scalar class, and why it fails.
    ForcedScalar { lambda: TowerElement, witnesses: Vec<Witness> },
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Determinant(r) => write!(f, "determinant ratio {r} is not a square"),
            Certificate::Signature { place, left, right } => write!(
                f,
                "signatures {left} and {right} are not related by a scalar at {}",
                Place::Real(*place)
            ),
            Certificate::ForcedScalar { lambda, witnesses } => {
                let parts: Vec<String> = witnesses.iter().map(|w| w.to_string()).collect();
                write!(f, "the scalar must be {lambda} modulo squares, but {}", parts.join("; "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Similarity {
    Similar(TowerElement),
    NotSimilar(Certificate),
    Inconclusive(String),
}

impl Similarity {
    pub fn verdict(&self) -> &'static str {
        match self {
            Similarity::Similar(_) => "similar",
            Similarity::NotSimilar(_) => "not-similar",
            Similarity::Inconclusive(_) => "inconclusive",
        }
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Similarity::Similar(l) => write!(f, "similar (lambda = {l})"),
            Similarity::NotSimilar(c) => write!(f, "not-similar ({c})"),
            Similarity::Inconclusive(why) => write!(f, "inconclusive ({why})"),
        }
    }
}

fn scaled(m: &Matrix, lambda: &TowerElement) -> Result<Matrix> {
    let n = m.rows();
    let mut out = m.clone();
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, m.get(i, j).checked_mul(lambda)?);
        }
    }
    Ok(out)
}

/// Most generators tried for the even-dimensional scalar search.
const MAX_SCALAR_GENERATORS: usize = 12;

/// Decides whether `M1` is isometric to `lambda M2` for some nonzero
/// `lambda` in the field.
pub fn similar_over_k(k: &Field, m1: &Matrix, m2: &Matrix) -> Result<Similarity> {
    let (m1, m2) = (over_field(k, m1)?, over_field(k, m2)?);
    let n = m1.rows();
    if n != m2.rows() {
        return Err(Error::Precondition(format!(
            "dimensions {n} and {} differ",
            m2.rows()
        )));
    }
    let (d1, d2) = (m1.det()?, m2.det()?);
    if d1.is_zero() || d2.is_zero() {
        return Err(Error::Degenerate("similarity test needs nondegenerate forms".into()));
    }
    if n % 2 == 1 {
        // det(lambda M2) = lambda^n det(M2) and lambda^n = lambda mod squares.
        let lambda = k.square_class(&d1.checked_mul(&d2)?)?;
        return Ok(match isometric_over_k(k, &m1, &scaled(&m2, &lambda)?)? {
            Isometry::Isometric => Similarity::Similar(lambda),
            Isometry::NotIsometric(witnesses) => {
                Similarity::NotSimilar(Certificate::ForcedScalar { lambda, witnesses })
            }
            Isometry::Inconclusive(why) => Similarity::Inconclusive(why),
        });
    }
    let ratio = d1.checked_div(&d2)?;
    if !k.is_square(&ratio)? {
        return Ok(Similarity::NotSimilar(Certificate::Determinant(k.square_class(&ratio)?)));
    }
    let (s1, s2) = (signatures(k, &m1)?, signatures(k, &m2)?);
    for (place, (l, r)) in s1.iter().zip(&s2).enumerate() {
        let swapped = Inertia {
            pos: r.neg,
            neg: r.pos,
            zero: r.zero,
        };
        if l != r && *l != swapped {
            return Ok(Similarity::NotSimilar(Certificate::Signature {
                place,
                left: *l,
                right: *r,
            }));
        }
    }
    let gens = scalar_generators(k, &m1, &m2)?;
    if gens.len() > MAX_SCALAR_GENERATORS {
        return Ok(Similarity::Inconclusive(format!(
            "{} candidate generators exceed the search limit",
            gens.len()
        )));
    }
    let mut saw_inconclusive = false;
    for mask in 0u32..(1 << gens.len()) {
        let mut lambda = k.from_int(1);
        for (i, g) in gens.iter().enumerate() {
            if mask & (1 << i) != 0 {
                lambda = &lambda * g;
            }
        }
        match isometric_over_k(k, &m1, &scaled(&m2, &lambda)?)? {
            Isometry::Isometric => return Ok(Similarity::Similar(k.square_class(&lambda)?)),
            Isometry::Inconclusive(_) => saw_inconclusive = true,
            Isometry::NotIsometric(_) => {}
        }
    }
    Ok(Similarity::Inconclusive(if saw_inconclusive {
        "dyadic invariants undetermined for some candidate scalars".into()
    } else {
        format!("none of the {} candidate scalar classes works", 1u32 << gens.len())
    }))
}

/// `-1`, the fundamental unit, and generators of the primes above 2 and of
/// the odd primes dividing the diagonal coefficients of either form.
fn scalar_generators(k: &Field, m1: &Matrix, m2: &Matrix) -> Result<Vec<TowerElement>> {
    let mut gens = k.unit_square_classes();
    gens.retain(|u| !u.is_one());
    if gens.len() > 2 {
        // -1 and the unit already generate -unit.
        gens.truncate(2);
    }
    gens.extend(k.prime_generators(&2.into())?);
    let (g1, g2) = (diagonalize(k, m1)?, diagonalize(k, m2)?);
    for place in relevant_places(k, &[&g1, &g2])? {
        if let Place::Finite(p) = place {
            let pi = k.principal_generator(&p, 100_000)?.ok_or_else(|| {
                Error::Factorization(format!("no generator found for {p}"))
            })?;
            gens.push(pi);
        }
    }
    Ok(gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Tower;

    fn q_diag(entries: &[i64]) -> Matrix {
        let t = Tower::rationals();
        let d: Vec<TowerElement> = entries.iter().map(|&x| TowerElement::from_int(&t, x)).collect();
        Matrix::diagonal(&t, &d).unwrap()
    }

    #[test]
    fn diagonal_input_is_kept() {
        let q = Field::rationals();
        let d = diagonalize(&q, &q_diag(&[3, -5, 7])).unwrap();
        let c: Vec<String> = d.coeffs.iter().map(|x| x.to_string()).collect();
        assert_eq!(c, ["3", "-5", "7"]);
    }

    #[test]
    fn hyperbolic_plane() {
        let q = Field::rationals();
        let m = parse_form("field Q\n0 1\n1 0\n").unwrap().matrix;
        let d = diagonalize(&q, &m).unwrap();
        let prod = &d.coeffs[0] * &d.coeffs[1];
        assert!(q.same_square_class(&prod, &q.from_int(-1)).unwrap());
        assert_eq!(det_square_class(&q, &m).unwrap(), q.from_int(-1));
        assert_eq!(isometric_over_k(&q, &m, &q_diag(&[1, -1])).unwrap(), Isometry::Isometric);
    }

    #[test]
    fn unit_form_has_trivial_invariants() {
        let q = Field::rationals();
        let m = q_diag(&[1, 1, 1, 1]);
        let inv = invariants(&q, &m, None).unwrap();
        assert!(inv.det_class.is_one());
        assert!(inv.hasse.values().all(|&h| h == 1));
    }

    #[test]
    fn sums_of_two_squares() {
        let q = Field::rationals();
        match isometric_over_k(&q, &q_diag(&[1, 1]), &q_diag(&[1, 2])).unwrap() {
            Isometry::NotIsometric(w) => assert_eq!(w, vec![Witness::Determinant(q.from_int(2))]),
            other => panic!("{other:?}"),
        }
        // <1,1> and <2,2> are isometric: 2 = 1 + 1
        assert_eq!(isometric_over_k(&q, &q_diag(&[1, 1]), &q_diag(&[2, 2])).unwrap(), Isometry::Isometric);
        // <1,1> and <3,3>: same determinant, Hasse differs at 3
        match isometric_over_k(&q, &q_diag(&[1, 1]), &q_diag(&[3, 3])).unwrap() {
            Isometry::NotIsometric(w) => match w.as_slice() {
                [Witness::Hasse { place, .. }] => assert_eq!(place.to_string(), "(3)"),
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scalar_multiples_over_q() {
        let q = Field::rationals();
        let m = parse_form("field Q\n2 1 0\n1 3 1\n0 1 -4\n").unwrap().matrix;
        let m3 = scaled(&m, &q.from_int(3)).unwrap();
        assert_eq!(similar_over_k(&q, &m3, &m).unwrap(), Similarity::Similar(q.from_int(3)));
        let e = q_diag(&[1, 1, 1, -1]);
        let e3 = q_diag(&[3, 3, 3, -3]);
        assert_eq!(similar_over_k(&q, &e, &e3).unwrap().verdict(), "similar");
    }

    #[test]
    fn form_file_errors() {
        assert!(matches!(parse_form("1 0\n0 1\n"), Err(Error::Parse { line: 1, column: 1, .. })));
        assert!(matches!(
            parse_form("field sqrt 5\n1 sqrt(2)\nsqrt(2) 1\n"),
            Err(Error::Parse { line: 2, column: 3, .. })
        ));
        assert!(matches!(
            parse_form("field sqrt 5\n1 2\n3 1\n"),
            Err(Error::Precondition(_))
        ));
        let f = parse_form("# form X\nfield sqrt 5\n1 (1+sqrt(5))/2\n(1+sqrt(5))/2 1\n").unwrap();
        assert_eq!(f.name.as_deref(), Some("X"));
        assert_eq!(f.field.name(), "Q(sqrt 5)");
    }
}
