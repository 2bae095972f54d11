//! Garlands: chains of Coxeter polyhedra glued end to end along facets that
//! meet all their neighbours at right angles.
//!
//! Two pieces `P_1`, `P_2` with distinct ambient groups are glued according
//! to a word over `{1, 2}`. Garlands whose doubled words `(w, reverse(w))`
//! are cyclic rotations of each other are treated as one class, and every
//! count here is a count of such classes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::coxeter::{double_polyhedron, gram_matrix, parse_diagram};
use crate::error::{Error, Result};
use crate::exact::{Matrix, Rational};
use crate::qforms::{invariants, relevant_places, diagonalize, similar_over_k, FormInvariants, Similarity};
use crate::quadfield::Field;
use crate::vinberg::{ambient_form, classify, ArithmeticClass};
use crate::{CoxeterDiagram, EdgeKind};

/// Longest word length accepted by the exhaustive counters.
pub const MAX_WORD_LENGTH: usize = 24;

/// A nonempty word over the letters 1 and 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GarlandWord(Vec<u8>);

impl GarlandWord {
    pub fn new(letters: Vec<u8>) -> Result<GarlandWord> {
        if letters.is_empty() {
            return Err(Error::Precondition("a garland word needs at least one letter".into()));
        }
        if let Some(c) = letters.iter().find(|&&c| c != 1 && c != 2) {
            return Err(Error::Precondition(format!("letter {c} is not 1 or 2")));
        }
        Ok(GarlandWord(letters))
    }

    /// The word of length `n` whose letter `i` is 2 exactly when bit `i` is set.
    pub fn from_bits(bits: u64, n: usize) -> GarlandWord {
        GarlandWord((0..n).map(|i| 1 + ((bits >> i) & 1) as u8).collect())
    }

    pub fn to_bits(&self) -> Option<u64> {
        (self.len() <= 64).then(|| {
            self.0
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &c)| acc | (u64::from(c - 1) << i))
        })
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, letter: u8) -> bool {
        self.0.contains(&letter)
    }

    pub fn count(&self, letter: u8) -> usize {
        self.0.iter().filter(|&&c| c == letter).count()
    }

    /// `(w, reverse(w))`.
    pub fn doubled(&self) -> Vec<u8> {
        self.0.iter().chain(self.0.iter().rev()).copied().collect()
    }
}

impl fmt::Display for GarlandWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for GarlandWord {
    type Err = Error;

    /// Accepts `121`, `1,2,1` and `(1, 2, 1)`.
    fn from_str(s: &str) -> Result<GarlandWord> {
        let letters = s
            .chars()
            .filter(|c| !matches!(c, ',' | ' ' | '(' | ')'))
            .map(|c| match c {
                '1' => Ok(1),
                '2' => Ok(2),
                _ => Err(Error::Precondition(format!("'{c}' is not a garland letter"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        GarlandWord::new(letters)
    }
}

pub fn mirror(w: &GarlandWord) -> GarlandWord {
    GarlandWord(w.0.iter().rev().copied().collect())
}

/// Whether the doubled words of `a` and `b` are cyclic rotations of each
/// other. Words of different lengths are never equivalent.
pub fn equivalent(a: &GarlandWord, b: &GarlandWord) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let da = a.doubled();
    let db = b.doubled();
    let m = da.len();
    (0..m).any(|k| (0..m).all(|i| da[(i + k) % m] == db[i]))
}

fn check_length(n: usize) -> Result<()> {
    if n == 0 || n > MAX_WORD_LENGTH {
        return Err(Error::OutOfRange(format!(
            "word length {n} outside 1..={MAX_WORD_LENGTH}"
        )));
    }
    Ok(())
}

fn reverse_bits(x: u64, n: usize) -> u64 {
    x.reverse_bits() >> (64 - n)
}

/// The distinct words `b` with `equivalent(w, b)`, as bit patterns.
fn class_members(w: u64, n: usize) -> Vec<u64> {
    let m = 2 * n;
    let low = (1u64 << n) - 1;
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let d = w | (reverse_bits(w, n) << n);
    let mut out = Vec::with_capacity(2);
    for k in 0..m {
        let r = if k == 0 { d } else { ((d >> k) | (d << (m - k))) & full };
        let b = r & low;
        if r >> n == reverse_bits(b, n) && !out.contains(&b) {
            out.push(b);
        }
    }
    out
}

/// Summary of the exhaustive enumeration of `{1, 2}^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCensus {
    pub n: usize,
    pub classes: u64,
    /// Classes by the number of letters 2 in their words.
    pub by_twos: Vec<u64>,
    pub largest_class: usize,
}

impl ClassCensus {
    /// `2^n / (2n)`, as an exact fraction.
    pub fn mirror_bound(&self) -> Rational {
        Rational::new((1u64 << self.n).into(), (2 * self.n as u64).into())
    }

    /// `2^n / n`.
    pub fn rotation_bound(&self) -> Rational {
        Rational::new((1u64 << self.n).into(), (self.n as u64).into())
    }
}

/// Enumerates all `2^n` words in parallel, counting each class at its
/// smallest member.
pub fn census(n: usize) -> Result<ClassCensus> {
    check_length(n)?;
    let (by_twos, largest) = (0..1u64 << n)
        .into_par_iter()
        .fold(
            || (vec![0u64; n + 1], 0usize),
            |(mut counts, largest), w| {
                let members = class_members(w, n);
                if members.iter().all(|&b| w <= b) {
                    counts[w.count_ones() as usize] += 1;
                    (counts, largest.max(members.len()))
                } else {
                    (counts, largest)
                }
            },
        )
        .reduce(
            || (vec![0u64; n + 1], 0usize),
            |(mut a, la), (b, lb)| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                (a, la.max(lb))
            },
        );
    Ok(ClassCensus {
        n,
        classes: by_twos.iter().sum(),
        by_twos,
        largest_class: largest,
    })
}

pub fn count_classes(n: usize) -> Result<u64> {
    Ok(census(n)?.classes)
}

/// The smallest member of every class, in increasing order of bit pattern.
pub fn class_representatives(n: usize) -> Result<Vec<GarlandWord>> {
    check_length(n)?;
    let mut reps: Vec<u64> = (0..1u64 << n)
        .into_par_iter()
        .filter(|&w| class_members(w, n).iter().all(|&b| w <= b))
        .collect();
    reps.sort_unstable();
    Ok(reps.into_iter().map(|w| GarlandWord::from_bits(w, n)).collect())
}

/// Classes of words whose total volume `sum v_{w_i}` is at most `budget`.
pub fn count_by_volume(budget: &Rational, volumes: [&Rational; 2]) -> Result<u64> {
    let zero = Rational::from_integer(0.into());
    if volumes.iter().any(|v| **v <= zero) {
        return Err(Error::Precondition("piece volumes must be positive".into()));
    }
    if *budget <= zero {
        return Ok(0);
    }
    let smallest = volumes[0].min(volumes[1]);
    let longest = (budget / smallest).floor().to_integer();
    let longest: usize = longest
        .try_into()
        .ok()
        .filter(|&l: &usize| l <= MAX_WORD_LENGTH)
        .ok_or_else(|| {
            Error::OutOfRange(format!(
                "volume {budget} allows words longer than {MAX_WORD_LENGTH}"
            ))
        })?;
    let mut total = 0;
    for n in 1..=longest {
        let c = census(n)?;
        for (twos, count) in c.by_twos.iter().enumerate() {
            let v = volumes[0] * Rational::from_integer((n - twos).into())
                + volumes[1] * Rational::from_integer(twos.into());
            if v <= *budget {
                total += count;
            }
        }
    }
    Ok(total)
}

/// Outcome of checking the gluing hypotheses on marked facets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssumptionCheck {
    /// Two nonadjacent marked facets with isomorphic orthogonal links.
    TwoSided { links: [Vec<usize>; 2] },
    OneSided { link: Vec<usize> },
    Fails(String),
}

impl AssumptionCheck {
    pub fn holds(&self) -> bool {
        !matches!(self, AssumptionCheck::Fails(_))
    }
}

impl fmt::Display for AssumptionCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssumptionCheck::TwoSided { .. } => f.write_str("two-sided"),
            AssumptionCheck::OneSided { .. } => f.write_str("one-sided"),
            AssumptionCheck::Fails(r) => write!(f, "fails: {r}"),
        }
    }
}

/// Facets meeting `f` at a right angle.
pub fn orthogonal_link(d: &CoxeterDiagram, f: usize) -> Vec<usize> {
    (0..d.n()).filter(|&j| j != f && d.edge(f, j).is_none()).collect()
}

/// Checks that each marked facet meets its neighbours orthogonally, that two
/// marked facets are disjoint, and that their facets are isomorphic as
/// judged by the subdiagrams of orthogonal neighbours.
pub fn check_assumption(d: &CoxeterDiagram, marked: &[usize]) -> Result<AssumptionCheck> {
    if marked.is_empty() || marked.len() > 2 {
        return Err(Error::Precondition(format!(
            "mark one or two facets, not {}",
            marked.len()
        )));
    }
    if let Some(&f) = marked.iter().find(|&&f| f >= d.n()) {
        return Err(Error::OutOfRange(format!("facet {}", f + 1)));
    }
    if marked.len() == 2 && marked[0] == marked[1] {
        return Err(Error::Precondition("the two marked facets coincide".into()));
    }
    for &f in marked {
        for j in d.neighbours(f) {
            if let Some(EdgeKind::Label(m)) = d.edge(f, j) {
                return Ok(AssumptionCheck::Fails(format!(
                    "facet {} meets facet {} at angle pi/{m}",
                    d.node_name(f),
                    d.node_name(j)
                )));
            }
        }
    }
    let links: Vec<Vec<usize>> = marked.iter().map(|&f| orthogonal_link(d, f)).collect();
    if marked.len() == 1 {
        return Ok(AssumptionCheck::OneSided { link: links[0].clone() });
    }
    let (a, b) = (marked[0], marked[1]);
    if !matches!(d.edge(a, b), Some(EdgeKind::Dotted(_) | EdgeKind::Heavy)) {
        return Ok(AssumptionCheck::Fails(format!(
            "facets {} and {} are adjacent",
            d.node_name(a),
            d.node_name(b)
        )));
    }
    if !d.subdiagram(&links[0]).is_isomorphic(&d.subdiagram(&links[1])) {
        return Ok(AssumptionCheck::Fails(format!(
            "facets {} and {} have non-isomorphic links",
            d.node_name(a),
            d.node_name(b)
        )));
    }
    Ok(AssumptionCheck::TwoSided {
        links: [links[0].clone(), links[1].clone()],
    })
}

/// The gluing facets of a piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    TwoSided { minus: usize, plus: usize },
    OneSided(usize),
}

impl Boundary {
    fn facets(&self) -> Vec<usize> {
        match *self {
            Boundary::TwoSided { minus, plus } => vec![minus, plus],
            Boundary::OneSided(f) => vec![f],
        }
    }

    fn minus(&self) -> usize {
        match *self {
            Boundary::TwoSided { minus, .. } | Boundary::OneSided(minus) => minus,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Piece {
    /// The diagram file the piece was built from.
    pub source: String,
    pub diagram: CoxeterDiagram,
    pub boundary: Boundary,
    pub volume: Rational,
    pub class: ArithmeticClass,
    /// The ambient form on a basis of facet normals, over the trace field.
    pub ambient: Option<(Field, Matrix)>,
}

impl Piece {
    fn build(
        source: String,
        diagram: CoxeterDiagram,
        boundary: Boundary,
        volume: Rational,
        dim: usize,
    ) -> Result<Piece> {
        match check_assumption(&diagram, &boundary.facets())? {
            AssumptionCheck::Fails(r) => return Err(Error::AssumptionFailed(r)),
            AssumptionCheck::OneSided { .. } if matches!(boundary, Boundary::TwoSided { .. }) => {
                unreachable!("two marked facets give a two-sided check")
            }
            _ => {}
        }
        let g = gram_matrix(&diagram)?;
        let class = classify(&g, dim)?;
        let ambient = match ambient_form(&g)?.matrix_over_field()? {
            Some((k, m)) => Some((k, spanning_restriction(&m)?)),
            None => None,
        };
        Ok(Piece {
            source,
            diagram,
            boundary,
            volume,
            class,
            ambient,
        })
    }

    /// The facets orthogonal to the first gluing facet.
    pub fn link(&self) -> CoxeterDiagram {
        self.diagram
            .subdiagram(&orthogonal_link(&self.diagram, self.boundary.minus()))
    }
}

/// The form restricted to a greedily chosen set of basis vectors spanning
/// the same space as all of them.
fn spanning_restriction(m: &Matrix) -> Result<Matrix> {
    let all: Vec<usize> = (0..m.cols()).collect();
    let target = m.rank()?;
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..m.rows() {
        if chosen.len() == target {
            break;
        }
        chosen.push(i);
        if m.submatrix(&chosen, &all).rank()? < chosen.len() {
            chosen.pop();
        }
    }
    Ok(m.principal(&chosen))
}

/// Two pieces together with the verified data the class rules rely on.
#[derive(Debug, Clone)]
pub struct PieceCatalog {
    pub name: String,
    pub dim: usize,
    pub pieces: [Piece; 2],
    /// Ambient invariants of both pieces at a common set of places.
    pub invariants: Option<[FormInvariants; 2]>,
    /// Whether the two ambient forms are similar over the common field.
    pub ambient_relation: Option<Similarity>,
}

impl PieceCatalog {
    /// Parses a catalog, loading diagrams through `load`.
    ///
    /// ```text
    /// catalog h4
    /// dimension 4
    /// piece 1 P1_4.cox double 6 minus 7 plus 7' volume 1
    /// piece 2 P2_4.cox double 6 minus 7 plus 7' volume 1
    /// ```
    ///
    /// `double F` replaces the diagram by its double along facet `F`;
    /// `boundary F` marks a single gluing facet. Facets are named as in the
    /// (doubled) diagram.
    pub fn parse(text: &str, load: &dyn Fn(&str) -> Result<String>) -> Result<PieceCatalog> {
        let mut name = None;
        let mut dim = None;
        let mut specs: BTreeMap<u8, (usize, Vec<&str>)> = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line_no = k + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            let err = |msg: String| Error::parse(line_no, 1, msg);
            match toks[0] {
                "catalog" if toks.len() == 2 => name = Some(toks[1].to_string()),
                "dimension" if toks.len() == 2 => {
                    dim = Some(toks[1].parse::<usize>().map_err(|e| err(e.to_string()))?)
                }
                "piece" if toks.len() >= 3 => {
                    let label = match toks[1] {
                        "1" => 1,
                        "2" => 2,
                        other => return Err(err(format!("piece label '{other}' is not 1 or 2"))),
                    };
                    if specs.insert(label, (line_no, toks[2..].to_vec())).is_some() {
                        return Err(err(format!("piece {label} listed twice")));
                    }
                }
                other => return Err(err(format!("unexpected '{other}'"))),
            }
        }
        let name = name.ok_or_else(|| Error::parse(1, 1, "missing 'catalog NAME'"))?;
        let dim = dim.ok_or_else(|| Error::parse(1, 1, "missing 'dimension D'"))?;
        let mut built = Vec::new();
        for label in [1u8, 2] {
            let (line_no, toks) = specs
                .remove(&label)
                .ok_or_else(|| Error::parse(1, 1, format!("missing piece {label}")))?;
            built.push(piece_from_tokens(line_no, &toks, dim, load)?);
        }
        let p2 = built.pop().expect("two pieces");
        let p1 = built.pop().expect("two pieces");
        PieceCatalog::new(name, dim, [p1, p2])
    }

    /// Verifies that the pieces can be glued to each other and compares
    /// their ambient forms.
    pub fn new(name: String, dim: usize, pieces: [Piece; 2]) -> Result<PieceCatalog> {
        if matches!(pieces[1].boundary, Boundary::OneSided(_)) {
            return Err(Error::AssumptionFailed(
                "piece 2 needs two gluing facets".into(),
            ));
        }
        if !pieces[0].link().is_isomorphic(&pieces[1].link()) {
            return Err(Error::AssumptionFailed(
                "the gluing facets of the two pieces are not isomorphic".into(),
            ));
        }
        let (invariants, ambient_relation) = match (&pieces[0].ambient, &pieces[1].ambient) {
            (Some((k1, m1)), Some((k2, m2))) if k1.name() == k2.name() && m1.rows() == m2.rows() => {
                let d1 = diagonalize(k1, m1)?;
                let d2 = diagonalize(k1, m2)?;
                let places = relevant_places(k1, &[&d1, &d2])?;
                let inv = [
                    invariants(k1, m1, Some(&places))?,
                    invariants(k1, m2, Some(&places))?,
                ];
                (Some(inv), Some(similar_over_k(k1, m1, m2)?))
            }
            _ => (None, None),
        };
        Ok(PieceCatalog {
            name,
            dim,
            pieces,
            invariants,
            ambient_relation,
        })
    }

    /// Both pieces are quasi-arithmetic and their ambient forms are proved
    /// not to be similar.
    pub fn distinct_ambient_groups(&self) -> bool {
        self.pieces.iter().all(|p| p.class.is_quasi_arithmetic())
            && matches!(self.ambient_relation, Some(Similarity::NotSimilar(_)))
    }

    pub fn piece(&self, letter: u8) -> &Piece {
        &self.pieces[usize::from(letter - 1)]
    }

    pub fn volume_of(&self, w: &GarlandWord) -> Rational {
        w.letters()
            .iter()
            .fold(Rational::from_integer(0.into()), |acc, &c| acc + &self.piece(c).volume)
    }

    pub fn count_by_volume(&self, budget: &Rational) -> Result<u64> {
        count_by_volume(budget, [&self.pieces[0].volume, &self.pieces[1].volume])
    }
}

fn piece_from_tokens(
    line_no: usize,
    toks: &[&str],
    dim: usize,
    load: &dyn Fn(&str) -> Result<String>,
) -> Result<Piece> {
    let err = |msg: String| Error::parse(line_no, 1, msg);
    let source = toks[0].to_string();
    let mut diagram = parse_diagram(&load(&source)?)?;
    let mut opts: BTreeMap<&str, &str> = BTreeMap::new();
    for pair in toks[1..].chunks(2) {
        match pair {
            [k, v] if matches!(*k, "double" | "minus" | "plus" | "boundary" | "volume") => {
                if opts.insert(k, v).is_some() {
                    return Err(err(format!("'{k}' given twice")));
                }
            }
            [k, ..] => return Err(err(format!("unexpected '{k}'"))),
            [] => unreachable!(),
        }
    }
    let facet = |d: &CoxeterDiagram, name: &str| {
        d.find_node(name)
            .ok_or_else(|| err(format!("no facet named '{name}' in {source}")))
    };
    if let Some(f) = opts.get("double") {
        let f = facet(&diagram, f)?;
        diagram = double_polyhedron(&diagram, f)?;
    }
    let boundary = match (opts.get("minus"), opts.get("plus"), opts.get("boundary")) {
        (Some(m), Some(p), None) => Boundary::TwoSided {
            minus: facet(&diagram, m)?,
            plus: facet(&diagram, p)?,
        },
        (None, None, Some(b)) => Boundary::OneSided(facet(&diagram, b)?),
        _ => return Err(err("give either 'minus' and 'plus' or 'boundary'".into())),
    };
    let volume = match opts.get("volume") {
        Some(v) => v
            .parse::<Rational>()
            .map_err(|_| err(format!("bad volume '{v}'")))?,
        None => Rational::from_integer(1.into()),
    };
    if volume <= Rational::from_integer(0.into()) {
        return Err(err("volume must be positive".into()));
    }
    Piece::build(source, diagram, boundary, volume, dim)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let p = self.0[i];
        if p == i {
            return i;
        }
        let r = self.find(p);
        self.0[i] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // The smaller index stays the root so that names follow first use.
        if ra < rb {
            self.0[rb] = ra;
        } else if rb < ra {
            self.0[ra] = rb;
        }
    }
}

/// Glues the pieces in order, gluing the `plus` facet of each piece to the
/// `minus` facet (or single boundary facet) of the next one.
fn glue(pieces: &[&Piece], name: String) -> Result<CoxeterDiagram> {
    let mut offset = Vec::with_capacity(pieces.len());
    let mut total = 0;
    for p in pieces {
        offset.push(total);
        total += p.diagram.n();
    }
    let mut uf = UnionFind((0..total).collect());
    let mut removed = vec![false; total];
    for c in 0..pieces.len().saturating_sub(1) {
        let (a, b) = (pieces[c], pieces[c + 1]);
        let Boundary::TwoSided { plus, .. } = a.boundary else {
            return Err(Error::AssumptionFailed(format!(
                "piece {} of the garland has only one gluing facet",
                c + 1
            )));
        };
        let minus = b.boundary.minus();
        let la = orthogonal_link(&a.diagram, plus);
        let lb = orthogonal_link(&b.diagram, minus);
        let map = a
            .diagram
            .subdiagram(&la)
            .isomorphism(&b.diagram.subdiagram(&lb))
            .ok_or_else(|| {
                Error::AssumptionFailed(format!(
                    "facets glued between pieces {} and {} are not isomorphic",
                    c + 1,
                    c + 2
                ))
            })?;
        for (i, &x) in la.iter().enumerate() {
            uf.union(offset[c] + x, offset[c + 1] + lb[map[i]]);
        }
        removed[offset[c] + plus] = true;
        removed[offset[c + 1] + minus] = true;
    }

    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut names = Vec::new();
    for c in 0..pieces.len() {
        for i in 0..pieces[c].diagram.n() {
            let g = offset[c] + i;
            if removed[g] {
                continue;
            }
            let r = uf.find(g);
            if let std::collections::btree_map::Entry::Vacant(e) = index.entry(r) {
                e.insert(names.len());
                names.push(format!("{}.{}", c + 1, pieces[c].diagram.node_name(i)));
            }
        }
    }
    // Relations seen inside some piece; `None` records a right angle.
    let mut known: BTreeMap<(usize, usize), Option<String>> = BTreeMap::new();
    for (c, p) in pieces.iter().enumerate() {
        let d = &p.diagram;
        for i in 0..d.n() {
            for j in i + 1..d.n() {
                let (gi, gj) = (offset[c] + i, offset[c] + j);
                if removed[gi] || removed[gj] {
                    continue;
                }
                let (a, b) = (index[&uf.find(gi)], index[&uf.find(gj)]);
                if a == b {
                    return Err(Error::AssumptionFailed(format!(
                        "facets {} and {} of piece {} would be identified",
                        d.node_name(i),
                        d.node_name(j),
                        c + 1
                    )));
                }
                let rel = d.edge(i, j).map(edge_text);
                let k = (a.min(b), a.max(b));
                match known.get(&k) {
                    Some(prev) if *prev != rel => {
                        return Err(Error::AssumptionFailed(format!(
                            "facets {} and {} meet differently in different pieces",
                            names[k.0], names[k.1]
                        )))
                    }
                    Some(_) => {}
                    None => {
                        known.insert(k, rel);
                    }
                }
            }
        }
    }
    let n = names.len();
    let mut text = format!("diagram {name}\nvertices {n}\n");
    for (i, nm) in names.iter().enumerate() {
        text.push_str(&format!("# node {} {nm}\n", i + 1));
    }
    for a in 0..n {
        for b in a + 1..n {
            let kind = match known.get(&(a, b)) {
                Some(Some(k)) => k.clone(),
                Some(None) => continue,
                None => "dotted w=?".to_string(),
            };
            text.push_str(&format!("edge {} {} {kind}\n", a + 1, b + 1));
        }
    }
    parse_diagram(&text)
}

fn edge_text(e: &EdgeKind) -> String {
    match e {
        EdgeKind::Label(m) => format!("m={m}"),
        EdgeKind::Heavy => "m=inf".into(),
        EdgeKind::Dotted(None) => "dotted w=?".into(),
        EdgeKind::Dotted(Some(w)) => format!("dotted w={}", w.source),
    }
}

/// The combinatorial diagram of the garland `P_w`. Facets of different
/// pieces that are not identified get unknown dotted edges.
pub fn garland_diagram(catalog: &PieceCatalog, w: &GarlandWord) -> Result<CoxeterDiagram> {
    if w.len() == 1 {
        return Ok(catalog.piece(w.letters()[0]).diagram.clone());
    }
    let pieces: Vec<&Piece> = w.letters().iter().map(|&c| catalog.piece(c)).collect();
    glue(&pieces, format!("{}-garland-{w}", catalog.name))
}

/// `L_n`: `n` copies of piece 2 capped at the end by piece 1.
pub fn capped_diagram(catalog: &PieceCatalog, n: usize) -> Result<CoxeterDiagram> {
    if n == 0 {
        return Err(Error::OutOfRange("L_n needs n >= 1".into()));
    }
    let mut pieces: Vec<&Piece> = vec![catalog.piece(2); n];
    pieces.push(catalog.piece(1));
    glue(&pieces, format!("{}-capped-{n}", catalog.name))
}

/// The arithmeticity class of `P_w`. A word using both letters glues pieces
/// with non-similar ambient forms, so no admissible group contains the
/// result. A single-letter word keeps its piece's class.
pub fn classify_garland(catalog: &PieceCatalog, w: &GarlandWord) -> Result<ArithmeticClass> {
    if !catalog.distinct_ambient_groups() {
        return Err(Error::Precondition(format!(
            "catalog {} does not have verified distinct ambient groups",
            catalog.name
        )));
    }
    if w.contains(1) && w.contains(2) {
        Ok(ArithmeticClass::NotQuasiArithmetic)
    } else {
        Ok(catalog.piece(w.letters()[0]).class)
    }
}
