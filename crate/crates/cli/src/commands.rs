//! The individual subcommands. Each returns an [`Outcome`]: a report and a
//! human-readable rendering of it.

use coxarith::coxeter::{
    gram_matrix, numeric_signature, parse_diagram, solve_truncation_weights_numeric,
    verify_truncation_weights, vertex_links, SolverOptions, VertexKind,
};
use coxarith::garland::{
    census, class_representatives, classify_garland, GarlandWord, PieceCatalog,
};
use coxarith::qforms::{parse_form, similar_over_k, Certificate, Similarity, Witness as FormWitness};
use coxarith::vinberg::{classify, polyhedron_gram, trace_field};
use coxarith::{
    CoxeterDiagram, EdgeKind, Error, Field, Inertia, Matrix, Place, PrimeKind, Rational, Result,
    TowerElement,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::dataset::Dataset;
use crate::report::{Check, Report, Verdict};

/// Tolerance for the floating-point signature cross-check.
const FLOAT_TOLERANCE: f64 = 1e-9;

/// Largest allowed gap between a solved weight and a known one.
pub const SOLVER_TOLERANCE: f64 = 1e-9;

pub struct Outcome {
    pub report: Report,
    pub text: String,
}

impl Outcome {
    fn single(command: &str, check: Check, text: String) -> Outcome {
        Outcome {
            report: Report::new(command, vec![check]),
            text,
        }
    }
}

pub fn load_diagram(data: &Dataset, arg: &str) -> Result<CoxeterDiagram> {
    parse_diagram(&data.resolve(arg)?)
}

/// The dimension of the space a Gram matrix lives in: its positive index
/// when it has exactly one negative eigenvalue.
fn hyperbolic_dim(s: &Inertia) -> Result<usize> {
    if s.neg != 1 {
        return Err(Error::Precondition(format!(
            "Gram signature {s} is not hyperbolic; pass --dim"
        )));
    }
    Ok(s.pos)
}

fn expectation(check: Check, expect: Option<&str>) -> Check {
    match expect {
        Some(e) => check.expect(e),
        None => check,
    }
}

pub fn gram(data: &Dataset, file: &str) -> Result<Outcome> {
    let d = load_diagram(data, file)?;
    let g = gram_matrix(&d)?;
    let rows: Vec<String> = g
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("  "))
        .collect();
    let mut check = Check::new("gram", &[file], format!("{}x{}", g.rows(), g.cols()));
    for (i, row) in rows.iter().enumerate() {
        check = check.witness(format!("row {}", i + 1), row.clone());
    }
    Ok(Outcome::single("gram", check, rows.join("\n")))
}

pub fn signature(data: &Dataset, file: &str, expect: Option<&str>) -> Result<Outcome> {
    let d = load_diagram(data, file)?;
    let exact = gram_matrix(&d)?.inertia()?;
    let float = numeric_signature(&d, FLOAT_TOLERANCE)?;
    let check = Check::new("signature", &[file], exact.to_string())
        .witness("float", float.to_string())
        .require(exact == float);
    let check = expectation(check, expect);
    let mut text = exact.to_string();
    if exact != float {
        text.push_str(&format!("\nwarning: floating-point eigenvalues give {float}"));
    }
    Ok(Outcome::single("signature", check, text))
}

pub fn tracefield(data: &Dataset, file: &str, expect: Option<&str>) -> Result<Outcome> {
    let d = load_diagram(data, file)?;
    let field = trace_field(&gram_matrix(&d)?)?;
    let check = Check::new("tracefield", &[file], field.to_string());
    let check = expectation(check, expect);
    Ok(Outcome::single("tracefield", check, field.to_string()))
}

pub fn classify_file(
    data: &Dataset,
    file: &str,
    dim: Option<usize>,
    expect: Option<&str>,
) -> Result<Outcome> {
    let d = load_diagram(data, file)?;
    let g = gram_matrix(&d)?;
    let dim = match dim {
        Some(k) => k,
        None => hyperbolic_dim(&g.inertia()?)?,
    };
    let class = classify(&g, dim)?;
    let field = trace_field(&polyhedron_gram(&g, dim)?)?;
    let text = format!("{class}, trace field {field}");
    let check = Check::new("classify", &[file], class.as_str()).witness("trace field", field.to_string());
    let check = expectation(check, expect);
    Ok(Outcome::single("classify", check, text))
}

/// Accepts `Q`, `5`, `sqrt 5`, `sqrt5`, `sqrt(5)` and `Q(sqrt 5)`.
pub fn parse_field(s: &str) -> Result<Field> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = t
        .strip_prefix("Q(")
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(&t);
    if inner == "Q" || inner == "1" {
        return Ok(Field::rationals());
    }
    let digits = inner
        .strip_prefix("sqrt")
        .unwrap_or(inner)
        .trim_start_matches('(')
        .trim_end_matches(')');
    let d: i64 = digits
        .parse()
        .map_err(|_| Error::Precondition(format!("cannot read field '{s}'")))?;
    Field::quadratic(d)
}

/// Writes an element of Q(sqrt 5) as `(s + t a)/D` with `a = (1 + sqrt 5)/2`
/// and integers `s`, `t`, `D`. Other fields use the radical form.
pub fn render(k: &Field, x: &TowerElement) -> String {
    if k.d() != BigInt::from(5) {
        return x.to_string();
    }
    let Ok((u, v)) = k.coords(x) else {
        return x.to_string();
    };
    let (s, t) = (&u - &v, &v + &v);
    let den = s.denom().lcm(t.denom());
    let scale = Rational::from_integer(den.clone());
    let (s, t) = ((s * &scale).to_integer(), (t * &scale).to_integer());
    let mut body = String::new();
    if !s.is_zero() || t.is_zero() {
        body.push_str(&s.to_string());
    }
    if !t.is_zero() {
        if t.is_negative() {
            body.push('-');
        } else if !body.is_empty() {
            body.push('+');
        }
        if !t.abs().is_one() {
            body.push_str(&t.abs().to_string());
        }
        body.push('a');
    }
    if den.is_one() {
        body
    } else {
        format!("({body})/{den}")
    }
}

/// `p5=(gen)` for a principal prime, the ideal itself otherwise.
pub fn describe_place(k: &Field, place: &Place) -> String {
    let Place::Finite(p) = place else {
        return place.to_string();
    };
    let d = k.d();
    let generator = match (&p.kind, k.as_quadratic()) {
        // when p = d the prime is (sqrt d); for d = 5, -sqrt 5 = 1 - 2a
        (PrimeKind::Ramified, Some(q)) if d == p.p => Some(-q.sqrt_d()),
        _ => k.principal_generator(p, 50).ok().flatten(),
    };
    match generator {
        Some(g) => format!("p{}=({})", p.p, render(k, &g)),
        None => format!("p{}={p}", p.p),
    }
}

fn form_witnesses(k: &Field, check: Check, ws: &[FormWitness]) -> Check {
    ws.iter().fold(check, |c, w| match w {
        FormWitness::Hasse { place, left, right } => {
            c.witness(describe_place(k, place), format!("hasse {left} vs {right}"))
        }
        FormWitness::Determinant(r) => c.witness("determinant", r.to_string()),
        FormWitness::Signature { place, left, right } => {
            c.witness(Place::Real(*place).to_string(), format!("signature {left} vs {right}"))
        }
        FormWitness::Dimension(a, b) => c.witness("dimension", format!("{a} vs {b}")),
    })
}

/// One-line summary of a similarity verdict.
pub fn similarity_line(k: &Field, s: &Similarity, ratio: &TowerElement) -> Result<String> {
    Ok(match s {
        Similarity::Similar(l) => format!("similar: lambda={l}"),
        Similarity::NotSimilar(Certificate::ForcedScalar { witnesses, lambda }) => {
            match witnesses.iter().find(|w| matches!(w, FormWitness::Hasse { .. })) {
                Some(FormWitness::Hasse { place, .. }) => {
                    format!("not-similar: Hasse mismatch at {}", describe_place(k, place))
                }
                _ => format!("not-similar: no form {lambda} * B is isometric to A"),
            }
        }
        Similarity::NotSimilar(Certificate::Determinant(_)) => {
            let r = k.canonical(ratio)?;
            format!("not-similar: det ratio {} not a square (norm {})", render(k, &r), k.norm(&r)?)
        }
        Similarity::NotSimilar(c @ Certificate::Signature { .. }) => format!("not-similar: {c}"),
        Similarity::Inconclusive(why) => format!("inconclusive: {why}"),
    })
}

pub fn similar(
    data: &Dataset,
    a: &str,
    b: &str,
    field: Option<&str>,
    expect: Option<&str>,
) -> Result<Outcome> {
    let fa = parse_form(&data.resolve(a)?)?;
    let fb = parse_form(&data.resolve(b)?)?;
    let k = match field {
        Some(f) => parse_field(f)?,
        None if fa.field.name() == fb.field.name() => fa.field.clone(),
        None => {
            return Err(Error::Precondition(format!(
                "forms are over {} and {}; pass --field",
                fa.field.name(),
                fb.field.name()
            )))
        }
    };
    let s = similar_over_k(&k, &fa.matrix, &fb.matrix)?;
    let ratio = fa.matrix.det()?.checked_div(&fb.matrix.det()?)?;
    let line = similarity_line(&k, &s, &ratio)?;
    let mut check = Check::new("similar", &[a, b], s.verdict()).witness("field", k.name());
    let mut text = line.clone();
    match &s {
        Similarity::Similar(l) => check = check.witness("lambda", l.to_string()),
        Similarity::NotSimilar(Certificate::ForcedScalar { lambda, witnesses }) => {
            check = check.witness("lambda", lambda.to_string());
            check = form_witnesses(&k, check, witnesses);
            text.push_str(&format!("\n  forced scalar class: {}", render(&k, lambda)));
            for w in witnesses {
                let line = match w {
                    FormWitness::Hasse { place, left, right } => format!(
                        "Hasse invariants {left} and {right} differ at {}",
                        describe_place(&k, place)
                    ),
                    other => other.to_string(),
                };
                text.push_str(&format!("\n  {line}"));
            }
        }
        Similarity::NotSimilar(Certificate::Determinant(class)) => {
            let r = k.canonical(&ratio)?;
            check = check
                .witness("det ratio", r.to_string())
                .witness("norm", k.norm(&r)?.to_string())
                .witness("square class", class.to_string());
        }
        Similarity::NotSimilar(Certificate::Signature { place, left, right }) => {
            check = check.witness(Place::Real(*place).to_string(), format!("{left} vs {right}"));
        }
        Similarity::Inconclusive(_) => check = check.verdict(Verdict::Inconclusive),
    }
    let check = expectation(check, expect);
    Ok(Outcome::single("similar", check, text))
}

/// Names of bundled diagrams isomorphic to `d`.
fn known_as(data: &Dataset, d: &CoxeterDiagram) -> Option<String> {
    ["T1.cox", "T2.cox", "T3.cox", "L5.cox"].iter().find_map(|name| {
        let other = parse_diagram(&data.read(name).ok()?).ok()?;
        d.is_isomorphic(&other)
            .then(|| name.trim_end_matches(".cox").to_string())
    })
}

/// Summary of the hyperideal vertices of a simplex, as in
/// `hyperideal 1~T2 5~T1; ordinary 3`.
pub fn link_summary(data: &Dataset, d: &CoxeterDiagram) -> Result<(String, Vec<String>)> {
    let links = vertex_links(d)?;
    let mut hyper = Vec::new();
    let mut lines = Vec::new();
    let mut counts = [0usize; 2];
    for l in &links {
        let name = known_as(data, &l.link);
        lines.push(format!(
            "vertex opposite {}: {} ({}{})",
            d.node_name(l.opposite),
            l.kind,
            l.link_class,
            name.as_deref().map(|n| format!(", {n}")).unwrap_or_default()
        ));
        match l.kind {
            VertexKind::Hyperideal => hyper.push(format!(
                "{}~{}",
                d.node_name(l.opposite),
                name.unwrap_or_else(|| l.link_class.to_string())
            )),
            VertexKind::Ordinary => counts[0] += 1,
            VertexKind::Ideal => counts[1] += 1,
        }
    }
    let mut summary = format!("ordinary {}", counts[0]);
    if counts[1] > 0 {
        summary.push_str(&format!("; ideal {}", counts[1]));
    }
    if !hyper.is_empty() {
        summary.push_str(&format!("; hyperideal {}", hyper.join(" ")));
    }
    Ok((summary, lines))
}

pub fn links(data: &Dataset, file: &str, expect: Option<&str>) -> Result<Outcome> {
    let d = load_diagram(data, file)?;
    let (summary, lines) = link_summary(data, &d)?;
    let check = expectation(Check::new("links", &[file], summary), expect);
    Ok(Outcome::single("links", check, lines.join("\n")))
}

fn one_based(nodes: &[usize]) -> String {
    let v: Vec<String> = nodes.iter().map(|i| (i + 1).to_string()).collect();
    format!("[{}]", v.join(","))
}

/// Minor and signature checks for a polyhedron with known weights. Check
/// names are prefixed with `prefix`.
pub fn weight_checks(d: &CoxeterDiagram, dim: usize, prefix: &str, input: &str) -> Result<Vec<Check>> {
    let r = verify_truncation_weights(d, dim, None)?;
    let n = d.n();
    let mut out = Vec::new();
    for m in &r.minors {
        let name = if m.nodes.len() == n {
            format!("{prefix}determinant")
        } else {
            format!("{prefix}minor{}", one_based(&m.nodes))
        };
        out.push(Check::new(name, &[input], m.value.to_string()).expect("0"));
    }
    out.push(
        Check::new(format!("{prefix}signature"), &[input], r.signature.to_string())
            .expect(r.expected_signature.to_string()),
    );
    Ok(out)
}

pub fn verify_weights(data: &Dataset, file: &str, dim: Option<usize>) -> Result<Outcome> {
    let d = load_diagram(data, file)?;
    let dim = match dim {
        Some(k) => k,
        None => gram_matrix(&d)?.inertia()?.pos,
    };
    let checks = weight_checks(&d, dim, "", file)?;
    let text = checks
        .iter()
        .map(|c| format!("{:<5} {:<24} {}", c.verdict, c.name, c.observed))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Outcome {
        report: Report::new("verify-weights", checks),
        text,
    })
}

/// Solves for unknown dotted weights. When the file has none, every known
/// dotted weight is forgotten, solved for, and compared with its value.
pub fn solve_weights(data: &Dataset, file: &str, dim: Option<usize>) -> Result<Outcome> {
    let d = load_diagram(data, file)?;
    let mut template = d.clone();
    let mut known = Vec::new();
    if d.unknown_weights().is_empty() {
        for (k, e) in d.edges() {
            if let EdgeKind::Dotted(Some(w)) = e {
                known.push((k, w.value.to_f64()));
                template.set_edge(k.0, k.1, EdgeKind::Dotted(None))?;
            }
        }
    }
    if template.unknown_weights().is_empty() {
        return Err(Error::Precondition(format!("{file} has no dotted weights to solve for")));
    }
    let dim = match dim {
        Some(k) => k,
        None if !known.is_empty() => gram_matrix(&d)?.inertia()?.pos,
        None => {
            return Err(Error::Precondition(
                "pass --dim for a diagram with unknown weights".into(),
            ))
        }
    };
    let sols = solve_truncation_weights_numeric(&template, dim, &SolverOptions::default())?;
    let mut checks = Vec::new();
    let mut text = Vec::new();
    let count = Check::new("solutions", &[file], sols.len().to_string());
    checks.push(if known.is_empty() {
        count.require(!sols.is_empty())
    } else {
        count.expect("1")
    });
    for (s, sol) in sols.iter().enumerate() {
        text.push(format!("solution {} (residual {:.1e})", s + 1, sol.residual));
        for (i, ((a, b), w)) in sol.weights.iter().enumerate() {
            let edge = format!("{}-{}", d.node_name(*a), d.node_name(*b));
            text.push(format!("  {edge}  {w:.16}"));
            if s > 0 || known.is_empty() {
                continue;
            }
            let want = known[i].1;
            checks.push(
                Check::new(format!("weight {edge}"), &[file], format!("{w:.16}"))
                    .witness("known", format!("{want:.16}"))
                    .witness("difference", format!("{:.1e}", (w - want).abs()))
                    .require((w - want).abs() <= SOLVER_TOLERANCE),
            );
        }
    }
    if !known.is_empty() {
        let certified = verify_truncation_weights(&d, dim, None)?.passed();
        checks.push(Check::new("exact certification", &[file], certified.to_string()).expect("true"));
    }
    Ok(Outcome {
        report: Report::new("solve-weights", checks),
        text: text.join("\n"),
    })
}

fn decimal(q: &Rational) -> String {
    let (n, d) = (q.numer().to_string(), q.denom().to_string());
    let v = n.parse::<f64>().unwrap_or(f64::NAN) / d.parse::<f64>().unwrap_or(f64::NAN);
    format!("{}", (v * 1000.0).round() / 1000.0)
}

pub fn garland_count(n: usize, expect: Option<&str>) -> Result<Outcome> {
    let c = census(n)?;
    let total = Rational::from_integer((1u64 << n).into());
    let count = Rational::from_integer(c.classes.into());
    let (mb, rb) = (c.mirror_bound(), c.rotation_bound());
    let check = Check::new("garland count", &[&format!("n={n}")], c.classes.to_string())
        .witness("2^n/(2n)", mb.to_string())
        .witness("2^n/n", rb.to_string())
        .require(count >= mb && count >= rb && count <= total);
    let check = expectation(check, expect);
    let text = format!(
        "{} classes (lower bounds: 2^n/(2n) = {}, 2^n/n = {})",
        c.classes,
        decimal(&mb),
        decimal(&rb)
    );
    Ok(Outcome::single("garland count", check, text))
}

pub fn garland_census(n: usize, list: bool) -> Result<Outcome> {
    let c = census(n)?;
    let mut text = vec![format!("n = {n}: {} classes, largest class {}", c.classes, c.largest_class)];
    text.push("twos  classes".into());
    let mut check = Check::new("garland census", &[&format!("n={n}")], c.classes.to_string())
        .witness("largest class", c.largest_class.to_string());
    for (t, k) in c.by_twos.iter().enumerate() {
        text.push(format!("{t:>4}  {k}"));
        check = check.witness(format!("twos={t}"), k.to_string());
    }
    check = check.require(c.by_twos.iter().sum::<u64>() == c.classes && c.largest_class <= n);
    if list {
        for w in class_representatives(n)? {
            text.push(w.to_string());
        }
    }
    Ok(Outcome::single("garland census", check, text.join("\n")))
}

pub fn load_catalog(data: &Dataset, arg: &str) -> Result<PieceCatalog> {
    let text = data.catalog_text(arg)?;
    PieceCatalog::parse(&text, &|name| data.read(name))
}

pub fn garland_classify(data: &Dataset, word: &str, catalog: &str, expect: Option<&str>) -> Result<Outcome> {
    let w: GarlandWord = word.parse()?;
    let cat = load_catalog(data, catalog)?;
    let class = classify_garland(&cat, &w)?;
    let check = Check::new("garland classify", &[word, catalog], class.as_str())
        .witness("piece 1", cat.pieces[0].class.as_str())
        .witness("piece 2", cat.pieces[1].class.as_str())
        .witness("volume", cat.volume_of(&w).to_string());
    let check = expectation(check, expect);
    Ok(Outcome::single("garland classify", check, class.to_string()))
}

pub fn garland_volume(data: &Dataset, budget: &str, catalog: &str, expect: Option<&str>) -> Result<Outcome> {
    let v: Rational = budget
        .parse()
        .map_err(|_| Error::Precondition(format!("cannot read volume '{budget}'")))?;
    let cat = load_catalog(data, catalog)?;
    let count = cat.count_by_volume(&v)?;
    let check = Check::new("garland volume", &[budget, catalog], count.to_string())
        .witness("piece volumes", format!("{} {}", cat.pieces[0].volume, cat.pieces[1].volume));
    let check = expectation(check, expect);
    Ok(Outcome::single(
        "garland volume",
        check,
        format!("{count} classes of volume at most {v}"),
    ))
}

/// `M` scaled by `lambda`.
pub fn scaled(m: &Matrix, lambda: &TowerElement) -> Result<Matrix> {
    let mut out = m.clone();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, m.get(i, j).checked_mul(lambda)?);
        }
    }
    Ok(out)
}
