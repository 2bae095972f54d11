//! Arithmetic of the rationals and of real quadratic fields `Q(sqrt d)`.
//!
//! Elements are ordinary [`TowerElement`]s. Any element whose support is a
//! product of rational radicands equal to `1` or `d` modulo squares is
//! accepted, whichever tower it was built in, and is read off as `u + v sqrt d`.
//!
//! Local computations are restricted to odd primes.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::ntheory::{
    factor, hensel_sqrt, int_sqrt_exact, legendre, modulo, mod_inverse, squarefree_decompose, sqrt_mod_prime,
    valuation as int_valuation,
};
use crate::exact::{Embedding, Rational, Tower, TowerElement};

/// Splitting behaviour of an odd rational prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimeKind {
    /// A prime of the rationals themselves.
    Rational,
    Split,
    Inert,
    Ramified,
}

/// An odd prime ideal, described by the rational prime below it.
///
/// For split and ramified primes the ideal is `(p, sqrt d - root)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeIdeal {
    pub p: BigInt,
    pub kind: PrimeKind,
    pub root: Option<BigInt>,
}

impl PrimeIdeal {
    pub fn residue_size(&self) -> BigInt {
        match self.kind {
            PrimeKind::Inert => &self.p * &self.p,
            _ => self.p.clone(),
        }
    }

    /// Ramification index over the rational prime.
    pub fn ramification(&self) -> u32 {
        if self.kind == PrimeKind::Ramified {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.kind, &self.root) {
            (PrimeKind::Rational | PrimeKind::Inert, _) => write!(f, "({})", self.p),
            (_, Some(r)) => write!(f, "({}, sqrt(d)-{})", self.p, r),
            (_, None) => write!(f, "({})", self.p),
        }
    }
}

/// A place of the field: a real embedding (0 is the distinguished one) or an
/// odd prime ideal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Real(usize),
    Finite(PrimeIdeal),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real(0) => write!(f, "real:id"),
            Place::Real(i) => write!(f, "real:{i}"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// `u + v sqrt d` with rational coordinates.
type Coords = (Rational, Rational);

/// The real quadratic field `Q(sqrt d)` with `d > 1` squarefree.
#[derive(Debug, Clone)]
pub struct QuadField {
    d: BigInt,
    tower: Arc<Tower>,
    sqrt_d: TowerElement,
    omega: TowerElement,
    unit: TowerElement,
}

/// The base field of a quadratic form: the rationals or a real quadratic field.
#[derive(Debug, Clone)]
pub enum Field {
    Rational(Arc<Tower>),
    Quadratic(QuadField),
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl QuadField {
    pub fn new(d: i64) -> Result<QuadField> {
        let db = BigInt::from(d);
        let (f, c) = squarefree_decompose(&db)?;
        if d <= 1 || !f.is_one() || c != db {
            return Err(Error::Precondition(format!("{d} is not a squarefree integer > 1")));
        }
        let tower = Tower::quadratic(d)?;
        let sqrt_d = tower.generator(0);
        let omega = if d.rem_euclid(4) == 1 {
            (&sqrt_d + &TowerElement::one(&tower)).scale(&Rational::new(1.into(), 2.into()))
        } else {
            sqrt_d.clone()
        };
        let unit = fundamental_unit_cf(&tower, &db, &omega)?;
        Ok(QuadField {
            d: db,
            tower,
            sqrt_d,
            omega,
            unit,
        })
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn sqrt_d(&self) -> &TowerElement {
        &self.sqrt_d
    }

    /// Generator of the ring of integers over `Z`.
    pub fn ring_generator(&self) -> &TowerElement {
        &self.omega
    }

    /// The fundamental unit `u > 1`.
    pub fn fundamental_unit(&self) -> &TowerElement {
        &self.unit
    }

    pub fn discriminant(&self) -> BigInt {
        if modulo(&self.d, &4.into()) == BigInt::one() {
            self.d.clone()
        } else {
            &self.d * 4
        }
    }

    /// Number of primes of the field above 2.
    pub fn places_above_two(&self) -> usize {
        // 2 splits exactly when d = 1 (mod 8).
        if modulo(&self.d, &8.into()) == BigInt::one() {
            2
        } else {
            1
        }
    }
}

/// Fundamental unit from the continued fraction of the ring generator.
fn fundamental_unit_cf(tower: &Arc<Tower>, d: &BigInt, omega: &TowerElement) -> Result<TowerElement> {
    let one_mod_four = modulo(d, &4.into()) == BigInt::one();
    // omega = (P + sqrt d) / Q
    let (mut pp, mut qq) = if one_mod_four {
        (BigInt::one(), BigInt::from(2))
    } else {
        (BigInt::zero(), BigInt::one())
    };
    let s = d.sqrt();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    // (d - 1) / 4 when omega = (1 + sqrt d)/2
    let c = (d - 1) / 4;
    for _ in 0..100_000 {
        let a = (&pp + &s).div_floor(&qq);
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let (p, q) = (&h1, &k1);
        let norm = if one_mod_four {
            p * p - p * q - &c * q * q
        } else {
            p * p - d * q * q
        };
        if norm.abs().is_one() {
            // p - q * conj(omega) > 1
            let conj = if one_mod_four {
                TowerElement::one(tower) - omega
            } else {
                -omega
            };
            let unit = TowerElement::from_rational(tower, Rational::from_integer(p.clone()))
                - conj.scale(&Rational::from_integer(q.clone()));
            return Ok(unit);
        }
        pp = &a * &qq - &pp;
        qq = (d - &pp * &pp) / &qq;
    }
    Err(Error::NoConvergence(format!("continued fraction of sqrt({d})")))
}

impl Field {
    pub fn rationals() -> Field {
        Field::Rational(Tower::rationals())
    }

    pub fn quadratic(d: i64) -> Result<Field> {
        Ok(Field::Quadratic(QuadField::new(d)?))
    }

    /// `1` for the rationals, `d` for `Q(sqrt d)`.
    pub fn d(&self) -> BigInt {
        match self {
            Field::Rational(_) => BigInt::one(),
            Field::Quadratic(k) => k.d.clone(),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Field::Rational(_) => 1,
            Field::Quadratic(_) => 2,
        }
    }

    pub fn tower(&self) -> &Arc<Tower> {
        match self {
            Field::Rational(t) => t,
            Field::Quadratic(k) => &k.tower,
        }
    }

    pub fn as_quadratic(&self) -> Option<&QuadField> {
        match self {
            Field::Rational(_) => None,
            Field::Quadratic(k) => Some(k),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Field::Rational(_) => "Q".into(),
            Field::Quadratic(k) => format!("Q(sqrt {})", k.d),
        }
    }

    /// Number of places above 2.
    pub fn places_above_two(&self) -> usize {
        match self {
            Field::Rational(_) => 1,
            Field::Quadratic(k) => k.places_above_two(),
        }
    }

    /// Reads `x` as `u + v sqrt d`.
    pub fn coords(&self, x: &TowerElement) -> Result<Coords> {
        let d = self.d();
        let t = x.tower();
        let not_in = || Error::NotInField {
            element: x.to_string(),
            field: self.name(),
        };
        let (mut u, mut v) = (Rational::zero(), Rational::zero());
        for (mask, c) in x.terms() {
            let mut radicand = BigInt::one();
            for i in 0..t.num_generators() {
                if mask & (1 << i) != 0 {
                    radicand *= t.radicand(i).ok_or_else(not_in)?;
                }
            }
            let (f, sf) = squarefree_decompose(&radicand)?;
            let term = c * Rational::from_integer(f);
            if sf.is_one() {
                u += term;
            } else if sf == d {
                v += term;
            } else {
                return Err(not_in());
            }
        }
        Ok((u, v))
    }

    pub fn contains(&self, x: &TowerElement) -> bool {
        self.coords(x).is_ok()
    }

    /// The element `u + v sqrt d` in the field's own tower.
    pub fn element(&self, u: Rational, v: Rational) -> TowerElement {
        match self {
            Field::Rational(t) => {
                debug_assert!(v.is_zero());
                TowerElement::from_rational(t, u)
            }
            Field::Quadratic(k) => {
                TowerElement::from_rational(&k.tower, u) + k.sqrt_d.scale(&v)
            }
        }
    }

    /// Re-expresses `x` in the field's own tower.
    pub fn canonical(&self, x: &TowerElement) -> Result<TowerElement> {
        let (u, v) = self.coords(x)?;
        Ok(self.element(u, v))
    }

    pub fn from_int(&self, n: i64) -> TowerElement {
        TowerElement::from_int(self.tower(), n)
    }

    pub fn conjugate(&self, x: &TowerElement) -> Result<TowerElement> {
        let (u, v) = self.coords(x)?;
        Ok(self.element(u, -v))
    }

    pub fn norm_trace(&self, x: &TowerElement) -> Result<(Rational, Rational)> {
        let (u, v) = self.coords(x)?;
        let d = Rational::from_integer(self.d());
        Ok((&u * &u - d * &v * &v, u * rat(2)))
    }

    pub fn norm(&self, x: &TowerElement) -> Result<Rational> {
        Ok(self.norm_trace(x)?.0)
    }

    pub fn trace(&self, x: &TowerElement) -> Result<Rational> {
        Ok(self.norm_trace(x)?.1)
    }

    /// Square root of `x` in the field, if one exists.
    pub fn sqrt(&self, x: &TowerElement) -> Result<Option<TowerElement>> {
        let y = self.canonical(x)?;
        let t = self.tower();
        if y.is_zero() {
            return Ok(Some(y));
        }
        // Squares are positive at every real place.
        if y.sign()? < 0 {
            return Ok(None);
        }
        Ok(t.sqrt_exact(&y))
    }

    pub fn is_square(&self, x: &TowerElement) -> Result<bool> {
        Ok(self.sqrt(x)?.is_some())
    }

    /// True when the minimal polynomial of `x` has integer coefficients.
    pub fn is_integral(&self, x: &TowerElement) -> Result<bool> {
        let (n, t) = self.norm_trace(x)?;
        Ok(match self {
            Field::Rational(_) => self.coords(x)?.0.is_integer(),
            Field::Quadratic(_) => n.is_integer() && t.is_integer(),
        })
    }

    /// Real places, the distinguished one first.
    pub fn real_places(&self) -> Vec<Place> {
        (0..self.degree()).map(Place::Real).collect()
    }

    /// Embedding of the field's own tower corresponding to a real place.
    pub fn embedding(&self, place: usize) -> Embedding {
        Embedding::flipping(if place == 0 { 0 } else { 1 })
    }

    /// Certified sign of `x` at a real place.
    pub fn sign_at(&self, x: &TowerElement, place: usize) -> Result<i8> {
        if place >= self.degree() {
            return Err(Error::OutOfRange(format!("real place {place}")));
        }
        self.canonical(x)?.sign_at(&self.embedding(place))
    }

    /// Prime ideals above an odd rational prime, with exponents.
    pub fn factor_rational_prime(&self, p: &BigInt) -> Result<Vec<(PrimeIdeal, u32)>> {
        if p.is_even() {
            return Err(Error::DyadicPlace);
        }
        if !p.is_positive() || !crate::exact::ntheory::is_probable_prime(p) {
            return Err(Error::Precondition(format!("{p} is not an odd prime")));
        }
        let d = self.d();
        if self.degree() == 1 {
            return Ok(vec![(
                PrimeIdeal {
                    p: p.clone(),
                    kind: PrimeKind::Rational,
                    root: None,
                },
                1,
            )]);
        }
        Ok(match legendre(&d, p) {
            0 => vec![(
                PrimeIdeal {
                    p: p.clone(),
                    kind: PrimeKind::Ramified,
                    root: Some(BigInt::zero()),
                },
                2,
            )],
            1 => {
                let r = sqrt_mod_prime(&d, p).expect("residue has a root");
                let r2 = p - &r;
                let (a, b) = if r < r2 { (r, r2) } else { (r2, r) };
                vec![
                    (
                        PrimeIdeal {
                            p: p.clone(),
                            kind: PrimeKind::Split,
                            root: Some(a),
                        },
                        1,
                    ),
                    (
                        PrimeIdeal {
                            p: p.clone(),
                            kind: PrimeKind::Split,
                            root: Some(b),
                        },
                        1,
                    ),
                ]
            }
            _ => vec![(
                PrimeIdeal {
                    p: p.clone(),
                    kind: PrimeKind::Inert,
                    root: None,
                },
                1,
            )],
        })
    }

    /// The prime ideal above `p` with the given kind and root, for lookups.
    pub fn prime(&self, p: i64) -> Result<Vec<PrimeIdeal>> {
        Ok(self
            .factor_rational_prime(&BigInt::from(p))?
            .into_iter()
            .map(|(q, _)| q)
            .collect())
    }

    /// A local uniformizer at an odd prime.
    pub fn uniformizer(&self, prime: &PrimeIdeal) -> TowerElement {
        match prime.kind {
            PrimeKind::Ramified => match self {
                Field::Quadratic(k) => k.sqrt_d.clone(),
                Field::Rational(_) => unreachable!("ramified prime over Q"),
            },
            _ => TowerElement::from_rational(self.tower(), Rational::from_integer(prime.p.clone())),
        }
    }

    /// Splits `x = (g / den) * (a + b sqrt d)` with integers, `gcd(a, b) = 1`.
    fn primitive(&self, x: &TowerElement) -> Result<(Rational, BigInt, BigInt)> {
        let (u, v) = self.coords(x)?;
        if u.is_zero() && v.is_zero() {
            return Err(Error::Precondition("valuation of zero".into()));
        }
        let den = u.denom().lcm(v.denom());
        let a = u.numer() * (&den / u.denom());
        let b = v.numer() * (&den / v.denom());
        let g = a.gcd(&b);
        Ok((Rational::new(g.clone(), den), a / &g, b / &g))
    }

    /// Valuation of a primitive `a + b sqrt d` at a split prime, using a
    /// p-adic square root of `d` congruent to the ideal's root.
    fn split_valuation(&self, a: &BigInt, b: &BigInt, prime: &PrimeIdeal) -> (u32, BigInt) {
        let p = &prime.p;
        let d = self.d();
        let n = a * a - &d * b * b;
        let k = if n.is_zero() { 1 } else { int_valuation(&n, p) } + 2;
        let rho = hensel_sqrt(&d, p, prime.root.as_ref().expect("split root"), k);
        let modulus = p.pow(k);
        let z = modulo(&(a + b * rho), &modulus);
        let v = if z.is_zero() { k } else { int_valuation(&z, p) };
        (v, z)
    }

    /// Normalized valuation `v_P(x)` of a nonzero element.
    pub fn valuation(&self, x: &TowerElement, prime: &PrimeIdeal) -> Result<i64> {
        let (q, a, b) = self.primitive(x)?;
        let p = &prime.p;
        let e = prime.ramification() as i64;
        let vq = int_valuation(q.numer(), p) as i64 - int_valuation(q.denom(), p) as i64;
        let vy = match prime.kind {
            PrimeKind::Rational | PrimeKind::Inert => 0,
            PrimeKind::Ramified => i64::from((&a % p).is_zero()),
            PrimeKind::Split => self.split_valuation(&a, &b, prime).0 as i64,
        };
        Ok(e * vq + vy)
    }

    /// Quadratic residue character of a `P`-unit.
    pub fn residue_character(&self, x: &TowerElement, prime: &PrimeIdeal) -> Result<i8> {
        if self.valuation(x, prime)? != 0 {
            return Err(Error::Precondition(format!("{x} is not a unit at {prime}")));
        }
        let (q, a, b) = self.primitive(x)?;
        let p = &prime.p;
        // p-unit part of the rational scalar
        let strip = |n: &BigInt| {
            let mut n = n.clone();
            while (&n % p).is_zero() {
                n /= p;
            }
            n
        };
        let qn = strip(q.numer());
        let qd = strip(q.denom());
        let scalar = modulo(&(qn * mod_inverse(&qd, p)), p);
        let chi = match prime.kind {
            PrimeKind::Rational => legendre(&(scalar * a), p),
            PrimeKind::Ramified => legendre(&(scalar * a), p),
            // Rational scalars are squares in F_{p^2}; a + b sqrt d is a square
            // there iff its norm is a square in F_p.
            PrimeKind::Inert => legendre(&(&a * &a - self.d() * &b * &b), p),
            PrimeKind::Split => {
                let (v, z) = self.split_valuation(&a, &b, prime);
                let unit = z / p.pow(v);
                // The scalar carries p^-v, already stripped above.
                legendre(&(scalar * unit), p)
            }
        };
        debug_assert!(chi != 0);
        Ok(chi)
    }

    /// Hilbert symbol `(x, y)` at a real place or an odd prime.
    pub fn hilbert_symbol(&self, x: &TowerElement, y: &TowerElement, place: &Place) -> Result<i8> {
        if x.is_zero() || y.is_zero() {
            return Err(Error::Precondition("Hilbert symbol of zero".into()));
        }
        match place {
            Place::Real(i) => {
                let sx = self.sign_at(x, *i)?;
                let sy = self.sign_at(y, *i)?;
                Ok(if sx < 0 && sy < 0 { -1 } else { 1 })
            }
            Place::Finite(prime) => {
                if prime.p.is_even() {
                    return Err(Error::DyadicPlace);
                }
                let x = self.canonical(x)?;
                let y = self.canonical(y)?;
                let alpha = self.valuation(&x, prime)?;
                let beta = self.valuation(&y, prime)?;
                let pi = self.uniformizer(prime);
                let pi_inv = pi.inv()?;
                let u = &x * &pi_inv.pow_signed(alpha);
                let w = &y * &pi_inv.pow_signed(beta);
                let minus_one = self.from_int(-1);
                let mut s = 1i8;
                if (alpha * beta) % 2 != 0 {
                    s *= self.residue_character(&minus_one, prime)?;
                }
                if beta % 2 != 0 {
                    s *= self.residue_character(&u, prime)?;
                }
                if alpha % 2 != 0 {
                    s *= self.residue_character(&w, prime)?;
                }
                Ok(s)
            }
        }
    }

    /// Odd prime ideals at which `x` has nonzero valuation.
    pub fn odd_primes_dividing(&self, x: &TowerElement) -> Result<Vec<PrimeIdeal>> {
        let n = self.norm(x)?;
        if n.is_zero() {
            return Err(Error::Precondition("support of zero".into()));
        }
        let mut out = Vec::new();
        for part in [n.numer().abs(), n.denom().clone()] {
            if part.is_one() {
                continue;
            }
            for (p, _) in factor(&part)? {
                if p.is_even() {
                    continue;
                }
                for (prime, _) in self.factor_rational_prime(&p)? {
                    if self.valuation(x, &prime)? != 0 && !out.contains(&prime) {
                        out.push(prime);
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Odd primes ramified in the field.
    pub fn odd_ramified_primes(&self) -> Result<Vec<PrimeIdeal>> {
        let mut out = Vec::new();
        if let Field::Quadratic(k) = self {
            for (p, _) in factor(&k.d)? {
                if p.is_odd() {
                    out.extend(self.factor_rational_prime(&p)?.into_iter().map(|(q, _)| q));
                }
            }
        }
        Ok(out)
    }

    /// Representatives of units modulo squares.
    pub fn unit_square_classes(&self) -> Vec<TowerElement> {
        let mut out = vec![self.from_int(1), self.from_int(-1)];
        if let Field::Quadratic(k) = self {
            out.push(k.unit.clone());
            out.push(-&k.unit);
        }
        out
    }

    /// A generator of the prime ideal, if one turns up among elements
    /// `x + y omega` with `|y| <= bound`.
    pub fn principal_generator(&self, prime: &PrimeIdeal, bound: i64) -> Result<Option<TowerElement>> {
        match prime.kind {
            PrimeKind::Rational | PrimeKind::Inert => Ok(Some(TowerElement::from_rational(
                self.tower(),
                Rational::from_integer(prime.p.clone()),
            ))),
            PrimeKind::Ramified | PrimeKind::Split => {
                let Some(pi) = self.norm_search(&prime.p, bound)? else {
                    return Ok(None);
                };
                if self.valuation(&pi, prime)? == 1 {
                    Ok(Some(pi))
                } else {
                    Ok(Some(self.conjugate(&pi)?))
                }
            }
        }
    }

    /// An integral element of norm `p` or `-p`, positive at the identity
    /// place, with the smallest `y` and then the smallest `|x|`.
    fn norm_search(&self, p: &BigInt, bound: i64) -> Result<Option<TowerElement>> {
        let Field::Quadratic(k) = self else {
            return Ok(None);
        };
        let one_mod_four = modulo(&k.d, &4.into()) == BigInt::one();
        let c: BigInt = (&k.d - 1) / 4;
        for y in 1..=bound {
            let y = BigInt::from(y);
            let mut found: Option<BigInt> = None;
            for target in [p.clone(), -p] {
                // x^2 + b x + e = 0 with b = y or 0
                let (b, e): (BigInt, BigInt) = if one_mod_four {
                    (y.clone(), -(&c * &y * &y) - &target)
                } else {
                    (BigInt::zero(), -(&k.d * &y * &y) - &target)
                };
                let disc: BigInt = &b * &b - &e * 4;
                if disc.is_negative() {
                    continue;
                }
                let Some(r) = int_sqrt_exact(&disc) else { continue };
                for num in [&r - &b, -&r - &b] {
                    if num.is_even() {
                        let x: BigInt = num / 2;
                        if found.as_ref().is_none_or(|f| x.abs() < f.abs()) {
                            found = Some(x);
                        }
                    }
                }
            }
            if let Some(x) = found {
                let z = TowerElement::from_rational(&k.tower, Rational::from_integer(x))
                    + k.omega.scale(&Rational::from_integer(y));
                return Ok(Some(if z.sign()? < 0 { -z } else { z }));
            }
        }
        Ok(None)
    }

    /// Generators of the prime ideals above a rational prime `p`, which may
    /// be 2. Fails when some prime above `p` is not found to be principal.
    pub fn prime_generators(&self, p: &BigInt) -> Result<Vec<TowerElement>> {
        let rational = || vec![TowerElement::from_rational(self.tower(), Rational::from_integer(p.clone()))];
        let Field::Quadratic(k) = self else {
            return Ok(rational());
        };
        let kind = if p == &BigInt::from(2) {
            match u32::try_from(modulo(&k.d, &8.into())).expect("small") {
                1 => PrimeKind::Split,
                5 => PrimeKind::Inert,
                _ => PrimeKind::Ramified,
            }
        } else {
            match legendre(&k.d, p) {
                0 => PrimeKind::Ramified,
                1 => PrimeKind::Split,
                _ => PrimeKind::Inert,
            }
        };
        if kind == PrimeKind::Inert {
            return Ok(rational());
        }
        let pi = self
            .norm_search(p, PRINCIPAL_SEARCH_BOUND)?
            .ok_or_else(|| Error::Factorization(format!("no generator found above {p} in {}", self.name())))?;
        Ok(if kind == PrimeKind::Split {
            let conj = self.conjugate(&pi)?;
            let conj = if conj.sign()? < 0 { -conj } else { conj };
            vec![pi, conj]
        } else {
            vec![pi]
        })
    }

    /// Canonical representative of the class of `x` modulo nonzero squares.
    ///
    /// The representative is a unit class representative times the product of
    /// the fixed prime generators at which `x` has odd valuation.
    pub fn square_class(&self, x: &TowerElement) -> Result<TowerElement> {
        let x = self.canonical(x)?;
        if x.is_zero() {
            return Err(Error::Precondition("square class of zero".into()));
        }
        let (u, v) = self.coords(&x)?;
        let den = u.denom().lcm(v.denom());
        let den2 = Rational::from_integer(&den * &den);
        let mut y = x.scale(&den2);
        let n = self.norm(&y)?;
        debug_assert!(n.is_integer());
        let mut rep = self.from_int(1);
        let n = n.numer().abs();
        if !n.is_one() {
            for (p, _) in factor(&n)? {
                for pi in self.prime_generators(&p)? {
                    let mut odd = false;
                    loop {
                        let q = y.checked_div(&pi)?;
                        if !self.is_integral(&q)? {
                            break;
                        }
                        y = q;
                        odd = !odd;
                    }
                    if odd {
                        rep = &rep * &pi;
                    }
                }
            }
        }
        if !self.norm(&y)?.abs().is_one() {
            return Err(Error::Factorization(format!("{x} has a non-principal prime factor")));
        }
        for c in self.unit_square_classes() {
            let cand = &c * &rep;
            if self.is_square(&x.checked_div(&cand)?)? {
                return Ok(cand);
            }
        }
        Err(Error::Factorization(format!("unit part of {x} is not in a known square class")))
    }

    /// True when `x / y` is a nonzero square.
    pub fn same_square_class(&self, x: &TowerElement, y: &TowerElement) -> Result<bool> {
        if x.is_zero() || y.is_zero() {
            return Err(Error::Precondition("square class of zero".into()));
        }
        self.is_square(&x.checked_div(y)?)
    }
}

/// Search bound for generators of prime ideals.
const PRINCIPAL_SEARCH_BOUND: i64 = 100_000;

impl TowerElement {
    /// Integer power, allowing negative exponents.
    pub fn pow_signed(&self, e: i64) -> TowerElement {
        if e >= 0 {
            self.pow(e as u32)
        } else {
            self.inv().expect("nonzero base").pow((-e) as u32)
        }
    }
}
