//! Exact arithmetic in towers of real quadratic extensions of the rationals.
//!
//! A [`Tower`] is `Q(g_1, ..., g_r)` where each generator satisfies
//! `g_i^2 = s_i` with `s_i` an element of the prefix tower. Elements are
//! stored in the monomial basis indexed by subsets of generators, so an
//! element is zero exactly when it has no stored coefficients. Every
//! generator is verified not to lie in its prefix tower when it is adjoined,
//! which keeps that basis a genuine basis.

mod interval;
pub mod matrix;
pub mod ntheory;
mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use interval::{set_start_precision, start_precision, Embedding};
pub use matrix::{Inertia, Matrix};
pub use parse::{parse_expr, Expr};

pub type Rational = BigRational;

/// Coefficients indexed by generator subsets (bit `i` set means `g_i` occurs).
pub(crate) type Coeffs = BTreeMap<u32, Rational>;

const PRODUCT_CACHE_MAX_GENS: usize = 8;

static NEXT_TOWER_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug)]
pub(crate) struct Generator {
    square: Coeffs,
    /// Squarefree integer radicand when the square is rational.
    radicand: Option<BigInt>,
    name: String,
}

/// An immutable quadratic tower over the rationals.
pub struct Tower {
    id: u64,
    parent: Option<Arc<Tower>>,
    gens: Vec<Generator>,
    products: Vec<OnceLock<Coeffs>>,
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.gens.iter().map(|g| g.name.as_str()).collect();
        write!(f, "Tower#{}[{}]", self.id, names.join(", "))
    }
}

impl Tower {
    /// The rationals, as a tower without generators.
    pub fn rationals() -> Arc<Tower> {
        Arc::new(Tower {
            id: NEXT_TOWER_ID.fetch_add(1, AtomicOrdering::Relaxed),
            parent: None,
            gens: Vec::new(),
            products: Vec::new(),
        })
    }

    /// `Q(sqrt(d))` for an integer `d > 1`.
    pub fn quadratic(d: i64) -> Result<Arc<Tower>> {
        let t = Tower::rationals();
        let (t, _) = t.adjoin_sqrt(&TowerElement::from_int(&t, d))?;
        Ok(t)
    }

    pub fn num_generators(&self) -> usize {
        self.gens.len()
    }

    pub fn generator_name(&self, i: usize) -> &str {
        &self.gens[i].name
    }

    /// The squarefree radicand of generator `i`, when its square is rational.
    pub fn radicand(&self, i: usize) -> Option<&BigInt> {
        self.gens[i].radicand.as_ref()
    }

    /// Bit mask of the generators with rational squares.
    pub fn rational_mask(&self) -> u32 {
        self.gens
            .iter()
            .enumerate()
            .filter(|(_, g)| g.radicand.is_some())
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    /// The square of generator `i`, as an element of this tower.
    pub fn generator_square(self: &Arc<Self>, i: usize) -> TowerElement {
        TowerElement::from_coeffs(self, self.gens[i].square.clone())
    }

    /// Generator `i` itself.
    pub fn generator(self: &Arc<Self>, i: usize) -> TowerElement {
        TowerElement::from_coeffs(self, Coeffs::from([(1u32 << i, Rational::one())]))
    }

    /// True when `self` equals `other` or is a prefix (ancestor) of it.
    pub fn is_prefix_of(&self, other: &Tower) -> bool {
        let mut cur = Some(other);
        while let Some(t) = cur {
            if t.id == self.id {
                return true;
            }
            if t.gens.len() < self.gens.len() {
                return false;
            }
            cur = t.parent.as_deref();
        }
        false
    }

    fn common(a: &Arc<Tower>, b: &Arc<Tower>) -> Result<Arc<Tower>> {
        if a.id == b.id || a.is_prefix_of(b) {
            Ok(b.clone())
        } else if b.is_prefix_of(a) {
            Ok(a.clone())
        } else {
            Err(Error::TowerMismatch)
        }
    }

    fn extend(self: &Arc<Self>, square: Coeffs, radicand: Option<BigInt>) -> Arc<Tower> {
        let name = match &radicand {
            Some(r) => format!("sqrt({r})"),
            None => format!("sqrt({})", format_coeffs(self, &square)),
        };
        let mut gens: Vec<Generator> = self
            .gens
            .iter()
            .map(|g| Generator {
                square: g.square.clone(),
                radicand: g.radicand.clone(),
                name: g.name.clone(),
            })
            .collect();
        gens.push(Generator {
            square,
            radicand,
            name,
        });
        let r = gens.len();
        let products = if r <= PRODUCT_CACHE_MAX_GENS {
            (0..1usize << (2 * r)).map(|_| OnceLock::new()).collect()
        } else {
            Vec::new()
        };
        Arc::new(Tower {
            id: NEXT_TOWER_ID.fetch_add(1, AtomicOrdering::Relaxed),
            parent: Some(self.clone()),
            gens,
            products,
        })
    }

    /// Square root of a positive element: either an existing element of the
    /// tower, or a new generator appended to an extended tower.
    pub fn adjoin_sqrt(self: &Arc<Self>, s: &TowerElement) -> Result<(Arc<Tower>, TowerElement)> {
        let s = s.lift(self)?;
        if s.is_zero() {
            return Err(Error::ZeroRadicand);
        }
        if s.sign()? <= 0 {
            return Err(Error::NotPositive(s.to_string()));
        }
        // Pull the rational content out so generator squares are primitive
        // with squarefree rational part.
        let content = content_of(&s.coeffs);
        let num = content.numer() * content.denom();
        let (f, c) = ntheory::squarefree_decompose(&num)?;
        let outer = Rational::new(f, content.denom().clone());
        let inner = s.scale(&(Rational::from(c.clone()) / &content));
        if let Some(r) = self.sqrt_exact(&inner) {
            return Ok((self.clone(), r.scale(&outer)));
        }
        let radicand = inner.as_rational().map(|q| q.to_integer());
        let ext = self.extend(inner.coeffs, radicand);
        let g = ext.generator(ext.gens.len() - 1);
        Ok((ext.clone(), g.scale(&outer)))
    }

    /// Positive square root of `x` if it exists inside this tower.
    pub fn sqrt_exact(self: &Arc<Self>, x: &TowerElement) -> Option<TowerElement> {
        let x = x.lift(self).ok()?;
        if x.is_zero() {
            return Some(x);
        }
        let root = sqrt_in(self, &x.coeffs, self.gens.len())?;
        let root = TowerElement::from_coeffs(self, root);
        Some(if root.sign().ok()? < 0 { -root } else { root })
    }

    fn mono_mul(&self, u: u32, v: u32) -> Coeffs {
        let common = u & v;
        if common == 0 {
            return Coeffs::from([(u | v, Rational::one())]);
        }
        let r = self.gens.len();
        if !self.products.is_empty() {
            let key = ((u as usize) << r) | v as usize;
            return self.products[key]
                .get_or_init(|| self.mono_mul_uncached(u, v))
                .clone();
        }
        self.mono_mul_uncached(u, v)
    }

    fn mono_mul_uncached(&self, u: u32, v: u32) -> Coeffs {
        let common = u & v;
        let i = 31 - common.leading_zeros();
        let bit = 1u32 << i;
        let rest = self.mono_mul(u ^ bit, v ^ bit);
        self.mul_coeffs(&self.gens[i as usize].square, &rest)
    }

    fn mul_coeffs(&self, a: &Coeffs, b: &Coeffs) -> Coeffs {
        let mut out = Coeffs::new();
        for (&u, cu) in a {
            for (&v, cv) in b {
                let c = cu * cv;
                if u & v == 0 {
                    add_term(&mut out, u | v, c);
                } else {
                    for (w, cw) in self.mono_mul(u, v) {
                        add_term(&mut out, w, &c * cw);
                    }
                }
            }
        }
        out
    }

    /// Inverse of a nonzero element, by conjugating away the top generator.
    fn inv_coeffs(&self, a: &Coeffs) -> Coeffs {
        let top = a.keys().fold(0u32, |m, &k| m | k);
        if top == 0 {
            let c = a.get(&0).expect("inverse of zero");
            return Coeffs::from([(0, c.recip())]);
        }
        let i = 31 - top.leading_zeros();
        let bit = 1u32 << i;
        let (lo, hi) = split_at(a, bit);
        // (lo + hi*g)^{-1} = (lo - hi*g) / (lo^2 - s*hi^2)
        let lo2 = self.mul_coeffs(&lo, &lo);
        let hi2 = self.mul_coeffs(&hi, &hi);
        let s_hi2 = self.mul_coeffs(&self.gens[i as usize].square, &hi2);
        let mut den = lo2;
        for (k, c) in s_hi2 {
            add_term(&mut den, k, -c);
        }
        let den_inv = self.inv_coeffs(&den);
        let mut conj = lo;
        for (k, c) in hi {
            add_term(&mut conj, k | bit, -c);
        }
        self.mul_coeffs(&conj, &den_inv)
    }
}

fn add_term(out: &mut Coeffs, k: u32, c: Rational) {
    if c.is_zero() {
        return;
    }
    match out.entry(k) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Splits `a = lo + hi * g` where `bit` marks `g` and no higher generator occurs.
fn split_at(a: &Coeffs, bit: u32) -> (Coeffs, Coeffs) {
    let mut lo = Coeffs::new();
    let mut hi = Coeffs::new();
    for (&k, c) in a {
        if k & bit != 0 {
            hi.insert(k ^ bit, c.clone());
        } else {
            lo.insert(k, c.clone());
        }
    }
    (lo, hi)
}

/// Positive rational `q` such that `a / q` has coprime integer coefficients.
fn content_of(a: &Coeffs) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for c in a.values() {
        num = num.gcd(c.numer());
        den = den.lcm(c.denom());
    }
    Rational::new(num, den)
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = ntheory::int_sqrt_exact(q.numer())?;
    let d = ntheory::int_sqrt_exact(q.denom())?;
    Some(Rational::new(n, d))
}

/// Some square root of `a` in the subtower of the first `level` generators.
fn sqrt_in(t: &Tower, a: &Coeffs, level: usize) -> Option<Coeffs> {
    if a.is_empty() {
        return Some(Coeffs::new());
    }
    if level == 0 {
        let q = a.get(&0)?;
        return rational_sqrt(q).map(|r| Coeffs::from([(0, r)]));
    }
    let i = level - 1;
    let bit = 1u32 << i;
    let (lo, hi) = split_at(a, bit);
    let s = &t.gens[i].square;
    if hi.is_empty() {
        if let Some(p) = sqrt_in(t, &lo, i) {
            return Some(p);
        }
        // lo = s * q^2  =>  sqrt = q * g
        let q2 = t.mul_coeffs(&lo, &t.inv_coeffs(s));
        let q = sqrt_in(t, &q2, i)?;
        return Some(q.into_iter().map(|(k, c)| (k | bit, c)).collect());
    }
    // (p + q g)^2 = p^2 + s q^2 + 2 p q g
    let lo2 = t.mul_coeffs(&lo, &lo);
    let s_hi2 = t.mul_coeffs(s, &t.mul_coeffs(&hi, &hi));
    let mut norm = lo2;
    for (k, c) in s_hi2 {
        add_term(&mut norm, k, -c);
    }
    let n = sqrt_in(t, &norm, i)?;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    for sign in [1, -1] {
        let mut p2 = lo.clone();
        for (&k, c) in &n {
            add_term(&mut p2, k, c * Rational::from_integer(BigInt::from(sign)));
        }
        if p2.is_empty() {
            continue;
        }
        let p2: Coeffs = p2.into_iter().map(|(k, c)| (k, c * &half)).collect();
        if let Some(p) = sqrt_in(t, &p2, i) {
            // q = hi / (2p)
            let two_p: Coeffs = p.iter().map(|(&k, c)| (k, c * Rational::from_integer(BigInt::from(2)))).collect();
            let q = t.mul_coeffs(&hi, &t.inv_coeffs(&two_p));
            let mut root = p;
            for (k, c) in q {
                add_term(&mut root, k | bit, c);
            }
            return Some(root);
        }
    }
    None
}

pub(crate) fn format_coeffs(t: &Tower, a: &Coeffs) -> String {
    if a.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (n, (&k, c)) in a.iter().enumerate() {
        let mono: Vec<&str> = (0..t.gens.len())
            .filter(|i| k & (1 << i) != 0)
            .map(|i| t.gens[i].name.as_str())
            .collect();
        let neg = c.is_negative();
        let abs = c.abs();
        let body = if mono.is_empty() {
            abs.to_string()
        } else if abs.is_one() {
            mono.join("*")
        } else {
            format!("{}*{}", abs, mono.join("*"))
        };
        match (n, neg) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push('+');
                out.push_str(&body);
            }
            (_, true) => {
                out.push('-');
                out.push_str(&body);
            }
        }
    }
    out
}

/// An exact element of a [`Tower`].
#[derive(Clone)]
pub struct TowerElement {
    tower: Arc<Tower>,
    coeffs: Coeffs,
}

impl TowerElement {
    pub(crate) fn from_coeffs(tower: &Arc<Tower>, coeffs: Coeffs) -> Self {
        TowerElement {
            tower: tower.clone(),
            coeffs,
        }
    }

    pub fn zero(tower: &Arc<Tower>) -> Self {
        Self::from_coeffs(tower, Coeffs::new())
    }

    pub fn one(tower: &Arc<Tower>) -> Self {
        Self::from_rational(tower, Rational::one())
    }

    pub fn from_rational(tower: &Arc<Tower>, q: Rational) -> Self {
        let mut coeffs = Coeffs::new();
        add_term(&mut coeffs, 0, q);
        Self::from_coeffs(tower, coeffs)
    }

    pub fn from_int(tower: &Arc<Tower>, n: i64) -> Self {
        Self::from_rational(tower, Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(tower: &Arc<Tower>, n: i64, d: i64) -> Self {
        Self::from_rational(tower, Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    /// The value as a rational number, when the element has no irrational part.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => self.coeffs.get(&0).cloned(),
            _ => None,
        }
    }

    /// Coefficients in the canonical basis, keyed by generator bit masks.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coeffs.iter().map(|(&k, c)| (k, c))
    }

    /// Union of the generator masks this element uses.
    pub fn support(&self) -> u32 {
        self.coeffs.keys().fold(0, |m, &k| m | k)
    }

    /// True when every generator used has a rational square.
    pub fn is_rational_radical(&self) -> bool {
        self.support() & !self.tower.rational_mask() == 0
    }

    /// Re-expresses this element in a tower that extends its own.
    pub fn lift(&self, tower: &Arc<Tower>) -> Result<TowerElement> {
        if self.tower.id == tower.id {
            return Ok(self.clone());
        }
        if self.tower.is_prefix_of(tower) {
            return Ok(Self::from_coeffs(tower, self.coeffs.clone()));
        }
        // Rational values embed everywhere.
        if self.support() == 0 {
            return Ok(Self::from_coeffs(tower, self.coeffs.clone()));
        }
        self.transport(tower)
    }

    /// Moves a combination of rational radicals into an unrelated tower by
    /// locating the square root of each monomial's radicand there.
    fn transport(&self, tower: &Arc<Tower>) -> Result<TowerElement> {
        if !self.is_rational_radical() {
            return Err(Error::TowerMismatch);
        }
        let mut out = TowerElement::zero(tower);
        for (mask, c) in &self.coeffs {
            let mut r = BigInt::one();
            for i in 0..self.tower.gens.len() {
                if mask & (1 << i) != 0 {
                    r *= self.tower.gens[i].radicand.as_ref().expect("rational radical");
                }
            }
            let (f, sf) = ntheory::squarefree_decompose(&r)?;
            let root = if sf.is_one() {
                TowerElement::one(tower)
            } else {
                tower
                    .sqrt_exact(&TowerElement::from_rational(tower, Rational::from_integer(sf)))
                    .ok_or(Error::TowerMismatch)?
            };
            out = &out + &root.scale(&(c * Rational::from_integer(f)));
        }
        Ok(out)
    }

    fn aligned(&self, other: &TowerElement) -> Result<(Arc<Tower>, TowerElement, TowerElement)> {
        let t = match Tower::common(&self.tower, &other.tower) {
            Ok(t) => t,
            Err(e) => {
                if other.support() == 0 {
                    self.tower.clone()
                } else if self.support() == 0 {
                    other.tower.clone()
                } else if let Ok(b) = other.transport(&self.tower) {
                    return Ok((self.tower.clone(), self.clone(), b));
                } else if let Ok(a) = self.transport(&other.tower) {
                    return Ok((other.tower.clone(), a, other.clone()));
                } else {
                    return Err(e);
                }
            }
        };
        Ok((t.clone(), self.lift(&t)?, other.lift(&t)?))
    }

    pub fn checked_add(&self, other: &TowerElement) -> Result<TowerElement> {
        let (t, a, b) = self.aligned(other)?;
        let mut out = a.coeffs;
        for (k, c) in b.coeffs {
            add_term(&mut out, k, c);
        }
        Ok(Self::from_coeffs(&t, out))
    }

    pub fn checked_sub(&self, other: &TowerElement) -> Result<TowerElement> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &TowerElement) -> Result<TowerElement> {
        let (t, a, b) = self.aligned(other)?;
        let coeffs = t.mul_coeffs(&a.coeffs, &b.coeffs);
        Ok(Self::from_coeffs(&t, coeffs))
    }

    pub fn checked_div(&self, other: &TowerElement) -> Result<TowerElement> {
        let inv = other.inv()?;
        self.checked_mul(&inv)
    }

    pub fn inv(&self) -> Result<TowerElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_coeffs(&self.tower, self.tower.inv_coeffs(&self.coeffs)))
    }

    pub fn scale(&self, q: &Rational) -> TowerElement {
        if q.is_zero() {
            return Self::zero(&self.tower);
        }
        Self::from_coeffs(
            &self.tower,
            self.coeffs.iter().map(|(&k, c)| (k, c * q)).collect(),
        )
    }

    pub fn square(&self) -> TowerElement {
        self * self
    }

    pub fn pow(&self, e: u32) -> TowerElement {
        let mut acc = Self::one(&self.tower);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Applies the automorphism that negates each generator in `flips`.
    ///
    /// Only generators with rational squares may be flipped, and the element
    /// itself must avoid formal generators.
    pub fn galois_conjugate(&self, flips: u32) -> Result<TowerElement> {
        let rational = self.tower.rational_mask();
        if !self.is_rational_radical() || flips & !rational != 0 {
            return Err(Error::FormalSupport(self.to_string()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&k, c)| {
                if (k & flips).count_ones() % 2 == 1 {
                    (k, -c)
                } else {
                    (k, c.clone())
                }
            })
            .collect();
        Ok(Self::from_coeffs(&self.tower, coeffs))
    }

    /// Certified sign at the distinguished embedding.
    pub fn sign(&self) -> Result<i8> {
        self.sign_at(&Embedding::identity())
    }

    /// Certified sign under the embedding that flips the marked generators.
    pub fn sign_at(&self, emb: &Embedding) -> Result<i8> {
        if self.is_zero() {
            return Ok(0);
        }
        interval::certified_sign(&self.tower, &self.coeffs, emb)
    }

    pub fn is_positive(&self) -> bool {
        self.sign().map(|s| s > 0).unwrap_or(false)
    }

    /// Rational enclosure of width at most `2^-bits` under `emb`.
    pub fn embed_interval(&self, emb: &Embedding, bits: u32) -> Result<(Rational, Rational)> {
        interval::enclose(&self.tower, &self.coeffs, emb, bits)
    }

    /// Nearest double at the distinguished embedding.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        match self.embed_interval(&Embedding::identity(), 64) {
            Ok((lo, hi)) => ((lo + hi) / Rational::from_integer(BigInt::from(2)))
                .to_f64()
                .unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    }

    /// Compares values at the distinguished embedding.
    pub fn cmp_value(&self, other: &TowerElement) -> Result<Ordering> {
        Ok(self.checked_sub(other)?.sign()?.cmp(&0))
    }
}

impl PartialEq for TowerElement {
    fn eq(&self, other: &Self) -> bool {
        match self.aligned(other) {
            Ok((_, a, b)) => a.coeffs == b.coeffs,
            Err(_) => false,
        }
    }
}

impl fmt::Display for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_coeffs(&self.tower, &self.coeffs))
    }
}

impl fmt::Debug for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Neg for &TowerElement {
    type Output = TowerElement;
    fn neg(self) -> TowerElement {
        TowerElement::from_coeffs(
            &self.tower,
            self.coeffs.iter().map(|(&k, c)| (k, -c)).collect(),
        )
    }
}

impl Neg for TowerElement {
    type Output = TowerElement;
    fn neg(self) -> TowerElement {
        -&self
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&TowerElement> for &TowerElement {
            type Output = TowerElement;
            /// Panics when the operands live in unrelated towers.
            fn $method(self, rhs: &TowerElement) -> TowerElement {
                self.$checked(rhs).expect(concat!("TowerElement::", stringify!($method)))
            }
        }
        impl $trait<TowerElement> for TowerElement {
            type Output = TowerElement;
            fn $method(self, rhs: TowerElement) -> TowerElement {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&TowerElement> for TowerElement {
            type Output = TowerElement;
            fn $method(self, rhs: &TowerElement) -> TowerElement {
                (&self).$method(rhs)
            }
        }
        impl $trait<TowerElement> for &TowerElement {
            type Output = TowerElement;
            fn $method(self, rhs: TowerElement) -> TowerElement {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

/// Mutable handle on a growing tower, used while evaluating expressions.
#[derive(Debug, Clone)]
pub struct TowerBuilder {
    tower: Arc<Tower>,
}

impl Default for TowerBuilder {
    fn default() -> Self {
        Self::new(Tower::rationals())
    }
}

impl TowerBuilder {
    pub fn new(tower: Arc<Tower>) -> Self {
        TowerBuilder { tower }
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    /// Positive square root of `s`, extending the tower when necessary.
    pub fn sqrt(&mut self, s: &TowerElement) -> Result<TowerElement> {
        let (t, r) = self.tower.adjoin_sqrt(s)?;
        self.tower = t;
        Ok(r)
    }

    pub fn sqrt_int(&mut self, n: i64) -> Result<TowerElement> {
        let s = TowerElement::from_int(&self.tower, n);
        self.sqrt(&s)
    }

    pub fn rational(&self, n: i64, d: i64) -> TowerElement {
        TowerElement::from_ratio(&self.tower, n, d)
    }

    /// Parses and evaluates an expression in the radical grammar.
    pub fn eval_str(&mut self, text: &str) -> Result<TowerElement> {
        let e = parse_expr(text)?;
        e.eval(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> (Arc<Tower>, TowerElement) {
        let mut b = TowerBuilder::default();
        let a = b.eval_str("(1+sqrt(5))/2").unwrap();
        (b.tower().clone(), a)
    }

    #[test]
    fn golden_ratio_identity() {
        let (t, a) = golden();
        let one = TowerElement::one(&t);
        assert_eq!(&a * &a, &a + &one);
        assert_eq!(a.to_string(), "1/2+1/2*sqrt(5)");
    }

    #[test]
    fn half_root_two_squared() {
        let mut b = TowerBuilder::default();
        let x = b.eval_str("-sqrt(2)/2").unwrap();
        assert_eq!((&x * &x).as_rational(), Some(Rational::new(1.into(), 2.into())));
    }

    #[test]
    fn determinant_ratio_is_kept_exact() {
        let (t, a) = golden();
        let six = TowerElement::from_int(&t, 6);
        let x = (&six - &a.scale(&Rational::from_integer(2.into()))) / TowerElement::from_int(&t, 5);
        assert_eq!(x.to_string(), "1-1/5*sqrt(5)");
        let back = &x * &TowerElement::from_int(&t, 5) + a.scale(&Rational::from_integer(2.into()));
        assert_eq!(back, six);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let (t, a) = golden();
        assert_eq!(a.checked_div(&TowerElement::zero(&t)), Err(Error::DivisionByZero));
    }

    #[test]
    fn unrelated_towers_do_not_mix() {
        let mut b1 = TowerBuilder::default();
        let mut b2 = TowerBuilder::default();
        let x = b1.sqrt_int(2).unwrap();
        let y = b2.sqrt_int(3).unwrap();
        assert_eq!(x.checked_add(&y), Err(Error::TowerMismatch));
        // Rationals mix with anything.
        assert!(x.checked_add(&TowerElement::from_int(b2.tower(), 1)).is_ok());
    }

    #[test]
    fn adjoin_existing_square() {
        let t = Tower::rationals();
        let (t2, r) = t.adjoin_sqrt(&TowerElement::from_ratio(&t, 9, 4)).unwrap();
        assert_eq!(t2.num_generators(), 0);
        assert_eq!(r.as_rational(), Some(Rational::new(3.into(), 2.into())));
    }

    #[test]
    fn adjoin_golden_square_returns_golden_ratio() {
        let (t, a) = golden();
        let s = &a + &TowerElement::one(&t);
        let (t2, r) = t.adjoin_sqrt(&s).unwrap();
        assert_eq!(t2.num_generators(), 1);
        assert_eq!(r, a);
    }

    #[test]
    fn radicands_are_normalized() {
        let mut b = TowerBuilder::default();
        let r8 = b.sqrt_int(8).unwrap();
        assert_eq!(r8.to_string(), "2*sqrt(2)");
        b.sqrt_int(5).unwrap();
        let r10 = b.sqrt_int(10).unwrap();
        assert_eq!(b.tower().num_generators(), 2);
        assert_eq!(r10.to_string(), "sqrt(2)*sqrt(5)");
    }

    #[test]
    fn nested_radical_becomes_formal_generator() {
        let mut b = TowerBuilder::default();
        let w = b.eval_str("sqrt(sqrt(5)/(2*sqrt(5)-3))").unwrap();
        assert_eq!(b.tower().num_generators(), 2);
        assert!(!w.is_rational_radical());
        assert!((w.to_f64() - 1.232_447_820_488_646).abs() < 1e-12);
        // sqrt(3 + sqrt 5) = sqrt(2) * a, detected once sqrt(2) is present.
        b.sqrt_int(2).unwrap();
        let v = b.eval_str("sqrt(3+sqrt(5))").unwrap();
        assert_eq!(b.tower().num_generators(), 3);
        assert!(v.is_rational_radical());
    }

    #[test]
    fn conjugation_and_norm() {
        let (t, a) = golden();
        let sigma_a = a.galois_conjugate(1).unwrap();
        assert_eq!(sigma_a.to_string(), "1/2-1/2*sqrt(5)");
        let x = TowerElement::from_int(&t, 6) - a.scale(&Rational::from_integer(2.into()));
        let sx = x.galois_conjugate(1).unwrap();
        assert_eq!(sx.to_string(), "5+sqrt(5)");
        assert_eq!((&x * &sx).as_rational(), Some(Rational::from_integer(20.into())));
        let q = TowerElement::from_ratio(&t, 3, 7);
        assert_eq!(q.galois_conjugate(1).unwrap(), q);
    }

    #[test]
    fn conjugating_formal_support_fails() {
        let mut b = TowerBuilder::default();
        let w = b.eval_str("sqrt(1+sqrt(2))").unwrap();
        assert!(matches!(w.galois_conjugate(1), Err(Error::FormalSupport(_))));
    }

    #[test]
    fn signs_at_embeddings() {
        let (t, a) = golden();
        assert_eq!(a.sign().unwrap(), 1);
        assert_eq!(a.sign_at(&Embedding::flipping(1)).unwrap(), -1);
        let x = TowerElement::from_int(&t, 6) - a.scale(&Rational::from_integer(2.into()));
        assert_eq!(x.sign().unwrap(), 1);
        let (lo, hi) = a.embed_interval(&Embedding::flipping(1), 40).unwrap();
        let (lo, hi): (f64, f64) = (
            num_traits::ToPrimitive::to_f64(&lo).unwrap(),
            num_traits::ToPrimitive::to_f64(&hi).unwrap(),
        );
        assert!(lo <= -0.618_033_988_7 && -0.618_033_988_7 <= hi + 1e-10);
    }

    #[test]
    fn inconsistent_flip_of_formal_generator() {
        let mut b = TowerBuilder::default();
        // g = sqrt(sqrt(2) - 1): flipping sqrt(2) makes the radicand negative.
        let g = b.eval_str("sqrt(sqrt(2)-1)").unwrap();
        assert_eq!(
            g.sign_at(&Embedding::flipping(1)),
            Err(Error::InconsistentEmbedding { generator: 1 })
        );
    }

    #[test]
    fn rational_radicals_cross_towers() {
        let mut b1 = TowerBuilder::default();
        let x = b1.eval_str("sqrt(2)+3*sqrt(10)").unwrap();
        let mut b2 = TowerBuilder::default();
        b2.eval_str("sqrt(5)").unwrap();
        let y = b2.eval_str("sqrt(2)").unwrap();
        // x lives in Q(sqrt2, sqrt5) built in the other order
        let z = x.checked_mul(&y).unwrap();
        assert!(Arc::ptr_eq(z.tower(), x.tower()));
        assert_eq!(z.to_string(), "2+3*sqrt(2)*sqrt(10)");
        assert_eq!(z.lift(y.tower()).unwrap().to_string(), "2+6*sqrt(5)");
        let q5 = Tower::quadratic(5).unwrap();
        let w = TowerElement::from_int(&q5, 1) + q5.generator(0);
        let q3 = Tower::quadratic(3).unwrap();
        assert!(w.checked_mul(&q3.generator(0)).is_err());
        assert_eq!(w.lift(y.tower()).unwrap().to_string(), "1+sqrt(5)");
    }
}
