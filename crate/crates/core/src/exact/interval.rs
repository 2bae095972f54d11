//! Certified real evaluation with dyadic fixed-point intervals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Coeffs, Rational, Tower};
use crate::error::{Error, Result};

use std::sync::atomic::{AtomicU32, Ordering};

const DEFAULT_START_BITS: u32 = 64;
const MAX_BITS: u32 = 1 << 18;

static START_BITS: AtomicU32 = AtomicU32::new(DEFAULT_START_BITS);

/// Sets the working precision, in bits, at which sign and interval
/// refinement start. Results do not depend on it, only running time.
pub fn set_start_precision(bits: u32) {
    START_BITS.store(bits.clamp(8, MAX_BITS), Ordering::Relaxed);
}

pub fn start_precision() -> u32 {
    START_BITS.load(Ordering::Relaxed)
}

/// A real embedding of a tower, recorded as the set of generators whose
/// images are the negative square roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Embedding {
    flips: u32,
}

impl Embedding {
    pub fn identity() -> Self {
        Embedding { flips: 0 }
    }

    pub fn flipping(flips: u32) -> Self {
        Embedding { flips }
    }

    pub fn flips(&self) -> u32 {
        self.flips
    }

    pub fn is_identity(&self) -> bool {
        self.flips == 0
    }
}

/// Closed interval `[lo, hi] / 2^prec`.
#[derive(Debug, Clone)]
struct Fixed {
    lo: BigInt,
    hi: BigInt,
}

fn pow2(p: u32) -> BigInt {
    BigInt::one() << p as usize
}

impl Fixed {
    fn from_rational(q: &Rational, p: u32) -> Fixed {
        let n = q.numer() << p as usize;
        let d = q.denom();
        Fixed {
            lo: n.div_floor(d),
            hi: Integer::div_ceil(&n, d),
        }
    }

    fn add(&self, o: &Fixed) -> Fixed {
        Fixed {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    fn mul(&self, o: &Fixed, p: u32) -> Fixed {
        let cands = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let min = cands.iter().min().unwrap();
        let max = cands.iter().max().unwrap();
        let s = pow2(p);
        Fixed {
            lo: min.div_floor(&s),
            hi: Integer::div_ceil(max, &s),
        }
    }

    fn neg(&self) -> Fixed {
        Fixed {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    fn sqrt(&self, p: u32) -> Fixed {
        let lo = if self.lo.is_positive() {
            (&self.lo << p as usize).sqrt()
        } else {
            BigInt::zero()
        };
        let hi_sq = &self.hi << p as usize;
        let mut hi = hi_sq.sqrt();
        if &hi * &hi < hi_sq {
            hi += 1;
        }
        Fixed { lo, hi }
    }
}

enum Eval {
    Done(Fixed),
    /// A generator square straddled zero at this precision.
    Refine,
}

fn eval_coeffs(vals: &[Fixed], a: &Coeffs, p: u32) -> Fixed {
    let mut acc = Fixed {
        lo: BigInt::zero(),
        hi: BigInt::zero(),
    };
    for (&k, c) in a {
        let mut term = Fixed::from_rational(c, p);
        for (i, v) in vals.iter().enumerate() {
            if k & (1 << i) != 0 {
                term = term.mul(v, p);
            }
        }
        acc = acc.add(&term);
    }
    acc
}

fn generator_values(t: &Tower, emb: &Embedding, p: u32) -> Result<Option<Vec<Fixed>>> {
    let mut vals: Vec<Fixed> = Vec::with_capacity(t.gens.len());
    for (i, g) in t.gens.iter().enumerate() {
        let s = eval_coeffs(&vals, &g.square, p);
        if s.hi.is_negative() {
            return Err(Error::InconsistentEmbedding { generator: i });
        }
        if !s.lo.is_positive() {
            return Ok(None);
        }
        let r = s.sqrt(p);
        vals.push(if emb.flips & (1 << i) != 0 { r.neg() } else { r });
    }
    Ok(Some(vals))
}

fn eval_at(t: &Tower, a: &Coeffs, emb: &Embedding, p: u32) -> Result<Eval> {
    match generator_values(t, emb, p)? {
        Some(vals) => Ok(Eval::Done(eval_coeffs(&vals, a, p))),
        None => Ok(Eval::Refine),
    }
}

pub(super) fn certified_sign(t: &Tower, a: &Coeffs, emb: &Embedding) -> Result<i8> {
    let mut p = start_precision();
    while p <= MAX_BITS {
        if let Eval::Done(iv) = eval_at(t, a, emb, p)? {
            if iv.lo.is_positive() {
                return Ok(1);
            }
            if iv.hi.is_negative() {
                return Ok(-1);
            }
        }
        p *= 2;
    }
    Err(Error::NoConvergence("sign refinement exceeded precision cap".into()))
}

pub(super) fn enclose(t: &Tower, a: &Coeffs, emb: &Embedding, bits: u32) -> Result<(Rational, Rational)> {
    let mut p = bits.max(start_precision()) + 16;
    while p <= MAX_BITS.max(4 * bits) {
        if let Eval::Done(iv) = eval_at(t, a, emb, p)? {
            let scale = pow2(p);
            // width / 2^p <= 2^-bits
            if (&iv.hi - &iv.lo) << bits as usize <= scale {
                return Ok((
                    Rational::new(iv.lo, scale.clone()),
                    Rational::new(iv.hi, scale),
                ));
            }
        }
        p *= 2;
    }
    Err(Error::NoConvergence("interval refinement exceeded precision cap".into()))
}
