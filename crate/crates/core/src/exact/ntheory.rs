//! Integer helpers: squarefree parts, factorization, quadratic residues.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const TRIAL_LIMIT: u64 = 1_000_000;

/// Exact integer square root, if `n` is a perfect square.
pub fn int_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Ceiling of the square root of a nonnegative integer.
pub fn int_sqrt_ceil(n: &BigInt) -> BigInt {
    let r = n.sqrt();
    if &r * &r == *n {
        r
    } else {
        r + 1
    }
}

/// Writes `n = f^2 * c` with `c` squarefree (carrying the sign of `n`).
pub fn squarefree_decompose(n: &BigInt) -> Result<(BigInt, BigInt)> {
    assert!(!n.is_zero());
    let mut f = BigInt::one();
    let mut c = if n.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    for (p, e) in factor(&n.abs())? {
        for _ in 0..e / 2 {
            f *= &p;
        }
        if e % 2 == 1 {
            c *= &p;
        }
    }
    Ok((f, c))
}

/// Factorization of `n > 0` into primes with exponents, sorted by prime.
pub fn factor(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    assert!(n.is_positive());
    let mut out = Vec::new();
    let mut m = n.clone();
    let push = |p: BigInt, e: u32, out: &mut Vec<(BigInt, u32)>| {
        if e > 0 {
            out.push((p, e));
        }
    };
    let two = BigInt::from(2);
    let mut e = 0;
    while m.is_even() {
        m /= &two;
        e += 1;
    }
    push(two, e, &mut out);
    let mut p = 3u64;
    while p <= TRIAL_LIMIT {
        let bp = BigInt::from(p);
        if &bp * &bp > m {
            break;
        }
        let mut e = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        push(bp, e, &mut out);
        p += 2;
    }
    if !m.is_one() {
        let bound = BigInt::from(TRIAL_LIMIT);
        if &bound * &bound >= m {
            out.push((m, 1));
        } else {
            let mut large = Vec::new();
            split_large(&m, &mut large).ok_or_else(|| Error::Factorization(n.to_string()))?;
            large.sort();
            for p in large {
                match out.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => out.push((p, 1)),
                }
            }
        }
    }
    Ok(out)
}

/// Prime factors, with repetition, of `m` free of small primes.
fn split_large(m: &BigInt, out: &mut Vec<BigInt>) -> Option<()> {
    if m.is_one() {
        return Some(());
    }
    if is_probable_prime(m) {
        out.push(m.clone());
        return Some(());
    }
    if let Some(r) = int_sqrt_exact(m) {
        split_large(&r, out)?;
        return split_large(&r, out);
    }
    let d = pollard_rho(m)?;
    split_large(&d, out)?;
    split_large(&(m / &d), out)
}

/// A nontrivial divisor of the composite `n`, by Pollard's rho.
fn pollard_rho(n: &BigInt) -> Option<BigInt> {
    const ROUNDS: u64 = 1 << 22;
    for c in 1..=20u32 {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let (mut x, mut y) = (BigInt::from(2), BigInt::from(2));
        let mut steps = 0;
        loop {
            x = f(&x);
            y = f(&f(&y));
            let g = (&x - &y).abs().gcd(n);
            steps += 1;
            if g.is_one() && steps < ROUNDS {
                continue;
            }
            if !g.is_one() && &g != n {
                return Some(g);
            }
            break;
        }
    }
    None
}

/// The distinct prime divisors of `n != 0`.
pub fn prime_divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    if n.abs().is_one() {
        return Ok(Vec::new());
    }
    Ok(factor(&n.abs())?.into_iter().map(|(p, _)| p).collect())
}

/// Miller-Rabin with the first twelve prime bases (deterministic below 3.3e24).
pub fn is_probable_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if *n < two {
        return false;
    }
    const BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        let b = BigInt::from(b);
        if *n == b {
            return true;
        }
        if (n % &b).is_zero() {
            return false;
        }
    }
    let n1: BigInt = n - 1;
    let mut d = n1.clone();
    let mut s = 0;
    while d.is_even() {
        d /= &two;
        s += 1;
    }
    'outer: for b in BASES {
        let mut x = BigInt::from(b).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    assert!(!n.is_zero());
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// Nonnegative residue of `a` modulo `m`.
pub fn modulo(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

/// Legendre symbol `(a|p)` for an odd prime `p`, via Euler's criterion.
pub fn legendre(a: &BigInt, p: &BigInt) -> i8 {
    let a = modulo(a, p);
    if a.is_zero() {
        return 0;
    }
    let e = (p - 1u32) / 2u32;
    if a.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

/// Modular inverse of `a` modulo `m` (requires gcd 1).
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    assert!(g.gcd.is_one(), "not invertible");
    modulo(&g.x, m)
}

/// Smallest nonnegative `r < p` with `r^2 = d (mod p)`, by exhaustive search.
pub fn sqrt_mod_prime(d: &BigInt, p: &BigInt) -> Option<BigInt> {
    let d = modulo(d, p);
    let pu = p.to_u64().expect("prime too large for residue search");
    (0..pu)
        .map(BigInt::from)
        .find(|r| modulo(&(r * r), p) == d)
}

/// Lifts a simple root `r` of `t^2 - d` modulo `p` to a root modulo `p^k`.
pub fn hensel_sqrt(d: &BigInt, p: &BigInt, r: &BigInt, k: u32) -> BigInt {
    let mut root = modulo(r, p);
    let mut modulus = p.clone();
    for _ in 1..k {
        modulus *= p;
        // Newton step: r <- r - (r^2 - d) / (2r)
        let f = &root * &root - d;
        let inv = mod_inverse(&(BigInt::from(2) * &root), &modulus);
        root = modulo(&(&root - f * inv), &modulus);
    }
    root
}
