//! Integer utilities: sieving, factorization, divisors and the Kronecker symbol.

use std::sync::OnceLock;

use num_integer::Integer;

use crate::{Error, Result};

/// Primes below this bound are cached and used for trial division.
const SIEVE_BOUND: u64 = 1_000_000;

fn cached_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| prime_sieve(SIEVE_BOUND))
}

/// Prime factorization as ascending `(prime, exponent)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pairs: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.pairs.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime factors.
    pub fn distinct(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn product(&self) -> u128 {
        self.pairs
            .iter()
            .map(|&(p, e)| (p as u128).pow(e))
            .product()
    }
}

/// Sieve of Eratosthenes. Returns every prime `<= limit`.
pub fn prime_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard-Brent with a fixed sequence of increments, so results are reproducible.
fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    for c in 1..n {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(r - k).min(128) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("composite input always has a nontrivial factor")
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Exact factorization of `n >= 1`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let mut rest = n;
    let mut pairs = Vec::new();
    for &p in cached_primes() {
        if p * p > rest {
            break;
        }
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            pairs.push((p, e));
        }
    }
    if rest > 1 {
        let mut large = Vec::new();
        split_large(rest, &mut large);
        large.sort_unstable();
        for p in large {
            match pairs.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => pairs.push((p, 1)),
            }
        }
    }
    Ok(Factorization { pairs })
}

pub fn is_squarefree(n: u64) -> bool {
    match factorize(n) {
        Ok(f) => f.pairs.iter().all(|&(_, e)| e == 1),
        Err(_) => false,
    }
}

/// Ascending list of the positive divisors of `n`. Empty for `n = 0`.
pub fn divisors(n: u64) -> Vec<u64> {
    let Ok(f) = factorize(n) else {
        return Vec::new();
    };
    let mut out = vec![1u64];
    for &(p, e) in f.pairs() {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// `d` is congruent to 0 or 1 mod 4.
pub fn is_discriminant(d: i64) -> bool {
    matches!(d.rem_euclid(4), 0 | 1)
}

/// Discriminant of a quadratic field: `d = 1 mod 4` squarefree, or `d = 4m` with
/// `m = 2, 3 mod 4` squarefree. `d = 1` is excluded.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Kronecker symbol `(d / n)`.
///
/// `(d/2)` is 0 for even `d`, 1 for `d = +-1 mod 8` and -1 for `d = +-3 mod 8`;
/// `(d/-1)` is the sign of `d`; `(d/0)` is 1 when `d = +-1` and 0 otherwise.
pub fn kronecker(d: i64, n: i64) -> i8 {
    const TAB2: [i8; 8] = [0, 1, 0, -1, 0, -1, 0, 1];
    let mut a = d as i128;
    let mut b = n as i128;
    if b == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let v = b.trailing_zeros();
    b >>= v;
    let mut k: i8 = if v.is_multiple_of(2) {
        1
    } else {
        TAB2[(a & 7) as usize]
    };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    loop {
        if a == 0 {
            return if b > 1 { 0 } else { k };
        }
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 {
            k *= TAB2[(b & 7) as usize];
        }
        // reciprocity; `a` may be negative, two's complement keeps the mod 4 test valid
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}
