//! Positive definite binary quadratic forms, their class group and genus data.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::arith::{factorize, is_discriminant, is_fundamental_discriminant, is_squarefree};
use crate::{Error, Result};

/// Primitive positive definite form `a x^2 + b x y + c y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let f = QuadForm { a, b, c };
        let primitive = a.gcd(&b).gcd(&c) == 1;
        if a <= 0 || f.discriminant() >= 0 || !primitive {
            return Err(Error::InvalidForm { a, b, c });
        }
        Ok(f)
    }

    /// The principal form `x^2 + xy + (1-D)/4 y^2` or `x^2 - D/4 y^2`.
    pub fn principal(d: i64) -> Result<Self> {
        check_negative_discriminant(d)?;
        if d.rem_euclid(4) == 0 {
            Ok(QuadForm {
                a: 1,
                b: 0,
                c: -d / 4,
            })
        } else {
            Ok(QuadForm {
                a: 1,
                b: 1,
                c: (1 - d) / 4,
            })
        }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// `|b| <= a <= c`, with `b >= 0` when `|b| = a` or `a = c`.
    pub fn is_reduced(&self) -> bool {
        let ab = self.b.abs();
        ab <= self.a && self.a <= self.c && (self.b >= 0 || (ab != self.a && self.a != self.c))
    }

    /// The unique reduced form properly equivalent to `self`.
    pub fn reduce(&self) -> QuadForm {
        let d = self.discriminant();
        let (mut a, mut b, mut c) = (self.a, self.b, self.c);
        loop {
            // move b into (-a, a]
            let two_a = 2 * a;
            let k = Integer::div_floor(&(a - b), &two_a);
            if k != 0 {
                b += two_a * k;
                c = (b * b - d) / (4 * a);
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            return QuadForm { a, b, c };
        }
    }

    /// `f(x X + u Y, y X + v Y)`; the matrix should have determinant 1.
    pub fn transform(&self, x: i64, u: i64, y: i64, v: i64) -> QuadForm {
        let a = self.eval(x, y) as i64;
        let b = 2 * self.a * x * u + self.b * (x * v + y * u) + 2 * self.c * y * v;
        let c = self.eval(u, v) as i64;
        QuadForm { a, b, c }
    }

    /// Integers `x` with `f(x, y) <= bound`, as an inclusive range.
    pub fn x_range(&self, y: i64, bound: i64) -> Option<(i64, i64)> {
        let dabs = -(self.discriminant() as i128);
        let disc = 4 * self.a as i128 * bound as i128 - dabs * (y as i128) * (y as i128);
        if disc < 0 {
            return None;
        }
        let center = -(self.b as f64) * y as f64 / (2.0 * self.a as f64);
        let half = (disc as f64).sqrt() / (2.0 * self.a as f64);
        let bound = bound as i128;
        let mut lo = (center - half).ceil() as i64;
        let mut hi = (center + half).floor() as i64;
        while self.eval(lo - 1, y) <= bound {
            lo -= 1;
        }
        while lo <= hi && self.eval(lo, y) > bound {
            lo += 1;
        }
        while self.eval(hi + 1, y) <= bound {
            hi += 1;
        }
        while hi >= lo && self.eval(hi, y) > bound {
            hi -= 1;
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Largest `|y|` that can give `f(x, y) <= bound`.
    pub fn y_bound(&self, bound: i64) -> i64 {
        let dabs = -(self.discriminant() as i128);
        let num = 4 * self.a as i128 * bound as i128;
        let mut y = ((num as f64 / dabs as f64).sqrt()) as i64;
        while (y as i128 + 1) * (y as i128 + 1) * dabs <= num {
            y += 1;
        }
        while y > 0 && (y as i128) * (y as i128) * dabs > num {
            y -= 1;
        }
        y
    }
}

fn check_negative_discriminant(d: i64) -> Result<()> {
    if !is_discriminant(d) {
        return Err(Error::NotDiscriminant(d));
    }
    if d >= 0 {
        return Err(Error::NotNegative(d));
    }
    Ok(())
}

fn check_fundamental(d: i64) -> Result<()> {
    check_negative_discriminant(d)?;
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    Ok(())
}

/// Discriminant `-4N` for an in-scope `N`: squarefree with `N != 3 mod 4`.
///
/// This is the single gate every `N`-driven entry point goes through.
pub fn scope_discriminant(n: u64) -> Result<i64> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    if !is_squarefree(n) {
        return Err(Error::OutOfScope {
            n,
            reason: "N must be squarefree",
        });
    }
    if n % 4 == 3 {
        return Err(Error::OutOfScope {
            n,
            reason: "-N = 1 mod 4, so Z[sqrt(-N)] is not the maximal order",
        });
    }
    Ok(-4 * n as i64)
}

/// Whether `N` passes [`scope_discriminant`].
pub fn in_scope(n: u64) -> bool {
    scope_discriminant(n).is_ok()
}

/// Every primitive reduced form of discriminant `d`, principal form first.
pub fn reduced_forms(d: i64) -> Result<Vec<QuadForm>> {
    check_negative_discriminant(d)?;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = QuadForm {
                a,
                b,
                c: num / (4 * a),
            };
            if f.is_reduced() && a.gcd(&b).gcd(&f.c) == 1 {
                out.push(f);
            }
        }
        a += 1;
    }
    out.sort_by_key(|f| (f.a, f.b.abs(), -f.b));
    Ok(out)
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = (a as i128).extended_gcd(&(b as i128));
    (e.gcd as i64, e.x as i64, e.y as i64)
}

/// An equivalent form whose leading coefficient is coprime to `m`.
fn coprime_leading(g: &QuadForm, m: i64) -> QuadForm {
    for r in 1i64.. {
        for x in -r..=r {
            for y in [-r, r] {
                for (x, y) in [(x, y), (y, x)] {
                    if x.gcd(&y) != 1 {
                        continue;
                    }
                    let v = g.eval(x, y) as i64;
                    if v.gcd(&m) == 1 {
                        let (_, s, t) = ext_gcd(x, y);
                        // x s + y t = 1
                        return g.transform(x, -t, y, s);
                    }
                }
            }
        }
    }
    unreachable!("a primitive form represents integers coprime to any modulus")
}

/// Dirichlet composition, returning the reduced representative of the product class.
pub fn compose(f: &QuadForm, g: &QuadForm) -> Result<QuadForm> {
    let d = f.discriminant();
    if g.discriminant() != d {
        return Err(Error::DiscriminantMismatch(d, g.discriminant()));
    }
    let g = if f.a.gcd(&g.a) == 1 {
        *g
    } else {
        coprime_leading(g, f.a)
    };
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2) = (g.a as i128, g.b as i128);
    // B = b2 (mod 2 a2), B = b1 (mod 2 a1)
    let inv = (a2.extended_gcd(&a1).x).rem_euclid(a1);
    let k = (((b1 - b2) / 2) % a1 * inv).rem_euclid(a1);
    let a3 = a1 * a2;
    let b3 = (b2 + 2 * a2 * k).rem_euclid(2 * a3);
    let c3 = (b3 * b3 - d as i128) / (4 * a3);
    debug_assert_eq!((b3 * b3 - d as i128) % (4 * a3), 0);
    Ok(QuadForm {
        a: a3 as i64,
        b: b3 as i64,
        c: c3 as i64,
    }
    .reduce())
}

/// Factors a fundamental discriminant into prime discriminants `-4, +-8, p*`, ordered by prime.
pub fn prime_discriminant_factorization(d: i64) -> Result<Vec<i64>> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let mut odd = Vec::new();
    let mut prod = 1i64;
    for p in factorize(d.unsigned_abs())?.primes().filter(|&p| p != 2) {
        let p = p as i64;
        let star = if p % 4 == 1 { p } else { -p };
        prod *= star;
        odd.push(star);
    }
    let residual = d / prod;
    let mut out = match residual {
        1 => Vec::new(),
        -4 | 8 | -8 => vec![residual],
        _ => return Err(Error::Invariant(format!("bad even part {residual} of {d}"))),
    };
    out.extend(odd);
    Ok(out)
}

/// An unordered factorization `D = D1 * D2` into discriminants, stored with `|D1| < |D2|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Splitting {
    pub d1: i64,
    pub d2: i64,
}

impl Splitting {
    pub fn new(d1: i64, d2: i64) -> Self {
        if d1.abs() <= d2.abs() {
            Splitting { d1, d2 }
        } else {
            Splitting { d1: d2, d2: d1 }
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.d1 == 1 || self.d2 == 1
    }

    pub fn product(&self) -> i64 {
        self.d1 * self.d2
    }
}

impl fmt::Display for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.d1, self.d2)
    }
}

/// The `2^(k-1)` ways to write `d` as a product of two discriminants, trivial one first.
pub fn genus_splittings(d: i64) -> Result<Vec<Splitting>> {
    let primes = prime_discriminant_factorization(d)?;
    let k = primes.len();
    let mut out: Vec<Splitting> = (0u32..1 << (k - 1))
        .map(|mask| {
            let d1: i64 = (0..k - 1)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| primes[i])
                .product();
            Splitting::new(d1, d / d1)
        })
        .collect();
    out.sort_by_key(|s| (s.d1.abs(), s.d1));
    Ok(out)
}

/// Smallest value a form takes that is coprime to a modulus, with where it is attained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RepresentedValue {
    pub value: u64,
    pub x: i64,
    pub y: i64,
}

/// Smallest `n = f(x, y) > 0` with `gcd(n, m) = 1`; ties go to the smallest `|y|`,
/// then the smallest `|x|`, then nonnegative coordinates.
pub fn represented_value_coprime(f: &QuadForm, m: u64) -> RepresentedValue {
    let m = m.max(1);
    let ok = |v: i128| v > 0 && (v as u64).gcd(&m) == 1;
    // any coprime value bounds the search ellipse
    let mut bound = None;
    let mut r = 1i64;
    while bound.is_none() {
        for x in -r..=r {
            for y in -r..=r {
                let v = f.eval(x, y);
                if ok(v) && bound.is_none_or(|b| v < b) {
                    bound = Some(v);
                }
            }
        }
        r *= 2;
    }
    let bound = bound.unwrap() as i64;
    let key = |rv: &RepresentedValue| (rv.value, rv.y.abs(), rv.x.abs(), rv.y < 0, rv.x < 0);
    let mut best: Option<RepresentedValue> = None;
    let yb = f.y_bound(bound);
    for y in -yb..=yb {
        let Some((lo, hi)) = f.x_range(y, bound) else {
            continue;
        };
        for x in lo..=hi {
            let v = f.eval(x, y);
            if ok(v) {
                let cand = RepresentedValue {
                    value: v as u64,
                    x,
                    y,
                };
                if best.is_none_or(|b| key(&cand) < key(&b)) {
                    best = Some(cand);
                }
            }
        }
    }
    best.expect("bounding value is inside the ellipse")
}

/// The form class group of a negative fundamental discriminant.
#[derive(Debug, Clone)]
pub struct ClassGroup {
    discriminant: i64,
    forms: Vec<QuadForm>,
    index: HashMap<QuadForm, usize>,
    table: Vec<Vec<usize>>,
    /// Generators of the cyclic factors, aligned with `invariant_factors`.
    generators: Vec<usize>,
    invariant_factors: Vec<u64>,
    /// Exponent vector of each class in terms of `generators`.
    coordinates: Vec<Vec<u64>>,
    prime_discriminants: Vec<i64>,
    splittings: Vec<Splitting>,
}

impl ClassGroup {
    pub fn new(d: i64) -> Result<Self> {
        check_fundamental(d)?;
        let forms = reduced_forms(d)?;
        let index: HashMap<QuadForm, usize> =
            forms.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let h = forms.len();
        let mut table = vec![vec![0usize; h]; h];
        for i in 0..h {
            for j in i..h {
                let prod = compose(&forms[i], &forms[j])?;
                let k = *index
                    .get(&prod)
                    .ok_or_else(|| Error::Invariant(format!("{prod} is not a reduced class")))?;
                table[i][j] = k;
                table[j][i] = k;
            }
        }
        let mut group = ClassGroup {
            discriminant: d,
            forms,
            index,
            table,
            generators: Vec::new(),
            invariant_factors: Vec::new(),
            coordinates: Vec::new(),
            prime_discriminants: prime_discriminant_factorization(d)?,
            splittings: genus_splittings(d)?,
        };
        group.decompose();
        Ok(group)
    }

    /// Class group of `x^2 + N y^2` for an in-scope `N`.
    pub fn for_n(n: u64) -> Result<Self> {
        Self::new(scope_discriminant(n)?)
    }

    /// Greedy extraction of maximal-order generators.
    fn decompose(&mut self) {
        let h = self.h();
        let mut member = vec![false; h];
        member[0] = true;
        let mut size = 1;
        let mut gens: Vec<(usize, u64)> = Vec::new();
        while size < h {
            let quotient_order = |x: usize| {
                let mut y = x;
                let mut d = 1u64;
                while !member[y] {
                    y = self.table[y][x];
                    d += 1;
                }
                d
            };
            let (x, d) = (0..h)
                .map(|x| (x, quotient_order(x)))
                .max_by_key(|&(x, d)| (d, std::cmp::Reverse(x)))
                .unwrap();
            // some element of the coset x S has order exactly d
            let y = (0..h)
                .filter(|&s| member[s])
                .map(|s| self.table[x][s])
                .find(|&y| self.order(y) == d)
                .expect("maximal-order coset contains an element of that order");
            gens.push((y, d));
            let old: Vec<usize> = (0..h).filter(|&s| member[s]).collect();
            let mut p = 0usize;
            for _ in 1..d {
                p = self.table[p][y];
                for &s in &old {
                    member[self.table[p][s]] = true;
                }
            }
            size = member.iter().filter(|&&m| m).count();
        }
        gens.reverse();
        self.generators = gens.iter().map(|&(g, _)| g).collect();
        self.invariant_factors = gens.iter().map(|&(_, d)| d).collect();
        let mut coords = vec![Vec::new(); h];
        let mut exps = vec![0u64; gens.len()];
        loop {
            let mut elt = 0usize;
            for (j, &e) in exps.iter().enumerate() {
                elt = self.table[elt][self.pow(self.generators[j], e)];
            }
            coords[elt] = exps.clone();
            // odometer over exponent tuples
            let mut j = 0;
            while j < exps.len() {
                exps[j] += 1;
                if exps[j] < self.invariant_factors[j] {
                    break;
                }
                exps[j] = 0;
                j += 1;
            }
            if j == exps.len() {
                break;
            }
        }
        self.coordinates = coords;
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    /// Class number.
    pub fn h(&self) -> usize {
        self.forms.len()
    }

    pub fn forms(&self) -> &[QuadForm] {
        &self.forms
    }

    pub fn cayley_table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Ascending invariant factors `d_1 | d_2 | ...`; empty for the trivial group.
    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Exponents of class `i` in terms of [`generators`](Self::generators).
    pub fn coordinates(&self, i: usize) -> &[u64] {
        &self.coordinates[i]
    }

    /// Largest invariant factor (1 for the trivial group).
    pub fn exponent(&self) -> u64 {
        self.invariant_factors.last().copied().unwrap_or(1)
    }

    pub fn prime_discriminants(&self) -> &[i64] {
        &self.prime_discriminants
    }

    /// Number of prime discriminants, i.e. distinct primes dividing the discriminant.
    pub fn k(&self) -> usize {
        self.prime_discriminants.len()
    }

    pub fn splittings(&self) -> &[Splitting] {
        &self.splittings
    }

    /// `2^(k-1)`.
    pub fn genus_count(&self) -> usize {
        1 << (self.k() - 1)
    }

    /// One class per genus.
    pub fn is_solvable(&self) -> bool {
        self.h() == self.genus_count()
    }

    pub fn index_of(&self, f: &QuadForm) -> Option<usize> {
        if f.discriminant() != self.discriminant {
            return None;
        }
        self.index.get(&f.reduce()).copied()
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn pow(&self, i: usize, e: u64) -> usize {
        (0..e).fold(0, |acc, _| self.table[acc][i])
    }

    pub fn inverse(&self, i: usize) -> usize {
        let f = self.forms[i];
        self.index[&QuadForm {
            a: f.a,
            b: -f.b,
            c: f.c,
        }
        .reduce()]
    }

    pub fn order(&self, i: usize) -> u64 {
        let mut y = i;
        let mut d = 1;
        while y != 0 {
            y = self.table[y][i];
            d += 1;
        }
        d
    }

    /// Index of the subgroup of squares, which counts the genera.
    pub fn squares_index(&self) -> usize {
        let mut squares: Vec<usize> = (0..self.h()).map(|i| self.table[i][i]).collect();
        squares.sort_unstable();
        squares.dedup();
        self.h() / squares.len()
    }

    /// Exhaustive check of the abelian group axioms on the Cayley table.
    pub fn group_axioms_hold(&self) -> bool {
        let h = self.h();
        let t = &self.table;
        let identity = (0..h).all(|i| t[0][i] == i);
        let commutative = (0..h).all(|i| (0..h).all(|j| t[i][j] == t[j][i]));
        let inverses = (0..h).all(|i| (0..h).any(|j| t[i][j] == 0));
        let associative =
            (0..h).all(|i| (0..h).all(|j| (0..h).all(|k| t[t[i][j]][k] == t[i][t[j][k]])));
        let latin = (0..h).all(|i| {
            let mut row = t[i].clone();
            row.sort_unstable();
            row.iter().enumerate().all(|(j, &v)| j == v)
        });
        identity && commutative && inverses && associative && latin
    }
}

/// One form per genus: `h = 2^(k-1)` for the discriminant `-4N`.
pub fn is_solvable(n: u64) -> Result<bool> {
    Ok(ClassGroup::for_n(n)?.is_solvable())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::kronecker;
    use proptest::prelude::*;

    fn qf(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm::new(a, b, c).unwrap()
    }

    /// `h(D) = -(w / 2|D|) sum_{n=1}^{|D|} n chi_D(n)` for fundamental `D < 0`.
    fn class_number_oracle(d: i64) -> usize {
        let w = match d {
            -3 => 6,
            -4 => 4,
            _ => 2,
        };
        let s: i64 = (1..-d).map(|n| n * kronecker(d, n) as i64).sum();
        (-(w * s) / (2 * -d)) as usize
    }

    fn in_scope_up_to(limit: u64) -> impl Iterator<Item = u64> {
        (1..=limit).filter(|&n| in_scope(n))
    }

    #[test]
    fn form_validation() {
        assert!(QuadForm::new(0, 1, 1).is_err());
        assert!(QuadForm::new(1, 3, 1).is_err()); // indefinite
        assert!(QuadForm::new(2, 2, 4).is_err()); // imprimitive
        assert_eq!(qf(2, 2, 3).discriminant(), -20);
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(qf(1, 0, 5).reduce(), qf(1, 0, 5));
        assert_eq!(qf(3, 2, 2).reduce(), qf(2, 2, 3));
        assert_eq!(qf(5, 4, 1).reduce(), qf(1, 0, 1));
        assert_eq!(qf(3, -2, 5).reduce(), qf(3, -2, 5));
        assert_eq!(qf(2, -2, 3).reduce(), qf(2, 2, 3));
        assert_eq!(qf(5, 2, 5).reduce(), qf(5, 2, 5));
        assert_eq!(qf(5, -2, 5).reduce(), qf(5, 2, 5));
    }

    #[test]
    fn reduced_forms_examples() {
        assert_eq!(reduced_forms(-4).unwrap(), vec![qf(1, 0, 1)]);
        assert_eq!(reduced_forms(-20).unwrap(), vec![qf(1, 0, 5), qf(2, 2, 3)]);
        assert_eq!(
            reduced_forms(-56).unwrap(),
            vec![qf(1, 0, 14), qf(2, 0, 7), qf(3, 2, 5), qf(3, -2, 5)]
        );
        assert_eq!(reduced_forms(-5), Err(Error::NotDiscriminant(-5)));
        assert_eq!(reduced_forms(8), Err(Error::NotNegative(8)));
    }

    #[test]
    fn class_numbers_match_analytic_formula() {
        for n in in_scope_up_to(100) {
            let d = -4 * n as i64;
            assert_eq!(
                reduced_forms(d).unwrap().len(),
                class_number_oracle(d),
                "N = {n}"
            );
        }
        for d in [-3, -7, -8, -11, -15, -23, -163] {
            assert_eq!(
                ClassGroup::new(d).unwrap().h(),
                class_number_oracle(d),
                "D = {d}"
            );
        }
    }

    #[test]
    fn composition_examples() {
        let p = qf(1, 0, 5);
        let f = qf(2, 2, 3);
        assert_eq!(compose(&p, &f).unwrap(), f);
        assert_eq!(compose(&f, &f).unwrap(), p);
        let g = qf(3, 2, 5);
        assert_eq!(compose(&g, &g).unwrap(), qf(2, 0, 7));
        assert_eq!(compose(&g, &qf(3, -2, 5)).unwrap(), qf(1, 0, 14));
        assert_eq!(
            compose(&p, &qf(1, 0, 14)),
            Err(Error::DiscriminantMismatch(-20, -56))
        );
    }

    #[test]
    fn composition_represents_products() {
        // if f represents p and g represents q (distinct primes), f o g represents pq
        for n in [14u64, 21, 26, 29, 41, 65, 89] {
            let g = ClassGroup::for_n(n).unwrap();
            let d = g.discriminant();
            for (i, f1) in g.forms().iter().enumerate() {
                for (j, f2) in g.forms().iter().enumerate() {
                    let p = represented_value_coprime(f1, d.unsigned_abs()).value;
                    let q = (p + 1..)
                        .find(|&v| {
                            crate::arith::is_prime(v)
                                && !d.unsigned_abs().is_multiple_of(v)
                                && represents(f2, v)
                        })
                        .unwrap();
                    let prod = &g.forms()[g.mul(i, j)];
                    assert!(represents(prod, p * q), "N={n} {f1} {f2} p={p} q={q}");
                }
            }
        }
    }

    fn represents(f: &QuadForm, v: u64) -> bool {
        let yb = f.y_bound(v as i64);
        (-yb..=yb).any(|y| {
            f.x_range(y, v as i64)
                .is_some_and(|(lo, hi)| (lo..=hi).any(|x| f.eval(x, y) == v as i128))
        })
    }

    #[test]
    fn class_group_structure() {
        let g = ClassGroup::new(-4).unwrap();
        assert_eq!(g.h(), 1);
        assert!(g.invariant_factors().is_empty());
        assert_eq!(ClassGroup::new(-56).unwrap().invariant_factors(), &[4]);
        assert_eq!(ClassGroup::new(-84).unwrap().invariant_factors(), &[2, 2]);
        assert_eq!(ClassGroup::new(-104).unwrap().invariant_factors(), &[6]);
        assert!(matches!(
            ClassGroup::new(-16),
            Err(Error::NotFundamental(-16))
        ));
        assert!(matches!(ClassGroup::new(-3), Ok(ref g) if g.h() == 1));
    }

    #[test]
    fn exhaustive_group_checks() {
        for n in in_scope_up_to(100) {
            let g = ClassGroup::for_n(n).unwrap();
            assert!(g.group_axioms_hold(), "N = {n}");
            assert_eq!(
                g.invariant_factors().iter().product::<u64>() as usize,
                g.h()
            );
            assert!(g.invariant_factors().windows(2).all(|w| w[1] % w[0] == 0));
            assert_eq!(
                g.prime_discriminants().iter().product::<i64>(),
                g.discriminant()
            );
            assert_eq!(g.splittings().len(), g.genus_count());
            assert_eq!(g.squares_index(), g.genus_count(), "N = {n}");
            // coordinates are a bijection onto the exponent box
            let mut seen: Vec<&[u64]> = (0..g.h()).map(|i| g.coordinates(i)).collect();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), g.h());
            for i in 0..g.h() {
                assert_eq!(g.mul(i, g.inverse(i)), 0);
            }
        }
    }

    #[test]
    fn prime_discriminants() {
        assert_eq!(prime_discriminant_factorization(-4).unwrap(), vec![-4]);
        assert_eq!(prime_discriminant_factorization(-20).unwrap(), vec![-4, 5]);
        assert_eq!(prime_discriminant_factorization(-56).unwrap(), vec![8, -7]);
        assert_eq!(
            prime_discriminant_factorization(-84).unwrap(),
            vec![-4, -3, -7]
        );
        assert_eq!(prime_discriminant_factorization(-8).unwrap(), vec![-8]);
        assert_eq!(
            prime_discriminant_factorization(-120).unwrap(),
            vec![8, -3, 5]
        );
        assert_eq!(
            prime_discriminant_factorization(-12),
            Err(Error::NotFundamental(-12))
        );
        for n in in_scope_up_to(100) {
            let d = -4 * n as i64;
            for p in prime_discriminant_factorization(d).unwrap() {
                let single = factorize(p.unsigned_abs()).unwrap().distinct() == 1;
                assert!(single && is_fundamental_discriminant(p), "{p} | {d}");
            }
        }
    }

    #[test]
    fn splittings() {
        assert_eq!(genus_splittings(-4).unwrap(), vec![Splitting::new(1, -4)]);
        assert_eq!(
            genus_splittings(-20).unwrap(),
            vec![Splitting::new(1, -20), Splitting::new(-4, 5)]
        );
        let s84 = genus_splittings(-84).unwrap();
        assert_eq!(s84.len(), 4);
        for s in [(1, -84), (-4, 21), (-3, 28), (-7, 12)] {
            assert!(s84.contains(&Splitting::new(s.0, s.1)), "{s:?}");
        }
        for s in &s84 {
            assert_eq!(s.product(), -84);
            assert!(is_discriminant(s.d1) && is_discriminant(s.d2));
        }
        assert!(s84[0].is_trivial());
        assert_eq!(Splitting::new(8, -7), Splitting::new(-7, 8));
    }

    #[test]
    fn solvability() {
        assert!(is_solvable(5).unwrap());
        assert!(!is_solvable(14).unwrap());
        assert!(is_solvable(1).unwrap());
        let g = ClassGroup::for_n(5).unwrap();
        assert_eq!((g.h(), g.k()), (2, 2));
        let g = ClassGroup::for_n(14).unwrap();
        assert_eq!((g.h(), g.k()), (4, 2));
        assert!(matches!(
            is_solvable(3),
            Err(Error::OutOfScope { n: 3, .. })
        ));
        assert!(matches!(
            is_solvable(12),
            Err(Error::OutOfScope { n: 12, .. })
        ));
    }

    #[test]
    fn represented_values() {
        assert_eq!(
            represented_value_coprime(&qf(1, 0, 14), 56),
            RepresentedValue {
                value: 1,
                x: 1,
                y: 0
            }
        );
        assert_eq!(
            represented_value_coprime(&qf(2, 2, 3), 20),
            RepresentedValue {
                value: 3,
                x: 0,
                y: 1
            }
        );
        assert_eq!(
            represented_value_coprime(&qf(3, 2, 5), 56),
            RepresentedValue {
                value: 3,
                x: 1,
                y: 0
            }
        );
        // brute-force oracle over a generous box
        for n in in_scope_up_to(60) {
            let g = ClassGroup::for_n(n).unwrap();
            let m = 4 * n;
            for f in g.forms() {
                let rv = represented_value_coprime(f, m);
                let min = (-40i64..=40)
                    .flat_map(|x| (-40i64..=40).map(move |y| (x, y)))
                    .map(|(x, y)| f.eval(x, y))
                    .filter(|&v| v > 0 && (v as u64).gcd(&m) == 1)
                    .min()
                    .unwrap();
                assert_eq!(rv.value as i128, min, "{f}");
                assert_eq!(f.eval(rv.x, rv.y), min);
            }
        }
    }

    #[test]
    fn x_range_is_exact() {
        let f = qf(3, -2, 5);
        for bound in [0i64, 1, 3, 10, 57, 1000] {
            for y in -20..=20 {
                let brute: Vec<i64> = (-100..=100)
                    .filter(|&x| f.eval(x, y) <= bound as i128)
                    .collect();
                let got = f.x_range(y, bound);
                match (brute.first(), brute.last()) {
                    (Some(&lo), Some(&hi)) => assert_eq!(got, Some((lo, hi))),
                    _ => assert_eq!(got, None),
                }
            }
            assert!(f.x_range(f.y_bound(bound) + 1, bound).is_none());
        }
    }

    fn unimodular() -> impl Strategy<Value = (i64, i64, i64, i64)> {
        (-10i64..=10, -10i64..=10)
            .prop_filter("coprime", |(x, y)| x.gcd(y) == 1)
            .prop_flat_map(|(x, y)| {
                let (_, s, t) = ext_gcd(x, y);
                (-3i64..=3).prop_map(move |k| (x, -t + k * x, y, s + k * y))
            })
    }

    proptest! {
        #[test]
        fn reduce_idempotent_and_class_invariant(
            n in prop::sample::select(vec![5u64, 6, 14, 21, 26, 30, 41, 65, 89]),
            idx in 0usize..16,
            m in unimodular(),
        ) {
            let g = ClassGroup::for_n(n).unwrap();
            let f = g.forms()[idx % g.h()];
            let moved = f.transform(m.0, m.1, m.2, m.3);
            prop_assert_eq!(moved.discriminant(), f.discriminant());
            prop_assert_eq!(moved.reduce(), f);
            prop_assert_eq!(moved.reduce().reduce(), moved.reduce());
        }

        #[test]
        fn composition_respects_classes(
            n in prop::sample::select(vec![14u64, 21, 26, 29, 30, 41, 65, 89]),
            i in 0usize..16,
            j in 0usize..16,
            m1 in unimodular(),
            m2 in unimodular(),
        ) {
            let g = ClassGroup::for_n(n).unwrap();
            let (i, j) = (i % g.h(), j % g.h());
            let f1 = g.forms()[i].transform(m1.0, m1.1, m1.2, m1.3);
            let f2 = g.forms()[j].transform(m2.0, m2.1, m2.2, m2.3);
            prop_assert_eq!(compose(&f1, &f2).unwrap(), g.forms()[g.mul(i, j)]);
        }
    }
}
