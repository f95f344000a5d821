//! Exact Dirichlet-series coefficient calculus.
//!
//! A [`CoeffSeries`] holds `f(1), ..., f(M)` for a truncation bound `M`. Products
//! of Dirichlet series become Dirichlet convolutions of coefficient arrays, and
//! every identity between series is checked coefficientwise with exact entries.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{factorize, is_discriminant, is_fundamental_discriminant, kronecker};
use crate::cyclo::Cyclotomic;
use crate::{Error, Result};

/// Which ring the entries of a series actually live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryDomain {
    Integer,
    Rational,
    Complex,
}

/// Exact scalar usable as a series coefficient.
pub trait Exact:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_i64(v: i64) -> Self;
    fn try_inv(&self) -> Option<Self>;
    fn domain(&self) -> EntryDomain;
}

impl Exact for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn try_inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn domain(&self) -> EntryDomain {
        if self.is_integer() {
            EntryDomain::Integer
        } else {
            EntryDomain::Rational
        }
    }
}

impl Exact for Cyclotomic {
    fn from_i64(v: i64) -> Self {
        Cyclotomic::from_int(v)
    }

    fn try_inv(&self) -> Option<Self> {
        self.inv()
    }

    fn domain(&self) -> EntryDomain {
        match self.as_rational() {
            Some(q) => q.domain(),
            None => EntryDomain::Complex,
        }
    }
}

/// Truncated Dirichlet series `sum_{n <= M} f(n) n^{-s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeries<T> {
    values: Vec<T>,
}

pub type RationalSeries = CoeffSeries<BigRational>;
pub type CyclotomicSeries = CoeffSeries<Cyclotomic>;

impl<T: Exact> CoeffSeries<T> {
    /// Series from `f(1), ..., f(M)`.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        Ok(CoeffSeries { values })
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(u64) -> T) -> Result<Self> {
        Self::new((1..=m as u64).map(&mut f).collect())
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| T::from_i64(v)).collect())
    }

    /// The series of `zeta(s)`: every coefficient 1.
    pub fn ones(m: usize) -> Result<Self> {
        Self::from_fn(m, |_| T::one())
    }

    /// The unit for convolution: 1 at `n = 1`, 0 elsewhere.
    pub fn delta(m: usize) -> Result<Self> {
        Self::from_fn(m, |n| if n == 1 { T::one() } else { T::zero() })
    }

    /// Truncation bound `M`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coefficient `f(n)` for `1 <= n <= M`.
    pub fn get(&self, n: usize) -> &T {
        &self.values[n - 1]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn domain(&self) -> EntryDomain {
        self.values
            .iter()
            .map(Exact::domain)
            .max()
            .unwrap_or(EntryDomain::Integer)
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        Ok(())
    }

    /// Dirichlet convolution `(f * g)(n) = sum_{de = n} f(d) g(e)`.
    pub fn dconv(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let m = self.len();
        let mut out = vec![T::zero(); m];
        for d in 1..=m {
            let fd = &self.values[d - 1];
            if fd.is_zero() {
                continue;
            }
            for e in 1..=m / d {
                let ge = &other.values[e - 1];
                if !ge.is_zero() {
                    let slot = &mut out[d * e - 1];
                    *slot = slot.clone() + fd.clone() * ge.clone();
                }
            }
        }
        Ok(CoeffSeries { values: out })
    }

    /// Inverse under Dirichlet convolution. Requires an invertible `f(1)`.
    pub fn dinv(&self) -> Result<Self> {
        let m = self.len();
        let inv1 = self.values[0].try_inv().ok_or(Error::NotInvertible)?;
        let mut acc = vec![T::zero(); m];
        let mut out = vec![T::zero(); m];
        for k in 1..=m {
            let gk = if k == 1 {
                inv1.clone()
            } else {
                -(acc[k - 1].clone() * inv1.clone())
            };
            if !gk.is_zero() {
                for d in 2..=m / k {
                    let fd = &self.values[d - 1];
                    if !fd.is_zero() {
                        let slot = &mut acc[d * k - 1];
                        *slot = slot.clone() + fd.clone() * gk.clone();
                    }
                }
            }
            out[k - 1] = gk;
        }
        Ok(CoeffSeries { values: out })
    }

    /// Coefficients of `F(2s)`: `g(k^2) = f(k)`, zero off the squares.
    pub fn dilate2(&self) -> Self {
        let m = self.len();
        let mut out = vec![T::zero(); m];
        let mut k = 1usize;
        while k * k <= m {
            out[k * k - 1] = self.values[k - 1].clone();
            k += 1;
        }
        CoeffSeries { values: out }
    }

    /// Coefficientwise product, the Rankin-Selberg style `sum f(n) g(n) n^{-s}`.
    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(CoeffSeries {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() * b.clone())
                .collect(),
        })
    }

    pub fn square_entries(&self) -> Self {
        CoeffSeries {
            values: self.values.iter().map(|a| a.clone() * a.clone()).collect(),
        }
    }

    /// First `n` with `f(n) != g(n)`, if any.
    pub fn first_mismatch(&self, other: &Self) -> Option<usize> {
        if self.len() != other.len() {
            return Some(self.len().min(other.len()) + 1);
        }
        self.values
            .iter()
            .zip(&other.values)
            .position(|(a, b)| a != b)
            .map(|i| i + 1)
    }
}

/// Coefficients `chi_d(n)` of the Dirichlet L-series of the Kronecker character.
pub fn char_series<T: Exact>(d: i64, m: usize) -> Result<CoeffSeries<T>> {
    if !is_discriminant(d) {
        return Err(Error::NotDiscriminant(d));
    }
    CoeffSeries::from_fn(m, |n| T::from_i64(kronecker(d, n as i64) as i64))
}

/// Local factor selected by [`euler_block`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EulerFactor {
    /// `prod_{p | d} (1 + p^{-s})^{-1}`: value `(-1)^k` at `p^k`.
    InverseOnePlus,
    /// `prod_{p | d} (1 - p^{-s})`: value -1 at `p`, 0 at higher powers.
    OneMinus,
}

impl TryFrom<i8> for EulerFactor {
    type Error = Error;

    /// -1 selects the inverse factor, +1 the plain one.
    fn try_from(sign: i8) -> Result<Self> {
        match sign {
            -1 => Ok(EulerFactor::InverseOnePlus),
            1 => Ok(EulerFactor::OneMinus),
            _ => Err(Error::Invariant(format!(
                "euler sign must be +1 or -1, got {sign}"
            ))),
        }
    }
}

/// Finite Euler product over the primes dividing `d`, as a multiplicative series.
pub fn euler_block<T: Exact>(d: u64, factor: EulerFactor, m: usize) -> Result<CoeffSeries<T>> {
    let primes: Vec<u64> = factorize(d)?.primes().collect();
    CoeffSeries::from_fn(m, |n| {
        let mut rest = n;
        let mut value = 1i64;
        for &p in &primes {
            let mut k = 0;
            while rest % p == 0 {
                rest /= p;
                k += 1;
            }
            value *= match (factor, k) {
                (_, 0) => 1,
                (EulerFactor::InverseOnePlus, k) if k % 2 == 1 => -1,
                (EulerFactor::InverseOnePlus, _) => 1,
                (EulerFactor::OneMinus, 1) => -1,
                (EulerFactor::OneMinus, _) => 0,
            };
        }
        if rest == 1 {
            T::from_i64(value)
        } else {
            T::zero()
        }
    })
}

/// Ideal counts of the quadratic field of discriminant `d_k`: `sum_{e | n} chi_{d_k}(e)`.
pub fn zeta_k_series<T: Exact>(d_k: i64, m: usize) -> Result<CoeffSeries<T>> {
    if !is_fundamental_discriminant(d_k) {
        return Err(Error::NotFundamental(d_k));
    }
    CoeffSeries::<T>::ones(m)?.dconv(&char_series(d_k, m)?)
}

/// Coefficients of `1 / zeta(2s)`.
fn inverse_zeta_2s<T: Exact>(m: usize) -> Result<CoeffSeries<T>> {
    CoeffSeries::<T>::ones(m)?.dilate2().dinv()
}

/// Coefficients of `zeta_K(s)^2 / zeta(2s) * prod_{p | d_K} (1 + p^{-s})^{-1}`.
pub fn squared_ideal_count_series(d_k: i64, m: usize) -> Result<RationalSeries> {
    let zk = zeta_k_series::<BigRational>(d_k, m)?;
    zk.dconv(&zk)?
        .dconv(&inverse_zeta_2s(m)?)?
        .dconv(&euler_block(
            d_k.unsigned_abs(),
            EulerFactor::InverseOnePlus,
            m,
        )?)
}

/// Coefficients of `zeta(s)^2 L(s, chi_D)^2 / zeta(2s) * prod_{p | D} (1 + p^{-s})^{-1}`,
/// assembled from the Dirichlet factors rather than from `zeta_K`.
pub fn genus_square_series(d: i64, m: usize) -> Result<RationalSeries> {
    let ones = RationalSeries::ones(m)?;
    let chi = char_series::<BigRational>(d, m)?;
    ones.dconv(&ones)?
        .dconv(&chi)?
        .dconv(&chi)?
        .dconv(&inverse_zeta_2s(m)?)?
        .dconv(&euler_block(
            d.unsigned_abs(),
            EulerFactor::InverseOnePlus,
            m,
        )?)
}

/// Checks `r_K(n)^2` against [`squared_ideal_count_series`] for all `n <= m`.
pub fn squared_ideal_count_identity(d_k: i64, m: usize) -> Result<bool> {
    let lhs = zeta_k_series::<BigRational>(d_k, m)?.square_entries();
    Ok(lhs == squared_ideal_count_series(d_k, m)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    fn ints(s: &RationalSeries) -> Vec<i64> {
        s.values()
            .iter()
            .map(|v| {
                assert!(v.is_integer());
                i64::try_from(v.to_integer()).unwrap()
            })
            .collect()
    }

    /// Textbook recursion: mu(1) = 1, sum_{d | n} mu(d) = 0 for n > 1.
    fn mobius_oracle(m: usize) -> Vec<i64> {
        let mut mu = vec![0i64; m + 1];
        mu[1] = 1;
        for n in 2..=m {
            mu[n] = -(1..n).filter(|d| n % d == 0).map(|d| mu[d]).sum::<i64>();
        }
        mu[1..].to_vec()
    }

    #[test]
    fn convolution_examples() {
        let ones = RationalSeries::ones(30).unwrap();
        let tau = ones.dconv(&ones).unwrap();
        assert_eq!(*tau.get(6), int(4));
        let f =
            RationalSeries::from_ints(&(1..=30).map(|n| n * n - 3).collect::<Vec<_>>()).unwrap();
        assert_eq!(RationalSeries::delta(30).unwrap().dconv(&f).unwrap(), f);
        let chi = char_series::<BigRational>(-4, 30).unwrap();
        assert_eq!(*chi.dconv(&ones).unwrap().get(25), int(3));
        assert!(matches!(
            ones.dconv(&RationalSeries::ones(29).unwrap()),
            Err(Error::LengthMismatch(30, 29))
        ));
    }

    #[test]
    fn inverse_examples() {
        let delta = RationalSeries::delta(50).unwrap();
        assert_eq!(delta.dinv().unwrap(), delta);
        let mu = RationalSeries::ones(200).unwrap().dinv().unwrap();
        assert_eq!(ints(&mu), mobius_oracle(200));
        assert_eq!(*mu.get(6), int(1));
        assert_eq!(*mu.get(4), int(0));
        let f = RationalSeries::from_ints(&[3, 1, 4, 1, 5]).unwrap();
        assert_eq!(
            *f.dinv().unwrap().get(1),
            BigRational::new(1.into(), 3.into())
        );
        let z = RationalSeries::from_ints(&[0, 1, 1]).unwrap();
        assert_eq!(z.dinv(), Err(Error::NotInvertible));
        assert_eq!(RationalSeries::new(vec![]), Err(Error::EmptySeries));
    }

    #[test]
    fn dilation() {
        let ones = RationalSeries::ones(20).unwrap();
        let d = ones.dilate2();
        assert_eq!(*d.get(4), int(1));
        assert_eq!(*d.get(6), int(0));
        let f = RationalSeries::from_ints(&(1..=20).collect::<Vec<_>>()).unwrap();
        assert_eq!(*f.dilate2().get(9), int(3));
        assert!(ints(&f.dilate2())
            .iter()
            .enumerate()
            .all(|(i, &v)| v == 0 || ((i + 1) as f64).sqrt().fract() == 0.0));
    }

    #[test]
    fn character_series() {
        let chi = char_series::<BigRational>(-4, 8).unwrap();
        assert_eq!(ints(&chi), vec![1, 0, -1, 0, 1, 0, -1, 0]);
        assert_eq!(
            ints(&char_series::<BigRational>(1, 10).unwrap()),
            vec![1; 10]
        );
        assert_eq!(*char_series::<BigRational>(-20, 5).unwrap().get(3), int(1));
        assert_eq!(
            char_series::<BigRational>(-5, 5),
            Err(Error::NotDiscriminant(-5))
        );
        assert_eq!(
            char_series::<BigRational>(-84, 1).unwrap().domain(),
            EntryDomain::Integer
        );
    }

    #[test]
    fn euler_blocks() {
        let e = euler_block::<BigRational>(20, EulerFactor::InverseOnePlus, 40).unwrap();
        assert_eq!(*e.get(2), int(-1));
        assert_eq!(*e.get(4), int(1));
        assert_eq!(*e.get(10), int(1));
        assert_eq!(*e.get(3), int(0));
        assert_eq!(*e.get(40), int(1)); // 2^3 * 5: (-1)^3 (-1)^1
        assert_eq!(
            euler_block::<BigRational>(1, EulerFactor::InverseOnePlus, 40).unwrap(),
            RationalSeries::delta(40).unwrap()
        );
        // (1 + 2^{-s})^{-1} (1 + 2^{-s}) = 1
        let plus = RationalSeries::from_fn(40, |n| match n {
            1 | 2 => int(1),
            _ => int(0),
        })
        .unwrap();
        let e2 = euler_block::<BigRational>(2, EulerFactor::InverseOnePlus, 40).unwrap();
        assert_eq!(e2.dconv(&plus).unwrap(), RationalSeries::delta(40).unwrap());
        // prod (1 - p^{-s}) times zeta restricted... inverse of the p-part of zeta
        let minus = euler_block::<BigRational>(6, EulerFactor::OneMinus, 40).unwrap();
        assert_eq!(*minus.get(6), int(1));
        assert_eq!(*minus.get(12), int(0));
        assert_eq!(EulerFactor::try_from(-1), Ok(EulerFactor::InverseOnePlus));
        assert!(EulerFactor::try_from(0).is_err());
    }

    #[test]
    fn ideal_counts() {
        let a = zeta_k_series::<BigRational>(-20, 30).unwrap();
        let oracle = |n: i64| -> i64 {
            (1..=n)
                .filter(|e| n % e == 0)
                .map(|e| kronecker(-20, e) as i64)
                .sum()
        };
        for n in 1..=30 {
            assert_eq!(*a.get(n), int(oracle(n as i64)), "n = {n}");
        }
        assert_eq!(*a.get(3), int(2));
        assert_eq!(*a.get(21), int(4));
        assert_eq!(*a.get(1), int(1));
        assert_eq!(
            zeta_k_series::<BigRational>(-16, 5),
            Err(Error::NotFundamental(-16))
        );
    }

    #[test]
    fn squared_counts_small() {
        for d in [-4, -8, -20, -84, 5, 12] {
            assert!(squared_ideal_count_identity(d, 2000).unwrap(), "d = {d}");
            assert_eq!(
                squared_ideal_count_series(d, 2000).unwrap(),
                genus_square_series(d, 2000).unwrap()
            );
        }
    }

    #[test]
    fn cyclotomic_entries() {
        let i = Cyclotomic::root_of_unity(1, 4);
        let f = CyclotomicSeries::from_fn(12, |n| {
            if n % 2 == 1 {
                i.clone()
            } else {
                Cyclotomic::one()
            }
        })
        .unwrap();
        assert_eq!(f.domain(), EntryDomain::Complex);
        let g = f.dinv().unwrap();
        assert_eq!(f.dconv(&g).unwrap(), CyclotomicSeries::delta(12).unwrap());
    }

    fn series_strategy(m: usize) -> impl Strategy<Value = RationalSeries> {
        proptest::collection::vec((-20i64..=20, 1i64..=4), m).prop_map(|v| {
            RationalSeries::new(
                v.into_iter()
                    .map(|(n, d)| BigRational::new(n.into(), d.into()))
                    .collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn convolution_ring_laws(f in series_strategy(512), g in series_strategy(512), h in series_strategy(512)) {
            let fg = f.dconv(&g).unwrap();
            prop_assert_eq!(&fg, &g.dconv(&f).unwrap());
            prop_assert_eq!(fg.dconv(&h).unwrap(), f.dconv(&g.dconv(&h).unwrap()).unwrap());
            prop_assert_eq!(RationalSeries::delta(512).unwrap().dconv(&f).unwrap(), f);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn inverse_is_two_sided(lead in prop::bool::ANY, rest in proptest::collection::vec(-9i64..=9, 299)) {
            let mut v = vec![if lead { 1 } else { -1 }];
            v.extend(rest);
            let f = RationalSeries::from_ints(&v).unwrap();
            let g = f.dinv().unwrap();
            prop_assert_eq!(g.domain(), EntryDomain::Integer);
            prop_assert_eq!(f.dconv(&g).unwrap(), RationalSeries::delta(300).unwrap());
        }
    }
}
