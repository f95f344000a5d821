//! Exact arithmetic in cyclotomic fields `Q(zeta_m)`.
//!
//! An element is stored in the power basis `1, zeta, ..., zeta^(phi(m)-1)` with
//! rational coefficients, always reduced modulo the cyclotomic polynomial, so two
//! elements of the same order are equal iff their coefficient vectors are equal.
//! Elements of different orders are compared and combined in `Q(zeta_lcm)`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Integer coefficients of the `m`-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(m: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.clone();
    }
    assert!(m >= 1, "cyclotomic order must be positive");
    // x^m - 1 divided by every Phi_d with d | m, d < m
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = divide_monic(&num, &cyclotomic_polynomial(d));
        }
    }
    let p = Arc::new(num);
    cache.lock().unwrap().insert(m, p.clone());
    p
}

fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for i in (0..=qd).rev() {
        let t = rem[i + dd];
        quot[i] = t;
        for (j, &c) in den.iter().enumerate() {
            rem[i + j] -= t * c;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Euler's totient.
pub fn totient(m: u32) -> u32 {
    (1..=m).filter(|k| k.gcd(&m) == 1).count() as u32
}

#[derive(Clone)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn from_rational(q: BigRational) -> Self {
        Cyclotomic {
            order: 1,
            coeffs: vec![q],
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(v.into()))
    }

    /// `zeta_m^k`.
    pub fn root_of_unity(k: i64, m: u32) -> Self {
        let k = k.rem_euclid(m as i64) as usize;
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = BigRational::one();
        Self::reduced(m, coeffs)
    }

    /// Builds `sum c_t zeta_m^t` from an unreduced coefficient list.
    pub fn from_powers(m: u32, coeffs: Vec<BigRational>) -> Self {
        Self::reduced(m, coeffs)
    }

    fn reduced(order: u32, mut coeffs: Vec<BigRational>) -> Self {
        let phi = cyclotomic_polynomial(order);
        let deg = phi.len() - 1;
        // fold x^m = 1 first so the division below stays short
        let m = order as usize;
        if coeffs.len() > m {
            for i in m..coeffs.len() {
                let c = std::mem::take(&mut coeffs[i]);
                coeffs[i % m] += c;
            }
            coeffs.truncate(m);
        }
        for i in (deg..coeffs.len()).rev() {
            let t = std::mem::take(&mut coeffs[i]);
            if t.is_zero() {
                continue;
            }
            for (j, &c) in phi.iter().enumerate().take(deg) {
                if c != 0 {
                    coeffs[i - deg + j] -= &t * &BigRational::from_integer(BigInt::from(c));
                }
            }
        }
        coeffs.resize(deg, BigRational::zero());
        Cyclotomic { order, coeffs }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Re-expresses the element in `Q(zeta_to)`; `to` must be a multiple of the order.
    pub fn lift(&self, to: u32) -> Self {
        assert!(
            to.is_multiple_of(self.order),
            "cannot lift order {} to {}",
            self.order,
            to
        );
        if to == self.order {
            return self.clone();
        }
        let step = (to / self.order) as usize;
        let mut coeffs = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (t, c) in self.coeffs.iter().enumerate() {
            coeffs[t * step] = c.clone();
        }
        Self::reduced(to, coeffs)
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        if self.order == other.order {
            return (self.clone(), other.clone());
        }
        let l = self.order.lcm(&other.order);
        (self.lift(l), other.lift(l))
    }

    /// Image under the automorphism `zeta -> zeta^j`, `gcd(j, m) = 1`.
    pub fn galois(&self, j: u32) -> Self {
        let m = self.order as usize;
        let j = j as usize % m;
        let mut coeffs = vec![BigRational::zero(); m];
        for (t, c) in self.coeffs.iter().enumerate() {
            coeffs[(t * j) % m] += c;
        }
        Self::reduced(self.order, coeffs)
    }

    pub fn conj(&self) -> Self {
        self.galois(self.order - 1)
    }

    /// Field norm down to `Q`.
    pub fn norm(&self) -> BigRational {
        let mut acc = self.clone();
        for j in 2..self.order {
            if j.gcd(&self.order) == 1 {
                acc = &acc * &self.galois(j);
            }
        }
        acc.as_rational()
            .expect("norm of a cyclotomic number is rational")
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut others = Self::from_int(1).lift(self.order);
        for j in 2..self.order {
            if j.gcd(&self.order) == 1 {
                others = &others * &self.galois(j);
            }
        }
        let n = (self * &others).as_rational()?;
        let scale = Self::from_rational(n.recip());
        Some(&others * &scale)
    }

    /// `Some(q)` when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|q| q.is_integer())
            .map(|q| q.to_integer())
    }

    pub fn to_complex(&self) -> Complex64 {
        let m = self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(t, c)| {
                let angle = std::f64::consts::TAU * t as f64 / m;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), angle)
            })
            .sum()
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (t, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match t {
                0 => write!(f, "{c}")?,
                _ => write!(f, "({c})z{}^{t}", self.order)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclotomic {}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (mut a, b) = self.common(rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x += y;
        }
        a
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (mut a, b) = self.common(rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x -= y;
        }
        a
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (a, b) = self.common(rhs);
        if a.order == 1 {
            return Cyclotomic::from_rational(&a.coeffs[0] * &b.coeffs[0]);
        }
        let mut prod = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        Cyclotomic::reduced(a.order, prod)
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: Cyclotomic) -> Cyclotomic {
                (&self).$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Self::from_int(0)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Self::from_int(1)
    }
}

/// True when every coefficient is an integer, i.e. the element is in `Z[zeta_m]`.
pub fn is_algebraic_integer(x: &Cyclotomic) -> bool {
    x.coeffs.iter().all(|c| c.is_integer())
}
