//! Characters of the ideal class group and genus characters.
//!
//! Character values are roots of unity kept as exact fractions `k/m` of a full
//! turn, so products add fractions and no floating point is involved.

use std::fmt;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::arith::kronecker;
use crate::cyclo::Cyclotomic;
use crate::quadforms::{represented_value_coprime, ClassGroup, Splitting};
use crate::{Error, Result};

/// `exp(2 pi i k / m)` with `0 <= k < m` and `gcd(k, m) = 1` (1 is `0/1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    k: u64,
    m: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { k: 0, m: 1 };
    pub const MINUS_ONE: RootOfUnity = RootOfUnity { k: 1, m: 2 };

    pub fn new(k: i64, m: u64) -> Self {
        assert!(m > 0);
        let k = k.rem_euclid(m as i64) as u64;
        let g = k.gcd(&m);
        RootOfUnity { k: k / g, m: m / g }
    }

    pub fn from_sign(s: i8) -> Self {
        match s {
            1 => Self::ONE,
            -1 => Self::MINUS_ONE,
            _ => panic!("not a sign: {s}"),
        }
    }

    pub fn numerator(&self) -> u64 {
        self.k
    }

    /// Multiplicative order of the root.
    pub fn order(&self) -> u64 {
        self.m
    }

    pub fn times(self, other: Self) -> Self {
        let m = self.m.lcm(&other.m);
        Self::new((self.k * (m / self.m) + other.k * (m / other.m)) as i64, m)
    }

    pub fn conj(self) -> Self {
        Self::new(-(self.k as i64), self.m)
    }

    pub fn is_real(&self) -> bool {
        self.m <= 2
    }

    pub fn to_cyclotomic(self) -> Cyclotomic {
        Cyclotomic::root_of_unity(self.k as i64, self.m as u32)
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        num_complex::Complex64::from_polar(
            1.0,
            std::f64::consts::TAU * self.k as f64 / self.m as f64,
        )
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.k, self.m) {
            (0, 1) => write!(f, "1"),
            (1, 2) => write!(f, "-1"),
            (1, 4) => write!(f, "i"),
            (3, 4) => write!(f, "-i"),
            (k, m) => write!(f, "e({k}/{m})"),
        }
    }
}

impl Serialize for RootOfUnity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", self.k, self.m))
    }
}

/// A character of the class group, given by its values on the reduced classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealClassCharacter {
    discriminant: i64,
    values: Vec<RootOfUnity>,
    order: u64,
    splitting: Option<Splitting>,
}

impl IdealClassCharacter {
    fn from_values(
        discriminant: i64,
        values: Vec<RootOfUnity>,
        splitting: Option<Splitting>,
    ) -> Self {
        let order = values.iter().fold(1u64, |acc, v| acc.lcm(&v.order()));
        IdealClassCharacter {
            discriminant,
            values,
            order,
            splitting,
        }
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    /// `chi(c_0), ..., chi(c_{h-1})` in the order of [`ClassGroup::forms`].
    pub fn values(&self) -> &[RootOfUnity] {
        &self.values
    }

    pub fn value(&self, class: usize) -> RootOfUnity {
        self.values[class]
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Genus characters are exactly the real ones (order at most 2).
    pub fn is_genus(&self) -> bool {
        classify_genus(self)
    }

    pub fn splitting(&self) -> Option<Splitting> {
        self.splitting
    }

    pub fn conj(&self) -> Self {
        Self::from_values(
            self.discriminant,
            self.values.iter().map(|v| v.conj()).collect(),
            self.splitting,
        )
    }

    pub fn belongs_to(&self, group: &ClassGroup) -> bool {
        self.discriminant == group.discriminant() && self.values.len() == group.h()
    }

    /// `chi(c_i c_j) = chi(c_i) chi(c_j)` over the whole Cayley table.
    pub fn is_homomorphism(&self, group: &ClassGroup) -> bool {
        let h = group.h();
        self.belongs_to(group)
            && self.values[0] == RootOfUnity::ONE
            && (0..h).all(|i| {
                (0..h).all(|j| self.values[group.mul(i, j)] == self.values[i].times(self.values[j]))
            })
    }
}

/// `sum_i chi(c_i) conj(psi(c_i))`, exactly.
pub fn inner_product(chi: &IdealClassCharacter, psi: &IdealClassCharacter) -> Cyclotomic {
    chi.values
        .iter()
        .zip(&psi.values)
        .map(|(a, b)| a.times(b.conj()).to_cyclotomic())
        .fold(Cyclotomic::from_int(0), |acc, v| &acc + &v)
}

/// All `h` characters, trivial first, enumerated as tuples of characters of the
/// cyclic factors.
pub fn character_group(group: &ClassGroup) -> Vec<IdealClassCharacter> {
    let factors = group.invariant_factors();
    let exponent = group.exponent();
    let mut tuple = vec![0u64; factors.len()];
    let mut out = Vec::with_capacity(group.h());
    loop {
        let values = (0..group.h())
            .map(|i| {
                let k: u64 = group
                    .coordinates(i)
                    .iter()
                    .zip(&tuple)
                    .zip(factors)
                    .map(|((&e, &t), &m)| e * t * (exponent / m))
                    .sum();
                RootOfUnity::new((k % exponent) as i64, exponent)
            })
            .collect();
        out.push(IdealClassCharacter::from_values(
            group.discriminant(),
            values,
            None,
        ));
        let mut j = factors.len();
        while j > 0 {
            j -= 1;
            tuple[j] += 1;
            if tuple[j] < factors[j] {
                break;
            }
            tuple[j] = 0;
            if j == 0 {
                return attach_splittings(group, out);
            }
        }
        if factors.is_empty() {
            return attach_splittings(group, out);
        }
    }
}

fn attach_splittings(
    group: &ClassGroup,
    mut chars: Vec<IdealClassCharacter>,
) -> Vec<IdealClassCharacter> {
    for s in group.splittings() {
        let genus = genus_values(group, s);
        if let Some(c) = chars.iter_mut().find(|c| c.values == genus) {
            c.splitting = Some(*s);
        }
    }
    chars
}

fn genus_values(group: &ClassGroup, s: &Splitting) -> Vec<RootOfUnity> {
    let m = group.discriminant().unsigned_abs();
    group
        .forms()
        .iter()
        .map(|f| {
            let v = represented_value_coprime(f, m).value;
            RootOfUnity::from_sign(kronecker(s.d1, v as i64))
        })
        .collect()
}

/// The genus character attached to `D = D1 D2`, evaluated on each class through a
/// represented value coprime to `D`.
pub fn genus_character_from_splitting(
    group: &ClassGroup,
    splitting: Splitting,
) -> Result<IdealClassCharacter> {
    let s = Splitting::new(splitting.d1, splitting.d2);
    if !group.splittings().contains(&s) {
        return Err(Error::InvalidSplitting(splitting.d1, splitting.d2));
    }
    Ok(IdealClassCharacter::from_values(
        group.discriminant(),
        genus_values(group, &s),
        Some(s),
    ))
}

/// Genus characters are the ones of order at most 2.
pub fn classify_genus(chi: &IdealClassCharacter) -> bool {
    chi.values.iter().all(RootOfUnity::is_real)
}

/// Pairs every splitting with the index of the (unique) equal character in `chars`.
pub fn match_splittings(
    group: &ClassGroup,
    chars: &[IdealClassCharacter],
) -> Result<Vec<(Splitting, usize)>> {
    let mut out = Vec::new();
    let mut used = vec![false; chars.len()];
    for &s in group.splittings() {
        let genus = genus_character_from_splitting(group, s)?;
        let hits: Vec<usize> = chars
            .iter()
            .enumerate()
            .filter(|(_, c)| c.values == genus.values)
            .map(|(i, _)| i)
            .collect();
        match hits.as_slice() {
            [i] if !used[*i] => {
                used[*i] = true;
                out.push((s, *i));
            }
            _ => {
                return Err(Error::Invariant(format!(
                    "splitting {s} matches characters {hits:?}"
                )))
            }
        }
    }
    let real = chars.iter().filter(|c| classify_genus(c)).count();
    if real != out.len() || out.len() != group.genus_count() {
        return Err(Error::Invariant(format!(
            "{real} real characters for {} splittings",
            out.len()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadforms::in_scope;
    use num_integer::Integer;

    fn group(n: u64) -> ClassGroup {
        ClassGroup::for_n(n).unwrap()
    }

    fn signs(chi: &IdealClassCharacter) -> Vec<i8> {
        chi.values()
            .iter()
            .map(|v| match *v {
                RootOfUnity::ONE => 1,
                RootOfUnity::MINUS_ONE => -1,
                _ => 0,
            })
            .collect()
    }

    #[test]
    fn roots_of_unity() {
        let i = RootOfUnity::new(1, 4);
        assert_eq!(i.times(i), RootOfUnity::MINUS_ONE);
        assert_eq!(i.times(i.conj()), RootOfUnity::ONE);
        assert_eq!(RootOfUnity::new(2, 4), RootOfUnity::MINUS_ONE);
        assert_eq!(
            RootOfUnity::new(1, 3).times(RootOfUnity::new(1, 2)),
            RootOfUnity::new(5, 6)
        );
        assert_eq!(i.to_string(), "i");
    }

    #[test]
    fn character_group_examples() {
        let chars = character_group(&group(1));
        assert_eq!(chars.len(), 1);
        assert!(chars[0].is_trivial());

        let chars = character_group(&group(5));
        let vals: Vec<Vec<i8>> = chars.iter().map(signs).collect();
        assert_eq!(vals, vec![vec![1, 1], vec![1, -1]]);

        let g = group(14);
        let chars = character_group(&g);
        assert_eq!(chars.len(), 4);
        assert_eq!(chars.iter().filter(|c| c.is_genus()).count(), 2);
        let quartic: Vec<_> = chars.iter().filter(|c| c.order() == 4).collect();
        assert_eq!(quartic.len(), 2);
        let gen = g.generators()[0];
        let mut on_gen: Vec<RootOfUnity> = chars.iter().map(|c| c.value(gen)).collect();
        on_gen.sort();
        let mut expected: Vec<RootOfUnity> = (0..4).map(|k| RootOfUnity::new(k, 4)).collect();
        expected.sort();
        assert_eq!(on_gen, expected);
        assert!(!classify_genus(quartic[0]));
    }

    #[test]
    fn genus_characters_from_splittings() {
        let g = group(5);
        let triv = genus_character_from_splitting(&g, Splitting::new(1, -20)).unwrap();
        assert!(triv.is_trivial());
        let chi = genus_character_from_splitting(&g, Splitting::new(-4, 5)).unwrap();
        assert_eq!(signs(&chi), vec![1, -1]);
        assert_eq!(kronecker(-4, 3), -1);

        let g = group(14);
        let chi = genus_character_from_splitting(&g, Splitting::new(8, -7)).unwrap();
        let idx = g
            .index_of(&crate::quadforms::QuadForm::new(3, 2, 5).unwrap())
            .unwrap();
        assert_eq!(chi.value(idx), RootOfUnity::MINUS_ONE);
        assert_eq!(chi.splitting(), Some(Splitting::new(-7, 8)));

        assert_eq!(
            genus_character_from_splitting(&g, Splitting::new(-4, 14)),
            Err(Error::InvalidSplitting(-4, 14))
        );
    }

    #[test]
    fn matching() {
        let g = group(1);
        assert_eq!(match_splittings(&g, &character_group(&g)).unwrap().len(), 1);
        let g = group(5);
        let chars = character_group(&g);
        let m = match_splittings(&g, &chars).unwrap();
        assert!(m.contains(&(Splitting::new(-4, 5), 1)));
        let g = group(21);
        let chars = character_group(&g);
        assert!(chars.iter().all(|c| c.is_genus()));
        assert_eq!(match_splittings(&g, &chars).unwrap().len(), 4);
        assert_eq!(g.genus_count(), g.h());
        assert!(chars.iter().all(|c| c.splitting().is_some()));
    }

    #[test]
    fn full_sweep_to_100() {
        for n in (1..=100).filter(|&n| in_scope(n)) {
            let g = group(n);
            let h = g.h() as i64;
            let chars = character_group(&g);
            assert_eq!(chars.len(), g.h());
            assert!(chars[0].is_trivial());
            for c in &chars {
                assert!(c.is_homomorphism(&g), "N = {n}");
                assert_eq!(g.exponent() % c.order(), 0);
                assert_eq!(c.is_genus(), c.order() <= 2);
            }
            // orthogonality
            for (a, x) in chars.iter().enumerate() {
                for (b, y) in chars.iter().enumerate() {
                    let expected = if a == b { h } else { 0 };
                    assert_eq!(inner_product(x, y), Cyclotomic::from_int(expected), "N={n}");
                }
            }
            // column inversion: (1/h) sum_chi chi(c_i) = [i = 0]
            for i in 0..g.h() {
                let s = chars
                    .iter()
                    .map(|c| c.value(i).to_cyclotomic())
                    .fold(Cyclotomic::from_int(0), |acc, v| &acc + &v);
                assert_eq!(
                    s,
                    Cyclotomic::from_int(if i == 0 { h } else { 0 }),
                    "N={n} i={i}"
                );
            }
            let genus = chars.iter().filter(|c| classify_genus(c)).count();
            assert_eq!(genus, g.genus_count(), "N = {n}");
            match_splittings(&g, &chars).unwrap();
        }
    }

    #[test]
    fn genus_values_independent_of_representative() {
        for n in [5u64, 6, 14, 21, 26, 30, 65, 70] {
            let g = group(n);
            let m = g.discriminant().unsigned_abs();
            for s in g.splittings() {
                let chi = genus_character_from_splitting(&g, *s).unwrap();
                for (i, f) in g.forms().iter().enumerate() {
                    let mut seen = 0;
                    'search: for y in 0i64..30 {
                        for x in -30i64..30 {
                            let v = f.eval(x, y);
                            if v <= 0 || (v as u64).gcd(&m) != 1 {
                                continue;
                            }
                            let expected = chi.value(i);
                            assert_eq!(RootOfUnity::from_sign(kronecker(s.d1, v as i64)), expected);
                            assert_eq!(RootOfUnity::from_sign(kronecker(s.d2, v as i64)), expected);
                            seen += 1;
                            if seen == 20 {
                                break 'search;
                            }
                        }
                    }
                    assert_eq!(seen, 20);
                }
            }
        }
    }
}
