//! Representation counts, partial zeta coefficients and Hecke coefficients.
//!
//! For a class `c_i` with reduced form `Q_i`, `c_i(n)` is the number of integral
//! ideals of norm `n` in that class, which equals the number of representations
//! of `n` by `Q_i` divided by the unit count `w`. With this normalization
//!
//! ```text
//! r(n) = w c_0(n),    a(n) = sum_i c_i(n),    b_chi(n) = sum_i chi(c_i) c_i(n),
//! c_0(n) = (1/h) sum_chi b_chi(n)
//! ```
//!
//! all hold exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::is_fundamental_discriminant;
use crate::characters::{genus_character_from_splitting, IdealClassCharacter};
use crate::cyclo::Cyclotomic;
use crate::dirichlet::{
    char_series, genus_square_series, zeta_k_series, CoeffSeries, CyclotomicSeries, RationalSeries,
};
use crate::quadforms::{ClassGroup, QuadForm, Splitting};
use crate::{Error, Result};

/// Number of roots of unity in the ring of integers of `Q(sqrt(D))`, `D < 0`.
pub fn unit_count(d: i64) -> Result<u32> {
    if d >= 0 {
        return Err(Error::NotNegative(d));
    }
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    Ok(match d {
        -4 => 4,
        -3 => 6,
        _ => 2,
    })
}

/// `#{(x, y) != (0, 0) : f(x, y) = n}` for `0 <= n <= limit`; entry 0 is 0.
pub fn rep_counts_form(f: &QuadForm, limit: usize) -> Vec<u32> {
    let mut counts = vec![0u32; limit + 1];
    let bound = limit as i64;
    let yb = f.y_bound(bound);
    for y in -yb..=yb {
        let Some((lo, hi)) = f.x_range(y, bound) else {
            continue;
        };
        // f(x+1, y) - f(x, y) = a(2x + 1) + b y
        let mut v = f.eval(lo, y) as i64;
        let mut step = f.a * (2 * lo + 1) + f.b * y;
        for _ in lo..=hi {
            counts[v as usize] += 1;
            v += step;
            step += 2 * f.a;
        }
    }
    counts[0] = 0;
    counts
}

/// Ideal counts per class for `x^2 + N y^2` up to `limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffTable {
    n: u64,
    discriminant: i64,
    limit: usize,
    w: u32,
    /// `rows[i][n] = c_i(n)`, entry 0 unused.
    rows: Vec<Vec<u32>>,
}

impl CoeffTable {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn w(&self) -> u32 {
        self.w
    }

    pub fn h(&self) -> usize {
        self.rows.len()
    }

    /// `c_i(n)`.
    pub fn c(&self, class: usize, n: usize) -> u32 {
        self.rows[class][n]
    }

    pub fn class_row(&self, class: usize) -> &[u32] {
        &self.rows[class]
    }

    /// `r_{2,N}(n) = w c_0(n)`.
    pub fn r(&self, n: usize) -> u64 {
        self.w as u64 * self.rows[0][n] as u64
    }

    /// Ideal count `a(n) = sum_i c_i(n)`.
    pub fn a(&self, n: usize) -> u64 {
        self.rows.iter().map(|row| row[n] as u64).sum()
    }

    pub fn r_row(&self) -> Vec<u64> {
        (0..=self.limit).map(|n| self.r(n)).collect()
    }

    pub fn a_row(&self) -> Vec<u64> {
        (0..=self.limit).map(|n| self.a(n)).collect()
    }

    fn check_character(&self, chi: &IdealClassCharacter) -> Result<()> {
        if chi.discriminant() != self.discriminant || chi.values().len() != self.h() {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }
}

/// Sieves every reduced form of the class group of `-4N` up to `limit`.
pub fn build_coeff_table(n: u64, limit: usize) -> Result<CoeffTable> {
    let group = ClassGroup::for_n(n)?;
    table_for_group(&group, n, limit)
}

/// Same as [`build_coeff_table`] for an already constructed class group.
pub fn table_for_group(group: &ClassGroup, n: u64, limit: usize) -> Result<CoeffTable> {
    if limit == 0 {
        return Err(Error::ZeroInput);
    }
    let d = group.discriminant();
    if d != -4 * n as i64 {
        return Err(Error::DiscriminantMismatch(d, -4 * n as i64));
    }
    let w = unit_count(d)?;
    let rows = group
        .forms()
        .par_iter()
        .map(|f| {
            let mut row = rep_counts_form(f, limit);
            for (m, v) in row.iter_mut().enumerate() {
                if *v % w != 0 {
                    return Err(Error::Invariant(format!(
                        "{v} representations of {m} by {f} not divisible by w = {w}"
                    )));
                }
                *v /= w;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoeffTable {
        n,
        discriminant: d,
        limit,
        w,
        rows,
    })
}

/// Exact Hecke coefficients `b_chi(n) = sum_i chi(c_i) c_i(n)` for `1 <= n <= limit`.
pub fn hecke_coeffs(chi: &IdealClassCharacter, table: &CoeffTable) -> Result<CyclotomicSeries> {
    table.check_character(chi)?;
    let m = chi.order();
    // exponent of chi(c_i) as a power of zeta_m
    let powers: Vec<usize> = chi
        .values()
        .iter()
        .map(|v| (v.numerator() * (m / v.order())) as usize)
        .collect();
    CoeffSeries::from_fn(table.limit, |n| {
        let mut bins = vec![BigRational::zero(); m as usize];
        for (i, &t) in powers.iter().enumerate() {
            let c = table.c(i, n as usize);
            if c != 0 {
                bins[t] += BigRational::from_integer(BigInt::from(c));
            }
        }
        Cyclotomic::from_powers(m as u32, bins)
    })
}

/// `b_chi(n)` as integers for a real character, entry 0 unused.
pub fn hecke_row_real(chi: &IdealClassCharacter, table: &CoeffTable) -> Result<Vec<i64>> {
    table.check_character(chi)?;
    if !chi.is_genus() {
        return Err(Error::Invariant("character is not real".into()));
    }
    let signs: Vec<i64> = chi
        .values()
        .iter()
        .map(|v| if v.order() == 1 { 1 } else { -1 })
        .collect();
    Ok((0..=table.limit)
        .map(|n| {
            signs
                .iter()
                .enumerate()
                .map(|(i, s)| s * table.c(i, n) as i64)
                .sum()
        })
        .collect())
}

/// `b_chi(n)` in floating point, entry 0 unused.
pub fn hecke_row_complex(chi: &IdealClassCharacter, table: &CoeffTable) -> Result<Vec<Complex64>> {
    table.check_character(chi)?;
    let vals: Vec<Complex64> = chi.values().iter().map(|v| v.to_complex()).collect();
    Ok((0..=table.limit)
        .map(|n| {
            vals.iter()
                .enumerate()
                .map(|(i, v)| v * table.c(i, n) as f64)
                .sum()
        })
        .collect())
}

/// `r(n) = (w / h) sum_chi b_chi(n)`, computed exactly from the full character list.
/// Entry 0 is 0.
pub fn reconstruct_reps(table: &CoeffTable, chars: &[IdealClassCharacter]) -> Result<Vec<u64>> {
    let h = table.h();
    let mut distinct: Vec<_> = chars.iter().map(|c| c.values().to_vec()).collect();
    distinct.sort();
    distinct.dedup();
    if chars.len() != h || distinct.len() != h {
        return Err(Error::IncompleteCharacters {
            expected: h,
            got: distinct.len(),
        });
    }
    let rows = chars
        .iter()
        .map(|c| hecke_coeffs(c, table))
        .collect::<Result<Vec<_>>>()?;
    let scale = Cyclotomic::from_rational(BigRational::new(
        BigInt::from(table.w),
        BigInt::from(h as u64),
    ));
    let mut out = vec![0u64; table.limit + 1];
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        let total = rows
            .iter()
            .fold(Cyclotomic::from_int(0), |acc, row| &acc + row.get(n));
        let r = (&total * &scale)
            .as_integer()
            .and_then(|v| v.to_u64())
            .ok_or_else(|| {
                Error::Invariant(format!("non-integral reconstruction at n = {n}: {total:?}"))
            })?;
        *slot = r;
    }
    Ok(out)
}

/// The exact class-character decomposition of `r`:
/// `r = w c_0`, `sum_i c_i = a` against the divisor-sum formula, and
/// `r = (w/h) sum_chi b_chi`.
pub fn decomposition_holds(table: &CoeffTable, chars: &[IdealClassCharacter]) -> Result<bool> {
    let a = zeta_k_series::<BigRational>(table.discriminant, table.limit)?;
    let sums_match =
        (1..=table.limit).all(|n| *a.get(n) == BigRational::from_integer(table.a(n).into()));
    let reconstructed = reconstruct_reps(table, chars)?;
    Ok(sums_match && reconstructed == table.r_row())
}

/// Checks `b_{chi(D1, D2)}(n) = sum_{de = n} chi_{D1}(d) chi_{D2}(e)` for every `n <= limit`.
pub fn kronecker_factorization_check(
    group: &ClassGroup,
    splitting: Splitting,
    table: &CoeffTable,
) -> Result<bool> {
    let chi = genus_character_from_splitting(group, splitting)?;
    let b = hecke_row_real(&chi, table)?;
    let m = table.limit;
    let rhs = char_series::<BigRational>(splitting.d1, m)?.dconv(&char_series(splitting.d2, m)?)?;
    let lhs = RationalSeries::from_ints(&b[1..])?;
    Ok(lhs == rhs)
}

/// Checks `b_chi(n)^2` against the coefficients of
/// `zeta(s)^2 L(s, chi_D)^2 / zeta(2s) prod_{p | D} (1 + p^{-s})^{-1}` for a genus character.
pub fn genus_square_check(chi: &IdealClassCharacter, table: &CoeffTable) -> Result<bool> {
    let b = hecke_row_real(chi, table)?;
    let squares: Vec<i64> = b[1..].iter().map(|v| v * v).collect();
    Ok(RationalSeries::from_ints(&squares)?
        == genus_square_series(table.discriminant, table.limit)?)
}

/// File name used for a cached table.
pub fn cache_file_name(n: u64, limit: usize) -> String {
    format!("qfc1_N{n}_L{limit}.csv")
}

pub fn cache_path(dir: &Path, n: u64, limit: usize) -> PathBuf {
    dir.join(cache_file_name(n, limit))
}

fn header(n: u64, limit: usize, h: usize, w: u32) -> String {
    format!("QFC1,N={n},limit={limit},h={h},w={w}")
}

impl CoeffTable {
    /// Writes the `QFC1` text format: a header line and one CSV row `n,c_0,...` per `n`.
    pub fn write_cache<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "{}", header(self.n, self.limit, self.h(), self.w))?;
        for n in 1..=self.limit {
            write!(out, "{n}")?;
            for row in &self.rows {
                write!(out, ",{}", row[n])?;
            }
            writeln!(out)?;
        }
        out.flush()
    }

    /// Reads a `QFC1` table and checks it was written for `n` and `limit`.
    pub fn read_cache<R: BufRead>(input: R, n: u64, limit: usize) -> Result<Self> {
        let group = ClassGroup::for_n(n)?;
        let d = group.discriminant();
        let w = unit_count(d)?;
        let h = group.h();
        let mut lines = input.lines();
        let first = lines
            .next()
            .ok_or_else(|| Error::Cache("empty file".into()))?
            .map_err(|e| Error::Cache(e.to_string()))?;
        let expected = header(n, limit, h, w);
        if first.trim_end() != expected {
            return Err(Error::Cache(format!(
                "header `{first}` does not match `{expected}`"
            )));
        }
        let mut rows = vec![vec![0u32; limit + 1]; h];
        let mut next = 1usize;
        for line in lines {
            let line = line.map_err(|e| Error::Cache(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim_end().split(',').collect();
            let parse = |s: &str| {
                s.parse::<u64>()
                    .map_err(|e| Error::Cache(format!("`{s}`: {e}")))
            };
            if fields.len() != h + 1 || parse(fields[0])? != next as u64 || next > limit {
                return Err(Error::Cache(format!("malformed row `{line}`")));
            }
            for (i, f) in fields[1..].iter().enumerate() {
                rows[i][next] = parse(f)? as u32;
            }
            next += 1;
        }
        if next != limit + 1 {
            return Err(Error::Cache(format!(
                "expected {limit} rows, found {}",
                next - 1
            )));
        }
        Ok(CoeffTable {
            n,
            discriminant: d,
            limit,
            w,
            rows,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file =
            File::create(path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        self.write_cache(file)
            .map_err(|e| Error::Cache(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path, n: u64, limit: usize) -> Result<Self> {
        let file =
            File::open(path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        Self::read_cache(BufReader::new(file), n, limit)
    }
}
