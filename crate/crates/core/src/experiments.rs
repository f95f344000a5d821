//! Partial-sum scans on a geometric grid and two-term `x log x + x` fits.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{a1, second_moment_constant};
use crate::characters::IdealClassCharacter;
use crate::coeffs::{hecke_row_complex, CoeffTable};
use crate::quadforms::Splitting;
use crate::{Error, Result};

/// `x_j = floor(10^(3 + j/density))` for `j >= 0`, up to `limit`.
pub fn geometric_grid(limit: u64, density: u32) -> Result<Vec<u64>> {
    if density == 0 {
        return Err(Error::DegenerateGrid("grid density must be positive"));
    }
    let mut grid: Vec<u64> = Vec::new();
    for j in 0u32.. {
        let x = if j % density == 0 {
            10u64.pow(3 + j / density)
        } else {
            10f64.powf(3.0 + j as f64 / density as f64).floor() as u64
        };
        if x > limit {
            break;
        }
        if grid.last() != Some(&x) {
            grid.push(x);
        }
    }
    Ok(grid)
}

/// Partial sums `S(x) = sum_{1 <= n <= x} s(n)` at the grid points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanGrid {
    pub points: Vec<u64>,
    pub sums: Vec<f64>,
}

fn check_len(grid: &[u64], len: usize) -> Result<()> {
    match grid.last() {
        Some(&p) if p as usize >= len => Err(Error::GridExceedsSeries { point: p, len }),
        _ => {
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::DegenerateGrid("grid is not strictly increasing"));
            }
            Ok(())
        }
    }
}

/// Exact prefix sums of an integer series indexed from 0 (entry 0 is ignored).
pub fn prefix_sums_int(series: &[i64], grid: &[u64]) -> Result<Vec<i128>> {
    check_len(grid, series.len())?;
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0i128;
    let mut n = 1usize;
    for &x in grid {
        while n <= x as usize {
            acc += series[n] as i128;
            n += 1;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Prefix sums of a complex series indexed from 0 (entry 0 is ignored).
pub fn prefix_sums_complex(series: &[Complex64], grid: &[u64]) -> Result<Vec<Complex64>> {
    check_len(grid, series.len())?;
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut n = 1usize;
    for &x in grid {
        while n <= x as usize {
            acc += series[n];
            n += 1;
        }
        out.push(acc);
    }
    Ok(out)
}

pub fn scan_int(series: &[i64], grid: &[u64]) -> Result<ScanGrid> {
    Ok(ScanGrid {
        points: grid.to_vec(),
        sums: prefix_sums_int(series, grid)?
            .into_iter()
            .map(|s| s as f64)
            .collect(),
    })
}

pub fn scan_real(series: &[f64], grid: &[u64]) -> Result<ScanGrid> {
    check_len(grid, series.len())?;
    let mut sums = Vec::with_capacity(grid.len());
    let mut acc = 0.0f64;
    let mut n = 1usize;
    for &x in grid {
        while n <= x as usize {
            acc += series[n];
            n += 1;
        }
        sums.push(acc);
    }
    Ok(ScanGrid {
        points: grid.to_vec(),
        sums,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Growth {
    Xlogx,
    Linear,
    Inconclusive,
}

impl std::fmt::Display for Growth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Growth::Xlogx => "xlogx",
            Growth::Linear => "linear",
            Growth::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    /// Root mean square of the residuals of `S(x)/x`.
    pub residual: f64,
    pub points_used: usize,
    pub growth: Growth,
}

/// Index of the first point of the top half, keeping at least `min` points.
fn top_half(len: usize, min: usize) -> usize {
    len.saturating_sub((len.div_ceil(2)).max(min))
}

/// Least-squares line `v = slope u + intercept`.
fn line_fit(u: &[f64], v: &[f64]) -> (f64, f64, f64) {
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let mv = v.iter().sum::<f64>() / n;
    let suu: f64 = u.iter().map(|x| (x - mu) * (x - mu)).sum();
    let suv: f64 = u.iter().zip(v).map(|(x, y)| (x - mu) * (y - mv)).sum();
    let slope = suv / suu;
    let intercept = mv - slope * mu;
    let rss: f64 = u
        .iter()
        .zip(v)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

/// `S(x) ~ A x log x + B x`, fitted as `S(x)/x = A log x + B` over the top half of the grid.
pub fn fit_xlogx(sg: &ScanGrid) -> Result<FitResult> {
    let m = sg.points.len();
    if m < 4 {
        return Err(Error::DegenerateGrid("a fit needs at least 4 grid points"));
    }
    let start = top_half(m, 4);
    let u: Vec<f64> = sg.points[start..]
        .iter()
        .map(|&x| (x as f64).ln())
        .collect();
    let v: Vec<f64> = sg.points[start..]
        .iter()
        .zip(&sg.sums[start..])
        .map(|(&x, s)| s / x as f64)
        .collect();
    let (a, b, residual) = line_fit(&u, &v);
    Ok(FitResult {
        a,
        b,
        residual,
        points_used: m - start,
        growth: growth_classify(sg),
    })
}

/// Largest grid index whose point is at most `x`.
fn index_at_most(points: &[u64], x: u64) -> Option<usize> {
    points.iter().rposition(|&p| p <= x)
}

/// Decides between `x log x` growth and linear growth of a partial-sum scan.
///
/// The slope of `S(x)/x` against `log x` over the top half is compared with
/// `0.1 S(x_m)/(x_m log x_m)`; a flat slope counts as linear only if `S(x)/x`
/// moves by less than 50% across every decade ending in the top half.
pub fn growth_classify(sg: &ScanGrid) -> Growth {
    let m = sg.points.len();
    if m < 6 || (sg.points[m - 1] as f64) < 100.0 * sg.points[0] as f64 {
        return Growth::Inconclusive;
    }
    let start = top_half(m, 4);
    let ratio: Vec<f64> = sg
        .points
        .iter()
        .zip(&sg.sums)
        .map(|(&x, s)| s / x as f64)
        .collect();
    let u: Vec<f64> = sg.points[start..]
        .iter()
        .map(|&x| (x as f64).ln())
        .collect();
    let (slope, _, _) = line_fit(&u, &ratio[start..]);
    let xm = sg.points[m - 1] as f64;
    let scale = sg.sums[m - 1] / (xm * xm.ln());
    if slope > 0.1 * scale.abs() && scale > 0.0 {
        return Growth::Xlogx;
    }
    let drift_ok = (start..m).all(|j| match index_at_most(&sg.points, sg.points[j] / 10) {
        Some(i) => {
            let base = ratio[i].abs().max(ratio[j].abs());
            base > 0.0 && (ratio[j] - ratio[i]).abs() <= 0.5 * base
        }
        None => true,
    });
    if drift_ok {
        Growth::Linear
    } else {
        Growth::Inconclusive
    }
}

/// Hecke rows of every character, in floating point.
fn complex_rows(table: &CoeffTable, chars: &[IdealClassCharacter]) -> Result<Vec<Vec<Complex64>>> {
    chars
        .par_iter()
        .map(|c| hecke_row_complex(c, table))
        .collect()
}

/// Partial sums of one product series `b_i(n) b_j(n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossTermRow {
    pub i: usize,
    pub j: usize,
    /// `max_x |S(x)|/x` over the grid.
    pub max_ratio: f64,
    /// `max |S(x)|/x` within each of the top three decades, oldest first.
    pub decade_max: Vec<f64>,
    /// `|S(x_m)| / (x_m log x_m)`.
    pub final_xlogx_ratio: f64,
    /// The per-decade maximum of `|S(x)|/x` grows by at most 50% from one decade to the next.
    pub bounded: bool,
    /// The per-decade maximum of `|S(x)|/(x log x)` strictly decreases over the top three decades.
    pub decreasing: bool,
}

/// Grid indices of the three decades ending at `x_m`, oldest first.
///
/// Window `e` holds the points in `(x_m / 10^(e+1), x_m / 10^e]`; the oldest
/// window also keeps its left end point.
fn decade_windows(points: &[u64]) -> Option<Vec<Vec<usize>>> {
    let xm = *points.last()?;
    if points[0] > xm / 1000 {
        return None;
    }
    let windows: Vec<Vec<usize>> = (0..3u32)
        .rev()
        .map(|e| {
            let (lo, hi) = (xm / 10u64.pow(e + 1), xm / 10u64.pow(e));
            (0..points.len())
                .filter(|&k| points[k] <= hi && (points[k] > lo || (e == 2 && points[k] == lo)))
                .collect()
        })
        .collect();
    windows.iter().all(|w| !w.is_empty()).then_some(windows)
}

fn window_max(values: &[f64], window: &[usize]) -> f64 {
    window.iter().map(|&k| values[k]).fold(0.0, f64::max)
}

fn cross_row(i: usize, j: usize, points: &[u64], sums: &[Complex64]) -> CrossTermRow {
    let abs_ratio: Vec<f64> = points
        .iter()
        .zip(sums)
        .map(|(&x, s)| s.norm() / x as f64)
        .collect();
    let xlogx: Vec<f64> = points
        .iter()
        .zip(sums)
        .map(|(&x, s)| s.norm() / (x as f64 * (x as f64).ln()))
        .collect();
    let (decade_max, bounded, decreasing) = match decade_windows(points) {
        Some(ws) => {
            let linear: Vec<f64> = ws.iter().map(|w| window_max(&abs_ratio, w)).collect();
            let log: Vec<f64> = ws.iter().map(|w| window_max(&xlogx, w)).collect();
            (
                linear.clone(),
                linear.windows(2).all(|m| m[1] <= 1.5 * m[0]),
                log.windows(2).all(|m| m[1] < m[0]),
            )
        }
        None => (Vec::new(), false, false),
    };
    CrossTermRow {
        i,
        j,
        max_ratio: abs_ratio.iter().copied().fold(0.0, f64::max),
        decade_max,
        final_xlogx_ratio: *xlogx.last().unwrap_or(&f64::NAN),
        bounded,
        decreasing,
    }
}

/// Cross sums `sum_{n <= x} b_i(n) b_j(n)` for every pair `i < j` of characters.
///
/// With the trivial character first, the pairs `(0, j)` are the sums
/// `sum a_n b_j(n)`. A conjugate pair gives `sum |b(n)|^2`.
pub fn cross_term_suite(
    table: &CoeffTable,
    chars: &[IdealClassCharacter],
    grid: &[u64],
) -> Result<Vec<CrossTermRow>> {
    let rows = complex_rows(table, chars)?;
    let pairs: Vec<(usize, usize)> = (0..chars.len())
        .flat_map(|i| (i + 1..chars.len()).map(move |j| (i, j)))
        .collect();
    pairs
        .par_iter()
        .map(|&(i, j)| {
            let product: Vec<Complex64> =
                rows[i].iter().zip(&rows[j]).map(|(x, y)| x * y).collect();
            Ok(cross_row(i, j, grid, &prefix_sums_complex(&product, grid)?))
        })
        .collect()
}

/// Fit of `sum |b_chi(n)|^2` for one character.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalRow {
    pub index: usize,
    pub order: u64,
    pub is_genus: bool,
    pub splitting: Option<Splitting>,
    pub fit: Option<FitResult>,
    pub growth: Growth,
    /// `A_1(N)` for genus characters.
    pub target: Option<f64>,
    pub relative_deviation: Option<f64>,
}

/// `sum |b_chi(n)|^2` scanned, fitted and classified for every character.
pub fn diagonal_suite(
    table: &CoeffTable,
    chars: &[IdealClassCharacter],
    grid: &[u64],
) -> Result<Vec<DiagonalRow>> {
    let rows = complex_rows(table, chars)?;
    let target = a1(table.n())?;
    chars
        .par_iter()
        .enumerate()
        .map(|(index, chi)| {
            let sq: Vec<f64> = rows[index].iter().map(|b| b.norm_sqr()).collect();
            let sg = scan_real(&sq, grid)?;
            let fit = fit_xlogx(&sg).ok();
            let target = chi.is_genus().then_some(target);
            Ok(DiagonalRow {
                index,
                order: chi.order(),
                is_genus: chi.is_genus(),
                splitting: chi.splitting(),
                growth: growth_classify(&sg),
                relative_deviation: fit.zip(target).map(|(f, t)| (f.a - t).abs() / t),
                fit,
                target,
            })
        })
        .collect()
}

/// Fitted second-moment constant of `r_{2,N}` against the predicted one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondMomentRow {
    pub n: u64,
    pub limit: usize,
    pub grid_points: usize,
    pub target: f64,
    pub fit: Option<FitResult>,
    pub relative_deviation: Option<f64>,
    /// Fewer than 6 grid points or less than two decades covered.
    pub low_confidence: bool,
}

/// Fits `sum_{n <= x} r(n)^2 ~ A x log x + B x` and compares `A` with the predicted constant.
pub fn second_moment_experiment(table: &CoeffTable, density: u32) -> Result<SecondMomentRow> {
    let grid = geometric_grid(table.limit() as u64, density)?;
    let target = second_moment_constant(table.n())?;
    let squares: Vec<i64> = (0..=table.limit())
        .map(|n| (table.r(n) * table.r(n)) as i64)
        .collect();
    let sg = scan_int(&squares, &grid)?;
    let fit = fit_xlogx(&sg).ok();
    let low_confidence = grid.len() < 6 || grid.last().is_none_or(|&x| x < 100 * grid[0]);
    Ok(SecondMomentRow {
        n: table.n(),
        limit: table.limit(),
        grid_points: grid.len(),
        target,
        relative_deviation: fit.map(|f| (f.a - target).abs() / target),
        fit,
        low_confidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::character_group;
    use crate::coeffs::{build_coeff_table, table_for_group};
    use crate::quadforms::ClassGroup;

    fn synthetic(grid: &[u64], f: impl Fn(f64) -> f64) -> ScanGrid {
        ScanGrid {
            points: grid.to_vec(),
            sums: grid.iter().map(|&x| f(x as f64)).collect(),
        }
    }

    #[test]
    fn grid_shape() {
        let g = geometric_grid(1_000_000, 4).unwrap();
        assert_eq!(g.len(), 13);
        assert_eq!((g[0], g[1], g[4], g[12]), (1000, 1778, 10_000, 1_000_000));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(geometric_grid(999, 4).unwrap(), Vec::<u64>::new());
        assert_eq!(geometric_grid(1000, 4).unwrap(), vec![1000]);
        assert!(geometric_grid(10, 0).is_err());
    }

    #[test]
    fn scans() {
        let grid = geometric_grid(10_000, 4).unwrap();
        let ones = vec![1i64; 10_001];
        let sg = scan_int(&ones, &grid).unwrap();
        assert!(sg.points.iter().zip(&sg.sums).all(|(&x, &s)| s == x as f64));
        let zeros = vec![0.0; 10_001];
        assert!(scan_real(&zeros, &grid)
            .unwrap()
            .sums
            .iter()
            .all(|&s| s == 0.0));
        assert_eq!(
            scan_int(&ones[..5000], &grid),
            Err(Error::GridExceedsSeries {
                point: 10_000,
                len: 5000
            })
        );

        // sum of r(n)^2 for x^2 + y^2 up to 100 by direct enumeration
        let t = build_coeff_table(1, 100).unwrap();
        let sq: Vec<i64> = (0..=100).map(|n| (t.r(n) * t.r(n)) as i64).collect();
        let mut counts = [0i64; 101];
        for x in -10i64..=10 {
            for y in -10i64..=10 {
                let v = x * x + y * y;
                if (1..=100).contains(&v) {
                    counts[v as usize] += 1;
                }
            }
        }
        let oracle: i64 = counts.iter().map(|c| c * c).sum();
        assert_eq!(prefix_sums_int(&sq, &[100]).unwrap(), vec![oracle as i128]);
    }

    #[test]
    fn synthetic_fits_are_exact() {
        let grid = geometric_grid(1_000_000, 4).unwrap();
        for a in -3..=3 {
            for b in -3..=3 {
                let (a, b) = (a as f64, b as f64);
                let fit = fit_xlogx(&synthetic(&grid, |x| a * x * x.ln() + b * x)).unwrap();
                assert!(
                    (fit.a - a).abs() < 1e-9 && (fit.b - b).abs() < 1e-9,
                    "{a} {b}: {fit:?}"
                );
            }
        }
        let fit = fit_xlogx(&synthetic(&grid, |x| 5.0 * x)).unwrap();
        assert!(fit.a.abs() < 1e-9 && (fit.b - 5.0).abs() < 1e-9);
        assert!(fit_xlogx(&synthetic(&grid[..3], |x| x)).is_err());
    }

    #[test]
    fn synthetic_classification() {
        let grid = geometric_grid(1_000_000, 4).unwrap();
        assert_eq!(
            growth_classify(&synthetic(&grid, |x| x * x.ln())),
            Growth::Xlogx
        );
        assert_eq!(
            growth_classify(&synthetic(&grid, |x| 7.0 * x)),
            Growth::Linear
        );
        assert_eq!(growth_classify(&synthetic(&grid, |x| x * x)), Growth::Xlogx);
        assert_eq!(
            growth_classify(&synthetic(&grid, |x| x * (12.0 - x.ln()))),
            Growth::Inconclusive
        );
        assert_eq!(
            growth_classify(&synthetic(&grid[..5], |x| x)),
            Growth::Inconclusive
        );
    }

    #[test]
    fn cross_rows_on_synthetic_sums() {
        let grid = geometric_grid(1_000_000, 4).unwrap();
        let linear: Vec<Complex64> = grid
            .iter()
            .map(|&x| Complex64::new(3.0 * x as f64, 0.0))
            .collect();
        let row = cross_row(0, 1, &grid, &linear);
        assert!(row.bounded && row.decreasing);
        let big: Vec<Complex64> = grid
            .iter()
            .map(|&x| Complex64::new(x as f64 * (x as f64).ln().powi(2), 0.0))
            .collect();
        let row = cross_row(0, 1, &grid, &big);
        assert!(!row.decreasing);
    }

    #[test]
    fn small_suites() {
        let g = ClassGroup::for_n(14).unwrap();
        let t = table_for_group(&g, 14, 100_000).unwrap();
        let chars = character_group(&g);
        let grid = geometric_grid(100_000, 4).unwrap();
        let rows = cross_term_suite(&t, &chars, &grid).unwrap();
        assert_eq!(rows.len(), 6);
        let diag = diagonal_suite(&t, &chars, &grid).unwrap();
        assert_eq!(diag.len(), 4);
        assert_eq!(diag.iter().filter(|r| r.is_genus).count(), 2);
        let row = second_moment_experiment(&t, 4).unwrap();
        assert!(!row.low_confidence && row.relative_deviation.unwrap() < 0.25);
        let tiny = second_moment_experiment(&build_coeff_table(1, 1000).unwrap(), 4).unwrap();
        assert!(tiny.low_confidence && tiny.fit.is_none());
    }
}
