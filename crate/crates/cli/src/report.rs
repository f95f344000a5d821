//! Report types assembled by the subcommands.

use std::path::Path;
use std::time::{Duration, Instant};

use genuslab::analytic::ConstantsReport;
use genuslab::arith::factorize;
use genuslab::characters::{character_group, genus_character_from_splitting, IdealClassCharacter};
use genuslab::coeffs::{
    build_coeff_table, cache_path, decomposition_holds, genus_square_check,
    kronecker_factorization_check, unit_count, CoeffTable,
};
use genuslab::dirichlet::squared_ideal_count_identity;
use genuslab::experiments::{
    cross_term_suite, diagonal_suite, geometric_grid, second_moment_experiment, CrossTermRow,
    DiagonalRow, SecondMomentRow,
};
use genuslab::quadforms::{ClassGroup, QuadForm, Splitting};
use genuslab::Result;
use serde::Serialize;

/// Exact series suites are skipped above this limit.
pub const EXACT_SERIES_MAX: usize = 200_000;

/// Relative deviation of the fitted second-moment constant that fails `asymptotic`.
pub const SECOND_MOMENT_TOLERANCE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn failed(self) -> bool {
        self == Verdict::Fail
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        })
    }
}

/// Class group summary for one `N`.
#[derive(Debug, Clone, Serialize)]
pub struct GroupSummary {
    pub n: u64,
    pub discriminant: i64,
    pub h: usize,
    pub w: u32,
    /// Distinct primes dividing the discriminant.
    pub k: usize,
    /// Distinct primes dividing `N`.
    pub t: usize,
    pub genera: usize,
    pub invariant_factors: Vec<u64>,
    pub solvable: bool,
    pub forms: Vec<QuadForm>,
    pub splittings: Vec<Splitting>,
}

impl GroupSummary {
    pub fn new(n: u64, group: &ClassGroup) -> Result<Self> {
        Ok(GroupSummary {
            n,
            discriminant: group.discriminant(),
            h: group.h(),
            w: unit_count(group.discriminant())?,
            k: group.k(),
            t: factorize(n)?.distinct(),
            genera: group.genus_count(),
            invariant_factors: group.invariant_factors().to_vec(),
            solvable: group.is_solvable(),
            forms: group.forms().to_vec(),
            splittings: group.splittings().to_vec(),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacterSummary {
    pub index: usize,
    pub order: u64,
    pub is_genus: bool,
    pub splitting: Option<Splitting>,
    pub values: Vec<String>,
}

impl CharacterSummary {
    pub fn new(index: usize, chi: &IdealClassCharacter) -> Self {
        CharacterSummary {
            index,
            order: chi.order(),
            is_genus: chi.is_genus(),
            splitting: chi.splitting(),
            values: chi.values().iter().map(|v| v.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdicts {
    pub decomposition: Verdict,
    pub kronecker: Verdict,
    pub squared_ideal_counts: Verdict,
    pub genus_squares: Verdict,
}

impl Verdicts {
    pub fn skipped() -> Self {
        Verdicts {
            decomposition: Verdict::Skipped,
            kronecker: Verdict::Skipped,
            squared_ideal_counts: Verdict::Skipped,
            genus_squares: Verdict::Skipped,
        }
    }

    pub fn list(&self) -> [(&'static str, Verdict); 4] {
        [
            ("decomposition", self.decomposition),
            ("kronecker", self.kronecker),
            ("squared_ideal_counts", self.squared_ideal_counts),
            ("genus_squares", self.genus_squares),
        ]
    }

    pub fn any_failed(&self) -> bool {
        self.list().iter().any(|(_, v)| v.failed())
    }
}

/// Everything `verify` and `asymptotic` compute for one `N`.
///
/// Timings are kept out of the serialized form so that repeated runs produce
/// identical JSON.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    #[serde(flatten)]
    pub group: GroupSummary,
    pub limit: usize,
    pub constants: ConstantsReport,
    pub characters: Vec<CharacterSummary>,
    pub verdicts: Verdicts,
    pub second_moment: Option<SecondMomentRow>,
    pub diagonal: Vec<DiagonalRow>,
    pub cross_terms: Vec<CrossTermRow>,
    #[serde(skip)]
    pub timings: Vec<(&'static str, Duration)>,
}

impl ExperimentReport {
    fn base(
        n: u64,
        limit: usize,
        group: &ClassGroup,
        chars: &[IdealClassCharacter],
    ) -> Result<Self> {
        Ok(ExperimentReport {
            group: GroupSummary::new(n, group)?,
            limit,
            constants: ConstantsReport::new(n)?,
            characters: chars
                .iter()
                .enumerate()
                .map(|(i, c)| CharacterSummary::new(i, c))
                .collect(),
            verdicts: Verdicts::skipped(),
            second_moment: None,
            diagonal: Vec::new(),
            cross_terms: Vec::new(),
            timings: Vec::new(),
        })
    }
}

/// Loads the table from `cache_dir` when present, otherwise builds it and stores it there.
pub fn load_or_build(n: u64, limit: usize, cache_dir: Option<&Path>) -> Result<CoeffTable> {
    let Some(dir) = cache_dir else {
        return build_coeff_table(n, limit);
    };
    let path = cache_path(dir, n, limit);
    if path.exists() {
        return CoeffTable::load(&path, n, limit);
    }
    let table = build_coeff_table(n, limit)?;
    std::fs::create_dir_all(dir)
        .map_err(|e| genuslab::Error::Cache(format!("{}: {e}", dir.display())))?;
    table.save(&path)?;
    Ok(table)
}

fn timed<T>(
    timings: &mut Vec<(&'static str, Duration)>,
    name: &'static str,
    f: impl FnOnce() -> T,
) -> T {
    let start = Instant::now();
    let out = f();
    timings.push((name, start.elapsed()));
    out
}

/// Runs the exact identity suites.
pub fn verify(n: u64, limit: usize, cache_dir: Option<&Path>) -> Result<ExperimentReport> {
    let group = ClassGroup::for_n(n)?;
    let chars = character_group(&group);
    let mut timings = Vec::new();
    let table = timed(&mut timings, "table", || load_or_build(n, limit, cache_dir))?;
    let mut report = ExperimentReport::base(n, limit, &group, &chars)?;
    let decomposition = timed(&mut timings, "decomposition", || {
        decomposition_holds(&table, &chars)
    })?;
    report.verdicts.decomposition = Verdict::from_bool(decomposition);
    if limit <= EXACT_SERIES_MAX {
        let kron = timed(&mut timings, "kronecker", || -> Result<bool> {
            for &s in group.splittings() {
                if !kronecker_factorization_check(&group, s, &table)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })?;
        report.verdicts.kronecker = Verdict::from_bool(kron);
        let d = group.discriminant();
        let sq = timed(&mut timings, "squared_ideal_counts", || {
            squared_ideal_count_identity(d, limit)
        })?;
        report.verdicts.squared_ideal_counts = Verdict::from_bool(sq);
        let genus = timed(&mut timings, "genus_squares", || -> Result<bool> {
            for &s in group.splittings() {
                let chi = genus_character_from_splitting(&group, s)?;
                if !genus_square_check(&chi, &table)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })?;
        report.verdicts.genus_squares = Verdict::from_bool(genus);
    }
    report.timings = timings;
    Ok(report)
}

/// Runs the second-moment fit, the diagonal dichotomy suite and the cross terms.
pub fn asymptotic(
    n: u64,
    limit: usize,
    density: u32,
    cache_dir: Option<&Path>,
) -> Result<ExperimentReport> {
    let group = ClassGroup::for_n(n)?;
    let chars = character_group(&group);
    let mut timings = Vec::new();
    let table = timed(&mut timings, "table", || load_or_build(n, limit, cache_dir))?;
    let mut report = ExperimentReport::base(n, limit, &group, &chars)?;
    let grid = geometric_grid(limit as u64, density)?;
    report.second_moment = Some(timed(&mut timings, "second_moment", || {
        second_moment_experiment(&table, density)
    })?);
    report.diagonal = timed(&mut timings, "diagonal", || {
        diagonal_suite(&table, &chars, &grid)
    })?;
    report.cross_terms = timed(&mut timings, "cross_terms", || {
        cross_term_suite(&table, &chars, &grid)
    })?;
    report.timings = timings;
    Ok(report)
}

/// The fitted constant missed its target on a grid that is not flagged low-confidence.
pub fn asymptotic_failed(report: &ExperimentReport) -> bool {
    report.second_moment.as_ref().is_some_and(|row| {
        !row.low_confidence
            && row
                .relative_deviation
                .is_none_or(|d| d > SECOND_MOMENT_TOLERANCE)
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub n: u64,
    pub h: usize,
    pub t: usize,
    pub genera: usize,
    pub solvable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub nmax: u64,
    pub rows: Vec<ScanRow>,
}

/// Every in-scope `N <= nmax`.
pub fn scan(nmax: u64) -> Result<ScanReport> {
    let rows = (1..=nmax)
        .filter(|&n| genuslab::quadforms::in_scope(n))
        .map(|n| {
            let g = ClassGroup::for_n(n)?;
            Ok(ScanRow {
                n,
                h: g.h(),
                t: factorize(n)?.distinct(),
                genera: g.genus_count(),
                solvable: g.is_solvable(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanReport { nmax, rows })
}
