//! `genuslab`: class groups, identity checks and second-moment experiments for `x^2 + N y^2`.

mod output;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use genuslab::analytic::ConstantsReport;
use genuslab::characters::character_group;
use genuslab::quadforms::ClassGroup;
use genuslab::Error;

use output::{fmt_f, to_csv, to_json, yes_no, Format};
use report::{CharacterSummary, ExperimentReport, GroupSummary, ScanReport};

#[derive(Debug, Parser)]
#[command(
    name = "genuslab",
    version,
    about = "Class groups, genus characters and representation counts for x^2 + N y^2"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Directory for coefficient caches; GENUSLAB_CACHE takes precedence.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reduced forms, class group structure, genera and solvability.
    Classgroup {
        #[arg(short = 'N')]
        n: u64,
    },
    /// The character group with genus characters identified.
    Characters {
        #[arg(short = 'N')]
        n: u64,
    },
    /// Representation counts r(n), ideal counts a(n) and per-class counts c_i(n).
    Coeffs {
        #[arg(short = 'N')]
        n: u64,
        #[arg(long, default_value_t = 100)]
        limit: usize,
    },
    /// Exact identity suites; exits 1 if any identity fails.
    Verify {
        #[arg(short = 'N')]
        n: u64,
        #[arg(long, default_value_t = 10_000)]
        limit: usize,
    },
    /// Second-moment fits, growth dichotomy and cross terms.
    Asymptotic {
        #[arg(short = 'N')]
        n: u64,
        #[arg(long, default_value_t = 1_000_000)]
        limit: usize,
        #[arg(long, default_value_t = 4)]
        grid_density: u32,
    },
    /// h, genera and solvability for every in-scope N up to nmax.
    Scan {
        #[arg(long, default_value_t = 100)]
        nmax: u64,
    },
    /// L(1), zeta'(2), L'/L, alpha(N), A1, B1 and the main-term constant.
    Constants {
        #[arg(short = 'N')]
        n: u64,
    },
}

enum Failure {
    Scope(Error),
    Other(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfScope { .. } | Error::ZeroInput => Failure::Scope(e),
            other => Failure::Other(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cache_dir = std::env::var_os("GENUSLAB_CACHE")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or(cli.cache_dir.clone());
    match run(&cli, cache_dir) {
        Ok((text, ok)) => {
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Scope(e)) => {
            eprintln!("error: {e}");
            eprintln!("only squarefree N with N != 3 mod 4 are supported, where -4N is a fundamental discriminant");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli, cache_dir: Option<PathBuf>) -> Result<(String, bool), Failure> {
    let fmt = cli.format;
    let cache = cache_dir.as_deref();
    Ok(match cli.command {
        Command::Classgroup { n } => {
            let g = ClassGroup::for_n(n)?;
            (render_group(fmt, &GroupSummary::new(n, &g)?), true)
        }
        Command::Characters { n } => {
            let g = ClassGroup::for_n(n)?;
            let chars: Vec<CharacterSummary> = character_group(&g)
                .iter()
                .enumerate()
                .map(|(i, c)| CharacterSummary::new(i, c))
                .collect();
            (
                render_characters(fmt, &GroupSummary::new(n, &g)?, &chars),
                true,
            )
        }
        Command::Coeffs { n, limit } => {
            let t = report::load_or_build(n, limit, cache)?;
            (render_coeffs(fmt, &t), true)
        }
        Command::Verify { n, limit } => {
            let r = report::verify(n, limit, cache)?;
            eprint_timings(&r);
            let ok = !r.verdicts.any_failed();
            (render_experiment(fmt, "verify", &r), ok)
        }
        Command::Asymptotic {
            n,
            limit,
            grid_density,
        } => {
            let r = report::asymptotic(n, limit, grid_density, cache)?;
            eprint_timings(&r);
            let ok = !report::asymptotic_failed(&r);
            (render_experiment(fmt, "asymptotic", &r), ok)
        }
        Command::Scan { nmax } => (render_scan(fmt, &report::scan(nmax)?), true),
        Command::Constants { n } => {
            let c = ConstantsReport::new(n)?;
            let ok = c.consistent;
            (render_constants(fmt, &c), ok)
        }
    })
}

fn eprint_timings(r: &ExperimentReport) {
    let parts: Vec<String> = r
        .timings
        .iter()
        .map(|(name, d)| format!("{name} {:.3}s", d.as_secs_f64()))
        .collect();
    eprintln!("timings: {}", parts.join(", "));
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

fn group_text(g: &GroupSummary) -> String {
    format!(
        "N = {}, D = {}\nh = {}, w = {}, invariant factors [{}]\nk = {}, t = {}, genera = {}\nforms: {}\nsplittings: {}\nsolvable: {}\n",
        g.n,
        g.discriminant,
        g.h,
        g.w,
        join(&g.invariant_factors, ", "),
        g.k,
        g.t,
        g.genera,
        join(&g.forms, " "),
        join(&g.splittings, " "),
        yes_no(g.solvable),
    )
}

fn render_group(fmt: Format, g: &GroupSummary) -> String {
    match fmt {
        Format::Text => group_text(g),
        Format::Json => to_json("classgroup", g) + "\n",
        Format::Csv => to_csv(
            &[
                "n",
                "discriminant",
                "h",
                "w",
                "k",
                "t",
                "genera",
                "invariant_factors",
                "solvable",
                "forms",
                "splittings",
            ],
            &[vec![
                g.n.to_string(),
                g.discriminant.to_string(),
                g.h.to_string(),
                g.w.to_string(),
                g.k.to_string(),
                g.t.to_string(),
                g.genera.to_string(),
                join(&g.invariant_factors, " "),
                g.solvable.to_string(),
                join(&g.forms, " "),
                join(&g.splittings, " "),
            ]],
        ),
    }
}

fn render_characters(fmt: Format, g: &GroupSummary, chars: &[CharacterSummary]) -> String {
    match fmt {
        Format::Text => {
            let mut out = format!(
                "N = {}, h = {}, classes: {}\n",
                g.n,
                g.h,
                join(&g.forms, " ")
            );
            for c in chars {
                let tag = match c.splitting {
                    Some(s) => format!("genus {s}"),
                    None => "non-genus".into(),
                };
                out += &format!(
                    "chi_{}: order {}, {tag}, values [{}]\n",
                    c.index,
                    c.order,
                    c.values.join(", ")
                );
            }
            out
        }
        Format::Json => {
            #[derive(serde::Serialize)]
            struct Body<'a> {
                n: u64,
                discriminant: i64,
                forms: &'a [genuslab::quadforms::QuadForm],
                characters: &'a [CharacterSummary],
            }
            to_json(
                "characters",
                &Body {
                    n: g.n,
                    discriminant: g.discriminant,
                    forms: &g.forms,
                    characters: chars,
                },
            ) + "\n"
        }
        Format::Csv => to_csv(
            &["index", "order", "is_genus", "splitting", "values"],
            &chars
                .iter()
                .map(|c| {
                    vec![
                        c.index.to_string(),
                        c.order.to_string(),
                        c.is_genus.to_string(),
                        c.splitting.map(|s| s.to_string()).unwrap_or_default(),
                        c.values.join(" "),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    }
}

fn render_coeffs(fmt: Format, t: &genuslab::coeffs::CoeffTable) -> String {
    let class_cols: Vec<String> = (0..t.h()).map(|i| format!("c_{i}")).collect();
    let rows: Vec<Vec<String>> = (1..=t.limit())
        .map(|n| {
            let mut row = vec![n.to_string(), t.r(n).to_string(), t.a(n).to_string()];
            row.extend((0..t.h()).map(|i| t.c(i, n).to_string()));
            row
        })
        .collect();
    match fmt {
        Format::Csv | Format::Text => {
            let mut header = vec!["n", "r", "a"];
            header.extend(class_cols.iter().map(|s| s.as_str()));
            let body = to_csv(&header, &rows);
            if fmt == Format::Text {
                format!(
                    "N = {}, limit = {}, h = {}, w = {}\n{}",
                    t.n(),
                    t.limit(),
                    t.h(),
                    t.w(),
                    body.replace(',', "\t")
                )
            } else {
                body
            }
        }
        Format::Json => {
            #[derive(serde::Serialize)]
            struct Body {
                n: u64,
                discriminant: i64,
                limit: usize,
                h: usize,
                w: u32,
                r: Vec<u64>,
                a: Vec<u64>,
                c: Vec<Vec<u32>>,
            }
            to_json(
                "coeffs",
                &Body {
                    n: t.n(),
                    discriminant: t.discriminant(),
                    limit: t.limit(),
                    h: t.h(),
                    w: t.w(),
                    r: t.r_row()[1..].to_vec(),
                    a: t.a_row()[1..].to_vec(),
                    c: (0..t.h()).map(|i| t.class_row(i)[1..].to_vec()).collect(),
                },
            ) + "\n"
        }
    }
}

fn opt_f(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_else(|| "-".into())
}

fn render_experiment(fmt: Format, command: &str, r: &ExperimentReport) -> String {
    match fmt {
        Format::Json => to_json(command, r) + "\n",
        Format::Csv => {
            let mut rows = Vec::new();
            for (name, v) in r.verdicts.list() {
                rows.push(vec![
                    "verdict".into(),
                    name.into(),
                    v.to_string(),
                    String::new(),
                ]);
            }
            if let Some(t) = &r.second_moment {
                rows.push(vec![
                    "second_moment".into(),
                    "A".into(),
                    opt_f(t.fit.map(|f| f.a)),
                    fmt_f(t.target),
                ]);
            }
            for d in &r.diagonal {
                rows.push(vec![
                    "diagonal".into(),
                    format!("chi_{}", d.index),
                    opt_f(d.fit.map(|f| f.a)),
                    d.growth.to_string(),
                ]);
            }
            for c in &r.cross_terms {
                rows.push(vec![
                    "cross".into(),
                    format!("chi_{} chi_{}", c.i, c.j),
                    fmt_f(c.max_ratio),
                    format!("bounded={} decreasing={}", c.bounded, c.decreasing),
                ]);
            }
            to_csv(&["kind", "name", "value", "detail"], &rows)
        }
        Format::Text => {
            let mut out = group_text(&r.group);
            out += &format!("limit = {}\n", r.limit);
            if r.verdicts
                .list()
                .iter()
                .any(|(_, v)| *v != report::Verdict::Skipped)
            {
                out += "identities:\n";
                for (name, v) in r.verdicts.list() {
                    out += &format!("  {name:<22} {v}\n");
                }
            }
            if let Some(t) = &r.second_moment {
                out += &format!(
                    "sum r(n)^2: A = {} (target {}), B = {}, deviation {}{}\n",
                    opt_f(t.fit.map(|f| f.a)),
                    fmt_f(t.target),
                    opt_f(t.fit.map(|f| f.b)),
                    opt_f(t.relative_deviation),
                    if t.low_confidence {
                        " [low confidence]"
                    } else {
                        ""
                    },
                );
            }
            if !r.diagonal.is_empty() {
                out += "sum |b_chi(n)|^2:\n";
                for d in &r.diagonal {
                    out += &format!(
                        "  chi_{} order {} {}: A = {}, {}{}\n",
                        d.index,
                        d.order,
                        if d.is_genus { "genus" } else { "non-genus" },
                        opt_f(d.fit.map(|f| f.a)),
                        d.growth,
                        d.target
                            .map(|t| format!(" (A1 = {})", fmt_f(t)))
                            .unwrap_or_default(),
                    );
                }
            }
            if !r.cross_terms.is_empty() {
                out += "cross terms sum b_i(n) b_j(n):\n";
                for c in &r.cross_terms {
                    out += &format!(
                        "  chi_{} chi_{}: max |S|/x = {}, bounded {}, decreasing {}\n",
                        c.i,
                        c.j,
                        fmt_f(c.max_ratio),
                        yes_no(c.bounded),
                        yes_no(c.decreasing),
                    );
                }
            }
            out
        }
    }
}

fn render_scan(fmt: Format, s: &ScanReport) -> String {
    match fmt {
        Format::Json => to_json("scan", s) + "\n",
        Format::Csv | Format::Text => {
            let rows: Vec<Vec<String>> = s
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.h.to_string(),
                        r.t.to_string(),
                        r.genera.to_string(),
                        r.solvable.to_string(),
                    ]
                })
                .collect();
            let body = to_csv(&["n", "h", "t", "genera", "solvable"], &rows);
            if fmt == Format::Text {
                body.replace(',', "\t")
            } else {
                body
            }
        }
    }
}

fn constant_pairs(c: &ConstantsReport) -> Vec<(&'static str, String)> {
    vec![
        ("n", c.n.to_string()),
        ("discriminant", c.discriminant.to_string()),
        ("h", c.h.to_string()),
        ("w", c.w.to_string()),
        ("k", c.k.to_string()),
        ("l1_formula", fmt_f(c.l1_formula)),
        ("l1_series", fmt_f(c.l1_series)),
        ("l1_h_pi_over_sqrt_n", fmt_f(c.l1_h_pi_over_sqrt_n)),
        ("gamma", fmt_f(c.gamma)),
        ("zeta_prime_2", fmt_f(c.zeta_prime_2)),
        ("lprime_over_l", fmt_f(c.lprime_over_l)),
        ("lprime_converged", c.lprime_converged.to_string()),
        ("alpha", fmt_f(c.alpha)),
        ("a1", fmt_f(c.a1)),
        ("b1", fmt_f(c.b1)),
        ("second_moment_constant", fmt_f(c.second_moment_constant)),
        ("consistent", c.consistent.to_string()),
    ]
}

fn render_constants(fmt: Format, c: &ConstantsReport) -> String {
    match fmt {
        Format::Json => to_json("constants", c) + "\n",
        Format::Csv => to_csv(
            &["name", "value"],
            &constant_pairs(c)
                .into_iter()
                .map(|(k, v)| vec![k.to_string(), v])
                .collect::<Vec<_>>(),
        ),
        Format::Text => constant_pairs(c)
            .into_iter()
            .map(|(k, v)| format!("{k:<20} {v}\n"))
            .collect(),
    }
}
