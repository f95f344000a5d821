use genuslab::characters::character_group;
use genuslab::coeffs::table_for_group;
use genuslab::experiments::{diagonal_suite, geometric_grid, Growth};
use genuslab::quadforms::{in_scope, ClassGroup};

#[test]
fn genus_characters_share_the_leading_constant() {
    let grid = geometric_grid(100_000, 4).unwrap();
    for n in (1..=30).filter(|&n| in_scope(n)) {
        let g = ClassGroup::for_n(n).unwrap();
        let t = table_for_group(&g, n, 100_000).unwrap();
        let rows = diagonal_suite(&t, &character_group(&g), &grid).unwrap();
        let fits: Vec<f64> = rows
            .iter()
            .filter(|r| r.is_genus)
            .map(|r| r.fit.unwrap().a)
            .collect();
        assert_eq!(fits.len(), g.genus_count(), "N = {n}");
        let (lo, hi) = fits
            .iter()
            .fold((f64::MAX, f64::MIN), |(l, h), &a| (l.min(a), h.max(a)));
        assert!((hi - lo) / hi <= 0.20, "N = {n}: {fits:?}");
    }
}

#[test]
fn non_genus_diagonals_are_linear_for_n_14() {
    let grid = geometric_grid(1_000_000, 4).unwrap();
    let g = ClassGroup::for_n(14).unwrap();
    let t = table_for_group(&g, 14, 1_000_000).unwrap();
    let rows = diagonal_suite(&t, &character_group(&g), &grid).unwrap();
    for r in &rows {
        let expected = if r.is_genus {
            Growth::Xlogx
        } else {
            Growth::Linear
        };
        assert_eq!(r.growth, expected, "{r:?}");
    }
}
