use relsqueeze::oracle::{self, wick_moments, Moments, Verdict};
use relsqueeze::units::{derive, LabParameters};

#[test]
fn default_grid_matches_fock_oracle() {
    let s = derive(&LabParameters::sodium_example()).unwrap();
    let grid = oracle::default_grid(&s).unwrap();
    let report = oracle::run(&grid, &s).unwrap();
    println!("{report}");
    assert!(report.passed());
    assert!(report.max_deviation() <= oracle::MATCH_TOLERANCE);
}

#[test]
fn corrupted_wick_term_is_caught() {
    let s = derive(&LabParameters::sodium_example()).unwrap();
    let grid = oracle::default_grid(&s).unwrap();
    // Drop the vacuum correction from the number variance.
    let corrupted = |st: &relsqueeze::gaussian::GaussianState, i: usize, j: usize| {
        let m = wick_moments(st, i, j)?;
        let var_diff = m.var_diff + 0.5;
        Ok(Moments {
            var_diff,
            xi: var_diff / (m.n_hi + m.n_lo),
            ..m
        })
    };
    let report = oracle::run_with(&grid[..2], &s, &corrupted).unwrap();
    assert!(!report.passed());
    assert!(report.rows.iter().all(|r| r.verdict == Verdict::Mismatch));
}
