mod common;

use ecolattice::closure::write_consistency_csv;
use ecolattice::{bundled_scenarios, form_consistency_report, PopulationState};

#[test]
fn row_two_consistency_golden() {
    let p = bundled_scenarios()[1];
    let rows: Vec<_> = (0..10)
        .map(|k| {
            let n_p = 4.1 * k as f64;
            let s = PopulationState::new(n_p, 41.0 - n_p).unwrap();
            form_consistency_report(&s, &p).unwrap()
        })
        .collect();
    let mut out = Vec::new();
    write_consistency_csv(&mut out, &rows).unwrap();
    common::check_golden("form_consistency_row2.csv", &String::from_utf8(out).unwrap());
}
