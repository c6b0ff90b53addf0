use ecolattice::{
    bundled_scenarios, bw_coefficients, closure_residuals, psi_bw, psi_predator_form, psi_prey_form,
    serengeti_constants, total_population_rate, InteractionParams, PopulationState,
};

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn no_interaction(row: usize) -> InteractionParams {
    let mut p = bundled_scenarios()[row];
    p.alpha_pp = 0.0;
    p.alpha_dd = 0.0;
    p.alpha_pd = 0.0;
    p
}

#[test]
fn all_routes_give_the_malthus_rate() {
    let obs = serengeti_constants().observed_state().unwrap().unwrap();
    let (n_p, n_d, n_t) = (obs.n_p(), obs.n_d(), obs.n_t());
    let want = 1.3434;
    for row in 1..4 {
        let p = no_interaction(row);
        let routes = [
            total_population_rate(&obs, &p),
            psi_prey_form(n_p, 0.0, n_t, &p).unwrap(),
            psi_predator_form(n_d, 0.0, n_t, &p).unwrap(),
            psi_bw((n_p - n_d) / n_t, n_t, &bw_coefficients(&p).unwrap()),
        ];
        for r in routes {
            assert!(relative(r, want) <= 1e-12, "row {} gave {r}", row + 1);
        }
    }
}

#[test]
fn malthus_rate_is_linear_in_each_population() {
    let p = no_interaction(2);
    for &(n_p, n_d) in &[(0.0, 5.0), (7.5, 0.0), (30.0, 11.0)] {
        let s = PopulationState::new(n_p, n_d).unwrap();
        let want = p.eps_p * n_p + p.eps_d * n_d;
        assert!((total_population_rate(&s, &p) - want).abs() < 1e-12);
        let r = closure_residuals(n_p, n_p * n_p, n_p + n_d, &p).unwrap();
        assert!(r.prey.abs() < 1e-9 * (1.0 + n_p), "{r:?}");
    }
}
