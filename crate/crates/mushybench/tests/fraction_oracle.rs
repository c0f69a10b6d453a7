//! Independent-oracle checks for the closed-form liquid fraction: classical
//! RK4 integration of the fraction ODE must reproduce the closed form on the
//! benchmark alloy and on a seeded family of randomized property sets, and
//! the enthalpy inversion must round-trip across the same family.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mushybench::linearization::{
    SearchParams, fraction_model, integrate_fraction_ode, phase_diffusivities,
    solve_mushy_diffusivity,
};
use mushybench::material::{self, MaterialProperties};

/// Random but physically sensible single-material draw. The mushy
/// diffusivity is drawn log-uniform in [0.5·min(α_s, α_l), 2·max(α_s, α_l)],
/// the range the linearization is expected to land in.
fn random_material(rng: &mut ChaCha8Rng) -> (MaterialProperties, f64) {
    let c_s = rng.gen_range(200.0..1500.0);
    let c_l = c_s * rng.gen_range(1.05..2.5);
    let kappa_s = rng.gen_range(5.0..100.0);
    let kappa_l = kappa_s * rng.gen_range(1.2..5.0);
    let rho = rng.gen_range(1000.0..9000.0);
    let latent = rng.gen_range(5.0e4..5.0e5);
    let t_sol = rng.gen_range(400.0..1500.0);
    let t_liq = t_sol + rng.gen_range(20.0..200.0);
    let props = MaterialProperties {
        c_s,
        c_l,
        kappa_s,
        kappa_l,
        rho,
        latent_heat: latent,
        t_sol,
        t_liq,
        t_melt: None,
        lambda0: 0.0,
    };
    props.validate().expect("generated material must be valid");
    let (alpha_s, alpha_l) = phase_diffusivities(&props);
    let lo = 0.5 * alpha_s.min(alpha_l);
    let hi = 2.0 * alpha_s.max(alpha_l);
    let alpha_sl = (rng.gen_range(lo.ln()..hi.ln())).exp();
    (props, alpha_sl)
}

fn max_abs_gap(props: &MaterialProperties, alpha_sl: f64, n_steps: usize) -> f64 {
    let model = fraction_model(props, alpha_sl).expect("model");
    let table = integrate_fraction_ode(props, alpha_sl, n_steps).expect("RK4");
    let mut worst = 0.0_f64;
    for &(temp, lambda_rk4) in &table {
        // eval_raw: randomized diffusivities can push the trajectory outside
        // [0, 1], and the comparison must see the unclamped closed form.
        let lambda_closed = model.eval_raw(temp).expect("closed form");
        worst = worst.max((lambda_closed - lambda_rk4).abs());
    }
    worst
}

#[test]
fn rk4_matches_closed_form_on_benchmark_alloy() {
    let props = MaterialProperties::vt3_1();
    let lin = solve_mushy_diffusivity(&props, &SearchParams::default()).unwrap();
    let gap = max_abs_gap(&props, lin.alpha_sl, 1000);
    println!("VT3-1 RK4 vs closed form, 1001 temperatures: max abs gap {gap:.3e}");
    assert!(gap <= 1e-8, "RK4 disagrees with the closed form: {gap:.3e}");
}

#[test]
fn rk4_matches_closed_form_on_randomized_materials() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0001);
    let mut worst = 0.0_f64;
    for case in 0..50 {
        let (props, alpha_sl) = random_material(&mut rng);
        let gap = max_abs_gap(&props, alpha_sl, 1000);
        assert!(
            gap <= 1e-8,
            "case {case}: RK4 vs closed form gap {gap:.3e} (alpha_sl = {alpha_sl:.3e})"
        );
        worst = worst.max(gap);
    }
    println!("50 randomized property sets: worst max-abs gap {worst:.3e}");
}

#[test]
fn inversion_round_trips_on_randomized_materials() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0002);
    let mut solved = 0;
    for case in 0..25 {
        let (props, _) = random_material(&mut rng);
        // Use the genuinely solved mushy diffusivity so λ stays in range.
        let lin = match solve_mushy_diffusivity(&props, &SearchParams::default()) {
            Ok(lin) => lin,
            // Some random draws put the root outside the standard window;
            // those are exercised by the linearization failure tests.
            Err(_) => continue,
        };
        solved += 1;
        for _ in 0..40 {
            let temp = rng.gen_range(props.t_sol..props.t_liq);
            let h = material::enthalpy(&props, &lin.model, temp).unwrap();
            let back = material::temperature_from_enthalpy(&props, &lin.model, h).unwrap();
            assert!(
                (back - temp).abs() <= 1e-8,
                "case {case}: inversion drifted {temp} -> {back}"
            );
        }
    }
    println!("round-trip exercised on {solved}/25 randomized materials");
    assert!(solved >= 10, "too few solvable draws ({solved}) for coverage");
}

#[test]
fn enthalpy_is_strictly_increasing_on_randomized_materials() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0003);
    let mut solved = 0;
    for _ in 0..25 {
        let (props, _) = random_material(&mut rng);
        let Ok(lin) = solve_mushy_diffusivity(&props, &SearchParams::default()) else {
            continue;
        };
        solved += 1;
        let span = props.t_liq + 100.0;
        let mut prev = material::enthalpy(&props, &lin.model, 1.0).unwrap();
        for i in 1..=200 {
            let temp = 1.0 + (span - 1.0) * i as f64 / 200.0;
            let h = material::enthalpy(&props, &lin.model, temp).unwrap();
            assert!(
                h > prev,
                "enthalpy not strictly increasing at T = {temp}: {prev} -> {h}"
            );
            prev = h;
        }
    }
    println!("monotonicity exercised on {solved}/25 randomized materials");
    assert!(solved >= 10, "too few solvable draws ({solved}) for coverage");
}
