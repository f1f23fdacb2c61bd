//! Acceptance criteria, one test each. Every test prints a PASS or FAIL line
//! followed by its individual checks.

use hardylab::suite;

fn criterion(id: u32) {
    let r = suite::run(id).expect("known criterion");
    println!("{}", r.line());
    for c in &r.checks {
        println!("    {c}");
    }
    assert!(r.passed, "{}", r.line());
}

macro_rules! criteria {
    ($($name:ident => $id:expr),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                criterion($id);
            }
        )*
    };
}

criteria! {
    criterion_01_power_norm_equals_pi => 1,
    criterion_02_kernel_and_basis_norms => 2,
    criterion_03_membership_of_powers => 3,
    criterion_04_growth_bound => 4,
    criterion_05_semigroup_law => 5,
    criterion_06_generators => 6,
    criterion_07_delta => 7,
    criterion_08_norm_formula => 8,
    criterion_09_examples_unbounded => 9,
    criterion_10_power_law_and_duality => 10,
    criterion_11_sector_mapping => 11,
    criterion_12_strong_continuity => 12,
    criterion_13_generator_residual => 13,
    criterion_14_nonuniform_continuity => 14,
    criterion_15_model_functions => 15,
    criterion_16_point_spectrum => 16,
    criterion_17_sign_conditions => 17,
}
