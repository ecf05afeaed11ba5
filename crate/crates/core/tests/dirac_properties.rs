use ncosc_core::dirac::{
    clifford_residual, conserved_rotation_generator, gamma_residual, landau_equivalence_check,
    nc_dirac_oscillator, SpinorBasis,
};
use ncosc_core::irrep::IrrepSpec;
use ncosc_core::nc::NCParams;
use ncosc_core::spectra::eigen::dense_eigenvalues;
use ncosc_core::HalfInt;
use proptest::prelude::*;

#[test]
fn clifford_algebra_is_exact() {
    assert_eq!(clifford_residual(), 0.0);
    assert_eq!(gamma_residual(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn landau_form_matches_for_one_sign(mass in 0.2f64..3.0, omega in 0.1f64..3.0, n_max in 1u32..8) {
        let p = NCParams::commutative(mass, omega).unwrap();
        let eq = landau_equivalence_check(&p, &SpinorBasis::commutative(n_max)).unwrap();
        prop_assert_eq!(eq.sign(), Some(1.0));
    }

    #[test]
    fn nc_dirac_oscillator_is_hermitian_with_a_conserved_rotation(t in 0.0f64..1.0, k in 0.0f64..1.0) {
        let p = NCParams::new(1.0, 0.5, t, k).unwrap();
        let basis = SpinorBasis::noncommutative(4, IrrepSpec::discrete_plus(HalfInt::ONE, 6).unwrap());
        let h = nc_dirac_oscillator(&p, &basis).unwrap();
        prop_assert_eq!(h.as_sparse().hermiticity_residual(), 0.0);
        prop_assert_eq!(conserved_rotation_generator(&h, &basis).unwrap(), 0.5);
        prop_assert!(dense_eigenvalues(&h).unwrap().iter().all(|e| e.is_finite()));
    }
}
