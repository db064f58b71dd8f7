//! Independent oracles: adaptive quadrature, SPD-cone Monte Carlo and identity checks.

mod checks;
pub mod cone;
pub mod quadrature;
mod suites;

pub use checks::{
    check_corollary1, check_densities_agree, check_lemma1, check_lemma4_limit, check_mellin_1f1, check_mellin_2f1,
    check_mixture_pointwise, check_normalization, check_sampler_ks, check_thm4_euler, ln_mellin_1f1, ln_mellin_2f1,
    mixture_density, CdfRoute, CheckOptions, CheckReport, NormMethod,
};
pub use suites::{
    ks_cases, mixture_cases, normalization_cases, random_spd_eigenvalues, run_suite, scalar_reference, thm1_vs_t,
    zonal_sum_identity, Suite, SuiteReport,
};
