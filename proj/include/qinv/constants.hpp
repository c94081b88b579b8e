#pragma once

// Tolerances shared by the kernels, the checks and the test suites.
// Values are either absolute or relative to the max-norm of the reference
// quantity, as named.

namespace qinv::tol {

// matkit
inline constexpr double hermitian_input_rel = 1e-12;
inline constexpr double eig_orthonormality = 1e-12;
inline constexpr double exp_scaled_norm = 0.5;
inline constexpr double exp_max_norm = 512.0;
inline constexpr double exp_hermitian_agreement_rel = 1e-11;
inline constexpr double solve_residual_rel = 1e-10;
inline constexpr double singular_pivot_rel = 1e-14;

// algebra
inline constexpr double commutation = 1e-12;

// model
inline constexpr double pt_verdict = 1e-10;
inline constexpr double generator_fit = 1e-10;
inline constexpr double adjoint_consistency = 1e-14;

// invariant
inline constexpr double auxiliary = 1e-12;
inline constexpr double closed_form_agreement = 1e-9;
inline constexpr double eigen_residual_rel = 1e-9;
inline constexpr double gram_identity = 1e-9;
inline constexpr double pseudo_hermiticity = 1e-10;
inline constexpr double dyson_reduction = 1e-9;
inline constexpr double similarity_identity = 1e-8;
inline constexpr double invariant_equation = 1e-8;
inline constexpr double invariant_equation_floor = 1e-9;
inline constexpr double tail_mass_guard = 1e-10;
inline constexpr int tail_components = 4;
inline constexpr double min_fd_step = 1e-7;
inline constexpr double max_fd_step = 1e-3;
inline constexpr double derivative_step = 1e-3;  // 5-point central stencil

// dynamics
inline constexpr double local_step_error = 1e-6;
inline constexpr double leakage_warn = 1e-6;
inline constexpr double leakage_fail = 1e-4;
inline constexpr double metric_imag_rel = 1e-12;
inline constexpr double state_agreement = 1e-6;
inline constexpr double eta_norm_drift = 1e-8;
inline constexpr int steps_per_unit_rate = 16384;

// phases
inline constexpr double phase_split = 1e-10;
inline constexpr double berry_numeric = 1e-8;
inline constexpr double arbitration = 1e-5;
inline constexpr double parameter_chain = 1e-12;

}  // namespace qinv::tol
