#pragma once

#include <stdexcept>
#include <string>

namespace spps {

enum class ErrorCode {
    invalid_interval,
    grid_too_coarse,
    nonfinite_sample,
    grid_mismatch,
    division_by_zero,
    invalid_argument,
    insufficient_order,
    nonconvergent_tail,
    vanishing_u0,
    complex_coefficients_unsupported,
    degenerate_series,
    no_convergence,
    unsupported_left_bc,
    shift_failed_nodeless,
    no_root_in_bracket,
    f02_T_zero,
    not_nodeless,
    quadratic_degenerate,
    lambda_out_of_range,
    alphas_not_equal,
    evanescent_output,
    residual_too_large,
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
    case ErrorCode::invalid_interval: return "invalid_interval";
    case ErrorCode::grid_too_coarse: return "grid_too_coarse";
    case ErrorCode::nonfinite_sample: return "nonfinite_sample";
    case ErrorCode::grid_mismatch: return "grid_mismatch";
    case ErrorCode::division_by_zero: return "division_by_zero";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::insufficient_order: return "insufficient_order";
    case ErrorCode::nonconvergent_tail: return "nonconvergent_tail";
    case ErrorCode::vanishing_u0: return "vanishing_u0";
    case ErrorCode::complex_coefficients_unsupported: return "complex_coefficients_unsupported";
    case ErrorCode::degenerate_series: return "degenerate_series";
    case ErrorCode::no_convergence: return "no_convergence";
    case ErrorCode::unsupported_left_bc: return "unsupported_left_bc";
    case ErrorCode::shift_failed_nodeless: return "shift_failed_nodeless";
    case ErrorCode::no_root_in_bracket: return "no_root_in_bracket";
    case ErrorCode::f02_T_zero: return "f02_T_zero";
    case ErrorCode::not_nodeless: return "not_nodeless";
    case ErrorCode::quadratic_degenerate: return "quadratic_degenerate";
    case ErrorCode::lambda_out_of_range: return "lambda_out_of_range";
    case ErrorCode::alphas_not_equal: return "alphas_not_equal";
    case ErrorCode::evanescent_output: return "evanescent_output";
    case ErrorCode::residual_too_large: return "residual_too_large";
    }
    return "unknown";
}

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail, long index = -1)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), index_(index) {}

    ErrorCode code() const noexcept { return code_; }
    // Offending node index for sampling and division errors, -1 otherwise.
    long index() const noexcept { return index_; }

private:
    ErrorCode code_;
    long index_;
};

} // namespace spps
