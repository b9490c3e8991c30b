#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace acop {

struct NelderMeadOptions {
    /// Stop when the spread of objective values across the simplex falls
    /// below this (absolute).
    double f_tolerance = 1e-8;
    std::size_t max_iterations = 10000;
    /// Restarts from the best vertex after convergence; a restart that does
    /// not improve by more than f_tolerance ends the search.
    std::size_t max_restarts = 3;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimisation. `step` sets the initial simplex edge
/// along each coordinate. Non-finite objective values are treated as +inf.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, std::span<const double> step,
                             const NelderMeadOptions& options = {});

struct ScalarMinimum {
    double x = 0.0;
    double f = 0.0;
    std::size_t iterations = 0;
};

/// Golden-section search for a minimum of a unimodal function on [lo, hi];
/// terminates when the bracket is narrower than `tolerance`.
ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                      double tolerance);

}  // namespace acop
