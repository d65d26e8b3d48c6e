#pragma once

#include <functional>
#include <istream>
#include <string>
#include <vector>

#include "fpme/core.hpp"

namespace fpme {

/**
 * Nonnegative initial data u(x,0) = f(x).
 *
 * Either an analytic profile (optionally with its Fourier transform, which the
 * spectral oracle needs) or an explicit list of I+1 trace samples.
 */
struct InitialData {
    std::string name;
    std::function<double(double)> profile;
    std::function<double(double)> fourier;  // f_hat(xi) = int f(x) e^{-i xi x} dx; empty if unknown
    std::vector<double> samples;            // used when profile is empty

    /// Trace values f(x_i), i = 0..I. Throws DomainError on negative or non-finite data.
    std::vector<double> sample(const Grid& grid) const;

    static InitialData gaussian(double amplitude = 1.0, double width = 1.0);
    static InitialData bump(double amplitude = 1.0, double center = 0.0, double width = 1.0);
    static InitialData constant(double value);
    static InitialData zero();
    static InitialData from_samples(std::vector<double> values);

    /// Parses a preset spec: "gaussian[:A:s]", "bump[:A:c:w]", "constant:g", "zero",
    /// or "samples:v0,v1,...".
    static InitialData parse(const std::string& spec);
};

struct RunConfig {
    SolverConfig solver;
    InitialData data;
};

/**
 * Flat key-value configuration.
 *
 *   # comment
 *   sigma = 0.5
 *   m = 2
 *   X = 4        Y = 4 ... one key per line
 *   initial_data = gaussian
 *
 * Required keys: sigma, m, X, Y, T, I, K, J, initial_data.
 * Optional keys: c (default 2), d (default 1), cfl_safety (default 0.95).
 * Unknown or repeated keys are ConfigErrors.
 */
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

}  // namespace fpme
