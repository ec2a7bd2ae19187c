#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "curvinv/tensor/tensor.hpp"

namespace curvinv::metrics {

/// Minkowski metric diag(-1, 1, ..., 1) on coordinates x0..x(D-1).
tensor::Metric flat(std::size_t dim);

/// Unit round metric on S^n over chi1..chin:
/// dOmega_1^2 = dchi1^2, dOmega_k^2 = dchik^2 + sin^2(chik) dOmega_(k-1)^2.
tensor::Metric sphere_metric(std::size_t n);

/// Single-rotation Kerr metric in D >= 4 dimensions on (t, r, theta, phi,
/// chi1, ..., chi(D-4)) with parameters a and mu.
tensor::Metric kerr(std::size_t dim);

/// Metric by registry name: "flat", "sphere" (dim = sphere dimension) or "kerr".
tensor::Metric make_metric(std::string_view name, std::size_t dim);

/// Registered metric names.
std::vector<std::string> metric_names();

/// Coordinates and parameters a metric depends on explicitly; sin/cos of a
/// coordinate count as that coordinate.
std::vector<std::string> metric_symbols(const tensor::Metric& g);

}  // namespace curvinv::metrics
