#pragma once

// Central finite-difference check of reverse-mode gradients.

#include <functional>
#include <string>
#include <vector>

#include "adalogn/params.hpp"

namespace adalogn {

struct GradCheckOptions {
  double eps = 1e-5;
  double tol = 1e-4;
  /// A coordinate is treated as sitting on a kink (relu at 0, a relevance
  /// score crossing its threshold) and skipped when the one-sided slopes
  /// disagree by more than this.
  double kink_slope_jump = 1e-3;
  /// Check at most this many coordinates per group (0 = all), spread evenly.
  std::size_t max_per_group = 0;
};

struct GradCheckGroup {
  std::string name;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;  // coordinate attaining max_rel_error
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckGroup> groups;
  double max_rel_error = 0.0;
  std::size_t skipped_kinks = 0;
  double tol = 0.0;
  bool passed = false;
};

/// Compares d f / d p from backward() against (f(p+eps) - f(p-eps)) / 2eps
/// for every coordinate of every group, with relative error
/// |g_ad - g_fd| / (|g_fd| + 1e-8). f must be deterministic and return a
/// one-element tensor built from the store's tensors. Parameter values are
/// restored afterwards.
GradCheckReport finite_diff_check(const std::function<Tensor()>& f, ParameterStore& params,
                                  const GradCheckOptions& opts = {});

std::string to_string(const GradCheckReport& r);

}  // namespace adalogn
