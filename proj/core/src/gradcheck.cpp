#include "adalogn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace adalogn {

GradCheckReport finite_diff_check(const std::function<Tensor()>& f, ParameterStore& params,
                                  const GradCheckOptions& opts) {
  GradCheckReport report;
  report.tol = opts.tol;

  params.zero_grad();
  const Tensor loss = f();
  const double f0 = loss.item();
  loss.backward();

  for (auto& [name, t] : params.groups()) {
    GradCheckGroup g;
    g.name = name;
    const std::vector<double> analytic = t.grad();
    auto data = t.mutable_data();
    const std::size_t n = data.size();
    const std::size_t count = opts.max_per_group == 0 ? n : std::min(n, opts.max_per_group);
    for (std::size_t c = 0; c < count; ++c) {
      const std::size_t i = count == n ? c : c * n / count;
      const double saved = data[i];
      data[i] = saved + opts.eps;
      const double fp = f().item();
      data[i] = saved - opts.eps;
      const double fm = f().item();
      data[i] = saved;

      const double right = (fp - f0) / opts.eps;
      const double left = (f0 - fm) / opts.eps;
      if (std::abs(right - left) > opts.kink_slope_jump) {
        ++g.skipped_kinks;
        continue;
      }
      const double fd = (fp - fm) / (2.0 * opts.eps);
      const double rel = std::abs(analytic[i] - fd) / (std::abs(fd) + 1e-8);
      if (g.checked == 0 || rel > g.max_rel_error) {
        g.max_rel_error = rel;
        g.worst_index = i;
        g.worst_analytic = analytic[i];
        g.worst_numeric = fd;
      }
      ++g.checked;
    }
    report.max_rel_error = std::max(report.max_rel_error, g.max_rel_error);
    report.skipped_kinks += g.skipped_kinks;
    report.groups.push_back(std::move(g));
  }
  params.zero_grad();
  report.passed = report.max_rel_error < opts.tol;
  return report;
}

std::string to_string(const GradCheckReport& r) {
  std::string out;
  char line[256];
  for (const auto& g : r.groups) {
    std::snprintf(line, sizeof(line), "%-24s checked=%-5zu kinks=%-3zu max_rel=%.3e at [%zu] ad=%+.6e fd=%+.6e\n",
                  g.name.c_str(), g.checked, g.skipped_kinks, g.max_rel_error, g.worst_index,
                  g.worst_analytic, g.worst_numeric);
    out += line;
  }
  std::snprintf(line, sizeof(line), "max_rel=%.3e tol=%.1e skipped_kinks=%zu %s\n",
                r.max_rel_error, r.tol, r.skipped_kinks, r.passed ? "PASS" : "FAIL");
  out += line;
  return out;
}

}  // namespace adalogn
