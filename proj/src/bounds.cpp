#include "bloommap/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "bloommap/errors.hpp"

namespace bloommap {

double lb_theorem1(double eps_plus, double entropy) {
  if (!(eps_plus > 0.0 && eps_plus <= 1.0)) throw InvalidEpsilon("eps_plus must lie in (0,1]");
  return std::log2(1.0 / eps_plus) + entropy;
}

double lb_theorem2(double eps_plus, double eps_star, double eps_minus, double entropy) {
  if (!(eps_plus > 0.0 && eps_plus <= 1.0)) throw InvalidEpsilon("eps_plus must lie in (0,1]");
  if (!(eps_star >= 0.0 && eps_star < 1.0) || !(eps_minus >= 0.0 && eps_minus < 1.0) || eps_star + eps_minus >= 1.0)
    throw InvalidEpsilon("need eps_star, eps_minus in [0,1) with eps_star + eps_minus < 1");
  const std::array<double, 3> q{eps_minus, eps_star, 1.0 - eps_minus - eps_star};
  return (1.0 - eps_minus) * std::log2(1.0 / eps_plus) + (1.0 - eps_minus - eps_star) * entropy - entropy_bits(q);
}

bool lb_outside_assumed_range(double eps_plus, double eps_star, double eps_minus) {
  return std::max({eps_plus, eps_star, eps_minus}) >= 0.125;
}

double lb_corollary3(double epsilon, double entropy) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidEpsilon("epsilon must lie in (0,1)");
  return (1.0 - epsilon) * (std::log2(1.0 / epsilon) + entropy - (epsilon + epsilon * epsilon));
}

double simple_bpk(double epsilon, double entropy) { return std::numbers::log2e * (std::log2(1.0 / epsilon) + entropy); }

double standard_bpk(double epsilon, double entropy, std::size_t b) {
  const double extra = b > 1 ? std::log2(harmonic_number(b) - 1.0) + 1.0 : 0.0;
  return std::numbers::log2e * (std::log2(1.0 / epsilon) + entropy + extra);
}

double fast_bpk(double epsilon, double entropy) {
  return std::numbers::log2e * (std::log2(1.0 / epsilon) + 2.0 * entropy + 2.0);
}

BoundReport space_report(const BloomMap& map) {
  BoundReport r;
  r.epsilon = map.epsilon();
  r.entropy = map.distribution().entropy();
  r.theorem1_bpk = lb_theorem1(r.epsilon, r.entropy);
  r.theorem2_bpk = lb_theorem2(r.epsilon, r.epsilon, 0.0, r.entropy);
  r.corollary3_bpk = lb_corollary3(r.epsilon, r.entropy);
  r.achieved_bpk = map.n() == 0 ? 0.0 : static_cast<double>(map.m()) / static_cast<double>(map.n());
  r.ratio = r.achieved_bpk / r.corollary3_bpk;
  r.simple_bpk = simple_bpk(r.epsilon, r.entropy);
  r.standard_bpk = standard_bpk(r.epsilon, r.entropy, map.distribution().size());
  r.fast_bpk = fast_bpk(r.epsilon, r.entropy);
  return r;
}

std::string format_bound_table(const BoundReport& r) {
  std::string out;
  out += fmt::format("{:<28}{:>12}\n", "quantity", "bits/key");
  out += fmt::format("{:<28}{:>12.4f}\n", "lower bound (eps,0,0)", r.theorem1_bpk);
  out += fmt::format("{:<28}{:>12.4f}\n", "lower bound (eps,eps,0)", r.theorem2_bpk);
  out += fmt::format("{:<28}{:>12.4f}\n", "relaxed bound (eps,eps,0)", r.corollary3_bpk);
  out += fmt::format("{:<28}{:>12.4f}\n", "simple map (analytic)", r.simple_bpk);
  out += fmt::format("{:<28}{:>12.4f}\n", "standard map (analytic)", r.standard_bpk);
  out += fmt::format("{:<28}{:>12.4f}\n", "fast map (analytic)", r.fast_bpk);
  out += fmt::format("{:<28}{:>12.4f}\n", "achieved m/n", r.achieved_bpk);
  out += fmt::format("{:<28}{:>12.4f}\n", "achieved / relaxed bound", r.ratio);
  if (r.asymptotic) out += "(asymptotic bounds, o(1) omitted)\n";
  return out;
}

std::string format_bound_kv(const BoundReport& r) {
  std::string out;
  out += fmt::format("epsilon={}\n", r.epsilon);
  out += fmt::format("entropy={}\n", r.entropy);
  out += fmt::format("theorem1_bpk={}\n", r.theorem1_bpk);
  out += fmt::format("theorem2_bpk={}\n", r.theorem2_bpk);
  out += fmt::format("corollary3_bpk={}\n", r.corollary3_bpk);
  out += fmt::format("simple_bpk={}\n", r.simple_bpk);
  out += fmt::format("standard_bpk={}\n", r.standard_bpk);
  out += fmt::format("fast_bpk={}\n", r.fast_bpk);
  out += fmt::format("achieved_bpk={}\n", r.achieved_bpk);
  out += fmt::format("ratio={}\n", r.ratio);
  out += fmt::format("asymptotic={}\n", r.asymptotic ? 1 : 0);
  return out;
}

}  // namespace bloommap
