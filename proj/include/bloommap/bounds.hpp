#pragma once

#include <string>

#include "bloommap/bloom_map.hpp"

namespace bloommap {

// Space lower bounds in bits per key. All drop the o(1) term.

// log2(1/eps_plus) + H
double lb_theorem1(double eps_plus, double entropy);

// (1 - e-) log2(1/e+) + (1 - e- - e*) H - H(e-, e*, 1 - e- - e*).
// Throws InvalidEpsilon outside e+ in (0,1], e*, e- in [0,1), e* + e- < 1.
double lb_theorem2(double eps_plus, double eps_star, double eps_minus, double entropy);

// True when max(e+, e*, e-) >= 1/8, outside the range the bounds are
// derived for.
bool lb_outside_assumed_range(double eps_plus, double eps_star, double eps_minus);

// (1 - eps)(log2(1/eps) + H - (eps + eps^2))
double lb_corollary3(double epsilon, double entropy);

// Analytic bits per key of each construction.
double simple_bpk(double epsilon, double entropy);
double standard_bpk(double epsilon, double entropy, std::size_t b);
double fast_bpk(double epsilon, double entropy);

struct BoundReport {
  double epsilon = 0.0;
  double entropy = 0.0;
  double theorem1_bpk = 0.0;
  double theorem2_bpk = 0.0;  // at (eps, eps, 0)
  double corollary3_bpk = 0.0;
  double achieved_bpk = 0.0;  // m / n
  double ratio = 0.0;         // achieved / corollary3
  double simple_bpk = 0.0;
  double standard_bpk = 0.0;
  double fast_bpk = 0.0;
  bool asymptotic = true;  // o(1) terms omitted
};

BoundReport space_report(const BloomMap& map);

std::string format_bound_table(const BoundReport& r);
std::string format_bound_kv(const BoundReport& r);

}  // namespace bloommap
