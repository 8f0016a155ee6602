#pragma once

// Extended-precision reference for the Tsallis-INF weights: bisection on the
// normalisation constant u = min L - x of sum_i 4 / (eta (L_i - x))^2 = 1.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace oracle {

inline std::vector<double> tsallis_weights_bisection(std::span<const double> l, double eta) {
  const long double lmin = *std::min_element(l.begin(), l.end());
  const long double e = eta;
  auto total = [&](long double u) {
    long double s = 0.0L;
    for (double li : l) {
      const long double d = e * (static_cast<long double>(li) - lmin + u);
      s += 4.0L / (d * d);
    }
    return s;
  };
  // total is decreasing in u; total(2/eta) >= 1 >= total(2 sqrt(K)/eta).
  long double lo = 2.0L / e;
  long double hi = 2.0L * std::sqrt(static_cast<long double>(l.size())) / e;
  for (int i = 0; i < 300; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (mid == lo || mid == hi) break;
    (total(mid) > 1.0L ? lo : hi) = mid;
  }
  const long double u = 0.5L * (lo + hi);
  std::vector<double> w;
  for (double li : l) {
    const long double d = e * (static_cast<long double>(li) - lmin + u);
    w.push_back(static_cast<double>(4.0L / (d * d)));
  }
  return w;
}

}  // namespace oracle
