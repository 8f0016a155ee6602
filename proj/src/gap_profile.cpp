#include "tsallis/gap_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tsallis/error.hpp"

namespace tsallis {

GapProfile::GapProfile(std::vector<double> gaps) : gaps_(std::move(gaps)) {
  if (gaps_.empty()) throw DomainError("gap profile needs at least one arm");
  bool found = false;
  for (std::size_t i = 0; i < gaps_.size(); ++i) {
    const double g = gaps_[i];
    if (!(g >= 0.0 && g <= 1.0)) {
      throw DomainError("gap " + std::to_string(i) + " outside [0,1]");
    }
    if (g == 0.0 && !found) {
      best_arm_ = i;
      found = true;
    }
  }
  if (!found) throw DomainError("gap profile has no zero entry");
}

GapProfile GapProfile::from_means(std::span<const double> means) {
  if (means.empty()) throw DomainError("no arms");
  const double best = *std::min_element(means.begin(), means.end());
  std::vector<double> gaps(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) gaps[i] = means[i] - best;
  return GapProfile(std::move(gaps));
}

bool GapProfile::unique_best() const {
  return std::count(gaps_.begin(), gaps_.end(), 0.0) == 1;
}

double GapProfile::inverse_gap_sum() const {
  if (!unique_best()) return std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (std::size_t i = 0; i < gaps_.size(); ++i) {
    if (i != best_arm_) s += 1.0 / gaps_[i];
  }
  return s;
}

double GapProfile::delta_min() const {
  if (!unique_best()) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gaps_.size(); ++i) {
    if (i != best_arm_) m = std::min(m, gaps_[i]);
  }
  return m;
}

}  // namespace tsallis
