#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tsallis {

// Suboptimality gaps Delta in [0,1]^K together with the best arm. S and
// Delta_min are recomputed from the gaps on every call.
class GapProfile {
 public:
  // Throws DomainError if a gap lies outside [0,1] or no entry is zero.
  explicit GapProfile(std::vector<double> gaps);

  // Gaps of a fixed-mean environment: mu_i - min_j mu_j.
  static GapProfile from_means(std::span<const double> means);

  std::size_t arms() const { return gaps_.size(); }
  const std::vector<double>& gaps() const { return gaps_; }
  double operator[](std::size_t i) const { return gaps_[i]; }

  // Index of the first zero entry.
  std::size_t best_arm() const { return best_arm_; }
  bool unique_best() const;

  // S = sum_{i != i*} 1/Delta_i; +inf when the best arm is not unique.
  double inverse_gap_sum() const;
  // min_{i != i*} Delta_i; 0 when the best arm is not unique.
  double delta_min() const;

 private:
  std::vector<double> gaps_;
  std::size_t best_arm_ = 0;
};

}  // namespace tsallis
