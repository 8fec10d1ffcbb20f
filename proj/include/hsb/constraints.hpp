#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hsb/group_algebra.hpp"

namespace hsb {

/** @brief Discrete branching constraints read off a plateau matrix. */
struct NumericalConstraints {
  /** Partition of N-irrep indices; the class holding irrep 0 comes first. */
  std::vector<std::vector<int>> classes;
  /** Symmetric irrep-level positivity pattern without self loops. */
  std::vector<std::vector<bool>> positive;
  std::vector<bool> multiplicity_free;
  std::vector<bool> higher_multiplicity;
  /** Observed K/R ratio per class (mean over members). */
  std::vector<double> ratio;
  std::vector<int> d_lambda;
  RepTheory n_ring;
  std::vector<int> n_dual;
  /** Order of N when it is declared to be the full unitary subgroup; enables the corep branch. */
  std::optional<long long> unitary_order;
  std::vector<std::string> labels;

  int n_irreps() const { return static_cast<int>(d_lambda.size()); }

  std::vector<int> class_of() const {
    std::vector<int> c(n_irreps(), -1);
    for (int i = 0; i < static_cast<int>(classes.size()); ++i)
      for (int l : classes[i]) c[l] = i;
    return c;
  }
};

/** @brief Per-class multiplicity cap: 1 if multiplicity-free, else min(b_max, ceil(ratio)+1) when flagged. */
inline std::vector<int> class_bmax(const NumericalConstraints& nc, int b_max) {
  std::vector<int> out(nc.classes.size(), b_max);
  for (size_t c = 0; c < nc.classes.size(); ++c) {
    if (nc.multiplicity_free[c]) {
      out[c] = 1;
    } else if (nc.higher_multiplicity[c]) {
      const int cap = static_cast<int>(std::ceil(nc.ratio[c] - 1e-12)) + 1;
      out[c] = std::max(1, std::min(b_max, cap));
    }
  }
  return out;
}

}  // namespace hsb
