#pragma once

#include <stdexcept>
#include <vector>

namespace bimod {

// Sign of the signed transposition rearranging (v_1|...|v_n) into
// (v_{perm[0]+1}|...|v_{perm[n-1]+1}): each inverted pair contributes the
// product of the degrees of the two elements moved past each other.
inline int shuffle_sign(const std::vector<int>& perm, const std::vector<int>& degrees) {
  if (perm.size() != degrees.size()) throw std::domain_error("length mismatch");
  long s = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = i + 1; j < perm.size(); ++j) {
      if (perm[i] > perm[j]) s += static_cast<long>(degrees[static_cast<std::size_t>(perm[i])]) *
                                  degrees[static_cast<std::size_t>(perm[j])];
    }
  }
  return (s % 2 == 0) ? +1 : -1;
}

inline int parity_sign(long k) { return ((k % 2) + 2) % 2 == 0 ? +1 : -1; }

}  // namespace bimod
