#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qshift/errors.hpp"
#include "qshift/rng.hpp"
#include "qshift/types.hpp"

namespace qshift {

/// Stratified k-fold assignment. Within each class the indices are shuffled
/// and dealt round-robin, with the dealing cursor carried across classes so
/// the remainder rows do not pile onto the low-numbered folds. Folds
/// partition the index set exactly; per-fold class counts stay within one of
/// the proportional share.
inline std::vector<std::vector<std::size_t>> stratified_kfold(const Dataset& d, std::size_t k,
                                                              std::uint64_t seed) {
  if (k < 2) throw DomainError("k-fold needs k >= 2");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < d.size(); ++i)
    by_class[static_cast<int>(d.rows()[i].klass())].push_back(i);
  for (int c = 0; c < 2; ++c) {
    if (!by_class[c].empty() && by_class[c].size() < k)
      throw DomainError("class " + std::string(class_name(static_cast<BinaryClass>(c))) + " has " +
                        std::to_string(by_class[c].size()) + " members, fewer than k=" +
                        std::to_string(k));
  }

  Rng rng(derive_seed(seed, 0xf01d));
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t cursor = 0;
  for (int c = 0; c < 2; ++c) {
    auto& members = by_class[c];
    rng.shuffle(members);
    for (std::size_t i = 0; i < members.size(); ++i)
      folds[(cursor + i) % k].push_back(members[i]);
    cursor = (cursor + members.size()) % k;
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

/// Unstratified shuffled k-fold, used where stratification is infeasible
/// (tiny per-class counts inside stacking's internal split).
inline std::vector<std::vector<std::size_t>> plain_kfold(std::size_t n, std::size_t k,
                                                         std::uint64_t seed) {
  if (k < 2) throw DomainError("k-fold needs k >= 2");
  if (n < k) throw DomainError("k-fold needs at least k rows");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 0xf01d));
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

/// Seeded stratified train/test split; partition sizes land within one row of
/// the exact fractions and both classes survive on both sides.
inline std::pair<Dataset, Dataset> holdout_split(const Dataset& d, double test_fraction,
                                                 std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw DomainError("test fraction must be inside (0, 1)");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < d.size(); ++i)
    by_class[static_cast<int>(d.rows()[i].klass())].push_back(i);

  Rng rng(derive_seed(seed, 0x5017));
  std::vector<std::size_t> test_idx, train_idx;
  for (int c = 0; c < 2; ++c) {
    auto& members = by_class[c];
    if (members.empty()) continue;
    if (members.size() < 2)
      throw DomainError("dataset too small to keep class " +
                        std::string(class_name(static_cast<BinaryClass>(c))) +
                        " in both partitions");
    rng.shuffle(members);
    auto want = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    want = std::clamp<std::size_t>(want, 1, members.size() - 1);
    test_idx.insert(test_idx.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(want));
    train_idx.insert(train_idx.end(), members.begin() + static_cast<std::ptrdiff_t>(want),
                     members.end());
  }
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  return {d.subset(train_idx), d.subset(test_idx)};
}

}  // namespace qshift
