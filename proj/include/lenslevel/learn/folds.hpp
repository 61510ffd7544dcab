#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lenslevel::learn {

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;                      // row -> fold
  std::vector<std::array<std::size_t, 2>> class_counts;     // fold -> {negatives, positives}

  std::vector<std::size_t> test_rows(std::size_t fold) const;
  std::vector<std::size_t> train_rows(std::size_t fold) const;

  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

// Each class is shuffled with the seed and dealt round-robin; the positive class
// continues from the fold where the negatives stopped so fold sizes stay balanced.
// Throws if k < 2 or a class has fewer than k members.
FoldPlan stratified_kfold(std::span<const int> y, std::size_t k, std::uint64_t seed);

}  // namespace lenslevel::learn
