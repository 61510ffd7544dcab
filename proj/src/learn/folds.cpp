#include "lenslevel/learn/folds.hpp"

#include "lenslevel/common.hpp"
#include "lenslevel/learn/random.hpp"

namespace lenslevel::learn {

namespace {
constexpr std::uint64_t kFoldStream = 0xF01D;
}

std::vector<std::size_t> FoldPlan::test_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == fold) rows.push_back(i);
  return rows;
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] != fold) rows.push_back(i);
  return rows;
}

FoldPlan stratified_kfold(std::span<const int> y, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k-fold needs k >= 2 (got " + std::to_string(k) + ")");
  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < y.size(); ++i) members[y[i] != 0 ? 1 : 0].push_back(i);
  for (int c = 0; c < 2; ++c)
    if (members[c].size() < k)
      throw ValidationError("stratified " + std::to_string(k) + "-fold: class " + std::to_string(c) + " has only " +
                            std::to_string(members[c].size()) + " member(s)");

  FoldPlan plan;
  plan.k = k;
  plan.assignment.assign(y.size(), 0);
  plan.class_counts.assign(k, {0, 0});
  std::size_t next = 0;
  for (int c = 0; c < 2; ++c) {
    Rng rng(derive_seed(seed, kFoldStream, static_cast<std::uint64_t>(c)));
    rng.shuffle(std::span<std::size_t>(members[c]));
    for (auto row : members[c]) {
      plan.assignment[row] = next;
      ++plan.class_counts[next][c];
      next = (next + 1) % k;
    }
  }
  return plan;
}

}  // namespace lenslevel::learn
