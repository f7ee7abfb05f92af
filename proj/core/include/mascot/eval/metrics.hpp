#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mascot/masking/types.hpp"
#include "mascot/numerics/tensor.hpp"

namespace mascot::eval {

enum class Direction { kT2V, kV2T };
std::string to_string(Direction d);

struct RetrievalReport {
  Direction direction = Direction::kT2V;
  /// R@1, R@5, R@10 in percent.
  std::array<double, 3> r_at{};
  double mdr = 0.0;
  double mnr = 0.0;
  /// R@1 + R@5 + R@10 of this direction.
  double rsum = 0.0;
  bool dsl_applied = false;

  double r1() const { return r_at[0]; }
  double r5() const { return r_at[1]; }
  double r10() const { return r_at[2]; }
};

nlohmann::json to_json(const RetrievalReport& r);

/// 1-based rank of each query's ground truth (on the diagonal); ties count
/// against the query. Throws ContractError on a non-square matrix.
std::vector<std::size_t> ranks(const Tensor& similarity);

/// Rows are queries. Throws ContractError on a non-square matrix.
RetrievalReport rank_metrics(const Tensor& similarity, Direction direction = Direction::kT2V, bool dsl_applied = false);

/// Rsum of a run: sum of the six R@K values of both directions.
double rsum(const RetrievalReport& a, const RetrievalReport& b);

inline constexpr double kDefaultDslTemperature = 0.01;

/// S'_ij = S_ij · softmax_i(S_ij / τ): every column reweighted by its prior
/// over the queries. Throws ContractError on a non-square matrix or τ <= 0.
Tensor dsl_adjust(const Tensor& similarity, double temperature = kDefaultDslTemperature);

struct AttentionSummary {
  double top = 0.0;
  double bottom = 0.0;
};

/// Mean of the largest and of the smallest ⌈0.3·n⌉ weights, averaged over items.
AttentionSummary attention_stats(std::span<const masking::AttentionWeights> weights);

}  // namespace mascot::eval
