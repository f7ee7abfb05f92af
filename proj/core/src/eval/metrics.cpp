#include "mascot/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mascot/numerics/errors.hpp"

namespace mascot::eval {

std::string to_string(Direction d) { return d == Direction::kT2V ? "t2v" : "v2t"; }

nlohmann::json to_json(const RetrievalReport& r) {
  return {{"direction", to_string(r.direction)},
          {"r_at", {{"1", r.r_at[0]}, {"5", r.r_at[1]}, {"10", r.r_at[2]}}},
          {"mdr", r.mdr},
          {"mnr", r.mnr},
          {"rsum", r.rsum},
          {"dsl_applied", r.dsl_applied}};
}

namespace {

std::size_t require_square(const Tensor& s, const char* who) {
  if (s.rank() != 2 || s.dim(0) != s.dim(1))
    throw ContractError(std::string(who) + ": similarity must be square, got " + mascot::to_string(s.shape()));
  return s.dim(0);
}

}  // namespace

std::vector<std::size_t> ranks(const Tensor& s) {
  const std::size_t B = require_square(s, "ranks");
  std::vector<std::size_t> out(B, 1);
  for (std::size_t i = 0; i < B; ++i)
    for (std::size_t j = 0; j < B; ++j)
      if (j != i && s.at(i, j) >= s.at(i, i)) ++out[i];
  return out;
}

RetrievalReport rank_metrics(const Tensor& s, Direction direction, bool dsl_applied) {
  std::vector<std::size_t> r = ranks(s);
  const double B = static_cast<double>(r.size());
  RetrievalReport rep;
  rep.direction = direction;
  rep.dsl_applied = dsl_applied;
  constexpr std::array<std::size_t, 3> ks{1, 5, 10};
  for (std::size_t k = 0; k < ks.size(); ++k)
    rep.r_at[k] = 100.0 * static_cast<double>(std::count_if(r.begin(), r.end(), [&](std::size_t x) { return x <= ks[k]; })) / B;
  double total = 0.0;
  for (std::size_t x : r) total += static_cast<double>(x);
  rep.mnr = total / B;
  std::sort(r.begin(), r.end());
  const std::size_t mid = r.size() / 2;
  rep.mdr = r.size() % 2 ? static_cast<double>(r[mid]) : 0.5 * static_cast<double>(r[mid - 1] + r[mid]);
  rep.rsum = rep.r_at[0] + rep.r_at[1] + rep.r_at[2];
  return rep;
}

double rsum(const RetrievalReport& a, const RetrievalReport& b) {
  return a.r_at[0] + a.r_at[1] + a.r_at[2] + b.r_at[0] + b.r_at[1] + b.r_at[2];
}

Tensor dsl_adjust(const Tensor& s, double temperature) {
  const std::size_t B = require_square(s, "dsl_adjust");
  if (!(temperature > 0.0)) throw ContractError("dsl_adjust: temperature must be positive");
  std::vector<double> out(B * B);
  for (std::size_t j = 0; j < B; ++j) {
    double mx = -INFINITY;
    for (std::size_t i = 0; i < B; ++i) mx = std::max(mx, s.at(i, j) / temperature);
    double z = 0.0;
    for (std::size_t i = 0; i < B; ++i) z += std::exp(s.at(i, j) / temperature - mx);
    for (std::size_t i = 0; i < B; ++i) out[i * B + j] = s.at(i, j) * std::exp(s.at(i, j) / temperature - mx) / z;
  }
  return Tensor::matrix(B, B, std::move(out));
}

AttentionSummary attention_stats(std::span<const masking::AttentionWeights> weights) {
  if (weights.empty()) throw InputError("attention_stats: no weights");
  AttentionSummary sum;
  for (const auto& aw : weights) {
    std::vector<double> w = aw.w;
    if (w.empty()) throw InputError("attention_stats: empty weight vector");
    const auto k = static_cast<std::size_t>(std::ceil(0.3 * static_cast<double>(w.size()) - 1e-9));
    std::sort(w.begin(), w.end());
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      lo += w[i];
      hi += w[w.size() - 1 - i];
    }
    sum.top += hi / static_cast<double>(k);
    sum.bottom += lo / static_cast<double>(k);
  }
  sum.top /= static_cast<double>(weights.size());
  sum.bottom /= static_cast<double>(weights.size());
  return sum;
}

}  // namespace mascot::eval
