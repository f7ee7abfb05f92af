#include "mascot/objectives/losses.hpp"

#include <array>
#include <cmath>
#include <string>

#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/ops.hpp"

namespace mascot::objectives {

void LossWeights::validate() const {
  if (!(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0)) throw ConfigError("loss weights must be non-negative");
}

Tensor wti_pool(const Tensor& sim, const Tensor& w1, const Tensor& w2, std::size_t n1, std::size_t n2) {
  if (sim.rank() != 2) throw DimensionError("wti_pool: similarity must be a matrix");
  const std::size_t rows = sim.dim(0), cols = sim.dim(1);
  if (n1 == 0 || n2 == 0 || rows % n1 != 0 || cols % n2 != 0)
    throw InputError("wti_pool: token counts must be positive and divide the similarity extents");
  if (w1.numel() != rows || w2.numel() != cols) throw DimensionError("wti_pool: weight lengths must match sim");
  const std::size_t B1 = rows / n1, B2 = cols / n2;
  const auto s = sim.data();

  // argmax per (row token, item b) and per (col token, item a).
  std::vector<std::size_t> row_arg(rows * B2), col_arg(cols * B1);
  std::vector<double> out(B1 * B2, 0.0);
  for (std::size_t a = 0; a < B1; ++a)
    for (std::size_t b = 0; b < B2; ++b) {
      double row_term = 0.0, col_term = 0.0;
      for (std::size_t i = 0; i < n1; ++i) {
        const std::size_t r = a * n1 + i;
        std::size_t best = b * n2;
        for (std::size_t j = 1; j < n2; ++j)
          if (s[r * cols + b * n2 + j] > s[r * cols + best]) best = b * n2 + j;
        row_arg[r * B2 + b] = best;
        row_term += w1[r] * s[r * cols + best];
      }
      for (std::size_t j = 0; j < n2; ++j) {
        const std::size_t c = b * n2 + j;
        std::size_t best = a * n1;
        for (std::size_t i = 1; i < n1; ++i)
          if (s[(a * n1 + i) * cols + c] > s[best * cols + c]) best = a * n1 + i;
        col_arg[c * B1 + a] = best;
        col_term += w2[c] * s[best * cols + c];
      }
      out[a * B2 + b] = 0.5 * (row_term + col_term);
    }

  {
    auto backward = [sim, w1, w2, n1, n2, B1, B2, cols, row_arg = std::move(row_arg),
                     col_arg = std::move(col_arg)](std::span<const double> g, GradSink& sink) {
      auto dsim = sink[0];
      auto dw1 = sink[1];
      auto dw2 = sink[2];
      const auto s = sim.data();
      for (std::size_t a = 0; a < B1; ++a)
        for (std::size_t b = 0; b < B2; ++b) {
          const double gh = 0.5 * g[a * B2 + b];
          if (gh == 0.0) continue;
          for (std::size_t i = 0; i < n1; ++i) {
            const std::size_t r = a * n1 + i, best = row_arg[r * B2 + b];
            if (!dsim.empty()) dsim[r * cols + best] += gh * w1[r];
            if (!dw1.empty()) dw1[r] += gh * s[r * cols + best];
          }
          for (std::size_t j = 0; j < n2; ++j) {
            const std::size_t c = b * n2 + j, best = col_arg[c * B1 + a];
            if (!dsim.empty()) dsim[best * cols + c] += gh * w2[c];
            if (!dw2.empty()) dw2[c] += gh * s[best * cols + c];
          }
        }
    };
    Tensor result = Tensor::unchecked({B1, B2}, std::move(out));
    Tape* tape = sim.tape() ? sim.tape() : (w1.tape() ? w1.tape() : w2.tape());
    if (!tape) return result;
    for (const Tensor* t : {&sim, &w1, &w2})
      if (t->tape() && t->tape() != tape) throw ContractError("wti_pool: inputs on different tapes");
    auto id = [](const Tensor& t) { return t.requires_grad() ? t.node() : kNoNode; };
    return tape->record(std::move(result), {id(sim), id(w1), id(w2)}, std::move(backward));
  }
}

Tensor token_weights(Tape* tape, const Tensor& tokens, std::size_t tokens_per_item, const Parameter& w,
                     const Parameter& b) {
  if (tokens_per_item == 0 || tokens.rows() % tokens_per_item != 0)
    throw InputError("token_weights: rows must split into items of equal length");
  const std::size_t items = tokens.rows() / tokens_per_item;
  const Tensor logits = linear(tokens, bind(tape, w), bind(tape, b));
  return softmax_lastdim(logits.reshape({items, tokens_per_item})).reshape({items * tokens_per_item});
}

Tensor wti_similarity(Tape* tape, const Tensor& e1, std::size_t n1, const Parameter& gate1_w,
                      const Parameter& gate1_b, const Tensor& e2, std::size_t n2, const Parameter& gate2_w,
                      const Parameter& gate2_b) {
  if (n1 == 0 || n2 == 0 || e1.rows() == 0 || e2.rows() == 0) throw InputError("wti: empty token sequence");
  const Tensor w1 = token_weights(tape, e1, n1, gate1_w, gate1_b);
  const Tensor w2 = token_weights(tape, e2, n2, gate2_w, gate2_b);
  const Tensor sim = matmul_nt(normalize_rows(e1), normalize_rows(e2));
  return wti_pool(sim, w1, w2, n1, n2);
}

Tensor temperature(Tape* tape, const Parameter& log_tau) {
  return clamp(exp(bind(tape, log_tau)), encoders::kMinTemperature, encoders::kMaxTemperature);
}

namespace {

/// −mean_i log softmax_j(logits_ij) at j = i.
Tensor diagonal_nll(const Tensor& logits) {
  const std::size_t B = logits.dim(0);
  std::vector<std::size_t> diag(B);
  for (std::size_t i = 0; i < B; ++i) diag[i] = i * B + i;
  return scale(mean(gather_elements(log_softmax_lastdim(logits), diag)), -1.0);
}

}  // namespace

Tensor contrastive_loss(const Tensor& similarity, const Tensor& tau) {
  if (similarity.rank() != 2 || similarity.dim(0) != similarity.dim(1))
    throw DimensionError("contrastive_loss: similarity must be square, got " + to_string(similarity.shape()));
  const Tensor logits = div_scalar(similarity, tau);
  const std::array<Tensor, 2> dirs{diagonal_nll(logits), diagonal_nll(transpose(logits))};
  const std::array<double, 2> half{0.5, 0.5};
  return weighted_sum(dirs, half);
}

Tensor adversarial_loss(const Tensor& d_masked, const Tensor& d_unmasked) {
  for (const Tensor* d : {&d_masked, &d_unmasked})
    if (d->last_dim() != 2) throw DimensionError("adversarial_loss: expected [B, 2] class probabilities");
  auto column = [](const Tensor& d, std::size_t cls) {
    std::vector<std::size_t> idx(d.rows());
    for (std::size_t r = 0; r < idx.size(); ++r) idx[r] = r * 2 + cls;
    return mean(log_clamped(gather_elements(d, idx), 1e-12));
  };
  const std::array<Tensor, 2> terms{column(d_masked, encoders::kMaskedClass),
                                    column(d_unmasked, encoders::kUnmaskedClass)};
  const std::array<double, 2> w{-0.5, -0.5};
  return weighted_sum(terms, w);
}

Tensor total_loss(const LossParts& parts, const LossWeights& weights) {
  weights.validate();
  const std::array<Tensor, 6> terms{parts.vtc, parts.vtc_h, parts.vvc_h, parts.vtc_l, parts.vvc_l, parts.adv};
  const std::array<double, 6> w{1.0, weights.alpha, weights.alpha, weights.beta, weights.beta, weights.gamma};
  return weighted_sum(terms, w);
}

}  // namespace mascot::objectives
