#pragma once

#include <cstddef>

#include "mascot/encoders/encoders.hpp"
#include "mascot/numerics/tape.hpp"
#include "mascot/numerics/tensor.hpp"

namespace mascot::objectives {

/// Weights of the H-branch, L-branch and adversarial terms.
struct LossWeights {
  double alpha = 0.5;
  double beta = 0.5;
  double gamma = 0.2;

  void validate() const;
};

/// Weighted-token-interaction pooling of a token similarity matrix.
///
/// sim [B1*N1, B2*N2] holds cosine similarities between every token of every
/// item; w1 [B1*N1] and w2 [B2*N2] are per-item softmax token weights. For each
/// item pair (a, b) the result is
///   ½ (Σᵢ w1[a,i] maxⱼ sim(aᵢ, bⱼ) + Σⱼ w2[b,j] maxᵢ sim(aᵢ, bⱼ)).
/// Ties in the max go to the lowest index.
Tensor wti_pool(const Tensor& sim, const Tensor& w1, const Tensor& w2, std::size_t n1, std::size_t n2);

/// Linear gate per token followed by a softmax within each item: [B*N, d] -> [B*N].
Tensor token_weights(Tape* tape, const Tensor& tokens, std::size_t tokens_per_item, const Parameter& w,
                     const Parameter& b);

/// Pairwise WTI similarity [B1, B2] between two batches of token sequences.
/// Tokens are L2-normalised internally. Throws InputError on empty input.
Tensor wti_similarity(Tape* tape, const Tensor& e1, std::size_t n1, const Parameter& gate1_w,
                      const Parameter& gate1_b, const Tensor& e2, std::size_t n2, const Parameter& gate2_w,
                      const Parameter& gate2_b);

/// τ = clamp(exp(log τ), kMinTemperature, kMaxTemperature).
Tensor temperature(Tape* tape, const Parameter& log_tau);

/// ½ (L_{1→2} + L_{2→1}) with L_{1→2} = −mean_i log softmax_j(S_ij / τ) at j = i,
/// L_{2→1} the same over Sᵀ.
Tensor contrastive_loss(const Tensor& similarity, const Tensor& tau);

/// −½ (mean log d_masked[:, masked] + mean log d_unmasked[:, unmasked]),
/// probabilities clamped at 1e-12 before the log.
Tensor adversarial_loss(const Tensor& d_masked, const Tensor& d_unmasked);

/// The six objective components of one batch.
struct LossParts {
  Tensor vtc;
  Tensor vtc_h;
  Tensor vvc_h;
  Tensor vtc_l;
  Tensor vvc_l;
  Tensor adv;
};

/// L_vtc + α(L_vtc^H + L_vvc^H) + β(L_vtc^L + L_vvc^L) + γ L_adv.
Tensor total_loss(const LossParts& parts, const LossWeights& weights);

}  // namespace mascot::objectives
