// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   acceptance [--out DIR] [--only N[,N...]]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "mascot/colearning/config.hpp"
#include "mascot/colearning/model_gradcheck.hpp"
#include "mascot/colearning/pipeline.hpp"
#include "mascot/data/dataset.hpp"
#include "mascot/encoders/encoders.hpp"
#include "mascot/eval/metrics.hpp"
#include "mascot/eval/run.hpp"
#include "mascot/masking/masks.hpp"
#include "mascot/numerics/rng.hpp"

using namespace mascot;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double cpu_seconds() { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

data::Dataset dataset_for(const encoders::EncoderConfig& m, std::size_t count, std::uint64_t seed) {
  return data::gen_dataset(count, seed, {m.n_frames, m.image_height, m.image_width});
}

double max_row_diff(const Tensor& a, const Tensor& b, const std::vector<std::size_t>& rows) {
  const std::size_t d = a.dim(1);
  double m = 0;
  for (std::size_t r : rows)
    for (std::size_t c = 0; c < d; ++c) m = std::max(m, std::abs(a[r * d + c] - b[r * d + c]));
  return m;
}

// ---------------------------------------------------------------------------

Verdict c1_gradients() {
  const double t0 = cpu_seconds();
  const auto toy = colearning::model_gradient_check(encoders::EncoderConfig{}, colearning::TrainConfig{});
  const double secs = cpu_seconds() - t0;

  encoders::EncoderConfig tiny;
  tiny.image_height = tiny.image_width = 8;
  tiny.patch_size = 4;
  tiny.d_model = 8;
  tiny.n_heads = tiny.text_heads = tiny.temporal_heads = 2;
  tiny.n_layers = tiny.text_layers = tiny.temporal_layers = 1;
  tiny.mlp_ratio = 2;
  tiny.n_frames = 3;
  tiny.discriminator_hidden = 4;
  colearning::ModelGradCheckOptions all;
  all.coords_per_tensor = 0;
  const auto full = colearning::model_gradient_check(tiny, colearning::TrainConfig{}, all);

  const double worst = std::max(toy.max_rel_error, full.max_rel_error);
  Verdict v;
  v.pass = worst <= 1e-4 && secs <= 60.0;
  v.detail = "toy: " + std::to_string(toy.parameters) + " parameters, " + std::to_string(toy.probes) +
             " probes, max rel err " + fmt("%.2e", toy.max_rel_error) + ", directional " +
             fmt("%.2e", toy.directional_rel_error) + ", " + fmt("%.1f", secs) + " s cpu; every coordinate of a tiny model (" +
             std::to_string(full.probes) + " probes): " + fmt("%.2e", full.max_rel_error);
  return v;
}

Verdict c2_grl_sign() {
  colearning::RunConfig cfg;
  const auto ds = dataset_for(cfg.model, 2, 11);
  const auto batch = data::make_batch(ds, {0, 1});
  const auto model = encoders::ModelParams::init(cfg.model, 12);
  auto adv_grads = [&](bool use_grl) {
    Tape tape;
    const auto u = colearning::encode_unmasked(&tape, model, batch);
    const auto plan = colearning::plan_masks(u.attention_last, batch, cfg.train, cfg.model, 13);
    colearning::LossOptions opt;
    opt.use_grl = use_grl;
    const auto parts = colearning::compute_losses(&tape, model, batch, u, plan, cfg.train, opt);
    const Gradients g = tape.backward(parts.adv);
    std::vector<std::vector<double>> out;
    for (const Parameter* p : model.parameters()) out.push_back(g.of(*p));
    return out;
  };
  const auto with = adv_grads(true), without = adv_grads(false);
  std::unordered_set<const Parameter*> disc;
  for (const Parameter* p : model.discriminator->parameters()) disc.insert(p);
  const auto params = model.parameters();
  double enc_err = 0, disc_err = 0, enc_norm = 0;
  for (std::size_t k = 0; k < params.size(); ++k)
    for (std::size_t i = 0; i < with[k].size(); ++i) {
      if (disc.count(params[k])) {
        disc_err = std::max(disc_err, std::abs(with[k][i] - without[k][i]));
      } else {
        enc_err = std::max(enc_err, std::abs(with[k][i] + cfg.train.grl_lambda * without[k][i]));
        enc_norm += std::abs(without[k][i]);
      }
    }
  Verdict v;
  v.pass = enc_err <= 1e-10 && disc_err == 0.0 && enc_norm > 0.0;
  v.detail = "encoder |g_grl + g_plain| max " + fmt("%.2e", enc_err) + ", discriminator |diff| max " +
             fmt("%.2e", disc_err) + ", encoder L1 " + fmt("%.3e", enc_norm);
  return v;
}

Verdict c3_isolation() {
  Rng rng(303);
  double worst_spatial = 0, worst_temporal = 0;
  std::size_t spatial_checked = 0, temporal_checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    encoders::EncoderConfig cfg;
    cfg.patch_size = 4;
    const std::size_t grid = 2 + rng.below(3);  // n ∈ {4, 9, 16}
    cfg.image_height = cfg.image_width = grid * cfg.patch_size;
    cfg.d_model = 8 * (1 + rng.below(2));
    cfg.n_heads = 1 + rng.below(2);
    cfg.n_layers = 1 + rng.below(3);
    cfg.n_frames = 2 + rng.below(5);
    cfg.mlp_ratio = 2;
    const std::size_t n = cfg.patches_per_frame(), T = n + 1, M = cfg.n_frames, d = cfg.d_model;
    const auto model = encoders::ModelParams::init(cfg, 1000 + static_cast<std::uint64_t>(trial));

    // Spatial: random tube mask, noise only in masked patches.
    const double ratio = 0.1 + 0.8 * rng.uniform();
    const auto tube = masking::random_tube_mask(n, M, ratio, rng);
    std::vector<double> px(M * cfg.image_height * cfg.image_width * 3);
    for (double& x : px) x = rng.uniform();
    const Tensor clip({M, cfg.image_height, cfg.image_width, 3}, px);
    const Tensor noisy = masking::apply_pixel_mask(clip, tube, cfg.patch_size, rng);
    std::vector<double> gates;
    std::vector<std::size_t> keep;
    for (std::size_t f = 0; f < M; ++f) {
      const std::vector<std::size_t> none;
      const auto flags = masking::patch_flags(tube.covers_frame(f) ? std::span<const std::size_t>(tube.patch_indices)
                                                                    : std::span<const std::size_t>(none),
                                              n);
      const auto u = masking::spatial_interaction_mask(flags);
      gates.insert(gates.end(), u.u.begin(), u.u.end());
      for (std::size_t t = 0; t < T; ++t)
        if (flags[t] == masking::TokenFlag::kUnmasked) keep.push_back(f * T + t);
    }
    const auto a = encoders::spatial_encode(nullptr, *model.spatial, clip, gates, cfg);
    const auto b = encoders::spatial_encode(nullptr, *model.spatial, noisy, gates, cfg);
    for (std::size_t l = 0; l < a.hidden.size(); ++l) worst_spatial = std::max(worst_spatial, max_row_diff(a.hidden[l], b.hidden[l], keep));
    std::vector<std::size_t> all_frames(M);
    std::iota(all_frames.begin(), all_frames.end(), 0);
    worst_spatial = std::max(worst_spatial, max_row_diff(a.frame_embeddings, b.frame_embeddings, all_frames));
    spatial_checked += keep.size();

    // Temporal: random masked frame set, perturb one masked frame token.
    std::vector<masking::TokenFlag> flags(M, masking::TokenFlag::kUnmasked);
    std::vector<std::size_t> masked;
    for (std::size_t f = 0; f < M; ++f)
      if (rng.uniform() < 0.5) {
        flags[f] = masking::TokenFlag::kMasked;
        masked.push_back(f);
      }
    if (masked.empty() || masked.size() == M) {
      const std::size_t f = rng.below(M);
      std::fill(flags.begin(), flags.end(), masking::TokenFlag::kUnmasked);
      flags[f] = masking::TokenFlag::kMasked;
      masked = {f};
    }
    const auto u = masking::temporal_interaction_mask(flags);
    std::vector<double> x(M * d);
    for (double& v : x) v = rng.normal();
    std::vector<double> y = x;
    const std::size_t hit = masked[rng.below(masked.size())];
    for (std::size_t c = 0; c < d; ++c) y[hit * d + c] += rng.normal();
    const Tensor ra = encoders::reconstruct(nullptr, *model.reconstructor, Tensor({M, d}, x), M, u.u, cfg);
    const Tensor rb = encoders::reconstruct(nullptr, *model.reconstructor, Tensor({M, d}, y), M, u.u, cfg);
    std::vector<std::size_t> unmasked;
    for (std::size_t f = 0; f < M; ++f)
      if (flags[f] == masking::TokenFlag::kUnmasked) unmasked.push_back(f);
    worst_temporal = std::max(worst_temporal, max_row_diff(ra, rb, unmasked));
    temporal_checked += unmasked.size();
  }
  Verdict v;
  v.pass = worst_spatial <= 1e-9 && worst_temporal <= 1e-9;
  v.detail = "50 configs; spatial max |Δ| " + fmt("%.2e", worst_spatial) + " over " + std::to_string(spatial_checked) +
             " unmasked tokens, temporal max |Δ| " + fmt("%.2e", worst_temporal) + " over " +
             std::to_string(temporal_checked) + " unmasked frames";
  return v;
}

Verdict c4_combinatorics() {
  std::size_t checks = 0;
  std::vector<std::string> problems;
  auto fail = [&](const std::string& s) {
    if (problems.size() < 5) problems.push_back(s);
  };
  Rng rng(404);
  const std::size_t frames = 6;
  for (std::size_t n : {4u, 16u, 49u}) {
    const std::size_t expect_h = static_cast<std::size_t>(std::floor(0.7 * static_cast<double>(n) + 1e-9));
    const std::size_t expect_l = static_cast<std::size_t>(std::floor(0.5 * static_cast<double>(n) + 1e-9));
    // Every tube range, with distinct weights.
    for (std::size_t a_s = 0; a_s < frames; ++a_s)
      for (std::size_t a_e = a_s; a_e < frames; ++a_e) {
        masking::AttentionWeights w;
        w.a_s = a_s;
        w.a_e = a_e;
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        w.w.resize(n);
        for (std::size_t i = 0; i < n; ++i) w.w[order[i]] = static_cast<double>(i + 1) / static_cast<double>(n * n);
        const auto hi = masking::informed_mask(w, 0.7, masking::MaskKind::kHigh);
        const auto lo = masking::informed_mask(w, 0.5, masking::MaskKind::kLow);
        ++checks;
        if (hi.patch_indices.size() != expect_h) fail("n=" + std::to_string(n) + " |high| wrong");
        if (lo.patch_indices.size() != expect_l) fail("n=" + std::to_string(n) + " |low| wrong");
        for (const auto* m : {&hi, &lo}) {
          const auto fm = masking::to_frame_masks(*m, frames);
          for (std::size_t f = 0; f < frames; ++f) {
            const bool in = f >= a_s && f <= a_e;
            if (in && fm.per_frame[f] != m->patch_indices) fail("tube differs inside range");
            if (!in && !fm.per_frame[f].empty()) fail("tube leaks outside range");
          }
        }
        // Brute-force top/bottom sets from the ranking.
        std::vector<std::size_t> top(order.end() - static_cast<long>(expect_h), order.end());
        std::vector<std::size_t> bottom(order.begin(), order.begin() + static_cast<long>(expect_l));
        std::sort(top.begin(), top.end());
        std::sort(bottom.begin(), bottom.end());
        if (hi.patch_indices != top) fail("high set is not the top-k");
        if (lo.patch_indices != bottom) fail("low set is not the bottom-k");
      }
    // Disjointness for every ratio pair on the k/n grid with r_H + r_L <= 1.
    for (std::size_t kh = 0; kh <= n; ++kh)
      for (std::size_t kl = 0; kh + kl <= n; ++kl) {
        masking::AttentionWeights w;
        w.w.resize(n);
        for (double& x : w.w) x = rng.uniform();
        const double rh = static_cast<double>(kh) / static_cast<double>(n), rl = static_cast<double>(kl) / static_cast<double>(n);
        const auto hi = masking::informed_mask(w, rh, masking::MaskKind::kHigh);
        const auto lo = masking::informed_mask(w, rl, masking::MaskKind::kLow);
        ++checks;
        if (hi.patch_indices.size() != kh || lo.patch_indices.size() != kl) fail("grid size mismatch");
        std::vector<std::size_t> both;
        std::set_intersection(hi.patch_indices.begin(), hi.patch_indices.end(), lo.patch_indices.begin(),
                              lo.patch_indices.end(), std::back_inserter(both));
        if (!both.empty()) fail("high and low overlap at n=" + std::to_string(n));
      }
  }
  // n = 4: every ordering of distinct weights and every (k_H, k_L) split.
  std::vector<std::size_t> perm{0, 1, 2, 3};
  do {
    masking::AttentionWeights w;
    w.w.resize(4);
    for (std::size_t i = 0; i < 4; ++i) w.w[perm[i]] = 0.1 * static_cast<double>(i + 1);
    for (std::size_t kh = 0; kh <= 4; ++kh)
      for (std::size_t kl = 0; kh + kl <= 4; ++kl) {
        const auto hi = masking::informed_mask(w, kh / 4.0, masking::MaskKind::kHigh);
        const auto lo = masking::informed_mask(w, kl / 4.0, masking::MaskKind::kLow);
        ++checks;
        for (std::size_t i : hi.patch_indices)
          if (std::find(lo.patch_indices.begin(), lo.patch_indices.end(), i) != lo.patch_indices.end())
            fail("overlap in n=4 enumeration");
      }
  } while (std::next_permutation(perm.begin(), perm.end()));

  Verdict v;
  v.pass = problems.empty();
  v.detail = std::to_string(checks) + " mask pairs checked for n in {4,16,49}";
  for (const auto& p : problems) v.detail += "; " + p;
  return v;
}

// Independent metric oracles.
std::vector<std::size_t> oracle_ranks(const std::vector<double>& s, std::size_t n) {
  std::vector<std::size_t> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t beaten = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && !(s[i * n + j] < s[i * n + i])) ++beaten;
    r[i] = beaten + 1;
  }
  return r;
}

std::vector<double> oracle_dsl(const std::vector<double>& s, std::size_t n, double tau) {
  std::vector<double> out(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    double mx = -1e300;
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, s[i * n + j] / tau);
    double z = 0;
    for (std::size_t i = 0; i < n; ++i) z += std::exp(s[i * n + j] / tau - mx);
    for (std::size_t i = 0; i < n; ++i) out[i * n + j] = s[i * n + j] * std::exp(s[i * n + j] / tau - mx) / z;
  }
  return out;
}

Verdict c5_metrics() {
  Rng rng(505);
  std::size_t rank_mismatch = 0;
  double dsl_err = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    std::vector<double> s(n * n);
    for (double& x : s) x = trial % 4 == 0 ? std::round(4 * rng.uniform()) / 4 : rng.normal() * 0.3;
    const Tensor t = Tensor::matrix(n, n, s);
    if (eval::ranks(t) != oracle_ranks(s, n)) ++rank_mismatch;
    const Tensor adj = eval::dsl_adjust(t);
    const auto ref = oracle_dsl(s, n, eval::kDefaultDslTemperature);
    for (std::size_t i = 0; i < n * n; ++i) dsl_err = std::max(dsl_err, std::abs(adj[i] - ref[i]));
  }
  std::vector<double> id(64, 0.0);
  for (std::size_t i = 0; i < 8; ++i) id[i * 8 + i] = 1.0;
  const auto r = eval::rank_metrics(Tensor::matrix(8, 8, id));
  const bool identity_ok = r.r1() == 100.0 && r.mdr == 1.0 && r.mnr == 1.0;
  Verdict v;
  v.pass = rank_mismatch == 0 && dsl_err <= 1e-10 && identity_ok;
  v.detail = "100 matrices: rank mismatches " + std::to_string(rank_mismatch) + ", DSL max |Δ| " + fmt("%.2e", dsl_err) +
             "; identity R@1 " + fmt("%.0f", r.r1()) + " MdR " + fmt("%.0f", r.mdr) + " MnR " + fmt("%.0f", r.mnr);
  return v;
}

// ---------------------------------------------------------------------------

struct Trained {
  std::uint64_t seed;
  double t2v_r1, rsum, cpu;
  eval::AttentionSummary initial, final;
};

Trained train_one(colearning::RunConfig cfg, std::uint64_t seed, const fs::path& dir) {
  cfg.train.seed = seed;
  const auto ds = dataset_for(cfg.model, 64, seed);
  eval::RunOptions opt;
  opt.out_dir = dir;
  const double t0 = cpu_seconds();
  const auto res = eval::run_training(cfg, ds, opt);
  Trained t{seed, res.eval.t2v.r1(), eval::rsum(res.eval.t2v, res.eval.v2t), cpu_seconds() - t0,
            res.attention_initial, res.attention_final};
  std::cout << "    " << dir.filename().string() << ": t2v R@1 " << fmt("%.2f", t.t2v_r1) << ", Rsum "
            << fmt("%.1f", t.rsum) << ", top30 " << fmt("%.4f", t.initial.top) << " -> " << fmt("%.4f", t.final.top)
            << ", bot30 " << fmt("%.4f", t.initial.bottom) << " -> " << fmt("%.4f", t.final.bottom) << ", "
            << fmt("%.1f", t.cpu) << " s cpu\n"
            << std::flush;
  return t;
}

const std::uint64_t kSeeds[] = {0, 1, 2};

std::vector<Trained>& main_runs(const fs::path& out) {
  static std::vector<Trained> runs = [&] {
    std::vector<Trained> r;
    for (std::uint64_t s : kSeeds) r.push_back(train_one(colearning::RunConfig{}, s, out / ("full_seed" + std::to_string(s))));
    return r;
  }();
  return runs;
}

Verdict c6_training(const fs::path& out) {
  const auto& runs = main_runs(out);
  int hits = 0;
  double cpu = 0;
  std::string per;
  for (const auto& r : runs) {
    hits += r.t2v_r1 >= 40.0;
    cpu += r.cpu;
    per += (per.empty() ? "" : ", ") + fmt("%.2f", r.t2v_r1);
  }
  Verdict v;
  v.pass = hits >= 2 && cpu <= 600.0;
  v.detail = "t2v R@1 per seed [" + per + "] (chance 1.56), " + std::to_string(hits) + "/3 >= 40, " + fmt("%.1f", cpu) +
             " s cpu total";
  return v;
}

Verdict c7_attention(const fs::path& out) {
  const auto& runs = main_runs(out);
  int hits = 0;
  std::string per;
  for (const auto& r : runs) {
    const bool ok = r.final.top > r.initial.top && r.final.bottom < r.initial.bottom;
    hits += ok;
    per += (per.empty() ? "" : "; ") + std::string("seed ") + std::to_string(r.seed) + " top " +
           fmt("%+.4f", r.final.top - r.initial.top) + " bot " + fmt("%+.4f", r.final.bottom - r.initial.bottom);
  }
  Verdict v;
  v.pass = hits >= 2;
  v.detail = std::to_string(hits) + "/3 seeds shift toward the salient patches (" + per + ")";
  return v;
}

Verdict c8_ablation(const fs::path& out) {
  const auto& full = main_runs(out);
  colearning::RunConfig h_only;
  h_only.train.enable_low = false;
  colearning::RunConfig random = h_only;
  random.train.strategy = colearning::MaskStrategy::kRandom;
  double m_full = 0, m_h = 0, m_rand = 0;
  for (const auto& r : full) m_full += r.rsum / 3;
  for (std::uint64_t s : kSeeds) m_h += train_one(h_only, s, out / ("h_only_seed" + std::to_string(s))).rsum / 3;
  for (std::uint64_t s : kSeeds) m_rand += train_one(random, s, out / ("random_seed" + std::to_string(s))).rsum / 3;
  Verdict v;
  v.pass = m_full >= m_h && m_h >= m_rand;
  v.detail = "mean Rsum seeds {0,1,2}: H+L " + fmt("%.2f", m_full) + ", H only " + fmt("%.2f", m_h) + ", random " +
             fmt("%.2f", m_rand) + "; margins " + fmt("%+.2f", m_full - m_h) + ", " + fmt("%+.2f", m_h - m_rand);
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict c9_determinism(const fs::path& out) {
  colearning::RunConfig cfg;
  cfg.train.steps = 24;
  cfg.train.checkpoint_every = 8;
  const fs::path a = out / "determinism_a", b = out / "determinism_b";
  fs::remove_all(a);
  fs::remove_all(b);
  train_one(cfg, 5, a);
  train_one(cfg, 5, b);
  std::size_t compared = 0;
  std::vector<std::string> differ;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    ++compared;
    if (!fs::exists(b / rel) || slurp(entry.path()) != slurp(b / rel)) differ.push_back(rel.string());
  }
  const bool has_all = fs::exists(a / "final.ckpt") && fs::exists(a / "loss.jsonl") && fs::exists(a / "report.json");
  Verdict v;
  v.pass = differ.empty() && has_all && compared > 0;
  v.detail = std::to_string(compared) + " files compared byte for byte (checkpoints, traces, report)";
  for (const auto& d : differ) v.detail += "; differs: " + d;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out = "acceptance_runs";
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--out" && i + 1 < argc) {
      out = argv[++i];
    } else if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
    } else {
      std::cerr << "usage: acceptance [--out DIR] [--only N[,N...]]\n";
      return 2;
    }
  }
  fs::create_directories(out);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"gradient correctness", c1_gradients},
      {"GRL sign law", c2_grl_sign},
      {"information-flow isolation", c3_isolation},
      {"mask combinatorics", c4_combinatorics},
      {"metric oracle equivalence", c5_metrics},
      {"training smoke test", [&] { return c6_training(out); }},
      {"attention-shift direction", [&] { return c7_attention(out); }},
      {"ablation ordering (soft)", [&] { return c8_ablation(out); }},
      {"determinism", [&] { return c9_determinism(out); }},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!only.empty() && !only.count(id)) continue;
    const auto wall = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall).count();
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " C" << id << " " << criteria[k].first << ": " << v.detail << " ["
              << fmt("%.1f", secs) << " s]\n"
              << std::flush;
  }
  return failed ? 1 : 0;
}
