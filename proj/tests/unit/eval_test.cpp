#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "mascot/eval/metrics.hpp"
#include "mascot/eval/report.hpp"
#include "mascot/eval/run.hpp"
#include "mascot/eval/svg.hpp"
#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/rng.hpp"
#include "test_util.hpp"

using namespace mascot;
using namespace mascot::eval;

namespace {

Tensor eye(std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  return Tensor::matrix(n, n, v);
}

Tensor map_values(const Tensor& s, double (*f)(double)) {
  std::vector<double> v = s.values();
  for (double& x : v) x = f(x);
  return Tensor::matrix(s.dim(0), s.dim(1), v);
}

// Rank of the diagonal entry counting every other entry >= it.
std::vector<std::size_t> brute_ranks(const Tensor& s) {
  const std::size_t n = s.dim(0);
  std::vector<std::size_t> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = 1;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && s[i * n + j] >= s[i * n + i]) ++k;
    r[i] = k;
  }
  return r;
}

}  // namespace

TEST(Ranks, IdentityIsPerfect) {
  const RetrievalReport r = rank_metrics(eye(8));
  EXPECT_EQ(r.r1(), 100.0);
  EXPECT_EQ(r.r5(), 100.0);
  EXPECT_EQ(r.mdr, 1.0);
  EXPECT_EQ(r.mnr, 1.0);
  EXPECT_EQ(r.rsum, 300.0);
}

TEST(Ranks, ThreeByThreeExample) {
  const Tensor s = Tensor::matrix(3, 3, {0.9, 0.1, 0.2,  //
                                         0.3, 0.8, 0.1,  //
                                         0.5, 0.6, 0.4});
  EXPECT_EQ(ranks(s), (std::vector<std::size_t>{1, 1, 3}));
  const RetrievalReport r = rank_metrics(s);
  EXPECT_NEAR(r.r1(), 200.0 / 3.0, 1e-12);
  EXPECT_EQ(r.r5(), 100.0);
  EXPECT_EQ(r.mdr, 1.0);
  EXPECT_NEAR(r.mnr, 5.0 / 3.0, 1e-12);
}

TEST(Ranks, AntiDiagonal) {
  const RetrievalReport r = rank_metrics(Tensor::matrix(2, 2, {0, 1, 1, 0}));
  EXPECT_EQ(r.r1(), 0.0);
  EXPECT_EQ(r.mdr, 2.0);
  EXPECT_EQ(r.mnr, 2.0);
}

TEST(Ranks, TiesCountAgainstTheQuery) {
  EXPECT_EQ(ranks(Tensor::matrix(2, 2, {1, 1, 0, 1})), (std::vector<std::size_t>{2, 1}));
  EXPECT_EQ(rank_metrics(Tensor::filled({4, 4}, 0.5)).r1(), 0.0);
}

TEST(Ranks, NonSquareThrows) {
  EXPECT_THROW(ranks(Tensor::zeros({2, 3})), ContractError);
  EXPECT_THROW(rank_metrics(Tensor::zeros({2, 3})), ContractError);
  EXPECT_THROW(dsl_adjust(Tensor::zeros({3, 2})), ContractError);
}

TEST(Ranks, RandomMatricesMatchBruteForce) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    const Tensor s = mascot::testing::random_tensor({n, n}, 100 + static_cast<std::uint64_t>(trial));
    const auto r = ranks(s);
    EXPECT_EQ(r, brute_ranks(s));
    const RetrievalReport m = rank_metrics(s);
    for (std::size_t k : {0u, 1u, 2u}) {
      const std::size_t cut = std::array<std::size_t, 3>{1, 5, 10}[k];
      const double hits = static_cast<double>(std::count_if(r.begin(), r.end(), [&](std::size_t x) { return x <= cut; }));
      EXPECT_NEAR(m.r_at[k], 100.0 * hits / static_cast<double>(n), 1e-12);
    }
    EXPECT_LE(m.r1(), m.r5());
    EXPECT_LE(m.r5(), m.r10());
    EXPECT_NEAR(m.rsum, m.r1() + m.r5() + m.r10(), 1e-12);
  }
}

TEST(Ranks, InvariantUnderMonotoneMaps) {
  const Tensor s = mascot::testing::random_tensor({7, 7}, 4);
  const auto base = ranks(s);
  EXPECT_EQ(ranks(map_values(s, [](double x) { return std::exp(x); })), base);
  EXPECT_EQ(ranks(map_values(s, [](double x) { return 3.0 * x - 1.0; })), base);
  EXPECT_EQ(ranks(map_values(s, [](double x) { return std::atan(x); })), base);
}

TEST(Ranks, JointPermutationPermutesRanks) {
  const std::size_t n = 6;
  const Tensor s = mascot::testing::random_tensor({n, n}, 8);
  const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  std::vector<double> v(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v[i * n + j] = s[perm[i] * n + perm[j]];
  const auto a = ranks(s), b = ranks(Tensor::matrix(n, n, v));
  for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(b[i], a[perm[i]]);
}

TEST(Rsum, AddsBothDirections) {
  RetrievalReport a, b;
  a.r_at = {10, 20, 30};
  b.r_at = {1, 2, 3};
  EXPECT_EQ(rsum(a, b), 66.0);
}

TEST(Dsl, SingleItemIsUnchanged) {
  const Tensor s = Tensor::matrix(1, 1, {0.37});
  EXPECT_NEAR(dsl_adjust(s)[0], 0.37, 1e-15);
}

TEST(Dsl, ConstantMatrixIsScaledByOneOverB) {
  const Tensor out = dsl_adjust(Tensor::filled({4, 4}, 0.8));
  for (double x : out.values()) EXPECT_NEAR(x, 0.2, 1e-15);
}

TEST(Dsl, MatchesDirectFormula) {
  const std::size_t n = 5;
  const double tau = 0.07;
  const Tensor s = mascot::testing::random_tensor({n, n}, 21, 0.3);
  const Tensor out = dsl_adjust(s, tau);
  for (std::size_t j = 0; j < n; ++j) {
    double z = 0;
    for (std::size_t i = 0; i < n; ++i) z += std::exp(s[i * n + j] / tau);
    for (std::size_t i = 0; i < n; ++i)
      EXPECT_NEAR(out[i * n + j], s[i * n + j] * std::exp(s[i * n + j] / tau) / z, 1e-13);
  }
  EXPECT_THROW(dsl_adjust(s, 0.0), ContractError);
}

TEST(Evaluate, FourReportsWithTransposedV2t) {
  const Tensor s = Tensor::matrix(3, 3, {0.9, 0.1, 0.2, 0.3, 0.8, 0.1, 0.5, 0.6, 0.4});
  const EvalResult r = evaluate(s);
  EXPECT_NEAR(r.t2v.r1(), 200.0 / 3.0, 1e-12);
  // Every column's maximum sits on the diagonal.
  EXPECT_EQ(r.v2t.r1(), 100.0);
  EXPECT_EQ(r.v2t.direction, Direction::kV2T);
  EXPECT_TRUE(r.t2v_dsl.dsl_applied);
  EXPECT_FALSE(r.t2v.dsl_applied);
}

TEST(Report, JsonKeys) {
  const EvalResult r = evaluate(eye(3));
  const auto j = report_json("abc", "def", r);
  for (const char* k : {"config_hash", "dataset_hash", "t2v", "v2t", "t2v_dsl", "v2t_dsl"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j.at("rsum"), 600.0);
  EXPECT_EQ(j.at("config_hash"), "abc");
  EXPECT_EQ(j.at("t2v").at("r_at").at("1"), 100.0);
}

TEST(AttentionStats, UniformAndRamp) {
  masking::AttentionWeights u;
  u.w.assign(16, 1.0 / 16);
  const auto a = attention_stats(std::span(&u, 1));
  EXPECT_NEAR(a.top, 1.0 / 16, 1e-15);
  EXPECT_NEAR(a.bottom, 1.0 / 16, 1e-15);

  masking::AttentionWeights ramp;
  for (int i = 0; i < 10; ++i) ramp.w.push_back(0.1 * i);
  const auto b = attention_stats(std::span(&ramp, 1));
  EXPECT_NEAR(b.top, 0.8, 1e-12);
  EXPECT_NEAR(b.bottom, 0.1, 1e-12);

  const masking::AttentionWeights both[] = {u, ramp};
  const auto c = attention_stats(both);
  EXPECT_NEAR(c.top, (a.top + b.top) / 2, 1e-15);
  EXPECT_THROW(attention_stats({}), InputError);
}

TEST(Traces, LossJsonlRoundTrip) {
  colearning::LossValues v;
  v.step = 3;
  v.vtc = 1.25;
  v.vtc_h = 0.1;
  v.vvc_h = 0.2;
  v.vtc_l = 0.3;
  v.vvc_l = 0.4;
  v.adv = 0.6931471805599453;
  v.total = 2.0;
  const std::string line = v.json_line();
  EXPECT_EQ(line.find("\"step\""), 1u);
  EXPECT_LT(line.find("L_vtc_L"), line.find("L_adv"));
  std::istringstream in(line + "\n\n" + line + "\n");
  const auto back = read_loss_trace(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].json_line(), line);
  EXPECT_EQ(back[0].adv, v.adv);
  std::istringstream bad("{\"step\": 1}\n");
  EXPECT_THROW(read_loss_trace(bad), InputError);
}

TEST(Traces, AttentionCsvRoundTrip) {
  std::vector<AttentionRow> rows{{0, {0.08, 0.04}}, {1, {0.0812345678901234, 0.0399999}}};
  std::ostringstream out;
  write_attention_csv(out, rows);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "step,meanW_top30,meanW_bot30");
  std::istringstream in(out.str());
  const auto back = read_attention_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].step, 1u);
  EXPECT_EQ(back[1].stats.top, rows[1].stats.top);
  EXPECT_EQ(back[1].stats.bottom, rows[1].stats.bottom);
  std::istringstream bad("step,meanW_top30,meanW_bot30\n1,x,2\n");
  EXPECT_THROW(read_attention_csv(bad), InputError);
}

TEST(Svg, ChartsAndEmptyInput) {
  const std::string svg = line_chart_svg("loss", {{"total", {0, 1, 2}, {3, 2, 1}}});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("total"), std::string::npos);
  try {
    line_chart_svg("loss", {{"total", {}, {}}});
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("no data"), std::string::npos);
  }
  EXPECT_THROW(write_trace_charts({}, {}, std::filesystem::temp_directory_path()), InputError);
  const std::string heat = heatmap_svg("w", {0.1, 0.2, 0.3, 0.4}, 2, 2, {3});
  EXPECT_NE(heat.find("</svg>"), std::string::npos);
  EXPECT_THROW(heatmap_svg("w", {0.1, 0.2, 0.3}, 2, 2), InputError);
}

TEST(Evaluate, UntrainedModelIsNearChance) {
  const auto cfg = mascot::testing::tiny_config();
  const auto ds = data::gen_dataset(32, 3, {cfg.n_frames, cfg.image_height, cfg.image_width});
  const auto model = encoders::ModelParams::init(cfg, 5);
  const Tensor s = similarity_matrix(model, ds, 7);
  EXPECT_EQ(s.shape(), (Shape{32, 32}));
  // Chunking changes product sizes and so Eigen's kernel choice; values agree to rounding.
  const Tensor whole = similarity_matrix(model, ds, 32);
  for (std::size_t i = 0; i < s.numel(); ++i) EXPECT_NEAR(s[i], whole[i], 1e-12);
  const EvalResult r = evaluate(model, ds);
  EXPECT_LE(r.t2v.r1(), 25.0);
  const auto att = dataset_attention(model, ds);
  ASSERT_EQ(att.size(), 32u);
  EXPECT_EQ(att[0].w.size(), cfg.patches_per_frame());
  for (double w : att[0].w) EXPECT_GE(w, 0.0);
  EXPECT_LE(std::accumulate(att[0].w.begin(), att[0].w.end(), 0.0), 1.0 + 1e-12);
}
