#include "mascot/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "mascot/colearning/pipeline.hpp"
#include "mascot/encoders/encoders.hpp"
#include "mascot/masking/masks.hpp"
#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/ops.hpp"

namespace mascot::eval {

namespace {

std::vector<std::vector<std::size_t>> chunks(std::size_t n, std::size_t chunk) {
  if (chunk == 0) throw ConfigError("chunk size must be positive");
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < n; start += chunk) {
    std::vector<std::size_t> idx(std::min(chunk, n - start));
    std::iota(idx.begin(), idx.end(), start);
    out.push_back(std::move(idx));
  }
  return out;
}

void append(std::vector<double>& dst, const Tensor& t) { dst.insert(dst.end(), t.data().begin(), t.data().end()); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Tensor similarity_matrix(const encoders::ModelParams& model, const data::Dataset& ds, std::size_t chunk) {
  if (ds.size() == 0) throw InputError("similarity_matrix: empty dataset");
  const auto& cfg = model.config();
  const std::size_t M = ds.geometry.frames, N = ds.captions.front().size(), d = cfg.d_model;
  std::vector<double> text, video;
  for (const auto& idx : chunks(ds.size(), chunk)) {
    const data::Batch b = data::make_batch(ds, idx);
    const auto sp = encoders::spatial_encode(nullptr, *model.spatial, b.videos, {}, cfg);
    append(video, encoders::temporal_encode(nullptr, *model.video_h, sp.frame_embeddings, M, cfg));
    append(text, encoders::text_encode(nullptr, *model.text, b.captions, cfg));
  }
  const Tensor t = Tensor::matrix(ds.size() * N, d, std::move(text));
  const Tensor v = Tensor::matrix(ds.size() * M, d, std::move(video));
  return colearning::text_video_similarity(nullptr, model, t, N, v, M);
}

std::vector<masking::AttentionWeights> dataset_attention(const encoders::ModelParams& model, const data::Dataset& ds,
                                                         std::size_t chunk) {
  const auto& cfg = model.config();
  const std::size_t M = ds.geometry.frames;
  std::vector<masking::AttentionWeights> out;
  for (const auto& idx : chunks(ds.size(), chunk)) {
    const data::Batch b = data::make_batch(ds, idx);
    const auto sp = encoders::spatial_encode(nullptr, *model.spatial, b.videos, {}, cfg);
    for (std::size_t i = 0; i < idx.size(); ++i)
      out.push_back(masking::extract_cls_weights(sp.attention_last, 0, M - 1, i * M, M));
  }
  return out;
}

EvalResult evaluate(const Tensor& s, double dsl_temperature) {
  EvalResult r;
  r.similarity = s;
  const Tensor st = transpose(s);
  r.t2v = rank_metrics(s, Direction::kT2V);
  r.v2t = rank_metrics(st, Direction::kV2T);
  r.t2v_dsl = rank_metrics(dsl_adjust(s, dsl_temperature), Direction::kT2V, true);
  r.v2t_dsl = rank_metrics(dsl_adjust(st, dsl_temperature), Direction::kV2T, true);
  return r;
}

EvalResult evaluate(const encoders::ModelParams& model, const data::Dataset& ds, double dsl_temperature) {
  return evaluate(similarity_matrix(model, ds), dsl_temperature);
}

nlohmann::json report_json(const std::string& config_hash, const std::string& dataset_hash, const EvalResult& r) {
  return {{"config_hash", config_hash}, {"dataset_hash", dataset_hash}, {"t2v", to_json(r.t2v)},
          {"v2t", to_json(r.v2t)},      {"t2v_dsl", to_json(r.t2v_dsl)}, {"v2t_dsl", to_json(r.v2t_dsl)},
          {"rsum", rsum(r.t2v, r.v2t)}, {"rsum_dsl", rsum(r.t2v_dsl, r.v2t_dsl)}};
}

std::vector<colearning::LossValues> read_loss_trace(std::istream& in) {
  std::vector<colearning::LossValues> out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      colearning::LossValues v;
      v.step = j.at("step").get<std::size_t>();
      v.vtc = j.at("L_vtc").get<double>();
      v.vtc_h = j.at("L_vtc_H").get<double>();
      v.vvc_h = j.at("L_vvc_H").get<double>();
      v.vtc_l = j.at("L_vtc_L").get<double>();
      v.vvc_l = j.at("L_vvc_L").get<double>();
      v.adv = j.at("L_adv").get<double>();
      v.total = j.at("total").get<double>();
      out.push_back(v);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("loss trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_attention_csv_header(std::ostream& out) { out << "step,meanW_top30,meanW_bot30\n"; }

void write_attention_csv_row(std::ostream& out, const AttentionRow& r) {
  out << r.step << ',' << fmt(r.stats.top) << ',' << fmt(r.stats.bottom) << '\n';
}

void write_attention_csv(std::ostream& out, const std::vector<AttentionRow>& rows) {
  write_attention_csv_header(out);
  for (const auto& r : rows) write_attention_csv_row(out, r);
}

std::vector<AttentionRow> read_attention_csv(std::istream& in) {
  std::vector<AttentionRow> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("step", 0) == 0) continue;
    std::istringstream ss(line);
    AttentionRow r;
    char c1 = 0, c2 = 0;
    if (!(ss >> r.step >> c1 >> r.stats.top >> c2 >> r.stats.bottom) || c1 != ',' || c2 != ',')
      throw InputError("attention csv line " + std::to_string(line_no) + " is malformed: '" + line + "'");
    out.push_back(r);
  }
  return out;
}

}  // namespace mascot::eval
