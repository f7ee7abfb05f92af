#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mascot/colearning/trainer.hpp"
#include "mascot/data/dataset.hpp"
#include "mascot/encoders/model.hpp"
#include "mascot/eval/metrics.hpp"

namespace mascot::eval {

/// Text-to-video WTI similarity over the whole dataset, [N_text, N_video],
/// evaluated without a tape in chunks of `chunk` items.
Tensor similarity_matrix(const encoders::ModelParams& model, const data::Dataset& dataset, std::size_t chunk = 32);

/// Head- and frame-averaged CLS weights of every clip under the unmasked encoder.
std::vector<masking::AttentionWeights> dataset_attention(const encoders::ModelParams& model,
                                                         const data::Dataset& dataset, std::size_t chunk = 32);

struct EvalResult {
  Tensor similarity;
  RetrievalReport t2v, v2t, t2v_dsl, v2t_dsl;
};

EvalResult evaluate(const Tensor& similarity, double dsl_temperature = kDefaultDslTemperature);
EvalResult evaluate(const encoders::ModelParams& model, const data::Dataset& dataset,
                    double dsl_temperature = kDefaultDslTemperature);

/// {config_hash, dataset_hash, t2v, v2t, t2v_dsl, v2t_dsl} plus rsum and rsum_dsl.
nlohmann::json report_json(const std::string& config_hash, const std::string& dataset_hash, const EvalResult& r);

/// Parses loss JSONL; blank lines are skipped, anything else malformed throws InputError.
std::vector<colearning::LossValues> read_loss_trace(std::istream& in);

struct AttentionRow {
  std::size_t step = 0;
  AttentionSummary stats;
};

/// "step,meanW_top30,meanW_bot30" header plus one row per step.
void write_attention_csv(std::ostream& out, const std::vector<AttentionRow>& rows);
void write_attention_csv_header(std::ostream& out);
void write_attention_csv_row(std::ostream& out, const AttentionRow& row);
std::vector<AttentionRow> read_attention_csv(std::istream& in);

}  // namespace mascot::eval
