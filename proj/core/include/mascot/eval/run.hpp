#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "mascot/colearning/config.hpp"
#include "mascot/colearning/trainer.hpp"
#include "mascot/data/dataset.hpp"
#include "mascot/eval/metrics.hpp"
#include "mascot/eval/report.hpp"

namespace mascot::eval {

struct RunOptions {
  /// Empty: keep everything in memory.
  std::filesystem::path out_dir;
  double dsl_temperature = kDefaultDslTemperature;
  /// Called after every step.
  std::function<void(const colearning::StepReport&)> on_step;
};

struct RunResult {
  std::vector<colearning::LossValues> losses;
  /// Per-step batch statistics of the CLS weights that drove that step's masks.
  std::vector<AttentionRow> attention;
  /// Whole-dataset statistics before the first and after the last update.
  AttentionSummary attention_initial, attention_final;
  EvalResult eval;
  nlohmann::json report;
};

/// Trains from scratch for config.train.steps steps and evaluates on the
/// training set. With out_dir set, writes config.json, loss.jsonl,
/// attention.csv, attention.tns (final CLS weights per clip), attention_last.tns
/// (final-layer maps of clip 0), periodic and final
/// checkpoints, report.json and SVG charts.
RunResult run_training(const colearning::RunConfig& config, const data::Dataset& dataset, const RunOptions& options = {});

/// loss.svg and attention.svg from the traces; throws InputError on empty traces.
void write_trace_charts(const std::vector<colearning::LossValues>& losses, const std::vector<AttentionRow>& attention,
                        const std::filesystem::path& dir);

}  // namespace mascot::eval
