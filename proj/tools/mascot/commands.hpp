#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

namespace mascot::cli {

struct GenDataArgs {
  std::size_t count = 64;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t frames = 6, height = 32, width = 32;
};

struct TrainArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;
  std::string out;
  /// Dataset directory; empty generates `data_count` pairs from `data_seed`.
  std::string data;
  std::size_t data_count = 64;
  std::uint64_t data_seed = 0;
  double dsl_temperature = 0.01;
};

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string out;
  double dsl_temperature = 0.01;
};

struct MaskgenArgs {
  std::string kind = "high";
  double ratio = 0.7;
  std::uint64_t seed = 0;
  /// Attention dump [M, H, n+1, n+1] (.tns); otherwise computed from a model.
  std::string attention;
  std::string checkpoint;
  std::string data;
  std::size_t item = 0;
  std::string out;
  std::string svg;
};

struct GradcheckArgs {
  std::uint64_t seed = 7;
  std::size_t coords = 3;
  bool tiny = false;
};

struct ReportArgs {
  std::string loss;
  std::string attention;
  std::string out;
};

int gen_data(const GenDataArgs& a);
int train(const TrainArgs& a);
int eval(const EvalArgs& a);
int maskgen(const MaskgenArgs& a);
int gradcheck(const GradcheckArgs& a);
int report(const ReportArgs& a);

}  // namespace mascot::cli
