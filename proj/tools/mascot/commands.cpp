#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "mascot/colearning/checkpoint.hpp"
#include "mascot/colearning/model_gradcheck.hpp"
#include "mascot/colearning/trainer.hpp"
#include "mascot/data/dataset.hpp"
#include "mascot/encoders/encoders.hpp"
#include "mascot/eval/report.hpp"
#include "mascot/eval/run.hpp"
#include "mascot/eval/svg.hpp"
#include "mascot/masking/masks.hpp"
#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/rng.hpp"
#include "mascot/numerics/tensor_io.hpp"

namespace mascot::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw InputError("cannot write " + p.string());
}

}  // namespace

int gen_data(const GenDataArgs& a) {
  const data::Dataset ds = data::gen_dataset(a.count, a.seed, {a.frames, a.height, a.width});
  data::write_dataset(ds, a.out);
  if (!ds.warning.empty()) std::cerr << "warning: " << ds.warning << '\n';
  std::cout << "wrote " << ds.size() << " pairs to " << a.out << " (dataset hash " << data::dataset_hash(ds) << ")\n";
  return 0;
}

int train(const TrainArgs& a) {
  colearning::RunConfig cfg = a.config.empty() ? colearning::RunConfig{} : colearning::load_run_config(a.config);
  if (a.seed) cfg.train.seed = *a.seed;
  if (a.steps) cfg.train.steps = *a.steps;
  cfg.train.validate();
  const data::VideoGeometry geom{cfg.model.n_frames, cfg.model.image_height, cfg.model.image_width};
  const data::Dataset ds = a.data.empty() ? data::gen_dataset(a.data_count, a.data_seed, geom) : data::load_dataset(a.data);
  if (ds.geometry.frames != geom.frames || ds.geometry.height != geom.height || ds.geometry.width != geom.width)
    throw ConfigError("dataset geometry does not match the model config");

  eval::RunOptions opt;
  opt.out_dir = a.out;
  opt.dsl_temperature = a.dsl_temperature;
  const auto start = std::chrono::steady_clock::now();
  const std::size_t every = std::max<std::size_t>(1, cfg.train.steps / 10);
  opt.on_step = [&](const colearning::StepReport& r) {
    if ((r.losses.step + 1) % every != 0) return;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::fprintf(stderr, "step %zu/%zu  total %.4f  L_vtc %.4f  (%.1fs)\n", r.losses.step + 1, cfg.train.steps,
                 r.losses.total, r.losses.vtc, secs);
  };
  const eval::RunResult res = eval::run_training(cfg, ds, opt);
  std::printf("t2v R@1 %.2f  R@5 %.2f  R@10 %.2f  MdR %.1f  MnR %.2f\n", res.eval.t2v.r1(), res.eval.t2v.r5(),
              res.eval.t2v.r10(), res.eval.t2v.mdr, res.eval.t2v.mnr);
  std::printf("v2t R@1 %.2f  R@5 %.2f  R@10 %.2f  MdR %.1f  MnR %.2f\n", res.eval.v2t.r1(), res.eval.v2t.r5(),
              res.eval.v2t.r10(), res.eval.v2t.mdr, res.eval.v2t.mnr);
  std::printf("attention top30 %.5f -> %.5f  bottom30 %.5f -> %.5f\n", res.attention_initial.top, res.attention_final.top,
              res.attention_initial.bottom, res.attention_final.bottom);
  return 0;
}

int eval(const EvalArgs& a) {
  const colearning::Checkpoint ck = colearning::load_checkpoint(a.checkpoint);
  const data::Dataset ds = data::load_dataset(a.data);
  const eval::EvalResult r = eval::evaluate(ck.model, ds, a.dsl_temperature);
  const json rep = eval::report_json(colearning::config_hash(ck.config), data::dataset_hash(ds), r);
  write_file(fs::path(a.out) / "report.json", rep.dump(2) + "\n");
  std::vector<double> sim(r.similarity.data().begin(), r.similarity.data().end());
  write_file(fs::path(a.out) / "similarity.svg",
             eval::heatmap_svg("text (rows) x video (cols) similarity", sim, r.similarity.dim(0), r.similarity.dim(1)));
  std::cout << rep.dump(2) << '\n';
  return 0;
}

int maskgen(const MaskgenArgs& a) {
  const masking::MaskKind kind = masking::parse_mask_kind(a.kind);
  Tensor attention;
  if (!a.attention.empty()) {
    if (!a.checkpoint.empty() || !a.data.empty()) throw InputError("--attention excludes --checkpoint and --data");
    attention = load_tns(a.attention).tensor;
    if (attention.rank() != 4 || attention.dim(2) != attention.dim(3) || attention.dim(2) < 2)
      throw InputError("attention dump must be [M, H, n+1, n+1], got " + mascot::to_string(attention.shape()));
  } else {
    encoders::ModelParams model = a.checkpoint.empty()
                                      ? encoders::ModelParams::init({}, derive_seed(a.seed, colearning::kInitStream))
                                      : colearning::load_checkpoint(a.checkpoint).model;
    const auto& cfg = model.config();
    const data::Dataset ds = a.data.empty()
                                 ? data::gen_dataset(a.item + 1, a.seed, {cfg.n_frames, cfg.image_height, cfg.image_width})
                                 : data::load_dataset(a.data);
    if (a.item >= ds.size()) throw InputError("--item " + std::to_string(a.item) + " out of range");
    attention = encoders::spatial_encode(nullptr, *model.spatial, ds.videos[a.item], {}, model.config()).attention_last;
  }
  const std::size_t M = attention.dim(0), n = attention.dim(2) - 1;
  Rng rng(a.seed);
  json out{{"kind", masking::to_string(kind)}, {"r", a.ratio}};
  masking::AttentionWeights shown;
  std::vector<std::size_t> outlined;
  if (kind == masking::MaskKind::kHigh || kind == masking::MaskKind::kLow) {
    const auto [a_s, a_e] = masking::sample_tube(M, rng);
    shown = masking::extract_cls_weights(attention, a_s, a_e);
    const masking::TubeMask m = masking::informed_mask(shown, a.ratio, kind);
    out["a_s"] = m.a_s;
    out["a_e"] = m.a_e;
    out["patch_indices"] = m.patch_indices;
    outlined = m.patch_indices;
  } else if (kind == masking::MaskKind::kRandomTube) {
    const masking::TubeMask m = masking::random_tube_mask(n, M, a.ratio, rng);
    shown = masking::extract_cls_weights(attention, m.a_s, m.a_e);
    out["a_s"] = m.a_s;
    out["a_e"] = m.a_e;
    out["patch_indices"] = m.patch_indices;
    outlined = m.patch_indices;
  } else {
    const masking::FrameMasks m = masking::random_frame_masks(n, M, a.ratio, rng);
    shown = masking::extract_cls_weights(attention, 0, M - 1);
    out["a_s"] = 0;
    out["a_e"] = M - 1;
    out["patch_indices"] = m.per_frame;
    outlined = m.per_frame.front();
  }
  if (a.out.empty())
    std::cout << out.dump() << '\n';
  else
    write_file(a.out, out.dump() + "\n");
  if (!a.svg.empty()) {
    std::size_t gw = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
    if (gw * gw != n) gw = n;
    write_file(a.svg, eval::heatmap_svg(masking::to_string(kind) + " mask over CLS attention", shown.w, n / gw, gw, outlined));
  }
  return 0;
}

int gradcheck(const GradcheckArgs& a) {
  encoders::EncoderConfig cfg;
  colearning::ModelGradCheckOptions opt;
  opt.seed = a.seed;
  opt.coords_per_tensor = a.coords;
  if (a.tiny) {
    cfg.image_height = cfg.image_width = 8;
    cfg.patch_size = 4;
    cfg.d_model = 8;
    cfg.n_heads = cfg.text_heads = cfg.temporal_heads = 2;
    cfg.n_layers = cfg.text_layers = cfg.temporal_layers = 1;
    cfg.mlp_ratio = 2;
    cfg.n_frames = 3;
    cfg.discriminator_hidden = 4;
    opt.coords_per_tensor = 0;
  }
  const auto start = std::chrono::steady_clock::now();
  const colearning::ModelGradCheckReport rep = colearning::model_gradient_check(cfg, {}, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& t : rep.tensors) std::printf("  %-40s probes %5zu  rel err %.3e\n", t.name.c_str(), t.probed, t.max_rel_error);
  std::printf("parameters %zu  probes %zu  time %.1fs\n", rep.parameters, rep.probes, secs);
  std::printf("directional rel err %.3e\n", rep.directional_rel_error);
  std::printf("max rel err %.3e\n", rep.max_rel_error);
  return rep.max_rel_error <= 1e-4 ? 0 : 1;
}

int report(const ReportArgs& a) {
  if (a.loss.empty() && a.attention.empty()) throw InputError("no data: give --loss and/or --attention");
  std::vector<colearning::LossValues> losses;
  std::vector<eval::AttentionRow> attention;
  if (!a.loss.empty()) {
    std::ifstream in(a.loss);
    if (!in) throw InputError("cannot open " + a.loss);
    losses = eval::read_loss_trace(in);
  }
  if (!a.attention.empty()) {
    std::ifstream in(a.attention);
    if (!in) throw InputError("cannot open " + a.attention);
    attention = eval::read_attention_csv(in);
  }
  fs::create_directories(a.out);
  eval::write_trace_charts(losses, attention, a.out);
  std::cout << "rendered " << losses.size() << " loss rows and " << attention.size() << " attention rows to " << a.out << '\n';
  return 0;
}

}  // namespace mascot::cli
