#include "mascot/eval/run.hpp"

#include <cstdio>
#include <fstream>

#include "mascot/colearning/checkpoint.hpp"
#include "mascot/encoders/encoders.hpp"
#include "mascot/eval/svg.hpp"
#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/tensor_io.hpp"

namespace mascot::eval {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write " + p.string());
  return out;
}

std::string ckpt_name(std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%06zu.ckpt", step);
  return buf;
}

}  // namespace

void write_trace_charts(const std::vector<colearning::LossValues>& losses, const std::vector<AttentionRow>& attention,
                        const fs::path& dir) {
  if (losses.empty() && attention.empty()) throw InputError("no data: both traces are empty");
  if (!losses.empty()) {
    std::vector<Series> s{{"L_vtc", {}, {}}, {"L_vtc_H", {}, {}}, {"L_vvc_H", {}, {}}, {"L_vtc_L", {}, {}},
                          {"L_vvc_L", {}, {}}, {"L_adv", {}, {}}, {"total", {}, {}}};
    for (const auto& v : losses) {
      const double vals[] = {v.vtc, v.vtc_h, v.vvc_h, v.vtc_l, v.vvc_l, v.adv, v.total};
      for (std::size_t k = 0; k < s.size(); ++k) {
        s[k].x.push_back(static_cast<double>(v.step));
        s[k].y.push_back(vals[k]);
      }
    }
    open_out(dir / "loss.svg") << line_chart_svg("training losses", s);
  }
  if (!attention.empty()) {
    std::vector<Series> s{{"top 30%", {}, {}}, {"bottom 30%", {}, {}}};
    for (const auto& r : attention) {
      s[0].x.push_back(static_cast<double>(r.step));
      s[0].y.push_back(r.stats.top);
      s[1].x.push_back(static_cast<double>(r.step));
      s[1].y.push_back(r.stats.bottom);
    }
    open_out(dir / "attention.svg") << line_chart_svg("mean CLS attention weight", s);
  }
}

RunResult run_training(const colearning::RunConfig& config, const data::Dataset& dataset, const RunOptions& options) {
  const bool files = !options.out_dir.empty();
  const fs::path& dir = options.out_dir;
  std::ofstream loss_out, attn_out;
  if (files) {
    fs::create_directories(dir);
    open_out(dir / "config.json") << colearning::to_json(config).dump(2) << '\n';
    loss_out = open_out(dir / "loss.jsonl");
    attn_out = open_out(dir / "attention.csv");
    write_attention_csv_header(attn_out);
  }

  colearning::Trainer trainer(config, dataset);
  RunResult res;
  res.attention_initial = attention_stats(dataset_attention(trainer.model(), dataset));
  const std::size_t every = config.train.checkpoint_every;
  for (std::size_t s = 0; s < config.train.steps; ++s) {
    const colearning::StepReport rep = trainer.step();
    res.losses.push_back(rep.losses);
    res.attention.push_back({rep.losses.step, attention_stats(rep.cls_weights)});
    if (files) {
      loss_out << rep.losses.json_line() << '\n';
      write_attention_csv_row(attn_out, res.attention.back());
      if (every && trainer.step_index() % every == 0)
        colearning::save_checkpoint(dir / "checkpoints" / ckpt_name(trainer.step_index()), config, trainer.model(),
                                    trainer.optimizer(), trainer.step_index());
    }
    if (options.on_step) options.on_step(rep);
  }

  const auto final_weights = dataset_attention(trainer.model(), dataset);
  res.attention_final = attention_stats(final_weights);
  res.eval = evaluate(trainer.model(), dataset, options.dsl_temperature);
  res.report = report_json(colearning::config_hash(config), data::dataset_hash(dataset), res.eval);
  res.report["attention"] = {{"initial", {{"top", res.attention_initial.top}, {"bottom", res.attention_initial.bottom}}},
                             {"final", {{"top", res.attention_final.top}, {"bottom", res.attention_final.bottom}}}};

  if (files) {
    loss_out.close();
    attn_out.close();
    colearning::save_checkpoint(dir / "final.ckpt", config, trainer.model(), trainer.optimizer(), trainer.step_index());
    std::vector<double> w;
    for (const auto& aw : final_weights) w.insert(w.end(), aw.w.begin(), aw.w.end());
    save_tns(dir / "attention.tns", "cls_attention", Tensor({final_weights.size(), final_weights.front().w.size()}, w));
    // Raw final-layer maps of the first clip, the input `maskgen --attention` expects.
    const auto sp = encoders::spatial_encode(nullptr, *trainer.model().spatial, dataset.videos.front(), {},
                                             trainer.model().config());
    save_tns(dir / "attention_last.tns", "attention_last/0", sp.attention_last);
    open_out(dir / "report.json") << res.report.dump(2) << '\n';
    if (!res.losses.empty()) write_trace_charts(res.losses, res.attention, dir);
  }
  return res;
}

}  // namespace mascot::eval
