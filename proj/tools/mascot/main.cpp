#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace cli = mascot::cli;

int main(int argc, char** argv) {
  CLI::App app{"mascot: masked semantics completion lab on synthetic video-caption data"};
  app.require_subcommand(1);

  cli::GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "generate a synthetic video-caption dataset");
  gen_cmd->add_option("--count", gen.count, "number of pairs")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "sampling seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "output directory")->required();
  gen_cmd->add_option("--frames", gen.frames)->capture_default_str();
  gen_cmd->add_option("--height", gen.height)->capture_default_str();
  gen_cmd->add_option("--width", gen.width)->capture_default_str();

  cli::TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "run co-learning and write traces, checkpoints and a report");
  train_cmd->add_option("--config", tr.config, "JSON run config {model, train}");
  train_cmd->add_option("--seed", tr.seed, "overrides train.seed");
  train_cmd->add_option("--steps", tr.steps, "overrides train.steps");
  train_cmd->add_option("--out", tr.out, "output directory")->required();
  train_cmd->add_option("--data", tr.data, "dataset directory (default: generate one)");
  train_cmd->add_option("--data-count", tr.data_count, "pairs to generate without --data")->capture_default_str();
  train_cmd->add_option("--data-seed", tr.data_seed, "dataset seed without --data")->capture_default_str();
  train_cmd->add_option("--dsl-temperature", tr.dsl_temperature)->capture_default_str();

  cli::EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "retrieval metrics of a checkpoint on a dataset");
  eval_cmd->add_option("--checkpoint", ev.checkpoint)->required();
  eval_cmd->add_option("--data", ev.data)->required();
  eval_cmd->add_option("--out", ev.out, "directory for report.json")->required();
  eval_cmd->add_option("--dsl-temperature", ev.dsl_temperature)->capture_default_str();

  cli::MaskgenArgs mg;
  auto* mask_cmd = app.add_subcommand("maskgen", "build one video mask from CLS attention");
  mask_cmd->add_option("--kind", mg.kind, "high, low, random or random_tube")->capture_default_str();
  mask_cmd->add_option("--ratio", mg.ratio)->capture_default_str();
  mask_cmd->add_option("--seed", mg.seed, "tube and model seed")->capture_default_str();
  mask_cmd->add_option("--attention", mg.attention, "final-layer attention dump [M, H, n+1, n+1] (.tns)");
  mask_cmd->add_option("--checkpoint", mg.checkpoint, "model to take attention from (default: fresh init)");
  mask_cmd->add_option("--data", mg.data, "dataset directory (default: one generated pair)");
  mask_cmd->add_option("--item", mg.item, "dataset item")->capture_default_str();
  mask_cmd->add_option("--out", mg.out, "write the mask JSON here instead of stdout");
  mask_cmd->add_option("--svg", mg.svg, "also write an attention heatmap");

  cli::GradcheckArgs gc;
  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference check of the full objective");
  grad_cmd->add_option("--seed", gc.seed)->capture_default_str();
  grad_cmd->add_option("--coords", gc.coords, "coordinates per tensor, 0 = all")->capture_default_str();
  grad_cmd->add_flag("--tiny", gc.tiny, "use a tiny model and probe every coordinate");

  cli::ReportArgs rp;
  auto* report_cmd = app.add_subcommand("report", "render loss and attention traces to SVG");
  report_cmd->add_option("--loss", rp.loss, "loss.jsonl");
  report_cmd->add_option("--attention", rp.attention, "attention.csv");
  report_cmd->add_option("--out", rp.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*gen_cmd) return cli::gen_data(gen);
    if (*train_cmd) return cli::train(tr);
    if (*eval_cmd) return cli::eval(ev);
    if (*mask_cmd) return cli::maskgen(mg);
    if (*grad_cmd) return cli::gradcheck(gc);
    if (*report_cmd) return cli::report(rp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
