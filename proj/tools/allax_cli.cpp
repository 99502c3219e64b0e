// Command-line front end: simulate | soliton | verify | sweep.

#include <cstdio>

#include <CLI11.hpp>

#include "allax/io.hpp"

namespace {

struct CommonFlags {
  std::string config;
  allax::CliOverrides over;
};

void attach(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "JSON configuration file")->required();
  sub->add_option("--out", f.over.out, "output path (overrides config)");
  sub->add_option("--format", f.over.format, "csv|json (overrides config)");
  sub->add_option("--seed", f.over.seed, "RNG seed (overrides config)");
  sub->add_option("--branch", f.over.branch, "plus|minus closure branch (overrides config)");
  sub->add_option("--f1inf-index", f.over.f1inf_index,
                  "index into the admissible f1inf roots (overrides config)");
}

int dispatch(const CommonFlags& f, allax::RunMode mode) {
  try {
    allax::RunConfig cfg = allax::load_config(f.config);
    if (cfg.mode != mode)
      throw allax::ValidationError("config mode does not match the chosen subcommand");
    allax::apply_overrides(cfg, f.over);
    for (auto& child : cfg.runs) allax::apply_overrides(child, f.over);
    return allax::run_any(cfg);
  } catch (const allax::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const allax::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice model with integrable time-dependent boundary conditions"};
  app.require_subcommand(1);

  CommonFlags fs, fo, fv, fw;
  auto* sim = app.add_subcommand("simulate", "integrate the open or periodic chain");
  attach(sim, fs);
  auto* sol = app.add_subcommand("soliton", "evaluate exact multisoliton solutions");
  attach(sol, fo);
  auto* ver = app.add_subcommand("verify", "run the identity battery");
  attach(ver, fv);
  auto* swp = app.add_subcommand("sweep", "fan out independent runs");
  attach(swp, fw);

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) return dispatch(fs, allax::RunMode::simulate);
  if (sol->parsed()) return dispatch(fo, allax::RunMode::soliton);
  if (ver->parsed()) return dispatch(fv, allax::RunMode::verify);
  return dispatch(fw, allax::RunMode::sweep);
}
