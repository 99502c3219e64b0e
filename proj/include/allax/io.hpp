#pragma once

#include <optional>
#include <string>

#include "allax/verify.hpp"

namespace allax {

enum class RunMode { simulate, soliton, verify, sweep };
enum class OutputFormat { csv, json };
enum class Picture { intrinsic, extrinsic };

struct RunConfig {
  RunMode mode = RunMode::verify;
  ModelParams model;
  BoundaryParams boundary;
  int N = 20;
  Topology topology = Topology::open;

  double t_start = 0.0;
  double t_end = 10.0;
  double dt = 1e-3;
  int sample_stride = 100;

  // simulate
  Picture picture = Picture::intrinsic;
  double init_amplitude = 0.0;  // 0 -> vacuum start
  bool phases = false;

  // soliton
  std::vector<Cx> zetas, Ds;
  std::optional<double> f1inf;   // explicit root value
  int f1inf_index = 0;           // index into the sorted real roots otherwise
  int j_min = -20, j_max = 40;
  int t_samples = 81;

  // verify
  VerifyOptions verify;

  std::string out_path = "out.csv";
  OutputFormat format = OutputFormat::csv;
  std::uint64_t seed = 12345;

  std::vector<RunConfig> runs;  // sweep children
};

/// Parses and validates a configuration file. Throws ValidationError with
/// the offending field named.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

struct CliOverrides {
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> branch;
  std::optional<int> f1inf_index;
};

void apply_overrides(RunConfig& cfg, const CliOverrides& o);

/// Exit codes: 0 pass, 2 validation error, 3 numerical failure.
int run_simulate(const RunConfig& cfg);
int run_soliton(const RunConfig& cfg);
int run_verify(const RunConfig& cfg);
int run_sweep(const RunConfig& cfg);
int run_any(const RunConfig& cfg);

/// Fixed-format float used by every writer (byte-reproducible output).
std::string fmt_num(double v);

}  // namespace allax
