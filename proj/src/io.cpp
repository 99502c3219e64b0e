#include "allax/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

#include <json.hpp>

namespace allax {

using nlohmann::json;

namespace {

Cx parse_cx(const json& v, const std::string& field) {
  if (v.is_number()) return Cx(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Cx(v[0].get<double>(), v[1].get<double>());
  throw ValidationError("config: field '" + field + "' must be a number or [re, im]");
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

ModelParams parse_model(const json& j) {
  if (!j.contains("model")) return ModelParams::dnls(-1);
  const auto& m = j.at("model");
  const std::string preset = get_or<std::string>(m, "preset", "dnls");
  if (preset == "dnls") return ModelParams::dnls(get_or<int>(m, "nu", -1));
  if (preset == "dmkdv") return ModelParams::dmkdv(get_or<int>(m, "nu", 1));
  if (preset == "general") {
    if (!m.contains("alpha") || !m.contains("beta") || !m.contains("gamma"))
      throw ValidationError("config: model preset 'general' needs alpha, beta, gamma");
    return ModelParams::general(parse_cx(m.at("alpha"), "model.alpha"),
                                parse_cx(m.at("beta"), "model.beta"),
                                parse_cx(m.at("gamma"), "model.gamma"));
  }
  throw ValidationError("config: unknown model preset '" + preset + "'");
}

BoundaryParams parse_boundary(const json& j) {
  BoundaryParams bp;
  if (!j.contains("boundary")) return bp;
  const auto& b = j.at("boundary");
  if (b.contains("a")) bp.a = parse_cx(b.at("a"), "boundary.a");
  if (b.contains("b")) bp.b = parse_cx(b.at("b"), "boundary.b");
  if (b.contains("c")) bp.c = parse_cx(b.at("c"), "boundary.c");
  if (b.contains("d")) bp.d = parse_cx(b.at("d"), "boundary.d");
  if (b.contains("d") && !b.contains("c")) bp.c = std::conj(bp.d);  // dnls pairing
  const std::string br = get_or<std::string>(b, "branch", "minus");
  if (br == "plus")
    bp.branch = Branch::plus;
  else if (br == "minus")
    bp.branch = Branch::minus;
  else
    throw ValidationError("config: boundary.branch must be 'plus' or 'minus'");
  return bp;
}

RunConfig parse_one(const json& j);

RunConfig parse_common(const json& j) {
  RunConfig cfg;
  const std::string mode = get_or<std::string>(j, "mode", "verify");
  if (mode == "simulate")
    cfg.mode = RunMode::simulate;
  else if (mode == "soliton")
    cfg.mode = RunMode::soliton;
  else if (mode == "verify")
    cfg.mode = RunMode::verify;
  else if (mode == "sweep")
    cfg.mode = RunMode::sweep;
  else
    throw ValidationError("config: unknown mode '" + mode + "'");

  cfg.model = parse_model(j);
  cfg.boundary = parse_boundary(j);

  if (j.contains("lattice")) {
    const auto& l = j.at("lattice");
    cfg.N = get_or<int>(l, "N", 20);
    if (cfg.N < 1) throw ValidationError("config: lattice.N must be >= 1");
    const std::string topo = get_or<std::string>(l, "topology", "open");
    if (topo == "periodic")
      cfg.topology = Topology::periodic;
    else if (topo == "open")
      cfg.topology = Topology::open;
    else if (topo == "half_infinite")
      cfg.topology = Topology::half_infinite;
    else
      throw ValidationError("config: unknown lattice.topology '" + topo + "'");
  }

  if (j.contains("time")) {
    const auto& t = j.at("time");
    cfg.t_start = get_or<double>(t, "t_start", 0.0);
    cfg.t_end = get_or<double>(t, "t_end", 10.0);
    cfg.dt = get_or<double>(t, "dt", 1e-3);
    cfg.sample_stride = get_or<int>(t, "sample_stride", 100);
    if (cfg.dt <= 0) throw ValidationError("config: time.dt must be positive");
    if (cfg.t_end <= cfg.t_start) throw ValidationError("config: time.t_end must exceed t_start");
    if (cfg.sample_stride < 1) throw ValidationError("config: time.sample_stride must be >= 1");
  }

  if (j.contains("simulate")) {
    const auto& s = j.at("simulate");
    const std::string pict = get_or<std::string>(s, "picture", "intrinsic");
    if (pict == "intrinsic")
      cfg.picture = Picture::intrinsic;
    else if (pict == "extrinsic")
      cfg.picture = Picture::extrinsic;
    else
      throw ValidationError("config: simulate.picture must be 'intrinsic' or 'extrinsic'");
    cfg.init_amplitude = get_or<double>(s, "amplitude", 0.0);
    cfg.phases = get_or<bool>(s, "phases", false);
  }

  if (j.contains("soliton")) {
    const auto& s = j.at("soliton");
    if (s.contains("zetas"))
      for (std::size_t i = 0; i < s.at("zetas").size(); ++i)
        cfg.zetas.push_back(parse_cx(s.at("zetas")[i], "soliton.zetas"));
    if (s.contains("Ds"))
      for (std::size_t i = 0; i < s.at("Ds").size(); ++i)
        cfg.Ds.push_back(parse_cx(s.at("Ds")[i], "soliton.Ds"));
    if (cfg.zetas.size() != cfg.Ds.size())
      throw ValidationError("config: soliton.zetas and soliton.Ds must have equal length");
    if (s.contains("f1inf")) cfg.f1inf = s.at("f1inf").get<double>();
    cfg.f1inf_index = get_or<int>(s, "f1inf_index", 0);
    cfg.j_min = get_or<int>(s, "j_min", -20);
    cfg.j_max = get_or<int>(s, "j_max", 40);
    cfg.t_samples = get_or<int>(s, "t_samples", 81);
    if (cfg.j_min > cfg.j_max) throw ValidationError("config: soliton.j_min must not exceed j_max");
    if (cfg.t_samples < 2) throw ValidationError("config: soliton.t_samples must be >= 2");
  }

  if (j.contains("verify")) {
    const auto& v = j.at("verify");
    cfg.verify.algebraic_trials = get_or<int>(v, "trials", 100);
    cfg.verify.state_trials = get_or<int>(v, "state_trials", 3);
    cfg.verify.corrupt_kminus = get_or<bool>(v, "corrupt_kminus", false);
  }

  if (j.contains("output")) {
    const auto& o = j.at("output");
    cfg.out_path = get_or<std::string>(o, "path", cfg.out_path);
    const std::string fmt = get_or<std::string>(o, "format", "csv");
    if (fmt == "csv")
      cfg.format = OutputFormat::csv;
    else if (fmt == "json")
      cfg.format = OutputFormat::json;
    else
      throw ValidationError("config: output.format must be 'csv' or 'json'");
  }

  cfg.seed = get_or<std::uint64_t>(j, "seed", 12345);
  cfg.verify.seed = cfg.seed;
  return cfg;
}

RunConfig parse_one(const json& j) {
  RunConfig cfg = parse_common(j);
  if (cfg.mode == RunMode::sweep) {
    if (!j.contains("runs") || !j.at("runs").is_array() || j.at("runs").empty())
      throw ValidationError("config: sweep mode needs a nonempty 'runs' array");
    for (const auto& r : j.at("runs")) {
      cfg.runs.push_back(parse_one(r));
      if (cfg.runs.back().mode == RunMode::sweep)
        throw ValidationError("config: sweep runs must not nest");
    }
  }
  return cfg;
}

std::string cx_cols(const std::string& base) { return base + "_re," + base + "_im"; }

void require_mode_fields(const RunConfig& cfg) {
  if (cfg.mode == RunMode::soliton && cfg.zetas.empty() && !cfg.Ds.empty())
    throw ValidationError("config: soliton mode with Ds but no zetas");
}

json result_to_json(const std::vector<CheckResult>& rs) {
  json arr = json::array();
  for (const auto& r : rs)
    arr.push_back({{"name", r.name},
                   {"residual", r.residual},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass}});
  return arr;
}

}  // namespace

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig cfg = parse_one(j);
  require_mode_fields(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_overrides(RunConfig& cfg, const CliOverrides& o) {
  if (o.out) cfg.out_path = *o.out;
  if (o.format) {
    if (*o.format == "csv")
      cfg.format = OutputFormat::csv;
    else if (*o.format == "json")
      cfg.format = OutputFormat::json;
    else
      throw ValidationError("--format must be csv or json");
  }
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.verify.seed = *o.seed;
  }
  if (o.branch) {
    if (*o.branch == "plus")
      cfg.boundary.branch = Branch::plus;
    else if (*o.branch == "minus")
      cfg.boundary.branch = Branch::minus;
    else
      throw ValidationError("--branch must be plus or minus");
  }
  if (o.f1inf_index) cfg.f1inf_index = *o.f1inf_index;
}

namespace {

LatticeState initial_state(const RunConfig& cfg) {
  // the half-infinite lattice is integrated as its finite-N truncation
  const Topology topo =
      cfg.topology == Topology::half_infinite ? Topology::open : cfg.topology;
  LatticeState s = LatticeState::zeros(cfg.N, topo);
  if (cfg.init_amplitude > 0) {
    std::mt19937_64 gen(cfg.seed);
    std::normal_distribution<double> n;
    for (int j = 0; j <= cfg.N; ++j) {
      s.q[j] = cfg.init_amplitude * Cx(n(gen), n(gen));
      if (cfg.model.reduction == Reduction::dnls)
        s.r[j] = static_cast<double>(cfg.model.nu) * std::conj(s.q[j]);
      else if (cfg.model.reduction == Reduction::dmkdv) {
        s.q[j] = Cx(s.q[j].real(), 0.0);
        s.r[j] = static_cast<double>(cfg.model.nu) * s.q[j];
      } else
        s.r[j] = cfg.init_amplitude * Cx(n(gen), n(gen));
    }
  }
  return s;
}

void write_trajectory(const RunConfig& cfg, const Trajectory& traj, bool extrinsic) {
  const std::string field = extrinsic ? "Q" : "q";
  std::ofstream out(cfg.out_path);
  if (!out) throw ValidationError("output: cannot open '" + cfg.out_path + "'");

  if (cfg.format == OutputFormat::csv) {
    out << "t";
    for (int j = 0; j <= cfg.N; ++j) {
      out << ",abs_" << field << j;
      if (cfg.phases) out << ",arg_" << field << j;
    }
    out << "," << cx_cols("H") << "," << cx_cols("I0") << "," << cx_cols("I1");
    out << ",aborted\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      out << fmt_num(traj.times[i]);
      for (int j = 0; j <= cfg.N; ++j) {
        out << "," << fmt_num(std::abs(traj.qs[i][j]));
        if (cfg.phases) out << "," << fmt_num(std::arg(traj.qs[i][j]));
      }
      const MonitorSample m = i < traj.monitors.size()
                                  ? traj.monitors[i]
                                  : MonitorSample{traj.times[i], Cx(0), Cx(0), Cx(0)};
      out << "," << fmt_num(m.H.real()) << "," << fmt_num(m.H.imag());
      out << "," << fmt_num(m.I0.real()) << "," << fmt_num(m.I0.imag());
      out << "," << fmt_num(m.I1.real()) << "," << fmt_num(m.I1.imag());
      out << "," << (traj.aborted ? 1 : 0) << "\n";
    }
    return;
  }

  json j;
  j["times"] = traj.times;
  j["aborted"] = traj.aborted;
  j["last_valid_time"] = traj.last_valid_time;
  json states = json::array();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    json row = json::array();
    for (int s = 0; s <= cfg.N; ++s)
      row.push_back({traj.qs[i][s].real(), traj.qs[i][s].imag()});
    states.push_back(row);
  }
  j[field] = states;
  json mon = json::array();
  for (const auto& m : traj.monitors)
    mon.push_back({{"t", m.t},
                   {"H", {m.H.real(), m.H.imag()}},
                   {"I0", {m.I0.real(), m.I0.imag()}},
                   {"I1", {m.I1.real(), m.I1.imag()}}});
  j["monitors"] = mon;
  out << j.dump(2) << "\n";
}

DiscreteData discrete_from_config(const RunConfig& cfg) {
  DiscreteData dd;
  dd.zetas = cfg.zetas;
  dd.Ds = cfg.Ds;
  dd.bp = cfg.boundary;
  if (cfg.f1inf) {
    dd.f1inf = *cfg.f1inf;
  } else {
    auto roots = f1_infinity_roots(cfg.boundary, cfg.model);
    std::vector<double> real_roots;
    for (const auto& r : roots)
      if (r.is_real && std::abs(r.value.real()) > 1e-12 &&
          std::abs(r.value * r.value - cfg.boundary.c * cfg.boundary.d) > 1e-12)
        real_roots.push_back(r.value.real());
    if (real_roots.empty())
      throw ValidationError("soliton: no admissible real f1inf root for these boundary parameters");
    // index 0 = the root matched to the configured closure branch, i.e. the
    // vacuum limit (a - eps*sqrt(a^2 + 4cd))/2 of the seed coefficient;
    // larger indices walk outward from it
    const double eps = branch_sign(cfg.boundary.branch);
    const Cx fb =
        (cfg.boundary.a -
         eps * std::sqrt(cfg.boundary.a * cfg.boundary.a + 4.0 * cfg.boundary.c * cfg.boundary.d)) /
        2.0;
    std::sort(real_roots.begin(), real_roots.end(), [&](double x, double y) {
      return std::abs(x - fb.real()) < std::abs(y - fb.real());
    });
    if (cfg.f1inf_index < 0 || cfg.f1inf_index >= static_cast<int>(real_roots.size()))
      throw ValidationError("soliton: f1inf_index out of range (have " +
                            std::to_string(real_roots.size()) + " admissible roots)");
    dd.f1inf = real_roots[cfg.f1inf_index];
  }
  return dd;
}

}  // namespace

int run_simulate(const RunConfig& cfg) {
  const LatticeState s0 = initial_state(cfg);

  RhsKind kind = RhsKind::periodic;
  LatticeState start = s0;
  if (cfg.topology == Topology::periodic) {
    kind = RhsKind::periodic;
  } else if (cfg.picture == Picture::intrinsic) {
    cfg.boundary.validate_for(cfg.model);
    kind = RhsKind::open_intrinsic;
  } else {
    cfg.boundary.validate_for(cfg.model);
    kind = RhsKind::open_extrinsic;
    const ExtrinsicState e = to_extrinsic(s0, cfg.boundary);
    // branch selector must invert the change of variables at t = 0
    const LatticeState back = from_extrinsic(e);
    if (std::abs(back.q[0] - s0.q[0]) > 1e-10 || std::abs(back.r[0] - s0.r[0]) > 1e-10)
      throw ValidationError("simulate: boundary.branch fails the round-trip test at t=0 "
                            "(choose the other branch)");
    start = LatticeState(e.Q, e.R, cfg.topology);
  }

  IntegrateOptions io;
  io.t_start = cfg.t_start;
  io.t_end = cfg.t_end;
  io.dt = cfg.dt;
  io.sample_stride = cfg.sample_stride;
  const Trajectory traj = integrate(start, kind, cfg.boundary, cfg.model, io);
  write_trajectory(cfg, traj, kind == RhsKind::open_extrinsic);
  if (traj.aborted) {
    std::fprintf(stderr, "simulate: aborted at t = %s (blow-up or singularity); partial output written\n",
                 fmt_num(traj.last_valid_time).c_str());
    return 3;
  }
  return 0;
}

int run_soliton(const RunConfig& cfg) {
  if (cfg.zetas.empty()) {
    // vacuum grid
    std::ofstream out(cfg.out_path);
    if (!out) throw ValidationError("output: cannot open '" + cfg.out_path + "'");
    out << "t";
    for (int j = cfg.j_min; j <= cfg.j_max; ++j) out << ",abs_Q" << j;
    out << ",boundary_residual\n";
    for (int i = 0; i < cfg.t_samples; ++i) {
      const double t =
          cfg.t_start + (cfg.t_end - cfg.t_start) * i / (cfg.t_samples - 1);
      out << fmt_num(t);
      for (int j = cfg.j_min; j <= cfg.j_max; ++j) out << "," << fmt_num(0.0);
      out << "," << fmt_num(0.0) << "\n";
    }
    return 0;
  }

  const DiscreteData dd = discrete_from_config(cfg);
  const auto oct = octet_expand(dd, cfg.model);

  std::ofstream out(cfg.out_path);
  if (!out) throw ValidationError("output: cannot open '" + cfg.out_path + "'");
  if (cfg.format == OutputFormat::csv) {
    out << "t";
    for (int j = cfg.j_min; j <= cfg.j_max; ++j) out << ",abs_Q" << j;
    out << ",boundary_residual\n";
  }
  json jt = json::array();
  for (int i = 0; i < cfg.t_samples; ++i) {
    const double t = cfg.t_start + (cfg.t_end - cfg.t_start) * i / (cfg.t_samples - 1);
    const std::vector<double> one{t};
    const double res = verify_boundary(dd, one, cfg.model);
    if (cfg.format == OutputFormat::csv) {
      out << fmt_num(t);
      for (int j = cfg.j_min; j <= cfg.j_max; ++j)
        out << "," << fmt_num(std::abs(soliton_solution(oct, j, t, cfg.model)));
      out << "," << fmt_num(res) << "\n";
    } else {
      json row;
      row["t"] = t;
      row["boundary_residual"] = res;
      json vals = json::array();
      for (int j = cfg.j_min; j <= cfg.j_max; ++j) {
        const Cx v = soliton_solution(oct, j, t, cfg.model);
        vals.push_back({v.real(), v.imag()});
      }
      row["Q"] = vals;
      jt.push_back(row);
    }
  }
  if (cfg.format == OutputFormat::json) {
    json top;
    top["f1inf"] = dd.f1inf;
    top["branch"] = branch_name(dd.bp.branch);
    top["j_min"] = cfg.j_min;
    top["j_max"] = cfg.j_max;
    top["grid"] = jt;
    out << top.dump(2) << "\n";
  }
  return 0;
}

int run_verify(const RunConfig& cfg) {
  const auto results = run_identity_battery(cfg.verify);
  std::ofstream out(cfg.out_path);
  if (!out) throw ValidationError("output: cannot open '" + cfg.out_path + "'");
  if (cfg.format == OutputFormat::csv) {
    out << "name,residual,tolerance,pass\n";
    for (const auto& r : results)
      out << r.name << "," << fmt_num(r.residual) << "," << fmt_num(r.tolerance) << ","
          << (r.pass ? 1 : 0) << "\n";
  } else {
    json j;
    j["seed"] = cfg.seed;
    j["checks"] = result_to_json(results);
    j["all_pass"] = all_pass(results);
    out << j.dump(2) << "\n";
  }
  for (const auto& r : results)
    std::printf("%-36s %-5s residual %.3e (tol %.1e)\n", r.name.c_str(),
                r.pass ? "pass" : "FAIL", r.residual, r.tolerance);
  return all_pass(results) ? 0 : 3;
}

int run_sweep(const RunConfig& cfg) {
  std::vector<std::future<int>> futs;
  futs.reserve(cfg.runs.size());
  for (const auto& child : cfg.runs)
    futs.push_back(std::async(std::launch::async, [&child] { return run_any(child); }));
  int worst = 0;
  for (auto& f : futs) worst = std::max(worst, f.get());
  return worst;
}

int run_any(const RunConfig& cfg) {
  try {
    switch (cfg.mode) {
      case RunMode::simulate:
        return run_simulate(cfg);
      case RunMode::soliton:
        return run_soliton(cfg);
      case RunMode::verify:
        return run_verify(cfg);
      case RunMode::sweep:
        return run_sweep(cfg);
    }
    return 2;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace allax
