#pragma once

// Command-line front end. Kept in a header so tests can drive it in-process.
//
//   razavy solve | table1 | potential | wavefunction | heun | check-termination
//
// Exit codes: 0 ok, 1 usage or bad arguments, 2 numeric failure,
// 3 table1 finished but gated cells disagree with the published values.

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "razavy/errors.hpp"
#include "razavy/heun.hpp"
#include "razavy/numerov.hpp"
#include "razavy/potential.hpp"
#include "razavy/report.hpp"
#include "razavy/spectrum.hpp"

namespace razavy::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumeric = 2, kTableMismatch = 3 };

struct RunConfig {
  int m = 0;
  double xi = 3.0;
  int levels = 6;
  int level = 1;
  std::string backend = "fd";
  std::optional<double> half_width;
  std::optional<int> points;
  std::string parity = "full";
  std::optional<double> tol;
  std::string format = "csv";
  std::string out;
  std::string config;
  double z = 0.0;
  double eps = 0.0;
  int n_max = 6;
};

namespace detail {

inline std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

inline int fail(std::ostream& err, int code, const std::string& kind, const std::string& msg) {
  err << "error: " << kind << ": " << one_line(msg) << '\n';
  return code;
}

// Keys of the JSON config file mirror the long flag names.
inline void apply_config(const std::string& path, RunConfig& cfg, const CLI::App& cmd) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ParameterError("config file must hold a JSON object");
  const std::map<std::string, std::function<void(const nlohmann::json&)>> setters{
      {"m", [&](const nlohmann::json& v) { cfg.m = v.get<int>(); }},
      {"xi", [&](const nlohmann::json& v) { cfg.xi = v.get<double>(); }},
      {"levels", [&](const nlohmann::json& v) { cfg.levels = v.get<int>(); }},
      {"level", [&](const nlohmann::json& v) { cfg.level = v.get<int>(); }},
      {"backend", [&](const nlohmann::json& v) { cfg.backend = v.get<std::string>(); }},
      {"half-width", [&](const nlohmann::json& v) { cfg.half_width = v.get<double>(); }},
      {"points", [&](const nlohmann::json& v) { cfg.points = v.get<int>(); }},
      {"parity", [&](const nlohmann::json& v) { cfg.parity = v.get<std::string>(); }},
      {"tol", [&](const nlohmann::json& v) { cfg.tol = v.get<double>(); }},
      {"format", [&](const nlohmann::json& v) { cfg.format = v.get<std::string>(); }},
      {"out", [&](const nlohmann::json& v) { cfg.out = v.get<std::string>(); }},
      {"z", [&](const nlohmann::json& v) { cfg.z = v.get<double>(); }},
      {"eps", [&](const nlohmann::json& v) { cfg.eps = v.get<double>(); }},
      {"n-max", [&](const nlohmann::json& v) { cfg.n_max = v.get<int>(); }},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParameterError("unknown config key '" + key + "'");
    const auto* opt = cmd.get_option_no_throw("--" + key);
    if (opt && opt->count() > 0) continue;  // flags win
    try {
      it->second(value);
    } catch (const nlohmann::json::exception&) {
      throw ParameterError("config key '" + key + "' has the wrong type");
    }
  }
}

inline void check_common(const RunConfig& cfg) {
  validate(PotentialParams{cfg.m, cfg.xi});
  if (cfg.format != "csv" && cfg.format != "json") {
    throw ParameterError("format must be csv or json, got '" + cfg.format + "'");
  }
  if (!parse_backend(cfg.backend)) {
    throw ParameterError("backend must be fd, numerov or heun-z, got '" + cfg.backend + "'");
  }
  if (cfg.parity != "even" && cfg.parity != "odd" && cfg.parity != "full") {
    throw ParameterError("parity must be even, odd or full, got '" + cfg.parity + "'");
  }
  if (cfg.levels < 1 || cfg.levels > kMaxLevels) {
    throw ParameterError("levels must be in [1, " + std::to_string(kMaxLevels) + "], got " +
                         std::to_string(cfg.levels));
  }
  if (cfg.level < 1 || cfg.level > kMaxLevels) {
    throw ParameterError("level must be in [1, " + std::to_string(kMaxLevels) + "], got " +
                         std::to_string(cfg.level));
  }
  if (cfg.points && *cfg.points < 2) throw ParameterError("points must be >= 2");
  if (cfg.half_width && !(*cfg.half_width > 0.0)) throw ParameterError("half-width must be positive");
  if (cfg.tol && !(*cfg.tol > 0.0)) throw ParameterError("tol must be positive");
}

inline void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw ParameterError("cannot write output file " + cfg.out);
  f << text;
}

inline std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

inline SpectrumOptions spectrum_options(const RunConfig& cfg) {
  SpectrumOptions o;
  o.backend = *parse_backend(cfg.backend);
  o.half_width = cfg.half_width;
  if (cfg.points) {
    if (*cfg.points < kMinGridPoints) {
      throw ParameterError("points must be >= " + std::to_string(kMinGridPoints) + " for solves");
    }
    o.points = *cfg.points;
  }
  if (cfg.tol) o.tol = *cfg.tol;
  return o;
}

inline int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  auto o = spectrum_options(cfg);
  if (cfg.parity == "even") o.sector_only = Parity::even;
  if (cfg.parity == "odd") o.sector_only = Parity::odd;
  const auto s = spectrum({cfg.m, cfg.xi}, cfg.levels, o);
  emit(cfg, cfg.format == "json" ? dump(spectrum_json(s)) : spectrum_csv(s), out);
  return kOk;
}

inline int cmd_table1(const RunConfig& cfg, std::ostream& out) {
  Table1Options o;
  o.tolerance = cfg.tol.value_or(kDefaultCellTolerance);
  o.half_width = cfg.half_width;
  o.threads = threads_from_env();
  const auto d = compute_table1(o);
  emit(cfg, cfg.format == "json" ? dump(table_json(d)) : table_csv(d), out);
  return d.all_gated_match() ? kOk : kTableMismatch;
}

inline int cmd_potential(const RunConfig& cfg, std::ostream& out) {
  const auto f = sample_potential({cfg.m, cfg.xi}, cfg.half_width.value_or(2.0), cfg.points.value_or(401));
  emit(cfg, cfg.format == "json" ? dump(samples_json(f)) : samples_csv(f), out);
  return kOk;
}

inline int cmd_wavefunction(const RunConfig& cfg, std::ostream& out) {
  const PotentialParams p{cfg.m, cfg.xi};
  auto o = spectrum_options(cfg);
  o.count_nodes = false;
  const auto s = spectrum(p, cfg.level, o);
  const auto& lvl = s.levels.back();
  const auto ef = eigenfunction(p, lvl.eps, s.grid, lvl.parity);
  SampledFunction f = ef.samples;
  f.metadata.insert(f.metadata.begin() + 2, {"level", std::to_string(cfg.level)});
  emit(cfg, cfg.format == "json" ? dump(samples_json(f)) : samples_csv(f), out);
  return kOk;
}

inline int cmd_heun(const RunConfig& cfg, std::ostream& out) {
  const auto h = map_problem_to_heun(cfg.m, cfg.xi, cfg.eps);
  const auto r = heun_series(h, cfg.z, cfg.tol.value_or(1e-15));
  if (cfg.format == "json") {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["params"] = {{"m", cfg.m}, {"xi", rounded9(cfg.xi)}, {"eps", rounded9(cfg.eps)}};
    j["heun"] = {{"alpha", rounded9(h.alpha)}, {"beta", rounded9(h.beta)}, {"gamma", rounded9(h.gamma)},
                 {"delta", rounded9(h.delta)}, {"eta", rounded9(h.eta)}, {"mu", rounded9(h.mu)},
                 {"nu", rounded9(h.nu)}};
    j["z"] = rounded9(cfg.z);
    j["value"] = rounded9(r.value);
    j["terms_used"] = r.terms_used;
    j["converged"] = r.converged;
    j["tail_bound"] = rounded9(r.tail_bound);
    emit(cfg, dump(j), out);
  } else {
    std::ostringstream os;
    os << "alpha=" << fmt9(h.alpha) << "\nbeta=" << fmt9(h.beta) << "\ngamma=" << fmt9(h.gamma)
       << "\ndelta=" << fmt9(h.delta) << "\neta=" << fmt9(h.eta) << "\nmu=" << fmt9(h.mu)
       << "\nnu=" << fmt9(h.nu) << "\nz=" << fmt9(cfg.z) << "\nvalue=" << fmt9(r.value)
       << "\nterms_used=" << r.terms_used << "\nconverged=" << (r.converged ? "true" : "false")
       << "\ntail_bound=" << fmt9(r.tail_bound) << '\n';
    emit(cfg, os.str(), out);
  }
  return kOk;
}

inline int cmd_check_termination(const RunConfig& cfg, std::ostream& out) {
  const auto r = check_termination({cfg.m, cfg.xi}, cfg.n_max);
  emit(cfg, cfg.format == "json" ? dump(termination_json(r)) : termination_text(r), out);
  return kOk;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Bound states of the Razavy double-well potential", "razavy"};
  app.require_subcommand(1);

  auto add_common = [&cfg](CLI::App* c) {
    c->add_option("--m", cfg.m, "well-shape parameter m");
    c->add_option("--xi", cfg.xi, "coupling xi > 0");
    c->add_option("--levels", cfg.levels, "number of levels (1..12)");
    c->add_option("--level", cfg.level, "level index (1..12)");
    c->add_option("--backend", cfg.backend, "fd | numerov | heun-z");
    c->add_option("--half-width", cfg.half_width, "domain half-width L");
    c->add_option("--points", cfg.points, "grid points");
    c->add_option("--parity", cfg.parity, "even | odd | full");
    c->add_option("--tol", cfg.tol, "solver tolerance (table1: cell tolerance)");
    c->add_option("--format", cfg.format, "csv | json");
    c->add_option("--out", cfg.out, "output file (default stdout)");
    c->add_option("--config", cfg.config, "JSON file with the same keys as the flags");
  };

  struct Command {
    CLI::App* app;
    std::function<int(const RunConfig&, std::ostream&)> fn;
  };
  std::vector<Command> commands;
  auto* solve = app.add_subcommand("solve", "lowest levels of the spectrum");
  add_common(solve);
  commands.push_back({solve, detail::cmd_solve});
  auto* table = app.add_subcommand("table1", "recompute the published table and diff it");
  add_common(table);
  commands.push_back({table, detail::cmd_table1});
  auto* pot = app.add_subcommand("potential", "sample the potential on [-L, L]");
  add_common(pot);
  commands.push_back({pot, detail::cmd_potential});
  auto* wf = app.add_subcommand("wavefunction", "normalised eigenfunction of one level");
  add_common(wf);
  commands.push_back({wf, detail::cmd_wavefunction});
  auto* heun = app.add_subcommand("heun", "confluent Heun series at z inside the unit disk");
  add_common(heun);
  heun->add_option("--z", cfg.z, "series argument, |z| <= 0.95");
  heun->add_option("--eps", cfg.eps, "scaled energy eps");
  commands.push_back({heun, detail::cmd_heun});
  auto* term = app.add_subcommand("check-termination", "polynomial termination conditions");
  add_common(term);
  term->add_option("--n-max", cfg.n_max, "largest termination order N (<= 20)");
  commands.push_back({term, detail::cmd_check_termination});

  std::vector<std::string> argv_store{"razavy"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    return detail::fail(err, kUsage, "usage", e.what());
  }

  for (const auto& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      if (!cfg.config.empty()) detail::apply_config(cfg.config, cfg, *c.app);
      detail::check_common(cfg);
      return c.fn(cfg, out);
    } catch (const RowFailure& e) {
      return detail::fail(err, kNumeric, "numeric", e.what());
    } catch (const ParameterError& e) {
      return detail::fail(err, kUsage, "parameter", e.what());
    } catch (const DomainError& e) {
      return detail::fail(err, kUsage, "domain", e.what());
    } catch (const RangeError& e) {
      return detail::fail(err, kUsage, "range", e.what());
    } catch (const ConfigError& e) {
      return detail::fail(err, kUsage, "config", e.what());
    } catch (const NumericError& e) {
      return detail::fail(err, kNumeric, "numeric", e.what());
    } catch (const ConsistencyError& e) {
      return detail::fail(err, kNumeric, "consistency", e.what());
    } catch (const std::exception& e) {
      return detail::fail(err, kNumeric, "internal", e.what());
    }
  }
  return detail::fail(err, kUsage, "usage", "no subcommand given");
}

}  // namespace razavy::cli
