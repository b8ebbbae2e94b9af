#pragma once

// Serialisation and audit reports shared by the command-line tool.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "razavy/errors.hpp"
#include "razavy/format.hpp"
#include "razavy/heun.hpp"
#include "razavy/potential.hpp"
#include "razavy/sampled_function.hpp"
#include "razavy/spectrum.hpp"

namespace razavy {

inline constexpr const char* kSchemaVersion = "1";

// JSON numbers carry the same 9 significant digits as the CSV output.
inline double rounded9(double v) { return std::stod(fmt9(v)); }

// ---------------------------------------------------------------- spectra

inline std::string spectrum_csv(const Spectrum& s) {
  std::ostringstream os;
  os << "m,xi,index,eps,parity,nodes,est_error\n";
  for (const auto& l : s.levels) {
    os << s.params.m << ',' << fmt9(s.params.xi) << ',' << l.index << ',' << fmt9(l.eps) << ','
       << to_string(l.parity) << ',' << l.nodes << ',' << fmt9(l.est_error) << '\n';
  }
  return os.str();
}

inline nlohmann::ordered_json spectrum_json(const Spectrum& s) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["params"] = {{"m", s.params.m}, {"xi", rounded9(s.params.xi)}};
  j["grid"] = {{"half_width", rounded9(s.grid.half_width)}, {"points", s.grid.points}};
  auto levels = nlohmann::ordered_json::array();
  for (const auto& l : s.levels) {
    levels.push_back({{"index", l.index},
                      {"eps", rounded9(l.eps)},
                      {"parity", to_string(l.parity)},
                      {"nodes", l.nodes},
                      {"backend", to_string(l.backend)},
                      {"est_error", rounded9(l.est_error)}});
  }
  j["levels"] = levels;
  auto splits = nlohmann::ordered_json::array();
  for (const auto& sp : s.splittings) splits.push_back({{"pair", sp.pair}, {"value", rounded9(sp.value)}});
  j["splittings"] = splits;
  j["diagnostics"] = s.diagnostics;
  return j;
}

// ---------------------------------------------------------------- samples

inline std::string samples_csv(const SampledFunction& f) {
  std::ostringstream os;
  for (const auto& [k, v] : f.metadata) os << "# " << k << '=' << v << '\n';
  os << "x,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) os << fmt9(f.x[i]) << ',' << fmt9(f.value[i]) << '\n';
  return os.str();
}

inline nlohmann::ordered_json samples_json(const SampledFunction& f) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = f.kind;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : f.metadata) meta[k] = v;
  j["metadata"] = meta;
  auto pts = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < f.size(); ++i) pts.push_back({rounded9(f.x[i]), rounded9(f.value[i])});
  j["samples"] = pts;
  return j;
}

// ---------------------------------------------------------------- published table

struct PublishedRow {
  int m;
  std::array<double, 6> eps;
};

// Published energy levels eps_1..eps_6 for xi = 3, m = -6..12.
inline constexpr double kPublishedXi = 3.0;
inline constexpr std::array<PublishedRow, 19> kPublishedTable{{
    {-6, {21.6608, 35.7557, 51.3448, 68.3341, 86.6500, 106.233}},
    {-5, {18.1891, 31.3844, 46.1503, 62.3746, 79.9715, 98.8740}},
    {-4, {14.6806, 26.9167, 40.8214, 56.2549, 73.1150, 91.3249}},
    {-3, {11.1259, 22.3314, 35.3346, 49.9525, 66.0599, 83.5680}},
    {-2, {7.51110, 17.5996, 29.6610, 43.4412, 58.7838, 75.5860}},
    {-1, {3.81463, 12.6800, 23.7644, 36.6914, 51.2639, 67.3635}},
    {0, {0.00007, 7.51170, 17.6027, 29.6729, 43.4799, 58.8919}},
    {1, {-3.99968, 2.00200, 11.1343, 22.3606, 35.4208, 50.1750}},
    {2, {-8.32288, -3.99300, 4.34771, 14.7494, 27.0959, 41.2385}},
    {3, {-13.2815, -10.6927, -2.64788, 6.87526, 18.5501, 32.1389}},
    {4, {-19.5196, -9.46859, -1.17161, 9.87916, 22.9677, 38.0537}},
    {5, {-27.7547, -15.7094, -9.29612, 1.24110, 13.8439, 28.5940}},
    {6, {-38.0314, -21.6913, -17.5131, -7.12621, 4.89289, 19.3065}},
    {7, {-49.9928, -28.2027, -25.9897, -14.8827, -3.78434, 10.2625}},
    {8, {-63.3335, -35.8866, -21.7455, -12.1464, 1.51447, 17.5661}},
    {9, {-77.8339, -44.5255, -27.8571, -20.2355, -6.89162, 8.76577}},
    {10, {-93.3024, -54.9017, -33.6970, -28.1690, -14.8944, 0.229704}},
    {11, {-109.592, -65.743, -39.7373, -36.1005, -22.4007, -8.04337}},
    {12, {-126.580, -77.2416, -46.3335, -29.3139, -16.0647, 1.06475}},
}};

// Rows from this m on skip or swap members of near-degenerate doublets and are
// compared for information only; rows below it gate the audit.
inline constexpr int kInformationalFromM = 4;

inline constexpr double kDefaultCellTolerance = 5e-3;

enum class CellStatus { match, mismatch, informational };

inline const char* to_string(CellStatus s) {
  switch (s) {
    case CellStatus::match: return "match";
    case CellStatus::mismatch: return "mismatch";
    case CellStatus::informational: return "informational";
  }
  return "?";
}

struct TableCell {
  int m = 0;
  int level = 0;
  double published = 0.0;
  double computed = 0.0;
  double abs_diff = 0.0;
  CellStatus status = CellStatus::match;
};

struct TableDiff {
  double tolerance = kDefaultCellTolerance;
  std::optional<double> half_width;
  std::vector<TableCell> cells;

  int gated() const {
    return int(std::count_if(cells.begin(), cells.end(),
                             [](const TableCell& c) { return c.status != CellStatus::informational; }));
  }
  int count(CellStatus s) const {
    return int(std::count_if(cells.begin(), cells.end(), [s](const TableCell& c) { return c.status == s; }));
  }
  bool all_gated_match() const { return count(CellStatus::mismatch) == 0; }
};

struct Table1Options {
  double tolerance = kDefaultCellTolerance;
  std::optional<double> half_width;
  unsigned threads = 0;  // 0 = serial
};

// Worker cap from RAZAVY_THREADS; unset or unparsable means serial.
inline unsigned threads_from_env() {
  const char* s = std::getenv("RAZAVY_THREADS");
  if (!s || !*s) return 0;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (*end != '\0' || v < 0) return 0;
  return unsigned(std::min<long>(v, 256));
}

struct RowFailure : NumericError {
  RowFailure(int m, int level, const std::string& what)
      : NumericError("m=" + std::to_string(m) + " level=" + std::to_string(level) + ": " + what),
        m(m),
        level(level) {}
  int m;
  int level;
};

inline TableDiff compute_table1(const Table1Options& opts = {}) {
  const std::size_t rows = kPublishedTable.size();
  std::vector<std::vector<TableCell>> out(rows);
  std::vector<std::exception_ptr> errors(rows);

  auto solve_row = [&](std::size_t r) {
    const auto& row = kPublishedTable[r];
    try {
      SpectrumOptions so;
      so.half_width = opts.half_width;
      const auto s = spectrum({row.m, kPublishedXi}, 6, so);
      for (int i = 0; i < 6; ++i) {
        TableCell c;
        c.m = row.m;
        c.level = i + 1;
        c.published = row.eps[i];
        c.computed = s.levels[i].eps;
        c.abs_diff = std::abs(c.computed - c.published);
        if (row.m >= kInformationalFromM) {
          c.status = CellStatus::informational;
        } else {
          c.status = c.abs_diff <= opts.tolerance ? CellStatus::match : CellStatus::mismatch;
        }
        out[r].push_back(c);
      }
    } catch (const std::exception& e) {
      errors[r] = std::make_exception_ptr(RowFailure(row.m, 0, e.what()));
    }
  };

  if (opts.threads == 0) {
    for (std::size_t r = 0; r < rows; ++r) solve_row(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(opts.threads, unsigned(rows));
    for (unsigned t = 0; t < n; ++t) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < rows; r = next++) solve_row(r);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  TableDiff diff;
  diff.tolerance = opts.tolerance;
  diff.half_width = opts.half_width;
  for (auto& r : out) diff.cells.insert(diff.cells.end(), r.begin(), r.end());
  return diff;
}

inline std::string table_summary(const TableDiff& d) {
  std::ostringstream os;
  os << "summary: matched " << d.count(CellStatus::match) << '/' << d.gated()
     << ", mismatched " << d.count(CellStatus::mismatch) << ", informational "
     << d.count(CellStatus::informational) << ", tolerance " << fmt9(d.tolerance);
  return os.str();
}

inline std::string table_csv(const TableDiff& d) {
  std::ostringstream os;
  os << "# xi=" << fmt9(kPublishedXi) << " half_width="
     << (d.half_width ? fmt9(*d.half_width) : std::string("default")) << '\n';
  os << "m,level,published,computed,abs_diff,status\n";
  for (const auto& c : d.cells) {
    os << c.m << ',' << c.level << ',' << fmt9(c.published) << ',' << fmt9(c.computed) << ','
       << fmt9(c.abs_diff) << ',' << to_string(c.status) << '\n';
  }
  os << table_summary(d) << '\n';
  return os.str();
}

inline nlohmann::ordered_json table_json(const TableDiff& d) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["xi"] = kPublishedXi;
  j["tolerance"] = rounded9(d.tolerance);
  if (d.half_width) j["half_width"] = rounded9(*d.half_width); else j["half_width"] = nullptr;
  auto cells = nlohmann::ordered_json::array();
  for (const auto& c : d.cells) {
    cells.push_back({{"m", c.m},
                     {"level", c.level},
                     {"published", rounded9(c.published)},
                     {"computed", rounded9(c.computed)},
                     {"abs_diff", rounded9(c.abs_diff)},
                     {"status", to_string(c.status)}});
  }
  j["cells"] = cells;
  j["summary"] = {{"matched", d.count(CellStatus::match)},
                  {"gated", d.gated()},
                  {"mismatched", d.count(CellStatus::mismatch)},
                  {"informational", d.count(CellStatus::informational)}};
  return j;
}

// ---------------------------------------------------------------- termination

struct TerminationRow {
  int order = 0;   // N
  int m_star = 0;  // -2(N+1)
  bool admissible = false;
};

struct DeltaSample {
  double eps = 0.0;
  int order = 0;
  double mu = 0.0;
  double delta = 0.0;
};

struct TerminationReport {
  PotentialParams params;
  std::vector<TerminationRow> rows;
  std::vector<DeltaSample> deltas;
  bool any_admissible = false;
};

inline constexpr int kMaxTerminationOrder = 20;

inline TerminationReport check_termination(const PotentialParams& p, int n_max,
                                           const std::vector<double>& sample_eps = {-4.0, 0.0, 2.0,
                                                                                    10.0}) {
  validate(p);
  if (n_max < 1 || n_max > kMaxTerminationOrder) {
    throw ParameterError("N_max must be in [1, " + std::to_string(kMaxTerminationOrder) + "]");
  }
  TerminationReport r;
  r.params = p;
  for (int n = 1; n <= n_max; ++n) {
    const int ms = termination_mass_condition(n, p.xi);
    r.rows.push_back({n, ms, ms >= 0});
    r.any_admissible = r.any_admissible || ms >= 0;
  }
  for (double e : sample_eps) {
    const auto h = map_problem_to_heun(p.m, p.xi, e);
    for (int n = 0; n <= n_max; ++n) r.deltas.push_back({e, n, h.mu, delta_determinant(n, h.mu, h)});
  }
  return r;
}

inline std::string termination_text(const TerminationReport& r) {
  std::ostringstream os;
  os << "N,m_star,admissible\n";
  for (const auto& row : r.rows) {
    os << row.order << ',' << row.m_star << ',' << (row.admissible ? "yes" : "no") << '\n';
  }
  os << (r.any_admissible ? "summary: admissible m >= 0 found" : "summary: no admissible m >= 0")
     << '\n';
  os << "# delta determinant at mapped mu, m=" << r.params.m << " xi=" << fmt9(r.params.xi) << '\n';
  os << "eps,N,mu,delta\n";
  for (const auto& d : r.deltas) {
    os << fmt9(d.eps) << ',' << d.order << ',' << fmt9(d.mu) << ',' << fmt9(d.delta) << '\n';
  }
  return os.str();
}

inline nlohmann::ordered_json termination_json(const TerminationReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["params"] = {{"m", r.params.m}, {"xi", rounded9(r.params.xi)}};
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"N", row.order}, {"m_star", row.m_star}, {"admissible", row.admissible}});
  }
  j["rows"] = rows;
  j["summary"] = r.any_admissible ? "admissible m >= 0 found" : "no admissible m >= 0";
  auto ds = nlohmann::ordered_json::array();
  for (const auto& d : r.deltas) {
    ds.push_back({{"eps", rounded9(d.eps)}, {"N", d.order}, {"mu", rounded9(d.mu)},
                  {"delta", rounded9(d.delta)}});
  }
  j["deltas"] = ds;
  return j;
}

}  // namespace razavy
