// SPDX-License-Identifier: Apache-2.0
//
// ma-dfrc: movable-antenna covert dual-functional radar-communication design
// Copyright (C) 2026 The ma-dfrc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "dfrc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dfrc/baselines.hpp"
#include "dfrc/covertness.hpp"
#include "dfrc/scenario.hpp"

#ifndef DFRC_VERSION
#define DFRC_VERSION "unknown"
#endif

namespace dfrc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string>& sweep_schemes() {
  static const std::vector<std::string> names{"upper", "ma", "gas", "fpa"};
  return names;
}

// Runs fn(i) for i in [0, count) on a pool; each index writes its own slot, so
// the result does not depend on scheduling.
void parallel_for(std::size_t count, const ExperimentOptions& options, const std::function<void(std::size_t)>& fn) {
  unsigned threads = options.threads > 0 ? static_cast<unsigned>(options.threads) : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      fn(i);
      const std::size_t d = ++done;
      if (options.progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        options.progress(d, count);
      }
    }
  };
  if (threads == 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

RunRecord make_record(const DesignProblem& problem, const DesignState& state) {
  RunRecord r;
  r.iterations = state.trace.empty() ? 0 : state.trace.back().iteration;
  r.rate_bits = state.trace.empty() ? kNaN : state.trace.back().rate_bits;
  const auto audit = audit_design(problem, state);
  r.ok = audit.passed() && std::isfinite(r.rate_bits);
  if (!audit.passed()) r.note = "audit: " + audit.failures.front();
  return r;
}

RunRecord failed_record(const std::string& what) {
  RunRecord r;
  r.rate_bits = kNaN;
  r.note = what;
  return r;
}

void summarize(SchemeCurve& curve) {
  const std::size_t G = curve.raw.size();
  curve.mean.assign(G, kNaN);
  curve.std_error.assign(G, kNaN);
  curve.count.assign(G, 0);
  for (std::size_t g = 0; g < G; ++g) {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : curve.raw[g]) {
      if (!r.ok) continue;
      sum += r.rate_bits;
      ++n;
    }
    curve.count[g] = n;
    if (n == 0) continue;
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& r : curve.raw[g]) {
      if (r.ok) ss += (r.rate_bits - mean) * (r.rate_bits - mean);
    }
    curve.mean[g] = mean;
    curve.std_error[g] = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  }
}

using Configure = std::function<SystemConfig(const SystemConfig&, double)>;

// Warm start for run_bcd from a design found at a neighbouring grid point.
DesignState restart(DesignState s) {
  s.trace.clear();
  s.warnings.clear();
  s.converged = false;
  return s;
}

// Sweeps visit the grid from the tightest constraint to the loosest one
// (`looser_up`: larger values loosen). Each scheme is solved from scratch and
// again from its own design at the previous point, which stays feasible; the
// better audited result is kept.
ExperimentResult sweep(const std::string& id, const std::string& parameter, const std::string& unit,
                       const SystemConfig& config, const std::vector<double>& grid,
                       const std::vector<std::uint64_t>& seeds, const Configure& configure, bool looser_up,
                       const ExperimentOptions& options) {
  ExperimentResult res;
  res.id = id;
  res.parameter = parameter;
  res.unit = unit;
  res.grid = grid;
  res.seeds = seeds;
  res.config = config;
  res.version = version_string();
  const auto& schemes = sweep_schemes();
  const std::size_t G = grid.size();
  const std::size_t S = seeds.size();
  for (const auto& name : schemes) {
    SchemeCurve c;
    c.scheme = name;
    c.raw.assign(G, std::vector<RunRecord>(S));
    res.curves.push_back(std::move(c));
  }
  std::vector<std::size_t> order(G);
  for (std::size_t g = 0; g < G; ++g) order[g] = g;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return looser_up ? grid[i] < grid[j] : grid[i] > grid[j]; });

  parallel_for(S, options, [&](std::size_t s) {
    std::vector<std::optional<DesignState>> prev(schemes.size());
    for (std::size_t g : order) {
      auto slot = [&](std::size_t scheme) -> RunRecord& { return res.curves[scheme].raw[g][s]; };
      SystemConfig cfg;
      ChannelSet channels;
      try {
        cfg = configure(config, grid[g]);
        cfg.validate();
        channels = sample_scenario(cfg, seeds[s]);
      } catch (const std::exception& e) {
        for (std::size_t k = 0; k < schemes.size(); ++k) slot(k) = failed_record(e.what());
        for (auto& p : prev) p.reset();
        continue;
      }
      auto run = [&](std::size_t k, const BcdOptions& opts, const std::function<DesignState()>& solve) {
        const DesignProblem problem = DesignProblem::make(cfg, channels, opts);
        std::optional<DesignState> best;
        try {
          best = solve();
          slot(k) = make_record(problem, *best);
        } catch (const std::exception& e) {
          slot(k) = failed_record(e.what());
        }
        if (prev[k]) {
          try {
            DesignState warm = run_bcd(problem, restart(*prev[k]));
            const RunRecord rec = make_record(problem, warm);
            if (rec.ok && (!slot(k).ok || rec.rate_bits > slot(k).rate_bits)) {
              slot(k) = rec;
              best = std::move(warm);
            }
          } catch (const std::exception&) {
          }
        }
        if (!slot(k).ok) best.reset();
        prev[k] = best;
        return best;
      };
      run(3, BcdOptions{false, false, true}, [&] { return solve_fpa(cfg, channels); });
      const std::optional<DesignState> gas =
          run(2, BcdOptions{false, false, true}, [&] { return solve_gas(cfg, channels); });
      const std::optional<DesignState> ma = run(1, BcdOptions{}, [&] { return solve_ma(cfg, channels, gas); });
      run(0, BcdOptions{true, true, false}, [&] { return solve_upper_bound(cfg, channels, ma); });
    }
  });

  for (auto& c : res.curves) summarize(c);
  return res;
}

std::string csv_field(const std::string& s) {
  std::string out;
  for (char ch : s) out += (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ? ' ' : ch;
  return out;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
double from_num(const nlohmann::json& j) { return j.is_null() ? kNaN : j.get<double>(); }

}  // namespace

const SchemeCurve* ExperimentResult::curve(const std::string& scheme) const {
  for (const auto& c : curves) {
    if (c.scheme == scheme) return &c;
  }
  return nullptr;
}

std::string version_string() { return DFRC_VERSION; }

std::vector<std::uint64_t> seed_list(const SystemConfig& config, int count) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < count; ++i) seeds.push_back(config.rng_seed + static_cast<std::uint64_t>(i));
  return seeds;
}

std::vector<double> default_power_grid_dbw() { return {9.0, 12.0, 15.0, 18.0, 21.0}; }
std::vector<double> default_snr_grid_db() { return {6.0, 9.0, 12.0, 15.0, 18.0, 21.0}; }
std::vector<double> default_epsilon_grid() { return {0.05, 0.1, 0.2, 0.3, 0.5}; }
std::vector<int> default_convergence_sizes() { return {4, 8}; }

ExperimentResult run_convergence(const SystemConfig& config, const std::vector<std::uint64_t>& seeds,
                                 const std::vector<int>& sizes, const ExperimentOptions& options) {
  ExperimentResult res;
  res.id = "convergence";
  res.parameter = "N";
  res.unit = "antennas";
  for (int n : sizes) res.grid.push_back(n);
  res.seeds = seeds;
  res.config = config;
  res.version = version_string();
  const std::size_t G = sizes.size();
  const std::size_t S = seeds.size();
  SchemeCurve curve;
  curve.scheme = "ma";
  curve.raw.assign(G, std::vector<RunRecord>(S));
  res.traces.assign(G * S, {});

  parallel_for(G * S, options, [&](std::size_t task) {
    const std::size_t g = task / S;
    const std::size_t s = task % S;
    auto& trace = res.traces[task];
    trace.num_antennas = sizes[g];
    trace.seed = seeds[s];
    try {
      SystemConfig cfg = config;
      cfg.num_antennas = sizes[g];
      cfg.validate();
      const ChannelSet channels = sample_scenario(cfg, seeds[s]);
      const DesignProblem problem = DesignProblem::make(cfg, channels);
      const DesignState st = run_bcd(problem);
      trace.entries = st.trace;
      curve.raw[g][s] = make_record(problem, st);
    } catch (const std::exception& e) {
      curve.raw[g][s] = failed_record(e.what());
    }
  });

  for (const auto& tr : res.traces) {
    for (std::size_t i = 1; i < tr.entries.size(); ++i) {
      if (tr.entries[i].f1 < tr.entries[i - 1].f1 - 1e-6) {
        throw Error("convergence: objective decreased at iteration " + std::to_string(tr.entries[i].iteration) +
                    " (N=" + std::to_string(tr.num_antennas) + ", seed " + std::to_string(tr.seed) + ")");
      }
    }
  }
  summarize(curve);
  res.curves.push_back(std::move(curve));
  return res;
}

ExperimentResult run_power_sweep(const SystemConfig& config, const std::vector<double>& power_dbw,
                                 const std::vector<std::uint64_t>& seeds, const ExperimentOptions& options) {
  return sweep("power", "P_t", "dBW", config, power_dbw, seeds,
               [](const SystemConfig& c, double v) {
                 SystemConfig out = c;
                 out.total_power = db_to_linear(v);
                 return out;
               },
               true, options);
}

ExperimentResult run_snr_tradeoff(const SystemConfig& config, const std::vector<double>& gamma_db,
                                  const std::vector<std::uint64_t>& seeds, const ExperimentOptions& options) {
  return sweep("snr", "Gamma", "dB", config, gamma_db, seeds,
               [](const SystemConfig& c, double v) {
                 SystemConfig out = c;
                 out.radar_snr_threshold = db_to_linear(v);
                 return out;
               },
               false, options);
}

ExperimentResult run_epsilon_sweep(const SystemConfig& config, const std::vector<double>& epsilon,
                                   const std::vector<std::uint64_t>& seeds, const ExperimentOptions& options) {
  return sweep("epsilon", "epsilon", "", config, epsilon, seeds,
               [](const SystemConfig& c, double v) {
                 SystemConfig out = c;
                 out.covertness_level = v;
                 return out;
               },
               true, options);
}

std::vector<std::string> experiment_names() { return {"convergence", "power", "snr", "epsilon"}; }

ExperimentResult run_experiment(const std::string& name, const SystemConfig& config,
                                const std::vector<std::uint64_t>& seeds, const ExperimentOptions& options,
                                const std::vector<double>& grid) {
  auto pick = [&](std::vector<double> fallback) { return grid.empty() ? fallback : grid; };
  if (name == "convergence") {
    std::vector<int> sizes = default_convergence_sizes();
    if (!grid.empty()) {
      sizes.clear();
      for (double v : grid) {
        if (v < 1.0 || v != std::floor(v)) throw Error("convergence grid values must be positive integers");
        sizes.push_back(static_cast<int>(v));
      }
    }
    return run_convergence(config, seeds, sizes, options);
  }
  if (name == "power") return run_power_sweep(config, pick(default_power_grid_dbw()), seeds, options);
  if (name == "snr") return run_snr_tradeoff(config, pick(default_snr_grid_db()), seeds, options);
  if (name == "epsilon") return run_epsilon_sweep(config, pick(default_epsilon_grid()), seeds, options);
  throw Error("unknown experiment '" + name + "' (expected convergence, power, snr or epsilon)");
}

// ---------------------------------------------------------------------------
// Emission.

void write_csv(std::ostream& out, const ExperimentResult& r) {
  out << "experiment,parameter,value,scheme,seed,rate_bits,iterations,status\n";
  for (const auto& c : r.curves) {
    for (std::size_t g = 0; g < r.grid.size(); ++g) {
      for (std::size_t s = 0; s < r.seeds.size(); ++s) {
        const RunRecord& rec = c.raw[g][s];
        out << r.id << ',' << r.parameter << ',' << fmt(r.grid[g]) << ',' << c.scheme << ',' << r.seeds[s] << ','
            << fmt(rec.rate_bits) << ',' << rec.iterations << ',' << (rec.ok ? "ok" : csv_field(rec.note)) << '\n';
      }
    }
  }
}

void write_trace_csv(std::ostream& out, const ExperimentResult& r) {
  out << "num_antennas,seed,iteration,f1_nats,rate_bits,radar_snr,covert_ratio\n";
  for (const auto& tr : r.traces) {
    for (const auto& e : tr.entries) {
      out << tr.num_antennas << ',' << tr.seed << ',' << e.iteration << ',' << fmt(e.f1) << ',' << fmt(e.rate_bits)
          << ',' << fmt(e.radar_snr) << ',' << fmt(e.covert_ratio) << '\n';
    }
  }
}

void write_json(std::ostream& out, const ExperimentResult& r) {
  using nlohmann::json;
  json j;
  j["id"] = r.id;
  j["parameter"] = r.parameter;
  j["unit"] = r.unit;
  j["version"] = r.version;
  j["grid"] = r.grid;
  j["seeds"] = r.seeds;
  std::ostringstream cfg;
  write_config(cfg, r.config);
  j["config"] = cfg.str();
  j["curves"] = json::array();
  for (const auto& c : r.curves) {
    json jc;
    jc["scheme"] = c.scheme;
    jc["mean"] = json::array();
    jc["std_error"] = json::array();
    for (std::size_t g = 0; g < c.mean.size(); ++g) {
      jc["mean"].push_back(num(c.mean[g]));
      jc["std_error"].push_back(num(c.std_error[g]));
    }
    jc["count"] = c.count;
    jc["raw"] = json::array();
    for (const auto& row : c.raw) {
      json jr = json::array();
      for (const auto& rec : row) {
        jr.push_back({{"rate_bits", num(rec.rate_bits)}, {"iterations", rec.iterations}, {"ok", rec.ok},
                      {"note", rec.note}});
      }
      jc["raw"].push_back(std::move(jr));
    }
    j["curves"].push_back(std::move(jc));
  }
  j["traces"] = json::array();
  for (const auto& tr : r.traces) {
    json jt;
    jt["num_antennas"] = tr.num_antennas;
    jt["seed"] = tr.seed;
    jt["entries"] = json::array();
    for (const auto& e : tr.entries) {
      jt["entries"].push_back({{"iteration", e.iteration}, {"f1", num(e.f1)}, {"rate_bits", num(e.rate_bits)},
                               {"radar_snr", num(e.radar_snr)}, {"covert_ratio", num(e.covert_ratio)}});
    }
    j["traces"].push_back(std::move(jt));
  }
  out << j.dump(2) << '\n';
}

ExperimentResult read_json(std::istream& in) {
  using nlohmann::json;
  const json j = json::parse(in);
  ExperimentResult r;
  r.id = j.at("id").get<std::string>();
  r.parameter = j.at("parameter").get<std::string>();
  r.unit = j.at("unit").get<std::string>();
  r.version = j.at("version").get<std::string>();
  r.grid = j.at("grid").get<std::vector<double>>();
  r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  std::istringstream cfg(j.at("config").get<std::string>());
  r.config = parse_config(cfg, "<json>");
  for (const auto& jc : j.at("curves")) {
    SchemeCurve c;
    c.scheme = jc.at("scheme").get<std::string>();
    for (const auto& v : jc.at("mean")) c.mean.push_back(from_num(v));
    for (const auto& v : jc.at("std_error")) c.std_error.push_back(from_num(v));
    c.count = jc.at("count").get<std::vector<int>>();
    for (const auto& jr : jc.at("raw")) {
      std::vector<RunRecord> row;
      for (const auto& jrec : jr) {
        RunRecord rec;
        rec.rate_bits = from_num(jrec.at("rate_bits"));
        rec.iterations = jrec.at("iterations").get<int>();
        rec.ok = jrec.at("ok").get<bool>();
        rec.note = jrec.at("note").get<std::string>();
        row.push_back(std::move(rec));
      }
      c.raw.push_back(std::move(row));
    }
    r.curves.push_back(std::move(c));
  }
  for (const auto& jt : j.at("traces")) {
    ConvergenceTrace tr;
    tr.num_antennas = jt.at("num_antennas").get<int>();
    tr.seed = jt.at("seed").get<std::uint64_t>();
    for (const auto& je : jt.at("entries")) {
      TraceEntry e;
      e.iteration = je.at("iteration").get<int>();
      e.f1 = from_num(je.at("f1"));
      e.rate_bits = from_num(je.at("rate_bits"));
      e.radar_snr = from_num(je.at("radar_snr"));
      e.covert_ratio = from_num(je.at("covert_ratio"));
      tr.entries.push_back(e);
    }
    r.traces.push_back(std::move(tr));
  }
  return r;
}

namespace {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x, y, err;
};

std::string color_for(const std::string& scheme, std::size_t index) {
  if (scheme == "upper") return "#444444";
  if (scheme == "ma") return "#d62728";
  if (scheme == "gas") return "#1f77b4";
  if (scheme == "fpa") return "#2ca02c";
  static const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  return palette[index % 6];
}

std::string num_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

void plot_svg(std::ostream& out, const std::string& title, const std::string& xlabel, const std::string& ylabel,
              const std::vector<Series>& series) {
  const double W = 640, H = 420, left = 70, right = 150, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      const double e = std::isfinite(s.err[i]) ? s.err[i] : 0.0;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i] - e);
      ymax = std::max(ymax, s.y[i] + e);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << coord(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(title) << "</text>\n";
  out << "<rect x=\"" << coord(left) << "\" y=\"" << coord(top) << "\" width=\"" << coord(pw) << "\" height=\""
      << coord(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    out << "<line x1=\"" << coord(px(xv)) << "\" y1=\"" << coord(top + ph) << "\" x2=\"" << coord(px(xv))
        << "\" y2=\"" << coord(top + ph + 5) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << coord(px(xv)) << "\" y=\"" << coord(top + ph + 18) << "\" text-anchor=\"middle\">"
        << num_text(xv) << "</text>\n";
    out << "<line x1=\"" << coord(left - 5) << "\" y1=\"" << coord(py(yv)) << "\" x2=\"" << coord(left)
        << "\" y2=\"" << coord(py(yv)) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << coord(left - 8) << "\" y=\"" << coord(py(yv) + 4) << "\" text-anchor=\"end\">"
        << num_text(yv) << "</text>\n";
  }
  out << "<text x=\"" << coord(left + pw / 2) << "\" y=\"" << coord(H - 18) << "\" text-anchor=\"middle\">"
      << xml_escape(xlabel) << "</text>\n";
  out << "<text transform=\"translate(18 " << coord(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << xml_escape(ylabel) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      if (!points.empty()) points += ' ';
      points += coord(px(s.x[i])) + ',' + coord(py(s.y[i]));
    }
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"" << points
        << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      const double e = std::isfinite(s.err[i]) ? s.err[i] : 0.0;
      if (e > 0.0) {
        out << "<line x1=\"" << coord(px(s.x[i])) << "\" y1=\"" << coord(py(s.y[i] - e)) << "\" x2=\""
            << coord(px(s.x[i])) << "\" y2=\"" << coord(py(s.y[i] + e)) << "\" stroke=\"" << s.color << "\"/>\n";
      }
      out << "<circle cx=\"" << coord(px(s.x[i])) << "\" cy=\"" << coord(py(s.y[i])) << "\" r=\"3\" fill=\""
          << s.color << "\"/>\n";
    }
    const double ly = top + 16 + 18 * static_cast<double>(k);
    out << "<line x1=\"" << coord(left + pw + 12) << "\" y1=\"" << coord(ly) << "\" x2=\"" << coord(left + pw + 36)
        << "\" y2=\"" << coord(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << coord(left + pw + 42) << "\" y=\"" << coord(ly + 4) << "\">" << xml_escape(s.label)
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

void write_svg(std::ostream& out, const ExperimentResult& r) {
  std::vector<Series> series;
  if (!r.traces.empty()) {
    // Mean covert rate per iteration for each array size; finished traces hold
    // their last value.
    for (std::size_t g = 0; g < r.grid.size(); ++g) {
      const int n = static_cast<int>(r.grid[g]);
      std::size_t len = 0;
      for (const auto& tr : r.traces) {
        if (tr.num_antennas == n) len = std::max(len, tr.entries.size());
      }
      Series s;
      s.label = "N = " + std::to_string(n);
      s.color = color_for("", g);
      for (std::size_t i = 0; i < len; ++i) {
        double sum = 0.0, sq = 0.0;
        int cnt = 0;
        for (const auto& tr : r.traces) {
          if (tr.num_antennas != n || tr.entries.empty()) continue;
          const double v = tr.entries[std::min(i, tr.entries.size() - 1)].rate_bits;
          sum += v;
          sq += v * v;
          ++cnt;
        }
        const double mean = cnt ? sum / cnt : kNaN;
        const double var = cnt > 1 ? std::max(0.0, (sq - cnt * mean * mean) / (cnt - 1)) : 0.0;
        s.x.push_back(static_cast<double>(i));
        s.y.push_back(mean);
        s.err.push_back(cnt > 1 ? std::sqrt(var / cnt) : 0.0);
      }
      series.push_back(std::move(s));
    }
    plot_svg(out, "Convergence of the proposed scheme", "iteration", "covert sum rate (bits/s/Hz)", series);
    return;
  }
  for (std::size_t k = 0; k < r.curves.size(); ++k) {
    const auto& c = r.curves[k];
    Series s;
    s.label = c.scheme;
    s.color = color_for(c.scheme, k);
    s.x = r.grid;
    s.y = c.mean;
    s.err = c.std_error;
    series.push_back(std::move(s));
  }
  const std::string xlabel = r.unit.empty() ? r.parameter : r.parameter + " (" + r.unit + ")";
  plot_svg(out, "Covert sum rate versus " + r.parameter, xlabel, "covert sum rate (bits/s/Hz)", series);
}

std::vector<std::string> emit(const ExperimentResult& result, const std::vector<std::string>& formats,
                              const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory '" + dir + "'");
  std::vector<std::string> written;
  auto open = [&](const std::string& name) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    written.push_back(path);
    return f;
  };
  for (const auto& fmt_name : formats) {
    if (fmt_name == "csv") {
      auto f = open(result.id + ".csv");
      write_csv(f, result);
      if (!result.traces.empty()) {
        auto t = open(result.id + "_traces.csv");
        write_trace_csv(t, result);
      }
    } else if (fmt_name == "json") {
      auto f = open(result.id + ".json");
      write_json(f, result);
    } else if (fmt_name == "svg") {
      auto f = open(result.id + ".svg");
      write_svg(f, result);
    } else {
      throw Error("unknown output format '" + fmt_name + "' (expected csv, json or svg)");
    }
  }
  return written;
}

}  // namespace dfrc
