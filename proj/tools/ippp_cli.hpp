// SPDX-License-Identifier: Apache-2.0
#pragma once

// Command-line front end. run() is separate from main() so tests can drive it
// with in-memory streams.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ippp/ippp.hpp"

namespace ippp::cli {

/// Bad flags or flag values; exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal that round-trips, always with a decimal point or exponent.
inline std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  std::string text(buffer, result.ptr);
  if (text.find_first_of(".e") == std::string::npos) text += ".0";
  return text;
}

inline double parse_number(const std::string& text, const std::string& flag) {
  if (text == "inf" || text == "+inf") return kInfinity;
  if (text == "-inf") return -kInfinity;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError(flag + ": not a number: '" + text + "'");
  }
  if (used != text.size()) throw UsageError(flag + ": not a number: '" + text + "'");
  return value;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) values.push_back(parse_number(item, flag));
  return values;
}

struct Options {
  std::string rate;
  std::string rate_family;
  std::vector<std::string> params;
  std::vector<std::string> domain;
  std::optional<double> bound;
  std::vector<double> window;
  std::optional<std::uint64_t> seed;
  std::uint64_t stream = 0;
  double tol = kDefaultTolerance;
  std::string format = "csv";
  std::string out;
  std::uint64_t reps = 1;
  std::uint64_t count = 0;
  std::string method = "rejection";
  double from = 0.0;
  long long n = 1;
  std::string direction = "up";
  long long k = 1;
  long long m = 1;
  std::vector<std::string> grid;
};

inline RateModel build_model(const Options& o) {
  const bool has_expr = !o.rate.empty();
  const bool has_family = !o.rate_family.empty();
  if (has_expr && has_family) throw UsageError("conflicting rate sources: give either --rate or --rate-family");
  if (!has_expr && !has_family) throw UsageError("missing rate: give --rate or --rate-family");
  if (has_expr && !o.params.empty()) throw UsageError("--params only applies to --rate-family");

  std::optional<RateModel> model;
  if (has_expr) {
    try {
      model = RateModel::from_expression(o.rate);
    } catch (const PositionedError& e) {
      throw UsageError(std::string("--rate: ") + e.what());
    }
  } else {
    std::map<std::string, std::string> params;
    for (const auto& p : o.params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("--params: expected key=value, got '" + p + "'");
      params[p.substr(0, eq)] = p.substr(eq + 1);
    }
    auto take = [&](const std::string& key, std::optional<double> fallback = std::nullopt) {
      const auto it = params.find(key);
      if (it == params.end()) {
        if (fallback) return *fallback;
        throw UsageError("--params: rate family '" + o.rate_family + "' requires " + key + "=");
      }
      const double value = parse_number(it->second, "--params " + key);
      params.erase(it);
      return value;
    };
    auto take_list = [&](const std::string& key) {
      const auto it = params.find(key);
      if (it == params.end()) throw UsageError("--params: rate family 'pwconst' requires " + key + "=");
      auto values = parse_list(it->second, "--params " + key);
      params.erase(it);
      return values;
    };
    try {
      if (o.rate_family == "constant") {
        model = RateModel::constant(take("c"));
      } else if (o.rate_family == "linear") {
        const double a = take("a");
        model = RateModel::linear(a, take("b"));
      } else if (o.rate_family == "pwconst") {
        auto breaks = take_list("breaks");
        model = RateModel::piecewise_constant(std::move(breaks), take_list("values"));
      } else if (o.rate_family == "sin") {
        const double a = take("a");
        const double b = take("b");
        const double omega = take("omega", 1.0);
        model = RateModel::sinusoidal(a, b, omega, take("phi", 0.0));
      } else {
        throw UsageError("--rate-family: unknown family '" + o.rate_family + "' (constant|linear|pwconst|sin)");
      }
    } catch (const InvalidParameter& e) {
      throw UsageError(std::string("--params: ") + e.what());
    }
    if (!params.empty()) throw UsageError("--params: unknown key '" + params.begin()->first + "'");
  }

  try {
    if (!o.domain.empty())
      model = model->with_domain({parse_number(o.domain[0], "--domain"), parse_number(o.domain[1], "--domain")});
    if (o.bound) model = model->with_declared_bound(*o.bound);
  } catch (const InvalidParameter& e) {
    throw UsageError(std::string(o.domain.empty() ? "--bound: " : "--domain: ") + e.what());
  }
  return *model;
}

inline Interval build_window(const Options& o) {
  try {
    return Interval(o.window.at(0), o.window.at(1));
  } catch (const InvalidInterval& e) {
    throw UsageError(std::string("--window: ") + e.what());
  }
}

inline Direction build_direction(const Options& o) {
  if (o.direction == "up") return Direction::above;
  if (o.direction == "down") return Direction::below;
  throw UsageError("--direction: expected up or down");
}

inline std::vector<double> build_grid(const Options& o) {
  const double lo = parse_number(o.grid.at(0), "--grid");
  const double hi = parse_number(o.grid.at(1), "--grid");
  long long steps = 0;
  const std::string& text = o.grid.at(2);
  const auto parsed = std::from_chars(text.data(), text.data() + text.size(), steps);
  if (parsed.ec != std::errc() || parsed.ptr != text.data() + text.size() || steps < 1)
    throw UsageError("--grid: steps must be a positive integer");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) throw UsageError("--grid: requires finite lo < hi");
  std::vector<double> points;
  points.reserve(static_cast<std::size_t>(steps) + 1);
  for (long long i = 0; i <= steps; ++i)
    points.push_back(i == steps ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps));
  return points;
}

/// argv joined with shell-style quoting where needed, omitting --out.
inline std::string canonical_command(const std::vector<std::string>& args) {
  std::string joined;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    if (!joined.empty()) joined += ' ';
    const bool plain = !args[i].empty() && args[i].find_first_of(" \t\"'\\$`*?;&|<>()") == std::string::npos;
    if (plain) {
      joined += args[i];
    } else {
      joined += '"';
      for (char c : args[i]) {
        if (c == '"' || c == '\\' || c == '$' || c == '`') joined += '\\';
        joined += c;
      }
      joined += '"';
    }
  }
  return joined;
}

class Emitter {
 public:
  Emitter(const Options& o, std::string command) : options_(o), command_(std::move(command)) {}

  std::string csv_header() const {
    return std::string("# ippp ") + kVersion + " seed=" + (options_.seed ? std::to_string(*options_.seed) : "none") +
           " stream=" + std::to_string(options_.stream) + " cmd=" + command_ + "\n";
  }

  nlohmann::ordered_json meta(const std::string& subcommand) const {
    nlohmann::ordered_json meta;
    meta["version"] = kVersion;
    meta["command"] = subcommand;
    meta["argv"] = command_;
    if (options_.seed) {
      meta["seed"] = *options_.seed;
      meta["stream"] = options_.stream;
    } else {
      meta["seed"] = nullptr;
      meta["stream"] = nullptr;
    }
    meta["tol"] = options_.tol;
    return meta;
  }

 private:
  const Options& options_;
  std::string command_;
};

inline void require_seed(const Options& o, const std::string& subcommand) {
  if (!o.seed) throw UsageError("--seed is required for '" + subcommand + "'");
}

inline void forbid_seed(const Options& o, const std::string& subcommand) {
  if (o.seed) throw UsageError("--seed is not accepted by '" + subcommand + "' (nothing is sampled)");
}

inline std::string run_intensity(const Options& o, const Emitter& emit) {
  forbid_seed(o, "intensity");
  const RateModel model = build_model(o);
  const Interval window = build_window(o);
  const double mass = expected_count(model, window, o.tol);
  if (o.format == "json") {
    nlohmann::ordered_json doc;
    doc["meta"] = emit.meta("intensity");
    doc["meta"]["model"] = model.description();
    doc["meta"]["window"] = {window.lo(), window.hi()};
    doc["value"] = mass;
    return doc.dump(2) + "\n";
  }
  return format_number(mass) + "\n";
}

inline std::string emit_event_sets(const Options& o, const Emitter& emit, const std::string& subcommand,
                                   const RateModel& model, const Interval& window, const std::string& method,
                                   const std::vector<EventSet>& sets) {
  if (o.format == "json") {
    nlohmann::ordered_json doc;
    doc["meta"] = emit.meta(subcommand);
    doc["meta"]["model"] = model.description();
    doc["meta"]["method"] = method;
    doc["meta"]["window"] = {window.lo(), window.hi()};
    doc["meta"]["reps"] = o.reps;
    if (subcommand == "simulate-n") doc["meta"]["count"] = o.count;
    doc["points"] = nlohmann::ordered_json::array();
    for (const auto& set : sets) doc["points"].push_back(set.points());
    return doc.dump(2) + "\n";
  }
  std::string text = emit.csv_header() + "rep,point\n";
  for (std::size_t rep = 0; rep < sets.size(); ++rep)
    for (double p : sets[rep].points()) text += std::to_string(rep) + "," + format_number(p) + "\n";
  return text;
}

inline std::string run_simulate(const Options& o, const Emitter& emit) {
  require_seed(o, "simulate");
  const RateModel model = build_model(o);
  const Interval window = build_window(o);
  if (o.method != "rejection" && o.method != "timechange")
    throw UsageError("--method: expected rejection or timechange");
  Rng rng(*o.seed, o.stream);
  std::vector<EventSet> sets;
  sets.reserve(o.reps);
  if (o.method == "rejection") {
    for (std::uint64_t rep = 0; rep < o.reps; ++rep) sets.push_back(simulate_window(model, window, rng, o.tol));
  } else {
    const CumulativeIntensity R(model, o.tol);
    for (std::uint64_t rep = 0; rep < o.reps; ++rep) sets.push_back(sample_path_timechange(R, window, rng));
  }
  return emit_event_sets(o, emit, "simulate", model, window, o.method, sets);
}

inline std::string run_simulate_n(const Options& o, const Emitter& emit) {
  require_seed(o, "simulate-n");
  const RateModel model = build_model(o);
  const Interval window = build_window(o);
  Rng rng(*o.seed, o.stream);
  std::vector<EventSet> sets;
  sets.reserve(o.reps);
  for (std::uint64_t rep = 0; rep < o.reps; ++rep) sets.push_back(simulate_conditional(model, window, o.count, rng));
  return emit_event_sets(o, emit, "simulate-n", model, window, "conditional", sets);
}

inline std::string run_next_point(const Options& o, const Emitter& emit) {
  require_seed(o, "next-point");
  const RateModel model = build_model(o);
  const NthPointQuery query{o.from, o.n, build_direction(o)};
  if (query.n < 1) throw UsageError("--n: must be >= 1");
  const CumulativeIntensity R(model, o.tol);
  Rng rng(*o.seed, o.stream);
  std::vector<std::optional<double>> draws;
  draws.reserve(o.reps);
  for (std::uint64_t rep = 0; rep < o.reps; ++rep) draws.push_back(sample_nth_point(R, query, rng));

  if (o.format == "json") {
    nlohmann::ordered_json doc;
    doc["meta"] = emit.meta("next-point");
    doc["meta"]["model"] = model.description();
    doc["meta"]["from"] = query.anchor;
    doc["meta"]["n"] = query.n;
    doc["meta"]["direction"] = o.direction;
    doc["meta"]["reps"] = o.reps;
    doc["points"] = nlohmann::ordered_json::array();
    for (const auto& d : draws) doc["points"].push_back(d ? nlohmann::ordered_json(*d) : nlohmann::ordered_json());
    return doc.dump(2) + "\n";
  }
  std::string text = emit.csv_header() + "rep,point\n";
  for (std::size_t rep = 0; rep < draws.size(); ++rep)
    text += std::to_string(rep) + "," + (draws[rep] ? format_number(*draws[rep]) : "") + "\n";
  return text;
}

inline std::string emit_table(const Options& o, const Emitter& emit, const std::string& subcommand,
                              nlohmann::ordered_json meta_extra, const std::vector<double>& xs,
                              const std::vector<double>& values, std::optional<double> mass) {
  if (o.format == "json") {
    nlohmann::ordered_json doc;
    doc["meta"] = emit.meta(subcommand);
    for (auto& [key, value] : meta_extra.items()) doc["meta"][key] = value;
    if (mass) doc["mass"] = *mass;
    doc["table"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < xs.size(); ++i) doc["table"].push_back({xs[i], values[i]});
    return doc.dump(2) + "\n";
  }
  std::string text = emit.csv_header();
  if (mass) text += "# mass=" + format_number(*mass) + "\n";
  text += "x,value\n";
  for (std::size_t i = 0; i < xs.size(); ++i) text += format_number(xs[i]) + "," + format_number(values[i]) + "\n";
  return text;
}

inline std::string run_density_order_stat(const Options& o, const Emitter& emit) {
  forbid_seed(o, "density order-stat");
  const RateModel model = build_model(o);
  const Interval window = build_window(o);
  if (o.k < 1 || o.k > o.m) throw UsageError("--k/--m: need 1 <= k <= m");
  const WindowLaw law(model, window, o.tol);
  const auto xs = build_grid(o);
  std::vector<double> values;
  values.reserve(xs.size());
  for (double x : xs) values.push_back(law.order_stat_pdf(o.k, o.m, x));
  nlohmann::ordered_json extra;
  extra["model"] = model.description();
  extra["window"] = {window.lo(), window.hi()};
  extra["k"] = o.k;
  extra["m"] = o.m;
  return emit_table(o, emit, "density order-stat", extra, xs, values, std::nullopt);
}

inline std::string run_density_nth_point(const Options& o, const Emitter& emit) {
  forbid_seed(o, "density nth-point");
  const RateModel model = build_model(o);
  const NthPointQuery query{o.from, o.n, build_direction(o)};
  if (query.n < 1) throw UsageError("--n: must be >= 1");
  const CumulativeIntensity R(model, o.tol);
  const auto xs = build_grid(o);
  std::vector<double> values;
  values.reserve(xs.size());
  for (double x : xs) values.push_back(density_nth_point(R, query, x));
  nlohmann::ordered_json extra;
  extra["model"] = model.description();
  extra["from"] = query.anchor;
  extra["n"] = query.n;
  extra["direction"] = o.direction;
  return emit_table(o, emit, "density nth-point", extra, xs, values, nth_point_mass(R, query));
}

/// Runs one command. Returns the process exit status: 0 on success, 1 on a
/// numeric failure, 2 on a usage error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Simulate inhomogeneous Poisson point processes on the real line", "ippp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto add_rate = [&o](CLI::App* sub) {
    sub->add_option("--rate", o.rate, "Rate expression in x, e.g. \"2+sin(x)\"");
    sub->add_option("--rate-family", o.rate_family, "Built-in rate family: constant|linear|pwconst|sin");
    sub->add_option("--params", o.params, "Family parameters as key=value (lists comma-separated)");
    sub->add_option("--domain", o.domain, "Rate domain lo hi (inf allowed)")->expected(2);
    sub->add_option("--bound", o.bound, "Known upper bound of the rate");
  };
  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Random seed (required when sampling)");
    sub->add_option("--stream", o.stream, "Random stream id");
    sub->add_option("--tol", o.tol, "Absolute integration tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", o.out, "Write output to this file instead of stdout");
  };
  auto add_window = [&o](CLI::App* sub) {
    sub->add_option("--window", o.window, "Observation window a b")->expected(2)->required();
  };

  auto* intensity = app.add_subcommand("intensity", "Expected number of points in a window");
  add_rate(intensity);
  add_window(intensity);
  add_common(intensity);

  auto* simulate = app.add_subcommand("simulate", "Simulate the process on a window");
  add_rate(simulate);
  add_window(simulate);
  add_common(simulate);
  simulate->add_option("--reps", o.reps, "Replications")->check(CLI::PositiveNumber);
  simulate->add_option("--method", o.method, "rejection|timechange");

  auto* simulate_n = app.add_subcommand("simulate-n", "Simulate given the number of points");
  add_rate(simulate_n);
  add_window(simulate_n);
  add_common(simulate_n);
  simulate_n->add_option("--count", o.count, "Number of points m")->required();
  simulate_n->add_option("--reps", o.reps, "Replications")->check(CLI::PositiveNumber);

  auto* next_point = app.add_subcommand("next-point", "Sample the n-th point above/below a known point");
  add_rate(next_point);
  add_common(next_point);
  next_point->add_option("--from", o.from, "Known point")->required();
  next_point->add_option("--n", o.n, "Which point (n >= 1)")->required();
  next_point->add_option("--direction", o.direction, "up|down")->required();
  next_point->add_option("--reps", o.reps, "Replications")->check(CLI::PositiveNumber);

  auto* density = app.add_subcommand("density", "Tabulate a density on a grid");
  density->require_subcommand(1);
  auto* order_stat = density->add_subcommand("order-stat", "Density of the k-th of m points in a window");
  add_rate(order_stat);
  add_window(order_stat);
  add_common(order_stat);
  order_stat->add_option("--k", o.k, "Order index k")->required();
  order_stat->add_option("--m", o.m, "Number of points m")->required();
  order_stat->add_option("--grid", o.grid, "lo hi steps")->expected(3)->required();
  auto* nth_point = density->add_subcommand("nth-point", "Density of the n-th point above/below a known point");
  add_rate(nth_point);
  add_common(nth_point);
  nth_point->add_option("--from", o.from, "Known point")->required();
  nth_point->add_option("--n", o.n, "Which point (n >= 1)")->required();
  nth_point->add_option("--direction", o.direction, "up|down")->required();
  nth_point->add_option("--grid", o.grid, "lo hi steps")->expected(3)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "ippp: " << e.what() << "\n";
    return 2;
  }

  const Emitter emit(o, canonical_command(args));
  try {
    std::string text;
    if (intensity->parsed()) {
      text = run_intensity(o, emit);
    } else if (simulate->parsed()) {
      text = run_simulate(o, emit);
    } else if (simulate_n->parsed()) {
      text = run_simulate_n(o, emit);
    } else if (next_point->parsed()) {
      text = run_next_point(o, emit);
    } else if (order_stat->parsed()) {
      text = run_density_order_stat(o, emit);
    } else {
      text = run_density_nth_point(o, emit);
    }
    if (o.out.empty()) {
      out << text;
    } else {
      std::ofstream file(o.out, std::ios::binary);
      if (!file) throw Error("cannot open --out file '" + o.out + "'");
      file << text;
    }
    return 0;
  } catch (const UsageError& e) {
    err << "ippp: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "ippp: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ippp::cli
