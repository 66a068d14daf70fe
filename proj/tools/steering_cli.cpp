// steering-cli: sweeps, Monte Carlo runs, thresholds, bounds and count
// analysis on top of the C API.

#include "steering/steering_c.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct Failure {
  int code;
  std::string message;
};

void check(steer_status s) {
  if (s == STEER_OK) return;
  const int code = s == STEER_ERR_DATA ? kExitData : s == STEER_ERR_INTERNAL ? 1 : kExitUsage;
  throw Failure{code, steer_last_error()};
}

struct CString {
  char* p = nullptr;
  ~CString() { steer_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

double parse_number(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw Failure{kExitUsage, "not a number: '" + s + "'"};
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// START:STOP:STEP inclusive of STOP (up to rounding), or a comma list.
std::vector<double> parse_grid(const std::string& spec, const char* flag) {
  const auto parts = split(spec, ':');
  if (parts.size() == 3) {
    const double start = parse_number(parts[0]), stop = parse_number(parts[1]), step = parse_number(parts[2]);
    if (!(step > 0.0) || stop < start || !std::isfinite(start) || !std::isfinite(stop))
      throw Failure{kExitUsage, std::string(flag) + ": expected START:STOP:STEP with STEP > 0 and STOP >= START"};
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    std::vector<double> out;
    for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  if (parts.size() != 1) throw Failure{kExitUsage, std::string(flag) + ": expected START:STOP:STEP or a list"};
  std::vector<double> out;
  for (const auto& item : split(spec, ',')) out.push_back(parse_number(item));
  if (out.empty()) throw Failure{kExitUsage, std::string(flag) + ": empty grid"};
  return out;
}

std::pair<double, double> parse_rs(const std::string& spec) {
  const auto parts = split(spec, ',');
  if (parts.size() != 2) throw Failure{kExitUsage, "--rs: expected R,S"};
  return {parse_number(parts[0]), parse_number(parts[1])};
}

std::vector<steer_criterion> parse_criteria(const std::vector<std::string>& names, const std::string& rs) {
  std::vector<steer_criterion> out;
  for (const auto& name : names) {
    double r = 0.0, s = 0.0;
    if (name == "renyiRS") {
      if (rs.empty()) throw Failure{kExitUsage, "criterion renyiRS needs --rs R,S"};
      std::tie(r, s) = parse_rs(rs);
    }
    steer_criterion c{};
    check(steer_criterion_parse(name.c_str(), r, s, &c));
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> default_criteria(int m) {
  if (m == 2) return {"shannon", "tsallis2", "renyi", "db"};
  return {"shannon", "tsallis2", "db"};
}

// Generic CSV (no quoted fields) to a JSON array of objects.
nlohmann::json csv_to_json(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  const auto header = split(line, ',');
  auto rows = nlohmann::json::array();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line, ',');
    fields.resize(header.size());
    nlohmann::json obj;
    for (std::size_t i = 0; i < header.size(); ++i) {
      const std::string& f = fields[i];
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (f == "true" || f == "false")
        obj[header[i]] = f == "true";
      else if (!f.empty() && end == f.c_str() + f.size())
        obj[header[i]] = v;
      else
        obj[header[i]] = f;
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

struct Output {
  std::string path;
  std::string format = "csv";

  void add(CLI::App* app) {
    app->add_option("-o,--output", path, "Output file (default: stdout, or $STEERING_OUTPUT_DIR/<command>.<ext>)");
    app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }

  std::string resolve(const std::string& command, const std::string& ext) const {
    if (!path.empty()) return path;
    if (const char* dir = std::getenv("STEERING_OUTPUT_DIR"); dir && *dir)
      return (std::filesystem::path(dir) / (command + "." + ext)).string();
    return {};
  }

  void emit_table(const std::string& command, const std::string& csv) const {
    write(resolve(command, format), format == "json" ? csv_to_json(csv).dump(2) + "\n" : csv);
  }

  static void write(const std::string& target, const std::string& text) {
    if (target.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(target, std::ios::binary);
    if (!out) throw Failure{kExitUsage, "cannot open output '" + target + "'"};
    out << text;
    if (!out) throw Failure{kExitUsage, "failed writing '" + target + "'"};
  }
};

steer_mode parse_mode(const std::string& s) { return s == "nom" ? STEER_MODE_NOM : STEER_MODE_MUB; }

struct SweepCmd {
  int m = 2;
  double phi = 0.0;
  double mu = 0.0;
  std::string alpha_grid = "0:90:10";
  std::vector<std::string> criteria;
  std::string rs;
  std::string mode = "mub";
  Output out;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("sweep", "Steering parameters over Alice's in-plane rotation angle");
    app->add_option("--m", m, "Number of settings")->check(CLI::IsMember({2, 3}));
    app->add_option("--phi", phi, "Plane tilt, degrees");
    app->add_option("--mu", mu, "Werner mixing probability")->required();
    app->add_option("--alpha-grid", alpha_grid, "START:STOP:STEP or list, degrees");
    app->add_option("--criteria", criteria, "Criteria (shannon, tsallisQ, renyi, renyiRS, db)")->delimiter(',');
    app->add_option("--rs", rs, "Orders R,S for renyiRS");
    app->add_option("--mode", mode, "mub or nom")->check(CLI::IsMember({"mub", "nom"}));
    out.add(app);
    app->callback([this] { run(); });
  }

  void run() {
    const auto alphas = parse_grid(alpha_grid, "--alpha-grid");
    const auto crit = parse_criteria(criteria.empty() ? default_criteria(m) : criteria, rs);
    const steer_scenario base{mu, 0.0, phi, m, parse_mode(mode)};
    Handle<steer_sweep, steer_sweep_free> sw;
    check(steer_sweep_run(&base, alphas.data(), alphas.size(), crit.data(), crit.size(), &sw.p));
    CString csv;
    check(steer_sweep_csv(sw.p, &csv.p));
    out.emit_table("sweep", csv.str());
  }
};

struct McCmd {
  int m = 2;
  std::string cls = "rom";
  std::string scheme;
  std::string mu_grid = "1.0";
  std::uint64_t samples = 100000;
  double bound_factor = 1.0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  int hist = 0;
  std::string hist_output;
  Output out;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("mc", "Monte Carlo violation probability under random measurements");
    app->add_option("--m", m, "Number of settings")->check(CLI::IsMember({2, 3}));
    app->add_option("--class", cls, "rom or crm")->check(CLI::IsMember({"rom", "crm"}));
    app->add_option("--scheme", scheme, "dihedral, haar (rom); isotropic, angle (crm)");
    app->add_option("--mu-grid", mu_grid, "START:STOP:STEP or list");
    app->add_option("--samples", samples, "Samples per run")->check(CLI::PositiveNumber);
    app->add_option("--bound-factor", bound_factor, "Multiplier on the classical bound (>= 1)");
    app->add_option("--seed", seed, "RNG seed");
    app->add_option("--threads", threads, "Worker threads (0: all cores); output does not depend on it");
    app->add_option("--hist", hist, "Also write a violation histogram with this many bins (single mu)");
    app->add_option("--hist-output", hist_output, "Histogram CSV path");
    out.add(app);
    app->callback([this] { run(); });
  }

  void run() {
    const auto grid = parse_grid(mu_grid, "--mu-grid");
    steer_mc_config cfg{};
    cfg.m = m;
    check(steer_class_parse(cls.c_str(), &cfg.measurement_class));
    if (scheme.empty())
      check(steer_default_scheme(cfg.measurement_class, &cfg.scheme));
    else
      check(steer_scheme_parse(scheme.c_str(), &cfg.scheme));
    cfg.mu_grid = grid.data();
    cfg.mu_count = grid.size();
    cfg.samples = samples;
    cfg.bound_factor = bound_factor;
    cfg.seed = seed;
    cfg.threads = threads;

    Handle<steer_mc_result, steer_mc_free> res;
    check(steer_mc_run(&cfg, &res.p));
    CString csv;
    check(steer_mc_csv(res.p, &csv.p));
    out.emit_table("mc", csv.str());

    if (hist > 0) {
      Handle<steer_histogram, steer_histogram_free> h;
      check(steer_mc_histogram(&cfg, hist, &h.p));
      CString hcsv;
      check(steer_histogram_csv(h.p, &hcsv.p));
      std::string target = hist_output;
      if (target.empty()) target = out.resolve("mc_hist", "csv");
      Output::write(target, hcsv.str());
    }
  }
};

struct ThresholdCmd {
  std::string criterion = "shannon";
  double q = 0.0;
  std::string rs;
  double mu = 0.0;
  double phi = 0.0;
  int m = 2;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("threshold", "Largest tolerated rotation angle for a criterion (JSON)");
    app->add_option("--criterion", criterion, "shannon, tsallis (with --q), tsallisQ, renyi, renyiRS, db");
    app->add_option("--q", q, "Tsallis order for --criterion tsallis");
    app->add_option("--rs", rs, "Orders R,S for renyiRS");
    app->add_option("--mu", mu, "Werner mixing probability")->required();
    app->add_option("--phi", phi, "Plane tilt, degrees");
    app->add_option("--m", m, "Number of settings")->check(CLI::IsMember({2, 3}));
    app->callback([this] { run(); });
  }

  void run() {
    std::string name = criterion;
    if (name == "tsallis") {
      if (!(q > 0.0)) throw Failure{kExitUsage, "--criterion tsallis needs --q"};
      std::ostringstream os;
      os << "tsallis" << q;
      name = os.str();
    }
    const auto crit = parse_criteria({name}, rs);
    double alpha = 0.0;
    int found = 0;
    check(steer_critical_alpha(&crit[0], mu, phi, m, &alpha, &found));
    CString family, order;
    check(steer_criterion_label(&crit[0], &family.p, &order.p));
    nlohmann::json j{{"criterion", family.str()}, {"order", order.str()}, {"mu", mu}, {"phi_deg", phi}, {"m", m}};
    j["critical_alpha_deg"] = found ? nlohmann::json(alpha) : nlohmann::json(nullptr);
    std::cout << j.dump(2) << "\n";
  }
};

struct BoundCmd {
  int m = 2;
  int da = 2;
  double q = 0.0;
  bool tsallis_m = false;
  bool renyi2 = false;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("bound", "Classical bound of a criterion");
    app->add_option("--m", m, "Number of settings")->check(CLI::IsMember({2, 3}));
    app->add_option("--da", da, "Dimension of Alice's system (determinant bound)");
    auto* qopt = app->add_option("--q", q, "Tsallis order: prints C_B(q, m)");
    auto* topt = app->add_flag("--tsallis-m", tsallis_m, "Tsallis EUR bound for --m settings (order from --q, default 2)");
    auto* ropt = app->add_flag("--renyi2", renyi2, "Two-setting Renyi EUR bound");
    ropt->excludes(qopt)->excludes(topt);
    app->callback([this] { run(); });
  }

  void run() {
    double value = 0.0;
    nlohmann::json j{{"m", m}};
    if (renyi2) {
      check(steer_bound_renyi2(&value));
      j["bound"] = "renyi";
    } else if (tsallis_m || q > 0.0) {
      const double order = q > 0.0 ? q : 2.0;
      check(steer_bound_tsallis(order, m, &value));
      j["bound"] = "tsallis";
      j["q"] = order;
    } else {
      check(steer_bound_db(m, da, &value));
      j["bound"] = "db";
      j["da"] = da;
    }
    j["value"] = value;
    std::cout << j.dump(2) << "\n";
  }
};

struct AnalyzeCmd {
  std::string input;
  std::vector<std::string> criteria;
  std::string rs;
  int bootstrap = 1000;
  double jitter = 0.1;
  std::uint64_t seed = 0;
  std::string output;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("analyze", "Steering parameters with error budgets from a counts CSV (JSON)");
    app->add_option("--input", input, "Counts CSV")->required();
    app->add_option("--criteria", criteria, "Criteria list")->delimiter(',');
    app->add_option("--rs", rs, "Orders R,S for renyiRS");
    app->add_option("--bootstrap", bootstrap, "Poisson bootstrap and jitter replicates")->check(CLI::NonNegativeNumber);
    app->add_option("--jitter", jitter, "Angular jitter on Bob's directions, degrees")->check(CLI::NonNegativeNumber);
    app->add_option("--seed", seed, "RNG seed");
    app->add_option("-o,--output", output, "Output file (default: stdout, or $STEERING_OUTPUT_DIR/analyze.json)");
    app->callback([this] { run(); });
  }

  void run() {
    Handle<steer_counts, steer_counts_free> counts;
    check(steer_counts_load(input.c_str(), &counts.p));
    const int m = steer_counts_settings(counts.p);
    std::vector<std::string> names = criteria;
    if (names.empty()) {
      names = default_criteria(m);
      if (m > 3) names = {"shannon", "tsallis2"};
    }
    const auto crit = parse_criteria(names, rs);
    Handle<steer_report, steer_report_free> report;
    check(steer_analyze(counts.p, crit.data(), crit.size(), bootstrap, jitter, seed, &report.p));
    CString json;
    check(steer_report_json(report.p, &json.p));
    Output o;
    o.path = output;
    o.format = "json";
    Output::write(o.resolve("analyze", "json"), json.str() + "\n");
  }
};

struct SynthCmd {
  int m = 3;
  std::string mode = "nom";
  double mu = 0.0;
  double alpha = 0.0;
  double phi = 0.0;
  double counts = 100000.0;
  bool cross = false;
  std::uint64_t seed = 0;
  bool poisson = false;
  std::string output;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("synth", "Write a counts CSV for a Werner state");
    app->add_option("--m", m, "Number of settings")->check(CLI::IsMember({2, 3}));
    app->add_option("--mode", mode, "mub or nom")->check(CLI::IsMember({"mub", "nom"}));
    app->add_option("--mu", mu, "Werner mixing probability")->required();
    app->add_option("--alpha", alpha, "Rotation angle (mub), degrees");
    app->add_option("--phi", phi, "Plane tilt (mub), degrees");
    app->add_option("--counts", counts, "Expected coincidences per setting pair")->check(CLI::PositiveNumber);
    app->add_flag("--cross", cross, "Include every cross-setting pair (needed for db)");
    app->add_option("--seed", seed, "Draw Poisson counts with this seed (default: rounded expectations)")
        ->each([this](const std::string&) { poisson = true; });
    app->add_option("-o,--output", output, "Output file (default: stdout, or $STEERING_OUTPUT_DIR/synth.csv)");
    app->callback([this] { run(); });
  }

  void run() {
    const steer_scenario s{mu, alpha, phi, m, parse_mode(mode)};
    Handle<steer_counts, steer_counts_free> c;
    check(steer_counts_synthesize(&s, counts, cross ? 1 : 0, poisson ? 1 : 0, seed, &c.p));
    CString csv;
    check(steer_counts_csv(c.p, &csv.p));
    Output o;
    o.path = output;
    Output::write(o.resolve("synth", "csv"), csv.str());
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum steering criteria for Werner states"};
  app.require_subcommand(0, 1);
  app.set_config("--config", "", "Read flags from a TOML/INI file; command-line flags take precedence");
  bool version = false;
  app.add_flag("--version", version, "Print version information as JSON");

  SweepCmd sweep;
  McCmd mc;
  ThresholdCmd threshold;
  BoundCmd bound;
  AnalyzeCmd analyze;
  SynthCmd synth;
  sweep.add(app);
  mc.add(app);
  threshold.add(app);
  bound.add(app);
  analyze.add(app);
  synth.add(app);

  try {
    app.parse(argc, argv);
    if (version) {
      std::cout << nlohmann::json{{"name", "steering-cli"}, {"version", steer_version()}}.dump() << "\n";
      return kExitOk;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return kExitUsage;
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
