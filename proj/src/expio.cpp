#include "steering/expio.hpp"

#include "steering/error.hpp"
#include "steering/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace steering {

namespace {

// Systematic replicates draw from streams disjoint from the bootstrap ones.
constexpr std::uint64_t kJitterStreamOffset = std::uint64_t{1} << 40;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <class T>
std::optional<T> parse_value(const std::string& s) {
  T v{};
  const char* b = s.data();
  if constexpr (std::is_integral_v<T>)
    if (!s.empty() && s[0] == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

Outcome parse_outcome(const std::string& s, std::size_t line, const char* column) {
  if (s == "+1" || s == "1" || s == "+") return Outcome::Plus;
  if (s == "-1" || s == "-") return Outcome::Minus;
  throw ParseError(std::string(column) + " must be +1 or -1, got '" + s + "'", line);
}

BlochVector default_bob_axis(int bob_setting) {
  switch (bob_setting) {
    case 1: return BlochVector::unit_z();
    case 2: return BlochVector::unit_x();
    default: return BlochVector::unit_y();
  }
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

void require_compatible(const Criterion& c, const CountsDataset& data) {
  const int m = data.settings;
  switch (c.kind()) {
    case CriterionKind::Renyi:
      if (m != 2) throw DataError("Rényi criterion needs exactly 2 settings, data has " + std::to_string(m));
      break;
    case CriterionKind::Shannon:
    case CriterionKind::Tsallis:
      if (m != 2 && m != 3) throw DataError("entropic criteria need 2 or 3 settings, data has " + std::to_string(m));
      break;
    case CriterionKind::DimensionBounded:
      if (m != 2 && m != 3) throw DataError("determinant criterion needs 2 or 3 settings");
      for (int x = 1; x <= m; ++x)
        for (int y = 1; y <= m; ++y)
          if (!data.find(x, y))
            throw DataError("determinant criterion needs counts for every setting pair; missing (" +
                            std::to_string(x) + "," + std::to_string(y) + ")");
      break;
  }
}

// Table with the given Alice/Bob marginal expectations and correlation,
// clamped to the probability simplex.
JointTable table_from_moments(double mean_a, double mean_b, double corr, int setting) {
  std::array<std::array<double, 2>, 2> p{};
  double total = 0.0;
  for (Outcome a : kOutcomes)
    for (Outcome b : kOutcomes) {
      const double sa = static_cast<int>(a), sb = static_cast<int>(b);
      const double v = std::max(0.0, (1.0 + sa * mean_a + sb * mean_b + sa * sb * corr) / 4.0);
      p[JointTable::index(a)][JointTable::index(b)] = v;
      total += v;
    }
  for (auto& row : p)
    for (double& v : row) v /= total;
  return JointTable(p, setting);
}

// Tables after Bob's directions are replaced by `jittered`. Alice's
// conditional correlation vector and Bob's marginal vector are rebuilt from
// the settings present for each Alice setting and projected onto the new
// directions.
TableSet jittered_tables(const CountsDataset& data, const std::vector<BlochVector>& nominal,
                         const std::vector<BlochVector>& jittered) {
  const int m = data.settings;
  std::vector<BlochVector> corr_vec(m), bob_mean_vec(m);
  std::vector<double> alice_mean(m, 0.0);
  for (const CountsRecord& r : data.records) {
    const JointTable t = counts_to_table(r);
    const BlochVector& b = nominal[r.bob_setting - 1];
    corr_vec[r.setting - 1] = corr_vec[r.setting - 1] + t.correlation() * b;
    const double mb = t.bob_marginal(Outcome::Plus) - t.bob_marginal(Outcome::Minus);
    bob_mean_vec[r.setting - 1] = bob_mean_vec[r.setting - 1] + mb * b;
    if (r.setting == r.bob_setting) alice_mean[r.setting - 1] = t.alice_marginal(Outcome::Plus) - t.alice_marginal(Outcome::Minus);
  }

  TableSet out;
  const bool full = data.has_cross_settings();
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(m, m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) {
      if (!data.find(x + 1, y + 1)) continue;
      const JointTable t = table_from_moments(alice_mean[x], bob_mean_vec[x].dot(jittered[y]),
                                              corr_vec[x].dot(jittered[y]), x + 1);
      e(x, y) = t.correlation();
      if (x == y) out.diagonal.push_back(t);
    }
  if (full) out.correlations = e;
  return out;
}

BlochVector jitter_direction(const BlochVector& b, double sigma_rad, StreamEngine& rng) {
  std::normal_distribution<double> normal;
  const BlochVector g{normal(rng), normal(rng), normal(rng)};
  const BlochVector tangent = g - g.dot(b) * b;
  return (b + sigma_rad * tangent).normalized();
}

}  // namespace

std::uint64_t CountsRecord::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts)
    for (auto n : row) t += n;
  return t;
}

bool CountsDataset::has_cross_settings() const {
  for (int x = 1; x <= settings; ++x)
    for (int y = 1; y <= settings; ++y)
      if (!find(x, y)) return false;
  return settings > 1;
}

const CountsRecord* CountsDataset::find(int setting, int bob_setting) const {
  for (const CountsRecord& r : records)
    if (r.setting == setting && r.bob_setting == bob_setting) return &r;
  return nullptr;
}

ErrorBudget make_budget(double statistical, double systematic) {
  return {statistical, systematic, std::sqrt(statistical * statistical + systematic * systematic)};
}

CountsDataset parse_counts(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> columns;

  struct Cell {
    std::uint64_t n;
    std::size_t line;
  };
  // (setting, bob_setting) -> cells present
  std::map<std::pair<int, int>, std::map<std::pair<int, int>, Cell>> groups;
  std::map<int, BlochVector> bob_vectors;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);

    if (columns.empty()) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (columns.count(cells[i])) throw ParseError("duplicate column '" + cells[i] + "'", line_no);
        columns[cells[i]] = i;
      }
      for (const char* required : {"setting", "a", "b", "counts"})
        if (!columns.count(required)) throw ParseError(std::string("header lacks column '") + required + "'", line_no);
      const int vec_cols = static_cast<int>(columns.count("bx") + columns.count("by") + columns.count("bz"));
      if (vec_cols != 0 && vec_cols != 3) throw ParseError("columns bx, by, bz must appear together", line_no);
      continue;
    }

    if (cells.size() != columns.size())
      throw ParseError("expected " + std::to_string(columns.size()) + " fields, got " + std::to_string(cells.size()),
                       line_no);
    auto field = [&](const char* name) -> const std::string& { return cells[columns.at(name)]; };

    const auto setting = parse_value<int>(field("setting"));
    if (!setting || *setting < 1) throw ParseError("setting must be a positive integer, got '" + field("setting") + "'", line_no);
    int bob_setting = *setting;
    if (columns.count("bob_setting")) {
      const auto bs = parse_value<int>(field("bob_setting"));
      if (!bs || *bs < 1) throw ParseError("bob_setting must be a positive integer", line_no);
      bob_setting = *bs;
    }
    const Outcome a = parse_outcome(field("a"), line_no, "a");
    const Outcome b = parse_outcome(field("b"), line_no, "b");

    const std::string& count_text = field("counts");
    if (!count_text.empty() && count_text[0] == '-') throw ParseError("negative count '" + count_text + "'", line_no);
    const auto count = parse_value<std::uint64_t>(count_text);
    if (!count) throw ParseError("count must be a non-negative integer, got '" + count_text + "'", line_no);

    auto& cells_for_pair = groups[{*setting, bob_setting}];
    const std::pair<int, int> key{static_cast<int>(a), static_cast<int>(b)};
    if (cells_for_pair.count(key))
      throw ParseError("duplicate entry for setting " + std::to_string(*setting) + ", bob_setting " +
                           std::to_string(bob_setting) + ", outcome (" + field("a") + "," + field("b") +
                           ") (first on line " + std::to_string(cells_for_pair.at(key).line) + ")",
                       line_no);
    cells_for_pair[key] = Cell{*count, line_no};

    if (columns.count("bx")) {
      const auto x = parse_value<double>(field("bx")), y = parse_value<double>(field("by")), z = parse_value<double>(field("bz"));
      if (!x || !y || !z) throw ParseError("bx, by, bz must be numbers", line_no);
      BlochVector v{*x, *y, *z};
      if (std::abs(v.norm() - 1.0) > 1e-6) throw ParseError("Bob's direction must be a unit vector", line_no);
      v = v.normalized();
      auto [it, inserted] = bob_vectors.emplace(bob_setting, v);
      if (!inserted && (it->second - v).norm() > 1e-9)
        throw ParseError("conflicting directions for bob_setting " + std::to_string(bob_setting), line_no);
    }
  }

  if (columns.empty()) throw ParseError("empty counts file");
  if (groups.empty()) throw ParseError("counts file has a header but no data rows");

  std::set<int> settings;
  for (const auto& [pair, cells] : groups) {
    settings.insert(pair.first);
    settings.insert(pair.second);
  }
  const int m = *settings.rbegin();
  if (static_cast<int>(settings.size()) != m) {
    std::string listed;
    for (int s : settings) listed += (listed.empty() ? "" : ",") + std::to_string(s);
    throw ParseError("non-contiguous settings {" + listed + "}; settings must be numbered 1.." + std::to_string(m));
  }

  CountsDataset data;
  data.settings = m;
  for (const auto& [pair, cells] : groups) {
    if (cells.size() != 4)
      throw ParseError("setting " + std::to_string(pair.first) + "/" + std::to_string(pair.second) +
                       " lacks some of the four outcome cells");
    CountsRecord rec;
    rec.setting = pair.first;
    rec.bob_setting = pair.second;
    for (const auto& [outcome, cell] : cells) rec.at(static_cast<Outcome>(outcome.first), static_cast<Outcome>(outcome.second)) = cell.n;
    if (rec.total() == 0)
      throw ParseError("setting " + std::to_string(pair.first) + "/" + std::to_string(pair.second) + " has no counts");
    if (auto it = bob_vectors.find(pair.second); it != bob_vectors.end()) rec.bob_vector = it->second;
    data.records.push_back(rec);
  }
  for (int x = 1; x <= m; ++x)
    if (!data.find(x, x)) throw ParseError("missing counts for setting " + std::to_string(x) + " with bob_setting " + std::to_string(x));
  return data;
}

CountsDataset load_counts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open counts file '" + path.string() + "'");
  return parse_counts(in);
}

void write_counts_csv(std::ostream& os, const CountsDataset& data) {
  const bool cross = std::any_of(data.records.begin(), data.records.end(),
                                 [](const CountsRecord& r) { return r.setting != r.bob_setting; });
  const bool vectors = std::all_of(data.records.begin(), data.records.end(),
                                   [](const CountsRecord& r) { return r.bob_vector.has_value(); });
  os << "setting,a,b,counts" << (cross ? ",bob_setting" : "") << (vectors ? ",bx,by,bz" : "") << '\n';
  std::ostringstream line;
  line << std::setprecision(17);
  for (const CountsRecord& r : data.records)
    for (Outcome a : kOutcomes)
      for (Outcome b : kOutcomes) {
        line.str({});
        line << r.setting << ',' << (a == Outcome::Plus ? "+1" : "-1") << ',' << (b == Outcome::Plus ? "+1" : "-1")
             << ',' << r.at(a, b);
        if (cross) line << ',' << r.bob_setting;
        if (vectors) line << ',' << r.bob_vector->x() << ',' << r.bob_vector->y() << ',' << r.bob_vector->z();
        os << line.str() << '\n';
      }
}

JointTable counts_to_table(const CountsRecord& rec) {
  const double total = static_cast<double>(rec.total());
  if (total <= 0.0) throw DataError("setting " + std::to_string(rec.setting) + " has no counts");
  std::array<std::array<double, 2>, 2> p{};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) p[i][j] = static_cast<double>(rec.counts[i][j]) / total;
  return JointTable(p, rec.setting);
}

TableSet dataset_tables(const CountsDataset& data) {
  TableSet out;
  for (int x = 1; x <= data.settings; ++x) {
    const CountsRecord* r = data.find(x, x);
    if (!r) throw DataError("missing diagonal counts for setting " + std::to_string(x));
    out.diagonal.push_back(counts_to_table(*r));
  }
  if (data.has_cross_settings()) {
    Eigen::MatrixXd e(data.settings, data.settings);
    for (int x = 1; x <= data.settings; ++x)
      for (int y = 1; y <= data.settings; ++y) e(x - 1, y - 1) = counts_to_table(*data.find(x, y)).correlation();
    out.correlations = e;
  }
  return out;
}

std::vector<CriterionReport> evaluate_with_errors(const CountsDataset& data, std::span<const Criterion> criteria,
                                                  const AnalysisOptions& options) {
  if (options.bootstrap < 0) throw InvalidArgument("bootstrap replicate count must be non-negative");
  if (!(options.jitter_deg >= 0.0)) throw InvalidArgument("jitter width must be non-negative");
  for (const Criterion& c : criteria) require_compatible(c, data);

  const TableSet tables = dataset_tables(data);
  const std::size_t k = criteria.size();
  std::vector<CriterionReport> reports;
  for (const Criterion& c : criteria) reports.push_back({evaluate(c, tables), {}});

  std::vector<std::vector<double>> stat(k), sys(k);
  for (int rep = 0; rep < options.bootstrap; ++rep) {
    StreamEngine rng(options.seed, static_cast<std::uint64_t>(rep));
    CountsDataset resampled = data;
    for (CountsRecord& r : resampled.records) {
      CountsRecord draw = r;
      for (auto& row : draw.counts)
        for (auto& n : row) n = n ? static_cast<std::uint64_t>(std::poisson_distribution<long long>(static_cast<double>(n))(rng)) : 0;
      if (draw.total() > 0) r = draw;
    }
    const TableSet t = dataset_tables(resampled);
    for (std::size_t j = 0; j < k; ++j) stat[j].push_back(evaluate(criteria[j], t).value);
  }

  if (options.jitter_deg > 0.0) {
    std::vector<BlochVector> nominal;
    for (int y = 1; y <= data.settings; ++y) {
      const CountsRecord* r = data.find(y, y);
      nominal.push_back(r && r->bob_vector ? *r->bob_vector : default_bob_axis(y));
    }
    const double sigma = deg_to_rad(options.jitter_deg);
    for (int rep = 0; rep < options.bootstrap; ++rep) {
      StreamEngine rng(options.seed, kJitterStreamOffset + static_cast<std::uint64_t>(rep));
      std::vector<BlochVector> jittered;
      for (const BlochVector& b : nominal) jittered.push_back(jitter_direction(b, sigma, rng));
      const TableSet t = jittered_tables(data, nominal, jittered);
      for (std::size_t j = 0; j < k; ++j) sys[j].push_back(evaluate(criteria[j], t).value);
    }
  }

  for (std::size_t j = 0; j < k; ++j) reports[j].errors = make_budget(sample_std(stat[j]), sample_std(sys[j]));
  return reports;
}

CountsDataset synthesize_counts(WernerParam mu, const MeasurementSettings& settings, double counts_per_pair, bool cross,
                                std::optional<std::uint64_t> seed) {
  if (settings.alice.size() != settings.bob.size() || settings.alice.empty())
    throw InvalidArgument("settings must pair Alice and Bob one to one");
  if (!(counts_per_pair >= 1.0)) throw InvalidArgument("need at least one count per setting pair");
  const DensityMatrix rho = werner_state(mu);
  const int m = static_cast<int>(settings.size());

  CountsDataset data;
  data.settings = m;
  std::uint64_t stream = 0;
  for (int x = 1; x <= m; ++x)
    for (int y = 1; y <= m; ++y) {
      if (!cross && x != y) continue;
      const JointTable t = joint_table_trace(rho, settings.alice[x - 1], settings.bob[y - 1], x);
      CountsRecord rec;
      rec.setting = x;
      rec.bob_setting = y;
      rec.bob_vector = settings.bob[y - 1];
      StreamEngine rng(seed.value_or(0), stream++);
      for (Outcome a : kOutcomes)
        for (Outcome b : kOutcomes) {
          const double expected = counts_per_pair * t.p(a, b);
          if (expected <= 0.0)
            rec.at(a, b) = 0;
          else
            rec.at(a, b) = seed ? static_cast<std::uint64_t>(std::poisson_distribution<long long>(expected)(rng))
                                : static_cast<std::uint64_t>(std::llround(expected));
        }
      data.records.push_back(rec);
    }
  return data;
}

std::string reports_to_json(std::span<const CriterionReport> reports) {
  nlohmann::json out = nlohmann::json::array();
  for (const CriterionReport& r : reports) {
    out.push_back({{"criterion", r.result.criterion.family()},
                   {"order", r.result.criterion.order_label()},
                   {"m", r.result.m},
                   {"value", r.result.value},
                   {"stat_err", r.errors.statistical},
                   {"sys_err", r.errors.systematic},
                   {"total_err", r.errors.total},
                   {"steerable", r.result.steerable}});
  }
  return out.dump(2);
}

}  // namespace steering
