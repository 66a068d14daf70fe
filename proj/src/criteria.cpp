#include "steering/criteria.hpp"

#include "steering/error.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace steering {

namespace {

constexpr double kRenyiConstraintTol = 1e-9;
constexpr int kBisectionSteps = 60;

void require_m(int m) {
  if (m != 2 && m != 3) throw InvalidArgument("settings count must be 2 or 3, got " + std::to_string(m));
}

double inverse(EntropyOrder o) { return o.is_infinite() ? 0.0 : 1.0 / o.value(); }

std::optional<double> parse_number(std::string_view text) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

// Binary Shannon entropy of ((1-x)/2, (1+x)/2), nats.
double binary_entropy(double x) {
  double h = 0.0;
  for (double p : {(1.0 - x) / 2.0, (1.0 + x) / 2.0})
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

// Werner conditional Rényi entropy for correlation x.
double renyi_conditional_closed(EntropyOrder r, double x) {
  if (r.is_shannon()) return binary_entropy(x);
  if (r.is_infinite()) return std::log(2.0) - std::log1p(std::abs(x));
  return std::log(power_sum(r.value(), x)) / (1.0 - r.value());
}

// Correlation magnitudes mu * (a_i . b_i) in pairing order.
std::vector<double> closed_correlations(const Scenario& s) {
  const double mu = s.mu;
  if (s.mode == MeasurementMode::Nom) {
    if (s.m == 2) return {mu, std::sqrt(3.0) / 2.0 * mu};
    return {mu, std::sqrt(3.0) / 2.0 * mu, std::sqrt(2.0 / 3.0) * mu};
  }
  const double ca = std::cos(deg_to_rad(s.alpha_deg));
  const double cf = std::cos(deg_to_rad(s.phi_deg));
  if (s.m == 2) return {mu * ca, mu * cf * ca};
  return {mu * ca, mu * cf, mu * cf * ca};
}

double closed_db(const Scenario& s) {
  const double r2 = std::sqrt(2.0);
  const double mu = s.mu;
  if (s.mode == MeasurementMode::Nom) {
    if (s.m == 2) return (std::sqrt(3.0) * mu * mu - 1.0) / (8.0 * r2);
    return (mu * mu * mu / std::sqrt(6.0) - 1.0 / 9.0) / 12.0;
  }
  if (s.m == 2) return (2.0 * mu * mu * std::abs(std::cos(deg_to_rad(s.phi_deg))) - 1.0) / (8.0 * r2);
  return (mu * mu * mu / std::sqrt(3.0) - 1.0 / 9.0) / 12.0;
}

}  // namespace

Criterion Criterion::shannon() {
  return {CriterionKind::Shannon, EntropyOrder::shannon(), EntropyOrder::shannon(), EntropyOrder::shannon()};
}

Criterion Criterion::tsallis(EntropyOrder q) {
  if (q.is_infinite()) throw InvalidArgument("Tsallis order must be finite");
  if (q.is_shannon()) return shannon();
  if (q.value() < 1.0) throw InvalidArgument("Tsallis criterion needs q >= 1");
  return {CriterionKind::Tsallis, q, EntropyOrder::shannon(), EntropyOrder::shannon()};
}

Criterion Criterion::renyi(EntropyOrder r, EntropyOrder s) {
  if (r.value() < 0.5 || s.value() < 0.5) throw InvalidArgument("Rényi orders must be at least 1/2");
  if (std::abs(inverse(r) + inverse(s) - 2.0) > kRenyiConstraintTol)
    throw InvalidArgument("Rényi orders must satisfy 1/r + 1/s = 2");
  return {CriterionKind::Renyi, EntropyOrder::shannon(), r, s};
}

Criterion Criterion::dimension_bounded() {
  return {CriterionKind::DimensionBounded, EntropyOrder::shannon(), EntropyOrder::shannon(), EntropyOrder::shannon()};
}

Criterion Criterion::parse(std::string_view name, std::optional<std::pair<double, double>> rs) {
  if (name == "shannon") return shannon();
  if (name == "db") return dimension_bounded();
  if (name == "renyi") return renyi_half_inf();
  if (name == "renyiRS") {
    if (!rs) throw InvalidArgument("renyiRS needs explicit orders (r, s)");
    return renyi(EntropyOrder(rs->first), EntropyOrder(rs->second));
  }
  constexpr std::string_view prefix = "tsallis";
  if (name.substr(0, prefix.size()) == prefix) {
    auto q = parse_number(name.substr(prefix.size()));
    if (!q) throw InvalidArgument("bad Tsallis order in '" + std::string(name) + "'");
    return tsallis(EntropyOrder(*q));
  }
  throw InvalidArgument("unknown criterion '" + std::string(name) + "'");
}

std::string Criterion::family() const {
  switch (kind_) {
    case CriterionKind::Shannon: return "shannon";
    case CriterionKind::Tsallis: return "tsallis";
    case CriterionKind::Renyi: return "renyi";
    case CriterionKind::DimensionBounded: return "db";
  }
  return {};
}

std::string Criterion::order_label() const {
  switch (kind_) {
    case CriterionKind::Shannon:
    case CriterionKind::Tsallis: return "q=" + q_.to_string();
    case CriterionKind::Renyi: return "r=" + r_.to_string() + ";s=" + s_.to_string();
    case CriterionKind::DimensionBounded: return {};
  }
  return {};
}

SteeringResult make_result(const Criterion& c, int m, double value) {
  return SteeringResult{c, m, value, 0.0, value > 0.0};
}

void Scenario::validate() const {
  (void)WernerParam(mu);
  require_m(m);
  if (!std::isfinite(alpha_deg) || !std::isfinite(phi_deg)) throw InvalidArgument("angles must be finite");
  if (mode == MeasurementMode::Explicit &&
      (explicit_settings.alice.size() != static_cast<std::size_t>(m) ||
       explicit_settings.bob.size() != static_cast<std::size_t>(m)))
    throw InvalidArgument("explicit settings do not match the settings count");
}

MeasurementSettings Scenario::settings() const {
  switch (mode) {
    case MeasurementMode::Mub: return mub_settings(m, alpha_deg, phi_deg);
    case MeasurementMode::Nom: return nom_settings(m);
    case MeasurementMode::Explicit: return explicit_settings;
  }
  return {};
}

double power_sum(double y, double x) { return std::pow((1.0 - x) / 2.0, y) + std::pow((1.0 + x) / 2.0, y); }

SteeringResult tsallis_steering(std::span<const JointTable> tables, EntropyOrder q, double bound) {
  if (tables.empty()) throw InvalidArgument("Tsallis criterion needs at least one table");
  double value = bound;
  for (const JointTable& t : tables) value -= tsallis_directed_term(t, q);
  const Criterion c = Criterion::tsallis(q);
  return make_result(c, static_cast<int>(tables.size()), value);
}

SteeringResult tsallis_steering(std::span<const JointTable> tables, EntropyOrder q) {
  return tsallis_steering(tables, q, eur_bound_tsallis(q, static_cast<int>(tables.size())));
}

SteeringResult renyi_steering(std::span<const JointTable> tables, EntropyOrder r, EntropyOrder s) {
  if (tables.size() != 2) throw Unsupported("Rényi criterion holds only for two settings");
  const Criterion c = Criterion::renyi(r, s);
  const double value =
      eur_bound_renyi2() - arimoto_conditional_renyi(tables[0], r) - arimoto_conditional_renyi(tables[1], s);
  return make_result(c, 2, value);
}

double db_lhs(std::span<const BlochVector> alice, std::span<const BlochVector> bob, double mu) {
  if (alice.size() != bob.size()) throw InvalidArgument("Alice and Bob need the same number of settings");
  const int m = static_cast<int>(alice.size());
  require_m(m);
  for (const auto& v : alice) require_unit(v);
  for (const auto& v : bob) require_unit(v);
  if (m == 2) return mu * mu * std::abs(alice[0].cross(alice[1]).dot(bob[0].cross(bob[1])));
  return mu * mu * mu * std::abs(alice[0].dot(alice[1].cross(alice[2]))) * std::abs(bob[0].dot(bob[1].cross(bob[2])));
}

double db_vector_threshold(int m) {
  require_m(m);
  return m == 2 ? 0.5 : std::sqrt(3.0) / 9.0;
}

double db_bound(int m, int d_a) {
  if (m < 2) throw InvalidArgument("determinant bound needs at least two settings");
  if (d_a < 2) throw InvalidArgument("determinant bound needs dimension at least 2");
  const double d = d_a;
  return std::pow((std::sqrt(2.0 * d) - 1.0) / (m * std::sqrt(d)), m) / std::sqrt(d);
}

double db_scale(int m) {
  require_m(m);
  return m == 2 ? 1.0 / (4.0 * std::sqrt(2.0)) : 1.0 / (12.0 * std::sqrt(3.0));
}

SteeringResult db_steering(std::span<const BlochVector> alice, std::span<const BlochVector> bob, double mu, int m) {
  require_m(m);
  if (alice.size() != static_cast<std::size_t>(m)) throw InvalidArgument("settings count does not match m");
  (void)WernerParam(mu);
  const double value = db_scale(m) * db_lhs(alice, bob, mu) - db_bound(m, 2);
  return make_result(Criterion::dimension_bounded(), m, value);
}

SteeringResult db_steering_from_correlations(const Eigen::MatrixXd& correlations) {
  if (correlations.rows() != correlations.cols()) throw InvalidArgument("correlation matrix must be square");
  const int m = static_cast<int>(correlations.rows());
  require_m(m);
  const double value = db_scale(m) * std::abs(correlations.determinant()) - db_bound(m, 2);
  return make_result(Criterion::dimension_bounded(), m, value);
}

SteeringResult evaluate(const Criterion& c, const TableSet& tables) {
  const int m = static_cast<int>(tables.diagonal.size());
  switch (c.kind()) {
    case CriterionKind::Shannon:
    case CriterionKind::Tsallis: {
      SteeringResult r = tsallis_steering(tables.diagonal, c.q());
      r.criterion = c;
      return r;
    }
    case CriterionKind::Renyi: return renyi_steering(tables.diagonal, c.r(), c.s());
    case CriterionKind::DimensionBounded:
      if (!tables.correlations) throw DataError("determinant criterion needs every cross-setting correlation");
      if (tables.correlations->rows() != m && m != 0)
        throw DataError("correlation matrix size does not match the settings count");
      return db_steering_from_correlations(*tables.correlations);
  }
  throw Unsupported("unknown criterion");
}

SteeringResult evaluate_pipeline(const Scenario& s, const Criterion& c) {
  s.validate();
  const MeasurementSettings settings = s.settings();
  const DensityMatrix rho = werner_state(WernerParam(s.mu));
  TableSet tables;
  for (std::size_t i = 0; i < settings.size(); ++i)
    tables.diagonal.push_back(joint_table_trace(rho, settings.alice[i], settings.bob[i], static_cast<int>(i + 1)));
  if (c.kind() == CriterionKind::DimensionBounded) tables.correlations = correlation_matrix(rho, settings);
  return evaluate(c, tables);
}

double closed_form(const Scenario& s, const Criterion& c) {
  s.validate();
  if (s.mode == MeasurementMode::Explicit) throw Unsupported("no closed form for explicit measurement vectors");
  const std::vector<double> x = closed_correlations(s);

  switch (c.kind()) {
    case CriterionKind::Shannon: {
      double value = (s.m - 1) * std::log(2.0);
      for (double xi : x) value -= binary_entropy(xi);
      return value;
    }
    case CriterionKind::Tsallis: {
      const double q = c.q().value();
      double bracket = 1.0 + std::pow(2.0, s.m - 1 - q);
      for (double xi : x) bracket -= power_sum(q, xi);
      return bracket / (1.0 - q);
    }
    case CriterionKind::Renyi:
      if (s.m != 2) throw Unsupported("Rényi criterion holds only for two settings");
      return std::log(2.0) - renyi_conditional_closed(c.r(), x[0]) - renyi_conditional_closed(c.s(), x[1]);
    case CriterionKind::DimensionBounded: return closed_db(s);
  }
  throw Unsupported("unknown criterion");
}

CriticalMu critical_mu(double alpha_deg, double phi_deg) {
  const double ca = std::cos(deg_to_rad(alpha_deg));
  const double cf = std::cos(deg_to_rad(phi_deg));
  if (ca <= 0.0) return {std::numeric_limits<double>::infinity()};
  return {1.0 / (ca * std::sqrt(1.0 + cf * cf))};
}

std::optional<double> critical_alpha(const Criterion& c, double mu, double phi_deg, int m) {
  Scenario s{mu, 0.0, phi_deg, m, MeasurementMode::Mub, {}};
  auto value_at = [&](double alpha) {
    s.alpha_deg = alpha;
    return closed_form(s, c);
  };
  double lo = 0.0, hi = 90.0;
  const double f_lo = value_at(lo);
  const double f_hi = value_at(hi);
  if ((f_lo > 0.0) == (f_hi > 0.0)) return std::nullopt;
  for (int i = 0; i < kBisectionSteps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((value_at(mid) > 0.0) == (f_lo > 0.0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<SweepRow> sweep(const SweepGrid& grid, std::span<const Criterion> criteria) {
  for (const Criterion& c : criteria)
    if (c.kind() == CriterionKind::Renyi && grid.m != 2) throw Unsupported("Rényi criterion holds only for two settings");
  std::vector<SweepRow> rows;
  rows.reserve(grid.alphas_deg.size() * criteria.size());
  for (double alpha : grid.alphas_deg) {
    const Scenario s{grid.mu, alpha, grid.phi_deg, grid.m, grid.mode, {}};
    for (const Criterion& c : criteria)
      rows.push_back(SweepRow{grid.mu, alpha, grid.phi_deg, grid.m, make_result(c, grid.m, closed_form(s, c))});
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "mu,alpha_deg,phi_deg,m,criterion,order,value,steerable\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (const SweepRow& r : rows) {
    line.str({});
    line << r.mu << ',' << r.alpha_deg << ',' << r.phi_deg << ',' << r.m << ',' << r.result.criterion.family() << ','
         << r.result.criterion.order_label() << ',' << r.result.value << ',' << (r.result.steerable ? "true" : "false")
         << '\n';
    os << line.str();
  }
}

}  // namespace steering
