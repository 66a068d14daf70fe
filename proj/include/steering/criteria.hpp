#pragma once

// Steering parameters. Every parameter is normalized so that a positive value
// certifies steering and the classical bound sits at zero.

#include "steering/entropy.hpp"
#include "steering/qcore.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace steering {

enum class CriterionKind { Shannon, Tsallis, Renyi, DimensionBounded };

/// A criterion family together with its orders.
class Criterion {
 public:
  static Criterion shannon();
  static Criterion tsallis(EntropyOrder q);
  /// Requires 1/r + 1/s = 2 within 1e-9 and r, s >= 1/2.
  static Criterion renyi(EntropyOrder r, EntropyOrder s);
  static Criterion renyi_half_inf() { return renyi(EntropyOrder(0.5), EntropyOrder::infinity()); }
  static Criterion dimension_bounded();

  /// Accepts shannon, tsallisQ (e.g. tsallis2, tsallis1.5), renyi (orders
  /// 1/2 and infinity), renyiRS (orders from `rs`) and db.
  static Criterion parse(std::string_view name, std::optional<std::pair<double, double>> rs = std::nullopt);

  CriterionKind kind() const { return kind_; }
  /// Tsallis order; 1 for Shannon.
  EntropyOrder q() const { return q_; }
  EntropyOrder r() const { return r_; }
  EntropyOrder s() const { return s_; }

  /// Family name used in output: shannon, tsallis, renyi, db.
  std::string family() const;
  /// Order label used in output, e.g. "q=2", "r=0.5;s=inf". Empty for db.
  std::string order_label() const;

  friend bool operator==(const Criterion&, const Criterion&) = default;

 private:
  Criterion(CriterionKind kind, EntropyOrder q, EntropyOrder r, EntropyOrder s) : kind_(kind), q_(q), r_(r), s_(s) {}

  CriterionKind kind_;
  EntropyOrder q_;
  EntropyOrder r_;
  EntropyOrder s_;
};

struct SteeringResult {
  Criterion criterion;
  int m = 0;
  double value = 0.0;
  /// Parameters are normalized; the classical bound is always zero.
  double bound = 0.0;
  bool steerable = false;
};

SteeringResult make_result(const Criterion& c, int m, double value);

enum class MeasurementMode { Mub, Nom, Explicit };

struct Scenario {
  double mu = 1.0;
  double alpha_deg = 0.0;
  double phi_deg = 0.0;
  int m = 2;
  MeasurementMode mode = MeasurementMode::Mub;
  /// Used only in Explicit mode.
  MeasurementSettings explicit_settings;

  /// Throws InvalidArgument on mu outside [0,1] or m outside {2,3}.
  void validate() const;
  MeasurementSettings settings() const;
};

/// Setting-diagonal tables (Alice i with Bob i) plus, optionally, the full
/// cross-setting correlation matrix needed by the determinant criterion.
struct TableSet {
  std::vector<JointTable> diagonal;
  std::optional<Eigen::MatrixXd> correlations;
};

/// f_y(x) = ((1-x)/2)^y + ((1+x)/2)^y
double power_sum(double y, double x);

/// bound - sum_m tsallis_directed_term(table_m, q)
SteeringResult tsallis_steering(std::span<const JointTable> tables, EntropyOrder q, double bound);
/// Uses eur_bound_tsallis(q, tables.size()).
SteeringResult tsallis_steering(std::span<const JointTable> tables, EntropyOrder q);

/// ln 2 - H_r(B|A)_1 - H_s(B|A)_2 with Arimoto conditionals; exactly two tables.
SteeringResult renyi_steering(std::span<const JointTable> tables, EntropyOrder r, EntropyOrder s);

/// Vector form of the determinant criterion for Werner states:
/// m=2: mu^2 |(a1 x a2).(b1 x b2)|, m=3: mu^3 |a1.(a2 x a3)| |b1.(b2 x b3)|.
/// Orthogonality is not required.
double db_lhs(std::span<const BlochVector> alice, std::span<const BlochVector> bob, double mu);

/// Violation threshold for db_lhs: 1/2 (m=2) or sqrt(3)/9 (m=3).
double db_vector_threshold(int m);

/// Separable bound on |det D|: (1/sqrt d)((sqrt(2d) - 1)/(m sqrt d))^m.
double db_bound(int m, int d_a);

/// Factor mapping db_lhs (equivalently |det E| of the correlation matrix)
/// onto |det D|: 1/(4 sqrt2) for m=2, 1/(12 sqrt3) for m=3. It is
/// db_bound(m, 2)/db_vector_threshold(m). See docs/db_normalization.md.
double db_scale(int m);

/// c_m db_lhs - db_bound(m, 2)
SteeringResult db_steering(std::span<const BlochVector> alice, std::span<const BlochVector> bob, double mu, int m);

/// c_m |det E| - db_bound(m, 2), E the measured m x m correlation matrix.
SteeringResult db_steering_from_correlations(const Eigen::MatrixXd& correlations);

/// Evaluates a criterion on measured or simulated tables.
SteeringResult evaluate(const Criterion& c, const TableSet& tables);

/// Builds Born-rule tables for the scenario's Werner state and evaluates the
/// criterion on them.
SteeringResult evaluate_pipeline(const Scenario& s, const Criterion& c);

/// Closed-form parameter for MUB or NOM scenarios. Throws Unsupported for
/// Explicit mode or Rényi with three settings.
double closed_form(const Scenario& s, const Criterion& c);

struct CriticalMu {
  double value;
  /// Steering is detectable for some mu < 1.
  bool detectable() const { return value < 1.0; }
};

/// 1/(cos(alpha) sqrt(1 + cos^2 phi)) for the q=2 Tsallis and (1/2, inf)
/// Rényi criteria at m=2; +infinity when cos(alpha) <= 0.
CriticalMu critical_mu(double alpha_deg, double phi_deg);

/// Misalignment angle in [0, 90] degrees at which the closed-form parameter
/// of a MUB scenario changes sign. Bisection on the full bracket, 60 steps.
/// Empty when the endpoints share a sign.
std::optional<double> critical_alpha(const Criterion& c, double mu, double phi_deg, int m);

struct SweepRow {
  double mu;
  double alpha_deg;
  double phi_deg;
  int m;
  SteeringResult result;
};

struct SweepGrid {
  double mu = 1.0;
  double phi_deg = 0.0;
  int m = 2;
  MeasurementMode mode = MeasurementMode::Mub;
  std::vector<double> alphas_deg;
};

/// One row per (alpha, criterion), alpha-major, in input order.
std::vector<SweepRow> sweep(const SweepGrid& grid, std::span<const Criterion> criteria);

/// Columns: mu,alpha_deg,phi_deg,m,criterion,order,value,steerable
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

}  // namespace steering
