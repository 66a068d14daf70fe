#include "steering/entropy.hpp"

#include "steering/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace steering {

namespace {

constexpr double kSumTol = 1e-10;

// x^{1-q} computed as exp((1-q) ln x) so that the q -> 1 neighbourhood keeps
// full relative precision through expm1.
double q_log_unchecked(double x, double q) {
  if (q == 1.0) return std::log(x);
  const double k = 1.0 - q;
  return std::expm1(k * std::log(x)) / k;
}

}  // namespace

EntropyOrder::EntropyOrder(double value) : value_(value) {
  if (std::isnan(value) || value <= 0.0) throw InvalidArgument("entropy order must be positive");
}

std::string EntropyOrder::to_string() const {
  if (is_infinite()) return "inf";
  std::ostringstream os;
  os << value_;
  return os.str();
}

Distribution::Distribution(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw InvalidArgument("distribution is empty");
  double total = 0.0;
  for (double x : p_) {
    if (!std::isfinite(x) || x < 0.0) throw InvalidArgument("distribution has a negative or non-finite entry");
    total += x;
  }
  if (std::abs(total - 1.0) > kSumTol) throw InvalidArgument("distribution does not sum to 1");
}

double q_log(double x, EntropyOrder q) {
  if (!(x > 0.0)) throw InvalidArgument("q-logarithm needs a positive argument");
  if (q.is_infinite()) throw InvalidArgument("q-logarithm needs a finite order");
  return q_log_unchecked(x, q.value());
}

double tsallis_entropy(const Distribution& p, EntropyOrder q) {
  if (q.is_infinite()) throw InvalidArgument("Tsallis entropy needs a finite order");
  double s = 0.0;
  for (double x : p.values())
    if (x > 0.0) s -= std::pow(x, q.value()) * q_log_unchecked(x, q.value());
  return s;
}

double shannon_entropy(const Distribution& p) {
  double s = 0.0;
  for (double x : p.values())
    if (x > 0.0) s -= x * std::log(x);
  return s;
}

double renyi_entropy(const Distribution& p, EntropyOrder r) {
  if (r.is_shannon()) return shannon_entropy(p);
  if (r.is_infinite()) return -std::log(*std::max_element(p.values().begin(), p.values().end()));
  double sum = 0.0;
  for (double x : p.values())
    if (x > 0.0) sum += std::pow(x, r.value());
  return std::log(sum) / (1.0 - r.value());
}

double shannon_conditional(const JointTable& t) {
  double h = 0.0;
  for (Outcome a : kOutcomes) {
    const double pa = t.alice_marginal(a);
    for (Outcome b : kOutcomes) {
      const double pab = t.p(a, b);
      if (pab > 0.0) h -= pab * std::log(pab / pa);
    }
  }
  return h;
}

double tsallis_directed_term(const JointTable& t, EntropyOrder q) {
  if (q.is_infinite()) throw InvalidArgument("Tsallis criterion needs a finite order");
  if (q.is_shannon()) return shannon_conditional(t);
  const double qv = q.value();
  double sum = 0.0;
  for (Outcome a : kOutcomes) {
    const double pa = t.alice_marginal(a);
    if (pa <= 0.0) continue;
    for (Outcome b : kOutcomes) {
      const double pab = t.p(a, b);
      if (pab > 0.0) sum += std::pow(pab, qv) * std::pow(pa, 1.0 - qv);
    }
  }
  return (1.0 - sum) / (qv - 1.0);
}

double arimoto_conditional_renyi(const JointTable& t, EntropyOrder r) {
  if (r.is_shannon()) return shannon_conditional(t);
  if (r.is_infinite()) {
    double guess = 0.0;
    for (Outcome a : kOutcomes) guess += std::max(t.p(a, Outcome::Plus), t.p(a, Outcome::Minus));
    return -std::log(guess);
  }
  const double rv = r.value();
  double outer = 0.0;
  for (Outcome a : kOutcomes) {
    double inner = 0.0;
    for (Outcome b : kOutcomes)
      if (t.p(a, b) > 0.0) inner += std::pow(t.p(a, b), rv);
    if (inner > 0.0) outer += std::pow(inner, 1.0 / rv);
  }
  return rv / (1.0 - rv) * std::log(outer);
}

double eur_bound_tsallis(EntropyOrder q, int m, std::optional<double> override_bound) {
  if (override_bound) return *override_bound;
  if (q.is_infinite()) throw InvalidArgument("Tsallis bound needs a finite order");
  if (m == 2) return q_log_unchecked(2.0, q.value());
  if (m == 3) return 2.0 * q_log_unchecked(2.0, q.value());
  throw InvalidArgument("Tsallis uncertainty bound is only known for 2 or 3 settings; supply an override");
}

double eur_bound_renyi2() { return std::log(2.0); }

}  // namespace steering
