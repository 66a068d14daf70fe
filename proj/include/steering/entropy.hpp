#pragma once

// Generalized entropies (natural log) and the uncertainty bounds used by the
// entropic steering criteria.

#include "steering/qcore.hpp"

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace steering {

/// Order of a Tsallis (q) or Rényi (r) entropy. The Shannon limit (order 1)
/// and the min-entropy limit (order infinity) are exact values, evaluated on
/// dedicated branches rather than by approximating finite orders.
class EntropyOrder {
 public:
  explicit EntropyOrder(double value);

  static EntropyOrder shannon() { return EntropyOrder(1.0); }
  static EntropyOrder infinity() { return EntropyOrder(std::numeric_limits<double>::infinity()); }

  double value() const { return value_; }
  bool is_shannon() const { return value_ == 1.0; }
  bool is_infinite() const { return value_ == std::numeric_limits<double>::infinity(); }

  /// "1", "2", "0.5", "inf"
  std::string to_string() const;

  friend bool operator==(const EntropyOrder&, const EntropyOrder&) = default;

 private:
  double value_;
};

/// Probabilities checked to be non-negative and to sum to 1 within 1e-10.
class Distribution {
 public:
  explicit Distribution(std::vector<double> p);
  Distribution(std::initializer_list<double> p) : Distribution(std::vector<double>(p)) {}

  std::span<const double> values() const { return p_; }
  std::size_t size() const { return p_.size(); }

 private:
  std::vector<double> p_;
};

/// (x^{1-q} - 1)/(1 - q); ln x at q = 1.
double q_log(double x, EntropyOrder q);

/// -sum p_i^q ln_q(p_i), with 0 ln_q 0 = 0.
double tsallis_entropy(const Distribution& p, EntropyOrder q);

double shannon_entropy(const Distribution& p);

/// ln(sum p_i^r)/(1 - r); -ln max p_i at r = infinity.
double renyi_entropy(const Distribution& p, EntropyOrder r);

/// Per-setting conditional term of the Tsallis criterion,
/// (1 - sum_ab p_ab^q / p_a^{q-1})/(q - 1), with p_a Alice's marginal.
/// At q = 1 it is the Shannon conditional entropy H(B|A). Cells with a zero
/// marginal contribute nothing.
double tsallis_directed_term(const JointTable& t, EntropyOrder q);

/// Arimoto conditional Rényi entropy of Bob's outcome given Alice's:
/// r/(1-r) ln sum_a (sum_b p(a,b)^r)^{1/r}. At r = infinity it is
/// -ln sum_a max_b p(a,b); at r = 1 the Shannon conditional entropy.
double arimoto_conditional_renyi(const JointTable& t, EntropyOrder r);

/// Shannon conditional entropy H(A,B) - H(A).
double shannon_conditional(const JointTable& t);

/// Tsallis uncertainty bound for m mutually unbiased qubit measurements:
/// ln_q 2 for m = 2 and 2 ln_q 2 for m = 3. Any other m requires an
/// override, which is returned as is.
double eur_bound_tsallis(EntropyOrder q, int m, std::optional<double> override_bound = std::nullopt);

/// Two-setting Rényi bound, ln 2 for every admissible (r, s).
double eur_bound_renyi2();

}  // namespace steering
