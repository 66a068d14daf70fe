#pragma once

// Probability that the determinant criterion is violated when both parties
// measure along randomly drawn directions.

#include "steering/qcore.hpp"
#include "steering/rng.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace steering {

/// ROM: random orthogonal measurements. CRM: completely random measurements.
enum class MeasurementClass { Rom, Crm };

/// How the random directions are drawn.
///
///  - UniformDihedral (ROM): Bob keeps (z, x); the dihedral angle between the
///    parties' measurement planes is uniform on [0, 90] degrees, Alice's
///    in-plane orientation uniform. Reproduces the published ROM numbers.
///  - Haar (ROM): each party's orthonormal set is rotated by an independent
///    Haar-random rotation.
///  - Isotropic (CRM): every direction is an independent uniform point on
///    the sphere.
///  - UniformAngle (CRM): angles rather than points are uniform. For m=2 the
///    angle between a party's two directions is uniform on [0, 180] and the
///    dihedral angle uniform on [0, 90]; for m=3 the angle between two
///    directions and the angle of the third to their plane normal are both
///    uniform on [0, 180]. Reproduces the published CRM numbers.
///
/// For three orthogonal settings every ROM scheme draws Haar-random triads.
enum class SamplerScheme { UniformDihedral, Haar, Isotropic, UniformAngle };

/// dihedral, haar, isotropic, angle
std::string_view to_string(SamplerScheme s);
SamplerScheme parse_scheme(std::string_view name);
std::string_view to_string(MeasurementClass c);
MeasurementClass parse_class(std::string_view name);

bool compatible(MeasurementClass c, SamplerScheme s);
SamplerScheme default_scheme(MeasurementClass c);

struct MCConfig {
  int m = 2;
  MeasurementClass measurement_class = MeasurementClass::Rom;
  SamplerScheme scheme = SamplerScheme::UniformDihedral;
  std::vector<double> mu_grid;
  std::uint64_t samples = 100000;
  /// Multiplies the classical bound; 1 is the plain criterion.
  double bound_factor = 1.0;
  std::uint64_t seed = 0;
  /// Worker threads; 0 means hardware concurrency. Results do not depend on it.
  unsigned threads = 0;

  void validate() const;
};

struct MCEstimate {
  int m = 0;
  SamplerScheme scheme = SamplerScheme::UniformDihedral;
  double mu = 0.0;
  double bound_factor = 1.0;
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  double probability = 0.0;
  /// sqrt(p (1 - p) / N)
  double standard_error = 0.0;
};

BlochVector sample_unit_vector(StreamEngine& rng);

/// Haar-random proper rotation (uniform unit quaternion).
Eigen::Matrix3d sample_rotation(StreamEngine& rng);

/// Orthonormal pairs for both parties under a ROM scheme.
MeasurementSettings sample_orthogonal_pair(StreamEngine& rng, SamplerScheme scheme);

/// Right-handed orthonormal triad, Haar distributed.
std::array<BlochVector, 3> sample_orthogonal_triad(StreamEngine& rng);

/// Draws one complete measurement configuration (both parties, m settings).
MeasurementSettings sample_configuration(StreamEngine& rng, int m, SamplerScheme scheme);

/// db_lhs at mu = 1 for sample `index` of a run; mu^m times this is the
/// criterion's left-hand side.
double sample_geometry(std::uint64_t seed, std::uint64_t index, int m, SamplerScheme scheme);

/// One estimate per entry of cfg.mu_grid. All grid points share the same
/// sampled configurations.
std::vector<MCEstimate> violation_probability(const MCConfig& cfg);

struct Histogram {
  /// Violation amount db_lhs - factor * threshold spans [0, upper].
  double upper = 0.0;
  std::vector<double> density;
  std::uint64_t violations = 0;

  double bin_width() const { return density.empty() ? 0.0 : upper / static_cast<double>(density.size()); }
};

/// Density of the violation amount over violating samples, for a config
/// with exactly one grid point. All densities are zero when nothing is
/// violated.
Histogram violation_histogram(const MCConfig& cfg, int bins = 50);

struct RaisedBoundRow {
  std::string label;
  int m;
  MeasurementClass measurement_class;
  SamplerScheme scheme;
  /// One estimate per factor.
  std::vector<MCEstimate> estimates;
};

struct RaisedBoundSpec {
  int m;
  MeasurementClass measurement_class;
  SamplerScheme scheme;
};

/// 2 ROM, 3 ROM, 2 CRM, 3 CRM with default schemes.
std::vector<RaisedBoundSpec> default_raised_bound_rows();

std::vector<RaisedBoundRow> raised_bound_table(std::span<const RaisedBoundSpec> rows, std::span<const double> factors,
                                               double mu, std::uint64_t samples, std::uint64_t seed,
                                               unsigned threads = 0);

/// Columns: m,scheme,mu,bound_factor,n_samples,p_violation,stderr
void write_mc_csv(std::ostream& os, std::span<const MCEstimate> estimates);

/// Columns: bin_left,bin_right,density
void write_histogram_csv(std::ostream& os, const Histogram& h);

}  // namespace steering
