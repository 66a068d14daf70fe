#include "steering/montecarlo.hpp"

#include "steering/criteria.hpp"
#include "steering/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace steering {

namespace {

constexpr std::uint64_t kChunkSize = 16384;

// Runs fn(begin, end) over fixed-size sample chunks on a small thread pool.
// Chunk boundaries do not depend on the thread count, and results come back
// indexed by chunk, so any merge in index order is deterministic.
template <class Result, class Fn>
std::vector<Result> run_chunks(std::uint64_t samples, unsigned threads, Fn fn) {
  const std::uint64_t chunks = (samples + kChunkSize - 1) / kChunkSize;
  std::vector<Result> results(chunks);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t c = next++; c < chunks; c = next++)
      results[c] = fn(c * kChunkSize, std::min(samples, (c + 1) * kChunkSize));
  };
  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(chunks, 1)));
  if (n <= 1) {
    worker();
    return results;
  }
  std::vector<std::jthread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  pool.clear();
  return results;
}

// counts[k] = #{i : scale[k] * geometry(i) > cut[k]}
std::vector<std::uint64_t> count_exceedances(std::uint64_t seed, std::uint64_t samples, int m, SamplerScheme scheme,
                                             unsigned threads, std::span<const double> scale,
                                             std::span<const double> cut) {
  const std::size_t k = scale.size();
  auto chunk_counts = run_chunks<std::vector<std::uint64_t>>(samples, threads, [&](std::uint64_t b, std::uint64_t e) {
    std::vector<std::uint64_t> counts(k, 0);
    for (std::uint64_t i = b; i < e; ++i) {
      const double g = sample_geometry(seed, i, m, scheme);
      for (std::size_t j = 0; j < k; ++j)
        if (scale[j] * g > cut[j]) ++counts[j];
    }
    return counts;
  });
  std::vector<std::uint64_t> total(k, 0);
  for (const auto& c : chunk_counts)
    for (std::size_t j = 0; j < k; ++j) total[j] += c[j];
  return total;
}

MCEstimate make_estimate(int m, SamplerScheme scheme, double mu, double factor, std::uint64_t n, std::uint64_t hits) {
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return MCEstimate{m, scheme, mu, factor, n, hits, p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

double uniform(StreamEngine& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

BlochVector rotate(const Eigen::Matrix3d& r, const BlochVector& v) { return BlochVector(r * v.vec()); }

// Orthonormal e1, e2 spanning the plane orthogonal to unit n, with n = e1 x e2.
std::pair<BlochVector, BlochVector> plane_basis(const BlochVector& n) {
  const BlochVector helper = std::abs(n.x()) < 0.9 ? BlochVector::unit_x() : BlochVector::unit_y();
  const BlochVector e1 = helper.cross(n).normalized();
  return {e1, n.cross(e1)};
}

// Unit normal at dihedral angle gamma from y, azimuth uniform around y.
BlochVector tilted_normal(StreamEngine& rng) {
  const double gamma = uniform(rng, 0.0, kPi / 2.0);
  const double beta = uniform(rng, 0.0, 2.0 * kPi);
  const BlochVector w = std::cos(beta) * BlochVector::unit_x() + std::sin(beta) * BlochVector::unit_z();
  return (std::cos(gamma) * BlochVector::unit_y() + std::sin(gamma) * w).normalized();
}

BlochVector in_plane(const BlochVector& n, double angle) {
  const auto [e1, e2] = plane_basis(n);
  return (std::cos(angle) * e1 + std::sin(angle) * e2).normalized();
}

MeasurementSettings uniform_angle_pair(StreamEngine& rng) {
  MeasurementSettings s;
  const double theta_b = uniform(rng, 0.0, kPi);
  s.bob = {BlochVector::unit_z(),
           (std::cos(theta_b) * BlochVector::unit_z() + std::sin(theta_b) * BlochVector::unit_x()).normalized()};
  const BlochVector n = tilted_normal(rng);
  const BlochVector a1 = in_plane(n, uniform(rng, 0.0, 2.0 * kPi));
  const double theta_a = uniform(rng, 0.0, kPi);
  s.alice = {a1, (std::cos(theta_a) * a1 + std::sin(theta_a) * n.cross(a1)).normalized()};
  return s;
}

std::vector<BlochVector> uniform_angle_triad(StreamEngine& rng) {
  const Eigen::Matrix3d r = sample_rotation(rng);
  const BlochVector e1 = rotate(r, BlochVector::unit_x());
  const BlochVector e2 = rotate(r, BlochVector::unit_y());
  const BlochVector n = rotate(r, BlochVector::unit_z());
  const double theta = uniform(rng, 0.0, kPi);
  const double psi = uniform(rng, 0.0, kPi);
  const double chi = uniform(rng, 0.0, 2.0 * kPi);
  const BlochVector v3 = (std::cos(theta) * e1 + std::sin(theta) * e2).normalized();
  const BlochVector v1 =
      (std::cos(psi) * n + std::sin(psi) * (std::cos(chi) * e1 + std::sin(chi) * e2)).normalized();
  return {v1, e1, v3};
}

}  // namespace

std::string_view to_string(SamplerScheme s) {
  switch (s) {
    case SamplerScheme::UniformDihedral: return "dihedral";
    case SamplerScheme::Haar: return "haar";
    case SamplerScheme::Isotropic: return "isotropic";
    case SamplerScheme::UniformAngle: return "angle";
  }
  return "?";
}

SamplerScheme parse_scheme(std::string_view name) {
  if (name == "dihedral") return SamplerScheme::UniformDihedral;
  if (name == "haar") return SamplerScheme::Haar;
  if (name == "isotropic") return SamplerScheme::Isotropic;
  if (name == "angle") return SamplerScheme::UniformAngle;
  throw InvalidArgument("unknown sampler scheme '" + std::string(name) + "'");
}

std::string_view to_string(MeasurementClass c) { return c == MeasurementClass::Rom ? "rom" : "crm"; }

MeasurementClass parse_class(std::string_view name) {
  if (name == "rom") return MeasurementClass::Rom;
  if (name == "crm") return MeasurementClass::Crm;
  throw InvalidArgument("unknown measurement class '" + std::string(name) + "'");
}

bool compatible(MeasurementClass c, SamplerScheme s) {
  const bool orthogonal = s == SamplerScheme::UniformDihedral || s == SamplerScheme::Haar;
  return (c == MeasurementClass::Rom) == orthogonal;
}

SamplerScheme default_scheme(MeasurementClass c) {
  return c == MeasurementClass::Rom ? SamplerScheme::UniformDihedral : SamplerScheme::UniformAngle;
}

void MCConfig::validate() const {
  if (m != 2 && m != 3) throw InvalidArgument("settings count must be 2 or 3");
  if (!compatible(measurement_class, scheme))
    throw InvalidArgument("scheme '" + std::string(to_string(scheme)) + "' does not belong to class '" +
                          std::string(to_string(measurement_class)) + "'");
  if (mu_grid.empty()) throw InvalidArgument("mixing-probability grid is empty");
  for (double mu : mu_grid) (void)WernerParam(mu);
  if (samples < 1) throw InvalidArgument("need at least one sample");
  if (!(bound_factor >= 1.0) || !std::isfinite(bound_factor)) throw InvalidArgument("bound factor must be >= 1");
}

BlochVector sample_unit_vector(StreamEngine& rng) {
  std::normal_distribution<double> normal;
  for (;;) {
    const BlochVector g{normal(rng), normal(rng), normal(rng)};
    const double r = g.norm();
    if (r > 1e-12) return (1.0 / r) * g;
  }
}

Eigen::Matrix3d sample_rotation(StreamEngine& rng) {
  std::normal_distribution<double> normal;
  Eigen::Vector4d q;
  do {
    q = Eigen::Vector4d(normal(rng), normal(rng), normal(rng), normal(rng));
  } while (q.norm() < 1e-12);
  q.normalize();
  return Eigen::Quaterniond(q(0), q(1), q(2), q(3)).toRotationMatrix();
}

MeasurementSettings sample_orthogonal_pair(StreamEngine& rng, SamplerScheme scheme) {
  MeasurementSettings s;
  switch (scheme) {
    case SamplerScheme::UniformDihedral: {
      s.bob = {BlochVector::unit_z(), BlochVector::unit_x()};
      const BlochVector n = tilted_normal(rng);
      const BlochVector a1 = in_plane(n, uniform(rng, 0.0, 2.0 * kPi));
      s.alice = {a1, n.cross(a1)};
      return s;
    }
    case SamplerScheme::Haar: {
      const Eigen::Matrix3d ra = sample_rotation(rng);
      const Eigen::Matrix3d rb = sample_rotation(rng);
      s.alice = {rotate(ra, BlochVector::unit_z()), rotate(ra, BlochVector::unit_x())};
      s.bob = {rotate(rb, BlochVector::unit_z()), rotate(rb, BlochVector::unit_x())};
      return s;
    }
    default: throw InvalidArgument("orthogonal pairs need the dihedral or haar scheme");
  }
}

std::array<BlochVector, 3> sample_orthogonal_triad(StreamEngine& rng) {
  const Eigen::Matrix3d r = sample_rotation(rng);
  return {rotate(r, BlochVector::unit_x()), rotate(r, BlochVector::unit_y()), rotate(r, BlochVector::unit_z())};
}

MeasurementSettings sample_configuration(StreamEngine& rng, int m, SamplerScheme scheme) {
  if (m != 2 && m != 3) throw InvalidArgument("settings count must be 2 or 3");
  MeasurementSettings s;
  switch (scheme) {
    case SamplerScheme::UniformDihedral:
    case SamplerScheme::Haar:
      if (m == 2) return sample_orthogonal_pair(rng, scheme);
      for (auto* party : {&s.alice, &s.bob}) {
        const auto t = sample_orthogonal_triad(rng);
        party->assign(t.begin(), t.end());
      }
      return s;
    case SamplerScheme::Isotropic:
      for (auto* party : {&s.alice, &s.bob})
        for (int i = 0; i < m; ++i) party->push_back(sample_unit_vector(rng));
      return s;
    case SamplerScheme::UniformAngle:
      if (m == 2) return uniform_angle_pair(rng);
      s.alice = uniform_angle_triad(rng);
      s.bob = uniform_angle_triad(rng);
      return s;
  }
  return s;
}

double sample_geometry(std::uint64_t seed, std::uint64_t index, int m, SamplerScheme scheme) {
  StreamEngine rng(seed, index);
  const MeasurementSettings s = sample_configuration(rng, m, scheme);
  return db_lhs(s.alice, s.bob, 1.0);
}

std::vector<MCEstimate> violation_probability(const MCConfig& cfg) {
  cfg.validate();
  const double cut = cfg.bound_factor * db_vector_threshold(cfg.m);
  std::vector<double> scale, cuts(cfg.mu_grid.size(), cut);
  for (double mu : cfg.mu_grid) scale.push_back(std::pow(mu, cfg.m));
  const auto counts = count_exceedances(cfg.seed, cfg.samples, cfg.m, cfg.scheme, cfg.threads, scale, cuts);
  std::vector<MCEstimate> out;
  for (std::size_t j = 0; j < cfg.mu_grid.size(); ++j)
    out.push_back(make_estimate(cfg.m, cfg.scheme, cfg.mu_grid[j], cfg.bound_factor, cfg.samples, counts[j]));
  return out;
}

Histogram violation_histogram(const MCConfig& cfg, int bins) {
  cfg.validate();
  if (cfg.mu_grid.size() != 1) throw InvalidArgument("histogram needs exactly one mixing probability");
  if (bins < 1) throw InvalidArgument("histogram needs at least one bin");
  const double scale = std::pow(cfg.mu_grid.front(), cfg.m);
  const double cut = cfg.bound_factor * db_vector_threshold(cfg.m);

  Histogram h;
  h.upper = std::max(0.0, scale - cut);
  h.density.assign(static_cast<std::size_t>(bins), 0.0);
  if (h.upper <= 0.0) return h;
  const double width = h.bin_width();

  auto chunk_bins = run_chunks<std::vector<std::uint64_t>>(cfg.samples, cfg.threads, [&](std::uint64_t b, std::uint64_t e) {
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
    for (std::uint64_t i = b; i < e; ++i) {
      const double lhs = scale * sample_geometry(cfg.seed, i, cfg.m, cfg.scheme);
      if (lhs <= cut) continue;
      const auto idx = static_cast<std::size_t>(std::clamp((lhs - cut) / width, 0.0, bins - 1.0));
      ++counts[idx];
    }
    return counts;
  });
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
  for (const auto& c : chunk_bins)
    for (std::size_t j = 0; j < counts.size(); ++j) counts[j] += c[j];
  for (auto c : counts) h.violations += c;
  if (h.violations == 0) return h;
  for (std::size_t j = 0; j < counts.size(); ++j)
    h.density[j] = static_cast<double>(counts[j]) / (static_cast<double>(h.violations) * width);
  return h;
}

std::vector<RaisedBoundSpec> default_raised_bound_rows() {
  return {{2, MeasurementClass::Rom, default_scheme(MeasurementClass::Rom)},
          {3, MeasurementClass::Rom, default_scheme(MeasurementClass::Rom)},
          {2, MeasurementClass::Crm, default_scheme(MeasurementClass::Crm)},
          {3, MeasurementClass::Crm, default_scheme(MeasurementClass::Crm)}};
}

std::vector<RaisedBoundRow> raised_bound_table(std::span<const RaisedBoundSpec> rows, std::span<const double> factors,
                                               double mu, std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  std::vector<RaisedBoundRow> out;
  for (const RaisedBoundSpec& spec : rows) {
    MCConfig cfg{spec.m, spec.measurement_class, spec.scheme, {mu}, samples, 1.0, seed, threads};
    for (double f : factors) {
      cfg.bound_factor = f;
      cfg.validate();
    }
    std::vector<double> scale(factors.size(), std::pow(mu, spec.m)), cuts;
    for (double f : factors) cuts.push_back(f * db_vector_threshold(spec.m));
    const auto counts = count_exceedances(seed, samples, spec.m, spec.scheme, threads, scale, cuts);

    RaisedBoundRow row{std::to_string(spec.m) + " " + (spec.measurement_class == MeasurementClass::Rom ? "ROM" : "CRM"),
                       spec.m, spec.measurement_class, spec.scheme, {}};
    for (std::size_t j = 0; j < factors.size(); ++j)
      row.estimates.push_back(make_estimate(spec.m, spec.scheme, mu, factors[j], samples, counts[j]));
    out.push_back(std::move(row));
  }
  return out;
}

void write_mc_csv(std::ostream& os, std::span<const MCEstimate> estimates) {
  os << "m,scheme,mu,bound_factor,n_samples,p_violation,stderr\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (const MCEstimate& e : estimates) {
    line.str({});
    line << e.m << ',' << to_string(e.scheme) << ',' << e.mu << ',' << e.bound_factor << ',' << e.samples << ','
         << e.probability << ',' << e.standard_error << '\n';
    os << line.str();
  }
}

void write_histogram_csv(std::ostream& os, const Histogram& h) {
  os << "bin_left,bin_right,density\n";
  std::ostringstream line;
  line << std::setprecision(17);
  const double w = h.bin_width();
  for (std::size_t j = 0; j < h.density.size(); ++j) {
    line.str({});
    line << w * static_cast<double>(j) << ',' << w * static_cast<double>(j + 1) << ',' << h.density[j] << '\n';
    os << line.str();
  }
}

}  // namespace steering
