#pragma once

// Coincidence counts in, steering parameters with error budgets out.
//
// Counts CSV: header row naming at least `setting,a,b,counts`; a and b are
// +1 or -1, settings are numbered from 1 without gaps. Optional columns:
//   bob_setting   Bob's setting for the row (defaults to `setting`); rows with
//                 bob_setting != setting carry the cross-setting data the
//                 determinant criterion needs.
//   bx,by,bz      Bob's measurement direction for that bob_setting, used by
//                 the systematic-error model (default: z, x, y axes).
// Blank lines and lines starting with '#' are ignored.

#include "steering/criteria.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace steering {

/// Four coincidence counts for one (Alice setting, Bob setting) pair.
struct CountsRecord {
  int setting = 1;
  int bob_setting = 1;
  /// Indexed [a][b] with 0 for +1 and 1 for -1.
  std::array<std::array<std::uint64_t, 2>, 2> counts{};
  std::optional<BlochVector> bob_vector;

  std::uint64_t total() const;
  std::uint64_t& at(Outcome a, Outcome b) { return counts[JointTable::index(a)][JointTable::index(b)]; }
  std::uint64_t at(Outcome a, Outcome b) const { return counts[JointTable::index(a)][JointTable::index(b)]; }
};

/// Validated records: settings 1..m, each present pair complete, diagonal
/// pairs always present.
struct CountsDataset {
  int settings = 0;
  std::vector<CountsRecord> records;

  bool has_cross_settings() const;
  const CountsRecord* find(int setting, int bob_setting) const;
};

struct ErrorBudget {
  double statistical = 0.0;
  double systematic = 0.0;
  double total = 0.0;
};

/// total = sqrt(stat^2 + sys^2)
ErrorBudget make_budget(double statistical, double systematic);

CountsDataset parse_counts(std::istream& in);
CountsDataset load_counts(const std::filesystem::path& path);

void write_counts_csv(std::ostream& os, const CountsDataset& data);

/// Maximum-likelihood table n(a,b)/sum n.
JointTable counts_to_table(const CountsRecord& rec);

/// Diagonal tables plus the correlation matrix when every pair is present.
TableSet dataset_tables(const CountsDataset& data);

struct AnalysisOptions {
  /// Replicates for both the Poisson bootstrap and the angular jitter.
  int bootstrap = 1000;
  /// Width of the Gaussian angular jitter on Bob's directions, degrees.
  double jitter_deg = 0.1;
  std::uint64_t seed = 0;
};

struct CriterionReport {
  SteeringResult result;
  ErrorBudget errors;
};

/// Point estimates from the raw counts; statistical error from the spread of
/// Poisson-resampled counts; systematic error from the spread under angular
/// jitter of Bob's directions. Throws DataError when a criterion cannot be
/// evaluated on the dataset.
std::vector<CriterionReport> evaluate_with_errors(const CountsDataset& data, std::span<const Criterion> criteria,
                                                  const AnalysisOptions& options);

/// Counts for a Werner state measured with `settings`. With `seed` the
/// counts are Poisson draws around the expectation, otherwise the rounded
/// expectation. `cross` adds every off-diagonal setting pair.
CountsDataset synthesize_counts(WernerParam mu, const MeasurementSettings& settings, double counts_per_pair,
                                bool cross, std::optional<std::uint64_t> seed = std::nullopt);

/// JSON array of {criterion, order, value, stat_err, sys_err, total_err, steerable}.
std::string reports_to_json(std::span<const CriterionReport> reports);

}  // namespace steering
