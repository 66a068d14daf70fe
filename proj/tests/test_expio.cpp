#include <doctest.h>

#include "steering/criteria.hpp"
#include "steering/error.hpp"
#include "steering/expio.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace steering;
using doctest::Approx;

namespace {

const double kMuAnchor = (4.0 * 0.972 - 1.0) / 3.0;

CountsDataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_counts(in);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return static_cast<std::size_t>(-1);
}

std::string parse_error_message(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

const char* kTwoSettings =
    "setting,a,b,counts\n"
    "1,+1,+1,10\n1,+1,-1,40\n1,-1,+1,40\n1,-1,-1,10\n"
    "2,+1,+1,100\n2,+1,-1,100\n2,-1,+1,100\n2,-1,-1,100\n";

std::vector<Criterion> entropic2() {
  return {Criterion::shannon(), Criterion::tsallis(EntropyOrder(2.0)), Criterion::renyi_half_inf()};
}

}  // namespace

TEST_CASE("parse a well-formed file") {
  const CountsDataset d = parse(kTwoSettings);
  CHECK(d.settings == 2);
  CHECK(d.records.size() == 2);
  CHECK_FALSE(d.has_cross_settings());
  CHECK(d.find(1, 1)->at(Outcome::Plus, Outcome::Minus) == 40);
  CHECK(d.find(2, 2)->total() == 400);
  CHECK(d.find(1, 2) == nullptr);

  const CountsDataset reordered = parse(
      "# comment\n\ncounts,b,a,setting\n10,+1,+1,1\n40,-1,+1,1\n40,+1,-1,1\n10,-1,-1,1\n"
      "1,1,1,2\n1,-1,1,2\n1,1,-1,2\n1,-1,-1,2\n");
  CHECK(reordered.find(1, 1)->at(Outcome::Plus, Outcome::Minus) == 40);
}

TEST_CASE("parse errors name the line") {
  CHECK(parse_error_line("setting,a,b,counts\n1,+1,+1,10\n1,+1,-1,-3\n") == 3);
  CHECK(parse_error_message("setting,a,b,counts\n1,+1,+1,10\n1,+1,-1,-3\n").find("negative count") !=
        std::string::npos);
  CHECK(parse_error_line("setting,a,b,counts\n1,+1,+1,10\n1,+1,+1,12\n") == 3);
  CHECK(parse_error_line("setting,a,b,counts\n1,+1,+2,10\n") == 2);
  CHECK(parse_error_line("setting,a,b,counts\n1,+1,+1\n") == 2);
  CHECK(parse_error_line("setting,a,b,counts\n1,+1,+1,ten\n") == 2);
  CHECK(parse_error_line("setting,a,b\n") == 1);
  CHECK(parse_error_message("").find("empty counts file") != std::string::npos);
  CHECK(parse_error_message("setting,a,b,counts\n").find("no data") != std::string::npos);

  const std::string gap =
      "setting,a,b,counts\n"
      "1,+1,+1,1\n1,+1,-1,1\n1,-1,+1,1\n1,-1,-1,1\n"
      "3,+1,+1,1\n3,+1,-1,1\n3,-1,+1,1\n3,-1,-1,1\n";
  CHECK(parse_error_message(gap).find("non-contiguous settings {1,3}") != std::string::npos);
  CHECK(parse_error_message("setting,a,b,counts\n1,+1,+1,1\n1,+1,-1,1\n1,-1,+1,1\n").find("setting 1/1") !=
        std::string::npos);
  CHECK_THROWS_AS(load_counts("/nonexistent/counts.csv"), ParseError);
}

TEST_CASE("counts to tables") {
  CountsRecord r;
  r.counts = {{{100, 100}, {100, 100}}};
  for (Outcome a : kOutcomes)
    for (Outcome b : kOutcomes) CHECK(counts_to_table(r).p(a, b) == 0.25);
  r.counts = {{{0, 500}, {500, 0}}};
  CHECK(counts_to_table(r).correlation() == -1.0);
  r.counts = {{{10, 40}, {40, 10}}};
  CHECK(counts_to_table(r).p(Outcome::Plus, Outcome::Plus) == Approx(0.1));
  r.counts = {{{0, 0}, {0, 0}}};
  CHECK_THROWS_AS(counts_to_table(r), DataError);
}

TEST_CASE("rescaling all counts leaves point estimates unchanged") {
  const auto base = synthesize_counts(WernerParam(0.9), mub_settings(2, 20.0, 10.0), 5000.0, true, 1);
  CountsDataset scaled = base;
  for (auto& rec : scaled.records)
    for (auto& row : rec.counts)
      for (auto& c : row) c *= 7;
  std::vector<Criterion> crit = entropic2();
  crit.push_back(Criterion::dimension_bounded());
  const AnalysisOptions none{0, 0.0, 0};
  const auto a = evaluate_with_errors(base, crit, none);
  const auto b = evaluate_with_errors(scaled, crit, none);
  for (std::size_t k = 0; k < crit.size(); ++k) CHECK(b[k].result.value == Approx(a[k].result.value).epsilon(1e-12));
}

TEST_CASE("zero replicates and zero jitter give a zero budget") {
  const auto d = synthesize_counts(WernerParam(0.95), nom_settings(2), 1e4, true, 3);
  for (const auto& rep : evaluate_with_errors(d, entropic2(), AnalysisOptions{0, 0.0, 9})) {
    CHECK(rep.errors.statistical == 0.0);
    CHECK(rep.errors.systematic == 0.0);
    CHECK(rep.errors.total == 0.0);
  }
  // The replicate count drives both error sources.
  const auto no_reps = evaluate_with_errors(d, entropic2(), AnalysisOptions{0, 0.5, 9});
  CHECK(no_reps[0].errors.total == 0.0);
  const auto sys_only = evaluate_with_errors(d, entropic2(), AnalysisOptions{50, 0.5, 9});
  CHECK(sys_only[0].errors.systematic > 0.0);
  const auto stat_only = evaluate_with_errors(d, entropic2(), AnalysisOptions{50, 0.0, 9});
  CHECK(stat_only[0].errors.statistical > 0.0);
  CHECK(stat_only[0].errors.systematic == 0.0);
}

TEST_CASE("error budget combines in quadrature") {
  const ErrorBudget b = make_budget(0.003, 0.004);
  CHECK(b.total == std::sqrt(0.003 * 0.003 + 0.004 * 0.004));
  const auto d = synthesize_counts(WernerParam(0.95), nom_settings(2), 1e4, true, 3);
  for (const auto& rep : evaluate_with_errors(d, entropic2(), AnalysisOptions{100, 0.2, 4}))
    CHECK(rep.errors.total ==
          std::sqrt(rep.errors.statistical * rep.errors.statistical + rep.errors.systematic * rep.errors.systematic));
}

TEST_CASE("noiseless counts reproduce the closed form") {
  const auto d = synthesize_counts(WernerParam(kMuAnchor), nom_settings(2), 1e9, false);
  const auto rep = evaluate_with_errors(d, std::vector<Criterion>{Criterion::tsallis(EntropyOrder(2.0))}, AnalysisOptions{0, 0.0, 0});
  CHECK(std::abs(rep[0].result.value - 0.311) <= 1e-3);
  CHECK(rep[0].result.value ==
        Approx(closed_form(Scenario{kMuAnchor, 0, 0, 2, MeasurementMode::Nom, {}}, Criterion::tsallis(EntropyOrder(2.0))))
            .epsilon(1e-8));

  double prev = 1.0;
  for (double n : {1e3, 1e5, 1e7}) {
    const auto dn = synthesize_counts(WernerParam(kMuAnchor), nom_settings(2), n, false);
    const auto r = evaluate_with_errors(dn, std::vector<Criterion>{Criterion::tsallis(EntropyOrder(2.0))}, AnalysisOptions{200, 0.0, 1});
    CHECK(r[0].errors.statistical < prev);
    prev = r[0].errors.statistical;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("statistical error scales as 1/sqrt(N)") {
  std::vector<double> sigma;
  for (double n : {1e3, 1e4, 1e5}) {
    const auto d = synthesize_counts(WernerParam(0.95), nom_settings(2), n, true);
    const auto r = evaluate_with_errors(d, std::vector<Criterion>{Criterion::tsallis(EntropyOrder(2.0)), Criterion::dimension_bounded()},
                                        AnalysisOptions{1000, 0.0, 21});
    sigma.push_back(r[0].errors.statistical);
  }
  for (std::size_t k = 1; k < sigma.size(); ++k) CHECK(sigma[k - 1] / sigma[k] == Approx(std::sqrt(10.0)).epsilon(0.2));
}

TEST_CASE("round trip at 1e7 counts per setting") {
  struct Case {
    Scenario s;
    std::vector<Criterion> crit;
  };
  const std::vector<Case> cases{
      {{0.97, 20.0, 15.0, 2, MeasurementMode::Mub, {}},
       {Criterion::shannon(), Criterion::tsallis(EntropyOrder(2.0)), Criterion::renyi_half_inf(),
        Criterion::dimension_bounded()}},
      {{0.9, 40.0, 60.0, 3, MeasurementMode::Mub, {}},
       {Criterion::shannon(), Criterion::tsallis(EntropyOrder(3.0)), Criterion::dimension_bounded()}},
      {{kMuAnchor, 0.0, 0.0, 3, MeasurementMode::Nom, {}},
       {Criterion::shannon(), Criterion::tsallis(EntropyOrder(2.0)), Criterion::dimension_bounded()}},
  };
  std::uint64_t seed = 100;
  for (const auto& k : cases) {
    const auto d = synthesize_counts(WernerParam(k.s.mu), k.s.settings(), 1e7, true, seed++);
    const auto reps = evaluate_with_errors(d, k.crit, AnalysisOptions{200, 0.0, seed++});
    for (std::size_t j = 0; j < k.crit.size(); ++j) {
      const double expect = closed_form(k.s, k.crit[j]);
      INFO(k.crit[j].family(), " m=", k.s.m, " got=", reps[j].result.value, " expect=", expect);
      CHECK(std::abs(reps[j].result.value - expect) <= 3.0 * reps[j].errors.statistical);
    }
  }
}

TEST_CASE("analysis is deterministic given the seed") {
  const auto d = synthesize_counts(WernerParam(0.95), mub_settings(2, 10.0, 0.0), 1e5, true, 8);
  const auto a = evaluate_with_errors(d, entropic2(), AnalysisOptions{300, 0.1, 77});
  const auto b = evaluate_with_errors(d, entropic2(), AnalysisOptions{300, 0.1, 77});
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].errors.statistical == b[k].errors.statistical);
    CHECK(a[k].errors.systematic == b[k].errors.systematic);
  }
  CHECK(reports_to_json(a) == reports_to_json(b));
}

TEST_CASE("criteria the data cannot serve") {
  const auto diag = synthesize_counts(WernerParam(0.95), nom_settings(3), 1e4, false);
  CHECK_THROWS_AS(evaluate_with_errors(diag, std::vector<Criterion>{Criterion::dimension_bounded()}, {}), DataError);
  CHECK_THROWS_AS(evaluate_with_errors(diag, std::vector<Criterion>{Criterion::renyi_half_inf()}, {}), DataError);
  CHECK_THROWS_AS(evaluate_with_errors(diag, std::vector<Criterion>{Criterion::shannon()}, AnalysisOptions{-1, 0.0, 0}), InvalidArgument);
  CHECK_THROWS_AS(evaluate_with_errors(diag, std::vector<Criterion>{Criterion::shannon()}, AnalysisOptions{10, -1.0, 0}), InvalidArgument);
}

TEST_CASE("write and re-read counts") {
  const auto d = synthesize_counts(WernerParam(0.93), mub_settings(3, 30.0, 20.0), 1e4, true, 6);
  CHECK(d.has_cross_settings());
  CHECK(d.records.size() == 9);
  std::ostringstream os;
  write_counts_csv(os, d);
  const auto back = parse(os.str());
  REQUIRE(back.records.size() == d.records.size());
  for (const auto& r : d.records) {
    const auto* s = back.find(r.setting, r.bob_setting);
    REQUIRE(s != nullptr);
    CHECK(s->counts == r.counts);
    REQUIRE(s->bob_vector.has_value());
    CHECK((s->bob_vector->vec() - r.bob_vector->vec()).norm() < 1e-12);
  }

  const auto path = std::filesystem::temp_directory_path() / "steering_counts_roundtrip.csv";
  {
    std::ofstream f(path);
    f << os.str();
  }
  CHECK(load_counts(path).records.size() == 9);
  std::filesystem::remove(path);
}

TEST_CASE("report json") {
  const auto d = synthesize_counts(WernerParam(0.95), nom_settings(2), 1e4, true, 3);
  const std::string json = reports_to_json(evaluate_with_errors(d, entropic2(), AnalysisOptions{10, 0.1, 1}));
  for (const char* key : {"\"criterion\"", "\"order\"", "\"value\"", "\"stat_err\"", "\"sys_err\"", "\"total_err\"",
                          "\"steerable\""})
    CHECK(json.find(key) != std::string::npos);
}
