#include <doctest.h>

#include "steering/steering_c.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

using doctest::Approx;

extern "C" int steering_header_is_c(void);

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  steer_string_free(s);
  return out;
}

steer_criterion criterion(const char* name, double r = 0, double s = 0) {
  steer_criterion c{};
  REQUIRE(steer_criterion_parse(name, r, s, &c) == STEER_OK);
  return c;
}

}  // namespace

TEST_CASE("header compiles as C") { CHECK(steering_header_is_c() == 1); }

TEST_CASE("version and errors") {
  CHECK(std::strlen(steer_version()) > 0);
  steer_criterion c{};
  CHECK(steer_criterion_parse("nonsense", 0, 0, &c) == STEER_ERR_INVALID_ARGUMENT);
  CHECK(std::string(steer_last_error()).find("nonsense") != std::string::npos);
  CHECK(steer_criterion_parse("shannon", 0, 0, nullptr) == STEER_ERR_INVALID_ARGUMENT);
  CHECK(steer_criterion_parse("shannon", 0, 0, &c) == STEER_OK);
  CHECK(std::string(steer_last_error()).empty());
  steer_string_free(nullptr);
  steer_sweep_free(nullptr);
  steer_mc_free(nullptr);
  steer_histogram_free(nullptr);
  steer_counts_free(nullptr);
  steer_report_free(nullptr);
}

TEST_CASE("criteria and labels") {
  const steer_criterion t = criterion("tsallis2");
  CHECK(t.kind == STEER_TSALLIS);
  CHECK(t.q == 2.0);
  const steer_criterion r = criterion("renyiRS", 2.0 / 3.0, 2.0);
  CHECK(r.kind == STEER_RENYI);
  char *family = nullptr, *order = nullptr;
  REQUIRE(steer_criterion_label(&r, &family, &order) == STEER_OK);
  CHECK(take(family) == "renyi");
  CHECK(take(order).rfind("r=0.666", 0) == 0);

  const steer_criterion ri = criterion("renyi");
  CHECK(std::isinf(ri.s));
  const steer_criterion bad{STEER_RENYI, 1, 2.0, 2.0};
  double v = 0;
  const steer_scenario s{0.9, 0, 0, 2, STEER_MODE_MUB};
  CHECK(steer_closed_form(&s, &bad, &v) == STEER_ERR_INVALID_ARGUMENT);
}

TEST_CASE("bounds and parameters") {
  double v = 0;
  REQUIRE(steer_bound_db(2, 2, &v) == STEER_OK);
  CHECK(v == Approx(1.0 / (8.0 * std::sqrt(2.0))));
  REQUIRE(steer_bound_db(3, 2, &v) == STEER_OK);
  CHECK(v == Approx(1.0 / 108.0));
  REQUIRE(steer_bound_tsallis(2.0, 3, &v) == STEER_OK);
  CHECK(v == Approx(1.0));
  REQUIRE(steer_bound_renyi2(&v) == STEER_OK);
  CHECK(v == Approx(std::log(2.0)));

  const double mu = (4.0 * 0.972 - 1.0) / 3.0;
  const steer_scenario nom3{mu, 0, 0, 3, STEER_MODE_NOM};
  const steer_criterion sh = criterion("shannon");
  double cf = 0, pipe = 0;
  REQUIRE(steer_closed_form(&nom3, &sh, &cf) == STEER_OK);
  REQUIRE(steer_pipeline(&nom3, &sh, &pipe) == STEER_OK);
  CHECK(std::abs(cf - 0.667) <= 1e-3);
  CHECK(std::abs(cf - pipe) <= 1e-10);

  const steer_criterion renyi = criterion("renyi");
  CHECK(steer_closed_form(&nom3, &renyi, &cf) == STEER_ERR_UNSUPPORTED);
  const steer_scenario bad{1.5, 0, 0, 2, STEER_MODE_MUB};
  CHECK(steer_closed_form(&bad, &sh, &cf) == STEER_ERR_INVALID_ARGUMENT);

  REQUIRE(steer_critical_mu(0, 0, &v) == STEER_OK);
  CHECK(v == Approx(1.0 / std::sqrt(2.0)));
  int found = 0;
  const steer_criterion t2 = criterion("tsallis2");
  REQUIRE(steer_critical_alpha(&t2, 0.9733333333333333, 30.0, 2, &v, &found) == STEER_OK);
  CHECK(found == 1);
  CHECK(v == Approx(39.0).epsilon(0.3 / 39.0));
  REQUIRE(steer_critical_alpha(&t2, 0.5, 0.0, 2, &v, &found) == STEER_OK);
  CHECK(found == 0);
}

TEST_CASE("sweeps") {
  const std::vector<double> alphas{0, 30, 60, 90};
  const std::vector<steer_criterion> crit{criterion("shannon"), criterion("db")};
  const steer_scenario base{0.9733, 0, 0, 2, STEER_MODE_MUB};
  steer_sweep* sw = nullptr;
  REQUIRE(steer_sweep_run(&base, alphas.data(), alphas.size(), crit.data(), crit.size(), &sw) == STEER_OK);
  CHECK(steer_sweep_size(sw) == 8);
  double a = 0, v = 0;
  REQUIRE(steer_sweep_value(sw, 2, &a, &v) == STEER_OK);
  CHECK(a == 30.0);
  CHECK(steer_sweep_value(sw, 8, &a, &v) == STEER_ERR_INVALID_ARGUMENT);
  char* csv = nullptr;
  REQUIRE(steer_sweep_csv(sw, &csv) == STEER_OK);
  CHECK(take(csv).rfind("mu,alpha_deg,phi_deg,m,criterion,order,value,steerable\n", 0) == 0);
  steer_sweep_free(sw);
}

TEST_CASE("monte carlo") {
  const std::vector<double> grid{0.9, 1.0};
  steer_mc_config cfg{2, STEER_ROM, STEER_SCHEME_DIHEDRAL, grid.data(), grid.size(), 50000, 1.0, 7, 0};
  steer_mc_result* res = nullptr;
  REQUIRE(steer_mc_run(&cfg, &res) == STEER_OK);
  REQUIRE(steer_mc_size(res) == 2);
  steer_mc_estimate e{};
  REQUIRE(steer_mc_get(res, 1, &e) == STEER_OK);
  CHECK(e.samples == 50000);
  CHECK(e.probability == Approx(2.0 / 3.0).epsilon(0.02));
  char* csv = nullptr;
  REQUIRE(steer_mc_csv(res, &csv) == STEER_OK);
  CHECK(take(csv).find("2,dihedral,1,1,50000,") != std::string::npos);
  steer_mc_free(res);

  cfg.scheme = STEER_SCHEME_ISOTROPIC;
  CHECK(steer_mc_run(&cfg, &res) == STEER_ERR_INVALID_ARGUMENT);

  steer_scheme s{};
  REQUIRE(steer_default_scheme(STEER_CRM, &s) == STEER_OK);
  CHECK(s == STEER_SCHEME_ANGLE);
  REQUIRE(steer_scheme_parse("haar", &s) == STEER_OK);
  CHECK(s == STEER_SCHEME_HAAR);
  steer_mc_class cls{};
  REQUIRE(steer_class_parse("crm", &cls) == STEER_OK);
  CHECK(cls == STEER_CRM);

  const double one = 1.0;
  steer_mc_config hc{2, STEER_ROM, STEER_SCHEME_HAAR, &one, 1, 20000, 1.0, 3, 0};
  steer_histogram* h = nullptr;
  REQUIRE(steer_mc_histogram(&hc, 10, &h) == STEER_OK);
  REQUIRE(steer_histogram_bins(h) == 10);
  double integral = 0, left = 0, right = 0, density = 0;
  for (size_t i = 0; i < 10; ++i) {
    REQUIRE(steer_histogram_bin(h, i, &left, &right, &density) == STEER_OK);
    integral += density * (right - left);
  }
  CHECK(integral == Approx(1.0).epsilon(1e-9));
  steer_histogram_free(h);

  const std::vector<double> factors{1.0, 1.1};
  REQUIRE(steer_mc_raised_bound_table(factors.data(), factors.size(), 1.0, 20000, 1, 0, &res) == STEER_OK);
  CHECK(steer_mc_size(res) == 8);
  steer_mc_free(res);
}

TEST_CASE("counts and analysis") {
  const steer_scenario nom3{(4.0 * 0.972 - 1.0) / 3.0, 0, 0, 3, STEER_MODE_NOM};
  steer_counts* counts = nullptr;
  REQUIRE(steer_counts_synthesize(&nom3, 1e7, 1, 0, 0, &counts) == STEER_OK);
  CHECK(steer_counts_settings(counts) == 3);
  char* csv = nullptr;
  REQUIRE(steer_counts_csv(counts, &csv) == STEER_OK);
  const std::string text = take(csv);

  steer_counts* reparsed = nullptr;
  REQUIRE(steer_counts_parse(text.c_str(), &reparsed) == STEER_OK);
  const std::vector<steer_criterion> crit{criterion("shannon"), criterion("tsallis2"), criterion("db")};
  steer_report* rep = nullptr;
  REQUIRE(steer_analyze(reparsed, crit.data(), crit.size(), 50, 0.1, 1, &rep) == STEER_OK);
  REQUIRE(steer_report_size(rep) == 3);
  const double expect[] = {0.667, 0.620, 0.021};
  for (size_t i = 0; i < 3; ++i) {
    steer_report_entry e{};
    REQUIRE(steer_report_get(rep, i, &e) == STEER_OK);
    CHECK(std::abs(e.value - expect[i]) <= 1e-3);
    CHECK(e.total_err == Approx(std::hypot(e.stat_err, e.sys_err)));
    CHECK(e.steerable == 1);
  }
  char* json = nullptr;
  REQUIRE(steer_report_json(rep, &json) == STEER_OK);
  CHECK(take(json).find("\"total_err\"") != std::string::npos);
  steer_report_free(rep);

  const steer_criterion renyi = criterion("renyi");
  CHECK(steer_analyze(reparsed, &renyi, 1, 10, 0.1, 1, &rep) == STEER_ERR_DATA);
  steer_counts_free(reparsed);
  steer_counts_free(counts);

  CHECK(steer_counts_parse("", &counts) == STEER_ERR_PARSE);
  CHECK(std::string(steer_last_error()).find("empty") != std::string::npos);
  CHECK(steer_counts_parse("setting,a,b,counts\n1,+1,+1,-3\n", &counts) == STEER_ERR_PARSE);
  CHECK(std::string(steer_last_error()).rfind("line 2:", 0) == 0);
  CHECK(steer_counts_load("/nonexistent.csv", &counts) == STEER_ERR_PARSE);
}
