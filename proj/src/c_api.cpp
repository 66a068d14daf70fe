#include "steering/steering_c.h"

#include "steering/criteria.hpp"
#include "steering/error.hpp"
#include "steering/expio.hpp"
#include "steering/montecarlo.hpp"
#include "steering/version.hpp"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

using namespace steering;

struct steer_sweep {
  std::vector<SweepRow> rows;
};
struct steer_mc_result {
  std::vector<MCEstimate> estimates;
};
struct steer_histogram {
  Histogram h;
};
struct steer_counts {
  CountsDataset data;
};
struct steer_report {
  std::vector<CriterionReport> reports;
};

namespace {

thread_local std::string g_last_error;

steer_status fail(steer_status s, const char* what) {
  g_last_error = what;
  return s;
}

// Runs fn and translates exceptions into status codes.
template <class Fn>
steer_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return STEER_OK;
  } catch (const InvalidArgument& e) {
    return fail(STEER_ERR_INVALID_ARGUMENT, e.what());
  } catch (const Unsupported& e) {
    return fail(STEER_ERR_UNSUPPORTED, e.what());
  } catch (const ParseError& e) {
    return fail(STEER_ERR_PARSE, e.what());
  } catch (const DataError& e) {
    return fail(STEER_ERR_DATA, e.what());
  } catch (const std::exception& e) {
    return fail(STEER_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(STEER_ERR_INTERNAL, "unknown error");
  }
}

template <class T>
void require_out(T* p) {
  if (!p) throw InvalidArgument("null output pointer");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Criterion to_cpp(const steer_criterion* c) {
  if (!c) throw InvalidArgument("null criterion");
  switch (c->kind) {
    case STEER_SHANNON: return Criterion::shannon();
    case STEER_TSALLIS: return Criterion::tsallis(EntropyOrder(c->q));
    case STEER_RENYI: return Criterion::renyi(EntropyOrder(c->r), EntropyOrder(c->s));
    case STEER_DIMENSION_BOUNDED: return Criterion::dimension_bounded();
  }
  throw InvalidArgument("unknown criterion kind");
}

steer_criterion to_c(const Criterion& c) {
  switch (c.kind()) {
    case CriterionKind::Shannon: return {STEER_SHANNON, 1.0, 1.0, 1.0};
    case CriterionKind::Tsallis: return {STEER_TSALLIS, c.q().value(), 1.0, 1.0};
    case CriterionKind::Renyi: return {STEER_RENYI, 1.0, c.r().value(), c.s().value()};
    case CriterionKind::DimensionBounded: return {STEER_DIMENSION_BOUNDED, 1.0, 1.0, 1.0};
  }
  return {};
}

Scenario to_cpp(const steer_scenario* s) {
  if (!s) throw InvalidArgument("null scenario");
  if (s->mode != STEER_MODE_MUB && s->mode != STEER_MODE_NOM) throw InvalidArgument("unknown measurement mode");
  return Scenario{s->mu, s->alpha_deg, s->phi_deg, s->m,
                  s->mode == STEER_MODE_MUB ? MeasurementMode::Mub : MeasurementMode::Nom, {}};
}

SamplerScheme to_cpp(steer_scheme s) {
  switch (s) {
    case STEER_SCHEME_DIHEDRAL: return SamplerScheme::UniformDihedral;
    case STEER_SCHEME_HAAR: return SamplerScheme::Haar;
    case STEER_SCHEME_ISOTROPIC: return SamplerScheme::Isotropic;
    case STEER_SCHEME_ANGLE: return SamplerScheme::UniformAngle;
  }
  throw InvalidArgument("unknown sampler scheme");
}

steer_scheme to_c(SamplerScheme s) {
  switch (s) {
    case SamplerScheme::UniformDihedral: return STEER_SCHEME_DIHEDRAL;
    case SamplerScheme::Haar: return STEER_SCHEME_HAAR;
    case SamplerScheme::Isotropic: return STEER_SCHEME_ISOTROPIC;
    case SamplerScheme::UniformAngle: return STEER_SCHEME_ANGLE;
  }
  return STEER_SCHEME_DIHEDRAL;
}

MCConfig to_cpp(const steer_mc_config* c) {
  if (!c) throw InvalidArgument("null Monte Carlo config");
  if (c->mu_count && !c->mu_grid) throw InvalidArgument("null mixing-probability grid");
  if (c->measurement_class != STEER_ROM && c->measurement_class != STEER_CRM)
    throw InvalidArgument("unknown measurement class");
  MCConfig cfg;
  cfg.m = c->m;
  cfg.measurement_class = c->measurement_class == STEER_ROM ? MeasurementClass::Rom : MeasurementClass::Crm;
  cfg.scheme = to_cpp(c->scheme);
  cfg.mu_grid.assign(c->mu_grid, c->mu_grid + c->mu_count);
  cfg.samples = c->samples;
  cfg.bound_factor = c->bound_factor;
  cfg.seed = c->seed;
  cfg.threads = c->threads;
  return cfg;
}

std::vector<Criterion> to_cpp(const steer_criterion* criteria, size_t count) {
  if (count && !criteria) throw InvalidArgument("null criteria array");
  std::vector<Criterion> out;
  for (size_t i = 0; i < count; ++i) out.push_back(to_cpp(&criteria[i]));
  return out;
}

}  // namespace

extern "C" {

const char* steer_version(void) { return kVersion; }

const char* steer_last_error(void) { return g_last_error.c_str(); }

void steer_string_free(char* s) { std::free(s); }

steer_status steer_criterion_parse(const char* name, double r, double s, steer_criterion* out) {
  return guarded([&] {
    require_out(out);
    if (!name) throw InvalidArgument("null criterion name");
    *out = to_c(Criterion::parse(name, std::make_pair(r, s)));
  });
}

steer_status steer_criterion_label(const steer_criterion* c, char** family, char** order) {
  return guarded([&] {
    require_out(family);
    require_out(order);
    const Criterion cc = to_cpp(c);
    *family = dup_string(cc.family());
    *order = dup_string(cc.order_label());
  });
}

steer_status steer_default_scheme(steer_mc_class cls, steer_scheme* out) {
  return guarded([&] {
    require_out(out);
    *out = to_c(default_scheme(cls == STEER_ROM ? MeasurementClass::Rom : MeasurementClass::Crm));
  });
}

steer_status steer_scheme_parse(const char* name, steer_scheme* out) {
  return guarded([&] {
    require_out(out);
    if (!name) throw InvalidArgument("null scheme name");
    *out = to_c(parse_scheme(name));
  });
}

steer_status steer_class_parse(const char* name, steer_mc_class* out) {
  return guarded([&] {
    require_out(out);
    if (!name) throw InvalidArgument("null class name");
    *out = parse_class(name) == MeasurementClass::Rom ? STEER_ROM : STEER_CRM;
  });
}

steer_status steer_bound_db(int m, int d_a, double* out) {
  return guarded([&] {
    require_out(out);
    *out = db_bound(m, d_a);
  });
}

steer_status steer_bound_tsallis(double q, int m, double* out) {
  return guarded([&] {
    require_out(out);
    *out = eur_bound_tsallis(EntropyOrder(q), m);
  });
}

steer_status steer_bound_renyi2(double* out) {
  return guarded([&] {
    require_out(out);
    *out = eur_bound_renyi2();
  });
}

steer_status steer_closed_form(const steer_scenario* s, const steer_criterion* c, double* out) {
  return guarded([&] {
    require_out(out);
    *out = closed_form(to_cpp(s), to_cpp(c));
  });
}

steer_status steer_pipeline(const steer_scenario* s, const steer_criterion* c, double* out) {
  return guarded([&] {
    require_out(out);
    *out = evaluate_pipeline(to_cpp(s), to_cpp(c)).value;
  });
}

steer_status steer_critical_mu(double alpha_deg, double phi_deg, double* out) {
  return guarded([&] {
    require_out(out);
    *out = critical_mu(alpha_deg, phi_deg).value;
  });
}

steer_status steer_critical_alpha(const steer_criterion* c, double mu, double phi_deg, int m, double* alpha_deg,
                                  int* found) {
  return guarded([&] {
    require_out(alpha_deg);
    require_out(found);
    const auto a = critical_alpha(to_cpp(c), mu, phi_deg, m);
    *found = a.has_value();
    *alpha_deg = a.value_or(0.0);
  });
}

steer_status steer_sweep_run(const steer_scenario* base, const double* alphas_deg, size_t alpha_count,
                             const steer_criterion* criteria, size_t criteria_count, steer_sweep** out) {
  return guarded([&] {
    require_out(out);
    if (alpha_count && !alphas_deg) throw InvalidArgument("null alpha grid");
    const Scenario s = to_cpp(base);
    const SweepGrid grid{s.mu, s.phi_deg, s.m, s.mode, std::vector<double>(alphas_deg, alphas_deg + alpha_count)};
    const auto crit = to_cpp(criteria, criteria_count);
    *out = new steer_sweep{sweep(grid, crit)};
  });
}

size_t steer_sweep_size(const steer_sweep* sw) { return sw ? sw->rows.size() : 0; }

steer_status steer_sweep_value(const steer_sweep* sw, size_t row, double* alpha_deg, double* value) {
  return guarded([&] {
    require_out(sw);
    require_out(alpha_deg);
    require_out(value);
    if (row >= sw->rows.size()) throw InvalidArgument("sweep row out of range");
    *alpha_deg = sw->rows[row].alpha_deg;
    *value = sw->rows[row].result.value;
  });
}

steer_status steer_sweep_csv(const steer_sweep* sw, char** csv) {
  return guarded([&] {
    require_out(sw);
    require_out(csv);
    std::ostringstream os;
    write_sweep_csv(os, sw->rows);
    *csv = dup_string(os.str());
  });
}

void steer_sweep_free(steer_sweep* sw) { delete sw; }

steer_status steer_mc_run(const steer_mc_config* cfg, steer_mc_result** out) {
  return guarded([&] {
    require_out(out);
    *out = new steer_mc_result{violation_probability(to_cpp(cfg))};
  });
}

steer_status steer_mc_raised_bound_table(const double* factors, size_t factor_count, double mu, uint64_t samples,
                                         uint64_t seed, unsigned threads, steer_mc_result** out) {
  return guarded([&] {
    require_out(out);
    if (!factors || factor_count == 0) throw InvalidArgument("no bound factors");
    const auto rows = default_raised_bound_rows();
    const auto table =
        raised_bound_table(rows, std::span<const double>(factors, factor_count), mu, samples, seed, threads);
    auto result = std::make_unique<steer_mc_result>();
    for (const auto& row : table)
      result->estimates.insert(result->estimates.end(), row.estimates.begin(), row.estimates.end());
    *out = result.release();
  });
}

size_t steer_mc_size(const steer_mc_result* r) { return r ? r->estimates.size() : 0; }

steer_status steer_mc_get(const steer_mc_result* r, size_t i, steer_mc_estimate* out) {
  return guarded([&] {
    require_out(r);
    require_out(out);
    if (i >= r->estimates.size()) throw InvalidArgument("estimate index out of range");
    const MCEstimate& e = r->estimates[i];
    *out = steer_mc_estimate{e.m,       to_c(e.scheme), e.mu,          e.bound_factor,
                             e.samples, e.violations,   e.probability, e.standard_error};
  });
}

steer_status steer_mc_csv(const steer_mc_result* r, char** csv) {
  return guarded([&] {
    require_out(r);
    require_out(csv);
    std::ostringstream os;
    write_mc_csv(os, r->estimates);
    *csv = dup_string(os.str());
  });
}

void steer_mc_free(steer_mc_result* r) { delete r; }

steer_status steer_mc_histogram(const steer_mc_config* cfg, int bins, steer_histogram** out) {
  return guarded([&] {
    require_out(out);
    *out = new steer_histogram{violation_histogram(to_cpp(cfg), bins)};
  });
}

size_t steer_histogram_bins(const steer_histogram* h) { return h ? h->h.density.size() : 0; }

steer_status steer_histogram_bin(const steer_histogram* h, size_t i, double* left, double* right, double* density) {
  return guarded([&] {
    require_out(h);
    require_out(left);
    require_out(right);
    require_out(density);
    if (i >= h->h.density.size()) throw InvalidArgument("bin index out of range");
    const double w = h->h.bin_width();
    *left = w * static_cast<double>(i);
    *right = w * static_cast<double>(i + 1);
    *density = h->h.density[i];
  });
}

steer_status steer_histogram_csv(const steer_histogram* h, char** csv) {
  return guarded([&] {
    require_out(h);
    require_out(csv);
    std::ostringstream os;
    write_histogram_csv(os, h->h);
    *csv = dup_string(os.str());
  });
}

void steer_histogram_free(steer_histogram* h) { delete h; }

steer_status steer_counts_load(const char* path, steer_counts** out) {
  return guarded([&] {
    require_out(out);
    if (!path) throw InvalidArgument("null path");
    *out = new steer_counts{load_counts(path)};
  });
}

steer_status steer_counts_parse(const char* text, steer_counts** out) {
  return guarded([&] {
    require_out(out);
    if (!text) throw InvalidArgument("null text");
    std::istringstream in(text);
    *out = new steer_counts{parse_counts(in)};
  });
}

steer_status steer_counts_synthesize(const steer_scenario* s, double counts_per_pair, int cross, int seed_enabled,
                                     uint64_t seed, steer_counts** out) {
  return guarded([&] {
    require_out(out);
    const Scenario sc = to_cpp(s);
    sc.validate();
    std::optional<std::uint64_t> maybe_seed;
    if (seed_enabled) maybe_seed = seed;
    *out = new steer_counts{synthesize_counts(WernerParam(sc.mu), sc.settings(), counts_per_pair, cross != 0, maybe_seed)};
  });
}

steer_status steer_counts_csv(const steer_counts* c, char** csv) {
  return guarded([&] {
    require_out(c);
    require_out(csv);
    std::ostringstream os;
    write_counts_csv(os, c->data);
    *csv = dup_string(os.str());
  });
}

int steer_counts_settings(const steer_counts* c) { return c ? c->data.settings : 0; }

void steer_counts_free(steer_counts* c) { delete c; }

steer_status steer_analyze(const steer_counts* counts, const steer_criterion* criteria, size_t criteria_count,
                           int bootstrap, double jitter_deg, uint64_t seed, steer_report** out) {
  return guarded([&] {
    require_out(out);
    require_out(counts);
    const auto crit = to_cpp(criteria, criteria_count);
    *out = new steer_report{evaluate_with_errors(counts->data, crit, AnalysisOptions{bootstrap, jitter_deg, seed})};
  });
}

size_t steer_report_size(const steer_report* r) { return r ? r->reports.size() : 0; }

steer_status steer_report_get(const steer_report* r, size_t i, steer_report_entry* out) {
  return guarded([&] {
    require_out(r);
    require_out(out);
    if (i >= r->reports.size()) throw InvalidArgument("report index out of range");
    const CriterionReport& rep = r->reports[i];
    *out = steer_report_entry{to_c(rep.result.criterion), rep.result.m,        rep.result.value,
                              rep.errors.statistical,     rep.errors.systematic, rep.errors.total,
                              rep.result.steerable ? 1 : 0};
  });
}

steer_status steer_report_json(const steer_report* r, char** json) {
  return guarded([&] {
    require_out(r);
    require_out(json);
    *json = dup_string(reports_to_json(r->reports));
  });
}

void steer_report_free(steer_report* r) { delete r; }

}  // extern "C"
