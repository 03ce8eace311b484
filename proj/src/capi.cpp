#include "plateau.h"

#include "core/experiments.hpp"
#include "core/objective.hpp"
#include "core/parallel.hpp"

#include <cstring>
#include <string>

using namespace plateau;

namespace {

thread_local std::string g_last_error;

int set_error(int code, const char* what) {
  g_last_error = what ? what : "";
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const invalid_argument& e) {
    return set_error(PL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const unsupported& e) {
    return set_error(PL_ERR_UNSUPPORTED, e.what());
  } catch (const numeric_failure& e) {
    return set_error(PL_ERR_NUMERIC, e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(PL_ERR_PARSE, e.what());
  } catch (const std::exception& e) {
    return set_error(PL_ERR_INTERNAL, e.what());
  }
}

}  // namespace

struct pl_mixture {
  GaussianMixture impl;
};
struct pl_periodic {
  PeriodicFn impl;
};
struct pl_problem {
  Problem impl;
};

extern "C" {

const char* pl_version(void) { return "0.1.0"; }

const char* pl_error_message(void) { return g_last_error.c_str(); }

int pl_set_workers(int workers) {
  return guarded([&] {
    if (workers < 0) throw invalid_argument("workers must be >= 0");
    set_workers(workers);
    return PL_OK;
  });
}

int pl_mixture_from_json(const char* json, pl_mixture** out) {
  return guarded([&] {
    if (!json || !out) throw invalid_argument("null argument");
    *out = new pl_mixture{GaussianMixture::from_json(json)};
    return PL_OK;
  });
}

void pl_mixture_free(pl_mixture* m) { delete m; }

int pl_mixture_dim(const pl_mixture* m, int* out) {
  return guarded([&] {
    if (!m || !out) throw invalid_argument("null argument");
    *out = m->impl.dim();
    return PL_OK;
  });
}

int pl_mixture_sample(const pl_mixture* m, long long n, unsigned long long seed, double* out) {
  return guarded([&] {
    if (!m || !out) throw invalid_argument("null argument");
    m->impl.sample_into(out, n, seed);
    return PL_OK;
  });
}

int pl_mixture_density(const pl_mixture* m, const double* x, int dim, double* out) {
  return guarded([&] {
    if (!m || !x || !out) throw invalid_argument("null argument");
    Vec v = Eigen::Map<const Vec>(x, dim);
    *out = m->impl.density(v);
    return PL_OK;
  });
}

int pl_mixture_epsilon(const pl_mixture* m, int component, double r, double* out) {
  return guarded([&] {
    if (!m || !out) throw invalid_argument("null argument");
    *out = m->impl.epsilon_profile(component)(r);
    return PL_OK;
  });
}

int pl_mixture_epsilon_tail_sum(const pl_mixture* m, int component, double r, int n_max,
                                double* partial, double* remainder_bound) {
  return guarded([&] {
    if (!m || !partial || !remainder_bound) throw invalid_argument("null argument");
    const TailSum ts = bound_tail_sum(m->impl.epsilon_profile(component), r, n_max);
    *partial = ts.partial;
    *remainder_bound = ts.remainder_bound;
    return PL_OK;
  });
}

int pl_periodic_from_json(const char* json, pl_periodic** out) {
  return guarded([&] {
    if (!json || !out) throw invalid_argument("null argument");
    *out = new pl_periodic{PeriodicFn::from_json(json)};
    return PL_OK;
  });
}

void pl_periodic_free(pl_periodic* p) { delete p; }

int pl_periodic_eval(const pl_periodic* p, double t, double* out) {
  return guarded([&] {
    if (!p || !out) throw invalid_argument("null argument");
    *out = p->impl(t);
    return PL_OK;
  });
}

int pl_periodic_fourier_coeff(const pl_periodic* p, int z, double* re, double* im) {
  return guarded([&] {
    if (!p || !re || !im) throw invalid_argument("null argument");
    const int zmax = std::max(1, std::abs(z));
    const auto fc = p->impl.fourier_coeffs(zmax);
    const auto a = fc.a(z);
    *re = a.real();
    *im = a.imag();
    return PL_OK;
  });
}

int pl_problem_create(const char* mixture_json, const char* psi_json, const char* family_json,
                      const double* wstar, int dim, pl_problem** out) {
  return guarded([&] {
    if (!mixture_json || !psi_json || !family_json || !wstar || !out) {
      throw invalid_argument("null argument");
    }
    GaussianMixture mixture = GaussianMixture::from_json(mixture_json);
    PeriodicFn psi = PeriodicFn::from_json(psi_json);
    PredictorFamily family = PredictorFamily::from_json(family_json, mixture.dim());
    Vec w = Eigen::Map<const Vec>(wstar, dim);
    *out = new pl_problem{Problem(std::move(mixture), std::move(psi), std::move(w), family)};
    return PL_OK;
  });
}

void pl_problem_free(pl_problem* p) { delete p; }

int pl_problem_param_dim(const pl_problem* p, int* out) {
  return guarded([&] {
    if (!p || !out) throw invalid_argument("null argument");
    *out = p->impl.family.param_dim();
    return PL_OK;
  });
}

int pl_problem_objective_mc(const pl_problem* p, const double* w, int dim, long long n,
                            unsigned long long seed, double* value, double* std_error) {
  return guarded([&] {
    if (!p || !w || !value) throw invalid_argument("null argument");
    const Estimate e = objective_mc(p->impl, Eigen::Map<const Vec>(w, dim), n, seed);
    *value = e.value;
    if (std_error) *std_error = e.std_error;
    return PL_OK;
  });
}

int pl_problem_objective_closed(const pl_problem* p, const double* w, int dim, double* value) {
  return guarded([&] {
    if (!p || !w || !value) throw invalid_argument("null argument");
    *value = objective_closed(p->impl, Eigen::Map<const Vec>(w, dim));
    return PL_OK;
  });
}

int pl_problem_grad_closed(const pl_problem* p, const double* w, int dim, double* out) {
  return guarded([&] {
    if (!p || !w || !out) throw invalid_argument("null argument");
    const Vec g = grad_closed(p->impl, Eigen::Map<const Vec>(w, dim));
    std::memcpy(out, g.data(), sizeof(double) * g.size());
    return PL_OK;
  });
}

int pl_problem_grad_mc(const pl_problem* p, const double* w, int dim, long long n,
                       unsigned long long seed, double* out, double* std_error_out) {
  return guarded([&] {
    if (!p || !w || !out) throw invalid_argument("null argument");
    const VecEstimate e = grad_mc(p->impl, Eigen::Map<const Vec>(w, dim), n, seed);
    std::memcpy(out, e.value.data(), sizeof(double) * e.value.size());
    if (std_error_out) {
      std::memcpy(std_error_out, e.std_error.data(), sizeof(double) * e.std_error.size());
    }
    return PL_OK;
  });
}

namespace {

using Runner = experiments::RunResult (*)(const experiments::json&, const std::string&);

int run_subcommand(const char* name, Runner runner, const char* config_json, const char* out_dir,
                   int* verdict_out) {
  return guarded([&] {
    if (!config_json || !out_dir) throw invalid_argument("null argument");
    const auto user = experiments::json::parse(config_json);
    const auto config = experiments::merged_config(name, user);
    const auto result = runner(config, out_dir);
    if (verdict_out) {
      *verdict_out = result.outcome == experiments::RunOutcome::Ok ? 1 : 0;
    }
    return PL_OK;
  });
}

}  // namespace

int pl_run_landscape(const char* config_json, const char* out_dir, int* verdict_out) {
  return run_subcommand("landscape", &experiments::run_landscape, config_json, out_dir,
                        verdict_out);
}

int pl_run_variance_scan(const char* config_json, const char* out_dir, int* verdict_out) {
  return run_subcommand("variance_scan", &experiments::run_variance_scan, config_json, out_dir,
                        verdict_out);
}

int pl_run_trajectory(const char* config_json, const char* out_dir, int* verdict_out) {
  return run_subcommand("trajectory", &experiments::run_trajectory, config_json, out_dir,
                        verdict_out);
}

int pl_run_invariance(const char* config_json, const char* out_dir, int* verdict_out) {
  return run_subcommand("invariance", &experiments::run_invariance, config_json, out_dir,
                        verdict_out);
}

int pl_run_reduction_check(const char* config_json, const char* out_dir, int* verdict_out) {
  return run_subcommand("reduction_check", &experiments::run_reduction_check, config_json,
                        out_dir, verdict_out);
}

int pl_effective_config(const char* subcommand, const char* config_json, char* buf,
                        size_t buf_size, size_t* len) {
  return guarded([&] {
    if (!subcommand || !config_json || !len) throw invalid_argument("null argument");
    const auto user = experiments::json::parse(config_json);
    const std::string merged = experiments::merged_config(subcommand, user).dump();
    *len = merged.size();
    if (buf && buf_size > 0) {
      const size_t copy = std::min(buf_size - 1, merged.size());
      std::memcpy(buf, merged.data(), copy);
      buf[copy] = '\0';
    }
    return PL_OK;
  });
}

}  // extern "C"
