#include "becoct/becoct.h"

#include <string>

#include "becoct/driver.hpp"

struct becoct_run {
  becoct::RunConfig config;
  becoct_progress_fn progress = nullptr;
  void* user = nullptr;
  std::string summary;
  bool has_cost = false;
  double final_cost = 0.0;
  bool has_check = false;
  becoct::ConsistencyReport check;
};

namespace {

thread_local std::string last_error;

becoct_status fail(becoct_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
becoct_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const becoct::Error& e) {
    return fail(static_cast<becoct_status>(e.status()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BECOCT_SOLVER_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(BECOCT_SOLVER_ERROR, e.what());
  }
}

becoct::ProgressFn progress_of(const becoct_run* r) {
  if (!r->progress) return {};
  return [fn = r->progress, user = r->user](const std::string& line) { fn(line.c_str(), user); };
}

}  // namespace

extern "C" {

const char* becoct_version(void) { return "0.1.0"; }

const char* becoct_last_error(void) { return last_error.c_str(); }

becoct_status becoct_run_from_file(const char* path, becoct_run** out) {
  if (!path || !out) return fail(BECOCT_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto* r = new becoct_run;
    try {
      r->config = becoct::load_config(path);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
    return BECOCT_OK;
  });
}

becoct_status becoct_run_from_string(const char* json_text, becoct_run** out) {
  if (!json_text || !out) return fail(BECOCT_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto* r = new becoct_run;
    try {
      r->config = becoct::parse_config(json_text);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
    return BECOCT_OK;
  });
}

void becoct_run_free(becoct_run* run) { delete run; }

becoct_status becoct_run_set_progress(becoct_run* run, becoct_progress_fn fn, void* user) {
  if (!run) return fail(BECOCT_INVALID_ARGUMENT, "null run");
  run->progress = fn;
  run->user = user;
  return BECOCT_OK;
}

becoct_status becoct_simulate(becoct_run* run, const char* outdir) {
  if (!run || !outdir) return fail(BECOCT_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const becoct::RunResult r = becoct::run_simulate(run->config, outdir, progress_of(run));
    run->summary = r.summary;
    run->has_cost = false;
    run->has_check = false;
    return BECOCT_OK;
  });
}

becoct_status becoct_optimize(becoct_run* run, const char* outdir, int iterations, int check) {
  if (!run || !outdir) return fail(BECOCT_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    becoct::OptimizeRequest req;
    if (iterations >= 0) req.iterations = iterations;
    req.check = check != 0;
    const becoct::RunResult r = becoct::run_optimize(run->config, outdir, req, progress_of(run));
    run->summary = r.summary;
    run->has_cost = true;
    run->final_cost = r.final_cost;
    run->has_check = r.check.has_value();
    if (r.check) run->check = *r.check;
    if (r.status != becoct::Status::ok) return fail(static_cast<becoct_status>(r.status), r.message);
    return BECOCT_OK;
  });
}

const char* becoct_run_summary(const becoct_run* run) { return run ? run->summary.c_str() : ""; }

becoct_status becoct_run_final_cost(const becoct_run* run, double* cost) {
  if (!run || !cost) return fail(BECOCT_INVALID_ARGUMENT, "null argument");
  if (!run->has_cost) return fail(BECOCT_INVALID_ARGUMENT, "no optimization has run");
  *cost = run->final_cost;
  return BECOCT_OK;
}

becoct_status becoct_run_check(const becoct_run* run, double* direct, double* adjoint) {
  if (!run || !direct || !adjoint) return fail(BECOCT_INVALID_ARGUMENT, "null argument");
  if (!run->has_check) return fail(BECOCT_INVALID_ARGUMENT, "no consistency check has run");
  *direct = run->check.direct;
  *adjoint = run->check.adjoint;
  return BECOCT_OK;
}

becoct_status becoct_fock_dimension(int n, int m, size_t* dim) {
  if (!dim) return fail(BECOCT_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *dim = static_cast<size_t>(becoct::FockBasis(n, m).dim());
    return BECOCT_OK;
  });
}

}  // extern "C"
