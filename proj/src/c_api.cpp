#include "fracop/fracop.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <ios>
#include <string>

#include "json.hpp"

#include "fracop/core.hpp"
#include "fracop/drivers.hpp"
#include "fracop/error.hpp"
#include "fracop/parallel.hpp"

struct fracop_field {
  fracop::Field f;
};

namespace {

thread_local std::string last_error;

fracop_status fail(fracop_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
fracop_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return FRACOP_OK;
  } catch (const fracop::ConvergenceError& e) {
    return fail(FRACOP_ERR_CONVERGENCE, e.what());
  } catch (const fracop::ParamError& e) {
    return fail(FRACOP_ERR_PARAM, e.what());
  } catch (const fracop::DomainError& e) {
    return fail(FRACOP_ERR_DOMAIN, e.what());
  } catch (const fracop::NumericError& e) {
    return fail(FRACOP_ERR_NUMERIC, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(FRACOP_ERR_IO, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(FRACOP_ERR_PARAM, std::string("config: ") + e.what());
  } catch (const std::exception& e) {
    return fail(FRACOP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FRACOP_ERR_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void put(char** dst, const std::string& s) {
  if (dst) *dst = dup(s);
}

void need(const void* p, const char* what) {
  if (!p) throw fracop::ParamError(std::string(what) + " must not be NULL");
}

const char* text(const char* s) { return s ? s : ""; }

}  // namespace

extern "C" {

const char* fracop_version(void) { return "0.1.0"; }

const char* fracop_last_error(void) { return last_error.c_str(); }

void fracop_set_threads(int threads) { fracop::set_max_threads(threads < 0 ? 0 : threads); }

fracop_status fracop_field_create(int n, double extent, size_t points, const double* values, fracop_field** out) {
  return guard([&] {
    need(out, "out");
    auto g = fracop::make_grid(n, extent, points);
    auto* h = new fracop_field{fracop::Field(g)};
    if (values) std::memcpy(h->f.values.data(), values, h->f.size() * sizeof(double));
    *out = h;
  });
}

fracop_status fracop_field_read(const char* path, fracop_field** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new fracop_field{fracop::load_field(path)};
  });
}

fracop_status fracop_field_write(const fracop_field* f, const char* path) {
  return guard([&] {
    need(f, "field");
    need(path, "path");
    fracop::save_field(path, f->f);
  });
}

fracop_status fracop_field_write_csv(const fracop_field* f, const char* path) {
  return guard([&] {
    need(f, "field");
    need(path, "path");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::ios_base::failure(std::string("cannot open ") + path);
    fracop::write_field_csv(os, f->f);
    if (!os) throw std::ios_base::failure(std::string("cannot write ") + path);
  });
}

fracop_status fracop_field_info(const fracop_field* f, int* n, double* extent, size_t* points) {
  return guard([&] {
    need(f, "field");
    if (n) *n = f->f.grid.n;
    if (extent) *extent = f->f.grid.extent;
    if (points) *points = f->f.grid.points;
  });
}

const double* fracop_field_values(const fracop_field* f) { return f ? f->f.values.data() : nullptr; }

size_t fracop_field_size(const fracop_field* f) { return f ? f->f.size() : 0; }

void fracop_field_free(fracop_field* f) { delete f; }

fracop_status fracop_kernel_check(const char* spec) {
  return guard([&] {
    need(spec, "spec");
    (void)fracop::builtin_kernel(spec);
  });
}

fracop_status fracop_apply_op(const char* config_json, const fracop_field* f, fracop_field** out,
                              char** report_json) {
  return guard([&] {
    need(f, "field");
    need(out, "out");
    auto r = fracop::run_apply_op(text(config_json), f->f);
    *out = new fracop_field{std::move(*r.field)};
    put(report_json, r.json);
  });
}

fracop_status fracop_eval_kernel(const char* config_json, char** report_json, char** csv) {
  return guard([&] {
    auto r = fracop::run_eval_kernel(text(config_json));
    put(report_json, r.json);
    put(csv, r.csv);
  });
}

fracop_status fracop_verify(const char* check, const char* config_json, char** verdict_json, char** csv,
                            int* pass) {
  return guard([&] {
    need(check, "check");
    auto r = fracop::run_check(check, text(config_json));
    put(verdict_json, r.json);
    put(csv, r.csv);
    if (pass) *pass = r.pass ? 1 : 0;
  });
}

fracop_status fracop_quad_selftest(const char* config_json, char** report_json, char** csv, int* pass) {
  return guard([&] {
    auto r = fracop::run_quad_selftest(text(config_json));
    put(report_json, r.json);
    put(csv, r.csv);
    if (pass) *pass = r.pass ? 1 : 0;
  });
}

fracop_status fracop_solve(const char* config_json, const fracop_field* rhs, fracop_field** u, char** report_json,
                           char** csv, int* pass) {
  return guard([&] {
    auto r = fracop::run_solve(text(config_json), rhs ? &rhs->f : nullptr);
    if (u) *u = new fracop_field{std::move(*r.field)};
    put(report_json, r.json);
    put(csv, r.csv);
    if (pass) *pass = r.pass ? 1 : 0;
  });
}

fracop_status fracop_seminorm(const char* config_json, const fracop_field* f, double* value, char** report_json) {
  return guard([&] {
    need(f, "field");
    auto r = fracop::run_seminorm(text(config_json), f->f);
    if (value) *value = nlohmann::json::parse(r.json)["value"].get<double>();
    put(report_json, r.json);
  });
}

void fracop_string_free(char* s) { std::free(s); }

}  // extern "C"
