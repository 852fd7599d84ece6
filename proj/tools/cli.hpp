#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curve_file.hpp"
#include "gbspline/gbspline.hpp"

namespace gbs::cli {

/// Missing files or unwritable outputs (exit code 2).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double default_tol() {
  if (const char* env = std::getenv("GBS_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0) return v;
  }
  return kDefaultTol;
}

namespace detail {

struct Common {
  std::string curve;
  double tol = kDefaultTol;
  double coef_tol = kDefaultCoefTol;

  RefineOptions options() const { return {tol, coef_tol}; }
};

inline void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--curve", c.curve, "input curve file (JSON)")->required();
  cmd->add_option("--tol", c.tol, "zero-length interval tolerance");
  cmd->add_option("--coef-tol", c.coef_tol, "coefficient agreement tolerance");
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
  if (!f) throw IoError("failed writing '" + path + "'");
}

inline std::vector<double> sample_points(const KnotVector& kv, int samples) {
  if (samples < 0) throw CLI::ValidationError("--samples", "must be nonnegative");
  const double a = kv.active_begin();
  const double b = kv.active_end();
  std::vector<double> ts;
  if (samples == 0) return {a};
  for (int k = 0; k <= samples; ++k) ts.push_back(k == samples ? b : a + (b - a) * k / samples);
  return ts;
}

inline void warn_conditioning(const RefineReport& report, std::ostream& err) {
  if (report.ill_conditioned())
    err << "warning: local systems are ill-conditioned (condition estimate " << format_number(report.worst_condition)
        << ")\n";
}

inline LoadedCurve apply_plan(const LoadedCurve& src, const KnotVector& target, const RefineOptions& opts,
                              std::ostream& err) {
  LocalBasis basis0 = build_local_basis(src.kv, src.fam);
  KnotFunctionFamily fam1 = inherit_family(src.fam, target, opts.tol);
  RefinementPlan plan(std::move(basis0), target, fam1, opts);
  RefineReport report;
  LoadedCurve out{target, std::move(fam1), {}};
  for (const auto& comp : src.components) out.components.push_back(plan.apply(comp, &report));
  warn_conditioning(report, err);
  return out;
}

}  // namespace detail

/// Entry point shared by the executable and the tests. Returns the exit code:
/// 0 success, 1 domain error (error name on stderr), 2 I/O or parse error.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GB-spline refinement toolkit"};
  app.require_subcommand(1);

  detail::Common eval_opts, insert_opts, elevate_opts, greville_opts, basis_opts, check_opts;
  for (auto* c : {&eval_opts, &insert_opts, &elevate_opts, &greville_opts, &basis_opts, &check_opts})
    c->tol = default_tol();

  int eval_samples = 100;
  std::string eval_out;
  auto* eval = app.add_subcommand("eval", "sample the curve uniformly over its active region");
  detail::add_common(eval, eval_opts);
  eval->add_option("--samples", eval_samples, "number of sample intervals (N+1 points)")->required();
  eval->add_option("--out", eval_out, "CSV output (default stdout)");

  std::vector<double> insert_at;
  std::string insert_out;
  auto* insert = app.add_subcommand("insert", "insert knots");
  detail::add_common(insert, insert_opts);
  insert->add_option("--at", insert_at, "knot to insert (repeatable)")->required()->allow_extra_args(false);
  insert->add_option("--out", insert_out, "output curve file")->required();

  int elevate_by = 1;
  std::string elevate_out;
  auto* elevate = app.add_subcommand("elevate", "raise the degree");
  detail::add_common(elevate, elevate_opts);
  elevate->add_option("--by", elevate_by, "degree increase")->required();
  elevate->add_option("--out", elevate_out, "output curve file")->required();

  auto* greville = app.add_subcommand("greville", "print Greville abscissae, one per line");
  detail::add_common(greville, greville_opts);

  int basis_samples = 100;
  std::string basis_out;
  auto* basis_cmd = app.add_subcommand("basis", "sample every basis function");
  detail::add_common(basis_cmd, basis_opts);
  basis_cmd->add_option("--samples", basis_samples, "number of sample intervals (N+1 points)")->required();
  basis_cmd->add_option("--out", basis_out, "CSV output")->required();

  int check_samples = 1000;
  auto* check = app.add_subcommand("check", "partition-of-unity and continuity diagnostics");
  detail::add_common(check, check_opts);
  check->add_option("--samples", check_samples, "number of sample intervals");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("gbspline");
  for (auto& a : args) argv_store.push_back(std::move(a));
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*eval) {
      const LoadedCurve c = LoadedCurve::from(read_curve_file(eval_opts.curve, eval_opts.tol), eval_opts.tol);
      const LocalBasis basis = build_local_basis(c.kv, c.fam);
      std::string csv = "t";
      for (std::size_t d = 0; d < c.components.size(); ++d) csv += ",f" + std::to_string(d);
      csv += "\n";
      for (double t : detail::sample_points(c.kv, eval_samples)) {
        const auto [first, values] = eval_nonzero_basis(basis, t);
        csv += format_number(t);
        for (const auto& comp : c.components) {
          double f = 0.0;
          for (std::size_t k = 0; k < values.size(); ++k) f += comp[first + k] * values[k];
          csv += "," + format_number(f);
        }
        csv += "\n";
      }
      detail::write_text(eval_out, csv, out);
    } else if (*insert) {
      const LoadedCurve c = LoadedCurve::from(read_curve_file(insert_opts.curve, insert_opts.tol), insert_opts.tol);
      const KnotVector target = inserted_knot_vector(c.kv, insert_at);
      const LoadedCurve r = detail::apply_plan(c, target, insert_opts.options(), err);
      detail::write_text(insert_out, write_curve_file(r.to_file()), out);
    } else if (*elevate) {
      const LoadedCurve c =
          LoadedCurve::from(read_curve_file(elevate_opts.curve, elevate_opts.tol), elevate_opts.tol);
      require_derivative_closed(c.fam);
      const KnotVector target = elevated_knot_vector(c.kv, elevate_by);
      const LoadedCurve r = detail::apply_plan(c, target, elevate_opts.options(), err);
      detail::write_text(elevate_out, write_curve_file(r.to_file()), out);
    } else if (*greville) {
      const LoadedCurve c =
          LoadedCurve::from(read_curve_file(greville_opts.curve, greville_opts.tol), greville_opts.tol);
      for (double g : greville_abscissae(build_local_basis(c.kv, c.fam), greville_opts.options()))
        out << format_number(g) << "\n";
    } else if (*basis_cmd) {
      const LoadedCurve c = LoadedCurve::from(read_curve_file(basis_opts.curve, basis_opts.tol), basis_opts.tol);
      const LocalBasis basis = build_local_basis(c.kv, c.fam);
      std::string csv = "t";
      for (std::size_t i = 0; i < basis.size(); ++i) csv += ",N" + std::to_string(i);
      csv += "\n";
      for (double t : detail::sample_points(c.kv, basis_samples)) {
        csv += format_number(t);
        for (std::size_t i = 0; i < basis.size(); ++i) csv += "," + format_number(eval_basis_function(basis, i, t));
        csv += "\n";
      }
      detail::write_text(basis_out, csv, out);
    } else if (*check) {
      const LoadedCurve c = LoadedCurve::from(read_curve_file(check_opts.curve, check_opts.tol), check_opts.tol);
      const LocalBasis basis = build_local_basis(c.kv, c.fam);
      bool ok = true;

      double worst_sum = 0.0;
      double worst_neg = 0.0;
      for (double t : detail::sample_points(c.kv, check_samples)) {
        const auto [first, values] = eval_nonzero_basis(basis, t);
        double sum = 0.0;
        for (double v : values) {
          sum += v;
          worst_neg = std::min(worst_neg, v);
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
      }
      const bool unity_ok = worst_sum <= 1e-9 && worst_neg >= -1e-9;
      out << "partition_of_unity max_error=" << format_number(worst_sum) << " min_value=" << format_number(worst_neg)
          << (unity_ok ? " ok" : " FAIL") << "\n";
      ok = ok && unity_ok;

      // Jumps of each component across the interior breakpoints.
      double worst_jump = 0.0;
      for (const auto& comp : c.components) {
        const PiecewiseCurve pw = form_piecewise(comp, basis);
        std::optional<std::size_t> prev;
        double scale = 1.0;
        for (double x : comp) scale = std::max(scale, std::abs(x));
        for (std::size_t k = 0; k < pw.pieces.size(); ++k) {
          if (pw.pieces[k].is_missing()) continue;
          const std::size_t j = pw.first_interval + k;
          if (prev) {
            const std::size_t jp = pw.first_interval + *prev;
            const double left = eval_local_term(pw.pieces[*prev], pw.family, jp, pw.degree, pw.breaks[*prev + 1]);
            const double right = eval_local_term(pw.pieces[k], pw.family, j, pw.degree, pw.breaks[k]);
            // discontinuity is expected where a knot has full multiplicity p+1
            if (c.kv.multiplicity(pw.breaks[k]) <= static_cast<std::size_t>(c.kv.degree()))
              worst_jump = std::max(worst_jump, std::abs(left - right) / scale);
          }
          prev = k;
        }
      }
      const bool cont_ok = worst_jump <= 1e-8;
      out << "continuity max_jump=" << format_number(worst_jump) << (cont_ok ? " ok" : " FAIL") << "\n";
      ok = ok && cont_ok;
      return ok ? 0 : 1;
    }
  } catch (const ParseError& e) {
    err << "error: ParseError: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "error: IoError: " << e.what() << "\n";
    return 2;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gbs::cli
