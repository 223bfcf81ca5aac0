#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <set>
#include <sstream>

#include "egjms/cli.hpp"
#include "egjms/einstein.hpp"
#include "egjms/error.hpp"
#include "egjms/normalform.hpp"

namespace egjms {

namespace {

double rel(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(a)); }

std::string rational_string(const Rational& r) {
  std::ostringstream o;
  o << r.numerator();
  if (r.denominator() != 1) o << "/" << r.denominator();
  return o.str();
}

bool level_available(int k, int n, int level, const OperatorOptions& oo) {
  try {
    require_admissible(k, n, level, oo);
    return true;
  } catch (const AdmissibilityError&) {
    return false;
  }
}

class Runner {
 public:
  Runner(const RunOptions& opt, const GeometrySpec& spec, Report& rep)
      : opt_(opt), spec_(spec), oo_(spec.operator_options()), rng_(opt.seed), rep_(rep) {}

  void run() {
    const std::string& c = opt_.command;
    if (c == "curvature") return each([this](PointRecord& p) { curvature(p); });
    if (c == "extrinsic") return each([this](PointRecord& p) { extrinsic(p); });
    if (c == "qcurv") {
      const int level = single_level(1);
      rep_.params["level"] = level;
      return each([this, level](PointRecord& p) { qcurv(p, level); });
    }
    if (c == "apply") {
      const int level = single_level(1);
      rep_.params["level"] = level;
      return each([this, level](PointRecord& p) { apply(p, level); });
    }
    if (c == "verify") return verify();
    throw SpecError("unknown command '" + c + "'");
  }

 private:
  template <typename F>
  void each(F&& body) {
    if (opt_.points < 1) throw SpecError("--points must be positive");
    for (int i = 0; i < opt_.points; ++i) {
      PointRecord p;
      p.x = sample_point(rng_, spec_.box);
      body(p);
      rep_.points.push_back(std::move(p));
    }
  }

  int single_level(int fallback) const {
    const int level = opt_.level.value_or(fallback);
    if (level < 1 || level > 2) throw SpecError("--level must be 1 or 2");
    return level;
  }

  std::vector<int> levels() const {
    if (opt_.level) return {single_level(1)};
    std::vector<int> out;
    for (int l = 1; l <= 2; ++l)
      if (level_available(spec_.k, spec_.n, l, oo_)) out.push_back(l);
    if (out.empty())
      throw AdmissibilityError("no admissible level for k=" + std::to_string(spec_.k) +
                               ", n=" + std::to_string(spec_.n));
    return out;
  }

  void record_levels(const std::vector<int>& ls) {
    rep_.params["levels"] = ls;
  }

  PointGeometry geometry(const PointRecord& p) const {
    return evaluate_geometry(spec_.metric, spec_.embedding, p.x, opt_.order);
  }

  Expr test_function(PointRecord& p) {
    Expr f;
    if (opt_.f) {
      f = parse_expression(*opt_.f);
      if (f.max_u_index() > 0 || f.max_x_index() > spec_.k)
        throw SpecError("--f may only use x1..x" + std::to_string(spec_.k));
    } else {
      f = random_trig_polynomial(rng_, spec_.k);
    }
    p.labels["f"] = f.to_string();
    return f;
  }

  static std::string level_key(const char* stem, int level) { return stem + std::to_string(2 * level); }

  void curvature(PointRecord& p) {
    std::vector<double> z;
    for (const Expr& c : spec_.embedding.components) z.push_back(evaluate(c, p.x, 0).value());
    const CurvaturePack cp = curvature_pack(spec_.metric, z, 0);
    p.values["R"] = cp.scalar.value();
    p.values["J"] = cp.J.value();
    if (!cp.weyl.empty()) p.values["max_abs_weyl"] = max_abs(cp.weyl);
    if (!cp.cotton.empty()) p.values["max_abs_cotton"] = max_abs(cp.cotton);
    if (!cp.bach.empty()) p.values["max_abs_bach"] = max_abs(cp.bach);
    if (spec_.lambda) {
      double dev = 0.0;
      for (int i = 0; i < spec_.n; ++i)
        for (int j = 0; j < spec_.n; ++j)
          dev = std::max(dev, std::abs(cp.ricci(i, j).value() - *spec_.lambda * (spec_.n - 1) * cp.metric(i, j).value()));
      p.residuals["einstein"] = dev / (1.0 + max_abs(cp.ricci));
    }
  }

  void extrinsic(PointRecord& p) {
    const PointGeometry pg = geometry(p);
    const auto& s = pg.ext.sigma;
    p.values["H2"] = mean_curvature_squared(pg.ext).value();
    p.values["L2"] = norm_squared(pg.ext.L, {Slot::Normal, Slot::Tangent, Slot::Tangent}, s).value();
    p.values["Lo2"] = norm_squared(pg.ext.L_trace_free, {Slot::Normal, Slot::Tangent, Slot::Tangent}, s).value();
    if (pg.k >= 2) p.values["G"] = fialkow_pack(pg).G.value();
    p.residuals["conversion_rule"] = max_abs(conversion_rule_residual(pg));
  }

  void qcurv(PointRecord& p, int level) {
    const PointGeometry pg = geometry(p);
    const OperatorCoefficients c = extrinsic_coefficients(pg, level, oo_);
    const double q = level == 1 ? c.q2.value() : c.q4->value();
    p.values[level_key("Q", level)] = q;
    if (spec_.lambda) {
      const double ref = q_closed_form(spec_.k, level, *spec_.lambda);
      p.values["einstein_reference"] = ref;
      p.residuals["einstein_oracle"] = rel(ref, q);
    }
  }

  void apply(PointRecord& p, int level) {
    const Expr f = test_function(p);
    const PointGeometry pg = geometry(p);
    const OperatorCoefficients c = extrinsic_coefficients(pg, level, oo_);
    const Jet fj = sigma_function(f, p.x, opt_.order);
    const double v = apply_operator(c, level, fj).value();
    p.values[level_key("P", level) + "f"] = v;
    if (spec_.lambda) p.residuals["factorization"] = rel(v, factorized_apply(pg.ext.sigma, *spec_.lambda, level, fj).value());
  }

  void verify() {
    const std::string& t = opt_.target;
    if (t == "covariance" || t == "q-covariance") {
      const auto ls = levels();
      record_levels(ls);
      const bool q = t == "q-covariance";
      return each([this, ls, q](PointRecord& p) {
        CovarianceInput in;
        in.chart = &spec_.metric;
        in.embedding = &spec_.embedding;
        in.omega = spec_.omega ? *spec_.omega : random_cubic(rng_, spec_.n, 0.1);
        in.order = opt_.order;
        in.options = oo_;
        p.labels["omega"] = in.omega.to_string();
        const Expr f = q ? Expr() : test_function(p);
        for (int l : ls)
          p.residuals[level_key(q ? "Q" : "P", l)] =
              q ? q_covariance_residual(in, l, p.x) : covariance_residual(in, l, f, p.x);
      });
    }
    if (t == "gauss-codazzi") {
      return each([this](PointRecord& p) {
        const PointGeometry pg = geometry(p);
        const FialkowPack fp = fialkow_pack(pg);
        const GaussCodazziResiduals r = gauss_codazzi_residuals(pg, fp, intrinsic_curvature(pg.ext.sigma));
        p.residuals["gc_trace"] = r.gc_trace;
        if (pg.k >= 3) {
          p.residuals["gc1"] = r.gc1;
          p.residuals["gc2"] = r.gc2;
        }
      });
    }
    if (t == "pipeline") {
      require_admissible(spec_.k, spec_.n, 2, oo_);
      return each([this](PointRecord& p) {
        const Expr f = test_function(p);
        const PointGeometry pg = geometry(p);
        const OperatorCoefficients c = extrinsic_coefficients(pg, 2, oo_);
        const PipelineResult r = run_pipeline(pg, zero_u4(pg), oo_);
        const Jet fj = sigma_function(f, p.x, opt_.order);
        const double a = apply_p4(c, fj).value();
        p.values["P4f_closed_form"] = a;
        p.values["P4f_pipeline"] = apply_p4(r.coefficients, fj).value();
        p.residuals["P4f"] = rel(a, p.values["P4f_pipeline"]);
        p.residuals["Q2"] = rel(c.q2.value(), r.coefficients.q2.value());
        p.residuals["Q4"] = rel(c.q4->value(), r.coefficients.q4->value());
        double dt = 0.0;
        for (std::size_t i = 0; i < c.T->size(); ++i)
          dt = std::max(dt, std::abs(c.T->at(i).value() - r.coefficients.T->at(i).value()));
        p.residuals["T"] = dt / (1.0 + max_abs(*c.T));
      });
    }
    if (t == "u4") {
      require_admissible(spec_.k, spec_.n, 2, oo_);
      return each([this](PointRecord& p) {
        const Expr f = test_function(p);
        const PointGeometry pg = geometry(p);
        std::vector<Jet> ua, ub;
        for (int m = 0; m < spec_.n - spec_.k; ++m) {
          ua.push_back(sigma_function(random_cubic(rng_, spec_.k, 1.0), p.x, opt_.order));
          ub.push_back(sigma_function(random_cubic(rng_, spec_.k, 1.0), p.x, opt_.order));
        }
        const U4Report r = u4_perturbation(pg, ua, ub, sigma_function(f, p.x, opt_.order), oo_);
        p.residuals["h4"] = r.h4_difference;
        p.residuals["tr_h4"] = r.tr_h4_difference;
        p.residuals["Q4"] = r.q4_difference;
        p.residuals["P4f"] = r.p4_difference;
      });
    }
    if (t == "factorization") {
      if (!spec_.lambda) throw SpecError("verify factorization needs a geometry with a lambda tag");
      const auto ls = levels();
      record_levels(ls);
      return each([this, ls](PointRecord& p) {
        const Expr f = test_function(p);
        const PointGeometry pg = geometry(p);
        const Jet fj = sigma_function(f, p.x, opt_.order);
        for (int l : ls) {
          const double v = apply_operator(extrinsic_coefficients(pg, l, oo_), l, fj).value();
          const double w = factorized_apply(pg.ext.sigma, *spec_.lambda, l, fj).value();
          p.values[level_key("P", l) + "f"] = v;
          p.values[level_key("P", l) + "f_factorized"] = w;
          p.residuals[level_key("P", l) + "f"] = rel(v, w);
        }
      });
    }
    if (t == "umbilic") {
      auto ls = levels();
      if (!opt_.level && spec_.k < 3) std::erase(ls, 2);
      if (ls.empty()) throw AdmissibilityError("intrinsic operators need k >= 2");
      record_levels(ls);
      return each([this, ls](PointRecord& p) {
        const Expr f = test_function(p);
        const PointGeometry pg = geometry(p);
        const Jet fj = sigma_function(f, p.x, opt_.order);
        p.residuals["umbilicity"] = max_abs(pg.ext.L_trace_free) / (1.0 + max_abs(pg.ext.L));
        for (int l : ls) {
          const double v = apply_operator(extrinsic_coefficients(pg, l, oo_), l, fj).value();
          const double w = apply_operator(intrinsic_coefficients(pg.ext.sigma, l, spec_.n), l, fj).value();
          p.values[level_key("P", l) + "f"] = v;
          p.values[level_key("P", l) + "f_intrinsic"] = w;
          p.residuals[level_key("P", l) + "f"] = rel(v, w);
        }
      });
    }
    if (t == "decomposition") {
      if (spec_.k < 3) throw AdmissibilityError("the decomposition needs k >= 3");
      require_admissible(spec_.k, spec_.n, 2, oo_);
      return each([this](PointRecord& p) {
        const PointGeometry pg = geometry(p);
        const FialkowPack fp = fialkow_pack(pg);
        const IntrinsicCurvature ic = intrinsic_curvature(pg.ext.sigma);
        const DecompositionResidual r =
            decomposition_residual(extrinsic_coefficients(pg, 2, oo_), intrinsic_coefficients(pg.ext.sigma, 2, spec_.n),
                                   tilde_coefficients(pg, fp, ic, oo_));
        p.residuals["Q2"] = r.q2;
        p.residuals["T"] = r.T;
        p.residuals["Q4"] = r.q4;
      });
    }
    throw SpecError("unknown verify target '" + t + "'");
  }

  const RunOptions& opt_;
  const GeometrySpec& spec_;
  OperatorOptions oo_;
  Rng rng_;
  Report& rep_;
};

void spectrum(const RunOptions& opt, Report& rep) {
  const int k = opt.spectrum_k, l = opt.spectrum_l;
  if (k < 1 || l < 1 || opt.spectrum_mmax < 0) throw SpecError("spectrum needs k >= 1, l >= 1 and mmax >= 0");
  rep.params["k"] = k;
  rep.params["l"] = l;
  rep.params["mmax"] = opt.spectrum_mmax;
  for (int m = 0; m <= opt.spectrum_mmax; ++m) {
    PointRecord p;
    p.x = {static_cast<double>(m)};
    const Rational ev = sphere_eigenvalue_exact(k, m, l);
    p.values["eigenvalue"] = boost::rational_cast<double>(ev);
    p.labels["eigenvalue"] = rational_string(ev);
    if (m == 0) {
      const Rational expected = (Rational(k, 2) - l) * q_constant_exact(k, l);
      p.residuals["constant_term"] = std::abs(boost::rational_cast<double>(ev - expected));
    }
    rep.points.push_back(std::move(p));
  }
}

const char* reference_for(const std::string& command, const std::string& target) {
  if (command == "curvature") return "ambient curvature: Riemann, Schouten, Weyl, Cotton and Bach tensors";
  if (command == "extrinsic") return "second fundamental form, mean curvature and the conversion rule";
  if (command == "qcurv") return "closed-form extrinsic Q-curvatures Q2 and Q4";
  if (command == "apply") return "closed-form extrinsic operators P2 and P4";
  if (command == "spectrum") return "sphere spectra of the Einstein factorization";
  if (target == "covariance") return "conformal covariance of the extrinsic GJMS operators";
  if (target == "q-covariance") return "conformal transformation law of the extrinsic Q-curvatures";
  if (target == "gauss-codazzi") return "Gauss-Codazzi relations for the Fialkow tensor";
  if (target == "pipeline") return "normal-form derivation of P4 through the minimal extension";
  if (target == "u4") return "independence of P4 and Q4 from the free U4 coefficient";
  if (target == "factorization") return "factorization for minimal submanifolds of Einstein manifolds";
  if (target == "umbilic") return "umbilic submanifolds of conformally flat manifolds carry the intrinsic operators";
  if (target == "decomposition") return "intrinsic plus extrinsic decomposition of T and Q4";
  return "";
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const std::vector<std::string>& verify_targets() {
  static const std::vector<std::string> t = {"covariance", "q-covariance", "gauss-codazzi", "pipeline",
                                             "u4",         "factorization", "umbilic",      "decomposition"};
  return t;
}

Report run_command(const RunOptions& opt, const GeometrySpec* spec) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.command = opt.command == "verify" ? "verify " + opt.target : opt.command;
  rep.seed = opt.seed;
  rep.tol = opt.tol;
  rep.paper_ref = reference_for(opt.command, opt.target);
  rep.timestamp = utc_timestamp();
  if (opt.order < 4) throw SpecError("--order must be at least 4");
  rep.params["order"] = opt.order;
  rep.params["points"] = opt.points;
  if (opt.f) rep.params["f"] = *opt.f;
  if (opt.command == "spectrum") {
    rep.geometry = spec ? spec->name : "none";
    spectrum(opt, rep);
  } else {
    if (!spec) throw SpecError("command '" + opt.command + "' needs --geometry");
    rep.geometry = spec->name;
    rep.params["n"] = spec->n;
    rep.params["k"] = spec->k;
    if (spec->lambda) rep.params["lambda"] = *spec->lambda;
    if (spec->conformally_flat) rep.params["conformally_flat"] = true;
    Runner(opt, *spec, rep).run();
  }
  for (const auto& p : rep.points)
    for (const auto& [name, r] : p.residuals)
      if (!(r <= opt.tol)) rep.pass = false;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

nlohmann::ordered_json report_json(const Report& r) {
  nlohmann::ordered_json j;
  j["command"] = r.command;
  j["geometry"] = r.geometry;
  j["params"] = r.params;
  j["seed"] = r.seed;
  auto pts = nlohmann::ordered_json::array();
  for (const auto& p : r.points) {
    nlohmann::ordered_json o;
    o["x"] = p.x;
    o["values"] = nlohmann::ordered_json(p.values);
    o["residuals"] = nlohmann::ordered_json(p.residuals);
    if (!p.labels.empty()) o["labels"] = nlohmann::ordered_json(p.labels);
    pts.push_back(std::move(o));
  }
  j["points"] = std::move(pts);
  j["pass"] = r.pass;
  j["tol"] = r.tol;
  j["paper_ref"] = r.paper_ref;
  j["timing"] = {{"timestamp", r.timestamp}, {"wall_seconds", r.wall_seconds}};
  return j;
}

std::string report_csv(const Report& r) {
  std::size_t dim = 0;
  std::set<std::string> values, residuals;
  for (const auto& p : r.points) {
    dim = std::max(dim, p.x.size());
    for (const auto& [k, _] : p.values) values.insert(k);
    for (const auto& [k, _] : p.residuals) residuals.insert(k);
  }
  std::ostringstream o;
  std::string sep;
  for (std::size_t i = 0; i < dim; ++i, sep = ",") o << sep << "x" << i + 1;
  for (const auto& v : values) o << sep << v, sep = ",";
  for (const auto& v : residuals) o << sep << "residual_" << v, sep = ",";
  o << "\n";
  for (const auto& p : r.points) {
    sep.clear();
    for (std::size_t i = 0; i < dim; ++i, sep = ",") o << sep << (i < p.x.size() ? format_double(p.x[i]) : "");
    for (const auto& v : values) {
      const auto it = p.values.find(v);
      o << sep << (it == p.values.end() ? "" : format_double(it->second));
      sep = ",";
    }
    for (const auto& v : residuals) {
      const auto it = p.residuals.find(v);
      o << sep << (it == p.residuals.end() ? "" : format_double(it->second));
      sep = ",";
    }
    o << "\n";
  }
  return o.str();
}

int exit_code(const Report& r) { return r.pass ? 0 : 2; }

int exit_code(const std::exception& e) {
  if (dynamic_cast<const AdmissibilityError*>(&e)) return 3;
  if (dynamic_cast<const SpecError*>(&e) || dynamic_cast<const OrderError*>(&e)) return 4;
  if (dynamic_cast<const NumericError*>(&e)) return 5;
  return 1;
}

}  // namespace egjms
