#include "cclab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cclab/io.hpp"

namespace cclab {

namespace {

constexpr double kNoiseRel = 1e-12;
// Nodes where the reference field falls below this fraction of its window
// maximum carry mostly solver noise; ratio estimates skip them.
constexpr double kRatioFloorRel = 1e-6;

const double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) { return format_double(v); }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

struct Ctx {
  const Scenario* sc;
  HeatOperator op;
  std::vector<long long> win;
  std::string win_label;
};

Ctx make_ctx(const Scenario& sc) {
  validate_scenario(sc);
  Ctx c;
  c.sc = &sc;
  c.op = assemble_heat_operator(sc.chart);
  c.win = interior_window(sc.chart, sc.window_margin);
  std::ostringstream os;
  os << "interior(" << fmt(sc.window_margin) << ") " << c.win.size() << "/"
     << sc.chart.size();
  c.win_label = os.str();
  return c;
}

CertReport report(std::string name, std::string anchor, std::string case_id,
                  double lhs, double rhs, double tol, double field_scale,
                  std::string window, double t = kNan, double s = kNan,
                  double h = kNan, std::string extra = std::string()) {
  CertReport r;
  r.name = std::move(name);
  r.anchor = std::move(anchor);
  r.case_id = std::move(case_id);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.tol = tol;
  r.window = std::move(window);
  r.t = t;
  r.s = s;
  r.h = h;
  r.extra = std::move(extra);
  double nf = kNoiseRel * field_scale;
  double scale = std::max({std::fabs(lhs), std::fabs(rhs), nf});
  if (std::fabs(lhs) <= nf && std::fabs(rhs) <= nf) {
    r.verdict = Verdict::Degenerate;
  } else if (r.slack >= -tol * scale) {
    r.verdict = Verdict::Pass;
  } else {
    r.verdict = Verdict::Fail;
  }
  return r;
}

double win_max_abs(const std::vector<long long>& win,
                   const std::vector<double>& v) {
  double m = 0.0;
  for (long long i : win) m = std::max(m, std::fabs(v[static_cast<std::size_t>(i)]));
  return m;
}

// Worst node of the pointwise inequality L <= R over the window: the one
// minimizing relative slack. Nodes where both sides fall under include_floor
// are skipped and counted.
struct WorstNode {
  bool any = false;
  long long node = -1;
  long long excluded = 0;
  double lhs = 0.0, rhs = 0.0;
  double rel = std::numeric_limits<double>::infinity();
};

WorstNode worst_node(const std::vector<long long>& win,
                     const std::vector<double>& L, const std::vector<double>& R,
                     double include_floor, double nf) {
  WorstNode w;
  for (long long i : win) {
    double l = L[static_cast<std::size_t>(i)];
    double r = R[static_cast<std::size_t>(i)];
    if (std::max(std::fabs(l), std::fabs(r)) < include_floor) {
      ++w.excluded;
      continue;
    }
    double rel = (r - l) / std::max({std::fabs(l), std::fabs(r), nf});
    if (!w.any || rel < w.rel) {
      w.any = true;
      w.node = i;
      w.lhs = l;
      w.rhs = r;
      w.rel = rel;
    }
  }
  return w;
}

void evolve_chain(const Ctx& c, ScalarField f, const std::vector<double>& times,
                  const std::function<void(std::size_t, const ScalarField&)>& visit) {
  double prev = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    f = heat_evolve(c.op, f, times[k] - prev, c.sc->evolve);
    prev = times[k];
    visit(k, f);
  }
}

void evolve_density_chain(
    const Ctx& c, DensityField mu, const std::vector<double>& times,
    const std::function<void(std::size_t, const DensityField&)>& visit) {
  double prev = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    mu = heat_evolve_density(c.op, mu, times[k] - prev, c.sc->evolve);
    prev = times[k];
    visit(k, mu);
  }
}

DensityField density_of(const Ctx& c, const NamedMeasure& m) {
  return sample_density(c.sc->chart, m.density, true);
}

ScalarField field_of(const Ctx& c, const NamedFunction& f) {
  return sample_scalar(c.sc->chart, f.eval);
}

PointCloudMeasure cloud_of(const Ctx& c, const DensityField& mu) {
  return grid_to_cloud(mu, c.sc->transport);
}

double w2sq_between(const Ctx& c, const DensityField& a, const DensityField& b) {
  return w2_plan(cloud_of(c, a), cloud_of(c, b), c.sc->transport).cost2;
}

// Coarse diameter of the chart in the ambient metric; used as the magnitude
// scale of distance-valued comparisons.
double distance_scale(const GridChart& chart) {
  double s2 = 0.0;
  int hd = chart.model.family == Family::Heisenberg1 ? 2 : chart.dim();
  for (int a = 0; a < hd; ++a) {
    double e = chart.hi[a] - chart.lo[a];
    s2 += e * e;
  }
  double d = std::sqrt(s2);
  if (chart.model.family == Family::Heisenberg1) {
    d += 2.0 * std::sqrt(M_PI * (chart.hi[2] - chart.lo[2]));
  }
  return d;
}

double curvature_sup(const CurvatureFn& c) {
  switch (c.kind) {
    case CurvatureFn::Kind::Constant:
    case CurvatureFn::Kind::Exponential:
      return c.C;
    case CurvatureFn::Kind::Tabulated:
      return *std::max_element(c.values.begin(), c.values.end());
  }
  return c.C;
}

Point axis_step(const GroupModel& model, int axis, double eps) {
  Point e(static_cast<std::size_t>(model.dimension), 0.0);
  e[static_cast<std::size_t>(axis)] = eps;
  return e;
}

// Squared horizontal gradient of an analytic function at a group point,
// through centered differences along the frame flows p -> p * (eps e_i).
double horizontal_grad_sq(const GroupModel& model,
                          const std::function<double(const Point&)>& phi,
                          const Point& p) {
  const double eps = 1e-4;
  int hd = model.family == Family::Heisenberg1 ? 2 : model.dimension;
  double acc = 0.0;
  for (int a = 0; a < hd; ++a) {
    double fp = phi(multiply(model, p, axis_step(model, a, eps)));
    double fm = phi(multiply(model, p, axis_step(model, a, -eps)));
    double g = (fp - fm) / (2.0 * eps);
    acc += g * g;
  }
  return acc;
}

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Degenerate: return "degenerate";
  }
  return "fail";
}

void validate_scenario(const Scenario& sc) {
  require(sc.model.family == sc.chart.model.family &&
              sc.model.dimension == sc.chart.model.dimension,
          "scenario: model and chart disagree");
  auto tol_ok = [](double v) { return v > 0.0 && v <= 0.2; };
  require(tol_ok(sc.tol.pointwise_rel) && tol_ok(sc.tol.integral_rel) &&
              tol_ok(sc.tol.ot_rel),
          "scenario: tolerances must lie in (0, 0.2]");
  for (std::size_t k = 0; k < sc.time_grid.size(); ++k) {
    require(sc.time_grid[k] >= 0.0, "scenario: negative time grid entry");
    require(k == 0 || sc.time_grid[k] > sc.time_grid[k - 1],
            "scenario: time grid must be strictly increasing");
  }
  for (std::size_t k = 0; k < sc.s_grid.size(); ++k) {
    require(sc.s_grid[k] > 0.0 && sc.s_grid[k] < 1.0,
            "scenario: s grid entries must lie in (0, 1)");
    require(k == 0 || sc.s_grid[k] > sc.s_grid[k - 1],
            "scenario: s grid must be strictly increasing");
  }
  auto all_pos = [&](const std::vector<double>& v, const char* msg) {
    for (double x : v) require(x > 0.0, msg);
  };
  all_pos(sc.h_grid, "scenario: h grid entries must be positive");
  all_pos(sc.eps_list, "scenario: eps entries must be positive");
  all_pos(sc.velocity_h, "scenario: velocity steps must be positive");
  all_pos(sc.harnack_times, "scenario: harnack times must be positive");
  all_pos(sc.kernel_times, "scenario: kernel times must be positive");
  for (double t : sc.heated_times) {
    require(t >= 0.0, "scenario: heated times must be nonnegative");
  }
  require(sc.harnack_pairs >= 1, "scenario: harnack_pairs must be >= 1");
  require(sc.window_margin >= 0.0 && sc.window_margin <= 0.45,
          "scenario: window margin must lie in [0, 0.45]");
  require(sc.convolution_radius > 0.0,
          "scenario: convolution radius must be positive");
  if (!sc.translation.empty()) {
    require(static_cast<int>(sc.translation.size()) == sc.model.dimension,
            "scenario: translation dimension mismatch");
    if (sc.model.family == Family::Heisenberg1) {
      require(sc.translation[2] == 0.0,
              "scenario: translation must be horizontal");
      require(sc.translation[0] != 0.0 || sc.translation[1] != 0.0,
              "scenario: translation must be nonzero");
    }
  }
}

const std::vector<std::string>& certifier_names() {
  static const std::vector<std::string> names = {
      "calculus_self_checks", "entropy_regularization", "evi",
      "gradient_contraction", "heated_convexity",       "kernel_lower_bound",
      "log_harnack",          "variance_poincare",      "velocity",
      "w_contraction"};
  return names;
}

std::vector<CertReport> run_certifier(const std::string& name,
                                      const Scenario& sc) {
  if (name == "calculus_self_checks") return calculus_self_checks(sc);
  if (name == "entropy_regularization") return certify_entropy_regularization(sc);
  if (name == "evi") return certify_evi(sc);
  if (name == "gradient_contraction") return certify_gradient_contraction(sc);
  if (name == "heated_convexity") return certify_heated_convexity(sc);
  if (name == "kernel_lower_bound") return certify_kernel_lower_bound(sc);
  if (name == "log_harnack") return certify_log_harnack(sc);
  if (name == "variance_poincare") return certify_variance_poincare(sc);
  if (name == "velocity") return certify_velocity(sc);
  if (name == "w_contraction") return certify_w_contraction(sc);
  throw std::invalid_argument("unknown certifier: " + name);
}

std::vector<CertReport> calculus_self_checks(const Scenario& sc) {
  Ctx c = make_ctx(sc);
  require(!sc.functions.empty(), "calculus_self_checks: needs a test function");
  require(!sc.measures.empty(), "calculus_self_checks: needs a measure");
  const std::string kName = "calculus_self_checks";
  const GridChart& chart = sc.chart;
  const double vol = chart.cell_volume();
  std::vector<CertReport> out;

  // Action derivative: A(s) = 1/2 int (P_{t-s}f)^2 P_s phi dm has derivative
  // B(s) = int Gamma(P_{t-s}f) P_s phi dm; compared via a centered quotient.
  {
    const auto& fn = sc.functions[0];
    const auto& mn = sc.measures[0];
    ScalarField f = field_of(c, fn);
    DensityField phid = density_of(c, mn);
    ScalarField phi{phid.chart, phid.values};
    const double t = 0.2, ds = 0.01, s0 = 0.5 * t;
    std::vector<ScalarField> fs(3), ps(3);
    evolve_chain(c, f, {t - s0 - ds, t - s0, t - s0 + ds},
                 [&](std::size_t k, const ScalarField& g) { fs[k] = g; });
    evolve_chain(c, phi, {s0 - ds, s0, s0 + ds},
                 [&](std::size_t k, const ScalarField& g) { ps[k] = g; });
    auto a_val = [&](const ScalarField& pf, const ScalarField& pp) {
      double acc = 0.0;
      for (std::size_t i = 0; i < pf.values.size(); ++i) {
        acc += pf.values[i] * pf.values[i] * pp.values[i];
      }
      return 0.5 * acc * vol;
    };
    double am = a_val(fs[2], ps[0]);
    double ap = a_val(fs[0], ps[2]);
    ScalarField g1 = carre_du_champ(fs[1]);
    double b = 0.0;
    for (std::size_t i = 0; i < g1.values.size(); ++i) {
      b += g1.values[i] * ps[1].values[i];
    }
    b *= vol;
    double dq = (ap - am) / (2.0 * ds);
    double mag = std::max(std::fabs(b), std::fabs(dq));
    double floor = kNoiseRel * std::max({std::fabs(am), std::fabs(ap), 1.0});
    double rel = std::fabs(dq - b) / std::max(mag, floor);
    out.push_back(report(
        kName,
        "d/ds [1/2 int (P_{t-s}f)^2 P_s phi dm] = int Gamma(P_{t-s}f) P_s phi dm",
        "action f=" + fn.name + " phi=" + mn.name, rel, 2e-2, 0.0, 1.0,
        c.win_label, t, s0, kNan,
        "ds=" + fmt(ds) + ";B=" + fmt(b) + ";dA=" + fmt(dq)));
  }

  // Chain rules, checked through their second-order residual decay under
  // grid coarsening (residual at half resolution over residual here).
  auto coarse_chart = [&]() {
    std::vector<int> shape = chart.shape;
    for (int& n : shape) n = std::max(8, n / 2);
    return make_chart(chart.model, chart.lo, chart.hi, shape, chart.boundary);
  };
  auto richardson = [&](const std::string& case_id, const std::string& anchor,
                        const std::function<double(const GridChart&)>& resid) {
    double fine = resid(chart);
    double coarse = resid(coarse_chart());
    if (fine <= kNoiseRel) {
      out.push_back(report(kName, anchor, case_id, 0.0, 0.0, 0.0, 1.0,
                           c.win_label, kNan, kNan, kNan, "residual at noise floor"));
      return;
    }
    double ratio = coarse / fine;
    out.push_back(report(kName, anchor, case_id, std::fabs(ratio - 4.0), 2.0,
                         0.0, 1.0, c.win_label, kNan, kNan, kNan,
                         "fine=" + fmt(fine) + ";coarse=" + fmt(coarse) +
                             ";ratio=" + fmt(ratio)));
  };

  const auto& f0 = sc.functions[0];
  const auto& g0 = sc.functions.size() > 1 ? sc.functions[1] : sc.functions[0];

  richardson(
      "lap-chain f=" + f0.name, "Delta(f^2) = 2 f Delta(f) + 2 Gamma(f)",
      [&](const GridChart& ch) {
        HeatOperator op = assemble_heat_operator(ch);
        ScalarField f = sample_scalar(ch, f0.eval);
        ScalarField f2 = f;
        for (double& v : f2.values) v *= v;
        ScalarField df = sublaplacian_apply(op, f);
        ScalarField df2 = sublaplacian_apply(op, f2);
        ScalarField gf = carre_du_champ(f);
        auto win = interior_window(ch, sc.window_margin);
        double acc = 0.0, scale = 0.0;
        for (long long i : win) {
          auto u = static_cast<std::size_t>(i);
          double r = df2.values[u] - 2.0 * f.values[u] * df.values[u] -
                     2.0 * gf.values[u];
          acc += r * r;
          scale = std::max(scale, std::fabs(df2.values[u]));
        }
        double rms = std::sqrt(acc / static_cast<double>(win.size()));
        return scale > 0.0 ? rms / scale : 0.0;
      });

  richardson(
      "gamma-chain f=" + f0.name + " g=" + g0.name,
      "Gamma(sin f; g) = cos(f) Gamma(f; g)", [&](const GridChart& ch) {
        ScalarField f = sample_scalar(ch, f0.eval);
        ScalarField g = sample_scalar(ch, g0.eval);
        ScalarField sf = f;
        for (double& v : sf.values) v = std::sin(v);
        ScalarField lhs = carre_du_champ(sf, g);
        ScalarField mid = carre_du_champ(f, g);
        auto win = interior_window(ch, sc.window_margin);
        double acc = 0.0, scale = 0.0;
        for (long long i : win) {
          auto u = static_cast<std::size_t>(i);
          double r = lhs.values[u] - std::cos(f.values[u]) * mid.values[u];
          acc += r * r;
          scale = std::max(scale, std::fabs(mid.values[u]));
        }
        double rms = std::sqrt(acc / static_cast<double>(win.size()));
        return scale > 0.0 ? rms / scale : 0.0;
      });

  // Mollifier Laplacian identity: Delta applied to the semigroup average of f
  // against the time kernel equals minus the derivative-kernel average.
  {
    const double eps = 0.4;
    ScalarField f = field_of(c, f0);
    ScalarField hf = mollify_semigroup(c.op, f, eps, Mollifier(), sc.evolve);
    ScalarField lap = sublaplacian_apply(c.op, hf);
    ScalarField rhs = mollify_laplacian_rhs(c.op, f, eps, Mollifier(), sc.evolve);
    double num = 0.0, den = 0.0;
    for (long long i : c.win) {
      auto u = static_cast<std::size_t>(i);
      num += std::fabs(lap.values[u] + rhs.values[u]);
      den += std::fabs(rhs.values[u]);
    }
    double rel = num / std::max(den, 1e-300);
    out.push_back(report(kName,
                         "Delta(M_eps f) = -(1/eps) int P_{eps r} f k'(r) dr",
                         "mollifier f=" + f0.name, rel, 2e-2, 0.0, 1.0,
                         c.win_label, kNan, kNan, kNan, "eps=" + fmt(eps)));
  }

  return out;
}

std::vector<CertReport> certify_gradient_contraction(const Scenario& sc,
                                                     CurvatureFn* chat_out) {
  Ctx c = make_ctx(sc);
  require(!sc.functions.empty(),
          "certify_gradient_contraction: no test functions");
  require(!sc.time_grid.empty(), "certify_gradient_contraction: empty time grid");
  const std::string kName = "gradient_contraction";
  const char* kAnchor = "Gamma(P_t f) <= c(t)^2 P_t Gamma(f)";
  const auto& T = sc.time_grid;
  const std::size_t nt = T.size();
  std::vector<CertReport> out;
  std::vector<double> chat(nt, 0.0);
  std::vector<std::string> witness(nt);

  for (const auto& fn : sc.functions) {
    ScalarField f = field_of(c, fn);
    ScalarField gf = carre_du_champ(f);
    std::vector<ScalarField> pf(nt), pg(nt);
    evolve_chain(c, f, T, [&](std::size_t k, const ScalarField& g) { pf[k] = g; });
    evolve_chain(c, gf, T, [&](std::size_t k, const ScalarField& g) { pg[k] = g; });
    for (std::size_t k = 0; k < nt; ++k) {
      double ct = sc.curvature(T[k]);
      ScalarField g1 = carre_du_champ(pf[k]);
      double pg_max = win_max_abs(c.win, pg[k].values);
      double fscale = std::max(win_max_abs(c.win, g1.values), ct * ct * pg_max);
      double nf = kNoiseRel * fscale;
      double include_floor = kRatioFloorRel * fscale;
      double ratio_floor = kRatioFloorRel * pg_max;
      bool any = false;
      long long wnode = -1, excluded = 0;
      double wl = 0.0, wr = 0.0, wrel = 0.0, ratio = 0.0;
      for (long long i : c.win) {
        auto u = static_cast<std::size_t>(i);
        double l = g1.values[u];
        double p = pg[k].values[u];
        double r = ct * ct * p;
        if (std::max(std::fabs(l), std::fabs(r)) < include_floor) {
          ++excluded;
        } else {
          double rel = (r - l) / std::max({std::fabs(l), std::fabs(r), nf});
          if (!any || rel < wrel) {
            any = true;
            wnode = i;
            wl = l;
            wr = r;
            wrel = rel;
          }
        }
        if (p >= ratio_floor && l > 0.0) {
          ratio = std::max(ratio, std::sqrt(l / p));
        }
      }
      std::string case_id = "f=" + fn.name + " t=" + fmt(T[k]);
      if (!any) {
        out.push_back(report(kName, kAnchor, case_id, 0.0, 0.0,
                             sc.tol.pointwise_rel, fscale, c.win_label, T[k],
                             kNan, kNan, "all window nodes below noise floor"));
      } else {
        out.push_back(report(kName, kAnchor, case_id, wl, wr,
                             sc.tol.pointwise_rel, fscale, c.win_label, T[k],
                             kNan, kNan,
                             "node=" + std::to_string(wnode) +
                                 ";excluded=" + std::to_string(excluded)));
      }
      if (ratio > chat[k]) {
        chat[k] = ratio;
        witness[k] = fn.name;
      }
    }
  }

  for (std::size_t k = 0; k < nt; ++k) {
    out.push_back(report(kName,
                         "chat(t) = sup sqrt(Gamma(P_t f)/P_t Gamma(f)) <= c(t)",
                         "chat t=" + fmt(T[k]), chat[k], sc.curvature(T[k]),
                         sc.tol.pointwise_rel, 1.0, c.win_label, T[k], kNan,
                         kNan, "witness=" + witness[k]));
  }

  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = i; j < nt; ++j) {
      double sum = T[i] + T[j];
      for (std::size_t k = 0; k < nt; ++k) {
        if (std::fabs(T[k] - sum) <= 1e-9) {
          out.push_back(report(kName, "chat(s+t) <= chat(s) chat(t)",
                               "submult s=" + fmt(T[i]) + " t=" + fmt(T[j]),
                               chat[k], chat[i] * chat[j],
                               sc.tol.pointwise_rel, 1.0, c.win_label, T[j],
                               T[i], kNan, ""));
          break;
        }
      }
    }
  }

  bool chat_positive = std::all_of(chat.begin(), chat.end(),
                                   [](double v) { return v > 0.0; });
  if (nt >= 2 && chat_positive) {
    double K = (std::log(chat.front()) - std::log(chat.back())) /
               (T.back() - T.front());
    double M = 0.0;
    for (std::size_t k = 0; k < nt; ++k) {
      M = std::max(M, chat[k] * std::exp(K * T[k]));
    }
    std::size_t worst = 0;
    double best_rel = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < nt; ++k) {
      double rhs = M * std::exp(-K * T[k]);
      double rel = (rhs - chat[k]) / std::max(rhs, chat[k]);
      if (rel < best_rel) {
        best_rel = rel;
        worst = k;
      }
    }
    out.push_back(report(kName, "chat(t) <= M exp(-K t)", "envelope",
                         chat[worst], M * std::exp(-K * T[worst]), 0.0, 1.0,
                         c.win_label, T[worst], kNan, kNan,
                         "M=" + fmt(M) + ";K=" + fmt(K)));
  }

  if (chat_out) {
    std::vector<double> knots, values;
    if (T.front() > 0.0) {
      knots.push_back(0.0);
      values.push_back(1.0);
    }
    for (std::size_t k = 0; k < nt; ++k) {
      knots.push_back(T[k]);
      values.push_back(chat[k] > 0.0 ? chat[k] : 1.0);
    }
    *chat_out = CurvatureFn::tabulated(std::move(knots), std::move(values));
  }
  return out;
}

std::vector<CertReport> certify_w_contraction(const Scenario& sc) {
  Ctx c = make_ctx(sc);
  require(sc.measures.size() >= 2, "certify_w_contraction: needs two measures");
  require(!sc.time_grid.empty(), "certify_w_contraction: empty time grid");
  const std::string kName = "w_contraction";
  const auto& T = sc.time_grid;
  const std::size_t nt = T.size();
  double dscale = distance_scale(sc.chart);
  std::vector<CertReport> out;

  for (std::size_t i = 0; i < sc.measures.size(); ++i) {
    for (std::size_t j = i + 1; j < sc.measures.size(); ++j) {
      DensityField a0 = density_of(c, sc.measures[i]);
      DensityField b0 = density_of(c, sc.measures[j]);
      double w20 = std::sqrt(w2sq_between(c, a0, b0));
      double w10 = w1_distance(cloud_of(c, a0), cloud_of(c, b0), sc.transport);
      std::vector<DensityField> at(nt), bt(nt);
      evolve_density_chain(c, a0, T,
                           [&](std::size_t k, const DensityField& g) { at[k] = g; });
      evolve_density_chain(c, b0, T,
                           [&](std::size_t k, const DensityField& g) { bt[k] = g; });
      std::string pair = "pair=" + sc.measures[i].name + ":" + sc.measures[j].name;
      for (std::size_t k = 0; k < nt; ++k) {
        double ct = sc.curvature(T[k]);
        double w2t = std::sqrt(w2sq_between(c, at[k], bt[k]));
        out.push_back(report(kName, "W2(H_t mu; H_t nu) <= c(t) W2(mu; nu)",
                             pair + " w2 t=" + fmt(T[k]), w2t, ct * w20,
                             sc.tol.ot_rel, dscale, "supports", T[k], kNan,
                             kNan, "w20=" + fmt(w20)));
        double w1t =
            w1_distance(cloud_of(c, at[k]), cloud_of(c, bt[k]), sc.transport);
        out.push_back(report(kName, "W1(H_t mu; H_t nu) <= c(t) W1(mu; nu)",
                             pair + " w1 t=" + fmt(T[k]), w1t, ct * w10,
                             sc.tol.ot_rel, dscale, "supports", T[k], kNan,
                             kNan, "w10=" + fmt(w10)));
      }
    }
  }
  return out;
}

std::vector<CertReport> certify_variance_poincare(const Scenario& sc) {
  Ctx c = make_ctx(sc);
  require(!sc.functions.empty(), "certify_variance_poincare: no test functions");
  require(!sc.time_grid.empty(), "certify_variance_poincare: empty time grid");
  const std::string kName = "variance_poincare";
  const auto& T = sc.time_grid;
  const std::size_t nt = T.size();
  std::vector<CertReport> out;

  std::vector<double> i2(nt), im2(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    i2[k] = curvature_moment(sc.curvature, 2.0, T[k]);
    im2[k] = curvature_moment(sc.curvature, -2.0, T[k]);
  }

  for (const auto& fn : sc.functions) {
    ScalarField f = field_of(c, fn);
    double lip_f = lip_estimate(f, sc.oracle);
    double sup_f = 0.0;
    for (double v : f.values) sup_f = std::max(sup_f, std::fabs(v));
    ScalarField f2 = f;
    for (double& v : f2.values) v *= v;
    ScalarField gf = carre_du_champ(f);
    std::vector<ScalarField> pf(nt), pf2(nt), pg(nt);
    evolve_chain(c, f, T, [&](std::size_t k, const ScalarField& g) { pf[k] = g; });
    evolve_chain(c, f2, T, [&](std::size_t k, const ScalarField& g) { pf2[k] = g; });
    evolve_chain(c, gf, T, [&](std::size_t k, const ScalarField& g) { pg[k] = g; });

    for (std::size_t k = 0; k < nt; ++k) {
      std::string suffix = "f=" + fn.name + " t=" + fmt(T[k]);
      std::vector<double> var(pf[k].values.size());
      for (std::size_t u = 0; u < var.size(); ++u) {
        var[u] = pf2[k].values[u] - pf[k].values[u] * pf[k].values[u];
      }
      ScalarField g1 = carre_du_champ(pf[k]);

      std::vector<double> lower(var.size());
      for (std::size_t u = 0; u < var.size(); ++u) {
        lower[u] = 2.0 * im2[k] * g1.values[u];
      }
      double fscale = std::max(win_max_abs(c.win, var),
                               win_max_abs(c.win, lower));
      WorstNode w = worst_node(c.win, lower, var, kRatioFloorRel * fscale,
                               kNoiseRel * fscale);
      out.push_back(report(
          kName, "2 I_{-2}(t) Gamma(P_t f) <= P_t(f^2) - (P_t f)^2",
          suffix + " lower", w.any ? w.lhs : 0.0, w.any ? w.rhs : 0.0,
          sc.tol.pointwise_rel, fscale, c.win_label, T[k], kNan, kNan,
          w.any ? "node=" + std::to_string(w.node) +
                      ";excluded=" + std::to_string(w.excluded)
                : "all window nodes below noise floor"));

      std::vector<double> upper(var.size());
      for (std::size_t u = 0; u < var.size(); ++u) {
        upper[u] = 2.0 * i2[k] * pg[k].values[u];
      }
      double fscale2 = std::max(win_max_abs(c.win, var),
                                win_max_abs(c.win, upper));
      WorstNode w2 = worst_node(c.win, var, upper, kRatioFloorRel * fscale2,
                                kNoiseRel * fscale2);
      out.push_back(report(
          kName, "P_t(f^2) - (P_t f)^2 <= 2 I_2(t) P_t Gamma(f)",
          suffix + " upper", w2.any ? w2.lhs : 0.0, w2.any ? w2.rhs : 0.0,
          sc.tol.pointwise_rel, fscale2, c.win_label, T[k], kNan, kNan,
          w2.any ? "node=" + std::to_string(w2.node) +
                       ";excluded=" + std::to_string(w2.excluded)
                 : "all window nodes below noise floor"));

      double lip_pf = lip_estimate(pf[k], sc.oracle);
      out.push_back(report(kName, "sqrt(2 I_{-2}(t)) Lip(P_t f) <= sup|f|",
                           suffix + " feller",
                           std::sqrt(2.0 * im2[k]) * lip_pf, sup_f,
                           sc.tol.pointwise_rel, std::max(sup_f, 1e-300),
                           "global", T[k]));
      out.push_back(report(kName, "Lip(P_t f) <= c(t) Lip(f)", suffix + " lip",
                           lip_pf, sc.curvature(T[k]) * lip_f,
                           sc.tol.pointwise_rel, std::max(lip_f, 1e-300),
                           "global", T[k]));
    }
  }
  return out;
}

std::vector<CertReport> certify_log_harnack(const Scenario& sc) {
  Ctx c = make_ctx(sc);
  require(!sc.measures.empty(), "certify_log_harnack: needs a measure");
  require(!sc.harnack_times.empty(), "certify_log_harnack: no times");
  const std::string kName = "log_harnack";
  const char* kAnchor =
      "P_t log(f+eps)(y) <= log(P_t f(x)+eps) + d(x;y)^2/(4 I_{-2}(t))";
  std::vector<double> T = sc.harnack_times;
  std::sort(T.begin(), T.end());
  const std::size_t nt = T.size();
  std::vector<double> im2(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    im2[k] = curvature_moment(sc.curvature, -2.0, T[k]);
  }
  std::vector<CertReport> out;

  for (const auto& mn : sc.measures) {
    DensityField fd = density_of(c, mn);
    ScalarField f{fd.chart, fd.values};
    std::vector<ScalarField> pf(nt);
    evolve_chain(c, f, T, [&](std::size_t k, const ScalarField& g) { pf[k] = g; });
    for (double eps : sc.eps_list) {
      ScalarField lf = f;
      for (double& v : lf.values) v = std::log(v + eps);
      std::vector<ScalarField> plf(nt);
      evolve_chain(c, lf, T,
                   [&](std::size_t k, const ScalarField& g) { plf[k] = g; });
      for (std::size_t k = 0; k < nt; ++k) {
        std::string base = "mu=" + mn.name + " eps=" + fmt(eps) +
                           " t=" + fmt(T[k]);
        std::mt19937_64 rng(fnv1a(base) ^ (0x9e3779b97f4a7c15ull *
                                           (static_cast<std::uint64_t>(sc.seed) + 1)));
        for (int p = 0; p < sc.harnack_pairs; ++p) {
          long long x = c.win[rng() % c.win.size()];
          long long y = c.win[rng() % c.win.size()];
          Point px = sc.chart.node(x), py = sc.chart.node(y);
          double d = cc_distance(sc.model, px, py, sc.oracle);
          double lhs = plf[k].values[static_cast<std::size_t>(y)];
          double rhs = std::log(pf[k].values[static_cast<std::size_t>(x)] + eps) +
                       d * d / (4.0 * im2[k]);
          out.push_back(report(kName, kAnchor,
                               base + " pair=" + std::to_string(p), lhs, rhs,
                               sc.tol.integral_rel, 1.0, c.win_label, T[k],
                               kNan, kNan, "d=" + fmt(d)));
        }
        long long z = c.win[c.win.size() / 2];
        double lhs = plf[k].values[static_cast<std::size_t>(z)];
        double rhs = std::log(pf[k].values[static_cast<std::size_t>(z)] + eps);
        out.push_back(report(kName, kAnchor, base + " pair=diag", lhs, rhs,
                             sc.tol.integral_rel, 1.0, c.win_label, T[k], kNan,
                             kNan, "d=0"));
      }
    }
  }
  return out;
}

std::vector<CertReport> certify_kernel_lower_bound(const Scenario& sc) {
  Ctx c = make_ctx(sc);
  const std::string kName = "kernel_lower_bound";
  std::vector<CertReport> out;
  double total = sc.chart.cell_volume() * static_cast<double>(sc.chart.size());
  if (sc.model.family != Family::AbelianTorus || std::fabs(total - 1.0) > 1e-9) {
    CertReport r = report(kName, "exp(-d(x;o)^2/(4 I_{-2}(t))) <= p_{2t}(x)",
                          "unsupported", 0.0, 0.0, 0.0, 1.0, "none");
    r.verdict = Verdict::Degenerate;
    r.extra = "ambient measure is not a probability";
    out.push_back(r);
    return out;
  }

  const long long n = sc.chart.size();
  std::string full_label = "full " + std::to_string(n) + "/" + std::to_string(n);
  Point o = identity(sc.model);
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    dist[static_cast<std::size_t>(i)] =
        cc_distance(sc.model, sc.chart.node(i), o, sc.oracle);
  }

  for (double t : sc.kernel_times) {
    DensityField p2t = heat_kernel(c.op, o, 2.0 * t, sc.delta_init, sc.evolve);
    double im2 = curvature_moment(sc.curvature, -2.0, t);
    double pmax = 0.0;
    for (double v : p2t.values) pmax = std::max(pmax, std::fabs(v));
    double nf = kNoiseRel * pmax;
    bool any = false;
    long long wnode = -1;
    double wl = 0.0, wr = 0.0, wrel = 0.0;
    for (long long i = 0; i < n; ++i) {
      auto u = static_cast<std::size_t>(i);
      double l = std::exp(-dist[u] * dist[u] / (4.0 * im2));
      double r = p2t.values[u];
      double rel = (r - l) / std::max({std::fabs(l), std::fabs(r), nf});
      if (!any || rel < wrel) {
        any = true;
        wnode = i;
        wl = l;
        wr = r;
        wrel = rel;
      }
    }
    out.push_back(report(kName, "exp(-d(x;o)^2/(4 I_{-2}(t))) <= p_{2t}(x)",
                         "lower t=" + fmt(t), wl, wr, sc.tol.pointwise_rel,
                         pmax, full_label, t, kNan, kNan,
                         "node=" + std::to_string(wnode) +
                             ";I-2=" + fmt(im2)));
  }

  {
    double t0 = sc.kernel_times.front();
    std::mt19937_64 rng(fnv1a("kernel symmetry") ^
                        (static_cast<std::uint64_t>(sc.seed) + 1));
    long long a = static_cast<long long>(rng() % static_cast<std::uint64_t>(n));
    long long b = static_cast<long long>(rng() % static_cast<std::uint64_t>(n));
    if (b == a) b = (a + n / 2) % n;
    DensityField pa = heat_kernel(c.op, sc.chart.node(a), t0, sc.delta_init,
                                  sc.evolve);
    DensityField pb = heat_kernel(c.op, sc.chart.node(b), t0, sc.delta_init,
                                  sc.evolve);
    double vab = pa.values[static_cast<std::size_t>(b)];
    double vba = pb.values[static_cast<std::size_t>(a)];
    double scale = std::max({vab, vba, 1e-300});
    out.push_back(report(kName, "p_t[x](y) = p_t[y](x)",
                         "symmetry t=" + fmt(t0), std::fabs(vab - vba) / scale,
                         1e-6, 0.0, 1.0, full_label, t0, kNan, kNan,
                         "x=" + std::to_string(a) + ";y=" + std::to_string(b)));
  }
  return out;
}

std::vector<CertReport> certify_entropy_regularization(const Scenario& sc) {
  Ctx c = make_ctx(sc);
  require(!sc.measures.empty(), "certify_entropy_regularization: needs a measure");
  require(!sc.time_grid.empty(), "certify_entropy_regularization: empty time grid");
  const std::string kName = "entropy_regularization";
  const auto& T = sc.time_grid;
  const std::size_t nt = T.size();
  const double vol = sc.chart.cell_volume();
  std::vector<CertReport> out;

  double radius = std::numeric_limits<double>::infinity();
  for (int a = 0; a < sc.chart.dim(); ++a) {
    radius = std::min(radius, 0.5 * (sc.chart.hi[a] - sc.chart.lo[a]));
  }
  const double radii[3] = {0.25 * radius, 0.5 * radius, radius};

  for (const auto& mn : sc.measures) {
    DensityField rho0 = density_of(c, mn);
    long long x0 = 0;
    for (long long i = 1; i < sc.chart.size(); ++i) {
      if (rho0.values[static_cast<std::size_t>(i)] >
          rho0.values[static_cast<std::size_t>(x0)]) {
        x0 = i;
      }
    }
    Point px0 = sc.chart.node(x0);
    std::vector<double> dist(rho0.values.size());
    for (long long i = 0; i < sc.chart.size(); ++i) {
      dist[static_cast<std::size_t>(i)] =
          cc_distance(sc.model, sc.chart.node(i), px0, sc.oracle);
    }
    auto moment_of = [&](const DensityField& mu) {
      double acc = 0.0;
      for (std::size_t u = 0; u < mu.values.size(); ++u) {
        acc += mu.values[u] * dist[u] * dist[u];
      }
      return acc * vol;
    };
    double m20 = moment_of(rho0);
    double e0 = entropy(rho0);
    double fisher0 = fisher_information(rho0);
    double base = e0 + 2.0 * m20;

    double log_ball[3];
    for (int r = 0; r < 3; ++r) {
      long long cnt = 0;
      for (double d : dist) cnt += d <= radii[r] ? 1 : 0;
      log_ball[r] = std::log(static_cast<double>(cnt) * vol);
    }

    std::vector<double> ent(nt), m2(nt), fis(nt);
    evolve_density_chain(c, rho0, T, [&](std::size_t k, const DensityField& g) {
      ent[k] = entropy(g);
      m2[k] = moment_of(g);
      fis[k] = fisher_information(g);
    });

    std::string mu_id = "mu=" + mn.name;
    double prev_ent = e0;
    for (std::size_t k = 0; k < nt; ++k) {
      if (T[k] > 0.0) {
        double im2 = curvature_moment(sc.curvature, -2.0, T[k]);
        double best = std::numeric_limits<double>::infinity();
        int best_r = 0;
        for (int r = 0; r < 3; ++r) {
          double v = (radii[r] * radii[r] + m20) / (2.0 * im2) - log_ball[r];
          if (v < best) {
            best = v;
            best_r = r;
          }
        }
        out.push_back(report(
            kName,
            "Ent(H_t mu) <= (r^2 + M2(mu))/(2 I_{-2}(t)) - log m(B_r(x0))",
            mu_id + " llogl t=" + fmt(T[k]), ent[k], best,
            sc.tol.integral_rel, std::max(1.0, std::fabs(best)), "global",
            T[k], kNan, kNan, "r=" + fmt(radii[best_r])));
      }
      out.push_back(report(kName,
                           "M2(H_t mu) <= exp(4t) (Ent(mu) + 2 M2(mu))",
                           mu_id + " moment t=" + fmt(T[k]), m2[k],
                           std::exp(4.0 * T[k]) * base, sc.tol.integral_rel,
                           std::max(1.0, m20), "global", T[k]));
      out.push_back(report(kName, "Ent(H_{t'} mu) <= Ent(H_t mu) for t' >= t",
                           mu_id + " ent-monotone t=" + fmt(T[k]), ent[k],
                           prev_ent, sc.tol.integral_rel,
                           std::max(1.0, std::fabs(e0)), "global", T[k]));
      prev_ent = ent[k];
    }

    {
      std::vector<double> ts, fv, mv;
      if (T.front() > 0.0) {
        ts.push_back(0.0);
        fv.push_back(fisher0);
        mv.push_back(m20);
      }
      for (std::size_t k = 0; k < nt; ++k) {
        ts.push_back(T[k]);
        fv.push_back(fis[k]);
        mv.push_back(m2[k]);
      }
      double intf = 0.0, intm = 0.0;
      for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        double dt = ts[k + 1] - ts[k];
        intf += 0.5 * dt * (fv[k] + fv[k + 1]);
        intm += 0.5 * dt * (mv[k] + mv[k + 1]);
      }
      double lhs = intf + 2.0 * intm;
      double rhs = 2.0 * std::exp(4.0 * T.back()) * base;
      out.push_back(report(
          kName,
          "int_0^T F(f_t) dt + 2 int_0^T M2(H_t mu) dt <= 2 exp(4T) (Ent(mu) + 2 M2(mu))",
          mu_id + " fisher-integral", lhs, rhs, sc.tol.integral_rel,
          std::max(1.0, std::fabs(rhs)), "global", T.back()));
    }
  }
  return out;
}

namespace {

PointCloudMeasure translate_cloud(const GroupModel& model,
                                  const PointCloudMeasure& mu, const Point& u) {
  std::vector<Point> pts = mu.points;
  for (Point& p : pts) p = multiply(model, p, u);
  return make_cloud(model, std::move(pts), mu.weights, false);
}

}  // namespace

std::vector<CertReport> certify_velocity(const Scenario& sc) {
  Ctx c = make_ctx(sc);
  require(!sc.measures.empty(), "certify_velocity: needs a measure");
  require(!sc.time_grid.empty(), "certify_velocity: empty time grid");
  require(!sc.velocity_h.empty(), "certify_velocity: no step ladder");
  const std::string kName = "velocity";
  double dscale = distance_scale(sc.chart);
  std::vector<CertReport> out;

  // Heat-flow speed against Fisher information.
  {
    std::vector<double> times;
    for (double t : sc.time_grid) {
      times.push_back(t);
      for (double h : sc.velocity_h) times.push_back(t + h);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
                times.end());
    auto index_of = [&](double t) {
      for (std::size_t k = 0; k < times.size(); ++k) {
        if (std::fabs(times[k] - t) < 1e-12) return k;
      }
      throw std::logic_error("certify_velocity: time lookup failed");
    };
    for (const auto& mn : sc.measures) {
      DensityField rho0 = density_of(c, mn);
      std::vector<DensityField> rt(times.size());
      evolve_density_chain(c, rho0, times,
                           [&](std::size_t k, const DensityField& g) { rt[k] = g; });
      for (double t : sc.time_grid) {
        double fisher = fisher_information(rt[index_of(t)]);
        for (double h : sc.velocity_h) {
          double w2 = std::sqrt(
              w2sq_between(c, rt[index_of(t)], rt[index_of(t + h)]));
          out.push_back(report(kName, "(W2(mu_t; mu_{t+h})/h)^2 <= F(f_t)",
                               "mu=" + mn.name + " speed t=" + fmt(t) +
                                   " h=" + fmt(h),
                               (w2 / h) * (w2 / h), fisher, sc.tol.ot_rel,
                               std::max(1.0, fisher), "supports", t, kNan, h,
                               "w2=" + fmt(w2)));
        }
      }
    }
  }

  // Geodesic curve: displacement interpolation on abelian models, right
  // translations on the Heisenberg group.
  std::vector<double> sv;
  sv.push_back(0.0);
  for (double s : sc.s_grid) sv.push_back(s);
  sv.push_back(1.0);
  std::vector<PointCloudMeasure> curve(sv.size());
  if (sc.model.family == Family::Heisenberg1) {
    require(!sc.translation.empty(),
            "certify_velocity: Heisenberg curve needs a translation");
    PointCloudMeasure c0 = cloud_of(c, density_of(c, sc.measures[0]));
    for (std::size_t k = 0; k < sv.size(); ++k) {
      Point us = {sv[k] * sc.translation[0], sv[k] * sc.translation[1], 0.0};
      curve[k] = translate_cloud(sc.model, c0, us);
    }
  } else {
    require(sc.measures.size() >= 2,
            "certify_velocity: abelian curve needs two measures");
    CloudPlan cp = w2_plan(cloud_of(c, density_of(c, sc.measures[0])),
                           cloud_of(c, density_of(c, sc.measures[1])),
                           sc.transport);
    for (std::size_t k = 0; k < sv.size(); ++k) {
      curve[k] = displacement_interpolate(cp, sv[k], sc.oracle);
    }
  }

  std::vector<double> speed(sv.size() - 1);
  for (std::size_t k = 0; k + 1 < sv.size(); ++k) {
    speed[k] = std::sqrt(w2_plan(curve[k], curve[k + 1], sc.transport).cost2) /
               (sv[k + 1] - sv[k]);
  }
  for (std::size_t k = 0; k + 1 < sv.size(); ++k) {
    PointCloudMeasure ca = cloud_of(
        c, convolve_measure(curve[k], sc.chart, sc.convolution_radius, sc.oracle));
    PointCloudMeasure cb = cloud_of(
        c, convolve_measure(curve[k + 1], sc.chart, sc.convolution_radius,
                            sc.oracle));
    double smooth = std::sqrt(w2_plan(ca, cb, sc.transport).cost2) /
                    (sv[k + 1] - sv[k]);
    out.push_back(report(kName, "smoothed curve speed <= raw curve speed",
                         "conv-speed s=" + fmt(sv[k]), smooth, speed[k],
                         sc.tol.ot_rel, std::max(1.0, dscale), "supports",
                         kNan, sv[k], kNan,
                         "s2=" + fmt(sv[k + 1]) + ";r=" +
                             fmt(sc.convolution_radius)));
  }

  std::size_t nphi = std::min<std::size_t>(2, sc.functions.size());
  for (std::size_t fi = 0; fi < nphi; ++fi) {
    const auto& fn = sc.functions[fi];
    std::vector<double> phi_int(sv.size());
    for (std::size_t k = 0; k < sv.size(); ++k) {
      double acc = 0.0;
      for (std::size_t a = 0; a < curve[k].size(); ++a) {
        acc += curve[k].weights[a] * fn.eval(curve[k].points[a]);
      }
      phi_int[k] = acc;
    }
    for (std::size_t k = 1; k + 1 < sv.size(); ++k) {
      double dq = (phi_int[k + 1] - phi_int[k - 1]) / (sv[k + 1] - sv[k - 1]);
      double sp = std::max(speed[k - 1], speed[k]);
      double grad = 0.0;
      for (std::size_t a = 0; a < curve[k].size(); ++a) {
        grad += curve[k].weights[a] *
                horizontal_grad_sq(sc.model, fn.eval, curve[k].points[a]);
      }
      out.push_back(report(
          kName, "(d/ds int phi dmu_s)^2 <= speed^2 int Gamma(phi) dmu_s",
          "lisini phi=" + fn.name + " s=" + fmt(sv[k]), dq * dq,
          sp * sp * grad, sc.tol.ot_rel, std::max(1.0, sp * sp * grad),
          "supports", kNan, sv[k]));
    }
  }
  return out;
}

std::vector<CertReport> certify_evi(const Scenario& sc) {
  Ctx c = make_ctx(sc);
  require(sc.measures.size() >= 2, "certify_evi: needs two measures");
  require(!sc.time_grid.empty(), "certify_evi: empty time grid");
  const std::string kName = "evi";
  const char* kAnchor =
      "W2^2(H_{t1}mu1; H_{t0}mu0)/2 <= W2^2(mu1; mu0)/(2 RI(t0;t1)) + "
      "(t1-t0)(Ent(H_{t0}mu0) - Ent(H_{t1}mu1))";
  const auto& T = sc.time_grid;
  const std::size_t nt = T.size();
  double dscale = distance_scale(sc.chart);
  std::vector<CertReport> out;

  std::vector<std::pair<std::size_t, std::size_t>> tpairs;
  for (std::size_t k = 0; k < nt; ++k) tpairs.emplace_back(k, k);
  for (std::size_t k = 0; k + 1 < nt; ++k) tpairs.emplace_back(k, k + 1);

  for (std::size_t i = 0; i < sc.measures.size(); ++i) {
    for (std::size_t j = i + 1; j < sc.measures.size(); ++j) {
      DensityField a0 = density_of(c, sc.measures[i]);
      DensityField b0 = density_of(c, sc.measures[j]);
      double w2sq_base = w2sq_between(c, a0, b0);
      std::vector<DensityField> at(nt), bt(nt);
      std::vector<double> ea(nt), eb(nt);
      evolve_density_chain(c, a0, T, [&](std::size_t k, const DensityField& g) {
        at[k] = g;
        ea[k] = entropy(g);
      });
      evolve_density_chain(c, b0, T, [&](std::size_t k, const DensityField& g) {
        bt[k] = g;
        eb[k] = entropy(g);
      });
      std::string pair = "pair=" + sc.measures[i].name + ":" + sc.measures[j].name;
      for (auto [k0, k1] : tpairs) {
        double ri = mean_inverse_square(sc.curvature, T[k0], T[k1]);
        double cross = w2sq_between(c, at[k0], bt[k1]);
        double lhs = 0.5 * cross;
        double rhs = w2sq_base / (2.0 * ri) +
                     (T[k1] - T[k0]) * (ea[k0] - eb[k1]);
        out.push_back(report(kName, kAnchor,
                             pair + " t0=" + fmt(T[k0]) + " t1=" + fmt(T[k1]),
                             lhs, rhs, sc.tol.ot_rel, dscale * dscale,
                             "supports", T[k0], kNan, T[k1] - T[k0],
                             "w2sq=" + fmt(cross) + ";w2sq0=" + fmt(w2sq_base) +
                                 ";ri=" + fmt(ri)));
      }
    }
  }
  return out;
}

std::vector<CertReport> certify_heated_convexity(const Scenario& sc) {
  Ctx c = make_ctx(sc);
  require(!sc.heated_times.empty(), "certify_heated_convexity: no times");
  require(!sc.h_grid.empty(), "certify_heated_convexity: no h grid");
  const std::string kName = "heated_convexity";
  const char* kAnchor =
      "Ent(H_{t+h}mu_s) <= (1-s)Ent(H_t mu0) + s Ent(H_t mu1) + "
      "s(1-s)/(2h) (W2^2(mu0;mu1)/RI(t;t+h) - W2^2(H_t mu0;H_t mu1))";
  std::vector<CertReport> out;

  std::vector<double> sv;
  sv.push_back(0.0);
  for (double s : sc.s_grid) sv.push_back(s);
  sv.push_back(1.0);

  std::vector<double> tv = sc.heated_times;
  std::sort(tv.begin(), tv.end());

  const bool heis = sc.model.family == Family::Heisenberg1;
  std::string pair_id;

  // The geodesic as densities (Heisenberg: pushforwards under right
  // translation, sampled from the generator on a lattice moved with the
  // measure) or as clouds (abelian: displacement interpolation of an exact
  // coupling).
  DensityField rho0, rho1;
  CloudPlan cp;
  std::function<double(const Point&)> gen;
  Point u;
  if (heis) {
    require(!sc.measures.empty(), "certify_heated_convexity: needs a measure");
    require(!sc.translation.empty(),
            "certify_heated_convexity: needs a translation");
    gen = sc.measures[0].density;
    u = {sc.translation[0], sc.translation[1], 0.0};
    auto pushed = [&](double s) {
      Point us = {s * u[0], s * u[1], 0.0};
      Point inv = inverse(sc.model, us);
      return sample_density(
          sc.chart,
          [&](const Point& p) { return gen(multiply(sc.model, p, inv)); },
          true);
    };
    rho0 = pushed(0.0);
    rho1 = pushed(1.0);
    pair_id = "pair=" + sc.measures[0].name + ":translated";
  } else {
    require(sc.measures.size() >= 2,
            "certify_heated_convexity: needs two measures");
    rho0 = density_of(c, sc.measures[0]);
    rho1 = density_of(c, sc.measures[1]);
    pair_id = "pair=" + sc.measures[0].name + ":" + sc.measures[1].name;
  }
  PointCloudMeasure c0 = cloud_of(c, rho0);
  PointCloudMeasure c1 = cloud_of(c, rho1);
  cp = w2_plan(c0, c1, sc.transport);
  double w2sq_base = cp.cost2;

  // Endpoint entropies and the evolved-pair W2 term per heated time.
  std::vector<double> e0(tv.size()), e1(tv.size()), w2sq_t(tv.size());
  std::vector<DensityField> r0t(tv.size()), r1t(tv.size());
  evolve_density_chain(c, rho0, tv, [&](std::size_t k, const DensityField& g) {
    r0t[k] = g;
    e0[k] = entropy(g);
  });
  evolve_density_chain(c, rho1, tv, [&](std::size_t k, const DensityField& g) {
    r1t[k] = g;
    e1[k] = entropy(g);
  });
  for (std::size_t k = 0; k < tv.size(); ++k) {
    w2sq_t[k] = tv[k] == 0.0 ? w2sq_base : w2sq_between(c, r0t[k], r1t[k]);
  }

  // Midpoint entropies: every (t, h, s) needs Ent(H_{t+h} mu_s); the flow is
  // chained per s over the sorted distinct t+h values.
  std::vector<double> th;
  for (double t : tv) {
    for (double h : sc.h_grid) th.push_back(t + h);
  }
  std::sort(th.begin(), th.end());
  th.erase(std::unique(th.begin(), th.end(),
                       [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
           th.end());
  std::vector<std::vector<double>> ent_s(sv.size(),
                                         std::vector<double>(th.size(), 0.0));
  for (std::size_t si = 0; si < sv.size(); ++si) {
    DensityField mu_s;
    if (heis) {
      Point us = {sv[si] * u[0], sv[si] * u[1], 0.0};
      Point inv = inverse(sc.model, us);
      mu_s = sample_density(
          sc.chart,
          [&](const Point& p) { return gen(multiply(sc.model, p, inv)); },
          true);
      evolve_density_chain(c, mu_s, th, [&](std::size_t k, const DensityField& g) {
        ent_s[si][k] = entropy(g);
      });
    } else {
      PointCloudMeasure atoms = displacement_interpolate(cp, sv[si], sc.oracle);
      for (std::size_t k = 0; k < th.size(); ++k) {
        ent_s[si][k] = entropy(dual_heat_on_measure(c.op, atoms, th[k],
                                                    sc.delta_init, sc.evolve));
      }
    }
  }
  auto th_index = [&](double v) {
    for (std::size_t k = 0; k < th.size(); ++k) {
      if (std::fabs(th[k] - v) < 1e-12) return k;
    }
    throw std::logic_error("certify_heated_convexity: time lookup failed");
  };

  for (std::size_t tk = 0; tk < tv.size(); ++tk) {
    double t = tv[tk];
    for (double h : sc.h_grid) {
      double ri = mean_inverse_square(sc.curvature, t, t + h);
      double core = w2sq_base / ri - w2sq_t[tk];
      std::size_t hk = th_index(t + h);
      for (std::size_t si = 0; si < sv.size(); ++si) {
        double s = sv[si];
        double lhs = ent_s[si][hk];
        double rhs = (1.0 - s) * e0[tk] + s * e1[tk] +
                     s * (1.0 - s) / (2.0 * h) * core;
        out.push_back(report(kName, kAnchor,
                             pair_id + " t=" + fmt(t) + " h=" + fmt(h) +
                                 " s=" + fmt(s),
                             lhs, rhs, sc.tol.ot_rel,
                             std::max(1.0, std::fabs(e0[tk])), "global", t, s,
                             h, "ri=" + fmt(ri) + ";w2sq0=" + fmt(w2sq_base)));
      }
    }
  }

  if (heis) {
    double d_u = cc_distance(sc.model, identity(sc.model), u, sc.oracle);
    double w2 = std::sqrt(w2sq_base);
    out.push_back(report(kName, "|W2(mu0; mu1) - d(u; o)| <= tol d(u; o)",
                         "translation-w2", std::fabs(w2 - d_u),
                         sc.tol.ot_rel * d_u, 0.0, std::max(1.0, d_u),
                         "supports", kNan, kNan, kNan,
                         "w2=" + fmt(w2) + ";d=" + fmt(d_u)));

    // Entropy along the curve, quadratured over the translated lattice (the
    // translation moves each node, cell volumes are preserved), so the box
    // never truncates the moving support.
    const double vol = sc.chart.cell_volume();
    double z = 0.0;
    for (long long i = 0; i < sc.chart.size(); ++i) {
      z += gen(sc.chart.node(i));
    }
    z *= vol;
    auto ent_push = [&](double s) {
      Point us = {s * u[0], s * u[1], 0.0};
      Point inv = inverse(sc.model, us);
      double acc = 0.0;
      for (long long i = 0; i < sc.chart.size(); ++i) {
        Point y = multiply(sc.model, sc.chart.node(i), us);
        double q = gen(multiply(sc.model, y, inv)) / z;
        if (q > 0.0) acc += q * std::log(q);
      }
      return acc * vol;
    };
    double ep0 = ent_push(0.0);
    double ep1 = ent_push(1.0);
    double fisher_right = fisher_information(rho0, true);
    double csup = curvature_sup(sc.curvature);
    for (double s : sc.s_grid) {
      double eps_ = ent_push(s);
      out.push_back(report(kName, "Ent(mu_s) = Ent(mu0) along right translations",
                           "ent-constant s=" + fmt(s), std::fabs(eps_ - ep0),
                           1e-8, 0.0, 1.0, "global", kNan, s, kNan,
                           "ent=" + fmt(eps_)));
      out.push_back(report(kName,
                           "Ent(mu_s) <= (1-s)Ent(mu0) + s Ent(mu1) + w(s)",
                           "w-defect s=" + fmt(s), eps_,
                           (1.0 - s) * ep0 + s * ep1 + defect_w(s),
                           sc.tol.integral_rel, std::max(1.0, std::fabs(ep0)),
                           "global", kNan, s, kNan, "w=" + fmt(defect_w(s))));
      double dev = std::fabs(eps_ - ((1.0 - s) * ep0 + s * ep1));
      double bound = sigma_bound(d_u, s, csup, fisher_right);
      out.push_back(report(
          kName, "|Ent(mu_s) - linear| <= d sqrt(2 s (1-s) (C^2-1) F_right)",
          "sigma-bound s=" + fmt(s), dev, bound, 0.0, 1.0, "global", kNan, s,
          kNan,
          "C=" + fmt(csup) + ";fisher_right=" + fmt(fisher_right) +
              ";d=" + fmt(d_u)));
    }
  }
  return out;
}

void sort_reports(std::vector<CertReport>& reports) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const CertReport& a, const CertReport& b) {
                     return a.name < b.name;
                   });
}

namespace {

std::string json_escape(const std::string& s) {
  std::string r;
  r.reserve(s.size() + 2);
  for (char ch : s) {
    switch (ch) {
      case '"': r += "\\\""; break;
      case '\\': r += "\\\\"; break;
      case '\n': r += "\\n"; break;
      case '\t': r += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
          r += buf;
        } else {
          r += ch;
        }
    }
  }
  return r;
}

std::string json_number(double v) {
  if (std::isnan(v)) return "null";
  return format_double(v);
}

}  // namespace

std::string reports_to_json(const std::vector<CertReport>& reports) {
  std::ostringstream os;
  os << "[\n";
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const CertReport& r = reports[k];
    os << "  {\"name\":\"" << json_escape(r.name) << "\""
       << ",\"anchor\":\"" << json_escape(r.anchor) << "\""
       << ",\"case\":\"" << json_escape(r.case_id) << "\""
       << ",\"lhs\":" << json_number(r.lhs) << ",\"rhs\":" << json_number(r.rhs)
       << ",\"slack\":" << json_number(r.slack)
       << ",\"tol\":" << json_number(r.tol) << ",\"verdict\":\""
       << verdict_name(r.verdict) << "\",\"window\":\""
       << json_escape(r.window) << "\",\"t\":" << json_number(r.t)
       << ",\"s\":" << json_number(r.s) << ",\"h\":" << json_number(r.h)
       << ",\"extra\":\"" << json_escape(r.extra) << "\"}";
    os << (k + 1 < reports.size() ? ",\n" : "\n");
  }
  os << "]\n";
  return os.str();
}

std::string reports_to_csv(const std::vector<CertReport>& reports) {
  std::ostringstream os;
  os << "name,anchor,case,lhs,rhs,slack,tol,verdict,window,t,s,h,extra\n";
  auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  for (const CertReport& r : reports) {
    os << r.name << ',' << r.anchor << ',' << r.case_id << ','
       << format_double(r.lhs) << ',' << format_double(r.rhs) << ','
       << format_double(r.slack) << ',' << format_double(r.tol) << ','
       << verdict_name(r.verdict) << ',' << r.window << ',' << cell(r.t) << ','
       << cell(r.s) << ',' << cell(r.h) << ',' << r.extra << '\n';
  }
  return os.str();
}

}  // namespace cclab
