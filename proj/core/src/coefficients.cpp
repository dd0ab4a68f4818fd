#include "sohb/coefficients.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "sohb/errors.hpp"
#include "sohb/number_format.hpp"
#include "sohb/weyl.hpp"

namespace sohb {

namespace {

constexpr double kRouteTol = 1e-8;

struct WeylIntegrals {
  // (2pi)^-p integrals against u_n of: E, C1 E, C2 E, C3 E, C1 C2 E,
  // where E = exp(kappa C1) and Ck = C_n^(k).
  double i0, i1, i2, i3, i12;
};

WeylIntegrals fused_integrals(int n, double kappa, int m) {
  const bool odd = n % 2 == 1;
  auto eval = [=](const double* c, const double* /*angles*/, int p, double* out) {
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (int j = 0; j < p; ++j) {
      const double cj = c[j];
      const double c2j = 2.0 * cj * cj - 1.0;        // cos 2t
      const double c3j = (4.0 * cj * cj - 3.0) * cj;  // cos 3t
      s1 += cj;
      s2 += c2j;
      s3 += c3j;
    }
    double k1 = 2.0 * s1, k2 = 2.0 * s2, k3 = 2.0 * s3;
    if (odd) {
      k1 += 1.0;
      k2 += 1.0;
      k3 += 1.0;
    }
    const double e = std::exp(kappa * k1);
    out[0] = e;
    out[1] = k1 * e;
    out[2] = k2 * e;
    out[3] = k3 * e;
    out[4] = k1 * k2 * e;
  };
  const auto r = detail::integrate_many(n, m, 5, eval);
  return WeylIntegrals{r[0], r[1], r[2], r[3], r[4]};
}

WeylIntegrals converged_fused(int n, double kappa, double tol) {
  const int p = n / 2;
  if (p >= 5) {
    // tensor grids are unaffordable; integrate each factor by the Monte
    // Carlo fallback (caller chooses a tolerance the MC budget can meet)
    auto e1 = [=](const TorusPoint& th) { return std::exp(kappa * c_fn(n, 1, th)); };
    auto with_c = [=](int k) {
      return [=](const TorusPoint& th) { return c_fn(n, k, th) * std::exp(kappa * c_fn(n, 1, th)); };
    };
    WeylIntegrals w;
    w.i0 = converged_integral(n, e1, tol);
    w.i1 = converged_integral(n, with_c(1), tol);
    w.i2 = converged_integral(n, with_c(2), tol);
    w.i3 = converged_integral(n, with_c(3), tol);
    w.i12 = converged_integral(
        n,
        [=](const TorusPoint& th) {
          return c_fn(n, 1, th) * c_fn(n, 2, th) * std::exp(kappa * c_fn(n, 1, th));
        },
        tol);
    return w;
  }
  const int m_max = p <= 3 ? 1024 : 128;
  WeylIntegrals prev = fused_integrals(n, kappa, 16);
  for (int m = 32; m <= m_max; m *= 2) {
    const WeylIntegrals cur = fused_integrals(n, kappa, m);
    auto ok = [&](double a, double b) { return std::abs(a - b) < tol * (1.0 + std::abs(a)); };
    if (ok(cur.i0, prev.i0) && ok(cur.i1, prev.i1) && ok(cur.i2, prev.i2) &&
        ok(cur.i3, prev.i3) && ok(cur.i12, prev.i12)) {
      return cur;
    }
    prev = cur;
  }
  throw NoConvergenceError("coefficients: Weyl quadrature did not converge");
}

void require_coeff_args(int n, double kappa) {
  if (n < 3) throw std::invalid_argument("coefficients: n must be >= 3");
  if (!(kappa >= 0)) throw std::invalid_argument("coefficients: kappa must be >= 0");
}

double c3_of(double kappa) {
  return kappa > 0 ? 1.0 / (2.0 * kappa) : std::numeric_limits<double>::infinity();
}

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

// Adaptive 1-D Gauss-Kronrod on [0, 2pi]; the independent route for n = 3.
double gk_integral(const std::function<double(double)>& f) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 15>::integrate(f, 0.0, 2.0 * M_PI, 12, 1e-13);
}

}  // namespace

std::string to_string(CoeffRoute route) {
  switch (route) {
    case CoeffRoute::weyl: return "weyl";
    case CoeffRoute::trace_moments: return "trace_moments";
    case CoeffRoute::closed_form_n3: return "closed_form_n3";
  }
  return "?";
}

void check_table(const CoefficientTable& t) {
  std::ostringstream bad;
  if (!(t.c1 >= -1e-10 && t.c1 < 1.0)) bad << " c1=" << t.c1 << " outside [0,1)";
  if (!(t.Z >= 1.0 - 1e-12)) bad << " Z=" << t.Z << " below 1";
  if (t.kappa > 0) {
    if (rel_diff(t.c3, 1.0 / (2.0 * t.kappa)) > 1e-12) bad << " c3 != 1/(2 kappa)";
  } else if (!std::isinf(t.c3)) {
    bad << " c3 at kappa=0 must be the +inf sentinel";
  }
  const double c2_rel = -(t.C3 - t.C4 / t.n) / t.C2;
  const double c4_rel = t.C4 / (4.0 * t.C2);
  if (std::abs(t.c2 - c2_rel) > kRouteTol * (1.0 + std::abs(t.c2))) {
    bad << " constants relation for c2 violated (" << t.c2 << " vs " << c2_rel << ")";
  }
  if (std::abs(t.c4 - c4_rel) > kRouteTol * (1.0 + std::abs(t.c4))) {
    bad << " constants relation for c4 violated (" << t.c4 << " vs " << c4_rel << ")";
  }
  if (!bad.str().empty()) {
    throw InternalMismatchError("CoefficientTable invariant violated:" + bad.str());
  }
}

double partition_function(int n, double kappa, double tol) {
  require_coeff_args(n, kappa);
  return converged_integral(
      n, [=](const TorusPoint& th) { return std::exp(kappa * c_fn(n, 1, th)); }, tol);
}

double trace_moment(int n, double kappa, int k, double tol) {
  require_coeff_args(n, kappa);
  if (k < 1 || k > 3) throw std::invalid_argument("trace_moment: k must be in {1,2,3}");
  const double z = partition_function(n, kappa, tol);
  const double num = converged_integral(
      n,
      [=](const TorusPoint& th) {
        return c_fn(n, k, th) / n * std::exp(kappa * c_fn(n, 1, th));
      },
      tol);
  return num / z;
}

double trace_moment_12(int n, double kappa, double tol) {
  require_coeff_args(n, kappa);
  const double z = partition_function(n, kappa, tol);
  const double num = converged_integral(
      n,
      [=](const TorusPoint& th) {
        return c_fn(n, 1, th) * c_fn(n, 2, th) / (static_cast<double>(n) * n) *
               std::exp(kappa * c_fn(n, 1, th));
      },
      tol);
  return num / z;
}

CoefficientTable coefficients_weyl(int n, double kappa, double tol) {
  require_coeff_args(n, kappa);
  const WeylIntegrals w = converged_fused(n, kappa, tol);
  const double den = w.i0 - w.i2 / n;

  CoefficientTable t;
  t.n = n;
  t.kappa = kappa;
  t.route = CoeffRoute::weyl;
  t.Z = w.i0;
  t.c1 = w.i1 / (n * w.i0);
  t.c2 = (2.0 * w.i3 - n * w.i12 + (n * n - 2.0) * w.i1) /
         (n * (n - 2.0) * (n + 2.0) * den);
  t.c3 = c3_of(kappa);
  t.c4 = (w.i3 - 2.0 * w.i12 / n + w.i1) / (2.0 * (n - 2.0) * (n + 2.0) * den);
  t.C2 = (1.0 - w.i2 / (n * w.i0)) / (n - 1.0);
  t.C3 = (w.i12 / (static_cast<double>(n) * n) - w.i1 / n) / ((n - 1.0) * w.i0);
  t.C4 = 2.0 * n / ((n - 1.0) * (n - 2.0) * (n + 2.0)) *
         (w.i3 / n - 2.0 * w.i12 / (static_cast<double>(n) * n) + w.i1 / n) / w.i0;
  check_table(t);
  return t;
}

CoefficientTable coefficients_trace_moments(int n, double kappa, double tol) {
  require_coeff_args(n, kappa);
  const double m1 = trace_moment(n, kappa, 1, tol);
  const double m2 = trace_moment(n, kappa, 2, tol);
  const double m3 = trace_moment(n, kappa, 3, tol);
  const double m12 = trace_moment_12(n, kappa, tol);

  CoefficientTable t;
  t.n = n;
  t.kappa = kappa;
  t.route = CoeffRoute::trace_moments;
  t.Z = partition_function(n, kappa, tol);
  t.c1 = m1;
  t.c3 = c3_of(kappa);
  t.C2 = (1.0 - m2) / (n - 1.0);
  t.C3 = (m12 - m1) / (n - 1.0);
  t.C4 = 2.0 * n / ((n - 1.0) * (n - 2.0) * (n + 2.0)) * (m3 - 2.0 * m12 + m1);
  t.c2 = -(t.C3 - t.C4 / n) / t.C2;
  t.c4 = t.C4 / (4.0 * t.C2);

  // the displayed trace-moment forms must reproduce the constants relation
  const double c2_direct =
      (2.0 * m3 - n * n * m12 + (n * n - 2.0) * m1) / ((n - 2.0) * (n + 2.0) * (1.0 - m2));
  const double c4_direct =
      n * (m3 - 2.0 * m12 + m1) / (2.0 * (n - 2.0) * (n + 2.0) * (1.0 - m2));
  if (std::abs(t.c2 - c2_direct) > kRouteTol * (1.0 + std::abs(t.c2)) ||
      std::abs(t.c4 - c4_direct) > kRouteTol * (1.0 + std::abs(t.c4))) {
    std::ostringstream os;
    os << "coefficients_trace_moments: in-route forms disagree (c2 " << t.c2 << " vs "
       << c2_direct << ", c4 " << t.c4 << " vs " << c4_direct << ")";
    throw InternalMismatchError(os.str());
  }
  check_table(t);
  return t;
}

CoefficientTable closed_form_n3(double kappa) {
  if (!(kappa > 0)) throw std::invalid_argument("closed_form_n3: kappa must be > 0");
  auto e = [=](double t) { return std::exp(kappa * (1.0 + 2.0 * std::cos(t))); };
  auto s2 = [](double t) {
    const double s = std::sin(t / 2);
    return s * s;
  };
  auto s4c2 = [](double t) {
    const double s = std::sin(t / 2), c = std::cos(t / 2);
    return s * s * s * s * c * c;
  };

  const double den1 = gk_integral([&](double t) { return e(t) * s2(t); });
  const double num1 = gk_integral([&](double t) { return (1.0 + 2.0 * std::cos(t)) * e(t) * s2(t); });
  const double den24 = gk_integral([&](double t) { return e(t) * s4c2(t); });
  const double num2m4 = gk_integral([&](double t) { return (2.0 + 3.0 * std::cos(t)) * e(t) * s4c2(t); });
  const double num4 = gk_integral([&](double t) { return (1.0 - std::cos(t)) * e(t) * s4c2(t); });

  CoefficientTable t;
  t.n = 3;
  t.kappa = kappa;
  t.route = CoeffRoute::closed_form_n3;
  t.c1 = num1 / (3.0 * den1);
  const double c2_minus_c4 = num2m4 / (5.0 * den24);
  t.c4 = num4 / (5.0 * den24);
  t.c2 = c2_minus_c4 + t.c4;
  t.c3 = c3_of(kappa);
  t.Z = den1 / M_PI;  // u_3 = 1 - cos = 2 sin^2(t/2)

  // intermediate constants from the same adaptive-quadrature family,
  // weighted by u_3
  auto u3 = [](double t) { return 1.0 - std::cos(t); };
  auto ck = [](int k, double t) { return 1.0 + 2.0 * std::cos(k * t); };
  const double iw = 2.0 * den1;
  const double m1 = gk_integral([&](double t) { return ck(1, t) * e(t) * u3(t); }) / (3.0 * iw);
  const double m2 = gk_integral([&](double t) { return ck(2, t) * e(t) * u3(t); }) / (3.0 * iw);
  const double m3 = gk_integral([&](double t) { return ck(3, t) * e(t) * u3(t); }) / (3.0 * iw);
  const double m12 =
      gk_integral([&](double t) { return ck(1, t) * ck(2, t) * e(t) * u3(t); }) / (9.0 * iw);
  t.C2 = (1.0 - m2) / 2.0;
  t.C3 = (m12 - m1) / 2.0;
  t.C4 = (6.0 / 10.0) * (m3 - 2.0 * m12 + m1);
  check_table(t);
  return t;
}

double max_route_discrepancy(std::initializer_list<CoefficientTable> tables) {
  double worst = 0.0;
  for (auto a = tables.begin(); a != tables.end(); ++a) {
    for (auto b = std::next(a); b != tables.end(); ++b) {
      worst = std::max(worst, rel_diff(a->c1, b->c1));
      worst = std::max(worst, rel_diff(a->c2, b->c2));
      if (std::isfinite(a->c3) && std::isfinite(b->c3)) {
        worst = std::max(worst, rel_diff(a->c3, b->c3));
      }
      worst = std::max(worst, rel_diff(a->c4, b->c4));
    }
  }
  return worst;
}

std::string coefficient_csv_header(bool with_discrepancy) {
  std::string h = "n,kappa,c1,c2,c3,c4,C2,C3,C4,Z,route";
  if (with_discrepancy) h += ",max_discrepancy";
  return h;
}

std::string coefficient_csv_row(const CoefficientTable& t, std::optional<double> discrepancy) {
  std::ostringstream os;
  os << t.n << ',' << fp17(t.kappa) << ',' << fp17(t.c1) << ',' << fp17(t.c2) << ','
     << fp17(t.c3) << ',' << fp17(t.c4) << ',' << fp17(t.C2) << ',' << fp17(t.C3) << ','
     << fp17(t.C4) << ',' << fp17(t.Z) << ',' << to_string(t.route);
  if (discrepancy) os << ',' << fp17(*discrepancy);
  return os.str();
}

}  // namespace sohb
