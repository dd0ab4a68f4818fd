#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sohb/fields.hpp"
#include "sohb/skew_expm.hpp"

using namespace sohb;

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

ScalarField sampled(const GridShape& g, const std::function<double(double, double, double)>& f) {
  ScalarField out(g);
  for (int i = 0; i < g.dims[0]; ++i) {
    for (int j = 0; j < g.dims[1]; ++j) {
      for (int k = 0; k < g.dims[2]; ++k) out.at(i, j, k) = f(g.h * i, g.h * j, g.h * k);
    }
  }
  return out;
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.data()) m = std::max(m, std::abs(v));
  return m;
}

RotationField constant_frames(const GridShape& g, const Mat& r) {
  MatrixField frames(g, static_cast<int>(r.rows()), static_cast<int>(r.cols()));
  for (int i = 0; i < g.dims[0]; ++i) {
    for (int j = 0; j < g.dims[1]; ++j) {
      for (int k = 0; k < g.dims[2]; ++k) frames.at(i, j, k) = r;
    }
  }
  return RotationField::checked(std::move(frames));
}

}  // namespace

TEST_CASE("finite differences against analytic derivatives") {
  const GridShape g = GridShape::cubic(24, kTwoPi);
  const ScalarField f = sampled(g, [](double x, double, double) { return std::sin(x); });

  const ScalarField d4 = fd_axis_derivative(f, 0, 4);
  const ScalarField d2 = fd_axis_derivative(f, 0, 2);
  double err4 = 0.0, err2 = 0.0;
  for (int i = 0; i < 24; ++i) {
    err4 = std::max(err4, std::abs(d4.at(i, 0, 0) - std::cos(g.h * i)));
    err2 = std::max(err2, std::abs(d2.at(i, 0, 0) - std::cos(g.h * i)));
  }
  CHECK(err4 <= 5e-4);
  CHECK(err2 <= 5e-2);
  CHECK(err4 < err2 / 10.0);

  // constant along an axis: derivative exactly zero
  const ScalarField dz = fd_axis_derivative(f, 2, 4);
  CHECK(max_abs(dz) == 0.0);

  const VectorField grad = fd_gradient(f, 5, 4);
  CHECK(grad.at(3, 1, 2)[0] == d4.at(3, 1, 2));
  CHECK(grad.at(3, 1, 2)[3] == 0.0);  // axes beyond the grid carry nothing
  CHECK(grad.at(3, 1, 2)[4] == 0.0);
}

TEST_CASE("wedge curl matches the analytic oracle") {
  const GridShape g = GridShape::cubic(24, kTwoPi);
  VectorField x(g, 3);
  for (int i = 0; i < 24; ++i) {
    for (int j = 0; j < 24; ++j) {
      for (int k = 0; k < 24; ++k) x.at(i, j, k)[0] = std::sin(g.h * j);  // X = (sin x2, 0, 0)
    }
  }
  const MatrixField curl = fd_wedge_curl(x, 4);
  double err = 0.0, asym = 0.0;
  for (int i = 0; i < 24; ++i) {
    for (int j = 0; j < 24; ++j) {
      const Mat m = curl.at(i, j, 0);
      err = std::max(err, std::abs(m(0, 1) - (-std::cos(g.h * j))));
      asym = std::max(asym, std::abs(m(0, 1) + m(1, 0)));
    }
  }
  CHECK(err <= 5e-4);
  CHECK(asym == 0.0);  // exact skewness by construction
}

TEST_CASE("stencil guards") {
  const GridShape tiny = GridShape::cubic(3, 1.0);
  const ScalarField f(tiny, 1.0);
  CHECK_THROWS_AS(fd_axis_derivative(f, 0, 4), std::invalid_argument);
  CHECK_NOTHROW(fd_axis_derivative(f, 0, 2));
  CHECK_THROWS_AS(fd_axis_derivative(f, 0, 3), std::invalid_argument);
  GridShape flat;
  flat.dims = {8, 8, 1};
  flat.h = 0.5;
  const ScalarField g2(flat, 2.0);
  CHECK(max_abs(fd_axis_derivative(g2, 2, 4)) == 0.0);
}

TEST_CASE("synthetic fields are valid and resolution-independent") {
  SyntheticFields synth;
  synth.n = 3;
  synth.seed = 5;
  const ScalarField rho12 = synth.rho(12);
  const ScalarField rho24 = synth.rho(24);
  for (double v : rho12.data()) CHECK(v > 0.0);
  // the same physical point appears at doubled indices
  CHECK(rho12.at(1, 2, 3) == doctest::Approx(rho24.at(2, 4, 6)).epsilon(1e-15));

  const RotationField th12 = synth.theta(12);
  const RotationField th24 = synth.theta(24);
  CHECK((Mat(th12.matrices().at(1, 2, 3)) - Mat(th24.matrices().at(2, 4, 6)))
            .cwiseAbs()
            .maxCoeff() <= 1e-13);
}

TEST_CASE("uniform state zeroes every derived tensor") {
  RngStream rng(7);
  const GridShape g = GridShape::cubic(8, kTwoPi);
  const Rotation r = haar_sample(rng, 3);
  const RotationField theta = constant_frames(g, r.matrix());
  const ScalarField rho(g, 1.5);
  const FieldBundle b = compute_bundle(rho, theta, 2.0);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      for (int k = 0; k < 8; ++k) {
        CHECK(Vec(b.r.at(i, j, k)).cwiseAbs().maxCoeff() == 0.0);
        CHECK(Vec(b.force.at(i, j, k)).cwiseAbs().maxCoeff() == 0.0);
        CHECK(Mat(b.w.at(i, j, k)).cwiseAbs().maxCoeff() == 0.0);
        CHECK(Mat(b.w_tilde.at(i, j, k)).cwiseAbs().maxCoeff() == 0.0);
        CHECK(Mat(b.a.at(i, j, k)).cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }
  const MatrixField rhs = theta_rhs(rho, theta, 2.0, OrientForm::orient3);
  CHECK(Mat(rhs.at(3, 3, 3)).cwiseAbs().maxCoeff() == 0.0);
  const ScalarField mass = mass_rhs(rho, theta, 2.0);
  CHECK(max_abs(mass) == 0.0);
}

TEST_CASE("bundle algebraic invariants at machine precision") {
  for (int n : {3, 4}) {
    SyntheticFields synth;
    synth.n = n;
    synth.seed = 11;
    const int grid = n == 3 ? 12 : 8;
    const ScalarField rho = synth.rho(grid);
    const RotationField theta = synth.theta(grid);
    const FieldBundle b = compute_bundle(rho, theta, 2.0);

    double delta_asym = 0.0, cyc = 0.0, a_om1 = 0.0, skewness = 0.0, repeated = 0.0;
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        for (int k = 0; k < grid; ++k) {
          for (int a = 0; a < n; ++a) {
            for (int bb = 0; bb < n; ++bb) {
              repeated = std::max(repeated, std::abs(b.delta.at(i, j, k, a, a, bb)));
              for (int c = 0; c < n; ++c) {
                const double v = b.delta.at(i, j, k, a, bb, c);
                delta_asym =
                    std::max(delta_asym, std::abs(v + b.delta.at(i, j, k, bb, a, c)));
                delta_asym =
                    std::max(delta_asym, std::abs(v + b.delta.at(i, j, k, a, c, bb)));
                cyc = std::max(cyc, std::abs(v - b.delta.at(i, j, k, bb, c, a)));
              }
            }
          }
          const Mat am = b.a.at(i, j, k);
          a_om1 = std::max(
              a_om1, (am * Vec(theta.matrices().at(i, j, k).col(0))).cwiseAbs().maxCoeff());
          auto asym = [](const Mat& m) {
            return (m + Mat(m.transpose())).cwiseAbs().maxCoeff();
          };
          skewness = std::max({skewness, asym(am), asym(b.w.at(i, j, k)),
                               asym(b.w_tilde.at(i, j, k))});
        }
      }
    }
    CHECK(delta_asym == 0.0);  // canonical construction
    CHECK(cyc == 0.0);
    CHECK(repeated == 0.0);
    CHECK(a_om1 <= 1e-12);
    CHECK(skewness <= 1e-12);
  }
}

TEST_CASE("alternate-form equivalence converges at fourth order") {
  SyntheticFields synth;
  synth.n = 3;
  synth.seed = 3;
  const int sizes[2] = {12, 24};
  const EquivalenceReport rep = check_equivalence(synth, 2.0, sizes);
  REQUIRE(rep.a_error.size() == 2);
  CHECK(rep.a_error[1] < rep.a_error[0]);
  CHECK(rep.a_order >= 3.5);
  CHECK(rep.rhs_order >= 3.5);
  // ratio between h and h/2 should approach 16
  CHECK(rep.a_error[0] / rep.a_error[1] >= 12.0);
}

TEST_CASE("omega component equations expand the matrix equation") {
  SyntheticFields synth;
  synth.n = 3;
  synth.seed = 13;
  const OmegaComponentReport coarse =
      omega_component_check(synth.rho(12), synth.theta(12), 2.0);
  const OmegaComponentReport fine =
      omega_component_check(synth.rho(24), synth.theta(24), 2.0);
  CHECK(fine.max_residual < coarse.max_residual);
  CHECK(std::log2(coarse.max_residual / fine.max_residual) >= 3.5);
  CHECK(std::log2(coarse.tangency_error / fine.tangency_error) >= 3.0);
}

TEST_CASE("mass equation on a divergence-free flux") {
  // rho Omega_1 constant: dt rho must vanish identically
  const GridShape g = GridShape::cubic(8, kTwoPi);
  const RotationField theta = constant_frames(g, Mat(Mat::Identity(3, 3)));
  const ScalarField rho(g, 2.0);
  CHECK(max_abs(mass_rhs(rho, theta, 1.0)) == 0.0);
}

TEST_CASE("csv dumps carry the grid header") {
  const GridShape g = GridShape::cubic(4, 1.0);
  const ScalarField f(g, 0.25);
  std::ostringstream os;
  write_scalar_csv(os, f);
  const std::string text = os.str();
  CHECK(text.find("# dims 4 4 4 h 0.25") != std::string::npos);
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == 2 + 64);

  MatrixField m(g, 2, 2);
  std::ostringstream os2;
  write_matrix_csv(os2, m);
  CHECK(os2.str().find("rows 2 cols 2 layout row-major") != std::string::npos);
}
