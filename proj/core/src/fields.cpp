#include "sohb/fields.hpp"

#include <cmath>
#include <ostream>

#include "sohb/coefficients.hpp"
#include "sohb/errors.hpp"
#include "sohb/number_format.hpp"
#include "sohb/rng.hpp"
#include "sohb/skew_expm.hpp"

namespace sohb {

GridShape GridShape::cubic(int nodes_per_axis, double box_edge) {
  if (nodes_per_axis < 1) throw std::invalid_argument("GridShape: need >= 1 node per axis");
  GridShape g;
  g.dims = {nodes_per_axis, nodes_per_axis, nodes_per_axis};
  g.h = box_edge / nodes_per_axis;
  return g;
}

RotationField RotationField::checked(MatrixField samples) {
  if (samples.rows() != samples.cols()) {
    throw DimensionMismatchError("RotationField: nodes must hold square matrices");
  }
  const auto& d = samples.grid().dims;
  for (int i = 0; i < d[0]; ++i) {
    for (int j = 0; j < d[1]; ++j) {
      for (int k = 0; k < d[2]; ++k) {
        if (!Rotation::is_special_orthogonal(samples.at(i, j, k))) {
          throw std::invalid_argument("RotationField: node is not a rotation");
        }
      }
    }
  }
  return RotationField(std::move(samples));
}

namespace {

struct Stencil {
  int reach;
  double c1, c2;  // out = (c1 (f+1 - f-1) + c2 (f+2 - f-2)) / h
};

Stencil stencil_for(int order) {
  if (order == 2) return {1, 1.0 / 2.0, 0.0};
  if (order == 4) return {2, 8.0 / 12.0, -1.0 / 12.0};
  throw std::invalid_argument("finite differences: order must be 2 or 4");
}

void check_axis(const GridShape& g, int axis, int order) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("finite differences: bad axis");
  const int d = g.dims[axis];
  if (d == 1) return;  // constant along this axis
  if (d < 2 * stencil_for(order).reach + 1) {
    throw std::invalid_argument("finite differences: grid too small for stencil");
  }
}

template <class Get, class Set>
void apply_stencil(const GridShape& g, int axis, int order, int comps,
                   const Get& get, const Set& set) {
  // get(i,j,k,c), set(i,j,k,c,value)
  check_axis(g, axis, order);
  const auto& d = g.dims;
  if (d[axis] == 1) return;  // outputs already zero
  const Stencil st = stencil_for(order);
  const double inv_h = 1.0 / g.h;
  auto wrap = [&](int v, int len) { return ((v % len) + len) % len; };
  for (int i = 0; i < d[0]; ++i) {
    for (int j = 0; j < d[1]; ++j) {
      for (int k = 0; k < d[2]; ++k) {
        int s[3] = {i, j, k};
        auto shifted = [&](int off, int c) {
          int t[3] = {s[0], s[1], s[2]};
          t[axis] = wrap(t[axis] + off, d[axis]);
          return get(t[0], t[1], t[2], c);
        };
        for (int c = 0; c < comps; ++c) {
          double v = st.c1 * (shifted(1, c) - shifted(-1, c));
          if (st.reach == 2) v += st.c2 * (shifted(2, c) - shifted(-2, c));
          set(i, j, k, c, v * inv_h);
        }
      }
    }
  }
}

}  // namespace

ScalarField fd_axis_derivative(const ScalarField& f, int axis, int order) {
  ScalarField out(f.grid(), 0.0);
  apply_stencil(
      f.grid(), axis, order, 1,
      [&](int i, int j, int k, int) { return f.at(i, j, k); },
      [&](int i, int j, int k, int, double v) { out.at(i, j, k) = v; });
  return out;
}

MatrixField fd_axis_derivative(const MatrixField& f, int axis, int order) {
  MatrixField out(f.grid(), f.rows(), f.cols());
  const int cols = f.cols();
  apply_stencil(
      f.grid(), axis, order, f.rows() * f.cols(),
      [&](int i, int j, int k, int c) { return f.at(i, j, k)(c / cols, c % cols); },
      [&](int i, int j, int k, int c, double v) { out.at(i, j, k)(c / cols, c % cols) = v; });
  return out;
}

VectorField fd_gradient(const ScalarField& f, int n, int order) {
  VectorField out(f.grid(), n);
  for (int axis = 0; axis < 3 && axis < n; ++axis) {
    const ScalarField d = fd_axis_derivative(f, axis, order);
    const auto& dims = f.grid().dims;
    for (int i = 0; i < dims[0]; ++i) {
      for (int j = 0; j < dims[1]; ++j) {
        for (int k = 0; k < dims[2]; ++k) out.at(i, j, k)[axis] = d.at(i, j, k);
      }
    }
  }
  return out;
}

ScalarField fd_divergence(const VectorField& x, int order) {
  ScalarField out(x.grid(), 0.0);
  for (int axis = 0; axis < 3 && axis < x.components(); ++axis) {
    apply_stencil(
        x.grid(), axis, order, 1,
        [&](int i, int j, int k, int) { return x.at(i, j, k)[axis]; },
        [&](int i, int j, int k, int, double v) { out.at(i, j, k) += v; });
  }
  return out;
}

MatrixField fd_wedge_curl(const VectorField& x, int order) {
  const int n = x.components();
  MatrixField out(x.grid(), n, n);
  // d_i X for live axes i < 3
  std::vector<VectorField> d(3, VectorField(x.grid(), n));
  for (int axis = 0; axis < 3; ++axis) {
    apply_stencil(
        x.grid(), axis, order, n,
        [&](int i, int j, int k, int c) { return x.at(i, j, k)[c]; },
        [&](int i, int j, int k, int c, double v) { d[axis].at(i, j, k)[c] = v; });
  }
  const auto& dims = x.grid().dims;
  for (int i = 0; i < dims[0]; ++i) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int k = 0; k < dims[2]; ++k) {
        auto m = out.at(i, j, k);
        for (int a = 0; a < n; ++a) {
          for (int b = a + 1; b < n; ++b) {
            const double da_xb = a < 3 ? d[a].at(i, j, k)[b] : 0.0;
            const double db_xa = b < 3 ? d[b].at(i, j, k)[a] : 0.0;
            const double v = da_xb - db_xa;
            m(a, b) = v;
            m(b, a) = -v;
          }
        }
      }
    }
  }
  return out;
}

namespace {

Mat wedge_raw(const Vec& x, const Vec& y) {
  const int n = static_cast<int>(x.size());
  Mat w = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double v = x[a] * y[b] - x[b] * y[a];
      w(a, b) = v;
      w(b, a) = -v;
    }
  }
  return w;
}

/// Per-node derivative data shared by the bundle and rhs evaluators.
struct ThetaDerivatives {
  std::array<MatrixField, 3> d;
  ThetaDerivatives(const RotationField& theta, int order)
      : d{fd_axis_derivative(theta.matrices(), 0, order),
          fd_axis_derivative(theta.matrices(), 1, order),
          fd_axis_derivative(theta.matrices(), 2, order)} {}
};

}  // namespace

FieldBundle compute_bundle(const ScalarField& rho, const RotationField& theta,
                           double kappa, int order) {
  if (!(rho.grid() == theta.grid())) {
    throw DimensionMismatchError("compute_bundle: grids differ");
  }
  if (!(kappa > 0)) throw std::invalid_argument("compute_bundle: kappa must be > 0 (c3)");
  const int n = theta.dim();
  const GridShape& g = rho.grid();
  const CoefficientTable coeff = coefficients_weyl(n, kappa);

  const ThetaDerivatives dth(theta, order);
  const VectorField grad_rho = fd_gradient(rho, n, order);

  FieldBundle out{VectorField(g, n), VectorField(g, n), MatrixField(g, n, n),
                  MatrixField(g, n, n), MatrixField(g, n, n), Rank3Field(g, n),
                  coeff.c2, coeff.c3, coeff.c4};

  std::vector<Mat> e_hat(n);
  Mat delta0(n, n);
  for (int gi = 0; gi < g.dims[0]; ++gi) {
    for (int gj = 0; gj < g.dims[1]; ++gj) {
      for (int gk = 0; gk < g.dims[2]; ++gk) {
        const auto th = theta.matrices().at(gi, gj, gk);
        const double rho_v = rho.at(gi, gj, gk);

        // div Omega_k = sum_m d_m Theta(m, k)
        Vec div_omega = Vec::Zero(n);
        for (int m = 0; m < 3 && m < n; ++m) {
          const auto dm = dth.d[m].at(gi, gj, gk);
          for (int k = 0; k < n; ++k) div_omega[k] += dm(m, k);
        }

        // r = sum_k (div Omega_k) Omega_k
        Vec r = Vec::Zero(n);
        for (int k = 0; k < n; ++k) r += div_omega[k] * th.col(k);
        out.r.at(gi, gj, gk) = r;

        // F = -c3 grad rho - c4 rho r
        const Vec f = -coeff.c3 * Vec(grad_rho.at(gi, gj, gk)) - coeff.c4 * rho_v * r;
        out.force.at(gi, gj, gk) = f;

        // nabla ^ Omega_1
        Mat curl1 = Mat::Zero(n, n);
        for (int a = 0; a < n; ++a) {
          for (int b = a + 1; b < n; ++b) {
            const double da = a < 3 ? dth.d[a].at(gi, gj, gk)(b, 0) : 0.0;
            const double db = b < 3 ? dth.d[b].at(gi, gj, gk)(a, 0) : 0.0;
            const double v = da - db;
            curl1(a, b) = v;
            curl1(b, a) = -v;
          }
        }

        const Vec omega1 = th.col(0);
        const Mat f_wedge = wedge_raw(f, omega1);
        out.w.at(gi, gj, gk) = f_wedge - coeff.c4 * rho_v * curl1;

        // E_i = Theta^T (Omega_i . grad) Theta, stored as its exact skew
        // part so the Delta algebra below is antisymmetric by construction
        for (int i = 0; i < n; ++i) {
          Mat di = Mat::Zero(n, n);
          for (int m = 0; m < 3 && m < n; ++m) {
            di += th(m, i) * Mat(dth.d[m].at(gi, gj, gk));
          }
          const Mat ei = th.transpose() * di;
          Mat eh = Mat::Zero(n, n);
          for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
              const double v = 0.5 * (ei(a, b) - ei(b, a));
              eh(a, b) = v;
              eh(b, a) = -v;
            }
          }
          e_hat[i] = std::move(eh);
        }

        // Delta_abc, canonically: evaluate sorted triples, fill by sign,
        // repeated indices exactly zero
        for (int a = 0; a < n; ++a) {
          for (int b = a + 1; b < n; ++b) {
            for (int c = b + 1; c < n; ++c) {
              const double v = e_hat[a](c, b) + e_hat[b](a, c) + e_hat[c](b, a);
              out.delta.at(gi, gj, gk, a, b, c) = v;
              out.delta.at(gi, gj, gk, b, c, a) = v;
              out.delta.at(gi, gj, gk, c, a, b) = v;
              out.delta.at(gi, gj, gk, a, c, b) = -v;
              out.delta.at(gi, gj, gk, b, a, c) = -v;
              out.delta.at(gi, gj, gk, c, b, a) = -v;
            }
          }
        }

        // A = Theta Delta_0.. Theta^T
        for (int k = 0; k < n; ++k) {
          for (int l = 0; l < n; ++l) delta0(k, l) = out.delta.at(gi, gj, gk, 0, k, l);
        }
        const Mat a_mat = th * delta0 * th.transpose();
        out.a.at(gi, gj, gk) = a_mat;

        out.w_tilde.at(gi, gj, gk) = f_wedge + coeff.c4 * rho_v * a_mat;
      }
    }
  }
  return out;
}

MatrixField theta_rhs(const ScalarField& rho, const RotationField& theta,
                      double kappa, OrientForm form, int order) {
  const int n = theta.dim();
  const GridShape& g = rho.grid();
  const FieldBundle bundle = compute_bundle(rho, theta, kappa, order);
  const ThetaDerivatives dth(theta, order);
  const double advect = form == OrientForm::orient3 ? bundle.c2 : bundle.c2 - bundle.c4;

  MatrixField out(g, n, n);
  for (int gi = 0; gi < g.dims[0]; ++gi) {
    for (int gj = 0; gj < g.dims[1]; ++gj) {
      for (int gk = 0; gk < g.dims[2]; ++gk) {
        const auto th = theta.matrices().at(gi, gj, gk);
        const double rho_v = rho.at(gi, gj, gk);
        if (!(rho_v > 0)) throw std::invalid_argument("theta_rhs: rho must be positive");
        Mat d0 = Mat::Zero(n, n);
        for (int m = 0; m < 3 && m < n; ++m) {
          d0 += th(m, 0) * Mat(dth.d[m].at(gi, gj, gk));
        }
        const auto w = form == OrientForm::orient3 ? bundle.w.at(gi, gj, gk)
                                                   : bundle.w_tilde.at(gi, gj, gk);
        out.at(gi, gj, gk) = (Mat(w) * th) / rho_v - advect * d0;
      }
    }
  }
  return out;
}

ScalarField mass_rhs(const ScalarField& rho, const RotationField& theta,
                     double kappa, int order) {
  const int n = theta.dim();
  const double c1 = coefficients_weyl(n, kappa).c1;
  VectorField flux(rho.grid(), n);
  const auto& dims = rho.grid().dims;
  for (int i = 0; i < dims[0]; ++i) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int k = 0; k < dims[2]; ++k) {
        flux.at(i, j, k) = c1 * rho.at(i, j, k) * Vec(theta.matrices().at(i, j, k).col(0));
      }
    }
  }
  ScalarField div = fd_divergence(flux, order);
  ScalarField out(rho.grid(), 0.0);
  for (int i = 0; i < dims[0]; ++i) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int k = 0; k < dims[2]; ++k) out.at(i, j, k) = -div.at(i, j, k);
    }
  }
  return out;
}

ScalarField SyntheticFields::rho(int nodes_per_axis) const {
  const GridShape g = GridShape::cubic(nodes_per_axis, box_edge);
  RngStream rng(seed);
  struct Mode {
    std::array<int, 3> k;
    double phase, amp;
  };
  std::vector<Mode> ms;
  for (int m = 0; m < modes; ++m) {
    Mode mo;
    do {
      // low wavenumbers keep the 4th-order regime visible on 12^3 grids
      for (auto& kk : mo.k) kk = static_cast<int>(rng.uniform_int(3)) - 1;
    } while (mo.k[0] == 0 && mo.k[1] == 0 && mo.k[2] == 0);
    mo.phase = 2.0 * M_PI * rng.uniform();
    mo.amp = rho_amplitude / modes;
    ms.push_back(mo);
  }
  ScalarField out(g, 1.0);
  const double scale = 2.0 * M_PI / box_edge;
  for (int i = 0; i < g.dims[0]; ++i) {
    for (int j = 0; j < g.dims[1]; ++j) {
      for (int k = 0; k < g.dims[2]; ++k) {
        const double x = g.h * i, y = g.h * j, z = g.h * k;
        double v = 1.0;
        for (const auto& mo : ms) {
          v += mo.amp * std::cos(scale * (mo.k[0] * x + mo.k[1] * y + mo.k[2] * z) + mo.phase);
        }
        out.at(i, j, k) = v;
      }
    }
  }
  return out;
}

RotationField SyntheticFields::theta(int nodes_per_axis) const {
  const GridShape g = GridShape::cubic(nodes_per_axis, box_edge);
  RngStream rng(seed + 0x517e);
  struct Mode {
    std::array<int, 3> k;
    double phase, amp;
    Mat skew;
  };
  std::vector<Mode> ms;
  for (int m = 0; m < modes; ++m) {
    Mode mo;
    do {
      for (auto& kk : mo.k) kk = static_cast<int>(rng.uniform_int(3)) - 1;
    } while (mo.k[0] == 0 && mo.k[1] == 0 && mo.k[2] == 0);
    mo.phase = 2.0 * M_PI * rng.uniform();
    mo.amp = skew_amplitude / modes;
    Mat s = Mat::Zero(n, n);
    double norm2 = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        const double v = rng.normal();
        s(a, b) = v;
        s(b, a) = -v;
        norm2 += 2.0 * v * v;
      }
    }
    mo.skew = s / std::sqrt(norm2);
    ms.push_back(mo);
  }
  MatrixField samples(g, n, n);
  const double scale = 2.0 * M_PI / box_edge;
  for (int i = 0; i < g.dims[0]; ++i) {
    for (int j = 0; j < g.dims[1]; ++j) {
      for (int k = 0; k < g.dims[2]; ++k) {
        const double x = g.h * i, y = g.h * j, z = g.h * k;
        Mat s = Mat::Zero(n, n);
        for (const auto& mo : ms) {
          s += mo.amp * std::cos(scale * (mo.k[0] * x + mo.k[1] * y + mo.k[2] * z) + mo.phase) *
               mo.skew;
        }
        samples.at(i, j, k) = expm(s);
      }
    }
  }
  return RotationField::checked(std::move(samples));
}

namespace {

double max_abs_diff(const MatrixField& a, const MatrixField& b) {
  double worst = 0.0;
  const auto& d = a.grid().dims;
  for (int i = 0; i < d[0]; ++i) {
    for (int j = 0; j < d[1]; ++j) {
      for (int k = 0; k < d[2]; ++k) {
        worst = std::max(worst, (Mat(a.at(i, j, k)) - Mat(b.at(i, j, k))).cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

/// Atilde Theta = -((nabla ^ Omega_1) Theta + (Omega_1 . grad) Theta).
MatrixField a_tilde_theta(const RotationField& theta, int order) {
  const int n = theta.dim();
  const GridShape& g = theta.grid();
  const ThetaDerivatives dth(theta, order);
  MatrixField out(g, n, n);
  for (int gi = 0; gi < g.dims[0]; ++gi) {
    for (int gj = 0; gj < g.dims[1]; ++gj) {
      for (int gk = 0; gk < g.dims[2]; ++gk) {
        const auto th = theta.matrices().at(gi, gj, gk);
        Mat curl1 = Mat::Zero(n, n);
        for (int a = 0; a < n; ++a) {
          for (int b = a + 1; b < n; ++b) {
            const double da = a < 3 ? dth.d[a].at(gi, gj, gk)(b, 0) : 0.0;
            const double db = b < 3 ? dth.d[b].at(gi, gj, gk)(a, 0) : 0.0;
            curl1(a, b) = da - db;
            curl1(b, a) = db - da;
          }
        }
        Mat d0 = Mat::Zero(n, n);
        for (int m = 0; m < 3 && m < n; ++m) d0 += th(m, 0) * Mat(dth.d[m].at(gi, gj, gk));
        out.at(gi, gj, gk) = -(curl1 * th + d0);
      }
    }
  }
  return out;
}

MatrixField a_theta(const FieldBundle& bundle, const RotationField& theta) {
  const int n = theta.dim();
  const GridShape& g = theta.grid();
  MatrixField out(g, n, n);
  for (int i = 0; i < g.dims[0]; ++i) {
    for (int j = 0; j < g.dims[1]; ++j) {
      for (int k = 0; k < g.dims[2]; ++k) {
        out.at(i, j, k) = Mat(bundle.a.at(i, j, k)) * theta.matrices().at(i, j, k);
      }
    }
  }
  return out;
}

}  // namespace

EquivalenceReport check_equivalence(const SyntheticFields& synth, double kappa,
                                    std::span<const int> grid_sizes, int order) {
  EquivalenceReport rep;
  for (int nsz : grid_sizes) {
    const ScalarField rho = synth.rho(nsz);
    const RotationField th = synth.theta(nsz);
    const FieldBundle bundle = compute_bundle(rho, th, kappa, order);
    rep.grid_sizes.push_back(nsz);
    rep.a_error.push_back(max_abs_diff(a_theta(bundle, th), a_tilde_theta(th, order)));
    rep.rhs_error.push_back(max_abs_diff(theta_rhs(rho, th, kappa, OrientForm::orient3, order),
                                         theta_rhs(rho, th, kappa, OrientForm::orient4, order)));
  }
  const std::size_t m = rep.grid_sizes.size();
  if (m >= 2) {
    rep.a_order = std::log2(rep.a_error[m - 2] / rep.a_error[m - 1]);
    rep.rhs_order = std::log2(rep.rhs_error[m - 2] / rep.rhs_error[m - 1]);
  }
  return rep;
}

OmegaComponentReport omega_component_check(const ScalarField& rho,
                                           const RotationField& theta,
                                           double kappa, int order) {
  const int n = theta.dim();
  const GridShape& g = rho.grid();
  const FieldBundle bundle = compute_bundle(rho, theta, kappa, order);
  const MatrixField lhs = theta_rhs(rho, theta, kappa, OrientForm::orient4, order);
  const ThetaDerivatives dth(theta, order);
  const VectorField grad_rho = fd_gradient(rho, n, order);
  const double c3 = bundle.c3, c4 = bundle.c4, adv = bundle.c2 - bundle.c4;

  OmegaComponentReport rep;
  std::vector<Mat> e_raw(n);
  for (int gi = 0; gi < g.dims[0]; ++gi) {
    for (int gj = 0; gj < g.dims[1]; ++gj) {
      for (int gk = 0; gk < g.dims[2]; ++gk) {
        const auto th = theta.matrices().at(gi, gj, gk);
        const double rv = rho.at(gi, gj, gk);
        Mat d0 = Mat::Zero(n, n);
        for (int m = 0; m < 3 && m < n; ++m) d0 += th(m, 0) * Mat(dth.d[m].at(gi, gj, gk));

        // the component equations evaluate delta(.) by its displayed cyclic
        // definition (raw directional derivatives), which differs from the
        // bundle's canonical Delta by the stencil error
        for (int i = 0; i < n; ++i) {
          Mat di = Mat::Zero(n, n);
          for (int m = 0; m < 3 && m < n; ++m) {
            di += th(m, i) * Mat(dth.d[m].at(gi, gj, gk));
          }
          e_raw[i] = th.transpose() * di;
        }
        auto delta_raw = [&](int a, int b, int c) {
          return e_raw[a](c, b) + e_raw[b](a, c) + e_raw[c](b, a);
        };

        Vec div_omega = Vec::Zero(n);
        for (int m = 0; m < 3 && m < n; ++m) {
          const auto dm = dth.d[m].at(gi, gj, gk);
          for (int k = 0; k < n; ++k) div_omega[k] += dm(m, k);
        }
        const Vec gr = grad_rho.at(gi, gj, gk);
        const Vec omega1 = th.col(0);

        for (int j = 0; j < n; ++j) {
          Vec rhs;
          if (j == 0) {
            const Vec p_perp = gr - omega1.dot(gr) * omega1;
            Vec sum = Vec::Zero(n);
            for (int k = 1; k < n; ++k) sum += div_omega[k] * th.col(k);
            rhs = (-c3 * p_perp - c4 * rv * sum) / rv - adv * d0.col(0);
          } else {
            const double omj_grad_rho = th.col(j).dot(gr);
            Vec sum = Vec::Zero(n);
            for (int k = 0; k < n; ++k) {
              if (k == 0 || k == j) continue;
              sum += delta_raw(0, j, k) * th.col(k);
            }
            rhs = ((c3 * omj_grad_rho + c4 * rv * div_omega[j]) * omega1 - c4 * rv * sum) / rv -
                  adv * d0.col(j);
          }
          const Vec lj = lhs.at(gi, gj, gk).col(j);
          rep.max_residual = std::max(rep.max_residual, (lj - rhs).cwiseAbs().maxCoeff());
        }

        const Mat t = Mat(lhs.at(gi, gj, gk)) * th.transpose();
        rep.tangency_error =
            std::max(rep.tangency_error, (0.5 * (t + Mat(t.transpose()))).cwiseAbs().maxCoeff());
      }
    }
  }
  return rep;
}

void write_scalar_csv(std::ostream& os, const ScalarField& f) {
  const auto& g = f.grid();
  os << "# dims " << g.dims[0] << ' ' << g.dims[1] << ' ' << g.dims[2] << " h " << fp17(g.h)
     << " values scalar\n";
  os << "i,j,k,value\n";
  for (int i = 0; i < g.dims[0]; ++i) {
    for (int j = 0; j < g.dims[1]; ++j) {
      for (int k = 0; k < g.dims[2]; ++k) {
        os << i << ',' << j << ',' << k << ',' << fp17(f.at(i, j, k)) << '\n';
      }
    }
  }
}

void write_matrix_csv(std::ostream& os, const MatrixField& f) {
  const auto& g = f.grid();
  os << "# dims " << g.dims[0] << ' ' << g.dims[1] << ' ' << g.dims[2] << " h " << fp17(g.h)
     << " rows " << f.rows() << " cols " << f.cols() << " layout row-major\n";
  os << "i,j,k,entries\n";
  for (int i = 0; i < g.dims[0]; ++i) {
    for (int j = 0; j < g.dims[1]; ++j) {
      for (int k = 0; k < g.dims[2]; ++k) {
        os << i << ',' << j << ',' << k;
        const auto m = f.at(i, j, k);
        for (int a = 0; a < f.rows(); ++a) {
          for (int b = 0; b < f.cols(); ++b) os << ',' << fp17(m(a, b));
        }
        os << '\n';
      }
    }
  }
}

}  // namespace sohb
