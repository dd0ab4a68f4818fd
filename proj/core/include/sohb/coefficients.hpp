#pragma once

#include <optional>
#include <string>

#include "sohb/son_core.hpp"

namespace sohb {

enum class CoeffRoute { weyl, trace_moments, closed_form_n3 };

std::string to_string(CoeffRoute route);

/// Hydrodynamic coefficients of the orientation model at concentration
/// kappa, together with the intermediate constants they derive from.
///
///   c1 = <Tr A / n>                       (order parameter / mass flux)
///   c2, c4                                (orientation transport weights)
///   c3 = 1/(2 kappa)                      (+inf sentinel at kappa = 0)
///   C2 = (1 - <Tr A^2 / n>)/(n-1)         (L(P) = C2 P)
///   C3, C4                                (B(P,Q) expansion constants)
///   Z                                     (partition function)
///
/// Brackets are averages under the weight exp(kappa Tr A) on SO(n).
struct CoefficientTable {
  int n = 0;
  double kappa = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
  double C2 = 0.0, C3 = 0.0, C4 = 0.0;
  double Z = 1.0;
  CoeffRoute route = CoeffRoute::weyl;
};

/// Validates c1 in [0,1), Z >= 1, c3 = 1/(2k), and the constants relation
/// c2 = -(C3 - C4/n)/C2, c4 = C4/(4 C2) within 1e-8 relative.
/// Throws InternalMismatchError on violation.
void check_table(const CoefficientTable& t);

/// Z = integral of exp(kappa Tr A) over SO(n) (normalized Haar).
double partition_function(int n, double kappa, double tol = 1e-10);

/// <Tr A^k / n> under the weight exp(kappa Tr A), k in {1, 2, 3}.
double trace_moment(int n, double kappa, int k, double tol = 1e-10);

/// <(Tr A / n)(Tr A^2 / n)> under the same weight (single bracket over the
/// product; needed by the c2/c4 numerators).
double trace_moment_12(int n, double kappa, double tol = 1e-10);

/// Coefficients assembled directly from the torus-integral forms
/// (numerators/denominators of the c1, c2, c4 displays).
CoefficientTable coefficients_weyl(int n, double kappa, double tol = 1e-10);

/// Coefficients assembled from scalar trace moments: C2, C3, C4 first, then
/// c2 = -(C3 - C4/n)/C2 and c4 = C4/(4 C2); the direct trace-moment forms
/// of c2 and c4 are evaluated as well and must agree within 1e-8 relative
/// (InternalMismatchError otherwise).
CoefficientTable coefficients_trace_moments(int n, double kappa, double tol = 1e-10);

/// n = 3 closed forms: four 1-D integrals over [0, 2pi] evaluated with
/// adaptive Gauss-Kronrod quadrature, a code path fully independent of the
/// tensor trapezoid rule. Requires kappa > 0.
CoefficientTable closed_form_n3(double kappa);

/// Largest relative disagreement across the c-columns of several tables.
double max_route_discrepancy(std::initializer_list<CoefficientTable> tables);

/// CSV emission: "n,kappa,c1,c2,c3,c4,C2,C3,C4,Z,route" rows, floats with
/// 17 significant digits; c3 prints as "inf" at kappa = 0.
std::string coefficient_csv_header(bool with_discrepancy = false);
std::string coefficient_csv_row(const CoefficientTable& t,
                                std::optional<double> discrepancy = std::nullopt);

}  // namespace sohb
