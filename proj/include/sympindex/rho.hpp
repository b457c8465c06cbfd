#pragma once

#include <string>

#include "sympindex/core.hpp"
#include "sympindex/factor.hpp"
#include "sympindex/forms.hpp"
#include "sympindex/spectral.hpp"

namespace sympindex {

enum class CircleMap { Rho, Polar, Chat };

inline std::string circle_map_name(CircleMap m) {
  switch (m) {
    case CircleMap::Rho: return "rho";
    case CircleMap::Polar: return "polar";
    case CircleMap::Chat: return "chat";
  }
  return "?";
}

// Spectral circle map: (-1)^{m^-/2} times the product over unit-circle
// eigenvalue clusters of lambda^{p}, where p counts the positive eigenvalues
// of the Krein form  G = i F* Omega0 F  on the generalized eigenspace frame F.
// (p is half of the positive count of the associated real symmetric form, so
// the half-power in the product is an integer power of lambda and no branch
// choice arises.)  m^- is the total algebraic multiplicity of the negative
// real eigenvalues.
inline Complex rho_spectral(const Mat& A, const Tolerances& tol = {}) {
  const int n = static_cast<int>(A.rows()) / 2;
  const Spectrum sp = cluster_spectrum(A, tol);
  const Mat W = Omega0mat(n);

  int m_minus = 0;
  Complex product(1.0, 0.0);
  for (const auto& c : sp.clusters) {
    switch (c.kind) {
      case ClusterKind::MinusOne:
      case ClusterKind::RealNegative:
        m_minus += c.multiplicity;
        break;
      case ClusterKind::Circle: {
        const CMat F = generalized_eigenspace(A, c.center, tol, c.multiplicity, 2.0 * c.width);
        const CMat G = Complex(0, 1) * (F.adjoint() * W.cast<Complex>() * F);
        const Signature sig = form_signature(G, tol);
        if (sig.zero > 0)
          throw tolerance_error("Krein form degenerate on a unit-circle eigenspace");
        product *= std::pow(c.center, sig.positive);
        break;
      }
      default:
        break;  // other real / quadruple eigenvalues contribute nothing
    }
  }
  if (m_minus % 2 != 0)
    throw tolerance_error("odd total multiplicity of negative real eigenvalues");
  const double sign = ((m_minus / 2) % 2 == 0) ? 1.0 : -1.0;
  Complex out = sign * product;
  const double mod = std::abs(out);
  if (mod <= 0.0) throw tolerance_error("spectral circle map vanished");
  return out / mod;
}

// Normalized complex determinant of the unitary polar factor.
inline Complex rho_polar(const Mat& A) {
  const Mat U = polar_unitary(A);
  const Complex z = det_complex(U, 1e-6);
  const double mod = std::abs(z);
  if (mod <= 0.0) throw tolerance_error("polar circle map vanished");
  return z / mod;
}

// Normalized complex determinant of the J0-linear part (everywhere invertible
// on the symplectic group).
inline Complex rho_chat(const Mat& A) {
  const Complex z = det_complex(clinear_part(A), 1e-6);
  const double mod = std::abs(z);
  if (mod <= 0.0) throw tolerance_error("normalized-determinant circle map vanished");
  return z / mod;
}

inline Complex circle_map_value(const Mat& A, CircleMap m, const Tolerances& tol = {}) {
  switch (m) {
    case CircleMap::Rho: return rho_spectral(A, tol);
    case CircleMap::Polar: return rho_polar(A);
    case CircleMap::Chat: return rho_chat(A);
  }
  throw invalid_input_error("unknown circle map");
}

}  // namespace sympindex
