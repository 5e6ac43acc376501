#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cdk/mat2.hpp"
#include "cdk/universality.hpp"

namespace cdk {

/// Verblunsky coefficient sequence (alpha_n in the open unit disk, indexed
/// from 0), exposed as a deterministic random-access generator.
class VerblunskyParams {
  public:
    VerblunskyParams(std::string model_id, std::function<Complex(long)> alpha,
                     long horizon = 1'000'000);

    /// alpha_n for n >= 0; throws past the horizon or when |alpha_n| >= 1.
    Complex alpha(long n) const;
    long horizon() const { return horizon_; }
    const std::string& model_id() const { return model_id_; }

    static VerblunskyParams free_opuc();  // alpha == 0, Lebesgue measure
    static VerblunskyParams constant(Complex a);
    static VerblunskyParams list(std::vector<Complex> values);
    /// "opuc-free" | "opuc-constant:<re>[,<im>]" |
    /// "opuc-list:<re>[,<im>];<re>[,<im>];..."
    static VerblunskyParams by_id(const std::string& id);

  private:
    std::string model_id_;
    std::function<Complex(long)> alpha_;
    long horizon_;
};

/// One Szego step A(alpha, z) = (1/rho) [[z, -conj(alpha)], [-alpha z, 1]],
/// rho = sqrt(1 - |alpha|^2).
Mat2C szego_step(Complex alpha, Complex z);

/// S(n,z) = A(alpha_{n-1}, z) ... A(alpha_0, z) together with phi_n and
/// phi_n*. The polynomials are advanced by their own two-term recursion
/// (phi_{n+1} = (z phi_n - conj(alpha_n) phi_n*)/rho_n); the matrix entries
/// satisfy phi_n = S11 + S12 and phi_n* = S21 + S22 as a cross-check.
struct SzegoResult {
    Mat2C s;
    Complex phi, phi_star;
};
SzegoResult szego_eval(const VerblunskyParams& alphas, long n, Complex z);

/// CD kernel on the circle: (phi_n*(z) conj(phi_n*(w)) - phi_n(z)
/// conj(phi_n(w)))/(1 - z conj(w)); |1 - z conj(w)| < 1e-8 routes to the
/// direct sum over phi_j.
Complex opuc_kernel(const VerblunskyParams& alphas, long n, Complex z, Complex w);

/// Caratheodory function F on the unit disk (Re F >= 0, F(0) = 1) with an
/// optional closed-form boundary density; otherwise the boundary value of
/// Re F is taken as a radial limit.
class CaratheodoryModel {
  public:
    CaratheodoryModel(std::string id, std::function<Complex(Complex)> f,
                      std::function<double(double)> g = nullptr);

    Complex eval(Complex z) const;  // requires |z| < 1
    /// g_mu(xi) = lim_{r->1} Re F(r e^{i xi}).
    double boundary_re(double xi) const;
    const std::string& id() const { return id_; }

    static CaratheodoryModel lebesgue();  // F == 1
    static CaratheodoryModel discrete(std::vector<double> angles,
                                      std::vector<double> weights);

  private:
    std::string id_;
    std::function<Complex(Complex)> f_;
    std::function<double(double)> g_;
};

/// Half-plane embedding T(n,z) = e^{-inz/2} C^{-1} swap S(n, e^{iz}) swap C
/// with C the Cayley matrix: a j-monotonic entire family, real unimodular on
/// the real axis, whose Weyl limit is i F(e^{iz}).
Mat2C embed_transfer(const VerblunskyParams& alphas, long n, Complex z);
/// The single factor T(n+1) relative to T(n) (up to phase bookkeeping):
/// e^{-iz/2} C^{-1} swap A(alpha_n, e^{iz}) swap C.
Mat2C embed_one_step(const VerblunskyParams& alphas, long n, Complex z);

/// Matrix CD kernel of the embedded family, (T(n,w)* j T(n,z) - j)/(conj(w)
/// - z); near the diagonal set conj(w) = z it is evaluated as
/// -T(w)* j dT/dz via an exact forward-mode product derivative.
Mat2C opuc_matrix_kernel(const VerblunskyParams& alphas, long n, Complex z,
                         Complex w);

/// Rescaled circle kernel e^{-in(z-conj(w))/(2 s)} k_n(e^{i(xi+z/s)},
/// e^{i(xi+w/s)})/k_n with s = g k_n, k_n = k_n(e^{i xi}, e^{i xi}), against
/// the target sin((conj(w)-z)/2)/((conj(w)-z)/2) (1 on the diagonal).
ScaledTable opuc_universality(
    const VerblunskyParams& alphas, double xi, double g, long n,
    const std::vector<Complex>& points = default_grid_points());

}  // namespace cdk
