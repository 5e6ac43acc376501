#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cdk/mat2.hpp"

namespace cdk {

/// Jacobi parameter sequence (a_n > 0, b_n real, indexed from 1), exposed as
/// a deterministic random-access generator up to a horizon.
class JacobiParams {
  public:
    JacobiParams(std::string model_id,
                 std::function<double(long)> a,
                 std::function<double(long)> b,
                 long horizon = 1'000'000);

    /// a_n for n >= 1; throws past the horizon.
    double a(long n) const;
    /// b_n for n >= 1; throws past the horizon.
    double b(long n) const;

    long horizon() const { return horizon_; }
    const std::string& model_id() const { return model_id_; }

    // built-in models
    static JacobiParams free_jacobi();
    static JacobiParams chebyshev();  // a_1 = 1/sqrt(2), a_n = 1/2, b = 0
    /// Two-atom measure w1 delta_{x1} + w2 delta_{x2} (weights summing to 1),
    /// closed-form coefficients: b_1 = mean, a_1 = stddev, b_2 = x1 + x2 - b_1.
    /// L^2 is two-dimensional, so a_2 does not exist (horizon 2, a capped at 1).
    static JacobiParams two_atom(double x1, double w1, double x2, double w2);

  private:
    std::string model_id_;
    std::function<double(long)> a_, b_;
    long horizon_;
};

/// First- and second-kind polynomial values p_0..p_n, q_0..q_n at a point.
struct PolyPair {
    std::vector<Complex> p, q;
    Complex z;
};

/// Three-term recurrence with p_{-1} = 0, q_{-1} = -1. An overflow guard
/// throws if any running value exceeds 1e300.
PolyPair eval_polys(const JacobiParams& params, long n, Complex z);

/// B(n,z) = A(a_n,b_n;z) ... A(a_1,b_1;z), entries [[p_n, -q_n],
/// [a_n p_{n-1}, -a_n q_{n-1}]]; B(0,z) = I.
Mat2C transfer_matrix_b(const JacobiParams& params, long n, Complex z);

/// T(n,z) = sigma B(n,z) sigma, the j-monotonic family sharing the Weyl
/// function of the measure.
Mat2C transfer_matrix(const JacobiParams& params, long n, Complex z);

enum class KernelMode { sum, jform };

/// Matrix CD kernel K_L(z,w). Sum mode accumulates four running sums in one
/// forward pass and applies the linear interpolation in L; jform mode
/// evaluates (T(n,w)* j T(n,z) - j)/(conj(w) - z) at integer L.
Mat2C cd_kernel(const JacobiParams& params, double L, Complex z, Complex w,
                KernelMode mode = KernelMode::sum);

/// Scalar CD kernel: (1,1) corner of the matrix kernel.
Complex cd_kernel_scalar(const JacobiParams& params, double L, Complex z,
                         Complex w);

/// tau_xi(L) = tr K_L(xi,xi); nondecreasing in L.
double tau_scale(const JacobiParams& params, double xi, double L);

/// M_L(z,xi) = I + (z-xi) j K_L(z,xi); at integer L equals
/// sigma B(n,xi)^{-1} B(n,z) sigma.
Mat2C interp_m(const JacobiParams& params, double L, double xi, Complex z);

/// Zeros of p_n nearest xi, labeled xi_{-1} < xi <= xi_0 (ties go to xi_0).
struct ZeroWindow {
    std::vector<double> below;  // xi_{-count} .. xi_{-1}, ascending
    std::vector<double> above;  // xi_0 .. xi_{count-1}, ascending
    bool truncated_below = false;
    bool truncated_above = false;
};

/// `count` zeros of p_n on each side of xi, via Sturm-sequence bisection on
/// the truncated Jacobi matrix.
ZeroWindow zeros_near(const JacobiParams& params, long n, double xi, long count);

/// All n zeros of p_n, ascending.
std::vector<double> all_zeros(const JacobiParams& params, long n);

/// Sum_{j<n} p_j(xi)^2 / Sum_{j<n} (p_j(xi)^2 + q_j(xi)^2), with internal
/// renormalization so exponentially growing solutions do not overflow.
double subordinacy_ratio(const JacobiParams& params, double xi, long n);

}  // namespace cdk
