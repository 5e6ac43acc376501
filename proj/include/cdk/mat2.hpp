#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace cdk {

using Complex = std::complex<double>;

/// 2x2 complex matrix with value semantics. The universal carrier for
/// transfer matrices, kernels and Hamiltonians.
struct Mat2C {
    Complex e11{0.0}, e12{0.0}, e21{0.0}, e22{0.0};

    constexpr Mat2C() = default;
    constexpr Mat2C(Complex a, Complex b, Complex c, Complex d)
        : e11(a), e12(b), e21(c), e22(d) {}

    static constexpr Mat2C identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2C zero() { return {}; }

    Complex det() const { return e11 * e22 - e12 * e21; }
    Complex trace() const { return e11 + e22; }

    Mat2C adjoint() const {
        return {std::conj(e11), std::conj(e21), std::conj(e12), std::conj(e22)};
    }
    Mat2C transpose() const { return {e11, e21, e12, e22}; }

    Mat2C inverse() const {
        Complex d = det();
        if (std::abs(d) == 0.0)
            throw std::domain_error("singular matrix");
        return {e22 / d, -e12 / d, -e21 / d, e11 / d};
    }

    /// Largest entry modulus; the metric used for all sup-distances.
    double max_abs() const {
        return std::max(std::max(std::abs(e11), std::abs(e12)),
                        std::max(std::abs(e21), std::abs(e22)));
    }

    Mat2C operator+(const Mat2C& o) const {
        return {e11 + o.e11, e12 + o.e12, e21 + o.e21, e22 + o.e22};
    }
    Mat2C operator-(const Mat2C& o) const {
        return {e11 - o.e11, e12 - o.e12, e21 - o.e21, e22 - o.e22};
    }
    Mat2C operator*(const Mat2C& o) const {
        return {e11 * o.e11 + e12 * o.e21, e11 * o.e12 + e12 * o.e22,
                e21 * o.e11 + e22 * o.e21, e21 * o.e12 + e22 * o.e22};
    }
    Mat2C operator*(Complex s) const { return {e11 * s, e12 * s, e21 * s, e22 * s}; }
    Mat2C operator/(Complex s) const { return {e11 / s, e12 / s, e21 / s, e22 / s}; }
    Mat2C& operator+=(const Mat2C& o) {
        e11 += o.e11; e12 += o.e12; e21 += o.e21; e22 += o.e22;
        return *this;
    }
};

inline Mat2C operator*(Complex s, const Mat2C& m) { return m * s; }

// Signature and transform constants. The literature overloads one symbol for
// two different matrices; we keep them apart by role:
//   sigma  = diag(-1,1)   (Jacobi <-> canonical-system dictionary)
//   swap   = antidiag(1,1) (unit-circle embedding)
inline constexpr Mat2C kJ{0.0, -1.0, 1.0, 0.0};            // j
inline constexpr Mat2C kSignatureDisk{-1.0, 0.0, 0.0, 1.0};  // for the unit disk
inline constexpr Mat2C kSigma{-1.0, 0.0, 0.0, 1.0};
inline constexpr Mat2C kSwap{0.0, 1.0, 1.0, 0.0};
inline const Mat2C kCayley{1.0, Complex(0.0, -1.0), 1.0, Complex(0.0, 1.0)};

/// Point of the Riemann sphere stored as a unit-length projective pair
/// (v1, v2), interpreted as v1/v2 with (1,0) = infinity. Keeps eta = infinity
/// a first-class value.
class SpherePoint {
  public:
    SpherePoint(Complex v1, Complex v2) : v1_(v1), v2_(v2) { normalize(); }
    SpherePoint(Complex value) : v1_(value), v2_(1.0) { normalize(); }

    static SpherePoint infinity() { return SpherePoint(1.0, 0.0); }

    Complex v1() const { return v1_; }
    Complex v2() const { return v2_; }

    bool is_infinite(double tol = 1e-14) const { return std::abs(v2_) <= tol; }

    /// Affine value v1/v2; throws at infinity.
    Complex value() const {
        if (is_infinite())
            throw std::domain_error("sphere point at infinity");
        return v1_ / v2_;
    }

  private:
    void normalize() {
        double n = std::sqrt(std::norm(v1_) + std::norm(v2_));
        if (n == 0.0)
            throw std::invalid_argument("projective pair (0,0)");
        v1_ /= n;
        v2_ /= n;
        // fix the phase so equal points get equal representatives
        Complex pivot = std::abs(v2_) >= std::abs(v1_) ? v2_ : v1_;
        Complex phase = pivot / std::abs(pivot);
        v1_ /= phase;
        v2_ /= phase;
    }

    Complex v1_, v2_;
};

/// Moebius action of M on the sphere. Total: no division-by-zero failure mode.
SpherePoint mobius_apply(const Mat2C& m, const SpherePoint& p);

/// Chordal metric on the Riemann sphere, in [0,2]; 2|v1 u2 - v2 u1| for
/// unit-normalized representatives.
double chordal_distance(const SpherePoint& p, const SpherePoint& q);

/// Eigenvalues of a Hermitian 2x2 matrix, ascending.
std::array<double, 2> hermitian_eigenvalues(const Mat2C& h);

struct JDefect {
    Mat2C matrix;                       // (T* j T - j)/i, symmetrized
    std::array<double, 2> eigenvalues;  // ascending
};

/// j-form defect of a transfer matrix; both eigenvalues <= 0 characterizes
/// j-monotonicity in the upper half-plane.
JDefect j_defect(const Mat2C& t);

/// exp(G) for trace-free G, via cos/sinc closed form with a series branch at
/// the nilpotent point.
Mat2C expm_tracefree(const Mat2C& g);

}  // namespace cdk
