#include "cdk/mat2.hpp"

namespace cdk {

SpherePoint mobius_apply(const Mat2C& m, const SpherePoint& p) {
    if (std::abs(m.det()) < 1e-300)
        throw std::domain_error("singular matrix");
    return SpherePoint(m.e11 * p.v1() + m.e12 * p.v2(),
                       m.e21 * p.v1() + m.e22 * p.v2());
}

double chordal_distance(const SpherePoint& p, const SpherePoint& q) {
    return 2.0 * std::abs(p.v1() * q.v2() - p.v2() * q.v1());
}

std::array<double, 2> hermitian_eigenvalues(const Mat2C& h) {
    double mean = 0.5 * std::real(h.e11 + h.e22);
    double off = 0.5 * std::real(h.e11 - h.e22);
    double disc = std::sqrt(off * off + std::norm(h.e12));
    return {mean - disc, mean + disc};
}

JDefect j_defect(const Mat2C& t) {
    Mat2C x = (t.adjoint() * kJ * t - kJ) / Complex(0.0, 1.0);
    Mat2C h = (x + x.adjoint()) * 0.5;  // suppress roundoff asymmetry
    return {h, hermitian_eigenvalues(h)};
}

Mat2C expm_tracefree(const Mat2C& g) {
    // G^2 = -det(G) I for trace-free G, so exp(G) = c0 I + c1 G with
    // c0 = cos(sqrt(d)), c1 = sinc(sqrt(d)), d = det G. Both are entire even
    // functions of sqrt(d); use the power series near d = 0.
    Complex d = g.det();
    Complex c0, c1;
    if (std::abs(d) < 1e-8) {
        Complex term0 = 1.0, term1 = 1.0;
        c0 = 0.0;
        c1 = 0.0;
        for (int k = 0; k < 8; ++k) {
            c0 += term0;
            c1 += term1;
            term0 *= -d / double((2 * k + 1) * (2 * k + 2));
            term1 *= -d / double((2 * k + 2) * (2 * k + 3));
        }
    } else {
        Complex s = std::sqrt(d);
        c0 = std::cos(s);
        c1 = std::sin(s) / s;
    }
    Mat2C r = g * c1;
    r.e11 += c0;
    r.e22 += c0;
    return r;
}

}  // namespace cdk
