#include <random>

#include "cdk/mat2.hpp"
#include "doctest.h"

using namespace cdk;

namespace {

Mat2C random_unimodular(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    // real entries, determinant renormalized to 1
    Mat2C m{u(rng) + 2.0, u(rng), u(rng), u(rng) + 2.0};
    return m / std::sqrt(m.det());
}

}  // namespace

TEST_CASE("mobius identity and basic images") {
    SpherePoint i_pt(Complex(0.0, 1.0));
    CHECK(chordal_distance(mobius_apply(Mat2C::identity(), i_pt), i_pt) < 1e-15);

    // j maps 0 to infinity
    SpherePoint img = mobius_apply(kJ, SpherePoint(Complex(0.0)));
    CHECK(img.is_infinite());

    // Cayley transform sends i to 0
    SpherePoint c = mobius_apply(kCayley, i_pt);
    CHECK(chordal_distance(c, SpherePoint(Complex(0.0))) < 1e-15);
}

TEST_CASE("mobius rejects singular matrices") {
    Mat2C s{1.0, 2.0, 2.0, 4.0};
    CHECK_THROWS_AS(mobius_apply(s, SpherePoint(Complex(1.0))), std::domain_error);
}

TEST_CASE("chordal distance values") {
    SpherePoint zero{Complex(0.0)};
    CHECK(chordal_distance(zero, SpherePoint::infinity()) == doctest::Approx(2.0));
    SpherePoint i_pt(Complex(0.0, 1.0));
    CHECK(chordal_distance(i_pt, i_pt) == doctest::Approx(0.0));
    CHECK(chordal_distance(zero, SpherePoint(Complex(1.0))) ==
          doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("chordal triangle inequality on random triples") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int k = 0; k < 200; ++k) {
        SpherePoint p(Complex(u(rng), u(rng)));
        SpherePoint q(Complex(u(rng), u(rng)));
        SpherePoint r(Complex(u(rng), u(rng)));
        CHECK(chordal_distance(p, r) <=
              chordal_distance(p, q) + chordal_distance(q, r) + 1e-12);
    }
}

TEST_CASE("mobius composition law") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) {
        Mat2C m1 = random_unimodular(rng);
        Mat2C m2 = random_unimodular(rng);
        SpherePoint p(Complex(u(rng), u(rng)));
        SpherePoint lhs = mobius_apply(m1 * m2, p);
        SpherePoint rhs = mobius_apply(m1, mobius_apply(m2, p));
        CHECK(chordal_distance(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("j defect of identity and real unimodular matrices") {
    JDefect d = j_defect(Mat2C::identity());
    CHECK(d.matrix.max_abs() < 1e-15);
    CHECK(d.eigenvalues[0] == doctest::Approx(0.0));
    CHECK(d.eigenvalues[1] == doctest::Approx(0.0));

    std::mt19937 rng(42);
    for (int k = 0; k < 50; ++k) {
        Mat2C t = random_unimodular(rng);
        CHECK(j_defect(t).matrix.max_abs() < 1e-12);
    }
}

TEST_CASE("hermitian eigenvalues ascending") {
    Mat2C h{2.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 2.0};
    auto ev = hermitian_eigenvalues(h);
    CHECK(ev[0] == doctest::Approx(1.0));
    CHECK(ev[1] == doctest::Approx(3.0));
}

TEST_CASE("trace-free matrix exponential") {
    // nilpotent: exp = I + G
    Mat2C n{0.0, 1.0, 0.0, 0.0};
    Mat2C e = expm_tracefree(n);
    CHECK((e - (Mat2C::identity() + n)).max_abs() < 1e-15);

    // rotation generator: exp(theta j) = cos theta I + sin theta j
    double th = 0.7;
    Mat2C r = expm_tracefree(kJ * Complex(th));
    Mat2C expect = Mat2C::identity() * Complex(std::cos(th)) + kJ * Complex(std::sin(th));
    CHECK((r - expect).max_abs() < 1e-14);

    // group law exp(G) exp(-G) = I for complex generators
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 50; ++k) {
        Mat2C g{Complex(u(rng), u(rng)), Complex(u(rng), u(rng)),
                Complex(u(rng), u(rng)), Complex(0.0)};
        g.e22 = -g.e11;
        Mat2C p = expm_tracefree(g) * expm_tracefree(g * Complex(-1.0));
        CHECK((p - Mat2C::identity()).max_abs() < 1e-13);
        CHECK(std::abs(expm_tracefree(g).det() - 1.0) < 1e-13);
    }
}

TEST_CASE("sphere point normalization keeps infinity first-class") {
    SpherePoint inf = SpherePoint::infinity();
    CHECK(inf.is_infinite());
    CHECK_THROWS_AS(inf.value(), std::domain_error);
    SpherePoint big(Complex(1e10), Complex(1.0));
    CHECK(!big.is_infinite());
    SpherePoint same1(Complex(3.0, 4.0));
    SpherePoint same2(Complex(6.0, 8.0), Complex(2.0));
    CHECK(chordal_distance(same1, same2) < 1e-15);
}
