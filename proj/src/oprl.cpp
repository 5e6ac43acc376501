#include "cdk/oprl.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace cdk {

namespace {

constexpr double kOverflowGuard = 1e300;
constexpr double kDiagonalThreshold = 1e-8;

void check_overflow(const Complex& v) {
    if (!(std::abs(v.real()) < kOverflowGuard) ||
        !(std::abs(v.imag()) < kOverflowGuard))
        throw std::overflow_error("polynomial recurrence overflow");
}

/// Forward state of the coupled (p, q) recurrence at a point z.
struct RecurrenceState {
    Complex p_prev{0.0}, p{1.0};   // p_{-1}, p_0
    Complex q_prev{-1.0}, q{0.0};  // q_{-1}, q_0

    // advance from degree j to j+1 (needs a_j with the a_0 = 1 convention)
    void step(const JacobiParams& params, long j, Complex z) {
        double aj = j == 0 ? 1.0 : params.a(j);
        double aj1 = params.a(j + 1);
        double bj1 = params.b(j + 1);
        Complex pn = ((z - bj1) * p - aj * p_prev) / aj1;
        Complex qn = ((z - bj1) * q - aj * q_prev) / aj1;
        p_prev = p; p = pn;
        q_prev = q; q = qn;
        check_overflow(p);
        check_overflow(q);
    }
};

}  // namespace

JacobiParams::JacobiParams(std::string model_id,
                           std::function<double(long)> a,
                           std::function<double(long)> b, long horizon)
    : model_id_(std::move(model_id)), a_(std::move(a)), b_(std::move(b)),
      horizon_(horizon) {}

double JacobiParams::a(long n) const {
    if (n < 1 || n > horizon_)
        throw std::out_of_range("jacobi parameter horizon exceeded");
    double v = a_(n);
    if (!(v > 0.0))
        throw std::domain_error("jacobi parameter a_n must be positive");
    return v;
}

double JacobiParams::b(long n) const {
    if (n < 1 || n > horizon_)
        throw std::out_of_range("jacobi parameter horizon exceeded");
    return b_(n);
}

JacobiParams JacobiParams::free_jacobi() {
    return JacobiParams("free-jacobi", [](long) { return 1.0; },
                        [](long) { return 0.0; });
}

JacobiParams JacobiParams::chebyshev() {
    return JacobiParams("chebyshev",
                        [](long n) { return n == 1 ? 1.0 / std::sqrt(2.0) : 0.5; },
                        [](long) { return 0.0; });
}

JacobiParams JacobiParams::two_atom(double x1, double w1, double x2, double w2) {
    if (!(w1 > 0.0) || !(w2 > 0.0) || x1 == x2)
        throw std::invalid_argument("two_atom needs distinct atoms, positive weights");
    double total = w1 + w2;
    double mean = (w1 * x1 + w2 * x2) / total;
    double var = (w1 * (x1 - mean) * (x1 - mean) + w2 * (x2 - mean) * (x2 - mean)) / total;
    double sd = std::sqrt(var);
    double b2 = x1 + x2 - mean;
    return JacobiParams(
        "two-atom",
        [sd](long n) {
            if (n != 1)
                throw std::out_of_range("two-atom measure has a single a-coefficient");
            return sd;
        },
        [mean, b2](long n) { return n == 1 ? mean : b2; }, 2);
}

PolyPair eval_polys(const JacobiParams& params, long n, Complex z) {
    if (n < 0)
        throw std::invalid_argument("n must be nonnegative");
    PolyPair out;
    out.z = z;
    out.p.reserve(n + 1);
    out.q.reserve(n + 1);
    RecurrenceState s;
    out.p.push_back(s.p);
    out.q.push_back(s.q);
    for (long j = 0; j < n; ++j) {
        s.step(params, j, z);
        out.p.push_back(s.p);
        out.q.push_back(s.q);
    }
    return out;
}

Mat2C transfer_matrix_b(const JacobiParams& params, long n, Complex z) {
    if (n == 0)
        return Mat2C::identity();
    RecurrenceState s;
    for (long j = 0; j < n; ++j) s.step(params, j, z);
    double an = params.a(n);
    return {s.p, -s.q, an * s.p_prev, -an * s.q_prev};
}

Mat2C transfer_matrix(const JacobiParams& params, long n, Complex z) {
    return kSigma * transfer_matrix_b(params, n, z) * kSigma;
}

Mat2C cd_kernel(const JacobiParams& params, double L, Complex z, Complex w,
                KernelMode mode) {
    if (L < 0.0)
        throw std::invalid_argument("L must be nonnegative");
    if (mode == KernelMode::jform) {
        if (std::abs(std::conj(w) - z) < kDiagonalThreshold)
            return cd_kernel(params, L, z, w, KernelMode::sum);
        if (L != std::floor(L))
            throw std::invalid_argument("jform mode requires integer L");
        long n = static_cast<long>(L);
        Mat2C tz = transfer_matrix(params, n, z);
        Mat2C tw = transfer_matrix(params, n, w);
        return (tw.adjoint() * kJ * tz - kJ) / (std::conj(w) - z);
    }
    long n = static_cast<long>(std::floor(L));
    double frac = L - static_cast<double>(n);
    RecurrenceState sz, sw;
    Mat2C k;  // running sums in the [[pp, qp], [pq, qq]] layout
    for (long j = 0; j < n; ++j) {
        k.e11 += sz.p * std::conj(sw.p);
        k.e12 += sz.q * std::conj(sw.p);
        k.e21 += sz.p * std::conj(sw.q);
        k.e22 += sz.q * std::conj(sw.q);
        if (j + 1 < n || frac > 0.0) {
            sz.step(params, j, z);
            sw.step(params, j, w);
        }
    }
    if (frac > 0.0) {
        k.e11 += frac * sz.p * std::conj(sw.p);
        k.e12 += frac * sz.q * std::conj(sw.p);
        k.e21 += frac * sz.p * std::conj(sw.q);
        k.e22 += frac * sz.q * std::conj(sw.q);
    }
    return k;
}

Complex cd_kernel_scalar(const JacobiParams& params, double L, Complex z,
                         Complex w) {
    long n = static_cast<long>(std::floor(L));
    double frac = L - static_cast<double>(n);
    RecurrenceState sz, sw;
    Complex k = 0.0;
    for (long j = 0; j < n; ++j) {
        k += sz.p * std::conj(sw.p);
        if (j + 1 < n || frac > 0.0) {
            sz.step(params, j, z);
            sw.step(params, j, w);
        }
    }
    if (frac > 0.0)
        k += frac * sz.p * std::conj(sw.p);
    return k;
}

double tau_scale(const JacobiParams& params, double xi, double L) {
    return std::real(cd_kernel(params, L, xi, xi).trace());
}

Mat2C interp_m(const JacobiParams& params, double L, double xi, Complex z) {
    Mat2C k = cd_kernel(params, L, z, xi);
    return Mat2C::identity() + (z - xi) * (kJ * k);
}

namespace {

struct Tridiag {
    std::vector<double> diag;     // b_1..b_n
    std::vector<double> offsq;    // a_1^2..a_{n-1}^2
    double lo, hi;                // Gershgorin bounds
};

Tridiag build_tridiag(const JacobiParams& params, long n) {
    Tridiag t;
    t.diag.resize(n);
    t.offsq.resize(n > 0 ? n - 1 : 0);
    double maxa = 0.0, maxb = 0.0;
    for (long i = 0; i < n; ++i) {
        t.diag[i] = params.b(i + 1);
        maxb = std::max(maxb, std::abs(t.diag[i]));
        if (i + 1 < n) {
            double a = params.a(i + 1);
            t.offsq[i] = a * a;
            maxa = std::max(maxa, a);
        }
    }
    double r = maxb + 2.0 * maxa;
    t.lo = -r;
    t.hi = r;
    return t;
}

// number of eigenvalues strictly below x (Sturm / LDL pivot count)
long sturm_count(const Tridiag& t, double x) {
    long count = 0;
    double q = 1.0;
    const size_t n = t.diag.size();
    for (size_t i = 0; i < n; ++i) {
        double coupling = i == 0 ? 0.0 : t.offsq[i - 1] / q;
        q = t.diag[i] - x - coupling;
        if (q == 0.0)
            q = -1e-300;
        if (q < 0.0)
            ++count;
    }
    return count;
}

// k-th smallest eigenvalue, 0-based, bracketed by bisection
double eig_kth(const Tridiag& t, long k) {
    double lo = t.lo, hi = t.hi;
    const double tol = 1e-13 * (t.hi - t.lo);
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (sturm_count(t, mid) >= k + 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Newton polish of a bisection zero of p_n, derivative by the differentiated
// recurrence; safeguarded so it never leaves the bisection bracket scale.
double polish_zero(const JacobiParams& params, long n, double x, double guard) {
    for (int iter = 0; iter < 3; ++iter) {
        double p_prev = 0.0, p = 1.0, d_prev = 0.0, d = 0.0;
        for (long j = 0; j < n; ++j) {
            double aj = j == 0 ? 1.0 : params.a(j);
            double aj1 = params.a(j + 1);
            double bj1 = params.b(j + 1);
            double pn = ((x - bj1) * p - aj * p_prev) / aj1;
            double dn = ((x - bj1) * d + p - aj * d_prev) / aj1;
            p_prev = p; p = pn;
            d_prev = d; d = dn;
        }
        if (d == 0.0)
            return x;
        double step = p / d;
        if (!(std::abs(step) < guard))
            return x;
        x -= step;
    }
    return x;
}

}  // namespace

ZeroWindow zeros_near(const JacobiParams& params, long n, double xi, long count) {
    if (n < 1 || count < 1)
        throw std::invalid_argument("zeros_near requires n >= 1, count >= 1");
    Tridiag t = build_tridiag(params, n);
    long below = sturm_count(t, xi);  // zeros strictly below xi
    ZeroWindow w;
    double guard = 1e-9 * (t.hi - t.lo);
    long lo_idx = std::max<long>(0, below - count);
    for (long k = lo_idx; k < below; ++k)
        w.below.push_back(polish_zero(params, n, eig_kth(t, k), guard));
    w.truncated_below = below < count;
    long hi_idx = std::min<long>(n, below + count);
    for (long k = below; k < hi_idx; ++k)
        w.above.push_back(polish_zero(params, n, eig_kth(t, k), guard));
    w.truncated_above = n - below < count;
    return w;
}

std::vector<double> all_zeros(const JacobiParams& params, long n) {
    Tridiag t = build_tridiag(params, n);
    double guard = 1e-9 * (t.hi - t.lo);
    std::vector<double> out(n);
    for (long k = 0; k < n; ++k)
        out[k] = polish_zero(params, n, eig_kth(t, k), guard);
    return out;
}

double subordinacy_ratio(const JacobiParams& params, double xi, long n) {
    if (n < 1)
        throw std::invalid_argument("n must be >= 1");
    double p_prev = 0.0, p = 1.0, q_prev = -1.0, q = 0.0;
    double sp = 0.0, sq = 0.0;
    for (long j = 0; j < n; ++j) {
        sp += p * p;
        sq += q * q;
        double aj = j == 0 ? 1.0 : params.a(j);
        double aj1 = params.a(j + 1);
        double bj1 = params.b(j + 1);
        double pn = ((xi - bj1) * p - aj * p_prev) / aj1;
        double qn = ((xi - bj1) * q - aj * q_prev) / aj1;
        p_prev = p; p = pn;
        q_prev = q; q = qn;
        // rescale so exponentially growing solutions stay representable;
        // early contributions underflow out of the (dominated) sums
        double mag = std::max(std::abs(p), std::abs(q));
        if (mag > 1e100) {
            const double s = 1e-100;
            p *= s; p_prev *= s; q *= s; q_prev *= s;
            sp *= s * s; sq *= s * s;
        }
    }
    return sp / (sp + sq);
}

}  // namespace cdk
