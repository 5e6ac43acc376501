#include "cdk/cansys.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdk {

namespace {

// 8-point Gauss-Legendre rule on [-1, 1]
constexpr int kGlPoints = 8;
constexpr double kGlNode[kGlPoints] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeight[kGlPoints] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

// generator of j T' = (-zA + B) T, i.e. T' = (z jA - jB) T; trace-free
Mat2C generator(const Mat2C& a, const Mat2C& b, Complex z) {
    return kJ * a * z - kJ * b;
}

Mat2C rk4_step(const Segment& seg, Complex z, double x, double h, const Mat2C& t) {
    auto deriv = [&](double xx, const Mat2C& tt) {
        return generator(seg.a_at(xx), seg.b_at(xx), z) * tt;
    };
    Mat2C k1 = deriv(x, t);
    Mat2C k2 = deriv(x + 0.5 * h, t + k1 * Complex(0.5 * h));
    Mat2C k3 = deriv(x + 0.5 * h, t + k2 * Complex(0.5 * h));
    Mat2C k4 = deriv(x + h, t + k3 * Complex(h));
    return t + (k1 + (k2 + k3) * Complex(2.0) + k4) * Complex(h / 6.0);
}

Mat2C rk4_run(const Segment& seg, Complex z, double x0, double x1, long steps,
              const Mat2C& t0) {
    Mat2C t = t0;
    double h = (x1 - x0) / double(steps);
    for (long i = 0; i < steps; ++i) t = rk4_step(seg, z, x0 + i * h, h, t);
    return t;
}

/// Transfer across [x0, x1] (local coordinates) of one segment applied to t0.
Mat2C advance(const Segment& seg, Complex z, double x0, double x1, const Mat2C& t0,
              double tol) {
    if (x1 <= x0)
        return t0;
    if (seg.constant)
        return expm_tracefree(generator(seg.a_const, seg.b_const, z) *
                              Complex(x1 - x0)) *
               t0;
    long steps = std::max<long>(4, long(std::ceil((x1 - x0) * 64.0)));
    Mat2C coarse = rk4_run(seg, z, x0, x1, steps, t0);
    for (int refine = 0; refine < 7; ++refine) {
        steps *= 2;
        Mat2C fine = rk4_run(seg, z, x0, x1, steps, t0);
        if ((fine - coarse).max_abs() <= tol * (1.0 + fine.max_abs()))
            return fine;
        coarse = fine;
    }
    throw std::runtime_error("integration step-size failure");
}

void check_real_symmetric(const Mat2C& m, const char* what) {
    double s = 1e-12 * (1.0 + m.max_abs());
    if (std::abs(m.e11.imag()) > s || std::abs(m.e22.imag()) > s ||
        std::abs(m.e12.imag()) > s || std::abs(m.e21.imag()) > s ||
        std::abs(m.e12 - m.e21) > s)
        throw std::invalid_argument(std::string(what) + " must be real symmetric");
}

}  // namespace

Segment Segment::const_seg(double length, Mat2C a, Mat2C b) {
    Segment s;
    s.length = length;
    s.constant = true;
    s.a_const = a;
    s.b_const = b;
    return s;
}

Segment Segment::smooth_seg(double length, std::function<Mat2C(double)> a,
                            std::function<Mat2C(double)> b) {
    Segment s;
    s.length = length;
    s.constant = false;
    s.a_fn = std::move(a);
    s.b_fn = b ? std::move(b) : [](double) { return Mat2C::zero(); };
    return s;
}

HamiltonianSystem::HamiltonianSystem(std::vector<Segment> segments, std::string id)
    : segments_(std::move(segments)), id_(std::move(id)) {
    if (segments_.empty())
        throw std::invalid_argument("empty segment list");
    double x = 0.0;
    for (const auto& seg : segments_) {
        if (!(seg.length > 0.0))
            throw std::invalid_argument("segment length must be positive");
        starts_.push_back(x);
        x += seg.length;
        for (int k = 0; k < 5; ++k) {
            double local = seg.length * (k + 0.5) / 5.0;
            Mat2C a = seg.a_at(local);
            check_real_symmetric(a, "A");
            check_real_symmetric(seg.b_at(local), "B");
            if (hermitian_eigenvalues(a)[0] < -1e-12 * (1.0 + a.max_abs()))
                throw std::invalid_argument("A must be positive semidefinite");
        }
    }
    horizon_ = x;
}

namespace {

size_t segment_index(const HamiltonianSystem& sys, double x) {
    const auto& st = sys.starts();
    auto it = std::upper_bound(st.begin(), st.end(), x);
    size_t i = size_t(it - st.begin());
    return i == 0 ? 0 : i - 1;
}

}  // namespace

Mat2C HamiltonianSystem::a_at(double x) const {
    size_t i = segment_index(*this, x);
    return segments_[i].a_at(x - starts_[i]);
}

Mat2C HamiltonianSystem::b_at(double x) const {
    size_t i = segment_index(*this, x);
    return segments_[i].b_at(x - starts_[i]);
}

HamiltonianSystem HamiltonianSystem::constant(Mat2C a, Mat2C b, double length) {
    return HamiltonianSystem({Segment::const_seg(length, a, b)}, "constant");
}

HamiltonianSystem HamiltonianSystem::jacobi_embedding(const JacobiParams& params,
                                                      double xi, long length) {
    PolyPair pp = eval_polys(params, length, Complex(xi));
    std::vector<Segment> segs;
    segs.reserve(length);
    for (long n = 0; n < length; ++n) {
        double p = pp.p[n].real(), q = pp.q[n].real();
        Mat2C h{p * p, p * q, p * q, q * q};
        segs.push_back(Segment::const_seg(1.0, h));
    }
    return HamiltonianSystem(std::move(segs), "jacobi:" + params.model_id());
}

HamiltonianSystem schrodinger_system(double v, double beta, double length) {
    double c = std::cos(beta), s = std::sin(beta);
    Mat2C a{s * s, -s * c, -s * c, c * c};
    Mat2C b{v * s * s - c * c, -s * c * (1.0 + v), -s * c * (1.0 + v),
            v * c * c - s * s};
    return HamiltonianSystem({Segment::const_seg(length, a, b)}, "schrodinger");
}

HamiltonianSystem schrodinger_system(std::function<double(double)> v, double beta,
                                     double length) {
    double c = std::cos(beta), s = std::sin(beta);
    Mat2C a{s * s, -s * c, -s * c, c * c};
    auto bf = [v, c, s](double x) {
        double vx = v(x);
        return Mat2C{vx * s * s - c * c, -s * c * (1.0 + vx), -s * c * (1.0 + vx),
                     vx * c * c - s * s};
    };
    return HamiltonianSystem(
        {Segment::smooth_seg(length, [a](double) { return a; }, bf)},
        "schrodinger");
}

PhiTheta schrodinger_solutions(const HamiltonianSystem& sys, double beta,
                               double x, Complex z) {
    double c = std::cos(beta), s = std::sin(beta);
    Mat2C rt{c, s, -s, c};  // R_beta transpose
    Mat2C u = rt * integrate_transfer(sys, x, z);
    return {u.e21, u.e22, u.e11, u.e12};
}

Mat2C integrate_transfer(const HamiltonianSystem& sys, double L, Complex z,
                         double tol) {
    if (L < 0.0 || L > sys.horizon() + 1e-12)
        throw std::out_of_range("length beyond system horizon");
    Mat2C t = Mat2C::identity();
    const auto& segs = sys.segments();
    const auto& starts = sys.starts();
    for (size_t i = 0; i < segs.size() && starts[i] < L; ++i) {
        double hi = std::min(L - starts[i], segs[i].length);
        t = advance(segs[i], z, 0.0, hi, t, tol);
    }
    return t;
}

namespace {

double panel_length(const Segment& seg, Complex z, Complex w) {
    double zmax = std::max(std::abs(z), std::abs(w));
    double hp = std::min(0.5, 1.0 / (1.0 + zmax));
    if (!seg.constant)
        hp = std::min(hp, 0.25);
    return hp;
}

}  // namespace

Mat2C cansys_kernel(const HamiltonianSystem& sys, double L, Complex z, Complex w,
                    double tol) {
    if (L < 0.0 || L > sys.horizon() + 1e-12)
        throw std::out_of_range("length beyond system horizon");
    Mat2C acc;
    Mat2C tz_start = Mat2C::identity(), tw_start = Mat2C::identity();
    const auto& segs = sys.segments();
    const auto& starts = sys.starts();
    for (size_t i = 0; i < segs.size() && starts[i] < L; ++i) {
        const Segment& seg = segs[i];
        double len = std::min(L - starts[i], seg.length);
        double hp = panel_length(seg, z, w);
        long panels = std::max<long>(1, long(std::ceil(len / hp)));
        double h = len / double(panels);
        // running transfers for smooth segments, stepped node to node
        Mat2C tz_run = tz_start, tw_run = tw_start;
        double xz_run = 0.0, xw_run = 0.0;
        for (long p = 0; p < panels; ++p) {
            double mid = (p + 0.5) * h;
            for (int q = 0; q < kGlPoints; ++q) {
                double x = mid + 0.5 * h * kGlNode[q];
                Mat2C tz, tw;
                if (seg.constant) {
                    tz = expm_tracefree(generator(seg.a_const, seg.b_const, z) *
                                        Complex(x)) *
                         tz_start;
                    tw = expm_tracefree(generator(seg.a_const, seg.b_const, w) *
                                        Complex(x)) *
                         tw_start;
                } else {
                    tz_run = advance(seg, z, xz_run, x, tz_run, tol);
                    xz_run = x;
                    tw_run = advance(seg, w, xw_run, x, tw_run, tol);
                    xw_run = x;
                    tz = tz_run;
                    tw = tw_run;
                }
                acc += tw.adjoint() * seg.a_at(x) * tz * Complex(0.5 * h * kGlWeight[q]);
            }
        }
        tz_start = advance(seg, z, 0.0, seg.length, tz_start, tol);
        tw_start = advance(seg, w, 0.0, seg.length, tw_start, tol);
    }
    return acc;
}

KernelEvaluator::KernelEvaluator(const HamiltonianSystem& sys, double tol)
    : sys_(sys), tol_(tol) {}

Mat2C KernelEvaluator::kernel(double L, Complex z, Complex w) const {
    return cansys_kernel(sys_, L, z, w, tol_);
}

Mat2C KernelEvaluator::transfer(double L, Complex z) const {
    return integrate_transfer(sys_, L, z, tol_);
}

Mat2C CanSysTransferFamily::transfer(double L, Complex z) const {
    return integrate_transfer(*sys_, L, z, tol_);
}

std::vector<double> CanSysTransferFamily::schedule() const {
    std::vector<double> s;
    double hz = sys_->horizon();
    for (double L = std::min(1.0, hz); L < hz; L *= 2.0) s.push_back(L);
    s.push_back(hz);
    return s;
}

PdbGauge::PdbGauge(const HamiltonianSystem& sys, double xi, double tol)
    : shifted_([&] {
          // shift the spectral parameter by xi: B -> B - xi A
          std::vector<Segment> segs;
          for (const auto& seg : sys.segments()) {
              if (seg.constant) {
                  segs.push_back(Segment::const_seg(
                      seg.length, seg.a_const,
                      seg.b_const - seg.a_const * Complex(xi)));
              } else {
                  auto af = seg.a_fn, bf = seg.b_fn;
                  segs.push_back(Segment::smooth_seg(
                      seg.length, af, [af, bf, xi](double x) {
                          return bf(x) - af(x) * Complex(xi);
                      }));
              }
          }
          return HamiltonianSystem(std::move(segs), sys.id() + ":pdb");
      }()),
      tol_(tol) {
    Mat2C t = Mat2C::identity();
    for (const auto& seg : shifted_.segments()) {
        checkpoints_.push_back(t);
        t = advance(seg, 0.0, 0.0, seg.length, t, tol_);
    }
}

Mat2C PdbGauge::t0(double x) const {
    size_t i = segment_index(shifted_, x);
    return advance(shifted_.segments()[i], 0.0, 0.0, x - shifted_.starts()[i],
                   checkpoints_[i], tol_);
}

Mat2C PdbGauge::h(double x) const {
    Mat2C t = t0(x);
    return t.adjoint() * shifted_.a_at(x) * t;
}

Mat2C PdbGauge::m(double x, Complex z) const {
    return t0(x).inverse() * integrate_transfer(shifted_, x, z, tol_);
}

Mat2C PdbGauge::h_integral(double L) const {
    // kernel of the shifted system at z = w = 0
    return cansys_kernel(shifted_, L, 0.0, 0.0, tol_);
}

TraceReparam trace_reparam(const HamiltonianSystem& sys) {
    struct SegTable {
        double start_a;                // cumulative trace at segment start
        double total;                  // trace integral over the segment
        bool constant = true;
        double tr = 0.0;               // constant case
        std::vector<double> cum;       // smooth case: cumulative on a grid
        double step = 0.0;
    };
    auto tables = std::make_shared<std::vector<SegTable>>();
    std::vector<Segment> out;
    double a0 = 0.0;
    for (const auto& seg : sys.segments()) {
        if (seg.b_at(0.5 * seg.length).max_abs() > 1e-12)
            throw std::invalid_argument("trace reparametrization requires B = 0");
        SegTable t;
        t.start_a = a0;
        t.constant = seg.constant;
        if (seg.constant) {
            t.tr = std::real(seg.a_const.trace());
            if (t.tr < 1e-14)
                throw std::domain_error("singular reparametrization segment");
            t.total = t.tr * seg.length;
            out.push_back(Segment::const_seg(t.total, seg.a_const / Complex(t.tr)));
        } else {
            long n = std::max<long>(64, long(seg.length * 256));
            t.step = seg.length / double(n);
            t.cum.resize(n + 1, 0.0);
            auto af = seg.a_fn;
            for (long k = 0; k < n; ++k) {
                // Simpson on each cell
                double x0 = k * t.step, x1 = x0 + t.step;
                double f0 = std::real(af(x0).trace());
                double fm = std::real(af(0.5 * (x0 + x1)).trace());
                double f1 = std::real(af(x1).trace());
                if (fm < 1e-14)
                    throw std::domain_error("singular reparametrization segment");
                t.cum[k + 1] = t.cum[k] + t.step * (f0 + 4.0 * fm + f1) / 6.0;
            }
            t.total = t.cum.back();
            // local inverse of the cumulative trace by monotone table lookup
            auto cum = std::make_shared<std::vector<double>>(t.cum);
            double step = t.step;
            auto inv = [cum, step](double s) {
                auto it = std::upper_bound(cum->begin(), cum->end(), s);
                size_t k = std::min(cum->size() - 1,
                                    size_t(std::max<long>(1, it - cum->begin())));
                double lo = (*cum)[k - 1], hi = (*cum)[k];
                double frac = hi > lo ? (s - lo) / (hi - lo) : 0.0;
                return (double(k - 1) + frac) * step;
            };
            out.push_back(Segment::smooth_seg(t.total, [af, inv](double s) {
                Mat2C a = af(inv(s));
                return a / a.trace();
            }));
        }
        a0 += t.total;
        tables->push_back(std::move(t));
    }

    auto starts = sys.starts();
    auto lengths = std::make_shared<std::vector<double>>();
    for (const auto& seg : sys.segments()) lengths->push_back(seg.length);
    auto starts_p = std::make_shared<std::vector<double>>(starts);
    auto a_map = [tables, starts_p, lengths](double L) {
        double acc = 0.0;
        for (size_t i = 0; i < tables->size(); ++i) {
            double lo = (*starts_p)[i];
            if (L <= lo)
                break;
            double local = std::min(L - lo, (*lengths)[i]);
            const SegTable& t = (*tables)[i];
            if (t.constant) {
                acc = t.start_a + t.tr * local;
            } else {
                double pos = local / t.step;
                size_t k = std::min(t.cum.size() - 2, size_t(pos));
                double frac = pos - double(k);
                acc = t.start_a + t.cum[k] + frac * (t.cum[k + 1] - t.cum[k]);
            }
        }
        return acc;
    };
    return {a_map, HamiltonianSystem(std::move(out), sys.id() + ":reparam")};
}

RingObjects ring_objects(const SpherePoint& eta) {
    RingObjects r{eta, 0.0, Mat2C::zero()};
    if (eta.is_infinite()) {
        r.hmat = Mat2C{0.0, 0.0, 0.0, 1.0};
        return r;
    }
    Complex e = eta.value();
    if (e.imag() < -1e-12)
        throw std::domain_error("eta must lie in the closed upper half-plane");
    double denom = 1.0 + std::norm(e);
    double re = e.real();
    r.hmat = Mat2C{1.0 / denom, -re / denom, -re / denom, std::norm(e) / denom};
    r.h = std::max(0.0, e.imag()) / denom;
    return r;
}

Mat2C RingObjects::m_ring(Complex z) const {
    return expm_tracefree(kJ * hmat * z);
}

Mat2C RingObjects::k_ring_t(double t, Complex z, Complex w) const {
    if (h == 0.0)
        return hmat * Complex(t);
    Complex d = std::conj(w) - z;
    Complex x = t * h * d;
    if (std::abs(x) < 1e-4) {
        // series of (cos(x)-1)/d and sin(x)/d to fourth order in x
        double th = t * h;
        Complex c1 = -0.5 * th * th * d * (1.0 - x * x / 12.0);
        Complex c2 = th * (1.0 - x * x / 6.0);
        return kJ * c1 + (hmat / Complex(h)) * c2;
    }
    return (kJ * (std::cos(x) - 1.0) + (hmat / Complex(h)) * std::sin(x)) / d;
}

HamiltonianSystem rescale_family(const HamiltonianSystem& sys, double r) {
    if (!(r >= 1.0))
        throw std::invalid_argument("rescale factor must be >= 1");
    std::vector<Segment> segs;
    for (const auto& seg : sys.segments()) {
        if (seg.constant) {
            segs.push_back(
                Segment::const_seg(seg.length / r, seg.a_const, seg.b_const));
        } else {
            auto af = seg.a_fn, bf = seg.b_fn;
            segs.push_back(Segment::smooth_seg(
                seg.length / r, [af, r](double x) { return af(r * x); },
                [bf, r](double x) { return bf(r * x); }));
        }
    }
    return HamiltonianSystem(std::move(segs), sys.id() + ":rescaled");
}

namespace {

Mat2C triangular(double a) { return Mat2C{1.0, a, 0.0, 1.0}; }

}  // namespace

Mat2C triangular_shift_kernel(const Mat2C& k, double a) {
    Mat2C t = triangular(a);
    return t.adjoint() * k * t;
}

HamiltonianSystem triangular_shift_system(const HamiltonianSystem& sys, double a) {
    Mat2C t = triangular(a);
    Mat2C tt = t.adjoint();
    std::vector<Segment> segs;
    for (const auto& seg : sys.segments()) {
        if (seg.constant) {
            segs.push_back(Segment::const_seg(seg.length, tt * seg.a_const * t,
                                              tt * seg.b_const * t));
        } else {
            auto af = seg.a_fn, bf = seg.b_fn;
            segs.push_back(Segment::smooth_seg(
                seg.length, [af, t, tt](double x) { return tt * af(x) * t; },
                [bf, t, tt](double x) { return tt * bf(x) * t; }));
        }
    }
    return HamiltonianSystem(std::move(segs), sys.id() + ":shifted");
}

SpherePoint triangular_shift_m(const SpherePoint& m, double a) {
    return mobius_apply(triangular(-a), m);
}

}  // namespace cdk
