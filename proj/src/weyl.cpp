#include "cdk/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace cdk {

namespace {

constexpr double kHerglotzSlack = 1e-12;

Complex upper_half_root(Complex z) {
    // root of m^2 + z m + 1 = 0 with Im m > 0 (equivalently |m| < 1 on C+)
    Complex s = std::sqrt(z * z - 4.0);
    Complex m1 = 0.5 * (-z + s);
    Complex m2 = 0.5 * (-z - s);
    return m1.imag() >= m2.imag() ? m1 : m2;
}

}  // namespace

ModelM::ModelM(std::string id, std::function<Complex(Complex)> eval,
               std::function<std::optional<BoundaryData>(double)> boundary,
               double stieltjes_mass)
    : id_(std::move(id)), eval_(std::move(eval)), boundary_(std::move(boundary)) {
    // Herglotz spot-check on a coarse grid
    for (double x : {-3.0, -0.7, 0.0, 1.3, 4.0}) {
        for (double y : {0.1, 1.0, 10.0}) {
            Complex v = eval_(Complex(x, y));
            if (v.imag() < -1e-9)
                throw std::domain_error("model is not Herglotz at spot-check grid");
        }
    }
    if (stieltjes_mass > 0.0) {
        Complex z(0.0, 1e6);
        if (std::abs(z * eval_(z) + stieltjes_mass) > 1e-3 * stieltjes_mass)
            throw std::domain_error("wrong branch: m(z) !~ -mass/z at large z");
    }
}

Complex ModelM::eval(Complex z) const {
    if (!(z.imag() > 0.0))
        throw std::domain_error("m is defined on the open upper half-plane");
    Complex v = eval_(z);
    if (v.imag() < -kHerglotzSlack)
        throw std::domain_error("model left the closed upper half-plane");
    return v;
}

std::optional<ModelM::BoundaryData> ModelM::boundary(double xi) const {
    if (!boundary_)
        return std::nullopt;
    return boundary_(xi);
}

ModelM ModelM::free_jacobi() {
    return ModelM(
        "free-jacobi", [](Complex z) { return upper_half_root(z); },
        [](double xi) -> std::optional<BoundaryData> {
            if (std::abs(xi) < 2.0) {
                double im = 0.5 * std::sqrt(4.0 - xi * xi);
                return BoundaryData{SpherePoint(Complex(-0.5 * xi, im)), im / M_PI};
            }
            double s = std::sqrt(xi * xi - 4.0);
            double eta = xi > 0.0 ? 0.5 * (-xi + s) : 0.5 * (-xi - s);
            return BoundaryData{SpherePoint(Complex(eta, 0.0)), 0.0};
        },
        1.0);
}

ModelM ModelM::chebyshev() {
    return ModelM(
        "chebyshev",
        [](Complex z) {
            // branch cut on [-1,1], sqrt(z^2-1) ~ z at infinity
            return -1.0 / (std::sqrt(z - 1.0) * std::sqrt(z + 1.0));
        },
        [](double xi) -> std::optional<BoundaryData> {
            if (std::abs(xi) < 1.0) {
                double im = 1.0 / std::sqrt(1.0 - xi * xi);
                return BoundaryData{SpherePoint(Complex(0.0, im)), im / M_PI};
            }
            return std::nullopt;
        },
        1.0);
}

ModelM ModelM::log_periodic() {
    const double c = 0.5 * M_PI * std::exp(-0.5 * M_PI);
    return ModelM("log-periodic", [c](Complex z) {
        return Complex(0.0, 1.0) *
               std::exp(c * std::sin(std::log(Complex(0.0, -1.0) * z)));
    });
}

ModelM ModelM::discrete(const std::vector<double>& atoms,
                        const std::vector<double>& weights) {
    if (atoms.size() != weights.size() || atoms.empty())
        throw std::invalid_argument("atoms/weights size mismatch");
    auto a = atoms;
    auto w = weights;
    return ModelM(
        "discrete",
        [a, w](Complex z) {
            Complex s = 0.0;
            for (size_t i = 0; i < a.size(); ++i) s += w[i] / (a[i] - z);
            return s;
        },
        [a](double xi) -> std::optional<BoundaryData> {
            for (double atom : a)
                if (atom == xi)
                    return BoundaryData{SpherePoint::infinity(), 0.0};
            return std::nullopt;
        },
        std::accumulate(w.begin(), w.end(), 0.0));
}

ModelM ModelM::mixture(const ModelM& m1, double c1, const ModelM& m2, double c2) {
    return ModelM(m1.id() + "+" + m2.id(),
                  [m1, m2, c1, c2](Complex z) {
                      return c1 * m1.eval(z) + c2 * m2.eval(z);
                  });
}

namespace {

/// Free half-line Schroedinger transfer family (V = 0, beta = 0):
/// T(L,z) = exp(L G_z) with the constant generator G_z = [[0,-z],[1,0]].
class FreeSchrodingerFamily : public TransferFamily {
  public:
    Mat2C transfer(double L, Complex z) const override {
        return expm_tracefree(Mat2C{0.0, -z, 1.0, 0.0} * Complex(L));
    }
    std::vector<double> schedule() const override {
        std::vector<double> s;
        for (double L = 1.0; L < 2.2e9; L *= 2.0) s.push_back(L);
        return s;
    }
};

}  // namespace

ModelM ModelM::by_id(const std::string& id) {
    if (id == "free-jacobi") return free_jacobi();
    if (id == "chebyshev") return chebyshev();
    if (id == "log-periodic") return log_periodic();
    if (id == "schrodinger-free") {
        // no closed-form convention is assumed; the value is produced by the
        // Weyl-disk limit of the free system
        auto family = std::make_shared<FreeSchrodingerFamily>();
        return ModelM("schrodinger-free", [family](Complex z) {
            return m_from_transfer(*family, z, 1e-10).value;
        });
    }
    if (id.rfind("discrete:", 0) == 0) {
        // discrete:x1:w1,x2:w2,...
        std::vector<double> atoms, weights;
        std::stringstream ss(id.substr(9));
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto colon = item.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("bad discrete model spec: " + id);
            atoms.push_back(std::stod(item.substr(0, colon)));
            weights.push_back(std::stod(item.substr(colon + 1)));
        }
        return discrete(atoms, weights);
    }
    throw std::invalid_argument("unknown model id: " + id);
}

bool WeylDisk::contains(const SpherePoint& p, double tol) const {
    if (half_plane) {
        if (p.is_infinite())
            return true;
        return side * std::imag((p.value() - point) * std::conj(tangent)) >=
               -tol * std::norm(tangent);
    }
    if (p.is_infinite())
        return false;
    return std::abs(p.value() - center) <= radius + tol;
}

WeylDisk weyl_disk(const Mat2C& t) {
    double scale2 = t.max_abs() * t.max_abs();
    if (std::abs(t.det() - 1.0) > 1e-8 * std::max(1.0, scale2))
        throw std::domain_error("non-unimodular transfer matrix");
    // adjugate: same Moebius action as the inverse. Applied projectively
    // without a determinant test: at large transfer scales the computed
    // determinant cancels catastrophically while the action stays accurate.
    Mat2C inv{t.e22, -t.e12, -t.e21, t.e11};
    auto apply = [&inv](const SpherePoint& p) {
        return SpherePoint(inv.e11 * p.v1() + inv.e12 * p.v2(),
                           inv.e21 * p.v1() + inv.e22 * p.v2());
    };

    SpherePoint b0 = apply(SpherePoint(Complex(0.0)));
    SpherePoint b1 = apply(SpherePoint(Complex(1.0)));
    SpherePoint binf = apply(SpherePoint::infinity());
    SpherePoint interior = apply(SpherePoint(Complex(0.0, 1.0)));

    const double kInfTol = 1e-12;
    std::vector<Complex> finite;
    for (const auto& p : {b0, b1, binf})
        if (!p.is_infinite(kInfTol))
            finite.push_back(p.value());

    WeylDisk d;
    if (finite.size() < 3) {
        // boundary through infinity: a line
        d.half_plane = true;
        d.point = finite.at(0);
        d.tangent = finite.at(1) - finite.at(0);
        d.tangent /= std::abs(d.tangent);
        double s = std::imag((interior.is_infinite() ? d.point + d.tangent * Complex(0, 1)
                                                     : interior.value() - d.point) *
                             std::conj(d.tangent));
        d.side = s >= 0.0 ? 1.0 : -1.0;
        return d;
    }

    Complex p1 = finite[0], u = finite[1] - finite[0], v = finite[2] - finite[0];
    // disk collapsed below floating-point resolution: report a point disk
    if (std::max(std::abs(u), std::abs(v)) <= 1e-14 * (1.0 + std::abs(p1))) {
        d.center = p1;
        d.radius = std::max(std::abs(u), std::abs(v));
        return d;
    }
    Complex den = std::conj(u) * v - u * std::conj(v);  // 4i * signed area
    double sep = std::max(std::abs(u), std::abs(v));
    // collinearity test scaled by the point separations, so tiny genuine
    // circles (den ~ radius^2) are not mistaken for lines
    if (std::abs(u) * std::abs(v) * std::abs(u - v) > 1e12 * std::abs(den) * sep) {
        d.half_plane = true;
        d.point = p1;
        d.tangent = std::abs(u) >= std::abs(v) ? u / std::abs(u) : v / std::abs(v);
        double s = interior.is_infinite()
                       ? 0.0
                       : std::imag((interior.value() - d.point) * std::conj(d.tangent));
        d.side = s >= 0.0 ? 1.0 : -1.0;
        return d;
    }

    d.center = p1 + (std::norm(u) * v - std::norm(v) * u) / den;
    d.radius = (std::abs(p1 - d.center) + std::abs(finite[1] - d.center) +
                std::abs(finite[2] - d.center)) / 3.0;
    return d;
}

MCertified m_from_transfer(const TransferFamily& family, Complex z, double tol) {
    if (!(z.imag() > 0.0))
        throw std::domain_error("m is defined on the open upper half-plane");
    double last_radius = std::numeric_limits<double>::infinity();
    for (double L : family.schedule()) {
        Mat2C t;
        try {
            t = family.transfer(L, z);
        } catch (const std::overflow_error&) {
            break;
        } catch (const std::out_of_range&) {
            break;
        }
        if (!std::isfinite(t.max_abs()))
            break;
        WeylDisk d = weyl_disk(t);
        if (d.half_plane)
            continue;
        last_radius = d.radius;
        if (d.radius < tol) {
            // roundoff allowance on top of the geometric radius
            double bound = d.radius + 1e-14 * (1.0 + std::abs(d.center));
            return {d.center, bound, L};
        }
    }
    throw LimitCircleStall(last_radius);
}

Mat2C JacobiTransferFamily::transfer(double L, Complex z) const {
    return transfer_matrix(params_, static_cast<long>(L), z);
}

std::vector<double> JacobiTransferFamily::schedule() const {
    std::vector<double> s;
    for (long n = 1; n <= params_.horizon(); n *= 2) {
        s.push_back(static_cast<double>(n));
        if (n > params_.horizon() / 2)
            break;
    }
    if (s.empty() || s.back() != static_cast<double>(params_.horizon()))
        s.push_back(static_cast<double>(params_.horizon()));
    return s;
}

std::vector<double> dyadic_schedule(int kmax) {
    std::vector<double> s;
    for (int k = 0; k <= kmax; ++k) s.push_back(std::ldexp(1.0, -k));
    return s;
}

BoundaryLimit boundary_limit(const ModelM& model, double xi,
                             const std::vector<double>& schedule, double tol,
                             double angle) {
    if (schedule.size() < 4)
        throw std::invalid_argument("schedule must have at least 4 points");
    for (size_t i = 1; i < schedule.size(); ++i)
        if (!(schedule[i] < schedule[i - 1]) || !(schedule[i] > 0.0))
            throw std::invalid_argument("schedule must decrease to 0");

    if (!(angle > 0.0) || !(angle < M_PI))
        throw std::invalid_argument("ray angle must lie in (0, pi)");
    Complex ray = std::polar(1.0, angle);
    BoundaryLimit out{SpherePoint(Complex(0.0)), 0.0, false, false, 0.0, {}};
    std::vector<SpherePoint> pts;
    for (double y : schedule) {
        Complex v = model.eval(xi + y * ray);
        out.samples.push_back(v);
        pts.emplace_back(v);
    }
    std::vector<double> diffs;
    for (size_t i = 1; i < pts.size(); ++i)
        diffs.push_back(chordal_distance(pts[i], pts[i - 1]));

    // geometric decay over the last 5 successive differences, final one < tol
    bool decays = true;
    size_t m = diffs.size();
    for (size_t i = m >= 5 ? m - 4 : 1; i < m; ++i)
        if (diffs[i] > 0.9 * diffs[i - 1] && diffs[i] > tol)
            decays = false;
    out.converged = decays && diffs.back() < tol;

    size_t tail = std::min<size_t>(8, pts.size());
    for (size_t i = pts.size() - tail; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            out.oscillation = std::max(out.oscillation,
                                       chordal_distance(pts[i], pts[j]));

    out.eta = pts.back();
    Complex last = out.samples.back();
    out.boundary_real = last.imag() < 1e-6 * (1.0 + std::norm(last));
    out.f_mu = out.boundary_real ? 0.0 : last.imag() / M_PI;
    return out;
}

double point_mass_mass(const ModelM& model, double xi, int kmax) {
    double v = 0.0;
    for (int k = 10; k <= kmax; ++k) {
        double eps = std::ldexp(1.0, -k);
        v = eps * model.eval(Complex(xi, eps)).imag();
    }
    return v;
}

}  // namespace cdk
