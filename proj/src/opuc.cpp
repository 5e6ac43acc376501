#include "cdk/opuc.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cdk {

namespace {

const Complex kIm(0.0, 1.0);

Complex parse_complex(const std::string& s) {
    std::stringstream ss(s);
    double re = 0.0, im = 0.0;
    char comma = 0;
    ss >> re;
    if (ss.fail())
        throw std::invalid_argument("bad coefficient literal: " + s);
    if (ss >> comma) {
        if (comma != ',')
            throw std::invalid_argument("bad coefficient literal: " + s);
        ss >> im;
        if (ss.fail())
            throw std::invalid_argument("bad coefficient literal: " + s);
    }
    return Complex(re, im);
}

}  // namespace

VerblunskyParams::VerblunskyParams(std::string model_id,
                                   std::function<Complex(long)> alpha,
                                   long horizon)
    : model_id_(std::move(model_id)), alpha_(std::move(alpha)), horizon_(horizon) {}

Complex VerblunskyParams::alpha(long n) const {
    if (n < 0 || n >= horizon_)
        throw std::out_of_range("coefficient index beyond horizon");
    Complex a = alpha_(n);
    if (!(std::abs(a) < 1.0))
        throw std::domain_error("coefficient outside the open unit disk");
    return a;
}

VerblunskyParams VerblunskyParams::free_opuc() {
    return VerblunskyParams("opuc-free", [](long) { return Complex(0.0); });
}

VerblunskyParams VerblunskyParams::constant(Complex a) {
    std::stringstream id;
    id << "opuc-constant:" << a.real();
    if (a.imag() != 0.0)
        id << "," << a.imag();
    return VerblunskyParams(id.str(), [a](long) { return a; });
}

VerblunskyParams VerblunskyParams::list(std::vector<Complex> values) {
    long horizon = long(values.size());
    auto stored = std::make_shared<std::vector<Complex>>(std::move(values));
    return VerblunskyParams(
        "opuc-list", [stored](long n) { return (*stored)[size_t(n)]; }, horizon);
}

VerblunskyParams VerblunskyParams::by_id(const std::string& id) {
    if (id == "opuc-free")
        return free_opuc();
    const std::string ckey = "opuc-constant:", lkey = "opuc-list:";
    if (id.rfind(ckey, 0) == 0)
        return constant(parse_complex(id.substr(ckey.size())));
    if (id.rfind(lkey, 0) == 0) {
        std::vector<Complex> vals;
        std::stringstream ss(id.substr(lkey.size()));
        std::string item;
        while (std::getline(ss, item, ';')) vals.push_back(parse_complex(item));
        if (vals.empty())
            throw std::invalid_argument("empty coefficient list");
        return list(std::move(vals));
    }
    throw std::invalid_argument("unknown coefficient model: " + id);
}

Mat2C szego_step(Complex alpha, Complex z) {
    double rho = std::sqrt(1.0 - std::norm(alpha));
    return Mat2C{z, -std::conj(alpha), -alpha * z, 1.0} / Complex(rho);
}

SzegoResult szego_eval(const VerblunskyParams& alphas, long n, Complex z) {
    SzegoResult out{Mat2C::identity(), 1.0, 1.0};
    for (long k = 0; k < n; ++k) {
        Complex a = alphas.alpha(k);
        double rho = std::sqrt(1.0 - std::norm(a));
        out.s = szego_step(a, z) * out.s;
        Complex phi = (z * out.phi - std::conj(a) * out.phi_star) / rho;
        Complex phi_star = (out.phi_star - a * z * out.phi) / rho;
        out.phi = phi;
        out.phi_star = phi_star;
    }
    return out;
}

Complex opuc_kernel(const VerblunskyParams& alphas, long n, Complex z,
                    Complex w) {
    if (n < 1)
        throw std::invalid_argument("kernel needs n >= 1");
    Complex den = 1.0 - z * std::conj(w);
    if (std::abs(den) < 1e-8) {
        // direct sum over phi_j
        Complex acc = 0.0;
        Complex pz = 1.0, pz_star = 1.0, pw = 1.0, pw_star = 1.0;
        for (long k = 0; k < n; ++k) {
            acc += pz * std::conj(pw);
            Complex a = alphas.alpha(k);
            double rho = std::sqrt(1.0 - std::norm(a));
            Complex nz = (z * pz - std::conj(a) * pz_star) / rho;
            pz_star = (pz_star - a * z * pz) / rho;
            pz = nz;
            Complex nw = (w * pw - std::conj(a) * pw_star) / rho;
            pw_star = (pw_star - a * w * pw) / rho;
            pw = nw;
        }
        return acc;
    }
    SzegoResult sz = szego_eval(alphas, n, z);
    SzegoResult sw = szego_eval(alphas, n, w);
    return (sz.phi_star * std::conj(sw.phi_star) - sz.phi * std::conj(sw.phi)) /
           den;
}

CaratheodoryModel::CaratheodoryModel(std::string id,
                                     std::function<Complex(Complex)> f,
                                     std::function<double(double)> g)
    : id_(std::move(id)), f_(std::move(f)), g_(std::move(g)) {
    if (std::abs(f_(Complex(0.0)) - 1.0) > 1e-9)
        throw std::invalid_argument("F(0) must be 1 for a probability measure");
    for (int k = 0; k < 24; ++k) {
        double r = 0.1 + 0.8 * (k % 5) / 4.0, th = 2.0 * M_PI * k / 24.0;
        if (f_(std::polar(r, th)).real() < -1e-12)
            throw std::invalid_argument("Re F must be nonnegative on the disk");
    }
}

Complex CaratheodoryModel::eval(Complex z) const {
    if (!(std::abs(z) < 1.0))
        throw std::domain_error("argument outside the open unit disk");
    return f_(z);
}

double CaratheodoryModel::boundary_re(double xi) const {
    if (g_)
        return g_(xi);
    double prev = f_(std::polar(1.0 - std::pow(2.0, -4.0), xi)).real();
    for (int k = 5; k <= 44; ++k) {
        double cur = f_(std::polar(1.0 - std::pow(2.0, -k), xi)).real();
        if (std::abs(cur - prev) < 1e-9 * (1.0 + std::abs(cur)))
            return cur;
        prev = cur;
    }
    return prev;
}

CaratheodoryModel CaratheodoryModel::lebesgue() {
    return CaratheodoryModel(
        "lebesgue", [](Complex) { return Complex(1.0); },
        [](double) { return 1.0; });
}

CaratheodoryModel CaratheodoryModel::discrete(std::vector<double> angles,
                                              std::vector<double> weights) {
    if (angles.size() != weights.size() || angles.empty())
        throw std::invalid_argument("angles/weights mismatch");
    double total = 0.0;
    for (double w : weights) total += w;
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("weights must sum to 1");
    return CaratheodoryModel("discrete-circle", [angles, weights](Complex z) {
        Complex acc = 0.0;
        for (size_t k = 0; k < angles.size(); ++k) {
            Complex e = std::polar(1.0, angles[k]);
            acc += weights[k] * (e + z) / (e - z);
        }
        return acc;
    });
}

namespace {

// Q = C^{-1} swap, R = swap C; T(n,z) = e^{-inz/2} Q S(n, e^{iz}) R
const Mat2C& embed_q() {
    static const Mat2C q = kCayley.inverse() * kSwap;
    return q;
}
const Mat2C& embed_r() {
    static const Mat2C r = kSwap * kCayley;
    return r;
}

}  // namespace

Mat2C embed_transfer(const VerblunskyParams& alphas, long n, Complex z) {
    Complex u = std::exp(kIm * z);
    Mat2C s = szego_eval(alphas, n, u).s;
    return std::exp(-kIm * (0.5 * double(n) * z)) * (embed_q() * s * embed_r());
}

Mat2C embed_one_step(const VerblunskyParams& alphas, long n, Complex z) {
    Complex u = std::exp(kIm * z);
    return std::exp(-kIm * (0.5 * z)) * (embed_q() * szego_step(alphas.alpha(n), u) * embed_r());
}

namespace {

/// S(n, u) and dS/du by the forward-mode product rule; the factor derivative
/// is dA/du = (1/rho) [[1, 0], [-alpha, 0]].
void szego_with_derivative(const VerblunskyParams& alphas, long n, Complex u,
                           Mat2C& s, Mat2C& ds) {
    s = Mat2C::identity();
    ds = Mat2C::zero();
    for (long k = 0; k < n; ++k) {
        Complex a = alphas.alpha(k);
        double rho = std::sqrt(1.0 - std::norm(a));
        Mat2C ak = szego_step(a, u);
        Mat2C dak = Mat2C{1.0, 0.0, -a, 0.0} / Complex(rho);
        ds = dak * s + ak * ds;
        s = ak * s;
    }
}

/// dT/dz of the embedded transfer at z.
Mat2C embed_transfer_derivative(const VerblunskyParams& alphas, long n,
                                Complex z) {
    Complex u = std::exp(kIm * z);
    Mat2C s, ds;
    szego_with_derivative(alphas, n, u, s, ds);
    Complex phase = std::exp(-kIm * (0.5 * double(n) * z));
    Mat2C inner = s * (-kIm * (0.5 * double(n))) + ds * (kIm * u);
    return phase * (embed_q() * inner * embed_r());
}

}  // namespace

Mat2C opuc_matrix_kernel(const VerblunskyParams& alphas, long n, Complex z,
                         Complex w) {
    Complex d = std::conj(w) - z;
    if (std::abs(d) > 1e-8) {
        Mat2C tz = embed_transfer(alphas, n, z);
        Mat2C tw = embed_transfer(alphas, n, w);
        return (tw.adjoint() * kJ * tz - kJ) / d;
    }
    Mat2C tw = embed_transfer(alphas, n, w);
    return Mat2C::zero() - tw.adjoint() * kJ * embed_transfer_derivative(alphas, n, z);
}

ScaledTable opuc_universality(const VerblunskyParams& alphas, double xi,
                              double g, long n,
                              const std::vector<Complex>& points) {
    if (!(g > 0.0))
        throw std::invalid_argument("scaling density must be positive");
    Complex e_xi = std::polar(1.0, xi);
    double kn = std::real(opuc_kernel(alphas, n, e_xi, e_xi));
    if (!(kn > 1e-12))
        throw std::domain_error("scale not yet developed");
    double s = g * kn;
    ScaledTable out;
    out.table.model_id = alphas.model_id();
    out.table.xi = xi;
    out.table.scale = s;
    out.table.index = double(n);
    out.table.matrix = false;
    for (Complex z : points) {
        for (Complex w : points) {
            Complex d = std::conj(w) - z;
            Complex pre = std::exp(kIm * (0.5 * double(n) * d / s));
            Complex v = pre *
                        opuc_kernel(alphas, n, std::exp(kIm * (xi + z / s)),
                                    std::exp(kIm * (xi + w / s))) /
                        kn;
            Complex target =
                std::abs(d) < 1e-12 ? Complex(1.0) : std::sin(0.5 * d) / (0.5 * d);
            out.table.grid.emplace_back(z, w);
            out.table.svalues.push_back(v);
            double e = std::abs(v - target);
            out.sup_error = std::max(out.sup_error, e);
            if (z.imag() == 0.0 && w.imag() == 0.0)
                out.sup_error_real = std::max(out.sup_error_real, e);
        }
    }
    return out;
}

}  // namespace cdk
