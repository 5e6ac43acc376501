#include "cdk/universality.hpp"

#include <cmath>
#include <stdexcept>

namespace cdk {

namespace {

constexpr double kScaleThreshold = 1e-12;

Complex sinc_target(Complex z, Complex w) {
    Complex d = std::conj(w) - z;
    if (std::abs(d) < 1e-12)
        return 1.0;
    return std::sin(M_PI * d) / (M_PI * d);
}

}  // namespace

std::vector<Complex> default_grid_points() {
    std::vector<Complex> pts;
    for (int k = 0; k <= 8; ++k) pts.push_back(Complex(-2.0 + 0.5 * k, 0.0));
    for (double re : {-2.0, 2.0})
        for (double im : {-1.0, 1.0}) pts.push_back(Complex(re, im));
    return pts;
}

ScaledTable rescaled_scalar(const KernelProvider& provider, double xi, double f,
                            double L, const std::vector<Complex>& points) {
    if (!(f > 0.0))
        throw std::invalid_argument("scaling density must be positive");
    double k0 = std::real(provider.scalar(L, xi, xi));
    if (!(k0 > kScaleThreshold))
        throw std::domain_error("scale not yet developed");
    double s = f * k0;
    ScaledTable out;
    out.table.model_id = provider.id();
    out.table.xi = xi;
    out.table.scale = s;
    out.table.index = L;
    out.table.matrix = false;
    for (Complex z : points) {
        for (Complex w : points) {
            Complex v = provider.scalar(L, xi + z / s, xi + w / s) / k0;
            out.table.grid.emplace_back(z, w);
            out.table.svalues.push_back(v);
            double e = std::abs(v - sinc_target(z, w));
            out.sup_error = std::max(out.sup_error, e);
            if (z.imag() == 0.0 && w.imag() == 0.0)
                out.sup_error_real = std::max(out.sup_error_real, e);
        }
    }
    return out;
}

ScaledTable rescaled_matrix(const KernelProvider& provider, double xi, double L,
                            const SpherePoint& eta,
                            const std::vector<Complex>& points) {
    double tau = std::real(provider.kernel(L, xi, xi).trace());
    if (!(tau > kScaleThreshold))
        throw std::domain_error("scale not yet developed");
    RingObjects ring = ring_objects(eta);
    ScaledTable out;
    out.table.model_id = provider.id();
    out.table.xi = xi;
    out.table.scale = tau;
    out.table.index = L;
    out.table.matrix = true;
    for (Complex z : points) {
        for (Complex w : points) {
            Mat2C v = provider.kernel(L, xi + z / tau, xi + w / tau) / tau;
            out.table.grid.emplace_back(z, w);
            out.table.mvalues.push_back(v);
            double e = (v - ring.k_ring(z, w)).max_abs();
            out.sup_error = std::max(out.sup_error, e);
            if (z.imag() == 0.0 && w.imag() == 0.0)
                out.sup_error_real = std::max(out.sup_error_real, e);
        }
    }
    return out;
}

EquivalenceReport equivalence_report(const KernelProvider& provider, double xi,
                                     const std::vector<double>& indices,
                                     const SpherePoint& eta,
                                     const std::vector<Complex>& points) {
    RingObjects ring = ring_objects(eta);
    EquivalenceReport rep;
    rep.eta = eta;
    rep.eta_boundary = (ring.h == 0.0);
    for (double L : indices) {
        double tau = std::real(provider.kernel(L, xi, xi).trace());
        if (!(tau > kScaleThreshold))
            throw std::domain_error("scale not yet developed");
        EquivalenceRow row;
        row.index = L;
        row.dist_hamiltonian =
            (provider.kernel(L, xi, xi) / tau - ring.hmat).max_abs();
        for (Complex z : points) {
            Mat2C m = Mat2C::identity() +
                      kJ * provider.kernel(L, xi + z / tau, xi) * (z / tau);
            row.dist_solution =
                std::max(row.dist_solution, (m - ring.m_ring(z)).max_abs());
        }
        for (Complex z : points) {
            for (Complex w : points) {
                Mat2C v = provider.kernel(L, xi + z / tau, xi + w / tau) / tau;
                row.dist_kernel =
                    std::max(row.dist_kernel, (v - ring.k_ring(z, w)).max_abs());
            }
        }
        rep.rows.push_back(row);
    }
    if (rep.rows.size() >= 2) {
        const EquivalenceRow& a = rep.rows.front();
        const EquivalenceRow& b = rep.rows.back();
        auto down = [](double first, double last) {
            return last < first || last < 1e-12;
        };
        rep.decays = down(a.dist_hamiltonian, b.dist_hamiltonian) &&
                     down(a.dist_solution, b.dist_solution) &&
                     down(a.dist_kernel, b.dist_kernel);
    }
    return rep;
}

std::vector<double> clock_spacing(const JacobiParams& params, double xi, long n,
                                  long j_range, double f) {
    if (!(f > 0.0))
        throw std::invalid_argument("scaling density must be positive");
    ZeroWindow zw = zeros_near(params, n, xi, j_range + 2);
    if (zw.truncated_below || zw.truncated_above)
        throw std::runtime_error("not enough zeros near the base point");
    // labels: below = xi_{-(j_range+2)} .. xi_{-1}, above = xi_0 .. xi_{j_range+1}
    auto zero_at = [&](long j) {
        return j < 0 ? zw.below[zw.below.size() + j] : zw.above[j];
    };
    double k0 = std::real(cd_kernel_scalar(params, double(n), xi, xi));
    std::vector<double> gaps;
    for (long j = -j_range; j <= j_range; ++j)
        gaps.push_back(f * k0 * (zero_at(j + 1) - zero_at(j)));
    return gaps;
}

std::vector<ScaleRow> scale_experiment(const JacobiParams& params, double xi,
                                       const std::vector<long>& ns) {
    std::vector<ScaleRow> rows;
    for (long n : ns) {
        ScaleRow r;
        r.n = n;
        r.kernel_diag = std::real(cd_kernel_scalar(params, double(n), xi, xi));
        r.ratio = r.kernel_diag / double(n);
        rows.push_back(r);
    }
    return rows;
}

UniversalityReport make_report(std::string model_id, double xi,
                               std::string target, std::vector<double> indices,
                               std::vector<double> sup_errors) {
    if (indices.size() != sup_errors.size())
        throw std::invalid_argument("index/error length mismatch");
    UniversalityReport rep;
    rep.model_id = std::move(model_id);
    rep.xi = xi;
    rep.target = std::move(target);
    rep.indices = std::move(indices);
    rep.sup_errors = std::move(sup_errors);
    if (!rep.sup_errors.empty() && rep.sup_errors.front() > 0.0) {
        rep.decay_ratio = rep.sup_errors.back() / rep.sup_errors.front();
        rep.converged = rep.sup_errors.back() <= rep.sup_errors.front();
    }
    return rep;
}

}  // namespace cdk
