#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cdk/cansys.hpp"
#include "cdk/kernel_table.hpp"
#include "cdk/mat2.hpp"
#include "cdk/oprl.hpp"

namespace cdk {

/// Read-shareable source of matrix kernels K_L(z, w); the scalar kernel is
/// the (1,1) corner.
class KernelProvider {
  public:
    virtual ~KernelProvider() = default;
    virtual Mat2C kernel(double L, Complex z, Complex w) const = 0;
    virtual std::string id() const = 0;
    Complex scalar(double L, Complex z, Complex w) const {
        return kernel(L, z, w).e11;
    }
};

class JacobiKernelProvider : public KernelProvider {
  public:
    explicit JacobiKernelProvider(JacobiParams params)
        : params_(std::move(params)) {}
    Mat2C kernel(double L, Complex z, Complex w) const override {
        return cd_kernel(params_, L, z, w);
    }
    std::string id() const override { return params_.model_id(); }
    const JacobiParams& params() const { return params_; }

  private:
    JacobiParams params_;
};

class CanSysKernelProvider : public KernelProvider {
  public:
    explicit CanSysKernelProvider(std::shared_ptr<const HamiltonianSystem> sys,
                                  double tol = 1e-10)
        : sys_(std::move(sys)), tol_(tol) {}
    Mat2C kernel(double L, Complex z, Complex w) const override {
        return cansys_kernel(*sys_, L, z, w, tol_);
    }
    std::string id() const override { return sys_->id(); }
    const HamiltonianSystem& system() const { return *sys_; }

  private:
    std::shared_ptr<const HamiltonianSystem> sys_;
    double tol_;
};

/// Default compact test region: z, w from {-2 + k/2 : 0 <= k <= 8} on the
/// real axis plus the four corners +-2 +- i; tables run over all pairs.
std::vector<Complex> default_grid_points();

/// Table plus its sup distance to the target kernel over the grid.
/// sup_error runs over all pairs; sup_error_real only over pairs of real
/// points, where the finite-index corrections are not amplified by the
/// exponential growth of the target off the real axis (cosh(2 pi)/n at the
/// corners). Thresholds are asserted on the real-axis figure.
struct ScaledTable {
    KernelTable table;
    double sup_error = 0.0;
    double sup_error_real = 0.0;
};

/// Rescaled scalar kernel K_L(xi + z/(f K), xi + w/(f K)) / K with
/// K = K_L(xi, xi), compared to sin(pi(conj(w)-z))/(pi(conj(w)-z)) (1 on the
/// diagonal). Throws std::domain_error("scale not yet developed") when
/// K_L(xi,xi) is below threshold.
ScaledTable rescaled_scalar(const KernelProvider& provider, double xi, double f,
                            double L,
                            const std::vector<Complex>& points = default_grid_points());

/// Rescaled matrix kernel K_L(xi + z/tau, xi + w/tau)/tau with
/// tau = tr K_L(xi,xi), compared entrywise to the ring kernel for eta.
ScaledTable rescaled_matrix(const KernelProvider& provider, double xi, double L,
                            const SpherePoint& eta,
                            const std::vector<Complex>& points = default_grid_points());

/// Per-index distances for the three equivalent conditions: (ii) the
/// normalized diagonal kernel vs the ring Hamiltonian, (iii) the rescaled
/// fundamental solution M_L(xi + z/tau, xi) = I + (z/tau) j K_L(xi+z/tau, xi)
/// vs the ring solution, (iv) the full matrix-kernel distance.
struct EquivalenceRow {
    double index = 0.0;
    double dist_hamiltonian = 0.0;
    double dist_solution = 0.0;
    double dist_kernel = 0.0;
};
struct EquivalenceReport {
    SpherePoint eta = SpherePoint::infinity();
    bool eta_boundary = false;  // eta real or infinite (h = 0 branch)
    std::vector<EquivalenceRow> rows;
    // every distance at the last index is below the first, or is attained to
    // roundoff at both ends (symmetric models hit zero exactly)
    bool decays = false;
};
EquivalenceReport equivalence_report(
    const KernelProvider& provider, double xi, const std::vector<double>& indices,
    const SpherePoint& eta,
    const std::vector<Complex>& points = default_grid_points());

/// Scaled zero gaps f * K_n(xi,xi) * (xi_{j+1} - xi_j) for j in
/// [-j_range, j_range]; throws std::runtime_error when too few zeros exist.
std::vector<double> clock_spacing(const JacobiParams& params, double xi, long n,
                                  long j_range, double f);

/// Raw table of the global scale K_n(xi,xi)/n; recorded, never asserted.
struct ScaleRow {
    long n = 0;
    double kernel_diag = 0.0;
    double ratio = 0.0;
};
std::vector<ScaleRow> scale_experiment(const JacobiParams& params, double xi,
                                       const std::vector<long>& ns);

/// Aggregated per-index sup-errors for one model/target pair. converged is
/// the observed trend (last error not larger than the first), decay_ratio is
/// error(last)/error(first); nothing is extrapolated.
struct UniversalityReport {
    std::string model_id;
    double xi = 0.0;
    std::string target;  // "sinc" or "ring(<eta>)"
    std::vector<double> indices;
    std::vector<double> sup_errors;
    bool converged = false;
    double decay_ratio = 0.0;
};
UniversalityReport make_report(std::string model_id, double xi,
                               std::string target, std::vector<double> indices,
                               std::vector<double> sup_errors);

}  // namespace cdk
