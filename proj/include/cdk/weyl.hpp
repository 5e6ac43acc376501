#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdk/mat2.hpp"
#include "cdk/oprl.hpp"

namespace cdk {

/// Herglotz-function model: closed-form evaluator on the upper half-plane,
/// optionally with known boundary data.
class ModelM {
  public:
    struct BoundaryData {
        SpherePoint eta;
        double f_mu;
    };

    /// stieltjes_mass > 0 verifies the branch normalization m(z) ~ -mass/z at
    /// z = 1e6 i during construction (0 skips the check, e.g. for bounded
    /// non-Stieltjes models).
    ModelM(std::string id, std::function<Complex(Complex)> eval,
           std::function<std::optional<BoundaryData>(double)> boundary = nullptr,
           double stieltjes_mass = 0.0);

    const std::string& id() const { return id_; }

    /// m(z) for Im z > 0; throws otherwise.
    Complex eval(Complex z) const;

    std::optional<BoundaryData> boundary(double xi) const;

    // model zoo
    static ModelM free_jacobi();   // (-z + sqrt(z^2-4))/2, m ~ -1/z at infinity
    static ModelM chebyshev();     // -1/sqrt(z^2-1)
    static ModelM log_periodic();  // i exp((pi/2) e^{-pi/2} sin ln(-iz))
    static ModelM discrete(const std::vector<double>& atoms,
                           const std::vector<double>& weights);
    /// Convex combination c1*m1 + c2*m2.
    static ModelM mixture(const ModelM& m1, double c1, const ModelM& m2,
                          double c2);
    /// Looks up "free-jacobi", "chebyshev", "log-periodic",
    /// "discrete:x1:w1,x2:w2,...", "schrodinger-free".
    static ModelM by_id(const std::string& id);

  private:
    std::string id_;
    std::function<Complex(Complex)> eval_;
    std::function<std::optional<BoundaryData>(double)> boundary_;
};

/// Weyl disk: image of the closed upper half-plane under the Moebius map of
/// T^{-1}; a disk, or a half-plane in the degenerate case.
struct WeylDisk {
    bool half_plane = false;
    // disk case
    Complex center{0.0};
    double radius = 0.0;
    // half-plane case: boundary point + unit tangent; interior where
    // side * Im((w - point)/tangent) >= 0
    Complex point{0.0};
    Complex tangent{1.0};
    double side = 1.0;

    bool contains(const SpherePoint& p, double tol = 1e-9) const;
};

WeylDisk weyl_disk(const Mat2C& t);

/// Transfer-matrix family abstraction: T(L, z) for L on a discrete schedule.
class TransferFamily {
  public:
    virtual ~TransferFamily() = default;
    virtual Mat2C transfer(double L, Complex z) const = 0;
    /// Increasing evaluation schedule used by the disk-shrinking loop.
    virtual std::vector<double> schedule() const = 0;
};

struct MCertified {
    Complex value;
    double radius;  // certified error bound
    double length;  // L at which the bound was achieved
};

/// Thrown when the Weyl disks fail to shrink below tolerance within the
/// schedule (limit-circle-like stall); carries the last radius.
class LimitCircleStall : public std::runtime_error {
  public:
    explicit LimitCircleStall(double radius)
        : std::runtime_error("limit-circle-like stall"), last_radius(radius) {}
    double last_radius;
};

/// Weyl-disk limit: grows L along the family's schedule until the disk radius
/// drops below tol; the center is returned with the radius as error bound.
MCertified m_from_transfer(const TransferFamily& family, Complex z, double tol);

/// Jacobi transfer family T(n,z) = sigma B(n,z) sigma on a doubling schedule.
class JacobiTransferFamily : public TransferFamily {
  public:
    explicit JacobiTransferFamily(JacobiParams params)
        : params_(std::move(params)) {}
    Mat2C transfer(double L, Complex z) const override;
    std::vector<double> schedule() const override;

  private:
    JacobiParams params_;
};

struct BoundaryLimit {
    SpherePoint eta;
    double f_mu = 0.0;
    bool converged = false;
    bool boundary_real = false;    // eta in R (or infinity): f_mu = 0
    double oscillation = 0.0;      // chordal spread over the tail when stuck
    std::vector<Complex> samples;  // m(xi + i y_k) along the schedule
};

/// Boundary limit of m at xi along a decreasing y-schedule, sampled at
/// xi + y e^{i angle} (angle = pi/2 is the normal ray; other angles probe
/// nontangential sectors). Convergence requires geometric decay of successive
/// chordal distances (factor <= 0.9 over the last 5 points) and final
/// distance < tol. Non-convergence is a data outcome, not an error.
BoundaryLimit boundary_limit(const ModelM& model, double xi,
                             const std::vector<double>& schedule, double tol,
                             double angle = M_PI / 2.0);

/// Convenience schedule y_k = 2^{-k}, k = 0..kmax.
std::vector<double> dyadic_schedule(int kmax);

/// mu({xi}) = lim eps * Im m(xi + i eps) along eps = 2^{-k}.
double point_mass_mass(const ModelM& model, double xi, int kmax = 30);

}  // namespace cdk
