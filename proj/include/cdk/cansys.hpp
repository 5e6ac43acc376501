#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cdk/mat2.hpp"
#include "cdk/oprl.hpp"
#include "cdk/weyl.hpp"

namespace cdk {

/// One piece of the coefficient data of a canonical system, on a local
/// coordinate [0, length]. Constant segments are integrated exactly (matrix
/// exponential); smooth segments by fixed-step RK4 with Richardson control.
struct Segment {
    double length = 1.0;
    bool constant = true;
    Mat2C a_const, b_const;
    std::function<Mat2C(double)> a_fn, b_fn;  // local coordinate

    Mat2C a_at(double local) const { return constant ? a_const : a_fn(local); }
    Mat2C b_at(double local) const { return constant ? b_const : b_fn(local); }

    static Segment const_seg(double length, Mat2C a, Mat2C b = Mat2C::zero());
    static Segment smooth_seg(double length, std::function<Mat2C(double)> a,
                              std::function<Mat2C(double)> b = nullptr);
};

/// Hamiltonian system j T' = (-zA + B) T on [0, horizon), A >= 0 real
/// symmetric, B real symmetric, given segment-wise.
class HamiltonianSystem {
  public:
    explicit HamiltonianSystem(std::vector<Segment> segments,
                               std::string id = "cansys");

    double horizon() const { return horizon_; }
    const std::vector<Segment>& segments() const { return segments_; }
    const std::vector<double>& starts() const { return starts_; }
    const std::string& id() const { return id_; }

    Mat2C a_at(double x) const;
    Mat2C b_at(double x) const;

    /// Constant-coefficient system A = a, B = b on [0, length).
    static HamiltonianSystem constant(Mat2C a, Mat2C b, double length);
    /// Jacobi parameters embedded as the piecewise-constant trace of the
    /// orthogonality data at base point xi: on [n, n+1), A = e_n(xi)^T e_n(xi)
    /// with e_n = (p_n(xi), q_n(xi)), B = 0.
    static HamiltonianSystem jacobi_embedding(const JacobiParams& params,
                                              double xi, long length);

  private:
    std::vector<Segment> segments_;
    std::vector<double> starts_;
    double horizon_;
    std::string id_;
};

/// Half-line Schroedinger operator -u'' + Vu with boundary angle beta,
/// rewritten as a Hamiltonian system: A = R_beta diag(0,1) R_beta^T,
/// B = R_beta diag(-1, V) R_beta^T. Constant V gives one constant segment.
HamiltonianSystem schrodinger_system(double v, double beta, double length);
HamiltonianSystem schrodinger_system(std::function<double(double)> v,
                                     double beta, double length);

/// phi, theta eigensolutions at (x, z): T(x,z) = R_beta [[phi',theta'],
/// [phi,theta]].
struct PhiTheta {
    Complex phi, theta, dphi, dtheta;
};
PhiTheta schrodinger_solutions(const HamiltonianSystem& sys, double beta,
                               double x, Complex z);

/// T(L, z) with T(0, z) = I. Throws std::runtime_error if the Richardson
/// estimate on a smooth segment stays above tol after maximal refinement.
Mat2C integrate_transfer(const HamiltonianSystem& sys, double L, Complex z,
                         double tol = 1e-10);

/// Matrix kernel K_L(z,w) = int_0^L T(x,w)* A(x) T(x,z) dx by composite
/// Gauss-Legendre per segment (exact transfer values on constant segments).
Mat2C cansys_kernel(const HamiltonianSystem& sys, double L, Complex z,
                    Complex w, double tol = 1e-10);

/// Caches transfer checkpoints at segment boundaries per z, so grids of
/// kernel evaluations do not re-integrate from 0.
class KernelEvaluator {
  public:
    explicit KernelEvaluator(const HamiltonianSystem& sys, double tol = 1e-10);
    Mat2C kernel(double L, Complex z, Complex w) const;
    Mat2C transfer(double L, Complex z) const;

  private:
    const HamiltonianSystem& sys_;
    double tol_;
};

/// Doubling-schedule adapter feeding the Weyl-disk machinery.
class CanSysTransferFamily : public TransferFamily {
  public:
    explicit CanSysTransferFamily(std::shared_ptr<const HamiltonianSystem> sys,
                                  double tol = 1e-10)
        : sys_(std::move(sys)), tol_(tol) {}
    Mat2C transfer(double L, Complex z) const override;
    std::vector<double> schedule() const override;

  private:
    std::shared_ptr<const HamiltonianSystem> sys_;
    double tol_;
};

/// Potapov-de Branges gauge at base point xi: H(x) = T_xi(x,0)* A(x)
/// T_xi(x,0) and M(x,z) = T_xi(x,0)^{-1} T_xi(x,z), where T_xi solves the
/// system shifted by xi (B replaced by B - xi A). M(x,0) = I.
class PdbGauge {
  public:
    PdbGauge(const HamiltonianSystem& sys, double xi, double tol = 1e-10);

    Mat2C h(double x) const;
    Mat2C m(double x, Complex z) const;
    /// int_0^L H dx; equals the kernel of the original system at (xi, xi).
    Mat2C h_integral(double L) const;
    const HamiltonianSystem& shifted() const { return shifted_; }

  private:
    Mat2C t0(double x) const;  // T_xi(x, 0), real unimodular
    HamiltonianSystem shifted_;
    double tol_;
    std::vector<Mat2C> checkpoints_;  // T_xi at segment starts, z = 0
};

/// Trace reparametrization of a Hamiltonian in PdB form (B = 0):
/// a(L) = int_0^L tr H, normalized H(t) = H(a^{-1}(t))/tr H(a^{-1}(t)).
/// The m-function is unchanged. Throws on a segment with vanishing trace.
struct TraceReparam {
    std::function<double(double)> a;
    HamiltonianSystem normalized;
};
TraceReparam trace_reparam(const HamiltonianSystem& sys);

/// Universal limit objects for eta in the closed upper half-plane:
/// the trace-normalized constant Hamiltonian, its solution and its kernel.
struct RingObjects {
    SpherePoint eta;
    double h;  // Im eta / (1 + |eta|^2), 0 for real or infinite eta
    Mat2C hmat;

    Mat2C m_ring(Complex z) const;  // exp(z j H)
    /// Kernel of the constant system on [0, t]; diagonal limit t H.
    Mat2C k_ring_t(double t, Complex z, Complex w) const;
    Mat2C k_ring(Complex z, Complex w) const { return k_ring_t(1.0, z, w); }
};
RingObjects ring_objects(const SpherePoint& eta);

/// H_r(t) = H(rt): every segment shrunk by r. Satisfies
/// K_{r,t}(z,w) = (1/r) K_{rt}(z/r, w/r) and M_r(t,z) = M(rt, z/r).
HamiltonianSystem rescale_family(const HamiltonianSystem& sys, double r);

/// Action of the upper-triangular A = [[1,a],[0,1]]: H -> A*HA, K -> A*KA
/// (the (1,1) corner is unchanged), m -> A^{-1} m = m - a.
Mat2C triangular_shift_kernel(const Mat2C& k, double a);
HamiltonianSystem triangular_shift_system(const HamiltonianSystem& sys, double a);
SpherePoint triangular_shift_m(const SpherePoint& m, double a);

}  // namespace cdk
