#include <cmath>
#include <cstdlib>
#include <sstream>

#include "cdk/universality.hpp"
#include "doctest.h"

using namespace cdk;

namespace {

const Complex kI(0.0, 1.0);

std::vector<Complex> small_grid() {
    return {Complex(-2.0), Complex(-1.0), Complex(0.0), Complex(1.0),
            Complex(2.0), Complex(2.0, 1.0)};
}

}  // namespace

TEST_CASE("default grid covers the compact region") {
    auto pts = default_grid_points();
    CHECK(pts.size() == 13);
    CHECK(pts.front() == Complex(-2.0, 0.0));
    CHECK(pts[8] == Complex(2.0, 0.0));
    CHECK(std::count_if(pts.begin(), pts.end(),
                        [](Complex p) { return p.imag() != 0.0; }) == 4);
}

TEST_CASE("rescaled scalar kernel converges to sinc") {
    JacobiKernelProvider fj(JacobiParams::free_jacobi());
    ScaledTable t500 = rescaled_scalar(fj, 0.0, 1.0 / M_PI, 500.0);
    ScaledTable t4000 = rescaled_scalar(fj, 0.0, 1.0 / M_PI, 4000.0);
    CHECK(t4000.sup_error_real < 0.02);
    CHECK(t4000.sup_error_real < t500.sup_error_real / 3.0);
    // the complex corners converge too, at amplitude cosh(2 pi)/n
    CHECK(t4000.sup_error < 0.05);
    CHECK(t4000.sup_error < t500.sup_error / 3.0);
    // z = w = 0 entry is 1 by construction
    for (size_t i = 0; i < t4000.table.size(); ++i) {
        if (t4000.table.grid[i].first == Complex(0.0) &&
            t4000.table.grid[i].second == Complex(0.0))
            CHECK(std::abs(t4000.table.svalues[i] - 1.0) < 1e-14);
    }
    // arcsine measure (Chebyshev parameters) has the same density 1/pi at 0
    JacobiKernelProvider ch(JacobiParams::chebyshev());
    CHECK(rescaled_scalar(ch, 0.0, 1.0 / M_PI, 2000.0).sup_error_real < 0.05);
}

TEST_CASE("rescaled matrix kernel converges to the ring kernel") {
    JacobiKernelProvider fj(JacobiParams::free_jacobi());
    SpherePoint eta(kI);
    ScaledTable t = rescaled_matrix(fj, 0.0, 2000.0, eta);
    CHECK(t.sup_error_real < 0.02);
    CHECK(t.sup_error < 0.1);
    for (size_t i = 0; i < t.table.size(); ++i) {
        if (t.table.grid[i].first == Complex(0.0) &&
            t.table.grid[i].second == Complex(0.0)) {
            CHECK(std::abs(t.table.mvalues[i].trace() - 1.0) < 1e-12);
            // (1,1) corner ratio 1/(1+|eta|^2) = 1/2
            CHECK(std::abs(t.table.mvalues[i].e11 - 0.5) < 1e-2);
        }
    }
}

TEST_CASE("equivalence conditions attained exactly by the constant system") {
    RingObjects ri = ring_objects(SpherePoint(kI));
    auto sys = std::make_shared<HamiltonianSystem>(
        HamiltonianSystem::constant(ri.hmat, Mat2C::zero(), 12.0));
    CanSysKernelProvider provider(sys);
    EquivalenceReport rep = equivalence_report(provider, 0.0, {2.0, 5.0, 10.0},
                                               SpherePoint(kI), small_grid());
    CHECK(!rep.eta_boundary);
    for (const EquivalenceRow& row : rep.rows) {
        CHECK(row.dist_hamiltonian < 1e-8);
        CHECK(row.dist_solution < 1e-8);
        CHECK(row.dist_kernel < 1e-8);
    }
}

TEST_CASE("equivalence distances decay together for the free measure") {
    JacobiKernelProvider fj(JacobiParams::free_jacobi());
    EquivalenceReport rep = equivalence_report(fj, 0.0, {250.0, 1000.0},
                                               SpherePoint(kI), small_grid());
    CHECK(rep.decays);
    // parity makes the diagonal-kernel condition exact at even n
    CHECK(rep.rows[0].dist_hamiltonian < 1e-12);
    CHECK(rep.rows[1].dist_hamiltonian < 1e-12);
    CHECK(rep.rows[1].dist_solution < rep.rows[0].dist_solution);
    CHECK(rep.rows[1].dist_kernel < rep.rows[0].dist_kernel);

    // real eta takes the h = 0 branch and is flagged
    EquivalenceReport realcase = equivalence_report(
        fj, 3.0, {50.0}, SpherePoint(Complex(0.5 * (-3.0 + std::sqrt(5.0)))),
        small_grid());
    CHECK(realcase.eta_boundary);
}

TEST_CASE("clock spacing of zeros") {
    JacobiParams fj = JacobiParams::free_jacobi();
    std::vector<double> gaps = clock_spacing(fj, 0.0, 2000, 5, 1.0 / M_PI);
    CHECK(gaps.size() == 11);
    for (double g : gaps) CHECK(std::abs(g - 1.0) < 0.01);
    // parity symmetry of the symmetric measure: with zeros mirrored as
    // xi_{-k} = -xi_{k-1}, gap_j equals gap_{-j-2}, i.e. indices i and 8-i
    for (size_t k = 0; k <= 8; ++k)
        CHECK(gaps[k] == doctest::Approx(gaps[8 - k]).epsilon(1e-9));
    CHECK_THROWS_AS(clock_spacing(fj, 0.0, 3, 5, 1.0 / M_PI), std::runtime_error);
}

TEST_CASE("global scale table is recorded, not asserted") {
    JacobiParams fj = JacobiParams::free_jacobi();
    auto rows = scale_experiment(fj, 0.0, {1, 4000});
    CHECK(rows[0].ratio == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rows[1].ratio == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("undeveloped scale is an error") {
    // scalar corner of the kernel vanishes identically for A = diag(0,1)
    auto sys = std::make_shared<HamiltonianSystem>(
        HamiltonianSystem::constant(Mat2C{0.0, 0.0, 0.0, 1.0}, Mat2C::zero(), 5.0));
    CanSysKernelProvider provider(sys);
    CHECK_THROWS_AS(rescaled_scalar(provider, 0.0, 1.0, 4.0, small_grid()),
                    std::domain_error);
    CHECK_THROWS_AS(rescaled_scalar(provider, 0.0, -1.0, 4.0, small_grid()),
                    std::invalid_argument);
}

TEST_CASE("report aggregation") {
    UniversalityReport rep =
        make_report("m", 0.0, "sinc", {500.0, 4000.0}, {0.06, 0.012});
    CHECK(rep.converged);
    CHECK(rep.decay_ratio == doctest::Approx(0.2).epsilon(1e-12));
    CHECK_THROWS_AS(make_report("m", 0.0, "sinc", {1.0}, {}),
                    std::invalid_argument);
}

TEST_CASE("kernel table serialization round-trips") {
    KernelTable t;
    t.model_id = "demo";
    t.xi = 0.25;
    t.scale = 3.0;
    t.index = 7;
    t.matrix = false;
    t.grid.emplace_back(Complex(1.0 / 3.0, 0.0), Complex(0.0, -2.0 / 7.0));
    t.svalues.push_back(Complex(std::sqrt(2.0), -1.0 / 9.0));
    std::string csv = t.to_csv();
    CHECK(csv.substr(0, csv.find('\n')) == "re_z,im_z,re_w,im_w,re_value,im_value");
    // values round-trip exactly through the printed representation
    std::string row = csv.substr(csv.find('\n') + 1);
    std::vector<double> vals;
    std::stringstream ss(row);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
    CHECK(vals.size() == 6);
    CHECK(vals[0] == 1.0 / 3.0);
    CHECK(vals[3] == -2.0 / 7.0);
    CHECK(vals[4] == std::sqrt(2.0));
    CHECK(vals[5] == -1.0 / 9.0);
    // deterministic output
    CHECK(t.to_csv() == csv);
    CHECK(t.to_json_string() == t.to_json_string());

    KernelTable m;
    m.matrix = true;
    m.grid.emplace_back(Complex(0.0), Complex(0.0));
    m.mvalues.push_back(Mat2C::identity());
    CHECK(m.to_csv().find("re_k22") != std::string::npos);
    m.mvalues.clear();
    CHECK_THROWS_AS(m.to_csv(), std::logic_error);
}
