#include "cdk/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "cdk/cansys.hpp"
#include "cdk/opuc.hpp"
#include "cdk/universality.hpp"
#include "cdk/weyl.hpp"
#include "json.hpp"

namespace cdk {

namespace {

using nlohmann::json;

const std::vector<std::string> kKinds = {
    "kernel",      "universality-scalar", "universality-matrix",
    "equivalence", "clock",               "subordinacy",
    "opuc",        "cansys-check",        "mfun"};

std::vector<double> parse_csv_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t pos = 0;
        out.push_back(std::stod(item, &pos));
        if (pos != item.size())
            throw ConfigError("bad numeric literal: " + item);
    }
    return out;
}

JacobiParams jacobi_by_id(const std::string& id) {
    if (id == "free-jacobi")
        return JacobiParams::free_jacobi();
    if (id == "chebyshev")
        return JacobiParams::chebyshev();
    const std::string key = "two-atom:";
    if (id.rfind(key, 0) == 0) {
        auto v = parse_csv_doubles(id.substr(key.size()));
        if (v.size() != 4)
            throw ConfigError("two-atom expects x1,w1,x2,w2");
        return JacobiParams::two_atom(v[0], v[1], v[2], v[3]);
    }
    throw ConfigError("unknown recurrence model: " + id);
}

SpherePoint parse_eta(const std::string& s) {
    if (s == "inf")
        return SpherePoint::infinity();
    auto v = parse_csv_doubles(s);
    if (v.empty() || v.size() > 2)
        throw ConfigError("bad eta literal: " + s);
    return SpherePoint(Complex(v[0], v.size() == 2 ? v[1] : 0.0));
}

json eta_json(const SpherePoint& p) {
    if (p.is_infinite())
        return "inf";
    return {p.value().real(), p.value().imag()};
}

/// Kernel source for kinds that accept either recurrence coefficients or a
/// coefficient system: "free-jacobi" | "chebyshev" | "two-atom:..." |
/// "schrodinger:<v>,<beta>,<length>" | "ring:<eta>,<length>".
std::unique_ptr<KernelProvider> provider_by_id(const std::string& id) {
    const std::string skey = "schrodinger:", rkey = "ring:";
    if (id.rfind(skey, 0) == 0) {
        auto v = parse_csv_doubles(id.substr(skey.size()));
        if (v.size() != 3)
            throw ConfigError("schrodinger expects v,beta,length");
        auto sys = std::make_shared<HamiltonianSystem>(
            schrodinger_system(v[0], v[1], v[2]));
        return std::make_unique<CanSysKernelProvider>(std::move(sys));
    }
    if (id.rfind(rkey, 0) == 0) {
        std::string rest = id.substr(rkey.size());
        size_t cut = rest.find_last_of(',');
        if (cut == std::string::npos)
            throw ConfigError("ring expects <eta>,<length>");
        double length = std::stod(rest.substr(cut + 1));
        RingObjects r = ring_objects(parse_eta(rest.substr(0, cut)));
        auto sys = std::make_shared<HamiltonianSystem>(
            HamiltonianSystem::constant(r.hmat, Mat2C::zero(), length));
        return std::make_unique<CanSysKernelProvider>(std::move(sys));
    }
    return std::make_unique<JacobiKernelProvider>(jacobi_by_id(id));
}

void parallel_for(size_t count, int jobs, const std::function<void(size_t)>& fn) {
    int workers = int(std::min<size_t>(size_t(std::max(jobs, 1)), count));
    if (workers <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int k = 0; k < workers; ++k) {
        pool.emplace_back([&] {
            for (size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error)
        std::rethrow_exception(error);
}

std::string index_label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

struct RunOutput {
    json report;
    std::vector<std::pair<std::string, std::string>> files;  // name -> content
    std::vector<std::string> failures;
};

/// f and eta derivation from the boundary data of a known m-function model.
BoundaryLimit boundary_data(const std::string& model, double xi) {
    ModelM m = ModelM::by_id(model);
    return boundary_limit(m, xi, dyadic_schedule(40), 1e-9);
}

/// Same, but required: an unknown model id is a configuration problem here.
BoundaryLimit boundary_data_required(const std::string& model, double xi) {
    try {
        return boundary_data(model, xi);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

void run_scalar(const ExperimentConfig& c, int jobs,
                const std::vector<Complex>& grid, RunOutput& out) {
    double xi = c.xis.at(0);
    double f = c.f;
    if (f <= 0.0) {
        BoundaryLimit b = boundary_data_required(c.model, xi);
        if (!b.converged || b.f_mu <= 0.0)
            throw ConfigError("no usable boundary density; supply f");
        f = b.f_mu;
    }
    auto provider = provider_by_id(c.model);
    std::vector<ScaledTable> tables(c.indices.size());
    parallel_for(c.indices.size(), jobs, [&](size_t i) {
        tables[i] = rescaled_scalar(*provider, xi, f, c.indices[i], grid);
    });
    json rows = json::array();
    std::vector<double> errs;
    for (size_t i = 0; i < tables.size(); ++i) {
        rows.push_back({{"index", c.indices[i]},
                        {"sup_error", tables[i].sup_error},
                        {"sup_error_real", tables[i].sup_error_real},
                        {"scale", tables[i].table.scale}});
        errs.push_back(tables[i].sup_error_real);
        out.files.emplace_back(c.prefix + "_" + index_label(c.indices[i]) + ".csv",
                               tables[i].table.to_csv());
    }
    UniversalityReport rep =
        make_report(c.model, xi, "sinc", c.indices, errs);
    out.report["f"] = f;
    out.report["rows"] = rows;
    out.report["converged"] = rep.converged;
    out.report["decay_ratio"] = rep.decay_ratio;
    if (c.threshold >= 0.0 && errs.back() > c.threshold)
        out.failures.push_back("sup_error_real " + std::to_string(errs.back()) +
                               " above threshold");
}

void run_matrix_like(const ExperimentConfig& c, int jobs,
                     const std::vector<Complex>& grid, bool equivalence,
                     RunOutput& out) {
    double xi = c.xis.at(0);
    SpherePoint eta = SpherePoint::infinity();
    bool have_eta = false;
    if (!c.eta.empty()) {
        eta = parse_eta(c.eta);
        have_eta = true;
    }
    try {
        BoundaryLimit b = boundary_data(c.model, xi);
        if (b.converged) {
            if (have_eta) {
                double mismatch = chordal_distance(eta, b.eta);
                out.report["eta_mismatch"] = (mismatch > 0.05);
                out.report["eta_estimate"] = eta_json(b.eta);
            } else {
                eta = b.eta;
                have_eta = true;
            }
        }
    } catch (const std::invalid_argument&) {
        // model without closed-form boundary data; eta must be supplied
    }
    if (!have_eta)
        throw ConfigError("eta required for this model");
    out.report["eta"] = eta_json(eta);
    RingObjects ring = ring_objects(eta);
    out.report["eta_boundary"] = (ring.h == 0.0);

    auto provider = provider_by_id(c.model);
    if (equivalence) {
        EquivalenceReport rep =
            equivalence_report(*provider, xi, c.indices, eta, grid);
        json rows = json::array();
        for (const EquivalenceRow& r : rep.rows)
            rows.push_back({{"index", r.index},
                            {"dist_hamiltonian", r.dist_hamiltonian},
                            {"dist_solution", r.dist_solution},
                            {"dist_kernel", r.dist_kernel}});
        out.report["rows"] = rows;
        out.report["decays"] = rep.decays;
        if (c.assert_decay && !rep.decays)
            out.failures.push_back("equivalence distances do not decay");
        return;
    }
    std::vector<ScaledTable> tables(c.indices.size());
    parallel_for(c.indices.size(), jobs, [&](size_t i) {
        tables[i] = rescaled_matrix(*provider, xi, c.indices[i], eta, grid);
    });
    json rows = json::array();
    std::vector<double> errs;
    for (size_t i = 0; i < tables.size(); ++i) {
        rows.push_back({{"index", c.indices[i]},
                        {"sup_error", tables[i].sup_error},
                        {"sup_error_real", tables[i].sup_error_real},
                        {"scale", tables[i].table.scale}});
        errs.push_back(tables[i].sup_error_real);
        out.files.emplace_back(c.prefix + "_" + index_label(c.indices[i]) + ".csv",
                               tables[i].table.to_csv());
    }
    UniversalityReport rep = make_report(c.model, xi, "ring", c.indices, errs);
    out.report["rows"] = rows;
    out.report["converged"] = rep.converged;
    out.report["decay_ratio"] = rep.decay_ratio;
    if (c.threshold >= 0.0 && errs.back() > c.threshold)
        out.failures.push_back("sup_error_real " + std::to_string(errs.back()) +
                               " above threshold");
}

void run_kernel(const ExperimentConfig& c, int jobs,
                const std::vector<Complex>& grid, RunOutput& out) {
    double xi = c.xis.empty() ? 0.0 : c.xis[0];
    auto provider = provider_by_id(c.model);
    std::vector<KernelTable> tables(c.indices.size());
    parallel_for(c.indices.size(), jobs, [&](size_t i) {
        KernelTable t;
        t.model_id = c.model;
        t.xi = xi;
        t.index = c.indices[i];
        t.matrix = true;
        for (Complex z : grid) {
            for (Complex w : grid) {
                t.grid.emplace_back(z, w);
                t.mvalues.push_back(provider->kernel(c.indices[i], z, w));
            }
        }
        t.scale = std::real(provider->kernel(c.indices[i], xi, xi).trace());
        tables[i] = std::move(t);
    });
    json rows = json::array();
    for (size_t i = 0; i < tables.size(); ++i) {
        rows.push_back({{"index", c.indices[i]}, {"tau", tables[i].scale}});
        out.files.emplace_back(c.prefix + "_" + index_label(c.indices[i]) + ".csv",
                               tables[i].to_csv());
    }
    out.report["rows"] = rows;
}

void run_clock(const ExperimentConfig& c, RunOutput& out) {
    double xi = c.xis.at(0);
    double f = c.f;
    if (f <= 0.0) {
        BoundaryLimit b = boundary_data_required(c.model, xi);
        if (!b.converged || b.f_mu <= 0.0)
            throw ConfigError("no usable boundary density; supply f");
        f = b.f_mu;
    }
    JacobiParams params = jacobi_by_id(c.model);
    json rows = json::array();
    double worst = 0.0;
    for (double idx : c.indices) {
        auto gaps = clock_spacing(params, xi, long(idx), c.j_range, f);
        double dev = 0.0;
        for (double g : gaps) dev = std::max(dev, std::abs(g - 1.0));
        worst = std::max(worst, dev);
        rows.push_back({{"index", idx}, {"gaps", gaps}, {"max_deviation", dev}});
    }
    out.report["f"] = f;
    out.report["rows"] = rows;
    if (c.threshold >= 0.0 && worst > c.threshold)
        out.failures.push_back("gap deviation " + std::to_string(worst) +
                               " above threshold");
}

void run_subordinacy(const ExperimentConfig& c, RunOutput& out) {
    JacobiParams params = jacobi_by_id(c.model);
    json rows = json::array();
    for (double xi : c.xis) {
        for (double idx : c.indices) {
            rows.push_back({{"xi", xi},
                            {"index", idx},
                            {"ratio", subordinacy_ratio(params, xi, long(idx))}});
        }
    }
    out.report["rows"] = rows;
}

void run_opuc(const ExperimentConfig& c, int jobs,
              const std::vector<Complex>& grid, RunOutput& out) {
    double xi = c.xis.at(0);
    VerblunskyParams alphas = VerblunskyParams::by_id(c.model);
    std::vector<ScaledTable> tables(c.indices.size());
    parallel_for(c.indices.size(), jobs, [&](size_t i) {
        tables[i] = opuc_universality(alphas, xi, c.g, long(c.indices[i]), grid);
    });
    json rows = json::array();
    double last = 0.0;
    for (size_t i = 0; i < tables.size(); ++i) {
        rows.push_back({{"index", c.indices[i]},
                        {"sup_error", tables[i].sup_error},
                        {"scale", tables[i].table.scale}});
        last = tables[i].sup_error;
        out.files.emplace_back(c.prefix + "_" + index_label(c.indices[i]) + ".csv",
                               tables[i].table.to_csv());
    }
    out.report["g"] = c.g;
    out.report["rows"] = rows;
    if (c.threshold >= 0.0 && last > c.threshold)
        out.failures.push_back("sup_error " + std::to_string(last) +
                               " above threshold");
}

void run_cansys_check(const ExperimentConfig& c,
                      const std::vector<Complex>& grid, RunOutput& out) {
    const std::string rkey = "ring:";
    if (c.model.rfind(rkey, 0) != 0)
        throw ConfigError("cansys-check expects a ring:<eta> model");
    RingObjects r = ring_objects(parse_eta(c.model.substr(rkey.size())));
    double horizon = 0.0;
    for (double t : c.indices) horizon = std::max(horizon, t);
    HamiltonianSystem sys =
        HamiltonianSystem::constant(r.hmat, Mat2C::zero(), horizon + 1.0);
    double sup_m = 0.0, sup_k = 0.0;
    for (double t : c.indices) {
        for (Complex z : grid) {
            sup_m = std::max(sup_m, (integrate_transfer(sys, t, z) -
                                     r.m_ring(t * z)).max_abs());
            for (Complex w : grid)
                sup_k = std::max(sup_k, (cansys_kernel(sys, t, z, w) -
                                         r.k_ring_t(t, z, w)).max_abs());
        }
    }
    out.report["eta"] = eta_json(r.eta);
    out.report["sup_solution_error"] = sup_m;
    out.report["sup_kernel_error"] = sup_k;
    double bound = c.threshold >= 0.0 ? c.threshold : 1e-8;
    if (std::max(sup_m, sup_k) > bound)
        out.failures.push_back("closed-form deviation above " +
                               std::to_string(bound));
}

void run_mfun(const ExperimentConfig& c, RunOutput& out) {
    ModelM model = ModelM::by_id(c.model);
    json rows = json::array();
    for (double xi : c.xis) {
        BoundaryLimit b = boundary_limit(model, xi, dyadic_schedule(40), 1e-9);
        rows.push_back({{"xi", xi},
                        {"converged", b.converged},
                        {"boundary_real", b.boundary_real},
                        {"oscillation", b.oscillation},
                        {"f_mu", b.f_mu},
                        {"eta", b.converged ? eta_json(b.eta) : json(nullptr)}});
    }
    out.report["rows"] = rows;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    static const std::vector<std::string> allowed = {
        "schema", "kind", "model",     "prefix",    "xi",          "index",
        "grid",   "f",    "g",         "eta",       "j_range",     "threshold",
        "assert_decay"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError("unknown config key: " + it.key());
    }
    if (!j.contains("schema") || j["schema"] != 1)
        throw ConfigError("missing or unsupported schema version");
    ExperimentConfig c;
    try {
        c.kind = j.at("kind").get<std::string>();
        c.model = j.at("model").get<std::string>();
        if (j.contains("prefix"))
            c.prefix = j["prefix"].get<std::string>();
        if (j.contains("eta"))
            c.eta = j["eta"].get<std::string>();
        if (j.contains("xi")) {
            if (j["xi"].is_array())
                c.xis = j["xi"].get<std::vector<double>>();
            else
                c.xis = {j["xi"].get<double>()};
        }
        if (j.contains("index"))
            c.indices = j["index"].get<std::vector<double>>();
        if (j.contains("grid")) {
            for (const auto& p : j["grid"]) {
                if (!p.is_array() || p.size() != 2)
                    throw ConfigError("grid entries must be [re, im]");
                c.grid.emplace_back(p[0].get<double>(), p[1].get<double>());
            }
        }
        if (j.contains("f"))
            c.f = j["f"].get<double>();
        if (j.contains("g"))
            c.g = j["g"].get<double>();
        if (j.contains("j_range"))
            c.j_range = j["j_range"].get<long>();
        if (j.contains("threshold"))
            c.threshold = j["threshold"].get<double>();
        if (j.contains("assert_decay"))
            c.assert_decay = j["assert_decay"].get<bool>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    if (std::find(kKinds.begin(), kKinds.end(), c.kind) == kKinds.end())
        throw ConfigError("unknown experiment kind: " + c.kind);
    bool needs_indices = c.kind != "mfun";
    if (needs_indices && c.indices.empty())
        throw ConfigError("index list must not be empty");
    bool needs_xi = c.kind != "kernel" && c.kind != "cansys-check";
    if (needs_xi && c.xis.empty())
        throw ConfigError("xi is required for this kind");
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

int run_experiment(const ExperimentConfig& c, const std::string& out_dir,
                   int jobs) {
    std::vector<Complex> grid = c.grid.empty() ? default_grid_points() : c.grid;
    RunOutput out;
    out.report["kind"] = c.kind;
    out.report["model"] = c.model;
    out.report["schema"] = 1;
    if (!c.xis.empty())
        out.report["xi"] = c.xis;
    if (!c.indices.empty())
        out.report["index"] = c.indices;
    out.report["grid_points"] = grid.size();

    if (c.kind == "kernel")
        run_kernel(c, jobs, grid, out);
    else if (c.kind == "universality-scalar")
        run_scalar(c, jobs, grid, out);
    else if (c.kind == "universality-matrix")
        run_matrix_like(c, jobs, grid, false, out);
    else if (c.kind == "equivalence")
        run_matrix_like(c, jobs, grid, true, out);
    else if (c.kind == "clock")
        run_clock(c, out);
    else if (c.kind == "subordinacy")
        run_subordinacy(c, out);
    else if (c.kind == "opuc")
        run_opuc(c, jobs, grid, out);
    else if (c.kind == "cansys-check")
        run_cansys_check(c, grid, out);
    else
        run_mfun(c, out);

    out.report["pass"] = out.failures.empty();
    out.report["failures"] = out.failures;

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream rep(fs::path(out_dir) / (c.prefix + "_report.json"));
        rep << out.report.dump(2) << "\n";
    }
    for (const auto& [name, content] : out.files) {
        std::ofstream f(fs::path(out_dir) / name);
        f << content;
    }
    {
        // timestamps live outside the reproducible artifacts
        std::ofstream meta(fs::path(out_dir) / (c.prefix + "_meta.txt"));
        auto now = std::chrono::system_clock::to_time_t(
            std::chrono::system_clock::now());
        char buf[64];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        meta << "generated_at: " << buf << "\n";
    }
    if (!out.failures.empty()) {
        for (const auto& f : out.failures)
            std::fprintf(stderr, "assertion failed: %s\n", f.c_str());
        return 1;
    }
    return 0;
}

std::vector<std::string> list_models() {
    return {"free-jacobi",
            "chebyshev",
            "two-atom:<x1>,<w1>,<x2>,<w2>",
            "schrodinger:<v>,<beta>,<length>",
            "ring:<eta>,<length>  (eta: 're[,im]' or 'inf')",
            "log-periodic  (mfun)",
            "discrete:<x>:<w>,...  (mfun)",
            "schrodinger-free  (mfun)",
            "opuc-free",
            "opuc-constant:<re>[,<im>]",
            "opuc-list:<re>[,<im>];..."};
}

}  // namespace cdk
