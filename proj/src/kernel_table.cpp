#include "cdk/kernel_table.hpp"

#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace cdk {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

std::string KernelTable::to_csv() const {
    if ((matrix ? mvalues.size() : svalues.size()) != grid.size())
        throw std::logic_error("kernel table size mismatch");
    std::string out = "re_z,im_z,re_w,im_w";
    if (matrix)
        out +=
            ",re_k11,im_k11,re_k12,im_k12,re_k21,im_k21,re_k22,im_k22\n";
    else
        out += ",re_value,im_value\n";
    for (size_t i = 0; i < grid.size(); ++i) {
        const auto& [z, w] = grid[i];
        out += fmt(z.real()) + "," + fmt(z.imag()) + "," + fmt(w.real()) + "," +
               fmt(w.imag());
        if (matrix) {
            const Mat2C& m = mvalues[i];
            for (Complex e : {m.e11, m.e12, m.e21, m.e22})
                out += "," + fmt(e.real()) + "," + fmt(e.imag());
        } else {
            out += "," + fmt(svalues[i].real()) + "," + fmt(svalues[i].imag());
        }
        out += "\n";
    }
    return out;
}

std::string KernelTable::to_json_string() const {
    nlohmann::json j;
    j["model"] = model_id;
    j["xi"] = xi;
    j["scale"] = scale;
    j["index"] = index;
    j["matrix"] = matrix;
    auto& g = j["grid"] = nlohmann::json::array();
    for (const auto& [z, w] : grid)
        g.push_back({z.real(), z.imag(), w.real(), w.imag()});
    auto& v = j["values"] = nlohmann::json::array();
    if (matrix) {
        for (const Mat2C& m : mvalues)
            v.push_back({m.e11.real(), m.e11.imag(), m.e12.real(), m.e12.imag(),
                         m.e21.real(), m.e21.imag(), m.e22.real(),
                         m.e22.imag()});
    } else {
        for (Complex c : svalues) v.push_back({c.real(), c.imag()});
    }
    return j.dump(2) + "\n";
}

}  // namespace cdk
