#include "hbd/problem_io.hpp"

#include <fstream>

#include "hbd/errors.hpp"

namespace hbd {

namespace {

Matrix matrix_field(const nlohmann::json& j, const char* key, std::size_t cols) {
    if (!j.contains(key) || j[key].is_null()) return Matrix(0, cols);
    auto rows = j[key].get<std::vector<std::vector<double>>>();
    return Matrix::from_rows(rows, cols);
}

std::vector<double> vector_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return {};
    return j[key].get<std::vector<double>>();
}

nlohmann::json matrix_json(const Matrix& m) {
    auto out = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        out.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return out;
}

}  // namespace

MixedIntegerProgram mip_from_json(const nlohmann::json& j) {
    MixedIntegerProgram m;
    m.n_y = j.at("n_y").get<std::size_t>();
    m.n_z = j.at("n_z").get<std::size_t>();
    const auto sense = j.value("coupling_sense", std::string("eq"));
    if (sense == "eq") m.coupling_sense = CouplingSense::equality;
    else if (sense == "leq") m.coupling_sense = CouplingSense::leq;
    else throw DimensionError("coupling_sense must be \"eq\" or \"leq\"");
    m.f_quadratic = matrix_field(j, "f_quadratic", m.n_y);
    if (m.f_quadratic.rows() == 0) m.f_quadratic = Matrix(m.n_y, m.n_y);
    m.f_linear = vector_field(j, "f_linear");
    if (m.f_linear.empty()) m.f_linear.assign(m.n_y, 0.0);
    m.g = vector_field(j, "g");
    if (m.g.empty()) m.g.assign(m.n_z, 0.0);
    m.A_y = matrix_field(j, "A_y", m.n_y);
    m.A_z = matrix_field(j, "A_z", m.n_z);
    m.b = vector_field(j, "b");
    m.C = matrix_field(j, "C", m.n_z);
    m.d = vector_field(j, "d");
    return m;
}

nlohmann::json mip_to_json(const MixedIntegerProgram& m) {
    nlohmann::json j;
    j["n_y"] = m.n_y;
    j["n_z"] = m.n_z;
    j["coupling_sense"] = m.coupling_sense == CouplingSense::equality ? "eq" : "leq";
    j["f_quadratic"] = matrix_json(m.f_quadratic);
    j["f_linear"] = m.f_linear;
    j["g"] = m.g;
    j["A_y"] = matrix_json(m.A_y);
    j["A_z"] = matrix_json(m.A_z);
    j["b"] = m.b;
    j["C"] = matrix_json(m.C);
    j["d"] = m.d;
    return j;
}

MixedIntegerProgram load_mip(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return mip_from_json(nlohmann::json::parse(in));
}

void save_mip(const std::filesystem::path& path, const MixedIntegerProgram& mip) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << mip_to_json(mip).dump(2) << '\n';
}

nlohmann::json assignment_to_json(const Assignment& a) {
    nlohmann::json j;
    j["y"] = std::vector<int>(a.y.begin(), a.y.end());
    j["z"] = a.z;
    return j;
}

}  // namespace hbd
