#include "grassflow/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace grassflow::io {

using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json skew_to_json(const SkewMatrix& l) {
    json j;
    j["n"] = l.n;
    j["comps"] = std::vector<double>(l.comps.data(), l.comps.data() + l.comps.size());
    return j;
}

SkewMatrix skew_from_json(const json& j) {
    if (!j.contains("n") || !j.contains("comps"))
        fail(errc::config, "skew matrix needs keys n, comps");
    const int n = j.at("n").get<int>();
    const auto comps = j.at("comps").get<std::vector<double>>();
    if (static_cast<int>(comps.size()) != pair_count(n))
        fail(errc::config, "skew matrix comps length != n(n-1)/2");
    return SkewMatrix(n, Eigen::Map<const Eigen::VectorXd>(comps.data(), comps.size()));
}

json deformation_to_json(const Deformation& d) {
    json terms = json::array();
    for (const Polynomial::Term& t : d.psi.terms())
        terms.push_back({{"coeff", t.coeff}, {"powers", t.powers}});
    return json{{"n", d.n}, {"epsilon", d.epsilon}, {"terms", terms}};
}

Deformation deformation_from_json(const json& j) {
    if (!j.contains("n")) fail(errc::config, "deformation needs key n");
    const int n = j.at("n").get<int>();
    if (n < 2) fail(errc::config, "deformation needs n >= 2");
    const double eps = j.value("epsilon", 0.0);
    if (!(eps >= 0.0) || !std::isfinite(eps)) fail(errc::config, "epsilon must be finite and >= 0");
    Polynomial psi(n);
    if (!j.contains("terms")) fail(errc::config, "deformation needs key terms");
    for (const json& t : j.at("terms")) {
        if (!t.contains("coeff") || !t.contains("powers"))
            fail(errc::config, "deformation term needs coeff and powers");
        const auto powers = t.at("powers").get<std::vector<int>>();
        if (static_cast<int>(powers.size()) != n)
            fail(errc::config, "deformation term powers length != n");
        psi.add_term(t.at("coeff").get<double>(), powers);
    }
    return Deformation(n, std::move(psi), eps);
}

std::string trajectory_csv(const GeodesicTrajectory& traj, bool momentum_columns) {
    std::ostringstream os;
    if (traj.samples.empty()) return "";
    const int n = static_cast<int>(traj.samples.front().x.size());
    os << "t";
    for (int i = 0; i < n; ++i) os << ",x_" << i;
    for (int i = 0; i < n; ++i) os << ",v_" << i;
    if (momentum_columns)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) os << "," << pair_label(i, j);
    os << "\n";
    for (const ParticleState& s : traj.samples) {
        os << format_double(s.t);
        for (int i = 0; i < n; ++i) os << "," << format_double(s.x[i]);
        for (int i = 0; i < n; ++i) os << "," << format_double(s.v[i]);
        if (momentum_columns) {
            const SkewMatrix l = momentum_from_state(s);
            for (int k = 0; k < l.comps.size(); ++k) os << "," << format_double(l.comps[k]);
        }
        os << "\n";
    }
    return os.str();
}

std::string reduced_csv(const ReducedTrajectory& traj) {
    std::ostringstream os;
    if (traj.samples.empty()) return "";
    const int n = traj.samples.front().l.n;
    os << "t";
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) os << "," << pair_label(i, j);
    os << ",H,l2,plucker_max";
    os << "\n";
    for (const ReducedSample& s : traj.samples) {
        os << format_double(s.t);
        for (int k = 0; k < s.l.comps.size(); ++k) os << "," << format_double(s.l.comps[k]);
        os << "," << format_double(s.H) << "," << format_double(s.l2) << ","
           << format_double(s.plucker_max) << "\n";
    }
    return os.str();
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
    std::ostringstream os;
    os << "e1,e2,e3,type\n";
    for (const ScanRow& r : rows)
        os << format_double(r.e1) << "," << format_double(r.e2) << "," << format_double(r.e3) << ","
           << portrait_type_name(r.type) << "\n";
    return os.str();
}

std::string section_csv(const std::vector<SectionPoint>& points) {
    std::ostringstream os;
    if (points.empty()) return "t\n";
    const int n = points.front().l.n;
    os << "t";
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) os << "," << pair_label(i, j);
    os << "\n";
    for (const SectionPoint& p : points) {
        os << format_double(p.t);
        for (int k = 0; k < p.l.comps.size(); ++k) os << "," << format_double(p.l.comps[k]);
        os << "\n";
    }
    return os.str();
}

json portrait_to_json(const PortraitReport& report) {
    json pts = json::array();
    for (const StationaryPoint& p : report.points) {
        pts.push_back({{"L", {p.L[0], p.L[1], p.L[2]}},
                       {"family", family_name(p.family)},
                       {"stability", stability_name(p.stability)},
                       {"rhs_norm", p.rhs_norm}});
    }
    return json{{"epsilon_coeffs", {report.coeffs[0], report.coeffs[1], report.coeffs[2]}},
                {"type", portrait_type_name(report.type)},
                {"centers", report.centers},
                {"saddles", report.saddles},
                {"points", pts}};
}

json drift_report_to_json(const DriftReport& report) {
    return json{{"sup_deviation", report.sup_deviation},
                {"epsilon", report.epsilon},
                {"T", report.T},
                {"kappa", report.kappa},
                {"samples", report.samples}};
}

int CsvTable::column(const std::string& name) const {
    for (size_t k = 0; k < header.size(); ++k)
        if (header[k] == name) return static_cast<int>(k);
    return -1;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io, "cannot open " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) fail(errc::io, "empty CSV " + path);
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != table.header.size()) fail(errc::io, "ragged CSV row in " + path);
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(errc::io, "cannot write " + tmp.string());
        out << content;
        if (!out.flush()) fail(errc::io, "write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io, "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace grassflow::io
