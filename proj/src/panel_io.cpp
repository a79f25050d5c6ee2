#include "bidop/panel_io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace bidop {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw PanelFormatError(std::string("panel csv: bad ") + what + " '" + s + "'");
    }
}

std::size_t parse_index(const std::string& s, const char* what) {
    std::size_t v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        throw PanelFormatError(std::string("panel csv: bad ") + what + " '" + s + "'");
    return v;
}

}  // namespace

void write_panel_csv(std::ostream& os, const PhasePanel& panel, const std::string& profile_name) {
    os << "# bidop phase panel\n";
    os << "# profile=" << profile_name << '\n';
    os << "# period_s=" << fmt_double(panel.period_s) << '\n';
    os << "# frames=" << panel.frames << '\n';
    os << "# paths=" << panel.paths << '\n';
    os << "# truth_f_d_target=" << fmt_double(panel.truth.f_d_target) << '\n';
    os << "# truth_eta=" << fmt_double(panel.truth.eta) << '\n';
    os << "# truth_v_rx=" << fmt_double(panel.truth.v_rx) << '\n';
    os << "k,path_id,phase,aoa\n";
    for (std::size_t k = 0; k < panel.frames; ++k)
        for (std::size_t i = 0; i < panel.paths; ++i)
            os << k << ',' << i << ',' << fmt_double(panel.at(k, i).radians()) << ','
               << fmt_double(panel.aoa_meas[i]) << '\n';
}

PanelFile read_panel_csv(std::istream& is) {
    std::map<std::string, std::string> meta;
    std::string line;
    bool header_seen = false;
    struct Row {
        std::size_t k, path;
        double phase, aoa;
    };
    std::vector<Row> rows;
    std::size_t line_no = 0;

    while (std::getline(is, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) meta[trim(line.substr(1, eq - 1))] = trim(line.substr(eq + 1));
            continue;
        }
        if (!header_seen) {
            if (line != "k,path_id,phase,aoa")
                throw PanelFormatError("panel csv: expected header 'k,path_id,phase,aoa' at line " +
                                       std::to_string(line_no));
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
        if (cells.size() != 4)
            throw PanelFormatError("panel csv: expected 4 columns at line " + std::to_string(line_no));
        rows.push_back({parse_index(cells[0], "frame index"), parse_index(cells[1], "path id"),
                        parse_double(cells[2], "phase"), parse_double(cells[3], "aoa")});
    }
    if (!header_seen) throw PanelFormatError("panel csv: missing header row");
    if (rows.empty()) throw PanelFormatError("panel csv: no data rows");

    std::size_t frames = 0, paths = 0;
    for (const Row& r : rows) {
        frames = std::max(frames, r.k + 1);
        paths = std::max(paths, r.path + 1);
    }
    if (frames < 2) throw PanelFormatError("panel csv: need at least two frames");
    if (paths < 2) throw PanelFormatError("panel csv: need LoS and target paths");

    auto period = meta.find("period_s");
    if (period == meta.end()) throw PanelFormatError("panel csv: missing '# period_s=' metadata");

    PanelFile out;
    PhasePanel& p = out.panel;
    p.frames = frames;
    p.paths = paths;
    p.period_s = parse_double(period->second, "period_s");
    if (!(p.period_s > 0.0)) throw PanelFormatError("panel csv: period_s must be positive");
    p.phases.resize(frames * paths);
    p.aoa_meas.assign(paths, 0.0);
    std::vector<bool> seen(frames * paths, false);
    std::vector<bool> aoa_set(paths, false);
    for (const Row& r : rows) {
        const std::size_t idx = r.k * paths + r.path;
        if (seen[idx])
            throw PanelFormatError("panel csv: duplicate entry for frame " + std::to_string(r.k) +
                                   ", path " + std::to_string(r.path));
        if (!(r.phase >= 0.0 && r.phase < kTwoPi))
            throw PanelFormatError("panel csv: phase outside [0, 2pi)");
        seen[idx] = true;
        p.phases[idx] = Phase::from_radians(r.phase);
        if (!aoa_set[r.path]) {
            p.aoa_meas[r.path] = r.aoa;
            aoa_set[r.path] = true;
        }
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw PanelFormatError("panel csv: missing entry for frame " + std::to_string(i / paths) +
                                   ", path " + std::to_string(i % paths));
    p.aoa_meas[0] = 0.0;
    p.path_gains.assign(paths, {1.0, 0.0});

    if (auto it = meta.find("profile"); it != meta.end() && !it->second.empty()) out.profile = it->second;
    auto f = meta.find("truth_f_d_target");
    auto e = meta.find("truth_eta");
    auto v = meta.find("truth_v_rx");
    if (f != meta.end() && e != meta.end() && v != meta.end()) {
        p.truth = {parse_double(f->second, "truth"), parse_double(e->second, "truth"),
                   parse_double(v->second, "truth")};
        out.has_truth = true;
    }
    return out;
}

}  // namespace bidop
