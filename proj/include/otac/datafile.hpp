#pragma once

// Plot-ready sweep table.
//
//   # free-form comment lines (optional)
//   xi_dB mse_opt mse_eq se_opt se_eq
//   0.0000 1.2345678901e+03 ...
//
// Space-delimited UTF-8 text. Readers skip '#' lines and accept commas as
// delimiters as well.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "simulator.hpp"

namespace otac {

inline constexpr std::string_view sweep_header = "xi_dB mse_opt mse_eq se_opt se_eq";

inline std::string format_sweep_row(const SweepRecord& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.4f %.10e %.10e %.10e %.10e", r.xi_db, r.mse_opt, r.mse_eq, r.se_opt,
                  r.se_eq);
    return buf;
}

inline void write_sweep_table(std::ostream& os, const std::vector<SweepRecord>& rows,
                              const std::vector<std::string>& comments = {}) {
    for (const auto& c : comments) os << "# " << c << '\n';
    os << sweep_header << '\n';
    for (const auto& r : rows) os << format_sweep_row(r) << '\n';
}

inline std::vector<SweepRecord> read_sweep_table(std::istream& is) {
    std::vector<SweepRecord> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line.front() == '#') continue;
        for (auto& ch : line)
            if (ch == ',') ch = ' ';
        if (!header_seen) {
            std::istringstream hs(line);
            std::string joined, tok;
            while (hs >> tok) joined += (joined.empty() ? "" : " ") + tok;
            if (joined != sweep_header) throw DomainError("unexpected sweep header: " + line);
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        SweepRecord r;
        if (!(ls >> r.xi_db >> r.mse_opt >> r.mse_eq >> r.se_opt >> r.se_eq))
            throw DomainError("malformed sweep row: " + line);
        rows.push_back(r);
    }
    if (!header_seen) throw DomainError("sweep table has no header");
    return rows;
}

} // namespace otac
