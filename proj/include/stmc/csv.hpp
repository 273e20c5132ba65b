#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

// CSV helpers.  Doubles are printed with %.17g so a value survives the
// round trip and two runs of the same computation produce identical bytes.

namespace stmc {

inline std::string csv_cell(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string csv_cell(std::size_t n) { return std::to_string(n); }
inline std::string csv_cell(int n) { return std::to_string(n); }
inline const std::string& csv_cell(const std::string& s) { return s; }

inline void csv_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
    }
    out << '\n';
}

}  // namespace stmc
