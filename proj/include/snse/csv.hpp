#pragma once

#include <cstdio>
#include <string>

#include "snse/verify.hpp"

namespace snse {

/// 17 significant digits so values round-trip losslessly.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Writes '#'-prefixed metadata lines followed by the CSV body (header + rows).
/// Only the metadata may vary between identical runs (wall time).
void write_table_csv(const std::string& path, const Table& table, bool append = false);

}  // namespace snse
