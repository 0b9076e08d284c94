#include "snse/csv.hpp"

#include <fstream>
#include <stdexcept>
#include <sys/stat.h>

namespace snse {

void write_table_csv(const std::string& path, const Table& table, bool append) {
    bool exists = false;
    if (append) {
        struct stat st{};
        exists = ::stat(path.c_str(), &st) == 0 && st.st_size > 0;
    }
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    if (!exists) {
        for (const auto& [k, v] : table.meta) out << "# " << k << " = " << v << "\n";
        for (std::size_t i = 0; i < table.columns.size(); ++i)
            out << (i ? "," : "") << table.columns[i];
        out << "\n";
    }
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << fmt17(row[i]);
        out << "\n";
    }
}

}  // namespace snse
