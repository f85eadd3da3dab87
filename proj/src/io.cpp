#include "auxbound/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

namespace auxbound {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string OutputMeta::render() const {
    std::string out;
    out += "# auxbound " + command + "\n";
    out += "# configHash=" + config_hash + "\n";
    for (const auto& [key, value] : fields) out += "# " + key + "=" + value + "\n";
    return out;
}

std::string CsvTable::render(const OutputMeta& meta) const {
    std::string out = meta.render();
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out += ',';
        out += columns[c];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("atomic_write: cannot open " + tmp.string());
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw Error("atomic_write: write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

} // namespace auxbound
