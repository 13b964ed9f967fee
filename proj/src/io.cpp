#include "qrenew/io.hpp"

#include "qrenew/grid.hpp"
#include "qrenew/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace qrenew {

std::string format_double(double value) {
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

TimeGrid::TimeGrid(double horizon, std::size_t intervals) : horizon_(horizon), intervals_(intervals) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ParameterError("time horizon T must be positive");
    if (intervals == 0) throw ParameterError("time grid needs at least one interval");
}

TimeGrid TimeGrid::with_step(double horizon, double step) {
    if (!(step > 0.0)) throw ParameterError("grid step must be positive");
    const double n = std::round(horizon / step);
    if (n < 1.0 || n > 1e8) throw ParameterError("grid step incompatible with horizon");
    return TimeGrid(horizon, static_cast<std::size_t>(n));
}

std::vector<double> TimeGrid::points() const {
    std::vector<double> out(size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = at(j);
    return out;
}

}  // namespace qrenew
