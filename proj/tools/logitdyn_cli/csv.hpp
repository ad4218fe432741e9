#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "logitdyn/random.hpp"
#include "logitdyn_cli/config.hpp"

namespace logitdyn::cli {

/// Shortest round-trip text for a double; identical across runs.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string num(std::uint64_t v) { return std::to_string(v); }

/// Comma-separated table with a provenance comment line, then the header.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const ExperimentConfig& config, const std::vector<std::string>& columns)
        : out_(path, std::ios::binary), width_(columns.size()) {
        if (!out_) throw config_error("cannot write '" + path.string() + "'");
        out_ << "# config_hash=" << config_hash(config) << " seed=" << config.seed << " generator=" << kGeneratorName
             << '\n';
        row(columns);
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != width_) throw dimension_error("csv row width mismatch");
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out_ << ',';
            out_ << cells[k];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
    std::size_t width_;
};

}  // namespace logitdyn::cli
