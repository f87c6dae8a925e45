#ifndef COULREG_REPORT_HPP
#define COULREG_REPORT_HPP

#include <chrono>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coulreg/errors.hpp"

namespace coulreg {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// One verified claim: a named check, the statement it tests (kept as a
/// data field so reports are self-describing), measured values, verdict.
struct CheckRecord {
    std::string name;
    std::string anchor;
    nlohmann::json values;
    bool pass = false;
    std::string note;
};

struct RunReport {
    std::string scenario;
    std::string subcommand;
    nlohmann::json config_echo;
    std::uint64_t seed = 0;
    std::vector<CheckRecord> checks;
    bool pass = true;
    double wall_ms = 0.0;

    void add(CheckRecord rec) {
        pass = pass && rec.pass;
        checks.push_back(std::move(rec));
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["scenario"] = scenario;
        j["subcommand"] = subcommand;
        j["config"] = config_echo;
        j["seed"] = seed;
        j["version"] = kLibraryVersion;
        j["pass"] = pass;
        j["wall_ms"] = wall_ms;
        j["checks"] = nlohmann::json::array();
        for (const auto& c : checks) {
            nlohmann::json r;
            r["name"] = c.name;
            r["anchor"] = c.anchor;
            r["values"] = c.values;
            r["pass"] = c.pass;
            if (!c.note.empty()) r["note"] = c.note;
            j["checks"].push_back(std::move(r));
        }
        return j;
    }
};

inline void write_report(const RunReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open report path: " + path);
    out << report.to_json().dump(2) << "\n";
}

/// Flat CSV companion for per-center / per-radius tables.
inline void write_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns, const std::string& path) {
    if (columns.size() != header.size()) throw Error("write_csv: header/column mismatch");
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open csv path: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    const std::size_t rows = columns.empty() ? 0 : columns[0].size();
    out.precision(17);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << columns[c][r] << (c + 1 < columns.size() ? "," : "\n");
}

class WallTimer {
  public:
    WallTimer() : start_(std::chrono::steady_clock::now()) {}
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace coulreg

#endif
