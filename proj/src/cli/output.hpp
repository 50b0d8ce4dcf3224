// output.hpp: CSV/JSON writers with embedded provenance.
//
// Every file carries the normalized config and a SHA-256 of its own data
// section, so outputs can be matched to the run that produced them. Nothing
// time- or machine-dependent is written.

#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace anharm::cli {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(const std::string& data);

// Shortest text that reads back to the same double.
std::string format_number(double v);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    std::string body() const; // header row plus data rows
};

class OutputWriter {
public:
    OutputWriter(std::filesystem::path dir, std::string subcommand, nlohmann::json config);

    // Writes <name> with comment lines carrying the config and data hash.
    void write_csv(const std::string& name, const Table& table);
    // Writes <name> as pretty JSON with the config, file hashes, and `body`.
    void write_json(const std::string& name, nlohmann::json body);

    const nlohmann::json& file_hashes() const noexcept { return hashes_; }
    const std::string& config_hash() const noexcept { return config_hash_; }

private:
    void write_file(const std::string& name, const std::string& content);

    std::filesystem::path dir_;
    std::string subcommand_;
    nlohmann::json config_;
    std::string config_text_;
    std::string config_hash_;
    nlohmann::json hashes_ = nlohmann::json::object();
};

} // namespace anharm::cli
