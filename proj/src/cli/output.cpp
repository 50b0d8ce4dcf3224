#include "output.hpp"

#include "anharm/errors.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace anharm::cli {

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256_hex: digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string Table::body() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
        out += "\n";
    }
    return out;
}

OutputWriter::OutputWriter(std::filesystem::path dir, std::string subcommand, nlohmann::json config)
    : dir_(std::move(dir)), subcommand_(std::move(subcommand)), config_(std::move(config)) {
    config_text_ = config_.dump();
    config_hash_ = sha256_hex(config_text_);
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError(dir_.string() + ": cannot create output directory: " + ec.message());
}

void OutputWriter::write_file(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(path.string() + ": cannot open for writing");
    out << content;
    if (!out) throw ConfigError(path.string() + ": write failed");
}

void OutputWriter::write_csv(const std::string& name, const Table& table) {
    const std::string body = table.body();
    const std::string data_hash = sha256_hex(body);
    std::string text;
    text += "# anharm " + subcommand_ + " " + kToolVersion + "\n";
    text += "# config: " + config_text_ + "\n";
    text += "# config_sha256: " + config_hash_ + "\n";
    text += "# data_sha256: " + data_hash + "\n";
    text += body;
    write_file(name, text);
    hashes_[name] = data_hash;
}

void OutputWriter::write_json(const std::string& name, nlohmann::json body) {
    nlohmann::json doc;
    doc["tool"] = "anharm";
    doc["version"] = kToolVersion;
    doc["subcommand"] = subcommand_;
    doc["config"] = config_;
    doc["config_sha256"] = config_hash_;
    doc["files"] = hashes_;
    for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
    const std::string content_hash = sha256_hex(doc.dump());
    doc["content_sha256"] = content_hash;
    write_file(name, doc.dump(2) + "\n");
    hashes_[name] = content_hash;
}

} // namespace anharm::cli
