#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rfc {

/// Malformed input; path() names the offending field, e.g. "market.sigma".
class SchemaError : public std::invalid_argument {
public:
    SchemaError(std::string path, const std::string& message);
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json read_json_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, const std::string& text);

/// Strict reader over one JSON object: every accessed key is recorded and
/// finish() rejects the rest. Values read, defaults included, are echoed
/// into resolved(), shared with the readers of nested objects.
class ObjectReader {
public:
    ObjectReader(const nlohmann::json& j, std::string path);

    const nlohmann::json& resolved() const noexcept { return *sink_; }

    const std::string& path() const noexcept { return path_; }
    std::string child(const std::string& key) const;
    bool has(const std::string& key) const;

    const nlohmann::json& raw(const std::string& key);
    double number(const std::string& key);
    double number(const std::string& key, double fallback);
    double positive(const std::string& key);
    double positive(const std::string& key, double fallback);
    std::size_t count(const std::string& key);
    std::size_t count(const std::string& key, std::size_t fallback);
    std::uint64_t u64(const std::string& key, std::uint64_t fallback);
    bool boolean(const std::string& key, bool fallback);
    std::string string(const std::string& key);
    std::string string(const std::string& key, const std::string& fallback);
    std::vector<double> numbers(const std::string& key);
    ObjectReader object(const std::string& key);
    std::vector<ObjectReader> objects(const std::string& key);

    void finish() const;

private:
    ObjectReader(const nlohmann::json& j, std::string path, std::shared_ptr<nlohmann::json> sink,
                 nlohmann::json::json_pointer at);
    template <typename T>
    T echo(const std::string& key, T value)
    {
        (*sink_)[at_ / key] = value;
        return value;
    }

    const nlohmann::json* j_;
    std::string path_;
    std::set<std::string> used_;
    std::shared_ptr<nlohmann::json> sink_;
    nlohmann::json::json_pointer at_;
};

/// Number at `path` or a SchemaError.
double json_number(const nlohmann::json& j, const std::string& path);

}  // namespace rfc
