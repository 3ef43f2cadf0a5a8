#include "rfc/schema.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace rfc {

SchemaError::SchemaError(std::string path, const std::string& message)
    : std::invalid_argument(path + ": " + message), path_(std::move(path))
{
}

nlohmann::json read_json_file(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw IoError("cannot open " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(file.string(), std::string("invalid JSON: ") + e.what());
    }
}

void write_text_file(const std::filesystem::path& file, const std::string& text)
{
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + file.string());
    out << text;
    if (!out)
        throw IoError("write failed: " + file.string());
}

double json_number(const nlohmann::json& j, const std::string& path)
{
    if (!j.is_number())
        throw SchemaError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        throw SchemaError(path, "expected a finite number");
    return v;
}

ObjectReader::ObjectReader(const nlohmann::json& j, std::string path)
    : ObjectReader(j, std::move(path), std::make_shared<nlohmann::json>(nlohmann::json::object()),
                   nlohmann::json::json_pointer())
{
}

ObjectReader::ObjectReader(const nlohmann::json& j, std::string path, std::shared_ptr<nlohmann::json> sink,
                           nlohmann::json::json_pointer at)
    : j_(&j), path_(std::move(path)), sink_(std::move(sink)), at_(std::move(at))
{
    if (!j.is_object())
        throw SchemaError(path_, "expected an object");
    if (!sink_->contains(at_) || !(*sink_)[at_].is_object())
        (*sink_)[at_] = nlohmann::json::object();
}

std::string ObjectReader::child(const std::string& key) const
{
    return path_.empty() ? key : path_ + "." + key;
}

bool ObjectReader::has(const std::string& key) const
{
    return j_->contains(key);
}

const nlohmann::json& ObjectReader::raw(const std::string& key)
{
    if (!j_->contains(key))
        throw SchemaError(child(key), "missing required field");
    used_.insert(key);
    (*sink_)[at_ / key] = j_->at(key);
    return j_->at(key);
}

double ObjectReader::number(const std::string& key)
{
    return json_number(raw(key), child(key));
}

double ObjectReader::number(const std::string& key, double fallback)
{
    return has(key) ? number(key) : echo(key, fallback);
}

double ObjectReader::positive(const std::string& key)
{
    const double v = number(key);
    if (!(v > 0.0))
        throw SchemaError(child(key), "must be positive");
    return v;
}

double ObjectReader::positive(const std::string& key, double fallback)
{
    return has(key) ? positive(key) : echo(key, fallback);
}

std::size_t ObjectReader::count(const std::string& key)
{
    const auto& v = raw(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw SchemaError(child(key), "expected a non-negative integer");
    return v.get<std::size_t>();
}

std::size_t ObjectReader::count(const std::string& key, std::size_t fallback)
{
    return has(key) ? count(key) : echo(key, fallback);
}

std::uint64_t ObjectReader::u64(const std::string& key, std::uint64_t fallback)
{
    if (!has(key))
        return echo(key, fallback);
    const auto& v = raw(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw SchemaError(child(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

bool ObjectReader::boolean(const std::string& key, bool fallback)
{
    if (!has(key))
        return echo(key, fallback);
    const auto& v = raw(key);
    if (!v.is_boolean())
        throw SchemaError(child(key), "expected true or false");
    return v.get<bool>();
}

std::string ObjectReader::string(const std::string& key)
{
    const auto& v = raw(key);
    if (!v.is_string())
        throw SchemaError(child(key), "expected a string");
    return v.get<std::string>();
}

std::string ObjectReader::string(const std::string& key, const std::string& fallback)
{
    return has(key) ? string(key) : echo(key, fallback);
}

std::vector<double> ObjectReader::numbers(const std::string& key)
{
    const auto& v = raw(key);
    if (!v.is_array())
        throw SchemaError(child(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(json_number(v[i], child(key) + "[" + std::to_string(i) + "]"));
    return out;
}

ObjectReader ObjectReader::object(const std::string& key)
{
    return ObjectReader(raw(key), child(key), sink_, at_ / key);
}

std::vector<ObjectReader> ObjectReader::objects(const std::string& key)
{
    const auto& v = raw(key);
    if (!v.is_array())
        throw SchemaError(child(key), "expected an array of objects");
    std::vector<ObjectReader> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(ObjectReader(v[i], child(key) + "[" + std::to_string(i) + "]", sink_, at_ / key / i));
    return out;
}

void ObjectReader::finish() const
{
    for (const auto& [key, _] : j_->items())
        if (!used_.count(key))
            throw SchemaError(child(key), "unknown key");
}

}  // namespace rfc
