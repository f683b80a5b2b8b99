#include "modopo/config.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "modopo/csv.hpp"
#include "modopo/errors.hpp"

namespace modopo {
namespace {

using Field = std::pair<const char*, double DimensionlessConfig::*>;

constexpr std::array<Field, 8> kFields{{
    {"gamma3_over_gamma", &DimensionlessConfig::gamma3_over_gamma},
    {"k_over_gamma", &DimensionlessConfig::k_over_gamma},
    {"fbar_over_fth", &DimensionlessConfig::fbar_over_fth},
    {"f1_over_fbar", &DimensionlessConfig::f1_over_fbar},
    {"delta_over_gamma", &DimensionlessConfig::delta_over_gamma},
    {"phi", &DimensionlessConfig::phi},
    {"phi_L", &DimensionlessConfig::phi_L},
    {"phi_K", &DimensionlessConfig::phi_K},
}};

}  // namespace

DimensionlessConfig parse_config(std::string_view json_text, const DimensionlessConfig& defaults)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    DimensionlessConfig c = defaults;
    for (const auto& [key, value] : doc.items()) {
        const Field* match = nullptr;
        for (const Field& f : kFields) {
            if (key == f.first) {
                match = &f;
            }
        }
        if (match == nullptr) {
            throw ConfigError("unknown configuration key '" + key + "'");
        }
        if (!value.is_number()) {
            throw ConfigError("configuration key '" + key + "' must be a number");
        }
        c.*(match->second) = value.get<double>();
    }
    return c;
}

DimensionlessConfig load_config(const std::filesystem::path& path, const DimensionlessConfig& defaults)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open configuration file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), defaults);
}

std::string to_json(const DimensionlessConfig& c)
{
    std::string out = "{";
    bool first = true;
    for (const Field& f : kFields) {
        if (!first) {
            out += ",";
        }
        first = false;
        out += "\"";
        out += f.first;
        out += "\":";
        out += format_double(c.*(f.second));
    }
    return out + "}";
}

}  // namespace modopo
