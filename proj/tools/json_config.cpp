#include "json_config.hpp"

#include <json.hpp>

namespace focalspec::cli {

namespace {

using nlohmann::ordered_json;

long long flag_value(const std::string& result) {
    if (result.empty() || result == "true" || result == "on" || result == "yes") return 1;
    if (result == "false" || result == "off" || result == "no") return 0;
    try {
        return std::stoll(result);
    } catch (const std::exception&) {
        return 1;
    }
}

ordered_json options_to_json(const CLI::App* app, bool default_also) {
    ordered_json j = ordered_json::object();
    for (const CLI::Option* opt : app->get_options()) {
        if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
        const std::string& name = opt->get_lnames().front();
        if (name == "help" || name == "config") continue;

        if (opt->get_expected_max() != 0) {
            const auto& results = opt->results();
            if (results.size() == 1 && opt->get_items_expected_max() <= 1) {
                j[name] = results.front();
            } else if (!results.empty()) {
                j[name] = results;
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        } else {
            // A replayed count arrives as one result holding the number.
            long long count = 0;
            for (const std::string& r : opt->results()) count += flag_value(r);
            if (count > 1) {
                j[name] = count;
            } else if (count == 1 || default_also) {
                j[name] = count == 1;
            }
        }
    }
    // Only subcommands that actually ran are recorded.
    for (const CLI::App* sub : app->get_subcommands()) j[sub->get_name()] = options_to_json(sub, default_also);
    return j;
}

std::vector<std::string> scalar_inputs(const nlohmann::json& value, const std::string& name) {
    if (value.is_string()) return {value.get<std::string>()};
    if (value.is_boolean()) return {value.get<bool>() ? "true" : "false"};
    if (value.is_number_integer()) return {std::to_string(value.get<long long>())};
    if (value.is_number()) return {value.dump()};
    if (value.is_array()) {
        std::vector<std::string> out;
        for (const auto& item : value) {
            if (item.is_array() || item.is_object()) throw CLI::ConversionError("nested value in config key " + name);
            auto one = scalar_inputs(item, name);
            out.insert(out.end(), one.begin(), one.end());
        }
        return out;
    }
    throw CLI::ConversionError("unsupported value for config key " + name);
}

void collect(const nlohmann::json& object, const std::vector<std::string>& parents,
             std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : object.items()) {
        if (value.is_object()) {
            auto section = parents;
            section.push_back(key);
            // "++" / "--" open and close a section; CLI11 uses them to trigger subcommands.
            out.push_back({section, "++", {}});
            collect(value, section, out);
            out.push_back({section, "--", {}});
        } else {
            out.push_back({parents, key, scalar_inputs(value, key)});
        }
    }
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool, std::string) const {
    return options_to_json(app, default_also).dump(2) + "\n";
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
    nlohmann::json j;
    try {
        input >> j;
    } catch (const nlohmann::json::exception& e) {
        throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
}

}  // namespace focalspec::cli
