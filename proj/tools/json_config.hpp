#pragma once

#include <istream>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace focalspec::cli {

/// CLI11 config formatter reading and writing JSON. Top-level keys are global
/// options; an object-valued key names a subcommand and holds its options.
/// Values are kept as the strings CLI11 parsed, so a written file replays exactly.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                          std::string prefix) const override;
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace focalspec::cli
