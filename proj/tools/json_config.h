#ifndef SPOOFSIM_TOOLS_JSON_CONFIG_H_
#define SPOOFSIM_TOOLS_JSON_CONFIG_H_

#include <CLI11.hpp>
#include <istream>
#include <json.hpp>
#include <string>
#include <vector>

namespace spoofsim::cli {

// CLI11 config reader/writer for a flat JSON object whose keys are option
// names, prefixed with "<subcommand>." for subcommand options.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::json j = nlohmann::json::object();
    Collect(app, "", default_also, j);
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config: expected a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      std::string rest = key;
      for (auto dot = rest.find('.'); dot != std::string::npos; dot = rest.find('.')) {
        item.parents.push_back(rest.substr(0, dot));
        rest = rest.substr(dot + 1);
      }
      item.name = rest;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(Scalar(v));
      } else {
        item.inputs.push_back(Scalar(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string Scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config: unsupported value " + v.dump());
  }

  static void Collect(const CLI::App* app, const std::string& prefix, bool default_also,
                      nlohmann::json& j) {
    for (const CLI::Option* opt : app->get_options()) {
      if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
      const std::string key = prefix + opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& results = opt->results();
        if (opt->get_type_size() == 0) {
          j[key] = true;
        } else if (results.size() == 1) {
          j[key] = results.front();
        } else {
          j[key] = results;
        }
      } else if (default_also && !opt->get_default_str().empty()) {
        j[key] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      Collect(sub, prefix + sub->get_name() + ".", default_also, j);
    }
  }
};

}  // namespace spoofsim::cli

#endif  // SPOOFSIM_TOOLS_JSON_CONFIG_H_
