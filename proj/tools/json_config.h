#pragma once

#include <istream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace ldpsurvey::cli {

// Reads --config files written as JSON. Top-level scalars are global flags
// or, when no global flag has that name, flags of the selected subcommand;
// objects keyed by a subcommand name hold that subcommand's flags. Values
// from the command line always win.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App* app, bool default_also, bool,
                        std::string) const override {
    nlohmann::json out = nlohmann::json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string& name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& res = opt->results();
        out[name] = res.size() == 1 ? nlohmann::json(res.front()) : nlohmann::json(res);
      } else if (default_also && !opt->get_default_str().empty()) {
        out[name] = opt->get_default_str();
      }
    }
    return out.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError("config", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config", "top level must be an object");

    std::string selected;
    for (const CLI::App* sub : root_->get_subcommands()) selected = sub->get_name();

    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        for (const auto& [inner, v] : value.items()) items.push_back(item({key}, inner, v));
      } else if (root_->get_option_no_throw("--" + key) != nullptr || selected.empty()) {
        items.push_back(item({}, key, value));
      } else {
        items.push_back(item({selected}, key, value));
      }
    }
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static CLI::ConfigItem item(std::vector<std::string> parents, const std::string& name,
                              const nlohmann::json& value) {
    CLI::ConfigItem it;
    it.parents = std::move(parents);
    it.name = name;
    if (value.is_array()) {
      for (const auto& v : value) it.inputs.push_back(scalar(v));
    } else {
      it.inputs.push_back(scalar(value));
    }
    return it;
  }

  const CLI::App* root_;
};

}  // namespace ldpsurvey::cli
