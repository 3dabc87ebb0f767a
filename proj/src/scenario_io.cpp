#include "sparsebench/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sparsebench::scenario_io {

namespace {

using nlohmann::json;

datagen::ScenarioSpec parse_one(const json& obj) {
  if (!obj.is_object()) throw ScenarioError("scenario must be a JSON object");
  datagen::ScenarioSpec spec;

  const bool has_setting = obj.contains("setting");
  const bool has_shape = obj.contains("n") || obj.contains("p") || obj.contains("s");
  if (has_setting && has_shape)
    throw ScenarioError("give either \"setting\" or explicit n/p/s, not both");
  if (!has_setting && !(obj.contains("n") && obj.contains("p") && obj.contains("s")))
    throw ScenarioError("need \"setting\" or all of n, p, s");

  try {
    if (has_setting) {
      datagen::apply_setting(spec, obj.at("setting").get<std::string>());
    } else {
      spec.setting = "custom";
      spec.n = obj.at("n").get<int>();
      spec.p = obj.at("p").get<int>();
      spec.s = obj.at("s").get<int>();
    }
    if (obj.contains("beta_type")) spec.beta_type = obj.at("beta_type").get<int>();
    if (obj.contains("rho")) spec.rho = obj.at("rho").get<double>();
    if (obj.contains("reps")) spec.reps = obj.at("reps").get<int>();
    if (obj.contains("seed")) spec.seed = obj.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("bad scenario field: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }

  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (key != "setting" && key != "n" && key != "p" && key != "s" &&
        key != "beta_type" && key != "rho" && key != "snr" && key != "reps" &&
        key != "seed")
      throw ScenarioError("unknown scenario key \"" + key + "\"");
  }
  return spec;
}

std::vector<datagen::ScenarioSpec> expand_snr(const datagen::ScenarioSpec& base,
                                              const json& obj) {
  if (!obj.contains("snr")) throw ScenarioError("missing \"snr\"");
  const json& snr = obj.at("snr");
  std::vector<double> values;
  if (snr.is_number()) {
    values.push_back(snr.get<double>());
  } else if (snr.is_array()) {
    for (const auto& v : snr) {
      if (!v.is_number()) throw ScenarioError("\"snr\" list must be numeric");
      values.push_back(v.get<double>());
    }
    if (values.empty()) throw ScenarioError("\"snr\" list is empty");
  } else {
    throw ScenarioError("\"snr\" must be a number or a list of numbers");
  }
  std::vector<datagen::ScenarioSpec> specs;
  for (double v : values) {
    datagen::ScenarioSpec spec = base;
    spec.snr = v;
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(e.what());
    }
    specs.push_back(spec);
  }
  return specs;
}

}  // namespace

std::vector<datagen::ScenarioSpec> parse_scenarios(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object())
    throw ScenarioError("scenario file must contain a JSON object");
  return expand_snr(parse_one(doc), doc);
}

std::vector<datagen::ScenarioSpec> load_scenarios(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ScenarioError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenarios(buf.str());
}

}  // namespace sparsebench::scenario_io
