#include "tpx/profiles.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tpx/error.hpp"

namespace tpx {

namespace detail {
const char* builtin_catalog_json();  // generated from data/vvc_tools.json

// FNV-1a, the only hash used for profile/catalog identity. Stable across
// platforms and runs, which the persistent cache relies on.
constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
  return fnv1a(h, s.data(), s.size());
}

std::string hex64(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}
}  // namespace detail

std::string to_string(CodingConfig config) {
  switch (config) {
    case CodingConfig::AI: return "AI";
    case CodingConfig::LB: return "LB";
    case CodingConfig::RA: return "RA";
  }
  throw ConfigError("invalid CodingConfig value");
}

CodingConfig parse_config(const std::string& name) {
  if (name == "AI") return CodingConfig::AI;
  if (name == "LB") return CodingConfig::LB;
  if (name == "RA") return CodingConfig::RA;
  throw ConfigError("unknown coding configuration '" + name + "' (expected AI, LB or RA)");
}

std::string to_string(ToolGroup group) {
  switch (group) {
    case ToolGroup::Intra: return "Intra";
    case ToolGroup::Inter: return "Inter";
    case ToolGroup::TransformQuant: return "TransformQuant";
    case ToolGroup::InLoopFilter: return "InLoopFilter";
    case ToolGroup::Other: return "Other";
  }
  throw ConfigError("invalid ToolGroup value");
}

ToolGroup parse_group(const std::string& name) {
  if (name == "Intra") return ToolGroup::Intra;
  if (name == "Inter") return ToolGroup::Inter;
  if (name == "TransformQuant") return ToolGroup::TransformQuant;
  if (name == "InLoopFilter") return ToolGroup::InLoopFilter;
  if (name == "Other") return ToolGroup::Other;
  throw ConfigError("unknown tool group '" + name + "'");
}

bool ToolDescriptor::applies_to(CodingConfig config) const {
  return std::find(applicability.begin(), applicability.end(), config) !=
         applicability.end();
}

const ToolCatalog& ToolCatalog::builtin() {
  static const ToolCatalog catalog = from_json(detail::builtin_catalog_json());
  return catalog;
}

ToolCatalog ToolCatalog::from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("catalog JSON parse error: ") + e.what());
  }

  ToolCatalog catalog;
  try {
    catalog.name_ = doc.at("name").get<std::string>();
    for (const auto& entry : doc.at("tools")) {
      ToolDescriptor tool;
      tool.index = entry.at("index").get<int>();
      tool.name = entry.at("name").get<std::string>();
      tool.group = parse_group(entry.at("group").get<std::string>());
      for (const auto& cfg : entry.at("applicability"))
        tool.applicability.push_back(parse_config(cfg.get<std::string>()));
      for (const auto& [cfg, enabled] : entry.at("ctc_default").items())
        tool.ctc_default[parse_config(cfg)] = enabled.get<bool>();
      catalog.tools_.push_back(std::move(tool));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("catalog JSON schema error: ") + e.what());
  }
  catalog.validate();
  return catalog;
}

ToolCatalog ToolCatalog::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open catalog file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return from_json(text.str());
}

void ToolCatalog::validate() const {
  if (tools_.empty()) throw ConfigError("catalog '" + name_ + "' has no tools");
  for (std::size_t i = 0; i < tools_.size(); ++i) {
    const ToolDescriptor& tool = tools_[i];
    if (tool.index != static_cast<int>(i) + 1)
      throw ConfigError("catalog indices must be contiguous from 1; tool '" + tool.name +
                        "' has index " + std::to_string(tool.index));
    if (tool.applicability.empty())
      throw ConfigError("tool '" + tool.name + "' is applicable to no configuration");
    if (tool.ctc_default.size() != tool.applicability.size())
      throw ConfigError("tool '" + tool.name +
                        "': ctc_default must cover exactly the applicable configurations");
    for (CodingConfig cfg : tool.applicability)
      if (!tool.ctc_default.count(cfg))
        throw ConfigError("tool '" + tool.name + "': missing ctc_default for " +
                          to_string(cfg));
    for (std::size_t j = i + 1; j < tools_.size(); ++j)
      if (tools_[j].name == tool.name)
        throw ConfigError("duplicate tool name '" + tool.name + "' in catalog");
  }
}

const ToolDescriptor* ToolCatalog::find(const std::string& name) const {
  for (const ToolDescriptor& tool : tools_)
    if (tool.name == name) return &tool;
  return nullptr;
}

const ToolDescriptor& ToolCatalog::tool(const std::string& name) const {
  const ToolDescriptor* tool = find(name);
  if (!tool) throw ConfigError("unknown tool '" + name + "' in catalog '" + name_ + "'");
  return *tool;
}

std::vector<const ToolDescriptor*> ToolCatalog::applicable(CodingConfig config) const {
  std::vector<const ToolDescriptor*> out;
  for (const ToolDescriptor& tool : tools_)
    if (tool.applies_to(config)) out.push_back(&tool);
  return out;
}

std::string ToolCatalog::fingerprint() const {
  std::uint64_t h = detail::kFnvOffset;
  h = detail::fnv1a(h, name_);
  for (const ToolDescriptor& tool : tools_) {
    h = detail::fnv1a(h, tool.name);
    h = detail::fnv1a(h, &tool.index, sizeof(tool.index));
    h = detail::fnv1a(h, to_string(tool.group));
    for (CodingConfig cfg : tool.applicability) {
      h = detail::fnv1a(h, to_string(cfg));
      const unsigned char bit = tool.ctc_default.at(cfg) ? 1 : 0;
      h = detail::fnv1a(h, &bit, 1);
    }
  }
  return detail::hex64(h);
}

ToolProfile::ToolProfile(CodingConfig config, std::map<std::string, bool> usage)
    : config_(config), usage_(std::move(usage)) {}

bool ToolProfile::enabled(const std::string& tool) const {
  auto it = usage_.find(tool);
  if (it == usage_.end())
    throw ConfigError("tool '" + tool + "' is not applicable to configuration " +
                      to_string(config_));
  return it->second;
}

std::uint64_t ToolProfile::canonical_hash() const {
  // usage_ iterates name-sorted, so the hash is order-independent by
  // construction.
  std::uint64_t h = detail::kFnvOffset;
  h = detail::fnv1a(h, to_string(config_));
  for (const auto& [name, bit] : usage_) {
    h = detail::fnv1a(h, name);
    const unsigned char b = bit ? 1 : 0;
    h = detail::fnv1a(h, &b, 1);
  }
  return h;
}

std::string ToolProfile::hash_hex() const { return detail::hex64(canonical_hash()); }

ToolProfile ctc_profile(const ToolCatalog& catalog, CodingConfig config) {
  std::map<std::string, bool> usage;
  for (const ToolDescriptor* tool : catalog.applicable(config))
    usage[tool->name] = tool->ctc_default.at(config);
  return {config, std::move(usage)};
}

ToolProfile toggle(const ToolProfile& profile, const std::string& tool) {
  std::map<std::string, bool> usage = profile.usage();
  auto it = usage.find(tool);
  if (it == usage.end())
    throw ConfigError("cannot toggle '" + tool + "': not applicable to configuration " +
                      to_string(profile.config()));
  it->second = !it->second;
  return {profile.config(), std::move(usage)};
}

std::map<std::string, bool> derived_switches(const ToolProfile& profile) {
  std::map<std::string, bool> switches;
  auto it = profile.usage().find("DQ");
  if (it != profile.usage().end()) switches["SignDataHiding"] = !it->second;
  return switches;
}

std::string emit_profile(const ToolProfile& profile) {
  nlohmann::json tools = nlohmann::json::object();
  for (const auto& [name, bit] : profile.usage()) tools[name] = bit;
  nlohmann::json doc;
  doc["config"] = to_string(profile.config());
  doc["tools"] = tools;
  return doc.dump();
}

ToolProfile parse_profile(const ToolCatalog& catalog, const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("profile JSON parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("config") || !doc.contains("tools"))
    throw ConfigError("profile JSON must be an object with 'config' and 'tools'");

  const CodingConfig config = parse_config(doc["config"].get<std::string>());
  if (!doc["tools"].is_object()) throw ConfigError("profile 'tools' must be an object");

  std::map<std::string, bool> usage;
  for (const auto& [name, bit] : doc["tools"].items()) {
    const ToolDescriptor* tool = catalog.find(name);
    if (!tool) throw ConfigError("unknown tool '" + name + "' in profile");
    if (!tool->applies_to(config))
      throw ConfigError("tool '" + name + "' is not applicable to configuration " +
                        to_string(config));
    if (!bit.is_boolean()) throw ConfigError("tool '" + name + "' usage must be a boolean");
    usage[name] = bit.get<bool>();
  }
  for (const ToolDescriptor* tool : catalog.applicable(config))
    if (!usage.count(tool->name))
      throw ConfigError("missing tool '" + tool->name + "' for configuration " +
                        to_string(config));
  return {config, std::move(usage)};
}

}  // namespace tpx
