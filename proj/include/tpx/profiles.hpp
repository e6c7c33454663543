#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tpx {

enum class CodingConfig { AI, LB, RA };

std::string to_string(CodingConfig config);
CodingConfig parse_config(const std::string& name);

enum class ToolGroup { Intra, Inter, TransformQuant, InLoopFilter, Other };

std::string to_string(ToolGroup group);
ToolGroup parse_group(const std::string& name);

struct ToolDescriptor {
  int index = 0;  // catalog position, 1-based and contiguous
  std::string name;
  ToolGroup group = ToolGroup::Other;
  std::vector<CodingConfig> applicability;
  std::map<CodingConfig, bool> ctc_default;  // defined exactly for applicability

  bool applies_to(CodingConfig config) const;
};

// Ordered list of switchable tools with per-configuration applicability and
// CTC defaults. The built-in catalog describes the 28 VVC tools; custom
// catalogs load from JSON with the same schema, so the search is generic
// over any binary-switch space.
class ToolCatalog {
 public:
  static const ToolCatalog& builtin();
  static ToolCatalog from_json(const std::string& json_text);
  static ToolCatalog from_file(const std::string& path);

  const std::string& name() const { return name_; }
  const std::vector<ToolDescriptor>& tools() const { return tools_; }
  const ToolDescriptor& tool(const std::string& name) const;
  const ToolDescriptor* find(const std::string& name) const;
  std::vector<const ToolDescriptor*> applicable(CodingConfig config) const;

  // Stable hash over every descriptor field; cache keys embed it so entries
  // computed under an edited catalog are never reused.
  std::string fingerprint() const;

 private:
  ToolCatalog() = default;
  void validate() const;

  std::string name_;
  std::vector<ToolDescriptor> tools_;
};

// Binary usage vector over the tools applicable to one coding configuration.
// Immutable value type: mutation goes through toggle(), which returns a copy.
class ToolProfile {
 public:
  ToolProfile(CodingConfig config, std::map<std::string, bool> usage);

  CodingConfig config() const { return config_; }
  const std::map<std::string, bool>& usage() const { return usage_; }
  bool enabled(const std::string& tool) const;

  // Order-independent over tool names; two equal profiles hash equally.
  std::uint64_t canonical_hash() const;
  std::string hash_hex() const;

  bool operator==(const ToolProfile& other) const = default;

 private:
  CodingConfig config_;
  std::map<std::string, bool> usage_;
};

ToolProfile ctc_profile(const ToolCatalog& catalog, CodingConfig config);

// Returns a copy with exactly one bit flipped; inapplicable names are errors.
ToolProfile toggle(const ToolProfile& profile, const std::string& tool);

// Auxiliary encoder switches implied by the profile. Currently one rule:
// SignDataHiding is the alternative to dependent quantization, so it is
// enabled exactly when DQ is applicable and off.
std::map<std::string, bool> derived_switches(const ToolProfile& profile);

// JSON round-trip, schema {"config":"RA","tools":{"CCLM":true,...}} with the
// key set exactly the applicable tools. parse rejects missing/unknown names.
std::string emit_profile(const ToolProfile& profile);
ToolProfile parse_profile(const ToolCatalog& catalog, const std::string& json_text);

}  // namespace tpx
