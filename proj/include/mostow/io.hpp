#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mostow/cartan.hpp"

namespace mostow {

inline constexpr int kSchemaVersion = 1;

/// On-disk form of a Cartan split. Matrices are row-major flat arrays.
struct PresentationDocument {
  int schema_version = kSchemaVersion;
  int n = 0;
  std::vector<std::vector<double>> basis;
  std::vector<int> k_indices;
  std::vector<int> p_indices;
  std::optional<std::string> name;
};

/// Throws Error(ParseError) with the byte position, or Error(SchemaError)
/// whose message starts with the offending JSON pointer.
PresentationDocument parse_presentation(std::string_view text);

/// Canonical form: sorted keys, two-space indent, shortest round-trip
/// doubles, trailing newline.
std::string emit_presentation(const PresentationDocument& doc);

CartanSplit to_split(const PresentationDocument& doc);
PresentationDocument from_split(const CartanSplit& split, std::optional<std::string> name = {});

struct CatalogEntry {
  std::string name;
  std::string description;
  PresentationDocument document;
  bool semisimple = true;
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry* find_catalog_entry(std::string_view name);

}  // namespace mostow
