#pragma once

#include <string>
#include <vector>

namespace subkit {

struct BundledSpec {
  std::string name;        // file stem, e.g. "nonCL"
  std::string title;
  std::string provenance;  // where the example comes from, with a short quote
  std::string source;      // DSL text
};

const std::vector<BundledSpec>& bundled_specs();

/// Looks a bundled spec up by name; nullptr when absent.
const BundledSpec* find_bundled(const std::string& name);

/// The exported file form: a '#' header with title and provenance, then the source.
std::string bundled_file_text(const BundledSpec& spec);

}  // namespace subkit
