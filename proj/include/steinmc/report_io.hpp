#pragma once

#include <filesystem>
#include <string>

#include "steinmc/bn_terms.hpp"
#include "steinmc/bounds.hpp"
#include "steinmc/knn.hpp"
#include "steinmc/sigma_series.hpp"

namespace steinmc {

inline constexpr const char* kVersion = "0.1.0";

// JSON renderings of the report records (schema: name, value, stderr,
// method, seed, reps).
std::string to_json(const GammaEstimates& est);
std::string to_json(const BoundReport& report);
std::string to_json(const SigmaSeries& series);
std::string to_json(const LocalDependenceReport& report);
std::string to_json(const BnTerms& terms);

// FNV-1a hash of a canonical config rendering; embedded in every output
// row for provenance.
std::uint64_t config_hash(const std::string& canonical_config);

// Writes content to path through a temp file + atomic rename, so partial
// outputs never appear under the final name.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

// CSV assembly with the provenance prefix columns.
class CsvBuilder {
 public:
  CsvBuilder(std::uint64_t config_hash, std::uint64_t seed,
             const std::string& columns);
  void add_row(const std::string& row);
  const std::string& content() const { return content_; }

 private:
  std::string prefix_;
  std::string content_;
};

}  // namespace steinmc
