#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spectra {

inline constexpr const char* kToolkitVersion = "0.1.0";

// FNV-1a 64-bit content digests for run manifests.
std::uint64_t fnv1a(const void* data, std::size_t len);
std::uint64_t fnv1a(const std::string& s);
std::uint64_t fnv1a_file(const std::string& path);
std::string digest_hex(std::uint64_t digest);

struct ManifestInput {
  std::string name;  // path as given
  std::uint64_t digest = 0;
};

// Run provenance: resolved config digest, input file digests, toolkit
// version, seed and a wall-clock timestamp.  (The timestamp lives here, not
// in summary.json, which must be reproducible byte for byte.)
std::string manifest_json(const std::string& config_json, const std::vector<ManifestInput>& inputs,
                          std::uint64_t seed);

}  // namespace spectra
