#include "spectra/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "json.hpp"
#include "spectra/errors.hpp"

namespace spectra {

std::uint64_t fnv1a(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot read file for digest: " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[1 << 16];
  while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
    const auto n = static_cast<std::size_t>(is.gcount());
    for (std::size_t i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!is) break;
  }
  return h;
}

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

std::string manifest_json(const std::string& config_json, const std::vector<ManifestInput>& inputs,
                          std::uint64_t seed) {
  nlohmann::json m;
  m["config_digest"] = digest_hex(fnv1a(config_json));
  nlohmann::json files = nlohmann::json::array();
  for (const auto& in : inputs)
    files.push_back({{"path", in.name}, {"digest", digest_hex(in.digest)}});
  m["inputs"] = files;
  m["seed"] = seed;
  m["toolkit_version"] = kToolkitVersion;

  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm);
  m["timestamp"] = stamp;
  return m.dump(2) + "\n";
}

}  // namespace spectra
