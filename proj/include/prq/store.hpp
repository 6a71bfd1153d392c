#pragma once

// Run configuration hashing, the JSON result store (directory per run, config
// hash as the filename stem, atomic write-temp-rename), and the result cache.

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace prq {

inline constexpr const char* kArtifactVersion = "1.0.0";

std::uint64_t fnv1a64(const std::string& bytes);

// Hash of the canonical (key-sorted) JSON dump; timestamps never participate.
std::string config_hash(const nlohmann::json& config);

void atomic_write_file(const std::filesystem::path& path, const std::string& bytes);
void atomic_write_json(const std::filesystem::path& path, const nlohmann::json& j);

class Store {
public:
    explicit Store(std::filesystem::path root);

    std::filesystem::path run_dir(const std::string& hash) const;

    // Wraps the payload as a StoredResult {config hash, kind, payload,
    // version, timestamp} and writes it atomically.
    std::filesystem::path put(const std::string& hash, const std::string& kind,
                              const nlohmann::json& payload);

    // Payload of a cached StoredResult with matching artifact version.
    std::optional<nlohmann::json> get(const std::string& hash) const;

    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
};

}  // namespace prq
