#include "prq/store.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>

namespace prq {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string config_hash(const json& config) {
    // nlohmann objects iterate in key order, so dump() is canonical.
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config.dump())));
    return std::string(buf);
}

void atomic_write_file(const fs::path& path, const std::string& bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << bytes;
    }
    fs::rename(tmp, path);
}

void atomic_write_json(const fs::path& path, const json& j) {
    atomic_write_file(path, j.dump(2) + "\n");
}

Store::Store(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path Store::run_dir(const std::string& hash) const {
    fs::path dir = root_ / hash;
    fs::create_directories(dir);
    return dir;
}

fs::path Store::put(const std::string& hash, const std::string& kind, const json& payload) {
    auto now = std::chrono::system_clock::now().time_since_epoch();
    json wrapped{{"config_hash", hash},
                 {"result_kind", kind},
                 {"payload", payload},
                 {"artifact_version", kArtifactVersion},
                 {"timestamp",
                  std::chrono::duration_cast<std::chrono::seconds>(now).count()}};
    fs::path path = run_dir(hash) / "result.json";
    atomic_write_json(path, wrapped);
    return path;
}

std::optional<json> Store::get(const std::string& hash) const {
    fs::path path = root_ / hash / "result.json";
    std::ifstream f(path);
    if (!f) return std::nullopt;
    json wrapped;
    try {
        f >> wrapped;
    } catch (const json::exception&) {
        return std::nullopt;
    }
    if (wrapped.value("artifact_version", "") != kArtifactVersion) return std::nullopt;
    if (!wrapped.contains("payload")) return std::nullopt;
    return wrapped["payload"];
}

}  // namespace prq
