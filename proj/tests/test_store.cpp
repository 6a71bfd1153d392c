#include "prq/store.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

using namespace prq;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("prq_store_test_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config hash is stable and key-order independent") {
    json a{{"pattern", "schur"}, {"k", 2}};
    json b;
    b["k"] = 2;
    b["pattern"] = "schur";
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    json c = a;
    c["k"] = 3;
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("store put/get round trip with version check") {
    TempDir tmp;
    Store store(tmp.path);
    json payload{{"value", 4}, {"pattern", "schur"}};
    std::string h = config_hash(payload);
    fs::path p = store.put(h, "extremal", payload);
    CHECK(fs::exists(p));
    CHECK(p.filename() == "result.json");
    auto got = store.get(h);
    REQUIRE(got);
    CHECK(*got == payload);
    CHECK(!store.get("0000000000000000"));

    // stored wrapper carries kind, version and timestamp
    std::ifstream f(p);
    json wrapped;
    f >> wrapped;
    CHECK(wrapped["result_kind"] == "extremal");
    CHECK(wrapped["artifact_version"] == kArtifactVersion);
    CHECK(wrapped.contains("timestamp"));

    // a version mismatch invalidates the cache entry
    wrapped["artifact_version"] = "0.0.0";
    atomic_write_json(p, wrapped);
    CHECK(!store.get(h));
}

TEST_CASE("atomic write leaves no temp file behind") {
    TempDir tmp;
    fs::path target = tmp.path / "x.json";
    atomic_write_json(target, json{{"a", 1}});
    CHECK(fs::exists(target));
    CHECK(!fs::exists(tmp.path / "x.json.tmp"));
}
