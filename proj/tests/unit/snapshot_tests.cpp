#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "kgex/snapshot.hpp"
#include "kgex/trainer.hpp"
#include "support/test_support.hpp"

using namespace kgex;
using namespace kgex::testing;

namespace {

std::string temp_path(const char* tag) {
    static int counter = 0;
    return (std::filesystem::temp_directory_path() /
            ("kgex_snap_" + std::to_string(::getpid()) + "_" + tag + std::to_string(counter++)))
        .string();
}

}  // namespace

TEST_CASE("snapshot round-trips model tables bitwise") {
    auto store = memorization_toy_store();
    ModelConfig cfg;
    cfg.kind = ModelKind::ComplEx;
    cfg.k = 6;
    cfg.max_epochs = 5;
    cfg.batch_size = 64;
    auto model = train(store, cfg);

    auto path = temp_path("roundtrip");
    save_snapshot(path, model);
    auto loaded = load_snapshot(path);
    CHECK(loaded.model.entity_table() == model.entity_table());
    CHECK(loaded.model.relation_table() == model.relation_table());
    CHECK(loaded.model.config().kind == ModelKind::ComplEx);
    CHECK(loaded.model.config().k == 6);
    CHECK(loaded.model.trained_epochs() == 5);
    CHECK(!loaded.calibrator.has_value());
    CHECK(loaded.model.fingerprint() == model.fingerprint());
    std::filesystem::remove(path);
}

TEST_CASE("snapshot carries the calibrator when present") {
    auto store = memorization_toy_store();
    ModelConfig cfg;
    cfg.learning_rate = 1e-2;
    cfg.max_epochs = 60;
    cfg.batch_size = 4;
    auto model = train(store, cfg);
    auto cal = Calibrator::fit(model, store, 2, 9);

    auto path = temp_path("cal");
    save_snapshot(path, model, &cal);
    auto loaded = load_snapshot(path);
    REQUIRE(loaded.calibrator.has_value());
    CHECK(loaded.calibrator->slope() == cal.slope());
    CHECK(loaded.calibrator->intercept() == cal.intercept());
    CHECK(loaded.calibrator->negative_ratio() == cal.negative_ratio());
    CHECK(loaded.calibrator->model_fingerprint() == model.fingerprint());
    std::filesystem::remove(path);
}

TEST_CASE("repeated saves are byte-identical") {
    auto store = memorization_toy_store();
    ModelConfig cfg;
    cfg.max_epochs = 3;
    auto model = train(store, cfg);
    auto p1 = temp_path("bytes"), p2 = temp_path("bytes");
    save_snapshot(p1, model);
    save_snapshot(p2, model);

    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    CHECK(slurp(p1) == slurp(p2));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("corrupt snapshots are rejected") {
    auto path = temp_path("bad");
    {
        std::ofstream out(path, std::ios::binary);
        out << "definitely not a snapshot";
    }
    CHECK_THROWS_WITH_AS(load_snapshot(path), doctest::Contains("magic"), Error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_snapshot("/nonexistent/kgex.snapshot"), Error);
}
