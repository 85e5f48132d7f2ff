#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "qudit/config.hpp"
#include "qudit/data.hpp"

using namespace qudit;
namespace fs = std::filesystem;

TEST_SUITE("config") {

TEST_CASE("defaults and overrides") {
    const auto c = parse_config(
        "[experiment]\nkind = method_compare\nseed = 9\n"
        "[data]\ndataset = iris\n"
        "[model]\nd = 2, 3,4\nmethod = implicit, explicit\nencoding = g1\n"
        "[train]\nrestarts = 7\nstep = 0.1\n");
    CHECK(c.kind == ExperimentKind::MethodCompare);
    CHECK(c.seed == 9);
    CHECK(c.train.seed == 9);
    CHECK(c.data.split_seed == 9);
    CHECK(c.model.dims == std::vector<int>{2, 3, 4});
    CHECK(c.model.methods == std::vector<Method>{Method::Implicit, Method::Explicit});
    CHECK(c.model.encodings == std::vector<EncodingVariant>{EncodingVariant::g1});
    CHECK(c.train.restarts == 7);
    CHECK(c.train.adam.step == 0.1);
    CHECK(c.train.adam.beta1 == 0.9);
    CHECK(c.data.path.filename() == "iris.csv");
    CHECK(c.data.path.is_absolute());
    CHECK(c.echo.at("train").at("step") == "0.1");
    CHECK(c.echo.at("model").at("d") == "2,3,4");
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("noise and mos sections") {
    const auto c = parse_config(
        "[experiment]\nkind = noise_sweep\n"
        "[noise]\nT1 = 0.1\nT2 = 1e-4, 1.5915e-8\nruns = 5\niterations = 12\n"
        "[mos]\nd = 3\nK = 5\nexponent = 4\n");
    CHECK(c.noise.T2 == std::vector<double>{1e-4, 1.5915e-8});
    CHECK(c.noise.runs == 5);
    CHECK(c.train.spsa.iterations == 12);
    CHECK(c.mos_dim == 3);
    CHECK(c.mos_count == 5);
    CHECK(c.mos.exponent == 4.0);
    CHECK(c.echo.at("noise").at("T2") == "1e-04,1.5915e-08");
}

TEST_CASE("relative paths") {
    const auto dir = testutil::scratch_dir("config_paths");
    std::ofstream(dir / "exp.ini") << "[experiment]\nkind = train_eval\n[data]\ndataset = iris\ndata_dir = here\n"
                                      "[model]\ncenters = mos_file\nmos_file = centers.txt\n";
    const auto c = load_config(dir / "exp.ini");
    CHECK(c.data.path == dir / "here" / "iris.csv");
    CHECK(c.model.mos_file == dir / "centers.txt");
    CHECK(c.model.centers == CenterSource::MosFile);
    CHECK_THROWS_AS(c.validate(), DataError);  // neither file exists
}

TEST_CASE("environment variable sets the data directory") {
    const auto dir = testutil::scratch_dir("config_env");
    ::setenv("QUDIT_DATA_DIR", dir.c_str(), 1);
    const auto c = parse_config("[experiment]\nkind = train_eval\n[data]\ndataset = breast_cancer\n");
    ::unsetenv("QUDIT_DATA_DIR");
    CHECK(c.data.path == dir / "breast_cancer.csv");
    CHECK(default_data_dir() != dir);
}

TEST_CASE("rejected configs") {
    CHECK_THROWS_AS(parse_config("[data]\ndataset = iris\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nkind = dance\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nkind = train_eval\nsede = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nkind = train_eval\n[extra]\na = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nkind = train_eval\n[train]\nrestarts = many\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nkind = train_eval\n[model]\nencoding = g7\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nkind = train_eval\n[data]\ndataset = cifar\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nkind = train_eval\n[model]\nd = 1\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nkind = train_eval\n[model]\nlayers = 0\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nkind = train_eval\n[mos]\ncrossover = 2\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment\nkind = train_eval\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("shipped configs are valid") {
    int seen = 0;
    for (const auto& entry : fs::directory_iterator(QUDIT_TEST_CONFIG_DIR)) {
        if (entry.path().extension() != ".ini") continue;
        CAPTURE(entry.path());
        CHECK_NOTHROW(load_config(entry.path()).validate());
        ++seen;
    }
    CHECK(seen >= 5);
}

}
