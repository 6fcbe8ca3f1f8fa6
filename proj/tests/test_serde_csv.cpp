#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "runavg/csv.hpp"
#include "runavg/serde.hpp"
#include "runavg/signals.hpp"

using namespace runavg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("runavg_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

} // namespace

TEST_CASE("CSV round trip is bit exact") {
    TempDir tmp;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    std::vector<double> values(257);
    for (double& v : values) v = dist(rng);
    values[3] = 1.0 / 3.0;
    values[4] = 1e-300;
    const UniformSignal original(UniformGrid(0.0, 1e-3, values.size()), values);

    const fs::path file = tmp.path / "sig.csv";
    write_signal_csv(file, original);
    const UniformSignal loaded = read_signal_csv(file);

    REQUIRE(loaded.size() == original.size());
    CHECK(loaded.grid().dt() == original.grid().dt());
    for (std::size_t k = 0; k < loaded.size(); ++k) CHECK(loaded[k] == original[k]);
}

TEST_CASE("CSV reader validates header, rows and uniformity") {
    TempDir tmp;
    const auto write = [&](const char* name, const char* body) {
        std::ofstream os(tmp.path / name);
        os << body;
        return tmp.path / name;
    };
    CHECK_THROWS_AS(read_signal_csv(write("h.csv", "time,v\n0,1\n1,2\n")), data_error);
    CHECK_THROWS_AS(read_signal_csv(write("r.csv", "t,value\n0;1\n")), data_error);
    CHECK_THROWS_AS(read_signal_csv(write("one.csv", "t,value\n0,1\n")), data_error);
    CHECK_THROWS_AS(read_signal_csv(write("nan.csv", "t,value\n0,1\n1,nan\n")), data_error);
    CHECK_THROWS_AS(read_signal_csv(write("nonuni.csv", "t,value\n0,1\n1,2\n2.5,3\n")), data_error);
    CHECK_THROWS_AS(read_signal_csv(tmp.path / "missing.csv"), io_error);

    // t0 > 0 loads fine (storage is allowed; averaging rejects it later).
    const UniformSignal shifted = read_signal_csv(write("sh.csv", "t,value\n1,5\n2,6\n3,7\n"));
    CHECK(shifted.grid().t0() == 1.0);
    CHECK_THROWS_AS(running_average(shifted), precondition_error);
}

TEST_CASE("spec JSON round trip") {
    const std::vector<SignalSpec> corpus{
        MonomialOsc{2, 1.5, Phase::cos, 0.5},
        SignalSpec{make_sin_squared(1)},
        Constant{3.25},
        Monomial{3, -2.0},
    };
    AlmostPeriodicPoly ap;
    ap.p = 1;
    ap.terms.emplace_back(1.5, complexd(0.5, -0.25));
    ap.terms.emplace_back(-1.5, complexd(0.5, 0.25));

    for (const auto& spec : corpus) {
        const SignalSpec back = spec_from_json(to_json(spec));
        for (double t : {0.0, 0.7, 3.9, 12.0})
            CHECK(eval_spec(back, t) == eval_spec(spec, t));
    }
    const SignalSpec back = spec_from_json(to_json(SignalSpec{ap}));
    for (double t : {0.0, 0.7, 3.9}) CHECK(eval_spec(back, t) == eval_spec(SignalSpec{ap}, t));
}

TEST_CASE("spec JSON sugar and validation errors") {
    CHECK_NOTHROW(spec_from_json(json::parse(R"({"type":"sin_squared","p":1})")));
    CHECK_NOTHROW(spec_from_json(json::parse(R"({"type":"abs_sin","harmonics":8})")));
    CHECK_THROWS_AS(spec_from_json(json::parse(R"({"type":"nope"})")), config_error);
    CHECK_THROWS_AS(spec_from_json(json::parse(R"({"type":"monomial_osc","p":-1,"omega":1})")), config_error);
    CHECK_THROWS_AS(spec_from_json(json::parse(R"({"type":"constant"})")), config_error);
    // broken conjugacy
    CHECK_THROWS_AS(
        spec_from_json(json::parse(
            R"({"type":"fourier_poly","p":0,"omega":1,"coefficients":[{"k":1,"re":1,"im":1}]})")),
        config_error);
}

TEST_CASE("policy and ladder JSON honor partial overrides") {
    DetectionPolicy base;
    base.abs_tol = 5e-3;
    const DetectionPolicy p = policy_from_json(json::parse(R"({"rel_tol": 1e-2})"), base);
    CHECK(p.abs_tol == 5e-3);
    CHECK(p.rel_tol == 1e-2);
    CHECK(p.tail_fraction == 0.25);

    const LimitLadder l = ladder_from_json(json::parse(R"({"degree": 2, "count": 11})"));
    CHECK(l.degree == 2);
    CHECK(l.count == 11);
    CHECK(l.s0 == 0.1);
}

TEST_CASE("transform model serializes terms with origin") {
    const TransformModel model = closed_form_transform(SignalSpec{MonomialOsc{0, 1.0, Phase::sin, 1.0}});
    const json j = to_json(model);
    REQUIRE(j.at("terms").size() == 2);
    CHECK(j.at("terms")[0].contains("re"));
    CHECK(j.at("terms")[0].contains("beta"));
    CHECK(j.at("origin").at("type") == "monomial_osc");
}
