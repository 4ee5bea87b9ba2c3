#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "support.hpp"

using namespace cgtm;
using namespace cgtm::testing;

namespace {

RunConfig model_config(const std::string& model, double p = 0.0, double q = 0.0) {
    RunConfig c;
    c.model = model;
    c.p = p;
    c.q = q;
    return c;
}

struct Spawned {
    int code = -1;
    std::string out, err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Spawned geom(const std::string& args) {
    static int counter = 0;
    const std::string base = ::testing::TempDir() + "cgtm_cli_" + std::to_string(++counter);
    const std::string cmd = std::string("\"") + GEOM_EXE + "\" " + args + " >\"" + base + ".out\" 2>\"" + base + ".err\"";
    const int status = std::system(cmd.c_str());
    Spawned s;
    s.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    s.out = slurp(base + ".out");
    s.err = slurp(base + ".err");
    std::remove((base + ".out").c_str());
    std::remove((base + ".err").c_str());
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

TEST(RenderJson, FixedFloatFormatAndKeyOrder) {
    json j;
    j["b"] = 0.1;
    j["a"] = 2;
    j["c"] = json::array({1.0, true, "x"});
    const auto text = render_json(j);
    EXPECT_NE(text.find("1.0000000000000001e-01"), std::string::npos) << text;
    EXPECT_LT(text.find("\"b\""), text.find("\"a\""));
    EXPECT_EQ(text, render_json(j));
    EXPECT_EQ(text.back(), '\n');
}

TEST(RenderJson, SpecHashIsStable) {
    EXPECT_EQ(spec_hash(normal_spec()), spec_hash(normal_spec()));
    EXPECT_NE(spec_hash(normal_spec()), spec_hash(exponential_spec()));
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

// ---------------------------------------------------------------------------
// Commands in process
// ---------------------------------------------------------------------------

TEST(Commands, DescribeReportsBaseTensors) {
    auto cfg = model_config("normal");
    cfg.point = {0.0, 1.0};
    const auto r = run_command("describe", cfg);
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.report["engine"], "geom");
    EXPECT_EQ(r.report["model"], "normal");
    EXPECT_DOUBLE_EQ(r.report["g"][1][1].get<double>(), 2.0);
    EXPECT_NEAR(r.report["christoffels"][1][1][1].get<double>(), -3.0, 1e-15);
}

TEST(Commands, ConnectionAndCurvaturePassOnCatalog) {
    for (const char* m : {"exponential", "normal", "euclid_deformed_ab", "sasaki_flat"}) {
        auto cfg = model_config(m, 1.0, 0.5);
        EXPECT_EQ(run_command("connection", cfg).exit_code, 0) << m;
        EXPECT_EQ(run_command("curvature", cfg).exit_code, 0) << m;
    }
}

TEST(Commands, CurvatureSingleIndex) {
    auto cfg = model_config("normal", 1.0, 1.0);
    cfg.indices = {1, 2, 1};
    const auto r = run_command("curvature", cfg);
    EXPECT_EQ(r.report["components"].size(), 12u);
    cfg.indices = {1, 3, 1};
    EXPECT_THROW(run_command("curvature", cfg), UsageError);
}

TEST(Commands, ParamOverrideChangesSpec) {
    auto cfg = model_config("euclid_deformed_ab");
    const auto a = run_command("describe", cfg);
    cfg.param_overrides = {"c1=5"};
    const auto b = run_command("describe", cfg);
    EXPECT_NE(a.report["spec_hash"], b.report["spec_hash"]);
    cfg.param_overrides = {"nope=1"};
    EXPECT_THROW(run_command("describe", cfg), UsageError);
    cfg.param_overrides = {"c1"};
    EXPECT_THROW(run_command("describe", cfg), UsageError);
}

TEST(Commands, SpecFileInput) {
    RunConfig cfg;
    cfg.spec_path = source_path("samples/curved_statistical.json");
    cfg.point = {0.3, 1.5};
    const auto r = run_command("describe", cfg);
    EXPECT_EQ(r.report["model"], "curved_statistical");
}

TEST(Commands, ChecksOnCatalog) {
    auto cfg = model_config("euclid_deformed_ab");
    cfg.samples = 10;
    cfg.check = "flat";
    EXPECT_EQ(run_command("check", cfg).report["constant_curvature_candidate"], true);
    cfg.check = "codazzi";
    EXPECT_EQ(run_command("check", cfg).exit_code, 0);
    cfg.check = "ex0-pde";
    EXPECT_EQ(run_command("check", cfg).exit_code, 0);
    cfg.ex0_A = "x";
    EXPECT_EQ(run_command("check", cfg).exit_code, 1);
    cfg.check = "norm-identity";
    EXPECT_EQ(run_command("check", cfg).exit_code, 0);
    cfg.check = "bogus";
    EXPECT_THROW(run_command("check", cfg), UsageError);
}

TEST(Commands, ExZeroNeedsPlane) {
    auto cfg = model_config("exponential");
    cfg.check = "ex0-pde";
    EXPECT_THROW(run_command("check", cfg), UsageError);
}

TEST(Commands, CrossValidateIsDeterministic) {
    auto cfg = model_config("normal", 1.0, 0.5);
    cfg.check = "cross-validate";
    cfg.samples = 8;
    const auto a = render_json(run_command("check", cfg).report);
    EXPECT_EQ(a, render_json(run_command("check", cfg).report));
    cfg.seed = 43;
    EXPECT_NE(a, render_json(run_command("check", cfg).report));
}

TEST(Commands, GeodesicCsv) {
    auto cfg = model_config("sasaki_flat");
    cfg.format = "csv";
    cfg.T = 0.1;
    cfg.dt = 0.01;
    cfg.record_every = 5;
    const auto r = run_command("geodesic", cfg);
    std::istringstream in(r.text);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,x1,x2,u1,u2,speed2");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3);
}

TEST(Commands, VerifyPaperRowsPass) {
    const auto r = run_command("verify-paper", RunConfig{});
    ASSERT_TRUE(r.report["rows"].is_array());
    EXPECT_GT(r.report["rows"].size(), 10u);
    for (const auto& row : r.report["rows"]) EXPECT_EQ(row["status"], "PASS") << row.dump();
}

TEST(Commands, ErrorsAreTyped) {
    auto cfg = model_config("normal");
    cfg.point = {0.0, 0.0};
    EXPECT_THROW(run_command("describe", cfg), DomainError);
    cfg = model_config("normal", 0.0, -1.0);
    cfg.fiber = {0.0, 2.0};
    EXPECT_THROW(run_command("connection", cfg), OutsideBMq);
    cfg = model_config("normal");
    cfg.point = {0.0};
    EXPECT_THROW(run_command("describe", cfg), UsageError);
    EXPECT_THROW(run_command("describe", model_config("gamma")), UsageError);
    EXPECT_THROW(run_command("frobnicate", model_config("normal")), UsageError);
}

// ---------------------------------------------------------------------------
// The binary
// ---------------------------------------------------------------------------

TEST(Binary, SuccessWritesJsonToStdout) {
    const auto s = geom("describe --model exponential --point 1");
    EXPECT_EQ(s.code, 0) << s.err;
    EXPECT_TRUE(s.err.empty());
    const auto j = json::parse(s.out);
    EXPECT_EQ(j["command"], "describe");
}

TEST(Binary, VerifyPaperRuns) {
    const auto s = geom("verify-paper");
    EXPECT_EQ(s.code, 0) << s.err;
    EXPECT_EQ(json::parse(s.out)["command"], "verify-paper");
}

TEST(Binary, FailedCheckExitsOne) {
    const auto s = geom("check ex0-pde --model euclid_deformed_ab --A x --samples 5");
    EXPECT_EQ(s.code, 1);
    EXPECT_EQ(json::parse(s.out)["pass"], false);
}

TEST(Binary, ErrorsGoToStderrAsJson) {
    const auto s = geom("describe --model normal --point 0,0");
    EXPECT_EQ(s.code, 2);
    EXPECT_TRUE(s.out.empty());
    const auto j = json::parse(s.err);
    EXPECT_EQ(j["error"]["kind"], "DomainError");

    const auto u = geom("describe --model normal --spec x.json");
    EXPECT_EQ(u.code, 2);
    EXPECT_EQ(json::parse(u.err)["error"]["kind"], "UsageError");

    const auto c = geom("describe --model normal --format csv");
    EXPECT_EQ(c.code, 2);
    EXPECT_EQ(json::parse(c.err)["error"]["kind"], "UsageError");

    const auto sc = geom("describe --spec \"" + source_path("tests/data/bad_spec.json") + "\"");
    EXPECT_EQ(sc.code, 2);
    EXPECT_EQ(json::parse(sc.err)["error"]["kind"], "SchemaError");
}

TEST(Binary, OutFileMatchesStdout) {
    const std::string path = ::testing::TempDir() + "cgtm_cli_out.json";
    const auto a = geom("connection --model normal --p 1 --q 1");
    const auto b = geom("connection --model normal --p 1 --q 1 --out \"" + path + "\"");
    EXPECT_EQ(b.code, 0);
    EXPECT_TRUE(b.out.empty());
    EXPECT_EQ(slurp(path), a.out);
    std::remove(path.c_str());
}
