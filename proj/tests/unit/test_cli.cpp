#include "doctest.h"

#include "cli.hpp"
#include "isoperiodic/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using isoflow::RunConfig;
using nlohmann::json;

namespace
{

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "isoflow");
    std::vector<char *> argv;
    for (auto &a : args) {
        argv.push_back(a.data());
    }
    std::ostringstream out, err;
    const int code = isoflow::main_with_args(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

json provenance_of(const std::string &csv)
{
    REQUIRE(csv.rfind("# ", 0) == 0);
    return json::parse(csv.substr(2, csv.find('\n') - 2));
}

std::string body_of(const std::string &csv) { return csv.substr(csv.find('\n') + 1); }

} // namespace

TEST_CASE("config round trip")
{
    RunConfig c;
    c.command = "flow";
    c.x = {0.4, 0.01};
    c.x_end = isoflow::Complex{0.6, -0.02};
    c.region_radius = 0.07;
    c.y0 = {1.5, 0.5};
    c.sheet = -1;
    c.n = 3;
    c.A = {0.1, -0.3};
    c.mode = "both";
    c.quad_rel = 3.3e-11;
    c.grid_nx = 17;
    c.z0 = {0.1, 0.2};
    c.h = 2.5e-4;
    c.seed = 99;
    c.format = "json";
    c.out = "/tmp/x.json";
    const json j = isoflow::config_to_json(c);
    CHECK(isoflow::config_from_json(j) == c);
    CHECK(isoflow::config_from_json(json::parse(j.dump())) == c);
    CHECK(isoflow::config_from_json(isoflow::config_to_json(RunConfig{})) == RunConfig{});
}

TEST_CASE("config validation names the offending field")
{
    auto field = [](const json &j) {
        try {
            isoflow::config_from_json(j);
        } catch (const isoperiodic::ConfigError &e) {
            return e.field_path();
        }
        return std::string("<none>");
    };
    CHECK(field(json{{"pole", {{"sheet", 2}}}}) == "pole.sheet");
    CHECK(field(json{{"pole", {{"y0", "two"}}}}) == "pole.y0");
    CHECK(field(json{{"flow", {{"n", 9}}}}) == "flow.n");
    CHECK(field(json{{"flow", {{"mode", "third"}}}}) == "flow.mode");
    CHECK(field(json{{"curve", {{"xx", 1}}}}) == "curve.xx");
    CHECK(field(json{{"bogus", 1}}) == "bogus");
    CHECK(field(json{{"command", "plot"}}) == "command");
    CHECK(field(json{{"tolerances", {{"quad_rel", -1.0}}}}) == "tolerances.quad_rel");
    CHECK(field(json{{"boussinesq", {{"grid", {4, 64}}}}}) == "boussinesq.grid");
    CHECK(field(json{{"output", {{"format", "xml"}}}}) == "output.format");
    CHECK(field(json{{"curve", {{"x", 0.5}}}}) == "<none>");
}

TEST_CASE("flow command: columns, provenance and determinism")
{
    const std::vector<std::string> args{"flow", "--x", "0.4", "--x-end", "0.6", "--y0", "2", "--samples", "6"};
    const Invocation first = invoke(args);
    REQUIRE(first.code == 0);
    const std::string body = body_of(first.out);
    CHECK(body.rfind("x_re,x_im,y0_re,y0_im,y0p_re,y0p_im,B_re,B_im,abs_B_drift\n", 0) == 0);

    const json prov = provenance_of(first.out);
    CHECK(prov["version"] == isoflow::version);
    CHECK(prov["loops"]["a_loop"].size() > 8);
    const RunConfig parsed = isoflow::config_from_json(prov["config"]);
    CHECK(parsed.command == "flow");
    CHECK(parsed.x_end.has_value());

    const Invocation second = invoke(args);
    CHECK(second.out == first.out);

    // Re-running from the emitted config reproduces the artifact.
    const std::string path = "isoflow_roundtrip_config.json";
    std::ofstream(path) << prov["config"].dump();
    const Invocation third = invoke({"--config", path});
    std::remove(path.c_str());
    CHECK(third.code == 0);
    CHECK(third.out == first.out);
}

TEST_CASE("verification failure and errors map to exit codes")
{
    // An impossible tolerance turns a successful run into a failed verification.
    std::ofstream("isoflow_strict.json") << R"({"command": "flow", "curve": {"x": 0.4, "x_end": 0.6},
                                               "tolerances": {"verify": 1e-30}})";
    CHECK(invoke({"--config", "isoflow_strict.json"}).code == 2);
    std::remove("isoflow_strict.json");

    const Invocation bad_sheet = invoke({"periods", "--sheet", "3"});
    CHECK(bad_sheet.code == 1);
    CHECK(bad_sheet.err.find("pole.sheet") != std::string::npos);

    CHECK(invoke({"flow", "--x", "0.4"}).code == 1);                 // no end point
    CHECK(invoke({"periods", "--y0", "0.5", "--x", "0.5"}).code == 1); // pole on a branch point
    CHECK(invoke({"--config", "does-not-exist.json"}).code == 1);
    CHECK(invoke({"--no-such-flag"}).code == 1);
}

TEST_CASE("json output and output files")
{
    const Invocation r = invoke({"rauch-check", "--x", "0.5", "--format", "json"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["rows"].size() == 4);
    CHECK(doc["summary"]["passed"] == true);
    CHECK(doc["provenance"]["config"]["command"] == "rauch-check");

    const std::string path = "isoflow_bous.csv";
    const Invocation b = invoke({"boussinesq", "--x", "0.5", "--y0", "2", "--grid", "16", "16", "--out", path});
    CHECK(b.code == 0);
    std::ifstream csv(path);
    std::stringstream content;
    content << csv.rdbuf();
    CHECK(body_of(content.str()).rfind("X,Y,u_re,u_im,residual\n", 0) == 0);
    std::ifstream side(path + ".summary.json");
    REQUIRE(side.good());
    const json summary = json::parse(side)["summary"];
    CHECK(summary["max_residual"].get<double>() < 1e-8);
    CHECK(summary.contains("U"));
    CHECK(summary.contains("c"));
    std::remove(path.c_str());
    std::remove((path + ".summary.json").c_str());
}

TEST_CASE("verify command runs every suite")
{
    const Invocation r = invoke({"verify", "--x", "0.5", "--y0", "2"});
    CHECK(r.code == 0);
    const std::string body = body_of(r.out);
    for (const char *suite : {"zero_identity", "normalization_relations", "bell_equivalence", "rauch_residuals"}) {
        CHECK(body.find(std::string(suite) + ",true") != std::string::npos);
    }
}
