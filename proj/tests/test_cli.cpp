#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#ifndef CLI_PATH
#error "CLI_PATH must point at the command-line binary"
#endif

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    std::size_t k;
    while ((k = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, k);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string tmp_file(const std::string& name, const std::string& content) {
    const std::string path = "cli_" + name;
    std::ofstream(path) << content;
    return path;
}

}  // namespace

TEST_CASE("bsi emits a series ending with a slope row") {
    auto box = tmp_file("box01.json", R"({"set":{"type":"box","lower":[0],"upper":[1]}})");
    auto r = run("bsi --set " + box + " --levels 3:20");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("n,r,log_components,ratio\n") == 0);
    CHECK(r.out.find("slope,") != std::string::npos);
    CHECK(r.out.rfind("slope,", 0) != 0);  // slope row is last, not first
}

TEST_CASE("moran closed form") {
    auto r = run("moran --ratios 1/3,1/3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("beta,0.630929753571") != std::string::npos);
}

TEST_CASE("check imubsi on two points") {
    auto set = tmp_file("two_points.json",
                        R"({"set":{"type":"points","points":[[0],[1]]}})");
    auto mu = tmp_file("delta0.json", R"({"atoms":[{"x":[0],"p":1.0}]})");
    auto r = run("check imubsi --set " + set + " --n 0 --q 0 --measure " + mu +
                 " --theta 0.5");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("lhs,rhs,pass,params\n") == 0);
    CHECK(r.out.find(",true,") != std::string::npos);
}

TEST_CASE("dist and lq plumbing") {
    auto mu = tmp_file("half.json",
                       R"({"atoms":[{"x":[0],"p":0.5},{"x":[1],"p":0.5}]})");
    auto d0 = tmp_file("d0.json", R"({"atoms":[{"x":[0],"p":1.0}]})");
    auto r = run("dist --mu " + d0 + " --nu " + mu);
    CHECK(r.exit_code == 0);
    CHECK(r.out == "primal,dual\n0.5,0.5\n");
    auto r2 = run("lq --measure " + mu + " --q 2 --r 1/4");
    CHECK(r2.exit_code == 0);
    CHECK(r2.out.find("0.25,0.5,") != std::string::npos);
    // radius in base^-exponent notation parses to the same row
    auto r3 = run("lq --measure " + mu + " --q 2 --r 2^-2");
    CHECK(r3.out == r2.out);
}

TEST_CASE("json format carries the csv fields") {
    auto r = run("moran --ratios 1/2,1/2 --format json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"quantity\": \"beta\"") != std::string::npos);
    CHECK(r.out.find("\"value\": 1.0") != std::string::npos);
}

TEST_CASE("probe requires a seed and is deterministic") {
    auto mu = tmp_file("half2.json",
                       R"({"atoms":[{"x":[0],"p":0.5},{"x":[1],"p":0.5}]})");
    CHECK(run("probe --measure " + mu + " --r 1/4 --q 2").exit_code == 2);
    auto a = run("probe --measure " + mu + " --r 1/4 --q 2 --trials 5 --seed 9");
    auto b = run("probe --measure " + mu + " --r 1/4 --q 2 --trials 5 --seed 9");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("true,") != std::string::npos);
}

TEST_CASE("construct emits the measure file format") {
    auto box = tmp_file("box01b.json",
                        R"({"set":{"type":"box","lower":[0],"upper":[1]}})");
    auto r = run("construct packing-upper --set " + box +
                 " --t 0.5 --alpha 1/8 --format json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"atoms\"") != std::string::npos);
    auto r2 = run("construct packing-upper --set " + box + " --t 0.5 --alpha 1/8");
    CHECK(r2.out == "atoms,r\n9,0.0625\n");
}

TEST_CASE("exit codes distinguish error classes") {
    CHECK(run("no-such-command").exit_code == 2);
    CHECK(run("dims --set does_not_exist.json").exit_code == 2);
    auto box = tmp_file("box01c.json",
                        R"({"set":{"type":"box","lower":[0],"upper":[1]}})");
    // outer-cover bsi request violates the exactness precondition
    auto skew = tmp_file(
        "skew.json",
        R"({"set":{"type":"affine","scale":0.3,"shift":[0],"child":{"type":"box","lower":[0],"upper":[1]}}})");
    CHECK(run("bsi --set " + skew + " --levels 3:6").exit_code == 3);
    CHECK(run("dims --set " + box + " --levels 9:3").exit_code == 2);
}
