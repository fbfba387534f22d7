// Runs the mrd executable and checks exit codes and files.

#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kData = MRD_TEST_DATA;
const std::string kFixture = (kData / "fixture_850x650.png").string();
const std::string kScene = (kData / "fixture_scene.json").string();

struct Run {
    int code = -1;
    std::string out;
};

Run mrd(const std::string& args) {
    const std::string cmd = std::string("\"") + MRD_CLI_PATH + "\" " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("mrd_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("retrieve matches the golden output") {
    const auto r = mrd("retrieve " + kFixture + " \"Where is the cup?\" --synthetic " + kScene);
    CHECK(r.code == 0);
    CHECK(r.out == slurp(kData / "fixture_vstar_golden.json"));
}

TEST_CASE("retrieve writes maps; zero weight makes fused equal semantic") {
    const auto dir = fresh_dir("maps");
    const auto r = mrd("retrieve " + kFixture + " cup --synthetic " + kScene + " --weight-w 0 --out " +
                       q(dir / "result.json") + " --dump-maps " + q(dir));
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "result.json"));
    const auto sem = slurp(dir / "semantic_map.json");
    CHECK(!sem.empty());
    CHECK(sem == slurp(dir / "fused_map.json"));

    const auto all = fresh_dir("maps_all");
    CHECK(mrd("retrieve " + kFixture + " cup --synthetic " + kScene + " --out " + q(all / "r.json") +
              " --dump-maps")
              .code == 0);
    CHECK(fs::exists(all / "detection_map.json"));
    CHECK(fs::exists(all / "semantic_map.json"));
}

TEST_CASE("retrieve failures leave no output files") {
    const auto dir = fresh_dir("fail");
    const auto missing = mrd("retrieve " + q(dir / "nope.png") + " cup --synthetic " + kScene + " --out " +
                             q(dir / "r.json") + " --dump-maps " + q(dir));
    CHECK(missing.code == 2);
    CHECK(fs::is_empty(dir));

    CHECK(mrd("retrieve " + kFixture + " cup --synthetic " + kScene + " --ratio-k 1").code == 4);
    CHECK(mrd("retrieve " + kFixture + " cup --synthetic " + kScene + " --preset hr16k").code == 4);
    CHECK(mrd("retrieve " + kFixture + " cup --synthetic " + q(dir / "none.json")).code == 4);
    CHECK(mrd("retrieve " + kFixture).code == 4);
    CHECK(mrd("frobnicate").code == 4);

    std::ofstream(dir / "providers.json")
        << R"({"embed":{"base_url":"http://127.0.0.1:1","retries":0,"timeout_ms":200},)"
        << R"("detect":{"base_url":"http://127.0.0.1:1","retries":0,"timeout_ms":200}})";
    const auto down = mrd("retrieve " + kFixture + " cup --providers " + q(dir / "providers.json") + " --out " +
                          q(dir / "r.json"));
    CHECK(down.code == 3);
    CHECK_FALSE(fs::exists(dir / "r.json"));
}

TEST_CASE("eval exit codes and report") {
    const auto empty = fresh_dir("eval_empty");
    CHECK(mrd("eval " + q(empty)).code == 0);

    const auto dir = fresh_dir("eval_mixed");
    fs::copy_file(kData / "fragmented" / "frag_000.json", dir / "a.json");
    std::ofstream(dir / "b.json") << "{broken";
    const auto r = mrd("eval " + q(dir) + " --methods low_only,multires --out " + q(dir / "report.out"));
    CHECK(r.code == 1);
    CHECK(r.out.find("low_only") != std::string::npos);
    const auto report = slurp(dir / "report.out");
    CHECK(report.find("\"failures\"") != std::string::npos);
    CHECK(report.find("b.json") != std::string::npos);

    CHECK(mrd("eval " + q(dir) + " --methods nope").code == 4);
    CHECK(mrd("eval " + q(dir / "missing")).code == 2);
}

TEST_CASE("render and plan-windows") {
    const auto dir = fresh_dir("render");
    std::ofstream(dir / "m.json") << R"({"grid_h":2,"grid_w":2,"values":[0,1,0.55,0.1]})";
    const auto r = mrd("render " + q(dir / "m.json"));
    CHECK(r.code == 0);
    CHECK(r.out == " @\n+.\n");

    std::ofstream(dir / "bad.json") << R"({"grid_h":2,"grid_w":2,"values":[0]})";
    CHECK(mrd("render " + q(dir / "bad.json")).code == 4);
    CHECK(mrd("render " + q(dir / "absent.json")).code == 4);

    const auto p = mrd("plan-windows --width 2240 --height 2240");
    CHECK(p.code == 0);
    CHECK(p.out.find("\"count\": 9") != std::string::npos);
    const auto fixture = mrd("plan-windows " + kFixture);
    CHECK(fixture.code == 0);
    CHECK(fixture.out.find("\"count\": 1") != std::string::npos);
    CHECK(mrd("plan-windows").code == 4);
}
