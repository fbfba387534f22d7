#include "doctest.h"
#include "support.hpp"

#include "mrd/config.hpp"
#include "mrd/eval.hpp"
#include "mrd/serialize.hpp"

#include <filesystem>
#include <fstream>

using namespace mrd;
using mrd::testing::error_of;
using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("mrd_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("presets") {
    struct Want {
        const char* name;
        int crop, window, stride;
    };
    for (const Want w : {Want{"vstar", 112, 1232, 896}, Want{"hr4k", 224, 2240, 1792}, Want{"hr8k", 448, 3136, 2688}}) {
        const auto c = preset_config(w.name);
        CHECK(c.crop_px == w.crop);
        CHECK(c.window_w == w.window);
        CHECK(c.window_h == w.window);
        CHECK(c.stride_x == w.stride);
        CHECK(c.stride_y == w.stride);
        CHECK(c.ratio_k == 2);
        CHECK(c.weight_w == 0.4);
        CHECK(c.top_k == 16);
        CHECK(c.max_steps == 200);
        CHECK(c.answer_tau == 0.6);
        CHECK(c.tau_det == 0.3);
        CHECK(run_config_from_json(to_json(c)) == c);
    }
    CHECK(error_of([] { preset_config("hr16k"); }) == ErrorCode::config_error);
}

TEST_CASE("run_config_from_json overrides") {
    const auto c = run_config_from_json(Json::parse(R"({"preset":"hr4k","window_px":[448,672],"stride_px":224,
        "weight_w":0,"top_k":4,"coverage":"center_point"})"));
    CHECK(c.crop_px == 224);
    CHECK(c.window_w == 448);
    CHECK(c.window_h == 672);
    CHECK(c.stride_x == 224);
    CHECK(c.stride_y == 224);
    CHECK(c.weight_w == 0.0);
    CHECK(c.top_k == 4);
    CHECK(c.coverage == CoverageRule::center_point);
    CHECK(run_config_from_json(Json::object()) == preset_config("vstar"));

    for (const char* bad : {R"({"weight_w":1.5})", R"({"ratio_k":1})", R"({"ratio_k":2.5})", R"({"top_k":0})",
                            R"({"crop_px":"big"})", R"({"window_px":[1,2,3]})", R"({"tau_det":-0.1})",
                            R"({"coverage":"centre"})", R"([1,2])"}) {
        CAPTURE(bad);
        CHECK(error_of([&] { run_config_from_json(Json::parse(bad)); }) == ErrorCode::config_error);
    }
}

TEST_CASE("round_sig7") {
    CHECK(round_sig7(0.123456789) == 0.1234568);
    CHECK(round_sig7(1.0) == 1.0);
    CHECK(round_sig7(0.0) == 0.0);
    CHECK(Json(round_sig7(0.7000000000000001)).dump() == "0.7");
}

TEST_CASE("map JSON round trip and validation") {
    const ScoreMap m(2, 3, {0, 0.25, 0.5, 0.75, 1, 0.125});
    const auto j = map_to_json(m);
    CHECK(j.dump() == R"({"grid_h":2,"grid_w":3,"values":[0.0,0.25,0.5,0.75,1.0,0.125]})");
    CHECK(map_from_json(j) == m);
    CHECK(error_of([] { map_from_json(Json::parse(R"({"grid_h":1,"grid_w":2,"values":[0.5]})")); }) ==
          ErrorCode::config_error);
    CHECK(error_of([] { map_from_json(Json::parse(R"({"grid_h":1,"grid_w":1,"values":[1.5]})")); }) ==
          ErrorCode::config_error);
    CHECK(error_of([] { map_from_json(Json::parse(R"({"rows":1})")); }) == ErrorCode::config_error);
}

TEST_CASE("render_heatmap") {
    CHECK(render_heatmap(ScoreMap::zeros(2, 2)) == "  \n  \n");
    CHECK(render_heatmap(ScoreMap::filled(1, 3, 1.0)) == "@@@\n");
    // floor(0.55 * 10) = 5 selects the sixth ramp character.
    CHECK(render_heatmap(ScoreMap::filled(1, 1, 0.55)) == "+\n");
    CHECK(render_heatmap(ScoreMap(1, 4, {0.1, 0.2, 0.45, 0.99})) == ".:=@\n");
}

TEST_CASE("retrieval JSON layout") {
    RetrievalResult r;
    r.fused_map = ScoreMap(2, 2, {0.1, 0.9, 0.9, 0.2});
    r.selected = select_top_k(r.fused_map, 2);
    r.layout = spatial_layout(std::vector<PatchIndex>{{0, 1}, {1, 0}});
    const auto j = retrieval_to_json(r, grid_for_cells(2, 2, 112, 2));
    CHECK(j.dump() ==
          R"({"grid":{"h":2,"w":2,"crop_px":112,"k":2},"fused_map":[0.1,0.9,0.9,0.2],)"
          R"("selected":[{"row":0,"col":1,"score":0.9},{"row":1,"col":0,"score":0.9}],)"
          R"("layout":{"rows":2,"cols":2,"cells":[{"lr":0,"lc":1,"row":0,"col":1},{"lr":1,"lc":0,"row":1,"col":0}]}})");
}

TEST_CASE("scene JSON round trip") {
    SyntheticSceneSpec s;
    s.scene_id = "a";
    s.grid_h = s.grid_w = 4;
    s.noise_seed = 123456789012345ULL;
    s.background_level = 0.3;
    s.noise_level = 0.1;
    s.query = "where?";
    s.targets = {{{0.5, 0.5, 1.5, 1.5}, "cup", 0.5, false}, {{2, 2, 4, 4}, "kite", 1.0, true}};
    CHECK(scene_from_json(scene_to_json(s)) == s);
    CHECK(error_of([] { scene_from_json(Json::parse(R"({"grid_h":2})")); }) == ErrorCode::config_error);
    CHECK(error_of([] {
              scene_from_json(Json::parse(R"({"grid_h":2,"grid_w":2,"targets":[{"rect":[0,0,3,1],"label":"x"}]})"));
          }) == ErrorCode::config_error);
}

TEST_CASE("evaluate_scene on a fragmented target") {
    SyntheticSceneSpec s;
    s.scene_id = "frag";
    s.grid_h = s.grid_w = 8;
    s.background_level = 0.3;
    s.targets = {{{0.5, 0.5, 1.5, 1.5}, "cup", 0.5, false}};
    auto cfg = preset_config("vstar");
    cfg.top_k = 4;
    const auto recs = evaluate_scene(s, cfg, all_methods());
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].method == Method::low_only);
    CHECK(recs[1].method == Method::multires);
    CHECK(recs[2].method == Method::multires_ovd);
    for (const auto& r : recs) {
        CHECK(r.target_fragmented);
        CHECK(r.recall_at_k == 1.0);  // no noise: the four split cells still lead
        CHECK(r.precision_at_k == 1.0);
    }
    CHECK(scene_fragmented(s));
    s.targets[0].rect = {1, 1, 2, 2};
    CHECK_FALSE(scene_fragmented(s));
}

TEST_CASE("run_eval: empty directory, bad scenes, ordering") {
    const auto cfg = preset_config("vstar");
    const auto empty = fresh_dir("empty");
    const auto none = run_eval(empty, cfg, all_methods());
    CHECK(none.records.empty());
    CHECK(none.failures.empty());
    CHECK(none.to_json().dump() == R"({"top_k":16,"scenes":[],"aggregate":{},"failures":[]})");

    const auto dir = fresh_dir("mixed");
    write(dir / "b.json", R"({"scene_id":"zz","grid_h":4,"grid_w":4,"targets":[{"rect":[0,0,1,1],"label":"cup"}]})");
    write(dir / "a.json", R"({"scene_id":"aa","grid_h":4,"grid_w":4,"targets":[{"rect":[3,3,4,4],"label":"dog"}]})");
    write(dir / "c.json", "{not json");
    write(dir / "d.json", R"({"grid_h":3,"grid_w":4,"targets":[]})");
    write(dir / "notes.txt", "ignored");
    const auto methods = parse_methods("multires, low_only");
    const auto rep = run_eval(dir, cfg, methods);
    REQUIRE(rep.records.size() == 4);
    CHECK(rep.records[0].scene_id == "aa");
    CHECK(rep.records[0].method == Method::multires);
    CHECK(rep.records[1].method == Method::low_only);
    CHECK(rep.records[2].scene_id == "zz");
    REQUIRE(rep.failures.size() == 2);
    CHECK(rep.failures[0].source == "c.json");
    CHECK(rep.failures[1].source == "d.json");
    CHECK(rep.summary().size() == 2);
    CHECK(rep.table().find("2 scene(s) failed") != std::string::npos);

    CHECK(error_of([] { run_eval("/nonexistent/scenes", preset_config("vstar"), all_methods()); }) ==
          ErrorCode::io_error);
    CHECK(error_of([] { parse_methods("multires,fancy"); }) == ErrorCode::config_error);
    CHECK(error_of([] { parse_methods(" , "); }) == ErrorCode::config_error);
}
