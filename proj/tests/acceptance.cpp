// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.
//
// Set MRD_UPDATE_GOLDEN=1 to rewrite the end-to-end golden file from the
// current build (review the diff before committing it).

#include "support.hpp"

#include "mrd/config.hpp"
#include "mrd/detect.hpp"
#include "mrd/eval.hpp"
#include "mrd/fuse_retrieve.hpp"
#include "mrd/grid.hpp"
#include "mrd/image.hpp"
#include "mrd/semantic.hpp"
#include "mrd/serialize.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

using namespace mrd;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// 1 ---------------------------------------------------------------------------

Outcome grid_algebra() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<int> dim(1, 4096), crop(16, 256), kk(2, 4);
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = kk(rng);
        const auto g = build_grid({dim(rng), dim(rng)}, crop(rng), k);
        const int W = g.padded_dims().width_px, H = g.padded_dims().height_px;
        const std::size_t n = g.cell_count(Lattice::low), m = g.cell_count(Lattice::coarse);
        if (n != static_cast<std::size_t>(k) * k * m) return fail("n != k^2 m at trial " + std::to_string(trial));

        // Low rects: row-major adjacency from the origin to the padded edge
        // plus matching total area means they partition the padded image.
        long long area = 0;
        for (int r = 0; r < g.grid_h(); ++r) {
            for (int c = 0; c < g.grid_w(); ++c) {
                const auto rect = g.patch_rect({r, c});
                const int want_x0 = c == 0 ? 0 : g.patch_rect({r, c - 1}).x1;
                const int want_y0 = r == 0 ? 0 : g.patch_rect({r - 1, c}).y1;
                if (rect.x0 != want_x0 || rect.y0 != want_y0 || rect.empty())
                    return fail("low rects do not tile at trial " + std::to_string(trial));
                area += rect.area();
            }
        }
        const auto last = g.patch_rect({g.grid_h() - 1, g.grid_w() - 1});
        if (last.x1 != W || last.y1 != H || area != static_cast<long long>(W) * H)
            return fail("low rects miss the padded extent at trial " + std::to_string(trial));

        // Children: k^2 distinct cells whose bounding box and summed area equal the parent.
        for (int r = 0; r < g.coarse_h(); ++r) {
            for (int c = 0; c < g.coarse_w(); ++c) {
                const auto parent = g.patch_rect({r, c}, Lattice::coarse);
                const auto kids = g.coarse_children({r, c});
                std::set<std::pair<int, int>> distinct;
                PixelRect box{W, H, 0, 0};
                long long kid_area = 0;
                for (const auto& p : kids) {
                    distinct.insert({p.row, p.col});
                    const auto kr = g.patch_rect(p);
                    box = {std::min(box.x0, kr.x0), std::min(box.y0, kr.y0), std::max(box.x1, kr.x1),
                           std::max(box.y1, kr.y1)};
                    kid_area += kr.area();
                }
                if (distinct.size() != static_cast<std::size_t>(k) * k || !(box == parent) ||
                    kid_area != parent.area())
                    return fail("children do not cover parent at trial " + std::to_string(trial));
            }
        }
    }
    const double s = seconds_since(t0);
    if (s >= 5.0) return fail(fmt("1000 grids took %.2f s", s));
    return {true, fmt("1000 random grids in %.2f s", s)};
}

// 2 ---------------------------------------------------------------------------

Outcome cosine_cases() {
    struct Case {
        Embedding a, b;
        double want;
    };
    const std::vector<Case> cases = {
        {{{1, 0}}, {{1, 0}}, 1.0},        {{{1, 0}}, {{0, 1}}, 0.5},        {{{1, 0}}, {{-1, 0}}, 0.0},
        {{{3, 4, 0}}, {{6, 8, 0}}, 1.0},  {{{0, 2, 0}}, {{5, 0, 0}}, 0.5},  {{{1, 1}}, {{-7, -7}}, 0.0},
    };
    double worst = 0.0;
    for (const auto& c : cases) worst = std::max(worst, std::abs(cosine_similarity01(c.a, c.b) - c.want));
    if (worst > 1e-12) return fail(fmt("max error %.3g", worst));
    return {true, fmt("identical/orthogonal/opposite within %.1g", worst)};
}

// 3 ---------------------------------------------------------------------------

Embedding random_embedding(std::uint64_t seed, const PixelRect& r) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(r.x0), static_cast<std::uint64_t>(r.y0),
                      static_cast<std::uint64_t>(r.x1), static_cast<std::uint64_t>(r.y1)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Embedding e;
    for (int i = 0; i < 6; ++i) e.values.push_back(u(rng));
    return e;
}

double ref_cosine01(const Embedding& a, const Embedding& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    return 0.5 * (1.0 + dot / (std::sqrt(na) * std::sqrt(nb)));
}

Outcome multires_vs_reference() {
    std::mt19937_64 rng(3003);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 2 + static_cast<int>(rng() % 2);
        const int ch = 1 + static_cast<int>(rng() % (64 / k)), cw = 1 + static_cast<int>(rng() % (64 / k));
        const int crop = 8;
        const auto g = grid_for_cells(ch * k, cw * k, crop, k);
        const std::uint64_t seed = rng();
        const Embedding q = random_embedding(seed ^ 0x5151, {0, 0, 1, 1});
        testing::FnEmbedder emb([&](const PixelRect& r) { return random_embedding(seed, r); }, q);
        const auto got = multi_resolution_map(Query("q"), g, emb);

        const int rows = ch * k, cols = cw * k;
        std::vector<double> low(static_cast<std::size_t>(rows) * cols), coarse(static_cast<std::size_t>(ch) * cw);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                low[i * cols + j] =
                    ref_cosine01(q, random_embedding(seed, {j * crop, i * crop, (j + 1) * crop, (i + 1) * crop}));
        const int cc = crop * k;
        for (int i = 0; i < ch; ++i)
            for (int j = 0; j < cw; ++j)
                coarse[i * cw + j] = ref_cosine01(q, random_embedding(seed, {j * cc, i * cc, (j + 1) * cc, (i + 1) * cc}));
        const auto want = testing::oracle_multires(low, rows, cols, coarse, cw, k);
        if (got.rows() != rows || got.cols() != cols) return fail("shape mismatch at trial " + std::to_string(trial));
        for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
    }
    if (worst > 1e-12) return fail(fmt("max error %.3g", worst));
    return {true, fmt("200 instances, max error %.3g", worst)};
}

// 4 ---------------------------------------------------------------------------

Outcome detection_vs_reference() {
    std::mt19937_64 rng(4004);
    double worst = 0.0;
    const int crop = 16;
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> half(1, 16);
        const auto g = grid_for_cells(2 * half(rng), 2 * half(rng), crop, 2);
        const int W = g.padded_dims().width_px, H = g.padded_dims().height_px;
        std::uniform_int_distribution<int> win(crop, std::max(W, H)), st(crop, std::max(W, H));
        WindowPlan plan;
        do {
            plan = plan_windows(g, win(rng), win(rng), st(rng), st(rng));
        } while (plan.size() > 8);

        std::vector<Detection> boxes;
        std::uniform_int_distribution<int> nb(0, 16), x(0, W), y(0, H);
        std::uniform_real_distribution<double> sc(0.0, 1.0);
        for (int n = nb(rng); n > 0; --n) {
            const int a = x(rng), b = x(rng), c = y(rng), d = y(rng);
            if (a == b || c == d) continue;
            boxes.push_back({{std::min(a, b), std::min(c, d), std::max(a, b), std::max(c, d)}, sc(rng), "x",
                             BoxFrame::global});
        }
        testing::GlobalBoxDetector detector(boxes);
        const auto got = detection_map(g, plan, ObjectSet({"x"}), detector, {0.3});
        const auto want = testing::oracle_detection(g.grid_h(), g.grid_w(), crop, plan.windows, boxes, 0.3);
        for (std::size_t i = 0; i < want.size(); ++i) {
            if (want[i] < 0) return fail("reference found an uncovered patch at trial " + std::to_string(trial));
            worst = std::max(worst, std::abs(got[i] - want[i]));
        }
    }
    if (worst > 1e-9) return fail(fmt("max error %.3g", worst));

    // One patch inside two windows reporting 0.8 and 0.6.
    const auto g = grid_for_cells(2, 2, 112, 2);
    WindowPlan two;
    two.windows = {{0, 0, 224, 224}, {0, 0, 224, 224}};
    testing::ListDetector det({{{{0, 0, 112, 112}, 0.8, "x", BoxFrame::window_local}},
                               {{{0, 0, 112, 112}, 0.6, "x", BoxFrame::window_local}}});
    const double v = detection_map(g, two, ObjectSet({"x"}), det, {0.3}).at(0, 0);
    if (std::abs(v - 0.7) > 1e-12) return fail(fmt("two-window average %.17g, want 0.7", v));
    return {true, fmt("200 instances, max error %.3g; 0.8/0.6 averages to %.7g", worst, v)};
}

// 5 ---------------------------------------------------------------------------

Outcome fusion_bounds() {
    std::mt19937_64 rng(5005);
    std::uniform_real_distribution<double> uw(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int r = 1 + static_cast<int>(rng() % 12), c = 1 + static_cast<int>(rng() % 12);
        const auto s = testing::random_map(rng, r, c), d = testing::random_map(rng, r, c);
        const auto f = fuse_maps(s, d, uw(rng));
        for (std::size_t i = 0; i < f.size(); ++i)
            if (f[i] < std::min(s[i], d[i]) || f[i] > std::max(s[i], d[i]))
                return fail("fused value outside its inputs at trial " + std::to_string(trial));
        if (!(fuse_maps(s, d, 0.0) == s) || !(fuse_maps(s, d, 1.0) == d))
            return fail("w=0/w=1 identity broken at trial " + std::to_string(trial));
    }
    const double w = preset_config("vstar").weight_w;
    const double v = fuse_maps(ScoreMap(1, 1, {0.5}), ScoreMap(1, 1, {1.0}), w)[0];
    if (std::abs(v - 0.7) > 1e-12) return fail(fmt("s=0.5 c=1.0 w=%.2g fused to %.17g", w, v));
    return {true, fmt("1000 random maps in bounds; w=0/1 exact; spot value %.7g", v)};
}

// 6 ---------------------------------------------------------------------------

Outcome preset_fidelity() {
    struct Want {
        const char* name;
        int crop, window, stride;
    };
    for (const Want w : {Want{"vstar", 112, 1232, 896}, Want{"hr4k", 224, 2240, 1792}, Want{"hr8k", 448, 3136, 2688}}) {
        const auto c = preset_config(w.name);
        if (c.crop_px != w.crop || c.window_w != w.window || c.window_h != w.window || c.stride_x != w.stride ||
            c.stride_y != w.stride || c.ratio_k != 2 || c.weight_w != 0.4)
            return fail(std::string("preset ") + w.name + " differs from the table");
        if (!(run_config_from_json(nlohmann::ordered_json::parse(to_json(c).dump())) == c))
            return fail(std::string("preset ") + w.name + " does not round trip");
    }
    return {true, "vstar/hr4k/hr8k match the table and round trip"};
}

// 7, 8 ------------------------------------------------------------------------

const fs::path kData = MRD_TEST_DATA;

double mean_recall(const EvalReport& rep, Method m) {
    for (const auto& s : rep.summary())
        if (s.method == m) return s.mean_recall_at_k;
    return -1.0;
}

Outcome fragmented_battery() {
    const auto t0 = Clock::now();
    const auto cfg = preset_config("vstar");
    const std::vector<Method> methods = {Method::low_only, Method::multires};
    const auto a = run_eval(kData / "fragmented", cfg, methods);
    const double s = seconds_since(t0);
    const auto b = run_eval(kData / "fragmented", cfg, methods);
    if (!a.failures.empty()) return fail(std::to_string(a.failures.size()) + " scene(s) failed");
    if (a.records.size() != 100) return fail("expected 50 scenes");
    if (dump(a.to_json()) != dump(b.to_json())) return fail("two runs differ");
    if (s >= 30.0) return fail(fmt("battery took %.2f s", s));
    const double lo = mean_recall(a, Method::low_only), mr = mean_recall(a, Method::multires);
    const auto detail = fmt("recall@16 low_only %.4f, multires %.4f, gain %.4f", lo, mr, mr - lo) +
                        fmt(" in %.2f s", s);
    if (mr - lo < 0.05) return fail(detail);
    return {true, detail};
}

Outcome distractor_battery() {
    const auto cfg = preset_config("vstar");
    const std::vector<Method> methods = {Method::multires, Method::multires_ovd};
    const auto a = run_eval(kData / "distractor", cfg, methods);
    const auto b = run_eval(kData / "distractor", cfg, methods);
    if (!a.failures.empty()) return fail(std::to_string(a.failures.size()) + " scene(s) failed");
    if (a.records.size() != 100) return fail("expected 50 scenes");
    if (dump(a.to_json()) != dump(b.to_json())) return fail("two runs differ");
    std::map<std::string, std::pair<double, double>> per_scene;
    for (const auto& r : a.records)
        (r.method == Method::multires ? per_scene[r.scene_id].first : per_scene[r.scene_id].second) = r.recall_at_k;
    int worse = 0, strict = 0;
    for (const auto& [id, v] : per_scene) {
        if (v.second < v.first) ++worse;
        if (v.second > v.first) ++strict;
    }
    const double frac = static_cast<double>(strict) / per_scene.size();
    const auto detail = fmt("ovd >= multires on %g/%g scenes, strictly better on %.0f%%",
                            static_cast<double>(per_scene.size() - worse), static_cast<double>(per_scene.size()),
                            100.0 * frac);
    if (worse > 0 || frac < 0.6) return fail(detail);
    return {true, detail};
}

// 9 ---------------------------------------------------------------------------

Outcome end_to_end() {
    const fs::path work = fs::temp_directory_path() / "mrd_acceptance_e2e";
    fs::remove_all(work);
    fs::create_directories(work);
    Image img;
    img.width = img.height = 4480;
    img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            auto* p = img.rgb.data() + (static_cast<std::size_t>(y) * img.width + x) * 3;
            p[0] = static_cast<std::uint8_t>(x >> 5);
            p[1] = static_cast<std::uint8_t>(y >> 5);
            p[2] = 128;
        }
    write_png(work / "scene.png", img, true);

    std::string outputs[2];
    double worst = 0.0;
    for (int run = 0; run < 2; ++run) {
        const auto out = work / ("run" + std::to_string(run) + ".json");
        const std::string cmd = std::string("\"") + MRD_CLI_PATH + "\" retrieve \"" + (work / "scene.png").string() +
                                "\" \"What color is the umbrella next to the bench?\" --preset hr4k --synthetic \"" +
                                (kData / "e2e_hr4k_scene.json").string() + "\" --out \"" + out.string() + "\"";
        const auto t0 = Clock::now();
        const int rc = std::system(cmd.c_str());
        worst = std::max(worst, seconds_since(t0));
        if (rc != 0) return fail("CLI exited with status " + std::to_string(rc));
        outputs[run] = slurp(out);
    }
    if (worst >= 10.0) return fail(fmt("slowest run %.2f s", worst));
    if (outputs[0].empty() || outputs[0] != outputs[1]) return fail("outputs differ between runs");

    const auto golden = kData / "e2e_hr4k_golden.json";
    if (const char* u = std::getenv("MRD_UPDATE_GOLDEN"); u && std::string(u) == "1")
        std::ofstream(golden, std::ios::binary) << outputs[0];
    if (outputs[0] != slurp(golden)) return fail("output differs from " + golden.filename().string());
    return {true, fmt("4480x4480 hr4k, slowest run %.2f s, byte-identical to golden", worst)};
}

// 10 --------------------------------------------------------------------------

Outcome selection_invariance() {
    std::mt19937_64 rng(10010);
    for (int trial = 0; trial < 1000; ++trial) {
        const int r = 1 + static_cast<int>(rng() % 16), c = 1 + static_cast<int>(rng() % 16);
        const int top_k = 1 + static_cast<int>(rng() % 24);
        // Coarse quantization forces plenty of ties.
        std::vector<double> v(static_cast<std::size_t>(r) * c);
        for (auto& x : v) x = static_cast<double>(rng() % 5) / 4.0;
        const ScoreMap map(r, c, v);
        const auto want = select_top_k(map, top_k);

        std::vector<ScoredPatch> cand;
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) cand.push_back({{i, j}, map.at(i, j)});
        std::shuffle(cand.begin(), cand.end(), rng);
        if (!(rank_candidates(cand, top_k) == want))
            return fail("selection depends on evaluation order at trial " + std::to_string(trial));

        std::vector<PatchIndex> sel;
        for (const auto& s : want) sel.push_back(s.index);
        const auto layout = spatial_layout(sel);
        if (layout.cells.size() != sel.size()) return fail("layout dropped cells at trial " + std::to_string(trial));
        std::set<int> rows, cols;
        for (const auto& p : sel) rows.insert(p.row), cols.insert(p.col);
        if (layout.rows != static_cast<int>(rows.size()) || layout.cols != static_cast<int>(cols.size()))
            return fail("layout is not compact at trial " + std::to_string(trial));
        for (const auto& a : layout.cells)
            for (const auto& b : layout.cells) {
                const bool row_ok = (a.source.row < b.source.row) == (a.layout_row < b.layout_row) &&
                                    (a.source.row == b.source.row) == (a.layout_row == b.layout_row);
                const bool col_ok = (a.source.col < b.source.col) == (a.layout_col < b.layout_col) &&
                                    (a.source.col == b.source.col) == (a.layout_col == b.layout_col);
                if (!row_ok || !col_ok) return fail("layout reorders cells at trial " + std::to_string(trial));
            }
    }
    return {true, "1000 shuffled selections identical; layouts keep row and column order"};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"grid algebra", grid_algebra},
        {"cosine similarity", cosine_cases},
        {"multi-resolution fusion vs reference", multires_vs_reference},
        {"detection map vs reference", detection_vs_reference},
        {"score fusion bounds", fusion_bounds},
        {"preset fidelity", preset_fidelity},
        {"fragmented battery", fragmented_battery},
        {"distractor battery", distractor_battery},
        {"end-to-end hr4k run", end_to_end},
        {"selection determinism and layout order", selection_invariance},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %zu: %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
