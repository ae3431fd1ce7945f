#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "jdd/cfa.hpp"
#include "jdd/cli.hpp"
#include "jdd/image_io.hpp"
#include "test_util.hpp"

using namespace jdd;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "jdd");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Cli, MosaicMatchesModuleOracle) {
    test::TempDir dir("cli");
    const auto img = test::lcg_image(4, 4, 3);
    io::write_rgb(dir / "in.png", img, 16);
    const auto r = run({"mosaic", "--pattern", "quad", (dir / "in.png").string(), (dir / "out.png").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto got = io::read_mosaic(dir / "out.png");
    const auto want = cfa::mosaic(io::read_rgb(dir / "in.png"), cfa::CfaPattern::quad_bayer());
    EXPECT_EQ(got.pattern, cfa::CfaPattern::quad_bayer());
    for (std::size_t i = 0; i < want.plane.data.size(); ++i)
        EXPECT_NEAR(got.plane.data[i], want.plane.data[i], 1e-12);
}

TEST(Cli, MosaicHonoursSeed) {
    test::TempDir dir("cli");
    io::write_rgb(dir / "in.png", test::lcg_image(8, 8, 3), 16);
    const auto in = (dir / "in.png").string();
    for (const char* name : {"a.png", "b.png"})
        ASSERT_EQ(run({"mosaic", "--sigma", "15", "--seed", "4", in, (dir / name).string()}).code, 0);
    ASSERT_EQ(run({"mosaic", "--sigma", "15", "--seed", "5", in, (dir / "c.png").string()}).code, 0);
    EXPECT_EQ(slurp(dir / "a.png"), slurp(dir / "b.png"));
    EXPECT_NE(slurp(dir / "a.png"), slurp(dir / "c.png"));
}

TEST(Cli, EvalIdenticalDirectories) {
    test::TempDir dir("cli");
    for (int i = 0; i < 2; ++i) io::write_rgb(dir / ("d/" + std::to_string(i) + ".png"), test::lcg_image(16, 16, i), 16);
    const auto d = (dir / "d").string();
    const auto r = run({"eval", "--pred", d, "--ref", d, "--out", (dir / "m.jsonl").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(dir / "m.jsonl");
    std::string line, last;
    while (std::getline(in, line)) last = line;
    const auto summary = nlohmann::json::parse(last);
    EXPECT_EQ(summary["kind"], "summary");
    EXPECT_EQ(summary["psnr"], "inf");
    EXPECT_EQ(summary["delta_e"].get<double>(), 0.0);
}

TEST(Cli, MissingInputIsValidationExit) {
    const auto r = run({"mosaic", "/nonexistent/in.png", "/tmp/out.png"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("/nonexistent/in.png"), std::string::npos);
}

TEST(Cli, UnknownFlagPrintsUsage) {
    const auto r = run({"report", "--frobnicate"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("Usage"), std::string::npos);
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"unknowncmd"}).code, 1);
}

TEST(Cli, BadPatternIsValidationExit) {
    test::TempDir dir("cli");
    io::write_rgb(dir / "in.png", test::lcg_image(4, 4, 3), 8);
    EXPECT_EQ(run({"mosaic", "--pattern", "xtrans", (dir / "in.png").string(), (dir / "o.png").string()}).code, 1);
}

TEST(Cli, RuntimeFailureExitsTwo) {
    test::TempDir dir("cli");
    std::ofstream(dir / "run.json") << R"({"train_manifest":")" << (dir / "missing.jsonl").string() << "\"}";
    const auto r = run({"train", "--config", (dir / "run.json").string()});
    EXPECT_EQ(r.code, 2) << r.err;
}

TEST(Cli, HelpForEverySubcommandDocumentsFlags) {
    const std::map<std::string, std::vector<std::string>> flags = {
        {"prepare", {"--src", "--out", "--pattern", "--patch", "--sigma", "--split", "--seed"}},
        {"mosaic", {"--pattern", "--sigma", "--seed", "input", "output"}},
        {"train", {"--config", "--out", "--resume", "--max-steps", "--seed"}},
        {"eval", {"--pred", "--ref", "--checkpoint", "--manifest", "--out", "--charts", "--dataset", "--sigma",
                  "--quantize-8bit", "--tile", "--overlap", "--seed"}},
        {"infer", {"--checkpoint", "--out", "--tile", "--overlap", "inputs", "--seed"}},
        {"ablate", {"--config", "--densities", "--out", "--seed"}},
        {"report", {"input", "--charts", "--width", "--height", "--seed"}},
    };
    for (const auto& [sub, names] : flags) {
        const auto r = run({sub, "--help"});
        EXPECT_EQ(r.code, 0) << sub;
        for (const auto& f : names) EXPECT_NE(r.out.find(f), std::string::npos) << sub << " " << f;
    }
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ReportWritesChartsOfRequestedSize) {
    test::TempDir dir("cli");
    std::ofstream(dir / "m.jsonl")
        << R"({"kind":"image","name":"a","reference":"a","dataset":"d","sigma":5,"psnr":30,"ssim":0.9,"delta_e":2})"
        << "\n";
    const auto r = run({"report", (dir / "m.jsonl").string(), "--charts", (dir / "c").string(), "--width", "200",
                        "--height", "120"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "c/psnr.png"));
    EXPECT_NE(r.out.find("sigma = 5.0"), std::string::npos);
}
