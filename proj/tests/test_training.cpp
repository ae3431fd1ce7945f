#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "jdd/image_io.hpp"
#include "jdd/tensor_image.hpp"
#include "jdd/training.hpp"
#include "test_util.hpp"

using namespace jdd;
using namespace jdd::train;
namespace fs = std::filesystem;

namespace {

net::NetworkConfig tiny_network() {
    net::NetworkConfig cfg;
    cfg.depths = {8, 16, 32};
    cfg.group_density = 1;
    cfg.reduction = 4;
    cfg.disc_base_width = 8;
    return cfg;
}

TrainConfig tiny_train() {
    TrainConfig cfg;
    cfg.batch = 2;
    cfg.steps = 4;
    cfg.seed = 21;
    cfg.feature_layer = "relu1_2";
    return cfg;
}

// Smooth colour ramps plus LCG texture, quad pattern, sigma 10.
std::vector<data::Sample> make_samples(int count, int size, const std::string& pattern = "quad") {
    std::vector<data::Sample> out;
    for (int i = 0; i < count; ++i) {
        auto clean = test::lcg_image(size, size, 100 + i);
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x)
                for (int c = 0; c < 3; ++c) {
                    auto& v = clean.at(y, x, c);
                    v = 0.6 * (x + y + 7.0 * c) / (2.0 * size + 14.0) + 0.2 * v + 0.1;
                }
        data::PatchRecord r;
        r.id = i;
        r.source = "s" + std::to_string(i);
        r.patch_size = size;
        r.pattern = pattern;
        r.sigma = 10.0;
        r.seed = data::record_seed(5, i);
        out.push_back({r, data::degrade_patch(r, clean), clean});
    }
    return out;
}

bool same_parameters(torch::nn::Module& a, torch::nn::Module& b) {
    auto pa = a.parameters(), pb = b.parameters();
    if (pa.size() != pb.size()) return false;
    for (std::size_t i = 0; i < pa.size(); ++i)
        if (!torch::equal(pa[i], pb[i])) return false;
    return true;
}

}  // namespace

TEST(TrainConfig, DefaultsFollowThePaper) {
    TrainConfig cfg;
    EXPECT_EQ(cfg.lr, 1e-4);
    EXPECT_EQ(cfg.beta1, 0.9);
    EXPECT_EQ(cfg.beta2, 0.99);
    EXPECT_EQ(cfg.batch, 12);
    EXPECT_EQ(cfg.lambda_G, 1e-4);
    const auto back = nlohmann::json(cfg).get<TrainConfig>();
    EXPECT_EQ(nlohmann::json(back), nlohmann::json(cfg));
}

TEST(TrainConfig, Validation) {
    EXPECT_THROW((nlohmann::json{{"learning_rate", 1}}.get<TrainConfig>()), ValidationError);
    EXPECT_THROW((nlohmann::json{{"lr", -1}}.get<TrainConfig>()), ValidationError);
    EXPECT_THROW((nlohmann::json{{"beta2", 1.0}}.get<TrainConfig>()), ValidationError);
    EXPECT_THROW((nlohmann::json{{"tv_operand", "both"}}.get<TrainConfig>()), ValidationError);
    EXPECT_THROW((nlohmann::json{{"batch", "twelve"}}.get<TrainConfig>()), ValidationError);
}

TEST(RunConfig, ParsesAndRejectsUnknownKeys) {
    test::TempDir dir("tr");
    std::ofstream(dir / "ok.json") << R"({"network":{"group_density":2},"train":{"steps":5},"train_manifest":"m.jsonl"})";
    const auto cfg = load_run_config(dir / "ok.json");
    EXPECT_EQ(cfg.network.group_density, 2);
    EXPECT_EQ(cfg.train.steps, 5);
    std::ofstream(dir / "extra.json") << R"({"train_manifest":"m.jsonl","epochz":3})";
    EXPECT_THROW(load_run_config(dir / "extra.json"), ValidationError);
    std::ofstream(dir / "nomanifest.json") << R"({"train":{}})";
    EXPECT_THROW(load_run_config(dir / "nomanifest.json"), ValidationError);
    std::ofstream(dir / "broken.json") << "{";
    EXPECT_THROW(load_run_config(dir / "broken.json"), ValidationError);
}

TEST(Trainer, OneStepIsReproducible) {
    const auto samples = make_samples(4, 16);
    Trainer a(tiny_network(), tiny_train(), samples);
    Trainer b(tiny_network(), tiny_train(), samples);
    const auto ra = a.step(), rb = b.step();
    EXPECT_EQ(nlohmann::json(ra), nlohmann::json(rb));
    EXPECT_GT(ra.L_R, 0.0);
    EXPECT_GT(ra.L_PCL, 0.0);
    EXPECT_GT(ra.L_RFL, 0.0);
    EXPECT_GT(ra.L_G, 0.0);
    EXPECT_NEAR(ra.L_T, ra.L_R + ra.L_RFL + ra.L_PCL + 1e-4 * ra.L_G, 1e-9);
}

TEST(Trainer, DiscriminatorFrozenWithoutAdversarialTerm) {
    auto cfg = tiny_train();
    cfg.use_gan = false;
    cfg.lambda_G = 0.0;
    Trainer t(tiny_network(), cfg, make_samples(4, 16));
    const auto d0 = parameter_hash(*t.discriminator());
    const auto g0 = parameter_hash(*t.generator());
    for (int i = 0; i < 3; ++i) EXPECT_EQ(t.step().L_G, 0.0);
    EXPECT_EQ(parameter_hash(*t.discriminator()), d0);
    EXPECT_NE(parameter_hash(*t.generator()), g0);
}

TEST(Trainer, DiscriminatorUpdatesWithAdversarialTerm) {
    Trainer t(tiny_network(), tiny_train(), make_samples(4, 16));
    const auto d0 = parameter_hash(*t.discriminator());
    t.step();
    EXPECT_NE(parameter_hash(*t.discriminator()), d0);
}

TEST(Trainer, AblationSwitchesRemoveTerms) {
    auto cfg = tiny_train();
    cfg.use_pcl = false;
    cfg.use_rfl = false;
    cfg.use_attention = false;
    Trainer t(tiny_network(), cfg, make_samples(2, 16));
    const auto r = t.step();
    EXPECT_EQ(r.L_PCL, 0.0);
    EXPECT_EQ(r.L_RFL, 0.0);
    EXPECT_FALSE(t.network_config().attention);
}

TEST(Trainer, ResumeIsBitExact) {
    test::TempDir dir("tr");
    const auto samples = make_samples(3, 16);
    auto cfg = tiny_train();
    cfg.steps = 6;
    Trainer full(tiny_network(), cfg, samples);
    for (int i = 0; i < 6; ++i) full.step();

    Trainer first(tiny_network(), cfg, samples);
    for (int i = 0; i < 3; ++i) first.step();
    first.save_checkpoint(dir / "ck.pt");
    Trainer second(tiny_network(), cfg, samples);
    second.load_checkpoint(dir / "ck.pt");
    EXPECT_EQ(second.step_count(), 3);
    for (int i = 0; i < 3; ++i) second.step();
    EXPECT_TRUE(same_parameters(*full.generator(), *second.generator()));
    EXPECT_TRUE(same_parameters(*full.discriminator(), *second.discriminator()));
}

TEST(Trainer, CheckpointRejectsOtherConfig) {
    test::TempDir dir("tr");
    const auto samples = make_samples(2, 16);
    Trainer a(tiny_network(), tiny_train(), samples);
    a.save_checkpoint(dir / "ck.pt");
    auto net = tiny_network();
    net.group_density = 2;
    Trainer b(net, tiny_train(), samples);
    EXPECT_THROW(b.load_checkpoint(dir / "ck.pt"), ValidationError);
    auto cfg = tiny_train();
    cfg.lr = 1e-3;
    Trainer c(tiny_network(), cfg, samples);
    EXPECT_THROW(c.load_checkpoint(dir / "ck.pt"), ValidationError);
    EXPECT_THROW(c.load_checkpoint(dir / "none.pt"), IoError);
}

TEST(Trainer, DivergenceGuard) {
    auto samples = make_samples(2, 16);
    samples[0].clean.data[0] = std::nan("");
    samples[1].clean.data[0] = std::nan("");
    auto cfg = tiny_train();
    cfg.hflip = false;
    Trainer t(tiny_network(), cfg, samples);
    EXPECT_THROW(t.step(), TrainingDiverged);
}

TEST(Trainer, RejectsUnusableSamples) {
    EXPECT_THROW(Trainer(tiny_network(), tiny_train(), {}), ValidationError);
    auto mixed = make_samples(1, 16);
    auto other = make_samples(1, 16, "bayer");
    mixed.push_back(other[0]);
    EXPECT_THROW(Trainer(tiny_network(), tiny_train(), mixed), ValidationError);
    auto net = tiny_network();
    net.depths = {8, 16, 32, 64};  // needs multiples of 8
    EXPECT_THROW(Trainer(net, tiny_train(), make_samples(1, 12)), ValidationError);
}

TEST(Reconstruct, ShapeIsPreservedIncludingOddSizes) {
    torch::manual_seed(0);
    net::Generator g(tiny_network());
    for (auto [h, w] : std::vector<std::pair<int, int>>{{32, 32}, {18, 22}, {7, 5}}) {
        cfa::MosaicImage m{Plane(h, w, 0.5), cfa::CfaPattern::bayer()};
        const auto out = reconstruct(g, m, 0, 16);
        EXPECT_EQ(out.height, h);
        EXPECT_EQ(out.width, w);
    }
}

TEST(Reconstruct, TiledMatchesWholeImageInInterior) {
    torch::manual_seed(0);
    net::Generator g(tiny_network());
    auto m = cfa::add_noise(cfa::mosaic(RgbImage(128, 128, 0.5), cfa::CfaPattern::quad_bayer()), {20.0, 3});
    const auto whole = reconstruct(g, m, 0, 16);
    const auto tiled = reconstruct(g, m, 64, 16);
    double worst = 0.0;
    for (int y = 8; y < 120; ++y)
        for (int x = 8; x < 120; ++x)
            for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(whole.at(y, x, c) - tiled.at(y, x, c)));
    EXPECT_LT(worst, 2.0 / 255.0);
}

TEST(Infer, WritesOutputsIdempotentlyAndChecksPattern) {
    test::TempDir dir("tr");
    auto cfg = tiny_train();
    cfg.steps = 1;
    Trainer t(tiny_network(), cfg, make_samples(2, 16));
    t.step();
    t.save_checkpoint(dir / "ck.pt");
    const auto m = cfa::mosaic(test::lcg_image(24, 24, 1), cfa::CfaPattern::quad_bayer());
    io::write_mosaic(dir / "in.png", m);
    const auto a = infer(dir / "ck.pt", {dir / "in.png"}, dir / "out1");
    const auto b = infer(dir / "ck.pt", {dir / "in.png"}, dir / "out2");
    ASSERT_EQ(a.size(), 1u);
    const auto ia = io::read_rgb(a[0]), ib = io::read_rgb(b[0]);
    EXPECT_EQ(ia.height, 24);
    EXPECT_EQ(ia.data, ib.data);

    io::write_mosaic(dir / "bayer.png", cfa::mosaic(test::lcg_image(24, 24, 1), cfa::CfaPattern::bayer()));
    EXPECT_THROW(infer(dir / "ck.pt", {dir / "bayer.png"}, dir / "out3"), ValidationError);
}

TEST(Train, WritesLogAndCheckpoint) {
    test::TempDir dir("tr");
    const auto samples = make_samples(2, 16);
    data::DatasetManifest manifest;
    manifest.patch_size = 16;
    fs::create_directories(dir / "data/clean");
    for (const auto& s : samples) {
        auto r = s.record;
        r.clean_path = "clean/" + std::to_string(r.id) + ".png";
        r.mosaic_path = "mosaic/" + std::to_string(r.id) + ".png";
        io::write_rgb(dir / "data" / r.clean_path, s.clean);
        io::write_mosaic(dir / "data" / r.mosaic_path, s.mosaic);
        manifest.records.push_back(r);
    }
    data::write_manifest(dir / "data/manifest.jsonl", manifest);

    RunConfig run;
    run.network = tiny_network();
    run.train = tiny_train();
    run.train.steps = 3;
    run.train_manifest = (dir / "data/manifest.jsonl").string();
    run.out_dir = (dir / "run").string();
    const auto result = jdd::train::train(run);
    EXPECT_EQ(result.reports.size(), 3u);
    EXPECT_TRUE(fs::exists(dir / "run/checkpoint.pt"));
    std::ifstream log(dir / "run/log.jsonl");
    std::string line;
    int steps = 0;
    std::getline(log, line);
    EXPECT_EQ(nlohmann::json::parse(line)["kind"], "run");
    while (std::getline(log, line)) ++steps;
    EXPECT_EQ(steps, 3);
}

TEST(Ablation, StructureAndSmoke) {
    auto cfg = tiny_train();
    cfg.steps = 1;
    const auto samples = make_samples(2, 16);
    const auto cells = ablation_matrix(samples, samples, tiny_network(), cfg, {1, 2, 3});
    ASSERT_EQ(cells.size(), 12u);
    std::map<std::string, std::vector<int64_t>> params;
    for (const auto& c : cells) {
        EXPECT_TRUE(c.error.empty()) << c.error;
        EXPECT_TRUE(std::isfinite(c.psnr) && std::isfinite(c.ssim) && std::isfinite(c.delta_e));
        params[c.variant].push_back(c.parameters);
    }
    for (const auto& [variant, p] : params) EXPECT_EQ(p[1] - p[0], p[2] - p[1]) << variant;
    EXPECT_LT(params["Base"][0], params["+AM"][0]);
    EXPECT_EQ(params["+AM"], params["+AM+PCL+RFL"]);
    const auto table = format_ablation_table(cells);
    EXPECT_NE(table.find("+AM+PCL+RFL"), std::string::npos);
}
