#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "jdd/metrics.hpp"
#include "test_util.hpp"

using namespace jdd;
using namespace jdd::metrics;

TEST(Psnr, IdenticalIsInfinite) {
    const auto img = test::lcg_image(8, 8, 1);
    EXPECT_TRUE(std::isinf(psnr(img, img)));
}

TEST(Psnr, UniformErrorIsTwentyDb) {
    RgbImage a(8, 8, 0.25), b(8, 8, 0.35);
    EXPECT_NEAR(psnr(a, b), 20.0, 1e-12);
}

TEST(Psnr, LoopOracle) {
    EXPECT_NEAR(psnr(test::lcg_image(16, 16, 3), test::lcg_image(16, 16, 4)), 7.472956566722363, 1e-10);
}

TEST(Psnr, ShapeMismatch) { EXPECT_THROW(psnr(RgbImage(4, 4), RgbImage(5, 4)), ValidationError); }

TEST(Psnr, MonotoneInNoiseAmplitude) {
    const auto img = test::lcg_image(32, 32, 8);
    double last = INFINITY;
    for (double amp : {0.01, 0.05, 0.1}) {
        auto noisy = img;
        test::Lcg g(77);
        for (auto& v : noisy.data) v += amp * (2.0 * g.next() - 1.0);
        const double p = psnr(img, noisy);
        EXPECT_LT(p, last);
        last = p;
    }
}

TEST(Ssim, IdenticalIsOne) {
    const auto img = test::lcg_image(16, 16, 2);
    EXPECT_DOUBLE_EQ(ssim(img, img), 1.0);
}

TEST(Ssim, ConstantOffsetClosedForm) {
    EXPECT_NEAR(ssim(RgbImage(11, 11, 0.25), RgbImage(11, 11, 0.75)), 0.6000639897616381, 1e-12);
}

TEST(Ssim, ScikitImageOracle) {
    EXPECT_NEAR(ssim(test::lcg_image(32, 32, 5), test::lcg_image(32, 32, 6)), 0.0026185673059511126, 1e-6);
    auto c = test::lcg_image(16, 16, 7);
    auto d = c;
    for (auto& v : d.data) v = 0.9 * v + 0.05;
    EXPECT_NEAR(ssim(c, d), 0.9943115934240848, 1e-6);
}

TEST(Ssim, Symmetric) {
    const auto a = test::lcg_image(20, 20, 1), b = test::lcg_image(20, 20, 2);
    EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-9);
}

TEST(Ssim, RejectsImagesSmallerThanWindow) {
    EXPECT_THROW(ssim(RgbImage(10, 20), RgbImage(10, 20)), ValidationError);
}

TEST(Quantize, RoundsToEightBitLevels) {
    RgbImage img(1, 1);
    img.data = {0.5, 1.0 / 512.0, 0.999};
    const auto q = quantize_8bit(img);
    EXPECT_DOUBLE_EQ(q.data[0], 128.0 / 255.0);
    EXPECT_DOUBLE_EQ(q.data[2], 1.0);
}

TEST(EvaluateDataset, SingleIdenticalPair) {
    const auto img = test::lcg_image(12, 12, 4);
    const auto r = evaluate_dataset({{"a.png", img}}, {{"a.png", img}});
    ASSERT_EQ(r.images.size(), 1u);
    EXPECT_TRUE(std::isinf(r.mean_psnr));
    EXPECT_EQ(r.mean_ssim, 1.0);
    EXPECT_EQ(r.mean_delta_e, 0.0);
    EXPECT_TRUE(r.warnings.empty());
}

TEST(EvaluateDataset, MeansAreHandAverages) {
    const auto a = test::lcg_image(12, 12, 1), b = test::lcg_image(12, 12, 2), c = test::lcg_image(12, 12, 3);
    const auto r = evaluate_dataset({{"x", a}, {"y", b}}, {{"x", b}, {"y", c}});
    ASSERT_EQ(r.images.size(), 2u);
    EXPECT_NEAR(r.mean_psnr, (psnr(b, a) + psnr(c, b)) / 2, 1e-9);
    EXPECT_NEAR(r.mean_ssim, (r.images[0].ssim + r.images[1].ssim) / 2, 1e-9);
    EXPECT_NEAR(r.mean_delta_e, (r.images[0].delta_e + r.images[1].delta_e) / 2, 1e-9);
}

TEST(EvaluateDataset, CountMismatch) {
    const auto a = test::lcg_image(12, 12, 1);
    EXPECT_THROW(evaluate_dataset({{"x", a}}, {}), ValidationError);
}

TEST(EvaluateDataset, ShuffledPairingIsFlagged) {
    const auto a = test::lcg_image(12, 12, 1), b = test::lcg_image(12, 12, 2);
    const auto expected = pairing_checksum({"a", "b"}, {"a", "b"});
    EvalOptions opts;
    opts.expected_checksum = expected;
    const auto ok = evaluate_dataset({{"a", a}, {"b", b}}, {{"a", a}, {"b", b}}, opts);
    EXPECT_EQ(ok.pairing_checksum, expected);
    EXPECT_TRUE(ok.warnings.empty());
    const auto shuffled = evaluate_dataset({{"a", a}, {"b", b}}, {{"b", b}, {"a", a}}, opts);
    EXPECT_NE(shuffled.pairing_checksum, expected);
    EXPECT_FALSE(shuffled.warnings.empty());
}

TEST(ReportJsonl, InfinitePsnrSentinel) {
    const auto img = test::lcg_image(12, 12, 4);
    std::ostringstream out;
    write_report_jsonl(out, evaluate_dataset({{"a", img}}, {{"a", img}}), "toy", 15.0);
    std::istringstream in(out.str());
    std::string line;
    std::vector<nlohmann::json> recs;
    while (std::getline(in, line)) recs.push_back(nlohmann::json::parse(line));
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0]["kind"], "image");
    EXPECT_EQ(recs[1]["kind"], "summary");
    EXPECT_EQ(recs[1]["psnr"], "inf");
    EXPECT_EQ(recs[1]["delta_e"].get<double>(), 0.0);
    EXPECT_EQ(recs[1]["sigma"].get<double>(), 15.0);
}
