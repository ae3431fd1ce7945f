#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "jdd/report.hpp"
#include "test_util.hpp"

using namespace jdd;
using namespace jdd::report;

namespace {

// Width and height from the IHDR chunk, read straight from the file bytes.
std::pair<std::uint32_t, std::uint32_t> png_dims(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    unsigned char b[24];
    in.read(reinterpret_cast<char*>(b), 24);
    auto be = [&](int o) {
        return (std::uint32_t(b[o]) << 24) | (std::uint32_t(b[o + 1]) << 16) | (std::uint32_t(b[o + 2]) << 8) | b[o + 3];
    };
    return {be(16), be(20)};
}

std::string image_line(const std::string& ds, double sigma, double psnr, double ssim, double de) {
    std::ostringstream s;
    s << R"({"kind":"image","name":"a","reference":"a","dataset":")" << ds << R"(","sigma":)" << sigma
      << R"(,"psnr":)" << psnr << R"(,"ssim":)" << ssim << R"(,"delta_e":)" << de << "}\n";
    return s.str();
}

}  // namespace

TEST(Report, SingleRecordSingleRow) {
    std::istringstream in(image_line("kodak", 15, 30.5, 0.9, 2.0));
    const auto t = read_report(in);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0].count, 1);
    EXPECT_EQ(t.rows[0].psnr, 30.5);
    const auto text = format_report(t);
    EXPECT_NE(text.find("kodak"), std::string::npos);
    EXPECT_NE(text.find("30.50"), std::string::npos);
}

TEST(Report, GroupsBySigmaThenDataset) {
    std::string s;
    for (double sigma : {25.0, 5.0, 15.0}) {
        s += image_line("mcm", sigma, 30, 0.9, 2);
        s += image_line("mcm", sigma, 32, 0.8, 4);
        s += image_line("bsd", sigma, 20, 0.5, 1);
    }
    std::istringstream in(s);
    const auto t = read_report(in);
    ASSERT_EQ(t.rows.size(), 6u);
    EXPECT_EQ(t.rows[0].sigma, 5.0);
    EXPECT_EQ(t.rows[0].dataset, "bsd");
    EXPECT_EQ(t.rows[1].count, 2);
    EXPECT_DOUBLE_EQ(t.rows[1].psnr, 31.0);
    EXPECT_DOUBLE_EQ(t.rows[1].delta_e, 3.0);
    const auto text = format_report(t);
    std::size_t groups = 0;
    for (std::size_t p = text.find("sigma ="); p != std::string::npos; p = text.find("sigma =", p + 1)) ++groups;
    EXPECT_EQ(groups, 3u);
}

TEST(Report, MalformedLinesAreCounted) {
    std::istringstream in(image_line("x", 5, 30, 0.9, 2) + "not json\n{\"kind\":\"image\"}\n" +
                          R"({"kind":"other","dataset":"x","sigma":5,"psnr":1,"ssim":1,"delta_e":1})" + "\n\n");
    const auto t = read_report(in);
    EXPECT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.skipped_lines, 3);
    EXPECT_NE(format_report(t).find("skipped 3"), std::string::npos);
}

TEST(Report, InfinitePsnrAndSummaryOnlyGroups) {
    std::istringstream in(
        R"({"kind":"summary","dataset":"d","sigma":0,"count":4,"psnr":"inf","ssim":1.0,"delta_e":0.0})"
        "\n");
    const auto t = read_report(in);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_TRUE(std::isinf(t.rows[0].psnr));
    EXPECT_EQ(t.rows[0].count, 4);
    EXPECT_NE(format_report(t).find("inf"), std::string::npos);
}

TEST(Report, ChartDimensionsMatchConfiguredSize) {
    test::TempDir dir("rep");
    std::istringstream in(image_line("a", 5, 30, 0.9, 2) + image_line("a", 15, 25, 0.8, 3));
    const auto files = write_charts(read_report(in), dir.path(), {321, 187});
    ASSERT_EQ(files.size(), 3u);
    for (const auto& f : files) {
        const auto [w, h] = png_dims(f);
        EXPECT_EQ(w, 321u);
        EXPECT_EQ(h, 187u);
    }
    EXPECT_THROW(write_charts(ReportTable{}, dir.path(), {10, 10}), ValidationError);
}
