#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace jdd::report {

/// Aggregate of one (sigma, dataset) group of an evaluation report.
struct ReportRow {
    double sigma = 0.0;
    std::string dataset;
    int64_t count = 0;
    double psnr = 0.0;  ///< may be +inf
    double ssim = 0.0;
    double delta_e = 0.0;
};

struct ReportTable {
    std::vector<ReportRow> rows;  ///< sorted by sigma, then dataset
    int64_t skipped_lines = 0;
};

/// Groups "image" records by (sigma, dataset) and averages them. Groups that
/// only have a "summary" record take the summary's values. Malformed lines
/// are skipped and counted.
ReportTable read_report(std::istream& in);
ReportTable read_report(const std::filesystem::path& path);

/// Text table with one block per sigma.
std::string format_report(const ReportTable& table);

struct ChartOptions {
    int width = 640;
    int height = 400;
};

/// One bar chart PNG per metric (psnr.png, ssim.png, delta_e.png).
std::vector<std::filesystem::path> write_charts(const ReportTable& table, const std::filesystem::path& out_dir,
                                                const ChartOptions& opts = {});

}  // namespace jdd::report
