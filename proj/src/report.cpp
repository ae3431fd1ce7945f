#include "jdd/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "jdd/image.hpp"

namespace jdd::report {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double read_psnr(const json& v) {
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw std::invalid_argument("bad psnr");
    }
    return v.get<double>();
}

struct Group {
    int64_t images = 0;
    double psnr = 0.0;
    double ssim = 0.0;
    double delta_e = 0.0;
    bool have_summary = false;
    ReportRow summary;
};

std::string fixed(double v, int digits) {
    if (std::isinf(v)) return "inf";
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

std::string row_label(const ReportRow& r) { return r.dataset + " s" + fixed(r.sigma, 0); }

}  // namespace

ReportTable read_report(std::istream& in) {
    std::map<std::pair<double, std::string>, Group> groups;
    ReportTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            const std::string kind = j.at("kind");
            const double sigma = j.at("sigma");
            const std::string dataset = j.at("dataset");
            ReportRow r{sigma, dataset, 0, read_psnr(j.at("psnr")), j.at("ssim"), j.at("delta_e")};
            auto& g = groups[{sigma, dataset}];
            if (kind == "image") {
                ++g.images;
                g.psnr += r.psnr;
                g.ssim += r.ssim;
                g.delta_e += r.delta_e;
            } else if (kind == "summary") {
                r.count = j.value("count", int64_t{0});
                g.have_summary = true;
                g.summary = r;
            } else {
                ++table.skipped_lines;
            }
        } catch (const std::exception&) {
            ++table.skipped_lines;
        }
    }
    for (const auto& [key, g] : groups) {
        if (g.images > 0) {
            const double n = static_cast<double>(g.images);
            table.rows.push_back({key.first, key.second, g.images, g.psnr / n, g.ssim / n, g.delta_e / n});
        } else if (g.have_summary) {
            table.rows.push_back(g.summary);
        }
    }
    return table;
}

ReportTable read_report(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read report " + path.string());
    return read_report(in);
}

std::string format_report(const ReportTable& table) {
    std::ostringstream out;
    std::size_t width = 9;
    for (const auto& r : table.rows) width = std::max(width, r.dataset.size() + 2);
    const auto pad = [](std::string s, std::size_t w) {
        s.resize(std::max(w, s.size()), ' ');
        return s;
    };
    bool first = true;
    double current = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : table.rows) {
        if (first || r.sigma != current) {
            if (!first) out << '\n';
            out << "sigma = " << fixed(r.sigma, 1) << '\n';
            out << pad("dataset", width) << pad("images", 8) << pad("PSNR", 10) << pad("SSIM", 9) << "DeltaE\n";
            current = r.sigma;
            first = false;
        }
        out << pad(r.dataset, width) << pad(std::to_string(r.count), 8) << pad(fixed(r.psnr, 2), 10)
            << pad(fixed(r.ssim, 4), 9) << fixed(r.delta_e, 3) << '\n';
    }
    if (table.skipped_lines > 0) out << "(skipped " << table.skipped_lines << " malformed line(s))\n";
    return out.str();
}

std::vector<fs::path> write_charts(const ReportTable& table, const fs::path& out_dir, const ChartOptions& opts) {
    if (opts.width < 64 || opts.height < 64) throw ValidationError("chart size must be at least 64x64");
    fs::create_directories(out_dir);
    struct Metric {
        const char* name;
        double ReportRow::*field;
    };
    const Metric metrics[] = {{"psnr", &ReportRow::psnr}, {"ssim", &ReportRow::ssim}, {"delta_e", &ReportRow::delta_e}};

    std::vector<fs::path> written;
    for (const auto& m : metrics) {
        cv::Mat img(opts.height, opts.width, CV_8UC3, cv::Scalar(255, 255, 255));
        const int left = 40, right = 10, top = 24, bottom = 40;
        const int plot_w = opts.width - left - right;
        const int plot_h = opts.height - top - bottom;
        double vmax = 0.0;
        for (const auto& r : table.rows) {
            const double v = r.*m.field;
            if (std::isfinite(v)) vmax = std::max(vmax, v);
        }
        if (vmax <= 0.0) vmax = 1.0;
        cv::putText(img, m.name, {left, 16}, cv::FONT_HERSHEY_SIMPLEX, 0.5, {0, 0, 0}, 1, cv::LINE_AA);
        cv::line(img, {left, top + plot_h}, {left + plot_w, top + plot_h}, {0, 0, 0});
        cv::line(img, {left, top}, {left, top + plot_h}, {0, 0, 0});

        const int n = static_cast<int>(table.rows.size());
        for (int i = 0; i < n; ++i) {
            const auto& r = table.rows[static_cast<std::size_t>(i)];
            const double v = r.*m.field;
            // Infinite PSNR is drawn full height and labelled.
            const double frac = std::isfinite(v) ? std::clamp(v / vmax, 0.0, 1.0) : 1.0;
            const int slot = plot_w / std::max(n, 1);
            const int x0 = left + i * slot + slot / 6;
            const int x1 = left + (i + 1) * slot - slot / 6;
            const int y0 = top + plot_h - static_cast<int>(std::lround(frac * plot_h));
            cv::rectangle(img, {x0, y0}, {std::max(x0, x1 - 1), top + plot_h - 1}, {180, 120, 60}, cv::FILLED);
            cv::putText(img, fixed(v, 2), {x0, std::max(top + 10, y0 - 4)}, cv::FONT_HERSHEY_SIMPLEX, 0.35,
                        {0, 0, 0}, 1, cv::LINE_AA);
            cv::putText(img, row_label(r), {x0, top + plot_h + 16}, cv::FONT_HERSHEY_SIMPLEX, 0.35, {0, 0, 0}, 1,
                        cv::LINE_AA);
        }
        const fs::path path = out_dir / (std::string(m.name) + ".png");
        if (!cv::imwrite(path.string(), img)) throw IoError("cannot write chart " + path.string());
        written.push_back(path);
    }
    return written;
}

}  // namespace jdd::report
