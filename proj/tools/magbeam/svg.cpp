#include "svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

namespace magbeam::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::polyline(const std::vector<Vec2>& points, const std::string& color, bool closed) {
    series_.push_back({points, color, closed ? Series::Kind::closed_line : Series::Kind::line});
}

void SvgPlot::markers(const std::vector<Vec2>& points, const std::string& color) {
    series_.push_back({points, color, Series::Kind::markers});
}

void SvgPlot::error_bar(const Vec2& from, const Vec2& to, const std::string& color) {
    series_.push_back({{from, to}, color, Series::Kind::bar});
}

void SvgPlot::legend(const std::string& label, const std::string& color) { legend_.emplace_back(label, color); }

std::string SvgPlot::render() const {
    Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
    Vec2 hi = -lo;
    for (const auto& s : series_) {
        for (const auto& p : s.points) {
            if (!p.allFinite()) continue;
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
    }
    if (!lo.allFinite()) {
        lo = Vec2::Zero();
        hi = Vec2::Ones();
    }
    for (int i = 0; i < 2; ++i) {
        if (hi[i] - lo[i] <= 0.0) {
            lo[i] -= 0.5;
            hi[i] += 0.5;
        }
        const double pad = 0.05 * (hi[i] - lo[i]);
        lo[i] -= pad;
        hi[i] += pad;
    }
    const double plot_w = kWidth - 2 * kMargin;
    const double plot_h = kHeight - 2 * kMargin;
    double sx = plot_w / (hi.x() - lo.x());
    double sy = plot_h / (hi.y() - lo.y());
    if (equal_aspect_) sx = sy = std::min(sx, sy);
    auto to_px = [&](const Vec2& p) {
        return Vec2(kMargin + (p.x() - lo.x()) * sx, kHeight - kMargin - (p.y() - lo.y()) * sy);
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">" << escape(title_)
        << "</text>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 15
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(x_label_) << "</text>\n";
    out << "<text x=\"18\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
        << kHeight / 2 << ")\">" << escape(y_label_) << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = lo.x() + (hi.x() - lo.x()) * k / 4.0;
        const double fy = lo.y() + (hi.y() - lo.y()) * k / 4.0;
        const Vec2 px = to_px(Vec2(fx, lo.y()));
        const Vec2 py = to_px(Vec2(lo.x(), fy));
        out << "<text x=\"" << fmt(px.x()) << "\" y=\"" << fmt(kHeight - kMargin + 16)
            << "\" text-anchor=\"middle\" font-size=\"11\">" << tick(fx) << "</text>\n";
        out << "<text x=\"" << fmt(kMargin - 6) << "\" y=\"" << fmt(py.y() + 4)
            << "\" text-anchor=\"end\" font-size=\"11\">" << tick(fy) << "</text>\n";
    }

    for (const auto& s : series_) {
        switch (s.kind) {
            case Series::Kind::line:
            case Series::Kind::closed_line:
            case Series::Kind::bar: {
                out << "<" << (s.kind == Series::Kind::closed_line ? "polygon" : "polyline") << " fill=\"none\" stroke=\""
                    << s.color << "\" stroke-width=\"" << (s.kind == Series::Kind::bar ? "1" : "1.5") << "\" points=\"";
                for (const auto& p : s.points) {
                    if (!p.allFinite()) continue;
                    const Vec2 q = to_px(p);
                    out << fmt(q.x()) << ',' << fmt(q.y()) << ' ';
                }
                out << "\"/>\n";
                break;
            }
            case Series::Kind::markers:
                for (const auto& p : s.points) {
                    if (!p.allFinite()) continue;
                    const Vec2 q = to_px(p);
                    out << "<circle cx=\"" << fmt(q.x()) << "\" cy=\"" << fmt(q.y()) << "\" r=\"3\" fill=\"" << s.color
                        << "\"/>\n";
                }
                break;
        }
    }
    for (std::size_t i = 0; i < legend_.size(); ++i) {
        const double y = kMargin + 16 + 16.0 * static_cast<double>(i);
        out << "<rect x=\"" << kWidth - kMargin - 130 << "\" y=\"" << y - 9 << "\" width=\"10\" height=\"10\" fill=\""
            << legend_[i].second << "\"/>\n";
        out << "<text x=\"" << kWidth - kMargin - 114 << "\" y=\"" << y << "\" font-size=\"11\">"
            << escape(legend_[i].first) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace magbeam::cli
