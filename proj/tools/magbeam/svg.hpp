#pragma once

#include <string>
#include <vector>

#include "magbeam/types.hpp"

namespace magbeam::cli {

// Minimal 2D plot: data-space polylines, markers, and vertical error bars,
// auto-scaled into a fixed canvas.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label);

    void polyline(const std::vector<Vec2>& points, const std::string& color, bool closed = false);
    void markers(const std::vector<Vec2>& points, const std::string& color);
    void error_bar(const Vec2& from, const Vec2& to, const std::string& color);
    void legend(const std::string& label, const std::string& color);
    void equal_aspect(bool on) { equal_aspect_ = on; }

    std::string render() const;

private:
    struct Series {
        std::vector<Vec2> points;
        std::string color;
        enum class Kind { line, closed_line, markers, bar } kind;
    };
    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
    std::vector<std::pair<std::string, std::string>> legend_;
    bool equal_aspect_ = false;
};

}  // namespace magbeam::cli
