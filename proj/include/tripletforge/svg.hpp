#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tripletforge::svg {

struct Series {
    std::string name;
    std::vector<double> x, y;
};

struct Axes {
    std::string title, xlabel, ylabel;
    bool log_y = false;
};

void line_plot(const std::filesystem::path& path, const Axes& ax, const std::vector<Series>& series);

// values[iy * x.size() + ix]; NaN cells are left blank.
void heatmap(const std::filesystem::path& path, const Axes& ax, const std::vector<double>& x,
             const std::vector<double>& y, const std::vector<double>& values, bool log_scale = false);

}  // namespace tripletforge::svg
