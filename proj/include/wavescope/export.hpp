#pragma once

#include "wavescope/common.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace wavescope {

/// Writes the matrix as CSV, one row per line. `comment` lines are prefixed
/// with '#'; `row_labels`, when given, become the first column.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::Ref<const RowMatrixXd>& m,
                      const std::vector<std::string>& comment = {},
                      const std::vector<std::string>& header = {},
                      const Eigen::VectorXd* row_labels = nullptr);

/// 8-bit grayscale PNG, row-major pixels.
void write_png_gray(const std::filesystem::path& path, int width, int height, const std::vector<unsigned char>& pixels);

/// Min-max normalized heatmap; row 0 at the top, bright = large.
/// `log_scale` maps values through log10(v + 1e-12) first.
void write_heatmap_png(const std::filesystem::path& path, const Eigen::Ref<const RowMatrixXd>& m,
                       bool log_scale = false, int max_width = 2048);

/// Line plot of several equally long series on one axis, each in a darker
/// gray level than the previous.
void write_line_plot_png(const std::filesystem::path& path, const std::vector<Eigen::VectorXd>& series,
                         int width = 1024, int height = 256);

/// One small line panel per matrix row, stacked vertically.
void write_strip_png(const std::filesystem::path& path, const Eigen::Ref<const RowMatrixXd>& rows,
                     int width = 512, int panel_height = 64);

}  // namespace wavescope
