#include "wavescope/export.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

namespace wavescope {

namespace {

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Eigen::Ref<const RowMatrixXd>& m,
                      const std::vector<std::string>& comment, const std::vector<std::string>& header,
                      const Eigen::VectorXd* row_labels) {
  std::ofstream out(path);
  if (!out) throw FormatError("csv: cannot write " + path.string());
  for (const auto& c : comment) out << "# " << c << '\n';
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  if (!header.empty()) out << '\n';
  for (Index r = 0; r < m.rows(); ++r) {
    if (row_labels) out << num((*row_labels)[r]) << ',';
    for (Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << num(m(r, c));
    out << '\n';
  }
}

void write_png_gray(const std::filesystem::path& path, int width, int height, const std::vector<unsigned char>& pixels) {
  require(width > 0 && height > 0 && pixels.size() == static_cast<size_t>(width) * height, "png: bad image size");
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw FormatError("png: cannot write " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw FormatError("png: libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw FormatError("png: write failed for " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(pixels.data() + static_cast<size_t>(y) * width));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_heatmap_png(const std::filesystem::path& path, const Eigen::Ref<const RowMatrixXd>& m, bool log_scale,
                       int max_width) {
  require(m.rows() >= 1 && m.cols() >= 1, "heatmap: empty matrix");
  RowMatrixXd v = log_scale ? RowMatrixXd((m.array().abs() + 1e-12).log10()) : RowMatrixXd(m);
  const double lo = v.minCoeff(), hi = v.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;

  // Columns are max-pooled down to max_width so long signals stay viewable.
  const int width = static_cast<int>(std::min<Index>(m.cols(), max_width));
  const int height = static_cast<int>(m.rows());
  std::vector<unsigned char> px(static_cast<size_t>(width) * height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const Index c0 = static_cast<Index>(x) * m.cols() / width;
      const Index c1 = std::max(c0 + 1, static_cast<Index>(x + 1) * m.cols() / width);
      const double val = v.row(y).segment(c0, c1 - c0).maxCoeff();
      px[static_cast<size_t>(y) * width + x] = static_cast<unsigned char>(std::lround(255.0 * (val - lo) / span));
    }
  write_png_gray(path, width, height, px);
}

namespace {

void draw_series(std::vector<unsigned char>& px, int width, int y0, int height, const Eigen::VectorXd& s, double lo,
                 double hi, unsigned char shade) {
  const double span = hi > lo ? hi - lo : 1.0;
  auto row_of = [&](double v) {
    const double t = (v - lo) / span;
    return y0 + std::clamp(static_cast<int>(std::lround((1.0 - t) * (height - 1))), 0, height - 1);
  };
  int prev = -1;
  for (int x = 0; x < width; ++x) {
    const Index i = s.size() > 1 ? static_cast<Index>(x) * (s.size() - 1) / std::max(1, width - 1) : 0;
    const int y = row_of(s[i]);
    const int a = prev < 0 ? y : std::min(prev, y);
    const int b = prev < 0 ? y : std::max(prev, y);
    for (int yy = a; yy <= b; ++yy) px[static_cast<size_t>(yy) * width + x] = shade;
    prev = y;
  }
}

}  // namespace

void write_line_plot_png(const std::filesystem::path& path, const std::vector<Eigen::VectorXd>& series, int width,
                         int height) {
  require(!series.empty(), "line plot: no series");
  double lo = series.front().minCoeff(), hi = series.front().maxCoeff();
  for (const auto& s : series) {
    require(s.size() >= 1, "line plot: empty series");
    lo = std::min(lo, s.minCoeff());
    hi = std::max(hi, s.maxCoeff());
  }
  std::vector<unsigned char> px(static_cast<size_t>(width) * height, 255);
  for (size_t k = 0; k < series.size(); ++k) {
    const auto shade = static_cast<unsigned char>(160 - std::min<size_t>(k, 4) * 40);
    draw_series(px, width, 0, height, series[k], lo, hi, shade);
  }
  write_png_gray(path, width, height, px);
}

void write_strip_png(const std::filesystem::path& path, const Eigen::Ref<const RowMatrixXd>& rows, int width,
                     int panel_height) {
  require(rows.rows() >= 1 && rows.cols() >= 1, "strip: empty matrix");
  const int height = static_cast<int>(rows.rows()) * panel_height;
  std::vector<unsigned char> px(static_cast<size_t>(width) * height, 255);
  for (Index r = 0; r < rows.rows(); ++r) {
    const Eigen::VectorXd s = rows.row(r).transpose();
    const double amp = std::max(s.cwiseAbs().maxCoeff(), 1e-300);
    draw_series(px, width, static_cast<int>(r) * panel_height, panel_height, s, -amp, amp, 0);
  }
  write_png_gray(path, width, height, px);
}

}  // namespace wavescope
