#include "csda/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace csda {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<Series>& series) {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      if (first) {
        xmin = xmax = p.x;
        ymin = ymax = p.y;
        first = false;
      }
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto sx = [&](double x) {
    return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w;
  };
  const auto sy = [&](double y) {
    return kMarginTop + plot_h - (y - ymin) / (ymax - ymin) * plot_h;
  };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << escape(title) << "</text>\n";

  // Axes with four ticks per side.
  out << "<g stroke=\"#444\" stroke-width=\"1\" font-family=\"sans-serif\" "
         "font-size=\"11\">\n";
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\""
      << kMarginLeft << "\" y2=\"" << kMarginTop + plot_h << "\"/>\n";
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h
      << "\" x2=\"" << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h
      << "\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    out << "<text stroke=\"none\" x=\"" << fmt(sx(xv)) << "\" y=\""
        << fmt(kMarginTop + plot_h + 16) << "\" text-anchor=\"middle\">"
        << fmt(xv) << "</text>\n";
    out << "<text stroke=\"none\" x=\"" << fmt(kMarginLeft - 6) << "\" y=\""
        << fmt(sy(yv) + 4) << "\" text-anchor=\"end\">" << fmt(yv)
        << "</text>\n";
  }
  out << "</g>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">"
      << escape(x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 "
      << kHeight / 2 << ")\">" << escape(y_label) << "</text>\n";

  int legend_y = kMarginTop + 6;
  for (const auto& s : series) {
    if (s.points.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : s.points) {
      out << fmt(sx(p.x)) << "," << fmt(sy(p.y)) << " ";
    }
    out << "\"/>\n";
    out << "<text x=\"" << kMarginLeft + plot_w - 4 << "\" y=\"" << legend_y
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\" fill=\""
        << s.color << "\">" << escape(s.name) << "</text>\n";
    legend_y += 14;
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_confusion_matrix(const std::string& title, std::uint64_t tp,
                                 std::uint64_t fp, std::uint64_t fn,
                                 std::uint64_t tn) {
  // Row-normalized layout: rows are truth (clean, interfered), columns are
  // prediction (clean, interfered).
  struct Cell {
    std::uint64_t count;
    std::uint64_t row_total;
    int row, col;
  };
  const Cell cells[4] = {
      {tn, tn + fp, 0, 0},
      {fp, tn + fp, 0, 1},
      {fn, fn + tp, 1, 0},
      {tp, fn + tp, 1, 1},
  };
  const int size = 130;
  const int ox = 150, oy = 70;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" "
         "height=\"400\" viewBox=\"0 0 480 400\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"240\" y=\"26\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << escape(title) << "</text>\n";

  const char* truth_names[2] = {"clean", "interfered"};
  const char* pred_names[2] = {"pred clean", "pred interfered"};
  for (const auto& c : cells) {
    const double frac =
        c.row_total == 0
            ? 0.0
            : static_cast<double>(c.count) / static_cast<double>(c.row_total);
    // Light-to-dark blue ramp on the row percentage.
    const int chan = static_cast<int>(std::lround(235.0 - 150.0 * frac));
    const int x = ox + c.col * size;
    const int y = oy + c.row * size;
    out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << size
        << "\" height=\"" << size << "\" fill=\"rgb(" << chan << "," << chan
        << ",235)\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << x + size / 2 << "\" y=\"" << y + size / 2 - 6
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"17\">"
        << c.count << "</text>\n";
    std::ostringstream pct;
    pct.precision(2);
    pct << std::fixed << 100.0 * frac;
    out << "<text x=\"" << x + size / 2 << "\" y=\"" << y + size / 2 + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">"
        << pct.str() << "%</text>\n";
  }
  for (int r = 0; r < 2; ++r) {
    out << "<text x=\"" << ox - 10 << "\" y=\"" << oy + r * size + size / 2
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"13\">"
        << truth_names[r] << "</text>\n";
    out << "<text x=\"" << ox + r * size + size / 2 << "\" y=\""
        << oy + 2 * size + 24
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">"
        << pred_names[r] << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace csda
