#include "trady/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace trady {

const char* kMetricsCsvHeader =
    "epoch,lr,train_loss,train_acc,test_acc,slots_used,budget,weight_sparsity,"
    "activation_sparsity,wgrad_macs,macs_saved_fraction,alpha_hat";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_metrics_csv(const RunRecord& record, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_metrics_csv: cannot open " + path);
  out << kMetricsCsvHeader << "\n";
  for (const EpochRow& r : record.rows) {
    out << r.epoch << "," << format_double(r.lr) << "," << format_double(r.train_loss) << ","
        << format_double(r.train_acc) << "," << format_double(r.test_acc) << "," << r.slots_used
        << "," << r.budget << "," << format_double(r.weight_sparsity) << ","
        << format_double(r.activation_sparsity) << "," << r.wgrad_macs << ","
        << format_double(r.macs_saved_fraction) << ","
        << (r.alpha_hat.has_value() ? format_double(*r.alpha_hat) : "") << "\n";
  }
  if (!out) throw std::runtime_error("write_metrics_csv: write failed for " + path);
}

std::vector<EpochRow> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_metrics_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsCsvHeader) {
    throw std::runtime_error("read_metrics_csv: " + path + ": bad header");
  }
  std::vector<EpochRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (line.back() == ',') fields.push_back("");
    if (fields.size() != 12) {
      throw std::runtime_error("read_metrics_csv: " + path + ": bad field count");
    }
    EpochRow r;
    r.epoch = std::stoi(fields[0]);
    r.lr = std::stod(fields[1]);
    r.train_loss = std::stod(fields[2]);
    r.train_acc = std::stod(fields[3]);
    r.test_acc = std::stod(fields[4]);
    r.slots_used = std::stoull(fields[5]);
    r.budget = std::stoull(fields[6]);
    r.weight_sparsity = std::stod(fields[7]);
    r.activation_sparsity = std::stod(fields[8]);
    r.wgrad_macs = std::stoull(fields[9]);
    r.macs_saved_fraction = std::stod(fields[10]);
    if (!fields[11].empty()) r.alpha_hat = std::stod(fields[11]);
    rows.push_back(r);
  }
  return rows;
}

void write_matrix_csv(const std::vector<std::string>& labels,
                      const std::vector<std::vector<double>>& values, const std::string& path) {
  if (labels.size() != values.size()) {
    throw std::invalid_argument("write_matrix_csv: label/row count mismatch");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix_csv: cannot open " + path);
  out << "run";
  for (const std::string& l : labels) out << "," << l;
  out << "\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].size() != labels.size()) {
      throw std::invalid_argument("write_matrix_csv: matrix is not square");
    }
    out << labels[i];
    for (double v : values[i]) out << "," << format_double(v);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_matrix_csv: write failed for " + path);
}

namespace {

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

void render_svg_curves(const std::vector<Series>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::string& path) {
  const double width = 720, height = 440;
  const double ml = 70, mr = 150, mt = 40, mb = 50;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        first = false;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double px = (width - ml - mr) / (xmax - xmin);
  const double py = (height - mt - mb) / (ymax - ymin);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("render_svg_curves: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
      << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double fx = xmin + (xmax - xmin) * tick / 4.0;
    const double fy = ymin + (ymax - ymin) * tick / 4.0;
    const double sx = ml + (fx - xmin) * px;
    const double sy = height - mb - (fy - ymin) * py;
    out << "<text x=\"" << svg_num(sx) << "\" y=\"" << height - mb + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << svg_num(fx) << "</text>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << svg_num(sy + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << svg_num(fy) << "</text>\n";
  }
  out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
      << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double sx = ml + (s.x[i] - xmin) * px;
      const double sy = height - mb - (s.y[i] - ymin) * py;
      out << svg_num(sx) << "," << svg_num(sy) << " ";
    }
    out << "\"/>\n";
    const double ly = mt + 16 * static_cast<double>(si);
    out << "<line x1=\"" << width - mr + 10 << "\" y1=\"" << ly << "\" x2=\"" << width - mr + 30
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << width - mr + 35 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">"
        << s.name << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("render_svg_curves: write failed for " + path);
}

}  // namespace trady
