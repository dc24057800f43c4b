#include "report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace omdp::cli {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_regret_csv(const std::string& path, const RegretCurve& curve) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kRegretCsvHeader << "\n";
  for (const auto& row : curve.rows) {
    out << row.t << ',' << format_double(row.exp_reward_alg) << ','
        << format_double(row.gain_pi_t) << ',' << format_double(row.gain_star) << ','
        << format_double(row.cum_reward_alg) << ','
        << format_double(row.cum_reward_star) << ',' << format_double(row.cum_regret)
        << ',' << format_double(row.avg_regret) << "\n";
  }
}

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  std::stringstream head(line);
  std::string cell;
  while (std::getline(head, cell, ',')) table.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      row.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::runtime_error(path + ": malformed cell " + cell);
    }
    if (row.size() != table.header.size())
      throw std::runtime_error(path + ": row width mismatch");
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw std::runtime_error(path + ": no data rows");
  return table;
}

namespace {

constexpr int kPlotW = 720, kPlotH = 420, kMargin = 50;

struct Scale {
  double xmin, xmax, ymin, ymax;
  double sx(double x) const {
    const double span = xmax > xmin ? xmax - xmin : 1.0;
    return kMargin + (x - xmin) / span * (kPlotW - 2 * kMargin);
  }
  double sy(double y) const {
    const double span = ymax > ymin ? ymax - ymin : 1.0;
    return kPlotH - kMargin - (y - ymin) / span * (kPlotH - 2 * kMargin);
  }
};

Scale fit(const std::vector<double>& x, const std::vector<const std::vector<double>*>& ys) {
  Scale s{x.front(), x.back(), 0.0, 0.0};
  double lo = 1e300, hi = -1e300;
  for (const auto* y : ys) {
    lo = std::min(lo, *std::min_element(y->begin(), y->end()));
    hi = std::max(hi, *std::max_element(y->begin(), y->end()));
  }
  if (lo == hi) {
    lo -= 1.0;
    hi += 1.0;
  }
  s.ymin = lo;
  s.ymax = hi;
  return s;
}

void open_svg(std::ostream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPlotW
      << "\" height=\"" << kPlotH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kPlotW / 2 << "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";
}

void axes(std::ostream& out, const Scale& s) {
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kPlotH - kMargin << "\" x2=\""
      << kPlotW - kMargin << "\" y2=\"" << kPlotH - kMargin
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
      << "\" y2=\"" << kPlotH - kMargin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kMargin << "\" y=\"" << kPlotH - kMargin + 18
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.xmin << "</text>\n"
      << "<text x=\"" << kPlotW - kMargin << "\" y=\"" << kPlotH - kMargin + 18
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << s.xmax
      << "</text>\n"
      << "<text x=\"" << kMargin - 4 << "\" y=\"" << kPlotH - kMargin
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << s.ymin
      << "</text>\n"
      << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << s.ymax
      << "</text>\n";
}

void polyline(std::ostream& out, const Scale& s, const std::vector<double>& x,
              const std::vector<double>& y, const char* color) {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out << ' ';
    out << s.sx(x[i]) << ',' << s.sy(y[i]);
  }
  out << "\"/>\n";
}

}  // namespace

void write_line_svg(const std::string& path, const std::string& title,
                    const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || x.size() != y.size())
    throw std::runtime_error("write_line_svg: empty or mismatched series");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const Scale s = fit(x, {&y});
  open_svg(out, title);
  axes(out, s);
  polyline(out, s, x, y, "steelblue");
  out << "</svg>\n";
}

void write_two_line_svg(const std::string& path, const std::string& title,
                        const std::vector<double>& x, const std::vector<double>& y1,
                        const std::string& label1, const std::vector<double>& y2,
                        const std::string& label2) {
  if (x.empty() || x.size() != y1.size() || x.size() != y2.size())
    throw std::runtime_error("write_two_line_svg: empty or mismatched series");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const Scale s = fit(x, {&y1, &y2});
  open_svg(out, title);
  axes(out, s);
  polyline(out, s, x, y1, "steelblue");
  polyline(out, s, x, y2, "darkorange");
  out << "<text x=\"" << kPlotW - kMargin << "\" y=\"" << kMargin
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
         "fill=\"steelblue\">"
      << label1 << "</text>\n"
      << "<text x=\"" << kPlotW - kMargin << "\" y=\"" << kMargin + 14
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
         "fill=\"darkorange\">"
      << label2 << "</text>\n</svg>\n";
}

void write_policy_svg(const std::string& path, const StochasticPolicy& policy,
                      int width, int height) {
  if (policy.n_states() != width * height)
    throw std::runtime_error("write_policy_svg: policy size does not match the grid");
  if (policy.n_actions() != 2)
    throw std::runtime_error("write_policy_svg: expects the two-action grid policy");
  const int cell = 28, pad = 20;
  const int w = width * cell + 2 * pad, h = height * cell + 2 * pad;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
      << h << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      out << "<rect x=\"" << pad + x * cell << "\" y=\"" << pad + (height - 1 - y) * cell
          << "\" width=\"" << cell << "\" height=\"" << cell
          << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
  for (int s = 0; s < policy.n_states(); ++s) {
    const int x = s % width, y = s / width;
    const double east = policy(s, 0);
    const bool go_east = east >= 0.5;
    const double strength = go_east ? east : 1.0 - east;
    const double cx = pad + x * cell + cell / 2.0;
    const double cy = pad + (height - 1 - y) * cell + cell / 2.0;
    const double r = 4.0 + 8.0 * strength;  // triangle half-size
    out << "<polygon class=\"arrow\" fill=\"firebrick\" points=\"";
    if (go_east)
      out << cx + r << ',' << cy << ' ' << cx - r << ',' << cy - r * 0.7 << ' ' << cx - r
          << ',' << cy + r * 0.7;
    else
      out << cx << ',' << cy - r << ' ' << cx - r * 0.7 << ',' << cy + r << ' '
          << cx + r * 0.7 << ',' << cy + r;
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

nlohmann::json build_manifest(const std::string& dir, const nlohmann::json& config,
                              const std::string& started, const std::string& finished,
                              const std::string& status) {
  nlohmann::json files = nlohmann::json::object();
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json")
      names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    const std::string full = (std::filesystem::path(dir) / name).string();
    files[name] = {{"sha256", sha256_file(full)},
                   {"bytes", std::filesystem::file_size(full)}};
  }
  return {{"artifact", {{"name", "omdp"}, {"version", "0.1.0"}}},
          {"config", config},
          {"started", started},
          {"finished", finished},
          {"status", status},
          {"files", files}};
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace omdp::cli
