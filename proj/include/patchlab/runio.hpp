#pragma once

// Run artifacts: strict JSON configs, round-trip CSV, labeled digests,
// run records, and small native SVG plots.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace patchlab {

inline std::filesystem::path resolve_out_dir(const std::string& flag_value) {
  std::filesystem::path dir;
  if (!flag_value.empty()) {
    dir = flag_value;
  } else if (const char* env = std::getenv("PATCHLAB_OUT"); env && *env) {
    dir = env;
  } else {
    dir = "patchlab_out";
  }
  std::filesystem::create_directories(dir);
  return dir;
}

// shortest digits-preserving decimal
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("write_csv: row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_g17(row[i]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string digest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("digest_file: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string bytes = ss.str();
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
  return buf;
}

inline std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Records what a CLI invocation produced; written next to the outputs.
class RunRecord {
 public:
  RunRecord(std::string command, nlohmann::json params)
      : started_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["params"] = std::move(params);
    doc_["started_utc"] = utc_timestamp();
  }

  void add_output(const std::filesystem::path& path, std::size_t rows) {
    nlohmann::json o;
    o["file"] = path.filename().string();
    o["rows"] = rows;
    o["digest"] = digest_file(path);
    doc_["outputs"].push_back(o);
  }

  void note(const std::string& key, const nlohmann::json& value) { doc_["notes"][key] = value; }

  void write(const std::filesystem::path& path) {
    doc_["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("RunRecord: cannot open " + path.string());
    out << doc_.dump(2) << "\n";
  }

 private:
  nlohmann::json doc_;
  std::chrono::steady_clock::time_point started_;
};

inline nlohmann::json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("config: " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config: top level must be an object");
  return j;
}

// unknown keys are configuration errors, not warnings
inline void require_known_keys(const nlohmann::json& j, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::runtime_error("config: unknown key \"" + it.key() + "\"");
}

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};

// minimal line plot; log axes skip non-positive samples
inline void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::vector<SvgSeries>& series, bool logx = false,
                           bool logy = false) {
  const double W = 820, H = 500, L = 80, R = 30, T = 48, B = 58;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  auto tx = [&](double v) { return logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return logy ? std::log10(v) : v; };
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((logx && s.x[i] <= 0.0) || (logy && s.y[i] <= 0.0)) continue;
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(s.y[i]));
    }
  if (xmin > xmax) { xmin = 0.0; xmax = 1.0; }
  if (ymin > ymax) { ymin = 0.0; ymax = 1.0; }
  if (xmax - xmin < 1e-300) { xmax = xmin + 1.0; }
  if (ymax - ymin < 1e-300) { ymax = ymin + (std::abs(ymin) > 0 ? std::abs(ymin) : 1.0) * 1e-3; }
  double padx = 0.03 * (xmax - xmin), pady = 0.06 * (ymax - ymin);
  xmin -= padx; xmax += padx; ymin -= pady; ymax += pady;

  auto px = [&](double v) { return L + (tx(v) - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - ymin) / (ymax - ymin) * (H - T - B); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_svg_plot: cannot open " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << " " << H
      << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
      << "</text>\n";
  out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
      << H - T - B << "\" fill=\"none\" stroke=\"#333\"/>\n";

  char lbl[48];
  for (int i = 0; i <= 5; ++i) {
    double fx = xmin + (xmax - xmin) * i / 5.0;
    double gx = L + (W - L - R) * i / 5.0;
    double val = logx ? std::pow(10.0, fx) : fx;
    std::snprintf(lbl, sizeof(lbl), "%.4g", val);
    out << "<line x1=\"" << gx << "\" y1=\"" << H - B << "\" x2=\"" << gx << "\" y2=\"" << H - B + 5
        << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << gx << "\" y=\"" << H - B + 20 << "\" text-anchor=\"middle\">" << lbl
        << "</text>\n";
    double fy = ymin + (ymax - ymin) * i / 5.0;
    double gy = H - B - (H - T - B) * i / 5.0;
    val = logy ? std::pow(10.0, fy) : fy;
    std::snprintf(lbl, sizeof(lbl), "%.4g", val);
    out << "<line x1=\"" << L - 5 << "\" y1=\"" << gy << "\" x2=\"" << L << "\" y2=\"" << gy
        << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << L - 8 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">" << lbl
        << "</text>\n";
  }
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16
      << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  out << "<text x=\"20\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << (T + H - B) / 2 << ")\">" << ylabel << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = palette[si % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((logx && s.x[i] <= 0.0) || (logy && s.y[i] <= 0.0)) continue;
      out << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    out << "\"/>\n";
    double ly = T + 18 + 18 * static_cast<double>(si);
    out << "<line x1=\"" << W - R - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R - 126
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << W - R - 120 << "\" y=\"" << ly << "\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace patchlab
