#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "astute/error.hpp"
#include "astute/nn.hpp"

namespace astute::harness {

inline constexpr const char* kSoftwareVersion = "astute 0.1.0";

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open '" + p.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Collects every file a command writes so the manifest can list it.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) throw IoError("cannot create output directory '" + root_.string() + "': " + ec.message());
  }

  const std::filesystem::path& root() const { return root_; }

  void write(const std::string& rel, const std::string& content) {
    const auto path = root_ / rel;
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "'");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
    files_.push_back({rel, hex64(fnv1a(content))});
  }

  void stage(const std::string& name, double seconds) { stages_.push_back({name, seconds}); }

  /// `manifest.json`: command, config hash, software version, every artifact
  /// with its hash, wall-clock per stage.
  void write_manifest(const std::string& command, const nlohmann::json& config) {
    nlohmann::json m;
    m["command"] = command;
    m["software_version"] = kSoftwareVersion;
    m["config_hash"] = hex64(fnv1a(config.dump()));
    m["config"] = config;
    m["artifacts"] = nlohmann::json::array();
    for (const auto& f : files_) m["artifacts"].push_back({{"path", f.path}, {"fnv1a", f.hash}});
    m["stages"] = nlohmann::json::array();
    for (const auto& s : stages_) m["stages"].push_back({{"name", s.name}, {"seconds", s.seconds}});
    const auto path = root_ / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << m.dump(2) << '\n';
  }

 private:
  struct File {
    std::string path;
    std::string hash;
  };
  struct Stage {
    std::string name;
    double seconds;
  };
  std::filesystem::path root_;
  std::vector<File> files_;
  std::vector<Stage> stages_;
};

class StageTimer {
 public:
  StageTimer(ArtifactWriter& w, std::string name)
      : w_(w), name_(std::move(name)), t0_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    w_.stage(name_, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count());
  }

 private:
  ArtifactWriter& w_;
  std::string name_;
  std::chrono::steady_clock::time_point t0_;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Polyline chart on [0,1]² (normalized λ against astuteness).
inline std::string svg_curves(const std::string& title, const std::vector<PlotSeries>& series) {
  constexpr double W = 480, H = 360, L = 60, R = 130, T = 30, B = 50;
  const double pw = W - L - R, ph = H - T - B;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  auto px = [&](double x) { return L + x * pw; };
  auto py = [&](double y) { return T + (1.0 - y) * ph; };
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << title << "</text>\n";
  s << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = k / 4.0;
    s << "<text x=\"" << px(v) << "\" y=\"" << T + ph + 16 << "\" text-anchor=\"middle\" font-size=\"10\">" << v
      << "</text>\n";
    s << "<text x=\"" << L - 6 << "\" y=\"" << py(v) + 3 << "\" text-anchor=\"end\" font-size=\"10\">" << v
      << "</text>\n";
  }
  s << "<text x=\"" << px(0.5) << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << "lambda / lambda_max</text>\n";
  s << "<text x=\"14\" y=\"" << py(0.5) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
    << py(0.5) << ")\">astuteness</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* c = colors[i % 6];
    s << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < series[i].x.size(); ++k)
      s << (k ? " " : "") << px(series[i].x[k]) << ',' << py(series[i].y[k]);
    s << "\"/>\n";
    const double ly = T + 14 + 16.0 * static_cast<double>(i);
    s << "<line x1=\"" << L + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << L + pw + 30 << "\" y2=\"" << ly
      << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << L + pw + 34 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">" << series[i].label
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

inline std::string num(double v) { return astute::detail::fmt17(v); }

}  // namespace astute::harness
