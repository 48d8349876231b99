#include "harness/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "core/world.hpp"

namespace explore {

namespace {

struct Sample {
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
};

std::map<int, std::vector<Sample>> ReadTrajectories(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo,
                "no trajectory log at " + path +
                    " (is this a run directory with log.trajectory = true?)");
  }
  std::map<int, std::vector<Sample>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line.rfind("t,agent_id,px,py,pz,vx,vy,vz", 0) != 0) {
        throw Error(ErrorCode::kIo, path + " has an unexpected header");
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<double> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      char *end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0') {
        throw Error(ErrorCode::kIo, path + ":" + std::to_string(line_no) +
                                        ": bad field '" + field + "'");
      }
      f.push_back(v);
    }
    if (f.size() != 11) {
      throw Error(ErrorCode::kIo, path + ":" + std::to_string(line_no) +
                                      ": expected 11 fields");
    }
    const Vec3 v(f[5], f[6], f[7]);
    out[static_cast<int>(f[1])].push_back({f[2], f[3], v.norm()});
  }
  if (out.empty()) throw Error(ErrorCode::kIo, path + " has no samples");
  return out;
}

// blue (slow) to red (fast)
std::string SpeedColor(double speed, double top) {
  const double s = top > 0.0 ? std::clamp(speed / top, 0.0, 1.0) : 0.0;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround(255 * s)),
                static_cast<int>(std::lround(80 * (1.0 - std::abs(2 * s - 1)))),
                static_cast<int>(std::lround(255 * (1.0 - s))));
  return buf;
}

void WriteText(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace

PlotFiles EmitPlots(const std::string &run_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(run_dir);
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, run_dir + " is not a directory");
  }
  const auto agents = ReadTrajectories((dir / "trajectory.csv").string());
  const fs::path world_path = dir / "world.txt";
  if (!fs::exists(world_path)) {
    throw Error(ErrorCode::kIo, "no world file at " + world_path.string());
  }
  const std::vector<Cylinder> cylinders = LoadWorldFile(world_path.string());

  // everything is in memory; build the outputs before touching the disk
  double lo_x = 0.0, lo_y = 0.0, hi_x = 0.0, hi_y = 0.0, top = 0.0;
  for (const Cylinder &c : cylinders) {
    hi_x = std::max(hi_x, c.cx + c.radius);
    hi_y = std::max(hi_y, c.cy + c.radius);
  }
  for (const auto &[id, samples] : agents) {
    for (const Sample &s : samples) {
      lo_x = std::min(lo_x, s.x);
      lo_y = std::min(lo_y, s.y);
      hi_x = std::max(hi_x, s.x);
      hi_y = std::max(hi_y, s.y);
      top = std::max(top, s.speed);
    }
  }
  const double scale = 20.0;  // px per meter
  const double margin = 10.0;
  const double width = (hi_x - lo_x) * scale + 2 * margin;
  const double height = (hi_y - lo_y) * scale + 2 * margin;
  auto px = [&](double x) { return margin + (x - lo_x) * scale; };
  // svg y grows downwards
  auto py = [&](double y) { return margin + (hi_y - y) * scale; };

  std::map<int, std::string> csv;
  for (const auto &[id, samples] : agents) {
    std::string text = "x,y,speed\n";
    char buf[96];
    for (const Sample &s : samples) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", s.x, s.y,
                    s.speed);
      text += buf;
    }
    csv[id] = std::move(text);
  }

  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
                "height=\"%.0f\" viewBox=\"0 0 %.2f %.2f\">\n",
                std::ceil(width), std::ceil(height), width, height);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"0\" y=\"0\" width=\"%.2f\" height=\"%.2f\" "
                "fill=\"white\"/>\n",
                width, height);
  svg += buf;
  for (const Cylinder &c : cylinders) {
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"#888\"/>\n",
                  px(c.cx), py(c.cy), c.radius * scale);
    svg += buf;
  }
  for (const auto &[id, samples] : agents) {
    svg += "<g id=\"agent_" + std::to_string(id) +
           "\" stroke-width=\"2\" stroke-linecap=\"round\">\n";
    // one segment per 10 samples keeps the file small
    const size_t stride = 10;
    for (size_t i = 0; i + 1 < samples.size(); i += stride) {
      const size_t j = std::min(i + stride, samples.size() - 1);
      std::snprintf(buf, sizeof(buf),
                    "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                    "stroke=\"%s\"/>\n",
                    px(samples[i].x), py(samples[i].y), px(samples[j].x),
                    py(samples[j].y),
                    SpeedColor(samples[i].speed, top).c_str());
      svg += buf;
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";

  const fs::path out_dir = dir / "plots";
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir.string());
  PlotFiles files;
  for (const auto &[id, text] : csv) {
    const fs::path p = out_dir / ("agent_" + std::to_string(id) + ".csv");
    WriteText(p, text);
    files.polylines.push_back(p.string());
  }
  files.svg = (out_dir / "overview.svg").string();
  WriteText(files.svg, svg);
  return files;
}

}  // namespace explore
