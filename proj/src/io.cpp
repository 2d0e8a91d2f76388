#include "higgs/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace higgs::io {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += header[i];
  }
  buffer_ += "\r\n";
}

void CsvWriter::add_row(const std::vector<double>& row) {
  if (row.size() != columns_) throw std::invalid_argument("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += format_double(row[i]);
  }
  buffer_ += "\r\n";
}

void CsvWriter::add_row_raw(const std::vector<std::string>& row) {
  if (row.size() != columns_) throw std::invalid_argument("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += row[i];
  }
  buffer_ += "\r\n";
}

void CsvWriter::write(const std::string& path) const { write_text(path, buffer_); }

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

nlohmann::json versioned_json() {
  nlohmann::json j;
  j["schema"] = 1;
  return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

nlohmann::json bundle_to_json(const parabolic::FilteredBundleSpec& spec) {
  nlohmann::json j = versioned_json();
  j["genus"] = spec.genus;
  j["rank"] = spec.rank;
  j["deg_E0"] = spec.deg_E0;
  nlohmann::json points = nlohmann::json::array();
  for (const auto& pw : spec.weights) {
    nlohmann::json wlist = nlohmann::json::array();
    for (const auto& e : pw.entries) {
      wlist.push_back({e.weight.get_num().get_si(), e.weight.get_den().get_si(),
                       static_cast<long>(e.multiplicity)});
    }
    points.push_back({{"weights", wlist}});
  }
  j["points"] = points;
  return j;
}

parabolic::FilteredBundleSpec bundle_from_json(const nlohmann::json& j) {
  parabolic::FilteredBundleSpec spec;
  spec.genus = j.at("genus").get<unsigned>();
  spec.rank = j.at("rank").get<unsigned>();
  spec.deg_E0 = j.at("deg_E0").get<long>();
  for (const auto& pt : j.at("points")) {
    parabolic::PointWeights pw;
    for (const auto& w : pt.at("weights")) {
      if (!w.is_array() || w.size() != 3)
        throw std::invalid_argument("bundle_from_json: weight entries are [num, den, mult]");
      parabolic::Rational q(w[0].get<long>(), w[1].get<long>());
      q.canonicalize();
      pw.entries.push_back({q, w[2].get<unsigned>()});
    }
    spec.weights.push_back(pw);
  }
  spec.validate();
  return spec;
}

std::map<std::string, std::string> parse_config(const std::string& text,
                                                const std::vector<std::string>& allowed) {
  std::map<std::string, std::string> cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r\n");
      const auto b = s.find_last_not_of(" \t\r\n");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw std::invalid_argument("config: unknown key '" + key + "'");
    cfg[key] = val;
  }
  return cfg;
}

std::map<std::string, std::string> load_config(const std::string& path,
                                               const std::vector<std::string>& allowed) {
  return parse_config(read_text(path), allowed);
}

double config_double(const std::map<std::string, std::string>& cfg, const std::string& key,
                     double fallback) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  std::size_t pos = 0;
  const double v = std::stod(it->second, &pos);
  if (pos != it->second.size())
    throw std::invalid_argument("config: key '" + key + "' is not a number");
  return v;
}

long config_long(const std::map<std::string, std::string>& cfg, const std::string& key,
                 long fallback) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  std::size_t pos = 0;
  const long v = std::stol(it->second, &pos);
  if (pos != it->second.size())
    throw std::invalid_argument("config: key '" + key + "' is not an integer");
  return v;
}

std::string config_string(const std::map<std::string, std::string>& cfg, const std::string& key,
                          const std::string& fallback) {
  auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

namespace {

std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string svg_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
  const double ml = 70, mr = 20, mt = 40, mb = 50;
  const double pw = opt.width - ml - mr, ph = opt.height - mt - mb;

  auto tx = [&](double v) { return opt.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return opt.log_y ? std::log10(v) : v; };

  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (opt.log_x && !(s.x[i] > 0.0)) continue;
      if (opt.log_y && !(s.y[i] > 0.0)) continue;
      const double xv = tx(s.x[i]), yv = ty(s.y[i]);
      if (first) { x0 = x1 = xv; y0 = y1 = yv; first = false; }
      x0 = std::min(x0, xv); x1 = std::max(x1, xv);
      y0 = std::min(y0, yv); y1 = std::max(y1, yv);
    }
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;

  auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return mt + ph - (ty(v) - y0) / (y1 - y0) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
      << opt.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << opt.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << opt.title << "</text>\n";
  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0;
    const double fy = y0 + (y1 - y0) * k / 4.0;
    const double gx = ml + pw * k / 4.0;
    const double gy = mt + ph - ph * k / 4.0;
    const double lx = opt.log_x ? std::pow(10.0, fx) : fx;
    const double ly = opt.log_y ? std::pow(10.0, fy) : fy;
    svg << "<line x1=\"" << fmt_coord(gx) << "\" y1=\"" << mt + ph << "\" x2=\"" << fmt_coord(gx)
        << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt_coord(gx) << "\" y=\"" << mt + ph + 18
        << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt_tick(lx) << "</text>\n";
    svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << fmt_coord(gy) << "\" x2=\"" << ml << "\" y2=\""
        << fmt_coord(gy) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << fmt_coord(gy + 3)
        << "\" text-anchor=\"end\" font-size=\"10\">" << fmt_tick(ly) << "</text>\n";
  }
  svg << "<text x=\"" << opt.width / 2 << "\" y=\"" << opt.height - 10
      << "\" text-anchor=\"middle\" font-size=\"12\">" << opt.x_label << "</text>\n";
  svg << "<text x=\"15\" y=\"" << opt.height / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 "
      << opt.height / 2 << ")\">" << opt.y_label << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    svg << "<polyline fill=\"none\" stroke=\"" << kPalette[si % 6] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (opt.log_x && !(s.x[i] > 0.0)) continue;
      if (opt.log_y && !(s.y[i] > 0.0)) continue;
      svg << fmt_coord(px(s.x[i])) << ',' << fmt_coord(py(s.y[i])) << ' ';
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 15 + 14 * static_cast<double>(si)
        << "\" font-size=\"11\" fill=\"" << kPalette[si % 6] << "\">" << s.name << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace higgs::io
