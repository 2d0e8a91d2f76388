#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "higgs/parabolic.hpp"

namespace higgs::io {

// Deterministic emission: fixed float formatting, no timestamps, stable key
// order, so identical inputs always produce byte-identical files.

/// Locale-independent "%.17g".
std::string format_double(double v);

/// RFC-4180 CSV with a mandatory header row.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<double>& row);
  void add_row_raw(const std::vector<std::string>& row);
  const std::string& str() const { return buffer_; }
  void write(const std::string& path) const;

 private:
  std::string buffer_;
  std::size_t columns_ = 0;
};

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

/// JSON with the versioned "schema": 1 field prepended.
nlohmann::json versioned_json();
void write_json(const std::string& path, const nlohmann::json& j);

// FilteredBundleSpec <-> JSON:
// { "schema":1, "genus":g, "rank":r, "deg_E0":d,
//   "points":[ { "weights": [[num, den, mult], ...] }, ... ] }
nlohmann::json bundle_to_json(const parabolic::FilteredBundleSpec& spec);
parabolic::FilteredBundleSpec bundle_from_json(const nlohmann::json& j);

/// Flat key=value config files; '#' starts a comment.  Unknown keys are the
/// caller's problem (checked against `allowed` when non-empty).
std::map<std::string, std::string> parse_config(const std::string& text,
                                                const std::vector<std::string>& allowed = {});
std::map<std::string, std::string> load_config(const std::string& path,
                                               const std::vector<std::string>& allowed = {});

double config_double(const std::map<std::string, std::string>& cfg, const std::string& key,
                     double fallback);
long config_long(const std::map<std::string, std::string>& cfg, const std::string& key,
                 long fallback);
std::string config_string(const std::map<std::string, std::string>& cfg, const std::string& key,
                          const std::string& fallback);

// Minimal standalone SVG line plots (no renderer dependency).
struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
};

struct PlotOptions {
  std::string title, x_label, y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 640, height = 420;
};

std::string svg_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& opt);

}  // namespace higgs::io
