#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "thzauth/error.hpp"
#include "thzauth/harness.hpp"

namespace thzauth::harness {

namespace {

std::string format_number(double v, const char* spec) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::string format_value(double v) { return format_number(v, "%.10g"); }

void ResultTable::add(std::string sweep, std::string metric, double estimate, double stderr_value,
                      std::uint64_t n) {
  rows_.push_back({std::move(sweep), std::move(metric), estimate, stderr_value, n});
}

const ResultRow& ResultTable::at(const std::string& sweep, const std::string& metric) const {
  for (const auto& r : rows_) {
    if (r.sweep == sweep && r.metric == metric) return r;
  }
  throw std::out_of_range("no row (" + sweep + ", " + metric + ") in " + name_);
}

std::string ResultTable::to_csv() const {
  std::string out = "sweep,metric,estimate,stderr,n\n";
  for (const auto& r : rows_) {
    out += r.sweep;
    out += ',';
    out += r.metric;
    out += ',';
    out += format_number(r.estimate, "%.12g");
    out += ',';
    out += format_number(r.stderr_, "%.6g");
    out += ',';
    out += std::to_string(r.n);
    out += '\n';
  }
  return out;
}

void ResultTable::write_csv(const std::filesystem::path& path) const {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_csv();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace thzauth::harness
