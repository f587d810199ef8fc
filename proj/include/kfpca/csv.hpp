#ifndef KFPCA_CSV_HPP
#define KFPCA_CSV_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "kfpca/estimators.hpp"
#include "kfpca/metrics.hpp"
#include "kfpca/simulation.hpp"

namespace kfpca {

namespace csv {

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, end);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

/// Reads non-blank lines, keeping their 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::string>> read_lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    lines.emplace_back(number, line);
  }
  return lines;
}

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so a failed run never leaves a partial output behind.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw InputError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InputError("cannot move output into '" + path.string() + "': " + ec.message());
  }
}

}  // namespace csv

// ---------------------------------------------------------------------------
// Dataset files: header of grid times, then one subject per row, with an
// optional leading "id" column.

inline FunctionalSample read_dataset(std::istream& in, const std::string& name) {
  const auto lines = csv::read_lines(in);
  const auto fail = [&](std::size_t line, std::size_t col, const std::string& what) {
    return InputError(name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  };
  if (lines.empty()) throw InputError(name + ": file is empty");

  const auto header = csv::split(lines[0].second);
  std::string first(header[0]);
  std::transform(first.begin(), first.end(), first.begin(), [](unsigned char c) { return std::tolower(c); });
  const std::size_t offset = first == "id" ? 1 : 0;
  if (header.size() <= offset) throw fail(lines[0].first, 1, "header has no grid times");
  const std::size_t d = header.size() - offset;

  Vector points(static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    double t;
    if (!csv::parse_double(header[j + offset], t))
      throw fail(lines[0].first, j + offset + 1, "grid time '" + std::string(header[j + offset]) + "' is not a number");
    if (j > 0 && !(t > points[static_cast<Eigen::Index>(j - 1)]))
      throw fail(lines[0].first, j + offset + 1, "grid times must be strictly increasing");
    points[static_cast<Eigen::Index>(j)] = t;
  }
  if (d < 4) throw fail(lines[0].first, 1, "need at least 4 grid times, found " + std::to_string(d));

  const std::size_t n = lines.size() - 1;
  if (n < 3) throw InputError(name + ": need at least 3 subjects, found " + std::to_string(n));
  Matrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [number, text] = lines[i + 1];
    const auto cells = csv::split(text);
    if (cells.size() != d + offset)
      throw fail(number, std::min(cells.size(), d + offset) + 1,
                 "expected " + std::to_string(d + offset) + " fields, found " + std::to_string(cells.size()));
    for (std::size_t j = 0; j < d; ++j) {
      double v;
      if (!csv::parse_double(cells[j + offset], v))
        throw fail(number, j + offset + 1, "value '" + std::string(cells[j + offset]) + "' is not a finite number");
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return FunctionalSample(std::make_shared<const Grid>(Grid::trapezoid(std::move(points))), std::move(values));
}

inline FunctionalSample read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open file");
  return read_dataset(in, path.string());
}

inline std::string format_dataset(const FunctionalSample& sample, bool with_ids = true) {
  std::ostringstream out;
  if (with_ids) out << "id,";
  const Vector& t = sample.grid()->points();
  for (Eigen::Index j = 0; j < t.size(); ++j) out << (j ? "," : "") << csv::format_double(t[j]);
  out << '\n';
  for (Eigen::Index i = 0; i < sample.values().rows(); ++i) {
    if (with_ids) out << (i + 1) << ',';
    for (Eigen::Index j = 0; j < t.size(); ++j) out << (j ? "," : "") << csv::format_double(sample.values()(i, j));
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Results table: case,distribution,method,metric,mean,sd,runs,seed

inline constexpr std::string_view kResultsHeader = "case,distribution,method,metric,mean,sd,runs,seed";

inline std::string format_results(const std::vector<ResultRow>& rows, bool header = true) {
  std::ostringstream out;
  if (header) out << kResultsHeader << '\n';
  for (const ResultRow& r : rows)
    out << r.case_id << ',' << to_string(r.distribution) << ',' << to_string(r.method) << ',' << r.metric << ','
        << csv::format_double(r.mean) << ',' << csv::format_double(r.sd) << ',' << r.runs << ',' << r.seed << '\n';
  return out.str();
}

inline std::vector<ResultRow> read_results(std::istream& in, const std::string& name) {
  const auto lines = csv::read_lines(in);
  if (lines.empty() || lines[0].second != kResultsHeader)
    throw InputError(name + ":1: expected header '" + std::string(kResultsHeader) + "'");
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto where = name + ":" + std::to_string(lines[i].first);
    const auto c = csv::split(lines[i].second);
    if (c.size() != 8) throw InputError(where + ": expected 8 fields");
    ResultRow r{};
    auto dist = parse_distribution(c[1]);
    auto method = parse_method(c[2]);
    double case_id, runs;
    if (!csv::parse_double(c[0], case_id) || !dist || !method || !csv::parse_double(c[4], r.mean) ||
        !csv::parse_double(c[5], r.sd) || !csv::parse_double(c[6], runs) ||
        std::from_chars(c[7].data(), c[7].data() + c[7].size(), r.seed).ec != std::errc())
      throw InputError(where + ": malformed row");
    r.case_id = static_cast<int>(case_id);
    r.distribution = *dist;
    r.method = *method;
    r.metric = std::string(c[3]);
    r.runs = static_cast<std::size_t>(runs);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Mean band: t,mean,lower,upper

inline std::string format_band(const MeanBand& band) {
  std::ostringstream out;
  out << "t,mean,lower,upper\n";
  const Vector& t = band.mean.grid()->points();
  for (Eigen::Index j = 0; j < t.size(); ++j)
    out << csv::format_double(t[j]) << ',' << csv::format_double(band.mean.values()[j]) << ','
        << csv::format_double(band.lower.values()[j]) << ',' << csv::format_double(band.upper.values()[j]) << '\n';
  return out.str();
}

/// Parses a band file into columns (t, mean, lower, upper).
inline std::array<std::vector<double>, 4> read_band(std::istream& in, const std::string& name) {
  const auto lines = csv::read_lines(in);
  if (lines.empty() || lines[0].second != "t,mean,lower,upper")
    throw InputError(name + ":1: expected header 't,mean,lower,upper'");
  std::array<std::vector<double>, 4> cols;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto c = csv::split(lines[i].second);
    if (c.size() != 4) throw InputError(name + ":" + std::to_string(lines[i].first) + ": expected 4 fields");
    for (std::size_t k = 0; k < 4; ++k) {
      double v;
      if (!csv::parse_double(c[k], v))
        throw InputError(name + ":" + std::to_string(lines[i].first) + ":" + std::to_string(k + 1) + ": not a number");
      cols[k].push_back(v);
    }
  }
  return cols;
}

// ---------------------------------------------------------------------------
// Rate diagnostic: n,mean_sup_error,fitted_slope,reference_n

inline std::string format_rate(const RateDiagnostic& rate) {
  std::ostringstream out;
  out << "n,mean_sup_error,fitted_slope,reference_n\n";
  for (std::size_t i = 0; i < rate.sample_sizes.size(); ++i)
    out << rate.sample_sizes[i] << ',' << csv::format_double(rate.sup_errors[i]) << ','
        << csv::format_double(rate.fitted_slope) << ',' << rate.reference_size << '\n';
  return out.str();
}

inline RateDiagnostic read_rate(std::istream& in, const std::string& name) {
  const auto lines = csv::read_lines(in);
  if (lines.empty() || lines[0].second != "n,mean_sup_error,fitted_slope,reference_n")
    throw InputError(name + ":1: expected header 'n,mean_sup_error,fitted_slope,reference_n'");
  RateDiagnostic rate;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto c = csv::split(lines[i].second);
    double n, err, slope, ref;
    if (c.size() != 4 || !csv::parse_double(c[0], n) || !csv::parse_double(c[1], err) ||
        !csv::parse_double(c[2], slope) || !csv::parse_double(c[3], ref))
      throw InputError(name + ":" + std::to_string(lines[i].first) + ": malformed row");
    rate.sample_sizes.push_back(static_cast<std::size_t>(n));
    rate.sup_errors.push_back(err);
    rate.fitted_slope = slope;
    rate.reference_size = static_cast<std::size_t>(ref);
  }
  return rate;
}

}  // namespace kfpca

#endif  // KFPCA_CSV_HPP
