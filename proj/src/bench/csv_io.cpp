#include "pxlogit/bench/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pxlogit::bench {

namespace {

std::string where(const std::string& path, size_t line, size_t col) {
  std::ostringstream os;
  os << path << ": line " << line;
  if (col > 0) os << ", column " << col;
  return os.str();
}

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  const auto r = std::from_chars(b, e, v);
  return r.ec == std::errc() && r.ptr == e;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CsvError("cannot write '" + path + "'");
  return out;
}

// Reads all non-empty lines after the header; returns header fields.
std::vector<std::string> read_rows(const std::string& path, std::vector<std::vector<std::string>>& rows,
                                   std::vector<size_t>& line_no) {
  std::ifstream in = open_in(path);
  std::string line;
  size_t ln = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++ln;
    if (trim(line).empty()) continue;
    if (header.empty()) {
      if (ln == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      header = split(line);
      continue;
    }
    rows.push_back(split(line));
    line_no.push_back(ln);
  }
  if (header.empty()) throw CsvError(path + ": missing header row");
  return header;
}

}  // namespace

std::string format_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::variant<Dataset, MissingDataset> load_csv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::vector<size_t> lines;
  const auto header = read_rows(path, rows, lines);
  if (header.size() < 4 || header[0] != "y" || header[1] != "m" || header[2] != "s")
    throw CsvError(path + ": header must be y,m,s,x1,...,xp");
  const Index n = static_cast<Index>(rows.size()), p = static_cast<Index>(header.size()) - 3;
  if (n == 0) throw CsvError(path + ": no data rows");
  Matrix X(n, p);
  Vector y(n), m(n), s(n);
  bool any_missing = false;
  for (Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<size_t>(i)];
    const size_t ln = lines[static_cast<size_t>(i)];
    if (r.size() != header.size()) throw CsvError(where(path, ln, 0) + ": expected " + std::to_string(header.size()) + " fields");
    for (size_t c = 0; c < r.size(); ++c) {
      double v;
      if (c >= 3 && r[c] == "NA") {
        v = std::nan("");
        any_missing = true;
      } else if (!parse_double(r[c], v) || !std::isfinite(v)) {
        throw CsvError(where(path, ln, c + 1) + ": non-numeric value '" + r[c] + "'");
      }
      if (c == 0) y[i] = v;
      else if (c == 1) m[i] = v;
      else if (c == 2) s[i] = v;
      else X(i, static_cast<Index>(c) - 3) = v;
    }
    if (m[i] < 1 || std::floor(m[i]) != m[i]) throw CsvError(where(path, ln, 2) + ": m must be a positive integer");
    if (y[i] < 0 || y[i] > m[i] || std::floor(y[i]) != y[i])
      throw CsvError(where(path, ln, 1) + ": y must be an integer in [0, m]");
    if (s[i] < 0) throw CsvError(where(path, ln, 3) + ": s must be nonnegative");
  }
  try {
    if (any_missing) return MissingDataset(std::move(X), std::move(y), std::move(m), std::move(s));
    return Dataset(std::move(X), std::move(y), std::move(m), std::move(s));
  } catch (const InvalidInput& e) {
    throw CsvError(path + ": " + e.what());
  }
}

Dataset load_dataset_csv(const std::string& path) {
  auto v = load_csv(path);
  if (auto* d = std::get_if<Dataset>(&v)) return std::move(*d);
  throw CsvError(path + ": file has missing covariates; use the missing-covariate solver");
}

namespace {

void write_data(const std::string& path, const Matrix& X, const Vector& y, const Vector& m, const Vector& s) {
  std::ofstream out = open_out(path);
  out << "y,m,s";
  for (Index j = 0; j < X.cols(); ++j) out << ",x" << j + 1;
  out << '\n';
  for (Index i = 0; i < X.rows(); ++i) {
    out << format_exact(y[i]) << ',' << format_exact(m[i]) << ',' << format_exact(s[i]);
    for (Index j = 0; j < X.cols(); ++j) out << ',' << (std::isnan(X(i, j)) ? std::string("NA") : format_exact(X(i, j)));
    out << '\n';
  }
  if (!out) throw CsvError("write failed for '" + path + "'");
}

}  // namespace

void write_csv(const std::string& path, const Dataset& d) { write_data(path, d.X(), d.y(), d.m(), d.s()); }

void write_csv(const std::string& path, const MissingDataset& md) {
  write_data(path, md.Xobs(), md.y(), md.m(), md.s());
}

NumericTable load_numeric_table(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::vector<size_t> lines;
  NumericTable t;
  t.names = read_rows(path, rows, lines);
  t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.names.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != t.names.size()) throw CsvError(where(path, lines[i], 0) + ": wrong number of fields");
    for (size_t c = 0; c < rows[i].size(); ++c) {
      double v;
      if (!parse_double(rows[i][c], v)) throw CsvError(where(path, lines[i], c + 1) + ": non-numeric value '" + rows[i][c] + "'");
      t.values(static_cast<Index>(i), static_cast<Index>(c)) = v;
    }
  }
  return t;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
  std::ofstream out = open_out(path);
  out << "iter,loglik,penalized_loglik,step_norm,elapsed_sec\n";
  for (const auto& r : trace) {
    out << r.iter << ',' << format_exact(r.loglik) << ',' << format_exact(r.penalized_loglik) << ','
        << format_exact(r.step_norm) << ',' << format_exact(r.elapsed_sec) << '\n';
  }
  if (!out) throw CsvError("write failed for '" + path + "'");
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::vector<size_t> lines;
  const auto header = read_rows(path, rows, lines);
  const std::vector<std::string> want{"iter", "loglik", "penalized_loglik", "step_norm", "elapsed_sec"};
  if (header != want) throw CsvError(path + ": not a trace file");
  std::vector<TraceRow> out;
  out.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != want.size()) throw CsvError(where(path, lines[i], 0) + ": wrong number of fields");
    double f[5];
    for (size_t c = 0; c < 5; ++c) {
      const std::string& cell = rows[i][c];
      if (cell == "nan" || cell == "-nan") f[c] = std::nan("");
      else if (cell == "inf") f[c] = INFINITY;
      else if (cell == "-inf") f[c] = -INFINITY;
      else if (!parse_double(cell, f[c])) throw CsvError(where(path, lines[i], c + 1) + ": non-numeric value");
    }
    out.push_back({static_cast<long>(f[0]), f[2], f[1], f[3], f[4]});
  }
  return out;
}

}  // namespace pxlogit::bench
