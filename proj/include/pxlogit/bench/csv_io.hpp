#pragma once

#include <string>
#include <variant>
#include <vector>

#include "pxlogit/missing.hpp"
#include "pxlogit/solvers.hpp"

namespace pxlogit::bench {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "%.17g", which round-trips every double.
std::string format_exact(double v);
std::string format_fixed4(double v);

// Header y,m,s,x1..xp. Any "NA" in an x column yields a MissingDataset.
std::variant<Dataset, MissingDataset> load_csv(const std::string& path);
Dataset load_dataset_csv(const std::string& path);

void write_csv(const std::string& path, const Dataset& d);
void write_csv(const std::string& path, const MissingDataset& md);

struct NumericTable {
  std::vector<std::string> names;
  Matrix values;
};
// Plain numeric table with a header row.
NumericTable load_numeric_table(const std::string& path);

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace);
std::vector<TraceRow> read_trace_csv(const std::string& path);

}  // namespace pxlogit::bench
