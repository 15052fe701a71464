#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ignr/eval.hpp"

namespace ignr {

// One evaluated estimate. graphon is the benchmark index ("0".."12") or the
// family member name ("two_block:0.31").
struct ReportRow {
  int trial = 0;
  std::string graphon;
  double error = 0.0;
  std::optional<double> mse_sorted;
  double seconds = 0.0;
};

/// Rows for an EvalReport; graphons[i] labels entry i.
std::vector<ReportRow> report_rows(const EvalReport& rep, int trial, const std::vector<std::string>& graphons);

// report.csv: header "trial,graphon_index,error,mse_sorted" then one line per
// row. Wall-clock times go on trailing "# seconds,<row>,<value>" metadata
// lines so the data lines are reproducible byte for byte.
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report_csv(std::istream& in);
void save_report_csv(const std::string& path, const std::vector<ReportRow>& rows);
std::vector<ReportRow> load_report_csv(const std::string& path);

/// Full report: rows, sqrt errors, mean/std, resolution.
std::string report_json(const std::vector<ReportRow>& rows, int resolution);

struct SummaryRow {
  std::string graphon;
  int count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::optional<double> mse_mean;
  std::optional<double> mse_stddev;
};

/// Grouped by graphon in first-appearance order.
std::vector<SummaryRow> summarize(const std::vector<ReportRow>& rows);
std::string format_table(const std::vector<SummaryRow>& summary);

struct EmbeddingRow {
  int index = 0;
  std::optional<double> alpha;
  Vector z;
};

// "index,alpha,z1..zd"; alpha is empty when unknown.
void write_embeddings_csv(std::ostream& out, const std::vector<EmbeddingRow>& rows);
std::vector<EmbeddingRow> read_embeddings_csv(std::istream& in);

/// Self-contained SVG scatter of (z1, z2) colored by alpha (z2 = 0 when d = 1).
std::string scatter_svg(const std::vector<EmbeddingRow>& rows, const std::string& title = "latent codes");

/// Writes a text file, throwing ParseError on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ignr
