#include "ignr/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <numeric>
#include <sstream>

#include "ignr/error.hpp"
#include "ignr/format.hpp"

namespace ignr {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(line);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& text, int lineno) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ParseError("line " + std::to_string(lineno) + ": expected a number, got '" + text + "'");
  }
  return v;
}

int parse_index(const std::string& text, int lineno) {
  const double v = parse_number(text, lineno);
  if (v != std::floor(v) || v < 0) {
    throw ParseError("line " + std::to_string(lineno) + ": expected an index, got '" + text + "'");
  }
  return static_cast<int>(v);
}

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

}  // namespace

std::vector<ReportRow> report_rows(const EvalReport& rep, int trial, const std::vector<std::string>& graphons) {
  if (graphons.size() != rep.errors.size()) throw InputDomainError("one graphon label per report entry is required");
  std::vector<ReportRow> rows;
  for (std::size_t i = 0; i < rep.errors.size(); ++i) {
    ReportRow r;
    r.trial = trial;
    r.graphon = graphons[i];
    r.error = rep.errors[i];
    if (!rep.mse_sorted.empty()) r.mse_sorted = rep.mse_sorted[i];
    if (i < rep.seconds.size()) r.seconds = rep.seconds[i];
    rows.push_back(r);
  }
  return rows;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "trial,graphon_index,error,mse_sorted\n";
  for (const auto& r : rows) {
    out << r.trial << ',' << r.graphon << ',' << format_double(r.error) << ',';
    if (r.mse_sorted) out << format_double(*r.mse_sorted);
    out << '\n';
  }
  for (std::size_t i = 0; i < rows.size(); ++i) out << "# seconds," << i << ',' << format_double(rows[i].seconds) << '\n';
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
  std::vector<ReportRow> rows;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto f = split(line, ',');
      if (f.size() == 3 && f[0] == "# seconds") {
        const int i = parse_index(f[1], lineno);
        if (i < static_cast<int>(rows.size())) rows[i].seconds = parse_number(f[2], lineno);
      }
      continue;
    }
    if (!header) {
      if (line.rfind("trial,graphon_index,error", 0) != 0) {
        throw ParseError("line " + std::to_string(lineno) + ": not a report.csv header");
      }
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 4) throw ParseError("line " + std::to_string(lineno) + ": expected 4 fields");
    ReportRow r;
    r.trial = parse_index(f[0], lineno);
    r.graphon = f[1];
    r.error = parse_number(f[2], lineno);
    if (!f[3].empty()) r.mse_sorted = parse_number(f[3], lineno);
    rows.push_back(r);
  }
  if (!header) throw ParseError("report.csv is empty");
  return rows;
}

void save_report_csv(const std::string& path, const std::vector<ReportRow>& rows) {
  std::ostringstream ss;
  write_report_csv(ss, rows);
  write_text_file(path, ss.str());
}

std::vector<ReportRow> load_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return read_report_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string report_json(const std::vector<ReportRow>& rows, int resolution) {
  using nlohmann::json;
  json j;
  json entries = json::array();
  std::vector<double> errors, seconds;
  for (const auto& r : rows) {
    json e;
    e["trial"] = r.trial;
    e["graphon_index"] = r.graphon;
    e["error"] = r.error;
    e["sqrt_error"] = std::sqrt(std::max(r.error, 0.0));
    e["mse_sorted"] = r.mse_sorted ? json(*r.mse_sorted) : json(nullptr);
    e["seconds"] = r.seconds;
    entries.push_back(e);
    errors.push_back(r.error);
    seconds.push_back(r.seconds);
  }
  j["entries"] = entries;
  j["errors"] = errors;
  j["mean"] = mean_of(errors);
  j["std"] = stddev_of(errors);
  j["resolution"] = resolution;
  j["total_seconds"] = std::accumulate(seconds.begin(), seconds.end(), 0.0);
  json summary = json::array();
  for (const auto& s : summarize(rows)) {
    json e;
    e["graphon_index"] = s.graphon;
    e["count"] = s.count;
    e["mean"] = s.mean;
    e["std"] = s.stddev;
    if (s.mse_mean) {
      e["mse_sorted_mean"] = *s.mse_mean;
      e["mse_sorted_std"] = *s.mse_stddev;
    }
    summary.push_back(e);
  }
  j["summary"] = summary;
  return j.dump(1) + "\n";
}

std::vector<SummaryRow> summarize(const std::vector<ReportRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const ReportRow*>> groups;
  for (const auto& r : rows) {
    if (!groups.count(r.graphon)) order.push_back(r.graphon);
    groups[r.graphon].push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& name : order) {
    std::vector<double> err, mse;
    for (const ReportRow* r : groups[name]) {
      err.push_back(r->error);
      if (r->mse_sorted) mse.push_back(*r->mse_sorted);
    }
    SummaryRow s;
    s.graphon = name;
    s.count = static_cast<int>(err.size());
    s.mean = mean_of(err);
    s.stddev = stddev_of(err);
    if (!mse.empty()) {
      s.mse_mean = mean_of(mse);
      s.mse_stddev = stddev_of(mse);
    }
    out.push_back(s);
  }
  return out;
}

std::string format_table(const std::vector<SummaryRow>& summary) {
  std::size_t w = std::string("graphon").size();
  for (const auto& s : summary) w = std::max(w, s.graphon.size());
  std::ostringstream ss;
  ss << std::left << std::setw(static_cast<int>(w)) << "graphon" << "  " << std::setw(6) << "n"
     << "  " << std::setw(18) << "GW2 mean+-std"
     << "  mse_sorted mean+-std\n";
  for (const auto& s : summary) {
    ss << std::left << std::setw(static_cast<int>(w)) << s.graphon << "  " << std::setw(6) << s.count << "  "
       << std::setw(18) << (fixed(s.mean, 4) + "+-" + fixed(s.stddev, 4)) << "  ";
    if (s.mse_mean) ss << fixed(*s.mse_mean, 3) << "+-" << fixed(*s.mse_stddev, 3);
    ss << '\n';
  }
  return ss.str();
}

void write_embeddings_csv(std::ostream& out, const std::vector<EmbeddingRow>& rows) {
  const Eigen::Index d = rows.empty() ? 0 : rows.front().z.size();
  out << "index,alpha";
  for (Eigen::Index k = 0; k < d; ++k) out << ",z" << (k + 1);
  out << '\n';
  for (const auto& r : rows) {
    if (r.z.size() != d) throw InputDomainError("embeddings differ in dimension");
    out << r.index << ',';
    if (r.alpha) out << format_double(*r.alpha);
    for (Eigen::Index k = 0; k < d; ++k) out << ',' << format_double(r.z[k]);
    out << '\n';
  }
}

std::vector<EmbeddingRow> read_embeddings_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("index,alpha", 0) != 0) {
    throw ParseError("embeddings file must start with an index,alpha,... header");
  }
  const std::size_t fields = split(line, ',').size();
  if (fields < 3) throw ParseError("embeddings header has no latent columns");
  std::vector<EmbeddingRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != fields) throw ParseError("line " + std::to_string(lineno) + ": wrong number of fields");
    EmbeddingRow r;
    r.index = parse_index(f[0], lineno);
    if (!f[1].empty()) r.alpha = parse_number(f[1], lineno);
    r.z.resize(static_cast<Eigen::Index>(fields - 2));
    for (std::size_t k = 2; k < fields; ++k) r.z[static_cast<Eigen::Index>(k - 2)] = parse_number(f[k], lineno);
    rows.push_back(r);
  }
  return rows;
}

std::string scatter_svg(const std::vector<EmbeddingRow>& rows, const std::string& title) {
  if (rows.empty()) throw InputDomainError("nothing to plot");
  const double width = 520, height = 440, left = 60, right = 110, top = 40, bottom = 50;
  auto coord = [](const EmbeddingRow& r, int k) { return k < r.z.size() ? r.z[k] : 0.0; };
  double xmin = coord(rows[0], 0), xmax = xmin, ymin = coord(rows[0], 1), ymax = ymin;
  double amin = 0.0, amax = 0.0;
  bool any_alpha = false;
  for (const auto& r : rows) {
    xmin = std::min(xmin, coord(r, 0));
    xmax = std::max(xmax, coord(r, 0));
    ymin = std::min(ymin, coord(r, 1));
    ymax = std::max(ymax, coord(r, 1));
    if (r.alpha) {
      amin = any_alpha ? std::min(amin, *r.alpha) : *r.alpha;
      amax = any_alpha ? std::max(amax, *r.alpha) : *r.alpha;
      any_alpha = true;
    }
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };
  auto color = [&](double t) {
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(40 + 200 * t));
    const int g = static_cast<int>(std::lround(60 + 60 * (1.0 - std::abs(2 * t - 1))));
    const int b = static_cast<int>(std::lround(220 - 190 * t));
    std::ostringstream c;
    c << "rgb(" << r << ',' << g << ',' << b << ')';
    return c.str();
  };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << title << "</text>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 14
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">z1</text>\n";
  s << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"12\" transform=\"rotate(-90 18 " << top + ph / 2 << ")\">z2</text>\n";
  s << "<text x=\"" << left << "\" y=\"" << top + ph + 16 << "\" font-family=\"sans-serif\" font-size=\"10\">"
    << fixed(xmin, 3) << "</text>\n";
  s << "<text x=\"" << left + pw << "\" y=\"" << top + ph + 16
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fixed(xmax, 3) << "</text>\n";
  s << "<text x=\"" << left - 4 << "\" y=\"" << top + ph << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
    << "font-size=\"10\">" << fixed(ymin, 3) << "</text>\n";
  s << "<text x=\"" << left - 4 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
    << "font-size=\"10\">" << fixed(ymax, 3) << "</text>\n";
  for (const auto& r : rows) {
    const double t = (r.alpha && amax > amin) ? (*r.alpha - amin) / (amax - amin) : 0.5;
    s << "<circle cx=\"" << fixed(px(coord(r, 0)), 2) << "\" cy=\"" << fixed(py(coord(r, 1)), 2)
      << "\" r=\"3.5\" fill=\"" << (r.alpha ? color(t) : std::string("gray")) << "\" fill-opacity=\"0.85\"/>\n";
  }
  if (any_alpha) {
    const double lx = width - right + 30, ly = top + 10, lh = ph - 20;
    for (int k = 0; k < 20; ++k) {
      s << "<rect x=\"" << lx << "\" y=\"" << fixed(ly + lh * k / 20.0, 2) << "\" width=\"14\" height=\""
        << fixed(lh / 20.0 + 0.5, 2) << "\" fill=\"" << color(1.0 - (k + 0.5) / 20.0) << "\"/>\n";
    }
    s << "<text x=\"" << lx + 20 << "\" y=\"" << ly + 8 << "\" font-family=\"sans-serif\" font-size=\"10\">"
      << fixed(amax, 3) << "</text>\n";
    s << "<text x=\"" << lx + 20 << "\" y=\"" << ly + lh << "\" font-family=\"sans-serif\" font-size=\"10\">"
      << fixed(amin, 3) << "</text>\n";
    s << "<text x=\"" << lx << "\" y=\"" << ly - 4 << "\" font-family=\"sans-serif\" font-size=\"11\">alpha</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
  if (!out) throw ParseError("failed writing " + path);
}

}  // namespace ignr
