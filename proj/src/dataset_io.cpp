#include "ignr/dataset_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "ignr/error.hpp"

namespace ignr {

using nlohmann::json;

void write_dataset(std::ostream& out, const Dataset& ds) {
  for (std::size_t g = 0; g < ds.graphs.size(); ++g) {
    const Graph& graph = ds.graphs[g];
    json edges = json::array();
    for (int i = 0; i < graph.n(); ++i) {
      for (int j = i + 1; j < graph.n(); ++j) {
        if (graph.adj(i, j) >= 0.5) edges.push_back({i, j});
      }
    }
    json rec;
    rec["n"] = graph.n();
    rec["edges"] = std::move(edges);
    const GraphLabel* label = ds.labels.empty() ? nullptr : &ds.labels[g];
    if (label != nullptr && label->alpha) {
      rec["alpha"] = *label->alpha;
    } else {
      rec["alpha"] = nullptr;
    }
    rec["seed"] = label != nullptr ? label->seed : 0;
    out << rec.dump() << '\n';
  }
}

void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  write_dataset(out, ds);
}

Dataset read_dataset(std::istream& in) {
  Dataset ds;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "dataset line " + std::to_string(lineno) + ": ";
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where + e.what());
    }
    try {
      const int n = rec.at("n").get<int>();
      if (n < 1) throw ParseError(where + "n must be positive");
      Matrix adj = Matrix::Zero(n, n);
      for (const auto& e : rec.at("edges")) {
        const int i = e.at(0).get<int>();
        const int j = e.at(1).get<int>();
        if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
          throw ParseError(where + "edge index out of range");
        }
        adj(i, j) = 1.0;
        adj(j, i) = 1.0;
      }
      GraphLabel label;
      if (rec.contains("alpha") && !rec["alpha"].is_null()) label.alpha = rec["alpha"].get<double>();
      if (rec.contains("seed")) label.seed = rec["seed"].get<std::uint64_t>();
      ds.graphs.push_back(Graph::from_adjacency(std::move(adj)));
      ds.labels.push_back(label);
    } catch (const json::exception& e) {
      throw ParseError(where + e.what());
    }
  }
  return ds;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset '" + path + "'");
  Dataset ds = read_dataset(in);
  ds.provenance = path;
  return ds;
}

}  // namespace ignr
