#include <doctest.h>

#include <sstream>

#include "ignr/dataset_io.hpp"
#include "ignr/error.hpp"

using namespace ignr;

TEST_CASE("dataset round trip preserves graphs and labels") {
  const Dataset ds = make_dataset_family(Family::kS1, 5, 8);
  std::stringstream buf;
  write_dataset(buf, ds);
  const Dataset back = read_dataset(buf);
  REQUIRE(back.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back.graphs[i].adj == ds.graphs[i].adj);
    CHECK(*back.labels[i].alpha == *ds.labels[i].alpha);
    CHECK(back.labels[i].seed == ds.labels[i].seed);
  }
}

TEST_CASE("dataset record format") {
  Matrix adj = Matrix::Zero(3, 3);
  adj(0, 2) = adj(2, 0) = 1.0;
  Dataset ds;
  ds.graphs.push_back(Graph::from_adjacency(adj));
  ds.labels.push_back(GraphLabel{std::nullopt, 42});
  std::stringstream buf;
  write_dataset(buf, ds);
  CHECK(buf.str() == "{\"alpha\":null,\"edges\":[[0,2]],\"n\":3,\"seed\":42}\n");
}

TEST_CASE("malformed dataset lines raise ParseError") {
  std::stringstream bad_json("{\"n\": 3, \"edges\": [[0,1]]\n");
  CHECK_THROWS_AS(read_dataset(bad_json), ParseError);
  std::stringstream bad_edge("{\"n\": 2, \"edges\": [[0,5]], \"alpha\": null, \"seed\": 0}\n");
  CHECK_THROWS_AS(read_dataset(bad_edge), ParseError);
  std::stringstream missing("{\"edges\": []}\n");
  CHECK_THROWS_AS(read_dataset(missing), ParseError);
  CHECK_THROWS_AS(load_dataset("/nonexistent/file.jsonl"), ParseError);
}
