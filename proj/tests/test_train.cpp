#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ignr/error.hpp"
#include "ignr/gw.hpp"
#include "ignr/train.hpp"

using namespace ignr;

namespace {

TrainConfig small_config(Objective objective, int epochs) {
  TrainConfig c = TrainConfig::defaults(objective);
  c.epochs = epochs;
  c.latent_dim = 4;
  c.siren_widths = {12, 12};
  c.modsiren_widths = {12, 8};
  c.gin_width = 8;
  c.gin_layers = 2;
  c.decoder_widths = {8};
  c.resolution = 6;
  return c;
}

Dataset tiny_single(std::uint64_t seed) {
  return make_dataset_single(GraphonSpec::benchmark(0), {10, 14, 18}, seed);
}

}  // namespace

TEST_CASE("config text round trip") {
  TrainConfig c = small_config(Objective::kCignr, 7);
  c.lr = 3.25e-4;
  c.solver = GwSolver::kConditionalGradient;
  c.shuffle = false;
  c.node_feature = NodeFeature::kConstant;
  std::stringstream ss;
  write_config(ss, c);
  const TrainConfig back = read_config(ss);
  CHECK(back.to_pairs() == c.to_pairs());
}

TEST_CASE("config rejects unknown keys and malformed values") {
  std::stringstream a("objective = ignr\nbogus = 1\n");
  CHECK_THROWS_AS(read_config(a), ParseError);
  std::stringstream b("epochs = ten\n");
  CHECK_THROWS_AS(read_config(b), ParseError);
  std::stringstream c("epochs 10\n");
  CHECK_THROWS_AS(read_config(c), ParseError);
  std::stringstream d("# comment only\n\nobjective = discrete  # trailing\n");
  const TrainConfig parsed = read_config(d);
  CHECK(parsed.objective == Objective::kDiscrete);
  CHECK(parsed.epochs == 200);
}

TEST_CASE("checkpoint round trip preserves every forward output bit-exactly") {
  for (Objective obj : {Objective::kIgnr, Objective::kCignr, Objective::kDiscrete}) {
    Checkpoint ckpt;
    ckpt.model = Model::init(small_config(obj, 1));
    ckpt.loss_history = {0.1, 1.0 / 3.0, 2.5e-7};
    ckpt.rng_digest = "abc";
    const Checkpoint back = checkpoint_from_string(checkpoint_to_string(ckpt));
    CHECK(back.loss_history == ckpt.loss_history);
    CHECK(back.rng_digest == "abc");
    Model m1 = ckpt.model;
    Model m2 = back.model;
    const ParamList r1 = m1.refs();
    const ParamList r2 = m2.refs();
    REQUIRE(r1.size() == r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i) {
      CHECK(r1[i].name == r2[i].name);
      CHECK(flatten({r1[i]}) == flatten({r2[i]}));
    }
    const Graph g = sample_graph(GraphonSpec::benchmark(3), 9, SamplingMode::kStochastic, 5);
    const Vector z = m1.has_encoder() ? m1.encode(g) : Vector();
    CHECK((m1.decode(z, 11).array() == m2.decode(z, 11).array()).all());
  }
}

TEST_CASE("checkpoint corruption and version mismatch raise parse errors") {
  Checkpoint ckpt;
  ckpt.model = Model::init(small_config(Objective::kIgnr, 1));
  const std::string text = checkpoint_to_string(ckpt);
  CHECK_THROWS_AS(checkpoint_from_string(text.substr(0, text.size() / 2)), ParseError);
  CHECK_THROWS_AS(checkpoint_from_string("{}"), ParseError);
  std::string wrong_version = text;
  const auto pos = wrong_version.find("\"version\": 1");
  REQUIRE(pos != std::string::npos);
  wrong_version.replace(pos, 12, "\"version\": 2");
  CHECK_THROWS_AS(checkpoint_from_string(wrong_version), ParseError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/ckpt.json"), ParseError);
}

TEST_CASE("single-node graphs are fit exactly") {
  Dataset ds;
  ds.graphs.assign(2, Graph::from_adjacency(Matrix::Zero(1, 1)));
  TrainConfig c = small_config(Objective::kIgnr, 3000);
  c.lr = 1e-2;
  const Checkpoint ckpt = train_ignr(ds, c);
  CHECK(ckpt.loss_history.back() <= 1e-6);
}

TEST_CASE("zero learning rate keeps the loss constant") {
  for (Objective obj : {Objective::kIgnr, Objective::kCignr, Objective::kDiscrete}) {
    for (GwSolver solver : {GwSolver::kProximalGradient, GwSolver::kConditionalGradient}) {
      TrainConfig c = small_config(obj, 3);
      c.lr = 0.0;
      c.solver = solver;
      const Checkpoint ckpt = train(tiny_single(3), c);
      REQUIRE(ckpt.loss_history.size() == 3);
      if (solver == GwSolver::kConditionalGradient) {
        CHECK(ckpt.loss_history[1] == ckpt.loss_history[0]);
        CHECK(ckpt.loss_history[2] == ckpt.loss_history[0]);
      } else {
        // warm starts may only lower the per-graph cost
        CHECK(ckpt.loss_history[1] <= ckpt.loss_history[0] + 1e-12);
        CHECK(ckpt.loss_history[2] <= ckpt.loss_history[1] + 1e-12);
      }
    }
  }
}

TEST_CASE("logged loss equals offline recomputation") {
  for (Objective obj : {Objective::kIgnr, Objective::kCignr, Objective::kDiscrete}) {
    TrainConfig c = small_config(obj, 1);
    c.lr = 0.0;
    const Dataset ds = tiny_single(4);
    const Checkpoint ckpt = train(ds, c);
    double total = 0.0;
    for (const Graph& g : ds.graphs) total += reconstruction_cost(ckpt.model, g);
    CHECK(std::abs(total / ds.size() - ckpt.loss_history[0]) <= 1e-10);
  }
}

TEST_CASE("training is reproducible with and without shuffling") {
  for (bool shuffle : {false, true}) {
    TrainConfig c = small_config(Objective::kCignr, 3);
    c.shuffle = shuffle;
    const Checkpoint a = train(tiny_single(6), c);
    const Checkpoint b = train(tiny_single(6), c);
    CHECK(a.loss_history == b.loss_history);
    CHECK(a.rng_digest == b.rng_digest);
    CHECK(checkpoint_to_string(a) == checkpoint_to_string(b));
  }
}

TEST_CASE("training a single graph lowers its loss") {
  const Graph g = sample_graph(GraphonSpec::benchmark(3), 30, SamplingMode::kStochastic, 9);
  Dataset ds;
  ds.graphs = {g};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    TrainConfig c = small_config(Objective::kIgnr, 10);
    c.seed = seed;
    c.lr = 5e-3;
    const Checkpoint ckpt = train_ignr(ds, c);
    CHECK(ckpt.loss_history.back() < ckpt.loss_history.front());
  }
}

TEST_CASE("training input errors") {
  CHECK_THROWS_AS(train(Dataset{}, small_config(Objective::kIgnr, 1)), InputDomainError);
  CHECK_THROWS_AS(train_cignr(tiny_single(1), small_config(Objective::kIgnr, 1)), InputDomainError);
  TrainConfig bad = small_config(Objective::kIgnr, 0);
  CHECK_THROWS_AS(train(tiny_single(1), bad), InputDomainError);
}

TEST_CASE("graph generation") {
  const Model m = Model::init(small_config(Objective::kCignr, 1));
  const Graph g = sample_graph(GraphonSpec::benchmark(0), 12, SamplingMode::kStochastic, 2);
  const Vector z = m.encode(g);
  const GeneratedGraph a = generate_graph(m, z, 25, SamplingMode::kDeterministic, 7);
  const GeneratedGraph b = generate_graph(m, z, 25, SamplingMode::kDeterministic, 7);
  CHECK(a.graph.n() == 25);
  CHECK((a.graph.adj.array() == b.graph.adj.array()).all());
  CHECK((a.graph.adj - a.graph.adj.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.graph.adj.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.probabilities - m.decode(z, 25)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK_THROWS_AS(generate_graph(m, std::nullopt, 5, SamplingMode::kDeterministic, 1), InputDomainError);
  CHECK_THROWS_AS(generate_graph(m, z, 0, SamplingMode::kDeterministic, 1), InputDomainError);
}

TEST_CASE("loss history csv") {
  std::stringstream ss;
  write_loss_history(ss, {0.5, 0.25});
  CHECK(ss.str() == "epoch,mean_gw2\n0,0.5\n1,0.25\n");
}
