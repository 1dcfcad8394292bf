#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <map>

#include "helpers.hpp"
#include "hetwalk/skipgram.hpp"
#include "hetwalk/synthetic.hpp"

using namespace hetwalk;
using testutil::graph_from;
using testutil::schema_from;

namespace {

struct PaperKeywordFixture {
  GraphSchema schema = schema_from("V paper\nV kw\nR has paper kw\nR cite paper paper\nR kwlink kw kw\n");
  HetGraph graph = graph_from(schema,
                              "p1\thas\tk2\t1\nk2\tkwlink\tk3\t1\np6\thas\tk3\t1\np1\tcite\tp6\t1\n");
};

// Two complete bipartite clusters joined by one bridge edge.
HetGraph barbell_graph(const GraphSchema& schema) {
  std::string edges;
  for (int cluster = 0; cluster < 2; ++cluster) {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        edges += "l" + std::to_string(cluster * 5 + i) + "\thas\tr" + std::to_string(cluster * 5 + j) + "\t1\n";
      }
    }
  }
  edges += "l4\thas\tr5\t1\n";
  return graph_from(schema, edges);
}

}  // namespace

TEST_CASE("context pairs follow the sliding window") {
  PaperKeywordFixture f;
  const auto p1 = f.graph.require("p1");
  const auto k2 = f.graph.require("k2");
  const auto k3 = f.graph.require("k3");
  const auto p6 = f.graph.require("p6");
  const std::vector<VertexId> walk{p1, k2, k3, p6};

  SECTION("window 1 reproduces neighborhood sets") {
    const auto pairs = context_pairs(walk, 1, f.graph);
    std::map<VertexId, std::vector<VertexId>> contexts;
    for (const auto& p : pairs) contexts[p.center].push_back(p.context);
    CHECK(contexts[p1] == std::vector<VertexId>{k2});
    CHECK(contexts[k2] == std::vector<VertexId>{p1, k3});
    CHECK(contexts[k3] == std::vector<VertexId>{k2, p6});
    CHECK(contexts[p6] == std::vector<VertexId>{k3});
    for (const auto& p : pairs) CHECK(p.context_type == f.graph.type(p.context));
  }
  SECTION("length-1 walks have no pairs") {
    CHECK(context_pairs(std::vector<VertexId>{p1}, 3, f.graph).empty());
  }
  SECTION("a window covering the walk yields all ordered pairs") {
    CHECK(context_pairs(walk, 10, f.graph).size() == 12);
  }
  SECTION("window must be positive") {
    CHECK_THROWS_AS(context_pairs(walk, 0, f.graph), std::invalid_argument);
  }
}

TEST_CASE("negative sampling respects type pools and never returns the positive") {
  const std::vector<TypeId> types{0, 0, 0, 1, 1};
  const std::vector<double> counts{1.0, 4.0, 16.0, 3.0, 0.0};
  const auto sampler = NegativeSampler::from_counts(types, 2, counts, 0.75);
  Rng rng(21);

  SECTION("heterogeneous draws stay within the context type") {
    for (int i = 0; i < 2000; ++i) {
      const auto v = sampler.sample(0, 2, EmbedMode::Heterogeneous, rng);
      CHECK(types[v] == 0);
      CHECK(v != 2);
    }
  }

  SECTION("draw frequencies match the smoothed distribution within 0.01") {
    // vertex 4 has count zero, so the global pool is {0,1,2,3}; excluding the
    // positive "3" leaves type-0 vertices with renormalized smoothed mass.
    const int n = 100000;
    std::map<VertexId, std::size_t> hist;
    for (int i = 0; i < n; ++i) hist[sampler.sample(0, 3, EmbedMode::Ordinary, rng)] += 1;
    const double w0 = std::pow(1.0, 0.75), w1 = std::pow(4.0, 0.75), w2 = std::pow(16.0, 0.75);
    const double total = w0 + w1 + w2;
    CHECK(std::abs(static_cast<double>(hist[0]) / n - w0 / total) < 0.01);
    CHECK(std::abs(static_cast<double>(hist[1]) / n - w1 / total) < 0.01);
    CHECK(std::abs(static_cast<double>(hist[2]) / n - w2 / total) < 0.01);
    CHECK(hist[3] == 0);
    CHECK(hist[4] == 0);
  }
}

TEST_CASE("single-vertex types fall back to the global pool with a warning") {
  std::vector<std::string> warnings;
  set_warning_handler([&](const std::string& m) { warnings.push_back(m); });
  const auto sampler = NegativeSampler::from_counts({0, 0, 1}, 2, {1.0, 1.0, 1.0}, 0.75);
  set_warning_handler({});
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("global pool") != std::string::npos);
  CHECK(sampler.type_uses_global(1));
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    CHECK(sampler.sample(1, 2, EmbedMode::Heterogeneous, rng) != 2);
  }
}

TEST_CASE("negative-sampling loss gradient matches central finite differences") {
  Rng rng(12345);
  for (int instance = 0; instance < 100; ++instance) {
    const int dim = 3 + static_cast<int>(rng.next_below(13));
    const int n_neg = 1 + static_cast<int>(rng.next_below(4));
    std::vector<double> center(dim), positive(dim);
    std::vector<std::vector<double>> negatives(n_neg, std::vector<double>(dim));
    auto fill = [&](std::vector<double>& v) {
      for (auto& x : v) x = (rng.next_double() - 0.5) * 2.0;
    };
    fill(center);
    fill(positive);
    for (auto& neg : negatives) fill(neg);

    std::vector<const double*> neg_ptrs;
    for (const auto& neg : negatives) neg_ptrs.push_back(neg.data());
    std::vector<double> g_center(dim), g_positive(dim);
    std::vector<std::vector<double>> g_negs(n_neg, std::vector<double>(dim));
    std::vector<double*> g_neg_ptrs;
    for (auto& gv : g_negs) g_neg_ptrs.push_back(gv.data());

    sgns::loss_grad(center.data(), positive.data(), neg_ptrs.data(), n_neg, dim, g_center.data(),
                    g_positive.data(), g_neg_ptrs.data());

    const double h = 1e-6;
    auto check_grad = [&](std::vector<double>& vec, const std::vector<double>& grad) {
      for (int d = 0; d < dim; ++d) {
        const double keep = vec[d];
        vec[d] = keep + h;
        const double up = sgns::loss(center.data(), positive.data(), neg_ptrs.data(), n_neg, dim);
        vec[d] = keep - h;
        const double down = sgns::loss(center.data(), positive.data(), neg_ptrs.data(), n_neg, dim);
        vec[d] = keep;
        const double fd = (up - down) / (2.0 * h);
        const double scale = std::max(1.0, std::abs(grad[d]));
        REQUIRE(std::abs(fd - grad[d]) <= 1e-5 * scale);
      }
    };
    check_grad(center, g_center);
    check_grad(positive, g_positive);
    for (int i = 0; i < n_neg; ++i) check_grad(negatives[i], g_negs[i]);
  }
}

TEST_CASE("exact type-partitioned softmax sums to one and handles zero tables") {
  PaperKeywordFixture f;
  EmbeddingTable table;
  table.dim = 8;
  table.keys = f.graph.keys();
  table.input.assign(table.keys.size() * 8, 0.0f);
  table.context.assign(table.keys.size() * 8, 0.0f);
  table.rebuild_index();

  const auto kw_type = f.schema.vertex_type_id("kw").value();
  const auto kws = f.graph.vertices_of_type(kw_type);

  SECTION("all-zero vectors give the uniform distribution") {
    const auto probs = softmax_check(table, f.graph, f.graph.require("p1"), kw_type);
    REQUIRE(probs.size() == kws.size());
    for (double p : probs) CHECK(p == Catch::Approx(1.0 / kws.size()));
  }

  SECTION("random tables stay normalized for every (vertex, type)") {
    Rng rng(5);
    for (auto& v : table.input) v = static_cast<float>(rng.next_double() - 0.5);
    for (auto& v : table.context) v = static_cast<float>(rng.next_double() - 0.5);
    for (VertexId v = 0; v < f.graph.num_vertices(); ++v) {
      for (TypeId t = 0; t < f.schema.num_vertex_types(); ++t) {
        const auto probs = softmax_check(table, f.graph, v, t);
        double total = 0.0;
        for (double p : probs) total += p;
        CHECK(std::abs(total - 1.0) <= 1e-9);
      }
    }
  }

  SECTION("empty type is an error") {
    CHECK_THROWS_AS(softmax_check(table, f.graph, 0, static_cast<TypeId>(6)), InputError);
  }
}

TEST_CASE("log softmax gradient matches finite differences on a random table") {
  // entries on a 2^-10 grid and h = 2^-13 keep float perturbations exact
  const auto schema = schema_from("V a\nV b\nR e a b\n");
  std::string edges;
  for (int i = 0; i < 5; ++i) edges += "a" + std::to_string(i) + "\te\tb" + std::to_string(i) + "\t1\n";
  const auto g = graph_from(schema, edges);

  EmbeddingTable table;
  table.dim = 6;
  table.keys = g.keys();
  Rng rng(77);
  auto grid = [&] {
    return static_cast<float>(
        (static_cast<double>(rng.next_below(513)) - 256.0) * 0x1.0p-10);
  };
  table.input.resize(table.keys.size() * 6);
  table.context.resize(table.keys.size() * 6);
  for (auto& v : table.input) v = grid();
  for (auto& v : table.context) v = grid();
  table.rebuild_index();

  const auto b_type = schema.vertex_type_id("b").value();
  const auto members = g.vertices_of_type(b_type);
  const auto v = g.require("a2");
  const auto vi = table.find("a2").value();
  const std::size_t target = 1;  // log P(members[1] | v)

  const auto probs = softmax_check(table, g, v, b_type);
  // analytic: d log P(u|v) / d input(v) = ctx(u) - sum_w P(w) ctx(w)
  std::vector<double> analytic(6);
  for (int d = 0; d < 6; ++d) {
    double expectation = 0.0;
    for (std::size_t w = 0; w < members.size(); ++w) {
      expectation += probs[w] * table.context_row(table.find(g.key(members[w])).value())[d];
    }
    analytic[d] = table.context_row(table.find(g.key(members[target])).value())[d] - expectation;
  }

  const float h = 0x1.0p-13f;
  for (int d = 0; d < 6; ++d) {
    const float keep = table.input[vi * 6 + d];
    table.input[vi * 6 + d] = keep + h;
    const double up = std::log(softmax_check(table, g, v, b_type)[target]);
    table.input[vi * 6 + d] = keep - h;
    const double down = std::log(softmax_check(table, g, v, b_type)[target]);
    table.input[vi * 6 + d] = keep;
    const double fd = (up - down) / (2.0 * static_cast<double>(h));
    CHECK(std::abs(fd - analytic[d]) <= 1e-5);
  }
}

TEST_CASE("training works end to end on a barbell graph") {
  const auto schema = schema_from("V left\nV right\nR has left right\nR pad left left\n");
  const auto g = barbell_graph(schema);
  const auto beta = init_rtud(schema);

  WalkConfig wc;
  wc.walks_per_vertex = 20;
  wc.walk_length = 10;
  wc.seed = 3;
  const auto corpus = generate_corpus(g, &beta, wc);

  EmbedConfig ec;
  ec.dim = 16;
  ec.window = 4;
  ec.epochs = 8;
  ec.negatives = 4;
  ec.seed = 5;
  EmbedStats stats;
  const auto table = train_embeddings(corpus, g, ec, &stats);

  SECTION("loss is finite and negatives are type-disciplined") {
    CHECK(stats.mistyped_negatives == 0);
    CHECK(stats.negative_draws == stats.pairs * 4);
    for (double l : stats.epoch_loss) CHECK(std::isfinite(l));
  }

  SECTION("intra-cluster cosine beats inter-cluster cosine") {
    auto cos = [&](const std::string& a, const std::string& b) {
      const auto ra = table.input_row(table.find(a).value());
      const auto rb = table.input_row(table.find(b).value());
      double dot = 0, na = 0, nb = 0;
      for (int d = 0; d < table.dim; ++d) {
        dot += ra[d] * rb[d];
        na += ra[d] * ra[d];
        nb += rb[d] * rb[d];
      }
      return dot / std::sqrt(na * nb);
    };
    double intra = 0.0, inter = 0.0;
    int n_intra = 0, n_inter = 0;
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        if (i != j) {
          intra += cos("l" + std::to_string(i), "l" + std::to_string(j));
          intra += cos("l" + std::to_string(5 + i), "l" + std::to_string(5 + j));
          n_intra += 2;
        }
        inter += cos("l" + std::to_string(i), "l" + std::to_string(5 + j));
        ++n_inter;
      }
    }
    CHECK(intra / n_intra > inter / n_inter);
  }

  SECTION("reproducible mode is bit-deterministic") {
    const auto again = train_embeddings(corpus, g, ec);
    CHECK(again.input == table.input);
    CHECK(again.context == table.context);
  }

  SECTION("embedding file round-trips") {
    testutil::TempDir dir;
    save_embeddings(table, dir.str("emb.txt"));
    const auto loaded = load_embeddings(dir.str("emb.txt"));
    REQUIRE(loaded.size() == table.size());
    REQUIRE(loaded.dim == table.dim);
    for (std::size_t i = 0; i < table.input.size(); ++i) {
      CHECK(std::abs(loaded.input[i] - table.input[i]) <= 1e-6f * std::max(1.0f, std::abs(table.input[i])));
    }
  }
}

TEST_CASE("mean loss decreases over the first three epochs for five seeds") {
  SyntheticParams params;
  params.papers_per_side = 60;
  params.communities = 3;
  const auto syn = generate_synthetic(params);
  testutil::TempDir dir;
  save_synthetic(syn, dir.str("schema.txt"), dir.str("edges.tsv"), dir.str("pairs.tsv"));
  const auto schema = load_schema(dir.str("schema.txt"));
  const auto g = load_graph(schema, dir.str("edges.tsv"));
  const auto beta = init_rtud(schema);

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    WalkConfig wc;
    wc.walks_per_vertex = 5;
    wc.walk_length = 12;
    wc.seed = seed;
    const auto corpus = generate_corpus(g, &beta, wc);
    EmbedConfig ec;
    ec.dim = 24;
    ec.window = 4;
    ec.epochs = 3;
    ec.seed = seed;
    EmbedStats stats;
    train_embeddings(corpus, g, ec, &stats);
    REQUIRE(stats.epoch_loss.size() == 3);
    INFO("seed " << seed << " losses " << stats.epoch_loss[0] << " " << stats.epoch_loss[1] << " "
                 << stats.epoch_loss[2]);
    CHECK(stats.epoch_loss[0] > stats.epoch_loss[1]);
    CHECK(stats.epoch_loss[1] > stats.epoch_loss[2]);
  }
}

TEST_CASE("training validates its inputs") {
  PaperKeywordFixture f;
  EmbedConfig ec;
  WalkCorpus empty;
  CHECK_THROWS_AS(train_embeddings(empty, f.graph, ec), InputError);
  WalkCorpus bogus;
  bogus.walks = {{999}};
  CHECK_THROWS_AS(train_embeddings(bogus, f.graph, ec), InputError);
}
