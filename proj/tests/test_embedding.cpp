#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "gembed/embedding.hpp"
#include "gembed/rng.hpp"

using namespace gembed;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  out << text;
  return path.string();
}

}  // namespace

TEST_CASE("random embedding shape, range, determinism") {
  Rng a(3), b(3);
  const Embedding ea = random_embedding(100, 7, a);
  const Embedding eb = random_embedding(100, 7, b);
  REQUIRE(ea.num_nodes() == 100);
  REQUIRE(ea.dim() == 7);
  for (NodeId v = 0; v < 100; ++v)
    for (int j = 0; j < 7; ++j) {
      REQUIRE(ea.at(v, j) >= 0.0);
      REQUIRE(ea.at(v, j) < 1.0);
      REQUIRE(ea.at(v, j) == eb.at(v, j));
    }
}

TEST_CASE("file round-trip is bit exact") {
  Rng rng(11);
  Embedding e = random_embedding(40, 5, rng);
  e.at(0, 0) = 1.0 / 3.0;
  e.at(1, 1) = -2.5e-17;
  e.at(2, 2) = 1e300;
  const auto path = (fs::temp_directory_path() / "emb_roundtrip.tsv").string();
  write_embedding(e, path);
  const Embedding r = read_embedding(path);
  REQUIRE(r.num_nodes() == e.num_nodes());
  REQUIRE(r.dim() == e.dim());
  for (NodeId v = 0; v < e.num_nodes(); ++v)
    for (int j = 0; j < e.dim(); ++j) REQUIRE(r.at(v, j) == e.at(v, j));
  std::remove(path.c_str());
}

TEST_CASE("reader accepts arbitrary row order") {
  const auto path = write_temp("emb_order.tsv", "3 2\n2 5 6\n0 1 2\n1 3 4\n");
  const Embedding e = read_embedding(path);
  REQUIRE(e.at(0, 0) == 1.0);
  REQUIRE(e.at(1, 1) == 4.0);
  REQUIRE(e.at(2, 0) == 5.0);
  std::remove(path.c_str());
}

TEST_CASE("reader infers shape from headerless files") {
  const auto path = write_temp("emb_nohdr.tsv", "0 1 2 3\n1 4 5 6\n2 7 8 9\n");
  const Embedding e = read_embedding(path);
  REQUIRE(e.num_nodes() == 3);
  REQUIRE(e.dim() == 3);
  REQUIRE(e.at(2, 2) == 9.0);
  std::remove(path.c_str());
}

TEST_CASE("two-column headerless file is not mistaken for a header") {
  // "0 1" would parse as a header claiming 0 rows; the remaining rows give
  // it away, so it must be treated as id 0 with one value.
  const auto path = write_temp("emb_twocol.tsv", "0 1\n1 2\n2 3\n");
  const Embedding e = read_embedding(path);
  REQUIRE(e.num_nodes() == 3);
  REQUIRE(e.dim() == 1);
  REQUIRE(e.at(0, 0) == 1.0);
  REQUIRE(e.at(2, 0) == 3.0);
  std::remove(path.c_str());
}

TEST_CASE("reader errors name the offending row") {
  const auto missing = write_temp("emb_missing.tsv", "3 1\n0 1\n2 3\n");
  REQUIRE_THROWS_WITH(read_embedding(missing),
                      Catch::Matchers::ContainsSubstring("missing"));
  std::remove(missing.c_str());

  const auto dup = write_temp("emb_dup.tsv", "2 1\n0 1\n0 2\n");
  try {
    read_embedding(dup);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    REQUIRE(std::string(e.what()).find(":3") != std::string::npos);
  }
  std::remove(dup.c_str());

  const auto ragged = write_temp("emb_ragged.tsv", "2 2\n0 1 2\n1 3\n");
  REQUIRE_THROWS_AS(read_embedding(ragged), ValidationError);
  std::remove(ragged.c_str());
}
