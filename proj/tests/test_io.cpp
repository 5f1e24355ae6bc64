#include <sstream>
#include <string>

#include "doctest.h"
#include "qsep/io.hpp"
#include "qsep/qsgen.hpp"

using namespace qsep;

TEST_CASE("dense text format is bit-exact") {
  PrimeField f(131071);
  DenseMatrix a(f, 2, 3);
  a(0, 0) = 1;
  a(0, 2) = 5;
  a(1, 1) = 131070;
  std::string text = dense_to_string(a);
  CHECK(text == "2 3 131071\n1 0 5\n0 131070 0\n");
  std::istringstream is(text);
  CHECK(read_dense(is) == a);
}

TEST_CASE("sparse text format is bit-exact and 1-based") {
  PrimeField f(97);
  SparseMatrix s(f, 3, 4);
  s.add_entry(1, 2, 7);
  s.add_entry(0, 0, 3);
  s.finalize();
  std::string text = sparse_to_string(s);
  CHECK(text == "3 4 97 2\n1 1 3\n2 3 7\n");
  std::istringstream is(text);
  SparseMatrix back = read_sparse(is);
  CHECK(densify(back) == densify(s));
}

TEST_CASE("malformed input raises ParseError") {
  SUBCASE("bad modulus") {
    std::istringstream is("2 2 4\n0 0\n0 0\n");
    CHECK_THROWS_AS(read_dense(is), ParseError);
  }
  SUBCASE("residue out of range") {
    std::istringstream is("1 1 97\n97\n");
    CHECK_THROWS_AS(read_dense(is), ParseError);
  }
  SUBCASE("truncated") {
    std::istringstream is("2 2 97\n1 2\n");
    CHECK_THROWS_AS(read_dense(is), ParseError);
  }
  SUBCASE("sparse duplicate entry") {
    std::istringstream is("2 2 97 2\n1 1 5\n1 1 6\n");
    CHECK_THROWS_AS(read_sparse(is), ParseError);
  }
  SUBCASE("unknown generator tag") {
    std::istringstream is("XYZ 1 1 97 1\n");
    CHECK_THROWS_AS(read_generator(is), ParseError);
  }
  SUBCASE("structurally inconsistent generator files") {
    PrimeField f(131071);
    SeededRng rng(77);
    DenseMatrix a = random_qs_dense(f, 32, 2, rng);
    auto corrupt_block_header = [](const std::string& text,
                                   const std::string& from) {
      size_t pos = text.find("\n" + from + "\n");
      REQUIRE(pos != std::string::npos);
      return text.substr(0, pos) + "\n9 9\n" +
             text.substr(pos + from.size() + 2);
    };
    {
      std::string text =
          generator_to_string(Generator(sss_from_dense(a, 2)));
      std::istringstream is(corrupt_block_header(text, "2 2"));
      CHECK_THROWS_AS(read_generator(is), ParseError);
    }
    {
      std::string text =
          generator_to_string(Generator(hss_from_dense(a, 4)));
      std::istringstream is(corrupt_block_header(text, "4 4"));
      CHECK_THROWS_AS(read_generator(is), ParseError);
    }
    {
      // mismatched factor width in the BRU header
      std::string text =
          generator_to_string(Generator(bruhat_from_dense(a)));
      REQUIRE(text.substr(0, 7) == "BRU 32 ");
      size_t sp = text.find(' ', 7);
      int u = std::stoi(text.substr(7, sp - 7));
      std::string broken =
          "BRU 32 " + std::to_string(u + 1) + text.substr(sp);
      std::istringstream is(broken);
      CHECK_THROWS_AS(read_generator(is), ParseError);
    }
  }
}

TEST_CASE("generator file roundtrips reproduce the expansion bit-for-bit") {
  PrimeField f(131071);
  SeededRng rng(31337);
  DenseMatrix a = random_qs_dense(f, 60, 3, rng);

  SUBCASE("sss") {
    SSSGenerator g = sss_from_dense(a, 3);
    std::string text = generator_to_string(Generator(g));
    std::istringstream is(text);
    Generator back = read_generator(is);
    auto* gb = std::get_if<SSSGenerator>(&back);
    REQUIRE(gb != nullptr);
    CHECK(sss_expand(*gb) == a);
    CHECK(gb->storage() == g.storage());
    // byte-identical re-serialization
    CHECK(generator_to_string(back) == text);
  }
  SUBCASE("hss") {
    HSSGenerator g = hss_from_dense(a, 6);
    std::string text = generator_to_string(Generator(g));
    std::istringstream is(text);
    Generator back = read_generator(is);
    auto* gb = std::get_if<HSSGenerator>(&back);
    REQUIRE(gb != nullptr);
    CHECK(hss_expand(*gb) == a);
    CHECK(gb->storage() == g.storage());
    CHECK(generator_to_string(back) == text);
  }
  SUBCASE("bruhat") {
    BruhatGenerator g = bruhat_from_dense(a);
    std::string text = generator_to_string(Generator(g));
    std::istringstream is(text);
    Generator back = read_generator(is);
    auto* gb = std::get_if<BruhatGenerator>(&back);
    REQUIRE(gb != nullptr);
    CHECK(bruhat_expand(*gb) == a);
    CHECK(gb->storage() == g.storage());
    CHECK(generator_to_string(back) == text);
  }
}
