#include <doctest.h>

#include <bit>
#include <sstream>

#include "meadow/core/errors.hpp"
#include "meadow/emit/lp.hpp"
#include "meadow/gen/generators.hpp"
#include "meadow/inst/instantiate.hpp"
#include "support/canon_fuzz.hpp"

using namespace meadow;
using namespace meadow::emit;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

CanonicalModel dense_worked() {
  auto g = gen::worked_min_cost_flow();
  inst::InstantiateOptions opts;
  opts.columns = inst::ColumnMode::Dense;
  return inst::instantiate_efficient(g.model, g.data, opts);
}

}  // namespace

TEST_CASE("worked flow example as LP text") {
  auto m = dense_worked();
  std::string text = write_lp_string(m);
  auto ls = lines(text);
  REQUIRE(ls.size() > 4);
  CHECK(ls[1] == "Minimize");
  CHECK(ls[2] == " obj: x_1_2 + x_1_3 + x_2_4 + x_3_4");
  CHECK(ls[3] == "Subject To");
  CHECK(ls[4] == " c1_1: x_1_2 + x_1_3 = 1");
  CHECK(ls[5] == " c1_2: - x_1_2 + x_2_4 = 0");
  CHECK(ls[7] == " c1_4: - x_2_4 - x_3_4 = -1");
  CHECK(ls[8] == "Bounds");
  CHECK(ls[9] == " x_1_1 >= 0");
  CHECK(ls.back() == "End");
  auto back = read_lp_string(text);
  CHECK_MESSAGE(equivalent(m, back), first_difference(m, back));
}

TEST_CASE("empty model") {
  CanonicalModel m;
  std::string text = write_lp_string(m);
  CHECK(text.find("Subject To\nBounds\nEnd\n") != std::string::npos);
  auto back = read_lp_string(text);
  CHECK(back.num_rows() == 0);
  CHECK(back.num_cols() == 0);
}

TEST_CASE("single row parse") {
  auto m = read_lp_string("Minimize\n obj:\nSubject To\nc1: x_1_2 + x_1_3 = 1\nEnd\n");
  REQUIRE(m.num_rows() == 1);
  CHECK(m.sign(0) == Sign::Eq);
  CHECK(m.rhs(0) == 1.0);
  CHECK(m.origin(0).block == 1);
  CHECK(m.origin(0).global.empty());
  REQUIRE(m.num_cols() == 2);
  CHECK(column_name(m, 0) == "x_1_2");
  CHECK(m.row_values(0)[1] == 1.0);
}

TEST_CASE("malformed sign cites its line") {
  std::string text = "Minimize\n obj: x\nSubject To\n c1: x >= 0\n c2: x =< 4\nEnd\n";
  try {
    read_lp_string(text);
    FAIL("expected LpSyntaxError");
  } catch (const LpSyntaxError& e) {
    CHECK(e.line() == 5);
    CHECK(std::string(e.what()).find("=<") != std::string::npos);
  }
  CHECK_THROWS_AS(read_lp_string("Minimize\n obj: x\nSubject To\n c1: x + = 1\nEnd\n"), LpSyntaxError);
  CHECK_THROWS_AS(read_lp_string("Minimize\n obj: x\n"), LpSyntaxError);
  CHECK_THROWS_AS(read_lp_string(" c1: x = 1\nEnd\n"), LpSyntaxError);
}

TEST_CASE("common dialect variations") {
  std::string text =
      "\\ hand written\n"
      "Maximize\n"
      "  profit: 3 a + 2 b\n"
      "    - c\n"
      "Subject To\n"
      "  a + b <= 4\n"
      "  cap: a + 3b >= 2\n"
      "  c3_m1: 2 a - a + c = 0\n"
      "Bounds\n"
      "  a <= 10\n"
      "  -inf <= b <= 5\n"
      "  c free\n"
      "Binaries\n"
      "  d\n"
      "End\n";
  auto m = read_lp_string(text);
  REQUIRE(m.num_cols() == 4);
  CHECK(column_name(m, 0) == "a");
  CHECK(column_name(m, 1) == "b");
  CHECK(column_name(m, 2) == "c");
  CHECK(m.cost(0) == -3.0);
  CHECK(m.cost(2) == 1.0);
  CHECK(m.upper(0) == 10.0);
  CHECK(m.lower(1) == -kInf);
  CHECK(m.lower(2) == -kInf);
  CHECK(m.upper(2) == kInf);
  CHECK(m.num_rows() == 3);
  CHECK(m.origin(0).block == 0);
  CHECK(m.origin(1).block == 0);
  CHECK(m.origin(2).block == 3);
  CHECK(m.origin(2).global[0] == -1);
  // 2a - a collapses to a.
  CHECK(m.row_values(2)[0] == 1.0);
  CHECK(m.row_values(1)[1] == 3.0);
  CHECK(m.is_integer(3));
  CHECK(m.upper(3) == 1.0);
}

TEST_CASE("shortest decimal round trips bit-exactly") {
  gen::SplitMix64 rng(3);
  for (int k = 0; k < 200000; ++k) {
    double v = std::bit_cast<double>(rng.next());
    if (std::isnan(v)) continue;
    auto s = format_double(v);
    auto back = parse_double(s);
    REQUIRE(back);
    CHECK(std::bit_cast<std::uint64_t>(*back) == std::bit_cast<std::uint64_t>(v));
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-0.0) == "-0");
  CHECK(format_double(1e300) == "1e+300");
  CHECK(*parse_double("-inf") == -kInf);
}

TEST_CASE("fuzzed models round trip through LP text") {
  gen::SplitMix64 rng(41);
  for (int k = 0; k < 300; ++k) {
    auto m = canon_fuzz::random_model(rng);
    LpWriteOptions opts;
    opts.wrap = k % 2 ? 255 : 30;
    auto text = write_lp_string(m, opts);
    auto back = read_lp_string(text);
    REQUIRE_MESSAGE(equivalent(m, back), first_difference(m, back));
  }
}

TEST_CASE("long rows wrap") {
  CanonicalModel m;
  std::vector<Entry> e;
  for (std::size_t c = 0; c < 500; ++c) {
    Index i = static_cast<Index>(c);
    m.add_column("x", std::span<const Index>(&i, 1));
    e.push_back({c, 1.5});
  }
  m.add_row(e, Sign::Le, 7, 1, {});
  auto text = write_lp_string(m);
  for (const auto& l : lines(text)) CHECK(l.size() <= 255 + 16);
  CHECK(equivalent(read_lp_string(text), m));
}

TEST_CASE("triplets with sidecar round trip") {
  gen::SplitMix64 rng(43);
  for (int k = 0; k < 100; ++k) {
    auto m = canon_fuzz::random_model(rng);
    std::stringstream csv, side;
    write_triplets(m, csv, side);
    auto back = read_triplets(csv, side);
    REQUIRE_MESSAGE(equivalent(m, back), first_difference(m, back));
  }
  auto m = dense_worked();
  std::stringstream csv, side;
  write_triplets(m, csv, side);
  auto ls = lines(csv.str());
  CHECK(ls[0] == "row,col,val");
  CHECK(ls[1] == "0,4,1");
  CHECK(ls.size() == 9);
}

TEST_CASE("write failure propagates") {
  std::ostringstream os;
  os.setstate(std::ios::badbit);
  CHECK_THROWS_AS(write_lp(dense_worked(), os), std::ios_base::failure);
}

TEST_CASE("names parse back to keys") {
  std::string fam;
  std::vector<Index> idx;
  parse_column_name("x_1_m2", fam, idx);
  CHECK(fam == "x");
  CHECK(idx == std::vector<Index>{1, -2});
  parse_column_name("my_var", fam, idx);
  CHECK(fam == "my_var");
  CHECK(idx.empty());
  std::size_t block;
  std::vector<Index> g;
  CHECK(parse_row_name("c12_3_m4", block, g));
  CHECK(block == 12);
  CHECK(g == std::vector<Index>{3, -4});
  CHECK_FALSE(parse_row_name("cap", block, g));
}
