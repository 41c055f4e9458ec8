#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>
#include <vector>

#include "mtp/csv.hpp"
#include "mtp/pvalues.hpp"
#include "mtp/random.hpp"

namespace {

mtp::errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const mtp::Error& e) {
    return e.code();
  }
  FAIL("expected an mtp::Error");
  return mtp::errc::io_error;
}

mtp::PValueSet make_set(std::vector<double> values) {
  mtp::PValueSet ps;
  ps.values = std::move(values);
  for (std::size_t i = 0; i < ps.values.size(); ++i)
    ps.labels.push_back(std::to_string(i + 1));
  return ps;
}

}  // namespace

TEST_CASE("validation rejects malformed batches") {
  REQUIRE(code_of([] { mtp::validate(mtp::PValueSet{}); }) == mtp::errc::empty_input);
  REQUIRE(code_of([] {
            mtp::validate(mtp::PValueSet{{0.1, 1.2}, {"a", "b"}, std::nullopt});
          }) == mtp::errc::value_out_of_range);
  REQUIRE(code_of([] {
            mtp::validate(mtp::PValueSet{{0.1, 0.2}, {"a", "a"}, std::nullopt});
          }) == mtp::errc::parse_error);
  REQUIRE(code_of([] {
            mtp::validate(
                mtp::PValueSet{{0.1, 0.2}, {"a", "b"}, std::vector<double>{0.9, 0.2}});
          }) == mtp::errc::weight_mismatch);
  REQUIRE(code_of([] {
            mtp::validate(
                mtp::PValueSet{{0.1, 0.2}, {"a", "b"}, std::vector<double>{1.2, -0.2}});
          }) == mtp::errc::weight_mismatch);
  // boundary values 0 and 1 are fine
  mtp::validate(mtp::PValueSet{{0.0, 1.0}, {"a", "b"}, std::nullopt});
}

TEST_CASE("order statistics keep stable tie order") {
  const auto ps = make_set({0.5, 0.01, 0.5});
  const auto sp = mtp::order_statistics(ps);
  REQUIRE(sp.sorted == std::vector<double>{0.01, 0.5, 0.5});
  REQUIRE(sp.rank_to_original == std::vector<std::size_t>{1, 0, 2});
}

TEST_CASE("sorted input gives the identity permutation") {
  const auto ps = make_set({0.1, 0.2, 0.3, 0.4});
  const auto sp = mtp::order_statistics(ps);
  REQUIRE(sp.rank_to_original == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("order statistics round-trip on random batches") {
  mtp::random::Stream g(99, 0);
  std::vector<double> values(1000);
  for (double& v : values) v = g.uniform();
  const auto ps = make_set(values);
  const auto sp = mtp::order_statistics(ps);

  // nondecreasing, checked against an independent sort
  std::vector<double> expect = values;
  std::sort(expect.begin(), expect.end());
  REQUIRE(sp.sorted == expect);

  // rank_to_original is a bijection and unsorting recovers the input exactly
  std::vector<bool> seen(values.size(), false);
  std::vector<double> recovered(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    REQUIRE(!seen[sp.rank_to_original[r]]);
    seen[sp.rank_to_original[r]] = true;
    recovered[sp.rank_to_original[r]] = sp.sorted[r];
  }
  REQUIRE(recovered == values);
}

TEST_CASE("sorting is permutation invariant") {
  mtp::random::Stream g(100, 0);
  std::vector<double> values(200);
  for (double& v : values) v = g.uniform();
  const auto sorted_a = mtp::order_statistics(make_set(values)).sorted;

  // shuffle via random transpositions
  for (std::size_t i = values.size(); i > 1; --i)
    std::swap(values[i - 1], values[static_cast<std::size_t>(g.uniform() * i)]);
  const auto sorted_b = mtp::order_statistics(make_set(values)).sorted;
  REQUIRE(sorted_a == sorted_b);
}

TEST_CASE("distinct value count") {
  REQUIRE(mtp::distinct_value_count(make_set({0.5, 0.5, 0.1})) == 2);
  REQUIRE(mtp::distinct_value_count(make_set({0.1, 0.2, 0.3})) == 3);
}

TEST_CASE("CSV ingestion") {
  SECTION("plain column") {
    std::istringstream in("p\n0.01\n0.5\n");
    const auto ps = mtp::load_pvalues(in);
    REQUIRE(ps.values == std::vector<double>{0.01, 0.5});
    REQUIRE(ps.labels == std::vector<std::string>{"1", "2"});
  }
  SECTION("label column and scientific notation") {
    std::istringstream in("label,p\nkendall_1,1e-3\nbm_2,0.25\n");
    const auto ps = mtp::load_pvalues(in);
    REQUIRE(ps.values == std::vector<double>{1e-3, 0.25});
    REQUIRE(ps.labels == std::vector<std::string>{"kendall_1", "bm_2"});
  }
  SECTION("column override and CRLF") {
    std::istringstream in("pval,extra\r\n0.7,x\r\n");
    const auto ps = mtp::load_pvalues(in, "pval");
    REQUIRE(ps.values == std::vector<double>{0.7});
  }
  SECTION("UTF-8 BOM and padded cells") {
    std::istringstream in("\xEF\xBB\xBFp\n 0.5 \n");
    REQUIRE(mtp::load_pvalues(in).values == std::vector<double>{0.5});
  }
  SECTION("value out of range names the row") {
    std::istringstream in("p\n1.2\n");
    try {
      mtp::load_pvalues(in);
      FAIL("expected value_out_of_range");
    } catch (const mtp::Error& e) {
      REQUIRE(e.code() == mtp::errc::value_out_of_range);
      REQUIRE(std::string(e.what()).find("row 1") != std::string::npos);
    }
  }
  SECTION("whole file rejected on a late bad value") {
    std::istringstream in("p\n0.1\n0.2\nnot_a_number\n");
    REQUIRE(code_of([&] { mtp::load_pvalues(in); }) == mtp::errc::parse_error);
  }
  SECTION("missing column") {
    std::istringstream in("q\n0.1\n");
    REQUIRE(code_of([&] { mtp::load_pvalues(in); }) == mtp::errc::missing_column);
  }
  SECTION("empty input") {
    std::istringstream empty("");
    REQUIRE(code_of([&] { mtp::load_pvalues(empty); }) == mtp::errc::empty_input);
    std::istringstream header_only("p\n");
    REQUIRE(code_of([&] { mtp::load_pvalues(header_only); }) == mtp::errc::empty_input);
  }
  SECTION("missing file") {
    REQUIRE(code_of([] { mtp::load_pvalues_file("/no/such/file.csv"); }) ==
            mtp::errc::io_error);
  }
}

TEST_CASE("grouped CSV keeps first-appearance order") {
  std::istringstream in("group,p\nmath,0.1\nread,0.5\nmath,0.2\n");
  const auto groups = mtp::load_grouped_pvalues(in);
  REQUIRE(groups.size() == 2);
  REQUIRE(groups[0].group == "math");
  REQUIRE(groups[0].pvalues == std::vector<double>{0.1, 0.2});
  REQUIRE(groups[1].group == "read");
}
