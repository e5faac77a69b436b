#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "gsv/rng.hpp"

using namespace gsv;

// Known-answer vectors from the Random123 distribution (kat_vectors, philox4x32_10).
TEST_CASE("philox4x32-10 known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32_10(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and separated") {
  Rng a(42, 7, StreamPurpose::Measurement, 3);
  Rng b(42, 7, StreamPurpose::Measurement, 3);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next64() == b.next64());

  const auto first = [](Rng r) { return r.next64(); };
  const auto base = first(Rng(42, 7, StreamPurpose::Measurement, 3));
  CHECK(first(Rng(43, 7, StreamPurpose::Measurement, 3)) != base);
  CHECK(first(Rng(42, 8, StreamPurpose::Measurement, 3)) != base);
  CHECK(first(Rng(42, 7, StreamPurpose::Verifier, 3)) != base);
  CHECK(first(Rng(42, 7, StreamPurpose::Measurement, 4)) != base);
}

TEST_CASE("trial index is limited to 24 bits") {
  CHECK_NOTHROW(Rng(1, (1u << 24) - 1, StreamPurpose::Verifier));
  CHECK_THROWS(Rng(1, 1u << 24, StreamPurpose::Verifier));
}

TEST_CASE("below is unbiased for small bounds") {
  Rng rng(9, 0, StreamPurpose::Auxiliary);
  for (std::uint64_t bound : {2u, 3u, 5u, 7u}) {
    std::vector<int> counts(bound, 0);
    const int draws = 70000;
    for (int i = 0; i < draws; ++i) {
      const auto v = rng.below(bound);
      REQUIRE(v < bound);
      ++counts[v];
    }
    double chi2 = 0.0;
    const double expect = static_cast<double>(draws) / bound;
    for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
    // 99.9% quantile of chi-square with <= 6 degrees of freedom is 22.46.
    CHECK(chi2 < 22.46);
  }
  CHECK_THROWS(rng.below(0));
  CHECK(rng.below(1) == 0);
}

TEST_CASE("uniform and normal moments") {
  Rng rng(11, 0, StreamPurpose::Auxiliary);
  const int draws = 200000;
  double sum = 0, sumSq = 0, nsum = 0, nsumSq = 0;
  for (int i = 0; i < draws; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sumSq += u * u;
    const double z = rng.normal();
    nsum += z;
    nsumSq += z * z;
  }
  CHECK(std::abs(sum / draws - 0.5) < 3 * std::sqrt(1.0 / 12 / draws));
  CHECK(std::abs(sumSq / draws - 1.0 / 3) < 0.005);
  CHECK(std::abs(nsum / draws) < 3 / std::sqrt(draws));
  CHECK(std::abs(nsumSq / draws - 1.0) < 3 * std::sqrt(2.0 / draws));
}
