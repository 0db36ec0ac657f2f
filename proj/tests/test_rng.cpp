#include <doctest.h>

#include <cmath>
#include <set>

#include "movdet/rng.hpp"

using movdet::Philox4x64;

// Known answers generated with numpy.random.Philox (Philox4x64-10), which
// increments the counter before producing each block.
TEST_CASE("Philox4x64 matches numpy reference stream") {
  Philox4x64 zero(Philox4x64::Key{0, 0}, Philox4x64::Block{0, 0, 0, 0});
  const std::uint64_t expected[] = {0x02f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL,
                                    0x1c8667a55d902e79ULL, 0x907d7a052fd5b4dcULL,
                                    0x809bf322883987c3ULL, 0x471128b9e807f7ddULL,
                                    0xf250ba0dbec065b7ULL, 0xfc6ed66767a457bcULL};
  for (std::uint64_t e : expected) CHECK(zero() == e);

  Philox4x64 keyed(Philox4x64::Key{0x1234, 0x5678}, Philox4x64::Block{7, 0, 0, 0});
  CHECK(keyed() == 0x5dd644f935bb9b87ULL);
  CHECK(keyed() == 0xbdd4dae5fdb5fe11ULL);
  CHECK(keyed() == 0x9dd0b3f2cfa8fecfULL);
  CHECK(keyed() == 0xb6620b220c5e458aULL);
}

TEST_CASE("Philox4x64 counter carries into the next word") {
  Philox4x64 carry(Philox4x64::Key{0x0123456789abcdefULL, 0xfedcba9876543210ULL},
                   Philox4x64::Block{0xffffffffffffffffULL, 0, 0, 0});
  CHECK(carry() == 0x2163e33e787b1bb7ULL);
  CHECK(carry() == 0xa202a36bcc5d1269ULL);
  CHECK(carry() == 0xcd4142c638d0fabaULL);
  CHECK(carry() == 0x9beb0fb3451467bbULL);
}

TEST_CASE("seeded engines are reproducible and substreams differ") {
  Philox4x64 a(42), b(42), c(movdet::substream_seed(42, 1));
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    CHECK(x == b());
    seen.insert(x);
    CHECK(x != c());
  }
  CHECK(seen.size() == 1000);
  CHECK(movdet::substream_seed(42, 0) == 42);
}

TEST_CASE("uniform doubles lie in [0, 1) with the right mean") {
  Philox4x64 r(7);
  double sum = 0.0;
  constexpr int kN = 200000;
  for (int i = 0; i < kN; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // sd of the mean is sqrt(1/12/N) ~ 6.5e-4
  CHECK(std::abs(sum / kN - 0.5) < 4 * 6.5e-4);
}
