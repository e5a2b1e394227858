#include "hmc/rng.hpp"

#include <vector>

namespace hmc {

namespace {

std::vector<std::uint32_t> seed_words(std::uint64_t master,
                                      std::initializer_list<std::uint64_t> indices) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (indices.size() + 1));
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(master);
  for (auto i : indices) push(i);
  return words;
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

Rng Rng::for_stream(std::uint64_t master, std::initializer_list<std::uint64_t> indices) {
  return Rng(derive_seed(master, indices));
}

double Rng::uniform() {
  // 53 random bits mapped to (0, 1); never returns 0 so log(u) is finite.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> indices) {
  const auto words = seed_words(master, indices);
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

}  // namespace hmc
