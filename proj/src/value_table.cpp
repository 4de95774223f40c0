#include "tdcp/value_table.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace tdcp {

namespace {

constexpr std::array<char, 8> kMagic{'T', 'D', 'C', 'P', 'V', 'T', 'A', 'B'};
constexpr std::uint32_t kVersion = 1;

template <class U>
void put(std::ostream& out, U x) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.put(static_cast<char>((x >> (8 * i)) & 0xff));
}

template <class U>
U get(std::istream& in) {
  U x = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    const int c = in.get();
    if (c == EOF) throw Error("value table: truncated file");
    x |= static_cast<U>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return x;
}

}  // namespace

ValueTable::ValueTable(std::size_t size, SolverFingerprint fingerprint, std::uint64_t zobrist_seed)
    : values_(size, 0.0), fingerprint_(std::move(fingerprint)), zobrist_seed_(zobrist_seed) {
  if (size == 0) throw Error("value table size must be positive");
}

void ValueTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write value table " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, values_.size());
  put<std::uint64_t>(out, zobrist_seed_);
  put<std::uint64_t>(out, fingerprint_.digest());
  for (double v : values_) put<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw Error("error writing value table " + path.string());
}

ValueTable ValueTable::load(const std::filesystem::path& path, const SolverFingerprint& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open value table " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error("value table: bad magic in " + path.string());
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw Error("value table: unsupported version " + std::to_string(version));
  const auto size = get<std::uint64_t>(in);
  const auto seed = get<std::uint64_t>(in);
  const auto digest = get<std::uint64_t>(in);
  if (digest != expected.digest()) {
    throw FingerprintMismatch("value table was trained under a different solver configuration (expected " +
                              expected.canonical() + ")");
  }
  ValueTable t(static_cast<std::size_t>(size), expected, seed);
  for (auto& v : t.values_) v = std::bit_cast<double>(get<std::uint64_t>(in));
  if (in.peek() != EOF) throw Error("value table: trailing bytes");
  return t;
}

}  // namespace tdcp
