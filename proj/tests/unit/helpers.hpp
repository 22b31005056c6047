#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "smchain/chain/block.hpp"
#include "smchain/crypto/crypto.hpp"
#include "smchain/ledger/blockchain.hpp"

namespace smchain::test {

inline std::vector<crypto::KeyPair> accounts(std::size_t n, std::uint64_t seed = 7) {
  std::vector<crypto::KeyPair> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(crypto::keygen_from_label(seed, "acct/" + std::to_string(i)));
  return out;
}

inline chain::Block genesis_for(const std::vector<crypto::KeyPair>& accts, std::uint64_t balance,
                                std::size_t validators = 3) {
  chain::GenesisState g;
  for (std::size_t i = 0; i < validators; ++i)
    g.validators.push_back({crypto::keygen_from_label(99, "val/" + std::to_string(i)).pk, 1});
  for (const auto& a : accts) g.allocations.push_back({a.pk, balance});
  return chain::make_genesis(std::move(g));
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("smchain-test-" + tag + "-" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline Bytes bytes_of(const std::string& s) { return Bytes(s.begin(), s.end()); }

}  // namespace smchain::test
