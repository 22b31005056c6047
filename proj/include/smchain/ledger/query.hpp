#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "smchain/common/net.hpp"
#include "smchain/ledger/blockchain.hpp"

namespace smchain::ledger {

/// Kinds: block <k>, tx <id-hex>, balance <account-hex>, head, hash <k>,
/// raw-block <k>. Every answer carries "status": ok | not-found | error.
nlohmann::json query(const Blockchain& chain, const std::string& kind, const std::string& arg);

/// Parses one request line "kind [arg]" and answers it as a single JSON line.
std::string answer_line(const Blockchain& chain, const std::string& line);

nlohmann::json block_to_json(const Block& b, const BlockHash& hash);

/// Line-delimited query service: one request per line, one JSON object per
/// response line, any number of requests per connection.
class QueryServer {
 public:
  QueryServer(const Blockchain& chain, const net::Endpoint& bind);
  ~QueryServer();
  QueryServer(const QueryServer&) = delete;
  QueryServer& operator=(const QueryServer&) = delete;

  std::uint16_t port() const { return port_; }
  void stop();

 private:
  void accept_loop();
  void serve(std::shared_ptr<net::Socket> conn);

  const Blockchain& chain_;
  net::Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex conns_mu_;
  std::vector<std::shared_ptr<net::Socket>> conns_;
  std::vector<std::thread> workers_;
};

class QueryClient {
 public:
  /// Throws std::runtime_error if the node is unreachable.
  explicit QueryClient(const net::Endpoint& node, Duration timeout = std::chrono::seconds(5));
  nlohmann::json request(const std::string& kind, const std::string& arg = "");
  std::string request_line(const std::string& line);

 private:
  net::Socket sock_;
  Duration timeout_;
};

/// ChainView over a remote node's query service.
class RemoteChainView final : public ChainView {
 public:
  explicit RemoteChainView(const net::Endpoint& node) : client_(std::make_unique<QueryClient>(node)) {}
  Height height() const override;
  std::optional<BlockHash> hash_at(Height h) const override;
  std::optional<Block> block_at(Height h) const override;

 private:
  std::unique_ptr<QueryClient> client_;
};

/// Account bookkeeping for one key: builds signed transfers with the next
/// nonce and reads balances from a chain.
class Wallet {
 public:
  explicit Wallet(crypto::KeyPair keys, std::uint64_t next_nonce = 0) : keys_(keys), nonce_(next_nonce) {}
  const AccountId& account() const { return keys_.pk; }
  Transaction transfer(const AccountId& to, std::uint64_t amount) {
    return chain::make_transfer(keys_, to, amount, nonce_++);
  }
  /// Realigns with the chain after transfers were lost or committed elsewhere.
  void resync(const Blockchain& chain) { nonce_ = std::max(nonce_, chain.next_nonce(keys_.pk)); }
  std::uint64_t balance(const Blockchain& chain) const { return chain.balance(keys_.pk).value_or(0); }
  std::uint64_t next_nonce() const { return nonce_; }

 private:
  crypto::KeyPair keys_;
  std::uint64_t nonce_;
};

}  // namespace smchain::ledger
