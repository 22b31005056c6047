#include "smchain/ledger/query.hpp"

#include <charconv>
#include <sstream>

namespace smchain::ledger {

using nlohmann::json;

namespace {

json not_found(const std::string& kind, const std::string& arg) {
  return {{"status", "not-found"}, {"kind", kind}, {"key", arg}};
}

json error(const std::string& msg) { return {{"status", "error"}, {"error", msg}}; }

std::optional<std::uint64_t> parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<crypto::Hash32> parse_key(const std::string& s) {
  Bytes b;
  if (!from_hex(s, b) || b.size() != 32) return std::nullopt;
  crypto::Hash32 out{};
  std::copy(b.begin(), b.end(), out.begin());
  return out;
}

json tx_to_json(const Transaction& tx) {
  return {{"id", to_hex(tx.tx_id)},      {"sender", to_hex(tx.sender)}, {"recipient", to_hex(tx.recipient)},
          {"amount", tx.amount},         {"nonce", tx.nonce}};
}

}  // namespace

json block_to_json(const Block& b, const BlockHash& hash) {
  json txs = json::array();
  for (const auto& tx : b.txs) txs.push_back(to_hex(tx.tx_id));
  json j = {{"height", b.height},
            {"round", b.round},
            {"hash", to_hex(hash)},
            {"prev_hash", to_hex(b.prev_hash)},
            {"proposer", to_hex(b.proposer)},
            {"timestamp", b.timestamp},
            {"body_digest", to_hex(b.body_digest)},
            {"tx_count", b.txs.size()},
            {"txs", txs}};
  if (b.genesis) {
    json vals = json::array();
    for (const auto& v : b.genesis->validators) vals.push_back({{"id", to_hex(v.id)}, {"power", v.power}});
    json allocs = json::array();
    for (const auto& a : b.genesis->allocations)
      allocs.push_back({{"account", to_hex(a.account)}, {"balance", a.balance}});
    j["genesis"] = {{"validators", vals}, {"allocations", allocs}};
  }
  return j;
}

json query(const Blockchain& chain, const std::string& kind, const std::string& arg) {
  if (kind == "head") {
    const auto h = chain.height();
    return {{"status", "ok"}, {"kind", kind}, {"height", h}, {"hash", to_hex(*chain.hash_at(h))}};
  }
  if (kind == "block" || kind == "hash" || kind == "raw-block") {
    auto h = parse_u64(arg);
    if (!h) return error("height must be a non-negative integer");
    auto b = chain.block_at(*h);
    if (!b) return not_found(kind, arg);
    const auto hash = *chain.hash_at(*h);
    if (kind == "hash") return {{"status", "ok"}, {"kind", kind}, {"height", *h}, {"hash", to_hex(hash)}};
    if (kind == "raw-block")
      return {{"status", "ok"}, {"kind", kind}, {"height", *h}, {"bytes", to_hex(chain::encode_block(*b))}};
    json j = block_to_json(*b, hash);
    j["status"] = "ok";
    j["kind"] = kind;
    return j;
  }
  if (kind == "tx") {
    auto id = parse_key(arg);
    if (!id) return error("tx id must be 64 hex characters");
    auto loc = chain.find_tx(*id);
    if (!loc) return not_found(kind, arg);
    json j = tx_to_json(loc->tx);
    j["status"] = "ok";
    j["kind"] = kind;
    j["height"] = loc->height;
    j["index"] = loc->index;
    return j;
  }
  if (kind == "balance") {
    auto acct = parse_key(arg);
    if (!acct) return error("account must be 64 hex characters");
    auto bal = chain.balance(*acct);
    if (!bal) return not_found(kind, arg);
    return {{"status", "ok"},
            {"kind", kind},
            {"account", arg},
            {"balance", *bal},
            {"next_nonce", chain.next_nonce(*acct)}};
  }
  return error("unknown query kind '" + kind + "'");
}

std::string answer_line(const Blockchain& chain, const std::string& line) {
  std::istringstream in(line);
  std::string kind, arg, extra;
  in >> kind >> arg;
  if (kind.empty()) return error("empty request").dump();
  if (in >> extra) return error("too many arguments").dump();
  return query(chain, kind, arg).dump();
}

QueryServer::QueryServer(const Blockchain& chain, const net::Endpoint& bind) : chain_(chain) {
  listener_ = net::listen_tcp(bind);
  if (!listener_.valid()) throw std::runtime_error("cannot listen on " + bind.str());
  port_ = net::local_port(listener_);
  acceptor_ = std::thread([this] { accept_loop(); });
}

QueryServer::~QueryServer() { stop(); }

void QueryServer::stop() {
  if (stopping_.exchange(true)) return;
  listener_.shutdown();
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::lock_guard lock(conns_mu_);
    for (auto& c : conns_) c->shutdown();
  }
  for (auto& w : workers_)
    if (w.joinable()) w.join();
  listener_.close();
}

void QueryServer::accept_loop() {
  while (!stopping_) {
    net::Socket s = net::accept_tcp(listener_);
    if (!s.valid()) {
      if (stopping_) break;
      continue;
    }
    auto conn = std::make_shared<net::Socket>(std::move(s));
    std::lock_guard lock(conns_mu_);
    if (stopping_) break;
    conns_.push_back(conn);
    workers_.emplace_back([this, conn] { serve(conn); });
  }
}

void QueryServer::serve(std::shared_ptr<net::Socket> conn) {
  std::string line;
  while (!stopping_) {
    if (net::recv_line(*conn, line, Duration(-1)) != net::RecvStatus::Ok) break;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string reply = answer_line(chain_, line) + "\n";
    if (!net::send_all(*conn, as_view(reply))) break;
  }
}

QueryClient::QueryClient(const net::Endpoint& node, Duration timeout) : timeout_(timeout) {
  sock_ = net::connect_tcp(node, timeout);
  if (!sock_.valid()) throw std::runtime_error("cannot reach node at " + node.str());
}

std::string QueryClient::request_line(const std::string& line) {
  const std::string req = line + "\n";
  if (!net::send_all(sock_, as_view(req))) throw std::runtime_error("query connection lost");
  std::string reply;
  const auto st = net::recv_line(sock_, reply, timeout_);
  if (st != net::RecvStatus::Ok)
    throw std::runtime_error(st == net::RecvStatus::Timeout ? "query timed out" : "query connection closed");
  return reply;
}

json QueryClient::request(const std::string& kind, const std::string& arg) {
  return json::parse(request_line(arg.empty() ? kind : kind + " " + arg));
}

Height RemoteChainView::height() const {
  auto j = client_->request("head");
  return j.at("height").get<Height>();
}

std::optional<BlockHash> RemoteChainView::hash_at(Height h) const {
  auto j = client_->request("hash", std::to_string(h));
  if (j.value("status", "") != "ok") return std::nullopt;
  auto k = parse_key(j.at("hash").get<std::string>());
  return k;
}

std::optional<Block> RemoteChainView::block_at(Height h) const {
  auto j = client_->request("raw-block", std::to_string(h));
  if (j.value("status", "") != "ok") return std::nullopt;
  Bytes raw;
  if (!from_hex(j.at("bytes").get<std::string>(), raw)) return std::nullopt;
  try {
    return chain::decode_block(raw);
  } catch (const DecodeError&) {
    return std::nullopt;
  }
}

}  // namespace smchain::ledger
