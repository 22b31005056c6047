#include "smchain/harness/tcp_runner.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fcntl.h>

#include <fstream>
#include <thread>

#include "smchain/harness/adversary.hpp"
#include "smchain/harness/workload.hpp"
#include "smchain/ledger/query.hpp"
#include "smchain/transport/tcp_transport.hpp"

namespace smchain::harness {

using nlohmann::json;
using consensus::Outcome;
using consensus::RoundOutcome;

namespace {

std::filesystem::path node_dir(const std::filesystem::path& out, ValidatorId id) {
  return out / ("node-" + std::to_string(id.value));
}

std::int64_t unix_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

Outcome parse_outcome(const std::string& s) {
  if (s == "accept") return Outcome::Accept;
  if (s == "reject") return Outcome::Reject;
  return Outcome::Abandoned;
}

class RemotePeers final : public consensus::SyncSource {
 public:
  RemotePeers(const ScenarioConfig& c, ValidatorId self) {
    for (std::uint16_t i = 1; i <= c.n; ++i) {
      if (i == self.value) continue;
      endpoints_.push_back({c.transport.host, static_cast<std::uint16_t>(c.transport.base_port + 100 + i)});
    }
  }

  std::vector<const ledger::ChainView*> peers(ValidatorId) override {
    std::vector<const ledger::ChainView*> out;
    views_.clear();
    for (const auto& ep : endpoints_) {
      try {
        views_.push_back(std::make_unique<ledger::RemoteChainView>(ep));
        out.push_back(views_.back().get());
      } catch (const std::exception&) {
        // Unreachable peers simply do not count towards agreement.
      }
    }
    return out;
  }

 private:
  std::vector<net::Endpoint> endpoints_;
  std::vector<std::unique_ptr<ledger::RemoteChainView>> views_;
};

}  // namespace

json outcome_to_json(const RoundOutcome& o) {
  json j = {{"round", o.round},
            {"leader", o.leader.value},
            {"outcome", consensus::to_string(o.outcome)},
            {"votes_true", o.votes_true},
            {"votes_false", o.votes_false},
            {"appended", o.appended},
            {"pending", o.pending},
            {"height_after", o.height_after},
            {"txs_committed", o.txs_committed},
            {"start_ns", o.start.count()},
            {"proposal_done_ns", o.proposal_done.count()},
            {"end_ns", o.end.count()},
            {"scans", o.scans},
            {"scan_reads", o.scan_reads},
            {"scan_duplicates", o.scan_duplicates}};
  if (o.hash) j["hash"] = to_hex(*o.hash);
  if (o.own_vote) j["own_vote"] = *o.own_vote;
  return j;
}

RoundOutcome outcome_from_json(const json& j) {
  RoundOutcome o;
  o.round = j.at("round").get<Round>();
  o.leader = ValidatorId{j.at("leader").get<std::uint16_t>()};
  o.outcome = parse_outcome(j.at("outcome").get<std::string>());
  o.votes_true = j.at("votes_true").get<std::size_t>();
  o.votes_false = j.at("votes_false").get<std::size_t>();
  o.appended = j.at("appended").get<bool>();
  o.pending = j.at("pending").get<bool>();
  o.height_after = j.at("height_after").get<Height>();
  o.txs_committed = j.at("txs_committed").get<std::size_t>();
  o.start = Timestamp{j.at("start_ns").get<std::int64_t>()};
  o.proposal_done = Timestamp{j.at("proposal_done_ns").get<std::int64_t>()};
  o.end = Timestamp{j.at("end_ns").get<std::int64_t>()};
  o.scans = j.at("scans").get<std::uint64_t>();
  o.scan_reads = j.at("scan_reads").get<std::uint64_t>();
  o.scan_duplicates = j.at("scan_duplicates").get<std::uint64_t>();
  if (j.contains("hash")) {
    Bytes raw;
    if (!from_hex(j.at("hash").get<std::string>(), raw) || raw.size() != 32)
      throw std::runtime_error("bad hash in outcome");
    chain::BlockHash h{};
    std::copy(raw.begin(), raw.end(), h.begin());
    o.hash = h;
  }
  if (j.contains("own_vote")) o.own_vote = j.at("own_vote").get<bool>();
  return o;
}

int run_tcp_node(const TcpNodeOptions& opt) {
  ScenarioConfig c = load_scenario(opt.scenario_path);
  if (opt.seed) c.seed = *opt.seed;
  if (opt.id.value < 1 || opt.id.value > c.n) throw ConfigError(ConfigError::Kind::Invariant, "node id outside 1..n");
  const auto ids = derive_identities(c);
  const auto self = opt.id;
  const auto dir = node_dir(opt.out, self);
  std::filesystem::create_directories(dir);

  std::vector<net::Endpoint> endpoints;
  std::vector<crypto::PublicKey> keys;
  for (std::uint16_t i = 1; i <= c.n; ++i) {
    endpoints.push_back({c.transport.host, static_cast<std::uint16_t>(c.transport.base_port + i)});
    keys.push_back(ids.validators[i - 1].pk);
  }

  transport::RegisterArray registers(c.n);
  transport::TcpRegisterServer register_server(registers, keys[self.value - 1], endpoints[self.value - 1]);
  std::filesystem::remove_all(dir / "store");
  auto chain = ledger::Blockchain::create(dir / "store", ids.genesis, c.store.options);
  ledger::QueryServer query_server(
      *chain, {c.transport.host, static_cast<std::uint16_t>(c.transport.base_port + 100 + self.value)});

  const auto wait = opt.start_at_unix_ns - unix_ns();
  if (wait > 0) std::this_thread::sleep_for(std::chrono::nanoseconds(wait));

  crypto::Verifier verifier(c.crypto_cache);
  transport::TcpTransport transport(self, registers, {endpoints, keys});
  monitor::SmMonitor monitor(self, transport);
  monitor.connect_all();
  ledger::TransactionPool pool;
  const auto byz = c.byzantine_set();
  std::unique_ptr<consensus::Behavior> behavior;
  if (byz.contains(self)) behavior = make_behavior(c.adversary, derive_seed(c.seed, 0xad00 + self.value - 1));
  RemotePeers peers(c, self);
  EventLoop loop(EventLoop::Mode::RealTime);
  consensus::SmcaNode node(node_config(c, self), ids.validators[self.value - 1], keys, c.effective_powers(), loop,
                           monitor, *chain, pool, &verifier, behavior.get(), &peers);

  std::vector<RoundOutcome> outcomes;
  bool done = false;
  auto drive = [&]() -> Task<void> {
    for (Round k = 1; k <= c.rounds; ++k) outcomes.push_back(co_await node.run_round(k));
    done = true;
  };
  auto feed = [&]() -> Task<void> {
    const auto& w = c.workload;
    if (w.accounts < 2) co_return;
    WorkloadGenerator gen(w, ids.accounts, c.seed);
    auto admit = [&](const chain::Transaction& tx) {
      chain->with_state([&](const ledger::ChainState& st) {
        pool.admit(tx, static_cast<std::uint64_t>(loop.now().count()), st, &verifier);
      });
    };
    for (std::size_t i = 0; i < w.initial_backlog; ++i) admit(gen.next());
    if (w.rate_tps <= 0) co_return;
    while (!done) {
      co_await loop.sleep_for(gen.next_gap());
      if (!done) admit(gen.next());
    }
  };
  loop.spawn(drive());
  loop.spawn(feed());
  loop.run();

  json arr = json::array();
  for (const auto& o : outcomes) arr.push_back(outcome_to_json(o));
  {
    std::ofstream out(dir / "outcomes.json.tmp");
    out << json{{"node", self.value}, {"outcomes", arr}}.dump() << "\n";
  }
  std::filesystem::rename(dir / "outcomes.json.tmp", dir / "outcomes.json");

  // Peers may still be reading registers or syncing from this node.
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(60);
  while (!std::filesystem::exists(opt.out / "stop") && std::chrono::steady_clock::now() < deadline)
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  query_server.stop();
  register_server.stop();
  return 0;
}

std::filesystem::path tcp_self_executable(const char* argv0) {
  std::error_code ec;
  auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (!ec) return p;
  return std::filesystem::absolute(argv0);
}

RunResult run_tcp(const ScenarioConfig& c, const TcpRunOptions& opt) {
  validate(c);
  if (!c.crash_recover.empty())
    throw ConfigError(ConfigError::Kind::Invariant, "crash_recover is only supported on the simulated transport");
  std::filesystem::remove_all(opt.out);
  std::filesystem::create_directories(opt.out);

  const auto start_at = unix_ns() + opt.startup.count();
  std::vector<pid_t> pids;
  for (std::uint16_t i = 1; i <= c.n; ++i) {
    std::vector<std::string> args = {opt.executable.string(), "node",
                                     "--scenario", opt.scenario_path.string(),
                                     "--id", std::to_string(i),
                                     "--seed", std::to_string(c.seed),
                                     "--out", opt.out.string(),
                                     "--start-at", std::to_string(start_at)};
    const auto log = (opt.out / ("node-" + std::to_string(i) + ".log")).string();
    const pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
      const int fd = ::open(log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
      if (fd >= 0) {
        dup2(fd, STDOUT_FILENO);
        dup2(fd, STDERR_FILENO);
        ::close(fd);
      }
      std::vector<char*> argv;
      for (auto& a : args) argv.push_back(a.data());
      argv.push_back(nullptr);
      execv(argv[0], argv.data());
      _exit(127);
    }
    pids.push_back(pid);
  }

  const auto budget = opt.startup + c.effective_delta2() * static_cast<std::int64_t>(c.rounds) * 3 +
                      std::chrono::seconds(20);
  const auto deadline = std::chrono::steady_clock::now() + budget;
  std::vector<int> status(c.n, -1);
  std::vector<bool> exited(c.n, false);
  auto reap = [&] {
    for (std::size_t i = 0; i < c.n; ++i) {
      if (exited[i]) continue;
      int st = 0;
      if (waitpid(pids[i], &st, WNOHANG) == pids[i]) {
        exited[i] = true;
        status[i] = WIFEXITED(st) ? WEXITSTATUS(st) : 128 + WTERMSIG(st);
      }
    }
  };
  auto finished = [&] {
    for (std::uint16_t i = 1; i <= c.n; ++i)
      if (!exited[i - 1] && !std::filesystem::exists(node_dir(opt.out, ValidatorId{i}) / "outcomes.json"))
        return false;
    return true;
  };
  while (!finished() && std::chrono::steady_clock::now() < deadline) {
    reap();
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  std::ofstream(opt.out / "stop") << "stop\n";
  const auto grace = std::chrono::steady_clock::now() + std::chrono::seconds(10);
  while (std::chrono::steady_clock::now() < grace &&
         !std::all_of(exited.begin(), exited.end(), [](bool e) { return e; })) {
    reap();
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  for (std::size_t i = 0; i < c.n; ++i)
    if (!exited[i]) {
      kill(pids[i], SIGKILL);
      int st = 0;
      waitpid(pids[i], &st, 0);
      status[i] = 128 + SIGKILL;
    }

  RunResult res;
  res.config = c;
  res.reporter = pick_reporter(c);
  const auto ids = derive_identities(c);
  crypto::Verifier verifier(c.crypto_cache);
  const auto byz = c.byzantine_set();
  std::vector<std::string> failures;
  for (std::uint16_t i = 1; i <= c.n; ++i) {
    NodeResult nr;
    nr.id = ValidatorId{i};
    nr.byzantine = byz.contains(nr.id);
    const auto dir = node_dir(opt.out, nr.id);
    if (status[i - 1] != 0) failures.push_back(nr.id.str() + " exited with status " + std::to_string(status[i - 1]));
    try {
      std::ifstream in(dir / "outcomes.json");
      if (in) {
        const auto j = json::parse(in);
        for (const auto& o : j.at("outcomes")) {
          auto r = outcome_from_json(o);
          r.node = nr.id;
          nr.outcomes.push_back(std::move(r));
        }
      } else {
        failures.push_back(nr.id.str() + " wrote no outcomes");
      }
      if (ledger::BlockStore::exists(dir / "store")) {
        nr.chain = ledger::Blockchain::open(dir / "store", c.store.options, &verifier);
        nr.store_dir = dir / "store";
      }
    } catch (const std::exception& e) {
      failures.push_back(nr.id.str() + ": " + e.what());
    }
    res.nodes.push_back(std::move(nr));
  }
  res.metrics = compute_metrics(c, res.nodes, res.reporter);
  res.checks = check_run(c, res.nodes);
  res.checks.node_failures = failures.size();
  for (auto& f : failures) res.checks.messages.push_back(std::move(f));
  return res;
}

}  // namespace smchain::harness
