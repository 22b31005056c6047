#include "smchain/ledger/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <utility>

#include "smchain/ledger/state.hpp"

namespace smchain::ledger {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMagicLen = 8;

fs::path log_path(const fs::path& dir) { return dir / "blocks.log"; }
fs::path idx_path(const fs::path& dir) { return dir / "blocks.idx"; }

[[noreturn]] void io_fail(const std::string& what, const fs::path& p) {
  throw std::runtime_error(what + " " + p.string() + ": " + std::strerror(errno));
}

void write_fully(int fd, const std::uint8_t* data, std::size_t n, const fs::path& p) {
  while (n > 0) {
    ssize_t w = ::write(fd, data, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      io_fail("write", p);
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
}

Bytes read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

bool has_magic(const Bytes& data, const char* magic) {
  return data.size() >= kMagicLen && std::memcmp(data.data(), magic, kMagicLen) == 0;
}

struct Record {
  std::uint64_t offset;
  ByteView body;
  crypto::Hash32 stored_hash;
};

/// Splits a log into records. Stops at a short trailing record and reports
/// the offset where valid data ends.
std::vector<Record> split_records(const Bytes& data, std::uint64_t& valid_end, bool& torn) {
  std::vector<Record> out;
  std::size_t pos = kMagicLen;
  torn = false;
  while (pos < data.size()) {
    if (data.size() - pos < 4) {
      torn = true;
      break;
    }
    ByteReader lr(ByteView{data.data() + pos, 4});
    const std::uint32_t len = lr.get_u32();
    if (data.size() - pos - 4 < static_cast<std::size_t>(len) + 32) {
      torn = true;
      break;
    }
    Record rec;
    rec.offset = pos;
    rec.body = ByteView{data.data() + pos + 4, len};
    std::memcpy(rec.stored_hash.data(), data.data() + pos + 4 + len, 32);
    out.push_back(rec);
    pos += 4 + static_cast<std::size_t>(len) + 32;
  }
  valid_end = pos;
  if (torn) valid_end = out.empty() ? kMagicLen : out.back().offset + 4 + out.back().body.size() + 32;
  return out;
}

}  // namespace

BlockStore::BlockStore(fs::path dir, StoreOptions options) : dir_(std::move(dir)), options_(options) {
  if (options_.index_interval == 0) options_.index_interval = 1;
}

BlockStore::BlockStore(BlockStore&& o) noexcept
    : dir_(std::move(o.dir_)),
      options_(o.options_),
      log_fd_(std::exchange(o.log_fd_, -1)),
      idx_fd_(std::exchange(o.idx_fd_, -1)),
      count_(o.count_),
      log_size_(o.log_size_) {}

BlockStore& BlockStore::operator=(BlockStore&& o) noexcept {
  if (this != &o) {
    if (log_fd_ >= 0) ::close(log_fd_);
    if (idx_fd_ >= 0) ::close(idx_fd_);
    dir_ = std::move(o.dir_);
    options_ = o.options_;
    log_fd_ = std::exchange(o.log_fd_, -1);
    idx_fd_ = std::exchange(o.idx_fd_, -1);
    count_ = o.count_;
    log_size_ = o.log_size_;
  }
  return *this;
}

BlockStore::~BlockStore() {
  if (log_fd_ >= 0) ::close(log_fd_);
  if (idx_fd_ >= 0) ::close(idx_fd_);
}

bool BlockStore::exists(const fs::path& dir) { return fs::exists(log_path(dir)); }

void BlockStore::open_files(bool truncate) {
  const int flags = O_WRONLY | O_CREAT | O_CLOEXEC | (truncate ? O_TRUNC : O_APPEND);
  log_fd_ = ::open(log_path(dir_).c_str(), flags, 0644);
  if (log_fd_ < 0) io_fail("open", log_path(dir_));
  idx_fd_ = ::open(idx_path(dir_).c_str(), flags, 0644);
  if (idx_fd_ < 0) io_fail("open", idx_path(dir_));
}

void BlockStore::sync_fd(int fd) {
  if (options_.fsync && ::fdatasync(fd) != 0) io_fail("fsync", dir_);
}

BlockStore BlockStore::create(const fs::path& dir, StoreOptions options) {
  fs::create_directories(dir);
  if (exists(dir)) throw std::runtime_error("block store already exists in " + dir.string());
  BlockStore s(dir, options);
  s.open_files(true);
  write_fully(s.log_fd_, reinterpret_cast<const std::uint8_t*>(kLogMagic), kMagicLen, log_path(dir));
  write_fully(s.idx_fd_, reinterpret_cast<const std::uint8_t*>(kIndexMagic), kMagicLen, idx_path(dir));
  s.sync_fd(s.log_fd_);
  s.sync_fd(s.idx_fd_);
  s.log_size_ = kMagicLen;
  return s;
}

BlockStore BlockStore::open(const fs::path& dir, std::vector<chain::Block>& blocks, StoreOptions options) {
  const Bytes data = read_file(log_path(dir));
  if (!has_magic(data, kLogMagic)) throw IntegrityViolation("bad block log header in " + dir.string());
  std::uint64_t valid_end = 0;
  bool torn = false;
  const auto records = split_records(data, valid_end, torn);
  blocks.clear();
  blocks.reserve(records.size());
  for (const auto& rec : records) {
    if (crypto::sha256(rec.body) != rec.stored_hash)
      throw IntegrityViolation("record hash mismatch at offset " + std::to_string(rec.offset));
    blocks.push_back(chain::decode_block(rec.body));
  }
  if (torn && ::truncate(log_path(dir).c_str(), static_cast<off_t>(valid_end)) != 0)
    io_fail("truncate", log_path(dir));

  // The index is derived data; rebuild it so it matches the surviving records.
  BlockStore s(dir, options);
  {
    ByteWriter w;
    w.put_raw(ByteView{reinterpret_cast<const std::uint8_t*>(kIndexMagic), kMagicLen});
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (i % s.options_.index_interval != 0) continue;
      w.put_u64(i);
      w.put_u64(records[i].offset);
    }
    const int fd = ::open(idx_path(dir).c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) io_fail("open", idx_path(dir));
    write_fully(fd, w.bytes().data(), w.size(), idx_path(dir));
    ::close(fd);
  }
  s.open_files(false);
  s.count_ = records.size();
  s.log_size_ = valid_end;
  return s;
}

void BlockStore::append(const chain::Block& b) {
  if (b.height != count_)
    throw IntegrityViolation("store append out of order: height " + std::to_string(b.height) + ", expected " +
                             std::to_string(count_));
  const Bytes body = chain::encode_block(b);
  ByteWriter w;
  w.put_u32(static_cast<std::uint32_t>(body.size()));
  w.put_raw(body);
  w.put_raw(crypto::sha256(body));
  write_fully(log_fd_, w.bytes().data(), w.size(), log_path(dir_));
  sync_fd(log_fd_);
  if (count_ % options_.index_interval == 0) {
    ByteWriter iw;
    iw.put_u64(count_);
    iw.put_u64(log_size_);
    write_fully(idx_fd_, iw.bytes().data(), iw.size(), idx_path(dir_));
    sync_fd(idx_fd_);
  }
  log_size_ += w.size();
  ++count_;
}

StoreReport verify_store(const fs::path& path) {
  StoreReport rep;
  const fs::path dir = fs::is_directory(path) ? path : path.parent_path();
  Bytes data;
  try {
    data = read_file(log_path(dir));
  } catch (const std::exception& e) {
    rep.error = e.what();
    return rep;
  }
  if (!has_magic(data, BlockStore::kLogMagic)) {
    rep.error = "bad block log header";
    return rep;
  }
  std::uint64_t valid_end = 0;
  bool torn = false;
  const auto records = split_records(data, valid_end, torn);
  if (torn) {
    rep.error = "truncated record at offset " + std::to_string(valid_end);
    return rep;
  }
  if (records.empty()) {
    rep.error = "store holds no genesis block";
    return rep;
  }

  std::optional<ChainState> state;
  chain::BlockHash prev{};
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    const std::string where = "height " + std::to_string(i) + ": ";
    const auto h = crypto::sha256(rec.body);
    if (h != rec.stored_hash) {
      rep.error = where + "stored hash does not match record";
      return rep;
    }
    chain::Block b;
    try {
      b = chain::decode_block(rec.body);
    } catch (const DecodeError& e) {
      rep.error = where + "undecodable block: " + e.what();
      return rep;
    }
    if (chain::encode_block(b) != Bytes(rec.body.begin(), rec.body.end())) {
      rep.error = where + "non-canonical encoding";
      return rep;
    }
    if (b.height != i) {
      rep.error = where + "block reports height " + std::to_string(b.height);
      return rep;
    }
    if (b.body_digest != chain::compute_body_digest(b.txs)) {
      rep.error = where + "body digest mismatch";
      return rep;
    }
    if (i == 0) {
      if (!b.genesis || b.prev_hash != crypto::kZeroHash || !b.txs.empty()) {
        rep.error = where + "malformed genesis";
        return rep;
      }
      state.emplace(*b.genesis);
    } else {
      if (b.genesis) {
        rep.error = where + "genesis section outside height 0";
        return rep;
      }
      if (b.prev_hash != prev) {
        rep.error = where + "prev_hash does not link to height " + std::to_string(i - 1);
        return rep;
      }
      for (const auto& tx : b.txs) {
        const auto v = validate_tx(tx, *state);
        if (v != TxVerdict::Accept) {
          rep.error = where + "transaction " + to_hex(tx.tx_id) + " rejected: " + to_string(v);
          return rep;
        }
        state->apply(tx);
      }
    }
    prev = h;
  }

  if (fs::exists(idx_path(dir))) {
    const Bytes idx = read_file(idx_path(dir));
    if (!has_magic(idx, BlockStore::kIndexMagic) || (idx.size() - kMagicLen) % 16 != 0) {
      rep.error = "malformed height index";
      return rep;
    }
    ByteReader r(ByteView{idx.data() + kMagicLen, idx.size() - kMagicLen});
    while (!r.at_end()) {
      const auto height = r.get_u64();
      const auto offset = r.get_u64();
      if (height >= records.size() || records[height].offset != offset) {
        rep.error = "index entry for height " + std::to_string(height) + " points at wrong offset";
        return rep;
      }
      ++rep.index_entries;
    }
  }

  rep.ok = true;
  rep.blocks = records.size();
  rep.tip = prev;
  return rep;
}

}  // namespace smchain::ledger
