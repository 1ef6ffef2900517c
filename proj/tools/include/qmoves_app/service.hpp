#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <future>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmoves_app/lab.hpp"

namespace qmoves::app {

using nlohmann::json;

/// LRU cache of step-propagator banks keyed by (T, N). The shared spectral factorizations
/// are charged once against the budget; each entry is charged entry_bytes.
class BankCache {
public:
  BankCache(std::shared_ptr<const SpectralBank> spectra, std::size_t budget_bytes, std::size_t entry_bytes);

  std::shared_ptr<const UnitaryBank> get(double T, std::size_t N);

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  std::size_t evictions() const;

private:
  using Key = std::pair<std::uint64_t, std::size_t>;
  std::shared_ptr<const SpectralBank> spectra_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<Key> order_; // front = most recent
  std::map<Key, std::pair<std::shared_ptr<const UnitaryBank>, std::list<Key>::iterator>> entries_;
  std::size_t evictions_ = 0;
};

struct ScoreEntry {
  std::string name;
  double T = 0.0;
  double fidelity = 0.0;
  std::string source;
  std::string protocol; // content hash of the submitted samples
  std::int64_t ts = 0;  // milliseconds since the epoch, non-decreasing within the file

  json to_json() const;
  static ScoreEntry from_json(const json& j);
};

/// Append-only JSON-lines leaderboard. All appends go through one writer thread.
class ScoreStore {
public:
  explicit ScoreStore(std::filesystem::path file);
  ~ScoreStore();
  ScoreStore(const ScoreStore&) = delete;
  ScoreStore& operator=(const ScoreStore&) = delete;

  /// Queues the entry, waits until it is on disk, returns it with its timestamp.
  ScoreEntry append(ScoreEntry entry);

  /// Entries sorted by fidelity descending, optionally only those with |T - t| <= 1e-9.
  std::vector<ScoreEntry> list(std::optional<double> T = std::nullopt) const;

  const std::filesystem::path& file() const { return file_; }

private:
  void run();

  struct Job {
    ScoreEntry entry;
    std::promise<ScoreEntry> done;
  };

  std::filesystem::path file_;
  std::int64_t last_ts_ = 0;
  mutable std::mutex file_mutex_;
  std::mutex queue_mutex_;
  std::condition_variable cv_;
  std::deque<Job> queue_;
  bool stop_ = false;
  std::thread writer_;
};

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path static_dir;
  std::filesystem::path state_dir;
  std::size_t bank_budget_bytes = kDefaultBankBudgetBytes;
  std::size_t max_inflight = 4;
  double max_T = 2.0;
  std::size_t max_samples = 100000;
  std::size_t optimizer_steps = 40;
};

struct Response {
  int status = 200;
  json body;
};

/// The JSON API. Handlers are plain functions so they can be exercised without sockets.
class Service {
public:
  Service(const PhysicsConfig& cfg, ServiceOptions opts);

  Response config() const;
  Response reference(const std::map<std::string, std::string>& query);
  Response simulate(const std::string& body);
  Response post_score(const std::string& body);
  Response get_scores(const std::map<std::string, std::string>& query) const;

  /// Blocks serving HTTP until stop() is called.
  void listen();
  void stop();
  bool wait_until_ready(int timeout_ms) const;
  int bound_port() const { return bound_port_.load(); }

  const Lab& lab() const { return lab_; }
  BankCache& banks() { return banks_; }

private:
  class Slot;
  std::optional<Slot> acquire();
  json run_simulation(const Protocol& p, bool frames);
  json make_reference(ProtocolKind kind, double T);
  static Response error(int status, const std::string& code, const std::string& message);

  ServiceOptions opts_;
  Lab lab_;
  BankCache banks_;
  ScoreStore scores_;
  std::atomic<std::size_t> inflight_{0};
  std::mutex reference_mutex_;
  std::map<std::pair<std::string, std::uint64_t>, json> references_;
  std::atomic<int> bound_port_{0};
  std::shared_ptr<void> server_;
};

/// FNV-1a over the sample bytes, 16 hex digits.
std::string protocol_hash(const Protocol& p);

} // namespace qmoves::app
