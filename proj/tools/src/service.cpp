#include "qmoves_app/service.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
// Bodies are parsed as JSON whatever the declared content type; don't let a form
// content type cap them at httplib's default 8 KiB.
#define CPPHTTPLIB_FORM_URL_ENCODED_PAYLOAD_MAX_LENGTH (std::size_t{16} << 20)
#include <httplib.h>

#include "qmoves/errors.hpp"
#include "qmoves_app/json_io.hpp"
#include "qmoves_app/run_manifest.hpp"

namespace qmoves::app {
namespace {

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

std::int64_t now_ms()
{
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// Same T within rounding: the UI echoes T back from its own arithmetic.
bool same_T(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

const std::vector<std::string> kSources = {"human", "cd_single", "cd_double", "geodesic", "optimizer"};

double parse_double(const std::string& s, const char* what)
{
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw DomainError(fmt::format("'{}' is not a number for {}", s, what));
  }
  return v;
}

// Content-addressed: write to a unique temp name, then rename into place.
void store_protocol(const std::filesystem::path& dir, const std::string& hash, const Protocol& p)
{
  std::filesystem::create_directories(dir);
  const auto target = dir / (hash + ".json");
  if (std::filesystem::exists(target)) {
    return;
  }
  const auto tmp = dir / fmt::format("{}.{}.tmp", hash, std::hash<std::thread::id>{}(std::this_thread::get_id()));
  write_json_file(tmp, to_json(p));
  std::filesystem::rename(tmp, target);
}

} // namespace

// ---------------------------------------------------------------------------
// BankCache
// ---------------------------------------------------------------------------

BankCache::BankCache(std::shared_ptr<const SpectralBank> spectra, std::size_t budget_bytes, std::size_t entry_bytes)
    : spectra_(std::move(spectra))
{
  const std::size_t shared = spectra_->memory_bytes();
  const std::size_t left = budget_bytes > shared ? budget_bytes - shared : 0;
  capacity_ = std::max<std::size_t>(1, entry_bytes > 0 ? left / entry_bytes : 1);
}

std::shared_ptr<const UnitaryBank> BankCache::get(double T, std::size_t N)
{
  const Key key{bits(T), N};
  std::lock_guard lock(mutex_);
  if (auto it = entries_.find(key); it != entries_.end()) {
    order_.splice(order_.begin(), order_, it->second.second);
    return it->second.first;
  }
  auto bank = std::make_shared<const UnitaryBank>(spectra_, T, N);
  order_.push_front(key);
  entries_.emplace(key, std::make_pair(bank, order_.begin()));
  while (entries_.size() > capacity_) {
    entries_.erase(order_.back());
    order_.pop_back();
    ++evictions_;
  }
  return bank;
}

std::size_t BankCache::size() const
{
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t BankCache::evictions() const
{
  std::lock_guard lock(mutex_);
  return evictions_;
}

// ---------------------------------------------------------------------------
// ScoreStore
// ---------------------------------------------------------------------------

json ScoreEntry::to_json() const
{
  return json{{"name", name}, {"T", T}, {"fidelity", fidelity}, {"source", source}, {"protocol", protocol},
              {"ts", ts}};
}

ScoreEntry ScoreEntry::from_json(const json& j)
{
  ScoreEntry e;
  e.name = j.at("name").get<std::string>();
  e.T = j.at("T").get<double>();
  e.fidelity = j.at("fidelity").get<double>();
  e.source = j.at("source").get<std::string>();
  e.protocol = j.value("protocol", std::string{});
  e.ts = j.at("ts").get<std::int64_t>();
  return e;
}

ScoreStore::ScoreStore(std::filesystem::path file) : file_(std::move(file))
{
  if (file_.has_parent_path()) {
    std::filesystem::create_directories(file_.parent_path());
  }
  for (const auto& e : list()) {
    last_ts_ = std::max(last_ts_, e.ts);
  }
  writer_ = std::thread([this] { run(); });
}

ScoreStore::~ScoreStore()
{
  {
    std::lock_guard lock(queue_mutex_);
    stop_ = true;
  }
  cv_.notify_all();
  writer_.join();
}

ScoreEntry ScoreStore::append(ScoreEntry entry)
{
  Job job{std::move(entry), {}};
  auto done = job.done.get_future();
  {
    std::lock_guard lock(queue_mutex_);
    queue_.push_back(std::move(job));
  }
  cv_.notify_one();
  return done.get();
}

void ScoreStore::run()
{
  for (;;) {
    std::unique_lock lock(queue_mutex_);
    cv_.wait(lock, [&] { return stop_ || !queue_.empty(); });
    if (queue_.empty()) {
      return;
    }
    Job job = std::move(queue_.front());
    queue_.pop_front();
    lock.unlock();
    try {
      job.entry.ts = std::max(now_ms(), last_ts_);
      const std::string line = job.entry.to_json().dump() + "\n";
      {
        std::lock_guard file_lock(file_mutex_);
        std::ofstream out(file_, std::ios::app | std::ios::binary);
        out.write(line.data(), static_cast<std::streamsize>(line.size()));
        out.flush();
        if (!out) {
          throw ResourceError("cannot append to " + file_.string());
        }
      }
      last_ts_ = job.entry.ts;
      job.done.set_value(job.entry);
    } catch (...) {
      job.done.set_exception(std::current_exception());
    }
  }
}

std::vector<ScoreEntry> ScoreStore::list(std::optional<double> T) const
{
  std::vector<ScoreEntry> out;
  std::lock_guard lock(file_mutex_);
  std::ifstream in(file_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    // A torn last line (crash mid-write) is skipped rather than failing the listing.
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      continue;
    }
    auto e = ScoreEntry::from_json(j);
    if (!T || same_T(e.T, *T)) {
      out.push_back(std::move(e));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoreEntry& a, const ScoreEntry& b) { return a.fidelity > b.fidelity; });
  return out;
}

// ---------------------------------------------------------------------------
// Service
// ---------------------------------------------------------------------------

std::string protocol_hash(const Protocol& p)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](double v) {
    const auto b = bits(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (b >> (8 * i)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  for (std::size_t j = 0; j < p.size(); ++j) {
    mix(p.times()[j]);
    mix(p.positions()[j]);
  }
  return fmt::format("{:016x}", h);
}

class Service::Slot {
public:
  explicit Slot(std::atomic<std::size_t>& count) : count_(&count) {}
  Slot(Slot&& o) noexcept : count_(std::exchange(o.count_, nullptr)) {}
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;
  Slot& operator=(Slot&&) = delete;
  ~Slot()
  {
    if (count_ != nullptr) {
      count_->fetch_sub(1);
    }
  }

private:
  std::atomic<std::size_t>* count_;
};

Service::Service(const PhysicsConfig& cfg, ServiceOptions opts)
    : opts_(std::move(opts)), lab_(cfg, opts_.bank_budget_bytes),
      banks_(lab_.spectra(), opts_.bank_budget_bytes,
             std::size_t{16} << 20), // per-bank bookkeeping plus a simulation's working state
      scores_((opts_.state_dir.empty() ? state_dir() : opts_.state_dir) / "scores.jsonl"),
      server_(std::make_shared<httplib::Server>())
{
}

std::optional<Service::Slot> Service::acquire()
{
  if (inflight_.fetch_add(1) >= opts_.max_inflight) {
    inflight_.fetch_sub(1);
    return std::nullopt;
  }
  return Slot(inflight_);
}

Response Service::error(int status, const std::string& code, const std::string& message)
{
  return {status, json{{"error", code}, {"message", message}}};
}

Response Service::config() const
{
  json presets = json::array();
  for (double f : {1.0, 1.3, 1.5, 2.0}) {
    presets.push_back(f * lab_.t_csl());
  }
  return {200, json{{"physics", to_json(lab_.config())},
                    {"lattice", to_json(lab_.lattice())},
                    {"t_csl", lab_.t_csl()},
                    {"frame_bins", kFrameBins},
                    {"max_T", opts_.max_T},
                    {"T_presets", presets},
                    {"reference_kinds", {"cubic", "cd_single", "geodesic", "cd_double", "optimized"}},
                    {"sources", kSources}}};
}

json Service::run_simulation(const Protocol& p, bool frames)
{
  const double T = p.duration();
  const std::size_t N = default_step_rule(T);
  const auto bank = banks_.get(T, N);
  const std::size_t stride = frames ? std::max<std::size_t>(1, N / 100) : 0;
  const auto result = lab_.simulate(p, *bank, stride);
  json out{{"fidelity", *result.fidelity}, {"T", T}, {"N", N}};
  if (frames) {
    out["frames"] = to_json(result.frames);
    out["frame_x_min"] = lab_.config().x_min;
    out["frame_x_max"] = lab_.config().x_max;
  }
  return out;
}

json Service::make_reference(ProtocolKind kind, double T)
{
  Protocol p = [&] {
    if (kind != ProtocolKind::optimized) {
      return lab_.reference(kind, T);
    }
    OptimizerConfig oc;
    oc.N = opts_.optimizer_steps;
    oc.lattice = lab_.lattice();
    oc.seed = 0;
    const UnitaryBank bank(lab_.spectra(), T, oc.N);
    const auto trace = optimize(oc, bank, lab_.states().initial, lab_.states().target);
    // Two samples per step so the piecewise-linear reading reproduces the step protocol
    // at any finer quantization.
    std::vector<double> t;
    std::vector<double> x;
    const double dt = T / static_cast<double>(oc.N);
    for (std::size_t i = 0; i < oc.N; ++i) {
      const double xi = oc.lattice.position(trace.final_protocol.indices[i]);
      t.push_back(static_cast<double>(i) * dt);
      x.push_back(xi);
      t.push_back(i + 1 == oc.N ? T : (static_cast<double>(i) + 1.0 - 1e-6) * dt);
      x.push_back(xi);
    }
    return Protocol(std::move(t), std::move(x), ProtocolKind::optimized);
  }();
  auto j = to_json(p);
  j["fidelity"] = run_simulation(p, false).at("fidelity");
  return j;
}

Response Service::reference(const std::map<std::string, std::string>& query)
{
  auto kind_it = query.find("kind");
  auto T_it = query.find("T");
  if (kind_it == query.end() || T_it == query.end()) {
    return error(400, "bad_request", "reference needs kind and T query parameters");
  }
  ProtocolKind kind{};
  double T = 0.0;
  try {
    kind = protocol_kind_from_string(kind_it->second);
    T = parse_double(T_it->second, "T");
  } catch (const std::exception& e) {
    return error(400, "bad_request", e.what());
  }
  if (kind == ProtocolKind::human) {
    return error(400, "bad_request", "no reference protocol of kind 'human'");
  }
  if (!(T > 0.0) || T > opts_.max_T) {
    return error(422, "out_of_range", fmt::format("T must lie in (0, {}]", opts_.max_T));
  }
  const auto key = std::make_pair(kind_it->second, bits(T));
  {
    std::lock_guard lock(reference_mutex_);
    if (auto it = references_.find(key); it != references_.end()) {
      return {200, it->second};
    }
  }
  auto slot = acquire();
  if (!slot) {
    return error(429, "overloaded", "too many simulations in flight; retry shortly");
  }
  try {
    auto j = make_reference(kind, T);
    std::lock_guard lock(reference_mutex_);
    references_.emplace(key, j);
    return {200, j};
  } catch (const DomainError& e) {
    return error(422, "out_of_range", e.what());
  } catch (const std::exception& e) {
    return error(422, "simulation_failed", e.what());
  }
}

Response Service::simulate(const std::string& body)
{
  const auto j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return error(400, "bad_request", "body is not a JSON object");
  }
  Protocol p = Protocol::uniform(1.0, {0.0, 0.0}, ProtocolKind::human);
  bool frames = false;
  try {
    p = protocol_from_json(j);
    if (j.contains("frames")) {
      frames = j.at("frames").get<bool>();
    }
  } catch (const json::exception& e) {
    return error(422, "invalid_protocol", e.what());
  } catch (const std::exception& e) {
    return error(422, "invalid_protocol", e.what());
  }
  if (p.size() > opts_.max_samples) {
    return error(422, "invalid_protocol", fmt::format("at most {} samples", opts_.max_samples));
  }
  if (p.duration() > opts_.max_T) {
    return error(422, "out_of_range", fmt::format("T must lie in (0, {}]", opts_.max_T));
  }
  auto slot = acquire();
  if (!slot) {
    return error(429, "overloaded", "too many simulations in flight; retry shortly");
  }
  try {
    return {200, run_simulation(p, frames)};
  } catch (const DomainError& e) {
    return error(422, "out_of_range", e.what());
  } catch (const std::exception& e) {
    return error(422, "simulation_failed", e.what());
  }
}

Response Service::post_score(const std::string& body)
{
  const auto j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return error(400, "bad_request", "body is not a JSON object");
  }
  ScoreEntry e;
  Protocol p = Protocol::uniform(1.0, {0.0, 0.0}, ProtocolKind::human);
  try {
    e.name = j.at("name").get<std::string>();
    e.source = j.value("source", std::string{"human"});
    p = protocol_from_json(j.at("protocol"));
    if (j.contains("T") && !same_T(j.at("T").get<double>(), p.duration())) {
      return error(422, "invalid_protocol", "T disagrees with the protocol duration");
    }
  } catch (const json::exception& ex) {
    return error(422, "invalid_score", ex.what());
  } catch (const std::exception& ex) {
    return error(422, "invalid_protocol", ex.what());
  }
  if (e.name.empty() || e.name.size() > 32) {
    return error(422, "invalid_score", "name must have 1 to 32 characters");
  }
  if (std::find(kSources.begin(), kSources.end(), e.source) == kSources.end()) {
    return error(422, "invalid_score", "unknown source tag '" + e.source + "'");
  }
  if (p.duration() > opts_.max_T || p.size() > opts_.max_samples) {
    return error(422, "out_of_range", "protocol too long");
  }
  auto slot = acquire();
  if (!slot) {
    return error(429, "overloaded", "too many simulations in flight; retry shortly");
  }
  try {
    // Any client-side fidelity in the body is ignored.
    e.fidelity = std::clamp(run_simulation(p, false).at("fidelity").get<double>(), 0.0, 1.0);
  } catch (const DomainError& ex) {
    return error(422, "out_of_range", ex.what());
  } catch (const std::exception& ex) {
    return error(422, "simulation_failed", ex.what());
  }
  e.T = p.duration();
  e.protocol = protocol_hash(p);
  try {
    store_protocol(scores_.file().parent_path() / "protocols", e.protocol, p);
  } catch (const std::exception& ex) {
    return error(500, "storage_failed", ex.what());
  }
  try {
    return {201, scores_.append(std::move(e)).to_json()};
  } catch (const std::exception& ex) {
    return error(500, "storage_failed", ex.what());
  }
}

Response Service::get_scores(const std::map<std::string, std::string>& query) const
{
  std::optional<double> T;
  std::size_t limit = 100;
  try {
    if (auto it = query.find("T"); it != query.end()) {
      T = parse_double(it->second, "T");
    }
    if (auto it = query.find("limit"); it != query.end()) {
      const double l = parse_double(it->second, "limit");
      if (l < 1.0) {
        throw DomainError("limit must be >= 1");
      }
      limit = static_cast<std::size_t>(l);
    }
  } catch (const std::exception& e) {
    return error(400, "bad_request", e.what());
  }
  auto all = scores_.list(T);
  json arr = json::array();
  for (std::size_t i = 0; i < std::min(limit, all.size()); ++i) {
    arr.push_back(all[i].to_json());
  }
  return {200, json{{"scores", arr}, {"total", all.size()}}};
}

// ---------------------------------------------------------------------------
// HTTP binding
// ---------------------------------------------------------------------------

void Service::listen()
{
  auto server = std::static_pointer_cast<httplib::Server>(server_);
  server->set_payload_max_length(std::size_t{16} << 20);
  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto query = [](const httplib::Request& req) {
    std::map<std::string, std::string> q;
    for (const auto& [k, v] : req.params) {
      q[k] = v;
    }
    return q;
  };

  server->Get("/api/config", [this, send](const httplib::Request&, httplib::Response& res) { send(res, config()); });
  server->Get("/api/reference", [this, send, query](const httplib::Request& req, httplib::Response& res) {
    send(res, reference(query(req)));
  });
  server->Post("/api/simulate",
               [this, send](const httplib::Request& req, httplib::Response& res) { send(res, simulate(req.body)); });
  server->Post("/api/scores",
               [this, send](const httplib::Request& req, httplib::Response& res) { send(res, post_score(req.body)); });
  server->Get("/api/scores", [this, send, query](const httplib::Request& req, httplib::Response& res) {
    send(res, get_scores(query(req)));
  });
  server->set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "unknown error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, error(500, "internal", what));
  });
  if (!opts_.static_dir.empty()) {
    if (!server->set_mount_point("/", opts_.static_dir.string())) {
      throw DomainError("static directory does not exist: " + opts_.static_dir.string());
    }
  }

  int port = opts_.port;
  if (port == 0) {
    port = server->bind_to_any_port(opts_.host);
  } else if (!server->bind_to_port(opts_.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw ResourceError(fmt::format("cannot bind {}:{}", opts_.host, opts_.port));
  }
  bound_port_ = port;
  server->listen_after_bind();
}

void Service::stop()
{
  std::static_pointer_cast<httplib::Server>(server_)->stop();
}

bool Service::wait_until_ready(int timeout_ms) const
{
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  while (std::chrono::steady_clock::now() < deadline) {
    if (std::static_pointer_cast<httplib::Server>(server_)->is_running()) {
      return true;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  return false;
}

} // namespace qmoves::app
