#include "blimpassist/bridge.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <thread>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "blimpassist/config.hpp"
#include "blimpassist/text.hpp"

namespace blimpassist {

namespace fs = std::filesystem;

void validate(const SessionConfig& cfg) {
  validate(cfg.scenario, true);
  if (!std::holds_alternative<InteractivePilotSpec>(cfg.scenario.pilot)) {
    throw Error(ErrorCode::InvalidScenario, "pilot.kind: sessions take commands from clients only");
  }
  if (!(cfg.tick_rate > 0.0) || !std::isfinite(cfg.tick_rate)) {
    throw Error(ErrorCode::InvalidScenario, "tick_rate: must be > 0");
  }
  if (!(cfg.telemetry_rate > 0.0 && cfg.telemetry_rate <= cfg.tick_rate)) {
    throw Error(ErrorCode::InvalidScenario, "telemetry_rate: must lie in (0, tick_rate]");
  }
  if (std::abs(cfg.tick_rate * cfg.scenario.dt - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidScenario, "tick_rate: tick_rate * dt must equal 1");
  }
  if (cfg.max_backlog == 0) throw Error(ErrorCode::InvalidScenario, "max_backlog: must be > 0");
}

SessionConfig session_from_scenario(const Scenario& sc) {
  SessionConfig cfg;
  cfg.scenario = sc;
  if (const auto* wp = std::get_if<WaypointPilotSpec>(&sc.pilot)) {
    cfg.targets = wp->plan.waypoints;
    cfg.target_radius = wp->plan.capture_radius;
  }
  cfg.scenario.pilot = InteractivePilotSpec{};
  cfg.tick_rate = 1.0 / sc.dt;
  cfg.telemetry_rate = std::min(cfg.telemetry_rate, cfg.tick_rate);
  return cfg;
}

std::string describe(const SessionConfig& cfg) {
  json targets = json::array();
  for (const Vec3& t : cfg.targets) targets.push_back({t.x(), t.y(), t.z()});
  const json j = {{"scenario", to_json(cfg.scenario)},
            {"tick_rate", cfg.tick_rate},
            {"telemetry_rate", cfg.telemetry_rate},
            {"targets", targets},
            {"target_radius", cfg.target_radius}};
  return j.dump();
}

bool Backlog::push(Frame frame) {
  frames_.push_back(std::move(frame));
  return frames_.size() <= limit_;
}

// --- SessionCore ----------------------------------------------------------

SessionCore::SessionCore(SessionConfig cfg)
    : cfg_((validate(cfg), std::move(cfg))), sim_(cfg_.scenario) {
  telemetry_every_ = std::max<std::int64_t>(1, std::llround(cfg_.tick_rate / cfg_.telemetry_rate));
  if (cfg_.record_dir) {
    recording_ = true;
    std::error_code ec;
    fs::create_directories(*cfg_.record_dir, ec);
    if (ec) disable_recording(cfg_.record_dir->string() + ": " + ec.message());
  }
  open_segment();
}

SessionCore::~SessionCore() {
  try {
    finish();
  } catch (...) {
  }
}

void SessionCore::disable_recording(const std::string& why) {
  if (!recording_) return;
  recording_ = false;
  trace_out_.close();
  warnings_.push_back("recording disabled: " + why);
  std::clog << "warning: " << warnings_.back() << std::endl;
}

void SessionCore::open_segment() {
  Segment seg;
  seg.scenario = sim_.scenario();
  seg.scenario.initial = sim_.state();
  seg.scenario.pilot = ReplayPilotSpec{"commands.csv"};
  open_log_.clear();
  if (recording_) {
    char name[32];
    std::snprintf(name, sizeof name, "segment-%03zu", segments_.size());
    seg.dir = *cfg_.record_dir / name;
    std::error_code ec;
    fs::remove_all(seg.dir, ec);
    fs::create_directories(seg.dir, ec);
    trace_out_.open(seg.dir / "trace.csv", std::ios::binary | std::ios::trunc);
    trace_out_ << kTraceHeader << '\n';
    if (ec || !trace_out_) disable_recording((seg.dir / "trace.csv").string() + ": cannot write");
  }
  open_ = std::move(seg);
}

void SessionCore::close_segment() {
  if (!open_) return;
  Segment seg = std::move(*open_);
  open_.reset();
  if (seg.ticks == 0) {
    // nothing happened under these settings; drop the empty directory
    trace_out_.close();
    if (!seg.dir.empty()) {
      std::error_code ec;
      fs::remove_all(seg.dir, ec);
    }
    return;
  }
  seg.scenario.duration = static_cast<double>(seg.ticks) * seg.scenario.dt;
  if (recording_) {
    trace_out_.close();
    try {
      if (trace_out_.fail()) throw Error(ErrorCode::Io, (seg.dir / "trace.csv").string());
      write_command_log(seg.dir / "commands.csv", open_log_);
      save_scenario(seg.scenario, seg.dir / "scenario.json");
    } catch (const Error& e) {
      disable_recording(e.detail());
    }
  }
  if (cfg_.keep_trace) seg.commands = open_log_;
  open_log_.clear();
  segments_.push_back(std::move(seg));
}

void SessionCore::restart(const ConfigMessage& msg) {
  BlimpState start = msg.reset ? cfg_.scenario.initial : sim_.state();
  start.t = sim_.now();
  const bool assist = msg.assist.value_or(sim_.scenario().assist);
  close_segment();
  sim_.restart(start, assist);
  open_segment();
}

std::optional<StateMessage> SessionCore::tick(const std::vector<Ingress>& inputs) {
  std::optional<ConfigMessage> config;
  std::optional<PilotCommand> command;
  for (const Ingress& in : inputs) {
    if (const auto* c = std::get_if<ConfigMessage>(&in)) {
      if (!config) config = ConfigMessage{};
      if (c->assist) config->assist = c->assist;
      config->reset = config->reset || c->reset;
      command.reset();
    } else {
      command = std::get<PilotCommand>(in);
    }
  }
  if (config) restart(*config);
  if (command) {
    // stamped with the tick that applies it so a replay issues it on the same tick
    command = clamp_command(*command);
    command->t_issued = sim_.now();
    open_log_.push_back(*command);
  }

  const TraceRecord rec = sim_.tick(command);
  if (!is_finite(sim_.state())) {
    throw Error(ErrorCode::ModelRegionViolation, "non-finite state at t=" + format_fixed(rec.t, 6));
  }
  ++ticks_;
  ++open_->ticks;
  if (recording_) {
    trace_out_ << format_trace_row(rec);
    if (!trace_out_) disable_recording((open_->dir / "trace.csv").string() + ": write failed");
  }
  if (cfg_.keep_trace) open_->trace.records.push_back(rec);

  if ((ticks_ - 1) % telemetry_every_ != 0) return std::nullopt;
  return make_state_message(sim_.state(), sim_.tick_index(), rec.mode, sim_.scenario().assist);
}

void SessionCore::finish() { close_segment(); }

// --- network front end ----------------------------------------------------

namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

constexpr std::size_t kMaxIngress = 4096;

}  // namespace

class Session::Impl {
 public:
  class Client;
  class HttpConnection;

  explicit Impl(SessionConfig cfg);
  ~Impl() { stop(); }

  void start();
  void request_stop();
  void stop();
  void wait();
  bool wait_for(std::chrono::milliseconds timeout);

  // network thread
  std::optional<std::string> handle_frame(const std::string& text);
  http::response<http::string_body> respond(const http::request<http::string_body>& req) const;
  void attach(const std::shared_ptr<Client>& c);
  void detach(const Client* c);

  SessionConfig cfg_;
  std::string config_body_;
  SessionCore core_;

  net::io_context ioc_;
  tcp::acceptor acceptor_;
  std::optional<net::signal_set> signals_;
  std::uint16_t port_ = 0;
  std::thread net_thread_;
  std::thread loop_thread_;

  std::mutex ingress_mutex_;
  std::vector<Ingress> ingress_;

  std::vector<std::shared_ptr<Client>> clients_;
  // every client ever accepted, for the final teardown after the network
  // thread has exited
  std::vector<std::weak_ptr<Client>> accepted_;
  std::atomic<std::size_t> client_count_{0};
  std::atomic<std::int64_t> ticks_{0};
  std::atomic<double> now_{0.0};
  std::atomic<bool> assist_{true};
  std::chrono::steady_clock::time_point loop_start_;
  std::atomic<bool> loop_started_{false};

  mutable std::mutex state_mutex_;
  std::condition_variable cv_;
  bool started_ = false;
  bool stop_requested_ = false;
  bool loop_done_ = false;
  bool stopped_ = false;
  std::optional<Error> failure_;

 private:
  void do_accept();
  void loop();
  void broadcast(std::string frame);
  void close_clients();
};

class Session::Impl::Client : public std::enable_shared_from_this<Client> {
 public:
  Client(tcp::socket&& socket, Impl& owner)
      : ws_(std::move(socket)), owner_(owner), backlog_(owner.cfg_.max_backlog) {}

  void accept(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&Client::on_accept, shared_from_this()));
  }

  void send(Backlog::Frame frame) {
    if (closing_ || dropped_) return;
    if (!backlog_.push(std::move(frame))) {
      abort();
      return;
    }
    if (!writing_) do_write();
  }

  /// Flushes what is queued, then closes with a normal close frame.
  void close() {
    if (closing_ || dropped_) return;
    closing_ = true;
    if (!writing_) do_close();
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    owner_.attach(shared_from_this());
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&Client::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      drop();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    if (auto reply = owner_.handle_frame(text)) send(std::make_shared<const std::string>(*reply));
    do_read();
  }

  void do_write() {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(*backlog_.front()),
                    beast::bind_front_handler(&Client::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    writing_ = false;
    if (ec) {
      drop();
      return;
    }
    backlog_.pop();
    if (dropped_) return;
    if (!backlog_.empty()) {
      do_write();
    } else if (closing_) {
      do_close();
    }
  }

  void do_close() {
    ws_.async_close(websocket::close_code::normal,
                    [self = shared_from_this()](beast::error_code) { self->drop(); });
  }

 public:
  /// Closes the socket without a handshake.
  void abort() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws_).socket().close(ec);
    drop();
  }

 private:
  void drop() {
    if (dropped_) return;
    dropped_ = true;
    owner_.detach(this);
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  Impl& owner_;
  Backlog backlog_;
  bool writing_ = false;
  bool closing_ = false;
  bool dropped_ = false;
};

class Session::Impl::HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket&& socket, Impl& owner) : stream_(std::move(socket)), owner_(owner) {}

  void run() { do_read(); }

 private:
  void do_read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (websocket::is_upgrade(req_) && req_.target() == "/pilot") {
      stream_.expires_never();
      std::make_shared<Client>(stream_.release_socket(), owner_)->accept(std::move(req_));
      return;
    }
    res_ = std::make_shared<http::response<http::string_body>>(owner_.respond(req_));
    http::async_write(stream_, *res_,
                      beast::bind_front_handler(&HttpConnection::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec || res_->need_eof()) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    do_read();
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  std::shared_ptr<http::response<http::string_body>> res_;
  Impl& owner_;
};

Session::Impl::Impl(SessionConfig cfg)
    : cfg_(std::move(cfg)), config_body_(describe(cfg_)), core_(cfg_), acceptor_(ioc_) {
  assist_ = cfg_.scenario.assist;
  beast::error_code ec;
  net::ip::address address = net::ip::make_address(cfg_.address, ec);
  if (ec) throw Error(ErrorCode::InvalidScenario, "address: '" + cfg_.address + "'");
  const tcp::endpoint endpoint(address, cfg_.port);
  acceptor_.open(endpoint.protocol(), ec);
  if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) acceptor_.bind(endpoint, ec);
  if (ec == net::error::address_in_use) {
    throw Error(ErrorCode::PortInUse, cfg_.address + ":" + std::to_string(cfg_.port));
  }
  if (!ec) acceptor_.listen(net::socket_base::max_listen_connections, ec);
  if (ec) throw Error(ErrorCode::Io, "listen on " + cfg_.address + ": " + ec.message());
  port_ = acceptor_.local_endpoint().port();
  if (cfg_.handle_signals) {
    signals_.emplace(ioc_, SIGINT, SIGTERM);
    signals_->async_wait([this](beast::error_code err, int) {
      if (!err) request_stop();
    });
  }
}

void Session::Impl::start() {
  {
    std::lock_guard lock(state_mutex_);
    if (started_) return;
    started_ = true;
  }
  do_accept();
  net_thread_ = std::thread([this] { ioc_.run(); });
  loop_thread_ = std::thread([this] { loop(); });
}

void Session::Impl::do_accept() {
  acceptor_.async_accept(ioc_, [this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<HttpConnection>(std::move(socket), *this)->run();
    do_accept();
  });
}

void Session::Impl::loop() {
  using clock = std::chrono::steady_clock;
  const std::chrono::duration<double> period(1.0 / cfg_.tick_rate);
  loop_start_ = clock::now();
  loop_started_ = true;
  for (std::int64_t k = 0;; ++k) {
    // absolute deadlines: a late tick is followed by catch-up ticks, so the
    // count never drifts from rate * elapsed
    const auto deadline = loop_start_ + std::chrono::duration_cast<clock::duration>(k * period);
    {
      std::unique_lock lock(state_mutex_);
      if (cv_.wait_until(lock, deadline, [this] { return stop_requested_; })) break;
    }
    std::vector<Ingress> inputs;
    {
      std::lock_guard lock(ingress_mutex_);
      inputs.swap(ingress_);
    }
    try {
      const std::optional<StateMessage> telemetry = core_.tick(inputs);
      now_ = core_.now();
      assist_ = core_.assist();
      ticks_ = core_.ticks();
      if (telemetry) broadcast(encode(*telemetry));
    } catch (const Error& e) {
      {
        std::lock_guard lock(state_mutex_);
        failure_ = e;
      }
      std::clog << "error: session terminated: " << to_string(e.code()) << ": " << e.detail()
                << std::endl;
      broadcast(encode(ErrorMessage{to_string(e.code()), e.detail()}));
      break;
    }
  }
  try {
    core_.finish();
  } catch (const std::exception& e) {
    std::clog << "warning: " << e.what() << std::endl;
  }
  close_clients();
  {
    std::lock_guard lock(state_mutex_);
    loop_done_ = true;
  }
  cv_.notify_all();
}

void Session::Impl::broadcast(std::string frame) {
  auto msg = std::make_shared<const std::string>(std::move(frame));
  net::post(ioc_, [this, msg] {
    const auto snapshot = clients_;
    for (const auto& c : snapshot) c->send(msg);
  });
}

void Session::Impl::close_clients() {
  net::post(ioc_, [this] {
    beast::error_code ec;
    acceptor_.close(ec);
    const auto snapshot = clients_;
    for (const auto& c : snapshot) c->close();
  });
}

void Session::Impl::request_stop() {
  {
    std::lock_guard lock(state_mutex_);
    stop_requested_ = true;
  }
  cv_.notify_all();
}

void Session::Impl::stop() {
  {
    std::lock_guard lock(state_mutex_);
    if (stopped_) return;
    stopped_ = true;
    if (!started_) return;
  }
  request_stop();
  if (loop_thread_.joinable()) loop_thread_.join();
  // give clients a moment to receive the close frame
  const auto give_up = std::chrono::steady_clock::now() + std::chrono::seconds(1);
  while (client_count_ > 0 && std::chrono::steady_clock::now() < give_up) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ioc_.stop();
  if (net_thread_.joinable()) net_thread_.join();
  for (const auto& weak : accepted_) {
    if (const auto c = weak.lock()) c->abort();
  }
  accepted_.clear();
}

void Session::Impl::wait() {
  std::unique_lock lock(state_mutex_);
  cv_.wait(lock, [this] { return loop_done_ || (stopped_ && !started_); });
}

bool Session::Impl::wait_for(std::chrono::milliseconds timeout) {
  std::unique_lock lock(state_mutex_);
  return cv_.wait_for(lock, timeout, [this] { return loop_done_ || (stopped_ && !started_); });
}

std::optional<std::string> Session::Impl::handle_frame(const std::string& text) {
  try {
    const WireMessage msg = decode(text);
    if (const auto* cmd = std::get_if<CmdMessage>(&msg)) {
      const double t = now_;
      {
        std::lock_guard lock(ingress_mutex_);
        if (ingress_.size() >= kMaxIngress) {
          return encode(ErrorMessage{"MalformedMessage", "ingress queue full"});
        }
        ingress_.emplace_back(to_command(*cmd, t));
      }
      return encode(AckMessage{t, cmd->t_client});
    }
    if (const auto* config = std::get_if<ConfigMessage>(&msg)) {
      std::lock_guard lock(ingress_mutex_);
      ingress_.emplace_back(*config);
      return std::nullopt;
    }
    return encode(ErrorMessage{"MalformedMessage", "clients may only send cmd or config"});
  } catch (const Error& e) {
    return encode(ErrorMessage{to_string(e.code()), e.detail()});
  }
}

http::response<http::string_body> Session::Impl::respond(
    const http::request<http::string_body>& req) const {
  http::response<http::string_body> res;
  res.version(req.version());
  res.keep_alive(req.keep_alive());
  res.set(http::field::content_type, "application/json");
  res.set(http::field::access_control_allow_origin, "*");
  const auto target = req.target();
  if (req.method() != http::verb::get) {
    res.result(http::status::method_not_allowed);
    res.body() = R"({"error":"method not allowed"})";
  } else if (target == "/health") {
    const json body = {{"status", "ok"},
                       {"ticks", ticks_.load()},
                       {"clients", client_count_.load()},
                       {"t", now_.load()},
                       {"assist", assist_ ? "on" : "off"}};
    res.result(http::status::ok);
    res.body() = body.dump();
  } else if (target == "/config") {
    res.result(http::status::ok);
    res.body() = config_body_;
  } else {
    res.result(http::status::not_found);
    res.body() = R"({"error":"not found"})";
  }
  res.prepare_payload();
  return res;
}

void Session::Impl::attach(const std::shared_ptr<Client>& c) {
  clients_.push_back(c);
  std::erase_if(accepted_, [](const std::weak_ptr<Client>& w) { return w.expired(); });
  accepted_.push_back(c);
  client_count_ = clients_.size();
}

void Session::Impl::detach(const Client* c) {
  std::erase_if(clients_, [c](const std::shared_ptr<Client>& p) { return p.get() == c; });
  client_count_ = clients_.size();
}

// --- Session --------------------------------------------------------------

Session::Session(SessionConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}
Session::~Session() = default;

void Session::start() { impl_->start(); }
void Session::stop() { impl_->stop(); }
void Session::wait() { impl_->wait(); }
bool Session::wait_for(std::chrono::milliseconds timeout) { return impl_->wait_for(timeout); }

std::uint16_t Session::port() const { return impl_->port_; }
std::int64_t Session::ticks() const { return impl_->ticks_; }
std::size_t Session::clients() const { return impl_->client_count_; }

double Session::elapsed() const {
  if (!impl_->loop_started_) return 0.0;
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - impl_->loop_start_).count();
}

std::optional<Error> Session::failure() const {
  std::lock_guard lock(impl_->state_mutex_);
  return impl_->failure_;
}

std::vector<Segment> Session::segments() const { return impl_->core_.segments(); }
std::vector<std::string> Session::warnings() const { return impl_->core_.warnings(); }

}  // namespace blimpassist
