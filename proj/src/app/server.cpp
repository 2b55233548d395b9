#include "mbt/app/server.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "mbt/common/errors.hpp"

namespace mbt::app {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

std::string MimeType(const std::string& path) {
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript; charset=utf-8";
  if (ext == ".css") return "text/css; charset=utf-8";
  if (ext == ".json" || ext == ".map") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".wasm") return "application/wasm";
  if (ext == ".txt") return "text/plain; charset=utf-8";
  return "application/octet-stream";
}

std::filesystem::path ResolveStaticPath(const std::filesystem::path& root,
                                        const std::string& target) {
  std::string t = target.substr(0, target.find_first_of("?#"));
  if (t.empty() || t[0] != '/' || t.find('\0') != std::string::npos ||
      t.find('\\') != std::string::npos) {
    return {};
  }
  std::filesystem::path rel;
  size_t pos = 1;
  while (pos <= t.size()) {
    size_t next = t.find('/', pos);
    if (next == std::string::npos) next = t.size();
    const std::string part = t.substr(pos, next - pos);
    if (part == "..") return {};
    if (!part.empty() && part != ".") rel /= part;
    pos = next + 1;
  }
  std::filesystem::path full = root / rel;
  if (t.back() == '/' || rel.empty()) full /= "index.html";
  return full;
}

namespace {

class WsClient;

struct Shared {
  TeleopSession* session = nullptr;
  ServerOptions options;
  std::set<std::shared_ptr<WsClient>> clients;  // network thread only
  std::atomic<int> client_count{0};
  std::atomic<long> dropped{0};
};

class WsClient : public std::enable_shared_from_this<WsClient> {
 public:
  WsClient(tcp::socket socket, Shared* shared) : ws_(std::move(socket)), shared_(shared) {}

  void Accept(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->shared_->clients.insert(self);
      self->shared_->client_count = static_cast<int>(self->shared_->clients.size());
      self->Read();
    });
  }

  // Network thread only.
  void Send(const std::shared_ptr<const std::string>& frame) {
    if (closed_) return;
    queue_.push_back(frame);
    // Keep the one being written; drop the oldest waiting frames.
    const size_t limit = static_cast<size_t>(std::max(1, shared_->options.max_pending_frames));
    while (queue_.size() > limit + (writing_ ? 1 : 0)) {
      queue_.erase(queue_.begin() + (writing_ ? 1 : 0));
      ++shared_->dropped;
    }
    if (!writing_) Write();
  }

  void Close() {
    if (closed_) return;
    closed_ = true;
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void Read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, size_t) {
      if (ec) {
        self->Drop();
        return;
      }
      if (self->ws_.got_text()) {
        self->shared_->session->Submit(beast::buffers_to_string(self->buffer_.data()));
      }
      self->buffer_.consume(self->buffer_.size());
      self->Read();
    });
  }

  void Write() {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(*queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, size_t) {
                      self->queue_.pop_front();
                      self->writing_ = false;
                      if (ec) {
                        self->Drop();
                        return;
                      }
                      if (!self->queue_.empty()) self->Write();
                    });
  }

  void Drop() {
    closed_ = true;
    shared_->clients.erase(shared_from_this());
    shared_->client_count = static_cast<int>(shared_->clients.size());
  }

  websocket::stream<beast::tcp_stream> ws_;
  Shared* shared_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  bool writing_ = false;
  bool closed_ = false;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket socket, Shared* shared)
      : stream_(std::move(socket)), shared_(shared) {}

  void Read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, size_t) {
                       if (ec) return;
                       self->Handle();
                     });
  }

 private:
  void Handle() {
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/ws") {
        stream_.expires_never();
        std::make_shared<WsClient>(stream_.release_socket(), shared_)->Accept(std::move(req_));
        return;
      }
      Reply(Text(http::status::not_found, "no websocket here\n"));
      return;
    }
    if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
      Reply(Text(http::status::method_not_allowed, "GET only\n"));
      return;
    }
    const std::filesystem::path file =
        ResolveStaticPath(shared_->options.static_dir, std::string(req_.target()));
    if (file.empty()) {
      Reply(Text(http::status::bad_request, "bad path\n"));
      return;
    }
    beast::error_code ec;
    http::file_body::value_type body;
    if (std::filesystem::is_regular_file(file)) body.open(file.c_str(), beast::file_mode::scan, ec);
    if (!std::filesystem::is_regular_file(file) || ec) {
      Reply(Text(http::status::not_found, "not found\n"));
      return;
    }
    const auto size = body.size();
    if (req_.method() == http::verb::head) {
      http::response<http::empty_body> res{http::status::ok, req_.version()};
      res.set(http::field::content_type, MimeType(file.string()));
      res.content_length(size);
      res.keep_alive(req_.keep_alive());
      Reply(std::move(res));
      return;
    }
    http::response<http::file_body> res{std::piecewise_construct, std::make_tuple(std::move(body)),
                                        std::make_tuple(http::status::ok, req_.version())};
    res.set(http::field::content_type, MimeType(file.string()));
    res.set(http::field::cache_control, "no-cache");
    res.content_length(size);
    res.keep_alive(req_.keep_alive());
    Reply(std::move(res));
  }

  http::response<http::string_body> Text(http::status status, std::string text) {
    http::response<http::string_body> res{status, req_.version()};
    res.set(http::field::content_type, "text/plain; charset=utf-8");
    res.body() = std::move(text);
    res.keep_alive(req_.keep_alive());
    res.prepare_payload();
    return res;
  }

  template <class Body>
  void Reply(http::response<Body>&& res) {
    auto sp = std::make_shared<http::response<Body>>(std::move(res));
    http::async_write(stream_, *sp,
                      [self = shared_from_this(), sp](beast::error_code ec, size_t) {
                        if (ec || !sp->keep_alive()) {
                          beast::error_code ignored;
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                          return;
                        }
                        self->Read();
                      });
  }

  beast::tcp_stream stream_;
  Shared* shared_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

struct TeleopServer::Impl {
  Shared shared;
  asio::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  std::thread net_thread;
  std::thread sim_thread;
  std::atomic<bool> running{false};
  std::atomic<long> ticks{0};
  std::mutex stop_mutex;
  std::condition_variable stop_cv;
  bool stopped = false;
  int port = 0;

  void Accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      std::make_shared<HttpConnection>(std::move(socket), &shared)->Read();
      Accept();
    });
  }

  void Broadcast(std::shared_ptr<const std::string> frame) {
    asio::post(ioc, [this, frame] {
      // Copy: Send may drop a client from the set on a synchronous error.
      auto clients = shared.clients;
      for (const auto& c : clients) c->Send(frame);
    });
  }

  void Tick() {
    nlohmann::json frame = shared.session->Tick();
    ++ticks;
    Broadcast(std::make_shared<const std::string>(frame.dump()));
  }

  void SimLoop() {
    using clock = std::chrono::steady_clock;
    const auto period = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(1.0 / shared.options.tick_hz));
    auto next = clock::now();
    while (running) {
      Tick();
      next += period;
      const auto now = clock::now();
      // Running late: skip ahead rather than burst to catch up.
      if (now > next + 5 * period) next = now;
      std::this_thread::sleep_until(next);
    }
  }
};

TeleopServer::TeleopServer(TeleopSession& session, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->shared.session = &session;
  impl_->shared.options = std::move(options);
}

TeleopServer::~TeleopServer() { Stop(); }

void TeleopServer::Start() {
  Impl& m = *impl_;
  if (m.running) throw UsageError("TeleopServer::Start called twice");
  beast::error_code ec;
  const auto address = asio::ip::make_address(m.shared.options.address, ec);
  if (ec) throw ConfigError("bad listen address '" + m.shared.options.address + "'");
  const tcp::endpoint endpoint(address, static_cast<unsigned short>(m.shared.options.port));
  m.acceptor.open(endpoint.protocol(), ec);
  if (!ec) m.acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) m.acceptor.bind(endpoint, ec);
  if (!ec) m.acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) {
    throw ConfigError("cannot listen on " + m.shared.options.address + ":" +
                      std::to_string(m.shared.options.port) + ": " + ec.message());
  }
  m.port = m.acceptor.local_endpoint().port();
  m.running = true;
  m.Accept();
  m.net_thread = std::thread([&m] { m.ioc.run(); });
  if (m.shared.options.tick_hz > 0.0) m.sim_thread = std::thread([&m] { m.SimLoop(); });
}

void TeleopServer::Stop() {
  Impl& m = *impl_;
  if (!m.running.exchange(false)) return;
  if (m.sim_thread.joinable()) m.sim_thread.join();
  asio::post(m.ioc, [&m] {
    beast::error_code ec;
    m.acceptor.close(ec);
    auto clients = m.shared.clients;
    for (const auto& c : clients) c->Close();
    m.shared.clients.clear();
    m.shared.client_count = 0;
  });
  // Give pending handlers a moment to unwind before the hard stop.
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  m.ioc.stop();
  if (m.net_thread.joinable()) m.net_thread.join();
  {
    std::lock_guard<std::mutex> lock(m.stop_mutex);
    m.stopped = true;
  }
  m.stop_cv.notify_all();
}

void TeleopServer::Wait() {
  Impl& m = *impl_;
  std::unique_lock<std::mutex> lock(m.stop_mutex);
  m.stop_cv.wait(lock, [&m] { return m.stopped; });
}

void TeleopServer::TickOnce() {
  if (!impl_->running) throw UsageError("TeleopServer::TickOnce before Start");
  impl_->Tick();
}

int TeleopServer::port() const { return impl_->port; }
int TeleopServer::clients() const { return impl_->shared.client_count; }
long TeleopServer::ticks() const { return impl_->ticks; }
long TeleopServer::frames_dropped() const { return impl_->shared.dropped; }

}  // namespace mbt::app
