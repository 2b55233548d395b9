#ifndef MBT_APP_SERVER_HPP_
#define MBT_APP_SERVER_HPP_

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>

#include "mbt/app/teleop.hpp"

namespace mbt::app {

struct ServerOptions {
  std::string address = "0.0.0.0";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path static_dir = "ui";
  int max_pending_frames = 8;
  double tick_hz = 50.0;  // simulation loop rate; 0 leaves ticking to the caller
};

// Serves the UI files over HTTP and streams frames on the /ws websocket.
// Every text message received on a socket is handed to the session; every
// tick's frame goes to every connected socket. One network thread and one
// simulation thread.
class TeleopServer {
 public:
  TeleopServer(TeleopSession& session, ServerOptions options);
  ~TeleopServer();
  TeleopServer(const TeleopServer&) = delete;
  TeleopServer& operator=(const TeleopServer&) = delete;

  // Binds and starts both threads. Throws ConfigError when the port is taken.
  void Start();
  void Stop();
  // Blocks until Stop is called from another thread or a signal arrives.
  void Wait();

  int port() const;  // the bound port once started
  int clients() const;
  long ticks() const;
  long frames_dropped() const;

  // Advances the session once and broadcasts the frame (tick_hz == 0).
  void TickOnce();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Content type for a file name, by extension.
std::string MimeType(const std::string& path);

// Maps a request target onto a file below `root`; empty when the target is
// malformed or tries to leave the directory.
std::filesystem::path ResolveStaticPath(const std::filesystem::path& root,
                                        const std::string& target);

}  // namespace mbt::app

#endif  // MBT_APP_SERVER_HPP_
