// Copyright 2026 The armsizer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// HTTP + WebSocket transport (Boost.Beast) over service::route.
//
// Each accepted connection is served on the io_context threads. A
// websocket subscriber gets its own pump thread that blocks on the
// session subscription and hands frames to the socket strand.

#pragma once

#include <armsizer/service/routes.hpp>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/version.hpp>
#include <boost/beast/websocket.hpp>

#include <iostream>

namespace armsizer::service {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace detail {

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, std::shared_ptr<Subscription> sub)
      : ws_(std::move(socket)), sub_(std::move(sub)) {}

  ~WsSession() {
    sub_->close();
    if (pump_.joinable()) pump_.join();
  }

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    std::weak_ptr<WsSession> weak = shared_from_this();
    auto sub = sub_;
    auto executor = ws_.get_executor();
    pump_ = std::thread([weak, sub, executor] {
      while (!sub->closed()) {
        auto e = sub->pop(std::chrono::milliseconds(100));
        if (!e || sub->closed()) continue;
        auto text = std::make_shared<std::string>(e->envelope().dump());
        net::post(executor, [weak, text] {
          if (auto self = weak.lock()) self->enqueue(text);
        });
      }
    });
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      sub_->close();
      return;
    }
    buffer_.consume(buffer_.size());  // client messages are ignored
    do_read();
  }

  void enqueue(const std::shared_ptr<std::string>& text) {
    outbox_.push_back(text);
    if (outbox_.size() == 1) do_write();
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(*outbox_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      sub_->close();
      return;
    }
    outbox_.pop_front();
    if (!outbox_.empty()) do_write();
  }

  websocket::stream<beast::tcp_stream> ws_;
  std::shared_ptr<Subscription> sub_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<std::string>> outbox_;
  std::thread pump_;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Engine& engine) : stream_(std::move(socket)), engine_(engine) {}

  void run() {
    net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
  }

 private:
  void do_read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;
    const std::string target(req_.target());
    if (websocket::is_upgrade(req_)) {
      const auto id = events_session(target);
      std::shared_ptr<Subscription> sub;
      try {
        if (!id.empty()) sub = engine_.subscribe(id);
      } catch (const Error&) {
      }
      if (!sub) {
        send(error_response(404, "not_found", "no event stream at " + target));
        return;
      }
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), std::move(sub))->run(std::move(req_));
      return;
    }
    send(route(engine_, std::string(req_.method_string()), target, req_.body()));
  }

  void send(const Response& r) {
    auto res = std::make_shared<http::response<http::string_body>>(static_cast<http::status>(r.status), req_.version());
    res->set(http::field::server, kEngineVersion);
    res->set(http::field::content_type, r.content_type);
    res->set(http::field::access_control_allow_origin, "*");
    res->keep_alive(req_.keep_alive());
    res->body() = r.body;
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!res->keep_alive()) {
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
        return;
      }
      self->do_read();
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  Engine& engine_;
};

}  // namespace detail

/// Listens on address:port and serves until stop(). port 0 picks a free
/// port, available from port() after start().
class HttpServer {
 public:
  HttpServer(Engine& engine, const std::string& address, unsigned short port, int threads = 2)
      : engine_(engine), acceptor_(ioc_), threads_(std::max(1, threads)) {
    const tcp::endpoint ep(net::ip::make_address(address), port);
    acceptor_.open(ep.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen(net::socket_base::max_listen_connections);
  }

  ~HttpServer() { stop(); }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }

  void start() {
    do_accept();
    for (int i = 0; i < threads_; ++i) pool_.emplace_back([this] { ioc_.run(); });
  }

  /// Runs on the calling thread until stop() is called from elsewhere.
  void run() {
    do_accept();
    for (int i = 1; i < threads_; ++i) pool_.emplace_back([this] { ioc_.run(); });
    ioc_.run();
  }

  /// SIGINT/SIGTERM end run().
  void stop_on_signals() {
    signals_.add(SIGINT);
    signals_.add(SIGTERM);
    signals_.async_wait([this](beast::error_code ec, int) {
      if (!ec) ioc_.stop();
    });
  }

  void stop() {
    ioc_.stop();
    for (auto& t : pool_) {
      if (t.joinable()) t.join();
    }
    pool_.clear();
  }

 private:
  void do_accept() {
    acceptor_.async_accept(net::make_strand(ioc_), [this](beast::error_code ec, tcp::socket socket) {
      if (!ec) std::make_shared<detail::HttpSession>(std::move(socket), engine_)->run();
      if (acceptor_.is_open()) do_accept();
    });
  }

  Engine& engine_;
  net::io_context ioc_;
  tcp::acceptor acceptor_;
  net::signal_set signals_{ioc_};
  int threads_;
  std::vector<std::thread> pool_;
};

}  // namespace armsizer::service
