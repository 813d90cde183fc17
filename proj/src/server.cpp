#include "hop/runtime.hpp"

#include <thread>

// After the Eigen headers: <resolv.h> defines a `_res` macro that clashes with them.
#include <httplib.h>

namespace hop {

struct ServiceHandle::Impl {
  httplib::Server server;
  std::thread thread;
};

namespace {

void send(httplib::Response& res, const HttpReply& reply) {
  res.status = reply.status;
  for (const auto& [k, v] : reply.headers) res.set_header(k, v);
  res.set_content(reply.body, reply.contentType);
}

}  // namespace

ServiceHandle::ServiceHandle(MotionService& service, const std::string& host, int port) : m_impl(std::make_unique<Impl>()) {
  httplib::Server& srv = m_impl->server;

  srv.Get("/motions", [&service](const httplib::Request&, httplib::Response& res) { send(res, service.listMotions()); });
  srv.Get(R"(/motions/([^/]+))", [&service](const httplib::Request& req, httplib::Response& res) {
    send(res, service.getMotion(req.matches[1]));
  });
  srv.Put(R"(/motions/([^/]+))", [&service](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> ifMatch;
    if (req.has_header("If-Match")) ifMatch = req.get_header_value("If-Match");
    send(res, service.putMotion(req.matches[1], req.body, ifMatch));
  });
  srv.Post("/preview", [&service](const httplib::Request& req, httplib::Response& res) { send(res, service.preview(req.body)); });
  srv.Get("/model", [&service](const httplib::Request&, httplib::Response& res) { send(res, service.model()); });
  srv.Post("/simulate", [&service](const httplib::Request& req, httplib::Response& res) {
    auto scenario = std::make_shared<Scenario>();
    const HttpReply check = service.prepareSimulation(req.body, *scenario);
    if (check.status != 200) {
      send(res, check);
      return;
    }
    res.set_chunked_content_provider("text/csv", [&service, scenario](std::size_t, httplib::DataSink& sink) {
      try {
        runScenario(*scenario, service.resources(), [&sink](std::string_view chunk) {
          if (!sink.write(chunk.data(), chunk.size())) throw std::runtime_error("client went away");
        });
      } catch (const std::exception&) {
        // A truncated stream tells the client the run did not finish.
        return false;
      }
      sink.done();
      return true;
    });
  });

  if (port == 0) {
    m_port = srv.bind_to_any_port(host);
  } else {
    if (!srv.bind_to_port(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    m_port = port;
  }
  if (m_port <= 0) throw std::runtime_error("cannot bind " + host);
  m_impl->thread = std::thread([this] { m_impl->server.listen_after_bind(); });
  m_impl->server.wait_until_ready();
}

ServiceHandle::~ServiceHandle() { stop(); }

void ServiceHandle::stop() {
  if (!m_impl) return;
  m_impl->server.stop();
  if (m_impl->thread.joinable()) m_impl->thread.join();
}

void ServiceHandle::wait() {
  if (m_impl && m_impl->thread.joinable()) m_impl->thread.join();
}

}  // namespace hop
