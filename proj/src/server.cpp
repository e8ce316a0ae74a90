#include "anthro/service.hpp"

#include "anthro/errors.hpp"

#include <httplib.h>

#include <csignal>
#include <thread>

namespace anthro {

struct HttpServer::Impl {
    const Catalog& cat;
    httplib::Server svr;
    std::thread listener;

    explicit Impl(const Catalog& c) : cat(c)
    {
        auto handler = [this](const httplib::Request& req, httplib::Response& res) {
            ApiRequest r;
            r.method = req.method;
            r.path = req.path;
            r.body = req.body;
            for (const auto& [k, v] : req.params) r.params.emplace(k, v);
            const ApiResponse out = handle_api(cat, r);
            res.status = out.status;
            res.set_content(out.body, out.content_type);
        };
        svr.Get(R"(/.*)", handler);
        svr.Post(R"(/.*)", handler);
        svr.Put(R"(/.*)", handler);
        svr.Delete(R"(/.*)", handler);
    }
};

HttpServer::HttpServer(const Catalog& cat) : impl_(std::make_unique<Impl>(cat)) {}

HttpServer::~HttpServer()
{
    stop();
    wait();
}

int HttpServer::start(const std::string& bind)
{
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos) throw InvalidArgument("bind address must be host:port, got '" + bind + "'");
    const std::string host = bind.substr(0, colon);
    int port = 0;
    if (!parse_int(bind.substr(colon + 1), port) || port < 0 || port > 65535)
        throw InvalidArgument("invalid port in '" + bind + "'");
    if (port == 0) {
        port = impl_->svr.bind_to_any_port(host);
        if (port <= 0) throw BindError("cannot bind " + host);
    } else if (!impl_->svr.bind_to_port(host, port)) {
        throw BindError("cannot bind " + bind);
    }
    impl_->listener = std::thread([this] { impl_->svr.listen_after_bind(); });
    return port;
}

void HttpServer::stop()
{
    if (impl_->svr.is_running() || impl_->listener.joinable()) impl_->svr.stop();
}

void HttpServer::wait()
{
    if (impl_->listener.joinable()) impl_->listener.join();
}

void serve_until_signal(const Catalog& cat, const std::string& bind, const std::function<void(int)>& on_ready)
{
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    HttpServer server(cat);
    const int port = server.start(bind);
    if (on_ready) on_ready(port);
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
    server.wait();
    pthread_sigmask(SIG_UNBLOCK, &set, nullptr);
}

} // namespace anthro
