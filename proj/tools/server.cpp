#include "server.hpp"

#include <httplib.h>

#include <iostream>

namespace procaware::tool {

bool serve_http(SessionManager& sessions, std::string const& host, int port,
                std::optional<std::filesystem::path> const& ui_dir) {
    httplib::Server server;

    auto dispatch = [&](httplib::Request const& req, httplib::Response& res) {
        QueryParams query;
        for (auto const& [k, v] : req.params) query.emplace(k, v);
        auto out = sessions.handle(req.method, req.path, query, req.body);
        res.status = out.status;
        res.set_content(out.body, out.content_type);
    };
    for (auto const* pattern : {R"(/sessions.*)", R"(/health)"}) {
        server.Get(pattern, dispatch);
        server.Post(pattern, dispatch);
        server.Put(pattern, dispatch);
        server.Delete(pattern, dispatch);
    }
    server.Options(R"(.*)", [](httplib::Request const&, httplib::Response& res) { res.status = 204; });
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    if (ui_dir && !server.set_mount_point("/", ui_dir->string())) {
        std::cerr << "serve: UI directory " << *ui_dir << " not found\n";
        return false;
    }

    if (!server.bind_to_port(host, port)) return false;
    std::cout << "listening on http://" << host << ":" << port << std::endl;
    return server.listen_after_bind();
}

}  // namespace procaware::tool
