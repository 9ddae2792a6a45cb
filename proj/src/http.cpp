#include <httplib.h>

#include "metaglyph/service.hpp"

namespace metaglyph::service {

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidRequest, "request body is not valid JSON", e.what());
  }
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_json(res, http_status(e.code()), error_body(e));
    } catch (const nlohmann::json::exception& e) {
      send_json(res, 400, error_body(Error(ErrorCode::InvalidRequest, "malformed request field", e.what())));
    } catch (const std::exception& e) {
      send_json(res, 500, error_body(Error(ErrorCode::Internal, e.what())));
    }
  };
}

}  // namespace

void install_routes(httplib::Server& server, Service& service) {
  const std::string origin = service.config().cors_origin;
  server.set_default_headers({{"Access-Control-Allow-Origin", origin},
                              {"Access-Control-Allow-Methods", "GET, POST, PATCH, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Expose-Headers", "Content-Disposition"}});
  server.set_payload_max_length(service.config().max_upload_bytes + (1u << 16));

  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  });

  server.Post("/sessions", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                std::string bytes, name;
                if (req.is_multipart_form_data()) {
                  if (!req.has_file("file")) throw Error(ErrorCode::InvalidRequest, "multipart field 'file' missing");
                  const auto f = req.get_file_value("file");
                  bytes = f.content;
                  name = f.filename;
                } else {
                  bytes = req.body;
                  name = req.has_param("name") ? req.get_param_value("name") : "dataset.csv";
                }
                if (req.has_param("name")) name = req.get_param_value("name");
                send_json(res, 201, service.create_session(bytes, name));
              }));

  server.Post(R"(/sessions/([0-9a-f]+)/generate)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, service.generate(req.matches[1], parse_body(req)));
              }));

  server.Get(R"(/sessions/([0-9a-f]+)/results)",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, service.results(req.matches[1]));
             }));

  server.Patch(R"(/sessions/([0-9a-f]+)/mappings)",
               guarded([&service](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, 200, service.edit_mappings(req.matches[1], parse_body(req)));
               }));

  server.Post(R"(/sessions/([0-9a-f]+)/groups)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, service.set_groups(req.matches[1], parse_body(req)));
              }));

  server.Get(R"(/sessions/([0-9a-f]+)/results/([A-Za-z0-9_-]+)/export)",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               const std::string format = req.has_param("format") ? req.get_param_value("format") : "svg";
               auto out = service.export_result(req.matches[1], req.matches[2], format);
               res.status = 200;
               res.set_header("Content-Disposition", "attachment; filename=\"" + out.filename + "\"");
               res.set_content(std::move(out.body), out.content_type);
             }));

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404)
      send_json(res, 404, error_body(Error(ErrorCode::InvalidRequest, "no such route")));
  });
}

}  // namespace metaglyph::service
