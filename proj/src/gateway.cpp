#include "blobgate/gateway.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <functional>

#include "blobgate/digest.hpp"
#include "blobgate/snapshot.hpp"
#include "blobgate/textenc.hpp"

using nlohmann::json;

namespace blobgate {

namespace {

int status_for(Errc code) {
    switch (code) {
        case Errc::AuthFailed:
        case Errc::SessionExpired:
        case Errc::NoSuchSession:
            return 401;
        case Errc::NoSuchRole:
        case Errc::NoSuchUser:
        case Errc::NoSuchAssignment:
        case Errc::NoSuchTier:
        case Errc::NoSuchAccount:
        case Errc::NoSuchContainer:
        case Errc::NoSuchBlob:
            return 404;
        case Errc::DuplicateRoleName:
        case Errc::DuplicateUser:
        case Errc::DuplicateAssignment:
        case Errc::DuplicateTier:
        case Errc::DuplicateAccount:
        case Errc::DuplicateContainer:
        case Errc::CardinalityExceeded:
        case Errc::SsdViolation:
        case Errc::DsdViolation:
        case Errc::CycleDetected:
        case Errc::ExistingViolation:
        case Errc::ContainerNotEmpty:
        case Errc::RoleNotAssigned:
            return 409;
        case Errc::BlockTooLarge:
        case Errc::BlobTooLarge:
        case Errc::AccountCapExceeded:
            return 413;
        case Errc::RangeOutOfBounds:
            return 416;
        case Errc::InvalidArgument:
        case Errc::InvalidName:
        case Errc::InvalidBlockId:
        case Errc::SizeNotAligned:
        case Errc::NotAligned:
        case Errc::MissingBlock:
            return 400;
        default:
            return 500;
    }
}

void set_error(httplib::Response& res, const Error& e) {
    res.status = status_for(e.code());
    res.set_content(json{{"error", e.name()}, {"detail", e.what()}}.dump(),
                    "application/json");
}

std::string bearer_token(const httplib::Request& req) {
    auto auth = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (auth.rfind(prefix, 0) != 0) return {};
    return auth.substr(prefix.size());
}

// "bytes start-end" (inclusive) from Content-Range
std::optional<std::pair<std::uint64_t, std::uint64_t>> parse_content_range(
    const std::string& value) {
    constexpr std::string_view prefix = "bytes ";
    if (value.rfind(prefix, 0) != 0) return std::nullopt;
    auto rest = value.substr(prefix.size());
    auto dash = rest.find('-');
    if (dash == std::string::npos || dash == 0) return std::nullopt;
    try {
        return {{std::stoull(rest.substr(0, dash)), std::stoull(rest.substr(dash + 1)) + 1}};
    } catch (...) {
        return std::nullopt;
    }
}

json parse_body(const httplib::Request& req) {
    try {
        return req.body.empty() ? json::object() : json::parse(req.body);
    } catch (const json::exception&) {
        throw Error(Errc::InvalidArgument, "malformed request body");
    }
}

std::optional<std::uint64_t> optional_u64(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::uint64_t>();
}

Permission parse_permission_or_throw(const json& body) {
    std::string text = body.at("action").get<std::string>() + " " +
                       body.at("scope").get<std::string>();
    auto p = Permission::parse(text);
    if (!p) throw Error(Errc::InvalidArgument, "bad permission: " + text);
    return *p;
}

const char* kAccountRe = "([a-z0-9]{3,24})";
const char* kContainerRe = "([a-z0-9](?:[a-z0-9\\-]{1,61})[a-z0-9])";

}  // namespace

Gateway::Gateway(const ServerConfig& config, const Clock& clock)
    : config_(config),
      clock_(clock),
      policy_(clock, config.session_ttl_seconds),
      store_(BlobStoreConfig{config.data_dir, config.max_block_size, config.block_blob_cap,
                             config.page_blob_cap, config.default_account_cap}),
      quota_(
          QuotaEngine::Hooks{
              [this](const std::string& u) { return policy_.user_exists(u); },
              [this](const std::string& u) { return policy_.assignment_quotas(u); },
              [this](const std::string& u) { return policy_.max_tier_multiplier(u); }},
          config.quota_window_seconds),
      audit_(config.audit_log.string()),
      server_(std::make_unique<httplib::Server>()) {
    setup_routes();
}

Gateway::~Gateway() { stop(); }

void Gateway::load_state() {
    if (std::filesystem::exists(config_.snapshot_file)) {
        SnapshotData snap = load_snapshot(config_.snapshot_file);
        policy_.import_state(snap.policy);
        quota_.import_overrides(snap.quota_overrides);
        store_.restore_accounts(snap.accounts);
    } else {
        store_.restore_accounts({});
    }
    if (!config_.admin_credential.empty() && !policy_.user_exists(config_.admin_user)) {
        policy_.create_user(config_.admin_user, "bootstrap administrator",
                            config_.admin_credential);
        for (Action a : {Action::Admin, Action::Read, Action::Write, Action::Delete,
                         Action::List, Action::CreateContainer, Action::DeleteContainer})
            policy_.grant_permission_to_user(config_.admin_user, Permission{a, {"*"}});
        // the bootstrap admin has no role assignments, which would derive a
        // zero quota; an explicit unbounded override keeps the data path usable
        quota_.set_user_quota_override(config_.admin_user,
                                       QuotaPolicy{std::nullopt, config_.quota_window_seconds});
        save_state();
    }
}

void Gateway::save_state() {
    SnapshotData snap;
    snap.policy = policy_.export_state();
    snap.quota_overrides = quota_.export_overrides();
    snap.accounts = store_.export_accounts();
    snap.saved_at = clock_.now_seconds();
    save_snapshot(config_.snapshot_file, snap);
}

bool Gateway::bind() {
    return server_->bind_to_port(config_.listen_address, config_.listen_port);
}

void Gateway::run() {
    snapshot_thread_ = std::thread([this] { snapshot_loop(); });
    server_->listen_after_bind();
}

int Gateway::start_background() {
    int port = server_->bind_to_any_port(config_.listen_address);
    if (port < 0) return -1;
    serve_thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port;
}

void Gateway::stop() {
    if (stopping_.exchange(true)) return;
    server_->stop();
    if (serve_thread_.joinable()) serve_thread_.join();
    if (snapshot_thread_.joinable()) snapshot_thread_.join();
}

void Gateway::snapshot_loop() {
    using namespace std::chrono_literals;
    auto last = std::chrono::steady_clock::now();
    while (!stopping_.load()) {
        std::this_thread::sleep_for(100ms);
        auto now = std::chrono::steady_clock::now();
        if (now - last >= std::chrono::seconds(config_.snapshot_interval_seconds)) {
            try {
                save_state();
            } catch (const std::exception&) {
                // periodic snapshot failure is retried next tick
            }
            last = now;
        }
    }
}

void Gateway::setup_routes() {
    auto& svr = *server_;

    // --- session context helpers -------------------------------------------

    auto audit_line = [this](const std::string& user, Action action, const Resource& resource,
                             const std::string& decision, const std::string& reason) {
        AuditRecord rec;
        rec.timestamp = clock_.now_seconds();
        rec.user = user.empty() ? "anonymous" : user;
        rec.action = action_name(action);
        rec.resource = resource.to_string();
        rec.decision = decision;
        rec.reason = reason;
        rec.request_id = random_token_hex(8);
        audit_.append(rec);
    };

    // The data-path pipeline. Step order is fixed: authenticate, authorize,
    // admit against the quota, execute, audit. 401/403/429 never reach the
    // store; execution failures refund the admitted transaction.
    auto data_path = [this, audit_line](const httplib::Request& req, httplib::Response& res,
                                        Action action, const Resource& resource,
                                        const std::function<void(httplib::Response&)>& exec) {
        std::string token = bearer_token(req);
        auto session = token.empty() ? std::optional<Session>{} : policy_.lookup_session(token);
        if (!session) {
            res.status = 401;
            res.set_content(json{{"error", "NoSession"}}.dump(), "application/json");
            audit_line("anonymous", action, resource, "Deny", "NoSession");
            return;
        }
        const std::string& user = session->user_id;
        Decision decision = policy_.check_access(token, action, resource);
        if (!decision.granted) {
            res.status = 403;
            res.set_content(json{{"error", decision_reason_name(decision.reason)}}.dump(),
                            "application/json");
            audit_line(user, action, resource, "Deny", decision_reason_name(decision.reason));
            return;
        }
        std::int64_t now = clock_.now_seconds();
        QuotaDecision q = quota_.record_and_check(user, now);
        if (!q.allowed) {
            res.status = 429;
            res.set_header("Retry-After", std::to_string(q.retry_after_seconds));
            res.set_content(json{{"error", "QuotaExhausted"},
                                 {"retry_after_seconds", q.retry_after_seconds}}.dump(),
                            "application/json");
            audit_line(user, action, resource, "Throttled", "QuotaExhausted");
            return;
        }
        res.set_header("x-quota-remaining",
                       q.remaining ? std::to_string(*q.remaining) : "unbounded");
        try {
            exec(res);
            audit_line(user, action, resource, "Grant", "OK");
        } catch (const Error& e) {
            quota_.refund(user, now);
            set_error(res, e);
            audit_line(user, action, resource, "Grant", e.name());
        }
    };

    // Admin pipeline: same authentication, Admin permission on the target
    // scope, no quota (admins must stay able to remediate a throttled user).
    auto admin_path = [this, audit_line](const httplib::Request& req, httplib::Response& res,
                                         const Resource& resource, bool mutating,
                                         const std::function<void(httplib::Response&)>& exec) {
        std::string token = bearer_token(req);
        auto session = token.empty() ? std::optional<Session>{} : policy_.lookup_session(token);
        if (!session) {
            res.status = 401;
            res.set_content(json{{"error", "NoSession"}}.dump(), "application/json");
            audit_line("anonymous", Action::Admin, resource, "Deny", "NoSession");
            return;
        }
        Decision decision = policy_.check_access(token, Action::Admin, resource);
        if (!decision.granted) {
            res.status = 403;
            res.set_content(json{{"error", "NoPermission"}}.dump(), "application/json");
            audit_line(session->user_id, Action::Admin, resource, "Deny", "NoPermission");
            return;
        }
        try {
            exec(res);
            audit_line(session->user_id, Action::Admin, resource, "Grant", "OK");
            if (mutating) save_state();
        } catch (const Error& e) {
            set_error(res, e);
            audit_line(session->user_id, Action::Admin, resource, "Grant", e.name());
        }
    };

    // --- auth ---------------------------------------------------------------

    svr.Post("/auth/sessions", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            json body = parse_body(req);
            std::set<std::string> roles;
            if (body.contains("roles"))
                for (const auto& r : body.at("roles")) roles.insert(r.get<std::string>());
            Session s = policy_.create_session(body.at("user").get<std::string>(),
                                               body.at("credential").get<std::string>(), roles);
            res.status = 201;
            res.set_content(json{{"token", s.id}, {"expires_at", s.expires_at}}.dump(),
                            "application/json");
        } catch (const Error& e) {
            set_error(res, e);
        } catch (const json::exception&) {
            set_error(res, Error(Errc::InvalidArgument, "user and credential required"));
        }
    });

    svr.Delete("/auth/sessions/current",
               [this](const httplib::Request& req, httplib::Response& res) {
                   policy_.revoke_session(bearer_token(req));
                   res.status = 204;
               });

    svr.Post("/auth/sessions/current/roles",
             [this](const httplib::Request& req, httplib::Response& res) {
                 try {
                     json body = parse_body(req);
                     policy_.activate_role(bearer_token(req), body.at("role").get<std::string>());
                     res.status = 204;
                 } catch (const Error& e) {
                     set_error(res, e);
                 } catch (const json::exception&) {
                     set_error(res, Error(Errc::InvalidArgument, "role required"));
                 }
             });

    svr.Delete("/auth/sessions/current/roles/([^/]+)",
               [this](const httplib::Request& req, httplib::Response& res) {
                   try {
                       policy_.deactivate_role(bearer_token(req), req.matches[1].str());
                       res.status = 204;
                   } catch (const Error& e) {
                       set_error(res, e);
                   }
               });

    // Read-only quota status for the calling session; consumes nothing.
    svr.Get("/quota", [this](const httplib::Request& req, httplib::Response& res) {
        auto session = policy_.lookup_session(bearer_token(req));
        if (!session) {
            res.status = 401;
            res.set_content(json{{"error", "NoSession"}}.dump(), "application/json");
            return;
        }
        UsageSnapshot u = quota_.usage(session->user_id, clock_.now_seconds());
        json j{{"user", session->user_id},
               {"count", u.count},
               {"window_start", u.window_start},
               {"window_seconds", u.window_seconds}};
        j["limit"] = u.limit ? json(*u.limit) : json(nullptr);
        j["remaining"] = u.limit ? json(*u.limit > u.count ? *u.limit - u.count : 0)
                                 : json(nullptr);
        res.set_content(j.dump(), "application/json");
    });

    // --- admin --------------------------------------------------------------

    svr.Post("/admin/accounts", [this, admin_path](const httplib::Request& req,
                                                   httplib::Response& res) {
        json body = parse_body(req);
        std::string name = body.value("name", "");
        admin_path(req, res, Resource::account(name), true, [&](httplib::Response& r) {
            store_.create_account(name, body.contains("cap_bytes")
                                            ? body.at("cap_bytes").get<std::uint64_t>()
                                            : config_.default_account_cap);
            r.status = 201;
            r.set_content(json{{"name", name}}.dump(), "application/json");
        });
    });

    svr.Post("/admin/users", [this, admin_path](const httplib::Request& req,
                                                httplib::Response& res) {
        json body = parse_body(req);
        admin_path(req, res, Resource::account("policy"), true, [&](httplib::Response& r) {
            policy_.create_user(body.at("id").get<std::string>(),
                                body.value("display_name", ""),
                                body.at("credential").get<std::string>());
            r.status = 201;
        });
    });

    svr.Post("/admin/roles", [this, admin_path](const httplib::Request& req,
                                                httplib::Response& res) {
        json body = parse_body(req);
        admin_path(req, res, Resource::account("policy"), true, [&](httplib::Response& r) {
            QuotaPolicy quota;
            quota.base_limit = optional_u64(body, "quota_limit");
            quota.window_seconds = body.value("quota_window", config_.quota_window_seconds);
            std::optional<std::uint32_t> max_members;
            if (auto m = optional_u64(body, "max_members"))
                max_members = static_cast<std::uint32_t>(*m);
            policy_.create_role(body.at("name").get<std::string>(), max_members, quota);
            r.status = 201;
        });
    });

    svr.Put("/admin/roles/([^/]+)/cardinality",
            [this, admin_path](const httplib::Request& req, httplib::Response& res) {
                json body = parse_body(req);
                admin_path(req, res, Resource::account("policy"), true,
                           [&](httplib::Response& r) {
                               std::optional<std::uint32_t> max_members;
                               if (auto m = optional_u64(body, "max_members"))
                                   max_members = static_cast<std::uint32_t>(*m);
                               policy_.set_role_cardinality(req.matches[1].str(), max_members);
                               r.status = 204;
                           });
            });

    svr.Post("/admin/assignments", [this, admin_path](const httplib::Request& req,
                                                      httplib::Response& res) {
        json body = parse_body(req);
        admin_path(req, res, Resource::account("policy"), true, [&](httplib::Response& r) {
            policy_.assign_user(body.at("user").get<std::string>(),
                                body.at("role").get<std::string>(),
                                body.value("tier", "basic"));
            r.status = 201;
        });
    });

    svr.Delete("/admin/assignments/([^/]+)/([^/]+)",
               [this, admin_path](const httplib::Request& req, httplib::Response& res) {
                   admin_path(req, res, Resource::account("policy"), true,
                              [&](httplib::Response& r) {
                                  policy_.revoke_user(req.matches[1].str(),
                                                      req.matches[2].str());
                                  r.status = 204;
                              });
               });

    svr.Post("/admin/permissions/role", [this, admin_path](const httplib::Request& req,
                                                           httplib::Response& res) {
        json body = parse_body(req);
        admin_path(req, res, Resource::account("policy"), true, [&](httplib::Response& r) {
            policy_.grant_permission_to_role(body.at("role").get<std::string>(),
                                             parse_permission_or_throw(body));
            r.status = 204;
        });
    });

    svr.Post("/admin/permissions/user", [this, admin_path](const httplib::Request& req,
                                                           httplib::Response& res) {
        json body = parse_body(req);
        admin_path(req, res, Resource::account("policy"), true, [&](httplib::Response& r) {
            policy_.grant_permission_to_user(body.at("user").get<std::string>(),
                                             parse_permission_or_throw(body));
            r.status = 204;
        });
    });

    svr.Post("/admin/hierarchy", [this, admin_path](const httplib::Request& req,
                                                    httplib::Response& res) {
        json body = parse_body(req);
        admin_path(req, res, Resource::account("policy"), true, [&](httplib::Response& r) {
            policy_.add_inheritance(body.at("senior").get<std::string>(),
                                    body.at("junior").get<std::string>());
            r.status = 204;
        });
    });

    svr.Post("/admin/ssd", [this, admin_path](const httplib::Request& req,
                                              httplib::Response& res) {
        json body = parse_body(req);
        admin_path(req, res, Resource::account("policy"), true, [&](httplib::Response& r) {
            policy_.add_ssd_pair(body.at("role1").get<std::string>(),
                                 body.at("role2").get<std::string>());
            r.status = 204;
        });
    });

    svr.Post("/admin/dsd", [this, admin_path](const httplib::Request& req,
                                              httplib::Response& res) {
        json body = parse_body(req);
        admin_path(req, res, Resource::account("policy"), true, [&](httplib::Response& r) {
            policy_.add_dsd_pair(body.at("role1").get<std::string>(),
                                 body.at("role2").get<std::string>());
            r.status = 204;
        });
    });

    svr.Post("/admin/tiers", [this, admin_path](const httplib::Request& req,
                                                httplib::Response& res) {
        json body = parse_body(req);
        admin_path(req, res, Resource::account("policy"), true, [&](httplib::Response& r) {
            policy_.define_tier(body.at("name").get<std::string>(),
                                body.at("multiplier").get<double>());
            r.status = 204;
        });
    });

    svr.Put("/admin/quotas/([^/]+)", [this, admin_path](const httplib::Request& req,
                                                        httplib::Response& res) {
        json body = parse_body(req);
        admin_path(req, res, Resource::account("policy"), true, [&](httplib::Response& r) {
            QuotaPolicy q;
            q.base_limit = optional_u64(body, "base_limit");
            q.window_seconds = body.value("window_seconds", config_.quota_window_seconds);
            quota_.set_user_quota_override(req.matches[1].str(), q);
            r.status = 204;
        });
    });

    svr.Delete("/admin/quotas/([^/]+)", [this, admin_path](const httplib::Request& req,
                                                           httplib::Response& res) {
        admin_path(req, res, Resource::account("policy"), true, [&](httplib::Response& r) {
            quota_.set_user_quota_override(req.matches[1].str(), std::nullopt);
            r.status = 204;
        });
    });

    svr.Get("/admin/quotas/([^/]+)", [this, admin_path](const httplib::Request& req,
                                                        httplib::Response& res) {
        admin_path(req, res, Resource::account("policy"), false, [&](httplib::Response& r) {
            UsageSnapshot u = quota_.usage(req.matches[1].str(), clock_.now_seconds());
            json j{{"count", u.count},
                   {"window_start", u.window_start},
                   {"window_seconds", u.window_seconds}};
            j["limit"] = u.limit ? json(*u.limit) : json(nullptr);
            r.set_content(j.dump(), "application/json");
        });
    });

    // --- data path: containers ----------------------------------------------

    std::string container_path = std::string("/") + kAccountRe + "/" + kContainerRe;
    std::string blob_path = container_path + "/(.+)";

    svr.Put(container_path, [this, data_path](const httplib::Request& req,
                                              httplib::Response& res) {
        std::string acct = req.matches[1].str(), cont = req.matches[2].str();
        data_path(req, res, Action::CreateContainer, Resource::container(acct, cont),
                  [&](httplib::Response& r) {
                      store_.create_container(acct, cont);
                      r.status = 201;
                  });
    });

    svr.Delete(container_path, [this, data_path](const httplib::Request& req,
                                                 httplib::Response& res) {
        std::string acct = req.matches[1].str(), cont = req.matches[2].str();
        bool force = req.get_param_value("force") == "true";
        data_path(req, res, Action::DeleteContainer, Resource::container(acct, cont),
                  [&](httplib::Response& r) {
                      store_.delete_container(acct, cont, force);
                      r.status = 204;
                  });
    });

    svr.Get(container_path, [this, data_path](const httplib::Request& req,
                                              httplib::Response& res) {
        std::string acct = req.matches[1].str(), cont = req.matches[2].str();
        data_path(req, res, Action::List, Resource::container(acct, cont),
                  [&](httplib::Response& r) {
                      std::size_t max = 0;
                      if (req.has_param("max")) max = std::stoull(req.get_param_value("max"));
                      ListPage page = store_.list_blobs(acct, cont,
                                                        req.get_param_value("prefix"),
                                                        req.get_param_value("marker"), max);
                      json items = json::array();
                      for (const auto& m : page.items)
                          items.push_back(
                              {{"name", m.name},
                               {"size", m.size},
                               {"etag", m.etag},
                               {"type", m.type == BlobMeta::Type::Page ? "page" : "block"},
                               {"content_hash", m.content_hash}});
                      json j{{"items", items}};
                      j["next_marker"] =
                          page.next_marker ? json(*page.next_marker) : json(nullptr);
                      r.set_content(j.dump(), "application/json");
                  });
    });

    // --- data path: blobs ----------------------------------------------------

    svr.Put(blob_path, [this, data_path](const httplib::Request& req, httplib::Response& res) {
        std::string acct = req.matches[1].str(), cont = req.matches[2].str(),
                    blob = req.matches[3].str();
        Resource resource = Resource::blob(acct, cont, blob);
        std::string comp = req.get_param_value("comp");
        data_path(req, res, Action::Write, resource, [&](httplib::Response& r) {
            if (comp == "block") {
                std::string block_id = req.get_param_value("blockid");
                store_.put_block(acct, cont, blob, block_id, req.body);
                r.status = 201;
            } else if (comp == "blocklist") {
                std::vector<std::string> ids;
                std::istringstream ss(req.body);
                std::string line;
                while (std::getline(ss, line)) {
                    if (!line.empty() && line.back() == '\r') line.pop_back();
                    if (line.empty()) continue;
                    auto id = unescape_token(line);
                    if (!id) throw Error(Errc::InvalidBlockId, line);
                    ids.push_back(*id);
                }
                auto [etag, hash] = store_.commit_block_list(acct, cont, blob, ids);
                r.status = 201;
                r.set_header("ETag", etag);
                r.set_header("x-content-hash", hash);
                r.set_content(json{{"etag", etag}, {"content_hash", hash}}.dump(),
                              "application/json");
            } else if (comp == "page") {
                auto range = parse_content_range(req.get_header_value("Content-Range"));
                if (!range) throw Error(Errc::InvalidArgument, "Content-Range required");
                if (range->second - range->first != req.body.size())
                    throw Error(Errc::InvalidArgument, "Content-Range length mismatch");
                std::string etag = store_.put_pages(acct, cont, blob, range->first, req.body);
                r.status = 201;
                r.set_header("ETag", etag);
            } else if (comp == "clearpages") {
                auto range = parse_content_range(req.get_header_value("Content-Range"));
                if (!range) throw Error(Errc::InvalidArgument, "Content-Range required");
                std::string etag = store_.clear_pages(acct, cont, blob, range->first,
                                                      range->second - range->first);
                r.status = 201;
                r.set_header("ETag", etag);
            } else if (comp.empty()) {
                auto [etag, hash] = store_.put_blob(acct, cont, blob, req.body);
                r.status = 201;
                r.set_header("ETag", etag);
                r.set_header("x-content-hash", hash);
                r.set_content(json{{"etag", etag}, {"content_hash", hash}}.dump(),
                              "application/json");
            } else {
                throw Error(Errc::InvalidArgument, "unknown comp=" + comp);
            }
        });
    });

    svr.Post(blob_path, [this, data_path](const httplib::Request& req, httplib::Response& res) {
        std::string acct = req.matches[1].str(), cont = req.matches[2].str(),
                    blob = req.matches[3].str();
        Resource resource = Resource::blob(acct, cont, blob);
        data_path(req, res, Action::Write, resource, [&](httplib::Response& r) {
            if (req.get_param_value("comp") != "pageblob")
                throw Error(Errc::InvalidArgument, "expected comp=pageblob");
            std::uint64_t size = 0;
            try {
                size = std::stoull(req.get_param_value("size"));
            } catch (...) {
                throw Error(Errc::InvalidArgument, "size required");
            }
            std::string etag = store_.create_page_blob(acct, cont, blob, size);
            r.status = 201;
            r.set_header("ETag", etag);
        });
    });

    svr.Get(blob_path, [this, data_path](const httplib::Request& req, httplib::Response& res) {
        std::string acct = req.matches[1].str(), cont = req.matches[2].str(),
                    blob = req.matches[3].str();
        Resource resource = Resource::blob(acct, cont, blob);
        data_path(req, res, Action::Read, resource, [&](httplib::Response& r) {
            if (req.get_param_value("comp") == "pageranges") {
                json arr = json::array();
                for (auto [start, end] : store_.get_page_ranges(acct, cont, blob))
                    arr.push_back({{"start", start}, {"end", end}});
                r.set_content(json{{"ranges", arr}}.dump(), "application/json");
                return;
            }
            BlobMeta meta = store_.stat_blob(acct, cont, blob);
            // hand the HTTP layer the full content; with status 206 it slices
            // to the requested range itself (or rejects it with 416)
            std::string bytes = store_.get_blob(acct, cont, blob);
            r.status = req.ranges.empty() ? 200 : 206;
            r.set_header("ETag", meta.etag);
            if (!meta.content_hash.empty()) r.set_header("x-content-hash", meta.content_hash);
            r.set_content(std::move(bytes), "application/octet-stream");
        });
    });

    svr.Delete(blob_path, [this, data_path](const httplib::Request& req,
                                            httplib::Response& res) {
        std::string acct = req.matches[1].str(), cont = req.matches[2].str(),
                    blob = req.matches[3].str();
        data_path(req, res, Action::Delete, Resource::blob(acct, cont, blob),
                  [&](httplib::Response& r) {
                      store_.delete_blob(acct, cont, blob);
                      r.status = 204;
                  });
    });
}

}  // namespace blobgate
