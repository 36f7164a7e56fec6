// blobctl: operator and user command-line client for the blobgate server.
// Also hosts the server itself via `blobctl serve <config>`.

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "blobgate/config.hpp"
#include "blobgate/digest.hpp"
#include "blobgate/gateway.hpp"
#include "blobgate/textenc.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// exit codes, documented in the README
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNetwork = 2;
constexpr int kExitApi = 3;
constexpr int kExitThrottled = 4;
constexpr int kExitHashMismatch = 5;

struct CliConfig {
    std::string server = "http://127.0.0.1:8080";
    std::string token_file;
    bool json_output = false;
};

std::string default_token_file() {
    const char* home = std::getenv("HOME");
    return (home ? std::string(home) : std::string(".")) + "/.blobgate-token";
}

std::string read_token(const CliConfig& cfg) {
    std::ifstream in(cfg.token_file);
    std::string token;
    std::getline(in, token);
    return token;
}

void write_token(const CliConfig& cfg, const std::string& token) {
    std::ofstream out(cfg.token_file, std::ios::trunc);
    out << token << "\n";
    out.close();
    fs::permissions(cfg.token_file,
                    fs::perms::owner_read | fs::perms::owner_write,
                    fs::perm_options::replace);
}

class Api {
public:
    Api(const CliConfig& cfg) : cfg_(cfg), client_(cfg.server) {
        client_.set_read_timeout(60, 0);
        client_.set_write_timeout(60, 0);
        token_ = read_token(cfg);
    }

    httplib::Client& raw() { return client_; }
    const std::string& token() const { return token_; }

    httplib::Headers auth_headers() const {
        if (token_.empty()) return {};
        return {{"Authorization", "Bearer " + token_}};
    }

    // Unified response check. Exits the process on failure with the
    // documented exit code; returns the response on 2xx.
    httplib::Response check(const httplib::Result& result) {
        if (!result) {
            std::cerr << "network error: " << httplib::to_string(result.error()) << " ("
                      << cfg_.server << ")\n";
            std::exit(kExitNetwork);
        }
        if (result->status == 429) {
            std::string retry = result->get_header_value("Retry-After");
            std::cerr << "throttled; Retry-After: " << retry << "\n";
            std::exit(kExitThrottled);
        }
        if (result->status < 200 || result->status >= 300) {
            std::string name = "HTTP " + std::to_string(result->status);
            try {
                json body = json::parse(result->body);
                if (body.contains("error")) name = body["error"].get<std::string>();
            } catch (...) {
            }
            std::cerr << name << "\n";
            std::exit(kExitApi);
        }
        return *result;
    }

private:
    CliConfig cfg_;
    httplib::Client client_;
    std::string token_;
};

void emit(const CliConfig& cfg, const json& structured, const std::string& human) {
    if (cfg.json_output)
        std::cout << structured.dump() << "\n";
    else if (!human.empty())
        std::cout << human << "\n";
}

std::string blob_url(const std::string& acct, const std::string& cont, const std::string& blob) {
    return "/" + acct + "/" + cont + "/" + blob;
}

std::string read_file_or_exit(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot read " << path << "\n";
        std::exit(kExitConfig);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- serve ------------------------------------------------------------------

blobgate::Gateway* g_gateway = nullptr;

void handle_signal(int) {
    if (g_gateway) g_gateway->stop();
}

int run_serve(const std::string& config_path) {
    blobgate::ServerConfig config;
    try {
        config = blobgate::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    fs::path data_dir = config.data_dir;
    if (!fs::exists(data_dir)) {
        fs::path parent = data_dir.has_parent_path() ? data_dir.parent_path() : ".";
        if (!fs::exists(parent)) {
            std::cerr << "data directory parent does not exist: " << parent << "\n";
            return kExitConfig;
        }
        fs::create_directory(data_dir);
    }
    try {
        blobgate::SystemClock clock;
        blobgate::Gateway gateway(config, clock);
        gateway.load_state();
        if (!gateway.bind()) {
            std::cerr << "cannot bind " << config.listen_address << ":" << config.listen_port
                      << " (address in use?)\n";
            return kExitConfig;
        }
        g_gateway = &gateway;
        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);
        std::cout << "blobgate listening on " << config.listen_address << ":"
                  << config.listen_port << std::endl;
        gateway.run();
        gateway.save_state();  // clean shutdown persists a final snapshot
        g_gateway = nullptr;
    } catch (const std::exception& e) {
        std::cerr << "startup failed: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"blobgate client and server"};
    app.require_subcommand(1);

    CliConfig cfg;
    cfg.token_file = default_token_file();
    if (const char* env = std::getenv("BLOBGATE_SERVER")) cfg.server = env;
    if (const char* env = std::getenv("BLOBGATE_TOKEN_FILE")) cfg.token_file = env;
    app.add_option("--server", cfg.server, "server base URL");
    app.add_option("--token-file", cfg.token_file, "session token cache path");
    app.add_flag("--json", cfg.json_output, "structured output");

    // serve
    std::string config_path;
    auto* serve = app.add_subcommand("serve", "run the server");
    serve->add_option("config", config_path, "config file")->required();

    // login
    std::string user, credential, roles_csv;
    auto* login = app.add_subcommand("login", "create a session");
    login->add_option("--user", user)->required();
    login->add_option("--credential", credential)->required();
    login->add_option("--roles", roles_csv, "comma-separated roles to activate");

    // admin
    auto* admin = app.add_subcommand("admin", "administrative operations");
    admin->require_subcommand(1);

    std::string acct_name;
    std::uint64_t acct_cap = 0;
    auto* acct_create = admin->add_subcommand("account-create", "create a storage account");
    acct_create->add_option("name", acct_name)->required();
    auto* cap_opt = acct_create->add_option("--cap", acct_cap, "size cap in bytes");

    std::string role_name;
    std::int64_t max_members = -1;
    std::int64_t quota_limit = -1;
    std::uint32_t quota_window = 0;
    auto* role_create = admin->add_subcommand("role", "role operations");
    role_create->require_subcommand(1);
    auto* rc = role_create->add_subcommand("create");
    rc->add_option("name", role_name)->required();
    rc->add_option("--max-members", max_members, "member cap (omit for unbounded)");
    rc->add_option("--quota-limit", quota_limit, "transactions per window (omit for unbounded)");
    rc->add_option("--quota-window", quota_window, "window seconds");
    auto* rsc = role_create->add_subcommand("set-cardinality");
    std::string card_value;
    rsc->add_option("name", role_name)->required();
    rsc->add_option("max", card_value, "new cap or 'unbounded'")->required();

    std::string u_id, u_display, u_credential;
    auto* user_create = admin->add_subcommand("user-create", "create a user");
    user_create->add_option("id", u_id)->required();
    user_create->add_option("--credential", u_credential)->required();
    user_create->add_option("--display", u_display);

    std::string a_user, a_role, a_tier = "basic";
    auto* assign = admin->add_subcommand("assign", "assign a user to a role");
    assign->add_option("user", a_user)->required();
    assign->add_option("role", a_role)->required();
    assign->add_option("--tier", a_tier);
    auto* revoke = admin->add_subcommand("revoke", "revoke a user from a role");
    revoke->add_option("user", a_user)->required();
    revoke->add_option("role", a_role)->required();

    std::string p1, p2;
    auto* ssd = admin->add_subcommand("ssd", "static separation pairs");
    auto* ssd_add = ssd->add_subcommand("add");
    ssd_add->add_option("role1", p1)->required();
    ssd_add->add_option("role2", p2)->required();
    auto* dsd = admin->add_subcommand("dsd", "dynamic separation pairs");
    auto* dsd_add = dsd->add_subcommand("add");
    dsd_add->add_option("role1", p1)->required();
    dsd_add->add_option("role2", p2)->required();
    auto* inherit = admin->add_subcommand("inherit", "hierarchy edges");
    auto* inherit_add = inherit->add_subcommand("add");
    inherit_add->add_option("senior", p1)->required();
    inherit_add->add_option("junior", p2)->required();

    std::string perm_target, perm_action, perm_scope;
    auto* perm = admin->add_subcommand("perm", "permission grants");
    perm->require_subcommand(1);
    auto* grant_role = perm->add_subcommand("grant-role");
    grant_role->add_option("role", perm_target)->required();
    grant_role->add_option("action", perm_action)->required();
    grant_role->add_option("scope", perm_scope)->required();
    auto* grant_user = perm->add_subcommand("grant-user");
    grant_user->add_option("user", perm_target)->required();
    grant_user->add_option("action", perm_action)->required();
    grant_user->add_option("scope", perm_scope)->required();

    std::string tier_name;
    double tier_multiplier = 1.0;
    auto* tier = admin->add_subcommand("tier", "membership tiers");
    auto* tier_define = tier->add_subcommand("define");
    tier_define->add_option("name", tier_name)->required();
    tier_define->add_option("--multiplier", tier_multiplier)->required();

    std::string q_user;
    std::int64_t q_limit = -1;
    std::uint32_t q_window = 0;
    auto* quota_admin = admin->add_subcommand("quota", "per-user quota overrides");
    quota_admin->require_subcommand(1);
    auto* q_override = quota_admin->add_subcommand("override");
    q_override->add_option("user", q_user)->required();
    q_override->add_option("--limit", q_limit, "transactions per window (omit for unbounded)");
    q_override->add_option("--window", q_window, "window seconds");
    auto* q_clear = quota_admin->add_subcommand("clear");
    q_clear->add_option("user", q_user)->required();
    auto* q_show = quota_admin->add_subcommand("show");
    q_show->add_option("user", q_user)->required();

    // data path
    std::string d_acct, d_cont, d_blob, d_file, d_range, d_prefix;
    std::uint64_t block_size = 4ull << 20;
    unsigned parallel = 4;
    std::uint64_t pg_size = 0, pg_offset = 0, pg_length = 0;

    auto* put = app.add_subcommand("put", "single-shot blob upload");
    put->add_option("account", d_acct)->required();
    put->add_option("container", d_cont)->required();
    put->add_option("blob", d_blob)->required();
    put->add_option("file", d_file)->required();

    auto* put_blocks = app.add_subcommand("put-blocks", "staged multi-block upload");
    put_blocks->add_option("account", d_acct)->required();
    put_blocks->add_option("container", d_cont)->required();
    put_blocks->add_option("blob", d_blob)->required();
    put_blocks->add_option("file", d_file)->required();
    put_blocks->add_option("--block-size", block_size);
    put_blocks->add_option("--parallel", parallel, "concurrent block uploads");

    auto* get = app.add_subcommand("get", "download a blob");
    get->add_option("account", d_acct)->required();
    get->add_option("container", d_cont)->required();
    get->add_option("blob", d_blob)->required();
    get->add_option("file", d_file, "output file (stdout if omitted)");
    get->add_option("--range", d_range, "start-end (half-open)");

    auto* rm = app.add_subcommand("rm", "delete a blob");
    rm->add_option("account", d_acct)->required();
    rm->add_option("container", d_cont)->required();
    rm->add_option("blob", d_blob)->required();

    auto* ls = app.add_subcommand("ls", "list blobs in a container");
    ls->add_option("account", d_acct)->required();
    ls->add_option("container", d_cont)->required();
    ls->add_option("--prefix", d_prefix);

    auto* container = app.add_subcommand("container", "container operations");
    container->require_subcommand(1);
    auto* cont_create = container->add_subcommand("create");
    cont_create->add_option("account", d_acct)->required();
    cont_create->add_option("name", d_cont)->required();
    auto* cont_rm = container->add_subcommand("rm");
    bool cont_force = false;
    cont_rm->add_option("account", d_acct)->required();
    cont_rm->add_option("name", d_cont)->required();
    cont_rm->add_flag("--force", cont_force);

    auto* pages = app.add_subcommand("pages", "page blob operations");
    pages->require_subcommand(1);
    auto* pg_create = pages->add_subcommand("create");
    pg_create->add_option("account", d_acct)->required();
    pg_create->add_option("container", d_cont)->required();
    pg_create->add_option("blob", d_blob)->required();
    pg_create->add_option("--size", pg_size)->required();
    auto* pg_write = pages->add_subcommand("write");
    pg_write->add_option("account", d_acct)->required();
    pg_write->add_option("container", d_cont)->required();
    pg_write->add_option("blob", d_blob)->required();
    pg_write->add_option("file", d_file)->required();
    pg_write->add_option("--offset", pg_offset)->required();
    auto* pg_clear = pages->add_subcommand("clear");
    pg_clear->add_option("account", d_acct)->required();
    pg_clear->add_option("container", d_cont)->required();
    pg_clear->add_option("blob", d_blob)->required();
    pg_clear->add_option("--offset", pg_offset)->required();
    pg_clear->add_option("--length", pg_length)->required();
    auto* pg_ranges = pages->add_subcommand("ranges");
    pg_ranges->add_option("account", d_acct)->required();
    pg_ranges->add_option("container", d_cont)->required();
    pg_ranges->add_option("blob", d_blob)->required();

    auto* quota_status = app.add_subcommand("quota-status", "current window usage");

    CLI11_PARSE(app, argc, argv);

    if (serve->parsed()) return run_serve(config_path);

    Api api(cfg);

    if (login->parsed()) {
        json body{{"user", user}, {"credential", credential}};
        if (!roles_csv.empty()) {
            json roles = json::array();
            std::istringstream ss(roles_csv);
            std::string r;
            while (std::getline(ss, r, ',')) roles.push_back(r);
            body["roles"] = roles;
        }
        auto res = api.check(api.raw().Post("/auth/sessions", body.dump(), "application/json"));
        json j = json::parse(res.body);
        write_token(cfg, j.at("token").get<std::string>());
        emit(cfg, j, "session created; expires_at " + std::to_string(
                         j.at("expires_at").get<std::int64_t>()));
        return kExitOk;
    }

    auto headers = api.auth_headers();
    auto post_json = [&](const std::string& path, const json& body) {
        return api.check(api.raw().Post(path, headers, body.dump(), "application/json"));
    };
    auto put_json = [&](const std::string& path, const json& body) {
        return api.check(api.raw().Put(path, headers, body.dump(), "application/json"));
    };

    // --- admin ---
    if (acct_create->parsed()) {
        json body{{"name", acct_name}};
        if (cap_opt->count()) body["cap_bytes"] = acct_cap;
        post_json("/admin/accounts", body);
        emit(cfg, {{"account", acct_name}}, "account created: " + acct_name);
        return kExitOk;
    }
    if (rc->parsed()) {
        json body{{"name", role_name}};
        if (max_members >= 0) body["max_members"] = max_members;
        if (quota_limit >= 0) body["quota_limit"] = quota_limit;
        if (quota_window > 0) body["quota_window"] = quota_window;
        post_json("/admin/roles", body);
        emit(cfg, {{"role", role_name}}, "role created: " + role_name);
        return kExitOk;
    }
    if (rsc->parsed()) {
        json body;
        if (card_value == "unbounded")
            body["max_members"] = nullptr;
        else
            body["max_members"] = std::stoull(card_value);
        put_json("/admin/roles/" + role_name + "/cardinality", body);
        emit(cfg, {{"role", role_name}, {"max_members", card_value}}, "cardinality updated");
        return kExitOk;
    }
    if (user_create->parsed()) {
        post_json("/admin/users",
                  {{"id", u_id}, {"display_name", u_display}, {"credential", u_credential}});
        emit(cfg, {{"user", u_id}}, "user created: " + u_id);
        return kExitOk;
    }
    if (assign->parsed()) {
        post_json("/admin/assignments", {{"user", a_user}, {"role", a_role}, {"tier", a_tier}});
        emit(cfg, {{"user", a_user}, {"role", a_role}, {"tier", a_tier}}, "assigned");
        return kExitOk;
    }
    if (revoke->parsed()) {
        api.check(api.raw().Delete("/admin/assignments/" + a_user + "/" + a_role, headers));
        emit(cfg, {{"user", a_user}, {"role", a_role}}, "revoked");
        return kExitOk;
    }
    if (ssd_add->parsed()) {
        post_json("/admin/ssd", {{"role1", p1}, {"role2", p2}});
        emit(cfg, {{"ssd", {p1, p2}}}, "ssd pair added");
        return kExitOk;
    }
    if (dsd_add->parsed()) {
        post_json("/admin/dsd", {{"role1", p1}, {"role2", p2}});
        emit(cfg, {{"dsd", {p1, p2}}}, "dsd pair added");
        return kExitOk;
    }
    if (inherit_add->parsed()) {
        post_json("/admin/hierarchy", {{"senior", p1}, {"junior", p2}});
        emit(cfg, {{"senior", p1}, {"junior", p2}}, "inheritance added");
        return kExitOk;
    }
    if (grant_role->parsed()) {
        post_json("/admin/permissions/role",
                  {{"role", perm_target}, {"action", perm_action}, {"scope", perm_scope}});
        emit(cfg, {{"role", perm_target}}, "permission granted");
        return kExitOk;
    }
    if (grant_user->parsed()) {
        post_json("/admin/permissions/user",
                  {{"user", perm_target}, {"action", perm_action}, {"scope", perm_scope}});
        emit(cfg, {{"user", perm_target}}, "permission granted");
        return kExitOk;
    }
    if (tier_define->parsed()) {
        post_json("/admin/tiers", {{"name", tier_name}, {"multiplier", tier_multiplier}});
        emit(cfg, {{"tier", tier_name}, {"multiplier", tier_multiplier}}, "tier defined");
        return kExitOk;
    }
    if (q_override->parsed()) {
        json body = json::object();
        if (q_limit >= 0) body["base_limit"] = q_limit;
        if (q_window > 0) body["window_seconds"] = q_window;
        put_json("/admin/quotas/" + q_user, body);
        emit(cfg, {{"user", q_user}}, "quota override set");
        return kExitOk;
    }
    if (q_clear->parsed()) {
        api.check(api.raw().Delete("/admin/quotas/" + q_user, headers));
        emit(cfg, {{"user", q_user}}, "quota override cleared");
        return kExitOk;
    }
    if (q_show->parsed()) {
        auto res = api.check(api.raw().Get("/admin/quotas/" + q_user, headers));
        json j = json::parse(res.body);
        emit(cfg, j, j.dump(2));
        return kExitOk;
    }

    // --- data path ---
    if (cont_create->parsed()) {
        api.check(api.raw().Put("/" + d_acct + "/" + d_cont, headers, "", "text/plain"));
        emit(cfg, {{"container", d_cont}}, "container created: " + d_cont);
        return kExitOk;
    }
    if (cont_rm->parsed()) {
        std::string url = "/" + d_acct + "/" + d_cont + (cont_force ? "?force=true" : "");
        api.check(api.raw().Delete(url, headers));
        emit(cfg, {{"container", d_cont}}, "container deleted");
        return kExitOk;
    }
    if (put->parsed()) {
        std::string data = read_file_or_exit(d_file);
        auto res = api.check(api.raw().Put(blob_url(d_acct, d_cont, d_blob), headers, data,
                                           "application/octet-stream"));
        json j = json::parse(res.body);
        emit(cfg, j, "uploaded; content hash " + j.at("content_hash").get<std::string>());
        return kExitOk;
    }
    if (put_blocks->parsed()) {
        std::string data = read_file_or_exit(d_file);
        std::vector<std::string> ids;
        for (std::uint64_t off = 0, n = 0; off < data.size() || n == 0;
             off += block_size, ++n) {
            char id[32];
            std::snprintf(id, sizeof id, "b%08llu", static_cast<unsigned long long>(n));
            ids.emplace_back(id);
            if (data.empty()) break;
        }
        // bounded-parallel staging; commit only after every stage succeeded
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::mutex err_mu;
        std::string err_msg;
        int err_code = kExitApi;
        auto worker = [&] {
            httplib::Client c(cfg.server);
            c.set_read_timeout(60, 0);
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= ids.size() || failed.load()) return;
                std::string chunk = data.substr(i * block_size,
                                                std::min<std::uint64_t>(block_size,
                                                                        data.size() - i * block_size));
                auto res = c.Put(blob_url(d_acct, d_cont, d_blob) +
                                     "?comp=block&blockid=" + ids[i],
                                 headers, chunk, "application/octet-stream");
                if (!res || res->status < 200 || res->status >= 300) {
                    std::lock_guard lk(err_mu);
                    failed = true;
                    if (!res) {
                        err_msg = "network error staging block " + ids[i];
                        err_code = kExitNetwork;
                    } else if (res->status == 429) {
                        err_msg = "throttled; Retry-After: " + res->get_header_value("Retry-After");
                        err_code = kExitThrottled;
                    } else {
                        err_msg = "stage failed: HTTP " + std::to_string(res->status);
                        try {
                            err_msg = json::parse(res->body).at("error").get<std::string>();
                        } catch (...) {
                        }
                        err_code = kExitApi;
                    }
                    return;
                }
            }
        };
        std::vector<std::thread> threads;
        for (unsigned t = 0; t < std::max(1u, parallel); ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
        if (failed) {
            std::cerr << err_msg << "\n";
            return err_code;
        }
        std::string list;
        for (const auto& id : ids) list += blobgate::escape_token(id) + "\n";
        auto res = api.check(api.raw().Put(blob_url(d_acct, d_cont, d_blob) + "?comp=blocklist",
                                           headers, list, "text/plain"));
        json j = json::parse(res.body);
        std::string local_hash = blobgate::sha256_hex(data);
        if (j.at("content_hash").get<std::string>() != local_hash) {
            std::cerr << "hash mismatch: server " << j["content_hash"] << " local "
                      << local_hash << "\n";
            return kExitHashMismatch;
        }
        emit(cfg, j, "uploaded " + std::to_string(ids.size()) + " blocks; content hash " +
                         j.at("content_hash").get<std::string>());
        return kExitOk;
    }
    if (get->parsed()) {
        std::string url = blob_url(d_acct, d_cont, d_blob);
        httplib::Headers h = headers;
        bool ranged = false;
        if (!d_range.empty()) {
            auto dash = d_range.find('-');
            if (dash == std::string::npos) {
                std::cerr << "bad --range, expected start-end\n";
                return kExitConfig;
            }
            // half-open CLI range -> inclusive HTTP Range header
            std::uint64_t start = std::stoull(d_range.substr(0, dash));
            std::uint64_t end = std::stoull(d_range.substr(dash + 1));
            if (end == 0 || end <= start) {
                std::cerr << "bad --range, end must exceed start\n";
                return kExitConfig;
            }
            h.emplace("Range", "bytes=" + std::to_string(start) + "-" + std::to_string(end - 1));
            ranged = true;
        }
        auto res = api.check(api.raw().Get(url, h));
        std::string server_hash = res.get_header_value("x-content-hash");
        if (!ranged && !server_hash.empty() &&
            blobgate::sha256_hex(res.body) != server_hash) {
            std::cerr << "hash mismatch on download\n";
            return kExitHashMismatch;
        }
        if (d_file.empty()) {
            std::cout << res.body;
        } else {
            std::ofstream out(d_file, std::ios::binary | std::ios::trunc);
            out << res.body;
            if (!out) {
                std::cerr << "cannot write " << d_file << "\n";
                return kExitConfig;
            }
        }
        if (!d_file.empty())
            emit(cfg, {{"bytes", res.body.size()}, {"content_hash", server_hash}},
                 "downloaded " + std::to_string(res.body.size()) + " bytes");
        return kExitOk;
    }
    if (rm->parsed()) {
        api.check(api.raw().Delete(blob_url(d_acct, d_cont, d_blob), headers));
        emit(cfg, {{"deleted", d_blob}}, "deleted " + d_blob);
        return kExitOk;
    }
    if (ls->parsed()) {
        json all = json::array();
        std::string marker;
        while (true) {
            std::string url = "/" + d_acct + "/" + d_cont + "?max=1000";
            if (!d_prefix.empty()) url += "&prefix=" + d_prefix;
            if (!marker.empty()) url += "&marker=" + marker;
            auto res = api.check(api.raw().Get(url, headers));
            json j = json::parse(res.body);
            for (const auto& item : j.at("items")) {
                all.push_back(item);
                if (!cfg.json_output)
                    std::cout << item.at("name").get<std::string>() << "\t"
                              << item.at("size").get<std::uint64_t>() << "\n";
            }
            if (j.at("next_marker").is_null()) break;
            marker = j.at("next_marker").get<std::string>();
        }
        if (cfg.json_output) std::cout << json{{"items", all}}.dump() << "\n";
        return kExitOk;
    }
    if (pg_create->parsed()) {
        auto res = api.check(api.raw().Post(blob_url(d_acct, d_cont, d_blob) +
                                                "?comp=pageblob&size=" + std::to_string(pg_size),
                                            headers, "", "text/plain"));
        emit(cfg, {{"etag", res.get_header_value("ETag")}}, "page blob created");
        return kExitOk;
    }
    if (pg_write->parsed()) {
        std::string data = read_file_or_exit(d_file);
        httplib::Headers h = headers;
        h.emplace("Content-Range", "bytes " + std::to_string(pg_offset) + "-" +
                                       std::to_string(pg_offset + data.size() - 1));
        auto res = api.check(api.raw().Put(blob_url(d_acct, d_cont, d_blob) + "?comp=page", h,
                                           data, "application/octet-stream"));
        emit(cfg, {{"etag", res.get_header_value("ETag")}}, "pages written");
        return kExitOk;
    }
    if (pg_clear->parsed()) {
        httplib::Headers h = headers;
        h.emplace("Content-Range", "bytes " + std::to_string(pg_offset) + "-" +
                                       std::to_string(pg_offset + pg_length - 1));
        auto res = api.check(api.raw().Put(blob_url(d_acct, d_cont, d_blob) + "?comp=clearpages",
                                           h, "", "text/plain"));
        emit(cfg, {{"etag", res.get_header_value("ETag")}}, "pages cleared");
        return kExitOk;
    }
    if (pg_ranges->parsed()) {
        auto res = api.check(
            api.raw().Get(blob_url(d_acct, d_cont, d_blob) + "?comp=pageranges", headers));
        json j = json::parse(res.body);
        emit(cfg, j, j.dump(2));
        return kExitOk;
    }
    if (quota_status->parsed()) {
        auto res = api.check(api.raw().Get("/quota", headers));
        json j = json::parse(res.body);
        std::string remaining =
            j.at("remaining").is_null() ? "unbounded" : std::to_string(
                                                            j.at("remaining").get<std::uint64_t>());
        emit(cfg, j, "used " + std::to_string(j.at("count").get<std::uint64_t>()) +
                         ", remaining " + remaining);
        return kExitOk;
    }

    std::cerr << "no subcommand\n";
    return kExitConfig;
}
