#include "blobgate/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

#include "blobgate/errors.hpp"

using nlohmann::json;

namespace blobgate {

ServerConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(Errc::IoError, "cannot read config " + file.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("config parse: ") + e.what());
    }
    ServerConfig c;
    c.listen_address = j.value("listen_address", c.listen_address);
    c.listen_port = j.value("listen_port", c.listen_port);
    c.data_dir = j.value("data_dir", c.data_dir.string());
    c.audit_log = j.value("audit_log", c.audit_log.string());
    c.snapshot_file = j.value("snapshot_file", c.snapshot_file.string());
    c.session_ttl_seconds = j.value("session_ttl_seconds", c.session_ttl_seconds);
    c.quota_window_seconds = j.value("quota_window_seconds", c.quota_window_seconds);
    c.snapshot_interval_seconds = j.value("snapshot_interval_seconds", c.snapshot_interval_seconds);
    c.max_block_size = j.value("max_block_size", c.max_block_size);
    c.block_blob_cap = j.value("block_blob_cap", c.block_blob_cap);
    c.page_blob_cap = j.value("page_blob_cap", c.page_blob_cap);
    c.default_account_cap = j.value("default_account_cap", c.default_account_cap);
    c.admin_user = j.value("admin_user", c.admin_user);
    c.admin_credential = j.value("admin_credential", c.admin_credential);
    if (c.quota_window_seconds == 0 || c.session_ttl_seconds == 0)
        throw Error(Errc::InvalidArgument, "ttl and window must be >= 1");
    return c;
}

}  // namespace blobgate
