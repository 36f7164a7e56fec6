#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace blobgate {

// Server configuration. JSON file; every key optional, defaults below.
// The shipped default config documents the service-scale caps; the test
// profile overrides them so the suite runs at desk scale.
struct ServerConfig {
    std::string listen_address = "127.0.0.1";
    int listen_port = 8080;

    std::filesystem::path data_dir = "data";
    std::filesystem::path audit_log = "audit.log";
    std::filesystem::path snapshot_file = "policy.snapshot";

    std::uint32_t session_ttl_seconds = 3600;
    std::uint32_t quota_window_seconds = 60;
    std::uint32_t snapshot_interval_seconds = 30;

    std::uint64_t max_block_size = 4ull << 20;
    std::uint64_t block_blob_cap = 200ull << 30;
    std::uint64_t page_blob_cap = 1ull << 40;
    std::uint64_t default_account_cap = 100ull << 40;

    // Bootstrap admin: created at first startup with a direct wildcard Admin
    // grant, so the policy can be administered over HTTP from a cold start.
    std::string admin_user = "root";
    std::string admin_credential;  // empty disables the bootstrap user
};

ServerConfig load_config(const std::filesystem::path& file);

}  // namespace blobgate
