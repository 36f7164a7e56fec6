#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "blobgate/audit.hpp"
#include "blobgate/blob_store.hpp"
#include "blobgate/clock.hpp"
#include "blobgate/config.hpp"
#include "blobgate/policy_store.hpp"
#include "blobgate/quota.hpp"

namespace httplib {
class Server;
}

namespace blobgate {

// The HTTP service binding the engines together. Data-path pipeline:
// authenticate, authorize, admit against the quota, execute, audit.
// Failures in the first three steps never reach the blob store.
class Gateway {
public:
    Gateway(const ServerConfig& config, const Clock& clock);
    ~Gateway();

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    // Loads the policy snapshot (when present), rebuilds the blob index, and
    // creates the bootstrap admin on a cold start.
    void load_state();
    void save_state();

    // Binds the configured address; false when the port is occupied.
    bool bind();
    // Serves until stop(); call after a successful bind().
    void run();
    // Binds to a free port and serves on a background thread (tests).
    int start_background();
    void stop();

    PolicyStore& policy() { return policy_; }
    QuotaEngine& quota() { return quota_; }
    BlobStore& store() { return store_; }
    AuditLog& audit() { return audit_; }
    const ServerConfig& config() const { return config_; }

private:
    void setup_routes();
    void snapshot_loop();

    ServerConfig config_;
    const Clock& clock_;
    PolicyStore policy_;
    BlobStore store_;
    QuotaEngine quota_;
    AuditLog audit_;
    std::unique_ptr<httplib::Server> server_;
    std::thread serve_thread_;
    std::thread snapshot_thread_;
    std::atomic<bool> stopping_{false};
};

}  // namespace blobgate
