#pragma once

#include <cstdint>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "blobgate/errors.hpp"

namespace blobgate {

struct AuditRecord {
    std::int64_t timestamp = 0;
    std::string user;        // "anonymous" when the request carried no valid session
    std::string action;
    std::string resource;
    std::string decision;    // Grant | Deny | Throttled
    std::string reason;
    std::string request_id;

    bool operator==(const AuditRecord&) const = default;
};

struct AuditReplay {
    std::vector<AuditRecord> records;
    // set when the final line was torn (crash mid-append); startup continues
    std::optional<std::string> warning;
};

// Append-only NDJSON audit log. Appends are serialized and flushed per
// record; timestamps within one file never decrease.
class AuditLog {
public:
    explicit AuditLog(std::string path);

    void append(const AuditRecord& record);
    const std::string& path() const { return path_; }

    static AuditReplay replay(const std::string& path);

private:
    void repair_torn_tail();

    std::string path_;
    std::mutex mu_;
    std::ofstream out_;
    std::int64_t last_ts_ = 0;
};

}  // namespace blobgate
