#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "blobgate/policy_store.hpp"

namespace blobgate {

// Everything a restarted server needs to resume with identical policy:
// the RBAC state, quota overrides, and the account registry. Blob content
// lives in the data directory; sessions and window counters are volatile.
struct SnapshotData {
    PolicyData policy;
    std::map<std::string, QuotaPolicy> quota_overrides;
    std::vector<std::pair<std::string, std::uint64_t>> accounts;
    std::int64_t saved_at = 0;
};

inline constexpr int kSnapshotFormatVersion = 1;

// Versioned structured text file with a trailing integrity digest line.
// Saves write to a temp file and atomically rename; loads verify the digest
// before any state is applied.
void save_snapshot(const std::filesystem::path& file, const SnapshotData& data);
SnapshotData load_snapshot(const std::filesystem::path& file);

}  // namespace blobgate
